use anyhow::{bail, Result};
use clap::ValueEnum;
use rayon::prelude::*;
use ttc_core::classical::classical_ttc;
use ttc_core::model::Assignment;
use ttc_core::oracle::{
    check_individual_rationality, check_strategy_proofness_with, find_blocking_coalition, is_pareto_optimal,
    OracleBudget, OracleError,
};
use ttc_core::scenario::small_market;
use ttc_core::{run, Instance64};

use crate::Status;

/// Mechanism under test. `classical` ignores free capacity and exists to
/// confirm that the suite catches a broken engine.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mechanism {
    Engine,
    Classical,
}

#[derive(clap::Args)]
pub struct Args {
    #[arg(long, default_value_t = 200)]
    instances: u64,
    /// Instance k uses seed `seed + k`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 6)]
    max_agents: usize,
    #[arg(long, value_enum, default_value = "engine", hide = true)]
    mechanism: Mechanism,
}

const PROPERTIES: [&str; 5] = [
    "individual rationality",
    "pareto optimality",
    "core stability",
    "strategy-proofness",
    "termination",
];

struct Report {
    seed: u64,
    passed: [bool; 5],
    detail: Vec<String>,
}

pub fn exec(args: Args) -> Result<Status> {
    let budget = OracleBudget::default();
    if args.max_agents == 0 || args.max_agents > budget.max_agents.min(budget.max_coalition_agents) {
        bail!(
            "--max-agents must lie in 1..={}",
            budget.max_agents.min(budget.max_coalition_agents)
        );
    }
    let Some(last) = args.seed.checked_add(args.instances) else {
        bail!("--seed plus --instances overflows");
    };
    let reports: Vec<Report> = (args.seed..last)
        .into_par_iter()
        .map(|seed| check(seed, &args, &budget))
        .collect::<Result<_>>()?;

    println!("instances {}", reports.len());
    let mut failed = None;
    for (k, name) in PROPERTIES.iter().enumerate() {
        let ok = reports.iter().filter(|r| r.passed[k]).count();
        println!("{name:<24}{ok}/{}", reports.len());
        if let Some(r) = reports.iter().find(|r| !r.passed[k]) {
            failed.get_or_insert(r.seed);
            println!("  first failure at seed {}: {}", r.seed, r.detail[k]);
        }
    }
    match failed {
        None => Ok(Status::Ok),
        Some(seed) => {
            println!(
                "reproduce with: ttc verify --instances 1 --seed {seed} --max-agents {}",
                args.max_agents
            );
            Ok(Status::Violated)
        }
    }
}

fn mechanism(kind: Mechanism, inst: &Instance64) -> Result<(Assignment<f64>, usize), OracleError> {
    match kind {
        Mechanism::Engine => {
            let out = run(inst)?;
            Ok((out.assignment, out.rounds.len()))
        }
        Mechanism::Classical => Ok((classical_ttc(inst), 0)),
    }
}

fn check(seed: u64, args: &Args, budget: &OracleBudget) -> Result<Report> {
    let inst: Instance64 = small_market(seed, args.max_agents);
    let (assignment, rounds) = mechanism(args.mechanism, &inst)?;
    let mut detail = vec![String::new(); 5];

    let ir = check_individual_rationality(&inst, &assignment);
    detail[0] = format!("below endowment: {:?}", ir.offending);
    let pareto = is_pareto_optimal(&inst, &assignment, budget)?;
    if let Some(d) = &pareto.dominating {
        detail[1] = format!("dominated by {:?}", d.pairs());
    }
    let coalition = find_blocking_coalition(&inst, &assignment, budget)?;
    if let Some(c) = &coalition {
        detail[2] = format!("blocked by {:?}", c.agents);
    }
    let sp = check_strategy_proofness_with(&inst, budget, |i| Ok(mechanism(args.mechanism, i)?.0))?;
    if let Some(m) = &sp.counterexample {
        detail[3] = format!(
            "{} reports {:?} and gets {} instead of {}",
            m.agent.as_str(),
            m.misreport.iter().map(|r| r.as_str()).collect::<Vec<_>>(),
            m.manipulated_outcome.as_ref().map_or("-", |r| r.as_str()),
            m.truthful_outcome.as_ref().map_or("-", |r| r.as_str()),
        );
    }
    let bound = inst.agents.len() + inst.agents.iter().map(|a| a.preferences.len()).sum::<usize>();
    detail[4] = format!("{rounds} rounds exceed the bound {bound}");

    Ok(Report {
        seed,
        passed: [ir.rational, pareto.optimal, coalition.is_none(), sp.strategy_proof, rounds <= bound],
        detail,
    })
}
