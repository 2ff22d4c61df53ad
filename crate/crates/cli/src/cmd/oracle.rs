use anyhow::Result;
use ttc_core::oracle::{check_individual_rationality, find_blocking_coalition, is_pareto_optimal, optimize, OracleBudget};
use ttc_core::run;

use crate::{io, Status};

#[derive(clap::Args)]
pub struct Args {
    /// Scenario file, or `bundled:NAME`.
    scenario: String,
}

pub fn exec(args: Args) -> Result<Status> {
    let inst = io::load(&args.scenario)?.instance;
    let budget = OracleBudget::default();
    let assignment = run(&inst)?.assignment;
    let (best, _) = optimize(&inst, &budget)?;
    let total = assignment.total_satisfaction();
    let pareto = is_pareto_optimal(&inst, &assignment, &budget)?.optimal;
    let core = find_blocking_coalition(&inst, &assignment, &budget)?.is_none();
    let ir = check_individual_rationality(&inst, &assignment).rational;
    let yes = |b: bool| if b { "yes" } else { "no" };
    println!("engine total      {total:.4}");
    println!("oracle optimum    {best:.4}");
    println!("gap               {:.4}", (best - total).max(0.0));
    println!("pareto optimal    {}", yes(pareto));
    println!("core stable       {}", yes(core));
    println!("rational          {}", yes(ir));
    Ok(if pareto && core && ir { Status::Ok } else { Status::Violated })
}
