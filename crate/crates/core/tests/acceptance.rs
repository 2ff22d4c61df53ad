//! One line per acceptance criterion; exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::{golden, one_to_one_market, round_bound, small_market, GOLDENS};
use ttc_core::classical::classical_ttc;
use ttc_core::engine::{run, Vertex};
use ttc_core::oracle::{
    check_individual_rationality, check_strategy_proofness, find_blocking_coalition, is_pareto_optimal, optimize,
    OracleBudget,
};
use ttc_core::scenario::{emit, result_document, ScenarioFile};
use ttc_core::Instance64;

const TOL: f64 = 5e-3;
const RANDOM_INSTANCES: u64 = 500;
const CLASSICAL_INSTANCES: u64 = 200;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn pairs(inst: &Instance64) -> Vec<(String, Option<String>)> {
    run(inst).unwrap().assignment.pairs()
}

fn want(expect: &[(&str, &str)]) -> Vec<(String, Option<String>)> {
    expect.iter().map(|(a, r)| (a.to_string(), Some(r.to_string()))).collect()
}

fn sats(inst: &Instance64) -> Vec<f64> {
    run(inst).unwrap().assignment.placements.iter().map(|p| p.satisfaction).collect()
}

fn close(got: &[f64], expect: &[f64]) -> bool {
    got.len() == expect.len() && got.iter().zip(expect).all(|(g, e)| (g - e).abs() <= TOL)
}

fn one_to_one_golden() -> Verdict {
    let inst = golden("fig2a").instance;
    let start = Instant::now();
    let got = pairs(&inst);
    let elapsed = start.elapsed();
    ensure(got == want(&[("a1", "r2"), ("a2", "r1"), ("a3", "r3")]), format!("assignment {got:?}"))?;
    ensure(elapsed < Duration::from_millis(10), format!("took {elapsed:?}"))?;
    Ok(format!("exact match in {elapsed:?}"))
}

fn free_slot_golden() -> Verdict {
    let inst = golden("fig2c").instance;
    let ours = run(&inst).unwrap().assignment;
    let classic = classical_ttc(&inst);
    let a3 = "a3".into();
    ensure(ours.resource_of(&a3).map(|r| r.as_str()) == Some("r1"), "engine does not give a3 r1")?;
    ensure(classic.resource_of(&a3).map(|r| r.as_str()) == Some("r3"), "classical TTC does not give a3 r3")?;
    Ok("a3:r1 vs classical a3:r3".into())
}

fn cycle_scores(inst: &Instance64) -> Vec<(usize, f64, bool)> {
    run(inst).unwrap().rounds[0]
        .cycles
        .iter()
        .map(|c| (c.vertices.iter().filter(|v| matches!(v, Vertex::Agent(_))).count(), c.score, c.resolved))
        .collect()
}

fn long_cycle_golden() -> Verdict {
    let inst = golden("fig3a").instance;
    let cycles = cycle_scores(&inst);
    ensure(cycles.len() == 2, format!("{} cycles in round 1", cycles.len()))?;
    let (l, s) = (cycles[0], cycles[1]);
    ensure(l.0 == 3 && (l.1 - 1.0).abs() <= TOL && l.2, format!("first cycle {l:?}"))?;
    ensure(s.0 == 2 && (s.1 - 0.29).abs() <= TOL && !s.2, format!("second cycle {s:?}"))?;
    let got = pairs(&inst);
    ensure(got == want(&[("a1", "r3"), ("a2", "r1"), ("a3", "r2"), ("a4", "r2")]), format!("{got:?}"))?;
    let s = sats(&inst);
    ensure(close(&s, &[1.0, 1.0, 1.0, 0.0]), format!("satisfactions {s:?}"))?;
    let total: f64 = s.iter().sum();
    ensure((total - 3.0).abs() <= 0.01, format!("total {total}"))?;
    Ok(format!("scores {:.2}/{:.2}, total {total:.2}", l.1, cycles[1].1))
}

fn short_cycle_golden() -> Verdict {
    let inst = golden("fig4a").instance;
    let cycles = cycle_scores(&inst);
    ensure(cycles.len() == 2, format!("{} cycles in round 1", cycles.len()))?;
    let (s, l) = (cycles[0], cycles[1]);
    ensure(s.0 == 2 && (s.1 - 1.0).abs() <= TOL && s.2, format!("first cycle {s:?}"))?;
    ensure(l.0 == 3 && (l.1 - 0.29).abs() <= TOL && !l.2, format!("second cycle {l:?}"))?;
    let got = pairs(&inst);
    ensure(got == want(&[("a1", "r2"), ("a2", "r1"), ("a3", "r2"), ("a4", "r3")]), format!("{got:?}"))?;
    let sv = sats(&inst);
    ensure(close(&sv, &[0.71, 1.0, 1.0, 1.0]), format!("satisfactions {sv:?}"))?;
    let total: f64 = sv.iter().sum();
    ensure((total - 3.71).abs() <= 0.01, format!("total {total}"))?;
    let (best, _) = optimize(&inst, &OracleBudget::default()).map_err(|e| e.to_string())?;
    ensure((best - 3.71).abs() <= 0.01, format!("oracle optimum {best}"))?;
    ensure((best - total).abs() <= 1e-9, format!("engine {total} below optimum {best}"))?;
    Ok(format!("total {total:.2} equals oracle optimum"))
}

fn chain_golden() -> Verdict {
    let inst = golden("fig5a").instance;
    let out = run(&inst).unwrap();
    let resolved: Vec<Vec<Vertex>> = out
        .rounds
        .iter()
        .flat_map(|r| r.cycles.iter().chain(&r.chains))
        .filter(|c| c.resolved)
        .map(|c| c.vertices.clone())
        .collect();
    ensure(resolved.contains(&vec![Vertex::Agent(0), Vertex::Agent(1)]), "cycle (a1,a2) not resolved")?;
    let chain = out.rounds.iter().flat_map(|r| &r.chains).find(|c| c.resolved);
    let chain_ok = chain.is_some_and(|c| {
        c.vertices[..3] == [Vertex::Agent(3), Vertex::Agent(4), Vertex::Agent(2)]
            && c.vertices.len() == 4
            && c.vertices[3].is_virtual()
    });
    ensure(chain_ok, format!("chain {chain:?}"))?;
    let got = pairs(&inst);
    let expect = want(&[("a1", "r2"), ("a2", "r1"), ("a3", "r1"), ("a4", "r4"), ("a5", "r3")]);
    ensure(got == expect, format!("{got:?}"))?;
    let s = sats(&inst);
    ensure(close(&s, &[1.0; 5]), format!("satisfactions {s:?}"))?;
    Ok("cycle then chain, all satisfied".into())
}

#[derive(Default)]
struct Tally {
    instances: u64,
    ir: u64,
    pareto: u64,
    core: u64,
    sp: u64,
    termination: u64,
    failures: Vec<String>,
}

impl Tally {
    fn mark(&mut self, ok: bool, field: fn(&mut Self) -> &mut u64, what: &str, seed: u64, detail: String) {
        if ok {
            *field(self) += 1;
        } else if self.failures.len() < 5 {
            self.failures.push(format!("{what} seed {seed}: {detail}"));
        }
    }
}

fn guarantee_suite() -> Verdict {
    let budget = OracleBudget::default();
    let start = Instant::now();
    let mut t = Tally::default();
    for seed in 0..RANDOM_INSTANCES {
        let inst = small_market(seed);
        t.instances += 1;
        let out = match run(&inst) {
            Ok(o) => o,
            Err(e) => {
                t.failures.push(format!("seed {seed}: engine error {e}"));
                continue;
            }
        };
        let a = &out.assignment;
        let ir = check_individual_rationality(&inst, a);
        t.mark(ir.rational, |t| &mut t.ir, "IR", seed, format!("{:?}", ir.offending));
        let p = is_pareto_optimal(&inst, a, &budget).map_err(|e| e.to_string())?;
        t.mark(p.optimal, |t| &mut t.pareto, "Pareto", seed, format!("{:?}", p.dominating.map(|d| d.pairs())));
        let c = find_blocking_coalition(&inst, a, &budget).map_err(|e| e.to_string())?;
        t.mark(c.is_none(), |t| &mut t.core, "core", seed, format!("{c:?}"));
        let sp = check_strategy_proofness(&inst, &budget).map_err(|e| e.to_string())?;
        t.mark(sp.strategy_proof, |t| &mut t.sp, "SP", seed, format!("{:?}", sp.counterexample));
        let bound = round_bound(&inst);
        t.mark(out.rounds.len() <= bound, |t| &mut t.termination, "termination", seed, format!(
            "{} rounds > {bound}",
            out.rounds.len()
        ));
    }
    let elapsed = start.elapsed();
    let n = t.instances;
    let summary = format!(
        "{n} instances in {:.1}s: IR {}/{n}, Pareto {}/{n}, core {}/{n}, SP {}/{n}, termination {}/{n}",
        elapsed.as_secs_f64(),
        t.ir,
        t.pareto,
        t.core,
        t.sp,
        t.termination
    );
    let all = [t.ir, t.pareto, t.core, t.sp, t.termination].iter().all(|&k| k == n);
    if all && elapsed < Duration::from_secs(300) {
        Ok(summary)
    } else {
        Err(format!("{summary}; first failures: {}", t.failures.join(" | ")))
    }
}

fn oracle_sandwich() -> Verdict {
    let budget = OracleBudget::default();
    let mut optimal = 0;
    for seed in 0..RANDOM_INSTANCES {
        let inst = small_market(seed);
        let total = run(&inst).unwrap().assignment.total_satisfaction();
        let (best, _) = optimize(&inst, &budget).map_err(|e| e.to_string())?;
        ensure(total >= 0.0, format!("seed {seed}: negative total {total}"))?;
        ensure(total <= best + 1e-9, format!("seed {seed}: engine {total} above optimum {best}"))?;
        if (best - total).abs() <= 1e-9 {
            optimal += 1;
        }
    }
    Ok(format!(
        "0 <= engine <= optimum on {RANDOM_INSTANCES}; optimum reached on {optimal} ({:.1}%)",
        100.0 * optimal as f64 / RANDOM_INSTANCES as f64
    ))
}

fn classical_reduction() -> Verdict {
    for seed in 0..CLASSICAL_INSTANCES {
        let inst = one_to_one_market(seed);
        let ours = run(&inst).unwrap().assignment;
        let classic = classical_ttc(&inst);
        ensure(ours == classic, format!("seed {seed}: {:?} vs {:?}", ours.pairs(), classic.pairs()))?;
    }
    Ok(format!("{CLASSICAL_INSTANCES}/{CLASSICAL_INSTANCES} identical"))
}

fn determinism() -> Verdict {
    let dir = std::env::temp_dir().join(format!("ttc-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut scenarios: Vec<(String, Instance64)> =
        GOLDENS.iter().map(|n| (n.to_string(), golden(n).instance)).collect();
    scenarios.extend((0..RANDOM_INSTANCES).map(|s| (format!("random-{s}"), small_market(s))));
    let result = (|| {
        for (name, inst) in &scenarios {
            // Round-trip through the file format, as a scenario on disk would be.
            let text = emit(&ScenarioFile::new(inst.clone()));
            let mut files = Vec::new();
            for pass in 0..2 {
                let parsed: ScenarioFile<f64> = ttc_core::scenario::parse(text.as_bytes()).map_err(|e| e.to_string())?;
                let out = run(&parsed.instance).map_err(|e| e.to_string())?;
                let doc = result_document(&parsed.instance, &out).map_err(|e| e.to_string())?;
                let path = dir.join(format!("{name}.{pass}.json"));
                std::fs::write(&path, doc).map_err(|e| e.to_string())?;
                files.push(std::fs::read(&path).map_err(|e| e.to_string())?);
            }
            ensure(files[0] == files[1], format!("{name}: result files differ"))?;
        }
        Ok(format!("{} scenarios byte-identical across two runs", scenarios.len()))
    })();
    let _ = std::fs::remove_dir_all(&dir);
    result
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("one-to-one golden", one_to_one_golden),
        ("free-slot golden", free_slot_golden),
        ("long-cycle golden", long_cycle_golden),
        ("short-cycle golden", short_cycle_golden),
        ("chain golden", chain_golden),
        ("guarantee suite", guarantee_suite),
        ("oracle sandwich", oracle_sandwich),
        ("classical reduction", classical_reduction),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
