use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use ttc_core::engine::dot::round_to_dot;
use ttc_core::engine::trace::{round_records, RoundRecord};
use ttc_core::run;

use crate::{io, Status};

#[derive(clap::Args)]
pub struct Args {
    /// Scenario file, or `bundled:NAME`.
    scenario: String,
    /// Directory for `round-NNN.dot` files and `trace.json`.
    #[arg(long)]
    dot: Option<PathBuf>,
}

pub fn exec(args: Args) -> Result<Status> {
    let inst = io::load(&args.scenario)?.instance;
    let outcome = run(&inst)?;
    let records = round_records(&inst, &outcome.rounds);
    if let Some(dir) = &args.dot {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for round in &outcome.rounds {
            let path = dir.join(format!("round-{:03}.dot", round.round));
            fs::write(&path, round_to_dot(&inst, round)).with_context(|| format!("writing {}", path.display()))?;
        }
        let log = serde_json::to_string_pretty(&records)? + "\n";
        let path = dir.join("trace.json");
        fs::write(&path, log).with_context(|| format!("writing {}", path.display()))?;
    }
    let mut text = String::new();
    for r in &records {
        render(&mut text, r);
    }
    text.push_str("final");
    for (agent, resource) in outcome.assignment.pairs() {
        let _ = write!(text, " {agent}:{}", resource.as_deref().unwrap_or("-"));
    }
    text.push('\n');
    io::emit(None, &text)?;
    Ok(Status::Ok)
}

fn render(out: &mut String, r: &RoundRecord) {
    let _ = writeln!(
        out,
        "round {}: {} vertices, {} edges, {} cycles, {} chains",
        r.round,
        r.vertices.len(),
        r.edges.len(),
        r.cycles.len(),
        r.chains.len()
    );
    for e in &r.edges {
        let _ = writeln!(out, "  edge {} -> {} via {} weight {:.4}", e.from, e.to, e.resource, e.weight);
    }
    for (kind, list) in [("cycle", &r.cycles), ("chain", &r.chains)] {
        for c in list {
            let _ = writeln!(
                out,
                "  {kind} {} score {:.4} {}",
                c.vertices.join(" -> "),
                c.score,
                if c.resolved { "resolved" } else { "skipped" }
            );
        }
    }
    let done: Vec<String> = r.finalized.iter().map(|(a, res)| format!("{a}:{res}")).collect();
    let _ = writeln!(out, "  finalized {}", done.join(" "));
}
