use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, Result};
use clap::ValueEnum;
use ttc_core::run;
use ttc_core::scenario::{result_document, MetricsRow};

use crate::{io, Status};

#[derive(Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(clap::Args)]
pub struct Args {
    /// Scenario file, or `bundled:NAME`.
    scenario: String,
    /// Override the scenario's value-function curvature.
    #[arg(long)]
    alpha: Option<f64>,
    /// Result file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

pub fn exec(args: Args) -> Result<Status> {
    let mut file = io::load(&args.scenario)?;
    if let Some(alpha) = args.alpha {
        file.instance.params.alpha = alpha;
        file.instance.params.check().map_err(|e| anyhow!("--alpha: {e}"))?;
    }
    let start = Instant::now();
    let outcome = run(&file.instance)?;
    let millis = start.elapsed().as_secs_f64() * 1e3;

    let text = match args.format {
        Format::Json => result_document(&file.instance, &outcome)?,
        Format::Csv => {
            let mut report = ttc_core::scenario::compute_metrics(&file.instance, &outcome.assignment)?;
            report.rounds = Some(outcome.rounds.len());
            let name = args.scenario.rsplit('/').next().unwrap_or(&args.scenario);
            let name = name.trim_start_matches("bundled:").trim_end_matches(".scenario");
            let mut w = csv::Writer::from_writer(Vec::new());
            w.serialize(MetricsRow::new(name, &file.instance, &report))?;
            String::from_utf8(w.into_inner()?)?
        }
    };
    io::emit(args.out.as_deref(), &text)?;
    eprintln!("elapsed {millis:.3} ms");

    let Some(expected) = &file.expected else {
        return Ok(Status::Ok);
    };
    let diff = expected.compare(&outcome.assignment);
    if diff.is_empty() {
        eprintln!("matches expected output");
        Ok(Status::Ok)
    } else {
        for d in &diff {
            eprintln!("mismatch: {d}");
        }
        Ok(Status::Violated)
    }
}
