use std::time::Instant;

use anyhow::{bail, Result};
use ttc_core::engine::{run_with, EngineConfig, EngineError};
use ttc_core::scenario::{compute_metrics, generate, GeneratorConfig, MetricsRow, Population, QuotaPolicy};
use ttc_core::Instance64;

use crate::Status;

#[derive(clap::Args)]
pub struct Args {
    /// Agent counts to time.
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64,128")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    quota: u32,
    /// Agents as a share of all slots.
    #[arg(long, default_value_t = 1.0)]
    ratio: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Runs per size; the median is reported.
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    /// Cycles or chains enumerated per round before a size is abandoned.
    #[arg(long, default_value_t = EngineConfig::default().candidate_limit)]
    candidate_limit: usize,
}

/// Soft trend report: timings go to stdout as CSV, nothing is asserted.
pub fn exec(args: Args) -> Result<Status> {
    if args.quota == 0 || args.repeats == 0 || !(args.ratio > 0.0 && args.ratio <= 1.0) {
        bail!("--quota and --repeats must be positive and --ratio in (0, 1]");
    }
    let config = EngineConfig {
        candidate_limit: args.candidate_limit,
    };
    let mut w = csv::Writer::from_writer(std::io::stdout());
    for &size in &args.sizes {
        let slots = (size as f64 / args.ratio).ceil() as usize;
        let resources = slots.div_ceil(args.quota as usize).max(1);
        let inst: Instance64 = generate(&GeneratorConfig {
            seed: args.seed,
            resources,
            quota: QuotaPolicy::Uniform(args.quota),
            population: Population::Count(size),
            max_preferences: 8,
            ..Default::default()
        })?;
        let mut times = Vec::with_capacity(args.repeats);
        let mut last = None;
        for _ in 0..args.repeats {
            let start = Instant::now();
            match run_with(&inst, &config) {
                Ok(o) => last = Some(o),
                Err(e @ EngineError::CapacityExceeded { .. }) => {
                    eprintln!("size {size}: {e}");
                    break;
                }
                Err(e) => return Err(e.into()),
            }
            times.push(start.elapsed().as_secs_f64() * 1e3);
        }
        let Some(outcome) = last else { continue };
        times.sort_by(f64::total_cmp);
        let mut report = compute_metrics(&inst, &outcome.assignment)?;
        report.rounds = Some(outcome.rounds.len());
        report.millis = Some(times[times.len() / 2]);
        w.serialize(MetricsRow::new(format!("bench-{size}"), &inst, &report))?;
        w.flush()?;
    }
    Ok(Status::Ok)
}
