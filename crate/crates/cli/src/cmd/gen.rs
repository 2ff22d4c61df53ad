use std::path::PathBuf;

use anyhow::{bail, Result};
use ttc_core::scenario::{
    emit, generate, small_market, EndowmentPolicy, GeneratorConfig, Population, QuotaPolicy, ScenarioFile,
};
use ttc_core::Instance64;

use crate::{io, Status};

#[derive(clap::Args)]
pub struct Args {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    resources: usize,
    /// Quota of every resource.
    #[arg(long, default_value_t = 2, conflicts_with = "max_quota")]
    quota: u32,
    /// Draw each quota uniformly from 1..=N instead.
    #[arg(long)]
    max_quota: Option<u32>,
    /// Agents as a share of all slots.
    #[arg(long, default_value_t = 1.0, conflicts_with = "agents")]
    ratio: f64,
    /// Exact number of agents.
    #[arg(long)]
    agents: Option<usize>,
    #[arg(long, default_value_t = 1)]
    min_prefs: usize,
    #[arg(long)]
    max_prefs: Option<usize>,
    /// Leave every agent without an endowment.
    #[arg(long)]
    unendowed: bool,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Emit the market `verify` would check for this seed and agent bound
    /// (ignores the shape flags above).
    #[arg(long, value_name = "MAX_AGENTS")]
    verify_market: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn exec(args: Args) -> Result<Status> {
    let instance: Instance64 = match args.verify_market {
        Some(0) => bail!("--verify-market needs at least one agent"),
        Some(k) => small_market(args.seed, k),
        None => generate(&GeneratorConfig {
            seed: args.seed,
            resources: args.resources,
            quota: match args.max_quota {
                Some(m) => QuotaPolicy::UpTo(m),
                None => QuotaPolicy::Uniform(args.quota),
            },
            population: match args.agents {
                Some(n) => Population::Count(n),
                None => Population::Ratio(args.ratio),
            },
            min_preferences: args.min_prefs,
            max_preferences: args.max_prefs.unwrap_or(usize::MAX),
            endowment: if args.unendowed {
                EndowmentPolicy::Unendowed
            } else {
                EndowmentPolicy::Endowed
            },
            alpha: args.alpha,
        })?,
    };
    io::emit(args.out.as_deref(), &emit(&ScenarioFile::new(instance)))?;
    Ok(Status::Ok)
}
