#![allow(dead_code)]

use ttc_core::scenario::{bundled, generate, parse, GeneratorConfig, Population, QuotaPolicy, ScenarioFile};
use ttc_core::Instance64;

pub const GOLDENS: [&str; 7] = ["fig2a", "fig2c", "fig3a", "fig4a", "fig5a", "fig6a", "fig6c"];

pub fn golden(name: &str) -> ScenarioFile<f64> {
    parse(bundled(name).expect("bundled scenario").as_bytes()).expect("bundled scenarios parse")
}

/// Endowed market with at most 6 agents, 2–4 resources and quotas up to 3.
pub fn small_market(seed: u64) -> Instance64 {
    ttc_core::scenario::small_market(seed, 6)
}

/// Fully endowed market in which every quota is 1.
pub fn one_to_one_market(seed: u64) -> Instance64 {
    let resources = 2 + (seed % 6) as usize;
    generate(&GeneratorConfig {
        seed,
        resources,
        quota: QuotaPolicy::Uniform(1),
        population: Population::Ratio(1.0),
        min_preferences: 1,
        max_preferences: resources,
        ..Default::default()
    })
    .unwrap()
}

/// Rounds may not exceed one per agent plus one per preference entry.
pub fn round_bound(inst: &Instance64) -> usize {
    inst.agents.len() + inst.agents.iter().map(|a| a.preferences.len()).sum::<usize>()
}
