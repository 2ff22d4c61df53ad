//! Seeded random markets.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Agent, Instance, Resource, ResourceId};
use crate::satisfaction::SatisfactionParams;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("inconsistent generator config: {0}")]
pub struct InconsistentConfig(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Population {
    /// Agents as a share of all slots, rounded down.
    Ratio(f64),
    Count(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuotaPolicy {
    Uniform(u32),
    /// Each resource draws its quota uniformly from `1..=max`.
    UpTo(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndowmentPolicy {
    /// Every agent holds a random slot; endowments never exceed quotas.
    Endowed,
    /// Nobody holds anything; all capacity is free.
    Unendowed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub resources: usize,
    pub quota: QuotaPolicy,
    pub population: Population,
    /// Preference-list length is drawn uniformly from this range and capped
    /// at the resource count.
    pub min_preferences: usize,
    pub max_preferences: usize,
    pub endowment: EndowmentPolicy,
    pub alpha: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            resources: 3,
            quota: QuotaPolicy::Uniform(2),
            population: Population::Ratio(1.0),
            min_preferences: 1,
            max_preferences: usize::MAX,
            endowment: EndowmentPolicy::Endowed,
            alpha: 0.5,
        }
    }
}

/// Builds a market from `config`. The same config always yields the same
/// instance. Preference lists are random orders of a random subset of
/// resources that always includes the endowment.
pub fn generate<F: Scalar>(config: &GeneratorConfig) -> Result<Instance<F>, InconsistentConfig> {
    let bad = |m: String| Err(InconsistentConfig(m));
    if config.resources == 0 {
        return bad("at least one resource is required".into());
    }
    if config.min_preferences == 0 || config.min_preferences > config.max_preferences {
        return bad(format!(
            "preference length range {}..={} is empty or starts at zero",
            config.min_preferences, config.max_preferences
        ));
    }
    match config.quota {
        QuotaPolicy::Uniform(0) | QuotaPolicy::UpTo(0) => return bad("quota must be positive".into()),
        _ => {}
    }
    let Some(alpha) = F::from_f64(config.alpha) else {
        return bad(format!("alpha {} is not representable", config.alpha));
    };
    let params = SatisfactionParams::with_alpha(alpha);
    if let Err(e) = params.check() {
        return bad(e);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let resources: Vec<Resource> = (0..config.resources)
        .map(|j| {
            let q = match config.quota {
                QuotaPolicy::Uniform(q) => q,
                QuotaPolicy::UpTo(m) => rng.gen_range(1..=m),
            };
            Resource::new(format!("r{}", j + 1), q)
        })
        .collect();
    let total: u64 = resources.iter().map(|r| u64::from(r.quota)).sum();

    let agents = match config.population {
        Population::Ratio(r) if !(r > 0.0 && r <= 1.0) => {
            return bad(format!("ratio {r} outside (0, 1]"))
        }
        Population::Ratio(r) => (r * total as f64).floor() as usize,
        Population::Count(n) => n,
    };

    let endowments: Vec<Option<usize>> = match config.endowment {
        EndowmentPolicy::Endowed => {
            if agents as u64 > total {
                return bad(format!("{agents} endowed agents exceed {total} slots"));
            }
            let mut slots: Vec<usize> = resources
                .iter()
                .enumerate()
                .flat_map(|(j, r)| std::iter::repeat_n(j, r.quota as usize))
                .collect();
            slots.shuffle(&mut rng);
            slots.truncate(agents);
            slots.into_iter().map(Some).collect()
        }
        EndowmentPolicy::Unendowed => vec![None; agents],
    };

    let max_len = config.max_preferences.min(config.resources);
    let min_len = config.min_preferences.min(max_len);
    let agents = endowments
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            let len = rng.gen_range(min_len..=max_len);
            let mut others: Vec<usize> = (0..config.resources).filter(|&j| Some(j) != e).collect();
            others.shuffle(&mut rng);
            let mut picked: Vec<usize> = e.into_iter().collect();
            picked.extend(others.into_iter().take(len - picked.len()));
            picked.shuffle(&mut rng);
            Agent {
                id: format!("a{}", i + 1).as_str().into(),
                endowment: e.map(|j| resources[j].id.clone()),
                preferences: picked
                    .into_iter()
                    .map(|j| resources[j].id.clone())
                    .collect::<Vec<ResourceId>>(),
            }
        })
        .collect();
    Ok(Instance::new(agents, resources, params))
}

/// Small endowed market for exhaustive checking: 2–4 resources with quotas
/// up to 3, between 2 and `max_agents` agents (fewer if slots run out), and
/// preference lists of up to 4 entries. Deterministic in `seed`.
pub fn small_market<F: Scalar>(seed: u64, max_agents: usize) -> Instance<F> {
    let resources = 2 + (seed % 3) as usize;
    let span = max_agents.saturating_sub(1).max(1) as u64;
    let mut agents = (2 + (seed / 3 % span) as usize).min(max_agents.max(1));
    loop {
        let cfg = GeneratorConfig {
            seed,
            resources,
            quota: QuotaPolicy::UpTo(3),
            population: Population::Count(agents),
            min_preferences: 1,
            max_preferences: 4,
            ..Default::default()
        };
        match generate(&cfg) {
            Ok(inst) => return inst,
            // only reachable when the drawn quotas hold fewer slots than agents
            Err(_) => agents -= 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_instance;

    #[test]
    fn same_seed_same_instance() {
        let cfg = GeneratorConfig {
            seed: 1,
            resources: 3,
            quota: QuotaPolicy::Uniform(2),
            population: Population::Count(6),
            ..Default::default()
        };
        let a: Instance<f64> = generate(&cfg).unwrap();
        let b: Instance<f64> = generate(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.agents.len(), 6);
        let c: Instance<f64> = generate(&GeneratorConfig { seed: 2, ..cfg }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn full_capacity_population() {
        let cfg = GeneratorConfig {
            resources: 30,
            quota: QuotaPolicy::Uniform(2),
            population: Population::Ratio(1.0),
            ..Default::default()
        };
        let inst: Instance<f64> = generate(&cfg).unwrap();
        assert_eq!(inst.agents.len(), 60);
        let cfg = GeneratorConfig { population: Population::Ratio(0.8), ..cfg };
        assert_eq!(generate::<f64>(&cfg).unwrap().agents.len(), 48);
    }

    #[test]
    fn too_many_endowed_agents() {
        let cfg = GeneratorConfig {
            resources: 2,
            quota: QuotaPolicy::Uniform(1),
            population: Population::Count(3),
            ..Default::default()
        };
        assert!(generate::<f64>(&cfg).is_err());
        let free = GeneratorConfig { endowment: EndowmentPolicy::Unendowed, ..cfg };
        assert!(validate_instance(&generate::<f64>(&free).unwrap()).is_empty());
    }

    #[test]
    fn small_markets_respect_their_bounds() {
        for seed in 0..2_000 {
            let inst: Instance<f64> = small_market(seed, 6);
            assert!(validate_instance(&inst).is_empty());
            assert!((1..=6).contains(&inst.agents.len()), "seed {seed}");
            assert!(inst.resources.len() <= 4 && inst.resources.iter().all(|r| r.quota <= 3));
        }
        assert!(small_market::<f64>(3, 1).agents.len() == 1);
    }

    #[test]
    fn bad_ranges() {
        let base = GeneratorConfig::default();
        assert!(generate::<f64>(&GeneratorConfig { resources: 0, ..base }).is_err());
        assert!(generate::<f64>(&GeneratorConfig { min_preferences: 0, ..base }).is_err());
        assert!(generate::<f64>(&GeneratorConfig { population: Population::Ratio(1.5), ..base }).is_err());
        assert!(generate::<f64>(&GeneratorConfig { quota: QuotaPolicy::UpTo(0), ..base }).is_err());
    }

    #[test]
    fn ten_thousand_seeds_validate() {
        for seed in 0..10_000u64 {
            let cfg = GeneratorConfig {
                seed,
                resources: 1 + (seed % 5) as usize,
                quota: QuotaPolicy::UpTo(3),
                population: Population::Ratio(0.25 + (seed % 4) as f64 * 0.25),
                min_preferences: 1,
                max_preferences: 4,
                ..Default::default()
            };
            let inst: Instance<f64> = generate(&cfg).unwrap();
            assert!(validate_instance(&inst).is_empty(), "seed {seed}");
            let expect = (match cfg.population {
                Population::Ratio(r) => r,
                _ => unreachable!(),
            } * inst.total_quota() as f64)
                .floor() as usize;
            assert_eq!(inst.agents.len(), expect);
        }
    }
}
