//! Rank-based and prospect-theoretic satisfaction.
//!
//! The reference point of every agent is its endowment. Acceptable resources
//! never rank below the endowment, so the gain `z` is non-negative on every
//! path the engine takes and only the gain branch of the value function runs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Agent, ResourceId};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatisfactionError {
    #[error("rank {rank} outside 1..={feasible_count}")]
    RankOutOfRange { feasible_count: usize, rank: usize },
    #[error("resource {0} is not acceptable to the agent")]
    NotAcceptable(ResourceId),
    #[error("resource {0} is not the head of the remaining preferences")]
    NotHead(ResourceId),
}

/// Value-function parameters. Only `alpha` influences mechanism results;
/// `beta` and `lambda` shape the loss branch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(
    serialize = "F: Serialize",
    deserialize = "F: Scalar + Deserialize<'de>"
))]
pub struct SatisfactionParams<F = f64> {
    pub alpha: F,
    #[serde(default = "default_beta")]
    pub beta: F,
    #[serde(default = "default_lambda")]
    pub lambda: F,
}

fn default_beta<F: Scalar>() -> F {
    F::from_f64(0.88).unwrap()
}

fn default_lambda<F: Scalar>() -> F {
    F::from_f64(2.25).unwrap()
}

impl<F: Scalar> Default for SatisfactionParams<F> {
    fn default() -> Self {
        Self::with_alpha(F::from_f64(0.5).unwrap())
    }
}

impl<F: Scalar> SatisfactionParams<F> {
    pub fn with_alpha(alpha: F) -> Self {
        Self {
            alpha,
            beta: default_beta(),
            lambda: default_lambda(),
        }
    }

    pub fn check(&self) -> Result<(), String> {
        let (zero, one) = (F::zero(), F::one());
        if !(self.alpha > zero && self.alpha <= one) {
            return Err(format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        if !(self.beta > zero && self.beta <= one) {
            return Err(format!("beta must lie in (0, 1], got {}", self.beta));
        }
        if self.lambda.is_nan() || self.lambda <= one {
            return Err(format!("lambda must exceed 1, got {}", self.lambda));
        }
        Ok(())
    }
}

/// Reference point of one agent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SatisfactionProfile<F = f64> {
    pub s_ref: F,
    pub z_max: F,
    pub feasible_count: usize,
}

impl<F: Scalar> SatisfactionProfile<F> {
    pub fn of(agent: &Agent) -> Self {
        let feasible_count = agent.feasible_count();
        let s_ref = agent
            .endowment_rank()
            .and_then(|rank| linear_score(feasible_count, rank).ok())
            .unwrap_or_else(F::zero);
        Self {
            s_ref,
            z_max: F::one() - s_ref,
            feasible_count,
        }
    }
}

/// Normalized linear score `(n - rank) / (n - 1)`; a single-option list scores 1.
pub fn linear_score<F: Scalar>(feasible_count: usize, rank: usize) -> Result<F, SatisfactionError> {
    if rank == 0 || rank > feasible_count {
        return Err(SatisfactionError::RankOutOfRange {
            feasible_count,
            rank,
        });
    }
    if feasible_count == 1 {
        return Ok(F::one());
    }
    let n = F::from_usize(feasible_count).unwrap();
    let r = F::from_usize(rank).unwrap();
    Ok((n - r) / (n - F::one()))
}

/// Prospect-theory value function.
pub fn pt_value<F: Scalar>(z: F, params: &SatisfactionParams<F>) -> F {
    if z >= F::zero() {
        z.powf(params.alpha)
    } else {
        -params.lambda * (-z).powf(params.beta)
    }
}

/// Normalized gain over the endowment raised to `alpha`.
pub fn pt_satisfaction<F: Scalar>(
    agent: &Agent,
    assigned: &ResourceId,
    params: &SatisfactionParams<F>,
) -> Result<F, SatisfactionError> {
    if !agent.is_acceptable(assigned) {
        return Err(SatisfactionError::NotAcceptable(assigned.clone()));
    }
    let profile = SatisfactionProfile::<F>::of(agent);
    // acceptable implies listed
    let rank = agent.rank_of(assigned).unwrap();
    let s = linear_score::<F>(profile.feasible_count, rank)?;
    Ok(normalized_gain(s, &profile, params))
}

fn normalized_gain<F: Scalar>(s: F, profile: &SatisfactionProfile<F>, params: &SatisfactionParams<F>) -> F {
    if profile.z_max <= F::zero() {
        return F::one();
    }
    let z = s - profile.s_ref;
    debug_assert!(z >= F::zero(), "loss branch reached on the acceptable set");
    // clamp guards the last ulp; z_max > 0 here
    let z_hat = (z / profile.z_max).max(F::zero()).min(F::one());
    pt_value(z_hat, params)
}

/// Satisfaction the agent gives up if it is pushed from `current` to the next
/// entry of `remaining`. With no next entry the fallback satisfaction is zero.
pub fn satisfaction_loss<F: Scalar>(
    agent: &Agent,
    current: &ResourceId,
    remaining: &[ResourceId],
    params: &SatisfactionParams<F>,
) -> Result<F, SatisfactionError> {
    match remaining.first() {
        Some(head) if head == current => {}
        _ => return Err(SatisfactionError::NotHead(current.clone())),
    }
    let here = pt_satisfaction(agent, current, params)?;
    let next = match remaining.get(1) {
        Some(r) => pt_satisfaction(agent, r, params)?,
        None => F::zero(),
    };
    Ok(here - next)
}
