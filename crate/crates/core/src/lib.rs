//! Capacity-aware top trading cycles for reassigning agents to resources
//! with quotas.
//!
//! Agents that walked away from their assigned resource hold an endowment
//! slot and report a strict preference list. The [`engine`] trades slots
//! along cycles of a per-round graph in which co-owned resources give an
//! agent several out-edges and free capacity is represented by virtual
//! owners. Overlapping cycles are ordered by the prospect-theoretic
//! satisfaction their resolution protects.
//!
//! [`oracle`] holds exhaustive ground-truth checkers for small markets and
//! [`scenario`] the file format, random generator and metrics.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` / `*32` aliases below pin the common choices.

pub mod classical;
pub mod engine;
pub mod model;
pub mod oracle;
pub mod satisfaction;
pub mod scenario;

use std::fmt::{Debug, Display};

/// Floating-point type used for satisfaction arithmetic.
pub trait Scalar:
    num_traits::Float + num_traits::FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

pub use engine::{run, EngineConfig, EngineError, RunOutcome};
pub use model::{validate_instance, Agent, AgentId, Resource, ResourceId, Violation};
pub use satisfaction::SatisfactionParams;

pub type Instance64 = model::Instance<f64>;
pub type Instance32 = model::Instance<f32>;
pub type Assignment64 = model::Assignment<f64>;
pub type Assignment32 = model::Assignment<f32>;
pub type Params64 = satisfaction::SatisfactionParams<f64>;
pub type Params32 = satisfaction::SatisfactionParams<f32>;
pub type RunOutcome64 = engine::RunOutcome<f64>;
pub type RunOutcome32 = engine::RunOutcome<f32>;
pub type TradingGraph64 = engine::TradingGraph<f64>;
pub type RoundTrace64 = engine::RoundTrace<f64>;
