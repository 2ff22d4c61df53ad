//! Id-labelled round records for result files.

use serde::{Deserialize, Serialize};

use super::{Resolution, RoundTrace, TradingGraph, Vertex};
use crate::model::Instance;
use crate::Scalar;

/// Printable name of a vertex: the agent id, or `v<n>@<resource>` for a
/// virtual owner.
pub fn vertex_label<F: Scalar>(instance: &Instance<F>, graph: &TradingGraph<F>, v: Vertex) -> String {
    match v {
        Vertex::Agent(i) => instance.agents[i].id.to_string(),
        Vertex::Virtual(k) => match graph.virtual_resource(k) {
            Some(r) => format!("v{k}@{}", instance.resources[r].id),
            None => format!("v{k}"),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub from: String,
    pub to: String,
    pub resource: String,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub vertices: Vec<String>,
    pub score: f64,
    pub resolved: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeRecord>,
    pub cycles: Vec<CandidateRecord>,
    pub chains: Vec<CandidateRecord>,
    /// `(agent, resource)` pairs finalized this round.
    pub finalized: Vec<(String, String)>,
}

pub fn round_record<F: Scalar>(instance: &Instance<F>, trace: &RoundTrace<F>) -> RoundRecord {
    let g = &trace.graph;
    let label = |v| vertex_label(instance, g, v);
    let cands = |rs: &[Resolution<F>]| {
        rs.iter()
            .map(|r| CandidateRecord {
                vertices: r.vertices.iter().map(|&v| label(v)).collect(),
                score: r.score.to_f64().unwrap_or(f64::NAN),
                resolved: r.resolved,
            })
            .collect()
    };
    RoundRecord {
        round: trace.round,
        vertices: g.vertices().map(label).collect(),
        edges: g
            .edges()
            .iter()
            .map(|e| {
                let r = g
                    .out_edges(e.from.agent().unwrap())
                    .map(|o| instance.resources[o.resource].id.to_string())
                    .unwrap_or_default();
                EdgeRecord {
                    from: label(e.from),
                    to: label(e.to),
                    resource: r,
                    weight: e.weight.to_f64().unwrap_or(f64::NAN),
                }
            })
            .collect(),
        cycles: cands(&trace.cycles),
        chains: cands(&trace.chains),
        finalized: trace
            .finalized
            .iter()
            .map(|&(i, r)| {
                (
                    instance.agents[i].id.to_string(),
                    instance.resources[r].id.to_string(),
                )
            })
            .collect(),
    }
}

pub fn round_records<F: Scalar>(instance: &Instance<F>, rounds: &[RoundTrace<F>]) -> Vec<RoundRecord> {
    rounds.iter().map(|t| round_record(instance, t)).collect()
}
