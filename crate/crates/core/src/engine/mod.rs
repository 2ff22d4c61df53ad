//! The reassignment mechanism.
//!
//! Each round has three steps:
//!
//! 1. every unassigned agent without out-edges points at all current owners
//!    of the head of its remaining preferences. Free slots of that resource
//!    get virtual owners first. The edge weight is the satisfaction the agent
//!    would lose by falling to its next preference.
//! 2. all simple cycles are enumerated, scored, and resolved in decreasing
//!    score order, skipping cycles that lost a vertex to an earlier trade.
//! 3. the now acyclic graph is searched for paths that end at a virtual
//!    owner; those are closed into cycles and resolved the same way.
//!
//! A candidate's score sums, over its vertices shared with another candidate
//! of the same step, the weight of the candidate's own edge into that vertex.
//! Equal scores fall back to the canonical order: smallest vertex first, then
//! shorter, then lexicographic.

mod cycles;
pub mod dot;
mod graph;
pub mod trace;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Assignment, Instance, ResourceId, Violation};
use crate::satisfaction::satisfaction_loss;
use crate::Scalar;

pub use cycles::{is_acyclic, paths_to_sinks, simple_cycles, LimitExceeded};
pub use graph::{Edge, OutEdges, TradingGraph, Vertex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid instance: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidInstance(Vec<Violation>),
    #[error("round {round}: more than {limit} candidate cycles or chains")]
    CapacityExceeded { round: usize, limit: usize },
    #[error("round {round} resolved nothing")]
    Stalled { round: usize },
    #[error("stale candidate: a vertex was already removed")]
    Stale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    /// Maximum cycles (and separately, chains) enumerated per round.
    pub candidate_limit: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            candidate_limit: 10_000,
        }
    }
}

/// A simple directed cycle, rotated to start at its smallest vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cycle<F = f64> {
    pub vertices: Vec<Vertex>,
    pub score: F,
}

/// A path from a real vertex to a virtual owner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainPath<F = f64> {
    pub vertices: Vec<Vertex>,
    pub score: F,
}

/// What happened to one candidate during a round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resolution<F = f64> {
    pub vertices: Vec<Vertex>,
    pub score: F,
    pub resolved: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundTrace<F = f64> {
    pub round: usize,
    /// Graph as built by step 1.
    pub graph: TradingGraph<F>,
    /// Cycles in resolution order.
    pub cycles: Vec<Resolution<F>>,
    /// Chains in resolution order.
    pub chains: Vec<Resolution<F>>,
    /// `(agent, resource)` index pairs finalized this round.
    pub finalized: Vec<(usize, usize)>,
}

/// Candidates in resolution order, and the (agent, resource) pairs finalized.
pub type StepLog<F> = (Vec<Resolution<F>>, Vec<(usize, usize)>);

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome<F = f64> {
    pub assignment: Assignment<F>,
    pub rounds: Vec<RoundTrace<F>>,
}

/// Mutable market state of one run.
#[derive(Clone, Debug)]
pub struct MarketState<'a, F: Scalar> {
    instance: &'a Instance<F>,
    /// Remaining acceptable preferences per agent (resource indices).
    prefs: Vec<Vec<usize>>,
    endowment: Vec<Option<usize>>,
    /// Current owner vertices per resource.
    owners: Vec<Vec<Vertex>>,
    /// Quota minus finalized occupants.
    residual: Vec<u32>,
    finalized: Vec<Option<usize>>,
    graph: TradingGraph<F>,
    next_virtual: usize,
}

impl<'a, F: Scalar> MarketState<'a, F> {
    pub fn new(instance: &'a Instance<F>) -> Result<Self, EngineError> {
        let violations = instance.validate();
        if !violations.is_empty() {
            return Err(EngineError::InvalidInstance(violations));
        }
        let index: BTreeMap<&ResourceId, usize> = instance
            .resources
            .iter()
            .enumerate()
            .map(|(j, r)| (&r.id, j))
            .collect();
        let prefs = instance
            .agents
            .iter()
            .map(|a| a.acceptable().iter().map(|r| index[r]).collect())
            .collect();
        let endowment: Vec<Option<usize>> = instance
            .agents
            .iter()
            .map(|a| a.endowment.as_ref().map(|r| index[r]))
            .collect();
        let mut owners = vec![Vec::new(); instance.resources.len()];
        for (i, e) in endowment.iter().enumerate() {
            if let Some(j) = e {
                owners[*j].push(Vertex::Agent(i));
            }
        }
        Ok(Self {
            instance,
            prefs,
            endowment,
            owners,
            residual: instance.resources.iter().map(|r| r.quota).collect(),
            finalized: vec![None; instance.agents.len()],
            graph: TradingGraph::with_agents(instance.agents.len()),
            next_virtual: 0,
        })
    }

    pub fn graph(&self) -> &TradingGraph<F> {
        &self.graph
    }

    pub fn remaining_preferences(&self, agent: usize) -> &[usize] {
        &self.prefs[agent]
    }

    pub fn finalized(&self) -> &[Option<usize>] {
        &self.finalized
    }

    pub fn owners(&self, resource: usize) -> &[Vertex] {
        &self.owners[resource]
    }

    pub fn residual_quota(&self, resource: usize) -> u32 {
        self.residual[resource]
    }

    /// True while some unassigned agent still has something to point at.
    pub fn has_pending(&self) -> bool {
        (0..self.prefs.len()).any(|i| self.graph.contains(Vertex::Agent(i)) && !self.prefs[i].is_empty())
    }

    /// Per resource: finalized occupants plus current owners never exceed the quota.
    pub fn capacity_holds(&self) -> bool {
        self.instance.resources.iter().enumerate().all(|(j, r)| {
            let placed = self.finalized.iter().filter(|f| **f == Some(j)).count() as u32;
            placed + self.residual[j] == r.quota && self.owners[j].len() as u32 <= self.residual[j]
        })
    }

    /// Step 1: give every edgeless agent with preferences edges to the owners
    /// of its most preferred remaining resource, minting virtual owners for
    /// that resource's unowned slots.
    pub fn build_round_graph(&mut self) {
        for i in 0..self.instance.agents.len() {
            let v = Vertex::Agent(i);
            if !self.graph.contains(v) || self.graph.out_degree(v) > 0 {
                continue;
            }
            let Some(&r) = self.prefs[i].first() else {
                continue;
            };
            debug_assert!(self.owners[r].len() as u32 <= self.residual[r]);
            let free = self.residual[r].saturating_sub(self.owners[r].len() as u32);
            for _ in 0..free {
                let id = self.next_virtual;
                self.next_virtual += 1;
                self.graph.add_virtual(id, r);
                self.owners[r].push(Vertex::Virtual(id));
            }
            let agent = &self.instance.agents[i];
            let remaining: Vec<ResourceId> = self.prefs[i]
                .iter()
                .map(|&j| self.instance.resources[j].id.clone())
                .collect();
            let weight = satisfaction_loss(agent, &remaining[0], &remaining, &self.instance.params)
                .expect("remaining preferences are acceptable");
            self.graph.set_out_edges(
                i,
                OutEdges {
                    resource: r,
                    weight,
                    targets: self.owners[r].clone(),
                },
            );
        }
    }

    fn slot_of(&self, v: Vertex) -> usize {
        match v {
            Vertex::Agent(i) => self.endowment[i].expect("owners are endowed"),
            Vertex::Virtual(k) => self.graph.virtual_resource(k).expect("live virtual owner"),
        }
    }

    /// Trades along a closed ring of vertices (`ring[k] -> ring[k + 1]`,
    /// last back to first): every real vertex takes the slot its successor
    /// owns. A virtual vertex only occurs at the end of a closed chain; its
    /// closing edge releases the head's endowed slot back to free capacity.
    fn trade(&mut self, ring: &[Vertex]) -> Result<Vec<(usize, usize)>, EngineError> {
        if ring.iter().any(|&v| !self.graph.contains(v)) {
            return Err(EngineError::Stale);
        }
        let mut done = Vec::with_capacity(ring.len());
        for k in 0..ring.len() {
            let (from, to) = (ring[k], ring[(k + 1) % ring.len()]);
            match from {
                Vertex::Agent(i) => {
                    let r = self.slot_of(to);
                    self.finalized[i] = Some(r);
                    self.owners[r].retain(|&o| o != to);
                    self.residual[r] -= 1;
                    done.push((i, r));
                    if self.residual[r] == 0 {
                        for p in &mut self.prefs {
                            p.retain(|&x| x != r);
                        }
                    }
                }
                Vertex::Virtual(_) => {
                    if let Vertex::Agent(h) = to {
                        if let Some(e) = self.endowment[h] {
                            self.owners[e].retain(|&o| o != to);
                        }
                    }
                }
            }
        }
        for &v in ring {
            self.graph.remove_vertex(v);
        }
        Ok(done)
    }

    pub fn resolve_cycle(&mut self, cycle: &Cycle<F>) -> Result<Vec<(usize, usize)>, EngineError> {
        debug_assert!(cycle.vertices.iter().all(|v| !v.is_virtual()));
        self.trade(&cycle.vertices)
    }

    pub fn resolve_chain(&mut self, path: &ChainPath<F>) -> Result<Vec<(usize, usize)>, EngineError> {
        debug_assert!(path.vertices.last().is_some_and(|v| v.is_virtual()));
        self.trade(&path.vertices)
    }

    /// Step 2. Returns the cycles in resolution order and what they finalized.
    pub fn resolve_complete_cycles(
        &mut self,
        limit: usize,
    ) -> Result<StepLog<F>, LimitExceeded> {
        let cycles = order_candidates(enumerate_simple_cycles(&self.graph, limit)?);
        let mut log = Vec::with_capacity(cycles.len());
        let mut done = Vec::new();
        for c in cycles {
            let resolved = match self.resolve_cycle(&c) {
                Ok(f) => {
                    done.extend(f);
                    true
                }
                Err(_) => false,
            };
            log.push(Resolution {
                vertices: c.vertices,
                score: c.score,
                resolved,
            });
        }
        debug_assert!(self.graph.is_acyclic());
        Ok((log, done))
    }

    /// Step 3. Returns the chains in resolution order and what they finalized.
    pub fn resolve_chains(
        &mut self,
        limit: usize,
    ) -> Result<StepLog<F>, LimitExceeded> {
        let paths: Vec<Cycle<F>> = find_chain_paths(&self.graph, limit)?
            .into_iter()
            .map(|p| Cycle {
                vertices: p.vertices,
                score: p.score,
            })
            .collect();
        let mut log = Vec::with_capacity(paths.len());
        let mut done = Vec::new();
        for c in order_candidates(paths) {
            let path = ChainPath {
                vertices: c.vertices,
                score: c.score,
            };
            let resolved = match self.resolve_chain(&path) {
                Ok(f) => {
                    done.extend(f);
                    true
                }
                Err(_) => false,
            };
            log.push(Resolution {
                vertices: path.vertices,
                score: path.score,
                resolved,
            });
        }
        Ok((log, done))
    }

    /// Final per-agent resource indices. Agents never finalized keep their endowment.
    pub fn into_choices(self) -> Vec<Option<usize>> {
        self.finalized
            .iter()
            .zip(&self.endowment)
            .map(|(f, e)| f.or(*e))
            .collect()
    }
}

/// Every simple cycle of the graph, scored. Output order is canonical
/// (lexicographic over rotations that start at the smallest vertex).
pub fn enumerate_simple_cycles<F: Scalar>(
    graph: &TradingGraph<F>,
    limit: usize,
) -> Result<Vec<Cycle<F>>, LimitExceeded> {
    let (order, adj) = graph.dense();
    let raw: Vec<Vec<Vertex>> = simple_cycles(&adj, limit)?
        .into_iter()
        .map(|c| c.into_iter().map(|i| order[i]).collect())
        .collect();
    let scores = score_all(graph, &raw, true);
    Ok(raw
        .into_iter()
        .zip(scores)
        .map(|(vertices, score)| Cycle { vertices, score })
        .collect())
}

/// Every maximal path ending at a virtual vertex, scored. Only meaningful on
/// an acyclic graph.
pub fn find_chain_paths<F: Scalar>(
    graph: &TradingGraph<F>,
    limit: usize,
) -> Result<Vec<ChainPath<F>>, LimitExceeded> {
    let (order, adj) = graph.dense();
    let sinks: Vec<bool> = order.iter().map(|v| v.is_virtual()).collect();
    let raw: Vec<Vec<Vertex>> = paths_to_sinks(&adj, &sinks, limit)?
        .into_iter()
        .map(|p| p.into_iter().map(|i| order[i]).collect())
        .collect();
    let scores = score_all(graph, &raw, false);
    Ok(raw
        .into_iter()
        .zip(scores)
        .map(|(vertices, score)| ChainPath { vertices, score })
        .collect())
}

fn score_all<F: Scalar>(graph: &TradingGraph<F>, all: &[Vec<Vertex>], closed: bool) -> Vec<F> {
    all.iter()
        .map(|c| score_candidate(c, closed, graph, all))
        .collect()
}

/// Priority of one cycle (`closed`) or chain among `all` candidates of its
/// step: the sum, over its vertices that also occur in another candidate, of
/// the weight of this candidate's edge into the vertex. A chain head has no
/// weighted in-edge and contributes nothing.
pub fn score_candidate<F: Scalar>(
    vertices: &[Vertex],
    closed: bool,
    graph: &TradingGraph<F>,
    all: &[Vec<Vertex>],
) -> F {
    let shared = |v: &Vertex| all.iter().filter(|c| c.contains(v)).count() >= 2;
    let mut score = F::zero();
    for (k, v) in vertices.iter().enumerate() {
        if !shared(v) {
            continue;
        }
        let pred = match k {
            0 if closed => vertices.last(),
            0 => None,
            _ => vertices.get(k - 1),
        };
        if let Some(&p) = pred {
            score = score + graph.weight(p, *v).unwrap_or_else(F::zero);
        }
    }
    score
}

/// Canonical tie-break key: smallest vertex, then length, then the sequence.
fn canonical_cmp(a: &[Vertex], b: &[Vertex]) -> Ordering {
    let min = |c: &[Vertex]| c.iter().min().copied();
    min(a)
        .cmp(&min(b))
        .then(a.len().cmp(&b.len()))
        .then_with(|| a.cmp(b))
}

fn order_candidates<F: Scalar>(mut cands: Vec<Cycle<F>>) -> Vec<Cycle<F>> {
    cands.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| canonical_cmp(&a.vertices, &b.vertices))
    });
    cands
}

/// Runs the mechanism with the default configuration.
pub fn run<F: Scalar>(instance: &Instance<F>) -> Result<RunOutcome<F>, EngineError> {
    run_with(instance, &EngineConfig::default())
}

pub fn run_with<F: Scalar>(
    instance: &Instance<F>,
    config: &EngineConfig,
) -> Result<RunOutcome<F>, EngineError> {
    let mut market = MarketState::new(instance)?;
    let mut rounds = Vec::new();
    while market.has_pending() {
        let round = rounds.len() + 1;
        let over = |_| EngineError::CapacityExceeded {
            round,
            limit: config.candidate_limit,
        };
        market.build_round_graph();
        let graph = market.graph.clone();
        let (cycles, mut finalized) = market
            .resolve_complete_cycles(config.candidate_limit)
            .map_err(over)?;
        let (chains, from_chains) = market.resolve_chains(config.candidate_limit).map_err(over)?;
        finalized.extend(from_chains);
        if finalized.is_empty() {
            return Err(EngineError::Stalled { round });
        }
        rounds.push(RoundTrace {
            round,
            graph,
            cycles,
            chains,
            finalized,
        });
    }
    let choices = market.into_choices();
    Ok(RunOutcome {
        assignment: Assignment::from_indices(instance, &choices),
        rounds,
    })
}
