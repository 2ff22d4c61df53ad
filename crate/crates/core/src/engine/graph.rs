use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::Scalar;

/// A trading-graph vertex. Real agents sort before virtual owners, and both
/// sort by index, which gives the canonical order used for tie-breaking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Vertex {
    /// Index of a real agent in the instance.
    Agent(usize),
    /// Serial number of a virtual owner of one free slot.
    Virtual(usize),
}

impl Vertex {
    pub fn is_virtual(self) -> bool {
        matches!(self, Vertex::Virtual(_))
    }

    pub fn agent(self) -> Option<usize> {
        match self {
            Vertex::Agent(i) => Some(i),
            Vertex::Virtual(_) => None,
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Agent(i) => write!(f, "A{i}"),
            Vertex::Virtual(k) => write!(f, "V{k}"),
        }
    }
}

/// Out-edges of one real vertex: one edge per current owner of the target
/// resource, all carrying the same weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutEdges<F> {
    pub resource: usize,
    pub weight: F,
    pub targets: Vec<Vertex>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge<F> {
    pub from: Vertex,
    pub to: Vertex,
    pub weight: F,
}

/// Directed weighted graph over real agents and virtual slot owners.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TradingGraph<F = f64> {
    vertices: BTreeSet<Vertex>,
    /// Live virtual vertices and the resource whose free slot each owns.
    virtual_slots: BTreeMap<usize, usize>,
    out: BTreeMap<usize, OutEdges<F>>,
}

impl<F: Scalar> TradingGraph<F> {
    pub fn with_agents(count: usize) -> Self {
        Self {
            vertices: (0..count).map(Vertex::Agent).collect(),
            virtual_slots: BTreeMap::new(),
            out: BTreeMap::new(),
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.vertices.iter().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    pub fn virtual_vertices(&self) -> impl Iterator<Item = (Vertex, usize)> + '_ {
        self.virtual_slots
            .iter()
            .map(|(&k, &r)| (Vertex::Virtual(k), r))
    }

    pub fn virtual_resource(&self, id: usize) -> Option<usize> {
        self.virtual_slots.get(&id).copied()
    }

    pub(crate) fn add_virtual(&mut self, id: usize, resource: usize) {
        self.vertices.insert(Vertex::Virtual(id));
        self.virtual_slots.insert(id, resource);
    }

    pub(crate) fn set_out_edges(&mut self, agent: usize, edges: OutEdges<F>) {
        debug_assert!(self.contains(Vertex::Agent(agent)));
        if edges.targets.is_empty() {
            self.out.remove(&agent);
        } else {
            self.out.insert(agent, edges);
        }
    }

    pub fn out_edges(&self, agent: usize) -> Option<&OutEdges<F>> {
        self.out.get(&agent)
    }

    pub fn successors(&self, v: Vertex) -> &[Vertex] {
        match v {
            Vertex::Agent(i) => self.out.get(&i).map(|e| &e.targets[..]).unwrap_or(&[]),
            Vertex::Virtual(_) => &[],
        }
    }

    pub fn out_degree(&self, v: Vertex) -> usize {
        self.successors(v).len()
    }

    pub fn weight(&self, from: Vertex, to: Vertex) -> Option<F> {
        let e = self.out.get(&from.agent()?)?;
        e.targets.contains(&to).then_some(e.weight)
    }

    /// All edges, ordered by source then by target insertion order.
    pub fn edges(&self) -> Vec<Edge<F>> {
        self.out
            .iter()
            .flat_map(|(&i, e)| {
                e.targets.iter().map(move |&to| Edge {
                    from: Vertex::Agent(i),
                    to,
                    weight: e.weight,
                })
            })
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.out.values().map(|e| e.targets.len()).sum()
    }

    /// Drops a vertex with every incident edge.
    pub fn remove_vertex(&mut self, v: Vertex) {
        self.vertices.remove(&v);
        match v {
            Vertex::Agent(i) => {
                self.out.remove(&i);
            }
            Vertex::Virtual(k) => {
                self.virtual_slots.remove(&k);
            }
        }
        self.out.retain(|_, e| {
            e.targets.retain(|&t| t != v);
            !e.targets.is_empty()
        });
    }

    /// Dense adjacency over the current vertex set, in canonical order.
    pub(crate) fn dense(&self) -> (Vec<Vertex>, Vec<Vec<usize>>) {
        let order: Vec<Vertex> = self.vertices.iter().copied().collect();
        let index: BTreeMap<Vertex, usize> =
            order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let adj = order
            .iter()
            .map(|&v| {
                let mut s: Vec<usize> = self
                    .successors(v)
                    .iter()
                    .filter_map(|t| index.get(t).copied())
                    .collect();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        (order, adj)
    }

    pub fn is_acyclic(&self) -> bool {
        let (_, adj) = self.dense();
        super::cycles::is_acyclic(&adj)
    }
}
