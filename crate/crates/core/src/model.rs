//! Market domain objects: agents, resources, instances and assignments.
//!
//! Agents keep their full reported preference list. The acceptable prefix
//! (everything up to and including the endowment) is what the mechanism
//! trades over; the full list is kept so that the linear score keeps its
//! original normalization and scenario files round-trip unchanged.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::satisfaction::{self, SatisfactionParams};
use crate::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub String);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ResourceId(pub String);

impl AgentId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl ResourceId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for ResourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for AgentId {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

impl From<&str> for ResourceId {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

/// A resource with its residual quota (capacity left after compliant agents).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resource {
    pub id: ResourceId,
    pub quota: u32,
}

impl Resource {
    pub fn new(id: impl Into<String>, quota: u32) -> Self {
        Self {
            id: ResourceId::new(id),
            quota,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Agent {
    pub id: AgentId,
    #[serde(default)]
    pub endowment: Option<ResourceId>,
    /// Strict preference order over the agent's feasible set, best first.
    pub preferences: Vec<ResourceId>,
}

impl Agent {
    pub fn new<I, S>(id: impl Into<String>, endowment: Option<&str>, preferences: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            id: AgentId::new(id),
            endowment: endowment.map(ResourceId::new),
            preferences: preferences.into_iter().map(|r| ResourceId(r.into())).collect(),
        }
    }

    /// Size of the reported feasible set.
    pub fn feasible_count(&self) -> usize {
        self.preferences.len()
    }

    /// The preference prefix ending at the endowment. Resources ranked below
    /// the endowment can never be assigned. Unendowed agents keep the full list.
    pub fn acceptable(&self) -> &[ResourceId] {
        match self.endowment.as_ref().and_then(|e| self.position(e)) {
            Some(pos) => &self.preferences[..=pos],
            None => &self.preferences,
        }
    }

    pub fn is_acceptable(&self, resource: &ResourceId) -> bool {
        self.acceptable().contains(resource)
    }

    fn position(&self, resource: &ResourceId) -> Option<usize> {
        self.preferences.iter().position(|r| r == resource)
    }

    /// 1-based position of `resource` in the preference list.
    pub fn rank_of(&self, resource: &ResourceId) -> Option<usize> {
        self.position(resource).map(|p| p + 1)
    }

    pub fn endowment_rank(&self) -> Option<usize> {
        self.endowment.as_ref().and_then(|e| self.rank_of(e))
    }

    /// True when the agent strictly prefers `a` over `b`, where `None` means
    /// unassigned and ranks below every listed resource.
    pub fn prefers(&self, a: Option<&ResourceId>, b: Option<&ResourceId>) -> bool {
        self.outcome_rank(a) < self.outcome_rank(b)
    }

    /// Rank used when comparing outcomes; unassigned or unlisted outcomes sort last.
    pub fn outcome_rank(&self, resource: Option<&ResourceId>) -> usize {
        resource
            .and_then(|r| self.rank_of(r))
            .unwrap_or(self.preferences.len() + 1)
    }
}

/// 1-based rank of `resource` in the agent's preference list.
pub fn assigned_rank(agent: &Agent, resource: &ResourceId) -> Result<usize, ModelError> {
    agent
        .rank_of(resource)
        .ok_or_else(|| ModelError::NotInPreferences {
            agent: agent.id.clone(),
            resource: resource.clone(),
        })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("resource {resource} is not in the preference list of agent {agent}")]
    NotInPreferences { agent: AgentId, resource: ResourceId },
    #[error("unknown agent {0}")]
    UnknownAgent(AgentId),
    #[error("unknown resource {0}")]
    UnknownResource(ResourceId),
    #[error("assignment does not match the instance: {0}")]
    Mismatch(String),
}

/// A well-formedness problem found by [`validate_instance`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateAgent { agent: AgentId },
    DuplicateResource { resource: ResourceId },
    ZeroQuota { resource: ResourceId },
    IdCollision { id: String },
    DuplicatePreference { agent: AgentId, resource: ResourceId },
    UnknownPreference { agent: AgentId, resource: ResourceId },
    UnknownEndowment { agent: AgentId, resource: ResourceId },
    EndowmentNotPreferred { agent: AgentId, resource: ResourceId },
    EndowmentsExceedQuota { resource: ResourceId, endowed: usize, quota: u32 },
    InvalidParams { reason: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateAgent { agent } => write!(f, "duplicate agent id {agent}"),
            Violation::DuplicateResource { resource } => {
                write!(f, "duplicate resource id {resource}")
            }
            Violation::ZeroQuota { resource } => write!(f, "resource {resource} has quota 0"),
            Violation::IdCollision { id } => {
                write!(f, "id {id} is used by both an agent and a resource")
            }
            Violation::DuplicatePreference { agent, resource } => {
                write!(f, "agent {agent} lists resource {resource} more than once")
            }
            Violation::UnknownPreference { agent, resource } => {
                write!(f, "agent {agent} prefers unknown resource {resource}")
            }
            Violation::UnknownEndowment { agent, resource } => {
                write!(f, "agent {agent} is endowed with unknown resource {resource}")
            }
            Violation::EndowmentNotPreferred { agent, resource } => write!(
                f,
                "agent {agent} is endowed with {resource} but does not list it"
            ),
            Violation::EndowmentsExceedQuota {
                resource,
                endowed,
                quota,
            } => write!(
                f,
                "resource {resource} has {endowed} endowed agents but quota {quota}"
            ),
            Violation::InvalidParams { reason } => write!(f, "invalid parameters: {reason}"),
        }
    }
}

/// The reassignment market.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "F: Serialize",
    deserialize = "F: crate::Scalar + Deserialize<'de>"
))]
pub struct Instance<F = f64> {
    pub agents: Vec<Agent>,
    pub resources: Vec<Resource>,
    pub params: SatisfactionParams<F>,
}

impl<F: Scalar> Instance<F> {
    pub fn new(agents: Vec<Agent>, resources: Vec<Resource>, params: SatisfactionParams<F>) -> Self {
        Self {
            agents,
            resources,
            params,
        }
    }

    pub fn agent_index(&self, id: &AgentId) -> Option<usize> {
        self.agents.iter().position(|a| &a.id == id)
    }

    pub fn resource_index(&self, id: &ResourceId) -> Option<usize> {
        self.resources.iter().position(|r| &r.id == id)
    }

    pub fn agent(&self, id: &AgentId) -> Option<&Agent> {
        self.agents.iter().find(|a| &a.id == id)
    }

    pub fn resource(&self, id: &ResourceId) -> Option<&Resource> {
        self.resources.iter().find(|r| &r.id == id)
    }

    pub fn total_quota(&self) -> u64 {
        self.resources.iter().map(|r| u64::from(r.quota)).sum()
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_instance(self)
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Copy of the instance with one agent's preference list replaced.
    pub fn with_preferences(&self, agent: usize, preferences: Vec<ResourceId>) -> Self {
        let mut out = self.clone();
        out.agents[agent].preferences = preferences;
        out
    }
}

/// Collects every violated well-formedness rule. An empty result means the
/// instance is valid.
pub fn validate_instance<F: Scalar>(instance: &Instance<F>) -> Vec<Violation> {
    let mut out = Vec::new();

    if let Err(reason) = instance.params.check() {
        out.push(Violation::InvalidParams { reason });
    }

    let mut quotas: BTreeMap<&ResourceId, u32> = BTreeMap::new();
    for r in &instance.resources {
        if quotas.insert(&r.id, r.quota).is_some() {
            out.push(Violation::DuplicateResource {
                resource: r.id.clone(),
            });
        }
        if r.quota == 0 {
            out.push(Violation::ZeroQuota {
                resource: r.id.clone(),
            });
        }
    }

    let mut seen_agents = std::collections::BTreeSet::new();
    let mut endowed: BTreeMap<&ResourceId, usize> = BTreeMap::new();
    for a in &instance.agents {
        if !seen_agents.insert(&a.id) {
            out.push(Violation::DuplicateAgent { agent: a.id.clone() });
        }
        if quotas.keys().any(|r| r.0 == a.id.0) {
            out.push(Violation::IdCollision { id: a.id.0.clone() });
        }

        let mut listed = std::collections::BTreeSet::new();
        for r in &a.preferences {
            if !listed.insert(r) {
                out.push(Violation::DuplicatePreference {
                    agent: a.id.clone(),
                    resource: r.clone(),
                });
            } else if !quotas.contains_key(r) {
                out.push(Violation::UnknownPreference {
                    agent: a.id.clone(),
                    resource: r.clone(),
                });
            }
        }

        if let Some(e) = &a.endowment {
            if !quotas.contains_key(e) {
                out.push(Violation::UnknownEndowment {
                    agent: a.id.clone(),
                    resource: e.clone(),
                });
            } else {
                *endowed.entry(e).or_default() += 1;
            }
            if !a.preferences.contains(e) {
                out.push(Violation::EndowmentNotPreferred {
                    agent: a.id.clone(),
                    resource: e.clone(),
                });
            }
        }
    }

    for r in &instance.resources {
        let count = endowed.get(&r.id).copied().unwrap_or(0);
        if count > r.quota as usize {
            out.push(Violation::EndowmentsExceedQuota {
                resource: r.id.clone(),
                endowed: count,
                quota: r.quota,
            });
        }
    }
    out
}

/// Outcome for one agent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Placement<F = f64> {
    pub agent: AgentId,
    pub resource: Option<ResourceId>,
    /// 1-based rank of `resource` in the agent's preference list.
    pub rank: Option<usize>,
    pub satisfaction: F,
}

/// Final one-to-many mapping between agents and resources.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assignment<F = f64> {
    /// One entry per agent, in instance order.
    pub placements: Vec<Placement<F>>,
    /// Occupants per resource, in instance order.
    pub occupants: Vec<(ResourceId, Vec<AgentId>)>,
}

/// A broken assignment invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AssignmentViolation {
    AgentCount { expected: usize, found: usize },
    AgentOrder { index: usize },
    OverQuota { resource: ResourceId, occupants: usize, quota: u32 },
    Inconsistent { agent: AgentId },
    Infeasible { agent: AgentId, resource: ResourceId },
    UnknownResource { resource: ResourceId },
}

impl<F: Scalar> Assignment<F> {
    /// Builds an assignment from per-agent resource indices (instance order).
    /// Satisfaction is the prospect-theoretic score; agents outside their
    /// acceptable set score zero.
    pub fn from_indices(instance: &Instance<F>, choice: &[Option<usize>]) -> Self {
        assert_eq!(choice.len(), instance.agents.len());
        let mut occupants: Vec<(ResourceId, Vec<AgentId>)> = instance
            .resources
            .iter()
            .map(|r| (r.id.clone(), Vec::new()))
            .collect();
        let placements = instance
            .agents
            .iter()
            .zip(choice)
            .map(|(agent, &c)| {
                let resource = c.map(|j| instance.resources[j].id.clone());
                if let Some(j) = c {
                    occupants[j].1.push(agent.id.clone());
                }
                let rank = resource.as_ref().and_then(|r| agent.rank_of(r));
                let satisfaction = resource
                    .as_ref()
                    .and_then(|r| satisfaction::pt_satisfaction(agent, r, &instance.params).ok())
                    .unwrap_or_else(F::zero);
                Placement {
                    agent: agent.id.clone(),
                    resource,
                    rank,
                    satisfaction,
                }
            })
            .collect();
        Self {
            placements,
            occupants,
        }
    }

    /// Builds an assignment from `(agent, resource)` pairs; unnamed agents stay unassigned.
    pub fn from_pairs<'a, I>(instance: &Instance<F>, pairs: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (&'a str, Option<&'a str>)>,
    {
        let mut choice = vec![None; instance.agents.len()];
        for (a, r) in pairs {
            let ai = instance
                .agent_index(&AgentId::new(a))
                .ok_or_else(|| ModelError::UnknownAgent(AgentId::new(a)))?;
            choice[ai] = match r {
                Some(r) => Some(
                    instance
                        .resource_index(&ResourceId::new(r))
                        .ok_or_else(|| ModelError::UnknownResource(ResourceId::new(r)))?,
                ),
                None => None,
            };
        }
        Ok(Self::from_indices(instance, &choice))
    }

    /// Per-agent resource indices, in instance order.
    pub fn to_indices(&self, instance: &Instance<F>) -> Result<Vec<Option<usize>>, ModelError> {
        if self.placements.len() != instance.agents.len() {
            return Err(ModelError::Mismatch(format!(
                "{} placements for {} agents",
                self.placements.len(),
                instance.agents.len()
            )));
        }
        self.placements
            .iter()
            .zip(&instance.agents)
            .map(|(p, a)| {
                if p.agent != a.id {
                    return Err(ModelError::Mismatch(format!(
                        "placement for {} where {} was expected",
                        p.agent, a.id
                    )));
                }
                p.resource
                    .as_ref()
                    .map(|r| {
                        instance
                            .resource_index(r)
                            .ok_or_else(|| ModelError::UnknownResource(r.clone()))
                    })
                    .transpose()
            })
            .collect()
    }

    pub fn resource_of(&self, agent: &AgentId) -> Option<&ResourceId> {
        self.placements
            .iter()
            .find(|p| &p.agent == agent)
            .and_then(|p| p.resource.as_ref())
    }

    pub fn total_satisfaction(&self) -> F {
        self.placements
            .iter()
            .fold(F::zero(), |acc, p| acc + p.satisfaction)
    }

    /// `(agent, resource)` pairs as plain strings, handy for comparisons.
    pub fn pairs(&self) -> Vec<(String, Option<String>)> {
        self.placements
            .iter()
            .map(|p| (p.agent.0.clone(), p.resource.as_ref().map(|r| r.0.clone())))
            .collect()
    }

    /// Checks one-resource-per-agent, per-resource quota, two-way
    /// consistency between placements and occupant lists, and feasibility.
    pub fn check(&self, instance: &Instance<F>) -> Vec<AssignmentViolation> {
        let mut out = Vec::new();
        if self.placements.len() != instance.agents.len() {
            out.push(AssignmentViolation::AgentCount {
                expected: instance.agents.len(),
                found: self.placements.len(),
            });
            return out;
        }
        for (i, (p, a)) in self.placements.iter().zip(&instance.agents).enumerate() {
            if p.agent != a.id {
                out.push(AssignmentViolation::AgentOrder { index: i });
            }
            if let Some(r) = &p.resource {
                if instance.resource(r).is_none() {
                    out.push(AssignmentViolation::UnknownResource { resource: r.clone() });
                }
                if !a.preferences.contains(r) {
                    out.push(AssignmentViolation::Infeasible {
                        agent: a.id.clone(),
                        resource: r.clone(),
                    });
                }
            }
        }
        for (rid, occ) in &self.occupants {
            match instance.resource(rid) {
                Some(res) if occ.len() > res.quota as usize => {
                    out.push(AssignmentViolation::OverQuota {
                        resource: rid.clone(),
                        occupants: occ.len(),
                        quota: res.quota,
                    })
                }
                None => out.push(AssignmentViolation::UnknownResource {
                    resource: rid.clone(),
                }),
                _ => {}
            }
            for a in occ {
                if self.resource_of(a) != Some(rid) {
                    out.push(AssignmentViolation::Inconsistent { agent: a.clone() });
                }
            }
        }
        for p in &self.placements {
            if let Some(r) = &p.resource {
                let listed = self
                    .occupants
                    .iter()
                    .filter(|(rid, occ)| rid == r && occ.contains(&p.agent))
                    .count();
                if listed != 1 {
                    out.push(AssignmentViolation::Inconsistent {
                        agent: p.agent.clone(),
                    });
                }
            }
            let listed_anywhere = self
                .occupants
                .iter()
                .filter(|(_, occ)| occ.contains(&p.agent))
                .count();
            if p.resource.is_none() && listed_anywhere > 0 {
                out.push(AssignmentViolation::Inconsistent {
                    agent: p.agent.clone(),
                });
            }
        }
        out
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn params() -> SatisfactionParams<f64> {
        SatisfactionParams::default()
    }

    /// Quotas (1,2,1); a1 r3>r1>r2, a2 r1>r2>r3, a3 r2>r1>r3, a4 r3>r1>r2.
    pub fn fig3a() -> Instance<f64> {
        Instance::new(
            vec![
                Agent::new("a1", Some("r1"), ["r3", "r1", "r2"]),
                Agent::new("a2", Some("r2"), ["r1", "r2", "r3"]),
                Agent::new("a3", Some("r3"), ["r2", "r1", "r3"]),
                Agent::new("a4", Some("r2"), ["r3", "r1", "r2"]),
            ],
            vec![
                Resource::new("r1", 1),
                Resource::new("r2", 2),
                Resource::new("r3", 1),
            ],
            params(),
        )
    }
}
