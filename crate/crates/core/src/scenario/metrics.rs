use serde::{Deserialize, Serialize};

use crate::engine::RunOutcome;
use crate::model::{AgentId, Assignment, Instance, ModelError, ResourceId};
use crate::satisfaction::pt_satisfaction;
use crate::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentMetrics {
    pub agent: AgentId,
    pub resource: Option<ResourceId>,
    pub rank: usize,
    pub satisfaction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Sum of 1-based assigned ranks.
    pub rank_sum: usize,
    pub total_satisfaction: f64,
    pub mean_satisfaction: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    /// Wall-clock time; never written into result documents.
    #[serde(skip)]
    pub millis: Option<f64>,
    pub agents: Vec<AgentMetrics>,
}

/// Rank and satisfaction totals for an assignment. Unassigned endowed agents
/// count at their endowment rank, unassigned unendowed agents one past the
/// end of their list; both contribute zero satisfaction.
pub fn compute_metrics<F: Scalar>(
    instance: &Instance<F>,
    assignment: &Assignment<F>,
) -> Result<MetricsReport, ModelError> {
    let choice = assignment.to_indices(instance)?;
    let agents: Vec<AgentMetrics> = instance
        .agents
        .iter()
        .zip(&choice)
        .map(|(a, c)| {
            let resource = c.map(|j| instance.resources[j].id.clone());
            let (rank, sat) = match &resource {
                Some(r) => {
                    let rank = a.rank_of(r).ok_or_else(|| ModelError::NotInPreferences {
                        agent: a.id.clone(),
                        resource: r.clone(),
                    })?;
                    let sat = pt_satisfaction(a, r, &instance.params)
                        .ok()
                        .and_then(|s| s.to_f64())
                        .unwrap_or(0.0);
                    (rank, sat)
                }
                None => (
                    a.endowment_rank().unwrap_or(a.feasible_count() + 1),
                    0.0,
                ),
            };
            Ok(AgentMetrics {
                agent: a.id.clone(),
                resource,
                rank,
                satisfaction: sat,
            })
        })
        .collect::<Result<_, ModelError>>()?;
    let total: f64 = agents.iter().map(|m| m.satisfaction).sum();
    Ok(MetricsReport {
        rank_sum: agents.iter().map(|m| m.rank).sum(),
        total_satisfaction: total,
        mean_satisfaction: if agents.is_empty() {
            0.0
        } else {
            total / agents.len() as f64
        },
        rounds: None,
        millis: None,
        agents,
    })
}

/// The JSON result document written for a run: metrics plus round count.
/// Contains no timings, so identical runs produce identical bytes.
pub fn result_document<F: Scalar>(
    instance: &Instance<F>,
    outcome: &RunOutcome<F>,
) -> Result<String, ModelError> {
    let mut report = compute_metrics(instance, &outcome.assignment)?;
    report.rounds = Some(outcome.rounds.len());
    let mut text = serde_json::to_string_pretty(&report).expect("metrics always serialize");
    text.push('\n');
    Ok(text)
}

/// One CSV line of a metrics table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub scenario: String,
    pub agents: usize,
    pub resources: usize,
    /// Largest quota in the instance.
    pub quota: u32,
    /// Agents per slot.
    pub ratio: f64,
    pub rank_sum: usize,
    pub total_sat: f64,
    pub mean_sat: f64,
    pub rounds: usize,
    /// Wall-clock time; left empty where output must be reproducible.
    pub millis: Option<f64>,
}

pub const CSV_COLUMNS: [&str; 10] = [
    "scenario", "agents", "resources", "quota", "ratio", "rank_sum", "total_sat", "mean_sat", "rounds",
    "millis",
];

impl MetricsRow {
    pub fn new<F: Scalar>(scenario: impl Into<String>, instance: &Instance<F>, report: &MetricsReport) -> Self {
        let slots = instance.total_quota();
        Self {
            scenario: scenario.into(),
            agents: instance.agents.len(),
            resources: instance.resources.len(),
            quota: instance.resources.iter().map(|r| r.quota).max().unwrap_or(0),
            ratio: if slots == 0 {
                0.0
            } else {
                instance.agents.len() as f64 / slots as f64
            },
            rank_sum: report.rank_sum,
            total_sat: report.total_satisfaction,
            mean_sat: report.mean_satisfaction,
            rounds: report.rounds.unwrap_or(0),
            millis: report.millis,
        }
    }
}
