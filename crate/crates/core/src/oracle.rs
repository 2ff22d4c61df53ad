//! Exhaustive ground truth for small markets: the welfare optimum over all
//! feasible assignments, Pareto dominance, blocking coalitions over endowed
//! slots, and profitable preference misreports.
//!
//! Every check refuses instances beyond its [`OracleBudget`] instead of
//! searching partially.

use std::ops::ControlFlow;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{self, EngineError};
use crate::model::{AgentId, Assignment, Instance, ModelError, ResourceId};
use crate::satisfaction::pt_satisfaction;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("oracle budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleBudget {
    pub max_agents: usize,
    /// Bound on the summed preference-list lengths.
    pub max_preference_total: usize,
    /// Core checks enumerate every coalition, so they refuse markets with
    /// more endowed agents than this.
    pub max_coalition_agents: usize,
    /// Lists up to this length are misreported in every order.
    pub full_permutation_max: usize,
    /// Longer lists get this many seeded random orders instead.
    pub sampled_misreports: usize,
    pub sample_seed: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            max_agents: 8,
            max_preference_total: 32,
            max_coalition_agents: 6,
            full_permutation_max: 5,
            sampled_misreports: 200,
            sample_seed: 0x5eed,
        }
    }
}

impl OracleBudget {
    pub fn admit<F: Scalar>(&self, instance: &Instance<F>) -> Result<(), OracleError> {
        let agents = instance.agents.len();
        if agents > self.max_agents {
            return Err(OracleError::BudgetExceeded(format!(
                "{agents} agents (limit {})",
                self.max_agents
            )));
        }
        let total: usize = instance.agents.iter().map(|a| a.preferences.len()).sum();
        if total > self.max_preference_total {
            return Err(OracleError::BudgetExceeded(format!(
                "{total} preference entries (limit {})",
                self.max_preference_total
            )));
        }
        Ok(())
    }
}

/// All assignments that respect quotas, give each agent at most one listed
/// resource, and never place an endowed agent below its endowment.
///
/// Enumeration is depth-first in instance order; each agent's options are
/// tried in preference order, "unassigned" last.
pub struct FeasibleAssignmentSpace<'a, F: Scalar> {
    instance: &'a Instance<F>,
    options: Vec<Vec<Option<usize>>>,
}

impl<'a, F: Scalar> FeasibleAssignmentSpace<'a, F> {
    pub fn new(instance: &'a Instance<F>) -> Self {
        let options = instance
            .agents
            .iter()
            .map(|a| {
                let mut opts: Vec<Option<usize>> = a
                    .acceptable()
                    .iter()
                    .map(|r| instance.resource_index(r))
                    .collect();
                if a.endowment.is_none() {
                    opts.push(None);
                }
                opts
            })
            .collect();
        Self { instance, options }
    }

    /// Same capacity rules over caller-chosen per-agent options.
    pub fn with_options(instance: &'a Instance<F>, options: Vec<Vec<Option<usize>>>) -> Self {
        assert_eq!(options.len(), instance.agents.len());
        Self { instance, options }
    }

    /// Visits every feasible choice vector until `visit` breaks.
    pub fn search<B>(&self, mut visit: impl FnMut(&[Option<usize>]) -> ControlFlow<B>) -> Option<B> {
        let mut load = vec![0u32; self.instance.resources.len()];
        let mut choice = Vec::with_capacity(self.options.len());
        match self.descend(&mut load, &mut choice, &mut visit) {
            ControlFlow::Break(b) => Some(b),
            ControlFlow::Continue(()) => None,
        }
    }

    fn descend<B>(
        &self,
        load: &mut [u32],
        choice: &mut Vec<Option<usize>>,
        visit: &mut impl FnMut(&[Option<usize>]) -> ControlFlow<B>,
    ) -> ControlFlow<B> {
        let depth = choice.len();
        if depth == self.options.len() {
            return visit(choice);
        }
        for &opt in &self.options[depth] {
            if let Some(j) = opt {
                if load[j] >= self.instance.resources[j].quota {
                    continue;
                }
                load[j] += 1;
            }
            choice.push(opt);
            let flow = self.descend(load, choice, visit);
            choice.pop();
            if let Some(j) = opt {
                load[j] -= 1;
            }
            flow?;
        }
        ControlFlow::Continue(())
    }

    pub fn iter(&self) -> std::vec::IntoIter<Vec<Option<usize>>> {
        let mut all = Vec::new();
        self.search::<()>(|c| {
            all.push(c.to_vec());
            ControlFlow::Continue(())
        });
        all.into_iter()
    }
}

/// Maximum total satisfaction and the first assignment (in enumeration
/// order) attaining it.
pub fn optimize<F: Scalar>(
    instance: &Instance<F>,
    budget: &OracleBudget,
) -> Result<(F, Assignment<F>), OracleError> {
    budget.admit(instance)?;
    let space = FeasibleAssignmentSpace::new(instance);
    let sat: Vec<Vec<F>> = instance
        .agents
        .iter()
        .map(|a| {
            instance
                .resources
                .iter()
                .map(|r| pt_satisfaction(a, &r.id, &instance.params).unwrap_or_else(|_| F::zero()))
                .collect()
        })
        .collect();
    let mut best: Option<(F, Vec<Option<usize>>)> = None;
    space.search::<()>(|choice| {
        let total = choice
            .iter()
            .enumerate()
            .fold(F::zero(), |acc, (i, c)| acc + c.map_or(F::zero(), |j| sat[i][j]));
        if best.as_ref().is_none_or(|(b, _)| total > *b) {
            best = Some((total, choice.to_vec()));
        }
        ControlFlow::Continue(())
    });
    // the all-endowment assignment is always feasible
    let (value, choice) = best.expect("feasible space is never empty");
    Ok((value, Assignment::from_indices(instance, &choice)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoVerdict<F = f64> {
    pub optimal: bool,
    pub dominating: Option<Assignment<F>>,
}

/// Searches for a feasible assignment that every agent weakly prefers and
/// some agent strictly prefers, free slots included.
pub fn is_pareto_optimal<F: Scalar>(
    instance: &Instance<F>,
    assignment: &Assignment<F>,
    budget: &OracleBudget,
) -> Result<ParetoVerdict<F>, OracleError> {
    budget.admit(instance)?;
    let current = assignment.to_indices(instance)?;
    let options: Vec<Vec<Option<usize>>> = instance
        .agents
        .iter()
        .zip(&current)
        .map(|(a, c)| {
            let now = a.outcome_rank(c.map(|j| &instance.resources[j].id));
            let mut opts: Vec<Option<usize>> = a
                .preferences
                .iter()
                .take(now.min(a.preferences.len()))
                .map(|r| instance.resource_index(r))
                .collect();
            if c.is_none() {
                opts.push(None);
            }
            opts
        })
        .collect();
    let space = FeasibleAssignmentSpace::with_options(instance, options);
    let found = space.search(|choice| {
        if choice != current.as_slice() {
            ControlFlow::Break(choice.to_vec())
        } else {
            ControlFlow::Continue(())
        }
    });
    // options are weak improvements and preferences are strict, so any
    // choice that differs from the current one is a strict improvement
    Ok(match found {
        Some(c) => ParetoVerdict {
            optimal: false,
            dominating: Some(Assignment::from_indices(instance, &c)),
        },
        None => ParetoVerdict {
            optimal: true,
            dominating: None,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingCoalition {
    pub agents: Vec<AgentId>,
    /// How the coalition would share its own endowed slots.
    pub reallocation: Vec<(AgentId, ResourceId)>,
}

/// Looks for a set of endowed agents that could swap their endowed slots
/// among themselves so that every member is strictly better off. Smaller
/// coalitions are tried first.
pub fn find_blocking_coalition<F: Scalar>(
    instance: &Instance<F>,
    assignment: &Assignment<F>,
    budget: &OracleBudget,
) -> Result<Option<BlockingCoalition>, OracleError> {
    budget.admit(instance)?;
    let endowed: Vec<usize> = (0..instance.agents.len())
        .filter(|&i| instance.agents[i].endowment.is_some())
        .collect();
    if endowed.len() > budget.max_coalition_agents {
        return Err(OracleError::BudgetExceeded(format!(
            "{} endowed agents (coalition limit {})",
            endowed.len(),
            budget.max_coalition_agents
        )));
    }
    let current = assignment.to_indices(instance)?;
    // better[i][k]: member i strictly prefers the endowment of agent k to its outcome
    let n = instance.agents.len();
    let mut better = vec![vec![false; n]; n];
    for &i in &endowed {
        let a = &instance.agents[i];
        let now = a.outcome_rank(current[i].map(|j| &instance.resources[j].id));
        for &k in &endowed {
            let slot = instance.agents[k].endowment.as_ref().unwrap();
            better[i][k] = a.rank_of(slot).is_some_and(|r| r < now);
        }
    }
    for size in 1..=endowed.len() {
        let mut pick: Vec<usize> = (0..size).collect();
        loop {
            let members: Vec<usize> = pick.iter().map(|&p| endowed[p]).collect();
            if let Some(m) = perfect_matching(&members, &better) {
                return Ok(Some(BlockingCoalition {
                    agents: members.iter().map(|&i| instance.agents[i].id.clone()).collect(),
                    reallocation: members
                        .iter()
                        .zip(m)
                        .map(|(&i, k)| {
                            (
                                instance.agents[i].id.clone(),
                                instance.agents[k].endowment.clone().unwrap(),
                            )
                        })
                        .collect(),
                }));
            }
            if !next_combination(&mut pick, endowed.len()) {
                break;
            }
        }
    }
    Ok(None)
}

/// Assigns each member a distinct member's slot it strictly prefers.
fn perfect_matching(members: &[usize], better: &[Vec<bool>]) -> Option<Vec<usize>> {
    fn go(k: usize, members: &[usize], better: &[Vec<bool>], used: &mut [bool], out: &mut Vec<usize>) -> bool {
        if k == members.len() {
            return true;
        }
        for (s, &owner) in members.iter().enumerate() {
            if !used[s] && better[members[k]][owner] {
                used[s] = true;
                out.push(owner);
                if go(k + 1, members, better, used, out) {
                    return true;
                }
                out.pop();
                used[s] = false;
            }
        }
        false
    }
    let mut used = vec![false; members.len()];
    let mut out = Vec::with_capacity(members.len());
    go(0, members, better, &mut used, &mut out).then_some(out)
}

fn next_combination(pick: &mut [usize], n: usize) -> bool {
    let k = pick.len();
    for i in (0..k).rev() {
        if pick[i] < n - k + i {
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Rearranges `v` into the next lexicographic permutation; false after the last.
pub fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manipulation {
    pub agent: AgentId,
    pub misreport: Vec<ResourceId>,
    pub truthful_outcome: Option<ResourceId>,
    pub manipulated_outcome: Option<ResourceId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyProofVerdict {
    pub strategy_proof: bool,
    pub counterexample: Option<Manipulation>,
    /// Engine runs spent on misreports.
    pub misreports_tried: usize,
}

/// Reorderings of `prefs` other than `prefs` itself: all of them for short
/// lists, otherwise a seeded sample.
pub fn misreports(prefs: &[ResourceId], budget: &OracleBudget, salt: u64) -> Vec<Vec<ResourceId>> {
    if prefs.len() <= budget.full_permutation_max {
        let mut idx: Vec<usize> = (0..prefs.len()).collect();
        let mut out = Vec::new();
        loop {
            let order: Vec<ResourceId> = idx.iter().map(|&i| prefs[i].clone()).collect();
            if order != prefs {
                out.push(order);
            }
            if !next_permutation(&mut idx) {
                break;
            }
        }
        out
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.sample_seed ^ salt);
        (0..budget.sampled_misreports)
            .map(|_| {
                let mut order = prefs.to_vec();
                order.shuffle(&mut rng);
                order
            })
            .filter(|o| o != prefs)
            .collect()
    }
}

/// Reruns the engine with each agent's list reordered, everyone else
/// truthful, and compares outcomes under the agent's true order.
pub fn check_strategy_proofness<F: Scalar>(
    instance: &Instance<F>,
    budget: &OracleBudget,
) -> Result<StrategyProofVerdict, OracleError> {
    check_strategy_proofness_with(instance, budget, |inst| {
        Ok(engine::run(inst)?.assignment)
    })
}

/// [`check_strategy_proofness`] against an arbitrary mechanism.
pub fn check_strategy_proofness_with<F: Scalar>(
    instance: &Instance<F>,
    budget: &OracleBudget,
    mechanism: impl Fn(&Instance<F>) -> Result<Assignment<F>, OracleError>,
) -> Result<StrategyProofVerdict, OracleError> {
    budget.admit(instance)?;
    let truthful = mechanism(instance)?;
    let mut tried = 0;
    for (i, agent) in instance.agents.iter().enumerate() {
        let honest = truthful.resource_of(&agent.id).cloned();
        for order in misreports(&agent.preferences, budget, i as u64) {
            tried += 1;
            let lied = mechanism(&instance.with_preferences(i, order.clone()))?;
            let got = lied.resource_of(&agent.id).cloned();
            if agent.prefers(got.as_ref(), honest.as_ref()) {
                return Ok(StrategyProofVerdict {
                    strategy_proof: false,
                    counterexample: Some(Manipulation {
                        agent: agent.id.clone(),
                        misreport: order,
                        truthful_outcome: honest,
                        manipulated_outcome: got,
                    }),
                    misreports_tried: tried,
                });
            }
        }
    }
    Ok(StrategyProofVerdict {
        strategy_proof: true,
        counterexample: None,
        misreports_tried: tried,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrVerdict {
    pub rational: bool,
    pub offending: Vec<AgentId>,
}

/// Every endowed agent must end at or above its endowment in its own order.
pub fn check_individual_rationality<F: Scalar>(
    instance: &Instance<F>,
    assignment: &Assignment<F>,
) -> IrVerdict {
    let offending: Vec<AgentId> = instance
        .agents
        .iter()
        .filter(|a| match a.endowment_rank() {
            Some(e) => a.outcome_rank(assignment.resource_of(&a.id)) > e,
            None => false,
        })
        .map(|a| a.id.clone())
        .collect();
    IrVerdict {
        rational: offending.is_empty(),
        offending,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::fig3a;
    use crate::model::{Agent, Resource};
    use crate::satisfaction::SatisfactionParams;

    fn b() -> OracleBudget {
        OracleBudget::default()
    }

    #[test]
    fn feasible_space_respects_rules() {
        let inst = fig3a();
        let all: Vec<_> = FeasibleAssignmentSpace::new(&inst).iter().collect();
        // a1 {r3,r1} a2 {r1,r2} a3 {r2,r1,r3} a4 {r3,r1,r2}, quotas (1,2,1)
        let mut brute = 0;
        for c in [0usize, 2].iter().flat_map(|&x| [0usize, 1].iter().map(move |&y| (x, y))) {
            for z in [1usize, 0, 2] {
                for w in [2usize, 0, 1] {
                    let picks = [c.0, c.1, z, w];
                    let load = |j| picks.iter().filter(|&&p| p == j).count() as u32;
                    if (0..3).all(|j| load(j) <= inst.resources[j].quota) {
                        brute += 1;
                    }
                }
            }
        }
        assert_eq!(all.len(), brute);
        let unique: std::collections::BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(unique.len(), all.len());
        for c in &all {
            let a = Assignment::from_indices(&inst, c);
            assert!(a.check(&inst).is_empty());
            assert!(check_individual_rationality(&inst, &a).rational);
        }
    }

    #[test]
    fn fig3a_optimum_is_three() {
        let (v, _) = optimize(&fig3a(), &b()).unwrap();
        assert!((v - 3.0).abs() < 1e-9);
    }

    #[test]
    fn everyone_tops_their_endowment() {
        let inst: Instance<f64> = Instance::new(
            vec![
                Agent::new("a1", Some("r1"), ["r1", "r2"]),
                Agent::new("a2", Some("r2"), ["r2", "r1"]),
            ],
            vec![Resource::new("r1", 1), Resource::new("r2", 1)],
            SatisfactionParams::default(),
        );
        let (v, a) = optimize(&inst, &b()).unwrap();
        assert_eq!(v, 2.0);
        assert_eq!(
            a.pairs(),
            vec![("a1".into(), Some("r1".into())), ("a2".into(), Some("r2".into()))]
        );
    }

    #[test]
    fn budget_refuses_large_markets() {
        let agents = (0..9)
            .map(|i| Agent::new(format!("a{i}"), Some("r"), ["r"]))
            .collect();
        let inst: Instance<f64> = Instance::new(agents, vec![Resource::new("r", 9)], SatisfactionParams::default());
        assert!(matches!(optimize(&inst, &b()), Err(OracleError::BudgetExceeded(_))));
    }

    #[test]
    fn single_agent_cases() {
        let inst: Instance<f64> = Instance::new(
            vec![Agent::new("a1", Some("r1"), ["r2", "r1"])],
            vec![Resource::new("r1", 1), Resource::new("r2", 1)],
            SatisfactionParams::default(),
        );
        let top = Assignment::from_pairs(&inst, [("a1", Some("r2"))]).unwrap();
        assert!(is_pareto_optimal(&inst, &top, &b()).unwrap().optimal);
        let stay = Assignment::from_pairs(&inst, [("a1", Some("r1"))]).unwrap();
        let v = is_pareto_optimal(&inst, &stay, &b()).unwrap();
        assert!(!v.optimal);
        assert_eq!(v.dominating.unwrap().pairs()[0].1.as_deref(), Some("r2"));
        assert!(check_strategy_proofness(&inst, &b()).unwrap().strategy_proof);
    }

    #[test]
    fn ir_check() {
        let inst = fig3a();
        let bad = Assignment::from_pairs(
            &inst,
            [("a1", Some("r2")), ("a2", Some("r1")), ("a3", Some("r3")), ("a4", Some("r2"))],
        )
        .unwrap();
        let v = check_individual_rationality(&inst, &bad);
        assert!(!v.rational);
        assert_eq!(v.offending, vec![AgentId::new("a1")]);

        let free = Instance::new(
            vec![Agent::new("x", None, ["r1"])],
            vec![Resource::new("r1", 1)],
            SatisfactionParams::<f64>::default(),
        );
        let none = Assignment::from_pairs(&free, [("x", None)]).unwrap();
        assert!(check_individual_rationality(&free, &none).rational);
    }

    #[test]
    fn coalition_edge_cases() {
        let empty: Instance<f64> = Instance::new(vec![], vec![], SatisfactionParams::default());
        let a = Assignment::from_indices(&empty, &[]);
        assert_eq!(find_blocking_coalition(&empty, &a, &b()).unwrap(), None);
    }

    #[test]
    fn permutations() {
        let mut v = vec![1, 2, 3];
        let mut n = 1;
        while next_permutation(&mut v) {
            n += 1;
        }
        assert_eq!(n, 6);
        let prefs: Vec<ResourceId> = ["a", "b", "c", "d", "e", "f"].iter().map(|s| ResourceId::new(*s)).collect();
        let sampled = misreports(&prefs, &b(), 3);
        assert!(sampled.len() <= 200 && sampled.len() > 150);
        assert_eq!(sampled, misreports(&prefs, &b(), 3));
        assert_eq!(misreports(&prefs[..3], &b(), 0).len(), 5);
    }
}
