//! Plain top trading cycles over endowed units only.
//!
//! Every agent points at a single owner of its most preferred resource that
//! still has an endowed unit in the market (lowest agent index on ties).
//! Unowned capacity is invisible. This is the textbook housing-market
//! procedure and serves as the reference the capacity-aware engine reduces
//! to when every quota is one and every slot is endowed.

use crate::model::{Assignment, Instance, ResourceId};
use crate::Scalar;

/// Runs classical TTC. Unendowed agents are never assigned.
pub fn classical_ttc<F: Scalar>(instance: &Instance<F>) -> Assignment<F> {
    let n = instance.agents.len();
    let endowment: Vec<Option<usize>> = instance
        .agents
        .iter()
        .map(|a| a.endowment.as_ref().and_then(|r| instance.resource_index(r)))
        .collect();
    let prefs: Vec<Vec<usize>> = instance
        .agents
        .iter()
        .map(|a| {
            a.acceptable()
                .iter()
                .filter_map(|r: &ResourceId| instance.resource_index(r))
                .collect()
        })
        .collect();

    let mut active: Vec<bool> = endowment.iter().map(Option::is_some).collect();
    let mut result = vec![None; n];

    while active.iter().any(|&x| x) {
        // each active agent points at one active owner of its best available resource
        let pointer: Vec<Option<usize>> = (0..n)
            .map(|i| {
                if !active[i] {
                    return None;
                }
                prefs[i].iter().find_map(|&r| {
                    (0..n).find(|&k| active[k] && endowment[k] == Some(r))
                })
            })
            .collect();

        let mut traded = false;
        let mut on_cycle = vec![false; n];
        for start in 0..n {
            if !active[start] || on_cycle[start] {
                continue;
            }
            // walk the functional graph until a vertex repeats
            let mut seen = Vec::new();
            let mut v = start;
            while active[v] && !seen.contains(&v) && !on_cycle[v] {
                seen.push(v);
                match pointer[v] {
                    Some(w) => v = w,
                    None => break,
                }
            }
            if let Some(pos) = seen.iter().position(|&x| x == v) {
                for &u in &seen[pos..] {
                    on_cycle[u] = true;
                }
            }
        }
        for i in 0..n {
            if on_cycle[i] {
                let owner = pointer[i].expect("cycle members point somewhere");
                result[i] = endowment[owner];
                traded = true;
            }
        }
        for i in 0..n {
            if on_cycle[i] {
                active[i] = false;
            }
        }
        // every active agent can at least point at itself
        debug_assert!(traded);
        if !traded {
            break;
        }
    }
    Assignment::from_indices(instance, &result)
}
