//! Simple-cycle enumeration (Johnson) and sink-terminated path enumeration
//! over dense adjacency lists.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LimitExceeded;

/// Every elementary circuit of `adj`, each rotated to start at its smallest
/// vertex, sorted lexicographically. Fails once more than `limit` are found.
pub fn simple_cycles(adj: &[Vec<usize>], limit: usize) -> Result<Vec<Vec<usize>>, LimitExceeded> {
    let n = adj.len();
    let mut search = Johnson {
        adj,
        in_comp: vec![false; n],
        blocked: vec![false; n],
        b: vec![Vec::new(); n],
        stack: Vec::new(),
        found: Vec::new(),
        limit,
    };
    let radj = reverse(adj);
    for s in 0..n {
        let comp = component_of(adj, &radj, s);
        let nontrivial = comp.len() > 1 || adj[s].contains(&s);
        if !nontrivial {
            continue;
        }
        for v in 0..n {
            search.in_comp[v] = false;
            search.blocked[v] = false;
            search.b[v].clear();
        }
        for &v in &comp {
            search.in_comp[v] = true;
        }
        search.circuit(s, s)?;
    }
    let mut found = search.found;
    found.sort();
    Ok(found)
}

struct Johnson<'a> {
    adj: &'a [Vec<usize>],
    in_comp: Vec<bool>,
    blocked: Vec<bool>,
    b: Vec<Vec<usize>>,
    stack: Vec<usize>,
    found: Vec<Vec<usize>>,
    limit: usize,
}

impl Johnson<'_> {
    fn circuit(&mut self, v: usize, s: usize) -> Result<bool, LimitExceeded> {
        let mut closed = false;
        self.stack.push(v);
        self.blocked[v] = true;
        for &w in &self.adj[v] {
            if !self.in_comp[w] {
                continue;
            }
            if w == s {
                if self.found.len() == self.limit {
                    return Err(LimitExceeded);
                }
                self.found.push(self.stack.clone());
                closed = true;
            } else if !self.blocked[w] && self.circuit(w, s)? {
                closed = true;
            }
        }
        if closed {
            self.unblock(v);
        } else {
            for &w in &self.adj[v] {
                if self.in_comp[w] && !self.b[w].contains(&v) {
                    self.b[w].push(v);
                }
            }
        }
        self.stack.pop();
        Ok(closed)
    }

    fn unblock(&mut self, u: usize) {
        self.blocked[u] = false;
        while let Some(w) = self.b[u].pop() {
            if self.blocked[w] {
                self.unblock(w);
            }
        }
    }
}

fn reverse(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut radj = vec![Vec::new(); adj.len()];
    for (v, succ) in adj.iter().enumerate() {
        for &w in succ {
            radj[w].push(v);
        }
    }
    radj
}

/// Strongly connected component of `s` in the subgraph induced by vertices `>= s`.
fn component_of(adj: &[Vec<usize>], radj: &[Vec<usize>], s: usize) -> Vec<usize> {
    let fwd = reach(adj, s);
    let bwd = reach(radj, s);
    (s..adj.len()).filter(|&v| fwd[v] && bwd[v]).collect()
}

fn reach(adj: &[Vec<usize>], s: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut todo = vec![s];
    seen[s] = true;
    while let Some(v) = todo.pop() {
        for &w in &adj[v] {
            if w >= s && !seen[w] {
                seen[w] = true;
                todo.push(w);
            }
        }
    }
    seen
}

pub fn is_acyclic(adj: &[Vec<usize>]) -> bool {
    // Kahn
    let n = adj.len();
    let mut indeg = vec![0usize; n];
    for succ in adj {
        for &w in succ {
            indeg[w] += 1;
        }
    }
    let mut todo: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = todo.pop() {
        seen += 1;
        for &w in &adj[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                todo.push(w);
            }
        }
    }
    seen == n
}

/// Every maximal path ending at a vertex flagged in `sinks`: each path is
/// extended backwards until it reaches a vertex with no in-edges. Sinks
/// without in-edges yield nothing. Paths run source first, sink last.
pub fn paths_to_sinks(
    adj: &[Vec<usize>],
    sinks: &[bool],
    limit: usize,
) -> Result<Vec<Vec<usize>>, LimitExceeded> {
    let radj = reverse(adj);
    let mut out = Vec::new();
    for t in (0..adj.len()).filter(|&t| sinks[t]) {
        if radj[t].is_empty() {
            continue;
        }
        let mut path = vec![t];
        let mut on_path = vec![false; adj.len()];
        on_path[t] = true;
        extend_back(&radj, &mut path, &mut on_path, &mut out, limit)?;
    }
    out.sort();
    Ok(out)
}

fn extend_back(
    radj: &[Vec<usize>],
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    out: &mut Vec<Vec<usize>>,
    limit: usize,
) -> Result<(), LimitExceeded> {
    let u = *path.last().unwrap();
    let preds: Vec<usize> = radj[u].iter().copied().filter(|&p| !on_path[p]).collect();
    if preds.is_empty() {
        if out.len() == limit {
            return Err(LimitExceeded);
        }
        out.push(path.iter().rev().copied().collect());
        return Ok(());
    }
    for p in preds {
        path.push(p);
        on_path[p] = true;
        extend_back(radj, path, on_path, out, limit)?;
        on_path[p] = false;
        path.pop();
    }
    Ok(())
}
