//! Non-induced subgraph embedding by backtracking.

use std::collections::HashMap;

use super::canonical::Key;

/// Interned database graph. Adjacency lists are sorted and deduplicated.
#[derive(Debug, Clone)]
pub(crate) struct DbGraph {
    pub labels: Vec<u32>,
    /// `out[u]` holds `(v, edge_label)`.
    pub out: Vec<Vec<(u32, u32)>>,
    /// `inc[v]` holds `(u, edge_label)`.
    pub inc: Vec<Vec<(u32, u32)>>,
    pub by_label: HashMap<u32, Vec<u32>>,
}

impl DbGraph {
    pub fn new(labels: Vec<u32>, edges: impl IntoIterator<Item = (u32, u32, u32)>) -> Self {
        let n = labels.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (a, b, l) in edges {
            out[a as usize].push((b, l));
            inc[b as usize].push((a, l));
        }
        for adj in out.iter_mut().chain(inc.iter_mut()) {
            adj.sort_unstable();
            adj.dedup();
        }
        let mut by_label: HashMap<u32, Vec<u32>> = HashMap::new();
        for (i, &l) in labels.iter().enumerate() {
            by_label.entry(l).or_default().push(i as u32);
        }
        DbGraph { labels, out, inc, by_label }
    }

    pub fn has_edge(&self, a: u32, b: u32, l: u32) -> bool {
        self.out[a as usize].binary_search(&(b, l)).is_ok()
    }

    /// Distinct edges as `(src, dst, label)` in ascending order.
    pub fn edges(&self) -> Vec<(u32, u32, u32)> {
        self.out.iter().enumerate().flat_map(|(a, adj)| adj.iter().map(move |&(b, l)| (a as u32, b, l))).collect()
    }
}

/// How a pattern node is reached from an earlier one in the search order.
#[derive(Clone, Copy)]
enum Anchor {
    Free,
    /// Pattern edge `earlier -> this` with the given label.
    From(usize, u32),
    /// Pattern edge `this -> earlier` with the given label.
    To(usize, u32),
}

struct Plan {
    order: Vec<usize>,
    anchors: Vec<Anchor>,
    /// Edges to check when placing `order[k]`, against already placed nodes.
    checks: Vec<Vec<(usize, usize, u32)>>,
}

fn plan(key: &Key) -> Plan {
    let n = key.nodes.len();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut anchors = Vec::with_capacity(n);
    while order.len() < n {
        // Prefer a node linked to an already placed one; otherwise the
        // lowest unplaced index.
        let mut next = None;
        'outer: for &p in &order {
            for &(a, b, l) in &key.edges {
                let (a, b) = (a as usize, b as usize);
                if a == p && !placed[b] {
                    next = Some((b, Anchor::From(p, l)));
                    break 'outer;
                }
                if b == p && !placed[a] {
                    next = Some((a, Anchor::To(p, l)));
                    break 'outer;
                }
            }
        }
        let (v, anchor) = next.unwrap_or_else(|| ((0..n).find(|&i| !placed[i]).unwrap(), Anchor::Free));
        placed[v] = true;
        order.push(v);
        anchors.push(anchor);
    }
    let mut position = vec![0; n];
    for (k, &v) in order.iter().enumerate() {
        position[v] = k;
    }
    let mut checks = vec![Vec::new(); n];
    for &(a, b, l) in &key.edges {
        let (a, b) = (a as usize, b as usize);
        let k = position[a].max(position[b]);
        checks[k].push((a, b, l));
    }
    Plan { order, anchors, checks }
}

/// Up to `limit` embeddings of `key` into `g`. Each mapping lists the graph
/// node assigned to each pattern node. Candidates are tried in ascending
/// graph-node order.
pub(crate) fn embeddings(key: &Key, g: &DbGraph, limit: usize) -> Vec<Vec<u32>> {
    let mut found = Vec::new();
    if limit == 0 || key.nodes.is_empty() || key.nodes.len() > g.labels.len() {
        return found;
    }
    let plan = plan(key);
    let mut mapping = vec![u32::MAX; key.nodes.len()];
    let mut used = vec![false; g.labels.len()];
    extend(key, g, &plan, 0, &mut mapping, &mut used, limit, &mut found);
    found
}

pub(crate) fn contains(key: &Key, g: &DbGraph) -> bool {
    !embeddings(key, g, 1).is_empty()
}

#[allow(clippy::too_many_arguments)]
fn extend(
    key: &Key,
    g: &DbGraph,
    plan: &Plan,
    k: usize,
    mapping: &mut [u32],
    used: &mut [bool],
    limit: usize,
    found: &mut Vec<Vec<u32>>,
) {
    if k == plan.order.len() {
        found.push(mapping.to_vec());
        return;
    }
    let v = plan.order[k];
    let label = key.nodes[v];
    let candidates: Vec<u32> = match plan.anchors[k] {
        Anchor::Free => g.by_label.get(&label).cloned().unwrap_or_default(),
        Anchor::From(p, l) => {
            let mut c: Vec<u32> = g.out[mapping[p] as usize].iter().filter(|&&(_, el)| el == l).map(|&(x, _)| x).collect();
            c.dedup();
            c
        }
        Anchor::To(p, l) => {
            let mut c: Vec<u32> = g.inc[mapping[p] as usize].iter().filter(|&&(_, el)| el == l).map(|&(x, _)| x).collect();
            c.dedup();
            c
        }
    };
    for x in candidates {
        if used[x as usize] || g.labels[x as usize] != label {
            continue;
        }
        mapping[v] = x;
        if plan.checks[k].iter().all(|&(a, b, l)| g.has_edge(mapping[a], mapping[b], l)) {
            used[x as usize] = true;
            extend(key, g, plan, k + 1, mapping, used, limit, found);
            used[x as usize] = false;
            if found.len() >= limit {
                mapping[v] = u32::MAX;
                return;
            }
        }
        mapping[v] = u32::MAX;
    }
}

#[cfg(test)]
mod tests {
    use super::super::canonical::canonicalize;
    use super::*;

    #[test]
    fn path_in_longer_path() {
        // A->B->C with labels 0,1,2.
        let g = DbGraph::new(vec![0, 1, 2], [(0, 1, 0), (1, 2, 0)]);
        let p = canonicalize(&[0, 1], &[(0, 1, 0)]);
        assert_eq!(embeddings(&p, &g, usize::MAX), vec![vec![0, 1]]);
    }

    #[test]
    fn injective() {
        let g = DbGraph::new(vec![0, 1], [(0, 1, 0)]);
        let p = canonicalize(&[0, 0], &[(0, 1, 0)]);
        assert!(embeddings(&p, &g, 10).is_empty());
    }

    #[test]
    fn non_induced_and_limit() {
        // Star: node 0 (label 0) to ten label-1 nodes.
        let labels = std::iter::once(0).chain(std::iter::repeat_n(1, 10)).collect();
        let g = DbGraph::new(labels, (1..=10).map(|i| (0, i, 0)));
        let p = canonicalize(&[0, 1], &[(0, 1, 0)]);
        assert_eq!(embeddings(&p, &g, usize::MAX).len(), 10);
        assert_eq!(embeddings(&p, &g, 3).len(), 3);
        // Extra graph edges between mapped nodes are allowed.
        let dense = DbGraph::new(vec![0, 1], [(0, 1, 0), (1, 0, 1)]);
        assert!(contains(&p, &dense));
    }

    #[test]
    fn edge_label_must_match() {
        let g = DbGraph::new(vec![0, 1], [(0, 1, 1)]);
        let p = canonicalize(&[0, 1], &[(0, 1, 0)]);
        assert!(!contains(&p, &g));
    }
}
