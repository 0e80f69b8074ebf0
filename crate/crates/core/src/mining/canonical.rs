//! Permutation-minimal canonical keys over interned labels.
//!
//! Interned ids are assigned in sorted string order, so comparing keys by id
//! agrees with comparing them by label text.

use std::collections::{BTreeSet, HashMap};

/// Pattern in canonical node order: `nodes` is sorted and `edges` is the
/// lexicographically smallest sorted edge list over all node orderings that
/// keep `nodes` sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Key {
    pub nodes: Vec<u32>,
    pub edges: Vec<(u8, u8, u32)>,
}

/// Bidirectional string table whose ids follow sorted string order.
#[derive(Debug, Clone, Default)]
pub(crate) struct Interner {
    pub texts: Vec<String>,
    index: HashMap<String, u32>,
}

impl Interner {
    pub fn from_sorted(set: BTreeSet<String>) -> Self {
        let texts: Vec<String> = set.into_iter().collect();
        let index = texts.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        Interner { texts, index }
    }

    pub fn get(&self, text: &str) -> Option<u32> {
        self.index.get(text).copied()
    }

    pub fn text(&self, id: u32) -> &str {
        &self.texts[id as usize]
    }
}

fn next_permutation(xs: &mut [usize]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let mut i = xs.len() - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = xs.len() - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

/// Canonicalizes a pattern given in arbitrary node order.
pub(crate) fn canonicalize(nodes: &[u32], edges: &[(u8, u8, u32)]) -> Key {
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by_key(|&i| nodes[i]);
    let sorted_nodes: Vec<u32> = order.iter().map(|&i| nodes[i]).collect();

    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for (pos, &old) in order.iter().enumerate() {
        match groups.last_mut() {
            Some((_, members)) if nodes[members[0]] == nodes[old] => members.push(old),
            _ => groups.push((pos, vec![old])),
        }
    }

    let mut assign = vec![0u8; nodes.len()];
    let mut best: Option<Vec<(u8, u8, u32)>> = None;
    let mut scratch = Vec::with_capacity(edges.len());
    search(&mut groups, 0, &mut assign, edges, &mut scratch, &mut best);
    Key { nodes: sorted_nodes, edges: best.unwrap_or_default() }
}

fn search(
    groups: &mut [(usize, Vec<usize>)],
    g: usize,
    assign: &mut [u8],
    edges: &[(u8, u8, u32)],
    scratch: &mut Vec<(u8, u8, u32)>,
    best: &mut Option<Vec<(u8, u8, u32)>>,
) {
    if g == groups.len() {
        scratch.clear();
        scratch.extend(edges.iter().map(|&(a, b, l)| (assign[a as usize], assign[b as usize], l)));
        scratch.sort_unstable();
        if best.as_ref().is_none_or(|b| scratch.as_slice() < b.as_slice()) {
            *best = Some(scratch.clone());
        }
        return;
    }
    let (start, _) = groups[g];
    let mut members = groups[g].1.clone();
    members.sort_unstable();
    loop {
        for (k, &old) in members.iter().enumerate() {
            assign[old] = (start + k) as u8;
        }
        search(groups, g + 1, assign, edges, scratch, best);
        if !next_permutation(&mut members) {
            break;
        }
    }
}

/// Whether the pattern is connected when edge direction is ignored.
pub(crate) fn is_connected(n: usize, edges: &[(u8, u8, u32)]) -> bool {
    if n <= 1 {
        return true;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut c = x;
        while p[c] != r {
            let next = p[c];
            p[c] = r;
            c = next;
        }
        r
    }
    let mut components = n;
    for &(a, b, _) in edges {
        let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
        if ra != rb {
            parent[ra] = rb;
            components -= 1;
        }
    }
    components == 1
}

/// The pattern obtained by deleting edge `k`, dropping an endpoint left
/// without edges. `None` when the result is disconnected or empty.
pub(crate) fn without_edge(key: &Key, k: usize) -> Option<Key> {
    let edges: Vec<(u8, u8, u32)> = key.edges.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &e)| e).collect();
    let n = key.nodes.len();
    let mut degree = vec![0usize; n];
    for &(a, b, _) in &edges {
        degree[a as usize] += 1;
        degree[b as usize] += 1;
    }
    let isolated: Vec<usize> = (0..n).filter(|&i| degree[i] == 0).collect();
    if isolated.len() > 1 || (isolated.len() == 1 && n == 1) {
        return None;
    }
    let (nodes, edges) = match isolated.first() {
        Some(&t) => {
            let remap = |x: u8| if (x as usize) > t { x - 1 } else { x };
            let nodes = key.nodes.iter().enumerate().filter(|&(i, _)| i != t).map(|(_, &l)| l).collect::<Vec<_>>();
            let edges = edges.iter().map(|&(a, b, l)| (remap(a), remap(b), l)).collect::<Vec<_>>();
            (nodes, edges)
        }
        None => (key.nodes.clone(), edges),
    };
    if !is_connected(nodes.len(), &edges) {
        return None;
    }
    Some(canonicalize(&nodes, &edges))
}
