//! Frequent-subgraph mining over labeled directed graphs with transaction
//! support: a pattern's support is the number of database graphs holding at
//! least one embedding of it.

mod canonical;
mod embed;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::frontend::{MethodRef, NodeId};
use crate::generalize::GeneralizedCfg;
use canonical::{canonicalize, is_connected, without_edge, Interner, Key};
use embed::{contains, embeddings, DbGraph};

pub const DEFAULT_MAX_SIZE: usize = 4;
pub const DEFAULT_WITNESSES: usize = 5;

/// Bounds for the exhaustive oracle.
pub const ORACLE_MAX_GRAPHS: usize = 16;
pub const ORACLE_MAX_NODES: usize = 8;
pub const ORACLE_MAX_EDGES: usize = 16;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MineError {
    #[error("minimum support ratio {0} is outside (0, 1]")]
    RatioOutOfRange(f64),
    #[error("the graph database is empty")]
    EmptyDatabase,
    #[error("maximum pattern size must be at least 1 and at most 255, got {0}")]
    InvalidMaxSize(usize),
    #[error("pattern has {size} nodes, above the bound of {max}")]
    PatternTooLarge { size: usize, max: usize },
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("oracle input too large: {0}")]
    OracleLimit(String),
}

/// Labeled directed graph as consumed by the miner. Self-loops are ignored
/// and repeated `(src, dst, label)` edges count once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiningGraph {
    pub method: MethodRef,
    /// Graph node id reported for each position.
    pub node_ids: Vec<NodeId>,
    pub labels: Vec<String>,
    pub edges: Vec<(usize, usize, String)>,
}

impl From<&GeneralizedCfg> for MiningGraph {
    fn from(g: &GeneralizedCfg) -> Self {
        let position: HashMap<NodeId, usize> = g.nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
        MiningGraph {
            method: g.method.clone(),
            node_ids: g.nodes.iter().map(|n| n.id).collect(),
            labels: g.nodes.iter().map(|n| n.canonical_text.clone()).collect(),
            edges: g.edges.iter().map(|e| (position[&e.src], position[&e.dst], e.label())).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PatternEdge {
    pub src: usize,
    pub dst: usize,
    pub label: String,
}

/// Small labeled directed graph. Valid patterns are connected ignoring
/// direction (or a single node), free of self-loops and of repeated
/// `(src, dst, label)` edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PatternGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<PatternEdge>,
}

impl PatternGraph {
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn validate(&self) -> Result<(), MineError> {
        let n = self.nodes.len();
        if n == 0 {
            return Err(MineError::InvalidPattern("no nodes".into()));
        }
        let mut seen = BTreeSet::new();
        for e in &self.edges {
            if e.src >= n || e.dst >= n {
                return Err(MineError::InvalidPattern(format!("edge ({}, {}) out of range", e.src, e.dst)));
            }
            if e.src == e.dst {
                return Err(MineError::InvalidPattern(format!("self-loop on node {}", e.src)));
            }
            if !seen.insert((e.src, e.dst, e.label.as_str())) {
                return Err(MineError::InvalidPattern(format!("duplicate edge ({}, {}, {})", e.src, e.dst, e.label)));
            }
        }
        let edges: Vec<(u8, u8, u32)> = self.edges.iter().map(|e| (e.src as u8, e.dst as u8, 0)).collect();
        if n > u8::MAX as usize || !is_connected(n, &edges) {
            return Err(MineError::InvalidPattern("not connected".into()));
        }
        Ok(())
    }

    /// Parses canonical text back into a pattern in canonical node order.
    pub fn from_canonical(text: &str) -> Result<PatternGraph, MineError> {
        let bad = || MineError::InvalidPattern(format!("malformed canonical text `{text}`"));
        let tokens = tokenize(text).ok_or_else(bad)?;
        let mut it = tokens.into_iter().peekable();
        if it.next() != Some(Tok::Open) {
            return Err(bad());
        }
        let mut nodes = Vec::new();
        loop {
            match it.next() {
                Some(Tok::Text(s)) => nodes.push(s),
                Some(Tok::Close) if nodes.is_empty() => break,
                _ => return Err(bad()),
            }
            match it.next() {
                Some(Tok::Comma) => continue,
                Some(Tok::Close) => break,
                _ => return Err(bad()),
            }
        }
        let next_is = |it: &mut std::iter::Peekable<std::vec::IntoIter<Tok>>, t: Tok| {
            if it.next() == Some(t) {
                Ok(())
            } else {
                Err(bad())
            }
        };
        next_is(&mut it, Tok::Semi)?;
        next_is(&mut it, Tok::Open)?;
        let mut edges = Vec::new();
        if it.peek() == Some(&Tok::Close) {
            it.next();
        } else {
            loop {
                next_is(&mut it, Tok::LParen)?;
                let num = |t: Option<Tok>| match t {
                    Some(Tok::Text(s)) => s.parse::<usize>().map_err(|_| bad()),
                    _ => Err(bad()),
                };
                let src = num(it.next())?;
                next_is(&mut it, Tok::Comma)?;
                let dst = num(it.next())?;
                next_is(&mut it, Tok::Comma)?;
                let label = match it.next() {
                    Some(Tok::Text(s)) => s,
                    _ => return Err(bad()),
                };
                next_is(&mut it, Tok::RParen)?;
                edges.push(PatternEdge { src, dst, label });
                match it.next() {
                    Some(Tok::Comma) => continue,
                    Some(Tok::Close) => break,
                    _ => return Err(bad()),
                }
            }
        }
        if it.next().is_some() {
            return Err(bad());
        }
        let p = PatternGraph { nodes, edges };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    LParen,
    RParen,
    Comma,
    Semi,
    Text(String),
}

fn tokenize(text: &str) -> Option<Vec<Tok>> {
    let mut out = Vec::new();
    let mut cur: Option<String> = None;
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        let tok = match c {
            '[' => Tok::Open,
            ']' => Tok::Close,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '\\' => {
                cur.get_or_insert_with(String::new).push(chars.next()?);
                continue;
            }
            c => {
                cur.get_or_insert_with(String::new).push(c);
                continue;
            }
        };
        if let Some(s) = cur.take() {
            out.push(Tok::Text(s));
        }
        out.push(tok);
    }
    if let Some(s) = cur.take() {
        out.push(Tok::Text(s));
    }
    Some(out)
}

fn escape(label: &str, out: &mut String) {
    for c in label.chars() {
        if matches!(c, '\\' | ',' | ';' | '[' | ']' | '(' | ')') {
            out.push('\\');
        }
        out.push(c);
    }
}

/// Text identifying an isomorphism class: `[labels];[(src,dst,label),...]`
/// with nodes in sorted label order and the edge list minimal over all
/// label-preserving node orderings. Structural characters inside labels are
/// backslash-escaped.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalForm(pub String);

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl CanonicalForm {
    /// First 16 hex digits of the SHA-256 of the text.
    pub fn pattern_id(&self) -> String {
        Sha256::digest(self.0.as_bytes()).iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

fn render(key: &Key, nodes: &Interner, edges: &Interner) -> (CanonicalForm, PatternGraph) {
    let mut s = String::from("[");
    for (i, &l) in key.nodes.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        escape(nodes.text(l), &mut s);
    }
    s.push_str("];[");
    for (i, &(a, b, l)) in key.edges.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&format!("({a},{b},"));
        escape(edges.text(l), &mut s);
        s.push(')');
    }
    s.push(']');
    let graph = PatternGraph {
        nodes: key.nodes.iter().map(|&l| nodes.text(l).to_string()).collect(),
        edges: key
            .edges
            .iter()
            .map(|&(a, b, l)| PatternEdge { src: a as usize, dst: b as usize, label: edges.text(l).to_string() })
            .collect(),
    };
    (CanonicalForm(s), graph)
}

fn intern_pattern(p: &PatternGraph) -> (Key, Interner, Interner) {
    let nodes = Interner::from_sorted(p.nodes.iter().cloned().collect());
    let edges = Interner::from_sorted(p.edges.iter().map(|e| e.label.clone()).collect());
    let ns: Vec<u32> = p.nodes.iter().map(|l| nodes.get(l).unwrap()).collect();
    let es: Vec<(u8, u8, u32)> =
        p.edges.iter().map(|e| (e.src as u8, e.dst as u8, edges.get(&e.label).unwrap())).collect();
    (canonicalize(&ns, &es), nodes, edges)
}

/// Canonical text of a pattern; isomorphic patterns and only those share it.
pub fn canonical_form(p: &PatternGraph, max_size: usize) -> Result<CanonicalForm, MineError> {
    if p.size() > max_size {
        return Err(MineError::PatternTooLarge { size: p.size(), max: max_size });
    }
    p.validate()?;
    let (key, nodes, edges) = intern_pattern(p);
    Ok(render(&key, &nodes, &edges).0)
}

/// Same pattern relabeled into canonical node order.
pub fn canonical_pattern(p: &PatternGraph, max_size: usize) -> Result<PatternGraph, MineError> {
    canonical_form(p, max_size)?;
    let (key, nodes, edges) = intern_pattern(p);
    Ok(render(&key, &nodes, &edges).1)
}

/// Up to `limit` non-induced embeddings of `p` into `g`, each listing the
/// graph node id assigned to every pattern node (in `p`'s node order).
pub fn find_embeddings(p: &PatternGraph, g: &GeneralizedCfg, limit: usize) -> Vec<Vec<NodeId>> {
    find_embeddings_in(p, &MiningGraph::from(g), limit)
}

pub fn find_embeddings_in(p: &PatternGraph, g: &MiningGraph, limit: usize) -> Vec<Vec<NodeId>> {
    let node_names = Interner::from_sorted(p.nodes.iter().chain(&g.labels).cloned().collect());
    let edge_names =
        Interner::from_sorted(p.edges.iter().map(|e| e.label.clone()).chain(g.edges.iter().map(|e| e.2.clone())).collect());
    let db = intern_graph(g, &node_names, &edge_names);
    // Keep the caller's node order so mappings line up with `p.nodes`.
    let key = Key {
        nodes: p.nodes.iter().map(|l| node_names.get(l).unwrap()).collect(),
        edges: p.edges.iter().map(|e| (e.src as u8, e.dst as u8, edge_names.get(&e.label).unwrap())).collect(),
    };
    embeddings(&key, &db, limit)
        .into_iter()
        .map(|m| m.into_iter().map(|x| g.node_ids[x as usize]).collect())
        .collect()
}

fn intern_graph(g: &MiningGraph, nodes: &Interner, edges: &Interner) -> DbGraph {
    DbGraph::new(
        g.labels.iter().map(|l| nodes.get(l).unwrap()).collect(),
        g.edges
            .iter()
            .filter(|(a, b, _)| a != b)
            .map(|(a, b, l)| (*a as u32, *b as u32, edges.get(l).unwrap())),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub method: MethodRef,
    /// Graph node id per pattern node, in the pattern's canonical order.
    pub node_ids: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternStats {
    pub id: String,
    pub canonical: CanonicalForm,
    pub size: usize,
    pub support_count: usize,
    pub support_ratio: f64,
    pub graph: PatternGraph,
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MineParams {
    pub min_support_ratio: f64,
    pub max_size: usize,
    pub witnesses: usize,
}

impl MineParams {
    pub fn new(min_support_ratio: f64) -> Self {
        MineParams { min_support_ratio, max_size: DEFAULT_MAX_SIZE, witnesses: DEFAULT_WITNESSES }
    }

    fn validate(&self, db_len: usize) -> Result<(), MineError> {
        if !(self.min_support_ratio > 0.0 && self.min_support_ratio <= 1.0) {
            return Err(MineError::RatioOutOfRange(self.min_support_ratio));
        }
        if db_len == 0 {
            return Err(MineError::EmptyDatabase);
        }
        if self.max_size == 0 || self.max_size > u8::MAX as usize {
            return Err(MineError::InvalidMaxSize(self.max_size));
        }
        Ok(())
    }
}

/// Smallest graph count whose share of `db_len` reaches `ratio`.
pub fn required_support(ratio: f64, db_len: usize) -> usize {
    // The epsilon absorbs float error in products that are exact integers.
    ((ratio * db_len as f64 - 1e-9).ceil() as usize).clamp(1, db_len.max(1))
}

struct Database<'a> {
    source: &'a [MiningGraph],
    graphs: Vec<DbGraph>,
    node_names: Interner,
    edge_names: Interner,
}

impl<'a> Database<'a> {
    fn new(source: &'a [MiningGraph]) -> Self {
        let node_names = Interner::from_sorted(source.iter().flat_map(|g| g.labels.iter().cloned()).collect());
        let edge_names = Interner::from_sorted(source.iter().flat_map(|g| g.edges.iter().map(|e| e.2.clone())).collect());
        let graphs = source.par_iter().map(|g| intern_graph(g, &node_names, &edge_names)).collect();
        Database { source, graphs, node_names, edge_names }
    }

    fn finish(&self, found: Vec<(Key, Vec<u32>)>, witnesses: usize) -> Vec<PatternStats> {
        let total = self.graphs.len();
        let mut stats: Vec<PatternStats> = found
            .into_par_iter()
            .map(|(key, support)| {
                let (canonical, graph) = render(&key, &self.node_names, &self.edge_names);
                let witnesses = support
                    .iter()
                    .take(witnesses)
                    .filter_map(|&gi| {
                        let src = &self.source[gi as usize];
                        embeddings(&key, &self.graphs[gi as usize], 1).into_iter().next().map(|m| Witness {
                            method: src.method.clone(),
                            node_ids: m.into_iter().map(|x| src.node_ids[x as usize]).collect(),
                        })
                    })
                    .collect();
                PatternStats {
                    id: canonical.pattern_id(),
                    size: key.nodes.len(),
                    support_count: support.len(),
                    support_ratio: support.len() as f64 / total as f64,
                    canonical,
                    graph,
                    witnesses,
                }
            })
            .collect();
        stats.sort_by(|a, b| {
            a.size.cmp(&b.size).then(b.support_count.cmp(&a.support_count)).then_with(|| a.canonical.cmp(&b.canonical))
        });
        stats
    }
}

/// Level-wise miner over generalized (or baseline) CFGs.
pub fn mine(db: &[GeneralizedCfg], params: &MineParams) -> Result<Vec<PatternStats>, MineError> {
    let graphs: Vec<MiningGraph> = db.iter().map(MiningGraph::from).collect();
    mine_graphs(&graphs, params)
}

/// Level-wise search growing one edge per level. A pattern with `k + 1`
/// edges is counted only when every connected sub-pattern obtained by
/// deleting one edge is frequent, and only in graphs supporting all of them.
pub fn mine_graphs(db: &[MiningGraph], params: &MineParams) -> Result<Vec<PatternStats>, MineError> {
    params.validate(db.len())?;
    let data = Database::new(db);
    let need = required_support(params.min_support_ratio, db.len());
    let max_size = params.max_size;

    let mut found: Vec<(Key, Vec<u32>)> = Vec::new();
    let mut label_support: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for (gi, g) in data.graphs.iter().enumerate() {
        for &l in g.by_label.keys() {
            label_support.entry(l).or_default().push(gi as u32);
        }
    }
    for (l, mut support) in label_support {
        if support.len() >= need {
            support.sort_unstable();
            found.push((Key { nodes: vec![l], edges: vec![] }, support));
        }
    }
    if max_size < 2 {
        return Ok(data.finish(found, params.witnesses));
    }

    // Frequent single edges as (src label, edge label, dst label).
    let mut triples: BTreeMap<(u32, u32, u32), Vec<u32>> = BTreeMap::new();
    for (gi, g) in data.graphs.iter().enumerate() {
        let present: BTreeSet<(u32, u32, u32)> =
            g.edges().into_iter().map(|(a, b, l)| (g.labels[a as usize], l, g.labels[b as usize])).collect();
        for t in present {
            triples.entry(t).or_default().push(gi as u32);
        }
    }
    triples.retain(|_, s| s.len() >= need);
    let mut out_ext: HashMap<u32, Vec<(u32, u32)>> = HashMap::new();
    let mut in_ext: HashMap<u32, Vec<(u32, u32)>> = HashMap::new();
    let mut current: BTreeMap<Key, Vec<u32>> = BTreeMap::new();
    for (&(s, l, d), support) in &triples {
        out_ext.entry(s).or_default().push((l, d));
        in_ext.entry(d).or_default().push((l, s));
        current.insert(canonicalize(&[s, d], &[(0, 1, l)]), support.clone());
    }

    while !current.is_empty() {
        let candidates: BTreeSet<Key> = current
            .par_iter()
            .map(|(key, _)| extensions(key, &out_ext, &in_ext, max_size))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect();
        let candidates: Vec<Key> = candidates.into_iter().collect();
        let next: Vec<(Key, Vec<u32>)> = candidates
            .into_par_iter()
            .filter_map(|cand| {
                let mut support: Option<Vec<u32>> = None;
                for k in 0..cand.edges.len() {
                    let Some(sub) = without_edge(&cand, k) else { continue };
                    let sub_support = current.get(&sub)?;
                    support = Some(match support {
                        None => sub_support.clone(),
                        Some(s) => intersect(&s, sub_support),
                    });
                }
                let support = support?;
                if support.len() < need {
                    return None;
                }
                let support: Vec<u32> =
                    support.into_iter().filter(|&gi| contains(&cand, &data.graphs[gi as usize])).collect();
                (support.len() >= need).then_some((cand, support))
            })
            .collect();
        found.extend(std::mem::take(&mut current));
        current = next.into_iter().collect();
    }
    Ok(data.finish(found, params.witnesses))
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j, mut out) = (0, 0, Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// One-edge extensions of `key` built only from frequent single edges.
fn extensions(
    key: &Key,
    out_ext: &HashMap<u32, Vec<(u32, u32)>>,
    in_ext: &HashMap<u32, Vec<(u32, u32)>>,
    max_size: usize,
) -> Vec<Key> {
    let n = key.nodes.len();
    let none = Vec::new();
    let mut out = Vec::new();
    for i in 0..n {
        let li = key.nodes[i];
        let outs = out_ext.get(&li).unwrap_or(&none);
        let ins = in_ext.get(&li).unwrap_or(&none);
        if n < max_size {
            let mut nodes = key.nodes.clone();
            nodes.push(0);
            for &(el, x) in outs {
                nodes[n] = x;
                let mut edges = key.edges.clone();
                edges.push((i as u8, n as u8, el));
                out.push(canonicalize(&nodes, &edges));
            }
            for &(el, x) in ins {
                nodes[n] = x;
                let mut edges = key.edges.clone();
                edges.push((n as u8, i as u8, el));
                out.push(canonicalize(&nodes, &edges));
            }
        }
        for &(el, x) in outs {
            for j in 0..n {
                if j != i && key.nodes[j] == x && !key.edges.contains(&(i as u8, j as u8, el)) {
                    let mut edges = key.edges.clone();
                    edges.push((i as u8, j as u8, el));
                    out.push(canonicalize(&key.nodes, &edges));
                }
            }
        }
    }
    out
}

/// Exhaustive oracle: enumerates every connected edge subset (and every
/// single node) of every graph. Bounded to small inputs.
pub fn brute_force_mine(db: &[GeneralizedCfg], params: &MineParams) -> Result<Vec<PatternStats>, MineError> {
    let graphs: Vec<MiningGraph> = db.iter().map(MiningGraph::from).collect();
    brute_force_mine_graphs(&graphs, params)
}

pub fn brute_force_mine_graphs(db: &[MiningGraph], params: &MineParams) -> Result<Vec<PatternStats>, MineError> {
    params.validate(db.len())?;
    if db.len() > ORACLE_MAX_GRAPHS {
        return Err(MineError::OracleLimit(format!("{} graphs", db.len())));
    }
    let data = Database::new(db);
    for g in &data.graphs {
        if g.labels.len() > ORACLE_MAX_NODES || g.edges().len() > ORACLE_MAX_EDGES {
            return Err(MineError::OracleLimit(format!("{} nodes, {} edges", g.labels.len(), g.edges().len())));
        }
    }
    let need = required_support(params.min_support_ratio, db.len());
    let mut support: BTreeMap<Key, Vec<u32>> = BTreeMap::new();
    for (gi, g) in data.graphs.iter().enumerate() {
        for key in all_subpatterns(g, params.max_size) {
            support.entry(key).or_default().push(gi as u32);
        }
    }
    let found = support.into_iter().filter(|(_, s)| s.len() >= need).collect();
    Ok(data.finish(found, params.witnesses))
}

fn all_subpatterns(g: &DbGraph, max_size: usize) -> BTreeSet<Key> {
    let mut keys: BTreeSet<Key> = g.labels.iter().map(|&l| Key { nodes: vec![l], edges: vec![] }).collect();
    let edges = g.edges();
    for mask in 1u32..(1u32 << edges.len()) {
        let chosen: Vec<(u32, u32, u32)> = (0..edges.len()).filter(|&i| mask & (1 << i) != 0).map(|i| edges[i]).collect();
        let covered: BTreeSet<u32> = chosen.iter().flat_map(|&(a, b, _)| [a, b]).collect();
        if covered.len() > max_size {
            continue;
        }
        let covered: Vec<u32> = covered.into_iter().collect();
        let pos = |x: u32| covered.binary_search(&x).unwrap() as u8;
        let local: Vec<(u8, u8, u32)> = chosen.iter().map(|&(a, b, l)| (pos(a), pos(b), l)).collect();
        if is_connected(covered.len(), &local) {
            let labels: Vec<u32> = covered.iter().map(|&x| g.labels[x as usize]).collect();
            keys.insert(canonicalize(&labels, &local));
        }
    }
    keys
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(name: &str, labels: &[&str], edges: &[(usize, usize, &str)]) -> MiningGraph {
        MiningGraph {
            method: MethodRef { file_path: name.into(), method_signature: "m()".into(), method_index: 0 },
            node_ids: (0..labels.len()).collect(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
            edges: edges.iter().map(|&(a, b, l)| (a, b, l.to_string())).collect(),
        }
    }

    fn pattern(nodes: &[&str], edges: &[(usize, usize, &str)]) -> PatternGraph {
        PatternGraph {
            nodes: nodes.iter().map(|s| s.to_string()).collect(),
            edges: edges.iter().map(|&(src, dst, l)| PatternEdge { src, dst, label: l.into() }).collect(),
        }
    }

    fn summary(stats: &[PatternStats]) -> Vec<(String, usize)> {
        stats.iter().map(|s| (s.canonical.0.clone(), s.support_count)).collect()
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonical_form(&pattern(&["A"], &[]), 4).unwrap().0, "[A];[]");
        let ab = canonical_form(&pattern(&["A", "B"], &[(0, 1, "E")]), 4).unwrap();
        let ba = canonical_form(&pattern(&["B", "A"], &[(1, 0, "E")]), 4).unwrap();
        assert_eq!(ab, ba);
        assert_eq!(ab.0, "[A,B];[(0,1,E)]");
        let reversed = canonical_form(&pattern(&["A", "B"], &[(1, 0, "E")]), 4).unwrap();
        assert_ne!(ab, reversed);
    }

    #[test]
    fn canonical_text_escapes_and_parses() {
        let p = pattern(&["f(a, b);", "x[0] = y;"], &[(0, 1, "NONE|DEF_USE")]);
        let c = canonical_form(&p, 4).unwrap();
        assert_eq!(c.0, r"[f\(a\, b\)\;,x\[0\] = y\;];[(0,1,NONE|DEF_USE)]");
        assert_eq!(PatternGraph::from_canonical(&c.0).unwrap(), p);
        assert_eq!(PatternGraph::from_canonical("[A];[]").unwrap(), pattern(&["A"], &[]));
        assert!(PatternGraph::from_canonical("[A;[]").is_err());
    }

    #[test]
    fn canonical_errors() {
        let big = pattern(&["A", "A", "A", "A", "A"], &[(0, 1, "E"), (1, 2, "E"), (2, 3, "E"), (3, 4, "E")]);
        assert!(matches!(canonical_form(&big, 4), Err(MineError::PatternTooLarge { .. })));
        assert!(canonical_form(&big, 5).is_ok());
        assert!(canonical_form(&pattern(&["A", "B"], &[]), 4).is_err());
        assert!(canonical_form(&pattern(&["A", "B"], &[(0, 1, "E"), (0, 1, "E")]), 4).is_err());
    }

    #[test]
    fn embedding_examples() {
        let g = graph("g", &["A", "B", "C"], &[(0, 1, "E"), (1, 2, "E")]);
        assert_eq!(find_embeddings_in(&pattern(&["A"], &[]), &g, 10), vec![vec![0]]);
        assert_eq!(find_embeddings_in(&pattern(&["A", "B"], &[(0, 1, "E")]), &g, 10), vec![vec![0, 1]]);
        assert!(find_embeddings_in(&pattern(&["A", "A"], &[(0, 1, "E")]), &g, 10).is_empty());
    }

    #[test]
    fn three_graph_threshold() {
        assert_eq!(required_support(0.66, 3), 2);
        assert_eq!(required_support(0.5, 4), 2);
        assert_eq!(required_support(1.0, 7), 7);
        assert_eq!(required_support(0.0001, 7), 1);
        let db = vec![
            graph("g1", &["A", "B"], &[(0, 1, "E")]),
            graph("g2", &["A", "B", "C"], &[(0, 1, "E"), (1, 2, "E")]),
            graph("g3", &["B", "C"], &[(0, 1, "E")]),
        ];
        let params = MineParams::new(0.66);
        let mined = mine_graphs(&db, &params).unwrap();
        let expected = vec![
            ("[B];[]".to_string(), 3),
            ("[A];[]".to_string(), 2),
            ("[C];[]".to_string(), 2),
            ("[A,B];[(0,1,E)]".to_string(), 2),
            ("[B,C];[(0,1,E)]".to_string(), 2),
        ];
        assert_eq!(summary(&mined), expected);
        assert_eq!(summary(&brute_force_mine_graphs(&db, &params).unwrap()), expected);
    }

    #[test]
    fn identical_single_nodes() {
        let db = vec![graph("a", &["A"], &[]), graph("b", &["A"], &[])];
        let mined = mine_graphs(&db, &MineParams::new(1.0)).unwrap();
        assert_eq!(summary(&mined), vec![("[A];[]".to_string(), 2)]);
        assert_eq!(mined[0].witnesses.len(), 2);
        assert_eq!(mined[0].id.len(), 16);
    }

    #[test]
    fn disjoint_labels_at_full_threshold() {
        let db = vec![graph("a", &["A", "B"], &[(0, 1, "E")]), graph("b", &["C", "D"], &[(0, 1, "E")])];
        assert!(mine_graphs(&db, &MineParams::new(1.0)).unwrap().is_empty());
        assert!(brute_force_mine_graphs(&db, &MineParams::new(1.0)).unwrap().is_empty());
    }

    #[test]
    fn single_graph_every_subpattern() {
        let db = vec![graph("a", &["A", "B", "C"], &[(0, 1, "E"), (1, 2, "E")])];
        let mined = mine_graphs(&db, &MineParams::new(1.0)).unwrap();
        let texts: Vec<String> = mined.iter().map(|s| s.canonical.0.clone()).collect();
        assert_eq!(
            texts,
            vec!["[A];[]", "[B];[]", "[C];[]", "[A,B];[(0,1,E)]", "[B,C];[(0,1,E)]", "[A,B,C];[(0,1,E),(1,2,E)]"]
        );
        assert_eq!(mined[5].witnesses[0].node_ids, vec![0, 1, 2]);
    }

    #[test]
    fn many_embeddings_count_once() {
        let mut labels = vec!["A"];
        labels.extend(std::iter::repeat_n("B", 10));
        let edges: Vec<(usize, usize, &str)> = (1..=10).map(|i| (0, i, "E")).collect();
        let db = vec![graph("star", &labels, &edges), graph("other", &["Z"], &[])];
        let mined = mine_graphs(&db, &MineParams::new(0.5)).unwrap();
        let ab = mined.iter().find(|s| s.canonical.0 == "[A,B];[(0,1,E)]").unwrap();
        assert_eq!(ab.support_count, 1);
        assert_eq!(ab.support_ratio, 0.5);
    }

    #[test]
    fn parameter_errors() {
        let db = vec![graph("a", &["A"], &[])];
        assert!(matches!(mine_graphs(&db, &MineParams::new(0.0)), Err(MineError::RatioOutOfRange(_))));
        assert!(matches!(mine_graphs(&db, &MineParams::new(1.5)), Err(MineError::RatioOutOfRange(_))));
        assert!(matches!(mine_graphs(&[], &MineParams::new(0.5)), Err(MineError::EmptyDatabase)));
        let big: Vec<MiningGraph> = (0..17).map(|i| graph(&i.to_string(), &["A"], &[])).collect();
        assert!(matches!(brute_force_mine_graphs(&big, &MineParams::new(0.5)), Err(MineError::OracleLimit(_))));
    }

    #[test]
    fn cycles_and_parallel_edges() {
        let g = graph("c", &["A", "B"], &[(0, 1, "T"), (0, 1, "F"), (1, 0, "N")]);
        let db = vec![g.clone(), g];
        let params = MineParams::new(1.0);
        assert_eq!(summary(&mine_graphs(&db, &params).unwrap()), summary(&brute_force_mine_graphs(&db, &params).unwrap()));
    }
}
