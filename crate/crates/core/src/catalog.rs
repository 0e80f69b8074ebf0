//! Detectors for seven candidate sugars and a per-idiom census of the
//! methods containing them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::frontend::{MethodCfg, MethodRef, NodeId, Polarity};
use crate::vocab::{LiteralKind, NodeKind, OpTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CatalogIdiom {
    MultipleAssignment,
    MultipleIncrement,
    Unless,
    AnyAll,
    NullIfNull,
    RequireType,
    Rethrow,
}

impl CatalogIdiom {
    pub const ALL: [CatalogIdiom; 7] = [
        CatalogIdiom::MultipleAssignment,
        CatalogIdiom::MultipleIncrement,
        CatalogIdiom::Unless,
        CatalogIdiom::AnyAll,
        CatalogIdiom::NullIfNull,
        CatalogIdiom::RequireType,
        CatalogIdiom::Rethrow,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CatalogIdiom::MultipleAssignment => "MULTIPLE_ASSIGNMENT",
            CatalogIdiom::MultipleIncrement => "MULTIPLE_INCREMENT",
            CatalogIdiom::Unless => "UNLESS",
            CatalogIdiom::AnyAll => "ANY_ALL",
            CatalogIdiom::NullIfNull => "NULL_IF_NULL",
            CatalogIdiom::RequireType => "REQUIRE_TYPE",
            CatalogIdiom::Rethrow => "RETHROW",
        }
    }
}

fn ifs(cfg: &MethodCfg) -> impl Iterator<Item = &crate::frontend::CfgNode> {
    cfg.nodes.iter().filter(|n| n.kind == NodeKind::If)
}

fn kind_at(cfg: &MethodCfg, id: Option<NodeId>, kind: NodeKind) -> Option<NodeId> {
    id.filter(|&i| cfg.node(i).kind == kind)
}

/// Maximal runs `a1 -> a2 -> ... -> ak` (k >= 2) of nodes matching `pred`
/// where each `ai` has a single successor and each `ai+1` a single
/// predecessor.
fn chains(cfg: &MethodCfg, pred: impl Fn(NodeId) -> bool) -> Vec<Vec<NodeId>> {
    let sole_succ = |id: NodeId| {
        let mut it = cfg.successors(id);
        match (it.next(), it.next()) {
            (Some(e), None) => Some(e.dst),
            _ => None,
        }
    };
    let sole_pred = |id: NodeId| {
        let mut it = cfg.predecessors(id);
        match (it.next(), it.next()) {
            (Some(e), None) => Some(e.src),
            _ => None,
        }
    };
    let link = |a: NodeId| sole_succ(a).filter(|&b| pred(b) && sole_pred(b) == Some(a));
    let mut out = Vec::new();
    for n in &cfg.nodes {
        let starts_chain = pred(n.id) && sole_pred(n.id).is_none_or(|p| !pred(p) || link(p) != Some(n.id));
        if !starts_chain {
            continue;
        }
        let mut chain = vec![n.id];
        let mut cur = n.id;
        while let Some(next) = link(cur) {
            if chain.contains(&next) {
                break;
            }
            chain.push(next);
            cur = next;
        }
        if chain.len() >= 2 {
            out.push(chain);
        }
    }
    out
}

/// Node sets of every instance of `idiom` in the method, ordered by their
/// first node id.
pub fn detect_idiom(cfg: &MethodCfg, idiom: CatalogIdiom) -> Vec<Vec<NodeId>> {
    match idiom {
        CatalogIdiom::MultipleAssignment => chains(cfg, |id| cfg.node(id).kind == NodeKind::Assign),
        CatalogIdiom::MultipleIncrement => chains(cfg, |id| {
            let n = cfg.node(id);
            n.kind == NodeKind::UnaryUpdate && n.operator_tags.contains(&OpTag::Increment)
        }),
        CatalogIdiom::Unless => ifs(cfg).filter(|n| n.shape.cond_top_op == Some(OpTag::Not)).map(|n| vec![n.id]).collect(),
        CatalogIdiom::AnyAll => ifs(cfg)
            .filter(|n| {
                let Some(top) = n.shape.cond_top_op.filter(|op| op.is_conditional()) else { return false };
                let same = n.operator_tags.iter().filter(|&&op| op == top).count();
                let other = n.operator_tags.iter().filter(|&&op| op.is_conditional() && op != top).count();
                same >= 2 && other == 0
            })
            .map(|n| vec![n.id])
            .collect(),
        CatalogIdiom::NullIfNull => ifs(cfg)
            .filter_map(|n| {
                let test = n.shape.null_test.as_ref()?;
                let side = if test.negated { Polarity::FalseBranch } else { Polarity::TrueBranch };
                let ret = kind_at(cfg, cfg.branch(n.id, side), NodeKind::Return)?;
                (cfg.node(ret).literal_kinds == [LiteralKind::Null]).then(|| vec![n.id, ret])
            })
            .collect(),
        CatalogIdiom::RequireType => ifs(cfg)
            .filter(|n| n.shape.cond_top_op == Some(OpTag::InstanceOf) && n.shape.else_len == Some(1))
            .filter_map(|n| kind_at(cfg, cfg.branch(n.id, Polarity::FalseBranch), NodeKind::Throw).map(|t| vec![n.id, t]))
            .collect(),
        CatalogIdiom::Rethrow => cfg
            .nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Catch && n.shape.body_len == Some(1))
            .filter_map(|n| {
                let mut succ = cfg.successors(n.id);
                let t = succ.next().map(|e| e.dst);
                kind_at(cfg, t, NodeKind::Throw).map(|t| vec![n.id, t])
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusExample {
    pub method: MethodRef,
    pub node_ids: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub idiom: CatalogIdiom,
    pub cfg_count: usize,
    pub example_refs: Vec<CensusExample>,
}

/// Per idiom, the number of methods with at least one instance and the
/// first instance of each of the first `examples` such methods in corpus
/// order.
pub fn census(db: &[MethodCfg], examples: usize) -> Vec<CensusRow> {
    let per_method: Vec<[Option<Vec<NodeId>>; 7]> = db
        .par_iter()
        .map(|cfg| CatalogIdiom::ALL.map(|i| detect_idiom(cfg, i).into_iter().next()))
        .collect();
    CatalogIdiom::ALL
        .iter()
        .enumerate()
        .map(|(k, &idiom)| {
            let hits: Vec<(usize, &Vec<NodeId>)> =
                per_method.iter().enumerate().filter_map(|(m, found)| found[k].as_ref().map(|ids| (m, ids))).collect();
            CensusRow {
                idiom,
                cfg_count: hits.len(),
                example_refs: hits
                    .iter()
                    .take(examples)
                    .map(|&(m, ids)| CensusExample { method: db[m].method.clone(), node_ids: ids.clone() })
                    .collect(),
            }
        })
        .collect()
}
