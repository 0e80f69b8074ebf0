//! Java source to per-method control-flow graphs.
//!
//! One node per statement-level construct plus synthetic ENTRY and EXIT
//! nodes. Conditions of `if` and loops live inside the IF/LOOP node.
//! Parsing uses the tree-sitter Java grammar; the graph construction is
//! done here.

mod builder;
pub mod defuse;
mod ingest;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::vocab::{LiteralKind, NodeKind, OpTag, TypeTag};

pub use builder::{build_cfg, build_cfg_at};
pub use defuse::defs_uses;
pub use ingest::{build_corpus, build_file, ingest_corpus, CorpusCfgs, IngestReport, IngestWarning, Ingested, MethodSource};

pub type NodeId = usize;

#[derive(Debug, thiserror::Error)]
pub enum FrontendError {
    #[error("cannot read corpus root {path}: {source}")]
    Root {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid include glob `{0}`")]
    Glob(String),
    #[error("{method}: {message}")]
    Method { method: MethodRef, message: String },
}

/// Identifies one method within a corpus snapshot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MethodRef {
    pub file_path: String,
    pub method_signature: String,
    pub method_index: usize,
}

impl std::fmt::Display for MethodRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}#{}:{}", self.file_path, self.method_index, self.method_signature)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarity {
    #[serde(rename = "NONE")]
    None,
    #[serde(rename = "TRUE_BRANCH")]
    TrueBranch,
    #[serde(rename = "FALSE_BRANCH")]
    FalseBranch,
    #[serde(rename = "EXCEPTION")]
    Exception,
}

impl Polarity {
    /// Token used in mining edge labels.
    pub fn label_token(self) -> &'static str {
        match self {
            Polarity::None => "NONE",
            Polarity::TrueBranch => "TRUE",
            Polarity::FalseBranch => "FALSE",
            Polarity::Exception => "EXCEPTION",
        }
    }

    pub fn from_label_token(s: &str) -> Option<Polarity> {
        Some(match s {
            "NONE" => Polarity::None,
            "TRUE" => Polarity::TrueBranch,
            "FALSE" => Polarity::FalseBranch,
            "EXCEPTION" => Polarity::Exception,
            _ => return None,
        })
    }
}

/// Half-open byte range into the source file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn slice<'a>(&self, text: &'a str) -> Option<&'a str> {
        text.get(self.start..self.end)
    }
}

/// A comparison of a variable against `null` at the top of a condition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NullTest {
    pub var: String,
    /// `true` for `!=`, `false` for `==`.
    pub negated: bool,
}

/// Syntactic facts about a statement beyond its def/use sets, kept so
/// detectors can work from the graph alone.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeShape {
    /// Variable declared, assigned or updated; for calls, the receiver.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    /// The target is a field (`this.f`, `o.f`, or a name with no local
    /// or parameter declaration).
    #[serde(default, skip_serializing_if = "is_false")]
    pub target_is_field: bool,
    /// The whole returned expression is a single field read.
    #[serde(default, skip_serializing_if = "is_false")]
    pub field_read: bool,
    /// The assigned value is a bare parameter name.
    #[serde(default, skip_serializing_if = "is_false")]
    pub param_value: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cond_top_op: Option<OpTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub null_test: Option<NullTest>,
    /// Contains a `+` chain mixing a string literal with a variable read.
    #[serde(default, skip_serializing_if = "is_false")]
    pub concat: bool,
    /// Argument count of the statement-level call.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arity: Option<usize>,
    /// Statements in the directly attached body (then-branch, loop body,
    /// catch body ...).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body_len: Option<usize>,
    /// Statements in the else branch, when one exists.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub else_len: Option<usize>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfgNode {
    pub id: NodeId,
    pub kind: NodeKind,
    pub declared_type: Option<TypeTag>,
    pub literal_kinds: Vec<LiteralKind>,
    pub operator_tags: Vec<OpTag>,
    pub defs: BTreeSet<String>,
    pub uses: BTreeSet<String>,
    pub span: Span,
    #[serde(default)]
    pub shape: NodeShape,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CfgEdge {
    pub src: NodeId,
    pub dst: NodeId,
    pub polarity: Polarity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub type_tag: TypeTag,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodCfg {
    pub method: MethodRef,
    #[serde(default)]
    pub params: Vec<Param>,
    pub nodes: Vec<CfgNode>,
    pub edges: Vec<CfgEdge>,
    pub entry_id: NodeId,
    pub exit_id: NodeId,
}

impl MethodCfg {
    pub fn node(&self, id: NodeId) -> &CfgNode {
        &self.nodes[id]
    }

    pub fn successors(&self, id: NodeId) -> impl Iterator<Item = &CfgEdge> + '_ {
        self.edges.iter().filter(move |e| e.src == id)
    }

    pub fn predecessors(&self, id: NodeId) -> impl Iterator<Item = &CfgEdge> + '_ {
        self.edges.iter().filter(move |e| e.dst == id)
    }

    /// Target of the outgoing edge with the given polarity.
    pub fn branch(&self, id: NodeId, polarity: Polarity) -> Option<NodeId> {
        self.successors(id).find(|e| e.polarity == polarity).map(|e| e.dst)
    }

    pub fn is_param(&self, name: &str) -> bool {
        self.params.iter().any(|p| p.name == name)
    }

    /// Checks the structural invariants: single ENTRY/EXIT, ENTRY in-degree 0,
    /// EXIT out-degree 0, no self-loops, endpoints valid, everything reachable
    /// from ENTRY, and every node reaches EXIT or a THROW node.
    pub fn check_structure(&self) -> Result<(), String> {
        let n = self.nodes.len();
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id != i {
                return Err(format!("node at position {i} has id {}", node.id));
            }
        }
        let entries = self.nodes.iter().filter(|x| x.kind == NodeKind::Entry).count();
        let exits = self.nodes.iter().filter(|x| x.kind == NodeKind::Exit).count();
        if entries != 1 || exits != 1 {
            return Err(format!("{entries} ENTRY and {exits} EXIT nodes"));
        }
        for e in &self.edges {
            if e.src >= n || e.dst >= n {
                return Err(format!("edge {e:?} out of range"));
            }
            if e.src == e.dst {
                return Err(format!("self-loop at {}", e.src));
            }
            if e.dst == self.entry_id {
                return Err("ENTRY has an incoming edge".into());
            }
            if e.src == self.exit_id {
                return Err("EXIT has an outgoing edge".into());
            }
        }
        let forward = reach(n, self.entry_id, |u| self.successors(u).map(|e| e.dst).collect());
        if let Some(u) = (0..n).find(|&u| !forward[u]) {
            return Err(format!("node {u} unreachable from ENTRY"));
        }
        let mut sinks: Vec<NodeId> = vec![self.exit_id];
        sinks.extend(self.nodes.iter().filter(|x| x.kind == NodeKind::Throw).map(|x| x.id));
        let mut backward = vec![false; n];
        for s in sinks {
            let r = reach(n, s, |u| self.predecessors(u).map(|e| e.src).collect());
            for (b, r) in backward.iter_mut().zip(r) {
                *b |= r;
            }
        }
        if let Some(u) = (0..n).find(|&u| !backward[u]) {
            return Err(format!("node {u} reaches neither EXIT nor THROW"));
        }
        for node in &self.nodes {
            if node.kind == NodeKind::If {
                let t = self.successors(node.id).filter(|e| e.polarity == Polarity::TrueBranch).count();
                let f = self.successors(node.id).filter(|e| e.polarity == Polarity::FalseBranch).count();
                if t != 1 || f != 1 {
                    return Err(format!("IF {} has {t} true and {f} false edges", node.id));
                }
            }
        }
        Ok(())
    }
}

fn reach(n: usize, start: NodeId, next: impl Fn(NodeId) -> Vec<NodeId>) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::from([start]);
    seen[start] = true;
    while let Some(u) = queue.pop_front() {
        for v in next(u) {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}
