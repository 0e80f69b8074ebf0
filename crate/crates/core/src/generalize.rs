//! Generalized CFGs: node labels without project-specific information,
//! declared-type context re-applied to assignments, and DEF/USE modifiers
//! on neighboring edges. Also the ungeneralized baseline labeling.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::frontend::{CfgNode, MethodCfg, MethodRef, NodeId, Polarity};
use crate::vocab::{ArityBucket, DataEdgeModifier, LiteralKind, NodeKind, OpTag, TypeTag};

/// Composite node label. `canonical_text` is derived from the other fields
/// and parses back into them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneralLabel {
    pub kind: NodeKind,
    pub type_ctx: Option<TypeTag>,
    pub literal_ctx: Vec<LiteralKind>,
    pub arity: Option<ArityBucket>,
    pub op_ctx: Vec<OpTag>,
    canonical_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed label `{text}`: {reason}")]
pub struct LabelParseError {
    pub text: String,
    pub reason: &'static str,
}

impl GeneralLabel {
    pub fn new(
        kind: NodeKind,
        type_ctx: Option<TypeTag>,
        literal_ctx: Vec<LiteralKind>,
        arity: Option<ArityBucket>,
        op_ctx: Vec<OpTag>,
    ) -> Self {
        let mut tokens: Vec<&str> = vec![kind.as_str()];
        tokens.extend(type_ctx.map(TypeTag::as_str));
        tokens.extend(literal_ctx.iter().map(|l| l.as_str()));
        tokens.extend(arity.map(ArityBucket::as_str));
        tokens.extend(op_ctx.iter().map(|o| o.as_str()));
        let canonical_text = tokens.join(" ");
        GeneralLabel { kind, type_ctx, literal_ctx, arity, op_ctx, canonical_text }
    }

    pub fn canonical_text(&self) -> &str {
        &self.canonical_text
    }

    pub fn parse(text: &str) -> Result<Self, LabelParseError> {
        let err = |reason| LabelParseError { text: text.to_string(), reason };
        let mut tokens = text.split(' ').peekable();
        let kind: NodeKind = tokens.next().and_then(|t| t.parse().ok()).ok_or_else(|| err("missing node kind"))?;
        let type_ctx = tokens.peek().and_then(|t| t.parse::<TypeTag>().ok());
        if type_ctx.is_some() {
            tokens.next();
        }
        let mut literal_ctx = Vec::new();
        while let Some(l) = tokens.peek().and_then(|t| t.parse::<LiteralKind>().ok()) {
            literal_ctx.push(l);
            tokens.next();
        }
        let arity = tokens.peek().and_then(|t| t.parse::<ArityBucket>().ok());
        if arity.is_some() {
            tokens.next();
        }
        let op_ctx = tokens.map(|t| t.parse::<OpTag>().map_err(|_| err("unexpected token"))).collect::<Result<Vec<_>, _>>()?;
        let label = GeneralLabel::new(kind, type_ctx, literal_ctx, arity, op_ctx);
        if label.canonical_text != text {
            return Err(err("non-canonical spacing"));
        }
        Ok(label)
    }
}

impl fmt::Display for GeneralLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralNode {
    pub id: NodeId,
    pub kind: NodeKind,
    pub canonical_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralEdge {
    pub src: NodeId,
    pub dst: NodeId,
    pub polarity: Polarity,
    /// Sorted, no duplicates.
    pub modifiers: Vec<DataEdgeModifier>,
}

impl GeneralEdge {
    /// Edge label in the mining alphabet, e.g. `TRUE|USE_DEF`.
    pub fn label(&self) -> String {
        let mut s = self.polarity.label_token().to_string();
        for m in &self.modifiers {
            s.push('|');
            s.push_str(m.as_str());
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralizedCfg {
    pub method: MethodRef,
    pub nodes: Vec<GeneralNode>,
    pub edges: Vec<GeneralEdge>,
    pub entry_id: NodeId,
    pub exit_id: NodeId,
}

/// Which node-labeling scheme a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Generalized,
    Baseline,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Generalized => "generalized",
            Mode::Baseline => "baseline",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "generalized" => Ok(Mode::Generalized),
            "baseline" => Ok(Mode::Baseline),
            other => Err(format!("unknown mode `{other}` (expected generalized or baseline)")),
        }
    }
}

/// Variable-type environment built from parameters and declarations seen
/// so far in node order.
struct TypeEnv(HashMap<String, TypeTag>);

impl TypeEnv {
    fn lookup(&self, name: Option<&str>) -> TypeTag {
        name.and_then(|n| self.0.get(n)).copied().unwrap_or(TypeTag::Unknown)
    }
}

fn node_label(node: &CfgNode, env: &mut TypeEnv) -> GeneralLabel {
    let shape = &node.shape;
    let type_ctx = match node.kind {
        NodeKind::VarDecl => {
            let tag = node.declared_type.unwrap_or(TypeTag::Unknown);
            for d in &node.defs {
                env.0.insert(d.clone(), tag);
            }
            Some(tag)
        }
        NodeKind::Assign | NodeKind::UnaryUpdate => {
            if shape.target_is_field {
                Some(TypeTag::Unknown)
            } else {
                Some(env.lookup(shape.target.as_deref()))
            }
        }
        // An implicit receiver is `this`.
        NodeKind::MethodCall => match shape.target.as_deref() {
            None | Some("this") => Some(TypeTag::Object),
            Some(recv) => Some(env.lookup(Some(recv))),
        },
        NodeKind::Loop | NodeKind::Catch => {
            if let (Some(tag), Some(name)) = (node.declared_type, shape.target.as_ref()) {
                env.0.insert(name.clone(), tag);
            }
            None
        }
        _ => None,
    };
    let arity = match node.kind {
        NodeKind::MethodCall => Some(ArityBucket::from_count(shape.arity.unwrap_or(0))),
        _ => None,
    };
    GeneralLabel::new(node.kind, type_ctx, node.literal_kinds.clone(), arity, node.operator_tags.clone())
}

/// Relabels every node with its [`GeneralLabel`]; topology is unchanged and
/// edges carry no modifiers yet.
pub fn generalize(cfg: &MethodCfg) -> GeneralizedCfg {
    let mut env = TypeEnv(cfg.params.iter().map(|p| (p.name.clone(), p.type_tag)).collect());
    let nodes = cfg
        .nodes
        .iter()
        .map(|n| GeneralNode { id: n.id, kind: n.kind, canonical_text: node_label(n, &mut env).canonical_text })
        .collect();
    GeneralizedCfg {
        method: cfg.method.clone(),
        nodes,
        edges: cfg
            .edges
            .iter()
            .map(|e| GeneralEdge { src: e.src, dst: e.dst, polarity: e.polarity, modifiers: Vec::new() })
            .collect(),
        entry_id: cfg.entry_id,
        exit_id: cfg.exit_id,
    }
}

fn intersects(a: &BTreeSet<String>, b: &BTreeSet<String>) -> bool {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().any(|x| large.contains(x))
}

pub fn edge_modifiers(src: &CfgNode, dst: &CfgNode) -> Vec<DataEdgeModifier> {
    let mut mods = Vec::new();
    if intersects(&src.defs, &dst.defs) {
        mods.push(DataEdgeModifier::DefDef);
    }
    if intersects(&src.defs, &dst.uses) {
        mods.push(DataEdgeModifier::DefUse);
    }
    if intersects(&src.uses, &dst.defs) {
        mods.push(DataEdgeModifier::UseDef);
    }
    if intersects(&src.uses, &dst.uses) {
        mods.push(DataEdgeModifier::UseUse);
    }
    mods
}

/// Decorates each existing control-flow edge with the DEF/USE relations
/// between its endpoints. No edges are added.
pub fn annotate_data_edges(cfg: &MethodCfg, mut g: GeneralizedCfg) -> GeneralizedCfg {
    for e in &mut g.edges {
        e.modifiers = edge_modifiers(cfg.node(e.src), cfg.node(e.dst));
    }
    g
}

/// `generalize` followed by `annotate_data_edges`.
pub fn generalize_full(cfg: &MethodCfg) -> GeneralizedCfg {
    annotate_data_edges(cfg, generalize(cfg))
}

/// Collapses whitespace runs to single spaces and trims.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Ungeneralized labeling: each node is its whitespace-normalized source
/// text. ENTRY/EXIT use their kind name. Modifiers match the generalized
/// pipeline so the two differ only in node labels.
pub fn baseline_label(cfg: &MethodCfg, file_text: &str) -> GeneralizedCfg {
    let mut g = generalize(cfg);
    for (gn, n) in g.nodes.iter_mut().zip(&cfg.nodes) {
        gn.canonical_text = match n.kind {
            NodeKind::Entry | NodeKind::Exit => n.kind.as_str().to_string(),
            _ => n
                .span
                .slice(file_text)
                .map(normalize_whitespace)
                .unwrap_or_else(|| n.kind.as_str().to_string()),
        };
    }
    annotate_data_edges(cfg, g)
}
