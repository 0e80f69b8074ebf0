//! Pattern filtering, the human label log, per-size evaluation metrics and
//! the stopping rule of the labeling loop.

mod labels;
mod metrics;

pub use labels::{LabelError, LabelRecord, LabelStore};
pub use metrics::{compute_metrics, format_median, should_continue, unlabeled_investigated, write_metrics_csv, ContinueError, SizeMetrics};

use serde::{Deserialize, Serialize};

use crate::generalize::GeneralLabel;
use crate::mining::PatternStats;
use crate::vocab::{LiteralKind, NodeKind};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleFlags {
    /// At least two nodes, all with the same label.
    pub duplication: bool,
    /// Some edge carries a DEF/USE modifier.
    pub data_edge: bool,
    /// Some node involves the `null` literal.
    pub null_rule: bool,
    /// Some node is a TRY, CATCH or THROW.
    pub error_handling: bool,
    /// Both an ENTRY and an EXIT node are present.
    pub entry_exit: bool,
}

impl RuleFlags {
    pub fn any(&self) -> bool {
        self.duplication || self.data_edge || self.null_rule || self.error_handling || self.entry_exit
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterVerdict {
    pub pattern_id: String,
    pub size: usize,
    pub flags: RuleFlags,
    /// Size-1 patterns are always investigated; larger ones when any rule
    /// fires.
    pub investigated: bool,
}

/// Facts read off a node label. Generalized labels are parsed; anything
/// else is treated as source text and inspected by leading keyword.
struct LabelFacts {
    kind: Option<NodeKind>,
    has_null: bool,
}

fn label_facts(text: &str) -> LabelFacts {
    if let Ok(label) = GeneralLabel::parse(text) {
        return LabelFacts { kind: Some(label.kind), has_null: label.literal_ctx.contains(&LiteralKind::Null) };
    }
    let words = || text.split(|c: char| !(c.is_alphanumeric() || c == '_')).filter(|w| !w.is_empty());
    let kind = match words().next() {
        Some("try") => Some(NodeKind::Try),
        Some("catch") => Some(NodeKind::Catch),
        Some("throw") => Some(NodeKind::Throw),
        _ => None,
    };
    LabelFacts { kind, has_null: words().any(|w| w == "null") }
}

/// Pure function of the pattern.
pub fn apply_rules(p: &PatternStats) -> FilterVerdict {
    let nodes = &p.graph.nodes;
    let facts: Vec<LabelFacts> = nodes.iter().map(|n| label_facts(n)).collect();
    let has_kind = |k: NodeKind| facts.iter().any(|f| f.kind == Some(k));
    let flags = RuleFlags {
        duplication: nodes.len() >= 2 && nodes.iter().all(|n| n == &nodes[0]),
        data_edge: p.graph.edges.iter().any(|e| e.label.contains('|')),
        null_rule: facts.iter().any(|f| f.has_null),
        error_handling: has_kind(NodeKind::Try) || has_kind(NodeKind::Catch) || has_kind(NodeKind::Throw),
        entry_exit: has_kind(NodeKind::Entry) && has_kind(NodeKind::Exit),
    };
    FilterVerdict { pattern_id: p.id.clone(), size: p.size, investigated: p.size == 1 || flags.any(), flags }
}

pub fn filter_patterns(patterns: &[PatternStats]) -> Vec<FilterVerdict> {
    patterns.iter().map(apply_rules).collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::mining::{canonical_form, PatternEdge, PatternGraph};

    pub(crate) fn stats(nodes: &[&str], edges: &[(usize, usize, &str)], support: usize) -> PatternStats {
        let graph = PatternGraph {
            nodes: nodes.iter().map(|s| s.to_string()).collect(),
            edges: edges.iter().map(|&(src, dst, l)| PatternEdge { src, dst, label: l.into() }).collect(),
        };
        let canonical = canonical_form(&graph, 8).unwrap();
        PatternStats {
            id: canonical.pattern_id(),
            canonical,
            size: nodes.len(),
            support_count: support,
            support_ratio: 1.0,
            graph,
            witnesses: vec![],
        }
    }

    #[test]
    fn duplication() {
        let v = apply_rules(&stats(&["ASSIGN INT INT_LIT", "ASSIGN INT INT_LIT"], &[(0, 1, "NONE")], 3));
        assert!(v.flags.duplication && v.investigated);
        assert_eq!(v.flags, RuleFlags { duplication: true, ..Default::default() });
    }

    #[test]
    fn single_entry_node() {
        let v = apply_rules(&stats(&["ENTRY"], &[], 3));
        assert!(!v.flags.entry_exit && !v.flags.any());
        assert!(v.investigated);
    }

    #[test]
    fn data_edge_and_null() {
        let v = apply_rules(&stats(&["IF NULL EQ", "ASSIGN OBJECT NULL"], &[(0, 1, "TRUE|USE_DEF")], 3));
        assert!(v.flags.data_edge && v.flags.null_rule);
        assert!(!v.flags.duplication && !v.flags.error_handling && !v.flags.entry_exit);
    }

    #[test]
    fn error_and_entry_exit() {
        let v = apply_rules(&stats(&["ENTRY", "THROW OBJECT NEW", "EXIT"], &[(0, 1, "NONE"), (1, 2, "EXCEPTION")], 3));
        assert!(v.flags.error_handling && v.flags.entry_exit);
        let plain = apply_rules(&stats(&["IF INT_LIT GT", "RETURN"], &[(0, 1, "TRUE")], 3));
        assert!(!plain.investigated);
    }

    #[test]
    fn baseline_labels_use_keywords() {
        let v = apply_rules(&stats(&["try", "catch (IOException e)"], &[(0, 1, "EXCEPTION")], 3));
        assert!(v.flags.error_handling);
        let n = apply_rules(&stats(&["if (x == null)", "return nullable;"], &[(0, 1, "TRUE")], 3));
        assert!(n.flags.null_rule);
        let nn = apply_rules(&stats(&["if (x == y)", "return nullable;"], &[(0, 1, "TRUE")], 3));
        assert!(!nn.flags.null_rule);
    }
}
