//! Desugared-form detectors for four Kotlin sugars and the support
//! threshold derived from the rarest of them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::frontend::{MethodCfg, NodeId, Polarity};
use crate::vocab::NodeKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum KotlinSugar {
    StringInterpolation,
    Elvis,
    GetterSetter,
    NotNullAssertion,
}

impl KotlinSugar {
    pub const ALL: [KotlinSugar; 4] =
        [KotlinSugar::StringInterpolation, KotlinSugar::Elvis, KotlinSugar::GetterSetter, KotlinSugar::NotNullAssertion];

    pub fn as_str(self) -> &'static str {
        match self {
            KotlinSugar::StringInterpolation => "STRING_INTERPOLATION",
            KotlinSugar::Elvis => "ELVIS",
            KotlinSugar::GetterSetter => "GETTER_SETTER",
            KotlinSugar::NotNullAssertion => "NOT_NULL_ASSERTION",
        }
    }
}

/// Node sets of every desugared instance of `sugar` in the method.
pub fn kotlin_sugar_instances(cfg: &MethodCfg, sugar: KotlinSugar) -> Vec<Vec<NodeId>> {
    match sugar {
        KotlinSugar::StringInterpolation => {
            cfg.nodes.iter().filter(|n| n.shape.concat).map(|n| vec![n.id]).collect()
        }
        KotlinSugar::Elvis => cfg.nodes.iter().filter_map(|n| elvis(cfg, n.id)).collect(),
        KotlinSugar::GetterSetter => getter_setter(cfg).into_iter().collect(),
        KotlinSugar::NotNullAssertion => cfg
            .nodes
            .iter()
            .filter(|n| n.kind == NodeKind::If && n.shape.body_len == Some(1))
            .filter(|n| n.shape.null_test.as_ref().is_some_and(|t| !t.negated))
            .filter_map(|n| {
                let t = cfg.branch(n.id, Polarity::TrueBranch)?;
                (cfg.node(t).kind == NodeKind::Throw).then(|| vec![n.id, t])
            })
            .collect(),
    }
}

pub fn detect_kotlin_sugar(cfg: &MethodCfg, sugar: KotlinSugar) -> bool {
    !kotlin_sugar_instances(cfg, sugar).is_empty()
}

/// Null test whose branches feed a value into a variable: the checked
/// variable reassigned on its null side (`== null` TRUE, `!= null` FALSE),
/// or both branches assigning the same target.
fn elvis(cfg: &MethodCfg, id: NodeId) -> Option<Vec<NodeId>> {
    let node = cfg.node(id);
    let test = node.shape.null_test.as_ref().filter(|_| node.kind == NodeKind::If)?;
    let assign_target = |b: Option<NodeId>| {
        b.map(|b| cfg.node(b)).filter(|n| n.kind == NodeKind::Assign).and_then(|n| n.shape.target.clone().map(|t| (n.id, t)))
    };
    let t = assign_target(cfg.branch(id, Polarity::TrueBranch));
    let f = assign_target(cfg.branch(id, Polarity::FalseBranch));
    let null_side = if test.negated { &f } else { &t };
    if let Some((a, target)) = null_side {
        if *target == test.var {
            return Some(vec![id, *a]);
        }
    }
    match (t, f) {
        (Some((a, ta)), Some((b, tb))) if ta == tb => Some(vec![id, a, b]),
        _ => None,
    }
}

/// Whole method is `return <field>;` or `<field> = <parameter>;`.
fn getter_setter(cfg: &MethodCfg) -> Option<Vec<NodeId>> {
    if cfg.nodes.len() != 3 {
        return None;
    }
    let body = &cfg.nodes[1];
    let linear = cfg.edges.len() == 2
        && cfg.successors(cfg.entry_id).all(|e| e.dst == body.id)
        && cfg.successors(body.id).all(|e| e.dst == cfg.exit_id);
    let getter = body.kind == NodeKind::Return && body.shape.field_read;
    let setter = body.kind == NodeKind::Assign && body.shape.target_is_field && body.shape.param_value;
    (linear && (getter || setter)).then(|| vec![body.id])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SugarCount {
    pub sugar: KotlinSugar,
    pub method_count: usize,
    pub method_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub total_methods: usize,
    pub sugars: Vec<SugarCount>,
    pub threshold_ratio: f64,
    pub threshold_source: KotlinSugar,
    /// Sugars left out of the minimum because they never occur.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub excluded: Vec<KotlinSugar>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CalibrationError {
    #[error("cannot calibrate on an empty corpus")]
    EmptyCorpus,
    #[error("none of the four calibration sugars occur in {0} methods; pass --min-support explicitly")]
    NoSugars(usize),
}

/// Counts methods containing each sugar (once per method) and takes the
/// smallest non-zero ratio as the threshold. Ties go to the earlier sugar
/// in [`KotlinSugar::ALL`].
pub fn calibrate(db: &[MethodCfg]) -> Result<CalibrationResult, CalibrationError> {
    if db.is_empty() {
        return Err(CalibrationError::EmptyCorpus);
    }
    let counts = db
        .par_iter()
        .map(|cfg| KotlinSugar::ALL.map(|s| detect_kotlin_sugar(cfg, s) as usize))
        .reduce(|| [0; 4], |a, b| std::array::from_fn(|i| a[i] + b[i]));
    let total = db.len();
    let sugars: Vec<SugarCount> = KotlinSugar::ALL
        .iter()
        .zip(counts)
        .map(|(&sugar, method_count)| SugarCount { sugar, method_count, method_ratio: method_count as f64 / total as f64 })
        .collect();
    let excluded: Vec<KotlinSugar> = sugars.iter().filter(|s| s.method_count == 0).map(|s| s.sugar).collect();
    for s in &excluded {
        log::warn!("calibration sugar {} never occurs; excluded from the threshold", s.as_str());
    }
    let min = sugars
        .iter()
        .filter(|s| s.method_count > 0)
        .min_by_key(|s| s.method_count)
        .ok_or(CalibrationError::NoSugars(total))?;
    Ok(CalibrationResult {
        total_methods: total,
        threshold_ratio: min.method_ratio,
        threshold_source: min.sugar,
        sugars,
        excluded,
    })
}
