use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FilterVerdict, LabelRecord};
use crate::io::{write_csv, IoError};
use crate::mining::PatternStats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeMetrics {
    pub size: usize,
    pub total_frequent: usize,
    pub investigated: usize,
    /// Median support count; the mean of the middle two for even counts.
    pub median_frequency: f64,
    pub sugarable_count: usize,
    /// Sugar names first seen at this size.
    pub new_sugars: usize,
    pub unique_sugars: usize,
}

fn median(mut xs: Vec<usize>) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_unstable();
    let mid = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[mid] as f64
    } else {
        (xs[mid - 1] + xs[mid]) as f64 / 2.0
    }
}

/// Whole numbers print without a fraction.
pub fn format_median(m: f64) -> String {
    if m.fract() == 0.0 {
        format!("{m:.0}")
    } else {
        format!("{m}")
    }
}

/// One row per size from 1 to the largest pattern size. Labels count only
/// for patterns in `patterns`, using the latest record per id.
pub fn compute_metrics(
    patterns: &[PatternStats],
    verdicts: &[FilterVerdict],
    latest: &BTreeMap<String, LabelRecord>,
) -> Vec<SizeMetrics> {
    let investigated: HashMap<&str, bool> = verdicts.iter().map(|v| (v.pattern_id.as_str(), v.investigated)).collect();
    let max = patterns.iter().map(|p| p.size).max().unwrap_or(0);
    let mut seen_names: BTreeSet<&str> = BTreeSet::new();
    let mut rows = Vec::new();
    for size in 1..=max {
        let at: Vec<&PatternStats> = patterns.iter().filter(|p| p.size == size).collect();
        let labels: Vec<&LabelRecord> = at.iter().filter_map(|p| latest.get(&p.id)).collect();
        let names: BTreeSet<&str> = labels.iter().filter(|l| l.sugarable).filter_map(|l| l.sugar_name.as_deref()).collect();
        let new_sugars = names.difference(&seen_names).count();
        rows.push(SizeMetrics {
            size,
            total_frequent: at.len(),
            investigated: at.iter().filter(|p| investigated.get(p.id.as_str()).copied().unwrap_or(false)).count(),
            median_frequency: median(at.iter().map(|p| p.support_count).collect()),
            sugarable_count: labels.iter().filter(|l| l.sugarable).count(),
            new_sugars,
            unique_sugars: names.len(),
        });
        seen_names.extend(names);
    }
    rows
}

/// Investigated patterns of `size` without any label, in pattern order.
pub fn unlabeled_investigated(
    patterns: &[PatternStats],
    verdicts: &[FilterVerdict],
    latest: &BTreeMap<String, LabelRecord>,
    size: usize,
) -> Vec<String> {
    let investigated: HashMap<&str, bool> = verdicts.iter().map(|v| (v.pattern_id.as_str(), v.investigated)).collect();
    patterns
        .iter()
        .filter(|p| p.size == size && investigated.get(p.id.as_str()).copied().unwrap_or(false))
        .filter(|p| !latest.contains_key(&p.id))
        .map(|p| p.id.clone())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("labeling at size {size} is incomplete: {} investigated pattern(s) unlabeled", unlabeled.len())]
pub struct ContinueError {
    pub size: usize,
    pub unlabeled: Vec<String>,
}

/// Advance to the next size only when this size produced a new sugar name
/// and the size bound is not reached. Requires every investigated pattern
/// of `current_size` to be labeled.
pub fn should_continue(
    metrics: &[SizeMetrics],
    current_size: usize,
    max_size: usize,
    unlabeled: &[String],
) -> Result<bool, ContinueError> {
    if !unlabeled.is_empty() {
        return Err(ContinueError { size: current_size, unlabeled: unlabeled.to_vec() });
    }
    let new = metrics.iter().find(|m| m.size == current_size).map_or(0, |m| m.new_sugars);
    Ok(new > 0 && current_size < max_size)
}

pub const METRICS_HEADER: [&str; 7] =
    ["size", "total", "investigated", "median_freq", "sugarable", "new_sugars", "unique_sugars"];

pub fn write_metrics_csv(path: &Path, metrics: &[SizeMetrics]) -> Result<(), IoError> {
    write_csv(
        path,
        &METRICS_HEADER,
        metrics.iter().map(|m| {
            vec![
                m.size.to_string(),
                m.total_frequent.to_string(),
                m.investigated.to_string(),
                format_median(m.median_frequency),
                m.sugarable_count.to_string(),
                m.new_sugars.to_string(),
                m.unique_sugars.to_string(),
            ]
        }),
    )
}
