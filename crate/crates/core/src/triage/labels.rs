use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::io::{append_jsonl, read_jsonl, IoError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub pattern_id: String,
    pub sugarable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sugar_name: Option<String>,
    #[serde(default)]
    pub notes: String,
    #[serde(default)]
    pub labeler: String,
    pub timestamp: DateTime<Utc>,
}

impl LabelRecord {
    /// Trims the sugar name (an empty name becomes `None`) and checks that
    /// a named record is sugarable.
    pub fn normalized(mut self) -> Result<Self, LabelError> {
        self.sugar_name = self.sugar_name.map(|s| s.trim().to_string()).filter(|s| !s.is_empty());
        if self.sugar_name.is_some() && !self.sugarable {
            return Err(LabelError::NamedButNotSugarable(self.pattern_id));
        }
        Ok(self)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LabelError {
    #[error("unknown pattern id `{0}`")]
    UnknownPattern(String),
    #[error("pattern `{0}`: a sugar name requires sugarable = true")]
    NamedButNotSugarable(String),
    #[error(transparent)]
    Io(#[from] IoError),
}

/// Append-only label log. Every record is kept; the latest record per
/// pattern is the one that counts.
#[derive(Debug, Clone)]
pub struct LabelStore {
    path: Option<PathBuf>,
    known: HashSet<String>,
    history: Vec<LabelRecord>,
}

impl LabelStore {
    pub fn in_memory(known_ids: impl IntoIterator<Item = String>) -> Self {
        LabelStore { path: None, known: known_ids.into_iter().collect(), history: Vec::new() }
    }

    /// Loads the existing log at `path` (absent means empty). Records for
    /// ids outside `known_ids` are kept in history but cannot be added.
    pub fn open(path: &Path, known_ids: impl IntoIterator<Item = String>) -> Result<Self, LabelError> {
        let history = read_jsonl(path, true)?;
        Ok(LabelStore { path: Some(path.to_path_buf()), known: known_ids.into_iter().collect(), history })
    }

    pub fn record(&mut self, rec: LabelRecord) -> Result<&LabelRecord, LabelError> {
        if !self.known.contains(&rec.pattern_id) {
            return Err(LabelError::UnknownPattern(rec.pattern_id));
        }
        let rec = rec.normalized()?;
        if let Some(path) = &self.path {
            append_jsonl(path, &rec)?;
        }
        self.history.push(rec);
        Ok(self.history.last().unwrap())
    }

    pub fn history(&self) -> &[LabelRecord] {
        &self.history
    }

    pub fn is_known(&self, id: &str) -> bool {
        self.known.contains(id)
    }

    /// Latest record per pattern id.
    pub fn latest(&self) -> BTreeMap<String, LabelRecord> {
        let mut out = BTreeMap::new();
        for r in &self.history {
            out.insert(r.pattern_id.clone(), r.clone());
        }
        out
    }
}
