//! Run configuration, output layout and the stage functions behind each
//! command.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibration::{calibrate, CalibrationError, CalibrationResult};
use crate::catalog::{census, CensusRow};
use crate::frontend::{build_corpus, FrontendError, IngestReport, IngestWarning, MethodCfg};
use crate::generalize::{baseline_label, generalize_full, GeneralizedCfg, Mode};
use crate::io::{read_json, read_jsonl, write_csv, write_json, write_jsonl, IoError};
use crate::mining::{mine, MineError, MineParams, PatternStats, DEFAULT_MAX_SIZE, DEFAULT_WITNESSES};
use crate::triage::{compute_metrics, filter_patterns, write_metrics_csv, FilterVerdict, LabelError, LabelStore, SizeMetrics};

pub const DEFAULT_PORT: u16 = 8765;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub corpus: PathBuf,
    pub include_globs: Vec<String>,
    /// Overrides the calibrated threshold when present.
    pub min_support: Option<f64>,
    pub max_size: usize,
    pub mode: Mode,
    pub witnesses: usize,
    pub out: PathBuf,
    pub port: u16,
    /// Worker threads; `None` uses one per core. Outputs do not depend on it.
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(corpus: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        RunConfig {
            corpus: corpus.into(),
            include_globs: Vec::new(),
            min_support: None,
            max_size: DEFAULT_MAX_SIZE,
            mode: Mode::Generalized,
            witnesses: DEFAULT_WITNESSES,
            out: out.into(),
            port: DEFAULT_PORT,
            threads: None,
        }
    }

    pub fn layout(&self) -> Layout {
        Layout { root: self.out.clone(), mode: self.mode }
    }
}

/// Output file locations. Mode-specific artifacts live under
/// `<out>/<mode>/`; the raw CFGs are shared.
#[derive(Debug, Clone)]
pub struct Layout {
    pub root: PathBuf,
    pub mode: Mode,
}

impl Layout {
    pub fn cfgs(&self) -> PathBuf {
        self.root.join("cfgs.jsonl")
    }
    pub fn ingest_warnings(&self) -> PathBuf {
        self.root.join("ingest-warnings.jsonl")
    }
    pub fn ingest_report(&self) -> PathBuf {
        self.root.join("ingest-report.json")
    }
    pub fn mode_dir(&self) -> PathBuf {
        self.root.join(self.mode.as_str())
    }
    pub fn labeled_cfgs(&self) -> PathBuf {
        self.mode_dir().join(match self.mode {
            Mode::Generalized => "gcfgs.jsonl",
            Mode::Baseline => "bcfgs.jsonl",
        })
    }
    pub fn run(&self) -> PathBuf {
        self.mode_dir().join("run.json")
    }
    pub fn calibration(&self) -> PathBuf {
        self.mode_dir().join("calibration.json")
    }
    pub fn patterns(&self) -> PathBuf {
        self.mode_dir().join("patterns.jsonl")
    }
    pub fn verdicts(&self) -> PathBuf {
        self.mode_dir().join("verdicts.jsonl")
    }
    pub fn labels(&self) -> PathBuf {
        self.mode_dir().join("labels.jsonl")
    }
    pub fn metrics(&self) -> PathBuf {
        self.mode_dir().join("metrics.csv")
    }
    pub fn census(&self) -> PathBuf {
        self.mode_dir().join("census.csv")
    }
    pub fn census_examples(&self) -> PathBuf {
        self.mode_dir().join("census-examples.jsonl")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("no methods found under {0}")]
    EmptyCorpus(String),
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Calibration(#[from] CalibrationError),
    #[error(transparent)]
    Mine(#[from] MineError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error("{0}")]
    Config(String),
}

impl PipelineError {
    /// 2 for an empty corpus, 3 for a calibration failure, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::EmptyCorpus(_) => 2,
            PipelineError::Calibration(_) => 3,
            _ => 1,
        }
    }
}

/// Runs `f` on a pool with the configured thread count.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, PipelineError> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| PipelineError::Config(format!("cannot start {n} threads: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Parses the corpus and writes `cfgs.jsonl`, the warnings log and the
/// ingest report. An empty corpus still writes (empty) outputs.
pub fn run_ingest(config: &RunConfig) -> Result<Vec<MethodCfg>, PipelineError> {
    let layout = config.layout();
    let corpus = build_corpus(&config.corpus, &config.include_globs)?;
    write_jsonl(&layout.cfgs(), &corpus.cfgs)?;
    write_jsonl::<IngestWarning>(&layout.ingest_warnings(), &corpus.report.warnings)?;
    write_json(&layout.ingest_report(), &corpus.report)?;
    for w in &corpus.report.warnings {
        log::warn!("{}: {}", w.file_path, w.message);
    }
    if corpus.cfgs.is_empty() {
        return Err(PipelineError::EmptyCorpus(config.corpus.display().to_string()));
    }
    Ok(corpus.cfgs)
}

/// CFGs from a previous `ingest`, or a fresh ingest when none exist.
pub fn load_or_ingest(config: &RunConfig) -> Result<Vec<MethodCfg>, PipelineError> {
    let path = config.layout().cfgs();
    if path.exists() {
        let cfgs: Vec<MethodCfg> = read_jsonl(&path, false)?;
        if cfgs.is_empty() {
            return Err(PipelineError::EmptyCorpus(config.corpus.display().to_string()));
        }
        Ok(cfgs)
    } else {
        run_ingest(config)
    }
}

pub fn read_ingest_report(layout: &Layout) -> Result<IngestReport, PipelineError> {
    Ok(read_json(&layout.ingest_report())?)
}

/// Relabels CFGs for the configured mode and writes gcfgs/bcfgs.
pub fn run_label(config: &RunConfig, cfgs: &[MethodCfg]) -> Result<Vec<GeneralizedCfg>, PipelineError> {
    let graphs: Vec<GeneralizedCfg> = match config.mode {
        Mode::Generalized => cfgs.par_iter().map(generalize_full).collect(),
        Mode::Baseline => {
            let files: BTreeSet<&str> = cfgs.iter().map(|c| c.method.file_path.as_str()).collect();
            let texts: HashMap<&str, String> = files
                .into_par_iter()
                .map(|f| {
                    let path = config.corpus.join(f);
                    std::fs::read_to_string(&path).map(|t| (f, t)).map_err(|e| IoError::io(&path, e))
                })
                .collect::<Result<_, _>>()?;
            cfgs.par_iter().map(|c| baseline_label(c, &texts[c.method.file_path.as_str()])).collect()
        }
    };
    write_jsonl(&config.layout().labeled_cfgs(), &graphs)?;
    Ok(graphs)
}

pub fn run_calibrate(config: &RunConfig, cfgs: &[MethodCfg]) -> Result<CalibrationResult, PipelineError> {
    let result = calibrate(cfgs)?;
    write_json(&config.layout().calibration(), &result)?;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub ratio: f64,
    /// `override` or `calibration`.
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration_sugar: Option<String>,
}

/// An explicit `--min-support` wins; otherwise the corpus is calibrated.
pub fn resolve_threshold(config: &RunConfig, cfgs: &[MethodCfg]) -> Result<Threshold, PipelineError> {
    match config.min_support {
        Some(ratio) => {
            if !(ratio > 0.0 && ratio <= 1.0) {
                return Err(MineError::RatioOutOfRange(ratio).into());
            }
            Ok(Threshold { ratio, source: "override".into(), calibration_sugar: None })
        }
        None => {
            let c = run_calibrate(config, cfgs)?;
            Ok(Threshold {
                ratio: c.threshold_ratio,
                source: "calibration".into(),
                calibration_sugar: Some(c.threshold_source.as_str().into()),
            })
        }
    }
}

pub fn run_mine(config: &RunConfig, graphs: &[GeneralizedCfg], ratio: f64) -> Result<Vec<PatternStats>, PipelineError> {
    let params = MineParams { min_support_ratio: ratio, max_size: config.max_size, witnesses: config.witnesses };
    let patterns = mine(graphs, &params)?;
    write_jsonl(&config.layout().patterns(), &patterns)?;
    Ok(patterns)
}

pub fn run_filter(config: &RunConfig, patterns: &[PatternStats]) -> Result<Vec<FilterVerdict>, PipelineError> {
    let verdicts = filter_patterns(patterns);
    write_jsonl(&config.layout().verdicts(), &verdicts)?;
    Ok(verdicts)
}

/// Metrics over the current patterns with whatever labels exist so far.
pub fn run_metrics(
    config: &RunConfig,
    patterns: &[PatternStats],
    verdicts: &[FilterVerdict],
) -> Result<Vec<SizeMetrics>, PipelineError> {
    let store = LabelStore::open(&config.layout().labels(), patterns.iter().map(|p| p.id.clone()))?;
    let metrics = compute_metrics(patterns, verdicts, &store.latest());
    write_metrics_csv(&config.layout().metrics(), &metrics)?;
    Ok(metrics)
}

pub fn run_census(config: &RunConfig, cfgs: &[MethodCfg]) -> Result<Vec<CensusRow>, PipelineError> {
    let rows = census(cfgs, config.witnesses);
    let layout = config.layout();
    write_csv(
        &layout.census(),
        &["idiom", "cfg_count"],
        rows.iter().map(|r| vec![r.idiom.as_str().to_string(), r.cfg_count.to_string()]),
    )?;
    write_jsonl(&layout.census_examples(), &rows)?;
    Ok(rows)
}

pub fn load_patterns(layout: &Layout) -> Result<Vec<PatternStats>, PipelineError> {
    Ok(read_jsonl(&layout.patterns(), false)?)
}

pub fn load_verdicts(layout: &Layout) -> Result<Vec<FilterVerdict>, PipelineError> {
    Ok(read_jsonl(&layout.verdicts(), false)?)
}

/// Reproducible record of a pipeline run, stored as `run.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub corpus: PathBuf,
    pub include_globs: Vec<String>,
    pub mode: Mode,
    pub max_size: usize,
    pub witnesses: usize,
    pub threshold: Threshold,
    pub methods: usize,
    pub patterns_per_size: Vec<SizeCount>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeCount {
    pub size: usize,
    pub patterns: usize,
}

pub fn read_run_summary(layout: &Layout) -> Result<RunSummary, PipelineError> {
    Ok(read_json(&layout.run())?)
}

pub fn write_run_summary(
    config: &RunConfig,
    methods: usize,
    threshold: Threshold,
    patterns: &[PatternStats],
) -> Result<RunSummary, PipelineError> {
    let mut patterns_per_size = BTreeMap::new();
    for p in patterns {
        *patterns_per_size.entry(p.size).or_insert(0) += 1;
    }
    let summary = RunSummary {
        corpus: config.corpus.clone(),
        include_globs: config.include_globs.clone(),
        mode: config.mode,
        max_size: config.max_size,
        witnesses: config.witnesses,
        threshold,
        methods,
        patterns_per_size: patterns_per_size.into_iter().map(|(size, patterns)| SizeCount { size, patterns }).collect(),
    };
    write_json(&config.layout().run(), &summary)?;
    Ok(summary)
}

/// Label, threshold and mine; writes patterns and the run summary.
pub fn run_mine_stage(config: &RunConfig, cfgs: &[MethodCfg]) -> Result<(Vec<PatternStats>, RunSummary), PipelineError> {
    let graphs = run_label(config, cfgs)?;
    let threshold = resolve_threshold(config, cfgs)?;
    log::info!("mining {} graphs at min support {} ({})", graphs.len(), threshold.ratio, threshold.source);
    let patterns = run_mine(config, &graphs, threshold.ratio)?;
    let summary = write_run_summary(config, cfgs.len(), threshold, &patterns)?;
    Ok((patterns, summary))
}

/// ingest, label, threshold, mine, filter, metrics, census.
pub fn run_pipeline(config: &RunConfig) -> Result<RunSummary, PipelineError> {
    if config.max_size == 0 {
        return Err(PipelineError::Config("--max-size must be at least 1".into()));
    }
    with_threads(config.threads, || {
        let cfgs = run_ingest(config)?;
        let (patterns, summary) = run_mine_stage(config, &cfgs)?;
        let verdicts = run_filter(config, &patterns)?;
        run_metrics(config, &patterns, &verdicts)?;
        run_census(config, &cfgs)?;
        Ok(summary)
    })?
}
