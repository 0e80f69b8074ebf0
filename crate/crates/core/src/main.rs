use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use sugarmine::generalize::Mode;
use sugarmine::mining::{DEFAULT_MAX_SIZE, DEFAULT_WITNESSES};
use sugarmine::pipeline::{self, PipelineError, RunConfig, DEFAULT_PORT};
use sugarmine::server::{self, AppState};

#[derive(Parser)]
#[command(name = "sugarmine", version, about = "Mine Java corpora for control-flow idioms that could become syntactic sugar")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the corpus and write cfgs.jsonl.
    Ingest(Opts),
    /// Run every stage: ingest, label, calibrate, mine, filter, metrics, census.
    Pipeline(Opts),
    /// Derive the support threshold from the four calibration sugars.
    Calibrate(Opts),
    /// Label CFGs for the mode and mine frequent patterns.
    Mine(Opts),
    /// Apply the filter rules to mined patterns.
    Filter(Opts),
    /// Count methods containing each catalog idiom.
    Census(Opts),
    /// Recompute per-size metrics from patterns, verdicts and labels.
    Metrics(Opts),
    /// Serve the labeling API over a finished run.
    Serve(Opts),
}

#[derive(Args, Clone)]
struct Opts {
    /// Corpus root directory.
    #[arg(long, default_value = ".")]
    corpus: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "sugarmine-out")]
    out: PathBuf,
    /// Include glob relative to the corpus root; repeatable.
    #[arg(long = "include")]
    include: Vec<String>,
    /// generalized or baseline.
    #[arg(long, default_value = "generalized")]
    mode: Mode,
    /// Minimum support ratio in (0, 1]; skips calibration.
    #[arg(long)]
    min_support: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_MAX_SIZE)]
    max_size: usize,
    /// Witness embeddings kept per pattern.
    #[arg(long, alias = "witnesses-per-pattern", default_value_t = DEFAULT_WITNESSES)]
    witnesses: usize,
    #[arg(long, default_value_t = DEFAULT_PORT)]
    port: u16,
    /// Worker threads (default: one per core).
    #[arg(long)]
    threads: Option<usize>,
}

impl Opts {
    fn config(&self) -> RunConfig {
        RunConfig {
            corpus: self.corpus.clone(),
            include_globs: self.include.clone(),
            min_support: self.min_support,
            max_size: self.max_size,
            mode: self.mode,
            witnesses: self.witnesses,
            out: self.out.clone(),
            port: self.port,
            threads: self.threads,
        }
    }
}

fn run(command: Command) -> Result<(), PipelineError> {
    match command {
        Command::Ingest(o) => {
            let c = o.config();
            let cfgs = pipeline::with_threads(c.threads, || pipeline::run_ingest(&c))??;
            let report = pipeline::read_ingest_report(&c.layout())?;
            println!("{} methods from {} of {} files ({} warnings)", cfgs.len(), report.files_parsed, report.files_matched, report.warnings.len());
        }
        Command::Pipeline(o) => {
            let s = pipeline::run_pipeline(&o.config())?;
            let sizes: Vec<String> = s.patterns_per_size.iter().map(|c| format!("{}:{}", c.size, c.patterns)).collect();
            println!("{} methods, threshold {} ({}), patterns per size {}", s.methods, s.threshold.ratio, s.threshold.source, sizes.join(" "));
        }
        Command::Calibrate(o) => {
            let c = o.config();
            let r = pipeline::with_threads(c.threads, || {
                let cfgs = pipeline::load_or_ingest(&c)?;
                pipeline::run_calibrate(&c, &cfgs)
            })??;
            for s in &r.sugars {
                println!("{:<22} {:>8} {:.4}%", s.sugar.as_str(), s.method_count, s.method_ratio * 100.0);
            }
            println!("threshold {} from {}", r.threshold_ratio, r.threshold_source.as_str());
        }
        Command::Mine(o) => {
            let c = o.config();
            let (patterns, s) = pipeline::with_threads(c.threads, || {
                let cfgs = pipeline::load_or_ingest(&c)?;
                pipeline::run_mine_stage(&c, &cfgs)
            })??;
            println!("{} patterns at threshold {} ({})", patterns.len(), s.threshold.ratio, s.threshold.source);
        }
        Command::Filter(o) => {
            let c = o.config();
            let patterns = pipeline::load_patterns(&c.layout())?;
            let verdicts = pipeline::run_filter(&c, &patterns)?;
            println!("{} of {} patterns investigated", verdicts.iter().filter(|v| v.investigated).count(), verdicts.len());
        }
        Command::Census(o) => {
            let c = o.config();
            let rows = pipeline::with_threads(c.threads, || {
                let cfgs = pipeline::load_or_ingest(&c)?;
                pipeline::run_census(&c, &cfgs)
            })??;
            for r in rows {
                println!("{:<20} {}", r.idiom.as_str(), r.cfg_count);
            }
        }
        Command::Metrics(o) => {
            let c = o.config();
            let layout = c.layout();
            let patterns = pipeline::load_patterns(&layout)?;
            let verdicts = pipeline::load_verdicts(&layout)?;
            for m in pipeline::run_metrics(&c, &patterns, &verdicts)? {
                println!(
                    "size {}: total {} investigated {} median {} sugarable {} new {}/{}",
                    m.size,
                    m.total_frequent,
                    m.investigated,
                    sugarmine::triage::format_median(m.median_frequency),
                    m.sugarable_count,
                    m.new_sugars,
                    m.unique_sugars
                );
            }
        }
        Command::Serve(o) => {
            let c = o.config();
            let state = Arc::new(AppState::load(&c.layout())?);
            let rt = tokio::runtime::Builder::new_multi_thread()
                .enable_all()
                .build()
                .map_err(|e| PipelineError::Config(e.to_string()))?;
            rt.block_on(server::serve(state, c.port)).map_err(|e| PipelineError::Config(format!("server: {e}")))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, PipelineError::Calibration(_)) {
                eprintln!("hint: pass --min-support <ratio> to skip calibration");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
