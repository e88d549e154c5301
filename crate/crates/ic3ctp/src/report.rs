//! Run reports, success rates, and the corpus batch runner.

use crate::aiger;
use crate::engine::{CheckResult, Engine, EngineOptions, RunStats, Verdict};
use crate::prediction::PredictionStats;
use crate::transys::TransitionSystem;
use serde::Serialize;
use std::io::{self, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

/// Machine-readable summary of one check run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub filename: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unknown_reason: Option<String>,
    pub wall_ms: u64,
    pub frames: usize,
    pub lemmas_generalized: u64,
    pub lemmas_predicted: u64,
    pub lemmas_pushed: u64,
    pub n_sp: u64,
    pub n_p: u64,
    pub n_fp: u64,
    pub n_g: u64,
    /// Absent (not zero) whenever the denominator is zero.
    pub sr_lp: Option<f64>,
    pub sr_fp: Option<f64>,
    pub sr_adv: Option<f64>,
    pub sat_queries_blocking: u64,
    pub sat_queries_generalization: u64,
    pub sat_queries_prediction: u64,
    pub sat_queries_propagation: u64,
    pub sat_queries_total: u64,
}

/// The three success rates; each is absent when its denominator is zero.
pub fn success_rates(stats: &PredictionStats) -> (Option<f64>, Option<f64>, Option<f64>) {
    let ratio = |num: u64, den: u64| (den > 0).then(|| num as f64 / den as f64);
    (
        ratio(stats.n_sp, stats.n_p),
        ratio(stats.n_fp, stats.n_g),
        ratio(stats.n_sp, stats.n_g),
    )
}

impl RunReport {
    pub fn new(filename: &str, verdict: &Verdict, stats: &RunStats, wall_ms: u64) -> Self {
        let (sr_lp, sr_fp, sr_adv) = success_rates(&stats.prediction);
        RunReport {
            filename: filename.to_string(),
            verdict: verdict.name().to_string(),
            unknown_reason: match verdict {
                Verdict::Unknown { reason } => Some(reason.clone()),
                _ => None,
            },
            wall_ms,
            frames: stats.frames,
            lemmas_generalized: stats.lemmas_generalized,
            lemmas_predicted: stats.lemmas_predicted,
            lemmas_pushed: stats.lemmas_pushed,
            n_sp: stats.prediction.n_sp,
            n_p: stats.prediction.n_p,
            n_fp: stats.prediction.n_fp,
            n_g: stats.prediction.n_g,
            sr_lp,
            sr_fp,
            sr_adv,
            sat_queries_blocking: stats.queries.blocking,
            sat_queries_generalization: stats.queries.generalization,
            sat_queries_prediction: stats.queries.prediction,
            sat_queries_propagation: stats.queries.propagation,
            sat_queries_total: stats.queries.total(),
        }
    }

    fn failure(filename: &str, reason: String) -> Self {
        RunReport::new(
            filename,
            &Verdict::Unknown { reason },
            &RunStats::default(),
            0,
        )
    }

    pub fn render_text(&self) -> String {
        let rate = |r: Option<f64>| match r {
            Some(v) => format!("{:.4}", v),
            None => "absent".to_string(),
        };
        format!(
            "file: {}\nverdict: {}\nwall_ms: {}\nframes: {}\n\
             lemmas: generalized={} predicted={} pushed={}\n\
             prediction: N_sp={} N_p={} N_fp={} N_g={}\n\
             success rates: SR_lp={} SR_fp={} SR_adv={}\n\
             sat queries: blocking={} generalization={} prediction={} propagation={} total={}",
            self.filename,
            self.verdict,
            self.wall_ms,
            self.frames,
            self.lemmas_generalized,
            self.lemmas_predicted,
            self.lemmas_pushed,
            self.n_sp,
            self.n_p,
            self.n_fp,
            self.n_g,
            rate(self.sr_lp),
            rate(self.sr_fp),
            rate(self.sr_adv),
            self.sat_queries_blocking,
            self.sat_queries_generalization,
            self.sat_queries_prediction,
            self.sat_queries_propagation,
            self.sat_queries_total,
        )
    }
}

pub const CSV_HEADER: &str = "filename,verdict,wall_ms,frames,lemmas_generalized,\
lemmas_predicted,N_sp,N_p,N_fp,N_g,SR_lp,SR_fp,SR_adv,sat_queries_total";

fn csv_quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn write_csv_header<W: Write>(mut w: W) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")
}

pub fn write_csv_row<W: Write>(mut w: W, r: &RunReport) -> io::Result<()> {
    let rate = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_default();
    writeln!(
        w,
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        csv_quote(&r.filename),
        r.verdict,
        r.wall_ms,
        r.frames,
        r.lemmas_generalized,
        r.lemmas_predicted,
        r.n_sp,
        r.n_p,
        r.n_fp,
        r.n_g,
        rate(r.sr_lp),
        rate(r.sr_fp),
        rate(r.sr_adv),
        r.sat_queries_total,
    )
}

/// Parses a model by extension, encodes it, and runs one check.
pub fn check_file(path: &Path, opts: EngineOptions) -> Result<(CheckResult, u64), String> {
    let ts = load_model(path)?;
    let start = Instant::now();
    let result = Engine::new(&ts, opts).run();
    let wall_ms = start.elapsed().as_millis() as u64;
    Ok((result, wall_ms))
}

pub fn load_model(path: &Path) -> Result<TransitionSystem, String> {
    let is_binary = path.extension().is_some_and(|e| e == "aig");
    let model = if is_binary {
        let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
        aiger::parse_aig(&bytes).map_err(|e| format!("{}: {e}", path.display()))?
    } else {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        aiger::parse_aag(&text).map_err(|e| format!("{}: {e}", path.display()))?
    };
    Ok(TransitionSystem::encode(model))
}

#[derive(Debug, Clone)]
pub struct CorpusOptions {
    pub engine: EngineOptions,
    /// Worker slots; each worker owns one engine instance at a time.
    pub jobs: usize,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            engine: EngineOptions::default(),
            jobs: 1,
        }
    }
}

/// Runs every `.aag`/`.aig` file in `dir`, in lexicographic filename order.
/// Per-file failures (parse errors, timeouts) become UNKNOWN rows; the batch
/// always completes.
pub fn run_corpus(dir: &Path, opts: &CorpusOptions) -> io::Result<Vec<RunReport>> {
    let mut files: Vec<std::path::PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.extension()
                .is_some_and(|ext| ext == "aag" || ext == "aig")
        })
        .collect();
    files.sort_by_key(|p| p.file_name().map(|n| n.to_os_string()));

    let jobs = opts.jobs.max(1);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<RunReport>>> = Mutex::new(vec![None; files.len()]);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(files.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= files.len() {
                    break;
                }
                let path = &files[i];
                let name = path
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.display().to_string());
                let report = match check_file(path, opts.engine.clone()) {
                    Ok((result, wall_ms)) => {
                        RunReport::new(&name, &result.verdict, &result.stats, wall_ms)
                    }
                    Err(reason) => RunReport::failure(&name, reason),
                };
                results.lock().unwrap()[i] = Some(report);
            });
        }
    });
    Ok(results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every slot filled"))
        .collect())
}
