use clap::{Args, Parser, Subcommand, ValueEnum};
use ic3ctp::certify::{self, ReachResult};
use ic3ctp::engine::{EngineOptions, Verdict};
use ic3ctp::report::{self, CorpusOptions, RunReport};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

const EXIT_SAFE: u8 = 20;
const EXIT_UNSAFE: u8 = 10;
const EXIT_UNKNOWN: u8 = 0;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "ic3ctp",
    about = "IC3/PDR safety model checker for AIGER circuits with CTP-based lemma prediction",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a single AIGER model (.aag or .aig)
    Check(CheckArgs),
    /// Check every .aag/.aig file in a directory, one CSV row per file
    Corpus(CorpusArgs),
}

#[derive(Args, Clone)]
struct EngineFlags {
    /// Disable lemma prediction (plain drop-variable generalization)
    #[arg(long)]
    no_prediction: bool,
    /// Give up once the frame sequence exceeds N levels
    #[arg(long, value_name = "N")]
    max_frames: Option<usize>,
    /// Wall-clock limit in seconds (per file for corpus runs)
    #[arg(long, value_name = "S")]
    timeout: Option<f64>,
    /// Audit the frame invariants after every phase (slow, debug)
    #[arg(long)]
    audit: bool,
    /// Dump every frame's solver session as DIMACS into DIR at exit
    #[arg(long, value_name = "DIR")]
    dimacs_dump: Option<PathBuf>,
}

impl EngineFlags {
    fn to_options(&self) -> EngineOptions {
        EngineOptions {
            prediction: !self.no_prediction,
            max_frames: self.max_frames,
            timeout: self.timeout.map(Duration::from_secs_f64),
            audit: self.audit,
            dimacs_dump: self.dimacs_dump.clone(),
            ..EngineOptions::default()
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct CheckArgs {
    /// AIGER model file
    model: PathBuf,
    #[command(flatten)]
    engine: EngineFlags,
    /// Print a run report after the verdict line
    #[arg(long, value_enum, value_name = "FORMAT")]
    report: Option<ReportFormat>,
    /// On SAFE, write the inductive invariant to FILE
    #[arg(long, value_name = "FILE")]
    dump_invariant: Option<PathBuf>,
    /// On UNSAFE, write the stimulus witness to FILE
    #[arg(long, value_name = "FILE")]
    witness: Option<PathBuf>,
    /// Cross-check the verdict against explicit-state reachability
    /// (skipped above 16 latches)
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct CorpusArgs {
    /// Directory of .aag/.aig files
    dir: PathBuf,
    #[command(flatten)]
    engine: EngineFlags,
    /// Parallel worker slots
    #[arg(long, default_value_t = 1, value_name = "N")]
    jobs: usize,
    /// Write the CSV here instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check(args) => run_check(args),
        Command::Corpus(args) => run_corpus(args),
    }
}

fn run_check(args: CheckArgs) -> ExitCode {
    let ts = match report::load_model(&args.model) {
        Ok(ts) => ts,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let start = std::time::Instant::now();
    let result = ic3ctp::engine::check(&ts, args.engine.to_options());
    let wall_ms = start.elapsed().as_millis() as u64;

    println!("{}", result.verdict.name());
    if let Verdict::Unknown { reason } = &result.verdict {
        eprintln!("unknown: {reason}");
    }

    let filename = args.model.display().to_string();
    let run_report = RunReport::new(&filename, &result.verdict, &result.stats, wall_ms);
    match args.report {
        Some(ReportFormat::Text) => println!("{}", run_report.render_text()),
        Some(ReportFormat::Json) => {
            println!("{}", serde_json::to_string_pretty(&run_report).unwrap())
        }
        Some(ReportFormat::Csv) => {
            let mut out = Vec::new();
            report::write_csv_header(&mut out).unwrap();
            report::write_csv_row(&mut out, &run_report).unwrap();
            print!("{}", String::from_utf8(out).unwrap());
        }
        None => {}
    }

    match &result.verdict {
        Verdict::Safe { invariant } => {
            if let Some(path) = &args.dump_invariant {
                if let Err(e) = write_file(path, |w| certify::write_invariant(w, invariant)) {
                    eprintln!("error: cannot write invariant: {e}");
                    return ExitCode::from(EXIT_USAGE);
                }
            }
        }
        Verdict::Unsafe { trace } => {
            if let Some(path) = &args.witness {
                if let Err(e) = write_file(path, |w| certify::write_witness(w, trace)) {
                    eprintln!("error: cannot write witness: {e}");
                    return ExitCode::from(EXIT_USAGE);
                }
            }
        }
        Verdict::Unknown { .. } => {}
    }

    if args.oracle {
        match certify::explicit_reach(&ts, certify::DEFAULT_LATCH_BUDGET) {
            ReachResult::TooLarge => {
                eprintln!("oracle: skipped (more than 16 latches)");
            }
            oracle => {
                let agree = matches!(
                    (&result.verdict, oracle),
                    (Verdict::Safe { .. }, ReachResult::Safe)
                        | (Verdict::Unsafe { .. }, ReachResult::Unsafe { .. })
                        | (Verdict::Unknown { .. }, _)
                );
                if agree {
                    eprintln!("oracle: agreed ({oracle:?})");
                } else {
                    eprintln!(
                        "oracle: MISMATCH engine={} oracle={:?}",
                        result.verdict.name(),
                        oracle
                    );
                    return ExitCode::from(1);
                }
            }
        }
    }

    exit_code_for(&result.verdict)
}

fn run_corpus(args: CorpusArgs) -> ExitCode {
    let opts = CorpusOptions {
        engine: args.engine.to_options(),
        jobs: args.jobs,
    };
    let reports = match report::run_corpus(&args.dir, &opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}: {e}", args.dir.display());
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let mut out: Vec<u8> = Vec::new();
    report::write_csv_header(&mut out).unwrap();
    for r in &reports {
        report::write_csv_row(&mut out, r).unwrap();
    }
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &out) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE);
            }
        }
        None => print!("{}", String::from_utf8(out).unwrap()),
    }
    ExitCode::from(EXIT_UNKNOWN)
}

fn write_file<F>(path: &std::path::Path, write: F) -> std::io::Result<()>
where
    F: FnOnce(&mut std::io::BufWriter<std::fs::File>) -> std::io::Result<()>,
{
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write(&mut w)?;
    use std::io::Write;
    w.flush()
}

fn exit_code_for(verdict: &Verdict) -> ExitCode {
    ExitCode::from(match verdict {
        Verdict::Safe { .. } => EXIT_SAFE,
        Verdict::Unsafe { .. } => EXIT_UNSAFE,
        Verdict::Unknown { .. } => EXIT_UNKNOWN,
    })
}
