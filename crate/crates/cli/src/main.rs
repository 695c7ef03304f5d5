//! `bihat`: run verification experiments and inspect their reports.
//!
//! Exit codes: 0 pass, 1 inequality failed, 2 usage, config or I/O error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bihat_core::config::ExperimentConfig;
use bihat_core::harness::{run_experiment, InequalityRegistry};
use bihat_core::report::VerificationReport;
use bihat_core::symbols::SymbolRegistry;
use bihat_core::testbed::FamilyRegistry;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bihat", version, about = "Numerical checks of bilinear Poincaré and Leibniz-type inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config; writes report JSON and CSV.
    Verify { config: PathBuf },
    /// List registered inequalities, symbols and function families.
    List,
    /// Re-render a saved report.
    Report {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Summary)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Summary,
}

const EXIT_FAIL: u8 = 1;
const EXIT_ERROR: u8 = 2;

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("BIHAT_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| format!("BIHAT_THREADS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("BIHAT_THREADS must be a positive integer, got 0".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

/// JSON at `output_path` (default ./<id>.json), CSV next to it.
fn output_paths(cfg: &ExperimentConfig) -> (PathBuf, PathBuf) {
    let json = cfg.output_path.as_ref().map_or_else(|| PathBuf::from(format!("{}.json", cfg.id)), PathBuf::from);
    let csv = json.with_extension("csv");
    (json, csv)
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Writes to stdout; a closed pipe (e.g. `bihat list | head`) is not an error.
fn emit(text: &str) -> Result<(), String> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(format!("stdout: {e}")),
        _ => Ok(()),
    }
}

fn verify(config: &Path) -> Result<bool, String> {
    let cfg = ExperimentConfig::load(config).map_err(|e| format!("{}: {e}", config.display()))?;
    let report = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let (json, csv) = output_paths(&cfg);
    write(&json, &report.to_json().map_err(|e| e.to_string())?)?;
    write(&csv, &report.to_csv().map_err(|e| e.to_string())?)?;
    emit(&format!("{}report: {}\ncsv:    {}\n", report.summary(), json.display(), csv.display()))?;
    Ok(report.verdict.passed())
}

fn list() -> Result<(), String> {
    let mut out = String::from("inequalities:\n");
    for i in InequalityRegistry::default().iter() {
        out += &format!("  {:<28} {:<44} {}\n", i.key(), i.citation().unwrap_or("-"), i.check_kind().as_str());
    }
    out += "symbols:\n";
    for (k, d) in SymbolRegistry::default().list() {
        out += &format!("  {k:<28} {d}\n");
    }
    out += "families:\n";
    for (k, d) in FamilyRegistry::default().list() {
        out += &format!("  {k:<28} {d}\n");
    }
    emit(&out)
}

fn report(path: &Path, format: Format) -> Result<(), String> {
    let rep = VerificationReport::load(path).map_err(|e| e.to_string())?;
    let text = match format {
        Format::Csv => rep.to_csv(),
        Format::Json => rep.to_json(),
        Format::Summary => Ok(rep.summary()),
    }
    .map_err(|e| e.to_string())?;
    emit(&text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_ERROR) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_ERROR);
    }
    let outcome = match cli.command {
        Command::Verify { config } => verify(&config).map(|ok| if ok { 0 } else { EXIT_FAIL }),
        Command::List => list().map(|_| 0),
        Command::Report { path, format } => report(&path, format).map(|_| 0),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
