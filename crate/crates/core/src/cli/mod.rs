//! Command-line front end.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 a consistency flag
//! failed (or a sweep cell disagrees with the closed form, or a pinned check
//! failed), 3 inconclusive verdicts under the `fail` policy or `--strict`.

pub mod config;
pub mod plotdata;
pub mod report;
pub mod verify;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::classify::{sweep_power_family, SweepSummary};
use config::{InconclusivePolicy, RunConfig};
use plotdata::PlotKind;
use report::{analyze_ends, to_json, write_atomic, Report, Timing};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_FLAG: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "endscope", version, about = "Capacity, volume and L^p mean-curvature analysis of model ends")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Treat inconclusive verdicts as failures.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Upper bound on quadrature tolerances; never loosens the configured ones.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyse every configured end and write report.json.
    Analyze {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sweep the power family and write phase.csv and sweep.json.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Check pinned outcomes on the reference ends.
    VerifyExamples {
        #[arg(long, value_delimiter = ',', default_values_t = vec![3u32, 4])]
        dims: Vec<u32>,
    },
    /// Turn a report into columnar text files.
    Plotdata {
        #[arg(long)]
        report: PathBuf,
        #[arg(long, value_enum)]
        what: PlotKind,
    },
}

struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn load_config(path: &Path, cli: &Cli) -> Result<(RunConfig, PathBuf), Failure> {
    let mut cfg = RunConfig::load(path).map_err(|e| fail(EXIT_CONFIG, e.to_string()))?;
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(fail(EXIT_CONFIG, format!("--tol must be positive, got {t}")));
        }
        cfg.apply_tolerance(t);
    }
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    std::fs::create_dir_all(&out).map_err(|e| fail(EXIT_CONFIG, format!("{}: {e}", out.display())))?;
    Ok((cfg, out))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    write_atomic(path, bytes).map_err(|e| fail(EXIT_CONFIG, format!("{}: {e}", path.display())))
}

fn analyze(cli: &Cli, config: &Path) -> Result<i32, Failure> {
    let (cfg, out) = load_config(config, cli)?;
    if cfg.ends.is_empty() {
        return Err(fail(EXIT_CONFIG, format!("{}: no ends defined", config.display())));
    }
    let mut timing = Timing::default();
    let mut rep = Report::new(&cfg);
    rep.ends = timing
        .time("analyze", || analyze_ends(&cfg))
        .map_err(|e| fail(EXIT_CONFIG, e))?;
    write(&out.join("report.json"), &to_json(&rep))?;
    write(&out.join("timing.json"), &to_json(&timing))?;

    let fail_on_inconclusive = cli.strict || cfg.inconclusive == InconclusivePolicy::Fail;
    let mut violation = false;
    let mut inconclusive = false;
    for e in &rep.ends {
        let f = &e.flags;
        println!(
            "{}: volume {}, {:?}, dichotomy {:?}, infinite-volume {:?}",
            e.name,
            e.signature.volume.label(),
            e.signature.parabolicity.verdict,
            f.dichotomy.status,
            f.infinite_volume.status
        );
        for band in [&f.finite_volume_band, &f.parabolic_band] {
            if band.hit {
                println!("  {}", band.detail);
            }
        }
        for err in &e.errors {
            eprintln!("  {}: {err}", e.name);
        }
        violation |= f.has_violation();
        if e.has_inconclusive() {
            inconclusive = true;
            if !fail_on_inconclusive {
                eprintln!("warning: {} has inconclusive verdicts", e.name);
            }
        }
    }
    Ok(analyze_exit_code(violation, inconclusive, fail_on_inconclusive))
}

/// A failed flag outranks inconclusive verdicts.
pub fn analyze_exit_code(violation: bool, inconclusive: bool, fail_on_inconclusive: bool) -> i32 {
    if violation {
        EXIT_FLAG
    } else if inconclusive && fail_on_inconclusive {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    }
}

pub fn sweep_exit_code(s: &SweepSummary, strict: bool) -> i32 {
    if s.disagreements > 0 || s.flag_violations > 0 {
        EXIT_FLAG
    } else if s.inconclusive > 0 && strict {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    }
}

fn sweep(cli: &Cli, config: &Path) -> Result<i32, Failure> {
    let (cfg, out) = load_config(config, cli)?;
    let spec = cfg
        .sweep
        .clone()
        .ok_or_else(|| fail(EXIT_CONFIG, format!("{}: no [sweep] section", config.display())))?;
    let mut timing = Timing::default();
    let table = timing
        .time("sweep", || sweep_power_family(&spec, &cfg.quadrature))
        .map_err(|e| fail(EXIT_CONFIG, e.to_string()))?;
    let csv = table.to_csv().map_err(|e| fail(EXIT_CONFIG, e.to_string()))?;
    write(&out.join("phase.csv"), csv.as_bytes())?;
    let s = table.summary;
    let mut rep = Report::new(&cfg);
    rep.sweep = Some(table);
    write(&out.join("sweep.json"), &to_json(&rep))?;
    write(&out.join("timing.json"), &to_json(&timing))?;
    println!(
        "cells {}, agreements {}, disagreements {}, excluded {}, inconclusive {}, flag violations {}, open-band candidates {}",
        s.cells, s.agreements, s.disagreements, s.excluded, s.inconclusive, s.flag_violations, s.open_band_hits
    );
    Ok(sweep_exit_code(&s, cli.strict))
}

fn verify_examples(cli: &Cli, dims: &[u32]) -> Result<i32, Failure> {
    if let Some(m) = dims.iter().find(|&&m| !(3..=64).contains(&m)) {
        return Err(fail(EXIT_CONFIG, format!("dimension {m} outside [3, 64]")));
    }
    let mut cfg = RunConfig::default();
    if let Some(t) = cli.tol {
        cfg.apply_tolerance(t);
    }
    let checks = verify::verify_examples(dims, &cfg.quadrature);
    let mut failed = 0;
    for c in &checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {} m={}: {} ({})", c.end, c.m, c.name, c.detail);
        failed += usize::from(!c.passed);
    }
    if let Some(out) = &cli.out {
        write(&out.join("verify.json"), &to_json(&checks))?;
    }
    Ok(if failed > 0 { EXIT_FLAG } else { EXIT_OK })
}

fn plot(cli: &Cli, report: &Path, what: PlotKind) -> Result<i32, Failure> {
    let text =
        std::fs::read_to_string(report).map_err(|e| fail(EXIT_CONFIG, format!("{}: {e}", report.display())))?;
    let rep: Report =
        serde_json::from_str(&text).map_err(|e| fail(EXIT_CONFIG, format!("{}: {e}", report.display())))?;
    let dir = cli
        .out
        .clone()
        .unwrap_or_else(|| report.parent().map(Path::to_path_buf).unwrap_or_default());
    let paths = plotdata::write(&rep, what, &dir).map_err(|e| fail(EXIT_CONFIG, e))?;
    for p in paths {
        println!("{}", p.display());
    }
    Ok(EXIT_OK)
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be at least 1");
            return EXIT_CONFIG;
        }
        // Fails only if the pool was already built, e.g. by an earlier call in-process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = match &cli.command {
        Command::Analyze { config } => analyze(&cli, config),
        Command::Sweep { config } => sweep(&cli, config),
        Command::VerifyExamples { dims } => verify_examples(&cli, dims),
        Command::Plotdata { report, what } => plot(&cli, report, *what),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
