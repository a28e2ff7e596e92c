use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sectorial_core::ToleranceConfig;
use sectorial_kit::generate::random_instance;
use sectorial_kit::{parse_instance, run_suite, serialize_instance, verify_document, Kind, SuiteRegistry, VerificationReport};

const INPUT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "sectorial-kit", version, about = "Verify sectorial relation identities on instance files and seeded suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check on one instance file.
    Check {
        file: PathBuf,
        /// Override subspace_eq_tol, the threshold of gap-type checks.
        #[arg(long)]
        tol: Option<f64>,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run a seeded suite of random trials.
    Suite {
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 8)]
        max_dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print a random instance document.
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        dim_h: usize,
        #[arg(long, default_value_t = 1)]
        dim_k: usize,
        #[arg(long, default_value_t = 1)]
        graph_dim: usize,
        #[arg(long, default_value_t = 1.0)]
        norm_cap: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Tbt,
    Sum,
    Relation,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Tbt => Kind::Tbt,
            KindArg::Sum => Kind::Sum,
            KindArg::Relation => Kind::Relation,
        }
    }
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(INPUT_ERROR)
}

fn tolerances(tol: Option<f64>) -> Result<ToleranceConfig, String> {
    let mut t = ToleranceConfig::default();
    if let Some(x) = tol {
        t.subspace_eq_tol = x;
    }
    t.validate().map_err(|e| e.to_string())?;
    Ok(t)
}

fn finish(report: &VerificationReport, json: Option<PathBuf>) -> ExitCode {
    print!("{}", report.summary());
    if let Some(path) = json {
        if let Err(e) = std::fs::write(&path, report.to_json()) {
            return input_error(format!("cannot write {}: {e}", path.display()));
        }
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { file, tol, json } => {
            let tol = match tolerances(tol) {
                Ok(t) => t,
                Err(e) => return input_error(e),
            };
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => return input_error(format!("cannot read {}: {e}", file.display())),
            };
            let doc = match parse_instance(&text) {
                Ok(d) => d,
                Err(e) => return input_error(e),
            };
            if let Err(e) = doc.problem(&tol) {
                return input_error(e);
            }
            finish(&verify_document(&doc, &tol), json)
        }
        Command::Suite {
            name,
            trials,
            max_dim,
            seed,
            tol,
            json,
        } => {
            let tol = match tolerances(tol) {
                Ok(t) => t,
                Err(e) => return input_error(e),
            };
            match run_suite(&SuiteRegistry::standard(), &name, trials, max_dim, seed, &tol) {
                Ok(report) => finish(&report, json),
                Err(e) => input_error(e),
            }
        }
        Command::Gen {
            kind,
            dim_h,
            dim_k,
            graph_dim,
            norm_cap,
            seed,
        } => match random_instance(kind.into(), dim_h, dim_k, graph_dim, norm_cap, seed) {
            Ok(doc) => {
                println!("{}", serialize_instance(&doc));
                ExitCode::SUCCESS
            }
            Err(e) => input_error(e),
        },
    }
}
