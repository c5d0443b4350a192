use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fracsource::experiment::{
    emit_plot_script, load_config, persist_results, resolve_seed, run_experiment, verify_suite, SEED_ENV,
};
use fracsource::inverse::Method;
use fracsource::spectral::{find_eigenvalues, DEFAULT_ZERO_TOL};
use fracsource::{Error, Result};

#[derive(Parser)]
#[command(name = "fracsource", version, about = "Source identification for the space-time fractional wave equation")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Tikhonov,
    Spectral,
    Both,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate data, reconstruct and write results into --out.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
    },
    /// Run the invariant suite.
    Verify,
    /// Compute eigenvalues and print (or write) the eigensystem JSON.
    Eigens {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_ZERO_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cmd: Cmd) -> Result<i32> {
    match cmd {
        Cmd::Run { config, out, seed, delta, method } => {
            let mut cfg = load_config(&config)?;
            cfg.seed = resolve_seed(cfg.seed, seed, std::env::var(SEED_ENV).ok().as_deref())?;
            if let Some(d) = delta {
                if !(d >= 0.0 && d.is_finite()) {
                    return Err(Error::ValidationError(vec![format!("delta: {d} must be non-negative")]));
                }
                cfg.delta = d;
            }
            if let Some(m) = method {
                cfg.methods = match m {
                    MethodArg::Tikhonov => vec![Method::Tikhonov],
                    MethodArg::Spectral => vec![Method::SpectralModes],
                    MethodArg::Both => vec![Method::Tikhonov, Method::SpectralModes],
                };
            }
            let mut outcome = run_experiment(&cfg)?;
            persist_results(&mut outcome, &out)?;
            emit_plot_script(&outcome.manifest, &out)?;
            for m in &outcome.manifest.metrics {
                let err = m.relative_l2_error.map_or("-".into(), |e| format!("{e:.4e}"));
                let nu = m.nu_used.map_or("-".into(), |v| format!("{v:.3e}"));
                println!("{:?}: relative L2 error {err}, nu {nu}, residual {:.3e}", m.method, m.residual_norm);
            }
            for n in &outcome.manifest.notes {
                println!("note: {n}");
            }
            println!("results written to {}", out.display());
            match outcome.first_failure() {
                Some(f) => {
                    eprintln!("error: {:?} failed: {}", f.method, f.message);
                    Ok(f.exit_code)
                }
                None => Ok(0),
            }
        }
        Cmd::Verify => {
            let checks = verify_suite();
            for c in &checks {
                println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            Ok(if checks.iter().all(|c| c.passed) { 0 } else { 1 })
        }
        Cmd::Eigens { beta, n, tol, out } => {
            let sys = find_eigenvalues(beta, n, tol)?;
            let json = sys.to_json();
            match out {
                Some(p) => fracsource::experiment::write_atomic(&p, json.as_bytes())?,
                None => println!("{json}"),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
