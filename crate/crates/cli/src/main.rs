//! `mclab` — command-line front end for the matrix-completion laboratory.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on domain or numerical
//! failures (malformed files, precondition violations, non-convergence).

use std::path::{Path, PathBuf};
use std::process::exit;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use mclab_core::cutmetric::{
    cut_distance_exact, cut_distance_heuristic, cut_norm_exact, cut_norm_lower, EXACT_PERM_LIMIT,
};
use mclab_core::graphon::{gen_half_rows, gen_parity, gen_quasirandom, recovery_verdict, Graphon};
use mclab_core::io::{
    read_mask_file, read_matrix_file, read_step_graphon_file, write_atomic, write_mask_file,
    write_matrix_file,
};
use mclab_core::nucmin::{complete_modified_cr, complete_plain_cr};
use mclab_core::{Mask, Mat, SolverConfig, StepKernel};
use mclab_cli::experiment::{run_completion_experiment, write_reports};
use mclab_cli::probe::{probe_stable_recovery, ProbeConfig, ProbeVerdict};
use mclab_cli::config::parse_experiment_config;

#[derive(Parser)]
#[command(
    name = "mclab",
    version,
    about = "Deterministic matrix-completion laboratory",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Complete a partially revealed matrix by nuclear-norm minimization.
    Complete {
        /// Matrix file holding the revealed values (zeros elsewhere).
        matrix: PathBuf,
        /// Mask file marking which entries are revealed.
        mask: PathBuf,
        /// Box bound L; when given, the estimate is constrained to [-L, L].
        #[arg(long = "box")]
        box_bound: Option<f64>,
        /// Output path for the estimate (default: <matrix>.estimate).
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value_t = 2000)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-6)]
        primal_tol: f64,
        #[arg(long, default_value_t = 1e-6)]
        dual_tol: f64,
        #[arg(long, default_value_t = 1.6)]
        over_relaxation: f64,
    },
    /// Bound or compute the cut norm of a matrix.
    Cutnorm {
        matrix: PathBuf,
        /// Exact enumeration (dimensions up to 25).
        #[arg(long)]
        exact: bool,
        /// Local-search restarts for the lower bound.
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Cut distance between two equally sized matrices.
    Cutdist {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sample a step kernel on a regular grid of cell averages.
    Discretize {
        kernel: PathBuf,
        rows: usize,
        cols: usize,
        /// Output path for the matrix (default: <kernel>.matrix).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Decide whether a step kernel admits stable recovery.
    Verdict {
        kernel: PathBuf,
        /// Comma-separated zero-measure thresholds (must include 0).
        #[arg(long, value_delimiter = ',')]
        etas: Option<Vec<f64>>,
    },
    /// Search for admissible pairs witnessing unrecoverability of a mask.
    Probe {
        mask: PathBuf,
        #[arg(long, default_value_t = 3)]
        rank: usize,
        #[arg(long = "box", default_value_t = 1.0)]
        box_bound: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        starts: usize,
        #[arg(long, default_value_t = 200)]
        iters: usize,
        #[arg(long, default_value_t = 10.0)]
        lambda: f64,
        /// Directory for the witness pair and the JSON report
        /// (default: probe-out).
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Run a completion experiment described by a key = value config file.
    Experiment { config: PathBuf },
    /// Generate a reveal mask from a named family.
    Generate {
        family: MaskFamily,
        /// Side length.
        k: usize,
        /// Reveal density (quasirandom only).
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        /// Output path (default: <family>-<k>.mask).
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MaskFamily {
    HalfRows,
    Parity,
    Quasirandom,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            exit(code);
        }
    };
    if let Err(e) = run(cli.cmd) {
        eprintln!("error: {e}");
        exit(2);
    }
}

fn run(cmd: Cmd) -> mclab_core::Result<()> {
    match cmd {
        Cmd::Complete {
            matrix,
            mask,
            box_bound,
            output,
            rho,
            max_iters,
            primal_tol,
            dual_tol,
            over_relaxation,
        } => {
            let revealed: Mat = read_matrix_file(&matrix)?;
            let mask: Mask = read_mask_file(&mask)?;
            let config = SolverConfig {
                penalty: rho,
                max_iters,
                primal_tol,
                dual_tol,
                over_relaxation,
            };
            let result = match box_bound {
                Some(l) => complete_modified_cr(&revealed, &mask, l, &config)?,
                None => complete_plain_cr(&revealed, &mask, &config)?,
            };
            let out = output.unwrap_or_else(|| with_suffix(&matrix, "estimate"));
            write_matrix_file(&out, &result.estimate)?;
            match box_bound {
                Some(l) => println!("variant = box-constrained (L = {l})"),
                None => println!("variant = unconstrained"),
            }
            println!("iterations = {}", result.iterations);
            println!("converged = {}", result.converged);
            println!("nuclear = {}", result.nuclear_norm);
            println!("primal residual = {}", result.primal_residual);
            println!("dual residual = {}", result.dual_residual);
            println!("feasibility gap = {}", result.feasibility_gap);
            println!("estimate written to {}", out.display());
            Ok(())
        }
        Cmd::Cutnorm {
            matrix,
            exact,
            restarts,
            seed,
        } => {
            let a: Mat = read_matrix_file(&matrix)?;
            if exact {
                let est = cut_norm_exact(&a)?;
                println!("lower = {}", est.lower);
                println!("upper = {}", est.upper);
                println!("exact = true");
            } else {
                let est = cut_norm_lower(&a, restarts, seed);
                println!("lower = {}", est.lower);
                println!("upper = {}", est.upper);
                println!("exact = {}", est.exact);
            }
            Ok(())
        }
        Cmd::Cutdist { a, b, seed } => {
            let ma: Mat = read_matrix_file(&a)?;
            let mb: Mat = read_matrix_file(&b)?;
            let small = ma.rows() <= EXACT_PERM_LIMIT && ma.cols() <= EXACT_PERM_LIMIT;
            if small {
                let d = cut_distance_exact(&ma, &mb)?;
                println!("distance = {d}");
                println!("exact = true");
            } else {
                let bound = cut_distance_heuristic(&ma, &mb, seed)?;
                println!("distance = {}", bound.value);
                println!("exact = {}", bound.exact);
            }
            Ok(())
        }
        Cmd::Discretize {
            kernel,
            rows,
            cols,
            output,
        } => {
            let step: StepKernel = read_step_graphon_file(&kernel)?;
            let m = step.discretize(rows, cols)?;
            let out = output.unwrap_or_else(|| with_suffix(&kernel, "matrix"));
            write_matrix_file(&out, &m)?;
            println!("{rows} x {cols} discretization written to {}", out.display());
            Ok(())
        }
        Cmd::Verdict { kernel, etas } => {
            let step: StepKernel = read_step_graphon_file(&kernel)?;
            let report = recovery_verdict(&step, etas.as_deref())?;
            let json = serde_json::json!({
                "etaGrid": report.eta_grid,
                "phi": report.phi,
                "admitsRecovery": report.admits_recovery,
                "resolutionWarning": report.resolution_warning,
            });
            println!("{}", serde_json::to_string_pretty(&json).expect("json"));
            Ok(())
        }
        Cmd::Probe {
            mask,
            rank,
            box_bound,
            seed,
            starts,
            iters,
            lambda,
            output_dir,
        } => {
            let mask: Mask = read_mask_file(&mask)?;
            let cfg = ProbeConfig {
                rank,
                box_bound,
                seed,
                starts,
                iters,
                lambda,
                ..ProbeConfig::default()
            };
            let outcome = probe_stable_recovery(&mask, &cfg)?;
            let dir = output_dir.unwrap_or_else(|| PathBuf::from("probe-out"));
            let a_path = dir.join("witness_a.txt");
            let b_path = dir.join("witness_b.txt");
            write_matrix_file(&a_path, &outcome.witness_a)?;
            write_matrix_file(&b_path, &outcome.witness_b)?;
            let json = serde_json::json!({
                "maskedDiff": outcome.masked_diff,
                "fullDiff": outcome.full_diff,
                "verdict": outcome.verdict,
                "witnessA": a_path.display().to_string(),
                "witnessB": b_path.display().to_string(),
                "log": outcome.log,
            });
            let report_path = dir.join("probe.json");
            write_atomic(
                &report_path,
                &(serde_json::to_string_pretty(&json).expect("json") + "\n"),
            )?;
            println!("maskedDiff = {}", outcome.masked_diff);
            println!("fullDiff = {}", outcome.full_diff);
            println!(
                "verdict = {}",
                match outcome.verdict {
                    ProbeVerdict::StableLooking => "stable-looking",
                    ProbeVerdict::ViolationFound => "violation-found",
                }
            );
            println!("report written to {}", report_path.display());
            Ok(())
        }
        Cmd::Experiment { config } => {
            let text = std::fs::read_to_string(&config)?;
            let cfg = parse_experiment_config(&text)?;
            let report = run_completion_experiment(&cfg)?;
            for row in &report.per_size {
                println!(
                    "k = {:>5}: errModified = {:.6}, errPlain = {:.6}, nuclear = {:.4}, \
                     iters = {}, converged = {}",
                    row.k, row.err_modified, row.err_plain, row.nuclear, row.iters, row.converged
                );
            }
            println!(
                "looksRecoverable = {}",
                report.summary.looks_recoverable
            );
            let (json_path, csv_path) = write_reports(&report, &cfg.output_path)?;
            println!("report written to {}", json_path.display());
            println!("table written to {}", csv_path.display());
            Ok(())
        }
        Cmd::Generate {
            family,
            k,
            density,
            output,
        } => {
            let (mask, name): (Mask, &str) = match family {
                MaskFamily::HalfRows => (gen_half_rows(k)?, "half-rows"),
                MaskFamily::Parity => (gen_parity(k)?, "parity"),
                MaskFamily::Quasirandom => (gen_quasirandom(k, density)?, "quasirandom"),
            };
            let out = output.unwrap_or_else(|| PathBuf::from(format!("{name}-{k}.mask")));
            write_mask_file(&out, &mask)?;
            println!(
                "{name} mask, {} of {} entries revealed, written to {}",
                mask.count_revealed(),
                k * k,
                out.display()
            );
            Ok(())
        }
    }
}

/// `path` with an extra extension segment appended (keeps the original name).
fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().map(|s| s.to_owned()).unwrap_or_default();
    name.push(".");
    name.push(suffix);
    path.with_file_name(name)
}
