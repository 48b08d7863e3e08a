//! Command-line front end.
//!
//! Exit codes: 0 success, 1 parse/IO and other errors, 2 hypothesis
//! violation, 3 parameter on a critical surface, 4 solver failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::config::InstanceConfig;
use crate::degree::{existence_certificate, leray_schauder_degree_with, DEFAULT_CRITICAL_TOL};
use crate::error::Error;
use crate::matrix::{check_h1, check_h2, check_hypotheses, ConditionReport, DEFAULT_TOL};
use crate::pohozaev::{
    critical_surface_from_blowup, minimal_mass_check, pohozaev_residual, solve_mass_on_hypersurface, MassVector,
};
use crate::series::{build_generating_function, SeriesEntry, DEFAULT_CAP};
use crate::spectrum::{enumerate_spectrum, DEFAULT_MERGE_TOL};
use crate::torus::{
    read_field_binary, solve_continuation, verify_solution, write_field_binary, write_field_csv, SolverOptions,
    StepLog, TorusGrid, VerificationReport, DEFAULT_RESOLUTION,
};

#[derive(Debug, Parser)]
#[command(name = "liouville", version, about = "Degree counting and torus solver for singular Liouville systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Emit a JSON report instead of a table.
    #[arg(long, global = true)]
    pub json: bool,

    /// Tolerance for landing on a critical level (normalized units).
    #[arg(long, global = true, value_name = "REAL")]
    pub tol_critical: Option<f64>,

    /// Tolerance for merging coincident exponents.
    #[arg(long, global = true, value_name = "REAL")]
    pub tol_merge: Option<f64>,

    /// Exponent cap for spectra and series (normalized units).
    #[arg(long, global = true, value_name = "REAL")]
    pub cap: Option<f64>,

    /// Grid points per axis for `solve` and `verify`.
    #[arg(long, global = true, value_name = "INT")]
    pub resolution: Option<usize>,

    /// Field dump target for `solve` (binary; a `.csv` sibling is also written).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check hypotheses (H1) and (H2) on the coupling matrix.
    CheckMatrix { config: PathBuf },
    /// List the critical levels n_1 < n_2 < … (divided by 8π).
    Spectrum { config: PathBuf },
    /// Dump the truncated generating function.
    Series { config: PathBuf },
    /// Leray–Schauder degree of the instance.
    Degree { config: PathBuf },
    /// Pohozaev residuals, hypersurface points and critical-surface residuals.
    Pohozaev { config: PathBuf },
    /// Solve on the flat torus by continuation.
    Solve { config: PathBuf },
    /// Verify a solution (from `--field`, or solved afresh).
    Verify {
        config: PathBuf,
        /// Binary field dump written by `solve --out`.
        #[arg(long, value_name = "PATH")]
        field: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixReport {
    pub n: usize,
    pub h1: ConditionReport,
    pub h2: Option<ConditionReport>,
    /// Combined gate used by `degree` (H2 is not imposed when n = 1).
    pub hypotheses: ConditionReport,
    pub inverse: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub degree: i64,
    pub region: usize,
    pub q: f64,
    pub chi: i64,
    pub nearest_levels: (f64, f64),
    pub partial_coefficients: Vec<i64>,
    pub exists: bool,
    pub structural_condition: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PohozaevReport {
    pub mu: f64,
    pub residual: Option<f64>,
    pub minimal_mass: Option<ConditionReport>,
    pub hypersurface_point: Option<Vec<f64>>,
    pub critical_surface_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub resolution: usize,
    pub final_residual: f64,
    pub max_abs_u: f64,
    pub steps: Vec<StepLog>,
    pub verification: VerificationReport,
}

#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::HypothesisViolation(_) => 2,
        Error::OnCriticalSurface { .. } => 3,
        Error::NoConvergence { .. } | Error::StepFailure { .. } => 4,
        _ => 1,
    }
}

/// Parse `args` (including the program name) and run the command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            }
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match dispatch(cli) {
        Ok(Dispatched { stdout, failure }) => match failure {
            None => Outcome { code: 0, stdout, stderr: String::new() },
            Some((code, msg)) => Outcome { code, stdout, stderr: format!("error: {msg}\n") },
        },
        Err(e) => Outcome { code: exit_code(&e), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

struct Dispatched {
    stdout: String,
    failure: Option<(i32, String)>,
}

impl Dispatched {
    fn ok(stdout: String) -> Self {
        Self { stdout, failure: None }
    }
}

fn load(path: &Path) -> Result<InstanceConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    InstanceConfig::from_json(&text)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::InvalidInput(format!("{}: {e}", path.display()))
}

fn dispatch(cli: &Cli) -> Result<Dispatched, Error> {
    let merge_tol = cli.tol_merge.unwrap_or(DEFAULT_MERGE_TOL);
    match &cli.command {
        Command::CheckMatrix { config } => {
            let cfg = load(config)?;
            let a = cfg.matrix()?;
            let h1 = check_h1(&a, DEFAULT_TOL);
            let h2 = check_h2(&a, DEFAULT_TOL).ok();
            let hypotheses = check_hypotheses(&a, DEFAULT_TOL);
            let inverse = a.inverse().ok().map(|inv| inv.chunks(a.n()).map(|r| r.to_vec()).collect());
            let report = MatrixReport { n: a.n(), h1, h2, hypotheses, inverse };
            let stdout = if cli.json { to_json(&report) } else { matrix_table(&report) };
            let failure = (!report.hypotheses.holds)
                .then(|| (2, format!("HypothesisViolation: {}", report.hypotheses)));
            Ok(Dispatched { stdout, failure })
        }
        Command::Spectrum { config } => {
            let cfg = load(config)?;
            let cap = cli.cap.or(cfg.exponent_cap()).unwrap_or(DEFAULT_CAP);
            let spec = enumerate_spectrum(&cfg.singularity_set()?, cap, merge_tol)?;
            Ok(Dispatched::ok(if cli.json {
                to_json(&spec.levels)
            } else {
                let mut s = format!("{:>6}  {:>14}\n", "k", "n_k");
                for (k, v) in spec.levels.iter().enumerate() {
                    let _ = writeln!(s, "{:>6}  {:>14.9}", k + 1, v);
                }
                s
            }))
        }
        Command::Series { config } => {
            let cfg = load(config)?;
            let cap = cli.cap.or(cfg.exponent_cap()).unwrap_or(DEFAULT_CAP);
            let g = build_generating_function(cfg.surface()?.chi(), &cfg.singularity_set()?, cap, merge_tol)?;
            let entries: Vec<SeriesEntry> = g.entries();
            Ok(Dispatched::ok(if cli.json {
                to_json(&entries)
            } else {
                let mut s = format!("{:>14}  {:>20}\n", "exponent", "coefficient");
                for e in &entries {
                    let _ = writeln!(s, "{:>14.9}  {:>20}", e.exponent, e.coefficient);
                }
                s
            }))
        }
        Command::Degree { config } => {
            let cfg = load(config)?;
            let p = cfg.instance()?;
            let cap = cli.cap.or(cfg.exponent_cap()).unwrap_or(DEFAULT_CAP);
            let tol = cli.tol_critical.or(cfg.critical_tolerance()).unwrap_or(DEFAULT_CRITICAL_TOL);
            let d = leray_schauder_degree_with(&p, cap, tol, merge_tol)?;
            let cert = existence_certificate(&p, cap, tol)?;
            let report = DegreeReport {
                degree: d.degree,
                region: d.region_k,
                q: d.q_normalized,
                chi: p.surface.chi(),
                nearest_levels: d.nearest_levels,
                partial_coefficients: d.partial_coefficients,
                exists: cert.exists,
                structural_condition: cert.structural_condition,
            };
            Ok(Dispatched::ok(if cli.json {
                to_json(&report)
            } else {
                let mut s = String::new();
                let _ = writeln!(s, "{:<22} {}", "degree", report.degree);
                let _ = writeln!(s, "{:<22} {}", "region k", report.region);
                let _ = writeln!(s, "{:<22} {:.12}", "q (normalized)", report.q);
                let _ = writeln!(s, "{:<22} {}", "euler characteristic", report.chi);
                let _ = writeln!(s, "{:<22} ({}, {})", "between levels", report.nearest_levels.0, report.nearest_levels.1);
                let _ = writeln!(s, "{:<22} {:?}", "coefficients b_0..b_k", report.partial_coefficients);
                let _ = writeln!(s, "{:<22} {}", "existence", cert.explanation);
                s
            }))
        }
        Command::Pohozaev { config } => {
            let cfg = load(config)?;
            let a = cfg.matrix()?;
            let pc = cfg
                .pohozaev
                .clone()
                .ok_or_else(|| Error::InvalidInput("config field `pohozaev` is required".into()))?;
            let mut report = PohozaevReport {
                mu: pc.mu,
                residual: None,
                minimal_mass: None,
                hypersurface_point: None,
                critical_surface_residual: None,
            };
            if let Some(sigma) = pc.sigma {
                let m = MassVector::new(sigma, pc.mu)?;
                report.residual = Some(pohozaev_residual(&a, &m)?);
                report.minimal_mass = Some(minimal_mass_check(&a, &m)?);
            }
            if let Some(d) = pc.direction {
                report.hypersurface_point = Some(solve_mass_on_hypersurface(&a, pc.mu, &d)?.sigma);
            }
            if let Some(mus) = pc.mus {
                report.critical_surface_residual = Some(critical_surface_from_blowup(&a, &cfg.rho()?, &mus)?);
            }
            Ok(Dispatched::ok(if cli.json {
                to_json(&report)
            } else {
                let mut s = String::new();
                let _ = writeln!(s, "{:<26} {}", "mu", report.mu);
                if let Some(r) = report.residual {
                    let _ = writeln!(s, "{:<26} {:e}", "pohozaev residual", r);
                }
                if let Some(r) = &report.minimal_mass {
                    let _ = writeln!(s, "{:<26} {}", "minimal mass m_i > 2mu", r);
                }
                if let Some(p) = &report.hypersurface_point {
                    let _ = writeln!(s, "{:<26} {:?}", "hypersurface point", p);
                }
                if let Some(r) = report.critical_surface_residual {
                    let _ = writeln!(s, "{:<26} {:e}", "critical surface residual", r);
                }
                s
            }))
        }
        Command::Solve { config } => {
            let cfg = load(config)?;
            let (p, w, grid, opts) = solver_setup(cli, &cfg)?;
            let out = solve_continuation(&p, &w, &grid, &opts)?;
            if let Some(path) = &cli.out {
                let f = File::create(path).map_err(|e| io_err(path, e))?;
                write_field_binary(BufWriter::new(f), &out.u).map_err(|e| io_err(path, e))?;
                let csv = path.with_extension("csv");
                let f = File::create(&csv).map_err(|e| io_err(&csv, e))?;
                write_field_csv(BufWriter::new(f), &out.u).map_err(|e| io_err(&csv, e))?;
            }
            let verification = verify_solution(&out.u, &p, &w, &grid)?;
            let report = SolveReport {
                resolution: grid.resolution(),
                final_residual: out.final_residual,
                max_abs_u: out.u.max_abs(),
                steps: out.steps,
                verification,
            };
            Ok(Dispatched::ok(if cli.json {
                to_json(&report)
            } else {
                let mut s = format!("{:>5}  {:>6}  {:>7}  {:>12}  {:>12}\n", "step", "t", "newton", "residual", "max|u|");
                for st in &report.steps {
                    let _ = writeln!(
                        s,
                        "{:>5}  {:>6.3}  {:>7}  {:>12.3e}  {:>12.6}",
                        st.step,
                        st.t,
                        st.newton_iterations,
                        st.residual_history.last().copied().unwrap_or(0.0),
                        st.max_abs_u
                    );
                }
                verification_table(&mut s, &report.verification);
                s
            }))
        }
        Command::Verify { config, field } => {
            let cfg = load(config)?;
            let (p, w, grid, opts) = solver_setup(cli, &cfg)?;
            let u = match field {
                Some(path) => {
                    let f = File::open(path).map_err(|e| io_err(path, e))?;
                    let u = read_field_binary(BufReader::new(f)).map_err(|e| io_err(path, e))?;
                    if u.resolution != grid.resolution() {
                        return Err(Error::InvalidInput(format!(
                            "field resolution {} differs from the requested {}",
                            u.resolution,
                            grid.resolution()
                        )));
                    }
                    u
                }
                None => solve_continuation(&p, &w, &grid, &opts)?.u,
            };
            let report = verify_solution(&u, &p, &w, &grid)?;
            Ok(Dispatched::ok(if cli.json {
                to_json(&report)
            } else {
                let mut s = String::new();
                verification_table(&mut s, &report);
                s
            }))
        }
    }
}

fn solver_setup(
    cli: &Cli,
    cfg: &InstanceConfig,
) -> Result<(crate::degree::ProblemInstance, crate::torus::WeightSpec, TorusGrid, SolverOptions), Error> {
    let p = cfg.instance()?;
    let w = cfg.weight_spec()?;
    let sc = cfg.solver.clone();
    let resolution = cli
        .resolution
        .or(sc.as_ref().and_then(|s| s.resolution))
        .unwrap_or(DEFAULT_RESOLUTION);
    let grid = TorusGrid::new(resolution)?;
    let mut opts = SolverOptions::default();
    if let Some(tol) = sc.as_ref().and_then(|s| s.tol) {
        opts.tol = tol;
    }
    if let Some(steps) = sc.as_ref().and_then(|s| s.steps) {
        opts.steps = steps;
    }
    Ok((p, w, grid, opts))
}

fn matrix_table(r: &MatrixReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<12} {}", "size", r.n);
    let _ = writeln!(s, "{:<12} {}", "(H1)", r.h1);
    match &r.h2 {
        Some(h2) => {
            let _ = writeln!(s, "{:<12} {}", "(H2)", h2);
        }
        None => {
            let _ = writeln!(s, "{:<12} not evaluated (singular matrix)", "(H2)");
        }
    }
    let _ = writeln!(s, "{:<12} {}", "combined", r.hypotheses);
    if let Some(inv) = &r.inverse {
        let _ = writeln!(s, "inverse:");
        for row in inv {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>14.9}")).collect();
            let _ = writeln!(s, "  {}", cells.join(" "));
        }
    }
    s
}

fn verification_table(s: &mut String, r: &VerificationReport) {
    let _ = writeln!(s, "{:>9}  {:>12}  {:>12}  {:>12}  {:>12}", "component", "|R|_L2", "mean(R)", "mean(u)", "mass");
    for i in 0..r.masses.len() {
        let _ = writeln!(
            s,
            "{:>9}  {:>12.3e}  {:>12.3e}  {:>12.3e}  {:>12.9}",
            i, r.residual_l2[i], r.residual_means[i], r.mean_defects[i], r.masses[i]
        );
    }
    let _ = writeln!(s, "J_rho = {:.12}", r.functional);
}
