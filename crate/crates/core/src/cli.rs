//! Command-line front end.
//!
//! Every command reads a problem instance, prints a report (JSON by default)
//! on stdout and exits with a stable code: 0 success, 2 parse error,
//! 3 dimension error, 4 refusal of a non-stabilizable target, 5 dimension cap,
//! 6 integrator abort, 1 anything else.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::analysis;
use crate::dynamics::{
    self, default_dt, evolve_with, gas_certificate, simulate_switched, trace_distance, LindbladGenerator,
    SwitchingSchedule, Trajectory,
};
use crate::error::{DqlsError, Result};
use crate::instance::{ProblemInstance, Resolved};
use crate::linalg::{self, CMatrix};
use crate::matrix_io::MatrixFile;
use crate::random;
use crate::synthesis::{self, StabilizerSet};
use crate::tensor::{DensityMatrix, PureState};
use crate::tol;

/// Significant digits of every number in a report.
const REPORT_DIGITS: usize = 12;
/// Eigenvalues listed in full before truncating to the leading ones.
const MAX_LISTED_EIGENVALUES: usize = 32;
/// Initial states used by the trajectory-evidence fallback of `certify`.
const EVIDENCE_STATES: usize = 20;

#[derive(Debug, Parser)]
#[command(name = "dqls", version, about = "Quasi-local dissipative stabilization of pure states")]
pub struct Cli {
    /// Relative support threshold; overrides the instance value.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,
    /// Seed for random initial states.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Add wall-clock timings to the report (breaks bit-identical reruns).
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide stabilizability of the instance's state under its neighborhoods.
    CheckDqls { instance: PathBuf },
    /// Write the parent-Hamiltonian terms and their sum.
    ParentHam {
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write one stabilizing noise operator per neighborhood.
    Synthesize {
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Synthesize even when the target is not stabilizable.
        #[arg(long)]
        force: bool,
    },
    /// Spectral certificate of global asymptotic stability.
    Certify {
        instance: PathBuf,
        #[command(flatten)]
        ops: OperatorArgs,
        #[arg(long, default_value_t = dynamics::DEFAULT_DIM_CAP)]
        cap: usize,
        /// Above the cap, fall back to trajectory evidence instead of failing.
        #[arg(long)]
        fallback: bool,
        /// Horizon of the fallback trajectories.
        #[arg(long, default_value_t = 40.0)]
        t_final: f64,
        #[arg(long)]
        dt: Option<f64>,
        /// Print every Liouvillian eigenvalue instead of the leading ones.
        #[arg(long)]
        full_spectrum: bool,
    },
    /// Integrate the dynamics from random initial states.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct OperatorArgs {
    /// Matrix files to use instead of synthesized operators. Files of kind
    /// `hamiltonian` are summed into the Hamiltonian, all others are noise
    /// operators.
    #[arg(long, num_args = 1..)]
    pub operators: Vec<PathBuf>,
    /// Synthesize even when the target is not stabilizable.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub instance: PathBuf,
    #[command(flatten)]
    pub ops: OperatorArgs,
    #[arg(long, default_value_t = 40.0)]
    pub t_final: f64,
    /// Defaults to min(0.01, 0.1 / ||L||).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Cycle through one generator per operator instead of applying all at once.
    #[arg(long)]
    pub switched: bool,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 30)]
    pub cycles: usize,
    #[arg(long, default_value_t = 20)]
    pub trajectories: usize,
    /// Start from random full-rank mixed states instead of pure ones.
    #[arg(long)]
    pub mixed: bool,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// CSV row every this many steps (simultaneous mode only).
    #[arg(long, default_value_t = 100)]
    pub record_every: usize,
}

/// Parses `args`, runs the command, prints the report and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let format = cli.output;
    match run(&cli) {
        Ok(report) => {
            match format {
                OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize")),
                OutputFormat::Text => print!("{}", render_text(&report)),
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command and returns its report, already rounded.
pub fn run(cli: &Cli) -> Result<Value> {
    let start = Instant::now();
    let mut report = match &cli.command {
        Command::CheckDqls { instance } => cmd_check_dqls(cli, instance)?,
        Command::ParentHam { instance, out } => cmd_parent_ham(cli, instance, out)?,
        Command::Synthesize { instance, out, force } => cmd_synthesize(cli, instance, out, *force)?,
        Command::Certify { instance, ops, cap, fallback, t_final, dt, full_spectrum } => {
            cmd_certify(cli, instance, ops, *cap, *fallback, *t_final, *dt, *full_spectrum)?
        }
        Command::Simulate(args) => cmd_simulate(cli, args)?,
    };
    if cli.timings {
        report["timings"] = json!({ "total_seconds": start.elapsed().as_secs_f64() });
    }
    round_report(&mut report);
    Ok(report)
}

struct Loaded {
    path: PathBuf,
    resolved: Resolved,
    tolerance: f64,
    state_kind: &'static str,
}

fn load(cli: &Cli, path: &Path) -> Result<Loaded> {
    let inst = ProblemInstance::load(path)?;
    let resolved = inst.resolve()?;
    let tolerance = cli.tolerance.or(resolved.tolerance).unwrap_or(tol::SUPPORT);
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(DqlsError::InvalidArgument(format!("tolerance {tolerance} must lie in (0, 1)")));
    }
    Ok(Loaded { path: path.to_path_buf(), resolved, tolerance, state_kind: inst.state.kind() })
}

fn header(name: &str, loaded: &Loaded, extra: Value) -> Value {
    let r = &loaded.resolved;
    let mut command = json!({
        "name": name,
        "instance": loaded.path.display().to_string(),
    });
    if let (Value::Object(dst), Value::Object(src)) = (&mut command, extra) {
        dst.extend(src);
    }
    json!({
        "command": command,
        "dims": r.state.space().dims(),
        "state": loaded.state_kind,
        "neighborhoods": r.pattern.neighborhoods().iter().map(|nb| nb.indices().to_vec()).collect::<Vec<_>>(),
        "gains_policy": r.gains_policy.name(),
        "tolerances": {
            "support_relative": loaded.tolerance,
            "intersection": tol::INTERSECT,
            "eigenvalue_zero": tol::EIG,
            "normalization": tol::NORM,
            "hermiticity": tol::HERM,
            "psd": tol::PSD,
            "orthonormality": tol::ORTH,
            "borderline_factor": tol::BORDERLINE_FACTOR,
        },
    })
}

fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn vector(v: impl Iterator<Item = Complex64>) -> Value {
    Value::Array(v.map(complex).collect())
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn tri_state(verdict: bool, indeterminate: bool) -> &'static str {
    if indeterminate {
        "indeterminate"
    } else if verdict {
        "true"
    } else {
        "false"
    }
}

fn cmd_check_dqls(cli: &Cli, path: &Path) -> Result<Value> {
    let loaded = load(cli, path)?;
    let r = &loaded.resolved;
    let rep = analysis::check_dqls(&r.state, &r.pattern, loaded.tolerance)?;
    let factors = analysis::factorization_prereduction(&r.state)?;
    let mut warnings = r.warnings.clone();
    warnings.extend(rep.warnings.iter().cloned());

    let mut out = header("check-dqls", &loaded, json!({}));
    out["verdict"] = json!(tri_state(rep.verdict, rep.indeterminate));
    out["intersection_dim"] = json!(rep.intersection.dim());
    out["intersection_basis"] =
        Value::Array(rep.intersection.frame().column_iter().map(|col| vector(col.iter().cloned())).collect());
    out["target_distance"] = json!(rep.target_distance);
    out["containment_residual"] = json!(rep.containment_residual);
    out["intersection_eigenvalues"] = json!(rep.intersection_diagnostic.eigenvalues);
    out["per_neighborhood"] = Value::Array(
        rep.per_neighborhood
            .iter()
            .map(|a| {
                json!({
                    "neighborhood": a.neighborhood.indices(),
                    "local_dim": a.support.ambient_dim(),
                    "support_dim": a.support.dim(),
                    "reduced_eigenvalues": a.diagnostic.eigenvalues,
                    "borderline": a.diagnostic.is_borderline(),
                })
            })
            .collect(),
    );
    out["product_factors"] = json!(factors.iter().map(|(idx, _)| idx.clone()).collect::<Vec<_>>());
    out["warnings"] = json!(warnings);
    Ok(out)
}

fn create_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| DqlsError::Io(format!("cannot create {}: {e}", out.display())))
}

fn lowest(values: &[f64]) -> &[f64] {
    &values[..values.len().min(MAX_LISTED_EIGENVALUES)]
}

fn cmd_parent_ham(cli: &Cli, path: &Path, out_dir: &Path) -> Result<Value> {
    let loaded = load(cli, path)?;
    let r = &loaded.resolved;
    let space = r.state.space();
    let ph = analysis::parent_hamiltonian(&r.state, &r.pattern, loaded.tolerance)?;
    let (kernel, kernel_diag) = ph.kernel();
    let frustration_free = analysis::is_frustration_free(&r.state, &ph.terms)?;
    let spectrum = ph.spectrum();

    create_dir(out_dir)?;
    let mut files = Vec::new();
    for (k, term) in ph.terms.iter().enumerate() {
        let file = out_dir.join(format!("term_{k}.json"));
        MatrixFile::new("parent_hamiltonian_term", space, Some(term.neighborhood()), term.block()).save(&file)?;
        files.push(file.display().to_string());
    }
    let total = out_dir.join("total.json");
    MatrixFile::new("parent_hamiltonian", space, None, &ph.total).save(&total)?;
    files.push(total.display().to_string());

    let mut warnings = r.warnings.clone();
    if kernel_diag.is_borderline() {
        warnings.push(format!("kernel rank is borderline: eigenvalues {:?}", kernel_diag.borderline));
    }
    let mut out = header("parent-ham", &loaded, json!({ "out": out_dir.display().to_string() }));
    out["kernel_dim"] = json!(kernel.dim());
    out["target_in_kernel_residual"] = json!(kernel.residual(r.state.amplitudes()));
    out["frustration_free"] = json!(frustration_free);
    out["lowest_eigenvalues"] = json!(lowest(&spectrum));
    out["terms"] = Value::Array(
        ph.terms
            .iter()
            .map(|t| json!({ "neighborhood": t.neighborhood().indices(), "rank": linalg::trace(t.block()).re.round() as usize }))
            .collect(),
    );
    out["files"] = json!(files);
    out["warnings"] = json!(warnings);
    Ok(out)
}

fn synthesize(loaded: &Loaded, force: bool) -> Result<StabilizerSet> {
    let r = &loaded.resolved;
    synthesis::synthesize_stabilizers(&r.state, &r.pattern, &r.gains_policy, loaded.tolerance, force)
}

fn cmd_synthesize(cli: &Cli, path: &Path, out_dir: &Path, force: bool) -> Result<Value> {
    let loaded = load(cli, path)?;
    let r = &loaded.resolved;
    let space = r.state.space();
    let set = synthesize(&loaded, force)?;
    let residuals = set.residuals(&r.state)?;
    let mut warnings = r.warnings.clone();
    warnings.extend(set.warnings.iter().cloned());
    let dqls = analysis::check_dqls(&r.state, &r.pattern, loaded.tolerance)?;
    if !dqls.verdict && space.total_dim() <= dynamics::DEFAULT_DIM_CAP {
        let cert = gas_certificate(&set.generator(space)?, &r.state, dynamics::DEFAULT_DIM_CAP)?;
        warnings.push(format!(
            "Liouvillian kernel dimension of the synthesized generator is {}; the target is not the unique steady state",
            cert.spectrum.kernel_dim
        ));
    }

    create_dir(out_dir)?;
    let mut operators = Vec::new();
    for (k, op) in set.operators.iter().enumerate() {
        let file = out_dir.join(format!("operator_{k}.json"));
        MatrixFile::new("noise_operator", space, Some(op.neighborhood()), op.block())
            .with_gains(&set.gains[k])
            .save(&file)?;
        operators.push(json!({
            "neighborhood": op.neighborhood().indices(),
            "support_dim": set.support_dims[k],
            "gains": set.gains[k],
            "residual": residuals[k],
            "file": file.display().to_string(),
        }));
    }
    let mut out = header("synthesize", &loaded, json!({ "out": out_dir.display().to_string(), "force": force }));
    out["verdict"] = json!(tri_state(dqls.verdict, dqls.indeterminate));
    out["operators"] = Value::Array(operators);
    out["max_residual"] = json!(residuals.iter().cloned().fold(0.0, f64::max));
    out["warnings"] = json!(warnings);
    Ok(out)
}

/// Operators from files, or synthesized from the instance.
struct Operators {
    hamiltonian: Option<CMatrix>,
    noise: Vec<CMatrix>,
    source: &'static str,
    warnings: Vec<String>,
}

fn operators(loaded: &Loaded, args: &OperatorArgs) -> Result<Operators> {
    let space = loaded.resolved.state.space();
    if args.operators.is_empty() {
        let set = synthesize(loaded, args.force)?;
        return Ok(Operators {
            hamiltonian: None,
            noise: set.embedded(space)?,
            source: "synthesized",
            warnings: set.warnings,
        });
    }
    let mut hamiltonian: Option<CMatrix> = None;
    let mut noise = Vec::new();
    for path in &args.operators {
        let file = MatrixFile::load(path)?;
        let m = file.embedded(space)?;
        if file.kind == "hamiltonian" {
            hamiltonian = Some(match hamiltonian {
                Some(h) => h + m,
                None => m,
            });
        } else {
            noise.push(m);
        }
    }
    Ok(Operators { hamiltonian, noise, source: "files", warnings: Vec::new() })
}

fn random_initial_states(space: &crate::tensor::TensorSpace, count: usize, mixed: bool, seed: u64) -> Vec<CMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            if mixed {
                random::random_density(space, space.total_dim(), &mut rng).into_matrix()
            } else {
                random::haar_state(space, &mut rng).projector()
            }
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_certify(
    cli: &Cli,
    path: &Path,
    args: &OperatorArgs,
    cap: usize,
    fallback: bool,
    t_final: f64,
    dt: Option<f64>,
    full_spectrum: bool,
) -> Result<Value> {
    let loaded = load(cli, path)?;
    let target = &loaded.resolved.state;
    let space = target.space();
    let ops = operators(&loaded, args)?;
    let gen = LindbladGenerator::new(space.clone(), ops.hamiltonian.clone(), ops.noise.clone())?;
    let invariance = dynamics::check_invariance(&gen, target);
    let mut warnings = loaded.resolved.warnings.clone();
    warnings.extend(ops.warnings.iter().cloned());
    warnings.extend(invariance.diagnostics.iter().cloned());

    let extra = json!({ "cap": cap, "fallback": fallback, "operators": ops.source });
    let mut out = header("certify", &loaded, extra);
    out["invariance"] = json!({
        "invariant": invariance.invariant,
        "block_route": invariance.block_route,
        "residual_route": invariance.residual_route,
        "lower_left_norm": invariance.lower_left_norm,
        "hamiltonian_condition_norm": invariance.hamiltonian_condition_norm,
        "generator_residual": invariance.generator_residual,
    });

    if space.total_dim() > cap {
        if !fallback {
            return Err(DqlsError::DimensionCap { dim: space.total_dim(), cap });
        }
        let dt = dt.unwrap_or_else(|| default_dt(&gen));
        let starts = random_initial_states(space, EVIDENCE_STATES, false, cli.seed);
        let finals = starts
            .par_iter()
            .map(|rho| evolve_with(&gen, rho, 0.0, t_final, dt, usize::MAX).map(|t| target.fidelity_with(t.final_state())))
            .collect::<Result<Vec<f64>>>()?;
        let min = finals.iter().cloned().fold(f64::INFINITY, f64::min);
        warnings.push(format!("dimension {} exceeds the cap {cap}; result is trajectory evidence, not a certificate", space.total_dim()));
        out["mode"] = json!("evidence");
        out["evidence"] = json!({
            "initial_states": EVIDENCE_STATES,
            "t_final": t_final,
            "dt": dt,
            "final_fidelities": finals,
            "min_final_fidelity": min,
            "converged": min > 1.0 - 1e-6,
        });
        out["warnings"] = json!(warnings);
        return Ok(out);
    }

    let cert = gas_certificate(&gen, target, cap)?;
    let s = &cert.spectrum;
    let mut eigs = s.eigenvalues.clone();
    eigs.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    let listed = if full_spectrum { eigs.len() } else { eigs.len().min(MAX_LISTED_EIGENVALUES) };
    if !s.near_threshold.is_empty() {
        warnings.push(format!("{} eigenvalues lie near the zero threshold", s.near_threshold.len()));
    }
    if !cert.kernel_state_error.is_finite() {
        warnings.push("kernel vector has vanishing trace".into());
    }
    out["mode"] = json!("spectral");
    out["certified"] = json!(cert.certified);
    out["kernel_dim"] = json!(s.kernel_dim);
    out["kernel_state_error"] = finite_or_null(cert.kernel_state_error);
    out["gap"] = json!(s.gap);
    out["spectral_abscissa_nonzero"] = json!(s.spectral_abscissa_nonzero);
    out["max_real_part"] = json!(s.max_real_part);
    out["eigenvalue_count"] = json!(eigs.len());
    out["leading_eigenvalues"] = vector(eigs[..listed].iter().cloned());
    out["marginal_eigenvalues"] = vector(cert.marginal_eigenvalues.iter().cloned());
    out["near_threshold_eigenvalues"] = vector(s.near_threshold.iter().cloned());
    out["warnings"] = json!(warnings);
    Ok(out)
}

struct Row {
    t: f64,
    fidelity: f64,
    trace_distance: f64,
    purity: f64,
}

fn rows_of(traj: &Trajectory, target: &PureState) -> Vec<Row> {
    let proj = target.projector();
    traj.times
        .iter()
        .zip(&traj.states)
        .map(|(&t, rho)| Row {
            t,
            fidelity: target.fidelity_with(rho),
            trace_distance: trace_distance(rho, &proj),
            purity: linalg::trace(&(rho * rho)).re,
        })
        .collect()
}

fn cmd_simulate(cli: &Cli, args: &SimulateArgs) -> Result<Value> {
    let loaded = load(cli, &args.instance)?;
    let target = &loaded.resolved.state;
    let space = target.space();
    if args.trajectories == 0 {
        return Err(DqlsError::InvalidArgument("at least one trajectory is required".into()));
    }
    let ops = operators(&loaded, &args.ops)?;
    let mut warnings = loaded.resolved.warnings.clone();
    warnings.extend(ops.warnings.iter().cloned());

    let simultaneous = LindbladGenerator::new(space.clone(), ops.hamiltonian.clone(), ops.noise.clone())?;
    let schedule = if args.switched {
        let gens = ops
            .noise
            .iter()
            .map(|l| LindbladGenerator::new(space.clone(), ops.hamiltonian.clone(), vec![l.clone()]))
            .collect::<Result<Vec<_>>>()?;
        Some(SwitchingSchedule::new(args.tau, gens)?)
    } else {
        None
    };
    let dt = match (args.dt, &schedule) {
        (Some(dt), _) => dt,
        (None, Some(s)) => s.generators().iter().map(default_dt).fold(0.01, f64::min),
        (None, None) => default_dt(&simultaneous),
    };

    let starts = random_initial_states(space, args.trajectories, args.mixed, cli.seed);
    let trajectories = starts
        .par_iter()
        .map(|rho| match &schedule {
            Some(s) => {
                let rho0 = DensityMatrix::new(space.clone(), rho.clone())?;
                simulate_switched(s, &rho0, args.cycles, dt)
            }
            None => evolve_with(&simultaneous, rho, 0.0, args.t_final, dt, args.record_every),
        })
        .collect::<Result<Vec<Trajectory>>>()?;
    let rows: Vec<Vec<Row>> = trajectories.par_iter().map(|t| rows_of(t, target)).collect();

    if let Some(csv) = &args.csv {
        let mut text = String::from("trajectory_id,t,fidelity,trace_distance,purity\n");
        for (id, rs) in rows.iter().enumerate() {
            for r in rs {
                let _ = writeln!(
                    text,
                    "{id},{},{},{},{}",
                    round_sig(r.t),
                    round_sig(r.fidelity),
                    round_sig(r.trace_distance),
                    round_sig(r.purity)
                );
            }
        }
        std::fs::write(csv, text).map_err(|e| DqlsError::Io(format!("cannot write {}: {e}", csv.display())))?;
    }

    let summaries: Vec<Value> = rows
        .iter()
        .zip(&trajectories)
        .enumerate()
        .map(|(id, (rs, traj))| {
            let first = rs.first().expect("trajectories start with the initial state");
            let last = rs.last().expect("trajectories start with the initial state");
            json!({
                "id": id,
                "initial_fidelity": first.fidelity,
                "final_time": last.t,
                "final_fidelity": last.fidelity,
                "final_trace_distance": last.trace_distance,
                "final_purity": last.purity,
                "max_trace_drift": traj.max_trace_drift,
                "max_hermitian_defect": traj.max_hermitian_defect,
            })
        })
        .collect();
    let min_final = rows.iter().map(|rs| rs.last().map_or(0.0, |r| r.fidelity)).fold(f64::INFINITY, f64::min);

    let extra = json!({
        "mode": if args.switched { "switched" } else { "simultaneous" },
        "t_final": if args.switched { Value::Null } else { json!(args.t_final) },
        "tau": if args.switched { json!(args.tau) } else { Value::Null },
        "cycles": if args.switched { json!(args.cycles) } else { Value::Null },
        "dt": dt,
        "trajectories": args.trajectories,
        "seed": cli.seed,
        "mixed": args.mixed,
        "operators": ops.source,
        "csv": args.csv.as_ref().map(|p| p.display().to_string()),
    });
    let mut out = header("simulate", &loaded, extra);
    out["trajectories"] = Value::Array(summaries);
    out["min_final_fidelity"] = json!(min_final);
    if let Some(s) = &schedule {
        // Every generator is trace-distance contractive, so whole cycles must be too.
        let m = s.generators().len();
        let monotone = rows.iter().all(|rs| {
            rs.iter().step_by(m).collect::<Vec<_>>().windows(2).all(|w| w[1].trace_distance <= w[0].trace_distance + 1e-9)
        });
        out["cycle_trace_distance_nonincreasing"] = json!(monotone);
    }
    out["warnings"] = json!(warnings);
    Ok(out)
}

/// `x` rounded to [`REPORT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", REPORT_DIGITS - 1, x).parse().expect("formatted float parses")
}

fn round_report(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("checked f64");
            *v = json!(round_sig(x));
        }
        Value::Array(items) => items.iter_mut().for_each(round_report),
        Value::Object(map) => map.values_mut().for_each(round_report),
        _ => {}
    }
}

/// Indented `key: value` rendering of a report.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(map) = v {
        render_map(map, 0, &mut out);
    } else {
        let _ = writeln!(out, "{}", inline(v));
    }
    out
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn is_scalarish(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|i| !matches!(i, Value::Object(_))),
        Value::Object(_) => false,
        _ => true,
    }
}

fn render_map(map: &Map<String, Value>, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    for (k, v) in map {
        match v {
            Value::Object(inner) => {
                let _ = writeln!(out, "{pad}{k}:");
                render_map(inner, indent + 1, out);
            }
            Value::Array(items) if !is_scalarish(v) => {
                let _ = writeln!(out, "{pad}{k}:");
                for item in items {
                    let _ = writeln!(out, "{pad}  -");
                    match item {
                        Value::Object(inner) => render_map(inner, indent + 2, out),
                        other => {
                            let _ = writeln!(out, "{pad}    {}", inline(other));
                        }
                    }
                }
            }
            _ => {
                let _ = writeln!(out, "{pad}{k}: {}", inline(v));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig(-2.0 / 3.0 * 1e-20), -6.66666666667e-21);
        assert_eq!(round_sig(0.0), 0.0);
        let mut v = json!({"a": [0.1 + 0.2, 1], "b": {"c": 1e300 / 7.0}});
        round_report(&mut v);
        assert_eq!(v, json!({"a": [0.3, 1], "b": {"c": 1.42857142857e299}}));
    }

    #[test]
    fn text_rendering() {
        let v = json!({"verdict": "true", "per": [{"n": [0, 1]}], "tol": {"eig": 1e-8}});
        let text = render_text(&v);
        assert!(text.contains("verdict: true"));
        assert!(text.contains("    n: [0,1]"));
        assert!(text.contains("  eig: 1e-8"));
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from([
            "dqls", "simulate", "x.json", "--switched", "--tau", "0.5", "--cycles", "3", "--seed", "7",
            "--output", "text",
        ])
        .unwrap();
        assert_eq!(cli.seed, 7);
        assert_eq!(cli.output, OutputFormat::Text);
        match cli.command {
            Command::Simulate(a) => assert!(a.switched && a.tau == 0.5 && a.cycles == 3),
            _ => panic!(),
        }
    }
}
