//! The `nna` command line.
//!
//! ```text
//! nna solve (--matrix PATH | --gen SPEC) [--rhs SPEC] --solver LIST [--tol F]
//!           [--t F]... [--max-iter N] [--k N] [--seed N] [--out DIR]
//!           [--summary-csv PATH] [--no-timing]
//! nna check PATH
//! ```
//!
//! Exit codes: 0 success, 1 a solver did not converge, 2 input or parse error,
//! 3 internal error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use nna_core::baselines::{
    cg_solve, dominance_class, gauss_seidel_solve, gmres_restarted, jacobi_solve, minres_solve, normal_equation_solve,
    Dominance, DominanceClass,
};
use nna_core::embedding::{embed, general_solve};
use nna_core::nna::nna_solve;
use nna_core::{DenseVector, Shift, SolveReport, SolverConfig, SparseMatrix};

use crate::error::IoError;
use crate::generate::{gen_dense_uniform, gen_sparse_random, rng, uniform_solution, ProblemInstance};
use crate::mtx::{read_matrix_market, read_vector};
use crate::trace::{format_f64, write_trace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_CONVERGED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Environment variable overriding the default tolerance (absolute).
pub const TOL_ENV: &str = "NNA_DEFAULT_TOL";

#[derive(Debug, Parser)]
#[command(name = "nna", version, about = "Nonnegative-algorithm sparse solvers and baselines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one or more solvers on a matrix file or a generated instance.
    Solve(Box<SolveArgs>),
    /// Report dimensions, symmetry, diagonal dominance and convergence guarantees.
    Check { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverKind {
    Nna,
    General,
    Jacobi,
    GaussSeidel,
    Cg,
    Gmres,
    Minres,
    NormalCg,
}

impl SolverKind {
    fn name(self) -> &'static str {
        match self {
            SolverKind::Nna => "nna",
            SolverKind::General => "general",
            SolverKind::Jacobi => "jacobi",
            SolverKind::GaussSeidel => "gauss-seidel",
            SolverKind::Cg => "cg",
            SolverKind::Gmres => "gmres",
            SolverKind::Minres => "minres",
            SolverKind::NormalCg => "normal-cg",
        }
    }

    fn uses_shift(self) -> bool {
        matches!(self, SolverKind::Nna | SolverKind::General)
    }

    fn uses_k(self) -> bool {
        matches!(self, SolverKind::Gmres | SolverKind::Minres)
    }
}

#[derive(Debug, clap::Args)]
struct SolveArgs {
    /// Matrix Market file (coordinate real general or symmetric).
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    matrix: Option<PathBuf>,
    /// Generator: `dense-uniform:m=10` or `sparse-random:m=1000,offdiag=5000,diag-hi=100`.
    #[arg(long)]
    gen: Option<String>,
    /// `ones`, `from-solution:uniform`, or a vector file.
    #[arg(long)]
    rhs: Option<String>,
    /// Comma-separated solvers.
    #[arg(long, value_delimiter = ',', required = true)]
    solver: Vec<SolverKind>,
    /// Absolute tolerance on ‖Ax − b‖₂.
    #[arg(long)]
    tol: Option<f64>,
    /// Shift for nna/general; repeat to run several.
    #[arg(long = "t")]
    t: Vec<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Restart length for gmres and minres.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "nna-out")]
    out: PathBuf,
    #[arg(long)]
    summary_csv: Option<PathBuf>,
    /// Write zeros in the elapsed_ns column so traces are byte-reproducible.
    #[arg(long)]
    no_timing: bool,
}

/// A failure with its exit code and a one-line message.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        let code = match &e {
            IoError::Core(c) => core_exit_code(c),
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Input and precondition violations are the caller's fault; a breakdown of an
/// assumed property (definiteness) is non-convergence; anything else is internal.
fn core_exit_code(e: &nna_core::Error) -> i32 {
    use nna_core::Error::*;
    match e {
        IndexOutOfRange { .. }
        | NonFiniteValue(_)
        | DimensionMismatch { .. }
        | NotSquare { .. }
        | ZeroDiagonal(_)
        | NotSymmetric
        | NegativeEntry { .. }
        | NegativeInput(_)
        | ZeroColumn(_)
        | NonPositiveRhs(_)
        | UnshiftableRow(_)
        | NonPositiveStart(_)
        | InvalidConfig(_) => EXIT_INPUT,
        IndefiniteBreakdown { .. } => EXIT_NOT_CONVERGED,
        _ => EXIT_INTERNAL,
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(&args, out, err),
        Command::Check { path } => cmd_check(&path, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn parse_kv(body: &str) -> Result<BTreeMap<String, String>, Failure> {
    let mut map = BTreeMap::new();
    for part in body.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Failure::input(format!("generator option {part:?} is not key=value")))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn take<T: std::str::FromStr>(map: &mut BTreeMap<String, String>, key: &str) -> Result<Option<T>, Failure> {
    match map.remove(key) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| Failure::input(format!("invalid value {v:?} for {key}"))),
    }
}

fn generate(spec: &str, seed: u64) -> Result<ProblemInstance, Failure> {
    let (kind, body) = spec.split_once(':').unwrap_or((spec, ""));
    let mut opts = parse_kv(body)?;
    let m: usize = take(&mut opts, "m")?.ok_or_else(|| Failure::input("generator needs m=<size>"))?;
    if m == 0 {
        return Err(Failure::input("generator size m must be at least 1"));
    }
    let inst = match kind {
        "dense-uniform" => gen_dense_uniform(m, seed),
        "sparse-random" => {
            let offdiag = take(&mut opts, "offdiag")?.unwrap_or(5 * m);
            let diag_hi = take(&mut opts, "diag-hi")?.unwrap_or(100.0);
            gen_sparse_random(m, offdiag, diag_hi, seed)?
        }
        other => return Err(Failure::input(format!("unknown generator {other:?}"))),
    };
    if let Some(k) = opts.keys().next() {
        return Err(Failure::input(format!("unknown generator option {k:?}")));
    }
    Ok(inst)
}

struct Problem {
    a: SparseMatrix,
    b: DenseVector,
    x_star: Option<DenseVector>,
    descriptor: String,
}

fn load_problem(args: &SolveArgs) -> Result<Problem, Failure> {
    let (a, b, x_star, mut descriptor) = match (&args.matrix, &args.gen) {
        (Some(path), _) => {
            let a = read_matrix_market(path)?;
            let b = DenseVector::ones(a.nrows());
            (a, b, None, format!("matrix={}", path.display()))
        }
        (None, Some(spec)) => {
            let inst = generate(spec, args.seed)?;
            (inst.a, inst.b, inst.x_star, inst.descriptor)
        }
        (None, None) => return Err(Failure::input("one of --matrix or --gen is required")),
    };
    let (b, x_star) = match args.rhs.as_deref() {
        None => (b, x_star),
        Some("ones") => (DenseVector::ones(a.nrows()), None),
        Some("from-solution:uniform") => {
            let x = uniform_solution(&mut rng(args.seed), a.ncols());
            let b = a.spmv(&x).map_err(IoError::from)?;
            (b, Some(x))
        }
        Some(path) => {
            let b = read_vector(path)?;
            if b.len() != a.nrows() {
                return Err(Failure::input(format!(
                    "right-hand side has {} entries, matrix has {} rows",
                    b.len(),
                    a.nrows()
                )));
            }
            (b, None)
        }
    };
    if let Some(r) = &args.rhs {
        let _ = write!(descriptor, " rhs={r}");
    }
    Ok(Problem {
        a,
        b,
        x_star,
        descriptor,
    })
}

fn monotonic_ns() -> u64 {
    static START: OnceLock<Instant> = OnceLock::new();
    START.get_or_init(Instant::now).elapsed().as_nanos() as u64
}

fn base_config(args: &SolveArgs) -> Result<SolverConfig, Failure> {
    let eps_tol = match args.tol {
        Some(t) => Some(t),
        None => match std::env::var(TOL_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse()
                    .map_err(|_| Failure::input(format!("{TOL_ENV}={v:?} is not a number")))?,
            ),
            Err(_) => None,
        },
    };
    let mut cfg = SolverConfig {
        eps_tol,
        ..SolverConfig::default()
    };
    if let Some(t) = cfg.eps_tol {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Failure::input("tolerance must be positive"));
        }
    }
    if let Some(n) = args.max_iter {
        cfg.max_iter = n;
    }
    if !args.no_timing {
        cfg.clock = Some(monotonic_ns);
    }
    Ok(cfg)
}

/// Per-iteration floating-point budget from the operation counts of each method.
pub fn per_step_flops(kind: SolverKind, a: &SparseMatrix, k: usize) -> f64 {
    let n = a.nnz() as f64;
    let (m1, m2) = (a.nrows() as f64, a.ncols() as f64);
    let k = k.max(1) as f64;
    match kind {
        SolverKind::Nna => 4.0 * n + m1 + m2,
        SolverKind::General => {
            let j = embed(a, &vec![0.0; a.nrows()]).map_or(0, |e| e.j()) as f64;
            4.0 * (n + 2.0 * j) + m1 + m2 + 2.0 * j
        }
        SolverKind::Jacobi | SolverKind::GaussSeidel => 2.0 * (n + m1),
        SolverKind::Cg => 2.0 * n + 12.0 * m1,
        SolverKind::Gmres => (2.0 * k * n + (2.0 * k * k + 7.0 * k + 1.0) * m1) / k,
        SolverKind::Minres => 2.0 * n + 9.0 * m1,
        SolverKind::NormalCg => 4.0 * n + 6.0 * m2 + 4.0 * m1,
    }
}

struct Row {
    name: String,
    status: String,
    iterations: usize,
    residual: f64,
    matvecs: u64,
    wall_ms: f64,
    flops: f64,
    err_inf: Option<f64>,
}

fn run_one(kind: SolverKind, p: &Problem, cfg: &SolverConfig, k: usize) -> nna_core::Result<SolveReport> {
    let (a, b) = (&p.a, p.b.as_slice());
    match kind {
        SolverKind::Nna => nna_solve(a, b, None, cfg),
        SolverKind::General => general_solve(a, b, None, cfg),
        SolverKind::Jacobi => jacobi_solve(a, b, None, cfg),
        SolverKind::GaussSeidel => gauss_seidel_solve(a, b, None, cfg),
        SolverKind::Cg => cg_solve(a, b, None, cfg),
        SolverKind::Gmres => gmres_restarted(a, b, None, k, cfg),
        SolverKind::Minres => minres_solve(a, b, None, k, cfg),
        SolverKind::NormalCg => normal_equation_solve(a, b, None, cfg),
    }
}

fn shift_label(t: f64) -> String {
    format!("{t}")
}

fn cmd_solve(args: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let needs_k = args.solver.iter().any(|s| s.uses_k());
    let k = match (needs_k, args.k) {
        (true, Some(0)) => return Err(Failure::input("--k must be at least 1")),
        (true, Some(k)) => k,
        (true, None) => return Err(Failure::input("--k is required for gmres and minres")),
        (false, Some(_)) => return Err(Failure::input("--k only applies to gmres and minres")),
        (false, None) => 0,
    };
    if !args.t.is_empty() && !args.solver.iter().any(|s| s.uses_shift()) {
        return Err(Failure::input("--t only applies to nna and general"));
    }
    if let Some(t) = args.t.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
        return Err(Failure::input(format!("shift {t} must be finite and nonnegative")));
    }
    let base = base_config(args)?;
    let problem = load_problem(args)?;
    std::fs::create_dir_all(&args.out).map_err(|e| Failure {
        code: EXIT_INTERNAL,
        message: format!("cannot create {}: {e}", args.out.display()),
    })?;

    let mut runs: Vec<(String, SolverKind, SolverConfig)> = Vec::new();
    for &kind in &args.solver {
        if kind.uses_shift() && !args.t.is_empty() {
            for &t in &args.t {
                let cfg = base.with_shift(Shift::Fixed(t));
                runs.push((format!("{}_t{}", kind.name(), shift_label(t)), kind, cfg));
            }
        } else {
            runs.push((kind.name().to_string(), kind, base));
        }
    }

    let mut code = EXIT_OK;
    let mut rows = Vec::new();
    for (name, kind, cfg) in runs {
        let started = Instant::now();
        let result = run_one(kind, &problem, &cfg, k);
        let wall_ms = started.elapsed().as_secs_f64() * 1e3;
        match result {
            Ok(report) => {
                let path = args.out.join(format!("{name}.csv"));
                write_trace(&report, &path).map_err(|e| Failure {
                    code: EXIT_INTERNAL,
                    message: format!("cannot write {}: {e}", path.display()),
                })?;
                if !report.status.is_success() {
                    code = code.max(EXIT_NOT_CONVERGED);
                }
                let err_inf = problem.x_star.as_ref().map(|xs| {
                    xs.iter()
                        .zip(report.x.iter())
                        .map(|(p, q)| (p - q).abs())
                        .fold(0.0, f64::max)
                });
                rows.push(Row {
                    status: status_label(&report),
                    iterations: report.iterations,
                    residual: report.final_residual(),
                    matvecs: report.total_matvecs(),
                    wall_ms,
                    flops: report.iterations as f64 * per_step_flops(kind, &problem.a, k),
                    err_inf,
                    name,
                });
            }
            Err(e) => {
                let _ = writeln!(err, "error: {name}: {e}");
                code = code.max(core_exit_code(&e));
                rows.push(Row {
                    name,
                    status: "Error".into(),
                    iterations: 0,
                    residual: f64::NAN,
                    matvecs: 0,
                    wall_ms,
                    flops: 0.0,
                    err_inf: None,
                });
            }
        }
    }

    let _ = writeln!(out, "# {}", problem.descriptor);
    let _ = writeln!(
        out,
        "# m1={} m2={} nnz={} tol={}",
        problem.a.nrows(),
        problem.a.ncols(),
        problem.a.nnz(),
        format_f64(base.tolerance_for(&problem.b))
    );
    let _ = out.write_all(summary_table(&rows).as_bytes());
    if let Some(path) = &args.summary_csv {
        write_summary_csv(path, &rows).map_err(|e| Failure {
            code: EXIT_INTERNAL,
            message: format!("cannot write {}: {e}", path.display()),
        })?;
    }
    Ok(code)
}

fn status_label(r: &SolveReport) -> String {
    match &r.status {
        nna_core::Status::Breakdown(b) => {
            let kind = format!("{b:?}");
            let kind = kind.split([' ', '(', '{']).next().unwrap_or_default().to_string();
            format!("Breakdown({kind})")
        }
        s => s.name().to_string(),
    }
}

const COLUMNS: [&str; 8] = [
    "solver",
    "status",
    "iterations",
    "final_residual",
    "matvecs",
    "wall_ms",
    "flops_estimate",
    "err_inf",
];

fn cells(r: &Row) -> [String; 8] {
    [
        r.name.clone(),
        r.status.clone(),
        r.iterations.to_string(),
        format!("{:.6e}", r.residual),
        r.matvecs.to_string(),
        format!("{:.3}", r.wall_ms),
        format!("{:.3e}", r.flops),
        r.err_inf.map_or_else(|| "-".into(), |e| format!("{e:.3e}")),
    ]
}

fn summary_table(rows: &[Row]) -> String {
    let body: Vec<[String; 8]> = rows.iter().map(cells).collect();
    let mut width: Vec<usize> = COLUMNS.iter().map(|c| c.len()).collect();
    for r in &body {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let mut s = String::new();
    let line = |s: &mut String, cols: &[&str]| {
        let parts: Vec<String> = cols
            .iter()
            .zip(&width)
            .enumerate()
            .map(|(i, (c, w))| if i < 2 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        let _ = writeln!(s, "{}", parts.join("  ").trim_end());
    };
    line(&mut s, &COLUMNS);
    for r in &body {
        let refs: Vec<&str> = r.iter().map(String::as_str).collect();
        line(&mut s, &refs);
    }
    s
}

fn write_summary_csv(path: &std::path::Path, rows: &[Row]) -> Result<(), IoError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(COLUMNS)?;
    for r in rows {
        let mut c = cells(r);
        c[3] = format_f64(r.residual);
        w.write_record(&c)?;
    }
    w.flush()?;
    Ok(())
}

/// Which solvers carry a convergence guarantee for this matrix.
///
/// Positive definiteness is certified by sufficient conditions only: a
/// symmetric matrix with positive diagonal that is strictly or irreducibly
/// dominant is SPD, and `A` is positive definite when its symmetric part is.
pub fn guarantees(a: &SparseMatrix, class: &DominanceClass) -> Result<Vec<&'static str>, nna_core::Error> {
    let positive_diag = a.diagonal().iter().all(|&d| d > 0.0);
    let dd = class.guarantees_stationary();
    let spd = class.symmetric && positive_diag && dd;
    let sym_part = dominance_class(&a.symmetric_part()?)?;
    let pd = positive_diag && sym_part.guarantees_stationary();
    let nonsingular = dd;
    let mut g = vec![if a.is_nonnegative() {
        "nna"
    } else {
        "nna (via embedding)"
    }];
    if dd {
        g.push("jacobi");
    }
    if dd || spd {
        g.push("gauss-seidel");
    }
    if spd {
        g.push("cg");
    }
    if pd {
        g.push("gmres");
    }
    if class.symmetric {
        g.push("minres");
    }
    if nonsingular {
        g.push("normal-cg");
    }
    Ok(g)
}

fn cmd_check(path: &std::path::Path, out: &mut dyn Write) -> Result<i32, Failure> {
    let a = read_matrix_market(path)?;
    let class = dominance_class(&a).map_err(IoError::from)?;
    let g = guarantees(&a, &class).map_err(IoError::from)?;
    let class_name = match class.class {
        Dominance::StrictlyDominant => "StrictlyDominant",
        Dominance::IrreduciblyDominant => "IrreduciblyDominant",
        Dominance::WeaklyDominant => "WeaklyDominant",
        Dominance::NotDominant => "NotDominant",
    };
    let _ = writeln!(out, "dimensions: {} x {}", a.nrows(), a.ncols());
    let _ = writeln!(out, "nnz: {}", a.nnz());
    let _ = writeln!(out, "symmetric: {}", if class.symmetric { "yes" } else { "no" });
    let _ = writeln!(out, "dominance: {class_name}");
    let all = g.len() == 7;
    let _ = writeln!(
        out,
        "guaranteed: {}",
        if all { "all".to_string() } else { g.join(", ") }
    );
    if let Some(j) = a.diagonal().iter().position(|&d| d == 0.0) {
        let _ = writeln!(
            out,
            "warning: ZeroDiagonal at row {}; jacobi and gauss-seidel do not apply",
            j + 1
        );
    }
    Ok(EXIT_OK)
}
