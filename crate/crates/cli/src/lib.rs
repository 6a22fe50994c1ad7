//! The `frackit` command line: every library operation as a subcommand that
//! writes CSV.
//!
//! Exit codes: 0 on success, 1 on a numerical failure, 2 on a usage error.
//! Output is assembled in memory and written only once the computation has
//! succeeded, so a failed run never leaves a partial file behind.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use frackit::expr::FuncSpec;
use frackit::fde::{solve, FdeProblem};
use frackit::gronwall::{
    comparison_bound, series_bound, GronwallQuery, DEFAULT_EPS, DEFAULT_K_MAX,
};
use frackit::operators::{evaluate_many, ibp_terms, OperatorKind};
use frackit::specfun::ml;
use frackit::{Domain, Error, OrderParams, Side, WGrid};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("usage error: {flag}: {message}")]
    Usage { flag: &'static str, message: String },
    #[error("{}/{}: {0}", .0.module(), .0.category())]
    Numeric(#[from] Error),
    #[error("cannot write {path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } => 2,
            CliError::Numeric(_) | CliError::Io { .. } => 1,
        }
    }
}

fn usage(flag: &'static str, message: impl Into<String>) -> CliError {
    CliError::Usage {
        flag,
        message: message.into(),
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "frackit",
    version,
    about = "Caputo-Katugampola fractional calculus, printed as CSV"
)]
struct Cli {
    /// Write the CSV here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Katugampola fractional integral of an expression in t.
    Integral(OperatorArgs),
    /// Caputo-Katugampola (or Riemann-Liouville type) fractional derivative.
    Deriv(DerivArgs),
    /// Mittag-Leffler function E_alpha(z).
    Ml(MlArgs),
    /// Solve the initial-value problem D^{alpha,rho} x = f(t, x).
    Solve(SolveArgs),
    /// Gronwall bound for u <= v + g Gamma(alpha) I^{alpha,rho} u.
    Gronwall(GronwallArgs),
    /// Solve two problems and compare |x - y| with the Gronwall certificate.
    Compare(CompareArgs),
    /// Both sides of the integration-by-parts formula.
    IbpCheck(IbpArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Caputo,
    Rl,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormArg {
    Series,
    Ml,
}

#[derive(Debug, Args)]
struct OrderFlags {
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    rho: f64,
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, allow_negative_numbers = true)]
    b: f64,
    /// Number of grid cells, uniform in w = t^rho.
    #[arg(long, default_value_t = 1024)]
    n_grid: usize,
}

#[derive(Debug, Args)]
struct PointFlags {
    /// A single evaluation point.
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    /// Start of an evenly spaced sweep in t.
    #[arg(long, allow_negative_numbers = true)]
    t_from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_to: Option<f64>,
    /// Number of intervals in the sweep (t_steps + 1 points).
    #[arg(long)]
    t_steps: Option<usize>,
}

#[derive(Debug, Args)]
struct OperatorArgs {
    /// Expression in t.
    #[arg(long, allow_hyphen_values = true)]
    expr: String,
    #[command(flatten)]
    order: OrderFlags,
    #[command(flatten)]
    points: PointFlags,
    #[arg(long, value_enum, default_value_t = SideArg::Left)]
    side: SideArg,
}

#[derive(Debug, Args)]
struct DerivArgs {
    #[command(flatten)]
    op: OperatorArgs,
    #[arg(long, value_enum, default_value_t = KindArg::Caputo)]
    kind: KindArg,
}

#[derive(Debug, Args)]
struct MlArgs {
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    z: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    z_from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    z_to: Option<f64>,
    #[arg(long)]
    z_steps: Option<usize>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Right-hand side f(t, x).
    #[arg(long, allow_hyphen_values = true)]
    f: String,
    #[command(flatten)]
    order: OrderFlags,
    /// Initial modified derivatives x_(k)(a), comma separated, one per k < ceil(alpha).
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        required = true
    )]
    init: Vec<f64>,
}

#[derive(Debug, Args)]
struct GronwallArgs {
    #[arg(long, allow_hyphen_values = true)]
    v: String,
    #[arg(long, allow_hyphen_values = true)]
    g: String,
    /// Optional u, reported next to the bounds.
    #[arg(long, allow_hyphen_values = true)]
    u: Option<String>,
    #[command(flatten)]
    order: OrderFlags,
    #[arg(long, value_enum, default_value_t = SideArg::Left)]
    side: SideArg,
    #[arg(long, value_enum, default_value_t = FormArg::Series)]
    form: FormArg,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps: f64,
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    k_max: usize,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Right-hand side of the first problem.
    #[arg(long, allow_hyphen_values = true)]
    f: String,
    /// Right-hand side of the second problem; defaults to f.
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
    #[command(flatten)]
    order: OrderFlags,
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        required = true
    )]
    init_x: Vec<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        required = true
    )]
    init_y: Vec<f64>,
    /// Lipschitz constant of g in its state argument.
    #[arg(long)]
    lipschitz: f64,
    /// Bound on |f - g| along the first solution; defaults to 0.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    psi: String,
}

#[derive(Debug, Args)]
struct IbpArgs {
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    #[arg(long, allow_hyphen_values = true)]
    y: String,
    #[command(flatten)]
    order: OrderFlags,
}

/// Shortest round-trip decimal, switching to exponent notation for very
/// small or very large magnitudes.
fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn finite(flag: &'static str, v: f64) -> CliResult<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(usage(flag, format!("expected a finite number, got {v}")))
    }
}

fn parse_expr(flag: &'static str, text: &str) -> CliResult<FuncSpec> {
    FuncSpec::parse(text).map_err(|e| usage(flag, e.to_string()))
}

fn expr_of_t(flag: &'static str, text: &str) -> CliResult<FuncSpec> {
    let f = parse_expr(flag, text)?;
    if !f.is_function_of_t() {
        return Err(usage(flag, "expected an expression in t only"));
    }
    Ok(f)
}

struct Setup {
    params: OrderParams,
    domain: Domain,
    n: usize,
}

impl OrderFlags {
    /// `fractional` rejects integer orders, as derivatives require.
    fn setup(&self, side: Side, fractional: bool) -> CliResult<Setup> {
        let alpha = finite("--alpha", self.alpha)?;
        let rho = finite("--rho", self.rho)?;
        let (a, b) = (finite("--a", self.a)?, finite("--b", self.b)?);
        if rho <= 0.0 {
            return Err(usage("--rho", format!("must be positive, got {rho}")));
        }
        let params = if fractional {
            OrderParams::new(alpha, rho, side)
        } else {
            OrderParams::kernel(alpha, rho, side)
        }
        .map_err(|e| usage("--alpha", e.to_string()))?;
        let domain = Domain::new(a, b).map_err(|e| usage("--a/--b", e.to_string()))?;
        if self.n_grid < 2 {
            return Err(usage(
                "--n-grid",
                format!("must be at least 2, got {}", self.n_grid),
            ));
        }
        Ok(Setup {
            params,
            domain,
            n: self.n_grid,
        })
    }
}

fn sweep(
    flags: (&'static str, &'static str, &'static str, &'static str),
    single: Option<f64>,
    from: Option<f64>,
    to: Option<f64>,
    steps: Option<usize>,
) -> CliResult<Vec<f64>> {
    let (f_one, f_from, f_to, f_steps) = flags;
    match (single, from, to, steps) {
        (Some(t), None, None, None) => Ok(vec![finite(f_one, t)?]),
        (None, Some(lo), Some(hi), Some(k)) => {
            let (lo, hi) = (finite(f_from, lo)?, finite(f_to, hi)?);
            if k == 0 {
                return Err(usage(f_steps, "must be at least 1"));
            }
            let mut ts: Vec<f64> = (0..=k)
                .map(|i| lo + (hi - lo) * i as f64 / k as f64)
                .collect();
            ts[k] = hi;
            Ok(ts)
        }
        (Some(_), _, _, _) => Err(usage(
            f_one,
            format!("cannot be combined with {f_from}/{f_to}/{f_steps}"),
        )),
        _ => Err(usage(
            f_one,
            format!("give either {f_one} or all of {f_from}, {f_to}, {f_steps}"),
        )),
    }
}

fn check_points(ts: &[f64], dom: &Domain) -> CliResult<()> {
    match ts.iter().find(|t| !dom.contains(**t)) {
        Some(t) => Err(usage(
            "--t",
            format!("{t} lies outside [{}, {}]", dom.a(), dom.b()),
        )),
        None => Ok(()),
    }
}

fn operator(args: &OperatorArgs, kind: OperatorKind, fractional: bool) -> CliResult<String> {
    let s = args.order.setup(args.side.into(), fractional)?;
    let x = expr_of_t("--expr", &args.expr)?;
    let p = &args.points;
    let ts = sweep(
        ("--t", "--t-from", "--t-to", "--t-steps"),
        p.t,
        p.t_from,
        p.t_to,
        p.t_steps,
    )?;
    check_points(&ts, &s.domain)?;
    let res = evaluate_many(kind, &x, &s.params, &s.domain, &ts, s.n)?;
    let mut out = String::from("t,value,est_error\n");
    for (t, r) in ts.iter().zip(res) {
        writeln!(out, "{},{},{}", num(*t), num(r.value), num(r.est_error)).unwrap();
    }
    Ok(out)
}

fn run_ml(args: &MlArgs) -> CliResult<String> {
    let alpha = finite("--alpha", args.alpha)?;
    let zs = sweep(
        ("--z", "--z-from", "--z-to", "--z-steps"),
        args.z,
        args.z_from,
        args.z_to,
        args.z_steps,
    )?;
    let mut out = String::from("z,value\n");
    for z in zs {
        writeln!(out, "{},{}", num(z), num(ml(alpha, z)?)).unwrap();
    }
    Ok(out)
}

fn fde_problem(
    flag: &'static str,
    f: &str,
    s: &Setup,
    init: &[f64],
    init_flag: &'static str,
) -> CliResult<FdeProblem> {
    let f = parse_expr(flag, f)?;
    for &c in init {
        finite(init_flag, c)?;
    }
    FdeProblem::new(s.params, s.domain, f, init.to_vec())
        .map_err(|e| usage(init_flag, e.to_string()))
}

fn run_solve(args: &SolveArgs, diag: &mut dyn Write) -> CliResult<String> {
    let s = args.order.setup(Side::Left, false)?;
    let prob = fde_problem("--f", &args.f, &s, &args.init, "--init")?;
    let sol = solve(&prob, s.n)?;
    let _ = writeln!(diag, "residual_norm = {:e}", sol.residual_norm);
    let mut out = String::from("t,x\n");
    for (t, x) in sol.grid.t_nodes().iter().zip(&sol.values) {
        writeln!(out, "{},{}", num(*t), num(*x)).unwrap();
    }
    Ok(out)
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn run_gronwall(args: &GronwallArgs) -> CliResult<String> {
    let s = args.order.setup(args.side.into(), false)?;
    let v = expr_of_t("--v", &args.v)?;
    let g = expr_of_t("--g", &args.g)?;
    let u = args.u.as_deref().map(|u| expr_of_t("--u", u)).transpose()?;
    let grid = WGrid::new(s.domain, s.params.rho(), s.n)?;
    let q = GronwallQuery::new(u.as_ref(), &v, &g, s.params, s.domain, grid.clone())?;
    let (series, k_terms, ml_vals) = match args.form {
        FormArg::Series => {
            let r = series_bound(&q, finite("--eps", args.eps)?, args.k_max)?;
            (
                Some(r.bound_values),
                Some(r.k_terms_used),
                r.ml_bound_values,
            )
        }
        FormArg::Ml => (None, None, Some(frackit::gronwall::ml_bound(&q)?)),
    };
    let mut out = String::from("t,u,bound_series,bound_ml,K_terms\n");
    for (i, t) in grid.t_nodes().iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{},{}",
            num(*t),
            opt(q.u().map(|u| u[i])),
            opt(series.as_ref().map(|b| b[i])),
            opt(ml_vals.as_ref().map(|b| b[i])),
            k_terms
                .as_ref()
                .map(|k| k[i].to_string())
                .unwrap_or_default()
        )
        .unwrap();
    }
    Ok(out)
}

fn run_compare(args: &CompareArgs, diag: &mut dyn Write) -> CliResult<String> {
    let s = args.order.setup(Side::Left, false)?;
    let c = finite("--lipschitz", args.lipschitz)?;
    if c < 0.0 {
        return Err(usage("--lipschitz", "must be nonnegative"));
    }
    let px = fde_problem("--f", &args.f, &s, &args.init_x, "--init-x")?;
    let py = fde_problem(
        "--g",
        args.g.as_deref().unwrap_or(&args.f),
        &s,
        &args.init_y,
        "--init-y",
    )?;
    let psi = expr_of_t("--psi", &args.psi)?;
    let (sx, sy) = (solve(&px, s.n)?, solve(&py, s.n)?);
    let gaps: Vec<f64> = args
        .init_x
        .iter()
        .zip(&args.init_y)
        .map(|(x, y)| (x - y).abs())
        .collect();
    let r = comparison_bound(c, &psi, &gaps, &s.params, &s.domain, &sx.grid)?;
    let mut out = String::from("t,x,y,abs_diff,bound,K_terms\n");
    let mut violations = 0;
    for (i, t) in sx.grid.t_nodes().iter().enumerate() {
        let d = (sx.values[i] - sy.values[i]).abs();
        if d > r.bound_values[i] + 1e-8 {
            violations += 1;
        }
        writeln!(
            out,
            "{},{},{},{},{},{}",
            num(*t),
            num(sx.values[i]),
            num(sy.values[i]),
            num(d),
            num(r.bound_values[i]),
            r.k_terms_used[i]
        )
        .unwrap();
    }
    let _ = writeln!(diag, "nodes above the bound: {violations}");
    Ok(out)
}

fn run_ibp(args: &IbpArgs) -> CliResult<String> {
    let s = args.order.setup(Side::Left, true)?;
    let x = expr_of_t("--x", &args.x)?;
    let y = expr_of_t("--y", &args.y)?;
    let r = ibp_terms(&x, &y, &s.params, &s.domain, s.n)?;
    Ok(format!(
        "lhs,rhs,residual\n{},{},{}\n",
        num(r.lhs),
        num(r.rhs),
        num(r.residual)
    ))
}

fn execute(cli: &Cli, diag: &mut dyn Write) -> CliResult<String> {
    match &cli.command {
        Command::Integral(a) => operator(a, OperatorKind::Integral, false),
        Command::Deriv(d) => {
            let kind = match d.kind {
                KindArg::Caputo => OperatorKind::Caputo,
                KindArg::Rl => OperatorKind::RiemannLiouville,
            };
            operator(&d.op, kind, true)
        }
        Command::Ml(a) => run_ml(a),
        Command::Solve(a) => run_solve(a, diag),
        Command::Gronwall(a) => run_gronwall(a),
        Command::Compare(a) => run_compare(a, diag),
        Command::IbpCheck(a) => run_ibp(a),
    }
}

/// Runs the command line `argv` (program name first), writing CSV to `out`
/// (or the `--output` file) and diagnostics to `diag`. Returns the exit code.
pub fn run_with<I, S>(argv: I, out: &mut dyn Write, diag: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = diag.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let result = execute(&cli, diag).and_then(|csv| match &cli.output {
        Some(path) => std::fs::write(path, csv).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => out.write_all(csv.as_bytes()).map_err(|e| CliError::Io {
            path: "<stdout>".into(),
            message: e.to_string(),
        }),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(diag, "frackit: {e}");
            e.exit_code()
        }
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
