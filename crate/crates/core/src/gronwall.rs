//! Computable forms of the fractional Gronwall inequality.
//!
//! From `u ≤ v + g(t)Γ(α)·𝓘^{α,ρ}u` one gets
//! `u ≤ v + Σ_{k≥1} (g(t)Γ(α))^k 𝓘^{kα,ρ}v`, and for monotone `v` the
//! closed form `u ≤ v(t)·E_α(g(t)Γ(α)(d/ρ)^α)` with `d = t^ρ − a^ρ` (left)
//! or `b^ρ − t^ρ` (right). Everything is evaluated on the nodes of a
//! [`WGrid`]; each iterated kernel is one product-integration sweep.

use crate::closed_forms::taylor_polynomial;
use crate::error::{Error, Result};
use crate::expr::FuncSpec;
use crate::mesh::{Domain, WGrid};
use crate::operators::{integral_sweep, OrderParams, Side};
use crate::specfun::{gamma, ml};

pub const DEFAULT_EPS: f64 = 1e-12;
pub const DEFAULT_K_MAX: usize = 200;

/// Slack used when comparing neighbouring node values for monotonicity.
const TIE_TOL: f64 = 1e-12;
/// A truncated series is rejected when its tail exceeds this fraction of the bound.
const TAIL_TOL: f64 = 1e-8;
/// Slack of the hypothesis check.
const HYPOTHESIS_SLACK: f64 = 1e-10;

/// Inputs of the inequality, sampled on `grid`.
///
/// `u` is only needed by [`check_hypothesis`].
#[derive(Debug, Clone)]
pub struct GronwallQuery {
    params: OrderParams,
    grid: WGrid,
    u: Option<Vec<f64>>,
    v: Vec<f64>,
    g: Vec<f64>,
}

fn sample(f: &FuncSpec, grid: &WGrid, name: &str) -> Result<Vec<f64>> {
    let vals = grid
        .t_nodes()
        .iter()
        .map(|&t| f.eval(t))
        .collect::<Result<Vec<_>>>()?;
    if let Some(i) = vals.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(format!(
            "{name} is not finite at node {i}"
        )));
    }
    if let Some(i) = vals.iter().position(|&x| x < 0.0) {
        return Err(Error::Domain(format!(
            "{name} must be nonnegative, {name}(t_{i}) = {}",
            vals[i]
        )));
    }
    Ok(vals)
}

/// True when `vals` never decreases (`Side::Left`) or never increases
/// (`Side::Right`) from one node to the next, up to a 1e-12 tie tolerance.
fn is_monotone(vals: &[f64], side: Side) -> bool {
    vals.windows(2).all(|q| {
        let tol = TIE_TOL * q[0].abs().max(1.0);
        match side {
            Side::Left => q[1] >= q[0] - tol,
            Side::Right => q[1] <= q[0] + tol,
        }
    })
}

fn direction(side: Side) -> &'static str {
    match side {
        Side::Left => "nondecreasing",
        Side::Right => "nonincreasing",
    }
}

impl GronwallQuery {
    /// Samples the functions on `grid` and checks nonnegativity of `u`, `v`,
    /// `g` and the monotonicity of `g` required by the chosen side.
    pub fn new(
        u: Option<&FuncSpec>,
        v: &FuncSpec,
        g: &FuncSpec,
        params: OrderParams,
        domain: Domain,
        grid: WGrid,
    ) -> Result<Self> {
        if grid.domain() != domain || grid.rho() != params.rho() {
            return Err(Error::Domain(format!(
                "grid over [{}, {}] with rho = {} does not match domain [{}, {}] and rho = {}",
                grid.domain().a(),
                grid.domain().b(),
                grid.rho(),
                domain.a(),
                domain.b(),
                params.rho()
            )));
        }
        let u = u.map(|u| sample(u, &grid, "u")).transpose()?;
        let v = sample(v, &grid, "v")?;
        let g = sample(g, &grid, "g")?;
        Self::from_values(u, v, g, params, grid)
    }

    /// Same as [`GronwallQuery::new`] with values already on the nodes.
    pub fn from_values(
        u: Option<Vec<f64>>,
        v: Vec<f64>,
        g: Vec<f64>,
        params: OrderParams,
        grid: WGrid,
    ) -> Result<Self> {
        let m = grid.cells() + 1;
        for (name, vals) in [
            ("u", u.as_deref()),
            ("v", Some(&v[..])),
            ("g", Some(&g[..])),
        ] {
            let Some(vals) = vals else { continue };
            if vals.len() != m {
                return Err(Error::Domain(format!(
                    "{name} needs {m} node values, got {}",
                    vals.len()
                )));
            }
            if let Some(i) = vals.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(Error::Domain(format!(
                    "{name} must be finite and nonnegative, {name}(t_{i}) = {}",
                    vals[i]
                )));
            }
        }
        if !is_monotone(&g, params.side()) {
            return Err(Error::Monotonicity(format!(
                "g must be {} on the grid",
                direction(params.side())
            )));
        }
        Ok(GronwallQuery {
            params,
            grid,
            u,
            v,
            g,
        })
    }

    pub fn params(&self) -> &OrderParams {
        &self.params
    }

    pub fn grid(&self) -> &WGrid {
        &self.grid
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn u(&self) -> Option<&[f64]> {
        self.u.as_deref()
    }

    /// Whether `v` is monotone in the direction the closed form needs.
    pub fn monotonic_v(&self) -> bool {
        is_monotone(&self.v, self.params.side())
    }
}

/// The series bound per node, with truncation diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub bound_values: Vec<f64>,
    /// Number of series terms summed at each node.
    pub k_terms_used: Vec<usize>,
    /// Largest geometric tail estimate over the nodes.
    pub series_tail_estimate: f64,
    pub monotonic_v: bool,
    /// The Mittag-Leffler form, present when `v` is monotone.
    pub ml_bound_values: Option<Vec<f64>>,
}

/// Per node: does `u ≤ v + g·Γ(α)·𝓘^{α,ρ}u + 1e-10` hold?
///
/// The integral is the product-trapezoid rule on the grid.
pub fn check_hypothesis(q: &GronwallQuery) -> Result<Vec<bool>> {
    let u =
        q.u.as_ref()
            .ok_or_else(|| Error::Domain("hypothesis check needs u".into()))?;
    let ga = gamma(q.params.alpha())?;
    let iu = integral_sweep(u, &q.grid, q.params.alpha(), q.params.side(), 0.0);
    Ok((0..u.len())
        .map(|i| u[i] <= q.v[i] + q.g[i] * ga * iu[i] + HYPOTHESIS_SLACK)
        .collect())
}

/// `v + Σ_k (gΓ(α))^k 𝓘^{kα,ρ}v` per node.
///
/// At each node the sum stops after the first term below
/// `eps · accumulated bound` (with the terms already shrinking), or at
/// `k_max`. Fails with [`Error::Truncation`] when a node still has a
/// geometric tail estimate above 1e-8 of its bound at `k_max`.
pub fn series_bound(q: &GronwallQuery, eps: f64, k_max: usize) -> Result<BoundReport> {
    let (bound_values, k_terms_used, series_tail_estimate) =
        series(&q.v, &q.g, &q.params, &q.grid, eps, k_max)?;
    let monotonic_v = q.monotonic_v();
    let ml_bound_values = if monotonic_v {
        Some(ml_values(q)?)
    } else {
        None
    };
    Ok(BoundReport {
        bound_values,
        k_terms_used,
        series_tail_estimate,
        monotonic_v,
        ml_bound_values,
    })
}

fn series(
    v: &[f64],
    g: &[f64],
    p: &OrderParams,
    grid: &WGrid,
    eps: f64,
    k_max: usize,
) -> Result<(Vec<f64>, Vec<usize>, f64)> {
    if !(eps > 0.0) || k_max == 0 {
        return Err(Error::Domain(format!(
            "need eps > 0 and K_max >= 1, got {eps} and {k_max}"
        )));
    }
    let m = v.len();
    let mut bound = v.to_vec();
    let mut used = vec![0usize; m];
    let mut tails = vec![0.0f64; m];
    let g_max = g.iter().copied().fold(0.0, f64::max);
    if g_max == 0.0 || v.iter().all(|&x| x == 0.0) {
        return Ok((bound, used, 0.0));
    }
    let alpha = p.alpha();
    let c = g_max * gamma(alpha)?;
    let ratio: Vec<f64> = g.iter().map(|gi| gi / g_max).collect();
    let mut prev = vec![0.0f64; m];
    let mut active = vec![true; m];
    for k in 1..=k_max {
        let kf = k as f64;
        // (g_max Γ(α))^k folded into the weights so large k neither over- nor underflows
        let sweep = integral_sweep(v, grid, kf * alpha, p.side(), kf * c.ln());
        for i in 0..m {
            if !active[i] {
                continue;
            }
            let term = sweep[i] * ratio[i].powi(k as i32);
            if !term.is_finite() {
                return Err(Error::Overflow(format!(
                    "series term {k} at node {i} is not finite"
                )));
            }
            bound[i] += term;
            used[i] = k;
            let r = if prev[i] > 0.0 { term / prev[i] } else { 0.0 };
            tails[i] = if r < 1.0 {
                term * r / (1.0 - r)
            } else {
                f64::INFINITY
            };
            if term <= eps * bound[i] && r < 1.0 {
                active[i] = false;
            }
            prev[i] = term;
        }
        if active.iter().all(|a| !a) {
            break;
        }
    }
    for i in 0..m {
        if active[i] && !(tails[i] <= TAIL_TOL * bound[i]) {
            return Err(Error::Truncation {
                tail: tails[i],
                k_max,
            });
        }
    }
    let tail = tails.iter().copied().fold(0.0, f64::max);
    Ok((bound, used, tail))
}

fn ml_values(q: &GronwallQuery) -> Result<Vec<f64>> {
    let p = &q.params;
    let (alpha, rho) = (p.alpha(), p.rho());
    let ga = gamma(alpha)?;
    let w = q.grid.w_nodes();
    let (wa, wb) = (w[0], w[w.len() - 1]);
    (0..w.len())
        .map(|i| {
            let d = match p.side() {
                Side::Left => w[i] - wa,
                Side::Right => wb - w[i],
            };
            let z = q.g[i] * ga * (d / rho).powf(alpha);
            let e = if z == 0.0 { 1.0 } else { ml(alpha, z)? };
            Ok(q.v[i] * e)
        })
        .collect()
}

/// `v(t)·E_α(g(t)Γ(α)(d/ρ)^α)` per node; needs `v` nondecreasing (left) or
/// nonincreasing (right) on the grid.
pub fn ml_bound(q: &GronwallQuery) -> Result<Vec<f64>> {
    if !q.monotonic_v() {
        return Err(Error::Monotonicity(format!(
            "the Mittag-Leffler bound needs v {} on the grid",
            direction(q.params.side())
        )));
    }
    ml_values(q)
}

/// Bound on `|x − y|` for two solutions of left-sided equations of the same
/// order whose right-hand sides differ by at most `psi` and where one of
/// them is `C`-Lipschitz in the state:
/// `v(t) = Σ_{k<n} ρ^{−k}/k!·(t^ρ−a^ρ)^k·gap_k + 𝓘^{α,ρ}ψ(t)`, then the series
/// with `(gΓ(α))^k = C^k`.
pub fn comparison_bound(
    c: f64,
    psi: &FuncSpec,
    init_gaps: &[f64],
    params: &OrderParams,
    domain: &Domain,
    grid: &WGrid,
) -> Result<BoundReport> {
    comparison_bound_with(
        c,
        psi,
        init_gaps,
        params,
        domain,
        grid,
        DEFAULT_EPS,
        DEFAULT_K_MAX,
    )
}

/// [`comparison_bound`] with explicit truncation settings.
#[allow(clippy::too_many_arguments)]
pub fn comparison_bound_with(
    c: f64,
    psi: &FuncSpec,
    init_gaps: &[f64],
    params: &OrderParams,
    domain: &Domain,
    grid: &WGrid,
    eps: f64,
    k_max: usize,
) -> Result<BoundReport> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!(
            "Lipschitz constant must be finite and >= 0, got {c}"
        )));
    }
    if params.side() != Side::Left {
        return Err(Error::Domain("the comparison bound is left-sided".into()));
    }
    if grid.domain() != *domain || grid.rho() != params.rho() {
        return Err(Error::Domain("grid does not match domain and rho".into()));
    }
    // one gap per k < ⌈α⌉, as in the Volterra form (α = 1 needs one)
    let n = params.alpha().ceil() as usize;
    if init_gaps.len() != n {
        return Err(Error::Domain(format!(
            "need {n} initial gaps, got {}",
            init_gaps.len()
        )));
    }
    if let Some(g) = init_gaps.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
        return Err(Error::Domain(format!(
            "initial gaps must be finite and >= 0, got {g}"
        )));
    }
    let psi_vals = sample(psi, grid, "psi")?;
    let ipsi = integral_sweep(&psi_vals, grid, params.alpha(), Side::Left, 0.0);
    let w = grid.w_nodes();
    let v: Vec<f64> = (0..w.len())
        .map(|i| taylor_polynomial(init_gaps, params.rho(), w[i] - w[0]) + ipsi[i])
        .collect();
    let g = vec![c / gamma(params.alpha())?; v.len()];
    let q = GronwallQuery::from_values(None, v, g, *params, grid.clone())?;
    series_bound(&q, eps, k_max)
}
