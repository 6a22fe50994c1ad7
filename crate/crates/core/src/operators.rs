//! Katugampola fractional integrals, Caputo–Katugampola and RL-type
//! derivatives, their a-priori bounds and the integration-by-parts identity.
//!
//! With `w = t^ρ` and `x̃(w) = x(w^{1/ρ})`,
//!
//! ```text
//! 𝓘^{α,ρ} x(t)   = ρ^{−α}   I^α x̃(t^ρ)
//! ^C𝒟^{α,ρ} x(t) = ρ^{α−n} I^{n−α} x̃_(n)(t^ρ)
//! ```
//!
//! where `I^β` is the classical Riemann–Liouville integral. Left operators
//! are anchored at `a`; right operators at `b` are computed on the mirror
//! image `w ↦ a^ρ + b^ρ − w` with the same weights.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::{first_difference, modified_diff_w, BinOp, Env, Expr, FuncSpec, Sampled, Var};
use crate::mesh::{pow_rho, Domain, WGrid};
use crate::quadrature::{
    l1_at, l1_sum, product_trapezoid, product_trapezoid_at, HatTable, L1Table,
};
use crate::specfun::gamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// +1 for left, −1 for right: the orientation of w away from the anchor.
    fn sign(self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
        }
    }

    fn sign_pow(self, k: usize) -> f64 {
        if self == Side::Right && k % 2 == 1 {
            -1.0
        } else {
            1.0
        }
    }
}

/// Order α, parameter ρ and side of an operator; `n` is the smallest
/// integer above α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderParams {
    alpha: f64,
    rho: f64,
    n: usize,
    side: Side,
}

impl OrderParams {
    /// Parameters for a fractional derivative: α > 0 not an integer, ρ > 0.
    pub fn new(alpha: f64, rho: f64, side: Side) -> Result<Self> {
        let p = Self::kernel(alpha, rho, side)?;
        p.require_fractional()?;
        Ok(p)
    }

    pub fn left(alpha: f64, rho: f64) -> Result<Self> {
        Self::new(alpha, rho, Side::Left)
    }

    pub fn right(alpha: f64, rho: f64) -> Result<Self> {
        Self::new(alpha, rho, Side::Right)
    }

    /// Parameters for integrals, Gronwall kernels and the solver, where an
    /// integer α (the classical case) is meaningful.
    pub fn kernel(alpha: f64, rho: f64, side: Side) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Order(format!("alpha must be positive, got {alpha}")));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::Domain(format!("rho must be positive, got {rho}")));
        }
        if alpha >= 64.0 {
            return Err(Error::Order(format!("alpha = {alpha} is too large")));
        }
        let n = alpha.floor() as usize + 1;
        Ok(OrderParams {
            alpha,
            rho,
            n,
            side,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn with_side(&self, side: Side) -> Self {
        OrderParams { side, ..*self }
    }

    pub fn is_integer_order(&self) -> bool {
        self.alpha == self.alpha.floor()
    }

    pub(crate) fn require_fractional(&self) -> Result<()> {
        if self.is_integer_order() {
            return Err(Error::Order(format!(
                "derivatives need a non-integer order, got alpha = {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// A computed operator value with its refinement error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorResult {
    pub value: f64,
    /// `|value(N) − value(N/2)|`.
    pub est_error: f64,
    pub n_used: usize,
}

/// The anchor and evaluation point in w, and the side.
#[derive(Debug, Clone, Copy)]
struct Span {
    anchor: f64,
    end: f64,
    side: Side,
}

impl Span {
    fn new(p: &OrderParams, dom: &Domain, t: f64) -> Result<Span> {
        dom.check_point(t)?;
        let anchor = match p.side {
            Side::Left => pow_rho(dom.a(), p.rho),
            Side::Right => pow_rho(dom.b(), p.rho),
        };
        Ok(Span {
            anchor,
            end: pow_rho(t, p.rho),
            side: p.side,
        })
    }

    fn len(&self) -> f64 {
        ((self.end - self.anchor) * self.side.sign()).max(0.0)
    }

    /// The `m + 1` nodes from the anchor to the end.
    fn nodes(&self, m: usize) -> Vec<f64> {
        let h = self.len() / m as f64;
        let s = self.side.sign();
        let mut w: Vec<f64> = (0..=m).map(|j| self.anchor + s * j as f64 * h).collect();
        w[m] = self.end;
        w
    }
}

fn eval_nodes(e: &Expr, w: &[f64]) -> Result<Vec<f64>> {
    w.iter().map(|&wi| e.eval(&Env::w(wi))).collect()
}

fn first_non_finite(v: &[f64]) -> Option<usize> {
    v.iter().position(|x| !x.is_finite())
}

fn check_cells(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("N must be at least 2, got {n}")));
    }
    Ok(())
}

fn refine(n: usize, mut f: impl FnMut(usize) -> Result<f64>) -> Result<OperatorResult> {
    check_cells(n)?;
    let fine = f(n)?;
    let coarse = f(n / 2)?;
    Ok(OperatorResult {
        value: fine,
        est_error: (fine - coarse).abs(),
        n_used: n,
    })
}

fn check_sampled(s: &Sampled, p: &OrderParams, dom: &Domain) -> Result<()> {
    if s.grid().rho() != p.rho || s.grid().domain() != *dom {
        return Err(Error::Domain(format!(
            "sampled function lives on rho = {} over [{}, {}], operator uses rho = {} over [{}, {}]",
            s.grid().rho(),
            s.grid().domain().a(),
            s.grid().domain().b(),
            p.rho,
            dom.a(),
            dom.b()
        )));
    }
    Ok(())
}

/// Values ordered from the anchor outwards, multiplied by `scale`.
fn oriented(values: &[f64], side: Side, scale: f64) -> Vec<f64> {
    match side {
        Side::Left => values.iter().map(|v| scale * v).collect(),
        Side::Right => values.iter().rev().map(|v| scale * v).collect(),
    }
}

fn every_other(v: &[f64]) -> Option<Vec<f64>> {
    let cells = v.len() - 1;
    if cells.is_multiple_of(2) && cells >= 4 {
        Some(v.iter().step_by(2).copied().collect())
    } else {
        None
    }
}

/// The Katugampola fractional integral `𝓘^{α,ρ}_{a+}x(t)` or `𝓘^{α,ρ}_{b−}x(t)`.
///
/// Expressions are integrated with `N` cells between the anchor and `t`;
/// sampled functions use their own grid and `N` is ignored.
pub fn frac_integral(
    x: &FuncSpec,
    p: &OrderParams,
    dom: &Domain,
    t: f64,
    n: usize,
) -> Result<OperatorResult> {
    let span = Span::new(p, dom, t)?;
    let alpha = p.alpha;
    let scale = p.rho.powf(-alpha);
    match x {
        FuncSpec::Expr(e) => {
            let xw = modified_diff_w(e, 0, p.rho)?;
            refine(n, |m| {
                if span.len() == 0.0 {
                    return Ok(0.0);
                }
                let vals = eval_nodes(&xw, &span.nodes(m))?;
                if let Some(i) = first_non_finite(&vals) {
                    return Err(Error::NonFinite(format!(
                        "integrand is not finite at node {i} of {m}"
                    )));
                }
                Ok(scale * product_trapezoid(alpha, span.len() / m as f64, &vals))
            })
        }
        FuncSpec::Sampled(s) => {
            check_sampled(s, p, dom)?;
            let vals = oriented(s.values(), p.side, 1.0);
            if let Some(i) = first_non_finite(&vals) {
                return Err(Error::NonFinite(format!("sample {i} is not finite")));
            }
            let h = s.grid().h();
            let value = scale * product_trapezoid_at(alpha, h, &vals, span.len());
            let est_error = every_other(&vals)
                .map(|c| {
                    (value - scale * product_trapezoid_at(alpha, 2.0 * h, &c, span.len())).abs()
                })
                .unwrap_or(0.0);
            Ok(OperatorResult {
                value,
                est_error,
                n_used: s.grid().cells(),
            })
        }
    }
}

/// Caputo derivative from the nodal `x_(n)` (oriented, with the side sign
/// applied) or, when only the anchor value is infinite, by the L1 rule on
/// `x_(n−1)`.
fn caputo_from_nodes(
    p: &OrderParams,
    h: f64,
    dn: &[f64],
    dn1: impl FnOnce() -> Result<Vec<f64>>,
) -> Result<f64> {
    let beta = p.n as f64 - p.alpha;
    let scale = p.rho.powf(p.alpha - p.n as f64);
    match first_non_finite(dn) {
        None => Ok(scale * product_trapezoid(beta, h, dn)),
        Some(0) if first_non_finite(&dn[1..]).is_none() => {
            let g = dn1()?;
            if let Some(i) = first_non_finite(&g) {
                return Err(Error::NonFinite(format!(
                    "x_(n-1) is not finite at node {i}"
                )));
            }
            let slopes: Vec<f64> = g.windows(2).map(|q| p.rho * (q[1] - q[0]) / h).collect();
            Ok(scale * l1_sum(beta, h, &slopes))
        }
        Some(i) => Err(Error::NonFinite(format!("x_(n) is not finite at node {i}"))),
    }
}

/// The Caputo–Katugampola derivative `^C𝒟^{α,ρ}_{a+}x(t)` or `^C𝒟^{α,ρ}_{b−}x(t)`.
///
/// For expressions `x_(n)` is exact and integrated by the product
/// trapezoid rule; if it is infinite at the anchor only, the L1 rule on
/// `x_(n−1)` is used instead. Sampled functions (n ≤ 2) first have their
/// anchor expansion in powers `s^k` and `s^α` of the w-distance fitted and
/// differentiated exactly; the rest goes through the L1 rule on the
/// piecewise-linear interpolant (n = 1) or on central differences (n = 2).
pub fn caputo_deriv(
    x: &FuncSpec,
    p: &OrderParams,
    dom: &Domain,
    t: f64,
    n: usize,
) -> Result<OperatorResult> {
    p.require_fractional()?;
    let span = Span::new(p, dom, t)?;
    let k = p.n;
    match x {
        FuncSpec::Expr(e) => {
            let dn = modified_diff_w(e, k, p.rho)?;
            let dn1 = modified_diff_w(e, k - 1, p.rho)?;
            let (sn, sn1) = (p.side.sign_pow(k), p.side.sign_pow(k - 1));
            refine(n, |m| {
                if span.len() == 0.0 {
                    return Ok(0.0);
                }
                let w = span.nodes(m);
                let vals: Vec<f64> = eval_nodes(&dn, &w)?.into_iter().map(|v| sn * v).collect();
                let h = span.len() / m as f64;
                caputo_from_nodes(p, h, &vals, || {
                    Ok(eval_nodes(&dn1, &w)?.into_iter().map(|v| sn1 * v).collect())
                })
            })
        }
        FuncSpec::Sampled(s) => {
            check_sampled(s, p, dom)?;
            check_sampled_order(p)?;
            let y = oriented(s.values(), p.side, 1.0);
            if let Some(i) = first_non_finite(&y) {
                return Err(Error::NonFinite(format!("sample {i} is not finite")));
            }
            let scale = p.rho.powf(p.alpha);
            let h = s.grid().h();
            let value = scale * sampled_caputo(&y, h, p.alpha, k, span.len())?;
            let est_error = match every_other(&y) {
                Some(c) if c.len() > k + 1 => {
                    (value - scale * sampled_caputo(&c, 2.0 * h, p.alpha, k, span.len())?).abs()
                }
                _ => 0.0,
            };
            Ok(OperatorResult {
                value,
                est_error,
                n_used: s.grid().cells(),
            })
        }
    }
}

/// Local expansion `Σ_{k=1}^{n} c_k s^k + d·s^α` of anchor-oriented samples
/// `y_j − y_0`, interpolating nodes `1..=n+1`. Functions in the range of the
/// order-α integral (and solutions of the matching differential equations)
/// carry the `s^α` term, which neither the L1 rule nor finite differences
/// resolve near the anchor.
struct AnchorFit {
    h: f64,
    /// `(exponent, coefficient of (s/h)^exponent)`
    terms: Vec<(f64, f64)>,
}

impl AnchorFit {
    fn new(y: &[f64], h: f64, alpha: f64, n: usize) -> Self {
        let mut exps: Vec<f64> = (1..=n).map(|k| k as f64).collect();
        exps.push(alpha);
        let m = exps.len();
        if y.len() < m + 1 {
            return AnchorFit {
                h,
                terms: Vec::new(),
            };
        }
        let mut a: Vec<Vec<f64>> = (1..=m)
            .map(|j| {
                let mut row: Vec<f64> = exps.iter().map(|&e| (j as f64).powf(e)).collect();
                row.push(y[j] - y[0]);
                row
            })
            .collect();
        match solve_dense(&mut a) {
            Some(c) => AnchorFit {
                h,
                terms: exps.into_iter().zip(c).collect(),
            },
            None => AnchorFit {
                h,
                terms: Vec::new(),
            },
        }
    }

    fn value(&self, s: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(e, c)| c * (s / self.h).powf(e))
            .sum()
    }

    /// Exact `d/ds` at the anchor.
    fn slope_at_anchor(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(e, _)| *e == 1.0)
            .map(|(_, c)| c / self.h)
            .sum()
    }

    /// Exact Caputo derivative of order α in s at distance `s`.
    fn caputo(&self, s: f64, alpha: f64) -> Result<f64> {
        let n = alpha.ceil();
        let mut out = 0.0;
        for &(e, c) in &self.terms {
            if e <= n - 1.0 || c == 0.0 {
                continue;
            }
            let r = gamma(e + 1.0)? / gamma(e + 1.0 - alpha)?;
            out += c * r * (s / self.h).powf(e) * s.powf(-alpha);
        }
        Ok(if s == 0.0 { 0.0 } else { out })
    }
}

fn check_sampled_order(p: &OrderParams) -> Result<()> {
    if p.n > 2 {
        return Err(Error::Order(format!(
            "sampled functions support orders below 2, got alpha = {}",
            p.alpha
        )));
    }
    Ok(())
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve_dense(a: &mut [Vec<f64>]) -> Option<Vec<f64>> {
    let m = a.len();
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        for row in col + 1..m {
            let f = a[row][col] / a[col][col];
            for k in col..=m {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    let mut x = vec![0.0; m];
    for row in (0..m).rev() {
        let tail: f64 = (row + 1..m).map(|k| a[row][k] * x[k]).sum();
        x[row] = (a[row][m] - tail) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// L1 slopes of the (n−1)-th s-derivative of the samples minus their fitted
/// anchor expansion.
fn remainder_slopes(y: &[f64], h: f64, n: usize, fit: &AnchorFit) -> Vec<f64> {
    let r: Vec<f64> = y
        .iter()
        .enumerate()
        .map(|(j, v)| v - y[0] - fit.value(j as f64 * h))
        .collect();
    let g = if n == 1 { r } else { first_difference(&r, h) };
    g.windows(2).map(|q| (q[1] - q[0]) / h).collect()
}

/// Caputo derivative in s of anchor-oriented samples `y_j = y(j·h)`, at
/// distance `len` from the anchor (n ≤ 2).
fn sampled_caputo(y: &[f64], h: f64, alpha: f64, n: usize, len: f64) -> Result<f64> {
    let fit = AnchorFit::new(y, h, alpha, n);
    let slopes = remainder_slopes(y, h, n, &fit);
    Ok(fit.caputo(len, alpha)? + l1_at(n as f64 - alpha, h, &slopes, len))
}

/// `x_(k)` at the anchor of `p`, k < n.
pub(crate) fn anchor_derivatives(x: &FuncSpec, p: &OrderParams, dom: &Domain) -> Result<Vec<f64>> {
    let anchor_t = match p.side {
        Side::Left => dom.a(),
        Side::Right => dom.b(),
    };
    match x {
        FuncSpec::Expr(e) => {
            let w = pow_rho(anchor_t, p.rho);
            (0..p.n)
                .map(|k| modified_diff_w(e, k, p.rho)?.eval(&Env::w(w)))
                .collect()
        }
        FuncSpec::Sampled(s) => {
            check_sampled(s, p, dom)?;
            check_sampled_order(p)?;
            let y = oriented(s.values(), p.side, 1.0);
            let mut out = vec![y[0]];
            if p.n > 1 {
                let fit = AnchorFit::new(&y, s.grid().h(), p.alpha, p.n);
                out.push(p.side.sign() * p.rho * fit.slope_at_anchor());
            }
            Ok(out)
        }
    }
}

/// The RL-type Katugampola derivative, from the Caputo derivative plus the
/// boundary terms `ρ^{α−k}/Γ(k+1−α)·(t^ρ−a^ρ)^{k−α}·x_(k)(a)` (left) or
/// their mirror images with `(−1)^k` (right).
pub fn rl_deriv(
    x: &FuncSpec,
    p: &OrderParams,
    dom: &Domain,
    t: f64,
    n: usize,
) -> Result<OperatorResult> {
    let c = caputo_deriv(x, p, dom, t, n)?;
    let span = Span::new(p, dom, t)?;
    let d = anchor_derivatives(x, p, dom)?;
    let len = span.len();
    let mut corr = 0.0;
    for (k, dk) in d.iter().enumerate() {
        if !dk.is_finite() {
            return Err(Error::NonFinite(format!(
                "x_({k}) is not finite at the anchor"
            )));
        }
        if *dk == 0.0 {
            continue;
        }
        if len == 0.0 {
            return Err(Error::Singular(format!(
                "RL-type derivative is unbounded at the anchor (x_({k}) = {dk} there)"
            )));
        }
        let kf = k as f64;
        corr += p.side.sign_pow(k) * p.rho.powf(p.alpha - kf) / gamma(kf + 1.0 - p.alpha)?
            * len.powf(kf - p.alpha)
            * dk;
    }
    Ok(OperatorResult {
        value: c.value + corr,
        ..c
    })
}

/// Which operator to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Integral,
    Caputo,
    RiemannLiouville,
}

pub fn evaluate(
    kind: OperatorKind,
    x: &FuncSpec,
    p: &OrderParams,
    dom: &Domain,
    t: f64,
    n: usize,
) -> Result<OperatorResult> {
    match kind {
        OperatorKind::Integral => frac_integral(x, p, dom, t, n),
        OperatorKind::Caputo => caputo_deriv(x, p, dom, t, n),
        OperatorKind::RiemannLiouville => rl_deriv(x, p, dom, t, n),
    }
}

/// [`evaluate`] at several points in parallel.
pub fn evaluate_many(
    kind: OperatorKind,
    x: &FuncSpec,
    p: &OrderParams,
    dom: &Domain,
    ts: &[f64],
    n: usize,
) -> Result<Vec<OperatorResult>> {
    ts.par_iter()
        .map(|&t| evaluate(kind, x, p, dom, t, n))
        .collect()
}

const BOUND_SAMPLES: usize = 4096;

/// `ρ^{α−n}/Γ(n+1−α)·max|x_(n)|·(t^ρ−a^ρ)^{n−α}`, the max taken over [a, t]
/// (left) or [t, b] (right). Infinite when `x_(n)` is unbounded there.
pub fn pointwise_bound(x: &FuncSpec, p: &OrderParams, dom: &Domain, t: f64) -> Result<f64> {
    p.require_fractional()?;
    let span = Span::new(p, dom, t)?;
    let len = span.len();
    if len == 0.0 {
        return Ok(0.0);
    }
    let k = p.n;
    let max = match x {
        FuncSpec::Expr(e) => {
            let dn = modified_diff_w(e, k, p.rho)?;
            eval_nodes(&dn, &span.nodes(BOUND_SAMPLES))?
                .into_iter()
                .map(|v| {
                    if v.is_finite() {
                        v.abs()
                    } else {
                        f64::INFINITY
                    }
                })
                .fold(0.0, f64::max)
        }
        FuncSpec::Sampled(s) => {
            // the derivative the L1 rule actually integrates: slopes of x_(n−1)
            check_sampled(s, p, dom)?;
            let g = oriented(s.modified_diff(k - 1)?.values(), p.side, 1.0);
            let h = s.grid().h();
            let cells = ((len / h).ceil() as usize).clamp(1, g.len() - 1);
            g.windows(2)
                .take(cells)
                .map(|q| (p.rho * (q[1] - q[0]) / h).abs())
                .fold(0.0, f64::max)
        }
    };
    let beta = k as f64 - p.alpha;
    Ok(p.rho.powf(-beta) / gamma(beta + 1.0)? * max * len.powf(beta))
}

/// `K = ρ^{α−n}/Γ(n+1−α)·(b^ρ−a^ρ)^{n−α}`, the norm bound of the Caputo
/// operator from `C^n_ρ` (norm `Σ_{k≤n} max|x_(k)|`) to `C`.
pub fn operator_norm_k(p: &OrderParams, dom: &Domain) -> Result<f64> {
    p.require_fractional()?;
    let beta = p.n as f64 - p.alpha;
    let span = pow_rho(dom.b(), p.rho) - pow_rho(dom.a(), p.rho);
    Ok(p.rho.powf(-beta) / gamma(beta + 1.0)? * span.powf(beta))
}

/// `ρ^{−β} I^β` of nodal values at every node of `grid`, anchored at the
/// side's endpoint, each weight multiplied by `exp(log_scale)`.
pub(crate) fn integral_sweep(
    values: &[f64],
    grid: &WGrid,
    beta: f64,
    side: Side,
    log_scale: f64,
) -> Vec<f64> {
    let table = HatTable::scaled(
        beta,
        grid.h(),
        grid.cells(),
        log_scale - beta * grid.rho().ln(),
    );
    let out = table.sweep(&oriented(values, side, 1.0));
    oriented(&out, side, 1.0)
}

/// Caputo derivative at every node of `grid` from nodal `x_(n)` and
/// `x_(n−1)` (unsigned; the side sign is applied here).
pub(crate) fn caputo_sweep(
    dn: &[f64],
    dn1: &[f64],
    grid: &WGrid,
    p: &OrderParams,
) -> Result<Vec<f64>> {
    let k = p.n;
    let beta = k as f64 - p.alpha;
    let scale = p.rho.powf(p.alpha - k as f64);
    let h = grid.h();
    let vals = oriented(dn, p.side, p.side.sign_pow(k));
    let out = match first_non_finite(&vals) {
        None => HatTable::new(beta, h, grid.cells()).sweep(&vals),
        Some(0) if first_non_finite(&vals[1..]).is_none() => {
            let g = oriented(dn1, p.side, p.side.sign_pow(k - 1));
            if let Some(i) = first_non_finite(&g) {
                return Err(Error::NonFinite(format!(
                    "x_(n-1) is not finite at node {i}"
                )));
            }
            let slopes: Vec<f64> = g.windows(2).map(|q| p.rho * (q[1] - q[0]) / h).collect();
            L1Table::new(beta, h, grid.cells()).sweep(&slopes)
        }
        Some(i) => return Err(Error::NonFinite(format!("x_(n) is not finite at node {i}"))),
    };
    Ok(oriented(&out, p.side, scale))
}

fn check_grid_rho(p: &OrderParams, grid: &WGrid) -> Result<()> {
    if grid.rho() != p.rho {
        return Err(Error::Domain(format!(
            "grid uses rho = {}, operator uses rho = {}",
            grid.rho(),
            p.rho
        )));
    }
    Ok(())
}

fn sampled_on(x: &Sampled, grid: &WGrid) -> Result<()> {
    if x.grid() != grid {
        return Err(Error::Domain(
            "sampled function lives on a different grid".into(),
        ));
    }
    Ok(())
}

/// `𝓘^{α,ρ}x` at every node of `grid` (integer α allowed), by the product
/// trapezoid rule on the nodal values of `x`.
pub fn integral_on_grid(x: &FuncSpec, p: &OrderParams, grid: &WGrid) -> Result<Sampled> {
    check_grid_rho(p, grid)?;
    let vals = match x {
        FuncSpec::Expr(e) => {
            let xw = modified_diff_w(e, 0, p.rho)?;
            eval_nodes(&xw, grid.w_nodes())?
        }
        FuncSpec::Sampled(s) => {
            sampled_on(s, grid)?;
            s.values().to_vec()
        }
    };
    if let Some(i) = first_non_finite(&vals) {
        return Err(Error::NonFinite(format!(
            "integrand is not finite at node {i}"
        )));
    }
    Sampled::new(
        grid.clone(),
        integral_sweep(&vals, grid, p.alpha, p.side, 0.0),
    )
}

/// `^C𝒟^{α,ρ}x` at every node of `grid`, with the same rules as
/// [`caputo_deriv`].
pub fn caputo_on_grid(x: &FuncSpec, p: &OrderParams, grid: &WGrid) -> Result<Sampled> {
    p.require_fractional()?;
    check_grid_rho(p, grid)?;
    let k = p.n;
    let vals = match x {
        FuncSpec::Expr(e) => {
            let dn = eval_nodes(&modified_diff_w(e, k, p.rho)?, grid.w_nodes())?;
            let dn1 = eval_nodes(&modified_diff_w(e, k - 1, p.rho)?, grid.w_nodes())?;
            caputo_sweep(&dn, &dn1, grid, p)?
        }
        FuncSpec::Sampled(s) => {
            sampled_on(s, grid)?;
            check_sampled_order(p)?;
            let y = oriented(s.values(), p.side, 1.0);
            if let Some(i) = first_non_finite(&y) {
                return Err(Error::NonFinite(format!("sample {i} is not finite")));
            }
            let h = grid.h();
            let fit = AnchorFit::new(&y, h, p.alpha, k);
            let slopes = remainder_slopes(&y, h, k, &fit);
            let beta = k as f64 - p.alpha;
            let swept = L1Table::new(beta, h, grid.cells()).sweep(&slopes);
            let out = swept
                .iter()
                .enumerate()
                .map(|(j, v)| Ok(v + fit.caputo(j as f64 * h, p.alpha)?))
                .collect::<Result<Vec<f64>>>()?;
            oriented(&out, p.side, p.rho.powf(p.alpha))
        }
    };
    Sampled::new(grid.clone(), vals)
}

fn trapezoid(t: &[f64], f: &[f64]) -> f64 {
    t.windows(2)
        .zip(f.windows(2))
        .map(|(t, f)| 0.5 * (t[1] - t[0]) * (f[0] + f[1]))
        .sum()
}

/// `∫_A^B φ·D dw` where `D` is a Caputo derivative on `grid` anchored at
/// `side`. Near its anchor `D ≈ c·dist^β/Γ(β+1)` with `c = ρ^{α−n}` times
/// the integrand at the anchor; that part is integrated exactly and only
/// the smoother remainder goes through the trapezoid rule.
fn outer_integral(
    phi: &[f64],
    d: &[f64],
    c: f64,
    beta: f64,
    side: Side,
    grid: &WGrid,
) -> Result<f64> {
    let w = grid.w_nodes();
    let (wa, wb) = (w[0], w[w.len() - 1]);
    if !c.is_finite() {
        let f: Vec<f64> = phi.iter().zip(d).map(|(p, v)| p * v).collect();
        return Ok(trapezoid(w, &f));
    }
    let g1 = gamma(beta + 1.0)?;
    let f: Vec<f64> = (0..w.len())
        .map(|i| {
            let dist = match side {
                Side::Left => w[i] - wa,
                Side::Right => wb - w[i],
            };
            phi[i] * (d[i] - c * dist.powf(beta) / g1)
        })
        .collect();
    // ∫ φ·dist^β/Γ(β+1) dw is a fractional integral of order β+1 evaluated at the far end
    let exact = match side {
        Side::Left => product_trapezoid(beta + 1.0, grid.h(), &oriented(phi, Side::Right, 1.0)),
        Side::Right => product_trapezoid(beta + 1.0, grid.h(), phi),
    };
    Ok(trapezoid(w, &f) + c * exact)
}

/// Both sides of the integration-by-parts formula and their relative gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IbpTerms {
    /// `∫_a^b x·^C𝒟_{a+}y dt`.
    pub lhs: f64,
    /// `∫_a^b 𝒟_{b−}(t^{1−ρ}x)·t^{ρ−1}y dt` plus the boundary terms.
    pub rhs: f64,
    /// `|lhs − rhs|/(1 + |lhs|)`.
    pub residual: f64,
}

fn expr_only<'a>(f: &'a FuncSpec, name: &str) -> Result<&'a Expr> {
    match f {
        FuncSpec::Expr(e) => Ok(e),
        FuncSpec::Sampled(_) => Err(Error::Domain(format!(
            "integration by parts needs `{name}` as an expression"
        ))),
    }
}

/// Evaluates both sides of
///
/// ```text
/// ∫ x·^C𝒟_{a+}^{α,ρ}y dt = ∫ 𝒟_{b−}^{α,ρ}(t^{1−ρ}x)·t^{ρ−1}y dt
///                        + Σ_{k<n} [(−t^{1−ρ}d/dt)^k 𝓘_{b−}^{n−α,ρ}(t^{1−ρ}x)·y_(n−k−1)]_a^b
/// ```
///
/// on a w-uniform grid with `n_cells` cells. The outer integrals use the
/// trapezoid rule after the leading `dist^{n−α}` behaviour of each Caputo
/// derivative near its anchor has been split off and integrated exactly;
/// the unbounded parts of the right RL derivative, `(b^ρ−t^ρ)^{k−α}`, are
/// likewise integrated against `y` by product quadrature.
pub fn ibp_terms(
    x: &FuncSpec,
    y: &FuncSpec,
    p: &OrderParams,
    dom: &Domain,
    n_cells: usize,
) -> Result<IbpTerms> {
    p.require_fractional()?;
    if p.side != Side::Left {
        return Err(Error::Domain(
            "integration by parts is stated for the left derivative".into(),
        ));
    }
    check_cells(n_cells)?;
    let (x, y) = (expr_only(x, "x")?, expr_only(y, "y")?);
    let (alpha, rho, n) = (p.alpha, p.rho, p.n);
    let grid = WGrid::new(*dom, rho, n_cells)?;
    let (w, t) = (grid.w_nodes(), grid.t_nodes());
    let last = n_cells;
    let h = grid.h();
    let span = w[last] - w[0];
    let gamma0 = n as f64 - alpha;

    let deriv_nodes =
        |e: &Expr, k: usize| -> Result<Vec<f64>> { eval_nodes(&modified_diff_w(e, k, rho)?, w) };
    // ∫_A^B (w − A)^{β−1}/Γ(β) f dw from nodal values
    let right_at_a = |beta: f64, f: &[f64]| -> f64 {
        let rev: Vec<f64> = f.iter().rev().copied().collect();
        product_trapezoid(beta, h, &rev)
    };

    let xv = deriv_nodes(x, 0)?;
    let yk: Vec<Vec<f64>> = (0..=n).map(|k| deriv_nodes(y, k)).collect::<Result<_>>()?;
    let dy = caputo_sweep(&yk[n], &yk[n - 1], &grid, p)?;
    let lead = rho.powf(-gamma0);
    // dt = t^{1−ρ}/ρ dw
    let phi: Vec<f64> = (0..=last)
        .map(|i| xv[i] * t[i].powf(1.0 - rho) / rho)
        .collect();
    let lhs = outer_integral(&phi, &dy, lead * yk[n][0], gamma0, Side::Left, &grid)?;

    let z = Expr::binary(
        BinOp::Mul,
        Expr::binary(BinOp::Pow, Expr::var(Var::T), Expr::constant(1.0 - rho)),
        x.clone(),
    );
    let zk: Vec<Vec<f64>> = (0..=n).map(|k| deriv_nodes(&z, k)).collect::<Result<_>>()?;
    let is_zero = |k: usize, v: f64| {
        let scale = zk[k]
            .iter()
            .filter(|u| u.is_finite())
            .fold(1.0f64, |m, u| m.max(u.abs()));
        v.abs() <= 1e-13 * scale
    };
    let dz = caputo_sweep(&zk[n], &zk[n - 1], &grid, &p.with_side(Side::Right))?;
    let phi: Vec<f64> = yk[0].iter().map(|v| v / rho).collect();
    let z_end = Side::Right.sign_pow(n) * zk[n][last];
    let mut rhs = outer_integral(&phi, &dz, lead * z_end, gamma0, Side::Right, &grid)?;

    // unbounded boundary part of the right RL derivative
    for k in 0..n {
        let zb = zk[k][last];
        if is_zero(k, zb) {
            continue;
        }
        let beta = k as f64 + 1.0 - alpha;
        if beta <= 0.0 {
            return Err(Error::Singular(format!(
                "(b^rho - t^rho)^{} is not integrable and z_({k})(b) = {zb}",
                k as f64 - alpha
            )));
        }
        // ∫ (b^ρ − t^ρ)^{k−α} t^{ρ−1} y dt = Γ(k+1−α)/ρ · I^{k+1−α} ỹ (B)
        rhs += rho.powf(alpha - k as f64 - 1.0)
            * Side::Right.sign_pow(k)
            * zb
            * product_trapezoid(beta, h, &yk[0]);
    }

    // boundary sum; at t = b every surviving term vanishes
    for k in 0..n {
        let mut at_a = 0.0;
        for j in 0..k {
            let zb = zk[j][last];
            if is_zero(j, zb) {
                continue;
            }
            let e = gamma0 + j as f64 - k as f64;
            if e < 0.0 {
                return Err(Error::Singular(format!(
                    "boundary term {k} is unbounded at b because z_({j})(b) = {zb}"
                )));
            }
            at_a += Side::Right.sign_pow(j) * rho.powi(-(j as i32)) * zb * span.powf(e)
                / gamma(e + 1.0)?;
        }
        let s = Side::Right.sign_pow(k) * rho.powi(-(k as i32));
        let g: Vec<f64> = zk[k].iter().map(|v| s * v).collect();
        if let Some(i) = first_non_finite(&g) {
            return Err(Error::NonFinite(format!(
                "z_({k}) is not finite at node {i}"
            )));
        }
        at_a += right_at_a(gamma0, &g);
        at_a *= rho.powf(k as f64 - gamma0);
        rhs -= at_a * yk[n - k - 1][0];
    }

    let residual = (lhs - rhs).abs() / (1.0 + lhs.abs());
    Ok(IbpTerms { lhs, rhs, residual })
}

/// `|LHS − RHS|/(1 + |LHS|)` for the integration-by-parts formula.
pub fn ibp_residual(
    x: &FuncSpec,
    y: &FuncSpec,
    p: &OrderParams,
    dom: &Domain,
    n_cells: usize,
) -> Result<f64> {
    Ok(ibp_terms(x, y, p, dom, n_cells)?.residual)
}

#[cfg(test)]
mod tests {
    use super::*;

    const INV_GAMMA_1_5: f64 = std::f64::consts::FRAC_2_SQRT_PI;

    fn dom() -> Domain {
        Domain::new(1.0, 2.0).unwrap()
    }

    fn f(s: &str) -> FuncSpec {
        FuncSpec::parse(s).unwrap()
    }

    #[test]
    fn order_params_validation() {
        assert!(OrderParams::left(0.5, 1.0).is_ok());
        assert_eq!(OrderParams::left(1.5, 1.0).unwrap().n(), 2);
        assert!(matches!(OrderParams::left(1.0, 1.0), Err(Error::Order(_))));
        assert!(matches!(OrderParams::left(-0.5, 1.0), Err(Error::Order(_))));
        assert!(matches!(OrderParams::left(0.5, 0.0), Err(Error::Domain(_))));
        let k = OrderParams::kernel(1.0, 1.0, Side::Left).unwrap();
        assert!(k.is_integer_order());
        assert!(caputo_deriv(&f("t"), &k, &dom(), 1.5, 16).is_err());
    }

    #[test]
    fn integral_examples() {
        let p = OrderParams::left(0.5, 1.0).unwrap();
        let r = frac_integral(&f("1"), &p, &dom(), 2.0, 64).unwrap();
        assert!((r.value - INV_GAMMA_1_5).abs() < 1e-14);
        assert!(r.est_error < 1e-14);
        assert_eq!(
            frac_integral(&f("0"), &p, &dom(), 1.7, 64).unwrap().value,
            0.0
        );
        assert_eq!(
            frac_integral(&f("t^2"), &p, &dom(), 1.0, 64).unwrap().value,
            0.0
        );
        assert!(matches!(
            frac_integral(&f("1"), &p, &dom(), 2.5, 64),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            frac_integral(&f("1/(t - 1.5)"), &p, &dom(), 2.0, 64),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn right_integral_mirrors_left() {
        // 𝓘_{b−} 1 (a) = (b^ρ − a^ρ)^α/(ρ^α Γ(α+1))
        let p = OrderParams::kernel(0.4, 2.0, Side::Right).unwrap();
        let r = frac_integral(&f("1"), &p, &dom(), 1.0, 32).unwrap();
        let want = (3.0f64 / 2.0).powf(0.4) / gamma(1.4).unwrap();
        assert!((r.value - want).abs() < 1e-14);
        assert_eq!(
            frac_integral(&f("1"), &p, &dom(), 2.0, 32).unwrap().value,
            0.0
        );
    }

    #[test]
    fn caputo_examples() {
        let p = OrderParams::left(0.5, 2.0).unwrap();
        for t in [1.0, 1.3, 2.0] {
            assert_eq!(
                caputo_deriv(&f("3.5"), &p, &dom(), t, 64).unwrap().value,
                0.0
            );
        }
        // x = t² − 1 = (t^ρ − a^ρ) at ρ = 2: ρ^α Γ(2)/Γ(1.5) (t² − 1)^{0.5}
        let r = caputo_deriv(&f("t^2 - 1"), &p, &dom(), 2f64.sqrt(), 256).unwrap();
        assert!(
            (r.value - 1.595_769_121_605_730_711_8).abs() < 1e-13,
            "{}",
            r.value
        );
        assert_eq!(
            caputo_deriv(&f("sin(t)"), &p, &dom(), 1.0, 64)
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn caputo_singular_anchor_uses_l1() {
        // x = (t − 1)^{0.7}, α = 0.5: x_(1) ~ (t−1)^{−0.3} is infinite at a
        let p = OrderParams::left(0.5, 1.0).unwrap();
        let r = caputo_deriv(&f("(t - 1)^0.7"), &p, &dom(), 2.0, 4096).unwrap();
        let want = gamma(1.7).unwrap() / gamma(1.2).unwrap();
        assert!(
            ((r.value - want) / want).abs() < 1e-3,
            "{} vs {want}",
            r.value
        );
        assert!(matches!(
            caputo_deriv(&f("1/(t - 1.5)"), &p, &dom(), 2.0, 64),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn right_caputo_of_mirrored_power() {
        // x = (b^ρ − t^ρ)^v: ^C𝒟_{b−} x = ρ^α Γ(v+1)/Γ(v−α+1) (b^ρ − t^ρ)^{v−α}
        let (alpha, rho, v) = (1.4, 0.7, 2.5);
        let p = OrderParams::right(alpha, rho).unwrap();
        let x = f(&format!("(2^{rho} - t^{rho})^{v}"));
        let t = 1.3f64;
        let r = caputo_deriv(&x, &p, &dom(), t, 2048).unwrap();
        let s = 2f64.powf(rho) - t.powf(rho);
        let want = rho.powf(alpha) * gamma(v + 1.0).unwrap() / gamma(v - alpha + 1.0).unwrap()
            * s.powf(v - alpha);
        // x_(2) ~ (b^ρ − t^ρ)^{1/2} at the anchor limits the rule to O(h^{3/2})
        assert!(
            ((r.value - want) / want).abs() < 1e-5,
            "{} vs {want}",
            r.value
        );
    }

    #[test]
    fn rl_examples() {
        let p = OrderParams::left(0.5, 1.0).unwrap();
        let r = rl_deriv(&f("1"), &p, &dom(), 2.0, 64).unwrap();
        assert!((r.value - 0.564_189_583_547_756_286_95).abs() < 1e-15);
        assert!(matches!(
            rl_deriv(&f("1"), &p, &dom(), 1.0, 64),
            Err(Error::Singular(_))
        ));
        // x_(k)(a) = 0 for k < n: RL and Caputo coincide
        let x = f("(t - 1)^2.5");
        let c = caputo_deriv(&x, &p, &dom(), 1.6, 256).unwrap();
        let r = rl_deriv(&x, &p, &dom(), 1.6, 256).unwrap();
        assert_eq!(c, r);
        assert_eq!(rl_deriv(&x, &p, &dom(), 1.0, 256).unwrap().value, 0.0);
    }

    #[test]
    fn bound_examples() {
        let p = OrderParams::left(0.5, 1.0).unwrap();
        let x = f("(t - 1)^2");
        assert_eq!(pointwise_bound(&x, &p, &dom(), 1.0).unwrap(), 0.0);
        let b = pointwise_bound(&x, &p, &dom(), 2.0).unwrap();
        assert!((b - 2.256_758_334_191_025_147_8).abs() < 1e-14);
        assert!((operator_norm_k(&p, &dom()).unwrap() - INV_GAMMA_1_5).abs() < 1e-15);
        let p2 = OrderParams::left(1.5, 1.0).unwrap();
        assert!((operator_norm_k(&p2, &dom()).unwrap() - INV_GAMMA_1_5).abs() < 1e-15);
        let near = Domain::new(1.0, 1.0 + 1e-12).unwrap();
        assert!(operator_norm_k(&p, &near).unwrap() < 1e-5);
    }

    #[test]
    fn sampled_inputs_follow_expressions() {
        let (alpha, rho) = (0.6, 1.5);
        let grid = WGrid::new(dom(), rho, 2048).unwrap();
        let s = FuncSpec::Sampled(Sampled::from_fn(grid, |t| Ok((t * 0.8).sin())).unwrap());
        let e = f("sin(0.8*t)");
        for side in [Side::Left, Side::Right] {
            let p = OrderParams::new(alpha, rho, side).unwrap();
            for t in [1.23, 1.5, 1.91] {
                let a = frac_integral(&s, &p, &dom(), t, 0).unwrap();
                let b = frac_integral(&e, &p, &dom(), t, 1024).unwrap();
                assert!((a.value - b.value).abs() < 1e-6, "{side:?} {t}");
                let a = caputo_deriv(&s, &p, &dom(), t, 0).unwrap();
                let b = caputo_deriv(&e, &p, &dom(), t, 1024).unwrap();
                assert!(
                    (a.value - b.value).abs() < 1e-5,
                    "{side:?} {t}: {} vs {}",
                    a.value,
                    b.value
                );
                assert!(a.value.abs() <= pointwise_bound(&s, &p, &dom(), t).unwrap());
            }
        }
        let other = OrderParams::left(alpha, 1.0).unwrap();
        assert!(matches!(
            frac_integral(&s, &other, &dom(), 1.5, 0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn sampled_anchor_terms_are_exact() {
        for (alpha, rho) in [(0.3, 0.5), (0.7, 2.0), (1.6, 1.0), (1.4, 0.5)] {
            let grid = WGrid::new(dom(), rho, 64).unwrap();
            let (wa, wb) = (pow_rho(1.0, rho), pow_rho(2.0, rho));
            for side in [Side::Left, Side::Right] {
                let p = OrderParams::new(alpha, rho, side).unwrap();
                let dist = |t: f64| match side {
                    Side::Left => pow_rho(t, rho) - wa,
                    Side::Right => wb - pow_rho(t, rho),
                };
                // 2 + s/2 + s^α in the distance s from the anchor, whose derivative is ρ^α Γ(α+1) + s-term
                let x = Sampled::from_fn(grid.clone(), |t| {
                    Ok(2.0 + 0.5 * dist(t) + dist(t).powf(alpha))
                })
                .unwrap();
                let x = FuncSpec::Sampled(x);
                let lin = if alpha < 1.0 {
                    0.5 / gamma(2.0 - alpha).unwrap()
                } else {
                    0.0
                };
                let want = |t: f64| {
                    rho.powf(alpha)
                        * (gamma(alpha + 1.0).unwrap() + lin * dist(t).powf(1.0 - alpha))
                };
                let on_grid = caputo_on_grid(&x, &p, &grid).unwrap();
                for (i, &t) in grid.t_nodes().iter().enumerate() {
                    if dist(t) == 0.0 {
                        continue;
                    }
                    assert!(
                        (on_grid.values()[i] - want(t)).abs() < 1e-10,
                        "{alpha} {side:?} node {i}"
                    );
                }
                for t in [1.1, 1.5, 1.93] {
                    let got = caputo_deriv(&x, &p, &dom(), t, 0).unwrap().value;
                    assert!(
                        (got - want(t)).abs() < 1e-10,
                        "{alpha} {rho} {side:?} {t}: {got} vs {}",
                        want(t)
                    );
                }
                let d = anchor_derivatives(&x, &p, &dom()).unwrap();
                assert_eq!(d[0], 2.0);
                if p.n() == 2 {
                    assert!((d[1] - side.sign() * rho * 0.5).abs() < 1e-10, "{d:?}");
                }
            }
        }
        let grid = WGrid::new(dom(), 1.0, 64).unwrap();
        let x = FuncSpec::Sampled(Sampled::from_fn(grid, Ok).unwrap());
        let p = OrderParams::left(2.5, 1.0).unwrap();
        assert!(matches!(
            caputo_deriv(&x, &p, &dom(), 1.5, 0),
            Err(Error::Order(_))
        ));
    }

    #[test]
    fn sweeps_match_pointwise_evaluation() {
        let rho = 0.8;
        let grid = WGrid::new(dom(), rho, 256).unwrap();
        let e = crate::expr::parse("exp(t)").unwrap();
        let w = grid.w_nodes();
        for side in [Side::Left, Side::Right] {
            let p = OrderParams::new(0.35, rho, side).unwrap();
            let d1 = eval_nodes(&modified_diff_w(&e, 1, rho).unwrap(), w).unwrap();
            let d0 = eval_nodes(&modified_diff_w(&e, 0, rho).unwrap(), w).unwrap();
            let sweep = caputo_sweep(&d1, &d0, &grid, &p).unwrap();
            let ints = integral_sweep(&d0, &grid, 0.35, side, 0.0);
            for i in [0, 77, 256] {
                let t = grid.t_nodes()[i];
                let c = caputo_deriv(&FuncSpec::Expr(e.clone()), &p, &dom(), t, 256).unwrap();
                let q = frac_integral(
                    &FuncSpec::Expr(e.clone()),
                    &p.with_side(side),
                    &dom(),
                    t,
                    256,
                )
                .unwrap();
                // different node counts per point; both are second-order accurate
                assert!((sweep[i] - c.value).abs() < 1e-5, "{side:?} {i}");
                assert!((ints[i] - q.value).abs() < 1e-5, "{side:?} {i}");
            }
        }
    }

    #[test]
    fn evaluate_many_is_pointwise() {
        let p = OrderParams::left(0.5, 1.0).unwrap();
        let ts = [1.0, 1.25, 1.5, 2.0];
        let all = evaluate_many(OperatorKind::Caputo, &f("t^3"), &p, &dom(), &ts, 64).unwrap();
        for (t, r) in ts.iter().zip(&all) {
            assert_eq!(*r, caputo_deriv(&f("t^3"), &p, &dom(), *t, 64).unwrap());
        }
    }

    #[test]
    fn ibp_examples() {
        let p = OrderParams::left(0.5, 1.0).unwrap();
        let r = ibp_residual(&f("t^2 + 1"), &f("3"), &p, &dom(), 2048).unwrap();
        assert!(r <= 1e-6, "{r}");
        assert_eq!(
            ibp_residual(&f("0"), &f("exp(t)"), &p, &dom(), 64).unwrap(),
            0.0
        );
        let terms = ibp_terms(&f("1"), &f("(t - 1)^2"), &p, &dom(), 4096).unwrap();
        // both sides equal 2/Γ(3.5)
        let exact = 2.0 / gamma(3.5).unwrap();
        assert!((terms.lhs - exact).abs() < 1e-5, "{terms:?}");
        assert!(terms.residual <= 1e-4, "{terms:?}");
        assert!(ibp_residual(&f("1"), &f("t"), &p.with_side(Side::Right), &dom(), 64).is_err());
    }
}
