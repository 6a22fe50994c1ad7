//! Initial-value problems `^C𝒟^{α,ρ}_{a+} x = f(t, x)`, `x_(k)(a) = c_k`.
//!
//! The problem is solved in its Volterra form
//! `x(t) = Σ_{k<n} ρ^{−k}/k!·(t^ρ−a^ρ)^k c_k + 𝓘^{α,ρ}f(·, x)(t)`.
//! In `w = t^ρ` this is a classical Caputo problem with right-hand side
//! `ρ^{−α} f`, stepped with the fractional Adams predictor-corrector (PECE)
//! on a uniform w-grid.

use crate::closed_forms::taylor_polynomial;
use crate::error::{Error, Result};
use crate::expr::FuncSpec;
use crate::mesh::{pow_rho, Domain, WGrid};
use crate::operators::{OrderParams, Side};
use crate::quadrature::{product_trapezoid_at, HatTable, L1Table};

/// States above this magnitude abort the solve.
const BLOW_UP: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct FdeProblem {
    params: OrderParams,
    domain: Domain,
    f: FuncSpec,
    init: Vec<f64>,
}

impl FdeProblem {
    /// `init[k]` is the modified derivative `x_(k)(a)`, one per `k < ⌈α⌉`.
    pub fn new(params: OrderParams, domain: Domain, f: FuncSpec, init: Vec<f64>) -> Result<Self> {
        if params.side() != Side::Left {
            return Err(Error::Domain(
                "initial-value problems are left-sided".into(),
            ));
        }
        let n = params.alpha().ceil() as usize;
        if init.len() != n {
            return Err(Error::Domain(format!(
                "alpha = {} needs {n} initial values, got {}",
                params.alpha(),
                init.len()
            )));
        }
        if let Some(c) = init.iter().find(|c| !c.is_finite()) {
            return Err(Error::NonFinite(format!("initial value {c}")));
        }
        Ok(FdeProblem {
            params,
            domain,
            f,
            init,
        })
    }

    pub fn params(&self) -> &OrderParams {
        &self.params
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn f(&self) -> &FuncSpec {
        &self.f
    }

    pub fn init(&self) -> &[f64] {
        &self.init
    }

    fn taylor(&self, w: f64, w0: f64) -> f64 {
        taylor_polynomial(&self.init, self.params.rho(), w - w0)
    }

    /// `ρ^{−α} f(t, x)`.
    fn rhs(&self, scale: f64, t: f64, x: f64) -> Result<f64> {
        Ok(scale * self.f.eval_tx(t, x)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub grid: WGrid,
    pub values: Vec<f64>,
    /// Largest mismatch between the values and the Volterra right-hand side.
    pub residual_norm: f64,
}

fn check_grid(p: &FdeProblem, grid: &WGrid) -> Result<()> {
    if grid.domain() != p.domain || grid.rho() != p.params.rho() {
        return Err(Error::Domain(
            "grid does not match the problem's domain and rho".into(),
        ));
    }
    Ok(())
}

/// The Volterra right-hand side at `t`, with `f(τ, x(τ))` taken from the
/// node values `trace` (starting at `a`) on `grid` and interpolated linearly
/// in w between them.
pub fn volterra_rhs(p: &FdeProblem, grid: &WGrid, trace: &[f64], t: f64) -> Result<f64> {
    check_grid(p, grid)?;
    p.domain.check_point(t)?;
    let (alpha, rho) = (p.params.alpha(), p.params.rho());
    let w0 = grid.w_nodes()[0];
    let len = (pow_rho(t, rho) - w0).max(0.0);
    let h = grid.h();
    let needed = ((len / h) * (1.0 - 1e-12)).ceil() as usize + 1;
    if trace.len() < needed.min(grid.cells() + 1) || trace.len() > grid.cells() + 1 {
        return Err(Error::Domain(format!(
            "trace of {} values does not cover [a, {t}] on a grid of {} cells",
            trace.len(),
            grid.cells()
        )));
    }
    let scale = rho.powf(-alpha);
    let fv = trace
        .iter()
        .zip(grid.t_nodes())
        .map(|(&x, &ti)| p.rhs(scale, ti, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(p.taylor(w0 + len, w0) + product_trapezoid_at(alpha, h, &fv, len))
}

fn blow_up(step: usize, value: f64) -> Result<()> {
    if !(value.abs() <= BLOW_UP) {
        return Err(Error::BlowUp { step, value });
    }
    Ok(())
}

/// Fractional Adams–Bashforth–Moulton with one corrector pass per step on
/// `n_cells` cells uniform in w.
pub fn solve(p: &FdeProblem, n_cells: usize) -> Result<Solution> {
    let grid = WGrid::new(p.domain, p.params.rho(), n_cells)?;
    let (alpha, rho) = (p.params.alpha(), p.params.rho());
    let scale = rho.powf(-alpha);
    let h = grid.h();
    let (w, t) = (grid.w_nodes(), grid.t_nodes());
    let hat = HatTable::new(alpha, h, n_cells);
    let rect = L1Table::new(alpha, h, n_cells);

    let mut x = Vec::with_capacity(n_cells + 1);
    let mut fv = Vec::with_capacity(n_cells + 1);
    x.push(p.init[0]);
    blow_up(0, x[0])?;
    fv.push(p.rhs(scale, t[0], x[0])?);
    for m in 0..n_cells {
        let taylor = p.taylor(w[m + 1], w[0]);
        let mut pred = taylor;
        let mut hist = taylor;
        for j in 0..=m {
            let c = m - j;
            pred += rect.weight(c) * fv[j];
            let far = hat.weights(c).0;
            hist += far * fv[j];
            if j > 0 {
                hist += hat.weights(c + 1).1 * fv[j];
            }
        }
        blow_up(m + 1, pred)?;
        let f_pred = p.rhs(scale, t[m + 1], pred)?;
        let xn = hist + hat.weights(0).1 * f_pred;
        blow_up(m + 1, xn)?;
        let fx = p.rhs(scale, t[m + 1], xn)?;
        blow_up(m + 1, fx)?;
        x.push(xn);
        fv.push(fx);
    }
    let residual_norm = residual_from(p, &grid, &x, &fv, &hat);
    Ok(Solution {
        grid,
        values: x,
        residual_norm,
    })
}

fn residual_from(p: &FdeProblem, grid: &WGrid, x: &[f64], fv: &[f64], hat: &HatTable) -> f64 {
    let w = grid.w_nodes();
    let integrals = hat.sweep(fv);
    (0..x.len())
        .map(|i| (x[i] - p.taylor(w[i], w[0]) - integrals[i]).abs())
        .fold(0.0, f64::max)
}

/// `max_i |x_i − volterra_rhs(x, t_i)|` over the solution's nodes.
pub fn residual(p: &FdeProblem, s: &Solution) -> Result<f64> {
    check_grid(p, &s.grid)?;
    if s.values.len() != s.grid.cells() + 1 {
        return Err(Error::Domain(
            "solution values do not match its grid".into(),
        ));
    }
    let (alpha, rho) = (p.params.alpha(), p.params.rho());
    let scale = rho.powf(-alpha);
    let fv = s
        .values
        .iter()
        .zip(s.grid.t_nodes())
        .map(|(&x, &t)| p.rhs(scale, t, x))
        .collect::<Result<Vec<_>>>()?;
    let hat = HatTable::new(alpha, s.grid.h(), s.grid.cells());
    Ok(residual_from(p, &s.grid, &s.values, &fv, &hat))
}
