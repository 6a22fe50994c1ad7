//! User-supplied scalar functions.
//!
//! Expressions in `t` (and `x` for right-hand sides of differential
//! equations) are parsed, evaluated and differentiated symbolically. The
//! ρ-modified derivative `x_(k) = (t^{1−ρ} d/dt)^k x` is exact for
//! expressions and a finite-difference approximation for sampled data.

mod ast;
mod diff;
mod parser;

pub use ast::{BinOp, Env, Expr, UnOp, Var};
pub use diff::{diff, modified_diff_direct, modified_diff_expr, simplify};
pub use parser::parse;

pub(crate) use diff::modified_diff_w;

use crate::error::{Error, Result};
use crate::mesh::{pow_rho, WGrid};

/// Values on a [`WGrid`], interpolated piecewise linearly in w.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled {
    grid: WGrid,
    values: Vec<f64>,
}

impl Sampled {
    pub fn new(grid: WGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cells() + 1 {
            return Err(Error::Domain(format!(
                "sampled function needs {} values, got {}",
                grid.cells() + 1,
                values.len()
            )));
        }
        Ok(Sampled { grid, values })
    }

    /// Samples `f` at the grid's t-nodes.
    pub fn from_fn(grid: WGrid, mut f: impl FnMut(f64) -> Result<f64>) -> Result<Self> {
        let values = grid
            .t_nodes()
            .iter()
            .map(|&t| f(t))
            .collect::<Result<Vec<_>>>()?;
        Sampled::new(grid, values)
    }

    pub fn grid(&self) -> &WGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Linear interpolation in w at the point `w`.
    pub(crate) fn eval_w(&self, w: f64) -> f64 {
        let nodes = self.grid.w_nodes();
        let i = self.grid.cell_of_w(w);
        let s = (w - nodes[i]) / self.grid.h();
        self.values[i] + s * (self.values[i + 1] - self.values[i])
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.grid.domain().check_point(t)?;
        Ok(self.eval_w(pow_rho(t, self.grid.rho())))
    }

    /// Finite-difference `x_(k)` for k ≤ 2: central differences in w scaled
    /// by ρ^k, second-order one-sided at the endpoints.
    pub fn modified_diff(&self, k: usize) -> Result<Sampled> {
        let v = &self.values;
        let n = v.len();
        let h = self.grid.h();
        let rho = self.grid.rho();
        let out = match k {
            0 => v.clone(),
            1 => first_difference(v, h)
                .into_iter()
                .map(|d| rho * d)
                .collect(),
            2 => {
                if n < 4 {
                    return Err(Error::Order("second difference needs N >= 3".into()));
                }
                let s = rho * rho / (h * h);
                let mut d = vec![0.0; n];
                d[0] = s * (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]);
                d[n - 1] = s * (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]);
                for i in 1..n - 1 {
                    d[i] = s * (v[i + 1] - 2.0 * v[i] + v[i - 1]);
                }
                d
            }
            _ => {
                return Err(Error::Order(format!(
                    "sampled functions support modified derivatives up to order 2, got {k}"
                )))
            }
        };
        Sampled::new(self.grid.clone(), out)
    }
}

/// Derivative of equally spaced samples: central differences inside,
/// second-order one-sided at both ends. Needs at least three samples.
pub(crate) fn first_difference(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let s = 1.0 / (2.0 * h);
    let mut d = vec![0.0; n];
    d[0] = s * (-3.0 * v[0] + 4.0 * v[1] - v[2]);
    d[n - 1] = s * (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]);
    for i in 1..n - 1 {
        d[i] = s * (v[i + 1] - v[i - 1]);
    }
    d
}

/// A real function of `t` (or of `(t, x)`), given as an expression or as
/// samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub enum FuncSpec {
    Expr(Expr),
    Sampled(Sampled),
}

impl FuncSpec {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(FuncSpec::Expr(parse(text)?))
    }

    pub fn constant(c: f64) -> Self {
        FuncSpec::Expr(Expr::Const(c))
    }

    /// Value at `t` of a function of `t` alone.
    pub fn eval(&self, t: f64) -> Result<f64> {
        match self {
            FuncSpec::Expr(e) => e.eval(&Env::t(t)),
            FuncSpec::Sampled(s) => s.eval(t),
        }
    }

    /// Value at `(t, x)`; sampled functions ignore `x`.
    pub fn eval_tx(&self, t: f64, x: f64) -> Result<f64> {
        match self {
            FuncSpec::Expr(e) => e.eval(&Env::tx(t, x)),
            FuncSpec::Sampled(s) => s.eval(t),
        }
    }

    /// True when the function does not depend on `x`.
    pub fn is_function_of_t(&self) -> bool {
        match self {
            FuncSpec::Expr(e) => !e.contains(Var::X),
            FuncSpec::Sampled(_) => true,
        }
    }

    /// The ρ-modified derivative `x_(k)`.
    pub fn modified_diff(&self, k: usize, rho: f64) -> Result<FuncSpec> {
        modified_diff(self, k, rho)
    }
}

impl From<Expr> for FuncSpec {
    fn from(e: Expr) -> Self {
        FuncSpec::Expr(e)
    }
}

impl From<Sampled> for FuncSpec {
    fn from(s: Sampled) -> Self {
        FuncSpec::Sampled(s)
    }
}

/// `x_(k)(t) = (t^{1−ρ} d/dt)^k x(t)`.
///
/// Expressions are differentiated exactly in w = t^ρ; sampled functions use
/// finite differences and must live on a grid built with the same ρ.
pub fn modified_diff(spec: &FuncSpec, k: usize, rho: f64) -> Result<FuncSpec> {
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("rho must be positive, got {rho}")));
    }
    match spec {
        FuncSpec::Expr(e) => Ok(FuncSpec::Expr(modified_diff_expr(e, k, rho)?)),
        FuncSpec::Sampled(s) => {
            if s.grid.rho() != rho {
                return Err(Error::Domain(format!(
                    "sampled grid uses rho = {}, derivative requested for rho = {rho}",
                    s.grid.rho()
                )));
            }
            Ok(FuncSpec::Sampled(s.modified_diff(k)?))
        }
    }
}
