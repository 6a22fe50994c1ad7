//! Product-integration weights for the Abel kernel `(T − w)^{β−1}/Γ(β)` on
//! uniform grids.
//!
//! Distances are measured from the evaluation point: a cell at distance `c`
//! (in units of the step `h`) is `[T − (c+1)h, T − ch]`. Two rules are
//! provided:
//!
//! - product trapezoid: the integrand is interpolated linearly on each cell
//!   and integrated exactly against the kernel ([`hat_weights`]);
//! - L1: the integrand is a piecewise-constant slope, e.g. the derivative of
//!   a piecewise-linear interpolant ([`l1_weight`]).
//!
//! All weights are formed in log scale so that β from 1e-4 up to a few
//! hundred neither overflows nor loses the small differences
//! `(c+1)^β − c^β`.

use rayon::prelude::*;

use crate::specfun::ln_gamma;

/// 8-point Gauss–Legendre rule on [0, 1].
const GL8: [(f64, f64); 8] = [
    (0.019855071751231884, 0.05061426814518813),
    (0.10166676129318664, 0.11119051722668724),
    (0.2372337950418355, 0.15685332293894363),
    (0.4082826787521751, 0.181341891689181),
    (0.591717321247825, 0.181341891689181),
    (0.7627662049581645, 0.15685332293894363),
    (0.8983332387068134, 0.11119051722668724),
    (0.9801449282487681, 0.05061426814518813),
];

fn lgamma(x: f64) -> f64 {
    ln_gamma(x).expect("kernel order is positive")
}

/// `1 − (c/(c+1))^p` without cancellation.
fn one_minus_ratio_pow(c: f64, p: f64) -> f64 {
    if c == 0.0 {
        1.0
    } else {
        -(-p * (1.0 / c).ln_1p()).exp_m1()
    }
}

/// Kernel moments against the two hat functions of one cell.
///
/// Returns `(far, near)`: `far` multiplies the value at `T − (c+1)h`, `near`
/// the value at `T − ch`. `c >= 0` need not be an integer.
pub fn hat_weights(beta: f64, h: f64, c: f64) -> (f64, f64) {
    hat_weights_scaled(beta, h, c, 0.0)
}

/// [`hat_weights`] multiplied by `exp(log_scale)`.
pub(crate) fn hat_weights_scaled(beta: f64, h: f64, c: f64, log_scale: f64) -> (f64, f64) {
    if c >= 32.0 * beta.max(1.0) {
        // (c+u)^{β−1} = c^{β−1}(1+u/c)^{β−1}, smooth on [0, 1]
        let pre = (log_scale + beta * h.ln() + (beta - 1.0) * c.ln() - lgamma(beta)).exp();
        let (mut far, mut near) = (0.0, 0.0);
        for (u, wt) in GL8 {
            let k = ((beta - 1.0) * (u / c).ln_1p()).exp();
            far += wt * u * k;
            near += wt * (1.0 - u) * k;
        }
        return (pre * far, pre * near);
    }
    let pre = (log_scale + beta * (h * (c + 1.0)).ln() - lgamma(beta)).exp();
    let m0 = one_minus_ratio_pow(c, beta) / beta;
    // ∫₀¹ u(c+u)^{β−1} du / (c+1)^β
    let m1 = (c + 1.0) * one_minus_ratio_pow(c, beta + 1.0) / (beta + 1.0) - c * m0;
    (pre * m1, pre * (m0 - m1))
}

/// `∫` of the kernel over one cell at distance `c`:
/// `h^β((c+1)^β − c^β)/Γ(β+1)`.
pub fn l1_weight(beta: f64, h: f64, c: f64) -> f64 {
    l1_weight_scaled(beta, h, c, 0.0)
}

pub(crate) fn l1_weight_scaled(beta: f64, h: f64, c: f64, log_scale: f64) -> f64 {
    (log_scale + beta * (h * (c + 1.0)).ln() - lgamma(beta + 1.0)).exp()
        * one_minus_ratio_pow(c, beta)
}

/// Product-trapezoid weights for every integer distance `0..cells`.
#[derive(Debug, Clone)]
pub struct HatTable {
    far: Vec<f64>,
    near: Vec<f64>,
}

impl HatTable {
    pub fn new(beta: f64, h: f64, cells: usize) -> Self {
        Self::scaled(beta, h, cells, 0.0)
    }

    pub(crate) fn scaled(beta: f64, h: f64, cells: usize, log_scale: f64) -> Self {
        let (far, near) = (0..cells)
            .map(|c| hat_weights_scaled(beta, h, c as f64, log_scale))
            .unzip();
        HatTable { far, near }
    }

    pub fn cells(&self) -> usize {
        self.far.len()
    }

    /// `(far, near)` at integer distance `c`.
    pub fn weights(&self, c: usize) -> (f64, f64) {
        (self.far[c], self.near[c])
    }

    /// Integral from `f[0]`'s node to the last node of `f`.
    pub fn apply(&self, f: &[f64]) -> f64 {
        let m = f.len() - 1;
        assert!(m <= self.cells(), "table too short");
        let mut s = 0.0;
        for j in 0..m {
            let c = m - 1 - j;
            s += self.far[c] * f[j] + self.near[c] * f[j + 1];
        }
        s
    }

    /// Integral up to every node; entry 0 is 0.
    pub fn sweep(&self, f: &[f64]) -> Vec<f64> {
        (0..f.len())
            .into_par_iter()
            .map(|i| self.apply(&f[..=i]))
            .collect()
    }
}

/// L1 weights for every integer distance `0..cells`.
#[derive(Debug, Clone)]
pub struct L1Table {
    w: Vec<f64>,
}

impl L1Table {
    pub fn new(beta: f64, h: f64, cells: usize) -> Self {
        Self::scaled(beta, h, cells, 0.0)
    }

    pub(crate) fn scaled(beta: f64, h: f64, cells: usize, log_scale: f64) -> Self {
        L1Table {
            w: (0..cells)
                .map(|c| l1_weight_scaled(beta, h, c as f64, log_scale))
                .collect(),
        }
    }

    pub fn cells(&self) -> usize {
        self.w.len()
    }

    /// Weight at distance `c`.
    pub fn weight(&self, c: usize) -> f64 {
        self.w[c]
    }

    /// Integral of the piecewise-constant `slopes` up to the end of the
    /// last cell.
    pub fn apply(&self, slopes: &[f64]) -> f64 {
        let m = slopes.len();
        assert!(m <= self.cells(), "table too short");
        slopes
            .iter()
            .enumerate()
            .map(|(j, s)| s * self.w[m - 1 - j])
            .sum()
    }

    /// Integral up to every node (`slopes.len() + 1` values, the first 0).
    pub fn sweep(&self, slopes: &[f64]) -> Vec<f64> {
        (0..=slopes.len())
            .into_par_iter()
            .map(|i| self.apply(&slopes[..i]))
            .collect()
    }
}

/// Product trapezoid for nodal values `f` on a uniform grid, evaluated at
/// the last node.
pub fn product_trapezoid(beta: f64, h: f64, f: &[f64]) -> f64 {
    let m = f.len() - 1;
    let mut s = 0.0;
    for j in 0..m {
        let (far, near) = hat_weights(beta, h, (m - 1 - j) as f64);
        s += far * f[j] + near * f[j + 1];
    }
    s
}

/// L1 sum for cell slopes on a uniform grid, evaluated at the end of the
/// last cell.
pub fn l1_sum(beta: f64, h: f64, slopes: &[f64]) -> f64 {
    let m = slopes.len();
    slopes
        .iter()
        .enumerate()
        .map(|(j, s)| s * l1_weight(beta, h, (m - 1 - j) as f64))
        .sum()
}

/// Splits `len` into whole cells and a remainder, clamped to the grid.
fn split(h: f64, cells: usize, len: f64) -> (usize, f64) {
    let q = len / h;
    let k = (q.floor() as usize).min(cells);
    let rem = if k == cells {
        0.0
    } else {
        (len - k as f64 * h).max(0.0)
    };
    (k, rem)
}

/// Product trapezoid of the piecewise-linear interpolant of `f` from the
/// first node up to the point `len` past it, which need not be a node.
pub fn product_trapezoid_at(beta: f64, h: f64, f: &[f64], len: f64) -> f64 {
    let (k, rem) = split(h, f.len() - 1, len);
    let q = len / h;
    let mut s = 0.0;
    for j in 0..k {
        let (far, near) = hat_weights(beta, h, (q - (j + 1) as f64).max(0.0));
        s += far * f[j] + near * f[j + 1];
    }
    if rem > 0.0 {
        let f_end = f[k] + rem / h * (f[k + 1] - f[k]);
        let (far, near) = hat_weights(beta, rem, 0.0);
        s += far * f[k] + near * f_end;
    }
    s
}

/// L1 sum for cell slopes up to the point `len` past the first node.
pub fn l1_at(beta: f64, h: f64, slopes: &[f64], len: f64) -> f64 {
    let (k, rem) = split(h, slopes.len(), len);
    let q = len / h;
    let mut s = 0.0;
    for (j, sl) in slopes.iter().enumerate().take(k) {
        s += sl * l1_weight(beta, h, (q - (j + 1) as f64).max(0.0));
    }
    if rem > 0.0 {
        s += slopes[k] * (beta * rem.ln() - lgamma(beta + 1.0)).exp();
    }
    s
}
