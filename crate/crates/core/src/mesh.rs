//! Domains and grids uniform in the transformed variable `w = t^ρ`.

use crate::error::{Error, Result};

/// A closed interval [a, b] with 0 < a < b < ∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    a: f64,
    b: f64,
}

impl Domain {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a < b && b.is_finite()) {
            return Err(Error::Domain(format!(
                "domain requires 0 < a < b < inf, got a = {a}, b = {b}"
            )));
        }
        Ok(Domain { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.a && t <= self.b
    }

    pub(crate) fn check_point(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "t = {t} outside [{}, {}]",
                self.a, self.b
            )))
        }
    }
}

/// `w = t^ρ`.
pub fn to_w(t: f64, rho: f64) -> Result<f64> {
    if !(t > 0.0) || !(rho > 0.0) {
        return Err(Error::Domain(format!(
            "to_w needs t > 0, rho > 0 (t = {t}, rho = {rho})"
        )));
    }
    Ok(pow_rho(t, rho))
}

/// `t = w^{1/ρ}`.
pub fn from_w(w: f64, rho: f64) -> Result<f64> {
    if !(w > 0.0) || !(rho > 0.0) {
        return Err(Error::Domain(format!(
            "from_w needs w > 0, rho > 0 (w = {w}, rho = {rho})"
        )));
    }
    Ok(pow_inv_rho(w, rho))
}

#[inline]
pub(crate) fn pow_rho(t: f64, rho: f64) -> f64 {
    if rho == 1.0 {
        t
    } else {
        t.powf(rho)
    }
}

#[inline]
pub(crate) fn pow_inv_rho(w: f64, rho: f64) -> f64 {
    if rho == 1.0 {
        w
    } else {
        w.powf(1.0 / rho)
    }
}

/// N + 1 nodes on [a, b], equally spaced in `w = t^ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct WGrid {
    domain: Domain,
    rho: f64,
    h: f64,
    w: Vec<f64>,
    t: Vec<f64>,
}

impl WGrid {
    /// Builds the grid; `n` is the number of cells.
    pub fn new(domain: Domain, rho: f64, n: usize) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::Domain(format!("rho must be positive, got {rho}")));
        }
        if n < 2 {
            return Err(Error::Domain(format!("grid needs N >= 2 cells, got {n}")));
        }
        let wa = pow_rho(domain.a, rho);
        let wb = pow_rho(domain.b, rho);
        let h = (wb - wa) / n as f64;
        let mut w: Vec<f64> = (0..=n).map(|i| wa + i as f64 * h).collect();
        w[n] = wb;
        let mut t: Vec<f64> = w.iter().map(|&wi| pow_inv_rho(wi, rho)).collect();
        t[0] = domain.a;
        t[n] = domain.b;
        Ok(WGrid {
            domain,
            rho,
            h,
            w,
            t,
        })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Number of cells N.
    pub fn cells(&self) -> usize {
        self.w.len() - 1
    }

    /// Spacing in w.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn w_nodes(&self) -> &[f64] {
        &self.w
    }

    pub fn t_nodes(&self) -> &[f64] {
        &self.t
    }

    /// Index `i` with `w_i <= w < w_{i+1}`, clamped to the last cell.
    pub(crate) fn cell_of_w(&self, w: f64) -> usize {
        let n = self.cells();
        let x = (w - self.w[0]) / self.h;
        let i = if x <= 0.0 { 0 } else { x.floor() as usize };
        i.min(n - 1)
    }
}

/// Free-function form of [`WGrid::new`].
pub fn build_grid(domain: Domain, rho: f64, n: usize) -> Result<WGrid> {
    WGrid::new(domain, rho, n)
}
