//! Exact values that the numerical operators are checked against: the power
//! rule, the Mittag-Leffler eigenfunction and the Taylor remainder left by
//! integrating a Caputo derivative.

use crate::error::{Error, Result};
use crate::expr::FuncSpec;
use crate::mesh::{pow_rho, Domain};
use crate::operators::{anchor_derivatives, OrderParams, Side};
use crate::specfun::{gamma, ml};

/// `t^ρ − a^ρ` (left) or `b^ρ − t^ρ` (right).
fn distance(p: &OrderParams, dom: &Domain, t: f64) -> Result<f64> {
    if !dom.contains(t) {
        return Err(Error::Domain(format!(
            "t = {t} outside [{}, {}]",
            dom.a(),
            dom.b()
        )));
    }
    let w = pow_rho(t, p.rho());
    Ok(match p.side() {
        Side::Left => (w - pow_rho(dom.a(), p.rho())).max(0.0),
        Side::Right => (pow_rho(dom.b(), p.rho()) - w).max(0.0),
    })
}

/// `x(t) = (t^ρ − a^ρ)^v` (left) or `(b^ρ − t^ρ)^v` (right) with v > n − 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFunc {
    v: f64,
    params: OrderParams,
    domain: Domain,
}

impl PowerFunc {
    pub fn new(v: f64, params: OrderParams, domain: Domain) -> Result<Self> {
        let lower = params.n() as f64 - 1.0;
        if !(v > lower && v.is_finite()) {
            return Err(Error::Domain(format!(
                "power rule needs v > n - 1 = {lower}, got {v}"
            )));
        }
        Ok(PowerFunc { v, params, domain })
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn params(&self) -> &OrderParams {
        &self.params
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        Ok(distance(&self.params, &self.domain, t)?.powf(self.v))
    }

    /// The function as a parseable expression.
    pub fn to_func_spec(&self) -> Result<FuncSpec> {
        let (rho, v) = (self.params.rho(), self.v);
        let text = match self.params.side() {
            Side::Left => format!("(t^{rho} - {}^{rho})^{v}", self.domain.a()),
            Side::Right => format!("({}^{rho} - t^{rho})^{v}", self.domain.b()),
        };
        FuncSpec::parse(&text)
    }
}

/// `ρ^α Γ(v+1)/Γ(v−α+1)·(t^ρ − a^ρ)^{v−α}`, the Caputo–Katugampola
/// derivative of [`PowerFunc`] (with `b^ρ − t^ρ` on the right).
pub fn power_rule(pf: &PowerFunc, t: f64) -> Result<f64> {
    let p = &pf.params;
    p.require_fractional()?;
    let d = distance(p, &pf.domain, t)?;
    let (a, v) = (p.alpha(), pf.v);
    Ok(p.rho().powf(a) * gamma(v + 1.0)? / gamma(v - a + 1.0)? * d.powf(v - a))
}

/// `(E_α(λ d^α), λρ^α E_α(λ d^α))` with `d = t^ρ − a^ρ` (left) or
/// `b^ρ − t^ρ` (right): a function and its Caputo–Katugampola derivative.
pub fn ml_eigenpair(
    lambda: f64,
    params: &OrderParams,
    domain: &Domain,
    t: f64,
) -> Result<(f64, f64)> {
    let d = distance(params, domain, t)?;
    let a = params.alpha();
    let e = if lambda == 0.0 || d == 0.0 {
        1.0
    } else {
        ml(a, lambda * d.powf(a))?
    };
    Ok((e, lambda * params.rho().powf(a) * e))
}

/// `Σ_{k<n} ρ^{−k}/k!·d^k·c_k`, the Taylor part fixed by the initial values
/// `c_k = x_(k)(a)` at distance `d = t^ρ − a^ρ`.
pub fn taylor_polynomial(coeffs: &[f64], rho: f64, d: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for (k, c) in coeffs.iter().enumerate() {
        if k > 0 {
            term *= d / (rho * k as f64);
        }
        sum += term * c;
    }
    sum
}

/// `x(t) − Σ_{k<n} ρ^{−k}/k!·(t^ρ − a^ρ)^k x_(k)(a)` (left) or
/// `x(t) − Σ_{k<n} ρ^{−k}(−1)^k/k!·(b^ρ − t^ρ)^k x_(k)(b)` (right).
pub fn taylor_remainder(
    x: &FuncSpec,
    params: &OrderParams,
    domain: &Domain,
    t: f64,
) -> Result<f64> {
    let d = distance(params, domain, t)?;
    let mut c = anchor_derivatives(x, params, domain)?;
    if params.side() == Side::Right {
        for (k, ck) in c.iter_mut().enumerate() {
            if k % 2 == 1 {
                *ck = -*ck;
            }
        }
    }
    Ok(x.eval(t)? - taylor_polynomial(&c, params.rho(), d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dom() -> Domain {
        Domain::new(1.0, 2.0).unwrap()
    }

    #[test]
    fn power_rule_examples() {
        let p = OrderParams::left(0.5, 2.0).unwrap();
        let pf = PowerFunc::new(1.0, p, dom()).unwrap();
        let got = power_rule(&pf, 2f64.sqrt()).unwrap();
        assert!((got - 1.595_769_121_605_730_711_8).abs() < 1e-14);
        // v = α: constant ρ^α Γ(α+1)
        let pf = PowerFunc::new(0.5, p, dom()).unwrap();
        let want = 2f64.sqrt() * gamma(1.5).unwrap();
        for t in [1.1, 1.5, 2.0] {
            assert!((power_rule(&pf, t).unwrap() - want).abs() < 1e-14);
        }
        let pf = PowerFunc::new(1.7, p, dom()).unwrap();
        assert_eq!(power_rule(&pf, 1.0).unwrap(), 0.0);
        assert!(PowerFunc::new(0.9, OrderParams::left(1.5, 1.0).unwrap(), dom()).is_err());
    }

    #[test]
    fn power_func_expression_round_trip() {
        for side in [Side::Left, Side::Right] {
            let p = OrderParams::new(0.4, 0.7, side).unwrap();
            let pf = PowerFunc::new(2.3, p, dom()).unwrap();
            let e = pf.to_func_spec().unwrap();
            for t in [1.0, 1.4, 2.0] {
                assert!((e.eval(t).unwrap() - pf.value(t).unwrap()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn ml_eigenpair_examples() {
        let p = OrderParams::left(0.5, 1.0).unwrap();
        assert_eq!(ml_eigenpair(0.0, &p, &dom(), 1.6).unwrap(), (1.0, 0.0));
        assert_eq!(ml_eigenpair(0.7, &p, &dom(), 1.0).unwrap(), (1.0, 0.7));
        let (v, d) = ml_eigenpair(1.0, &p, &dom(), 2.0).unwrap();
        assert!((v - 5.008_980_080_762_283_466_3).abs() < 1e-13);
        assert_eq!(v, d);
    }

    #[test]
    fn taylor_remainder_examples() {
        let p = OrderParams::left(0.5, 1.0).unwrap();
        let x = FuncSpec::parse("exp(t)").unwrap();
        let r = taylor_remainder(&x, &p, &dom(), 1.5).unwrap();
        assert!((r - (1.5f64.exp() - 1f64.exp())).abs() < 1e-14);
        let p2 = OrderParams::left(1.5, 1.0).unwrap();
        let sq = FuncSpec::parse("(t - 1)^2").unwrap();
        assert!((taylor_remainder(&sq, &p2, &dom(), 1.7).unwrap() - 0.49).abs() < 1e-14);
        let c = FuncSpec::parse("2.5").unwrap();
        for side in [Side::Left, Side::Right] {
            let p = OrderParams::new(1.3, 0.6, side).unwrap();
            assert_eq!(taylor_remainder(&c, &p, &dom(), 1.2).unwrap(), 0.0);
        }
    }

    proptest! {
        #[test]
        fn classical_power_rule_at_rho_one(alpha in 0.05f64..2.95, extra in 0.01f64..3.0, t in 1.0f64..2.0) {
            prop_assume!(alpha.fract() > 1e-3);
            let p = OrderParams::left(alpha, 1.0).unwrap();
            let v = p.n() as f64 - 1.0 + extra;
            let pf = PowerFunc::new(v, p, dom()).unwrap();
            let want = gamma(v + 1.0).unwrap() / gamma(v - alpha + 1.0).unwrap() * (t - 1.0).powf(v - alpha);
            prop_assert_eq!(power_rule(&pf, t).unwrap(), want);
        }

        #[test]
        fn eigenpair_ratio_is_lambda_rho_alpha(lambda in -2.0f64..2.0, alpha in 0.1f64..0.95, rho in 0.3f64..3.0, t in 1.0f64..2.0) {
            let p = OrderParams::left(alpha, rho).unwrap();
            let (v, d) = match ml_eigenpair(lambda, &p, &dom(), t) {
                Err(Error::PrecisionLoss(_) | Error::Overflow(_)) => return Ok(()),
                r => r.unwrap(),
            };
            prop_assume!(v != 0.0);
            let want = lambda * rho.powf(alpha);
            prop_assert!((d / v - want).abs() <= 1e-15 * want.abs().max(1.0));
        }

        #[test]
        fn remainder_of_low_degree_polynomial_vanishes(c0 in -3.0f64..3.0, c1 in -3.0f64..3.0, rho in 0.3f64..3.0, t in 1.0f64..2.0, right in any::<bool>()) {
            let side = if right { Side::Right } else { Side::Left };
            let p = OrderParams::new(1.5, rho, side).unwrap();
            let anchor = if right { 2.0 } else { 1.0 };
            let x = FuncSpec::parse(&format!("{c0} + {c1}*(t^{rho} - {anchor}^{rho})")).unwrap();
            prop_assert!(taylor_remainder(&x, &p, &dom(), t).unwrap().abs() <= 1e-12);
        }
    }
}
