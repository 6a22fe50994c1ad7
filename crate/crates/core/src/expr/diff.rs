//! Symbolic differentiation with light algebraic simplification.

use super::ast::{BinOp, Expr, UnOp, Var};
use crate::error::{Error, Result};

pub(crate) fn c(v: f64) -> Expr {
    Expr::Const(v)
}

pub(crate) fn neg(e: Expr) -> Expr {
    match e {
        Expr::Const(v) => c(-v),
        Expr::Unary(UnOp::Neg, inner) => *inner,
        e => Expr::unary(UnOp::Neg, e),
    }
}

pub(crate) fn add(l: Expr, r: Expr) -> Expr {
    match (&l, &r) {
        (Expr::Const(a), Expr::Const(b)) => c(a + b),
        (Expr::Const(a), _) if *a == 0.0 => r,
        (_, Expr::Const(b)) if *b == 0.0 => l,
        _ => Expr::binary(BinOp::Add, l, r),
    }
}

pub(crate) fn sub(l: Expr, r: Expr) -> Expr {
    match (&l, &r) {
        (Expr::Const(a), Expr::Const(b)) => c(a - b),
        (_, Expr::Const(b)) if *b == 0.0 => l,
        (Expr::Const(a), _) if *a == 0.0 => neg(r),
        _ => Expr::binary(BinOp::Sub, l, r),
    }
}

pub(crate) fn mul(l: Expr, r: Expr) -> Expr {
    match (&l, &r) {
        (Expr::Const(a), Expr::Const(b)) => c(a * b),
        (Expr::Const(a), _) if *a == 0.0 => c(0.0),
        (_, Expr::Const(b)) if *b == 0.0 => c(0.0),
        (Expr::Const(a), _) if *a == 1.0 => r,
        (_, Expr::Const(b)) if *b == 1.0 => l,
        (Expr::Const(a), _) if *a == -1.0 => neg(r),
        (_, Expr::Const(b)) if *b == -1.0 => neg(l),
        _ => Expr::binary(BinOp::Mul, l, r),
    }
}

pub(crate) fn div(l: Expr, r: Expr) -> Expr {
    match (&l, &r) {
        (Expr::Const(a), Expr::Const(b)) if *b != 0.0 => c(a / b),
        (Expr::Const(a), _) if *a == 0.0 => c(0.0),
        (_, Expr::Const(b)) if *b == 1.0 => l,
        _ => Expr::binary(BinOp::Div, l, r),
    }
}

pub(crate) fn pow(b: Expr, p: Expr) -> Expr {
    match (&b, &p) {
        (_, Expr::Const(e)) if *e == 0.0 => c(1.0),
        (_, Expr::Const(e)) if *e == 1.0 => b,
        (Expr::Const(x), Expr::Const(e)) if *x > 0.0 => c(x.powf(*e)),
        // (v^p)^q = v^(pq) for the positive coordinates t and w
        (Expr::Binary(BinOp::Pow, base, inner), Expr::Const(q))
            if matches!(**base, Expr::Var(Var::T | Var::W)) =>
        {
            if let Expr::Const(p0) = **inner {
                return pow((**base).clone(), c(p0 * q));
            }
            Expr::binary(BinOp::Pow, b, p)
        }
        _ => Expr::binary(BinOp::Pow, b, p),
    }
}

pub(crate) fn func(op: UnOp, e: Expr) -> Expr {
    if let Expr::Const(v) = e {
        let val = Expr::unary(op, c(v))
            .eval(&Default::default())
            .unwrap_or(f64::NAN);
        if val.is_finite() {
            return c(val);
        }
    }
    Expr::unary(op, e)
}

/// Exact symbolic derivative of `e` with respect to `v`.
///
/// A power whose base and exponent both depend on `v` is rejected with
/// [`Error::UnsupportedDerivative`].
pub fn diff(e: &Expr, v: Var) -> Result<Expr> {
    Ok(match e {
        Expr::Const(_) => c(0.0),
        Expr::Var(u) => c(if *u == v { 1.0 } else { 0.0 }),
        Expr::Unary(op, a) => {
            let da = diff(a, v)?;
            if da == c(0.0) {
                return Ok(c(0.0));
            }
            let a = (**a).clone();
            match op {
                UnOp::Neg => neg(da),
                UnOp::Exp => mul(func(UnOp::Exp, a), da),
                UnOp::Ln => div(da, a),
                UnOp::Sin => mul(func(UnOp::Cos, a), da),
                UnOp::Cos => neg(mul(func(UnOp::Sin, a), da)),
                UnOp::Sqrt => div(da, mul(c(2.0), func(UnOp::Sqrt, a))),
            }
        }
        Expr::Binary(op, l, r) => {
            let dl = diff(l, v)?;
            let dr = diff(r, v)?;
            let (l, r) = ((**l).clone(), (**r).clone());
            match op {
                BinOp::Add => add(dl, dr),
                BinOp::Sub => sub(dl, dr),
                BinOp::Mul => add(mul(dl, r.clone()), mul(l, dr)),
                BinOp::Div => {
                    if !r.contains(v) {
                        div(dl, r)
                    } else {
                        div(sub(mul(dl, r.clone()), mul(l, dr)), pow(r, c(2.0)))
                    }
                }
                BinOp::Pow => {
                    let base_dep = l.contains(v);
                    let exp_dep = r.contains(v);
                    match (base_dep, exp_dep) {
                        (false, false) => c(0.0),
                        (true, false) => {
                            let lower = sub(r.clone(), c(1.0));
                            mul(mul(r, pow(l, lower)), dl)
                        }
                        (false, true) => mul(mul(pow(l.clone(), r), func(UnOp::Ln, l)), dr),
                        (true, true) => {
                            return Err(Error::UnsupportedDerivative(format!(
                                "({l})^({r}) has a {}-dependent base and exponent",
                                v.name()
                            )));
                        }
                    }
                }
            }
        }
    })
}

/// Rebuilds the tree through the simplifying constructors.
pub fn simplify(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) | Expr::Var(_) => e.clone(),
        Expr::Unary(UnOp::Neg, a) => neg(simplify(a)),
        Expr::Unary(op, a) => func(*op, simplify(a)),
        Expr::Binary(op, l, r) => {
            let (l, r) = (simplify(l), simplify(r));
            match op {
                BinOp::Add => add(l, r),
                BinOp::Sub => sub(l, r),
                BinOp::Mul => mul(l, r),
                BinOp::Div => div(l, r),
                BinOp::Pow => pow(l, r),
            }
        }
    }
}

/// `(d/dw)^k` of `x(w^{1/ρ})`, scaled by `ρ^k`, as an expression in `w`.
///
/// This is the ρ-modified derivative `(t^{1−ρ} d/dt)^k x` written in the
/// coordinate w = t^ρ.
pub(crate) fn modified_diff_w(e: &Expr, k: usize, rho: f64) -> Result<Expr> {
    let t_of_w = pow(Expr::Var(Var::W), c(1.0 / rho));
    let mut d = simplify(&e.substitute(Var::T, &t_of_w));
    for _ in 0..k {
        d = diff(&d, Var::W)?;
    }
    Ok(mul(c(rho.powi(k as i32)), d))
}

/// ρ-modified derivative as an expression in `t`, computed in w-coordinates.
pub fn modified_diff_expr(e: &Expr, k: usize, rho: f64) -> Result<Expr> {
    let in_w = modified_diff_w(e, k, rho)?;
    Ok(simplify(
        &in_w.substitute(Var::W, &pow(Expr::Var(Var::T), c(rho))),
    ))
}

/// The same derivative by repeated application of `t^{1−ρ}·d/dt`.
pub fn modified_diff_direct(e: &Expr, k: usize, rho: f64) -> Result<Expr> {
    let mut d = e.clone();
    for _ in 0..k {
        d = mul(pow(Expr::Var(Var::T), c(1.0 - rho)), diff(&d, Var::T)?);
    }
    Ok(d)
}
