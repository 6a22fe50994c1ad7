use std::fmt;

use crate::error::{Error, Result};

/// Free variables of an expression.
///
/// `W` is internal: it only appears while an expression is rewritten in
/// w-coordinates and is never produced by the parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    T,
    X,
    W,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::X => "x",
            Var::W => "w",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

/// Variable bindings for [`Expr::eval`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Env {
    pub t: Option<f64>,
    pub x: Option<f64>,
    pub w: Option<f64>,
}

impl Env {
    pub fn t(t: f64) -> Self {
        Env {
            t: Some(t),
            ..Env::default()
        }
    }

    pub fn tx(t: f64, x: f64) -> Self {
        Env {
            t: Some(t),
            x: Some(x),
            w: None,
        }
    }

    pub(crate) fn w(w: f64) -> Self {
        Env {
            w: Some(w),
            ..Env::default()
        }
    }
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    pub fn unary(op: UnOp, e: Expr) -> Expr {
        Expr::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    /// IEEE evaluation. Domain violations (ln of a negative number, division
    /// by zero, …) yield non-finite values instead of errors; only unbound
    /// variables are an error.
    pub fn eval(&self, env: &Env) -> Result<f64> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var(v) => {
                let val = match v {
                    Var::T => env.t,
                    Var::X => env.x,
                    Var::W => env.w,
                };
                val.ok_or(Error::UnboundVariable(v.name()))?
            }
            Expr::Unary(op, e) => {
                let a = e.eval(env)?;
                match op {
                    UnOp::Neg => -a,
                    UnOp::Exp => a.exp(),
                    UnOp::Ln => a.ln(),
                    UnOp::Sin => a.sin(),
                    UnOp::Cos => a.cos(),
                    UnOp::Sqrt => a.sqrt(),
                }
            }
            Expr::Binary(op, l, r) => {
                let a = l.eval(env)?;
                let b = r.eval(env)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => pow(a, b),
                }
            }
        })
    }

    pub fn contains(&self, v: Var) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(u) => *u == v,
            Expr::Unary(_, e) => e.contains(v),
            Expr::Binary(_, l, r) => l.contains(v) || r.contains(v),
        }
    }

    pub fn is_const(&self) -> bool {
        !self.contains(Var::T) && !self.contains(Var::X) && !self.contains(Var::W)
    }

    /// Replace every occurrence of `v` by `by`.
    pub fn substitute(&self, v: Var, by: &Expr) -> Expr {
        match self {
            Expr::Var(u) if *u == v => by.clone(),
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Unary(op, e) => Expr::unary(*op, e.substitute(v, by)),
            Expr::Binary(op, l, r) => Expr::binary(*op, l.substitute(v, by), r.substitute(v, by)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Unary(UnOp::Neg, _) => 3,
            Expr::Binary(BinOp::Pow, ..) => 4,
            Expr::Const(c) if *c < 0.0 => 3,
            _ => 5,
        }
    }
}

/// Real power with the usual conventions; integer exponents of negative
/// bases are allowed, everything else on a negative base is NaN.
fn pow(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        return 1.0;
    }
    if b == b.trunc() && b.abs() < 1e9 {
        return a.powi(b as i32);
    }
    a.powf(b)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn wrap(f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool) -> fmt::Result {
            if paren {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Unary(UnOp::Neg, e) => {
                // unary minus binds tighter than ^, so -(t^2) needs parentheses
                f.write_str("-")?;
                wrap(f, e, e.precedence() != 5)
            }
            Expr::Unary(op, e) => {
                let name = match op {
                    UnOp::Exp => "exp",
                    UnOp::Ln => "ln",
                    UnOp::Sin => "sin",
                    UnOp::Cos => "cos",
                    UnOp::Sqrt => "sqrt",
                    UnOp::Neg => unreachable!(),
                };
                write!(f, "{name}({e})")
            }
            Expr::Binary(op, l, r) => {
                let p = self.precedence();
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                match op {
                    BinOp::Pow => {
                        // right-associative
                        wrap(f, l, l.precedence() <= p)?;
                        f.write_str("^")?;
                        wrap(f, r, r.precedence() < p)
                    }
                    BinOp::Add | BinOp::Sub => {
                        wrap(f, l, l.precedence() < p)?;
                        write!(f, " {sym} ")?;
                        wrap(f, r, r.precedence() <= p)
                    }
                    BinOp::Mul | BinOp::Div => {
                        wrap(f, l, l.precedence() < p)?;
                        f.write_str(sym)?;
                        wrap(f, r, r.precedence() <= p)
                    }
                }
            }
        }
    }
}
