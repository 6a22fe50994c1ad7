//! # frackit
//!
//! Numerics for the Caputo–Katugampola fractional derivative and the
//! Katugampola fractional integral of non-integer order α with parameter
//! ρ > 0, a predictor-corrector solver for the fractional initial value
//! problem written as a Volterra equation, and computable fractional
//! Gronwall bounds that certify the distance between two solutions.
//!
//! Every operator is evaluated in the coordinate `w = t^ρ`, where the
//! Katugampola kernel `τ^{ρ−1}(t^ρ − τ^ρ)^{α−1} dτ` becomes the classical
//! Riemann–Liouville kernel `(T − w)^{α−1} dw / ρ`. One family of
//! product-integration weights then serves every ρ.
//!
//! Module map:
//!
//! - [`specfun`]: Γ, ln Γ, B and the Mittag-Leffler function E_α
//! - [`mesh`]: domains, w-uniform grids and the t ↔ w maps
//! - [`expr`]: expression parser, evaluator, symbolic and ρ-modified derivatives
//! - [`quadrature`]: product-integration weights for weakly singular kernels
//! - [`operators`]: fractional integrals and derivatives, bounds, integration by parts
//! - [`closed_forms`]: exact power-rule, Mittag-Leffler and Taylor-remainder values
//! - [`gronwall`]: series and Mittag-Leffler Gronwall bounds
//! - [`fde`]: the fractional initial value problem solver

// `!(x > 0.0)` also rejects NaN; quadrature loops read better indexed;
// reference values keep all their digits
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::excessive_precision
)]

pub mod closed_forms;
pub mod error;
pub mod expr;
pub mod fde;
pub mod gronwall;
pub mod mesh;
pub mod operators;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
pub use expr::{Expr, FuncSpec, Sampled, Var};
pub use mesh::{Domain, WGrid};
pub use operators::{OperatorResult, OrderParams, Side};
