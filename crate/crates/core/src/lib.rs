//! Numerical certification toolkit for the limit theory of lacunary
//! trigonometric series, lacunary Walsh series, and periodic functions
//! sampled along geometric and big-gap frequency sequences.
//!
//! The crate computes exact objects wherever the structure allows it
//! (dyadic step functions, product-form moment generating functions,
//! big-integer binomial laws, exhaustive solution counts) and certified
//! numerics everywhere else (spectral transfer-operator integrals,
//! characteristic-function inversion, node-doubling quadrature), and turns
//! the asymptotic statements into finite-`n` checks: mod-Gaussian
//! residuals, zones of control, local limit statistics, Kolmogorov
//! distances and rate fits, moderate-deviation ratios, and the martingale
//! inequality behind the doubling-map CLT.

// Negated comparisons like `!(x > 0.0)` are deliberate: they reject NaN
// along with the out-of-domain values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charfn;
pub mod diophantine;
pub mod error;
pub mod experiment;
pub mod limits;
pub mod martingale;
pub mod numeric;
pub mod series;
pub mod transfer;

pub use error::{Error, Result};
