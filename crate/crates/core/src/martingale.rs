//! Dyadic-filtration machinery: conditional expectations on dyadic cells,
//! martingale increments, the summation inequality for Birkhoff sums of the
//! doubling map, and the variance-per-term limit.

use crate::error::{Error, Result};
use crate::numeric::integrate_gl;
use crate::series::{DyadicStepFunction, HolderData, PeriodicFn};

/// Deepest conditional-expectation resolution.
pub const MAX_CONDEXP_LEVEL: u32 = 24;

/// Cross-correlation lags beyond this are dropped in `sigma_estimate`
/// (for the function classes here `|J(d)|` decays geometrically).
const SIGMA_LAG_CAP: usize = 16;

/// Cell averages of `f` at resolution `r`: the conditional expectation with
/// respect to the dyadic sigma-algebra of the `2^r` half-open cells.
pub fn dyadic_condexp(f: &dyn PeriodicFn, r: u32) -> Result<DyadicStepFunction> {
    if r > MAX_CONDEXP_LEVEL {
        return Err(Error::Size(format!("resolution {r} exceeds cap {MAX_CONDEXP_LEVEL}")));
    }
    let cells = 1usize << r;
    let h = 1.0 / cells as f64;
    let values = (0..cells)
        .map(|j| f.integral(j as f64 * h, (j + 1) as f64 * h) / h)
        .collect();
    DyadicStepFunction::new(r, values)
}

/// `||f - E[f|D_r]||_2^2` by the Pythagoras identity
/// `||phi_r||^2 = ||f||^2 - ||f_r||^2` (streamed; nothing is materialized).
pub fn phi_norm_sq(f: &dyn PeriodicFn, r: u32) -> f64 {
    let cells = 1usize << r;
    let h = 1.0 / cells as f64;
    let mut sum = 0.0;
    let mut c = 0.0;
    for j in 0..cells {
        let avg = f.integral(j as f64 * h, (j + 1) as f64 * h) / h;
        let y = avg * avg * h - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    (f.l2_sq() - sum).max(0.0)
}

/// Norms `||phi_s||_2` for `s = 0..=depth`.
pub struct NormSeries {
    norms: Vec<f64>,
}

impl NormSeries {
    pub fn compute(f: &dyn PeriodicFn, depth: u32) -> Result<Self> {
        if depth > MAX_CONDEXP_LEVEL {
            return Err(Error::Size(format!("depth {depth} exceeds cap {MAX_CONDEXP_LEVEL}")));
        }
        Ok(NormSeries {
            norms: (0..=depth).map(|s| phi_norm_sq(f, s).sqrt()).collect(),
        })
    }

    pub fn norm(&self, s: u32) -> f64 {
        self.norms[s as usize]
    }

    pub fn depth(&self) -> u32 {
        (self.norms.len() - 1) as u32
    }

    /// `sum_{s=a..=depth} ||phi_s||`.
    pub fn partial_sum(&self, a: u32) -> f64 {
        self.norms[a as usize..].iter().sum()
    }
}

/// Martingale decomposition of `f` down to `depth`: conditional expectations
/// `f_r`, increments `Delta_r = f_r - f_{r-1}`, and the remainder norms.
pub struct DyadicDecomposition {
    pub cond_exps: Vec<DyadicStepFunction>,
    pub increments: Vec<DyadicStepFunction>,
    pub phi_norms: Vec<f64>,
}

impl DyadicDecomposition {
    /// Builds the chain by computing the deepest level once and coarsening
    /// by exact pair averages, so the tower property holds by construction.
    pub fn new(f: &dyn PeriodicFn, depth: u32) -> Result<Self> {
        if depth > 20 {
            return Err(Error::Size(format!("decomposition depth {depth} exceeds 20")));
        }
        let deepest = dyadic_condexp(f, depth)?;
        let mut cond_exps = vec![deepest];
        for r in (0..depth).rev() {
            let child = &cond_exps[0];
            let values: Vec<f64> = (0..(1usize << r))
                .map(|j| 0.5 * (child.values()[2 * j] + child.values()[2 * j + 1]))
                .collect();
            cond_exps.insert(0, DyadicStepFunction::new(r, values)?);
        }
        let mut increments = Vec::with_capacity(depth as usize);
        for r in 1..=depth as usize {
            let fine = &cond_exps[r];
            let coarse = cond_exps[r - 1].refine(r as u32)?;
            let values =
                fine.values().iter().zip(coarse.values()).map(|(a, b)| a - b).collect();
            increments.push(DyadicStepFunction::new(r as u32, values)?);
        }
        let l2 = f.l2_sq();
        let phi_norms = cond_exps
            .iter()
            .map(|fr| (l2 - fr.l2_norm_sq()).max(0.0).sqrt())
            .collect();
        Ok(DyadicDecomposition { cond_exps, increments, phi_norms })
    }
}

/// Geometric tail bound `sum_{s>r} C 2^{-s beta} = C 2^{-(r+1)beta} / (1 - 2^-beta)`
/// for the remainder norms of a Hölder function.
pub fn norm_series_tail(holder: HolderData, r: u32) -> Result<f64> {
    if !(holder.exponent > 0.0) {
        return Err(Error::Domain(format!(
            "tail bound needs a positive Hölder exponent, got {}",
            holder.exponent
        )));
    }
    let beta = holder.exponent;
    let ratio = libm::exp2(-beta);
    Ok(holder.constant * libm::exp2(-((r + 1) as f64) * beta) / (1.0 - ratio))
}

/// Both sides of the Birkhoff remainder inequality.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct InequalityCheck {
    /// `(1/n) || phi_r(x) + phi_r(2x) + ... + phi_r(2^{n-1} x) ||_2^2`.
    pub lhs: f64,
    /// `||phi_r||^2 + 2 ||phi_r|| sum_{s=r+1..depth} ||phi_s||`.
    pub rhs: f64,
    /// Geometric bound on the dropped tail `2 ||phi_r|| sum_{s>depth} ||phi_s||`.
    pub tail_bound: f64,
    pub margin: f64,
}

/// `int_0^1 g_r(x) g_r(2^d x) dx` with `g_r = f - f_r`, integrated on cells
/// fine enough to contain every breakpoint of both factors.
fn remainder_cross_term(f: &dyn PeriodicFn, f_r: &DyadicStepFunction, d: u32) -> f64 {
    let level = (f_r.level() + d + 1).min(MAX_CONDEXP_LEVEL);
    let cells = 1usize << level;
    let h = 1.0 / cells as f64;
    let pow = libm::exp2(d as f64);
    let g = |x: f64| {
        let a = f.eval(x) - f_r.eval(x);
        let yx = pow * x;
        let b = f.eval(yx) - f_r.eval(yx);
        a * b
    };
    let mut sum = 0.0;
    let mut c = 0.0;
    for j in 0..cells {
        let v = integrate_gl(g, j as f64 * h, (j + 1) as f64 * h, 1, 6);
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Verifies `(1/n) ||sum_{k<n} phi_r(2^k x)||^2 <= ||phi_r||^2 +
/// 2 ||phi_r|| sum_{s>r} ||phi_s||` with the norm series truncated at
/// `depth` and the dropped tail bounded geometrically from the Hölder data.
///
/// The left side expands into `||phi_r||^2 + (2/n) sum_d (n-d) J_r(d)` with
/// `J_r(d)` the lag-`d` cross term, which is what gets integrated (cells at
/// level `r + d + 1` hold every breakpoint, so the quadrature is exact for
/// piecewise-polynomial handles and spectrally accurate for smooth ones).
pub fn martingale_inequality_check(
    f: &dyn PeriodicFn,
    r: u32,
    n: usize,
    depth: u32,
) -> Result<InequalityCheck> {
    let norms = NormSeries::compute(f, depth)?;
    martingale_inequality_check_with(f, r, n, &norms)
}

/// Same check with a precomputed norm series (reusable across `(r, n)`).
pub fn martingale_inequality_check_with(
    f: &dyn PeriodicFn,
    r: u32,
    n: usize,
    norms: &NormSeries,
) -> Result<InequalityCheck> {
    if n == 0 {
        return Err(Error::Domain("need n >= 1".into()));
    }
    let depth = norms.depth();
    if r >= depth {
        return Err(Error::Size(format!("need r < depth, got r = {r}, depth = {depth}")));
    }
    let holder = f.holder().ok_or_else(|| {
        Error::Precision("cannot bound the dropped norm-series tail without Hölder data".into())
    })?;
    let tail = norm_series_tail(holder, depth)?;

    let phi_r_sq = norms.norm(r).powi(2);
    let f_r = dyadic_condexp(f, r)?;
    let mut lhs = phi_r_sq;
    for d in 1..n as u32 {
        let j = remainder_cross_term(f, &f_r, d);
        lhs += 2.0 / n as f64 * (n as f64 - d as f64) * j;
    }

    let series = norms.partial_sum(r + 1);
    let rhs = phi_r_sq + 2.0 * norms.norm(r) * series;
    let tail_bound = 2.0 * norms.norm(r) * tail;
    if tail_bound > series.max(phi_r_sq) && tail_bound > 1e-12 {
        return Err(Error::Precision(format!(
            "truncation tail {tail_bound:.3e} dominates the computed series; increase depth"
        )));
    }
    Ok(InequalityCheck { lhs, rhs, tail_bound, margin: rhs + tail_bound - lhs })
}

/// One entry of the variance-per-term sequence.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SigmaPoint {
    pub n: usize,
    /// `(1/n) || f(x) + f(2x) + ... + f(2^{n-1} x) ||_2^2`.
    pub value: f64,
}

/// Variance-per-term sequence of the Birkhoff sums. Its limit is the CLT
/// variance; a sequence sinking to 0 flags a degenerate limit.
pub fn sigma_estimate(f: &dyn PeriodicFn, n_list: &[usize]) -> Result<Vec<SigmaPoint>> {
    let mean = f.integral(0.0, 1.0);
    if mean.abs() > 1e-8 {
        return Err(Error::Domain(format!("sigma estimate needs a mean-zero f, mean = {mean}")));
    }
    let l2 = f.l2_sq();
    let max_n = n_list.iter().copied().max().unwrap_or(0);
    let lag_cap = SIGMA_LAG_CAP.min(max_n.saturating_sub(1));

    // J(d) = int f(x) f(2^d x) dx, exact on cells holding both factors'
    // breakpoints.
    let cross: Vec<f64> = (1..=lag_cap)
        .map(|d| {
            let level = ((d + 6) as u32).min(MAX_CONDEXP_LEVEL);
            let cells = 1usize << level;
            let h = 1.0 / cells as f64;
            let pow = libm::exp2(d as f64);
            let g = |x: f64| f.eval(x) * f.eval(pow * x);
            let mut sum = 0.0;
            for j in 0..cells {
                sum += integrate_gl(g, j as f64 * h, (j + 1) as f64 * h, 1, 6);
            }
            sum
        })
        .collect();

    Ok(n_list
        .iter()
        .map(|&n| {
            let mut value = l2;
            for (idx, j) in cross.iter().enumerate() {
                let d = idx + 1;
                if d < n {
                    value += 2.0 / n as f64 * (n - d) as f64 * j;
                }
            }
            SigmaPoint { n, value }
        })
        .collect())
}
