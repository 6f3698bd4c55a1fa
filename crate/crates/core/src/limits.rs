//! Laws of the partial sums and the statistics of the limit theorems:
//! Kolmogorov distance, local-limit window statistics, extended-CLT tail
//! ratios, moderate-deviation prefactors, and rate fits.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::numeric::{
    big_choose, biguint_to_f64_scaled, gauss_legendre, kahan_sum, normal_cdf, normal_tail,
    LnFactorial, FRAC_1_SQRT_2PI,
};
use crate::series::DyadicStepFunction;

/// Largest `n` for which binomial masses are materialized as exact big
/// integers: the extreme masses `2^-n` must stay positive in f64, which
/// holds through the subnormal range up to n = 1074. Above this the
/// ln-factorial evaluation is used; its relative error ~1e-12 sits far
/// below every tolerance in the crate.
pub const EXACT_BINOMIAL_MAX: usize = 1024;

// ---------------------------------------------------------------------------
// Discrete laws
// ---------------------------------------------------------------------------

/// Where a law came from.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub enum LawSource {
    WalshExact { level: u32 },
    DyadicCells { level: u32 },
    Binomial { n: u64, exact: bool },
    MonteCarlo { seed: u64, strata: u64 },
    SignSumConvolution { terms: usize },
}

/// Exact atom masses: `numerators[i] / 2^log2_denominator`.
#[derive(Debug, Clone)]
pub struct ExactMasses {
    pub numerators: Vec<BigUint>,
    pub log2_denominator: u64,
}

/// A purely atomic law with strictly increasing atom values. Masses are
/// stored as f64 for statistics; sources whose masses are dyadic rationals
/// also carry the exact numerators.
#[derive(Debug, Clone)]
pub struct DiscreteLaw {
    values: Vec<f64>,
    masses: Vec<f64>,
    exact: Option<ExactMasses>,
    source: LawSource,
}

impl DiscreteLaw {
    fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Constraint("law has no atoms".into()));
        }
        for w in self.values.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Constraint("atom values must be strictly increasing".into()));
            }
        }
        if self.masses.iter().any(|&m| !(m > 0.0)) {
            return Err(Error::Constraint("atom masses must be positive".into()));
        }
        if let Some(exact) = &self.exact {
            let total: BigUint = exact.numerators.iter().sum();
            if total != BigUint::from(1u32) << exact.log2_denominator {
                return Err(Error::Constraint("exact masses must sum to exactly 1".into()));
            }
        } else if (kahan_sum(self.masses.iter().copied()) - 1.0).abs() > 1e-9 {
            return Err(Error::Constraint("masses must sum to 1".into()));
        }
        Ok(())
    }

    /// Lebesgue pushforward of an exact dyadic step function: equal values
    /// grouped, masses = cell counts / 2^level.
    pub fn exact_law(step: &DyadicStepFunction) -> Result<Self> {
        let level = step.level();
        let mut groups: std::collections::BTreeMap<u64, u64> = std::collections::BTreeMap::new();
        for v in step.values() {
            *groups.entry(v.to_bits()).or_insert(0) += 1;
        }
        let mut atoms: Vec<(f64, u64)> =
            groups.into_iter().map(|(bits, c)| (f64::from_bits(bits), c)).collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let scale = libm::exp2(-(level as f64));
        let law = DiscreteLaw {
            values: atoms.iter().map(|a| a.0).collect(),
            // count / 2^level is exact in f64 (power-of-two denominator).
            masses: atoms.iter().map(|a| a.1 as f64 * scale).collect(),
            exact: Some(ExactMasses {
                numerators: atoms.iter().map(|a| BigUint::from(a.1)).collect(),
                log2_denominator: level as u64,
            }),
            source: LawSource::DyadicCells { level },
        };
        law.validate()?;
        Ok(law)
    }

    /// Law of `scale * sum_{k=1..n} eps_k` for i.i.d. signs: the centered
    /// binomial lattice. Exact big-integer masses up to
    /// [`EXACT_BINOMIAL_MAX`], ln-factorial masses above (atoms whose mass
    /// underflows f64 are dropped).
    pub fn binomial_walsh(n: usize, scale: f64) -> Result<Self> {
        if n == 0 || !(scale > 0.0) {
            return Err(Error::Domain("need n >= 1 and a positive scale".into()));
        }
        let value = |j: usize| (n as f64 - 2.0 * j as f64) * scale;
        if n <= EXACT_BINOMIAL_MAX {
            let mut coef = BigUint::from(1u32);
            let mut numerators = Vec::with_capacity(n + 1);
            let mut masses = Vec::with_capacity(n + 1);
            let mut values = Vec::with_capacity(n + 1);
            for j in 0..=n {
                // iterate j ascending; store later in reverse for ascending values
                numerators.push(coef.clone());
                masses.push(biguint_to_f64_scaled(&coef, -(n as i64)));
                values.push(value(j));
                if j < n {
                    coef = coef * BigUint::from((n - j) as u64) / BigUint::from((j + 1) as u64);
                }
            }
            numerators.reverse();
            masses.reverse();
            values.reverse();
            let law = DiscreteLaw {
                values,
                masses,
                exact: Some(ExactMasses { numerators, log2_denominator: n as u64 }),
                source: LawSource::Binomial { n: n as u64, exact: true },
            };
            law.validate()?;
            Ok(law)
        } else {
            let lf = LnFactorial::up_to(n);
            let ln2 = std::f64::consts::LN_2;
            let mut values = Vec::new();
            let mut masses = Vec::new();
            for j in (0..=n).rev() {
                let m = (lf.ln_choose(n, j) - n as f64 * ln2).exp();
                if m > 1e-290 {
                    values.push(value(j));
                    masses.push(m);
                }
            }
            let law = DiscreteLaw {
                values,
                masses,
                exact: None,
                source: LawSource::Binomial { n: n as u64, exact: false },
            };
            law.validate()?;
            Ok(law)
        }
    }

    /// Empirical law from stratified sampling of `[0,1]`: one uniform point
    /// per stratum, fixed seed, mass `1/strata` per sample. The per-window
    /// mass error of the stratification is at most `1/strata` per window
    /// boundary cell.
    pub fn monte_carlo(
        eval: impl Fn(f64) -> f64 + Sync,
        strata: u64,
        seed: u64,
    ) -> Result<Self> {
        use rayon::prelude::*;
        if !strata.is_power_of_two() {
            return Err(Error::Domain("stratum count must be a power of two".into()));
        }
        // splitmix64 per stratum: deterministic, order-independent.
        let offsets: Vec<f64> = (0..strata)
            .map(|i| {
                let mut z = seed.wrapping_add(i.wrapping_mul(0x9e3779b97f4a7c15));
                z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
                z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
                z = z ^ (z >> 31);
                (z >> 11) as f64 / (1u64 << 53) as f64
            })
            .collect();
        let mut values: Vec<f64> = offsets
            .par_iter()
            .enumerate()
            .map(|(i, u)| eval((i as f64 + u) / strata as f64))
            .collect();
        values.sort_by(f64::total_cmp);
        // merge equal sample values
        let mass = 1.0 / strata as f64;
        let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(values.len());
        for v in values {
            match atoms.last_mut() {
                Some(last) if last.0 == v => last.1 += mass,
                _ => atoms.push((v, mass)),
            }
        }
        let law = DiscreteLaw {
            values: atoms.iter().map(|a| a.0).collect(),
            masses: atoms.iter().map(|a| a.1).collect(),
            exact: None,
            source: LawSource::MonteCarlo { seed, strata },
        };
        law.validate()?;
        Ok(law)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn source(&self) -> &LawSource {
        &self.source
    }

    pub fn exact_masses(&self) -> Option<&ExactMasses> {
        self.exact.as_ref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same law with atom values multiplied by `c > 0`.
    pub fn scale_values(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::Domain("scale must be positive".into()));
        }
        let law = DiscreteLaw {
            values: self.values.iter().map(|v| c * v).collect(),
            masses: self.masses.clone(),
            exact: self.exact.clone(),
            source: self.source.clone(),
        };
        law.validate()?;
        Ok(law)
    }

    /// Mass of the half-open window `[lo, hi)`.
    pub fn mass_in(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let start = self.values.partition_point(|&v| v < lo);
        let end = self.values.partition_point(|&v| v < hi);
        kahan_sum(self.masses[start..end].iter().copied())
    }

    /// Exact window mass when exact numerators are available (converted to
    /// f64 once at the end, so no accumulation error enters).
    pub fn mass_in_exact(&self, lo: f64, hi: f64) -> Option<f64> {
        let exact = self.exact.as_ref()?;
        let start = self.values.partition_point(|&v| v < lo);
        let end = self.values.partition_point(|&v| v < hi);
        let total: BigUint = exact.numerators[start..end].iter().sum();
        Some(biguint_to_f64_scaled(&total, -(exact.log2_denominator as i64)))
    }

    /// Mass of `[y, inf)`.
    pub fn mass_ge(&self, y: f64) -> f64 {
        let start = self.values.partition_point(|&v| v < y);
        kahan_sum(self.masses[start..].iter().copied())
    }

    /// Mass of `(-inf, y]`.
    pub fn mass_le(&self, y: f64) -> f64 {
        let end = self.values.partition_point(|&v| v <= y);
        kahan_sum(self.masses[..end].iter().copied())
    }
}

/// Free-function alias: the exact Lebesgue pushforward of a step function.
pub fn exact_law(step: &DyadicStepFunction) -> Result<DiscreteLaw> {
    DiscreteLaw::exact_law(step)
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

/// Kolmogorov distance between a discrete law and the standard normal:
/// `sup_x max(|F(x-) - Phi(x)|, |F(x) - Phi(x)|)` over the atoms.
pub fn kolmogorov_distance(law: &DiscreteLaw) -> f64 {
    let mut cum = 0.0;
    let mut c = 0.0; // Kahan carry
    let mut sup = 0.0f64;
    for (v, m) in law.values.iter().zip(&law.masses) {
        let phi = normal_cdf(*v);
        sup = sup.max((cum - phi).abs());
        let y = m - c;
        let t = cum + y;
        c = (t - cum) - y;
        cum = t;
        sup = sup.max((cum - phi).abs());
    }
    sup
}

/// A finite union of half-open windows `[lo, hi)`.
#[derive(Debug, Clone)]
pub struct JordanWindow(Vec<(f64, f64)>);

impl JordanWindow {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.iter().all(|(lo, hi)| hi <= lo) {
            return Err(Error::Domain("window has zero measure".into()));
        }
        Ok(JordanWindow(intervals))
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        JordanWindow::new(vec![(lo, hi)])
    }

    pub fn measure(&self) -> f64 {
        self.0.iter().map(|(lo, hi)| (hi - lo).max(0.0)).sum()
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.0
    }
}

/// Anything that can produce window and tail probabilities.
pub trait ProbLaw {
    fn prob_in(&self, lo: f64, hi: f64) -> f64;
    fn prob_ge(&self, y: f64) -> f64;
    fn prob_le(&self, y: f64) -> f64;
}

impl ProbLaw for DiscreteLaw {
    fn prob_in(&self, lo: f64, hi: f64) -> f64 {
        self.mass_in_exact(lo, hi).unwrap_or_else(|| self.mass_in(lo, hi))
    }

    fn prob_ge(&self, y: f64) -> f64 {
        self.mass_ge(y)
    }

    fn prob_le(&self, y: f64) -> f64 {
        self.mass_le(y)
    }
}

/// Local-limit statistic `t_n^delta P[X/sqrt(t_n) - y in t_n^-delta B]`.
///
/// With `t_n = A_n^2`, `delta = 1/2`, `y = 0` this is the weak form
/// `A_n P[X in B]`, whose limit is `|B| / sqrt(2 pi)`.
pub fn llt_statistic<L: ProbLaw>(
    law: &L,
    t_n: f64,
    y: f64,
    window: &JordanWindow,
    delta: f64,
) -> Result<f64> {
    if window.measure() <= 0.0 {
        return Err(Error::Domain("window must have positive measure".into()));
    }
    if !(delta > 0.0) || !(t_n > 0.0) {
        return Err(Error::Domain("need delta > 0 and t_n > 0".into()));
    }
    let sqrt_t = t_n.sqrt();
    let shrink = t_n.powf(-delta);
    let mut prob = 0.0;
    for &(lo, hi) in window.intervals() {
        prob += law.prob_in(sqrt_t * (y + shrink * lo), sqrt_t * (y + shrink * hi));
    }
    Ok(t_n.powf(delta) * prob)
}

/// Weak-form statistic `A_n P[X in B]` and its limit `|B|/sqrt(2 pi)`.
pub fn llt_weak_statistic<L: ProbLaw>(law: &L, a_n: f64, window: &JordanWindow) -> Result<f64> {
    llt_statistic(law, a_n * a_n, 0.0, window, 0.5)
}

/// Target of every local limit statistic.
pub fn llt_target(window: &JordanWindow) -> f64 {
    window.measure() * FRAC_1_SQRT_2PI
}

/// Ratio of `P[X/A_n >= y]` to the standard Gaussian tail; approaches 1 in
/// the extended-CLT regime `y = o(A_n)`.
pub fn tail_ratio_extended_clt<L: ProbLaw>(law: &L, a_n: f64, y: f64) -> Result<f64> {
    if y < 0.0 {
        return Err(Error::Domain(format!("tail ratio needs y >= 0, got {y}")));
    }
    let tail = normal_tail(y);
    if tail < 1e-300 {
        return Err(Error::Range(format!("gaussian tail at y = {y} underflows")));
    }
    Ok(law.prob_ge(y * a_n) / tail)
}

/// Observed vs predicted large-tail mass at level `A_n^2 y`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct MdpCheck {
    pub observed: f64,
    pub predicted: f64,
}

/// Moderate-deviation comparison: observed `P[X >= A_n^2 y]` (mirrored for
/// `y < 0`) against `exp(-A_n^2 y^2/2) / (|y| A_n sqrt(2 pi)) * psi(y)`.
pub fn moderate_deviation_check<L: ProbLaw>(
    law: &L,
    a_n: f64,
    y: f64,
    psi: impl Fn(f64) -> f64,
) -> Result<MdpCheck> {
    if y == 0.0 {
        return Err(Error::Domain("moderate deviations need y != 0".into()));
    }
    let observed =
        if y > 0.0 { law.prob_ge(a_n * a_n * y) } else { law.prob_le(a_n * a_n * y) };
    let predicted = (-a_n * a_n * y * y / 2.0).exp() / (y.abs() * a_n) * FRAC_1_SQRT_2PI * psi(y);
    Ok(MdpCheck { observed, predicted })
}

/// Least-squares slope of `log d` against `log A` for a family of
/// Kolmogorov distances; certifies a decay exponent.
pub fn berry_esseen_rate_fit(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::Size(format!("rate fit needs >= 3 points, got {}", points.len())));
    }
    for w in points.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::Domain("normalizers must be strictly increasing".into()));
        }
    }
    if points.iter().any(|p| !(p.1 > 0.0)) {
        return Err(Error::Domain("distances must be positive".into()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(a, d)| (a.ln(), d.ln())).collect();
    Ok(crate::numeric::ls_slope(&logs))
}

// ---------------------------------------------------------------------------
// Weighted sign sums via characteristic-function inversion
// ---------------------------------------------------------------------------

/// Law of `sum_i w_i eps_i` for i.i.d. signs `eps_i`. The characteristic
/// function `prod_i cos(w_i lambda)` is exact; cumulative probabilities come
/// from the smoothed inversion formula, so laws with `2^n` atoms (hopeless
/// to convolve explicitly) are still computable to ~1e-9.
#[derive(Debug, Clone)]
pub struct SignSumLaw {
    weights: Vec<f64>,
}

/// Nodes for the inversion integrals: panels of 32-point Gauss-Legendre.
struct InversionNodes {
    lambdas: Vec<f64>,
    weights: Vec<f64>,
}

fn inversion_nodes(upper: f64) -> InversionNodes {
    let panels = ((upper / 0.5).ceil() as usize).max(8);
    let (xs, ws) = gauss_legendre(32);
    let h = upper / panels as f64;
    let mut lambdas = Vec::with_capacity(panels * 32);
    let mut weights = Vec::with_capacity(panels * 32);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (x, w) in xs.iter().zip(&ws) {
            lambdas.push(mid + 0.5 * h * x);
            weights.push(0.5 * h * w);
        }
    }
    InversionNodes { lambdas, weights }
}

impl SignSumLaw {
    pub fn new(weights: Vec<f64>) -> Self {
        SignSumLaw { weights }
    }

    /// Weights of the Bernoulli-shift expansion `sum_{k<=n} f(2^k x)`.
    pub fn bernoulli_sum(n: usize, tail: usize) -> Self {
        SignSumLaw {
            weights: crate::series::bernoulli_expansion_weights(n, tail)
                .into_iter()
                .map(|w| w.weight)
                .collect(),
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn variance(&self) -> f64 {
        kahan_sum(self.weights.iter().map(|w| w * w))
    }

    /// `E[e^{i lambda X}] = prod cos(w lambda)` (real by symmetry).
    pub fn char_fn(&self, lambda: f64) -> f64 {
        let mut acc = 1.0;
        for w in &self.weights {
            acc *= (w * lambda).cos();
        }
        acc
    }

    /// Upper integration limit keeping every `|scale w lambda|` inside the
    /// window where `|cos t| <= e^{-t^2/2}` certifies Gaussian decay of the
    /// integrand tail.
    fn inversion_upper(&self, scale: f64) -> Result<f64> {
        let wmax = self.weights.iter().fold(0.0f64, |m, w| m.max((scale * w).abs()));
        let cap = 0.99 * std::f64::consts::FRAC_PI_2 / wmax;
        if cap < 10.0 {
            return Err(Error::Precision(format!(
                "inversion window {cap:.2} too short for reliable tails; \
                 use the exact convolution for laws this coarse"
            )));
        }
        Ok(cap.min(14.0))
    }

    /// `F(x) - Phi(x)` for the scaled law `scale * X` on a grid of points,
    /// by one shared pass over the inversion nodes.
    pub fn cdf_minus_normal(&self, scale: f64, xs: &[f64]) -> Result<Vec<f64>> {
        use rayon::prelude::*;
        let upper = self.inversion_upper(scale)?;
        let nodes = inversion_nodes(upper);
        let diffs: Vec<f64> = nodes
            .lambdas
            .iter()
            .map(|&lam| {
                let mut cf = 1.0;
                for w in &self.weights {
                    cf *= (scale * w * lam).cos();
                }
                cf - (-0.5 * lam * lam).exp()
            })
            .collect();
        Ok(xs
            .par_iter()
            .map(|&x| {
                let mut acc = 0.0;
                for ((lam, w), d) in nodes.lambdas.iter().zip(&nodes.weights).zip(&diffs) {
                    acc += w * d * (lam * x).sin() / lam;
                }
                acc / std::f64::consts::PI
            })
            .collect())
    }

    /// Kolmogorov distance of `scale * X` from the standard normal, via the
    /// inversion grid (the laws used here are continuous at the grid scale).
    pub fn kolmogorov_vs_normal(&self, scale: f64) -> Result<f64> {
        let xs: Vec<f64> = (0..=4000).map(|i| -8.0 + 16.0 * i as f64 / 4000.0).collect();
        let diffs = self.cdf_minus_normal(scale, &xs)?;
        let (mut best_i, mut best) = (0usize, 0.0f64);
        for (i, d) in diffs.iter().enumerate() {
            if d.abs() > best {
                best = d.abs();
                best_i = i;
            }
        }
        // parabolic refinement around the grid argmax
        if best_i > 0 && best_i + 1 < diffs.len() {
            let (a, b, c) = (diffs[best_i - 1].abs(), best, diffs[best_i + 1].abs());
            let denom = a - 2.0 * b + c;
            if denom < 0.0 {
                best = b - (a - c) * (a - c) / (8.0 * denom);
            }
        }
        Ok(best)
    }

    /// `P[X >= t]` via the inversion formula.
    pub fn prob_ge_inv(&self, t: f64) -> Result<f64> {
        // Normalize to unit variance so the integrand decays like a Gaussian.
        let sigma = self.variance().sqrt();
        let scale = 1.0 / sigma;
        let upper = self.inversion_upper(scale)?;
        let nodes = inversion_nodes(upper);
        let x = t / sigma;
        let mut acc = 0.0;
        for (lam, w) in nodes.lambdas.iter().zip(&nodes.weights) {
            let mut cf = 1.0;
            for wt in &self.weights {
                cf *= (scale * wt * lam).cos();
            }
            acc += w * cf * (lam * x).sin() / lam;
        }
        Ok((0.5 - acc / std::f64::consts::PI).clamp(0.0, 1.0))
    }

    /// Exact law by full convolution; only for small weight counts.
    pub fn to_discrete(&self) -> Result<DiscreteLaw> {
        let k = self.weights.len();
        if k > 22 {
            return Err(Error::Budget { needed: 1u128 << k, budget: 1 << 22 });
        }
        let count = 1usize << k;
        let mut values = Vec::with_capacity(count);
        for pattern in 0..count {
            let mut s = 0.0;
            for (i, w) in self.weights.iter().enumerate() {
                s += if pattern >> i & 1 == 1 { -w } else { *w };
            }
            values.push(s);
        }
        values.sort_by(f64::total_cmp);
        let mut atoms: Vec<(f64, u64)> = Vec::new();
        for v in values {
            match atoms.last_mut() {
                Some(last) if last.0 == v => last.1 += 1,
                _ => atoms.push((v, 1)),
            }
        }
        let scale = libm::exp2(-(k as f64));
        let law = DiscreteLaw {
            values: atoms.iter().map(|a| a.0).collect(),
            masses: atoms.iter().map(|a| a.1 as f64 * scale).collect(),
            exact: Some(ExactMasses {
                numerators: atoms.iter().map(|a| BigUint::from(a.1)).collect(),
                log2_denominator: k as u64,
            }),
            source: LawSource::SignSumConvolution { terms: k },
        };
        law.validate()?;
        Ok(law)
    }
}

/// A scaled view `scale * X` of a sign-sum law, exposing the probability
/// interface used by the limit statistics.
pub struct ScaledSignSum<'a> {
    pub law: &'a SignSumLaw,
    pub scale: f64,
}

impl ProbLaw for ScaledSignSum<'_> {
    fn prob_in(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let a = self.law.prob_ge_inv(lo / self.scale).unwrap_or(f64::NAN);
        let b = self.law.prob_ge_inv(hi / self.scale).unwrap_or(f64::NAN);
        (a - b).max(0.0)
    }

    fn prob_ge(&self, y: f64) -> f64 {
        self.law.prob_ge_inv(y / self.scale).unwrap_or(f64::NAN)
    }

    fn prob_le(&self, y: f64) -> f64 {
        // symmetric law
        self.law.prob_ge_inv(-y / self.scale).unwrap_or(f64::NAN)
    }
}

// ---------------------------------------------------------------------------
// Exact binomial windows (big-integer path for huge n)
// ---------------------------------------------------------------------------

/// `sum_{j=j_lo..=j_hi} C(n, j) / 2^n` with exact integer arithmetic; the
/// single conversion to f64 happens at the very end.
pub fn binomial_window_mass_exact(n: u64, j_lo: u64, j_hi: u64) -> Result<f64> {
    if j_hi < j_lo || j_hi > n {
        return Err(Error::Domain(format!("bad window {j_lo}..={j_hi} for n = {n}")));
    }
    let mut coef = big_choose(n, j_lo);
    let mut total = coef.clone();
    for j in j_lo..j_hi {
        coef = coef * BigUint::from(n - j) / BigUint::from(j + 1);
        total += &coef;
    }
    Ok(biguint_to_f64_scaled(&total, -(n as i64)))
}
