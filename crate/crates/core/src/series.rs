//! Frequency sequences, coefficient arrays, Rademacher/Walsh/Bernoulli
//! evaluation, and exact dyadic step functions.
//!
//! Conventions used throughout the crate:
//!
//! * All dyadic objects are right-continuous on half-open cells
//!   `[j/2^L, (j+1)/2^L)`. Evaluation reads binary digits directly, so
//!   cell boundaries are never ambiguous.
//! * `r_0 = +1` on `[0, 1/2)` and `-1` on `[1/2, 1)`; `r_n(x) = r_0(2^n x)`.
//! * Bit `i` of a Walsh index `m` (value `2^i`) pairs with `r_i`, so that
//!   `W_1 = r_0` and `W_k W_l = W_{k xor l}`.

use crate::error::{Error, Result};
use crate::numeric::kahan_sum;

/// Hard cap on dyadic resolution (2^26 cells = 512 MB of f64 is already
/// past what any caller here needs).
pub const MAX_STEP_LEVEL: u32 = 26;

// ---------------------------------------------------------------------------
// Lacunary sequences
// ---------------------------------------------------------------------------

/// How a frequency sequence was constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    /// `m_k = B^k`.
    Power(u64),
    /// The interleaved sharpness example `2, 3, 4, 6, 8, 12, 16, 24, ...`
    /// (pairs `2^k`, `2^k + 2^{k-1}`), lacunary with ratio exactly `4/3`.
    InterleavedExample,
    /// Cumulative products of integer gap ratios `b_k >= 2`.
    BigGap,
    Custom,
}

#[derive(Debug, Clone)]
enum Terms {
    Integer(Vec<u64>),
    Real(Vec<f64>),
}

/// A strictly increasing frequency sequence with a certified ratio bound:
/// `terms[k+1] / terms[k] >= q > 1` for every `k`, checked at construction
/// (exactly, when the terms are integers).
#[derive(Debug, Clone)]
pub struct LacunarySequence {
    terms: Terms,
    q: f64,
    kind: SequenceKind,
}

/// Splits a positive finite f64 into `(mantissa, exponent)` with
/// `x = mantissa * 2^exponent` exactly.
fn dyadic_parts(x: f64) -> (u128, i32) {
    let bits = x.to_bits();
    let exp_field = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    if exp_field == 0 {
        (frac as u128, -1074)
    } else {
        ((frac | (1u64 << 52)) as u128, exp_field - 1023 - 52)
    }
}

/// Exact test of `t1 >= q * t0` for integer terms (treats `q` as the dyadic
/// rational it is).
fn ratio_at_least(t0: u64, t1: u64, q: f64) -> bool {
    let (m, e) = dyadic_parts(q);
    if e >= 0 {
        let rhs = m
            .checked_mul(t0 as u128)
            .and_then(|v| v.checked_shl(e as u32));
        match rhs {
            Some(rhs) => t1 as u128 >= rhs,
            None => false,
        }
    } else {
        let shift = (-e) as u32;
        if shift >= 64 {
            // t1 * 2^shift needs at most 64 + shift bits; q > 1 keeps shift <= 52.
            return false;
        }
        (t1 as u128) << shift >= m * t0 as u128
    }
}

impl LacunarySequence {
    /// Integer terms with a declared ratio bound, certified exactly.
    pub fn from_integer_terms(terms: Vec<u64>, q: f64, kind: SequenceKind) -> Result<Self> {
        if !(q > 1.0) || !q.is_finite() {
            return Err(Error::Constraint(format!("ratio bound q must exceed 1, got {q}")));
        }
        if terms.is_empty() {
            return Err(Error::Constraint("sequence must be non-empty".into()));
        }
        if terms[0] == 0 {
            return Err(Error::Constraint("frequencies must be positive".into()));
        }
        for w in terms.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Constraint(format!(
                    "terms must be strictly increasing: {} then {}",
                    w[0], w[1]
                )));
            }
            if !ratio_at_least(w[0], w[1], q) {
                return Err(Error::Constraint(format!(
                    "ratio {}/{} falls below the declared bound q = {q}",
                    w[1], w[0]
                )));
            }
        }
        Ok(LacunarySequence { terms: Terms::Integer(terms), q, kind })
    }

    /// Real terms (admissible for trigonometric sums only). The ratio check
    /// uses f64 arithmetic.
    pub fn from_real_terms(terms: Vec<f64>, q: f64) -> Result<Self> {
        if !(q > 1.0) || !q.is_finite() {
            return Err(Error::Constraint(format!("ratio bound q must exceed 1, got {q}")));
        }
        if terms.is_empty() || terms[0] <= 0.0 {
            return Err(Error::Constraint("frequencies must be positive".into()));
        }
        for w in terms.windows(2) {
            if !(w[1] > w[0]) || w[1] < q * w[0] {
                return Err(Error::Constraint(format!(
                    "ratio {}/{} falls below the declared bound q = {q}",
                    w[1], w[0]
                )));
            }
        }
        Ok(LacunarySequence { terms: Terms::Real(terms), q, kind: SequenceKind::Custom })
    }

    /// `m_k = base^k` for `k = 1..=len`; ratio bound `q = base`.
    pub fn power(base: u64, len: usize) -> Result<Self> {
        if base < 2 {
            return Err(Error::Constraint("power base must be >= 2".into()));
        }
        let mut terms = Vec::with_capacity(len);
        let mut m: u64 = 1;
        for _ in 0..len {
            m = m
                .checked_mul(base)
                .ok_or_else(|| Error::Range("power sequence overflows u64".into()))?;
            terms.push(m);
        }
        LacunarySequence::from_integer_terms(terms, base as f64, SequenceKind::Power(base))
    }

    /// The interleaved example `2, 3, 4, 6, 8, 12, ...` with `q = 4/3`.
    pub fn interleaved_example(len: usize) -> Result<Self> {
        let mut terms = Vec::with_capacity(len);
        for i in 0..len {
            let k = (i / 2 + 1) as u32;
            let t = if i % 2 == 0 {
                1u64.checked_shl(k)
            } else {
                1u64.checked_shl(k - 1).and_then(|v| v.checked_mul(3))
            };
            terms.push(t.ok_or_else(|| Error::Range("interleaved sequence overflows u64".into()))?);
        }
        let mut seq =
            LacunarySequence::from_integer_terms(terms, 4.0 / 3.0, SequenceKind::Custom)?;
        seq.kind = SequenceKind::InterleavedExample;
        Ok(seq)
    }

    /// Big-gap sequence: `m_1 = 1`, `m_{k+1} = b_k m_k` with every `b_k >= 2`.
    pub fn big_gap(ratios: &[u64]) -> Result<Self> {
        let mut terms = vec![1u64];
        for (i, &b) in ratios.iter().enumerate() {
            if b < 2 {
                return Err(Error::Constraint(format!("gap ratio b_{} = {b} must be >= 2", i + 1)));
            }
            let next = terms
                .last()
                .unwrap()
                .checked_mul(b)
                .ok_or_else(|| Error::Range("big-gap sequence overflows u64".into()))?;
            terms.push(next);
        }
        let mut seq = LacunarySequence::from_integer_terms(terms, 2.0, SequenceKind::Custom)?;
        seq.kind = SequenceKind::BigGap;
        Ok(seq)
    }

    pub fn len(&self) -> usize {
        match &self.terms {
            Terms::Integer(v) => v.len(),
            Terms::Real(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_integral(&self) -> bool {
        matches!(self.terms, Terms::Integer(_))
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    /// 1-based term as f64.
    pub fn term_f64(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.len() {
            return Err(Error::Size(format!("term index {k} out of 1..={}", self.len())));
        }
        Ok(match &self.terms {
            Terms::Integer(v) => v[k - 1] as f64,
            Terms::Real(v) => v[k - 1],
        })
    }

    /// 1-based term as integer; type error for real sequences.
    pub fn term_int(&self, k: usize) -> Result<u64> {
        if k == 0 || k > self.len() {
            return Err(Error::Size(format!("term index {k} out of 1..={}", self.len())));
        }
        match &self.terms {
            Terms::Integer(v) => Ok(v[k - 1]),
            Terms::Real(_) => Err(Error::Type(
                "operation requires integer frequencies but the sequence is real".into(),
            )),
        }
    }

    pub fn integer_terms(&self) -> Result<&[u64]> {
        match &self.terms {
            Terms::Integer(v) => Ok(v),
            Terms::Real(_) => Err(Error::Type(
                "operation requires integer frequencies but the sequence is real".into(),
            )),
        }
    }

    /// True when every consecutive ratio is exactly 2 (enables the exact
    /// doubling-map evaluation of characteristic functions).
    pub fn is_dyadic_doubling(&self) -> bool {
        match &self.terms {
            Terms::Integer(v) => v.windows(2).all(|w| w[1] == 2 * w[0]),
            Terms::Real(_) => false,
        }
    }

    /// Sequence mini-language: `pow:B`, `example:interleaved`,
    /// `biggap:b1,b2,...`, `file:PATH` (one integer per line).
    pub fn parse_spec(spec: &str, len: usize) -> Result<Self> {
        if let Some(base) = spec.strip_prefix("pow:") {
            let base: u64 =
                base.parse().map_err(|_| Error::Parse(format!("bad power base in {spec:?}")))?;
            LacunarySequence::power(base, len)
        } else if spec == "example:interleaved" {
            LacunarySequence::interleaved_example(len)
        } else if let Some(list) = spec.strip_prefix("biggap:") {
            let ratios: Vec<u64> = list
                .split(',')
                .map(|s| s.trim().parse().map_err(|_| Error::Parse(format!("bad gap ratio {s:?}"))))
                .collect::<Result<_>>()?;
            LacunarySequence::big_gap(&ratios)
        } else if let Some(path) = spec.strip_prefix("file:") {
            let body = std::fs::read_to_string(path)?;
            let terms: Vec<u64> = body
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(|l| l.parse().map_err(|_| Error::Parse(format!("bad frequency {l:?}"))))
                .collect::<Result<_>>()?;
            if terms.len() < 2 {
                return Err(Error::Parse("sequence file needs at least two terms".into()));
            }
            // Declared bound = measured minimum ratio, nudged down one ulp so
            // the exact certification cannot fail on its own data.
            let mut q = f64::INFINITY;
            for w in terms.windows(2) {
                q = q.min(w[1] as f64 / w[0] as f64);
            }
            let q = f64::from_bits(q.to_bits() - 1);
            LacunarySequence::from_integer_terms(terms, q, SequenceKind::Custom)
        } else {
            Err(Error::Parse(format!("unknown sequence spec {spec:?}")))
        }
    }
}

// ---------------------------------------------------------------------------
// Coefficient triangles
// ---------------------------------------------------------------------------

/// Which normalizer convention a coefficient array carries.
///
/// Trigonometric sums use `A_n = (1/2 sum a^2)^(1/2)`; Walsh and shifted
/// sums use `A_n = (sum a^2)^(1/2)`. The convention is stored so that
/// downstream code cannot mix them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormConvention {
    Walsh,
    Trig,
}

#[derive(Debug, Clone)]
enum RowScheme {
    /// `a_{k,n} = n^{-alpha}` for all `k <= n`.
    Flat { alpha: f64 },
    /// `a_{k,n} = 1`.
    Unit,
    /// Row `n` is the first `n` entries of a fixed coefficient list.
    Prefix(Vec<f64>),
    /// Fully explicit rows.
    Rows(Vec<Vec<f64>>),
}

/// Triangular coefficient array `a_{k,n}` with derived normalizers.
#[derive(Debug, Clone)]
pub struct CoefficientTriangle {
    scheme: RowScheme,
    convention: NormConvention,
}

impl CoefficientTriangle {
    pub fn flat(alpha: f64, convention: NormConvention) -> Self {
        CoefficientTriangle { scheme: RowScheme::Flat { alpha }, convention }
    }

    pub fn unit(convention: NormConvention) -> Self {
        CoefficientTriangle { scheme: RowScheme::Unit, convention }
    }

    pub fn from_prefix(coeffs: Vec<f64>, convention: NormConvention) -> Self {
        CoefficientTriangle { scheme: RowScheme::Prefix(coeffs), convention }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>, convention: NormConvention) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != i + 1 {
                return Err(Error::Constraint(format!(
                    "row {} must have {} entries, got {}",
                    i + 1,
                    i + 1,
                    row.len()
                )));
            }
        }
        Ok(CoefficientTriangle { scheme: RowScheme::Rows(rows), convention })
    }

    pub fn convention(&self) -> NormConvention {
        self.convention
    }

    /// Coefficient mini-language: `flat:ALPHA`, `unit`, `file:PATH`
    /// (one coefficient per line; row `n` = first `n` entries).
    pub fn parse_spec(spec: &str, convention: NormConvention) -> Result<Self> {
        if let Some(alpha) = spec.strip_prefix("flat:") {
            let alpha: f64 =
                alpha.parse().map_err(|_| Error::Parse(format!("bad exponent in {spec:?}")))?;
            Ok(CoefficientTriangle::flat(alpha, convention))
        } else if spec == "unit" {
            Ok(CoefficientTriangle::unit(convention))
        } else if let Some(path) = spec.strip_prefix("file:") {
            let body = std::fs::read_to_string(path)?;
            let coeffs: Vec<f64> = body
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(|l| {
                    l.parse().map_err(|_| Error::Parse(format!("bad coefficient {l:?}")))
                })
                .collect::<Result<_>>()?;
            Ok(CoefficientTriangle::from_prefix(coeffs, convention))
        } else {
            Err(Error::Parse(format!("unknown coefficient spec {spec:?}")))
        }
    }

    /// Row `n` of the triangle: `a_{1,n}, ..., a_{n,n}`.
    pub fn row(&self, n: usize) -> Result<Vec<f64>> {
        match &self.scheme {
            RowScheme::Flat { alpha } => {
                let a = (n as f64).powf(-alpha);
                Ok(vec![a; n])
            }
            RowScheme::Unit => Ok(vec![1.0; n]),
            RowScheme::Prefix(coeffs) => {
                if n > coeffs.len() {
                    return Err(Error::Size(format!(
                        "row {n} requested but only {} coefficients available",
                        coeffs.len()
                    )));
                }
                Ok(coeffs[..n].to_vec())
            }
            RowScheme::Rows(rows) => rows
                .get(n - 1)
                .cloned()
                .ok_or_else(|| Error::Size(format!("row {n} requested, {} available", rows.len()))),
        }
    }

    pub fn coefficient(&self, k: usize, n: usize) -> Result<f64> {
        if k == 0 || k > n {
            return Err(Error::Size(format!("coefficient index {k} out of 1..={n}")));
        }
        Ok(self.row(n)?[k - 1])
    }

    /// The normalizer `A_n` under the stored convention.
    pub fn normalizer(&self, n: usize) -> Result<f64> {
        let row = self.row(n)?;
        let s = kahan_sum(row.iter().map(|a| a * a));
        let s = match self.convention {
            NormConvention::Walsh => s,
            NormConvention::Trig => 0.5 * s,
        };
        if s <= 0.0 {
            return Err(Error::Domain(format!("normalizer vanishes at row {n}")));
        }
        Ok(s.sqrt())
    }

    /// `d_n = max_k |a_{k,n}|`.
    pub fn max_abs(&self, n: usize) -> Result<f64> {
        Ok(self.row(n)?.iter().fold(0.0f64, |m, a| m.max(a.abs())))
    }

    /// Normalized coefficient `c_{k,n} = a_{k,n} / A_n`.
    pub fn normalized(&self, k: usize, n: usize) -> Result<f64> {
        Ok(self.coefficient(k, n)? / self.normalizer(n)?)
    }

    /// Fourth-power sum `sum_k a_{k,n}^4`, the finite-`n` value of the
    /// kurtosis parameter in the Walsh limiting function.
    pub fn kappa4(&self, n: usize) -> Result<f64> {
        Ok(kahan_sum(self.row(n)?.iter().map(|a| a.powi(4))))
    }
}

// ---------------------------------------------------------------------------
// Rademacher / Walsh / Bernoulli point evaluation
// ---------------------------------------------------------------------------

fn check_unit_interval(x: f64) -> Result<()> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(format!("argument {x} outside [0,1)")));
    }
    Ok(())
}

/// `r_n(x) = r_0(2^n x)`: +1 when binary digit `n+1` of `x` is 0, else -1.
///
/// Doubling and the conditional subtraction are exact in f64, so this reads
/// the digits of `x` with no rounding for every `n`.
pub fn rademacher(n: u32, x: f64) -> Result<f64> {
    check_unit_interval(x)?;
    let mut y = x;
    for _ in 0..n {
        y *= 2.0;
        if y >= 1.0 {
            y -= 1.0;
        }
        if y == 0.0 {
            break;
        }
    }
    Ok(if y < 0.5 { 1.0 } else { -1.0 })
}

/// Walsh function `W_m(x)`: product of `r_i(x)` over the set bits `i` of `m`.
/// `W_0 = 1` identically.
pub fn walsh(m: u64, x: f64) -> Result<f64> {
    check_unit_interval(x)?;
    let mut sign = 1.0f64;
    let mut bits = m;
    let mut y = x;
    while bits != 0 {
        if bits & 1 == 1 && y >= 0.5 {
            sign = -sign;
        }
        bits >>= 1;
        y *= 2.0;
        if y >= 1.0 {
            y -= 1.0;
        }
        if y == 0.0 {
            break;
        }
    }
    Ok(sign)
}

/// Value of `W_m` on cell `cell` of resolution `level` (exact; requires
/// `m < 2^level` so the cell is fine enough for `W_m` to be constant).
pub fn walsh_on_cell(m: u64, level: u32, cell: u64) -> f64 {
    debug_assert!(level <= 63 && m < (1u64 << level) && cell < (1u64 << level));
    let digits = cell.reverse_bits() >> (64 - level);
    if (m & digits).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Carry-free dyadic addition (bitwise xor). `k xor l = p` iff `k = l xor p`.
pub fn dyadic_xor(k: u64, l: u64) -> u64 {
    k ^ l
}

/// First Bernoulli polynomial `x - floor(x) - 1/2`, extended periodically.
pub fn bernoulli1(x: f64) -> f64 {
    x - x.floor() - 0.5
}

// ---------------------------------------------------------------------------
// Dyadic step functions
// ---------------------------------------------------------------------------

/// Exact piecewise-constant function on the `2^level` half-open dyadic
/// cells of `[0, 1)`. Cell measures are the exact rationals `1/2^level`;
/// floating point enters only through the stored values.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicStepFunction {
    level: u32,
    values: Vec<f64>,
}

impl DyadicStepFunction {
    pub fn new(level: u32, values: Vec<f64>) -> Result<Self> {
        if level > MAX_STEP_LEVEL {
            return Err(Error::Size(format!(
                "resolution {level} exceeds the cap {MAX_STEP_LEVEL}"
            )));
        }
        if values.len() != 1usize << level {
            return Err(Error::Constraint(format!(
                "level {level} needs {} cells, got {}",
                1usize << level,
                values.len()
            )));
        }
        Ok(DyadicStepFunction { level, values })
    }

    pub fn constant(c: f64) -> Self {
        DyadicStepFunction { level: 0, values: vec![c] }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cells(&self) -> usize {
        self.values.len()
    }

    /// Value on the cell containing `x in [0,1)`.
    pub fn value_at(&self, x: f64) -> Result<f64> {
        check_unit_interval(x)?;
        let cell = ((x * (1u64 << self.level) as f64) as usize).min(self.values.len() - 1);
        Ok(self.values[cell])
    }

    /// Same function represented at a finer resolution.
    pub fn refine(&self, level: u32) -> Result<Self> {
        if level < self.level {
            return Err(Error::Size(format!(
                "cannot refine level {} down to {level}",
                self.level
            )));
        }
        let rep = 1usize << (level - self.level);
        let mut values = Vec::with_capacity(self.values.len() * rep);
        for &v in &self.values {
            values.extend(std::iter::repeat_n(v, rep));
        }
        DyadicStepFunction::new(level, values)
    }

    /// Exact mean (cell masses are uniform powers of two).
    pub fn mean(&self) -> f64 {
        kahan_sum(self.values.iter().copied()) / self.values.len() as f64
    }

    pub fn l2_norm_sq(&self) -> f64 {
        kahan_sum(self.values.iter().map(|v| v * v)) / self.values.len() as f64
    }

    /// Pointwise sum; operands are aligned to the finer resolution.
    pub fn add(&self, other: &Self) -> Result<Self> {
        let level = self.level.max(other.level);
        let a = self.refine(level)?;
        let b = other.refine(level)?;
        let values = a.values.iter().zip(&b.values).map(|(x, y)| x + y).collect();
        DyadicStepFunction::new(level, values)
    }

    pub fn scale(&self, c: f64) -> Self {
        DyadicStepFunction {
            level: self.level,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Periodic function handles
// ---------------------------------------------------------------------------

/// Hölder data `|f(x) - f(y)| <= constant * |x - y|^exponent` (valid on the
/// dyadic cells the crate integrates over).
#[derive(Debug, Clone, Copy)]
pub struct HolderData {
    pub constant: f64,
    pub exponent: f64,
}

/// A 1-periodic function with optional exact integration and Hölder data.
pub trait PeriodicFn: Sync {
    fn eval(&self, x: f64) -> f64;

    /// Integral over `[a, b]` with `0 <= a <= b <= 1`. The default is a
    /// composite Gauss–Legendre rule; implementations override it with
    /// closed forms where available.
    fn integral(&self, a: f64, b: f64) -> f64 {
        let span = b - a;
        if span <= 0.0 {
            return 0.0;
        }
        let panels = ((span * 64.0).ceil() as usize).clamp(1, 64);
        crate::numeric::integrate_gl(|x| self.eval(x), a, b, panels, 10)
    }

    /// `int_0^1 f^2`.
    fn l2_sq(&self) -> f64 {
        crate::numeric::integrate_gl(|x| self.eval(x).powi(2), 0.0, 1.0, 256, 10)
    }

    fn holder(&self) -> Option<HolderData> {
        None
    }

    fn label(&self) -> &'static str {
        "custom"
    }
}

/// `cos(2 pi x)`.
pub struct CosFn;

impl PeriodicFn for CosFn {
    fn eval(&self, x: f64) -> f64 {
        (2.0 * std::f64::consts::PI * x).cos()
    }

    fn integral(&self, a: f64, b: f64) -> f64 {
        let tau = 2.0 * std::f64::consts::PI;
        ((tau * b).sin() - (tau * a).sin()) / tau
    }

    fn l2_sq(&self) -> f64 {
        0.5
    }

    fn holder(&self) -> Option<HolderData> {
        Some(HolderData { constant: 2.0 * std::f64::consts::PI, exponent: 1.0 })
    }

    fn label(&self) -> &'static str {
        "cos"
    }
}

/// The first Bernoulli polynomial as a periodic handle. Lipschitz with
/// constant 1 away from the wrap-around jump; dyadic cells of `[0,1)`
/// never straddle the jump.
pub struct Bernoulli1Fn;

impl Bernoulli1Fn {
    /// Continuous primitive of the periodic extension: `(u^2 - u)/2` on the
    /// fractional part.
    fn primitive(x: f64) -> f64 {
        let u = x - x.floor();
        0.5 * (u * u - u)
    }
}

impl PeriodicFn for Bernoulli1Fn {
    fn eval(&self, x: f64) -> f64 {
        bernoulli1(x)
    }

    fn integral(&self, a: f64, b: f64) -> f64 {
        Self::primitive(b) - Self::primitive(a)
    }

    fn l2_sq(&self) -> f64 {
        1.0 / 12.0
    }

    fn holder(&self) -> Option<HolderData> {
        Some(HolderData { constant: 1.0, exponent: 1.0 })
    }

    fn label(&self) -> &'static str {
        "bernoulli"
    }
}

/// Finite Fourier polynomial `sum_m (a_m cos(2 pi m x) + b_m sin(2 pi m x))`,
/// indices starting at `m = 1`.
pub struct FourierFn {
    pub cos_coeffs: Vec<f64>,
    pub sin_coeffs: Vec<f64>,
}

impl PeriodicFn for FourierFn {
    fn eval(&self, x: f64) -> f64 {
        let tau = 2.0 * std::f64::consts::PI;
        let mut acc = 0.0;
        for (i, &a) in self.cos_coeffs.iter().enumerate() {
            acc += a * (tau * (i + 1) as f64 * x).cos();
        }
        for (i, &b) in self.sin_coeffs.iter().enumerate() {
            acc += b * (tau * (i + 1) as f64 * x).sin();
        }
        acc
    }

    fn integral(&self, a: f64, b: f64) -> f64 {
        let tau = 2.0 * std::f64::consts::PI;
        let mut acc = 0.0;
        for (i, &c) in self.cos_coeffs.iter().enumerate() {
            let m = (i + 1) as f64;
            acc += c * ((tau * m * b).sin() - (tau * m * a).sin()) / (tau * m);
        }
        for (i, &s) in self.sin_coeffs.iter().enumerate() {
            let m = (i + 1) as f64;
            acc += s * ((tau * m * a).cos() - (tau * m * b).cos()) / (tau * m);
        }
        acc
    }

    fn l2_sq(&self) -> f64 {
        0.5 * (kahan_sum(self.cos_coeffs.iter().map(|c| c * c))
            + kahan_sum(self.sin_coeffs.iter().map(|s| s * s)))
    }

    fn holder(&self) -> Option<HolderData> {
        let tau = 2.0 * std::f64::consts::PI;
        let mut h = 0.0;
        for (i, &c) in self.cos_coeffs.iter().enumerate() {
            h += tau * (i + 1) as f64 * c.abs();
        }
        for (i, &s) in self.sin_coeffs.iter().enumerate() {
            h += tau * (i + 1) as f64 * s.abs();
        }
        Some(HolderData { constant: h, exponent: 1.0 })
    }

    fn label(&self) -> &'static str {
        "fourier"
    }
}

impl PeriodicFn for DyadicStepFunction {
    fn eval(&self, x: f64) -> f64 {
        let u = x - x.floor();
        self.value_at(u).unwrap_or(self.values[self.values.len() - 1])
    }

    fn integral(&self, a: f64, b: f64) -> f64 {
        // Exact: whole cells plus two partial end cells.
        let scale = (1u64 << self.level) as f64;
        let ia = (a * scale).floor() as usize;
        let ib = (b * scale).ceil() as usize;
        let mut acc = 0.0;
        for j in ia..ib.min(self.values.len()) {
            let lo = (j as f64 / scale).max(a);
            let hi = (((j + 1) as f64) / scale).min(b);
            if hi > lo {
                acc += self.values[j] * (hi - lo);
            }
        }
        acc
    }

    fn l2_sq(&self) -> f64 {
        DyadicStepFunction::l2_norm_sq(self)
    }

    fn label(&self) -> &'static str {
        "step"
    }
}

// ---------------------------------------------------------------------------
// Partial sums
// ---------------------------------------------------------------------------

fn check_row(seq: &LacunarySequence, coeffs: &CoefficientTriangle, n: usize) -> Result<Vec<f64>> {
    if n > seq.len() {
        return Err(Error::Size(format!("n = {n} exceeds the {} available frequencies", seq.len())));
    }
    coeffs.row(n)
}

/// Trigonometric partial sum `sum_{k=1..n} a_{k,n} cos(2 pi m_k x)`.
pub fn trig_partial_sum(
    seq: &LacunarySequence,
    coeffs: &CoefficientTriangle,
    n: usize,
    x: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("argument {x} outside [0,1]")));
    }
    let row = check_row(seq, coeffs, n)?;
    let tau = 2.0 * std::f64::consts::PI;
    let mut acc = 0.0;
    for k in 1..=n {
        acc += row[k - 1] * (tau * seq.term_f64(k)? * x).cos();
    }
    Ok(acc)
}

/// Walsh partial sum `sum_{k=1..n} a_{k,n} W_{m_k}` as an exact step
/// function at resolution `1 + bit_length(m_n)`.
pub fn walsh_partial_sum(
    seq: &LacunarySequence,
    coeffs: &CoefficientTriangle,
    n: usize,
) -> Result<DyadicStepFunction> {
    let row = check_row(seq, coeffs, n)?;
    let m_max = seq.term_int(n)?;
    let level = 64 - m_max.leading_zeros() + 1;
    if level > MAX_STEP_LEVEL {
        return Err(Error::Size(format!(
            "frequency {m_max} needs resolution {level}, cap is {MAX_STEP_LEVEL}"
        )));
    }
    let ms: Vec<u64> = (1..=n).map(|k| seq.term_int(k)).collect::<Result<_>>()?;
    let cells = 1usize << level;
    let mut values = vec![0.0f64; cells];
    for (cell, slot) in values.iter_mut().enumerate() {
        let digits = (cell as u64).reverse_bits() >> (64 - level);
        let mut acc = 0.0;
        for (a, &m) in row.iter().zip(&ms) {
            let sign = if (m & digits).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            acc += a * sign;
        }
        *slot = acc;
    }
    DyadicStepFunction::new(level, values)
}

/// One Rademacher weight of the geometric Bernoulli expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RademacherWeight {
    /// Digit index `p >= 2`: the weight multiplies the sign of binary digit
    /// `p` of `x`, i.e. `r_{p-1}(x) = r_0(2^{p-1} x)` in this crate's
    /// zero-based indexing.
    pub index: usize,
    pub weight: f64,
}

/// Rademacher expansion weights of `sum_{k=1..n} f(2^k x)` for the first
/// Bernoulli polynomial `f`:
///
/// `w_p = -(1/2 - 2^-p)` for `2 <= p <= n+1`, and
/// `w_p = -(2^{n-p} - 2^-p)` for `n+2 <= p <= n+1+tail`,
///
/// where the index pairs with digit `p` of `x` (see [`RademacherWeight`]).
/// The truncated tail contributes at most `2^-tail` to the reconstruction.
pub fn bernoulli_expansion_weights(n: usize, tail: usize) -> Vec<RademacherWeight> {
    let mut out = Vec::with_capacity(n + tail);
    if n == 0 {
        return out;
    }
    for p in 2..=n + 1 {
        out.push(RademacherWeight {
            index: p,
            weight: -(0.5 - libm::exp2(-(p as f64))),
        });
    }
    for p in n + 2..=n + 1 + tail {
        out.push(RademacherWeight {
            index: p,
            weight: -(libm::exp2((n as f64) - (p as f64)) - libm::exp2(-(p as f64))),
        });
    }
    out
}

/// Partial sum `sum_{k=1..n} a_{k,n} f(m_k x)` for a periodic handle `f`.
pub fn holder_partial_sum(
    f: &dyn PeriodicFn,
    seq: &LacunarySequence,
    coeffs: &CoefficientTriangle,
    n: usize,
    x: f64,
) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let row = check_row(seq, coeffs, n)?;
    let mut acc = 0.0;
    for k in 1..=n {
        acc += row[k - 1] * f.eval(seq.term_f64(k)? * x);
    }
    Ok(acc)
}

/// Alias for [`LacunarySequence::big_gap`].
pub fn big_gap_sequence(ratios: &[u64]) -> Result<LacunarySequence> {
    LacunarySequence::big_gap(ratios)
}

/// Where a step approximation samples each cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleRule {
    LeftEndpoint,
    Midpoint,
}

/// Piecewise-constant approximation of `f` on `b` uniform cells.
#[derive(Debug, Clone)]
pub struct StepApproximation {
    pub cells: Vec<f64>,
    /// Certified sup-norm error `h / b^alpha` from the Hölder data.
    pub error_bound: f64,
}

impl StepApproximation {
    pub fn eval(&self, x: f64) -> f64 {
        let u = x - x.floor();
        let b = self.cells.len();
        let j = ((u * b as f64) as usize).min(b - 1);
        self.cells[j]
    }
}

/// Samples `f` once per cell: `g = f(x_j)` on `[j/b, (j+1)/b)`, with the
/// sup error bounded by `h / b^alpha`.
pub fn step_approximation(
    f: &dyn PeriodicFn,
    b: u32,
    rule: SampleRule,
) -> Result<StepApproximation> {
    if b < 2 {
        return Err(Error::Constraint(format!("cell count b = {b} must be >= 2")));
    }
    let holder = f
        .holder()
        .ok_or_else(|| Error::Domain("step approximation needs Hölder data".into()))?;
    let offset = match rule {
        SampleRule::LeftEndpoint => 0.0,
        SampleRule::Midpoint => 0.5,
    };
    let cells = (0..b).map(|j| f.eval((j as f64 + offset) / b as f64)).collect();
    let error_bound = holder.constant * (b as f64).powf(-holder.exponent);
    Ok(StepApproximation { cells, error_bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rademacher_reads_binary_digits() {
        assert_eq!(rademacher(0, 0.25).unwrap(), 1.0);
        assert_eq!(rademacher(0, 0.75).unwrap(), -1.0);
        assert_eq!(rademacher(1, 0.25).unwrap(), -1.0); // r_0(0.5) = -1
        assert!(rademacher(0, 1.0).is_err());
        assert!(rademacher(3, -0.1).is_err());
        // Deep digits of a dyadic point are all zero.
        assert_eq!(rademacher(700, 0.3125).unwrap(), 1.0);
    }

    #[test]
    fn walsh_small_indices() {
        assert_eq!(walsh(0, 0.9).unwrap(), 1.0);
        assert_eq!(walsh(1, 0.3).unwrap(), rademacher(0, 0.3).unwrap());
        // Digit-table oracle at x = 0.25: b = (0,1,...), r_0 = +1, r_1 = -1.
        assert_eq!(walsh(3, 0.25).unwrap(), -1.0);
    }

    #[test]
    fn walsh_multiplication_identity_on_random_cells() {
        // W_k W_l = W_{k xor l}, evaluated exactly on dyadic cells.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let level = 21;
        for _ in 0..20_000 {
            let k = next() & ((1 << 20) - 1);
            let l = next() & ((1 << 20) - 1);
            let cell = next() & ((1 << level) - 1);
            let wk = walsh_on_cell(k, level, cell);
            let wl = walsh_on_cell(l, level, cell);
            let wx = walsh_on_cell(k ^ l, level, cell);
            assert_eq!(wk * wl, wx, "k={k} l={l} cell={cell}");
        }
    }

    #[test]
    fn walsh_cell_and_pointwise_agree() {
        let level = 12u32;
        for m in [0u64, 1, 2, 3, 5, 1023, 2047] {
            for cell in (0..(1u64 << level)).step_by(137) {
                let x = cell as f64 / (1u64 << level) as f64;
                assert_eq!(walsh(m, x).unwrap(), walsh_on_cell(m, level, cell), "m={m} cell={cell}");
            }
        }
    }

    #[test]
    fn xor_basics() {
        assert_eq!(dyadic_xor(5, 3), 6);
        assert_eq!(dyadic_xor(42, 42), 0);
        assert_eq!(dyadic_xor(42, 0), 42);
        // k xor l = p iff k = l xor p
        assert_eq!(dyadic_xor(dyadic_xor(19, 7), 7), 19);
    }

    #[test]
    fn bernoulli1_values() {
        assert_eq!(bernoulli1(0.0), -0.5);
        assert_eq!(bernoulli1(0.75), 0.25);
        assert_eq!(bernoulli1(1.75), 0.25);
        assert_eq!(bernoulli1(-0.25), 0.25);
    }

    #[test]
    fn sequence_construction_and_certification() {
        let s = LacunarySequence::power(2, 10).unwrap();
        assert_eq!(s.term_int(1).unwrap(), 2);
        assert_eq!(s.term_int(10).unwrap(), 1024);
        assert!(s.is_dyadic_doubling());

        let inter = LacunarySequence::interleaved_example(8).unwrap();
        assert_eq!(inter.integer_terms().unwrap(), &[2, 3, 4, 6, 8, 12, 16, 24]);
        assert_eq!(inter.q(), 4.0 / 3.0);

        // 4 -> 5 violates q = 4/3: 5/4 < 4/3.
        assert!(LacunarySequence::from_integer_terms(
            vec![3, 4, 5],
            4.0 / 3.0,
            SequenceKind::Custom
        )
        .is_err());
        // Non-increasing rejected.
        assert!(
            LacunarySequence::from_integer_terms(vec![4, 4], 1.5, SequenceKind::Custom).is_err()
        );
    }

    #[test]
    fn big_gap_cumulative_products() {
        let s = LacunarySequence::big_gap(&[2, 3, 4]).unwrap();
        assert_eq!(s.integer_terms().unwrap(), &[1, 2, 6, 24]);
        let s = LacunarySequence::big_gap(&[2, 2, 2]).unwrap();
        assert_eq!(s.integer_terms().unwrap(), &[1, 2, 4, 8]);
        let s = LacunarySequence::big_gap(&[2, 3, 4, 5]).unwrap();
        assert_eq!(s.integer_terms().unwrap(), &[1, 2, 6, 24, 120]);
        assert!(LacunarySequence::big_gap(&[2, 1]).is_err());
    }

    #[test]
    fn sequence_spec_language() {
        let s = LacunarySequence::parse_spec("pow:3", 4).unwrap();
        assert_eq!(s.integer_terms().unwrap(), &[3, 9, 27, 81]);
        let s = LacunarySequence::parse_spec("example:interleaved", 5).unwrap();
        assert_eq!(s.integer_terms().unwrap(), &[2, 3, 4, 6, 8]);
        let s = LacunarySequence::parse_spec("biggap:2,3", 0).unwrap();
        assert_eq!(s.integer_terms().unwrap(), &[1, 2, 6]);
        assert!(LacunarySequence::parse_spec("nope:1", 3).is_err());
    }

    #[test]
    fn triangle_normalizers_both_conventions() {
        let walsh = CoefficientTriangle::flat(0.25, NormConvention::Walsh);
        let n = 16usize;
        // sum a^2 = n * n^{-1/2} = sqrt(n); A_n = n^{1/4}
        assert!((walsh.normalizer(n).unwrap() - 2.0).abs() < 1e-14);
        let trig = CoefficientTriangle::unit(NormConvention::Trig);
        assert!((trig.normalizer(8).unwrap() - 2.0).abs() < 1e-14);
        assert!((walsh.max_abs(n).unwrap() - 0.5).abs() < 1e-14);
        // |c_{k,n}| <= d_n / A_n identically
        let c = walsh.normalized(3, n).unwrap().abs();
        assert!(c <= walsh.max_abs(n).unwrap() / walsh.normalizer(n).unwrap() + 1e-15);
    }

    #[test]
    fn trig_partial_sum_examples() {
        let seq =
            LacunarySequence::from_integer_terms(vec![1], 1.5, SequenceKind::Custom).unwrap();
        let unit = CoefficientTriangle::unit(NormConvention::Trig);
        assert!((trig_partial_sum(&seq, &unit, 1, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(trig_partial_sum(&seq, &unit, 1, 0.25).unwrap().abs() < 1e-15);

        let seq = LacunarySequence::from_integer_terms(vec![2, 4, 8], 2.0, SequenceKind::Custom)
            .unwrap();
        let x = 0.1;
        let got = trig_partial_sum(&seq, &unit, 3, x).unwrap();
        // direct term-by-term oracle
        let tau = 2.0 * std::f64::consts::PI;
        let want = (tau * 2.0 * x).cos() + (tau * 4.0 * x).cos() + (tau * 8.0 * x).cos();
        assert!((got - want).abs() < 1e-14);

        assert!(trig_partial_sum(&seq, &unit, 4, x).is_err());
    }

    #[test]
    fn walsh_partial_sum_quarter_cells() {
        let seq =
            LacunarySequence::from_integer_terms(vec![1, 2], 2.0, SequenceKind::Custom).unwrap();
        let unit = CoefficientTriangle::unit(NormConvention::Walsh);

        let s1 = walsh_partial_sum(&seq, &unit, 1).unwrap();
        assert_eq!(s1.level(), 2); // bit_length(1) + 1
        assert_eq!(s1.values(), &[1.0, 1.0, -1.0, -1.0]);

        let s2 = walsh_partial_sum(&seq, &unit, 2).unwrap();
        assert_eq!(s2.level(), 3);
        // cell-by-cell digit oracle: values 2,0,0,-2 on quarters
        let quarters: Vec<f64> = (0..4).map(|j| s2.values()[2 * j]).collect();
        assert_eq!(quarters, vec![2.0, 0.0, 0.0, -2.0]);

        // pointwise agreement at pseudo-random points
        let mut state = 123456789u64;
        for _ in 0..10_000 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let x = (state >> 11) as f64 / (1u64 << 53) as f64;
            let direct = walsh(1, x).unwrap() + walsh(2, x).unwrap();
            assert_eq!(s2.value_at(x).unwrap(), direct);
        }

        let real = LacunarySequence::from_real_terms(vec![1.5, 3.1], 2.0).unwrap();
        assert!(matches!(walsh_partial_sum(&real, &unit, 2), Err(Error::Type(_))));
    }

    #[test]
    fn bernoulli_weights_structure() {
        assert!(bernoulli_expansion_weights(0, 8).is_empty());
        let w = bernoulli_expansion_weights(1, 4);
        assert_eq!(w[0].index, 2);
        assert!((w[0].weight + 0.25).abs() == 0.0);
        // Variance identity n/4 - 1/3 + 1/(3 2^n), tail truncation far below 1e-12.
        for n in [1usize, 2, 8, 20] {
            let ws = bernoulli_expansion_weights(n, 64);
            let var = kahan_sum(ws.iter().map(|w| w.weight * w.weight));
            let target = n as f64 / 4.0 - 1.0 / 3.0 + 1.0 / (3.0 * libm::exp2(n as f64));
            assert!((var - target).abs() < 1e-12, "n={n}: {var} vs {target}");
        }
    }

    #[test]
    fn bernoulli_reconstruction_exact_on_dyadic_grid() {
        // Exact scaled-integer comparison of sum_k f(2^k x) against the
        // Rademacher expansion on the level-20 grid: the gap must be the
        // truncated tail, below 2^-tail.
        let n = 12usize;
        let tail = 64usize;
        let scale_bits = (n + 1 + tail) as u32; // value * 2^scale_bits is integral
        let grid_level = 20u32;
        let weights_bits = scale_bits;
        for j in (0..(1u64 << grid_level)).step_by(4099) {
            // lhs = sum_{k=1..n} f(2^k x), x = j / 2^20, in units of 2^-scale_bits
            let mut lhs: i128 = 0;
            for k in 1..=n as u32 {
                let frac_num = if k >= grid_level {
                    0
                } else {
                    (j % (1u64 << (grid_level - k))) as i128
                };
                let frac_den_bits = grid_level.saturating_sub(k);
                // f = frac - 1/2 scaled by 2^scale_bits
                lhs += (frac_num << (scale_bits - frac_den_bits)) - (1i128 << (scale_bits - 1));
            }
            // rhs = sum_p w_p * (sign of digit p of x) in the same units
            let mut rhs: i128 = 0;
            for p in 2..=(n + 1 + tail) as u32 {
                let r: i128 = if p > grid_level {
                    1 // digits beyond the grid resolution are zero
                } else if (j >> (grid_level - p)) & 1 == 1 {
                    -1
                } else {
                    1
                };
                let w: i128 = if p <= (n + 1) as u32 {
                    -((1i128 << (weights_bits - 1)) - (1i128 << (weights_bits - p)))
                } else {
                    -((1i128 << (weights_bits + n as u32 - p)) - (1i128 << (weights_bits - p)))
                };
                rhs += w * r;
            }
            let diff = (lhs - rhs).unsigned_abs();
            assert!(diff <= 1u128 << (scale_bits - tail as u32), "j={j}: diff {diff}");
        }
    }

    #[test]
    fn holder_sum_reduces_to_known_cases() {
        let seq = LacunarySequence::power(2, 10).unwrap();
        let unit = CoefficientTriangle::unit(NormConvention::Walsh);
        assert_eq!(holder_partial_sum(&Bernoulli1Fn, &seq, &unit, 0, 0.3).unwrap(), 0.0);

        // f = cos matches the trigonometric sum definitionally.
        let trig_coeffs = CoefficientTriangle::flat(0.4, NormConvention::Trig);
        for &x in &[0.0, 0.11, 0.5, 0.97] {
            let a = holder_partial_sum(&CosFn, &seq, &trig_coeffs, 6, x).unwrap();
            let b = trig_partial_sum(&seq, &trig_coeffs, 6, x).unwrap();
            assert!((a - b).abs() < 1e-12);
        }

        // f = bernoulli1 with unit coefficients matches the weight expansion
        // (weight index p pairs with digit p, i.e. with r_{p-1}).
        let n = 10usize;
        let weights = bernoulli_expansion_weights(n, 64);
        for j in (0..(1u64 << 16)).step_by(977) {
            let x = j as f64 / (1u64 << 16) as f64;
            let direct = holder_partial_sum(&Bernoulli1Fn, &seq, &unit, n, x).unwrap();
            let mut expanded = 0.0;
            for w in &weights {
                expanded += w.weight * rademacher(w.index as u32 - 1, x).unwrap();
            }
            assert!((direct - expanded).abs() < 1e-12, "x={x}: {direct} vs {expanded}");
        }
    }

    #[test]
    fn step_function_invariants() {
        let s = DyadicStepFunction::new(2, vec![2.0, 0.0, 0.0, -2.0]).unwrap();
        assert_eq!(s.value_at(0.0).unwrap(), 2.0);
        assert_eq!(s.value_at(0.25).unwrap(), 0.0);
        assert_eq!(s.value_at(0.999).unwrap(), -2.0);
        assert_eq!(s.mean(), 0.0);
        assert_eq!(s.l2_norm_sq(), 2.0);
        let fine = s.refine(4).unwrap();
        assert_eq!(fine.cells(), 16);
        assert_eq!(fine.value_at(0.26).unwrap(), 0.0);
        assert!(DyadicStepFunction::new(2, vec![1.0; 3]).is_err());

        // exact partial-cell integration via the periodic-function view
        let one_cell = PeriodicFn::integral(&s, 0.0, 0.125);
        assert!((one_cell - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rademacher_mean_zero_on_fine_grids() {
        for n in 0..6u32 {
            let level = n + 1;
            let cells = 1u64 << level;
            let sum: f64 = (0..cells)
                .map(|c| walsh_on_cell(1 << n, level, c))
                .sum();
            assert_eq!(sum, 0.0, "n={n}");
        }
    }

    #[test]
    fn step_approximation_bernoulli_midpoint() {
        let g = step_approximation(&Bernoulli1Fn, 4, SampleRule::Midpoint).unwrap();
        assert!((g.error_bound - 0.25).abs() < 1e-15); // h=1, alpha=1, b=4
        // dense-grid oracle: sup |f - g| <= 1/8 for the midpoint rule
        let mut sup = 0.0f64;
        for i in 0..100_000 {
            let x = i as f64 / 100_000.0;
            sup = sup.max((bernoulli1(x) - g.eval(x)).abs());
        }
        assert!(sup <= 0.125 + 1e-12, "sup = {sup}");

        // constant function: zero error
        let c = FourierFn { cos_coeffs: vec![], sin_coeffs: vec![] };
        let g = step_approximation(&c, 8, SampleRule::LeftEndpoint).unwrap();
        assert_eq!(g.error_bound, 0.0);
        assert!(g.cells.iter().all(|&v| v == 0.0));
    }
}
