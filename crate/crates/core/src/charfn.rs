//! Characteristic and moment generating functions, mod-Gaussian residuals,
//! zone-of-control certification, and the L^1 uniform-integrability check.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::{CoefficientTriangle, DyadicStepFunction, LacunarySequence, PeriodicFn};
use crate::transfer;

/// Node budget for the doubling trapezoid rule (2^23 evaluation points).
const MAX_QUAD_NODES: usize = 1 << 23;

/// Absolute slack allowed on `|phi| <= 1` for characteristic values.
pub const CHARFN_MODULUS_SLACK: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Sampled complex functions
// ---------------------------------------------------------------------------

/// What a sampled grid function represents.
#[derive(Debug, Clone, Default)]
pub struct GridMeta {
    pub label: String,
    pub n: usize,
    /// Variance parameter `t_n` when the samples belong to a mod-Gaussian
    /// family.
    pub t_n: Option<f64>,
}

/// Values of a characteristic / moment generating function on an ordered
/// grid of evaluation points `z` (the grid stores the actual complex
/// arguments; a real-lambda characteristic grid has `z = i lambda`).
#[derive(Debug, Clone)]
pub struct ComplexGridFunction {
    grid: Vec<Complex64>,
    values: Vec<Complex64>,
    meta: GridMeta,
}

fn strictly_increasing(xs: impl Iterator<Item = f64>) -> bool {
    let mut prev = f64::NEG_INFINITY;
    for x in xs {
        if x <= prev {
            return false;
        }
        prev = x;
    }
    true
}

impl ComplexGridFunction {
    pub fn new(grid: Vec<Complex64>, values: Vec<Complex64>, meta: GridMeta) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::Constraint(format!(
                "grid has {} points but {} values were supplied",
                grid.len(),
                values.len()
            )));
        }
        if grid.iter().all(|z| z.im == 0.0) && !strictly_increasing(grid.iter().map(|z| z.re)) {
            return Err(Error::Constraint("real grid must be strictly increasing".into()));
        }
        if grid.iter().all(|z| z.re == 0.0) && !strictly_increasing(grid.iter().map(|z| z.im)) {
            return Err(Error::Constraint("imaginary-axis grid must be strictly increasing".into()));
        }
        Ok(ComplexGridFunction { grid, values, meta })
    }

    /// Characteristic-function samples on a real lambda grid (`z = i lambda`).
    /// Enforces `|value| <= 1 + 1e-12` at every point.
    pub fn characteristic(lambdas: &[f64], values: Vec<Complex64>, meta: GridMeta) -> Result<Self> {
        for (lam, v) in lambdas.iter().zip(&values) {
            if v.norm() > 1.0 + CHARFN_MODULUS_SLACK {
                return Err(Error::Constraint(format!(
                    "characteristic value at lambda = {lam} has modulus {} > 1",
                    v.norm()
                )));
            }
        }
        let grid = lambdas.iter().map(|&l| Complex64::new(0.0, l)).collect();
        ComplexGridFunction::new(grid, values, meta)
    }

    pub fn grid(&self) -> &[Complex64] {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn meta(&self) -> &GridMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Integrable sum handles and quadrature
// ---------------------------------------------------------------------------

/// A partial sum whose characteristic function can be integrated.
pub enum SumHandle<'a> {
    /// Exact dyadic step function: the integral is a finite atom sum.
    Step(&'a DyadicStepFunction),
    /// Cosine sum over a lacunary sequence.
    Trig { seq: &'a LacunarySequence, coeffs: &'a CoefficientTriangle, n: usize },
    /// `sum a_k f(m_k x)` for a periodic handle `f`.
    Shifted {
        f: &'a dyn PeriodicFn,
        seq: &'a LacunarySequence,
        coeffs: &'a CoefficientTriangle,
        n: usize,
    },
}

impl SumHandle<'_> {
    fn eval(&self, x: f64) -> Result<f64> {
        match self {
            SumHandle::Step(s) => s.value_at(x),
            SumHandle::Trig { seq, coeffs, n } => {
                crate::series::trig_partial_sum(seq, coeffs, *n, x)
            }
            SumHandle::Shifted { f, seq, coeffs, n } => {
                crate::series::holder_partial_sum(*f, seq, coeffs, *n, x)
            }
        }
    }

    fn top_frequency(&self) -> Result<f64> {
        match self {
            SumHandle::Step(s) => Ok(libm::exp2(s.level() as f64)),
            SumHandle::Trig { seq, n, .. } | SumHandle::Shifted { seq, n, .. } => {
                seq.term_f64(*n)
            }
        }
    }
}

/// Periodic trapezoid rule with node doubling until two successive levels
/// agree within `tol`.
fn trapezoid_char_fn(handle: &SumHandle, lambda: f64, tol: f64) -> Result<Complex64> {
    let top = handle.top_frequency()?;
    let bits = (top.max(1.0)).log2().floor() as usize + 1;
    let mut nodes = 64 * (1 + bits);
    if nodes > MAX_QUAD_NODES {
        return Err(Error::Convergence { last_two: [(f64::NAN, f64::NAN); 2], tol });
    }

    let sample = |count: usize, offset: f64| -> Result<Complex64> {
        let mut re = 0.0;
        let mut im = 0.0;
        for k in 0..count {
            let x = (k as f64 + offset) / count as f64;
            let phase = lambda * handle.eval(x)?;
            re += phase.cos();
            im += phase.sin();
        }
        Ok(Complex64::new(re, im) / count as f64)
    };

    let mut prev = sample(nodes, 0.0)?;
    loop {
        // Interleave midpoints: T_{2N} = (T_N + M_N) / 2.
        let mid = sample(nodes, 0.5)?;
        let cur = (prev + mid) * 0.5;
        nodes *= 2;
        if (cur - prev).norm() < tol {
            return Ok(cur);
        }
        if nodes > MAX_QUAD_NODES {
            return Err(Error::Convergence {
                last_two: [(prev.re, prev.im), (cur.re, cur.im)],
                tol,
            });
        }
        prev = cur;
    }
}

/// `int_0^1 exp(i lambda S(x)) dx`.
///
/// Step functions are summed exactly over their cells; doubling cosine sums
/// go through the spectral transfer operator; everything else uses the
/// periodic trapezoid rule with node doubling (starting from
/// `64 * (1 + bit_length(m_n))` nodes).
pub fn char_fn_quadrature(handle: &SumHandle, lambda: f64, tol: f64) -> Result<Complex64> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    match handle {
        SumHandle::Step(s) => {
            // Group equal cell values; the atom masses are exact dyadics.
            let mut groups: std::collections::HashMap<u64, u64> = std::collections::HashMap::new();
            for v in s.values() {
                *groups.entry(v.to_bits()).or_insert(0) += 1;
            }
            let total = s.cells() as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for (bits, count) in groups {
                let v = f64::from_bits(bits);
                let phase = lambda * v;
                acc += Complex64::new(phase.cos(), phase.sin()) * (count as f64 / total);
            }
            Ok(acc)
        }
        SumHandle::Trig { seq, coeffs, n } if seq.is_dyadic_doubling() && *n > 16 => {
            let row = coeffs.row(*n)?;
            Ok(transfer::doubling_trig_char_fn(&row, lambda))
        }
        _ => trapezoid_char_fn(handle, lambda, tol),
    }
}

// ---------------------------------------------------------------------------
// Exact moment generating functions
// ---------------------------------------------------------------------------

/// Product form `prod_k cosh(z a_{k,n})` of the Walsh-sum moment generating
/// function. Valid only in the independence regime, so the sequence must
/// certify ratio `q >= 2`.
pub fn mgf_walsh_exact(
    seq: &LacunarySequence,
    coeffs: &CoefficientTriangle,
    n: usize,
    z: Complex64,
) -> Result<Complex64> {
    if seq.q() < 2.0 {
        return Err(Error::Precondition(format!(
            "walsh product form needs a certified ratio q >= 2, sequence has q = {}",
            seq.q()
        )));
    }
    if n > seq.len() {
        return Err(Error::Size(format!("n = {n} exceeds {} frequencies", seq.len())));
    }
    let row = coeffs.row(n)?;
    let mut acc = Complex64::new(1.0, 0.0);
    for a in row {
        acc *= (z * a).cosh();
    }
    Ok(acc)
}

/// `log prod_k cosh(z a_{k,n})`, overflow-free for large `n`.
pub fn log_mgf_walsh_exact(
    seq: &LacunarySequence,
    coeffs: &CoefficientTriangle,
    n: usize,
    z: Complex64,
) -> Result<Complex64> {
    if seq.q() < 2.0 {
        return Err(Error::Precondition(format!(
            "walsh product form needs a certified ratio q >= 2, sequence has q = {}",
            seq.q()
        )));
    }
    let row = coeffs.row(n)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for a in row {
        acc += (z * a).cosh().ln();
    }
    Ok(acc)
}

/// Moment generating function of `sum_{k=1..n} f(2^k x)` for the first
/// Bernoulli polynomial, via its Rademacher expansion:
/// `prod_p cosh(z w_p)` with the tail truncated after `tail` extra terms.
pub fn mgf_bernoulli_exact(n: usize, z: Complex64, tail: usize) -> Result<Complex64> {
    Ok(log_mgf_bernoulli_exact(n, z, tail)?.exp())
}

/// Log form of [`mgf_bernoulli_exact`] (safe for large `n`).
pub fn log_mgf_bernoulli_exact(n: usize, z: Complex64, tail: usize) -> Result<Complex64> {
    if tail < 40 {
        return Err(Error::Domain(format!(
            "tail = {tail} leaves a visible truncation error; need tail >= 40"
        )));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for w in crate::series::bernoulli_expansion_weights(n, tail) {
        acc += (z * w.weight).cosh().ln();
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Limiting functions and residuals
// ---------------------------------------------------------------------------

/// The limiting function `psi` a family converges to after removing the
/// Gaussian factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitingKind {
    /// `exp(-z^4 kappa4 / 12)` (independent Walsh regime).
    Walsh { kappa4: f64 },
    /// `exp(-z^4 / 192)` (Bernoulli polynomial shifts).
    Bernoulli,
    /// Identically 1.
    Trivial,
}

pub fn limiting_function(kind: LimitingKind, z: Complex64) -> Result<Complex64> {
    match kind {
        LimitingKind::Walsh { kappa4 } => {
            if kappa4 < 0.0 {
                return Err(Error::Domain(format!("kappa4 = {kappa4} must be nonnegative")));
            }
            Ok((-z.powu(4) * (kappa4 / 12.0)).exp())
        }
        LimitingKind::Bernoulli => Ok((-z.powu(4) / 192.0).exp()),
        LimitingKind::Trivial => Ok(Complex64::new(1.0, 0.0)),
    }
}

/// Pointwise `phi(z) * exp(-t_n z^2 / 2)`.
pub fn mod_gaussian_residual(phi: &ComplexGridFunction, t_n: f64) -> Result<ComplexGridFunction> {
    if !(t_n > 0.0) {
        return Err(Error::Domain(format!("t_n = {t_n} must be positive")));
    }
    let values = phi
        .grid()
        .iter()
        .zip(phi.values())
        .map(|(z, v)| v * (-z * z * (t_n / 2.0)).exp())
        .collect();
    let meta = GridMeta { t_n: Some(t_n), ..phi.meta().clone() };
    ComplexGridFunction::new(phi.grid().to_vec(), values, meta)
}

// ---------------------------------------------------------------------------
// Zone of control
// ---------------------------------------------------------------------------

/// A family `X_n` described by its normalized residual
/// `R_n(lambda) = |E[e^{i lambda X_n}] e^{t_n lambda^2 / 2} - 1|`.
pub struct ZoneFamily<'a> {
    pub label: String,
    pub t_n: Box<dyn Fn(usize) -> f64 + Sync + 'a>,
    pub residual: Box<dyn Fn(usize, f64) -> f64 + Sync + 'a>,
}

/// Zone parameters under test.
#[derive(Debug, Clone, Copy)]
pub struct ZoneParams {
    pub v: f64,
    pub w: f64,
    pub gamma: f64,
    pub d: f64,
}

/// Outcome of a zone-of-control certification.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ZoneOfControlReport {
    pub v: f64,
    pub w: f64,
    pub gamma: f64,
    pub d: f64,
    pub k1: f64,
    pub k2: f64,
    /// Largest residual seen on the verification grid.
    pub max_residual: f64,
    /// `(n, lambda, residual, bound)` at the tightest point of the
    /// verification grid (or at the offending point on failure).
    pub worst: Option<(usize, f64, f64, f64)>,
    pub z1_pass: bool,
    pub z2_pass: bool,
}

impl ZoneOfControlReport {
    /// Verdict recomputed from the stored conditions.
    pub fn pass(&self) -> bool {
        self.z1_pass && self.z2_pass
    }
}

fn zone_lambda_grid(zone_max: f64, count: usize) -> Vec<f64> {
    // Geometric grid over three decades up to the zone edge.
    let lo = zone_max * 1e-3;
    (0..count)
        .map(|i| lo * (zone_max / lo).powf(i as f64 / (count - 1) as f64))
        .collect()
}

/// Fits the smallest constants `K1, K2` with
/// `R_n(lambda) <= K1 |lambda|^v exp(K2 |lambda|^w)` on the zone
/// `[-D t_n^gamma, D t_n^gamma]` for every `n` in `n_list`, then applies the
/// admissibility conditions on `(w, gamma, D, K2)`.
///
/// `K2` comes from a least-squares fit of the log-residuals on a geometric
/// grid (256 points per `n`, clamped to `K2 >= 0`); `K1` is then the exact
/// maximum of `R / (lambda^v e^{K2 lambda^w})` on a 4x denser grid.
pub fn zone_of_control_check(
    family: &ZoneFamily,
    params: &ZoneParams,
    n_list: &[usize],
) -> Result<ZoneOfControlReport> {
    if params.w < 2.0 {
        return Err(Error::Domain(format!("zone index w = {} must be >= 2", params.w)));
    }
    if n_list.is_empty() {
        return Err(Error::Domain("empty n list".into()));
    }

    let mut fit_points: Vec<(f64, f64)> = Vec::new(); // (lambda^w, ln R - v ln lambda)
    let mut z1_pass = true;
    let mut worst_fail: Option<(usize, f64, f64, f64)> = None;

    for &n in n_list {
        let zone_max = params.d * (family.t_n)(n).powf(params.gamma);
        for lam in zone_lambda_grid(zone_max, 256) {
            let r = (family.residual)(n, lam);
            if !r.is_finite() || r > 1e8 {
                z1_pass = false;
                worst_fail = Some((n, lam, r, f64::INFINITY));
                continue;
            }
            if r > 1e-300 {
                fit_points.push((lam.powf(params.w), r.ln() - params.v * lam.ln()));
            }
        }
    }

    let k2 = if fit_points.len() >= 2 {
        crate::numeric::ls_slope(&fit_points).max(0.0)
    } else {
        0.0
    };

    // Verification pass on the denser grid defines K1 (and hence makes the
    // pointwise inequality hold wherever residuals are finite).
    let mut k1 = 0.0f64;
    let mut max_residual = 0.0f64;
    let mut worst: Option<(usize, f64, f64, f64)> = None;
    for &n in n_list {
        let zone_max = params.d * (family.t_n)(n).powf(params.gamma);
        for lam in zone_lambda_grid(zone_max, 1024) {
            let r = (family.residual)(n, lam);
            if !r.is_finite() || r > 1e8 {
                z1_pass = false;
                worst_fail = Some((n, lam, r, f64::INFINITY));
                continue;
            }
            max_residual = max_residual.max(r);
            let envelope = lam.powf(params.v) * (k2 * lam.powf(params.w)).exp();
            if envelope > 0.0 && r / envelope > k1 {
                k1 = r / envelope;
                worst = Some((n, lam, r, k1 * envelope));
            }
        }
    }

    // Admissibility of (w, gamma, D) given the fitted growth constant.
    let z2_pass = {
        let gamma_ok = params.gamma >= -0.5
            && (params.w == 2.0 || params.gamma <= 1.0 / (params.w - 2.0) + 1e-12);
        let d_ok = if k2 == 0.0 {
            true
        } else if params.w == 2.0 {
            4.0 * k2 <= 1.0
        } else {
            params.d <= (1.0 / (4.0 * k2)).powf(1.0 / (params.w - 2.0))
        };
        gamma_ok && d_ok
    };

    Ok(ZoneOfControlReport {
        v: params.v,
        w: params.w,
        gamma: params.gamma,
        d: params.d,
        k1,
        k2,
        max_residual,
        worst: if z1_pass { worst } else { worst_fail },
        z1_pass,
        z2_pass,
    })
}

// ---------------------------------------------------------------------------
// Weak mod-Gaussian L^1 check
// ---------------------------------------------------------------------------

/// A family described by its rescaled characteristic function
/// `phi_n(i lambda / A_n)`.
pub struct L1Family<'a> {
    pub label: String,
    pub a_n: Box<dyn Fn(usize) -> f64 + Sync + 'a>,
    pub scaled_char_fn: Box<dyn Fn(usize, f64) -> Result<Complex64> + Sync + 'a>,
}

/// One entry of the uniform-integrability error sequence.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct L1Point {
    pub n: usize,
    pub a_n: f64,
    pub error: f64,
}

/// Computes `int_{-K A_n}^{K A_n} |phi_n(i lambda / A_n) - e^{-lambda^2/2}| d lambda`
/// for each `n`. A sequence decreasing toward 0 certifies the weak
/// mod-Gaussian behaviour on the window `K`.
pub fn weak_modgauss_l1_check(
    family: &L1Family,
    k_bound: f64,
    n_list: &[usize],
) -> Result<Vec<L1Point>> {
    if !(k_bound > 0.0) {
        return Err(Error::Domain(format!("K = {k_bound} must be positive")));
    }
    use rayon::prelude::*;
    n_list
        .iter()
        .map(|&n| {
            let a_n = (family.a_n)(n);
            let upper = k_bound * a_n;
            // Conjugate symmetry makes the integrand even: integrate [0, K A_n]
            // by composite Simpson and double. 256 intervals resolve the
            // O(1)-scale integrand far below the gaps the checks compare.
            let intervals = 256usize;
            let h = upper / intervals as f64;
            let values: Vec<f64> = (0..=intervals)
                .into_par_iter()
                .map(|i| -> Result<f64> {
                    let lam = i as f64 * h;
                    let phi = (family.scaled_char_fn)(n, lam)?;
                    let gauss = (-0.5 * lam * lam).exp();
                    Ok((phi - Complex64::new(gauss, 0.0)).norm())
                })
                .collect::<Result<_>>()?;
            let mut acc = values[0] + values[intervals];
            for (i, v) in values.iter().enumerate().take(intervals).skip(1) {
                acc += v * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            Ok(L1Point { n, a_n, error: 2.0 * acc * h / 3.0 })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Concrete families
// ---------------------------------------------------------------------------

/// Ready-made residual/characteristic families for the sums this crate
/// certifies.
pub mod families {
    use super::*;

    /// `A_n` for flat Walsh coefficients `a_{k,n} = n^{-alpha}`.
    pub fn walsh_flat_a_n(alpha: f64, n: usize) -> f64 {
        (n as f64).powf(0.5 - alpha)
    }

    /// Real characteristic function `cos(lambda n^-alpha)^n` of the flat
    /// Walsh sum in the independence regime.
    pub fn walsh_flat_char_fn(alpha: f64, n: usize, lambda: f64) -> f64 {
        (lambda * (n as f64).powf(-alpha)).cos().powi(n as i32)
    }

    /// `log prod_k cosh(z a)` of the flat family, without materializing the
    /// frequency sequence (its terms overflow u64 long before the product
    /// form becomes interesting).
    pub fn walsh_flat_log_mgf(alpha: f64, n: usize, z: Complex64) -> Complex64 {
        (z * (n as f64).powf(-alpha)).cosh().ln() * n as f64
    }

    /// Mod-Gaussian residual `phi_n(z) e^{-t_n z^2/2}` of the flat family.
    pub fn walsh_flat_mod_gaussian_residual(alpha: f64, n: usize, z: Complex64) -> Complex64 {
        let t_n = walsh_flat_a_n(alpha, n).powi(2);
        (walsh_flat_log_mgf(alpha, n, z) - z * z * (t_n / 2.0)).exp()
    }

    /// `|phi_n(i lambda) e^{t_n lambda^2/2} - 1|` for the flat Walsh family,
    /// evaluated in log form so huge `t_n` cannot overflow.
    pub fn walsh_flat_zone_residual(alpha: f64, n: usize, lambda: f64) -> f64 {
        let a = (n as f64).powf(-alpha);
        let t_n = walsh_flat_a_n(alpha, n).powi(2);
        let c = (lambda * a).cos();
        let gauss = 0.5 * t_n * lambda * lambda;
        if c > 0.0 {
            libm::expm1(n as f64 * c.ln() + gauss).abs()
        } else if c == 0.0 {
            1.0
        } else {
            let magnitude = (n as f64 * c.abs().ln() + gauss).exp();
            let signed = if n.is_multiple_of(2) { magnitude } else { -magnitude };
            (signed - 1.0).abs()
        }
    }

    /// `t_n` of the normalized Bernoulli shift sum `S_n / n^{1/4}`.
    pub fn bernoulli_t_n(n: usize) -> f64 {
        (n as f64).sqrt() / 4.0
    }

    /// Characteristic function of `S_n / n^{1/4}` (real by symmetry).
    pub fn bernoulli_scaled_char_fn(n: usize, lambda: f64, tail: usize) -> f64 {
        let scale = (n as f64).powf(-0.25);
        let mut sign = 1.0f64;
        let mut log_abs = 0.0f64;
        for w in crate::series::bernoulli_expansion_weights(n, tail) {
            let c = (lambda * scale * w.weight).cos();
            if c < 0.0 {
                sign = -sign;
            }
            log_abs += c.abs().ln();
        }
        sign * log_abs.exp()
    }

    /// Zone residual of the normalized Bernoulli family in log form.
    pub fn bernoulli_zone_residual(n: usize, lambda: f64, tail: usize) -> f64 {
        let scale = (n as f64).powf(-0.25);
        let t_n = bernoulli_t_n(n);
        let mut sign = 1.0f64;
        let mut log_abs = 0.0f64;
        for w in crate::series::bernoulli_expansion_weights(n, tail) {
            let c = (lambda * scale * w.weight).cos();
            if c == 0.0 {
                return 1.0;
            }
            if c < 0.0 {
                sign = -sign;
            }
            log_abs += c.abs().ln();
        }
        let exponent = log_abs + 0.5 * t_n * lambda * lambda;
        if sign > 0.0 {
            libm::expm1(exponent).abs()
        } else {
            (exponent.exp() + 1.0).abs()
        }
    }

    /// Mod-Gaussian residual `phi_n(z) e^{-t_n z^2/2}` of the normalized
    /// Bernoulli family at real `z`.
    pub fn bernoulli_mod_gaussian_residual(n: usize, z: f64, tail: usize) -> Result<f64> {
        let scale = (n as f64).powf(-0.25);
        let log_mgf =
            log_mgf_bernoulli_exact(n, Complex64::new(z * scale, 0.0), tail)?;
        Ok((log_mgf.re - bernoulli_t_n(n) * z * z / 2.0).exp())
    }

    /// Scaled characteristic function of the flat trigonometric sum over a
    /// doubling sequence, via the spectral transfer operator.
    pub fn trig_doubling_scaled_char_fn(
        coeffs: &CoefficientTriangle,
        n: usize,
        lambda_over_a_n: f64,
    ) -> Result<Complex64> {
        let row = coeffs.row(n)?;
        Ok(transfer::doubling_trig_char_fn(&row, lambda_over_a_n))
    }
}
