//! Shared numerical utilities: normal distribution, compensated sums,
//! Gauss–Legendre nodes, big-integer binomials, least squares.

use num_bigint::BigUint;

/// `1/sqrt(2*pi)`.
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal CDF via the complementary error function (sub-ulp erfc).
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Upper Gaussian tail `P[N(0,1) >= y]`.
pub fn normal_tail(y: f64) -> f64 {
    0.5 * libm::erfc(y / std::f64::consts::SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Kahan-compensated sum.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Table of `ln k!` for `0 <= k <= n`, built with compensated accumulation.
pub struct LnFactorial {
    table: Vec<f64>,
}

impl LnFactorial {
    pub fn up_to(n: usize) -> Self {
        let mut table = Vec::with_capacity(n + 1);
        let mut sum = 0.0;
        let mut c = 0.0;
        table.push(0.0);
        for k in 1..=n {
            let y = (k as f64).ln() - c;
            let t = sum + y;
            c = (t - sum) - y;
            sum = t;
            table.push(sum);
        }
        LnFactorial { table }
    }

    pub fn ln_factorial(&self, k: usize) -> f64 {
        self.table[k]
    }

    /// `ln C(n, k)` for `n` within the table.
    pub fn ln_choose(&self, n: usize, k: usize) -> f64 {
        self.table[n] - self.table[k] - self.table[n - k]
    }
}

/// Exact binomial coefficient `C(n, k)`.
pub fn big_choose(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 1..=k {
        acc *= BigUint::from(n - k + i);
        acc /= BigUint::from(i);
    }
    acc
}

/// Converts `x * 2^shift` to `f64`, using the top bits of `x` so that
/// arbitrarily large `x` convert without overflow.
pub fn biguint_to_f64_scaled(x: &BigUint, shift: i64) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return 0.0;
    }
    // Keep the top 64 bits; the discarded tail is below f64 resolution.
    let drop = bits.saturating_sub(64);
    let top = u64::try_from(x >> drop).expect("top word fits u64");
    let exp = drop as i64 + shift;
    libm::ldexp(top as f64, exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

/// Nodes and weights of the `m`-point Gauss–Legendre rule on `[-1, 1]`,
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        // Tricomi initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre integral of `f` over `[a, b]` with `panels`
/// equal panels of the `order`-point rule.
pub fn integrate_gl(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let mut acc = 0.0;
        for (x, w) in nodes.iter().zip(&weights) {
            acc += w * f(mid + 0.5 * h * x);
        }
        total += acc * 0.5 * h;
    }
    total
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
