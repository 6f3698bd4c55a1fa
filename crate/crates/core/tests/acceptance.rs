//! Acceptance suite: every certification the crate promises, pinned to its
//! tolerance and runtime budget, one printed pass/fail line per criterion
//! (run with `--nocapture` to see them).

use std::time::Instant;

use rustfft::num_complex::Complex64;

use lacunary_core::charfn::{
    self, families, L1Family, SumHandle, ZoneFamily, ZoneParams,
};
use lacunary_core::diophantine::{self, SolutionClass, DEFAULT_BUDGET};
use lacunary_core::limits::{
    self, binomial_window_mass_exact, DiscreteLaw, JordanWindow, SignSumLaw,
};
use lacunary_core::martingale::{self, NormSeries};
use lacunary_core::numeric::kahan_sum;
use lacunary_core::series::{
    bernoulli_expansion_weights, walsh_partial_sum, Bernoulli1Fn, CoefficientTriangle, CosFn,
    LacunarySequence, NormConvention, PeriodicFn,
};

struct Criterion {
    id: &'static str,
    budget_s: f64,
    start: Instant,
}

impl Criterion {
    fn begin(id: &'static str, budget_s: f64) -> Self {
        Criterion { id, budget_s, start: Instant::now() }
    }

    fn finish(self, pass: bool, detail: String) {
        let elapsed = self.start.elapsed().as_secs_f64();
        let status = if pass { "PASS" } else { "FAIL" };
        println!(
            "[{}] {status} - {detail} ({elapsed:.2} s / budget {} s)",
            self.id, self.budget_s
        );
        assert!(pass, "[{}] {detail}", self.id);
        assert!(
            elapsed <= self.budget_s,
            "[{}] runtime {elapsed:.2} s exceeds budget {} s",
            self.id,
            self.budget_s
        );
    }
}

// 1. Product-form moment generating function against quadrature on the
// exact cell law: agreement to 1e-10 on 25 imaginary-axis points.
#[test]
fn a01_walsh_mgf_exact_vs_quadrature() {
    let c = Criterion::begin("01 walsh-mgf-exact-vs-quadrature", 5.0);
    let seq = LacunarySequence::power(2, 12).unwrap();
    let coeffs = CoefficientTriangle::flat(0.25, NormConvention::Walsh);
    let mut max_err = 0.0f64;
    for n in [4usize, 8, 12] {
        let step = walsh_partial_sum(&seq, &coeffs, n).unwrap();
        let handle = SumHandle::Step(&step);
        for i in 0..25 {
            let lam = -3.0 + 6.0 * i as f64 / 24.0;
            let quad = charfn::char_fn_quadrature(&handle, lam, 1e-12).unwrap();
            let prod =
                charfn::mgf_walsh_exact(&seq, &coeffs, n, Complex64::new(0.0, lam)).unwrap();
            max_err = max_err.max((quad - prod).norm());
        }
    }
    c.finish(max_err <= 1e-10, format!("max |product - quadrature| = {max_err:.3e}"));
}

// 2. Xor impossibility: no A = 0 solutions for ratio-certified q >= 2
// sequences, exhaustively over n <= 18, l <= 6.
#[test]
fn a02_xor_zero_impossibility() {
    let c = Criterion::begin("02 xor-zero-impossibility", 60.0);
    let mut checked = 0u64;
    let mut pass = true;
    for base in [2u64, 3] {
        let seq = LacunarySequence::power(base, 18).unwrap();
        for l in 1..=6usize {
            for n in l..=18 {
                let rep = diophantine::count_xor_solutions(&seq, n, l, DEFAULT_BUDGET).unwrap();
                checked += 1;
                if rep.zero_count != Some(0) {
                    pass = false;
                }
            }
        }
    }
    c.finish(pass, format!("{checked} (base, n, l) combinations, all zero buckets empty"));
}

// 3. Exhaustive counts never violate the closed-form bounds: signed counts
// against the 1 < q <= 2 and q > 2 forms, xor counts against the
// 1 < q < 2 form, over n <= 24, l <= 4, r <= 3 and all achievable A.
#[test]
fn a03_counts_within_bounds() {
    let c = Criterion::begin("03 counts-within-bounds", 300.0);
    let mut classes_checked = 0u64;
    let mut worst_margin = f64::INFINITY;
    let mut pass = true;

    let signed_seqs = [
        LacunarySequence::power(2, 24).unwrap(),        // q = 2
        LacunarySequence::interleaved_example(24).unwrap(), // q = 4/3
        LacunarySequence::power(3, 24).unwrap(),        // q = 3
    ];
    for seq in &signed_seqs {
        for l in 2..=4usize {
            for n in l..=24 {
                for r in 1..=3u32 {
                    let reports =
                        diophantine::count_signed_solutions(seq, n, l, r, DEFAULT_BUDGET)
                            .unwrap();
                    for rep in reports {
                        if let Some(bound) = rep.bound {
                            classes_checked += 1;
                            worst_margin = worst_margin.min(bound / rep.max_count.max(1) as f64);
                            if rep.verdict() != Some(true) {
                                pass = false;
                            }
                        }
                    }
                }
            }
        }
    }

    let inter = LacunarySequence::interleaved_example(24).unwrap();
    for l in 1..=4usize {
        for n in l..=24 {
            let rep = diophantine::count_xor_solutions(&inter, n, l, DEFAULT_BUDGET).unwrap();
            classes_checked += 1;
            if let Some(bound) = rep.bound {
                worst_margin = worst_margin.min(bound / rep.max_count.max(1) as f64);
            }
            if rep.verdict() != Some(true) {
                pass = false;
            }
        }
    }
    c.finish(
        pass,
        format!("{classes_checked} class reports, tightest bound/count margin {worst_margin:.2}"),
    );
}

// 4. Sharpness of the count growth: the interleaved sequence's A = 0
// bucket at (l = 3, r = 1) at least 1.8x's when n doubles from 24 to 48.
#[test]
fn a04_interleaved_sharpness_trend() {
    let c = Criterion::begin("04 interleaved-sharpness-trend", 60.0);
    let seq = LacunarySequence::interleaved_example(48).unwrap();
    let zero_count = |n: usize| -> u64 {
        diophantine::count_signed_solutions(&seq, n, 3, 1, DEFAULT_BUDGET)
            .unwrap()
            .iter()
            .find(|r| r.class == SolutionClass::SignedByP { p: 0 })
            .and_then(|r| r.per_a.get(&0).copied())
            .unwrap_or(0)
    };
    let (c24, c48) = (zero_count(24), zero_count(48));
    c.finish(
        c48 as f64 >= 1.8 * c24 as f64 && c24 > 0,
        format!("zero-bucket counts: n=24 -> {c24}, n=48 -> {c48}"),
    );
}

// 5. Bernoulli weight variance identity `sum w_p^2 = n/4 - 1/3 + 1/(3 2^n)`
// to 1e-12.
#[test]
fn a05_bernoulli_variance_identity() {
    let c = Criterion::begin("05 bernoulli-variance-identity", 1.0);
    let mut max_err = 0.0f64;
    for n in [1usize, 2, 8, 20] {
        let var = kahan_sum(
            bernoulli_expansion_weights(n, 64).iter().map(|w| w.weight * w.weight),
        );
        let target = n as f64 / 4.0 - 1.0 / 3.0 + 1.0 / (3.0 * libm::exp2(n as f64));
        max_err = max_err.max((var - target).abs());
    }
    c.finish(max_err <= 1e-12, format!("max identity error {max_err:.3e}"));
}

// 6. Mod-Gaussian residual of the normalized Bernoulli sums approaches
// `exp(-z^4/192)` at the O(1/sqrt(n)) rate: the sup error over z in
// [-1, 1] shrinks by a factor in [1.6, 2.6] per 4x step in n.
#[test]
fn a06_bernoulli_residual_rate() {
    let c = Criterion::begin("06 bernoulli-residual-rate", 10.0);
    let sup_err = |n: usize| -> f64 {
        let mut sup = 0.0f64;
        for i in 0..=200 {
            let z = -1.0 + i as f64 / 100.0;
            let residual = families::bernoulli_mod_gaussian_residual(n, z, 64).unwrap();
            let target = (-z.powi(4) / 192.0).exp();
            sup = sup.max((residual - target).abs());
        }
        sup
    };
    let (e1, e2, e3) = (sup_err(256), sup_err(1024), sup_err(4096));
    let (r1, r2) = (e1 / e2, e2 / e3);
    let pass = (1.6..=2.6).contains(&r1) && (1.6..=2.6).contains(&r2);
    c.finish(pass, format!("sup errors {e1:.3e} -> {e2:.3e} -> {e3:.3e}, ratios {r1:.2}, {r2:.2}"));
}

// 7. Weak local-limit statistic of the flat Walsh family at n = 2^16:
// `A_n P[S in [-1/2, 1/2))` within 5% of `1/sqrt(2 pi)`, on the exact
// binomial law (big-integer window mass, cross-checked against the
// ln-factorial law).
#[test]
fn a07_walsh_llt_weak_form() {
    let c = Criterion::begin("07 walsh-llt-weak-form", 10.0);
    let n = 1usize << 16;
    let a_n = families::walsh_flat_a_n(0.25, n); // 16
    // S in [-1/2, 1/2) <=> sum of signs in [-8, 8) <=> n - 2j in {-8,...,6}
    let j_lo = (n as u64 - 6) / 2;
    let j_hi = (n as u64 + 8) / 2;
    let exact_mass = binomial_window_mass_exact(n as u64, j_lo, j_hi).unwrap();
    let exact_stat = a_n * exact_mass;

    // same statistic through the generic law machinery
    let law = DiscreteLaw::binomial_walsh(n, (n as f64).powf(-0.25)).unwrap();
    let window = JordanWindow::interval(-0.5, 0.5).unwrap();
    let generic_stat = limits::llt_weak_statistic(&law, a_n, &window).unwrap();

    let target = limits::llt_target(&window);
    let rel = (exact_stat - target).abs() / target;
    let routes_agree = (exact_stat - generic_stat).abs() <= 1e-9;
    c.finish(
        rel <= 0.05 && routes_agree,
        format!(
            "A_n P[S in B] = {exact_stat:.6} vs {target:.6} (rel {rel:.4}), \
             generic route {generic_stat:.6}"
        ),
    );
}

// 8. Kolmogorov-distance decay rates: fitted log-log slope <= -1.1 for the
// flat Walsh family (n = 2^8..2^16) and <= -13/24 + 0.1 for the Bernoulli
// family (n = 2^8..2^14).
#[test]
fn a08_berry_esseen_rate_fits() {
    let c = Criterion::begin("08 berry-esseen-rate-fits", 120.0);
    let mut walsh_pts = Vec::new();
    for k in 8..=16u32 {
        let n = 1usize << k;
        let a_n = families::walsh_flat_a_n(0.25, n);
        let law = DiscreteLaw::binomial_walsh(n, 1.0 / (n as f64).sqrt()).unwrap();
        walsh_pts.push((a_n, limits::kolmogorov_distance(&law)));
    }
    let walsh_slope = limits::berry_esseen_rate_fit(&walsh_pts).unwrap();

    let mut bern_pts = Vec::new();
    for k in 8..=14u32 {
        let n = 1usize << k;
        let law = SignSumLaw::bernoulli_sum(n, 64);
        let d = law.kolmogorov_vs_normal(2.0 / (n as f64).sqrt()).unwrap();
        bern_pts.push((families::bernoulli_t_n(n), d));
    }
    let bern_slope = limits::berry_esseen_rate_fit(&bern_pts).unwrap();

    let bern_bound = -13.0 / 24.0 + 0.1;
    let pass = walsh_slope <= -1.1 && bern_slope <= bern_bound;
    c.finish(
        pass,
        format!(
            "walsh slope {walsh_slope:.3} (need <= -1.1), \
             bernoulli slope {bern_slope:.3} (need <= {bern_bound:.3})"
        ),
    );
}

// 9. Zones of control: (v = w = 4, gamma = 1/10) passes for the flat Walsh
// family and (v = 2, w = 4, gamma = 1/24) for the Bernoulli family, with
// fitted constants satisfying the admissibility conditions.
#[test]
fn a09_zones_of_control() {
    let c = Criterion::begin("09 zones-of-control", 60.0);
    let n_list: Vec<usize> = (8..=14u32).map(|k| 1usize << k).collect();

    let walsh = ZoneFamily {
        label: "walsh-flat(1/4)".into(),
        t_n: Box::new(|n| families::walsh_flat_a_n(0.25, n).powi(2)),
        residual: Box::new(|n, lam| families::walsh_flat_zone_residual(0.25, n, lam)),
    };
    let walsh_report = charfn::zone_of_control_check(
        &walsh,
        &ZoneParams { v: 4.0, w: 4.0, gamma: 0.1, d: 1.0 },
        &n_list,
    )
    .unwrap();

    let bern = ZoneFamily {
        label: "bernoulli".into(),
        t_n: Box::new(families::bernoulli_t_n),
        residual: Box::new(|n, lam| families::bernoulli_zone_residual(n, lam, 64)),
    };
    let bern_report = charfn::zone_of_control_check(
        &bern,
        &ZoneParams { v: 2.0, w: 4.0, gamma: 1.0 / 24.0, d: 1.0 },
        &n_list,
    )
    .unwrap();

    let pass = walsh_report.pass() && bern_report.pass();
    c.finish(
        pass,
        format!(
            "walsh (K1, K2) = ({:.4}, {:.4}) pass = {}; \
             bernoulli (K1, K2) = ({:.4}, {:.4}) pass = {}",
            walsh_report.k1,
            walsh_report.k2,
            walsh_report.pass(),
            bern_report.k1,
            bern_report.k2,
            bern_report.pass()
        ),
    );
}

// 10. Remainder inequality over the acceptance grid, with the right side
// augmented by the geometric tail bound.
#[test]
fn a10_martingale_inequality_grid() {
    let c = Criterion::begin("10 martingale-inequality-grid", 120.0);
    let mut min_margin = f64::INFINITY;
    let mut pass = true;
    let fns: [(&str, &dyn PeriodicFn); 2] = [("cos", &CosFn), ("bernoulli", &Bernoulli1Fn)];
    for (name, f) in fns {
        let norms = NormSeries::compute(f, 24).unwrap();
        for r in 2..=8u32 {
            for n in 2..=10usize {
                let chk =
                    martingale::martingale_inequality_check_with(f, r, n, &norms).unwrap();
                let ok = chk.lhs <= chk.rhs + chk.tail_bound;
                min_margin = min_margin.min(chk.rhs + chk.tail_bound - chk.lhs);
                if !ok {
                    pass = false;
                    println!("  violated at f={name}, r={r}, n={n}: {chk:?}");
                }
            }
        }
    }
    c.finish(pass, format!("126 (f, r, n) checks, min margin {min_margin:.3e}"));
}

// 11. Extended-CLT tail ratio of the flat Walsh family at y = 1, n = 2^16:
// exact binomial tail within 5% of the Gaussian tail.
#[test]
fn a11_extended_clt_tail_ratio() {
    let c = Criterion::begin("11 extended-clt-tail-ratio", 10.0);
    let n = 1usize << 16;
    let a_n = families::walsh_flat_a_n(0.25, n);
    let law = DiscreteLaw::binomial_walsh(n, (n as f64).powf(-0.25)).unwrap();
    let ratio = limits::tail_ratio_extended_clt(&law, a_n, 1.0).unwrap();

    // big-integer cross-check of the same tail: P[sum of signs >= 256]
    let j_hi = (n as u64 - 256) / 2;
    let exact_tail = binomial_window_mass_exact(n as u64, 0, j_hi).unwrap();
    let exact_ratio = exact_tail / lacunary_core::numeric::normal_tail(1.0);
    let routes_agree = (ratio - exact_ratio).abs() <= 1e-9;

    let pass = (0.95..=1.05).contains(&ratio) && routes_agree;
    c.finish(pass, format!("tail ratio {ratio:.5} (exact route {exact_ratio:.5})"));
}

// 12. Weak mod-Gaussian L^1 errors of the flat trigonometric family over a
// doubling sequence strictly decrease along n = 2^6..2^12 (window K = 2).
#[test]
fn a12_trig_l1_uniform_integrability() {
    let c = Criterion::begin("12 trig-l1-uniform-integrability", 300.0);
    let coeffs = CoefficientTriangle::flat(0.4, NormConvention::Trig);
    let family = L1Family {
        label: "trig-flat(0.4) doubling".into(),
        a_n: Box::new({
            let coeffs = coeffs.clone();
            move |n| coeffs.normalizer(n).unwrap()
        }),
        scaled_char_fn: Box::new({
            let coeffs = coeffs.clone();
            move |n, lam| {
                let a_n = coeffs.normalizer(n)?;
                families::trig_doubling_scaled_char_fn(&coeffs, n, lam / a_n)
            }
        }),
    };
    let n_list: Vec<usize> = (6..=12u32).map(|k| 1usize << k).collect();
    let points = charfn::weak_modgauss_l1_check(&family, 2.0, &n_list).unwrap();
    // strict decrease, NaN-hostile
    let pass = points.windows(2).all(|w| w[1].error < w[0].error);
    let seq: Vec<String> = points.iter().map(|p| format!("{:.4}", p.error)).collect();
    c.finish(pass, format!("L1 errors: {}", seq.join(" > ")));
}
