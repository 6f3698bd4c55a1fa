//! Exhaustive counting of signed and xor frequency equations over lacunary
//! sequences, with certification against the closed-form solution bounds.
//!
//! Signed equations: `eps_1 m_{k_1} +- eps_2 m_{k_2} +- ... +- eps_l m_{k_l} = A`
//! with strictly decreasing indices `k_l < ... < k_1 <= n`, coefficients
//! `eps_i in 1..=r`, and the leading sign fixed positive. Xor equations
//! replace the signed sum with carry-free addition.
//!
//! Counts are bucketed per target value `A` and per coefficient class
//! (`p` = number of coefficients different from 1 in the `1 < q <= 2`
//! regime, `(p2, p3)` = counts of coefficients equal to 2 and at least 3
//! for `q > 2`). The uniform bound over all `A` is certified at the
//! argmax bucket, which is equivalent.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::series::LacunarySequence;

/// Default enumeration budget (configurations, not solutions).
pub const DEFAULT_BUDGET: u128 = 1_000_000_000;

// ---------------------------------------------------------------------------
// Closed-form bounds
// ---------------------------------------------------------------------------

fn log_base(q: f64, x: f64) -> f64 {
    x.ln() / q.ln()
}

/// Bound on the per-`A` solution count of the signed equation in the
/// `1 < q <= 2` regime, class `p`:
/// `(8 n log_q(r l) log_q(2 r^2 l q / (q-1)^2))^((l+p)/3)`.
pub fn signed_count_bound_low_ratio(l: usize, p: usize, q: f64, n: usize, r: u32) -> Result<f64> {
    if !(q > 1.0 && q <= 2.0) {
        return Err(Error::Domain(format!("this bound needs 1 < q <= 2, got q = {q}")));
    }
    if l < 2 || p > l || r < 1 {
        return Err(Error::Domain(format!("need l >= 2, p <= l, r >= 1; got l={l} p={p} r={r}")));
    }
    let rl = r as f64 * l as f64;
    let inner = 8.0
        * n as f64
        * log_base(q, rl)
        * log_base(q, 2.0 * (r as f64).powi(2) * l as f64 * q / (q - 1.0).powi(2));
    Ok(inner.powf((l + p) as f64 / 3.0))
}

/// Which written form of the `q > 2` bound to evaluate. Two circulating
/// forms differ in one logarithm's coefficient power (`r^3` against `r^2`)
/// and in where the `q/(q-2)` factor sits; the `r^3` form is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HighRatioBoundForm {
    #[default]
    RCubed,
    RSquared,
}

/// Bound for the `q > 2` regime, class `(p2, p3)`, exponent
/// `l/4 + p2/4 + p3/2`.
pub fn signed_count_bound_high_ratio(
    l: usize,
    p2: usize,
    p3: usize,
    q: f64,
    n: usize,
    r: u32,
    form: HighRatioBoundForm,
) -> Result<f64> {
    if !(q > 2.0) {
        return Err(Error::Domain(format!("this bound needs q > 2, got q = {q}")));
    }
    if l < 2 || p2 + p3 > l || r < 1 {
        return Err(Error::Domain(format!(
            "need l >= 2, p2 + p3 <= l, r >= 1; got l={l} p2={p2} p3={p3} r={r}"
        )));
    }
    let (lf, rf) = (l as f64, r as f64);
    let inner = match form {
        HighRatioBoundForm::RCubed => {
            20.0 * n as f64
                * log_base(q, 2.0 * lf * rf)
                * log_base(q, q * lf * rf / (q - 2.0))
                * log_base(q, 4.0 * lf * lf * q * q * rf.powi(3) / (q - 2.0))
        }
        HighRatioBoundForm::RSquared => {
            20.0 * n as f64
                * log_base(q, 2.0 * lf * rf * q / (q - 2.0))
                * log_base(q, q * lf * rf)
                * log_base(q, 4.0 * lf * lf * q * q * rf.powi(2) / (q - 2.0))
        }
    };
    Ok(inner.powf(l as f64 / 4.0 + p2 as f64 / 4.0 + p3 as f64 / 2.0))
}

/// Integer `gamma` with `1 + 2^-gamma <= q < 1 + 2^-(gamma-1)`.
pub fn gamma_for_q(q: f64) -> Result<u32> {
    if !(q > 1.0 && q < 2.0) {
        return Err(Error::Domain(format!("gamma is defined for 1 < q < 2, got q = {q}")));
    }
    let g = (-(q - 1.0).log2()).ceil();
    Ok(g as u32)
}

/// Bound on the per-`A` xor solution count for `1 < q < 2`:
/// `(2 (gamma + 7) n log_q(2)^2)^(l/3)`.
pub fn xor_count_bound(l: usize, q: f64, n: usize) -> Result<f64> {
    let gamma = gamma_for_q(q)?;
    let inner = 2.0 * (gamma as f64 + 7.0) * n as f64 * log_base(q, 2.0).powi(2);
    Ok(inner.powf(l as f64 / 3.0))
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Coefficient class a bucket of solutions belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
pub enum SolutionClass {
    /// `p` coefficients different from 1 (regime `1 < q <= 2`).
    SignedByP { p: u32 },
    /// `p2` coefficients equal to 2, `p3` at least 3 (regime `q > 2`).
    SignedByP2P3 { p2: u32, p3: u32 },
    Xor,
}

/// Per-class exhaustive counts with the matching closed-form bound.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SolutionCountReport {
    pub n: usize,
    pub l: usize,
    pub r: u32,
    pub q: f64,
    pub class: SolutionClass,
    /// Solution count per target value `A`. For xor reports this holds the
    /// positive targets only.
    pub per_a: BTreeMap<i128, u64>,
    /// Xor only: the `A = 0` bucket, reported separately (for `q >= 2` it
    /// must be empty; for `1 < q < 2` no bound applies to it).
    pub zero_count: Option<u64>,
    /// Matching closed-form bound, when one applies to this class.
    pub bound: Option<f64>,
    pub max_count: u64,
}

impl SolutionCountReport {
    /// Verdict recomputed from the stored fields. `None` when no bound
    /// applies (e.g. xor buckets with `A > 0` in the `q >= 2` regime).
    pub fn verdict(&self) -> Option<bool> {
        match self.class {
            SolutionClass::Xor if self.q >= 2.0 => Some(self.zero_count == Some(0)),
            _ => self.bound.map(|b| (self.max_count as f64) <= b),
        }
    }

    /// Largest buckets, descending, for report output.
    pub fn top_buckets(&self, count: usize) -> Vec<(i128, u64)> {
        let mut buckets: Vec<(i128, u64)> = self.per_a.iter().map(|(a, c)| (*a, *c)).collect();
        buckets.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
        buckets.truncate(count);
        buckets
    }
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc * (n - k + i) as u128 / i as u128;
    }
    acc
}

fn check_budget(configs: u128, budget: u128) -> Result<()> {
    if configs > budget {
        return Err(Error::Budget { needed: configs, budget });
    }
    Ok(())
}

/// Visits every strictly decreasing index tuple with leading index `k1`,
/// calling `visit` with the 1-based indices in descending order.
fn for_each_subset(k1: usize, l: usize, visit: &mut impl FnMut(&[usize])) {
    let mut chosen = vec![0usize; l];
    chosen[0] = k1;
    fn rec(chosen: &mut Vec<usize>, depth: usize, l: usize, visit: &mut impl FnMut(&[usize])) {
        if depth == l {
            visit(chosen);
            return;
        }
        let upper = chosen[depth - 1];
        for k in (l - depth..upper).rev() {
            chosen[depth] = k;
            rec(chosen, depth + 1, l, visit);
        }
    }
    rec(&mut chosen, 1, l, visit);
}

type ClassBuckets = BTreeMap<SolutionClass, BTreeMap<i128, u64>>;

fn merge_buckets(mut a: ClassBuckets, b: ClassBuckets) -> ClassBuckets {
    for (class, map) in b {
        let slot = a.entry(class).or_default();
        for (k, v) in map {
            *slot.entry(k).or_insert(0) += v;
        }
    }
    a
}

/// Exhaustively counts signed solutions, bucketed per class and target.
/// Enumeration order is indices outermost, coefficients, then signs, with
/// exact 128-bit accumulation; the work is partitioned over the leading
/// index and merged by commutative integer addition.
pub fn count_signed_solutions(
    seq: &LacunarySequence,
    n: usize,
    l: usize,
    r: u32,
    budget: u128,
) -> Result<Vec<SolutionCountReport>> {
    let terms = seq.integer_terms()?;
    if l == 0 || l > n || n > terms.len() {
        return Err(Error::Size(format!(
            "need 1 <= l <= n <= {} terms, got l = {l}, n = {n}",
            terms.len()
        )));
    }
    if r < 1 {
        return Err(Error::Domain("need r >= 1".into()));
    }
    let configs = binomial_u128(n, l)
        .checked_mul((r as u128).pow(l as u32))
        .and_then(|c| c.checked_mul(1u128 << (l - 1)))
        .ok_or(Error::Budget { needed: u128::MAX, budget })?;
    check_budget(configs, budget)?;

    let by_p = seq.q() <= 2.0;

    // All coefficient tuples with their class, shared across subsets.
    let mut eps_tuples: Vec<(Vec<u32>, SolutionClass)> = Vec::new();
    let mut tuple = vec![1u32; l];
    loop {
        let class = if by_p {
            SolutionClass::SignedByP { p: tuple.iter().filter(|&&e| e != 1).count() as u32 }
        } else {
            SolutionClass::SignedByP2P3 {
                p2: tuple.iter().filter(|&&e| e == 2).count() as u32,
                p3: tuple.iter().filter(|&&e| e >= 3).count() as u32,
            }
        };
        eps_tuples.push((tuple.clone(), class));
        // odometer over {1..r}^l
        let mut i = 0;
        loop {
            if i == l {
                break;
            }
            tuple[i] += 1;
            if tuple[i] <= r {
                break;
            }
            tuple[i] = 1;
            i += 1;
        }
        if i == l {
            break;
        }
    }

    let buckets: ClassBuckets = (l..=n)
        .into_par_iter()
        .map(|k1| {
            let mut local: ClassBuckets = BTreeMap::new();
            let mut ms = vec![0i128; l];
            let mut prods = vec![0i128; l];
            for_each_subset(k1, l, &mut |indices| {
                for (slot, &k) in ms.iter_mut().zip(indices) {
                    *slot = terms[k - 1] as i128;
                }
                for (eps, class) in &eps_tuples {
                    for ((p, &e), &m) in prods.iter_mut().zip(eps).zip(&ms) {
                        *p = e as i128 * m;
                    }
                    let slot = local.entry(*class).or_default();
                    for mask in 0u32..(1 << (l - 1)) {
                        let mut a = prods[0];
                        for (i, &p) in prods.iter().enumerate().skip(1) {
                            if mask >> (i - 1) & 1 == 1 {
                                a -= p;
                            } else {
                                a += p;
                            }
                        }
                        *slot.entry(a).or_insert(0) += 1;
                    }
                }
            });
            local
        })
        .reduce(BTreeMap::new, merge_buckets);

    let q = seq.q();
    Ok(buckets
        .into_iter()
        .map(|(class, per_a)| {
            let bound = match class {
                SolutionClass::SignedByP { p } if l >= 2 => {
                    signed_count_bound_low_ratio(l, p as usize, q, n, r).ok()
                }
                SolutionClass::SignedByP2P3 { p2, p3 } if l >= 2 => {
                    signed_count_bound_high_ratio(l, p2 as usize, p3 as usize, q, n, r, HighRatioBoundForm::RCubed)
                        .ok()
                }
                _ => None,
            };
            let max_count = per_a.values().copied().max().unwrap_or(0);
            SolutionCountReport {
                n,
                l,
                r,
                q,
                class,
                per_a,
                zero_count: None,
                bound,
                max_count,
            }
        })
        .collect())
}

/// Exhaustively counts xor solutions. The `A = 0` bucket is reported
/// separately: it must be empty whenever `q >= 2`, and carries no bound for
/// `1 < q < 2`.
pub fn count_xor_solutions(
    seq: &LacunarySequence,
    n: usize,
    l: usize,
    budget: u128,
) -> Result<SolutionCountReport> {
    let terms = seq.integer_terms()?;
    if l == 0 || l > n || n > terms.len() {
        return Err(Error::Size(format!(
            "need 1 <= l <= n <= {} terms, got l = {l}, n = {n}",
            terms.len()
        )));
    }
    check_budget(binomial_u128(n, l), budget)?;

    let (per_a_u64, zero_count) = (l..=n)
        .into_par_iter()
        .map(|k1| {
            let mut local: BTreeMap<u64, u64> = BTreeMap::new();
            let mut zeros = 0u64;
            for_each_subset(k1, l, &mut |indices| {
                let mut a = 0u64;
                for &k in indices {
                    a ^= terms[k - 1];
                }
                if a == 0 {
                    zeros += 1;
                } else {
                    *local.entry(a).or_insert(0) += 1;
                }
            });
            (local, zeros)
        })
        .reduce(
            || (BTreeMap::new(), 0),
            |(mut a, za), (b, zb)| {
                for (k, v) in b {
                    *a.entry(k).or_insert(0) += v;
                }
                (a, za + zb)
            },
        );

    let q = seq.q();
    let bound = if q < 2.0 { xor_count_bound(l, q, n).ok() } else { None };
    let per_a: BTreeMap<i128, u64> = per_a_u64.into_iter().map(|(a, c)| (a as i128, c)).collect();
    let max_count = per_a.values().copied().max().unwrap_or(0);
    Ok(SolutionCountReport {
        n,
        l,
        r: 1,
        q,
        class: SolutionClass::Xor,
        per_a,
        zero_count: Some(zero_count),
        bound,
        max_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_31_hand_expansion() {
        // (8 * 10 * log2(2) * log2(2*1*2*2/1))^(2/3) = (80 * 3)^(2/3)
        let b = signed_count_bound_low_ratio(2, 0, 2.0, 10, 1).unwrap();
        assert!((b - 240f64.powf(2.0 / 3.0)).abs() < 1e-12);
        // monotone nondecreasing in n
        assert!(signed_count_bound_low_ratio(3, 1, 1.5, 20, 2).unwrap() >= signed_count_bound_low_ratio(3, 1, 1.5, 10, 2).unwrap());
        // exponent (3+3)/3 = 2
        let b33 = signed_count_bound_low_ratio(3, 3, 2.0, 7, 2).unwrap();
        let inner = 8.0 * 7.0 * 6f64.log2() * (2.0f64 * 4.0 * 3.0 * 2.0 / 1.0).log2();
        assert!((b33 - inner * inner).abs() < 1e-9 * b33);
        assert!(signed_count_bound_low_ratio(2, 0, 2.5, 5, 1).is_err());
        assert!(signed_count_bound_low_ratio(2, 0, 1.0, 5, 1).is_err());
    }

    #[test]
    fn bound_32_exponents_and_domain() {
        // exponent l/4 at (l=4, p2=0, p3=0) is 1: bound equals the inner product
        let inner = |l: f64, r: f64, q: f64, n: f64| {
            20.0 * n * (2.0 * l * r).ln() / q.ln() * (q * l * r / (q - 2.0)).ln() / q.ln()
                * (4.0 * l * l * q * q * r.powi(3) / (q - 2.0)).ln()
                / q.ln()
        };
        let b = signed_count_bound_high_ratio(4, 0, 0, 3.0, 10, 1, HighRatioBoundForm::RCubed).unwrap();
        assert!((b - inner(4.0, 1.0, 3.0, 10.0)).abs() < 1e-9 * b);
        // exponent at (l=4, p2=4, p3=0) is 2
        let b2 = signed_count_bound_high_ratio(4, 4, 0, 3.0, 10, 1, HighRatioBoundForm::RCubed).unwrap();
        assert!((b2 - b * b).abs() < 1e-6 * b2);
        // finite and positive at (l=2, q=3, n=10, r=1)
        let f = signed_count_bound_high_ratio(2, 0, 0, 3.0, 10, 1, HighRatioBoundForm::RCubed).unwrap();
        assert!(f.is_finite() && f > 0.0);
        // the two written forms differ but stay within a factor ~2 here
        let p = signed_count_bound_high_ratio(4, 1, 1, 3.0, 10, 2, HighRatioBoundForm::RSquared).unwrap();
        let s = signed_count_bound_high_ratio(4, 1, 1, 3.0, 10, 2, HighRatioBoundForm::RCubed).unwrap();
        assert!(p > 0.0 && s > 0.0 && (p / s - 1.0).abs() < 1.0);
        assert!(signed_count_bound_high_ratio(2, 0, 0, 2.0, 5, 1, HighRatioBoundForm::RCubed).is_err());
    }

    #[test]
    fn gamma_and_bound_42() {
        assert_eq!(gamma_for_q(1.5).unwrap(), 1);
        assert_eq!(gamma_for_q(1.25).unwrap(), 2);
        assert_eq!(gamma_for_q(4.0 / 3.0).unwrap(), 2);
        assert!(gamma_for_q(2.0).is_err());
        assert!(gamma_for_q(0.9).is_err());
        // exponent at l=3 is 1
        let q: f64 = 1.5;
        let b = xor_count_bound(3, q, 11).unwrap();
        let inner = 2.0 * 8.0 * 11.0 * (2f64.ln() / q.ln()).powi(2);
        assert!((b - inner).abs() < 1e-10 * b);
    }

    #[test]
    fn powers_of_two_pair_counts_match_brute_force() {
        // m_k = 2^k, n = 3, l = 2, r = 1. Direct oracle over the six signed
        // pairs: 4+2=6, 4-2=2, 8+2=10, 8-2=6, 8+4=12, 8-4=4. The value 6
        // appears twice (4+2 and 8-2), everything else once.
        let seq = LacunarySequence::power(2, 3).unwrap();
        let reports = count_signed_solutions(&seq, 3, 2, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].class, SolutionClass::SignedByP { p: 0 });
        let expected: BTreeMap<i128, u64> =
            [(2, 1), (4, 1), (6, 2), (10, 1), (12, 1)].into_iter().collect();
        assert_eq!(reports[0].per_a, expected);
        assert_eq!(reports[0].max_count, 2);
        assert_eq!(reports[0].verdict(), Some(true));
    }

    #[test]
    fn pure_powers_of_three_never_hit_zero() {
        // q = 3 > 2, r = 1: no solutions with A = 0 for any l <= n <= 12.
        let seq = LacunarySequence::power(3, 12).unwrap();
        for l in 2..=4usize {
            for n in l..=12 {
                let reports = count_signed_solutions(&seq, n, l, 1, DEFAULT_BUDGET).unwrap();
                for rep in reports {
                    assert_eq!(rep.per_a.get(&0), None, "n={n} l={l}");
                    assert_eq!(rep.verdict(), Some(true));
                }
            }
        }
    }

    #[test]
    fn interleaved_zero_bucket_grows_linearly() {
        let seq = LacunarySequence::interleaved_example(48).unwrap();
        let count_at = |n: usize| {
            let reports = count_signed_solutions(&seq, n, 3, 1, DEFAULT_BUDGET).unwrap();
            reports
                .iter()
                .find(|r| r.class == SolutionClass::SignedByP { p: 0 })
                .and_then(|r| r.per_a.get(&0).copied())
                .unwrap_or(0)
        };
        let (c12, c24, c48) = (count_at(12), count_at(24), count_at(48));
        assert!(c12 > 0);
        // at least linear growth over the doubling grid
        assert!(c24 as f64 >= 1.8 * c12 as f64, "c12={c12} c24={c24}");
        assert!(c48 as f64 >= 1.8 * c24 as f64, "c24={c24} c48={c48}");
    }

    #[test]
    fn first_sign_convention_mirrors_buckets() {
        // Counts for A with the first sign +, against a brute force with the
        // first sign fixed negative: buckets must mirror A -> -A.
        let seq = LacunarySequence::interleaved_example(10).unwrap();
        let terms = seq.integer_terms().unwrap();
        let reports = count_signed_solutions(&seq, 10, 3, 2, DEFAULT_BUDGET).unwrap();
        let mut mirrored: BTreeMap<i128, u64> = BTreeMap::new();
        for k1 in 3..=10usize {
            for k2 in 2..k1 {
                for k3 in 1..k2 {
                    for e1 in 1..=2i128 {
                        for e2 in 1..=2i128 {
                            for e3 in 1..=2i128 {
                                for (s2, s3) in
                                    [(1, 1), (1, -1), (-1, 1), (-1, -1)]
                                {
                                    let a = -e1 * terms[k1 - 1] as i128
                                        + s2 * e2 * terms[k2 - 1] as i128
                                        + s3 * e3 * terms[k3 - 1] as i128;
                                    *mirrored.entry(a).or_insert(0) += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        let mut ours: BTreeMap<i128, u64> = BTreeMap::new();
        for rep in &reports {
            for (a, c) in &rep.per_a {
                *ours.entry(*a).or_insert(0) += c;
            }
        }
        for (a, c) in &ours {
            assert_eq!(mirrored.get(&(-a)), Some(c), "A = {a}");
        }
    }

    #[test]
    fn xor_examples() {
        // m = (2, 4, 8): l = 2, A = 6 has exactly one solution (2 xor 4).
        let seq = LacunarySequence::power(2, 3).unwrap();
        let rep = count_xor_solutions(&seq, 3, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(rep.per_a.get(&6), Some(&1));
        assert_eq!(rep.zero_count, Some(0));
        assert_eq!(rep.max_count, 1);
        assert_eq!(rep.verdict(), Some(true));

        // interleaved sequence: q = 4/3 < 2, bound applies to positive buckets
        let seq = LacunarySequence::interleaved_example(16).unwrap();
        let rep = count_xor_solutions(&seq, 16, 3, DEFAULT_BUDGET).unwrap();
        assert!(rep.bound.is_some());
        assert_eq!(rep.verdict(), Some(true));
    }

    #[test]
    fn xor_zero_impossible_for_doubling_ratios() {
        for base in [2u64, 3] {
            let seq = LacunarySequence::power(base, 14).unwrap();
            for l in 1..=5usize {
                let rep = count_xor_solutions(&seq, 14, l, DEFAULT_BUDGET).unwrap();
                assert_eq!(rep.zero_count, Some(0), "base={base} l={l}");
                assert_eq!(rep.verdict(), Some(true));
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let seq = LacunarySequence::power(2, 20).unwrap();
        match count_signed_solutions(&seq, 20, 4, 3, 1000) {
            Err(Error::Budget { needed, budget }) => {
                assert!(needed > budget);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn real_sequences_are_rejected() {
        let seq = LacunarySequence::from_real_terms(vec![1.5, 3.2, 6.9], 2.0).unwrap();
        assert!(matches!(
            count_signed_solutions(&seq, 3, 2, 1, DEFAULT_BUDGET),
            Err(Error::Type(_))
        ));
        assert!(matches!(count_xor_solutions(&seq, 3, 2, DEFAULT_BUDGET), Err(Error::Type(_))));
    }
}
