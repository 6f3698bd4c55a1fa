//! Oscillatory integrals along the doubling map.
//!
//! For frequency sequences with exact ratio 2 (`m_{k+1} = 2 m_k`), the
//! characteristic function of `S_n(x) = sum_k a_k f(m_k x)` is a Birkhoff
//! integral over the doubling map `T y = 2y mod 1`:
//!
//! `int_0^1 exp(i lam S_n) dx = int_0^1 prod_{j=0}^{n-1} w_j(T^j y) dy`,
//! with `w_j(u) = exp(i lam a_{j+1} f(u))`.
//!
//! Equispaced quadrature would need to resolve frequency `m_n = 2^n`, which
//! is hopeless beyond n ~ 20. Instead we iterate the weighted transfer
//! operator `h <- L(w_j h)`, `(L g)(y) = (g(y/2) + g(y/2 + 1/2)) / 2`, whose
//! Fourier action is pure decimation: `(L g)^(m) = g^(2m)`. Smooth weights
//! keep the iterates band-limited, so a few hundred modes give machine
//! accuracy for any `n`.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::series::PeriodicFn;

/// Reusable spectral workspace for one grid size.
pub struct DoublingCharFn {
    grid: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Smallest power of two `>= 4 * (band + 40)`, clamped to `[256, 16384]`.
pub fn suggested_grid(max_lambda_coeff: f64) -> usize {
    let band = max_lambda_coeff.abs() + 40.0;
    let want = (4.0 * band) as usize;
    want.next_power_of_two().clamp(256, 16384)
}

impl DoublingCharFn {
    pub fn new(grid: usize) -> Self {
        assert!(grid.is_power_of_two() && grid >= 8);
        let mut planner = FftPlanner::new();
        DoublingCharFn {
            grid,
            forward: planner.plan_fft_forward(grid),
            inverse: planner.plan_fft_inverse(grid),
        }
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    /// `int_0^1 exp(i lam sum_{j=0}^{n-1} coeffs[j] f(2^j y)) dy`.
    ///
    /// `f_grid` holds `f(k/N)` for `k = 0..N`.
    pub fn char_fn(&self, f_grid: &[f64], coeffs: &[f64], lambda: f64) -> Complex64 {
        assert_eq!(f_grid.len(), self.grid);
        let n = self.grid;

        // Fourier coefficients of the iterate; start from h = 1.
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        c[0] = Complex64::new(1.0, 0.0);

        let mut physical = vec![Complex64::new(0.0, 0.0); n];
        let mut weight = vec![Complex64::new(0.0, 0.0); n];
        let mut weight_for = f64::NAN;

        for &a in coeffs {
            // w(u) = exp(i lam a f(u)); reuse when the coefficient repeats.
            if a != weight_for {
                for (w, &fv) in weight.iter_mut().zip(f_grid) {
                    let phase = lambda * a * fv;
                    *w = Complex64::new(phase.cos(), phase.sin());
                }
                weight_for = a;
            }

            physical.copy_from_slice(&c);
            self.inverse.process(&mut physical);
            for (p, w) in physical.iter_mut().zip(&weight) {
                *p *= w;
            }
            self.forward.process(&mut physical);
            let scale = 1.0 / n as f64;

            // Decimate: keep modes |m| < N/4 of g^(2m); zero the rest.
            for v in c.iter_mut() {
                *v = Complex64::new(0.0, 0.0);
            }
            c[0] = physical[0] * scale;
            for m in 1..n / 4 {
                c[m] = physical[2 * m] * scale;
                c[n - m] = physical[n - 2 * m] * scale;
            }
        }
        c[0]
    }
}

/// Characteristic function of a cosine sum over a doubling sequence.
pub fn doubling_trig_char_fn(coeff_row: &[f64], lambda: f64) -> Complex64 {
    let max_lc = coeff_row.iter().fold(0.0f64, |m, a| m.max((lambda * a).abs()));
    let op = DoublingCharFn::new(suggested_grid(max_lc));
    let grid: Vec<f64> = (0..op.grid())
        .map(|k| (2.0 * std::f64::consts::PI * k as f64 / op.grid() as f64).cos())
        .collect();
    op.char_fn(&grid, coeff_row, lambda)
}

/// Same for a general smooth periodic `f` (spectral accuracy requires
/// smoothness; step-like `f` should use an exact path instead).
pub fn doubling_birkhoff_char_fn(f: &dyn PeriodicFn, coeff_row: &[f64], lambda: f64) -> Complex64 {
    let max_lc = coeff_row.iter().fold(0.0f64, |m, a| m.max((lambda * a).abs()));
    let op = DoublingCharFn::new(suggested_grid(max_lc));
    let grid: Vec<f64> =
        (0..op.grid()).map(|k| f.eval(k as f64 / op.grid() as f64)).collect();
    op.char_fn(&grid, coeff_row, lambda)
}
