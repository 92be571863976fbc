use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::{Fft, FftPlanner};

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Iteration cap for a single power-iteration run.
pub const MAX_ITERATIONS: usize = 100_000;
pub const DEFAULT_RESTARTS: usize = 3;

/// Toeplitz operators at or above this size are applied through the FFT.
const FFT_THRESHOLD: usize = 512;

/// Smallest tolerance accepted for an `n x n` operator.
pub fn min_tolerance(n: usize) -> f64 {
    f64::EPSILON * n.max(1) as f64
}

pub fn default_tolerance(n: usize) -> f64 {
    min_tolerance(n).max(1e-14)
}

/// Largest singular value with the default tolerance and restarts.
pub fn norm2(a: &ComplexMatrix) -> Result<f64> {
    operator_norm(a, default_tolerance(a.dim()), DEFAULT_RESTARTS)
}

/// Largest singular value of `a` by power iteration on `A^H A`.
///
/// Restart `r` (1-based) starts from a complex Gaussian vector drawn from a
/// ChaCha stream seeded with `r`. A run stops once the relative change of the
/// estimate `||A v||` drops to `tol`; the result is the maximum over runs.
pub fn operator_norm(a: &ComplexMatrix, tol: f64, restarts: usize) -> Result<f64> {
    let n = a.dim();
    if !a.is_finite() {
        return Err(Error::input("matrix has non-finite entries"));
    }
    if tol.is_nan() || tol < min_tolerance(n) {
        return Err(Error::input(format!(
            "tolerance {tol:e} is below machine resolution {:e} for N={n}",
            min_tolerance(n)
        )));
    }
    if restarts == 0 {
        return Err(Error::input("at least one restart is required"));
    }
    if n == 0 || a.is_zero() {
        return Ok(0.0);
    }
    let op = Operator::new(a);
    let mut best = 0.0f64;
    for restart in 1..=restarts {
        best = best.max(power_iteration(&op, n, restart as u64, tol)?);
    }
    Ok(best)
}

fn power_iteration(op: &Operator<'_>, n: usize, seed: u64, tol: f64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    normalize(&mut v);

    let mut previous: Option<f64> = None;
    let mut sigma = 0.0;
    for _ in 0..MAX_ITERATIONS {
        let w = op.apply(&v);
        sigma = l2(&w);
        if sigma == 0.0 {
            return Ok(0.0);
        }
        if let Some(p) = previous {
            if (sigma - p).abs() <= tol * sigma {
                return Ok(sigma);
            }
        }
        previous = Some(sigma);
        v = op.apply_adjoint(&w);
        normalize(&mut v);
    }
    Err(Error::NonConvergence {
        what: "power iteration",
        iterations: MAX_ITERATIONS,
        last: sigma,
    })
}

pub(crate) fn l2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [C64]) {
    let s = l2(v);
    if s > 0.0 {
        v.iter_mut().for_each(|z| *z /= s);
    }
}

enum Operator<'a> {
    Direct(&'a ComplexMatrix),
    Fft(ToeplitzFft),
}

impl<'a> Operator<'a> {
    fn new(a: &'a ComplexMatrix) -> Self {
        match a.toeplitz_column() {
            Some(col) if col.len() >= FFT_THRESHOLD => Operator::Fft(ToeplitzFft::new(col)),
            _ => Operator::Direct(a),
        }
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        match self {
            Operator::Direct(a) => a.matvec(x),
            Operator::Fft(t) => t.apply(x),
        }
    }

    fn apply_adjoint(&self, y: &[C64]) -> Vec<C64> {
        match self {
            Operator::Direct(a) => a.adjoint_matvec(y),
            Operator::Fft(t) => t.apply_adjoint(y),
        }
    }
}

/// Lower-triangular Toeplitz apply in `O(N log N)`: zero-padded circular
/// convolution of length `>= 2N` with the spectra of `c` and `conj(c)` cached.
struct ToeplitzFft {
    n: usize,
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    spectrum: Vec<C64>,
    spectrum_conj: Vec<C64>,
}

impl ToeplitzFft {
    fn new(col: &[C64]) -> Self {
        let n = col.len();
        let len = (2 * n).next_power_of_two();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let mut spectrum = vec![C64::new(0.0, 0.0); len];
        spectrum[..n].copy_from_slice(col);
        let mut spectrum_conj: Vec<C64> = spectrum.iter().map(|z| z.conj()).collect();
        forward.process(&mut spectrum);
        forward.process(&mut spectrum_conj);
        Self {
            n,
            len,
            forward,
            inverse,
            spectrum,
            spectrum_conj,
        }
    }

    fn convolve(&self, x: impl Iterator<Item = C64>, spectrum: &[C64]) -> Vec<C64> {
        let mut buf = vec![C64::new(0.0, 0.0); self.len];
        for (b, z) in buf.iter_mut().zip(x) {
            *b = z;
        }
        self.forward.process(&mut buf);
        for (b, s) in buf.iter_mut().zip(spectrum) {
            *b *= s;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.len as f64;
        buf.truncate(self.n);
        buf.iter_mut().for_each(|z| *z *= scale);
        buf
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.convolve(x.iter().copied(), &self.spectrum)
    }

    // (T^H y)_j = (conj(c) * reverse(y))_{N-1-j}
    fn apply_adjoint(&self, y: &[C64]) -> Vec<C64> {
        let mut out = self.convolve(y.iter().rev().copied(), &self.spectrum_conj);
        out.reverse();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn diagonal_norm() {
        let a = ComplexMatrix::from_real_diagonal(&[3.0, 1.0]);
        assert!((norm2(&a).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn jordan_cell_norm() {
        let a = ComplexMatrix::from_rows(2, vec![c(0.0), c(0.0), c(1.0), c(0.0)]).unwrap();
        assert!((norm2(&a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix_norm() {
        assert_eq!(norm2(&ComplexMatrix::zeros(4)).unwrap(), 0.0);
    }

    #[test]
    fn rejects_non_finite_and_tiny_tolerance() {
        let a = ComplexMatrix::from_real_diagonal(&[f64::NAN, 1.0]);
        assert!(matches!(norm2(&a), Err(Error::Input(_))));
        let b = ComplexMatrix::from_real_diagonal(&[1.0; 8]);
        assert!(matches!(operator_norm(&b, 1e-17, 3), Err(Error::Input(_))));
    }

    #[test]
    fn fft_apply_matches_direct_apply() {
        let col: Vec<C64> = (0..600)
            .map(|k| C64::new(1.0 / (k + 1) as f64, ((k % 7) as f64 - 3.0) * 0.01))
            .collect();
        let t = ComplexMatrix::lower_toeplitz(col.clone());
        let fft = ToeplitzFft::new(&col);
        let x: Vec<C64> = (0..600)
            .map(|k| C64::new((k as f64).sin(), (k as f64 * 0.3).cos()))
            .collect();
        let scale = l2(&x) * col.iter().map(|z| z.norm()).sum::<f64>();
        let d1: f64 = t
            .matvec(&x)
            .iter()
            .zip(fft.apply(&x))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let d2: f64 = t
            .adjoint_matvec(&x)
            .iter()
            .zip(fft.apply_adjoint(&x))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(d1 < 1e-13 * scale, "{d1}");
        assert!(d2 < 1e-13 * scale, "{d2}");
    }
}
