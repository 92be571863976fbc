//! Foundation numerics shared by the shift and Volterra models.

mod circle;
mod matrix;
mod norm;
mod root;
mod svd;

pub(crate) use circle::unit_power;
pub use circle::{circle_integral, CircleGrid};
pub use matrix::{causal_convolution, ComplexMatrix, Structure, C64};
pub use norm::{
    default_tolerance, min_tolerance, norm2, operator_norm, DEFAULT_RESTARTS, MAX_ITERATIONS,
};

pub use root::{find_root, RootSolve};
pub use svd::{jacobi_svd, singular_values, svd_oracle, JacobiSvd, ORACLE_MAX_DIM};

/// Neumaier-compensated sum; cell sums over `2^20` cells stay exact to a few ulps.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    if sum.is_finite() {
        sum + comp
    } else {
        sum
    }
}

/// Euclidean norm of `S e_0`.
pub fn first_column_norm(a: &ComplexMatrix) -> f64 {
    a.column_norm(0)
}

/// Generator for trial `trial` of a seeded study: the seed picks the key, the
/// trial index picks an independent ChaCha stream.
pub fn trial_rng(seed: u64, trial: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// `count` i.i.d. standard complex Gaussians (`E|z|^2 = 1`).
pub fn complex_gaussians(rng: &mut impl rand::Rng, count: usize) -> Vec<C64> {
    use rand_distr::StandardNormal;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (0..count)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(s * re, s * im)
        })
        .collect()
}
