//! Gauge actions on basis-graded truncations.
//!
//! On an `N x N` truncation the gauge automorphism at `lambda` is
//! conjugation by `D_lambda = diag(1, lambda, ..., lambda^{N-1})`, which
//! multiplies band `i - j` by `lambda^{i-j}`. Fourier coefficients are read
//! off by exact circle quadrature of the conjugates.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::numkit::{
    circle_integral, jacobi_svd, norm2, unit_power, CircleGrid, ComplexMatrix, C64,
};

/// Relative factor in the default coefficient threshold `tau = 1e-10 ||S||`.
pub const DEFAULT_THRESHOLD_FACTOR: f64 = 1e-10;

const UNIT_TOLERANCE: f64 = 1e-14;
const RANK_TOLERANCE: f64 = 1e-10;
const DEPENDENCE_TOLERANCE: f64 = 1e-10;

/// `D_lambda A D_lambda^*`.
pub fn gauge_conjugate(a: &ComplexMatrix, lambda: C64) -> Result<ComplexMatrix> {
    if (lambda.norm() - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::input(format!(
            "gauge parameter {lambda} is off the unit circle (|lambda| = {})",
            lambda.norm()
        )));
    }
    Ok(conjugate_unchecked(a, lambda))
}

fn conjugate_unchecked(a: &ComplexMatrix, lambda: C64) -> ComplexMatrix {
    let n = a.dim() as isize;
    let table: Vec<C64> = (-(n - 1)..n)
        .map(|p| unit_power(lambda, p as i64))
        .collect();
    a.map_by_band(|band, z| z * table[(band + n - 1) as usize])
}

/// Operator Fourier coefficients `k -> S^(k)` of a truncated element.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSeries {
    coefficients: BTreeMap<usize, C64>,
    truncation_dim: usize,
    threshold: f64,
}

impl FourierSeries {
    pub fn new(coefficients: BTreeMap<usize, C64>, truncation_dim: usize, threshold: f64) -> Self {
        Self {
            coefficients,
            truncation_dim,
            threshold,
        }
    }

    /// Series of the polynomial `sum_j coeffs[j-1] T^j`.
    pub fn from_polynomial(coeffs: &[C64], truncation_dim: usize, threshold: f64) -> Self {
        let coefficients = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| (i + 1, c))
            .collect();
        Self::new(coefficients, truncation_dim, threshold)
    }

    /// Raw coefficient; zero when not computed.
    pub fn coefficient(&self, k: usize) -> C64 {
        self.coefficients.get(&k).copied().unwrap_or_default()
    }

    pub fn is_nonzero(&self, k: usize) -> bool {
        self.coefficient(k).norm() > self.threshold
    }

    /// Smallest `k` with `|S^(k)| > tau`.
    pub fn lowest_index(&self) -> Option<usize> {
        self.coefficients
            .iter()
            .find(|(_, c)| c.norm() > self.threshold)
            .map(|(&k, _)| k)
    }

    pub fn max_index(&self) -> usize {
        self.coefficients.keys().next_back().copied().unwrap_or(0)
    }

    pub fn truncation_dim(&self) -> usize {
        self.truncation_dim
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, C64)> + '_ {
        self.coefficients.iter().map(|(&k, &c)| (k, c))
    }

    /// `sum_k S^(k) T^k` over the stored coefficients.
    pub fn partial_sum(&self, powers: &[ComplexMatrix]) -> Result<ComplexMatrix> {
        let mut terms = Vec::new();
        for (k, c) in self.iter() {
            let p = powers
                .get(k - 1)
                .ok_or_else(|| Error::input(format!("power T^{k} not supplied")))?;
            terms.push((c, p));
        }
        Ok(ComplexMatrix::linear_combination(
            self.truncation_dim,
            &terms,
        ))
    }
}

/// Fourier coefficients `S^(1..=d)` with the default threshold.
pub fn fourier_coefficients(
    a: &ComplexMatrix,
    grid: &CircleGrid,
    powers: &[ComplexMatrix],
) -> Result<FourierSeries> {
    let tau = DEFAULT_THRESHOLD_FACTOR * norm2(a)?;
    fourier_coefficients_with_threshold(a, grid, powers, tau)
}

/// Fourier coefficients `S^(k)`, `k = 1..=powers.len()`: the `k`-th circle
/// integral of the gauge orbit equals `S^(k) T^k`, so the coefficient is read
/// from the entry where `T^k` is largest.
pub fn fourier_coefficients_with_threshold(
    a: &ComplexMatrix,
    grid: &CircleGrid,
    powers: &[ComplexMatrix],
    threshold: f64,
) -> Result<FourierSeries> {
    let n = a.dim();
    if grid.len() < 2 * n {
        return Err(Error::input(format!(
            "circle grid has {} nodes; at least 2N = {} are needed",
            grid.len(),
            2 * n
        )));
    }
    if let Some(p) = powers.iter().find(|p| p.dim() != n) {
        return Err(Error::input(format!(
            "power of dimension {} for N = {n}",
            p.dim()
        )));
    }
    let samples = grid.sample(|lambda| conjugate_unchecked(a, lambda));
    let mut coefficients = BTreeMap::new();
    for (idx, tk) in powers.iter().enumerate() {
        let k = idx + 1;
        let (r, c, lead) = tk.argmax_abs();
        if lead.norm() < f64::MIN_POSITIVE {
            return Err(Error::Index(k));
        }
        let band = circle_integral(&samples, k as i64)?;
        coefficients.insert(k, band.get(r, c) / lead);
    }
    Ok(FourierSeries::new(coefficients, n, threshold))
}

/// `sum_{j=1}^n ((n-j)/n) S^(j) T^j`. Powers are needed only for the indices
/// carrying a nonzero coefficient.
pub fn fejer_sum(
    series: &FourierSeries,
    n: usize,
    powers: &[ComplexMatrix],
) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::input("Fejér order must be at least 1"));
    }
    let nf = n as f64;
    let mut terms = Vec::new();
    for (j, c) in series.iter() {
        if j > n || !series.is_nonzero(j) {
            continue;
        }
        let p = powers.get(j - 1).ok_or_else(|| {
            Error::input(format!(
                "power T^{j} missing for the Fejér sum of order {n}"
            ))
        })?;
        terms.push((c * ((nf - j as f64) / nf), p));
    }
    Ok(ComplexMatrix::linear_combination(
        series.truncation_dim(),
        &terms,
    ))
}

/// Evidence that an algebra admits no gauge action.
#[derive(Clone, Debug, PartialEq)]
pub enum GaugeWitness {
    /// `a_1 T + ... + a_m T^m = 0` with `T^m != 0`.
    LinearDependence {
        coefficients: Vec<C64>,
        top_index: usize,
        top_power_norm: f64,
        residual_norm: f64,
    },
    /// `||gamma_phase(S)|| / ||S|| = ratio`, which differs from 1 by more
    /// than `margin`.
    NormAsymmetry { phase: C64, ratio: f64, margin: f64 },
}

/// Looks for a minimal linear dependence among `T, T^2, ..., T^n` through the
/// Gram matrix of the vectorized powers.
pub fn certify_no_gauge_linear_dependence(
    powers: &[ComplexMatrix],
) -> Result<Option<GaugeWitness>> {
    let n = powers.len();
    if n < 2 {
        return Err(Error::input("need at least T and T^2"));
    }
    let vecs: Vec<Vec<C64>> = powers.iter().map(|p| p.to_row_major()).collect();
    let gram = |a: usize, b: usize| -> C64 {
        vecs[a]
            .iter()
            .zip(&vecs[b])
            .map(|(x, y)| x.conj() * y)
            .sum()
    };

    for m in 1..=n {
        let columns: Vec<Vec<C64>> = (0..m)
            .map(|b| (0..m).map(|a| gram(a, b)).collect())
            .collect();
        let svd = jacobi_svd(columns, true)?;
        let smax = svd.singular_values[0];
        let smin = svd.singular_values[m - 1];
        if smax > 0.0 && smin >= RANK_TOLERANCE * smax {
            continue;
        }
        let top_power_norm = norm2(&powers[m - 1])?;
        if top_power_norm <= DEPENDENCE_TOLERANCE {
            return Ok(None);
        }
        let null = &svd.right_vectors.expect("vectors requested")[m - 1];
        let scale = null.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let coefficients: Vec<C64> = null.iter().map(|z| z / scale).collect();
        let terms: Vec<(C64, &ComplexMatrix)> =
            coefficients.iter().copied().zip(powers.iter()).collect();
        let combo = ComplexMatrix::linear_combination(powers[0].dim(), &terms);
        let residual_norm = norm2(&combo)?;
        let mut largest = 0.0f64;
        for p in &powers[..m] {
            largest = largest.max(norm2(p)?);
        }
        if residual_norm > DEPENDENCE_TOLERANCE * largest {
            return Ok(None);
        }
        return Ok(Some(GaugeWitness::LinearDependence {
            coefficients,
            top_index: m,
            top_power_norm,
            residual_norm,
        }));
    }
    Ok(None)
}

/// Scans `r(lambda) = ||sum_j lambda^j a_j T^j||` over the grid. An isometric
/// gauge action forces `r` to be constant.
pub fn certify_no_gauge_norm_scan(
    coeffs: &[C64],
    powers: &[ComplexMatrix],
    grid: &CircleGrid,
    margin: f64,
) -> Result<Option<GaugeWitness>> {
    if coeffs.len() != powers.len() || powers.is_empty() {
        return Err(Error::input("need one coefficient per supplied power"));
    }
    if coeffs.iter().all(|c| *c == C64::default()) {
        return Err(Error::input("all coefficients are zero"));
    }
    let dim = powers[0].dim();
    let r = |lambda: C64| -> Result<f64> {
        let scaled: Vec<C64> = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * unit_power(lambda, i as i64 + 1))
            .collect();
        let terms: Vec<(C64, &ComplexMatrix)> = scaled.into_iter().zip(powers.iter()).collect();
        norm2(&ComplexMatrix::linear_combination(dim, &terms))
    };
    let base = r(C64::new(1.0, 0.0))?;
    let mut best: Option<(C64, f64)> = None;
    for &lambda in grid.nodes() {
        let value = r(lambda)?;
        let ratio = if base > 0.0 {
            value / base
        } else if value > 0.0 {
            f64::INFINITY
        } else {
            1.0
        };
        if best.is_none_or(|(_, b)| (ratio - 1.0).abs() > (b - 1.0).abs()) {
            best = Some((lambda, ratio));
        }
    }
    Ok(best.and_then(|(phase, ratio)| {
        ((ratio - 1.0).abs() > margin).then_some(GaugeWitness::NormAsymmetry {
            phase,
            ratio,
            margin,
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn shift(weights: &[f64]) -> ComplexMatrix {
        let n = weights.len() + 1;
        ComplexMatrix::from_fn(n, |i, j| {
            if i == j + 1 {
                c(weights[j])
            } else {
                C64::default()
            }
        })
    }

    #[test]
    fn conjugating_a_shift_scales_it() {
        let t = shift(&[1.0, 0.5, 0.25, 2.0]);
        let i = C64::new(0.0, 1.0);
        let g = gauge_conjugate(&t, i).unwrap();
        assert!(g.max_abs_diff(&t.scale(i)) < 1e-15);
        let t2 = t.matmul(&t);
        assert!(gauge_conjugate(&t2, c(-1.0)).unwrap().max_abs_diff(&t2) < 1e-15);
    }

    #[test]
    fn identity_is_fixed() {
        let id = ComplexMatrix::identity(5);
        let g = gauge_conjugate(&id, C64::from_polar(1.0, 1.1)).unwrap();
        assert!(g.max_abs_diff(&id) < 1e-15);
    }

    #[test]
    fn off_circle_rejected() {
        let id = ComplexMatrix::identity(3);
        assert!(matches!(
            gauge_conjugate(&id, c(1.001)),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn coefficients_of_polynomial() {
        let t = shift(&[1.0, 0.5, 1.0 / 3.0, 0.25, 0.2]);
        let powers = t.powers(5);
        let s = powers[0].scale(c(3.0)).add(&powers[1].scale(c(5.0)));
        let grid = CircleGrid::for_dim(6);
        let series = fourier_coefficients(&s, &grid, &powers).unwrap();
        assert!((series.coefficient(1) - c(3.0)).norm() < 1e-12);
        assert!((series.coefficient(2) - c(5.0)).norm() < 1e-12);
        for k in 3..=5 {
            assert!(series.coefficient(k).norm() < 1e-12);
        }
        assert_eq!(series.lowest_index(), Some(1));
    }

    #[test]
    fn annihilated_power_is_an_index_error() {
        let t = shift(&[1.0, 1.0]);
        let powers = t.powers(3);
        let grid = CircleGrid::for_dim(3);
        assert_eq!(
            fourier_coefficients(&t, &grid, &powers),
            Err(Error::Index(3))
        );
    }

    #[test]
    fn too_few_nodes_rejected() {
        let t = shift(&[1.0, 1.0]);
        let grid = CircleGrid::new(5).unwrap();
        assert!(matches!(
            fourier_coefficients(&t, &grid, &t.powers(1)),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn fejer_weights() {
        let t = shift(&[1.0, 0.5, 0.25, 0.125]);
        let powers = t.powers(4);
        let single = FourierSeries::from_polynomial(&[c(1.0)], 5, 1e-12);
        let s2 = fejer_sum(&single, 2, &powers).unwrap();
        assert!(s2.max_abs_diff(&t.scale(c(0.5))) < 1e-15);
        let s1000 = fejer_sum(&single, 1000, &powers[..1]).unwrap();
        assert!(s1000.max_abs_diff(&t.scale(c(0.999))) < 1e-15);

        let two = FourierSeries::from_polynomial(&[c(3.0), c(5.0)], 5, 1e-12);
        let s4 = fejer_sum(&two, 4, &powers).unwrap();
        let want = powers[0]
            .scale(c(0.75 * 3.0))
            .add(&powers[1].scale(c(0.5 * 5.0)));
        assert!(s4.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn fejer_missing_power() {
        let two = FourierSeries::from_polynomial(&[c(3.0), c(5.0)], 3, 1e-12);
        let t = shift(&[1.0, 1.0]);
        assert!(matches!(
            fejer_sum(&two, 4, &t.powers(1)),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn projection_has_dependence_witness() {
        // rank-one orthogonal projection onto (1, 1, 0)/sqrt(2)
        let p = ComplexMatrix::from_fn(3, |i, j| if i < 2 && j < 2 { c(0.5) } else { c(0.0) });
        let w = certify_no_gauge_linear_dependence(&p.powers(2)).unwrap();
        match w {
            Some(GaugeWitness::LinearDependence {
                coefficients,
                top_index,
                residual_norm,
                ..
            }) => {
                assert_eq!(top_index, 2);
                assert!((coefficients[0] + coefficients[1]).norm() < 1e-12);
                assert!(residual_norm < 1e-12);
            }
            other => panic!("expected a dependence witness, got {other:?}"),
        }
    }

    #[test]
    fn nilpotent_cell_has_no_dependence_witness() {
        let e12 = ComplexMatrix::from_fn(2, |i, j| if i == 0 && j == 1 { c(1.0) } else { c(0.0) });
        assert_eq!(
            certify_no_gauge_linear_dependence(&e12.powers(2)).unwrap(),
            None
        );
    }

    #[test]
    fn diagonal_operator_fails_norm_scan() {
        let n = 6;
        let diag: Vec<f64> = (1..=n).map(|k| 1.0 / k as f64).collect();
        let t = ComplexMatrix::from_real_diagonal(&diag);
        let grid = CircleGrid::new(64).unwrap();
        let w = certify_no_gauge_norm_scan(&[c(1.0), c(-1.0)], &t.powers(2), &grid, 1e-6).unwrap();
        match w {
            Some(GaugeWitness::NormAsymmetry { phase, ratio, .. }) => {
                assert!((phase - c(-1.0)).norm() < 1e-12);
                assert!((ratio - 8.0).abs() < 1e-11);
            }
            other => panic!("expected asymmetry, got {other:?}"),
        }
    }

    #[test]
    fn single_mode_scan_is_flat() {
        let t = ComplexMatrix::from_real_diagonal(&[1.0, 0.5, 0.2]);
        let grid = CircleGrid::new(16).unwrap();
        assert_eq!(
            certify_no_gauge_norm_scan(&[c(1.0)], &t.powers(1), &grid, 1e-9).unwrap(),
            None
        );
    }
}
