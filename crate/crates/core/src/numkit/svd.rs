//! One-sided (Hestenes) Jacobi SVD. Used as the brute-force oracle for
//! [`operator_norm`](super::operator_norm) and for null vectors of small Gram
//! matrices; it shares no code with the power-iteration path.

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Size guard for [`svd_oracle`].
pub const ORACLE_MAX_DIM: usize = 512;

const MAX_SWEEPS: usize = 80;
const ORTHOGONALITY_TOL: f64 = 1e-15;

/// Singular values (descending) and, optionally, right singular vectors
/// (`v[k]` pairs with `singular_values[k]`).
#[derive(Clone, Debug)]
pub struct JacobiSvd {
    pub singular_values: Vec<f64>,
    pub right_vectors: Option<Vec<Vec<C64>>>,
}

/// Jacobi SVD of a `rows x cols` matrix given as a list of columns.
pub fn jacobi_svd(mut columns: Vec<Vec<C64>>, want_vectors: bool) -> Result<JacobiSvd> {
    let ncols = columns.len();
    let mut v: Vec<Vec<C64>> = if want_vectors {
        (0..ncols)
            .map(|j| {
                let mut e = vec![C64::new(0.0, 0.0); ncols];
                e[j] = C64::new(1.0, 0.0);
                e
            })
            .collect()
    } else {
        Vec::new()
    };

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..ncols {
            for q in (p + 1)..ncols {
                let alpha: f64 = columns[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = columns[q].iter().map(|z| z.norm_sqr()).sum();
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma: C64 = columns[p]
                    .iter()
                    .zip(&columns[q])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let g = gamma.norm();
                if g <= ORTHOGONALITY_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Rotate column q by conj(phase) so that <a_p, a_q> is real,
                // then apply the real Jacobi rotation.
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut columns, p, q, phase, c, s);
                if want_vectors {
                    rotate(&mut v, p, q, phase, c, s);
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "Jacobi SVD sweeps",
            iterations: MAX_SWEEPS,
            last: columns
                .iter()
                .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
                .fold(0.0, f64::max),
        });
    }

    let norms: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..ncols).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    Ok(JacobiSvd {
        singular_values: order.iter().map(|&k| norms[k]).collect(),
        right_vectors: want_vectors.then(|| order.iter().map(|&k| v[k].clone()).collect()),
    })
}

fn rotate(cols: &mut [Vec<C64>], p: usize, q: usize, phase: C64, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *x;
        let b = *y * phase;
        *x = a * c - b * s;
        *y = a * s + b * c;
    }
}

/// All singular values of a square matrix, descending.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let columns = (0..a.dim()).map(|j| a.column(j)).collect();
    Ok(jacobi_svd(columns, false)?.singular_values)
}

/// Largest singular value by a full Jacobi SVD (independent oracle).
pub fn svd_oracle(a: &ComplexMatrix) -> Result<f64> {
    if a.dim() > ORACLE_MAX_DIM {
        return Err(Error::Refusal(format!(
            "svd_oracle is limited to N <= {ORACLE_MAX_DIM} (got N = {})",
            a.dim()
        )));
    }
    if !a.is_finite() {
        return Err(Error::input("matrix has non-finite entries"));
    }
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix() {
        assert_eq!(svd_oracle(&ComplexMatrix::zeros(5)).unwrap(), 0.0);
    }

    #[test]
    fn unitary_diagonal() {
        let n = 6;
        let u = ComplexMatrix::from_fn(n, |i, j| {
            if i == j {
                C64::from_polar(1.0, 0.7 * i as f64)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        assert!((svd_oracle(&u).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn known_singular_values() {
        // [[3, 0], [4, 5]] has singular values sqrt(45) and sqrt(5)
        let a = ComplexMatrix::from_fn(2, |i, j| C64::new([[3.0, 0.0], [4.0, 5.0]][i][j], 0.0));
        let s = singular_values(&a).unwrap();
        assert!((s[0] - 45f64.sqrt()).abs() < 1e-13);
        assert!((s[1] - 5f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn refuses_large_dimension() {
        let a = ComplexMatrix::zeros(ORACLE_MAX_DIM + 1);
        assert!(matches!(svd_oracle(&a), Err(Error::Refusal(_))));
    }

    #[test]
    fn right_vectors_diagonalize_gram() {
        // complex 3x2 matrix; A v_k must be orthogonal with norms sigma_k
        let cols = vec![
            vec![C64::new(1.0, 1.0), C64::new(0.0, 2.0), C64::new(-1.0, 0.5)],
            vec![C64::new(2.0, 0.0), C64::new(1.0, -1.0), C64::new(0.0, 0.0)],
        ];
        let svd = jacobi_svd(cols.clone(), true).unwrap();
        let v = svd.right_vectors.unwrap();
        let apply = |x: &[C64]| -> Vec<C64> {
            (0..3)
                .map(|i| cols[0][i] * x[0] + cols[1][i] * x[1])
                .collect()
        };
        let u0 = apply(&v[0]);
        let u1 = apply(&v[1]);
        let dot: C64 = u0.iter().zip(&u1).map(|(a, b)| a.conj() * b).sum();
        assert!(dot.norm() < 1e-13);
        let n0 = u0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((n0 - svd.singular_values[0]).abs() < 1e-13);
    }
}
