use std::f64::consts::PI;

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// The `M`-th roots of unity `exp(2 pi i m / M)`, `m = 0..M`.
#[derive(Clone, Debug)]
pub struct CircleGrid {
    nodes: Vec<C64>,
}

impl CircleGrid {
    pub fn new(node_count: usize) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::input("circle grid needs at least one node"));
        }
        let m = node_count as f64;
        let nodes = (0..node_count)
            .map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / m))
            .collect();
        Ok(Self { nodes })
    }

    /// Default grid for `N x N` truncations: `M = 2N`, which keeps every band
    /// index `-(N-1)..=N-1` alias free.
    pub fn for_dim(dim: usize) -> Self {
        Self::new((2 * dim).max(1)).expect("nonzero node count")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[C64] {
        &self.nodes
    }

    /// Evaluates `f` at every node.
    pub fn sample(&self, mut f: impl FnMut(C64) -> ComplexMatrix) -> Vec<(C64, ComplexMatrix)> {
        self.nodes.iter().map(|&z| (z, f(z))).collect()
    }
}

/// `lambda^p` for a unit-modulus `lambda`, by repeated squaring.
pub(crate) fn unit_power(lambda: C64, p: i64) -> C64 {
    let base = if p >= 0 { lambda } else { lambda.conj() };
    let mut e = p.unsigned_abs();
    let mut acc = C64::new(1.0, 0.0);
    let mut b = base;
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        b *= b;
        e >>= 1;
    }
    acc
}

/// Trapezoidal rule on the circle: `(1/M) sum_m value_m * lambda_m^{-k}`.
/// Exact for entries whose dependence on `lambda` is a trigonometric
/// polynomial of degree below `M`.
pub fn circle_integral(samples: &[(C64, ComplexMatrix)], k: i64) -> Result<ComplexMatrix> {
    let Some((_, first)) = samples.first() else {
        return Err(Error::input("circle integral needs at least one sample"));
    };
    let dim = first.dim();
    if let Some((_, bad)) = samples.iter().find(|(_, m)| m.dim() != dim) {
        return Err(Error::input(format!(
            "sample dimensions differ: {dim} vs {}",
            bad.dim()
        )));
    }
    let weight = 1.0 / samples.len() as f64;
    let terms: Vec<(C64, &ComplexMatrix)> = samples
        .iter()
        .map(|(lambda, m)| (unit_power(*lambda, -k) * weight, m))
        .collect();
    Ok(ComplexMatrix::linear_combination(dim, &terms))
}
