//! The Volterra algebra on a midpoint grid.
//!
//! `V_f xi(x) = int_0^x f(x - t) xi(t) dt` is discretized at the collocation
//! points `x_i = (i + 1/2) h` with piecewise-constant inputs, giving the
//! lower-triangular Toeplitz matrix with entries `mu_{i-j}`, the cell
//! integrals of `f`.

mod kernel;

pub use kernel::{KernelSpec, SampledKernel, SamplingMode};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numkit::{find_root, norm2, ComplexMatrix, RootSolve, C64};
use crate::report::ExperimentReport;

const BOUND_SLACK: f64 = 1e-10;
const ZERO_PRODUCT: f64 = 1e-10;
const MUNTZ_GRID: usize = 1000;
const RANK_TOLERANCE: f64 = 1e-12;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `V_f` on the grid of `f`.
pub fn build_vf(f: &SampledKernel) -> Result<ComplexMatrix> {
    if let Some(k) = f
        .cells()
        .iter()
        .position(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        return Err(Error::input(format!("cell integral {k} is not finite")));
    }
    Ok(ComplexMatrix::lower_toeplitz(f.cells().to_vec()))
}

/// The discretized Volterra operator `V = V_1`.
pub fn volterra(n: usize) -> Result<ComplexMatrix> {
    build_vf(&SampledKernel::new(
        &KernelSpec::Const(1.0),
        n,
        SamplingMode::Exact,
    )?)
}

fn kernel(spec: KernelSpec, n: usize) -> Result<SampledKernel> {
    SampledKernel::new(&spec, n, SamplingMode::Exact)
}

fn power_kernel_error(n: u32, dim: usize) -> Result<f64> {
    let lhs = volterra(dim)?.pow(n as usize + 1);
    let rhs = build_vf(&kernel(KernelSpec::PowerN(n), dim)?)?;
    norm2(&lhs.sub(&rhs))
}

/// `e(N) = ||V^{n+1} - V_{u^n/n!}||` at `N` and `2N`.
pub fn power_kernel_check(n: u32, dim: usize) -> Result<ExperimentReport> {
    if n > 8 {
        return Err(Error::input(format!(
            "power kernel check is limited to n <= 8, got {n}"
        )));
    }
    let e1 = power_kernel_error(n, dim)?;
    let e2 = power_kernel_error(n, 2 * dim)?;
    let mut report = ExperimentReport::new("power-kernel");
    report.param("n", n).param("dim", dim);
    report
        .row(format!("error_{dim}"), e1)
        .row(format!("error_{}", 2 * dim), e2);
    report.flag("error_decreases", e2 < e1 || (e1 == 0.0 && e2 == 0.0));
    Ok(report)
}

/// `sigma_max(V_f) <= sum_k |mu_k|`.
pub fn l1_norm_bound_check(f: &SampledKernel) -> Result<ExperimentReport> {
    let sigma = norm2(&build_vf(f)?)?;
    let l1 = f.l1_cells();
    let mut report = ExperimentReport::new("l1-bound");
    report.param("dim", f.n());
    if let Some(spec) = f.spec() {
        report.param("kernel", spec);
    }
    report.row("sigma_max", sigma).row("l1_cells", l1);
    report.flag("sigma_below_l1", sigma <= l1 + BOUND_SLACK);
    Ok(report)
}

/// `||f||_#`, the Hilbert-Schmidt norm of `V_f`.
pub fn hs_norm(f: &SampledKernel) -> f64 {
    f.hs_norm()
}

/// The first `m` blocks of `sum_n (2^n/n) indicator[1 - 2^{1-n}, 1 - 2^{-n})`,
/// a kernel in the Volterra algebra but not in `L^1`.
pub fn build_notell1(m: u32, n: usize) -> Result<SampledKernel> {
    if m == 0 || m > 60 {
        return Err(Error::input(format!(
            "block count must lie in 1..=60, got {m}"
        )));
    }
    if !n.is_power_of_two() || n < (1usize << m) {
        return Err(Error::input(format!(
            "grid of {n} cells is not aligned to {m} blocks (need a power of two >= 2^{m})"
        )));
    }
    kernel(KernelSpec::NotEll1(m), n)
}

/// `eta_0`, the least positive root of `cosh(eta) cos(eta) + 1`, and
/// `||V^2|| = eta_0^{-2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct V2Exact {
    pub solve: RootSolve,
    pub eta0: f64,
    pub norm: f64,
}

pub fn v2_exact() -> Result<V2Exact> {
    let g = |eta: f64| eta.cosh() * eta.cos() + 1.0;
    let step = 0.1;
    let mut lo = 0.0;
    let mut k = 0u32;
    while g(lo) * g(lo + step) > 0.0 {
        k += 1;
        if k > 1000 {
            return Err(Error::Numeric(
                "no sign change of cosh(eta)cos(eta) + 1 found".into(),
            ));
        }
        lo = f64::from(k) * step;
    }
    let solve = find_root(g, lo, f64::from(k + 1) * step, 1e-12)?;
    let eta0 = solve.root;
    Ok(V2Exact {
        solve,
        eta0,
        norm: eta0.powi(-2),
    })
}

/// `c_n = n! sigma_max(V^n)` for `n = 1..=n_max`.
pub fn power_norm_table(n_max: usize, dim: usize) -> Result<ExperimentReport> {
    if n_max == 0 || n_max > 12 {
        return Err(Error::input(format!(
            "n_max must lie in 1..=12, got {n_max}"
        )));
    }
    if dim < 512 {
        return Err(Error::input(format!(
            "power norm table needs N >= 512, got {dim}"
        )));
    }
    let v = volterra(dim)?;
    let mut power = v.clone();
    let mut values = Vec::with_capacity(n_max);
    let mut factorial = 1.0;
    for n in 1..=n_max {
        if n > 1 {
            power = power.matmul(&v);
        }
        factorial *= n as f64;
        values.push(factorial * norm2(&power)?);
    }
    let mut report = ExperimentReport::new("littlereade");
    report.param("dim", dim).param("n_max", n_max);
    for (i, cn) in values.iter().enumerate() {
        report.row(format!("c_{}", i + 1), *cn);
    }
    let head = &values[..n_max.min(8)];
    report.flag(
        "c_n_strictly_decreasing",
        head.windows(2).all(|w| w[1] < w[0]),
    );
    if n_max >= 8 {
        report.flag("c_8_in_range", (0.45..=0.6).contains(&values[7]));
    }
    Ok(report)
}

/// Discrete `f * g`: rectangle rule on cell averages,
/// `nu_k = |cell_k| h sum_j fbar_{k-j} gbar_j`.
pub fn convolve(f: &SampledKernel, g: &SampledKernel) -> Result<SampledKernel> {
    if f.n() != g.n() {
        return Err(Error::input(format!(
            "grid mismatch: {} vs {} cells",
            f.n(),
            g.n()
        )));
    }
    let n = f.n();
    let h = f.h();
    let avg = |k: &SampledKernel| -> Vec<C64> {
        k.cells()
            .iter()
            .enumerate()
            .map(|(j, z)| z / k.cell_width(j))
            .collect()
    };
    let (fa, ga) = (avg(f), avg(g));
    let (Some(a), Some(b)) = (f.first_nonzero_cell(), g.first_nonzero_cell()) else {
        return SampledKernel::from_cells(vec![C64::default(); n]);
    };
    let mut cells = vec![C64::default(); n];
    for k in (a + b)..n {
        let mut acc = C64::default();
        for j in b..=(k - a) {
            acc += fa[k - j] * ga[j];
        }
        cells[k] = acc * (f.cell_width(k) * h);
    }
    SampledKernel::from_cells(cells)
}

/// True iff `V_f^n` is exactly the zero matrix.
pub fn nilpotency_check(f: &SampledKernel, n: usize) -> Result<bool> {
    Ok(build_vf(f)?.pow(n).is_zero())
}

/// `h = f indicator[delta, 1]` with the bound `||V_f - V_h|| <= int_0^delta |f|`.
#[derive(Clone, Debug)]
pub struct NilpotentApproximation {
    pub kernel: SampledKernel,
    pub bound: f64,
    pub difference_norm: f64,
    /// Smallest `n` with `V_h^n = 0` by band count, if the kernel is banded.
    pub nilpotency_index: Option<usize>,
}

impl NilpotentApproximation {
    pub fn within_bound(&self) -> bool {
        self.difference_norm <= self.bound + BOUND_SLACK
    }
}

pub fn nilpotent_approximation(f: &SampledKernel, delta: f64) -> Result<NilpotentApproximation> {
    let grid = delta * f.n() as f64;
    if (grid - grid.round()).abs() > 1e-9 {
        return Err(Error::input(format!(
            "cutoff {delta} is not a grid point of the {}-cell grid",
            f.n()
        )));
    }
    let kernel = f.truncated_below(delta)?;
    let bound = f.l1_partial(delta);
    let difference = build_vf(f)?.sub(&build_vf(&kernel)?);
    let difference_norm = norm2(&difference)?;
    let nilpotency_index = match kernel.first_nonzero_cell() {
        None => Some(1),
        Some(0) => None,
        Some(k0) => Some(f.n().div_ceil(k0)),
    };
    Ok(NilpotentApproximation {
        kernel,
        bound,
        difference_norm,
        nilpotency_index,
    })
}

/// Support starts recovered from a zero product `f * g = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TitchmarshEstimate {
    pub alpha: f64,
    pub beta: f64,
    pub product_norm: f64,
    /// `alpha + beta >= 1 - 2/N`.
    pub consistent: bool,
}

pub fn titchmarsh_alpha(f: &SampledKernel, g: &SampledKernel) -> Result<TitchmarshEstimate> {
    let product_norm = norm2(&build_vf(&convolve(f, g)?)?)?;
    if product_norm >= ZERO_PRODUCT {
        return Err(Error::Precondition(format!(
            "f * g is not zero: sigma_max = {product_norm:e}"
        )));
    }
    let (alpha, beta) = (f.support_start(), g.support_start());
    Ok(TitchmarshEstimate {
        alpha,
        beta,
        product_norm,
        consistent: alpha + beta >= 1.0 - 2.0 / f.n() as f64,
    })
}

/// Least-squares fit of `x` by `sum_{j=2}^n a_j x^j` on 1000 points, then the
/// operator bound `||V^2 - sum_j j! a_j V^{j+1}|| <= eps + 5/N`.
pub fn muntz_no_gauge_demo(degree: usize, dim: usize) -> Result<ExperimentReport> {
    if degree < 2 {
        return Err(Error::input(format!(
            "degree must be at least 2, got {degree}"
        )));
    }
    if degree > 20 {
        return Err(Error::input(format!(
            "degree {degree} is beyond the monomial conditioning cap of 20"
        )));
    }
    let xs: Vec<f64> = (0..MUNTZ_GRID)
        .map(|i| i as f64 / (MUNTZ_GRID - 1) as f64)
        .collect();
    let cols = degree - 1;
    let a = DMatrix::from_fn(MUNTZ_GRID, cols, |i, j| xs[i].powi(j as i32 + 2));
    let b = DVector::from_iterator(MUNTZ_GRID, xs.iter().copied());
    let qr = a.clone().qr();
    let r = qr.r();
    let rmax = (0..cols).map(|j| r[(j, j)].abs()).fold(0.0, f64::max);
    if let Some(j) = (0..cols).find(|&j| r[(j, j)].abs() <= RANK_TOLERANCE * rmax) {
        return Err(Error::Numeric(format!(
            "least-squares fit is rank deficient: |R_{j}{j}| = {:e} against max {rmax:e}",
            r[(j, j)].abs()
        )));
    }
    let qtb = qr.q().transpose() * &b;
    let coeffs = r
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| Error::Numeric("triangular solve failed".into()))?;
    let fitted = &a * &coeffs;
    let eps = xs
        .iter()
        .zip(fitted.iter())
        .map(|(x, p)| (x - p).abs())
        .fold(0.0, f64::max);

    let v = volterra(dim)?;
    let powers = v.powers(degree + 1);
    let mut terms: Vec<(C64, &ComplexMatrix)> = vec![(c(1.0), &powers[1])];
    let mut factorial = 1.0;
    for j in 2..=degree {
        factorial *= j as f64;
        terms.push((c(-factorial * coeffs[j - 2]), &powers[j]));
    }
    let residual = norm2(&ComplexMatrix::linear_combination(dim, &terms))?;
    let v2 = v2_exact()?;
    let margin = v2.norm / eps;

    let mut report = ExperimentReport::new("muntz");
    report.param("degree", degree).param("dim", dim);
    for (j, a) in coeffs.iter().enumerate() {
        report.row(format!("a_{}", j + 2), *a);
    }
    report
        .row("fit_sup_error", eps)
        .row("operator_residual", residual)
        .row("operator_bound", eps + 5.0 / dim as f64)
        .row("v2_norm", v2.norm)
        .row("contradiction_margin", margin);
    report
        .flag(
            "operator_residual_within_bound",
            residual <= eps + 5.0 / dim as f64,
        )
        .flag("margin_above_one", margin > 1.0);
    Ok(report)
}

/// Absorption `g * f in I_{x0}` for `f in I_{x0}`, plus the compression
/// `P_{x0} V_f P_{x0}`.
pub fn ideal_restriction_check(
    f: &SampledKernel,
    x0: f64,
    g: &SampledKernel,
) -> Result<ExperimentReport> {
    if !(0.0..=1.0).contains(&x0) {
        return Err(Error::input(format!("x0 = {x0} outside [0, 1]")));
    }
    let n = f.n();
    let nf = n as f64;
    let must_vanish = |k: usize| (k as f64) < x0 * nf - 0.5;
    if let Some(k) = (0..n).find(|&k| must_vanish(k) && f.cells()[k] != C64::default()) {
        return Err(Error::Precondition(format!(
            "kernel does not vanish on [0, {x0}]: cell {k} is {}",
            f.cells()[k]
        )));
    }
    let first_allowed = (0..n).find(|&k| !must_vanish(k)).unwrap_or(n);
    let product = convolve(g, f)?;
    let absorbed = product
        .first_nonzero_cell()
        .is_none_or(|k| k >= first_allowed);
    let corner = (0..n).filter(|&i| (i as f64 + 0.5) / nf < x0).count();
    let compression = if corner == 0 {
        0.0
    } else {
        norm2(&build_vf(f)?.top_left(corner))?
    };
    let mut report = ExperimentReport::new("ideal-restriction");
    report.param("x0", x0).param("dim", n);
    report
        .row("product_support_start", product.support_start())
        .row("compression_norm", compression);
    report
        .flag("product_in_ideal", absorbed)
        .flag("compression_vanishes", compression == 0.0);
    Ok(report)
}

/// `sigma_max(V_f)` for `f(u) = (1 - u)^{-3/2}` along a grid ladder.
pub fn unbounded_witness_check(dims: &[usize]) -> Result<ExperimentReport> {
    if dims.is_empty() || dims.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::input(
            "grid sizes must be nonempty and strictly increasing",
        ));
    }
    let mut sigmas = Vec::with_capacity(dims.len());
    for &n in dims {
        sigmas.push(norm2(&build_vf(&kernel(KernelSpec::Singular32, n)?)?)?);
    }
    let ratio = sigmas[sigmas.len() - 1] / sigmas[0];
    let mut report = ExperimentReport::new("unbounded-witness");
    report.param(
        "dims",
        dims.iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    for (n, s) in dims.iter().zip(&sigmas) {
        report.row(format!("sigma_{n}"), *s);
    }
    report
        .row("ratio", ratio)
        .row("kernel_l1_double_integral", 2.0);
    report
        .flag(
            "sigma_strictly_increasing",
            sigmas.windows(2).all(|w| w[1] > w[0]),
        )
        .flag("ratio_above_4", ratio > 4.0);
    Ok(report)
}
