//! Truncated weighted shifts `T e_n = a_n e_{n+1}` and the algebra they
//! generate.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gauge::{fourier_coefficients, FourierSeries};
use crate::numkit::{
    complex_gaussians, first_column_norm, norm2, trial_rng, CircleGrid, ComplexMatrix, C64,
};
use crate::report::ExperimentReport;

const EXTREME_TOLERANCE: f64 = 1e-9;
const EQUIVALENCE_SLACK: f64 = 1e-10;
const CLOSED_FORM_TOLERANCE: f64 = 1e-12;
const NEUMANN_TOLERANCE: f64 = 1e-12;
const PRODUCT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum WeightSequence {
    List(Vec<C64>),
    /// `a_n = 1/(n+1)`
    Harmonic,
    /// `a_n = r^n`, `0 < r < 1`
    Geometric(f64),
    Ones,
}

impl WeightSequence {
    pub fn geometric(r: f64) -> Result<Self> {
        if r > 0.0 && r < 1.0 {
            Ok(Self::Geometric(r))
        } else {
            Err(Error::input(format!(
                "geometric ratio must lie in (0, 1), got {r}"
            )))
        }
    }

    pub fn list(values: Vec<C64>) -> Result<Self> {
        if let Some(n) = values.iter().position(|a| *a == C64::default()) {
            return Err(Error::input(format!("weight a_{n} is zero")));
        }
        Ok(Self::List(values))
    }

    /// `a_n`, or `None` past the end of an explicit list.
    pub fn weight(&self, n: usize) -> Option<C64> {
        match self {
            Self::List(v) => v.get(n).copied(),
            Self::Harmonic => Some(C64::new(1.0 / (n as f64 + 1.0), 0.0)),
            Self::Geometric(r) => Some(C64::new(r.powi(n as i32), 0.0)),
            Self::Ones => Some(C64::new(1.0, 0.0)),
        }
    }

    /// `a_0, ..., a_{count-1}`.
    pub fn values(&self, count: usize) -> Result<Vec<C64>> {
        (0..count)
            .map(|n| {
                let a = self.weight(n).ok_or_else(|| {
                    Error::input(format!("weight list has no entry a_{n} ({count} needed)"))
                })?;
                if a == C64::default() {
                    return Err(Error::input(format!("weight a_{n} is zero")));
                }
                Ok(a)
            })
            .collect()
    }

    /// `ln |a_n|`, without materializing the weight itself.
    fn log_weight(&self, n: usize) -> Option<f64> {
        match self {
            Self::Geometric(r) => Some(n as f64 * r.ln()),
            _ => self.weight(n).map(|a| a.norm().ln()),
        }
    }

    /// `M^2 = sum |a_n|^2`, `None` when infinite.
    pub fn l2_sum_squared(&self) -> Option<f64> {
        match self {
            Self::List(v) => Some(v.iter().map(|a| a.norm_sqr()).sum()),
            Self::Harmonic => Some(std::f64::consts::PI.powi(2) / 6.0),
            Self::Geometric(r) => Some(1.0 / (1.0 - r * r)),
            Self::Ones => None,
        }
    }

    /// `|a_0| >= |a_1| >= ...` over the first `count` weights (the whole list
    /// for explicit weights).
    pub fn is_monotone_decreasing(&self, count: usize) -> bool {
        match self {
            Self::List(v) => v
                .windows(2)
                .take(count.saturating_sub(1))
                .all(|w| w[0].norm() >= w[1].norm()),
            _ => true,
        }
    }

    /// True for families whose shift is quasinilpotent.
    pub fn is_quasinilpotent_family(&self) -> bool {
        matches!(self, Self::Harmonic | Self::Geometric(_))
    }
}

impl fmt::Display for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::List(v) => {
                let parts: Vec<String> = v
                    .iter()
                    .map(|a| {
                        if a.im == 0.0 {
                            a.re.to_string()
                        } else {
                            a.to_string()
                        }
                    })
                    .collect();
                write!(f, "list:{}", parts.join(","))
            }
            Self::Harmonic => f.write_str("harmonic"),
            Self::Geometric(r) => write!(f, "geometric:{r}"),
            Self::Ones => f.write_str("ones"),
        }
    }
}

impl FromStr for WeightSequence {
    type Err = Error;

    /// `list:a0,a1,...` | `harmonic` | `geometric:r` | `ones`
    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let number = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::input(format!("weights: {s:?} is not a finite number")))
        };
        match spec.split_once(':') {
            None if spec == "harmonic" => Ok(Self::Harmonic),
            None if spec == "ones" => Ok(Self::Ones),
            Some(("geometric", r)) => Self::geometric(number(r)?),
            Some(("list", items)) => {
                let values = items
                    .split(',')
                    .map(|s| number(s).map(|x| C64::new(x, 0.0)))
                    .collect::<Result<Vec<_>>>()?;
                Self::list(values)
            }
            _ => Err(Error::input(format!(
                "weights: unknown spec {spec:?} (expected list:..., harmonic, geometric:r or ones)"
            ))),
        }
    }
}

/// `N x N` truncation of a weighted shift.
#[derive(Clone, Debug)]
pub struct ShiftTruncation {
    weights: WeightSequence,
    subdiagonal: Vec<C64>,
    matrix: ComplexMatrix,
}

pub fn build_shift(weights: WeightSequence, n: usize) -> Result<ShiftTruncation> {
    if n < 2 {
        return Err(Error::input(format!(
            "shift truncation needs N >= 2, got {n}"
        )));
    }
    let subdiagonal = weights.values(n - 1)?;
    let mut data = vec![C64::default(); n * n];
    for (j, &a) in subdiagonal.iter().enumerate() {
        data[(j + 1) * n + j] = a;
    }
    let matrix = ComplexMatrix::lower_triangular(n, data)?;
    Ok(ShiftTruncation {
        weights,
        subdiagonal,
        matrix,
    })
}

impl ShiftTruncation {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn weights(&self) -> &WeightSequence {
        &self.weights
    }

    /// `a_0, ..., a_{N-2}`.
    pub fn subdiagonal(&self) -> &[C64] {
        &self.subdiagonal
    }

    /// `T^1, ..., T^d`.
    pub fn powers(&self, d: usize) -> Vec<ComplexMatrix> {
        self.matrix.powers(d)
    }

    /// All nonzero powers `T^1, ..., T^{N-1}`.
    pub fn all_powers(&self) -> Vec<ComplexMatrix> {
        self.powers(self.dim() - 1)
    }

    /// `sum_j coeffs[j-1] T^j`.
    pub fn polynomial(&self, coeffs: &[C64]) -> ComplexMatrix {
        let powers = self.powers(coeffs.len());
        let terms: Vec<(C64, &ComplexMatrix)> = coeffs.iter().copied().zip(powers.iter()).collect();
        ComplexMatrix::linear_combination(self.dim(), &terms)
    }

    /// Operator Fourier series of `s` over `k = 1..N-1` on the `2N`-node grid.
    pub fn series(&self, s: &ComplexMatrix) -> Result<FourierSeries> {
        self.check_dim(s)?;
        fourier_coefficients(s, &CircleGrid::for_dim(self.dim()), &self.all_powers())
    }

    /// `M / |a_0|`, when the equivalence hypotheses hold.
    pub fn equivalence_constant(&self) -> Option<f64> {
        let m2 = self.weights.l2_sum_squared()?;
        Some(m2.sqrt() / self.subdiagonal[0].norm())
    }

    fn check_dim(&self, s: &ComplexMatrix) -> Result<()> {
        if s.dim() != self.dim() {
            return Err(Error::input(format!(
                "operator has dimension {}, shift has {}",
                s.dim(),
                self.dim()
            )));
        }
        Ok(())
    }
}

/// `||S e_0||_2`.
pub fn vector_norm_at_e0(s: &ComplexMatrix) -> f64 {
    first_column_norm(s)
}

/// Samples random polynomials `S = sum_{j<N} c_j T^j` and checks
/// `||S e_0|| <= ||S|| <= (M/|a_0|) ||S e_0||`.
pub fn norm_equivalence_report(
    t: &ShiftTruncation,
    trials: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    let n = t.dim();
    if !t.weights.is_monotone_decreasing(n - 1) {
        return Err(Error::Refusal("weights are not monotone decreasing".into()));
    }
    let bound = t
        .equivalence_constant()
        .ok_or_else(|| Error::Refusal("weights are not square summable (M is infinite)".into()))?;
    if trials == 0 {
        return Err(Error::input("trials must be positive"));
    }
    let powers = t.all_powers();
    let mut report = ExperimentReport::new("equivalence");
    report
        .param("weights", &t.weights)
        .param("dim", n)
        .param("trials", trials)
        .param("seed", seed);
    report.row("bound", bound);
    let (mut upper_ok, mut lower_ok) = (true, true);
    let mut max_ratio = 0.0f64;
    for trial in 0..trials {
        let coeffs = complex_gaussians(&mut trial_rng(seed, trial as u64), n - 1);
        let terms: Vec<(C64, &ComplexMatrix)> = coeffs.into_iter().zip(powers.iter()).collect();
        let s = ComplexMatrix::linear_combination(n, &terms);
        let norm = norm2(&s)?;
        let at_e0 = vector_norm_at_e0(&s);
        let ratio = norm / at_e0;
        upper_ok &= norm <= bound * at_e0 + EQUIVALENCE_SLACK;
        lower_ok &= at_e0 <= norm * (1.0 + 1e-12);
        max_ratio = max_ratio.max(ratio);
        report.row(format!("ratio_{trial}"), ratio);
    }
    report.row("max_ratio", max_ratio);
    report.flag("ratio_within_bound", upper_ok);
    report.flag("e0_norm_below_norm", lower_ok);
    Ok(report)
}

/// `p_n(T) = T + ... + T^n` on unit weights against the unit vector
/// `v_n = (e_0 + ... + e_{n-1})/sqrt(n)`.
pub fn inequivalence_demo(n: usize, dim: usize) -> Result<ExperimentReport> {
    if n == 0 {
        return Err(Error::input("n must be positive"));
    }
    if dim < 2 * n {
        return Err(Error::input(format!(
            "truncation dimension {dim} is below 2n = {}",
            2 * n
        )));
    }
    let t = build_shift(WeightSequence::Ones, dim)?;
    let p = t.polynomial(&vec![C64::new(1.0, 0.0); n]);
    let mut v = vec![C64::default(); dim];
    let scale = 1.0 / (n as f64).sqrt();
    v[..n].iter_mut().for_each(|z| *z = C64::new(scale, 0.0));
    let pv = p
        .matvec(&v)
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let pe0 = vector_norm_at_e0(&p);
    let norm = norm2(&p)?;
    let nf = n as f64;
    let closed_form = (2.0 * nf * nf + 1.0).sqrt() / 3f64.sqrt();
    let ratio = norm / pe0;
    let lower = (2.0f64 / 3.0).sqrt() * nf.sqrt();

    let mut report = ExperimentReport::new("inequivalence");
    report.param("n", n).param("dim", dim);
    report
        .row("p_v_norm", pv)
        .row("p_v_closed_form", closed_form)
        .row("p_e0_norm", pe0)
        .row("p_norm", norm)
        .row("ratio", ratio)
        .row("ratio_lower_bound", lower);
    report
        .flag(
            "p_v_closed_form",
            (pv - closed_form).abs() <= CLOSED_FORM_TOLERANCE,
        )
        .flag(
            "p_e0_closed_form",
            (pe0 - nf.sqrt()).abs() <= CLOSED_FORM_TOLERANCE,
        )
        .flag("ratio_above_lower_bound", ratio >= lower);
    Ok(report)
}

/// `||S|| = ||S e_0|| = 1`, the sufficient condition for an extreme point of
/// the unit ball.
pub fn extreme_point_check(s: &ComplexMatrix) -> Result<bool> {
    let norm = norm2(s)?;
    Ok((norm - 1.0).abs() < EXTREME_TOLERANCE
        && (vector_norm_at_e0(s) - 1.0).abs() < EXTREME_TOLERANCE)
}

/// `beta_n = sup_{k <= k_max} |a_{k+1} ... a_{k+n}|^{1/n}`, accumulated in logs.
pub fn quasinilpotence_profile(
    weights: &WeightSequence,
    n_max: usize,
    k_max: usize,
) -> Result<ExperimentReport> {
    if n_max == 0 {
        return Err(Error::input("n_max must be positive"));
    }
    let count = k_max + n_max + 1;
    if let WeightSequence::List(_) = weights {
        weights.values(count)?;
    }
    let logs: Vec<f64> = (0..count)
        .map(|i| weights.log_weight(i).expect("materialized above"))
        .collect();
    let mut betas = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut window: f64 = logs[1..=n].iter().sum();
        let mut best = window;
        for k in 1..=k_max {
            window += logs[k + n] - logs[k];
            best = best.max(window);
        }
        betas.push((best / n as f64).exp());
    }

    let mut report = ExperimentReport::new("quasinilpotence");
    report
        .param("weights", weights)
        .param("n_max", n_max)
        .param("k_max", k_max);
    for (i, b) in betas.iter().enumerate() {
        report.row(format!("beta_{}", i + 1), *b);
    }
    if weights.is_quasinilpotent_family() {
        report.flag("beta_decreasing", betas.windows(2).all(|w| w[1] < w[0]));
    } else if *weights == WeightSequence::Ones {
        report.flag("beta_constant_one", betas.iter().all(|&b| b == 1.0));
    }
    Ok(report)
}

/// Exponent `n` of the gauge-invariant ideal `<T^n>` containing `S`: the
/// lowest index with `|S^(k)| > tau`.
pub fn ideal_generator_index(s: &ComplexMatrix, t: &ShiftTruncation) -> Result<usize> {
    let series = t.series(s)?;
    series
        .lowest_index()
        .ok_or(Error::ZeroElement(series.threshold()))
}

/// Certifies `<S> = <T^k>` by the finite Neumann series
/// `sum_{m=0}^N S R^m = T^k` with `R = I - sum_j S^(k+j) T^j`.
pub fn neumann_factor_check(
    s: &ComplexMatrix,
    k: usize,
    t: &ShiftTruncation,
) -> Result<ExperimentReport> {
    let n = t.dim();
    if k == 0 || k >= n {
        return Err(Error::input(format!("k = {k} outside 1..{}", n - 1)));
    }
    let series = t.series(s)?;
    if !series.is_nonzero(k) {
        return Err(Error::input(format!(
            "coefficient {k} is at or below the threshold {:e}",
            series.threshold()
        )));
    }
    if let Some(low) = series.lowest_index().filter(|&low| low < k) {
        return Err(Error::input(format!("coefficient {low} < {k} is nonzero")));
    }
    let lead = series.coefficient(k);
    let s_unit = s.scale(lead.inv());
    let powers = t.all_powers();
    let mut terms: Vec<(C64, &ComplexMatrix)> = Vec::new();
    for j in 1..(n - k) {
        terms.push((-series.coefficient(k + j) / lead, &powers[j - 1]));
    }
    let r = ComplexMatrix::linear_combination(n, &terms);

    let mut term = s_unit.clone();
    let mut sum = s_unit;
    for _ in 1..=n {
        term = term.matmul(&r);
        if term.is_zero() {
            break;
        }
        sum = sum.add(&term);
    }
    let target = &powers[k - 1];
    let error = sum.max_abs_diff(target);

    let mut report = ExperimentReport::new("neumann");
    report
        .param("k", k)
        .param("dim", n)
        .param("weights", &t.weights);
    report
        .row("leading_coefficient_re", lead.re)
        .row("leading_coefficient_im", lead.im)
        .row("max_entry_error", error);
    report.flag("neumann_sum_equals_t_k", error <= NEUMANN_TOLERANCE);
    Ok(report)
}

/// The subspace `span{e_k, ..., e_{N-1}}` attached to the ideal `<T^k>`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantSubspace {
    pub first_index: usize,
    pub ambient_dim: usize,
    /// Standard basis indices spanning the subspace.
    pub basis: Vec<usize>,
    /// `max |(I - P) T P|`.
    pub invariance_residual: f64,
    /// Whether `{T^j e_0 : k <= j < N}` spans the subspace.
    pub spanned_by_ideal: bool,
}

impl InvariantSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

pub fn invariant_subspace_of_ideal(k: usize, t: &ShiftTruncation) -> Result<InvariantSubspace> {
    let n = t.dim();
    if k == 0 || k >= n {
        return Err(Error::input(format!("k = {k} outside 1..{}", n - 1)));
    }
    let basis: Vec<usize> = (k..n).collect();
    let inside = |i: usize| i >= k;
    let m = t.matrix();
    let mut residual = 0.0f64;
    for j in (0..n).filter(|&j| inside(j)) {
        for i in (0..n).filter(|&i| !inside(i)) {
            residual = residual.max(m.get(i, j).norm());
        }
    }
    let powers = t.all_powers();
    let spanned_by_ideal = (k..n).all(|j| {
        let image = powers[j - 1].column(0);
        image.iter().enumerate().all(|(i, z)| {
            if i == j {
                *z != C64::default()
            } else {
                *z == C64::default()
            }
        })
    });
    Ok(InvariantSubspace {
        first_index: k,
        ambient_dim: n,
        basis,
        invariance_residual: residual,
        spanned_by_ideal,
    })
}

/// Checks `lowest_index(RS) = j0 + k0` with leading coefficient
/// `R^(j0) S^(k0)`: the algebra has no zero divisors.
pub fn lowest_index_of_product(
    r: &ComplexMatrix,
    s: &ComplexMatrix,
    t: &ShiftTruncation,
) -> Result<ExperimentReport> {
    let n = t.dim();
    let rs = t.series(r)?;
    let ss = t.series(s)?;
    let j0 = rs
        .lowest_index()
        .ok_or(Error::ZeroElement(rs.threshold()))?;
    let k0 = ss
        .lowest_index()
        .ok_or(Error::ZeroElement(ss.threshold()))?;
    if j0 + k0 >= n {
        return Err(Error::Refusal(format!(
            "j0 + k0 = {} >= N = {n}: the truncation annihilates the product",
            j0 + k0
        )));
    }
    let product = r.matmul(s);
    let ps = t.series(&product)?;
    let expected = rs.coefficient(j0) * ss.coefficient(k0);
    let got = ps.coefficient(j0 + k0);
    let index = ps.lowest_index();
    let rel = (got - expected).norm() / expected.norm();

    let mut report = ExperimentReport::new("product-index");
    report.param("dim", n);
    report
        .row("j0", j0 as f64)
        .row("k0", k0 as f64)
        .row("product_index", index.map_or(f64::NAN, |i| i as f64))
        .row("leading_relative_error", rel);
    report
        .flag("index_additive", index == Some(j0 + k0))
        .flag("leading_coefficient", rel <= PRODUCT_TOLERANCE);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn parse_weight_specs() {
        assert_eq!(
            "harmonic".parse::<WeightSequence>().unwrap(),
            WeightSequence::Harmonic
        );
        assert_eq!(
            "ones".parse::<WeightSequence>().unwrap(),
            WeightSequence::Ones
        );
        assert_eq!(
            "geometric:0.5".parse::<WeightSequence>().unwrap(),
            WeightSequence::Geometric(0.5)
        );
        assert_eq!(
            "list:1,0.5,2".parse::<WeightSequence>().unwrap(),
            WeightSequence::List(vec![c(1.0), c(0.5), c(2.0)])
        );
        for bad in [
            "geometric:1",
            "geometric:-0.1",
            "list:1,0",
            "list:",
            "foo",
            "list:1,x",
        ] {
            assert!(bad.parse::<WeightSequence>().is_err(), "{bad}");
        }
        let w: WeightSequence = "list:1,0.5".parse().unwrap();
        assert_eq!(w.to_string().parse::<WeightSequence>().unwrap(), w);
    }

    #[test]
    fn shift_matrices() {
        let t = build_shift(WeightSequence::Ones, 3).unwrap();
        let m = t.matrix();
        assert_eq!(m.get(1, 0), c(1.0));
        assert_eq!(m.get(2, 1), c(1.0));
        assert_eq!(m.max_abs(), 1.0);
        assert!((norm2(m).unwrap() - 1.0).abs() < 1e-14);

        let h = build_shift(WeightSequence::Harmonic, 4).unwrap();
        assert_eq!(h.subdiagonal(), &[c(1.0), c(0.5), c(1.0 / 3.0)]);
        let g = build_shift(WeightSequence::Geometric(0.5), 4).unwrap();
        assert_eq!(g.subdiagonal(), &[c(1.0), c(0.5), c(0.25)]);
        assert!(g.matrix().pow(4).is_zero());
    }

    #[test]
    fn short_list_and_small_dim_rejected() {
        let w = WeightSequence::list(vec![c(1.0)]).unwrap();
        assert!(matches!(build_shift(w, 3), Err(Error::Input(_))));
        assert!(matches!(
            build_shift(WeightSequence::Ones, 1),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn e0_norms() {
        let t = build_shift(WeightSequence::Harmonic, 6).unwrap();
        assert_eq!(vector_norm_at_e0(t.matrix()), 1.0);
        assert_eq!(vector_norm_at_e0(&t.matrix().pow(2)), 0.5);
        assert_eq!(vector_norm_at_e0(&ComplexMatrix::zeros(6)), 0.0);
    }

    #[test]
    fn equivalence_constants() {
        let h = build_shift(WeightSequence::Harmonic, 8).unwrap();
        assert!(
            (h.equivalence_constant().unwrap() - std::f64::consts::PI / 6f64.sqrt()).abs() < 1e-15
        );
        let g = build_shift(WeightSequence::Geometric(0.5), 8).unwrap();
        assert!((g.equivalence_constant().unwrap() - 2.0 / 3f64.sqrt()).abs() < 1e-15);
        let o = build_shift(WeightSequence::Ones, 8).unwrap();
        assert!(matches!(
            norm_equivalence_report(&o, 3, 1),
            Err(Error::Refusal(_))
        ));
        let up = build_shift(
            WeightSequence::list(vec![c(0.5), c(1.0), c(1.0)]).unwrap(),
            4,
        )
        .unwrap();
        assert!(matches!(
            norm_equivalence_report(&up, 3, 1),
            Err(Error::Refusal(_))
        ));
    }

    #[test]
    fn equivalence_report_passes() {
        let t = build_shift(WeightSequence::Harmonic, 16).unwrap();
        let r = norm_equivalence_report(&t, 10, 3).unwrap();
        assert!(r.all_pass(), "{:?}", r.failed_flags());
        assert!(r.value("max_ratio").unwrap() <= r.value("bound").unwrap());
    }

    #[test]
    fn normalized_powers_are_extreme() {
        let t = build_shift(WeightSequence::Harmonic, 10).unwrap();
        for k in 1..4 {
            let tk = t.matrix().pow(k);
            let normalized = tk.scale(c(1.0 / norm2(&tk).unwrap()));
            assert!(extreme_point_check(&normalized).unwrap());
        }
        let half = t.matrix().scale(c(0.5));
        assert!(!extreme_point_check(&half).unwrap());
    }

    #[test]
    fn inequivalence_small_cases() {
        let r = inequivalence_demo(3, 6).unwrap();
        assert!((r.value("p_v_norm").unwrap() - 19f64.sqrt() / 3f64.sqrt()).abs() < 1e-12);
        assert!(r.all_pass());
        let r1 = inequivalence_demo(1, 2).unwrap();
        assert!((r1.value("p_v_norm").unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(inequivalence_demo(3, 5), Err(Error::Input(_))));
    }

    #[test]
    fn quasinilpotence_profiles() {
        let g = quasinilpotence_profile(&WeightSequence::Geometric(0.5), 4, 16).unwrap();
        assert!((g.value("beta_3").unwrap() - 0.25).abs() < 1e-15);
        assert!(g.all_pass());
        let o = quasinilpotence_profile(&WeightSequence::Ones, 5, 16).unwrap();
        assert_eq!(o.value("beta_5"), Some(1.0));
        assert!(o.all_pass());
        let h = quasinilpotence_profile(&WeightSequence::Harmonic, 8, 64).unwrap();
        assert!(h.value("beta_4").unwrap() < h.value("beta_1").unwrap());
        assert!(h.all_pass());
    }

    #[test]
    fn generator_indices() {
        let t = build_shift(WeightSequence::Harmonic, 8).unwrap();
        let p = t.powers(5);
        let s = p[2].add(&p[4].scale(c(7.0)));
        assert_eq!(ideal_generator_index(&s, &t).unwrap(), 3);
        assert_eq!(ideal_generator_index(&p[0], &t).unwrap(), 1);
        let tiny = p[0].scale(c(1e-15)).add(&p[1]);
        assert_eq!(ideal_generator_index(&tiny, &t).unwrap(), 2);
        assert!(matches!(
            ideal_generator_index(&ComplexMatrix::zeros(8), &t),
            Err(Error::ZeroElement(_))
        ));
    }

    #[test]
    fn neumann_telescopes() {
        let t = build_shift(WeightSequence::Harmonic, 12).unwrap();
        let p = t.powers(3);
        let r = neumann_factor_check(&p[1].add(&p[2]), 2, &t).unwrap();
        assert!(r.all_pass(), "{}", r.value("max_entry_error").unwrap());
        let r = neumann_factor_check(&p[1], 2, &t).unwrap();
        assert!(r.value("max_entry_error").unwrap() < 1e-15);
        assert!(matches!(
            neumann_factor_check(&p[1], 1, &t),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn neumann_harmonic_32() {
        let t = build_shift(WeightSequence::Harmonic, 32).unwrap();
        let s = t.polynomial(&[c(0.0), c(0.0), c(1.0), c(-2.0), c(0.0), c(1.0)]);
        let r = neumann_factor_check(&s, 3, &t).unwrap();
        assert!(r.all_pass(), "{}", r.value("max_entry_error").unwrap());
    }

    #[test]
    fn subspaces() {
        let t = build_shift(WeightSequence::Harmonic, 8).unwrap();
        assert_eq!(invariant_subspace_of_ideal(1, &t).unwrap().dim(), 7);
        assert_eq!(invariant_subspace_of_ideal(7, &t).unwrap().basis, vec![7]);
        let s = invariant_subspace_of_ideal(2, &t).unwrap();
        assert_eq!(s.dim(), 6);
        assert!(s.invariance_residual < 1e-12);
        assert!(s.spanned_by_ideal);
        assert!(invariant_subspace_of_ideal(8, &t).is_err());
        assert!(invariant_subspace_of_ideal(0, &t).is_err());
    }

    #[test]
    fn product_indices() {
        let t = build_shift(WeightSequence::Harmonic, 10).unwrap();
        let p = t.powers(9);
        let r = lowest_index_of_product(&p[0], &p[0], &t).unwrap();
        assert_eq!(r.value("product_index"), Some(2.0));
        let r = lowest_index_of_product(&p[0].scale(c(2.0)).add(&p[2]), &p[1].scale(c(5.0)), &t)
            .unwrap();
        assert_eq!(r.value("product_index"), Some(3.0));
        assert!(r.all_pass());
        assert!(matches!(
            lowest_index_of_product(&p[4], &p[4], &t),
            Err(Error::Refusal(_))
        ));
    }
}
