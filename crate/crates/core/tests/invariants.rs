use opalg_core::gauge::{fejer_sum, fourier_coefficients, gauge_conjugate};
use opalg_core::numkit::{norm2, svd_oracle, CircleGrid, ComplexMatrix, C64};
use opalg_core::report::ExperimentReport;
use opalg_core::shift::{build_shift, inequivalence_demo, vector_norm_at_e0, WeightSequence};
use opalg_core::volterra::{build_vf, convolve, KernelSpec, SampledKernel, SamplingMode};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = C64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| C64::new(re, im))
}

fn square(max_dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    (2..=max_dim).prop_flat_map(|n| {
        prop::collection::vec(complex(), n * n)
            .prop_map(move |d| ComplexMatrix::from_rows(n, d).unwrap())
    })
}

fn weights() -> impl Strategy<Value = WeightSequence> {
    prop_oneof![
        Just(WeightSequence::Harmonic),
        Just(WeightSequence::Ones),
        (0.2f64..0.95).prop_map(|r| WeightSequence::geometric(r).unwrap()),
    ]
}

fn step_kernel() -> impl Strategy<Value = KernelSpec> {
    (
        prop::collection::vec(0.0f64..1.0, 2..7),
        prop::collection::vec(-3.0f64..3.0, 6),
    )
        .prop_map(|(mut cuts, values)| {
            cuts.sort_by(f64::total_cmp);
            KernelSpec::Step(
                cuts.windows(2)
                    .zip(values)
                    .step_by(2)
                    .filter(|(w, _)| w[1] > w[0])
                    .map(|(w, v)| (w[0], w[1], v))
                    .collect(),
            )
        })
        .prop_filter(
            "at least one piece",
            |k| matches!(k, KernelSpec::Step(p) if !p.is_empty()),
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn norm_matches_svd(a in square(24)) {
        let fast = norm2(&a).unwrap();
        let exact = svd_oracle(&a).unwrap();
        prop_assert!((fast - exact).abs() <= 1e-9 * exact.max(1.0));
    }

    #[test]
    fn norm_is_absolutely_homogeneous(a in square(16), alpha in complex()) {
        let lhs = norm2(&a.scale(alpha)).unwrap();
        let rhs = alpha.norm() * norm2(&a).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0));
    }

    #[test]
    fn compressions_do_not_increase_norm(a in square(20), k in 1usize..20) {
        let full = norm2(&a).unwrap();
        let k = k.min(a.dim());
        prop_assert!(norm2(&a.top_left(k)).unwrap() <= full + 1e-10);
        for j in 0..a.dim() {
            prop_assert!(a.column_norm(j) <= full * (1.0 + 1e-12));
        }
    }

    #[test]
    fn gauge_action_is_multiplicative(a in square(8), b in square(8), theta in 0.0f64..6.3) {
        prop_assume!(a.dim() == b.dim());
        let lambda = C64::from_polar(1.0, theta);
        let lhs = gauge_conjugate(&a.matmul(&b), lambda).unwrap();
        let rhs = gauge_conjugate(&a, lambda).unwrap().matmul(&gauge_conjugate(&b, lambda).unwrap());
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * (1.0 + lhs.max_abs()));
    }

    #[test]
    fn gauge_action_is_isometric_on_shifts(
        w in weights(),
        coeffs in prop::collection::vec(complex(), 1..12),
        theta in 0.0f64..6.3,
    ) {
        let t = build_shift(w, 12).unwrap();
        let s = t.polynomial(&coeffs);
        let g = gauge_conjugate(&s, C64::from_polar(1.0, theta)).unwrap();
        let base = norm2(&s).unwrap();
        prop_assert!((norm2(&g).unwrap() - base).abs() <= 1e-10 * base.max(1.0));
    }

    #[test]
    fn coefficients_are_linear_and_partial_sums_reproduce(
        w in weights(),
        p in prop::collection::vec(complex(), 11),
        q in prop::collection::vec(complex(), 11),
        alpha in complex(),
    ) {
        let t = build_shift(w, 12).unwrap();
        let (s, r) = (t.polynomial(&p), t.polynomial(&q));
        let combo = s.scale(alpha).add(&r);
        prop_assume!(!combo.is_zero() && !s.is_zero() && !r.is_zero());
        let (ss, rs, cs) = (t.series(&s).unwrap(), t.series(&r).unwrap(), t.series(&combo).unwrap());
        for k in 1..12 {
            let want = alpha * ss.coefficient(k) + rs.coefficient(k);
            prop_assert!((cs.coefficient(k) - want).norm() <= 1e-10 * (1.0 + want.norm()));
        }
        let back = ss.partial_sum(&t.all_powers()).unwrap();
        prop_assert!(back.max_abs_diff(&s) <= 1e-10 * (1.0 + s.max_abs()));
    }

    #[test]
    fn fejer_error_bounded(
        coeffs in prop::collection::vec(complex(), 1..6),
        order in 1usize..40,
    ) {
        prop_assume!(coeffs.iter().any(|c| c.norm() > 1e-3));
        let t = build_shift(WeightSequence::Harmonic, 10).unwrap();
        let powers = t.all_powers();
        let s = t.polynomial(&coeffs);
        let series = fourier_coefficients(&s, &CircleGrid::for_dim(10), &powers).unwrap();
        let d = coeffs.len() as f64;
        let weight: f64 = coeffs.iter().enumerate().map(|(j, c)| c.norm() * norm2(&powers[j]).unwrap()).sum();
        let err = norm2(&s.sub(&fejer_sum(&series, order, &powers).unwrap())).unwrap();
        prop_assert!(err <= d / order as f64 * weight + 1e-10);
    }

    #[test]
    fn e0_norm_is_a_lower_bound(w in weights(), coeffs in prop::collection::vec(complex(), 1..15)) {
        let t = build_shift(w, 16).unwrap();
        let s = t.polynomial(&coeffs);
        prop_assert!(vector_norm_at_e0(&s) <= norm2(&s).unwrap() * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn unit_weight_closed_form(n in 1usize..24) {
        let r = inequivalence_demo(n, 2 * n).unwrap();
        let want = ((2 * n * n + 1) as f64 / 3.0).sqrt();
        prop_assert!((r.value("p_v_norm").unwrap() - want).abs() <= 1e-12);
    }

    #[test]
    fn l1_dominates_operator_norm(spec in step_kernel(), n in 8usize..96) {
        let f = SampledKernel::new(&spec, n, SamplingMode::Exact).unwrap();
        let sigma = norm2(&build_vf(&f).unwrap()).unwrap();
        prop_assert!(sigma <= f.l1_cells() + 1e-10);
        if !f.is_zero() {
            prop_assert!(sigma > 0.0);
        }
    }

    #[test]
    fn supports_add_under_convolution(a in step_kernel(), b in step_kernel()) {
        let n = 64;
        let f = SampledKernel::new(&a, n, SamplingMode::Exact).unwrap();
        let g = SampledKernel::new(&b, n, SamplingMode::Exact).unwrap();
        let fg = convolve(&f, &g).unwrap();
        prop_assert!(fg.support_start() >= f.support_start() + g.support_start() - 1e-12 || fg.is_zero());
        let gf = convolve(&g, &f).unwrap();
        for (x, y) in fg.cells().iter().zip(gf.cells()) {
            prop_assert!((x - y).norm() <= 1e-14 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn report_round_trips(values in prop::collection::vec(any::<f64>(), 0..20)) {
        let mut r = ExperimentReport::new("roundtrip");
        for (i, v) in values.iter().enumerate() {
            r.row(format!("v{i}"), *v);
        }
        let back = ExperimentReport::from_json(&r.to_json()).unwrap();
        let csv = ExperimentReport::rows_from_csv(&r.to_csv()).unwrap();
        for ((_, v), ((_, j), (_, c))) in r.rows.iter().zip(back.rows.iter().zip(&csv)) {
            prop_assert!(v.to_bits() == j.to_bits() || (v.is_nan() && j.is_nan()));
            prop_assert!(v.to_bits() == c.to_bits() || (v.is_nan() && c.is_nan()));
        }
    }
}
