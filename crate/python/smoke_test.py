"""Quick check that the opalg extension imports and agrees with itself."""

import math

import opalg


def main():
    eta0, norm = opalg.v2_exact()
    assert abs(eta0 - 1.8751040687119611) < 1e-12, eta0
    assert abs(norm - 0.28441287185495545) < 1e-12, norm

    v = opalg.volterra_matrix(64)
    assert v.structure == "lower_toeplitz"
    s = opalg.operator_norm(v)
    assert abs(s - opalg.svd_oracle(v)) < 1e-10
    assert abs(s - 2 / math.pi) < 1e-3

    t = opalg.WeightedShift("harmonic", 8)
    p = t.polynomial([2.0, 0.0, 1j])
    series = dict(t.series(p))
    assert abs(series[1] - 2.0) < 1e-12 and abs(series[3] - 1j) < 1e-12
    g = opalg.gauge_conjugate(p, 1j)
    assert abs(opalg.operator_norm(g) - opalg.operator_norm(p)) < 1e-10

    f = opalg.Kernel("const:1", 32)
    half = f.truncated_below(0.5)
    assert opalg.operator_norm(half.operator() ** 2) == 0.0

    report = opalg.run_experiment("inequivalence")
    assert report.all_pass()
    assert report.emit("csv").startswith("label,value\nseed,")
    try:
        opalg.run_experiment("no-such-experiment")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown experiment accepted")
    print("smoke test passed")


if __name__ == "__main__":
    main()
