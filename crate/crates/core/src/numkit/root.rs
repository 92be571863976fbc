use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 400;

/// Outcome of a bracketing root solve. `bracket` is the interval supplied by
/// the caller; `final_bracket` is the sign-change interval at termination.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootSolve {
    pub bracket: (f64, f64),
    pub final_bracket: (f64, f64),
    pub tolerance: f64,
    pub root: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Bracketing root finder: Illinois-modified regula falsi, falling back to a
/// bisection step whenever the bracket fails to halve across two steps.
/// Terminates once the sign-change interval is no wider than `tol`.
pub fn find_root(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<RootSolve> {
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::input(format!("invalid bracket [{lo}, {hi}]")));
    }
    let resolution = f64::EPSILON * lo.abs().max(hi.abs());
    if tol.is_nan() || tol <= 0.0 || tol < resolution {
        return Err(Error::input(format!(
            "tolerance {tol:e} is below the machine resolution {resolution:e} of the bracket"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if !fa.is_finite() || !fb.is_finite() {
        return Err(Error::input("function is not finite at the bracket ends"));
    }
    let done = |root: f64, residual: f64, fin: (f64, f64), it: usize| RootSolve {
        bracket: (lo, hi),
        final_bracket: fin,
        tolerance: tol,
        root,
        residual,
        iterations: it,
    };
    if fa == 0.0 {
        return Ok(done(a, 0.0, (a, a), 0));
    }
    if fb == 0.0 {
        return Ok(done(b, 0.0, (b, b), 0));
    }
    if fa.signum() == fb.signum() {
        return Err(Error::input(format!(
            "no sign change on [{lo}, {hi}]: f(lo) = {fa:e}, f(hi) = {fb:e}"
        )));
    }

    // which end was retained last step: -1 = a, +1 = b
    let mut side = 0i8;
    let mut width_two_back = b - a;
    let mut width_one_back = b - a;
    for it in 1..=MAX_ITERATIONS {
        if b - a <= tol {
            let (root, residual) = if fa.abs() <= fb.abs() {
                (a, fa)
            } else {
                (b, fb)
            };
            return Ok(done(root, residual, (a, b), it - 1));
        }
        let mid = 0.5 * (a + b);
        let secant = (a * fb - b * fa) / (fb - fa);
        let use_bisection = !(secant > a && secant < b) || (b - a) > 0.5 * width_two_back;
        let x = if use_bisection { mid } else { secant };
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::Numeric(format!("function is not finite at {x}")));
        }
        if fx == 0.0 {
            return Ok(done(x, 0.0, (x, x), it));
        }
        width_two_back = width_one_back;
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            if side == 1 && !use_bisection {
                fb *= 0.5;
            }
            side = 1;
        } else {
            b = x;
            fb = fx;
            if side == -1 && !use_bisection {
                fa *= 0.5;
            }
            side = -1;
        }
        width_one_back = b - a;
    }
    Err(Error::NonConvergence {
        what: "bracketing root solve",
        iterations: MAX_ITERATIONS,
        last: 0.5 * (a + b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_zero() {
        let r = find_root(f64::cos, 1.0, 2.0, 1e-12).unwrap();
        assert!((r.root - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!(r.final_bracket.1 - r.final_bracket.0 <= 1e-12);
    }

    #[test]
    fn odd_linear() {
        let r = find_root(|x| x, -1.0, 1.0, 1e-12).unwrap();
        assert!(r.root.abs() <= 1e-12);
        assert!(r.bracket.0 < r.root && r.root < r.bracket.1);
    }

    #[test]
    fn no_sign_change() {
        assert!(matches!(
            find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-10),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn tolerance_below_resolution() {
        assert!(matches!(
            find_root(|x| x - 1e6, 0.0, 2e6, 1e-12),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn pathological_flat_side_still_terminates() {
        // regula falsi stalls on one side here; the bisection guard must kick in
        let r = find_root(|x: f64| x.powi(9) - 1e-3, 0.0, 4.0, 1e-13).unwrap();
        assert!((r.root - 1e-3f64.powf(1.0 / 9.0)).abs() < 1e-12);
    }
}
