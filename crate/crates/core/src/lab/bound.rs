use crate::error::{Error, Result};

use super::normal::normal_cdf;

/// Upper bound on the probability that the larger side of a component holds
/// the majority color after `k` merges among `n` balls.
pub fn predict_bound(k: u64, n: u64) -> f64 {
    predict_bound_fraction(k as f64 / n as f64)
}

/// [`predict_bound`] as a function of `x = k / n`.
pub fn predict_bound_fraction(x: f64) -> f64 {
    let t = 1.5 * x;
    if t >= 1.0 {
        return 1.0;
    }
    normal_cdf((t / (1.0 - t)).sqrt())
}

/// `(1/6) (1 - predict(x))`, which is 0 at `x = 2/3`.
pub fn bound_integrand(x: f64) -> f64 {
    (1.0 - predict_bound_fraction(x)) / 6.0
}

/// `1 + ∫_0^{2/3} bound_integrand(x) dx` by adaptive Simpson.
pub fn lower_bound_constant(tolerance: f64) -> Result<f64> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidParams(format!("tolerance {tolerance} must be positive")));
    }
    let (a, b) = (0.0, 2.0 / 3.0);
    let integral = adaptive_simpson(bound_integrand, a, b, tolerance * 0.1, 60)?;
    Ok(1.0 + integral)
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let mut worst = 0.0_f64;
    let value = recurse(&f, a, b, fa, fm, fb, whole, tol, max_depth, &mut worst);
    if worst > tol {
        return Err(Error::Convergence { tolerance: tol, estimate: worst });
    }
    Ok(value)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    worst: &mut f64,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    if depth == 0 {
        *worst += delta.abs() / 15.0;
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, worst)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predict_examples() {
        assert_eq!(predict_bound(0, 100), 0.5);
        assert_eq!(predict_bound(67, 100), 1.0);
        assert!(predict_bound(66, 100) > 0.99);
        let mut last = 0.0;
        for k in 0..=700 {
            let p = predict_bound(k, 1000);
            assert!(p >= last);
            last = p;
        }
    }

    #[test]
    fn integrand_endpoints() {
        assert!((bound_integrand(0.0) - 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(bound_integrand(2.0 / 3.0), 0.0);
    }

    #[test]
    fn constant_value() {
        let c = lower_bound_constant(1e-6).unwrap();
        assert!((c - 1.0191289).abs() < 1e-5, "{c}");
        // tighter tolerance agrees
        let fine = lower_bound_constant(1e-10).unwrap();
        assert!((c - fine).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(lower_bound_constant(0.0).is_err());
        assert!(lower_bound_constant(f64::NAN).is_err());
    }

    #[test]
    fn simpson_reports_non_convergence() {
        let r = adaptive_simpson(|x: f64| (1.0 / x).sin(), 1e-9, 1.0, 1e-14, 3);
        assert!(matches!(r, Err(Error::Convergence { .. })));
    }
}
