/// `p^3 - 19 p^2 - 8 p + 8`; its root in (0, 1) is the upper end of the
/// admissible range for the heavy threshold.
pub fn beta_polynomial(p: f64) -> f64 {
    ((p - 19.0) * p - 8.0) * p + 8.0
}

/// Admissible range `(beta1, beta2)` for the heavy threshold.
pub fn beta_interval() -> (f64, f64) {
    let beta1 = 1.0 - 1.0 / 3f64.sqrt();
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if beta_polynomial(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (beta1, 0.5 * (lo + hi))
}
