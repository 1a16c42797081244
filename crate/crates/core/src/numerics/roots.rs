//! Scalar root bracketing (Illinois variant of regula falsi).

/// Find a root of `f` in `[a, b]`, assuming `f(a)` and `f(b)` have opposite
/// signs. Converges superlinearly on smooth problems and never leaves the
/// bracket. Returns the abscissa once the bracket is below `xtol` or the
/// residual is exactly zero.
pub fn illinois<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> f64 {
    let (mut x0, mut x1) = (a, b);
    let (mut f0, mut f1) = (f(a), f(b));
    if f0 == 0.0 {
        return x0;
    }
    if f1 == 0.0 {
        return x1;
    }
    debug_assert!(f0 * f1 < 0.0, "illinois: endpoints do not bracket a root");
    for _ in 0..max_iter {
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        // fall back to midpoint when the secant step stalls on an endpoint
        let x2 = if !(x2 > x0.min(x1) && x2 < x0.max(x1)) {
            0.5 * (x0 + x1)
        } else {
            x2
        };
        let f2 = f(x2);
        if f2 == 0.0 || (x1 - x0).abs() < xtol {
            return x2;
        }
        if f2 * f1 < 0.0 {
            x0 = x1;
            f0 = f1;
        } else {
            f0 *= 0.5;
        }
        x1 = x2;
        f1 = f2;
    }
    x1
}
