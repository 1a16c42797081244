//! Gauss-Legendre quadrature on a cell, with geometric end refinement for
//! integrands that degenerate like a fractional power at a cell endpoint.

/// 3-point Gauss-Legendre nodes/weights on [-1, 1].
const GL3_X: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GL3_W: [f64; 3] = [
    0.555_555_555_555_555_6,
    0.888_888_888_888_888_9,
    0.555_555_555_555_555_6,
];

/// 7-point Gauss-Legendre nodes/weights on [-1, 1], used inside the graded
/// end-cell refinement where the integrand is a fractional power: the
/// per-level relative error is what limits the sum there.
const GL7_X: [f64; 7] = [
    -0.949_107_912_342_758_5,
    -0.741_531_185_599_394_4,
    -0.405_845_151_377_397_2,
    0.0,
    0.405_845_151_377_397_2,
    0.741_531_185_599_394_4,
    0.949_107_912_342_758_5,
];
const GL7_W: [f64; 7] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
    0.381_830_050_505_118_9,
    0.279_705_391_489_276_7,
    0.129_484_966_168_869_7,
];

/// Integrate `f` over `[a, b]` with 3-point Gauss-Legendre.
pub fn gauss3<F: FnMut(f64) -> f64>(a: f64, b: f64, mut f: F) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for k in 0..3 {
        acc += GL3_W[k] * f(mid + half * GL3_X[k]);
    }
    acc * half
}

fn gauss7<F: FnMut(f64) -> f64>(a: f64, b: f64, f: &mut F) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for k in 0..7 {
        acc += GL7_W[k] * f(mid + half * GL7_X[k]);
    }
    acc * half
}

/// Which endpoint of a cell carries a degenerate (power-law) weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndSingularity {
    None,
    Left,
    Right,
}

/// Integrate over `[a, b]` where the integrand may behave like a fractional
/// power (possibly mildly singular but integrable) at one endpoint.
///
/// The cell is split geometrically toward the marked endpoint (ratio 1/2,
/// `levels` pieces) and each piece is handled by 3-point Gauss. For a weight
/// `|x - e|^beta` with `beta > -1` the piecewise errors decay geometrically,
/// so the result converges independently of how non-smooth the weight is.
pub fn gauss3_graded<F: FnMut(f64) -> f64>(
    a: f64,
    b: f64,
    sing: EndSingularity,
    levels: usize,
    mut f: F,
) -> f64 {
    if a >= b {
        return 0.0;
    }
    match sing {
        EndSingularity::None => gauss3(a, b, f),
        EndSingularity::Right => {
            let mut acc = 0.0;
            let mut lo = a;
            let w = b - a;
            for lev in 1..=levels {
                let hi = if lev == levels {
                    b
                } else {
                    b - w * 0.5f64.powi(lev as i32)
                };
                acc += gauss7(lo, hi, &mut f);
                lo = hi;
            }
            acc
        }
        EndSingularity::Left => {
            let mut acc = 0.0;
            let mut hi = b;
            let w = b - a;
            for lev in 1..=levels {
                let lo = if lev == levels {
                    a
                } else {
                    a + w * 0.5f64.powi(lev as i32)
                };
                acc += gauss7(lo, hi, &mut f);
                hi = lo;
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss3_exact_for_quintic() {
        // degree-5 polynomial is integrated exactly
        let val = gauss3(0.0, 2.0, |x| x.powi(5) - 3.0 * x.powi(2) + 1.0);
        let exact = 64.0 / 6.0 - 8.0 + 2.0;
        assert!((val - exact).abs() < 1e-12 * exact.abs());
    }

    #[test]
    fn graded_handles_integrable_singularity() {
        // int_0^1 x^{-1/2} dx = 2, singular at the left end
        let val = gauss3_graded(0.0, 1.0, EndSingularity::Left, 240, |x| x.powf(-0.5));
        assert!((val - 2.0).abs() < 1e-10, "got {val}");
        // int_0^1 x^{-0.8} dx = 5, the harshest weight the assemblies see
        let val = gauss3_graded(0.0, 1.0, EndSingularity::Left, 240, |x| x.powf(-0.8));
        assert!((val - 5.0).abs() < 5.0 * 1e-8, "got {val}");
        // int_0^1 (1-x)^{0.25} dx = 0.8, degenerate derivative at the right end
        let val = gauss3_graded(0.0, 1.0, EndSingularity::Right, 240, |x| (1.0 - x).powf(0.25));
        assert!((val - 0.8).abs() < 1e-12, "got {val}");
    }
}
