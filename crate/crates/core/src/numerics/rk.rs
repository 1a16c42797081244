//! Embedded Dormand-Prince 5(4) step for small autonomous systems.

/// One DP5(4) step from `(x, y)` with width `h`.
/// Returns the 5th-order solution and the embedded error estimate.
pub fn dopri5_step<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]>(
    f: &F,
    x: f64,
    y: &[f64; N],
    h: f64,
) -> ([f64; N], [f64; N]) {
    const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    // b5 equals the last row of A (FSAL); b4 below is the embedded 4th order
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let mut k = [[0.0; N]; 7];
    k[0] = f(x, y);
    for s in 1..7 {
        let mut ys = *y;
        for j in 0..s {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * k[j][i];
                }
            }
        }
        k[s] = f(x + C[s] * h, &ys);
    }
    let mut y5 = *y;
    for j in 0..7 {
        let b = A[6][j.min(5)];
        // row 6 of A is b5 for stages 0..5; stage 6 has weight 0 in y5
        if j < 6 && b != 0.0 {
            for i in 0..N {
                y5[i] += h * b * k[j][i];
            }
        }
    }
    let mut err = [0.0; N];
    for j in 0..7 {
        let b5 = if j < 6 { A[6][j] } else { 0.0 };
        let db = b5 - B4[j];
        if db != 0.0 {
            for i in 0..N {
                err[i] += h * db * k[j][i];
            }
        }
    }
    (y5, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifth_order_on_exponential() {
        // y' = y, exact e^h; a single step must be accurate to O(h^6)
        let f = |_x: f64, y: &[f64; 1]| [y[0]];
        for &h in &[0.1, 0.05, 0.025] {
            let (y5, _) = dopri5_step(&f, 0.0, &[1.0], h);
            let err = (y5[0] - h.exp()).abs();
            assert!(err < 2.0 * h.powi(6), "h = {h}, err = {err}");
        }
    }

    #[test]
    fn error_estimate_tracks_true_error_order() {
        let f = |x: f64, y: &[f64; 2]| [y[1], -y[0] + x.sin() * 0.01];
        let (_, e1) = dopri5_step(&f, 0.0, &[1.0, 0.0], 0.2);
        let (_, e2) = dopri5_step(&f, 0.0, &[1.0, 0.0], 0.1);
        let n1 = e1.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let n2 = e2.iter().map(|v| v.abs()).fold(0.0, f64::max);
        // embedded estimate is O(h^5): halving h shrinks it ~32x
        assert!(n1 / n2 > 16.0, "ratio {}", n1 / n2);
    }
}
