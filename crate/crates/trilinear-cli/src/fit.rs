//! Least-squares extraction of a single oscillation frequency from a
//! sampled signal, for Ramsey-type population traces.

/// Fit `y(t) ~ a + b cos(w t) + c sin(w t)` and return the angular
/// frequency `w` (rad/s) minimizing the residual, found by a dense scan
/// up to the Nyquist limit followed by golden-section refinement.
/// Deterministic for fixed inputs.
pub fn fit_angular_frequency(times: &[f64], values: &[f64]) -> Option<f64> {
    let n = times.len();
    if n < 8 || values.len() != n {
        return None;
    }
    let span = times[n - 1] - times[0];
    let dt = span / (n - 1) as f64;
    if !span.is_finite() || span <= 0.0 {
        return None;
    }
    let w_min = std::f64::consts::TAU * 0.25 / span;
    let w_max = std::f64::consts::PI / dt;

    let scan_points = 4000;
    let mut best_w = w_min;
    let mut best_sse = f64::INFINITY;
    for k in 0..=scan_points {
        let w = w_min + (w_max - w_min) * k as f64 / scan_points as f64;
        let sse = residual(times, values, w);
        if sse < best_sse {
            best_sse = sse;
            best_w = w;
        }
    }

    // golden-section refine around the scan winner
    let step = (w_max - w_min) / scan_points as f64;
    let (mut lo, mut hi) = (
        (best_w - 2.0 * step).max(w_min),
        (best_w + 2.0 * step).min(w_max),
    );
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if residual(times, values, m1) < residual(times, values, m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Sum of squared residuals of the best affine-in-(a,b,c) model at fixed w.
fn residual(times: &[f64], values: &[f64], w: f64) -> f64 {
    // normal equations for [1, cos(wt), sin(wt)]
    let n = times.len() as f64;
    let (mut sc, mut ss, mut scc, mut sss, mut scs) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut sy, mut syc, mut sys) = (0.0, 0.0, 0.0);
    for (&t, &y) in times.iter().zip(values) {
        let (s, c) = (w * t).sin_cos();
        sc += c;
        ss += s;
        scc += c * c;
        sss += s * s;
        scs += c * s;
        sy += y;
        syc += y * c;
        sys += y * s;
    }
    let m = [[n, sc, ss], [sc, scc, scs], [ss, scs, sss]];
    let rhs = [sy, syc, sys];
    let Some(coef) = solve3(m, rhs) else {
        return f64::INFINITY;
    };
    let mut sse = 0.0;
    for (&t, &y) in times.iter().zip(values) {
        let (s, c) = (w * t).sin_cos();
        let model = coef[0] + coef[1] * c + coef[2] * s;
        sse += (y - model) * (y - model);
    }
    sse
}

fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv =
            (col..3).max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            let pivot_row = m[col];
            for (c, cell) in m[row].iter_mut().enumerate().skip(col) {
                *cell -= f * pivot_row[c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for col in (0..3).rev() {
        let mut v = b[col];
        for c in col + 1..3 {
            v -= m[col][c] * x[c];
        }
        x[col] = v / m[col][col];
    }
    Some(x)
}
