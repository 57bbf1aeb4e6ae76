//! Small dense real-symmetric eigenproblems via cyclic Jacobi rotations.
//!
//! Only intended for the tiny matrices that appear in the crystal-mode
//! analysis (N ≤ 10) and in the Lanczos tridiagonal reduction (≲ 60).

/// Eigen-decomposition of a real symmetric matrix stored row-major.
///
/// Returns `(eigenvalues, eigenvectors)` sorted ascending; column `p` of
/// the eigenvector matrix (i.e. `vecs[k * n + p]` over `k`) belongs to
/// `vals[p]`.
pub fn eigh_symmetric(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), n * n, "matrix must be n x n");
    let mut a = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    const MAX_SWEEPS: usize = 64;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q].abs();
            }
        }
        if off < 1e-300 || off < 1e-15 * frobenius(&a, n) {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // rotation angle annihilating a[p][q]
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let s = theta.signum();
                    s / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    if k != p && k != q {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        let new_p = akp - s * (akq + tau * akp);
                        let new_q = akq + s * (akp - tau * akq);
                        a[k * n + p] = new_p;
                        a[p * n + k] = new_p;
                        a[k * n + q] = new_q;
                        a[q * n + k] = new_q;
                    }
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp - s * (vkq + tau * vkp);
                    v[k * n + q] = vkq + s * (vkp - tau * vkq);
                }
            }
        }
    }

    let mut vals: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap());
    vals = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vecs = vec![0.0; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..n {
            vecs[k * n + new_col] = v[k * n + old_col];
        }
    }
    (vals, vecs)
}

fn frobenius(a: &[f64], n: usize) -> f64 {
    a.iter().take(n * n).map(|x| x * x).sum::<f64>().sqrt()
}

/// Eigen-decomposition of a real symmetric tridiagonal matrix given by
/// its diagonal `alpha` and sub-diagonal `beta` (`beta.len() == alpha.len() - 1`).
pub fn eigh_tridiagonal(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = alpha.len();
    assert!(n >= 1 && beta.len() + 1 == n);
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        a[i * n + i] = alpha[i];
        if i + 1 < n {
            a[i * n + i + 1] = beta[i];
            a[(i + 1) * n + i] = beta[i];
        }
    }
    eigh_symmetric(&a, n)
}
