use nalgebra::{DMatrix, DVector};

/// Eigen-decomposition of a dense symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct JacobiEigen {
    pub eigenvalues: DVector<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: DMatrix<f64>,
    pub sweeps: usize,
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi rotations until the off-diagonal mass is negligible.
///
/// Slower than tridiagonal QR but simple enough to trust as an oracle.
/// Only the lower triangle of `a` is read.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> JacobiEigen {
    assert_eq!(a.nrows(), a.ncols(), "jacobi_eigen needs a square matrix");
    let n = a.nrows();
    let mut m = DMatrix::from_fn(n, n, |i, j| if i >= j { a[(i, j)] } else { a[(j, i)] });
    let mut v = DMatrix::identity(n, n);
    let mut sweeps = 0;

    while sweeps < MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| m[(p, q)] * m[(p, q)])
            .sum();
        if off == 0.0 {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                // once the rotation would not change either diagonal entry
                // in floating point, the coupling is below rounding
                let g = 100.0 * apq.abs();
                if sweeps > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    m[(p, q)] = 0.0;
                    m[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| m[(i, i)]));
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    JacobiEigen {
        eigenvalues,
        eigenvectors,
        sweeps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tridiagonal_closed_form() {
        // second-difference matrix: eigenvalues 2 − 2cos(jπ/(n+1))
        let n = 12;
        let a = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => 2.0,
            1 => -1.0,
            _ => 0.0,
        });
        let e = jacobi_eigen(&a);
        for j in 0..n {
            let exact = 2.0 - 2.0 * (((j + 1) as f64) * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((e.eigenvalues[j] - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 5, 30] {
            let b = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let a = &b + b.transpose();
            let e = jacobi_eigen(&a);
            let recon = &e.eigenvectors * DMatrix::from_diagonal(&e.eigenvalues) * e.eigenvectors.transpose();
            assert!((recon - &a).norm() < 1e-12 * (1.0 + a.norm()));
            let gram = e.eigenvectors.transpose() * &e.eigenvectors;
            assert!((gram - DMatrix::identity(n, n)).norm() < 1e-12);
            assert!(e.eigenvalues.as_slice().windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
