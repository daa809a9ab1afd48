//! Small dense linear algebra: a cyclic Jacobi eigensolver for hermitian
//! matrices and a few matrix norms used by the invariant checks.

use num_complex::Complex64;

use crate::{CMatrix, Error, Result};

/// Sweep cap of the Jacobi eigensolver.
pub const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `A = V diag(λ) V†` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: CMatrix,
    pub sweeps: usize,
}

/// `max_{ij} |a_ij|`.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// `‖A − A†‖_max`.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    if !a.is_square() {
        return f64::INFINITY;
    }
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `‖A − B‖_max`; infinite when the shapes differ.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

fn off_diagonal_norm_sqr(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s
}

/// Cyclic Jacobi diagonalization of a hermitian matrix.
///
/// Each rotation first removes the phase of `a_pq` and then applies the
/// real symmetric Jacobi rotation, so the combined transform is unitary.
/// The input is copied; only the lower-left/upper-right average is used,
/// which makes the result exactly hermitian-consistent.
pub fn hermitian_eigen(input: &CMatrix, herm_tol: f64) -> Result<HermitianEigen> {
    if !input.is_square() {
        return Err(Error::DimensionMismatch {
            left: input.nrows(),
            right: input.ncols(),
        });
    }
    let defect = hermitian_defect(input);
    if !(defect <= herm_tol) {
        return Err(Error::NotHermitian { defect });
    }
    let n = input.nrows();
    let mut a = (input + input.adjoint()) * Complex64::new(0.5, 0.0);
    let mut v = CMatrix::identity(n, n);
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let target = (f64::EPSILON * f64::EPSILON) * scale;

    let mut sweeps = 0;
    while off_diagonal_norm_sqr(&a) > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let phase = apq / g;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * g);
                let t = if theta.is_infinite() {
                    0.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // U = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] in the (p, q) plane
                let u_pp = Complex64::new(c, 0.0);
                let u_pq = Complex64::new(s, 0.0);
                let u_qp = -phase.conj() * s;
                let u_qq = phase.conj() * c;
                // A ← A U
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * u_pp + akq * u_qp;
                    a[(k, q)] = akp * u_pq + akq * u_qq;
                }
                // A ← U† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                // V ← V U
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * u_pp + vkq * u_qp;
                    v[(k, q)] = vkp * u_pq + vkq * u_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, k| v[(r, order[k])]);
    Ok(HermitianEigen {
        values,
        vectors,
        sweeps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = CMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        (&m + m.adjoint()) * c(0.5, 0.0)
    }

    #[test]
    fn diagonal_input_sorted() {
        let a = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(3.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0)]));
        let e = hermitian_eigen(&a, 1e-12).unwrap();
        assert_eq!(e.values, vec![-1.0, 2.0, 3.0]);
        assert_eq!(e.sweeps, 0);
    }

    #[test]
    fn pauli_spectra() {
        let sx = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let e = hermitian_eigen(&sx, 1e-12).unwrap();
        assert_abs_diff_eq!(e.values[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-15);
        let sy = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let e = hermitian_eigen(&sy, 1e-12).unwrap();
        assert_abs_diff_eq!(e.values[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn residuals_and_unitarity() {
        for (n, seed) in [(2, 0), (5, 1), (16, 2), (40, 3)] {
            let a = random_hermitian(n, seed);
            let e = hermitian_eigen(&a, 1e-12).unwrap();
            let norm = max_abs(&a);
            for k in 0..n {
                let v = e.vectors.column(k);
                let r = &a * v - v * c(e.values[k], 0.0);
                assert!(r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() <= 1e-10 * norm);
            }
            let vv = e.vectors.adjoint() * &e.vectors;
            assert!(max_abs_diff(&vv, &CMatrix::identity(n, n)) <= 1e-12);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            let trace: f64 = (0..n).map(|i| a[(i, i)].re).sum();
            assert_abs_diff_eq!(e.values.iter().sum::<f64>(), trace, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(hermitian_eigen(&a, 1e-12), Err(Error::NotHermitian { .. })));
        let r = CMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eigen(&r, 1e-12), Err(Error::DimensionMismatch { .. })));
    }
}
