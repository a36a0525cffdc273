//! Dense symmetric matrix helpers for small parameter dimensions.
//!
//! Everything here targets p-by-p matrices with p in the single digits
//! (information matrices, sandwich covariances), so a cyclic Jacobi sweep
//! is both simple and accurate; no external linear algebra is pulled in.

use crate::error::{Result, SdtError};

/// Row-major dense square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let mut m = Mat::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n, "rows must form a square matrix");
            m.data[i * n..(i + 1) * n].copy_from_slice(r);
        }
        m
    }

    pub fn scalar(v: f64) -> Self {
        Mat { n: 1, data: vec![v] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_scalar(&self) -> f64 {
        assert_eq!(self.n, 1);
        self.data[0]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn scale(&self, c: f64) -> Mat {
        Mat { n: self.n, data: self.data.iter().map(|v| c * v).collect() }
    }

    pub fn symmetrized(&self) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = 0.5 * (self[(i, j)] + self[(j, i)]);
            }
        }
        out
    }

    /// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues in descending order together with a matrix whose
    /// i-th ROW is the unit eigenvector for the i-th eigenvalue, i.e.
    /// `self = Q^T diag(w) Q` with Q the returned matrix.
    pub fn eigen_sym(&self) -> (Vec<f64>, Mat) {
        let n = self.n;
        let mut a = self.symmetrized();
        let mut v = Mat::identity(n); // accumulates rotations; rows end up as eigenvectors
        for _sweep in 0..100 {
            let mut off = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    off += a[(i, j)] * a[(i, j)];
                }
            }
            if off.sqrt() <= 1e-15 * self.frobenius().max(f64::MIN_POSITIVE) {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = 0.5 * (a[(q, q)] - a[(p, p)]) / apq;
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                        let vpk = v[(p, k)];
                        let vqk = v[(q, k)];
                        v[(p, k)] = c * vpk - s * vqk;
                        v[(q, k)] = s * vpk + c * vqk;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(j, j)].partial_cmp(&a[(i, i)]).unwrap());
        let eigvals: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
        let mut q = Mat::zeros(n);
        for (row, &i) in order.iter().enumerate() {
            for k in 0..n {
                q[(row, k)] = v[(i, k)];
            }
        }
        (eigvals, q)
    }

    /// Inverse of a symmetric matrix through its eigendecomposition.
    ///
    /// Errors naming the offending eigenvalue when the matrix is singular at
    /// working precision.
    pub fn inverse_sym(&self) -> Result<Mat> {
        let (w, q) = self.eigen_sym();
        let wmax = w.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
        for &wi in &w {
            if wi.abs() <= 1e-14 * wmax.max(f64::MIN_POSITIVE) {
                return Err(SdtError::SingularMatrix { eigenvalue: wi });
            }
        }
        Ok(recompose(&w.iter().map(|x| 1.0 / x).collect::<Vec<_>>(), &q))
    }

    /// Symmetric square root and inverse square root; requires positive
    /// definiteness.
    pub fn sqrt_invsqrt_sym(&self) -> Result<(Mat, Mat)> {
        let (w, q) = self.eigen_sym();
        let wmax = w.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
        for &wi in &w {
            if wi <= 1e-13 * wmax.max(f64::MIN_POSITIVE) {
                return Err(SdtError::NotPositiveDefinite { eigenvalue: wi });
            }
        }
        let sq = recompose(&w.iter().map(|x| x.sqrt()).collect::<Vec<_>>(), &q);
        let isq = recompose(&w.iter().map(|x| 1.0 / x.sqrt()).collect::<Vec<_>>(), &q);
        Ok((sq, isq))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn recompose(w: &[f64], q: &Mat) -> Mat {
    // Q^T diag(w) Q with Q rows holding eigenvectors.
    let n = q.dim();
    let mut out = Mat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += q[(k, i)] * w[k] * q[(k, j)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
