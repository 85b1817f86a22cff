//! Small dense real matrices and their singular value decomposition.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

/// Row-major dense matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols.max(1)).map(<[f64]>::to_vec).take(self.rows).collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `‖M Mᵀ − I‖_max`.
    pub fn orthogonality_defect(&self) -> f64 {
        (self * &self.transpose()).max_abs_diff(&Matrix::identity(self.rows))
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> f64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[(i, k)].abs().total_cmp(&a[(j, k)].abs()))
                .expect("nonempty range");
            if a[(p, k)] == 0.0 {
                return 0.0;
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(p * n + j, k * n + j);
                }
                det = -det;
            }
            det *= a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / a[(k, k)];
                for j in k..n {
                    let v = a[(k, j)];
                    a[(i, j)] -= f * v;
                }
            }
        }
        det
    }

    fn column_norm(&self, j: usize) -> f64 {
        (0..self.rows).map(|i| self[(i, j)].powi(2)).sum::<f64>().sqrt()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.to_rows().iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>10.6}")).collect();
            write!(f, "[{}]", cells.join(" "))?;
            if i + 1 < self.rows {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SvdError {
    #[error("SVD needs a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("Jacobi SVD did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}

/// `A = U diag(sigma) Vᵀ` with `sigma` nonnegative and nonincreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

impl Svd {
    pub fn reconstruct(&self) -> Matrix {
        let n = self.sigma.len();
        let mut us = self.u.clone();
        for i in 0..n {
            for j in 0..n {
                us[(i, j)] *= self.sigma[j];
            }
        }
        &us * &self.v.transpose()
    }

    pub fn min_singular_value(&self) -> f64 {
        self.sigma.last().copied().unwrap_or(0.0)
    }
}

pub const MAX_SWEEPS: usize = 60;

pub fn svd(a: &Matrix) -> Result<Svd, SvdError> {
    if !a.is_square() {
        return Err(SvdError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    match a.rows() {
        0 => Ok(Svd {
            u: Matrix::zeros(0, 0),
            sigma: Vec::new(),
            v: Matrix::zeros(0, 0),
        }),
        1 => {
            let x = a[(0, 0)];
            let s = if x < 0.0 { -1.0 } else { 1.0 };
            Ok(Svd {
                u: Matrix::from_rows(&[vec![s]]),
                sigma: vec![x.abs()],
                v: Matrix::identity(1),
            })
        }
        2 => Ok(svd_2x2(a)),
        _ => svd_jacobi(a),
    }
}

fn rotation(angle: f64) -> Matrix {
    let (s, c) = angle.sin_cos();
    Matrix::from_rows(&[vec![c, -s], vec![s, c]])
}

/// Closed form: `A = R(phi) diag(sx, sy) R(theta)`.
fn svd_2x2(m: &Matrix) -> Svd {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let e = (a + d) / 2.0;
    let f = (a - d) / 2.0;
    let g = (c + b) / 2.0;
    let h = (c - b) / 2.0;
    let q = e.hypot(h);
    let r = f.hypot(g);
    let sx = q + r;
    let mut sy = q - r;
    let a1 = g.atan2(f);
    let a2 = h.atan2(e);
    let theta = (a2 - a1) / 2.0;
    let phi = (a2 + a1) / 2.0;
    let mut u = rotation(phi);
    if sy < 0.0 {
        sy = -sy;
        u[(0, 1)] = -u[(0, 1)];
        u[(1, 1)] = -u[(1, 1)];
    }
    Svd {
        u,
        sigma: vec![sx, sy],
        v: rotation(theta).transpose(),
    }
}

/// One-sided (Hestenes) Jacobi: rotate column pairs of `W = A V` until all
/// columns are mutually orthogonal.
fn svd_jacobi(a: &Matrix) -> Result<Svd, SvdError> {
    let n = a.rows();
    let mut w = a.clone();
    let mut v = Matrix::identity(n);
    let eps = f64::EPSILON;
    let threshold = n as f64 * eps;
    // Columns this small are round-off; rotating against them never settles.
    let frobenius_sq: f64 = a.data.iter().map(|x| x * x).sum();
    let negligible = eps * eps * frobenius_sq;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..n {
                    alpha += w[(i, p)] * w[(i, p)];
                    beta += w[(i, q)] * w[(i, q)];
                    gamma += w[(i, p)] * w[(i, q)];
                }
                if gamma == 0.0 || alpha.min(beta) <= negligible || gamma.abs() <= threshold * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for mat in [&mut w, &mut v] {
                    for i in 0..n {
                        let xp = mat[(i, p)];
                        let xq = mat[(i, q)];
                        mat[(i, p)] = cs * xp - sn * xq;
                        mat[(i, q)] = sn * xp + cs * xq;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(SvdError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| w.column_norm(j)).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigma_max = norms[order[0]];
    let cutoff = sigma_max * n as f64 * eps;

    let mut u = Matrix::zeros(n, n);
    let mut vs = Matrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    let mut rank = 0;
    for (k, &j) in order.iter().enumerate() {
        for i in 0..n {
            vs[(i, k)] = v[(i, j)];
        }
        if norms[j] > cutoff {
            for i in 0..n {
                u[(i, k)] = w[(i, j)] / norms[j];
            }
            sigma.push(norms[j]);
            rank += 1;
        } else {
            sigma.push(0.0);
        }
    }
    complete_orthonormal(&mut u, rank);
    Ok(Svd { u, sigma, v: vs })
}

/// Fills columns `rank..n` of `u` with an orthonormal completion of the
/// first `rank` columns (Gram–Schmidt over the standard basis).
fn complete_orthonormal(u: &mut Matrix, rank: usize) {
    let n = u.rows();
    let mut filled = rank;
    for e in 0..n {
        if filled == n {
            break;
        }
        let mut x = vec![0.0; n];
        x[e] = 1.0;
        for _ in 0..2 {
            for k in 0..filled {
                let dot: f64 = (0..n).map(|i| u[(i, k)] * x[i]).sum();
                for (i, xi) in x.iter_mut().enumerate() {
                    *xi -= dot * u[(i, k)];
                }
            }
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-8 {
            for (i, xi) in x.iter().enumerate() {
                u[(i, filled)] = xi / norm;
            }
            filled += 1;
        }
    }
}
