//! Dense helpers for the small matrices that show up here (dimension ≤ ~6).
//!
//! Matrices are row-major `Vec<Vec<T>>`.

use crate::scalar::Real;

pub type Matrix<T> = Vec<Vec<T>>;

pub fn identity<T: Real>(n: usize) -> Matrix<T> {
    (0..n).map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect()
}

pub fn transpose<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    let n = a.len();
    let m = a.first().map_or(0, Vec::len);
    (0..m).map(|j| (0..n).map(|i| a[i][j]).collect()).collect()
}

pub fn mat_mul<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter().map(|row| (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect()).collect()
}

pub fn mat_vec<T: Real>(a: &Matrix<T>, x: &[T]) -> Vec<T> {
    a.iter().map(|row| row.iter().zip(x).map(|(&r, &v)| r * v).sum()).collect()
}

/// Inverse and determinant by Gauss–Jordan elimination with partial pivoting.
/// Returns `None` for a numerically singular matrix.
pub fn inverse_and_det<T: Real>(a: &Matrix<T>) -> Option<(Matrix<T>, T)> {
    let n = a.len();
    let mut m = a.clone();
    let mut inv = identity::<T>(n);
    let mut det = T::one();
    let scale = a.iter().flatten().fold(T::zero(), |acc, &x| acc.max(x.abs()));
    if scale == T::zero() {
        return None;
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap()).unwrap();
        if m[pivot][col].abs() <= T::epsilon() * scale * T::from_usize(n).unwrap() {
            return None;
        }
        if pivot != col {
            m.swap(pivot, col);
            inv.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col];
        det = det * p;
        for j in 0..n {
            m[col][j] = m[col][j] / p;
            inv[col][j] = inv[col][j] / p;
        }
        for i in 0..n {
            if i != col {
                let factor = m[i][col];
                if factor != T::zero() {
                    for j in 0..n {
                        m[i][j] = m[i][j] - factor * m[col][j];
                        inv[i][j] = inv[i][j] - factor * inv[col][j];
                    }
                }
            }
        }
    }
    Some((inv, det))
}

/// Upper-triangular `R` with `RᵀR = g` for a symmetric positive-definite `g`.
pub fn cholesky_upper<T: Real>(g: &Matrix<T>) -> Option<Matrix<T>> {
    let n = g.len();
    let mut r = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        let mut s = g[i][i];
        for k in 0..i {
            s = s - r[k][i] * r[k][i];
        }
        if s <= T::zero() {
            return None;
        }
        r[i][i] = s.sqrt();
        for j in (i + 1)..n {
            let mut s = g[i][j];
            for k in 0..i {
                s = s - r[k][i] * r[k][j];
            }
            r[i][j] = s / r[i][i];
        }
    }
    Some(r)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues<T: Real>(a: &Matrix<T>) -> Vec<T> {
    let n = a.len();
    let mut m = a.clone();
    for _sweep in 0..64 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        let diag: T = (0..n).map(|i| m[i][i] * m[i][i]).sum();
        if off <= T::epsilon() * T::epsilon() * diag || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q] == T::zero() {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (T::lit(2.0) * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<T> = (0..n).map(|i| m[i][i]).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eig
}
