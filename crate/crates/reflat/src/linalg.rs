//! Small exact linear algebra over F = Q(√d): dense vectors and matrices of
//! [`FElem`] with Gaussian elimination, determinants, and inverses.
//!
//! Sizes are tiny (3×3 up to 5×5), so everything is straightforward dense
//! arithmetic; exactness, not asymptotics, is the point.

use crate::qring::{FElem, QringError};

pub type FVec = Vec<FElem>;
pub type FMatrix = Vec<Vec<FElem>>;

pub fn zeros(d: u32, rows: usize, cols: usize) -> FMatrix {
    vec![vec![FElem::zero(d); cols]; rows]
}

pub fn identity(d: u32, n: usize) -> FMatrix {
    let mut m = zeros(d, n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = FElem::one(d);
    }
    m
}

pub fn transpose(m: &FMatrix) -> FMatrix {
    let rows = m.len();
    let cols = m[0].len();
    (0..cols)
        .map(|j| (0..rows).map(|i| m[i][j].clone()).collect())
        .collect()
}

pub fn mat_mul(a: &FMatrix, b: &FMatrix) -> FMatrix {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    let d = a[0][0].d();
    let mut out = zeros(d, n, m);
    for i in 0..n {
        for j in 0..m {
            let mut acc = FElem::zero(d);
            for (l, brow) in b.iter().enumerate().take(k) {
                acc = &acc + &(&a[i][l] * &brow[j]);
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn mat_vec(m: &FMatrix, v: &FVec) -> FVec {
    let d = v[0].d();
    m.iter()
        .map(|row| {
            let mut acc = FElem::zero(d);
            for (x, y) in row.iter().zip(v) {
                acc = &acc + &(x * y);
            }
            acc
        })
        .collect()
}

pub fn vec_add(u: &FVec, v: &FVec) -> FVec {
    u.iter().zip(v).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(u: &FVec, v: &FVec) -> FVec {
    u.iter().zip(v).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(u: &FVec, c: &FElem) -> FVec {
    u.iter().map(|x| x * c).collect()
}

pub fn vec_neg(u: &FVec) -> FVec {
    u.iter().map(|x| -x).collect()
}

/// Inner product u·v with respect to the Gram matrix.
pub fn gram_ip(gram: &FMatrix, u: &FVec, v: &FVec) -> FElem {
    let gv = mat_vec(gram, v);
    let d = u[0].d();
    let mut acc = FElem::zero(d);
    for (x, y) in u.iter().zip(&gv) {
        acc = &acc + &(x * y);
    }
    acc
}

/// Exact determinant by Gaussian elimination with division.
pub fn det(m: &FMatrix) -> FElem {
    let n = m.len();
    let d = m[0][0].d();
    let mut a = m.to_vec();
    let mut result = FElem::one(d);
    for col in 0..n {
        let pivot_row = match (col..n).find(|&r| !a[r][col].is_zero()) {
            Some(r) => r,
            None => return FElem::zero(d),
        };
        if pivot_row != col {
            a.swap(col, pivot_row);
            result = -result;
        }
        let pivot = a[col][col].clone();
        result = &result * &pivot;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].div_exact(&pivot).expect("pivot nonzero");
            for c in col..n {
                a[r][c] = &a[r][c] - &(&factor * &a[col][c]);
            }
        }
    }
    result
}

/// Exact inverse via Gauss–Jordan; errors on singular input.
pub fn inverse(m: &FMatrix) -> Result<FMatrix, QringError> {
    let n = m.len();
    let d = m[0][0].d();
    let mut a = m.to_vec();
    let mut inv = identity(d, n);
    for col in 0..n {
        let pivot_row = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(QringError::DivisionByZero)?;
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot = a[col][col].clone();
        let pinv = pivot.inv()?;
        for c in 0..n {
            a[col][c] = &a[col][c] * &pinv;
            inv[col][c] = &inv[col][c] * &pinv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in 0..n {
                a[r][c] = &a[r][c] - &(&factor * &a[col][c]);
                inv[r][c] = &inv[r][c] - &(&factor * &inv[col][c]);
            }
        }
    }
    Ok(inv)
}

/// Solve M·x = b exactly; errors on singular M.
pub fn solve(m: &FMatrix, b: &FVec) -> Result<FVec, QringError> {
    let inv = inverse(m)?;
    Ok(mat_vec(&inv, b))
}

/// Rank by Gaussian elimination over F.
pub fn rank(m: &FMatrix) -> usize {
    let rows = m.len();
    let cols = m[0].len();
    let mut a = m.to_vec();
    let mut r = 0usize;
    for col in 0..cols {
        let pivot_row = match (r..rows).find(|&i| !a[i][col].is_zero()) {
            Some(i) => i,
            None => continue,
        };
        a.swap(r, pivot_row);
        let pivot = a[r][col].clone();
        for i in r + 1..rows {
            if a[i][col].is_zero() {
                continue;
            }
            let factor = a[i][col].div_exact(&pivot).expect("pivot nonzero");
            for c in col..cols {
                a[i][c] = &a[i][c] - &(&factor * &a[r][c]);
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// True iff every entry is an algebraic integer.
pub fn is_integral_matrix(m: &FMatrix) -> bool {
    m.iter().flatten().all(|x| x.is_integral())
}

pub fn is_integral_vec(v: &FVec) -> bool {
    v.iter().all(|x| x.is_integral())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qring::FElem;

    fn fe2(a: i64, b: i64) -> FElem {
        FElem::from_ints(2, a, b)
    }

    #[test]
    fn det_and_inverse_roundtrip() {
        let m = vec![
            vec![fe2(1, 1), fe2(0, 1), fe2(2, 0)],
            vec![fe2(0, 0), fe2(3, -1), fe2(1, 0)],
            vec![fe2(1, 0), fe2(0, 0), fe2(1, 2)],
        ];
        let dm = det(&m);
        assert!(!dm.is_zero());
        let mi = inverse(&m).unwrap();
        assert_eq!(mat_mul(&m, &mi), identity(2, 3));
    }

    #[test]
    fn det_singular() {
        let m = vec![
            vec![fe2(1, 0), fe2(2, 0)],
            vec![fe2(2, 0), fe2(4, 0)],
        ];
        assert!(det(&m).is_zero());
        assert!(inverse(&m).is_err());
    }
}
