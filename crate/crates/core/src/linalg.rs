//! Exact linear algebra over ℚ.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// Dense rational matrix, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Malformed("ragged matrix".into()));
        }
        Ok(RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
                .collect(),
        )
        .expect("rectangular literal")
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

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let p = a * &other[(k, j)];
                    out[(i, j)] += p;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut m = Self::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                m[(i, j)] = self[(r, c)].clone();
            }
        }
        m
    }

    /// Block-diagonal sum.
    pub fn block_diag(&self, other: &Self) -> Self {
        let mut m = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    /// Clears denominators: returns an integer matrix `M` and `s > 0` with
    /// `self = M / s`.
    fn integral(&self) -> (Vec<Vec<BigInt>>, BigInt) {
        let mut s = BigInt::one();
        for a in &self.data {
            s = s.lcm(a.denom());
        }
        let m = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| {
                        let a = &self[(i, j)];
                        a.numer() * (&s / a.denom())
                    })
                    .collect()
            })
            .collect();
        (m, s)
    }

    /// Inverse by fraction-free (Bareiss) Gauss–Jordan elimination on the
    /// integer matrix obtained by clearing denominators. Every division in
    /// the elimination is exact.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Degenerate("matrix is not square".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Self::zeros(0, 0));
        }
        let (m, s) = self.integral();
        let mut a: Vec<Vec<BigInt>> = m
            .into_iter()
            .enumerate()
            .map(|(i, mut row)| {
                row.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
                row
            })
            .collect();
        let mut prev = BigInt::one();
        for k in 0..n {
            let p = (k..n)
                .find(|&i| !a[i][k].is_zero())
                .ok_or_else(|| Error::Degenerate("matrix is singular".into()))?;
            a.swap(k, p);
            for i in 0..n {
                if i == k {
                    continue;
                }
                for j in 0..2 * n {
                    if j == k {
                        continue;
                    }
                    let v = (&a[k][k] * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        // now a[i][i] = det(M) for all i and the right block is det(M)·M⁻¹
        let det = prev;
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = Rational::new(&a[i][n + j] * &s, det.clone());
            }
        }
        Ok(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn rank(&self) -> usize {
        let rows: Vec<SparseRow> = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .filter(|&j| !self[(i, j)].is_zero())
                    .map(|j| (j, self[(i, j)].clone()))
                    .collect()
            })
            .collect();
        rref(rows).len()
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub type SparseRow = BTreeMap<usize, Rational>;

/// Reduced row echelon form of the span of `rows`, with columns ordered by
/// index. Returns `(pivot column, row)` pairs; each row has coefficient 1 at
/// its pivot and no entries in other pivot columns. The result depends only
/// on the row space, not on the order of `rows`.
pub fn rref(rows: Vec<SparseRow>) -> Vec<(usize, SparseRow)> {
    let mut pending: Vec<SparseRow> = rows.into_iter().filter(|r| !r.is_empty()).collect();
    let mut pivots: Vec<(usize, SparseRow)> = Vec::new();
    loop {
        pending.retain(|r| !r.is_empty());
        let Some(col) = pending.iter().filter_map(|r| r.keys().next().copied()).min() else {
            break;
        };
        // sparsest row with leading column `col`
        let (pi, _) = pending
            .iter()
            .enumerate()
            .filter(|(_, r)| r.keys().next() == Some(&col))
            .min_by_key(|(_, r)| r.len())
            .unwrap();
        let mut prow = pending.swap_remove(pi);
        let inv = prow[&col].recip();
        for v in prow.values_mut() {
            *v *= &inv;
        }
        for r in pending.iter_mut() {
            eliminate(r, &prow, col);
        }
        pivots.push((col, prow));
    }
    // back substitution
    for k in (0..pivots.len()).rev() {
        let (col, prow) = pivots[k].clone();
        for (_, r) in pivots.iter_mut().take(k) {
            eliminate(r, &prow, col);
        }
    }
    pivots
}

fn eliminate(r: &mut SparseRow, prow: &SparseRow, col: usize) {
    let Some(f) = r.get(&col).cloned() else {
        return;
    };
    for (c, v) in prow {
        let e = r.entry(*c).or_insert_with(Rational::zero);
        *e -= &f * v;
        if e.is_zero() {
            r.remove(c);
        }
    }
}

/// Numbers of positive and negative eigenvalues of a symmetric rational
/// matrix, by congruence diagonalization (Sylvester's law of inertia).
pub fn signature(m: &RatMatrix) -> Result<(usize, usize)> {
    if !m.is_symmetric() {
        return Err(Error::Precondition("signature needs a symmetric matrix".into()));
    }
    let n = m.rows();
    let mut a = m.clone();
    let (mut pos, mut neg) = (0, 0);
    for k in 0..n {
        if a[(k, k)].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[(j, j)].is_zero()) {
                swap_sym(&mut a, k, j);
            } else if let Some(j) = (k + 1..n).find(|&j| !a[(k, j)].is_zero()) {
                // row_k += row_j, col_k += col_j makes the pivot 2 a_kj
                add_sym(&mut a, k, j);
            } else {
                continue;
            }
        }
        let p = a[(k, k)].clone();
        for i in k + 1..n {
            let f = &a[(i, k)] / &p;
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let v = &f * &a[(k, j)];
                a[(i, j)] -= v;
            }
            for j in k..n {
                let v = &f * &a[(j, k)];
                a[(j, i)] -= v;
            }
        }
        if p.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
    }
    Ok((pos, neg))
}

fn swap_sym(a: &mut RatMatrix, i: usize, j: usize) {
    let n = a.rows();
    for c in 0..n {
        let t = a[(i, c)].clone();
        a[(i, c)] = a[(j, c)].clone();
        a[(j, c)] = t;
    }
    for r in 0..n {
        let t = a[(r, i)].clone();
        a[(r, i)] = a[(r, j)].clone();
        a[(r, j)] = t;
    }
}

fn add_sym(a: &mut RatMatrix, k: usize, j: usize) {
    let n = a.rows();
    for c in 0..n {
        let v = a[(j, c)].clone();
        a[(k, c)] += v;
    }
    for r in 0..n {
        let v = a[(r, j)].clone();
        a[(r, k)] += v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    #[test]
    fn inverse_round_trip() {
        let m = RatMatrix::from_rows(vec![
            vec![rat(1, 2), rat(1, 1), rat(0, 1)],
            vec![rat(1, 1), rat(2, 3), rat(-1, 1)],
            vec![rat(0, 1), rat(-1, 1), rat(5, 1)],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), RatMatrix::identity(3));
        assert_eq!(inv.mul(&m), RatMatrix::identity(3));
    }

    #[test]
    fn inverse_needs_pivoting() {
        let m = RatMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(m.inverse().unwrap(), m);
    }

    #[test]
    fn singular_is_degenerate() {
        let m = RatMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert!(matches!(m.inverse(), Err(Error::Degenerate(_))));
    }

    #[test]
    fn signature_examples() {
        assert_eq!(signature(&RatMatrix::from_i64(&[&[1, 0], &[0, -1]])).unwrap(), (1, 1));
        assert_eq!(signature(&RatMatrix::from_i64(&[&[0, 1], &[1, 0]])).unwrap(), (1, 1));
        assert_eq!(signature(&RatMatrix::identity(4)).unwrap(), (4, 0));
        assert_eq!(signature(&RatMatrix::from_i64(&[&[0, 0], &[0, 0]])).unwrap(), (0, 0));
    }

    #[test]
    fn rref_is_order_independent() {
        let r = |v: &[(usize, i64)]| -> SparseRow { v.iter().map(|&(c, x)| (c, rat(x, 1))).collect() };
        let a = vec![r(&[(1, 1), (2, 1)]), r(&[(0, 1), (1, 1)]), r(&[(0, 1), (2, -1)])];
        let mut b = a.clone();
        b.reverse();
        assert_eq!(rref(a), rref(b));
    }
}
