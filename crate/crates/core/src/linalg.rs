//! Dense linear algebra for small matrices, generic over the scalar backend.
//!
//! Pivoting rule: floats use partial pivoting by largest modulus, exact
//! scalars take the first non-zero entry. A float pivot counts as zero when
//! its modulus is at most `tol * max |a_ij|` of the input matrix.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{max_modulus, Scalar};

#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    /// Builds a matrix from row vectors, which must all have the same length.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let n_rows = rows.len();
        let mut data = Vec::with_capacity(n_rows * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self {
            rows: n_rows,
            cols,
            data,
        })
    }

    /// Integer-entry convenience constructor.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| S::from_i64(v)).collect())
                .collect(),
        )
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

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
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

    pub fn max_modulus(&self) -> f64 {
        max_modulus(&self.data)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Explicit exact-to-float (or float-to-float) conversion. There is no
    /// conversion in the other direction.
    pub fn to_float(&self) -> Matrix<Complex<f64>> {
        self.map(Scalar::to_c64)
    }

    pub fn scale(&self, k: &S) -> Self {
        self.map(|v| v.clone() * k.clone())
    }

    pub fn mul_vec(&self, x: &[S]) -> Result<Vec<S>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * other[(k, j)].clone();
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        })
    }

    /// Block-diagonal sum of square blocks.
    pub fn block_diagonal(blocks: &[Matrix<S>]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut out = Self::zeros(n, n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(off + i, off + j)] = b[(i, j)].clone();
                }
            }
            off += b.rows;
        }
        out
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            })
        }
    }

    /// Solves `A x = b`, reporting the max-norm residual of the result.
    pub fn solve_linear(&self, b: &[S], tol: f64) -> Result<LinearSolution<S>> {
        let lu = self.lu(tol)?;
        let x = lu.solve(b)?;
        let ax = self.mul_vec(&x)?;
        let residual = ax
            .iter()
            .zip(b)
            .map(|(l, r)| (l.clone() - r.clone()).modulus())
            .fold(0.0, f64::max);
        Ok(LinearSolution { x, residual })
    }

    /// LU factorisation with row pivoting. Fails on the first column with no
    /// acceptable pivot.
    pub fn lu(&self, tol: f64) -> Result<Lu<S>> {
        self.require_square()?;
        let n = self.rows;
        let threshold = tol * self.max_modulus();
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0usize;
        let mut min_pivot = f64::INFINITY;
        for col in 0..n {
            let p = select_pivot(&a, col, col, threshold).ok_or(Error::SingularMatrix { column: col })?;
            if p != col {
                a.swap_rows(p, col);
                perm.swap(p, col);
                swaps += 1;
            }
            let pivot = a[(col, col)].clone();
            min_pivot = min_pivot.min(pivot.modulus());
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone() / pivot.clone();
                for c in col + 1..n {
                    a[(r, c)] = a[(r, c)].clone() - factor.clone() * a[(col, c)].clone();
                }
                a[(r, col)] = factor;
            }
        }
        Ok(Lu {
            factors: a,
            perm,
            odd: swaps % 2 == 1,
            min_pivot: if n == 0 { 0.0 } else { min_pivot },
        })
    }

    /// Determinant by elimination, never failing: a column without a usable
    /// pivot yields zero.
    pub fn determinant(&self) -> Result<S> {
        self.require_square()?;
        let n = self.rows;
        let mut a = self.clone();
        let mut det = S::one();
        for col in 0..n {
            let Some(p) = select_pivot(&a, col, col, 0.0) else {
                return Ok(S::zero());
            };
            if p != col {
                a.swap_rows(p, col);
                det = -det;
            }
            let pivot = a[(col, col)].clone();
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone() / pivot.clone();
                for c in col + 1..n {
                    a[(r, c)] = a[(r, c)].clone() - factor.clone() * a[(col, c)].clone();
                }
            }
            det = det * pivot;
        }
        Ok(det)
    }

    /// Determinant plus a scale for zero/non-zero decisions. The scale is the
    /// product of the rows' max moduli, an upper bound on `|det|` up to a
    /// dimension factor.
    pub fn determinant_info(&self) -> Result<DeterminantInfo<S>> {
        let value = self.determinant()?;
        let scale = (0..self.rows).map(|i| max_modulus(self.row(i))).product();
        Ok(DeterminantInfo {
            modulus: value.modulus(),
            value,
            scale,
        })
    }

    /// Rank and reduced row echelon basis of the row space.
    pub fn rank(&self, tol: f64) -> RowEchelon<S> {
        let threshold = tol * self.max_modulus();
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = select_pivot(&a, col, row, threshold) else {
                continue;
            };
            a.swap_rows(p, row);
            let pivot = a[(row, col)].clone();
            for c in col..self.cols {
                a[(row, c)] = a[(row, c)].clone() / pivot.clone();
            }
            a[(row, col)] = S::one();
            for r in 0..self.rows {
                if r == row || a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone();
                for c in col..self.cols {
                    a[(r, c)] = a[(r, c)].clone() - factor.clone() * a[(row, c)].clone();
                }
                a[(r, col)] = S::zero();
            }
            pivots.push(col);
            row += 1;
        }
        let basis = (0..row).map(|i| a.row(i).to_vec()).collect();
        RowEchelon {
            rank: row,
            basis,
            pivots,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

fn select_pivot<S: Scalar>(a: &Matrix<S>, col: usize, start: usize, threshold: f64) -> Option<usize> {
    if S::EXACT {
        return (start..a.rows).find(|&r| !a[(r, col)].is_zero());
    }
    let (best, modulus) =
        (start..a.rows)
            .map(|r| (r, a[(r, col)].modulus()))
            .fold(
                (None, 0.0),
                |(b, m), (r, v)| if v > m { (Some(r), v) } else { (b, m) },
            );
    match best {
        Some(r) if modulus > threshold => Some(r),
        _ => None,
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for i in 0..self.rows {
            list.entry(&&self.data[i * self.cols..(i + 1) * self.cols]);
        }
        list.finish()
    }
}

#[derive(Debug, Clone)]
pub struct LinearSolution<S> {
    pub x: Vec<S>,
    /// `‖Ax − b‖∞`; zero on the exact backend.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct DeterminantInfo<S> {
    pub value: S,
    pub modulus: f64,
    pub scale: f64,
}

impl<S: Scalar> DeterminantInfo<S> {
    pub fn is_nonzero(&self, tol: f64) -> bool {
        if S::EXACT {
            !self.value.is_zero()
        } else {
            self.modulus > tol * self.scale
        }
    }
}

/// Result of row reduction: `basis` is in reduced row echelon form, so two
/// exact row spaces are equal iff their bases are equal.
#[derive(Debug, Clone, PartialEq)]
pub struct RowEchelon<S> {
    pub rank: usize,
    pub basis: Vec<Vec<S>>,
    pub pivots: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Lu<S> {
    factors: Matrix<S>,
    perm: Vec<usize>,
    odd: bool,
    min_pivot: f64,
}

impl<S: Scalar> Lu<S> {
    pub fn solve(&self, b: &[S]) -> Result<Vec<S>> {
        let n = self.factors.rows;
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let mut y: Vec<S> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                let t = self.factors[(i, j)].clone() * y[j].clone();
                y[i] = y[i].clone() - t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = self.factors[(i, j)].clone() * y[j].clone();
                y[i] = y[i].clone() - t;
            }
            y[i] = y[i].clone() / self.factors[(i, i)].clone();
        }
        Ok(y)
    }

    pub fn determinant(&self) -> S {
        let d = (0..self.factors.rows).fold(S::one(), |acc, i| acc * self.factors[(i, i)].clone());
        if self.odd {
            -d
        } else {
            d
        }
    }

    /// Smallest pivot modulus encountered.
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }
}

/// Smallest partial-pivoting pivot of `a` relative to its largest entry; 0 for
/// a numerically singular (or zero) matrix.
pub fn min_pivot_ratio<S: Scalar>(a: &Matrix<S>) -> f64 {
    let scale = a.max_modulus();
    if scale == 0.0 {
        return 0.0;
    }
    match a.lu(0.0) {
        Ok(lu) => lu.min_pivot() / scale,
        Err(_) => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use crate::{ExactComplex, C64};

    fn fm(rows: &[&[i64]]) -> Matrix<C64> {
        Matrix::from_i64_rows(rows).unwrap()
    }

    fn em(rows: &[&[i64]]) -> Matrix<ExactComplex> {
        Matrix::from_i64_rows(rows).unwrap()
    }

    fn ints<S: Scalar>(v: &[i64]) -> Vec<S> {
        v.iter().map(|&x| S::from_i64(x)).collect()
    }

    #[test]
    fn solve_identity() {
        let a = Matrix::<ExactComplex>::identity(3);
        let sol = a.solve_linear(&ints(&[1, 2, 3]), 0.0).unwrap();
        assert_eq!(sol.x, ints::<ExactComplex>(&[1, 2, 3]));
        assert_eq!(sol.residual, 0.0);
    }

    #[test]
    fn solve_permutation() {
        let a = fm(&[&[0, 1], &[1, 0]]);
        let sol = a.solve_linear(&ints(&[5, 7]), 1e-12).unwrap();
        assert_eq!(sol.x, ints::<C64>(&[7, 5]));
        let e = em(&[&[0, 1], &[1, 0]]);
        assert_eq!(
            e.solve_linear(&ints(&[5, 7]), 0.0).unwrap().x,
            ints::<ExactComplex>(&[7, 5])
        );
    }

    #[test]
    fn solve_rank_deficient_is_singular() {
        let a = fm(&[&[2, 0], &[0, 0]]);
        assert!(matches!(
            a.solve_linear(&ints(&[1, 1]), 1e-12),
            Err(Error::SingularMatrix { column: 1 })
        ));
        let e = em(&[&[2, 0], &[0, 0]]);
        assert!(matches!(
            e.solve_linear(&ints(&[1, 1]), 0.0),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn solve_non_square_is_mismatch() {
        let a = Matrix::<C64>::zeros(2, 3);
        assert!(matches!(
            a.solve_linear(&ints(&[1, 1]), 1e-12),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(
            Matrix::<ExactComplex>::identity(4).determinant().unwrap(),
            rational(1, 1)
        );
        let one_real = em(&[&[1, -2, -3], &[0, 0, 1], &[0, 1, 1]]);
        assert_eq!(one_real.determinant().unwrap(), rational(-1, 1));
        let f = one_real.to_float().determinant().unwrap();
        assert!((f - C64::new(-1.0, 0.0)).norm() < 1e-14);
        let degenerate = em(&[&[1, 0], &[1, 0]]);
        assert_eq!(degenerate.determinant().unwrap(), rational(0, 1));
        let info = fm(&[&[1, 0], &[1, 0]]).determinant_info().unwrap();
        assert!(!info.is_nonzero(1e-10));
    }

    #[test]
    fn rank_examples() {
        let z = Matrix::<ExactComplex>::zeros(3, 3).rank(0.0);
        assert_eq!(z.rank, 0);
        assert!(z.basis.is_empty());
        assert_eq!(Matrix::<C64>::identity(5).rank(1e-10).rank, 5);
        let r = fm(&[&[1, 0], &[1, 0]]).rank(1e-10);
        assert_eq!(r.rank, 1);
        assert_eq!(r.basis, vec![ints::<C64>(&[1, 0])]);
    }

    #[test]
    fn rank_gives_reduced_echelon_form() {
        let a = em(&[&[2, 4, 6], &[1, 3, 5], &[3, 7, 11]]);
        let r = a.rank(0.0);
        assert_eq!(r.rank, 2);
        assert_eq!(r.pivots, vec![0, 1]);
        assert_eq!(r.basis[0], ints::<ExactComplex>(&[1, 0, -1]));
        assert_eq!(r.basis[1], ints::<ExactComplex>(&[0, 1, 2]));
    }

    #[test]
    fn rank_tolerance_is_scale_relative() {
        let a = fm(&[&[1, 0], &[0, 0]]).scale(&C64::new(1e-20, 0.0));
        assert_eq!(a.rank(1e-10).rank, 1);
        let mut b = fm(&[&[1, 0], &[0, 1]]);
        b[(1, 1)] = C64::new(1e-12, 0.0);
        assert_eq!(b.rank(1e-10).rank, 1);
        assert_eq!(b.rank(1e-14).rank, 2);
    }

    #[test]
    fn lu_determinant_matches_elimination() {
        let a = fm(&[&[0, 2, 1], &[3, 1, 4], &[1, 5, 9]]);
        let lu = a.lu(1e-12).unwrap();
        let d1 = lu.determinant();
        let d2 = a.determinant().unwrap();
        assert!((d1 - d2).norm() < 1e-12);
        assert!(min_pivot_ratio(&a) > 0.0);
        assert_eq!(min_pivot_ratio(&fm(&[&[1, 1], &[1, 1]])), 0.0);
    }

    #[test]
    fn block_diagonal_layout() {
        let b = Matrix::<ExactComplex>::block_diagonal(&[em(&[&[1]]), em(&[&[0, 1], &[0, 0]])]);
        assert_eq!(b, em(&[&[1, 0, 0], &[0, 0, 1], &[0, 0, 0]]));
    }
}
