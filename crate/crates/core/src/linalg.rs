//! Exact integer and rational linear algebra on small dense matrices.
//!
//! Everything here runs over arbitrary-precision integers. Determinants and
//! inverses use fraction-free (Bareiss) elimination, the Smith normal form
//! carries its unimodular transforms so that cokernel coordinates can be
//! read off directly.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("Smith decomposition failed verification (U*M*V != D)")]
    SmithVerification,
}

/// Dense square-or-rectangular matrix with arbitrary-precision integer entries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from row vectors. All rows must have equal length.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend(r.iter().cloned().map(Into::into));
        }
        Self {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
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

    pub fn neg(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Leading principal `k x k` submatrix.
    pub fn leading_minor(&self, k: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                m[(i, j)] = self[(i, j)].clone();
            }
        }
        m
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += factor * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * factor;
            self[(dst, j)] += v;
        }
    }

    /// col[dst] += factor * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * factor;
            self[(i, dst)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.to_string()).collect())
            .collect();
        write!(f, "{rows:?}")
    }
}

/// Dense square matrix of reduced rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    n: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn all_positive(&self) -> bool {
        self.data.iter().all(|x| x.is_positive())
    }

    /// `self * other` where `other` is an integer matrix.
    pub fn mul_int(&self, other: &IntMatrix) -> Result<RatMatrix, LinalgError> {
        if other.nrows() != self.n || other.ncols() != self.n {
            return Err(LinalgError::DimensionMismatch(
                self.n,
                self.n,
                other.nrows(),
                other.ncols(),
            ));
        }
        let mut data = vec![BigRational::zero(); self.n * self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                let mut acc = BigRational::zero();
                for k in 0..self.n {
                    if !other[(k, j)].is_zero() {
                        acc += &self[(i, k)] * BigRational::from_integer(other[(k, j)].clone());
                    }
                }
                data[i * self.n + j] = acc;
            }
        }
        Ok(RatMatrix { n: self.n, data })
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                if i == j {
                    self[(i, j)].is_one()
                } else {
                    self[(i, j)].is_zero()
                }
            })
        })
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.n + j]
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.n)
            .map(|i| self.row(i).iter().map(|x| x.to_string()).collect())
            .collect();
        write!(f, "{rows:?}")
    }
}

/// Result of one Bareiss forward elimination pass over `[M | B]`.
struct Echelon {
    work: IntMatrix,
    det: BigInt,
}

/// Fraction-free elimination of the augmented matrix `[m | rhs]`.
///
/// After the pass every pivot row `k` has been scaled so that its diagonal
/// entry equals the `k`-th leading minor of the (row-permuted) input, and the
/// last pivot is the determinant up to the tracked permutation sign.
fn bareiss(m: &IntMatrix, rhs: Option<&IntMatrix>) -> Echelon {
    let n = m.nrows();
    let extra = rhs.map_or(0, |r| r.ncols());
    let mut work = IntMatrix::zeros(n, n + extra);
    for i in 0..n {
        for j in 0..n {
            work[(i, j)] = m[(i, j)].clone();
        }
        if let Some(r) = rhs {
            for j in 0..extra {
                work[(i, n + j)] = r[(i, j)].clone();
            }
        }
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if work[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !work[(i, k)].is_zero()) {
                Some(p) => {
                    work.swap_rows(k, p);
                    sign = -sign;
                }
                None => {
                    return Echelon {
                        work,
                        det: BigInt::zero(),
                    }
                }
            }
        }
        for i in k + 1..n {
            for j in k + 1..n + extra {
                let v = (&work[(i, j)] * &work[(k, k)] - &work[(i, k)] * &work[(k, j)]) / &prev;
                work[(i, j)] = v;
            }
            work[(i, k)] = BigInt::zero();
        }
        prev = work[(k, k)].clone();
    }
    let det = if n == 0 { BigInt::one() } else { sign * prev };
    Echelon { work, det }
}

/// Exact determinant of a square integer matrix.
pub fn determinant(m: &IntMatrix) -> BigInt {
    assert!(m.is_square(), "determinant of a non-square matrix");
    bareiss(m, None).det
}

/// Adjugate and determinant of a nonsingular square matrix, both exact.
///
/// Solves `M X = det(M) I` by back substitution on the Bareiss echelon form;
/// every division is exact because the solution is the adjugate.
pub fn adjugate(m: &IntMatrix) -> Result<(IntMatrix, BigInt), LinalgError> {
    assert!(m.is_square(), "adjugate of a non-square matrix");
    let n = m.nrows();
    let ech = bareiss(m, Some(&IntMatrix::identity(n)));
    if ech.det.is_zero() {
        return Err(LinalgError::SingularMatrix);
    }
    // The row swaps were applied to the right-hand side too, so the echelon
    // system reads U X = L P, and the Bareiss scaling makes the last pivot
    // equal to det up to sign. Solve U X = (pivot_n) * rhs' column by column.
    let w = &ech.work;
    let last = w[(n - 1, n - 1)].clone();
    let mut adj = IntMatrix::zeros(n, n);
    for c in 0..n {
        for k in (0..n).rev() {
            // Row k of the echelon system is the k-th Bareiss step; its rhs
            // carries the same fraction-free scaling as its pivot, so the
            // system U x = last * rhs has an integral solution.
            let mut acc = &last * &w[(k, n + c)];
            for j in k + 1..n {
                acc -= &w[(k, j)] * &adj[(j, c)];
            }
            let (q, r) = acc.div_rem(&w[(k, k)]);
            debug_assert!(r.is_zero(), "inexact back substitution");
            adj[(k, c)] = q;
        }
    }
    // `last` equals det up to the permutation sign.
    if last != ech.det {
        adj = adj.neg();
    }
    Ok((adj, ech.det))
}

/// Exact inverse over the rationals.
pub fn inverse(m: &IntMatrix) -> Result<RatMatrix, LinalgError> {
    let (adj, det) = adjugate(m)?;
    let n = m.nrows();
    let data = (0..n * n)
        .map(|idx| BigRational::new(adj.data[idx].clone(), det.clone()))
        .collect();
    Ok(RatMatrix { n, data })
}

/// All leading principal minors strictly positive.
pub fn is_positive_definite(m: &IntMatrix) -> bool {
    m.is_square() && m.is_symmetric() && (1..=m.nrows()).all(|k| determinant(&m.leading_minor(k)).is_positive())
}

/// `U * M * V = D` with `U`, `V` unimodular and `D` diagonal, the nonzero
/// diagonal entries positive and each dividing the next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    /// Inverse of `u`, maintained alongside it.
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub d: IntMatrix,
}

impl SmithDecomposition {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.nrows().min(self.d.ncols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }

    /// Diagonal entries different from 1: the invariant factors of the
    /// cokernel (a zero entry would mean a free summand).
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal().into_iter().filter(|x| !x.is_one()).collect()
    }

    pub fn verify(&self, m: &IntMatrix) -> bool {
        let udv = self.u.mul(m).and_then(|um| um.mul(&self.v));
        let uu = self.u.mul(&self.u_inv);
        matches!(udv, Ok(ref p) if *p == self.d)
            && matches!(uu, Ok(ref p) if *p == IntMatrix::identity(self.u.nrows()))
            && self.d.is_diagonal()
            && determinant(&self.u).abs().is_one()
            && determinant(&self.v).abs().is_one()
    }
}

/// Smith normal form with transforms, pivoting on the smallest nonzero entry.
pub fn smith_normal_form(m: &IntMatrix) -> Result<SmithDecomposition, LinalgError> {
    let rows = m.nrows();
    let cols = m.ncols();
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut u_inv = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    // Row op `row[dst] += c * row[src]` on A and U is undone on U^{-1} by
    // `col[src] -= c * col[dst]`.
    let row_add = |a: &mut IntMatrix, u: &mut IntMatrix, ui: &mut IntMatrix, dst: usize, src: usize, c: &BigInt| {
        a.add_row_multiple(dst, src, c);
        u.add_row_multiple(dst, src, c);
        ui.add_col_multiple(src, dst, &-c);
    };

    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero |entry| in the trailing block
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[(i, j)].is_zero() {
                        continue;
                    }
                    if pivot.is_none_or(|(pi, pj)| a[(i, j)].abs() < a[(pi, pj)].abs()) {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                break;
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            u_inv.swap_cols(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = a[(i, t)].div_floor(&a[(t, t)]);
                row_add(&mut a, &mut u, &mut u_inv, i, t, &-q);
                if !a[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = a[(t, j)].div_floor(&a[(t, t)]);
                a.add_col_multiple(j, t, &-&q);
                v.add_col_multiple(j, t, &-q);
                if !a[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Row and column are cleared; enforce divisibility of the rest.
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !a[(i, j)].is_multiple_of(&a[(t, t)]));
            match offender {
                Some((i, _)) => {
                    row_add(&mut a, &mut u, &mut u_inv, t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
    }

    let snf = SmithDecomposition { u, u_inv, v, d: a };
    if !snf.verify(m) {
        return Err(LinalgError::SmithVerification);
    }
    Ok(snf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    /// Cofactor expansion; independent of the elimination code path.
    fn cofactor_det(m: &IntMatrix) -> BigInt {
        let n = m.nrows();
        if n == 0 {
            return BigInt::one();
        }
        if n == 1 {
            return m[(0, 0)].clone();
        }
        let mut acc = BigInt::zero();
        for j in 0..n {
            if m[(0, j)].is_zero() {
                continue;
            }
            let mut minor = IntMatrix::zeros(n - 1, n - 1);
            for i in 1..n {
                let mut cc = 0;
                for k in 0..n {
                    if k == j {
                        continue;
                    }
                    minor[(i - 1, cc)] = m[(i, k)].clone();
                    cc += 1;
                }
            }
            let term = &m[(0, j)] * cofactor_det(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    fn e8_neg() -> IntMatrix {
        // chain 0..7 with vertex 7 attached to vertex 2
        let mut m = IntMatrix::zeros(8, 8);
        for i in 0..8 {
            m[(i, i)] = BigInt::from(2);
        }
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 7)];
        for (a, b) in edges {
            m[(a, b)] = BigInt::from(-1);
            m[(b, a)] = BigInt::from(-1);
        }
        m
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(determinant(&mat(&[&[2]])), BigInt::from(2));
        assert_eq!(determinant(&mat(&[&[2, -1], &[-1, 2]])), BigInt::from(3));
        let e8 = e8_neg();
        assert_eq!(cofactor_det(&e8), BigInt::one());
        assert_eq!(determinant(&e8), BigInt::one());
    }

    #[test]
    fn determinant_needs_pivoting() {
        let m = mat(&[&[0, 1, 2], &[1, 0, 3], &[4, -3, 8]]);
        assert_eq!(determinant(&m), cofactor_det(&m));
        assert_eq!(determinant(&mat(&[&[1, 2], &[2, 4]])), BigInt::zero());
    }

    #[test]
    fn inverse_examples() {
        let inv = inverse(&mat(&[&[2]])).unwrap();
        assert_eq!(inv[(0, 0)], BigRational::new(1.into(), 2.into()));

        let inv = inverse(&mat(&[&[2, -1], &[-1, 2]])).unwrap();
        let third = |k: i64| BigRational::new(k.into(), 3.into());
        assert_eq!(inv.row(0), &[third(2), third(1)]);
        assert_eq!(inv.row(1), &[third(1), third(2)]);

        let e8 = e8_neg();
        let inv = inverse(&e8).unwrap();
        assert!(inv.mul_int(&e8).unwrap().is_identity());
        assert!(inv.data.iter().all(|x| x.is_integer() && x.is_positive()));
    }

    #[test]
    fn inverse_with_row_swaps() {
        let m = mat(&[&[0, 1, 2], &[1, 0, 3], &[4, -3, 8]]);
        let inv = inverse(&m).unwrap();
        assert!(inv.mul_int(&m).unwrap().is_identity());
    }

    #[test]
    fn singular_inverse_rejected() {
        assert_eq!(
            inverse(&mat(&[&[1, -1], &[-1, 1]])).unwrap_err(),
            LinalgError::SingularMatrix
        );
    }

    #[test]
    fn positive_definite_check() {
        assert!(is_positive_definite(&mat(&[&[2, -1], &[-1, 2]])));
        assert!(!is_positive_definite(&mat(&[&[1, -1], &[-1, 1]])));
        assert!(is_positive_definite(&e8_neg()));
    }

    #[test]
    fn smith_examples() {
        let snf = smith_normal_form(&IntMatrix::identity(3)).unwrap();
        assert_eq!(snf.d, IntMatrix::identity(3));

        let snf = smith_normal_form(&mat(&[&[2]])).unwrap();
        assert_eq!(snf.diagonal(), vec![BigInt::from(2)]);

        let snf = smith_normal_form(&mat(&[&[2, -1], &[-1, 2]])).unwrap();
        assert_eq!(snf.diagonal(), vec![BigInt::from(1), BigInt::from(3)]);
    }

    #[test]
    fn smith_divisibility_order() {
        // diag(2, 3) has invariant factors (1, 6)
        let snf = smith_normal_form(&mat(&[&[2, 0], &[0, 3]])).unwrap();
        assert_eq!(snf.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
        let snf = smith_normal_form(&mat(&[&[4, 0, 0], &[0, 6, 0], &[0, 0, 10]])).unwrap();
        assert_eq!(
            snf.diagonal(),
            vec![BigInt::from(2), BigInt::from(2), BigInt::from(60)]
        );
    }

    #[test]
    fn smith_singular_matrix() {
        let snf = smith_normal_form(&mat(&[&[1, -1], &[-1, 1]])).unwrap();
        assert_eq!(snf.diagonal(), vec![BigInt::from(1), BigInt::zero()]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_square() -> impl Strategy<Value = IntMatrix> {
            (1usize..=5).prop_flat_map(|n| {
                proptest::collection::vec(-6i64..=6, n * n).prop_map(move |v| {
                    let rows: Vec<Vec<i64>> = v.chunks(n).map(|c| c.to_vec()).collect();
                    IntMatrix::from_rows(&rows)
                })
            })
        }

        proptest! {
            #[test]
            fn det_matches_cofactor(m in small_square()) {
                prop_assert_eq!(determinant(&m), cofactor_det(&m));
            }

            #[test]
            fn inverse_times_matrix_is_identity(m in small_square()) {
                prop_assume!(!determinant(&m).is_zero());
                let inv = inverse(&m).unwrap();
                prop_assert!(inv.mul_int(&m).unwrap().is_identity());
                let det = determinant(&m);
                for x in &inv.data {
                    prop_assert!((x * BigRational::from_integer(det.clone())).is_integer());
                }
            }

            #[test]
            fn smith_product_of_diagonal_is_det(m in small_square()) {
                let snf = smith_normal_form(&m).unwrap();
                prop_assert!(snf.verify(&m));
                let prod: BigInt = snf.diagonal().iter().product();
                prop_assert_eq!(prod, determinant(&m).abs());
                let diag = snf.diagonal();
                for w in diag.windows(2) {
                    if !w[1].is_zero() {
                        prop_assert!(w[1].is_multiple_of(&w[0]));
                    }
                }
            }
        }
    }
}
