//! Exact integer and rational linear algebra.
//!
//! Everything here works over [`BigInt`] / [`BigRational`]; there is no
//! floating point anywhere. The central pieces are the Smith normal form
//! (used for every cokernel and orbifold group computation) and a row-style
//! Hermite normal form (used to canonicalize lattice bases).

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMatrix = Matrix<BigInt>;
pub type RatMatrix = Matrix<BigRational>;

impl<T> Matrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl<T: Clone> Matrix<T> {
    /// Builds a matrix from row vectors. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().cloned().collect(),
        }
    }

    /// Builds an `nrows x columns.len()` matrix whose columns are `columns`.
    pub fn from_columns(nrows: usize, columns: &[Vec<T>]) -> Self {
        assert!(columns.iter().all(|c| c.len() == nrows), "ragged columns");
        let cols = columns.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for i in 0..nrows {
            for c in columns {
                data.push(c[i].clone());
            }
        }
        Matrix {
            rows: nrows,
            cols,
            data,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn to_columns(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Submatrix with the given column indices, in that order.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Matrix::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])].clone())
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: Clone + Num> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diagonal(entries: &[T]) -> Self {
        let n = entries.len();
        Matrix::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { T::zero() })
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "incompatible shapes");
        Matrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self[(i, k)].clone() * other[(k, j)].clone();
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "incompatible shapes");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    // row[target] += c * row[source]
    fn add_row_multiple(&mut self, target: usize, source: usize, c: &T) {
        for j in 0..self.cols {
            let v = self[(source, j)].clone() * c.clone();
            let e = &mut self[(target, j)];
            *e = e.clone() + v;
        }
    }

    // col[target] += c * col[source]
    fn add_col_multiple(&mut self, target: usize, source: usize, c: &T) {
        for i in 0..self.rows {
            let v = self[(i, source)].clone() * c.clone();
            let e = &mut self[(i, target)];
            *e = e.clone() + v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let e = &mut self[(i, j)];
            *e = T::zero() - e.clone();
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let e = &mut self[(i, j)];
            *e = T::zero() - e.clone();
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Matrix::from_rows(&rows)
    }

    pub fn to_rat(&self) -> RatMatrix {
        self.map(|x| BigRational::from_integer(x.clone()))
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut negate = false;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !m[(i, k)].is_zero()) {
                    Some(i) => {
                        m.swap_rows(i, k);
                        negate = !negate;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)]) / &prev;
                    m[(i, j)] = v;
                }
            }
            prev = m[(k, k)].clone();
        }
        let d = m[(n - 1, n - 1)].clone();
        if negate {
            -d
        } else {
            d
        }
    }

    /// Rank over the rationals, computed without leaving the integers.
    pub fn rank(&self) -> usize {
        let mut m = self.to_rows();
        let ncols = self.cols;
        let mut rank = 0;
        for c in 0..ncols {
            let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            let pivot_row = m[rank].clone();
            for row in m.iter_mut().skip(rank + 1) {
                if row[c].is_zero() {
                    continue;
                }
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x = &*x * &pivot_row[c] - &f * p;
                }
                let g = content(row);
                if !g.is_zero() && !g.is_one() {
                    for x in row.iter_mut() {
                        *x = &*x / &g;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

impl RatMatrix {
    pub fn from_int(m: &IntMatrix) -> Self {
        m.to_rat()
    }

    /// Returns the integer matrix when every entry is integral.
    pub fn to_int(&self) -> Option<IntMatrix> {
        if self.data.iter().all(BigRational::is_integer) {
            Some(self.map(BigRational::to_integer))
        } else {
            None
        }
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in 0..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = -m[(i, c)].clone();
                    m.add_row_multiple(i, r, &f);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let aug = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(Matrix::from_fn(n, n, |i, j| r[(i, j + n)].clone()))
    }

    /// Solves `self * x = b` for square nonsingular `self`.
    pub fn solve(&self, b: &[BigRational]) -> Option<Vec<BigRational>> {
        self.inverse().map(|inv| inv.mul_vec(b))
    }

    /// Basis of the right null space.
    pub fn nullspace(&self) -> Vec<Vec<BigRational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![BigRational::zero(); self.cols];
                v[f] = BigRational::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(row, f)].clone();
                }
                v
            })
            .collect()
    }

    pub fn determinant(&self) -> BigRational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let mut m = self.clone();
        let n = m.rows;
        let mut det = BigRational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return BigRational::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            det *= m[(c, c)].clone();
            for i in c + 1..n {
                if !m[(i, c)].is_zero() {
                    let f = -(&m[(i, c)] / &m[(c, c)]);
                    m.add_row_multiple(i, c, &f);
                }
            }
        }
        det
    }
}

/// gcd of the entries (zero for the zero vector).
pub fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

pub fn is_primitive(v: &[BigInt]) -> bool {
    content(v).is_one()
}

pub fn lcm_all<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |l, x| l.lcm(x))
}

pub fn to_rat_vec(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

pub fn dot<T: Clone + Num>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Smith decomposition `D = S * A * T^-1` with `S`, `T` unimodular.
///
/// The inverses of both transforms are tracked alongside, so
/// `A = S^-1 * D * T` can be reconstructed without a separate inversion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub s: IntMatrix,
    pub t: IntMatrix,
    pub d: IntMatrix,
    s_inv: IntMatrix,
    t_inv: IntMatrix,
}

impl SmithDecomposition {
    pub fn s_inverse(&self) -> &IntMatrix {
        &self.s_inv
    }

    pub fn t_inverse(&self) -> &IntMatrix {
        &self.t_inv
    }

    /// The `min(rows, cols)` diagonal entries of `D`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }

    /// Nonzero diagonal entries different from one.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal()
            .into_iter()
            .filter(|x| !x.is_zero() && !x.is_one())
            .collect()
    }

    /// `S^-1 * D * T`, which equals the original matrix.
    pub fn reconstruct(&self) -> IntMatrix {
        self.s_inv.mul(&self.d).mul(&self.t)
    }
}

/// Smith normal form with a deterministic pivoting rule: the smallest
/// nonzero magnitude in the active submatrix, ties broken by lowest
/// `(row, col)`.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut s = IntMatrix::identity(m);
    let mut s_inv = IntMatrix::identity(m);
    let mut t = IntMatrix::identity(n);
    let mut t_inv = IntMatrix::identity(n);

    let row_add = |d: &mut IntMatrix, s: &mut IntMatrix, s_inv: &mut IntMatrix, i, src, c: &BigInt| {
        d.add_row_multiple(i, src, c);
        s.add_row_multiple(i, src, c);
        s_inv.add_col_multiple(src, i, &-c);
    };
    let col_add = |d: &mut IntMatrix, t: &mut IntMatrix, t_inv: &mut IntMatrix, j, src, c: &BigInt| {
        d.add_col_multiple(j, src, c);
        t_inv.add_col_multiple(j, src, c);
        t.add_row_multiple(src, j, &-c);
    };

    let mut k = 0;
    while k < m.min(n) {
        let mut best: Option<(usize, usize)> = None;
        for i in k..m {
            for j in k..n {
                let v = &d[(i, j)];
                if v.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| v.abs() < d[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap_rows(k, pi);
        s.swap_rows(k, pi);
        s_inv.swap_cols(k, pi);
        d.swap_cols(k, pj);
        t_inv.swap_cols(k, pj);
        t.swap_rows(k, pj);

        let mut clean = true;
        for i in k + 1..m {
            if d[(i, k)].is_zero() {
                continue;
            }
            let q = d[(i, k)].div_floor(&d[(k, k)]);
            row_add(&mut d, &mut s, &mut s_inv, i, k, &-q);
            clean &= d[(i, k)].is_zero();
        }
        for j in k + 1..n {
            if d[(k, j)].is_zero() {
                continue;
            }
            let q = d[(k, j)].div_floor(&d[(k, k)]);
            col_add(&mut d, &mut t, &mut t_inv, j, k, &-q);
            clean &= d[(k, j)].is_zero();
        }
        if !clean {
            continue;
        }
        let pivot = d[(k, k)].clone();
        let offender = (k + 1..m).find(|&i| (k + 1..n).any(|j| !d[(i, j)].is_multiple_of(&pivot)));
        if let Some(i) = offender {
            row_add(&mut d, &mut s, &mut s_inv, k, i, &BigInt::one());
            continue;
        }
        if pivot.is_negative() {
            d.negate_row(k);
            s.negate_row(k);
            s_inv.negate_col(k);
        }
        k += 1;
    }
    SmithDecomposition { s, t, d, s_inv, t_inv }
}

/// Finitely generated abelian group `Z^free_rank + Z/d_1 + ... + Z/d_r` with
/// `d_1 | d_2 | ... | d_r` and every `d_i >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    invariant_factors: Vec<BigInt>,
    free_rank: usize,
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        FiniteAbelianGroup {
            invariant_factors: Vec::new(),
            free_rank: 0,
        }
    }

    pub fn cyclic(order: &BigInt) -> Self {
        // the cokernel of a 1x1 matrix is exactly Z/order
        cokernel(&IntMatrix::from_rows(&[vec![order.clone()]]))
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty() && self.free_rank == 0
    }

    /// Group order; `None` when the group is infinite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.invariant_factors.iter().product())
    }

    /// Torsion subgroup.
    pub fn torsion(&self) -> FiniteAbelianGroup {
        FiniteAbelianGroup {
            invariant_factors: self.invariant_factors.clone(),
            free_rank: 0,
        }
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self.invariant_factors.iter().map(|d| format!("Z/{d}")).collect();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Cokernel `Z^n / A Z^m` of the column lattice of an `n x m` matrix.
pub fn cokernel(a: &IntMatrix) -> FiniteAbelianGroup {
    let snf = smith_normal_form(a);
    FiniteAbelianGroup {
        invariant_factors: snf.invariant_factors(),
        free_rank: a.rows() - snf.rank(),
    }
}

/// Integer basis of `{x in Z^cols : A x = 0}` in row Hermite form.
pub fn integer_kernel(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    let basis: Vec<Vec<BigInt>> = (r..a.cols()).map(|j| snf.t_inverse().column(j)).collect();
    if basis.is_empty() {
        return basis;
    }
    row_hermite_form(&IntMatrix::from_rows(&basis)).to_rows()
}

/// Row-style Hermite normal form: nonzero rows only, echelon shape, positive
/// pivots, entries above each pivot reduced into `[0, pivot)`. Spans the same
/// row lattice as the input.
pub fn row_hermite_form(a: &IntMatrix) -> IntMatrix {
    let mut m = a.clone();
    let mut r = 0;
    for c in 0..m.cols() {
        if r == m.rows() {
            break;
        }
        loop {
            let p = (r..m.rows())
                .filter(|&i| !m[(i, c)].is_zero())
                .min_by(|&x, &y| m[(x, c)].abs().cmp(&m[(y, c)].abs()).then(x.cmp(&y)));
            let Some(p) = p else { break };
            m.swap_rows(r, p);
            let mut done = true;
            for i in r + 1..m.rows() {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let q = m[(i, c)].div_floor(&m[(r, c)]);
                m.add_row_multiple(i, r, &-q);
                done &= m[(i, c)].is_zero();
            }
            if done {
                break;
            }
        }
        if m[(r, c)].is_zero() {
            continue;
        }
        if m[(r, c)].is_negative() {
            m.negate_row(r);
        }
        for i in 0..r {
            let q = m[(i, c)].div_floor(&m[(r, c)]);
            if !q.is_zero() {
                m.add_row_multiple(i, r, &-q);
            }
        }
        r += 1;
    }
    Matrix::from_fn(r, m.cols(), |i, j| m[(i, j)].clone())
}

/// Basis of the lattice `Z^dim + <gens>` for rational generators.
///
/// Returns the basis as the columns of a lower-triangular rational matrix
/// together with the index `[Z^dim + <gens> : Z^dim]`, which equals
/// `1 / |det basis|`.
pub fn lattice_basis_from_generators(
    dim: usize,
    gens: &[Vec<BigRational>],
) -> Result<(RatMatrix, BigInt), LatticeError> {
    if let Some(g) = gens.iter().find(|g| g.len() != dim) {
        return Err(LatticeError::DimensionMismatch {
            expected: dim,
            found: g.len(),
        });
    }
    let denom = lcm_all(gens.iter().flatten().map(|x| x.denom()));
    let mut rows: Vec<Vec<BigInt>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| if i == j { denom.clone() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    for g in gens {
        rows.push(g.iter().map(|x| (x * &denom).to_integer()).collect());
    }
    let h = row_hermite_form(&IntMatrix::from_rows(&rows));
    debug_assert_eq!(h.rows(), dim);
    let det_h: BigInt = (0..dim).map(|i| h[(i, i)].clone()).product();
    let index = num_traits::pow(denom.clone(), dim) / det_h;
    let basis = h.transpose().map(|x| BigRational::new(x.clone(), denom.clone()));
    Ok((basis, index))
}

/// Renders an integer as `i64` when it fits.
pub fn small(x: &BigInt) -> Option<i64> {
    x.to_i64()
}
