//! Exact integer-lattice linear algebra: Smith normal form with transform
//! tracking, integer linear solves, image-membership tests, and unimodular
//! basis completion.
//!
//! Instances here are small (rank <= ~10, <= ~20 rows), so the algorithms
//! favour clarity over asymptotics; pivots are chosen with minimal absolute
//! value to limit coefficient growth.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::laurent::ExpVec;

/// Dense matrix of arbitrary-precision integers, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows_i64(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(x));
            }
        }
        m
    }

    pub fn from_exp_rows(rows: &[ExpVec]) -> Self {
        Self::from_rows_i64(&rows.iter().map(|v| v.entries().to_vec()).collect::<Vec<_>>())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        (0..self.cols).map(|j| self.get(i, j).clone()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix dimension mismatch");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "matrix dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn mul_exp(&self, v: &ExpVec) -> ExpVec {
        let big: Vec<BigInt> = v.entries().iter().map(|&x| BigInt::from(x)).collect();
        let out = self.mul_vec(&big);
        ExpVec::new(
            out.iter()
                .map(|x| i64::try_from(x).expect("exponent overflow"))
                .collect(),
        )
    }

    pub fn to_rows_i64(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| i64::try_from(self.get(i, j)).expect("entry overflow"))
                    .collect()
            })
            .collect()
    }

    /// Signed determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                let swap = (k + 1..n).find(|&i| !m.get(i, k).is_zero());
                match swap {
                    Some(i) => {
                        for j in 0..n {
                            let a = m.get(k, j).clone();
                            let b = m.get(i, j).clone();
                            m.set(k, j, b);
                            m.set(i, j, a);
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
                m.set(i, k, BigInt::zero());
            }
            prev = m.get(k, k).clone();
        }
        sign * m.get(n - 1, n - 1).clone()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
}

impl std::fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.rows {
            writeln!(
                f,
                "[{}]",
                (0..self.cols)
                    .map(|j| self.get(i, j).to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            )?;
        }
        Ok(())
    }
}

/// Smith normal form: U * A * V = D with U, V unimodular and D diagonal with
/// d_1 | d_2 | ... >= 0. Inverse transforms are tracked alongside.
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SnfDecomposition {
    pub fn rank(&self) -> usize {
        let n = self.d.rows().min(self.d.cols());
        (0..n).take_while(|&i| !self.d.get(i, i).is_zero()).count()
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d.get(i, i).clone()).collect()
    }
}

struct SnfCalc {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl SnfCalc {
    fn new(a: IntMatrix) -> Self {
        let (r, c) = (a.rows(), a.cols());
        SnfCalc {
            a,
            u: IntMatrix::identity(r),
            u_inv: IntMatrix::identity(r),
            v: IntMatrix::identity(c),
            v_inv: IntMatrix::identity(c),
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for m in [&mut self.a, &mut self.u] {
            for col in 0..m.cols() {
                let x = m.get(i, col).clone();
                let y = m.get(j, col).clone();
                m.set(i, col, y);
                m.set(j, col, x);
            }
        }
        // u_inv gets the inverse op applied on the right: swap columns
        for row in 0..self.u_inv.rows() {
            let x = self.u_inv.get(row, i).clone();
            let y = self.u_inv.get(row, j).clone();
            self.u_inv.set(row, i, y);
            self.u_inv.set(row, j, x);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for m in [&mut self.a, &mut self.v] {
            for row in 0..m.rows() {
                let x = m.get(row, i).clone();
                let y = m.get(row, j).clone();
                m.set(row, i, y);
                m.set(row, j, x);
            }
        }
        // v_inv gets the inverse op applied on the left: swap rows
        for col in 0..self.v_inv.cols() {
            let x = self.v_inv.get(i, col).clone();
            let y = self.v_inv.get(j, col).clone();
            self.v_inv.set(i, col, y);
            self.v_inv.set(j, col, x);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for col in 0..self.a.cols() {
            let x = -self.a.get(i, col);
            self.a.set(i, col, x);
        }
        for col in 0..self.u.cols() {
            let x = -self.u.get(i, col);
            self.u.set(i, col, x);
        }
        for row in 0..self.u_inv.rows() {
            let x = -self.u_inv.get(row, i);
            self.u_inv.set(row, i, x);
        }
    }

    /// row i -= k * row j
    fn add_row_multiple(&mut self, i: usize, j: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for col in 0..self.a.cols() {
            let x = self.a.get(i, col) - k * self.a.get(j, col);
            self.a.set(i, col, x);
        }
        for col in 0..self.u.cols() {
            let x = self.u.get(i, col) - k * self.u.get(j, col);
            self.u.set(i, col, x);
        }
        // inverse op on u_inv from the right: col j += k * col i
        for row in 0..self.u_inv.rows() {
            let x = self.u_inv.get(row, j) + k * self.u_inv.get(row, i);
            self.u_inv.set(row, j, x);
        }
    }

    /// col i -= k * col j
    fn add_col_multiple(&mut self, i: usize, j: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for row in 0..self.a.rows() {
            let x = self.a.get(row, i) - k * self.a.get(row, j);
            self.a.set(row, i, x);
        }
        for row in 0..self.v.rows() {
            let x = self.v.get(row, i) - k * self.v.get(row, j);
            self.v.set(row, i, x);
        }
        // inverse op on v_inv from the left: row j += k * row i
        for col in 0..self.v_inv.cols() {
            let x = self.v_inv.get(j, col) + k * self.v_inv.get(i, col);
            self.v_inv.set(j, col, x);
        }
    }

    fn find_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let x = self.a.get(i, j);
                if x.is_zero() {
                    continue;
                }
                let mag = x.abs();
                match &best {
                    Some((_, _, m)) if *m <= mag => {}
                    _ => best = Some((i, j, mag)),
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    fn process(&mut self) {
        let limit = self.a.rows().min(self.a.cols());
        let mut t = 0;
        while t < limit {
            let Some((pi, pj)) = self.find_pivot(t) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);

            // clear row and column t; restarts when a division leaves a
            // remainder, which strictly shrinks the pivot
            let mut dirty = true;
            while dirty {
                dirty = false;
                for i in t + 1..self.a.rows() {
                    if self.a.get(i, t).is_zero() {
                        continue;
                    }
                    let q = div_round(self.a.get(i, t), self.a.get(t, t));
                    self.add_row_multiple(i, t, &q);
                    if !self.a.get(i, t).is_zero() {
                        self.swap_rows(t, i);
                        dirty = true;
                    }
                }
                for j in t + 1..self.a.cols() {
                    if self.a.get(t, j).is_zero() {
                        continue;
                    }
                    let q = div_round(self.a.get(t, j), self.a.get(t, t));
                    self.add_col_multiple(j, t, &q);
                    if !self.a.get(t, j).is_zero() {
                        self.swap_cols(t, j);
                        dirty = true;
                    }
                }
            }

            if self.a.get(t, t).is_negative() {
                self.negate_row(t);
            }

            // enforce divisibility d_t | entries of the trailing block
            let mut fixed = true;
            'scan: for i in t + 1..self.a.rows() {
                for j in t + 1..self.a.cols() {
                    if !(self.a.get(i, j) % self.a.get(t, t)).is_zero() {
                        // pull the offending row up and redo this position
                        let one = BigInt::from(-1);
                        self.add_row_multiple(t, i, &one);
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                t += 1;
            }
        }
    }
}

/// Quotient for elimination; rounding toward the nearest integer keeps
/// remainders at most half the pivot.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    let two_r = BigInt::from(2) * r.abs();
    if two_r > b.abs() {
        if (a.is_negative()) != (b.is_negative()) {
            q - 1
        } else {
            q + 1
        }
    } else {
        q
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SnfDecomposition {
    let mut calc = SnfCalc::new(a.clone());
    calc.process();
    SnfDecomposition {
        u: calc.u,
        u_inv: calc.u_inv,
        d: calc.a,
        v: calc.v,
        v_inv: calc.v_inv,
    }
}

/// Some integer solution x of A x = b, or None when none exists. When the
/// solution space is a coset, the representative with zero coefficients on
/// the free Smith coordinates is returned.
pub fn solve(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows(), b.len(), "dimension mismatch");
    let snf = smith_normal_form(a);
    let ub = snf.u.mul_vec(b);
    let mut y = vec![BigInt::zero(); a.cols()];
    let k = a.rows().min(a.cols());
    for (i, ub_i) in ub.iter().enumerate() {
        if i < k && !snf.d.get(i, i).is_zero() {
            let (q, r) = ub_i.div_rem(snf.d.get(i, i));
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ub_i.is_zero() {
            return None;
        }
    }
    Some(snf.v.mul_vec(&y))
}

/// Whether b lies in the column span A * Z^k.
pub fn in_image(a: &IntMatrix, b: &[BigInt]) -> bool {
    solve(a, b).is_some()
}

/// Kernel of A as a basis of integer column vectors, read off from the
/// Smith decomposition.
pub fn kernel_basis(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(a);
    let rank = snf.rank();
    (rank..a.cols()).map(|j| snf.v.col(j)).collect()
}

/// Extend linearly independent columns to a square matrix of determinant
/// +-1 whose leading columns are exactly the inputs. Fails when the inputs
/// are dependent or span a non-primitive sublattice.
pub fn extend_to_unimodular_basis(vs: &[Vec<BigInt>], n: usize) -> Result<IntMatrix, Error> {
    let k = vs.len();
    if k > n {
        return Err(Error::InvalidInput(format!(
            "{k} vectors cannot be independent in rank {n}"
        )));
    }
    let mut a = IntMatrix::zero(n, k);
    for (j, v) in vs.iter().enumerate() {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
        for (i, x) in v.iter().enumerate() {
            a.set(i, j, x.clone());
        }
    }
    if k == 0 {
        return Ok(IntMatrix::identity(n));
    }
    let snf = smith_normal_form(&a);
    if snf.rank() < k {
        return Err(Error::InvalidInput(
            "vectors are linearly dependent".into(),
        ));
    }
    for d in snf.diagonal() {
        if !d.is_one() {
            return Err(Error::InvalidInput(format!(
                "vectors span a sublattice of index {d}; not extendable"
            )));
        }
    }
    // U A V = [I_k; 0], so the columns of U^-1 * diag(V^-1, I) start with
    // A itself and the whole square matrix is unimodular.
    let mut w = IntMatrix::identity(n);
    for i in 0..k {
        for j in 0..k {
            w.set(i, j, snf.v_inv.get(i, j).clone());
        }
    }
    let b = snf.u_inv.mul(&w);
    debug_assert!(b.det().abs().is_one());
    Ok(b)
}

/// Inverse of a unimodular square matrix.
pub fn inverse_unimodular(a: &IntMatrix) -> Result<IntMatrix, Error> {
    if !a.is_square() {
        return Err(Error::InvalidInput("matrix not square".into()));
    }
    let snf = smith_normal_form(a);
    if snf.diagonal().iter().any(|d| !d.is_one()) {
        return Err(Error::InvalidInput("matrix is not unimodular".into()));
    }
    Ok(snf.v.mul(&snf.u))
}

pub fn vec_i64_to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn vec_big_to_i64(v: &[BigInt]) -> Vec<i64> {
    v.iter()
        .map(|x| i64::try_from(x).expect("entry overflow"))
        .collect()
}
