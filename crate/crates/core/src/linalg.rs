//! Dense vectors and matrices over `F_q`.
//!
//! Storage and accessors are 0-based. The elementary matrix constructors
//! [`perm_matrix`] and [`unit_matrix`] take 1-based indices, as do all text
//! formats.

use std::fmt;
use std::ops::{Index, IndexMut};

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::{Fe, FieldParams};

/// A column vector over `F_q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vector(pub Vec<Fe>);

impl Vector {
    pub fn zeros(n: usize) -> Self {
        Vector(vec![Fe::ZERO; n])
    }

    /// Standard basis vector `e_i`, 1-based.
    pub fn unit(i: usize, n: usize) -> Result<Self> {
        check_index(i, n)?;
        let mut v = Vector::zeros(n);
        v.0[i - 1] = Fe::ONE;
        Ok(v)
    }

    pub fn from_values(values: &[u32]) -> Self {
        Vector(values.iter().map(|&v| Fe(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|a| a.is_zero())
    }

    pub fn entries(&self) -> &[Fe] {
        &self.0
    }

    pub fn scale(&self, field: &FieldParams, c: Fe) -> Vector {
        Vector(self.0.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn add(&self, field: &FieldParams, other: &Vector) -> Result<Vector> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!("vector lengths {} and {}", self.len(), other.len())));
        }
        Ok(Vector(self.0.iter().zip(&other.0).map(|(&a, &b)| field.add(a, b)).collect()))
    }

    /// Entrywise `a -> a^(p^s)`.
    pub fn frobenius(&self, field: &FieldParams, s: u32) -> Vector {
        Vector(self.0.iter().map(|&a| field.frob(a, s)).collect())
    }
}

impl Index<usize> for Vector {
    type Output = Fe;
    fn index(&self, i: usize) -> &Fe {
        &self.0[i]
    }
}

/// Row-major dense matrix over `F_q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl Index<(usize, usize)> for Matrix {
    type Output = Fe;
    fn index(&self, (r, c): (usize, usize)) -> &Fe {
        assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Fe {
        assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Result of row reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: Matrix,
    pub rank: usize,
    /// Pivot column of each nonzero row, 0-based.
    pub pivots: Vec<usize>,
}

fn check_index(i: usize, n: usize) -> Result<()> {
    if i == 0 || i > n {
        Err(Error::IndexOutOfRange { index: i, n })
    } else {
        Ok(())
    }
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Fe>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Fe::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Fe::ONE;
        }
        m
    }

    pub fn diag(entries: &[Fe]) -> Self {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &d) in entries.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from integer encodings, one slice per row.
    pub fn from_values(rows: &[&[u32]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|r| r.iter().map(|&v| Fe(v))).collect();
        Matrix::new(rows.len(), cols, data)
    }

    pub fn from_row_vectors(rows: &[Vector]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("vectors of unequal length".into()));
        }
        let data = rows.iter().flat_map(|r| r.0.iter().copied()).collect();
        Matrix::new(rows.len(), cols, data)
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

    pub fn entries(&self) -> &[Fe] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Fe] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vector(&self, r: usize) -> Vector {
        Vector(self.row(r).to_vec())
    }

    pub fn row_vectors(&self) -> impl Iterator<Item = Vector> + '_ {
        (0..self.rows).map(|r| self.row_vector(r))
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    /// Stacks the rows of `other` below the rows of `self`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!("stacking {} and {} columns", self.cols, other.cols)));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix { rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn mul(&self, field: &FieldParams, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = field.mul(a, other[(k, j)]);
                    out[(i, j)] = field.add(out[(i, j)], prod);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, field: &FieldParams, v: &Vector) -> Result<Vector> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix times length-{} vector",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok(Vector(
            (0..self.rows)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(&v.0)
                        .fold(Fe::ZERO, |acc, (&a, &b)| field.add(acc, field.mul(a, b)))
                })
                .collect(),
        ))
    }

    pub fn scale(&self, field: &FieldParams, c: Fe) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| field.mul(a, c)).collect() }
    }

    pub fn sub(&self, field: &FieldParams, other: &Matrix) -> Result<Matrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("subtracting matrices of different shape".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| field.sub(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    /// Entrywise `a -> a^(p^s)`.
    pub fn frobenius(&self, field: &FieldParams, s: u32) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| field.frob(a, s)).collect() }
    }

    /// First nonzero entry in row-major order.
    pub fn first_nonzero(&self) -> Option<Fe> {
        self.data.iter().copied().find(|a| !a.is_zero())
    }

    /// Gauss-Jordan reduction. Pivots are scanned left to right, rows top
    /// down.
    pub fn rref(&self, field: &FieldParams) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            if pr != row {
                for c in 0..m.cols {
                    m.data.swap(pr * m.cols + c, row * m.cols + c);
                }
            }
            let inv = field.inv(m[(row, col)]).expect("pivot is nonzero");
            for c in col..m.cols {
                m[(row, c)] = field.mul(m[(row, c)], inv);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m[(r, col)];
                if factor.is_zero() {
                    continue;
                }
                let neg = field.neg(factor);
                for c in col..m.cols {
                    let delta = field.mul(neg, m[(row, c)]);
                    m[(r, c)] = field.add(m[(r, c)], delta);
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref { matrix: m, rank: pivots.len(), pivots }
    }

    pub fn rank(&self, field: &FieldParams) -> usize {
        self.rref(field).rank
    }

    pub fn is_invertible(&self, field: &FieldParams) -> bool {
        self.is_square() && self.rank(field) == self.rows
    }

    /// Gauss-Jordan inversion on `[A | I]`.
    pub fn invert(&self, field: &FieldParams) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!("inverting a {}x{} matrix", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug[(r, c)] = self[(r, c)];
            }
            aug[(r, n + r)] = Fe::ONE;
        }
        let red = aug.rref(field);
        if red.pivots.len() < n || red.pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        let mut inv = Matrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv[(r, c)] = red.matrix[(r, n + c)];
            }
        }
        Ok(inv)
    }

    /// Parses the `"a,b,c;d,e,f"` text form.
    pub fn parse(text: &str, field: &FieldParams) -> Result<Matrix> {
        let bad = |msg: String| Error::Parse { line: 0, msg };
        let rows: Vec<Vec<Fe>> = text
            .trim()
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|tok| {
                        let v: u32 = tok.trim().parse().map_err(|_| bad(format!("bad matrix entry {tok:?}")))?;
                        if !field.contains(Fe(v)) {
                            return Err(Error::ElementOutOfRange { value: v, q: field.q() });
                        }
                        Ok(Fe(v))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(bad("ragged matrix rows".into()));
        }
        Matrix::new(rows.len(), cols, rows.into_iter().flatten().collect())
    }

    /// Uniform sample from `GL_n(F_q)`, by rejection.
    pub fn random_invertible<R: Rng + ?Sized>(field: &FieldParams, n: usize, rng: &mut R) -> Matrix {
        loop {
            let data = (0..n * n).map(|_| Fe(rng.gen_range(0..field.q()))).collect();
            let m = Matrix { rows: n, cols: n, data };
            if m.is_invertible(field) {
                return m;
            }
        }
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            if r > 0 {
                f.write_str(";")?;
            }
            for (c, a) in self.row(r).iter().enumerate() {
                if c > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
        }
        Ok(())
    }
}

/// `P_kt`: the identity with rows `k` and `t` swapped (1-based).
pub fn perm_matrix(k: usize, t: usize, n: usize) -> Result<Matrix> {
    check_index(k, n)?;
    check_index(t, n)?;
    let mut m = Matrix::identity(n);
    if k != t {
        let (k, t) = (k - 1, t - 1);
        m[(k, k)] = Fe::ZERO;
        m[(t, t)] = Fe::ZERO;
        m[(k, t)] = Fe::ONE;
        m[(t, k)] = Fe::ONE;
    }
    Ok(m)
}

/// `E_ij`: a single 1 at row `i`, column `j` (1-based).
pub fn unit_matrix(i: usize, j: usize, n: usize) -> Result<Matrix> {
    check_index(i, n)?;
    check_index(j, n)?;
    let mut m = Matrix::zeros(n, n);
    m[(i - 1, j - 1)] = Fe::ONE;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(rows: &[&[u32]]) -> Matrix {
        Matrix::from_values(rows).unwrap()
    }

    #[test]
    fn products() {
        let f2 = FieldParams::new(2, 1).unwrap();
        let a = m(&[&[1, 1], &[0, 1]]);
        assert_eq!(Matrix::identity(2).mul(&f2, &a).unwrap(), a);
        assert_eq!(a.mul_vec(&f2, &Vector::from_values(&[1, 1])).unwrap(), Vector::from_values(&[0, 1]));
        let p12 = perm_matrix(1, 2, 3).unwrap();
        assert_eq!(p12.mul_vec(&f2, &Vector::unit(1, 3).unwrap()).unwrap(), Vector::unit(2, 3).unwrap());
        assert!(a.mul(&f2, &Matrix::identity(3)).is_err());
        assert!(a.mul_vec(&f2, &Vector::zeros(3)).is_err());
    }

    #[test]
    fn rref_examples() {
        let f3 = FieldParams::new(3, 1).unwrap();
        let z = Matrix::zeros(2, 3).rref(&f3);
        assert_eq!((z.rank, z.pivots.is_empty()), (0, true));
        assert_eq!(z.matrix, Matrix::zeros(2, 3));
        let id = Matrix::identity(3).rref(&f3);
        assert_eq!((id.matrix, id.rank, id.pivots), (Matrix::identity(3), 3, vec![0, 1, 2]));
        let r = m(&[&[2, 1], &[1, 2]]).rref(&f3);
        assert_eq!(r.matrix, m(&[&[1, 2], &[0, 0]]));
        assert_eq!(r.rank, 1);
    }

    #[test]
    fn inversion() {
        let f2 = FieldParams::new(2, 1).unwrap();
        assert_eq!(Matrix::identity(3).invert(&f2).unwrap(), Matrix::identity(3));
        let a = m(&[&[1, 1], &[0, 1]]);
        assert_eq!(a.invert(&f2).unwrap(), a);
        assert_eq!(m(&[&[1, 1], &[1, 1]]).invert(&f2), Err(Error::Singular));
        assert!(m(&[&[1, 1]]).invert(&f2).is_err());
    }

    #[test]
    fn elementary_matrices() {
        assert_eq!(perm_matrix(1, 1, 3).unwrap(), Matrix::identity(3));
        assert_eq!(perm_matrix(1, 2, 2).unwrap(), m(&[&[0, 1], &[1, 0]]));
        assert_eq!(unit_matrix(2, 1, 2).unwrap(), m(&[&[0, 0], &[1, 0]]));
        assert_eq!(perm_matrix(0, 1, 2), Err(Error::IndexOutOfRange { index: 0, n: 2 }));
        assert_eq!(unit_matrix(1, 3, 2), Err(Error::IndexOutOfRange { index: 3, n: 2 }));
    }

    #[test]
    fn text_form() {
        let f4 = FieldParams::new(2, 2).unwrap();
        let a = m(&[&[1, 0, 3], &[0, 2, 0]]);
        assert_eq!(a.to_string(), "1,0,3;0,2,0");
        assert_eq!(Matrix::parse("1,0,3; 0,2,0", &f4).unwrap(), a);
        assert!(Matrix::parse("1,0;1", &f4).is_err());
        assert!(Matrix::parse("1,4", &f4).is_err());
        assert!(Matrix::parse("1,x", &f4).is_err());
    }

    fn fields() -> impl Strategy<Value = FieldParams> {
        prop::sample::select(vec![(2, 1), (3, 1), (2, 2), (5, 1), (2, 3)])
            .prop_map(|(p, m)| FieldParams::new(p, m).unwrap())
    }

    // Random row operations on `a`: row space is unchanged.
    fn scramble(field: &FieldParams, a: &Matrix, rng: &mut ChaCha8Rng) -> Matrix {
        let s = Matrix::random_invertible(field, a.rows(), rng);
        s.mul(field, a).unwrap()
    }

    proptest! {
        #[test]
        fn rref_is_canonical(field in fields(), seed in any::<u64>(), rows in 1usize..5, cols in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let data = (0..rows * cols).map(|_| Fe(rng.gen_range(0..field.q()))).collect();
            let a = Matrix::new(rows, cols, data).unwrap();
            let r = a.rref(&field);
            prop_assert_eq!(&r.matrix.rref(&field).matrix, &r.matrix);
            prop_assert_eq!(&scramble(&field, &a, &mut rng).rref(&field).matrix, &r.matrix);
        }

        #[test]
        fn inverse_is_two_sided(field in fields(), seed in any::<u64>(), n in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = Matrix::random_invertible(&field, n, &mut rng);
            let inv = a.invert(&field).unwrap();
            prop_assert_eq!(inv.mul(&field, &a).unwrap(), Matrix::identity(n));
            prop_assert_eq!(a.mul(&field, &inv).unwrap(), Matrix::identity(n));
        }

        #[test]
        fn rank_of_product_is_bounded(field in fields(), seed in any::<u64>(), n in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut rand_mat = || {
                let data = (0..n * n).map(|_| Fe(rng.gen_range(0..field.q()))).collect();
                Matrix::new(n, n, data).unwrap()
            };
            let (a, b) = (rand_mat(), rand_mat());
            let ab = a.mul(&field, &b).unwrap();
            prop_assert!(ab.rank(&field) <= a.rank(&field).min(b.rank(&field)));
        }
    }
}
