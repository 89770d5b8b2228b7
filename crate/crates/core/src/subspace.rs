//! Nontrivial proper subspaces of `F_q^n`, stored by their RREF basis.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::gf::{Fe, FieldParams};
use crate::linalg::{Matrix, Vector};

/// A subspace `W` with `1 <= dim W <= n - 1`, identified by the unique RREF
/// of any of its bases. Equality is entrywise equality of that matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    basis: Matrix,
}

/// Outcome of spanning a set of vectors, before the vertex-set restriction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Span {
    Zero,
    Proper(Subspace),
    Full,
}

impl Span {
    pub fn into_subspace(self) -> Result<Subspace> {
        match self {
            Span::Proper(w) => Ok(w),
            Span::Zero => Err(Error::ZeroSpan),
            Span::Full => Err(Error::FullSpan),
        }
    }
}

/// Row space of `rows` in canonical form.
pub fn span_rows(field: &FieldParams, rows: &Matrix) -> Span {
    let red = rows.rref(field);
    match red.rank {
        0 => Span::Zero,
        k if k == rows.cols() => Span::Full,
        k => {
            let data = red.matrix.entries()[..k * rows.cols()].to_vec();
            let basis = Matrix::new(k, rows.cols(), data).expect("truncated rref has consistent shape");
            Span::Proper(Subspace { basis })
        }
    }
}

/// `<vectors>` as a vertex; the zero span and the whole space are errors.
pub fn span(field: &FieldParams, vectors: &[Vector]) -> Result<Subspace> {
    if vectors.is_empty() {
        return Err(Error::ZeroSpan);
    }
    span_rows(field, &Matrix::from_row_vectors(vectors)?).into_subspace()
}

impl Subspace {
    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.basis.cols()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> impl Iterator<Item = Vector> + '_ {
        self.basis.row_vectors()
    }

    fn check_ambient(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::DimensionMismatch(format!("ambient dimensions {} and {n}", self.n())));
        }
        Ok(())
    }

    /// `dim(self + other)`.
    pub fn sum_dim(&self, field: &FieldParams, other: &Subspace) -> Result<usize> {
        self.check_ambient(other.n())?;
        Ok(self.basis.vstack(&other.basis)?.rank(field))
    }

    pub fn contains(&self, field: &FieldParams, v: &Vector) -> Result<bool> {
        self.check_ambient(v.len())?;
        let row = Matrix::from_row_vectors(std::slice::from_ref(v))?;
        Ok(self.basis.vstack(&row)?.rank(field) == self.dim())
    }

    pub fn is_subspace_of(&self, field: &FieldParams, other: &Subspace) -> Result<bool> {
        Ok(self.dim() <= other.dim() && self.sum_dim(field, other)? == other.dim())
    }

    /// The normalized spanning vector, for one-dimensional subspaces.
    pub fn line_rep(&self) -> Option<LineRep> {
        (self.dim() == 1).then(|| LineRep(self.basis.row_vector(0)))
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dimension first, then the row-major encoding of the RREF basis.
impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.n(), self.dim())
            .cmp(&(other.n(), other.dim()))
            .then_with(|| self.basis.entries().cmp(other.basis.entries()))
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.dim(), self.basis)
    }
}

/// Spanning vector of a line, scaled so its first nonzero entry is 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LineRep(Vector);

impl LineRep {
    pub fn new(field: &FieldParams, v: &Vector) -> Result<LineRep> {
        let lead = v.0.iter().copied().find(|a| !a.is_zero()).ok_or(Error::ZeroSpan)?;
        Ok(LineRep(v.scale(field, field.inv(lead)?)))
    }

    pub fn vector(&self) -> &Vector {
        &self.0
    }

    pub fn to_subspace(&self) -> Result<Subspace> {
        if self.0.len() < 2 {
            return Err(Error::FullSpan);
        }
        Ok(Subspace { basis: Matrix::from_row_vectors(std::slice::from_ref(&self.0))? })
    }
}

/// Number of `k`-dimensional subspaces of `F_q^n`.
pub fn gaussian_binomial(n: usize, k: usize, q: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= q.pow((n - i) as u32) - 1u32;
        den *= q.pow((i + 1) as u32) - 1u32;
    }
    num / den
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for c in start..n {
            cur.push(c);
            go(c + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// All `k`-dimensional subspaces of `F_q^n` in canonical order.
///
/// RREF matrices are generated directly: choose the pivot columns, then
/// every assignment of the free entries right of each pivot.
pub fn enumerate_subspaces(field: &FieldParams, n: usize, k: usize, caps: &Caps) -> Result<Vec<Subspace>> {
    if k < 1 || k >= n {
        return Err(Error::DimensionMismatch(format!("subspace dimension {k} outside 1..{n}")));
    }
    let expected = gaussian_binomial(n, k, field.q() as u64);
    if expected > BigUint::from(caps.vertices) {
        return Err(Error::SizeCap {
            what: "subspace count",
            size: expected.to_u128().unwrap_or(u128::MAX),
            cap: caps.vertices as u128,
        });
    }
    let q = field.q();
    let mut out = Vec::with_capacity(expected.to_usize().unwrap_or(0));
    for pivots in combinations(n, k) {
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &p)| ((p + 1)..n).filter(|c| !pivots.contains(c)).map(move |c| (r, c)))
            .collect();
        let mut basis = Matrix::zeros(k, n);
        for (r, &p) in pivots.iter().enumerate() {
            basis[(r, p)] = Fe::ONE;
        }
        let mut counter = vec![0u32; free.len()];
        loop {
            for (&(r, c), &v) in free.iter().zip(&counter) {
                basis[(r, c)] = Fe(v);
            }
            out.push(Subspace { basis: basis.clone() });
            // Odometer increment over q^free.
            let Some(pos) = counter.iter().position(|&d| d + 1 < q) else {
                break;
            };
            counter[pos] += 1;
            counter[..pos].iter_mut().for_each(|d| *d = 0);
        }
    }
    out.sort();
    debug_assert_eq!(BigUint::from(out.len()), expected);
    Ok(out)
}
