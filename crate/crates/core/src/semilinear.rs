//! Semilinear automorphisms `σ_A ∘ σ_f` of the subspace sum graph, where
//! `σ_f` applies the Frobenius power `a -> a^(p^s)` to every coordinate and
//! `σ_A` is the invertible linear map `v -> A v`.
//!
//! Composition is right to left throughout: `σ_A ∘ σ_f` applies the field
//! map first. Matrices that differ by a nonzero scalar act identically on
//! subspaces, so `A` is stored as its canonical representative in
//! `PGL_n(F_q)`: scaled so the first nonzero entry in row-major order is 1.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::{Fe, FieldParams};
use crate::linalg::{Matrix, Vector};
use crate::permutation::VertexPermutation;
use crate::ssgraph::SumGraph;
use crate::subspace::{span_rows, Subspace};

/// Scales `a` so its first nonzero row-major entry is 1.
pub fn canonical_pgl(field: &FieldParams, a: &Matrix) -> Matrix {
    match a.first_nonzero() {
        Some(lead) if lead != Fe::ONE => a.scale(field, field.inv(lead).expect("nonzero")),
        _ => a.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SemilinearAuto {
    a: Matrix,
    s: u32,
}

impl SemilinearAuto {
    /// `σ_A ∘ σ_f` with `f = Frobenius^s`; `A` is canonicalized.
    pub fn new(field: &FieldParams, a: Matrix, s: u32) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", a.rows(), a.cols())));
        }
        if s >= field.m() {
            return Err(Error::ExponentOutOfRange { s, m: field.m() });
        }
        if !a.is_invertible(field) {
            return Err(Error::Singular);
        }
        Ok(SemilinearAuto { a: canonical_pgl(field, &a), s })
    }

    /// Trusts `a` to be invertible and already canonical.
    pub(crate) fn from_canonical_parts(a: Matrix, s: u32) -> Self {
        SemilinearAuto { a, s }
    }

    pub fn identity(n: usize) -> Self {
        SemilinearAuto { a: Matrix::identity(n), s: 0 }
    }

    pub fn linear(field: &FieldParams, a: Matrix) -> Result<Self> {
        Self::new(field, a, 0)
    }

    pub fn frobenius(n: usize, field: &FieldParams, s: u32) -> Result<Self> {
        Self::new(field, Matrix::identity(n), s)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn exponent(&self) -> u32 {
        self.s
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn is_identity(&self) -> bool {
        self.s == 0 && self.a == Matrix::identity(self.n())
    }

    pub fn apply_vector(&self, field: &FieldParams, v: &Vector) -> Result<Vector> {
        self.a.mul_vec(field, &v.frobenius(field, self.s))
    }

    /// `span{ A · frob_s(w) : w in basis(W) }`.
    pub fn apply(&self, field: &FieldParams, w: &Subspace) -> Result<Subspace> {
        if w.n() != self.n() {
            return Err(Error::DimensionMismatch(format!("{}-dim map on a subspace of F_q^{}", self.n(), w.n())));
        }
        // Rows of (A F)^T = F^T A^T.
        let rows = w.basis().frobenius(field, self.s).mul(field, &self.a.transpose())?;
        span_rows(field, &rows).into_subspace()
    }

    /// The induced permutation of vertex ids.
    pub fn as_vertex_permutation(&self, graph: &SumGraph) -> Result<VertexPermutation> {
        let field = graph.field();
        if graph.n() != self.n() {
            return Err(Error::DimensionMismatch(format!("{}-dim map on the graph of F_q^{}", self.n(), graph.n())));
        }
        let map = graph
            .vertices()
            .iter()
            .map(|w| {
                let image = self.apply(field, w)?;
                graph.id_of(&image).map(|id| id as u32).ok_or(Error::FullSpan)
            })
            .collect::<Result<Vec<_>>>()?;
        let perm = VertexPermutation::new(map)?;
        debug_assert!(crate::decompose::check_automorphism(graph, &perm));
        Ok(perm)
    }

    /// `self ∘ other`: `(A1, s1)(A2, s2) = (A1 · frob_{s1}(A2), s1 + s2 mod m)`.
    pub fn compose(&self, field: &FieldParams, other: &SemilinearAuto) -> Result<Self> {
        let a = self.a.mul(field, &other.a.frobenius(field, self.s))?;
        Ok(SemilinearAuto { a: canonical_pgl(field, &a), s: (self.s + other.s) % field.m() })
    }

    /// `(frob_{-s}(A^{-1}), -s mod m)`.
    pub fn inverse(&self, field: &FieldParams) -> Self {
        let inv = self.a.invert(field).expect("stored matrix is invertible");
        let s = (field.m() - self.s) % field.m();
        SemilinearAuto { a: canonical_pgl(field, &inv.frobenius(field, s)), s }
    }

    /// Uniform over `PGL_n(F_q) × Z_m`.
    pub fn random<R: Rng + ?Sized>(field: &FieldParams, n: usize, rng: &mut R) -> Self {
        let a = Matrix::random_invertible(field, n, rng);
        let s = rng.gen_range(0..field.m());
        SemilinearAuto { a: canonical_pgl(field, &a), s }
    }

    /// Parses `A=<matrix text>;s=<integer>`.
    pub fn parse(text: &str, field: &FieldParams) -> Result<Self> {
        let bad = |msg: &str| Error::Parse { line: 0, msg: msg.to_string() };
        let body = text.trim().strip_prefix("A=").ok_or_else(|| bad("expected leading \"A=\""))?;
        let (mat, s) = body.rsplit_once(";s=").ok_or_else(|| bad("expected \";s=\""))?;
        let s: u32 = s.trim().parse().map_err(|_| bad("bad exponent"))?;
        SemilinearAuto::new(field, Matrix::parse(mat, field)?, s)
    }
}

impl fmt::Display for SemilinearAuto {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A={};s={}", self.a, self.s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupOrder {
    /// `|PGL_n(F_q)| = prod_{i<n} (q^n - q^i) / (q - 1)`.
    pub pgl: BigUint,
    /// `|PGL_n(F_q)| · m`.
    pub total: BigUint,
}

pub fn group_order(n: usize, field: &FieldParams) -> Result<GroupOrder> {
    if n < 3 {
        return Err(Error::TheoremDimension(n));
    }
    let q = BigUint::from(field.q());
    let qn = q.pow(n as u32);
    let gl: BigUint = (0..n).map(|i| &qn - q.pow(i as u32)).product();
    let scalars = &q - 1u32;
    if !(&gl % &scalars).is_zero() {
        return Err(Error::FormulaIntegrity(format!("|GL| = {gl} is not divisible by {scalars}")));
    }
    let pgl = gl / scalars;
    let total = &pgl * field.m();
    Ok(GroupOrder { pgl, total })
}

/// Every element of `PGL_n(F_q) × Z_m`, by scanning all `q^(n^2)` matrices.
///
/// Only for tiny instances; refuses more than 2^20 candidate matrices.
pub fn enumerate_group(field: &FieldParams, n: usize) -> Result<Vec<SemilinearAuto>> {
    let candidates = (field.q() as u128).checked_pow((n * n) as u32).unwrap_or(u128::MAX);
    if candidates > 1 << 20 {
        return Err(Error::SizeCap { what: "matrix scan", size: candidates, cap: 1 << 20 });
    }
    let q = field.q();
    let mut out = Vec::new();
    let mut entries = vec![0u32; n * n];
    for _ in 0..candidates.to_u64().expect("bounded above") {
        let first = entries.iter().rev().find(|&&e| e != 0);
        // Row-major order puts entry 0 first; the odometer runs over the
        // reversed slice so the first nonzero entry is the last nonzero digit.
        if first == Some(&1) {
            let a = Matrix::new(n, n, entries.iter().rev().map(|&e| Fe(e)).collect())?;
            if a.is_invertible(field) {
                for s in 0..field.m() {
                    out.push(SemilinearAuto { a: a.clone(), s });
                }
            }
        }
        if let Some(pos) = entries.iter().position(|&d| d + 1 < q) {
            entries[pos] += 1;
            entries[..pos].iter_mut().for_each(|d| *d = 0);
        }
    }
    Ok(out)
}
