//! The subspace sum graph: vertices are the nontrivial proper subspaces of
//! `F_q^n`, and `W1 ~ W2` exactly when `W1 + W2` is the whole space.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::gf::FieldParams;
use crate::subspace::{enumerate_subspaces, gaussian_binomial, Subspace};

/// Symmetric bit-packed adjacency, one row of `u64` words per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    size: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn new(size: usize) -> Self {
        let words = size.div_ceil(64).max(1);
        BitMatrix { size, words, bits: vec![0; size * words] }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Words per row.
    pub fn words(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set_symmetric(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
        self.bits[j * self.words + i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    pub fn row_count(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    EdgeList,
    Dot,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge-list" => Ok(ExportFormat::EdgeList),
            "dot" => Ok(ExportFormat::Dot),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SumGraph {
    field: FieldParams,
    n: usize,
    vertices: Vec<Subspace>,
    index: HashMap<Subspace, usize>,
    adjacency: BitMatrix,
}

/// Number of vertices of the graph on `F_q^n`.
pub fn vertex_count(n: usize, q: u64) -> BigUint {
    (1..n).map(|k| gaussian_binomial(n, k, q)).sum()
}

impl SumGraph {
    /// Materializes the graph with vertex ids in canonical order
    /// (dimension-major, then RREF encoding). Ids are 0-based here and
    /// 1-based in every file format.
    pub fn build(field: &FieldParams, n: usize, caps: &Caps) -> Result<Self> {
        if n < 2 {
            return Err(Error::EmptyVertexSet(n));
        }
        let total = vertex_count(n, field.q() as u64);
        if total > BigUint::from(caps.vertices) {
            return Err(Error::SizeCap {
                what: "vertex count",
                size: total.to_u128().unwrap_or(u128::MAX),
                cap: caps.vertices as u128,
            });
        }
        let mut vertices = Vec::new();
        for k in 1..n {
            vertices.extend(enumerate_subspaces(field, n, k, caps)?);
        }
        let index = vertices.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let mut adjacency = BitMatrix::new(vertices.len());
        for i in 0..vertices.len() {
            for j in (i + 1)..vertices.len() {
                let (a, b) = (&vertices[i], &vertices[j]);
                if a.dim() + b.dim() >= n && a.sum_dim(field, b)? == n {
                    adjacency.set_symmetric(i, j);
                }
            }
        }
        Ok(SumGraph { field: field.clone(), n, vertices, index, adjacency })
    }

    pub fn field(&self) -> &FieldParams {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Subspace] {
        &self.vertices
    }

    pub fn vertex(&self, id: usize) -> Result<&Subspace> {
        self.vertices.get(id).ok_or(Error::BadVertex(id))
    }

    pub fn id_of(&self, w: &Subspace) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn adjacency(&self) -> &BitMatrix {
        &self.adjacency
    }

    #[inline]
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency.get(i, j)
    }

    /// At `n = 2` every pair of distinct lines spans the plane.
    pub fn is_complete_degenerate(&self) -> bool {
        self.n == 2
    }

    pub fn edge_count(&self) -> usize {
        (0..self.len()).map(|i| self.adjacency.row_count(i)).sum::<usize>() / 2
    }

    pub fn neighbors(&self, id: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&j| self.adjacency.get(id, j))
    }

    /// Ids of the vertices of dimension `k`, which form a contiguous range.
    pub fn dim_range(&self, k: usize) -> std::ops::Range<usize> {
        let start = self.vertices.partition_point(|w| w.dim() < k);
        let end = self.vertices.partition_point(|w| w.dim() <= k);
        start..end
    }

    pub fn degree_direct(&self, id: usize) -> Result<usize> {
        if id >= self.len() {
            return Err(Error::BadVertex(id));
        }
        Ok(self.adjacency.row_count(id))
    }

    /// Whether degree is constant on each dimension class and differs
    /// between classes.
    pub fn degrees_separate_dimensions(&self) -> bool {
        let mut per_dim = Vec::new();
        for k in 1..self.n {
            let mut degs = self.dim_range(k).map(|i| self.adjacency.row_count(i));
            let Some(first) = degs.next() else { return false };
            if degs.any(|d| d != first) {
                return false;
            }
            per_dim.push(first);
        }
        let mut sorted = per_dim.clone();
        sorted.sort_unstable();
        sorted.dedup();
        sorted.len() == per_dim.len()
    }

    /// Per-dimension comparison of direct degree counts with the closed forms.
    pub fn degree_table(&self) -> Vec<DegreeRow> {
        (1..self.n)
            .map(|k| {
                let range = self.dim_range(k);
                let direct: Vec<usize> = range.clone().map(|i| self.adjacency.row_count(i)).collect();
                let constant = direct.windows(2).all(|w| w[0] == w[1]);
                DegreeRow {
                    k,
                    count: range.len(),
                    direct: direct.first().copied().unwrap_or(0),
                    constant,
                    formula: degree_formula(self.n, k, &self.field).map(|d| d.total),
                    corrected: degree_formula_corrected(self.n, k, &self.field).map(|d| d.total),
                }
            })
            .collect()
    }

    /// Tab-separated `id`, `dim`, `basis` with 1-based ids and a header line.
    pub fn vertex_table(&self) -> String {
        let mut out = String::from("id\tdim\tbasis\n");
        for (i, w) in self.vertices.iter().enumerate() {
            writeln!(out, "{}\t{}\t{}", i + 1, w.dim(), w.basis()).unwrap();
        }
        out
    }

    pub fn export(&self, format: ExportFormat) -> String {
        let mut out = String::new();
        match format {
            ExportFormat::EdgeList => {
                for i in 0..self.len() {
                    for j in self.neighbors(i).filter(|&j| j > i) {
                        writeln!(out, "{}\t{}", i + 1, j + 1).unwrap();
                    }
                }
            }
            ExportFormat::Dot => {
                out.push_str("graph subspace_sum {\n");
                for (i, w) in self.vertices.iter().enumerate() {
                    writeln!(out, "  {} [label=\"{w}\"];", i + 1).unwrap();
                }
                for i in 0..self.len() {
                    for j in self.neighbors(i).filter(|&j| j > i) {
                        writeln!(out, "  {} -- {};", i + 1, j + 1).unwrap();
                    }
                }
                out.push_str("}\n");
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeRow {
    pub k: usize,
    pub count: usize,
    pub direct: usize,
    /// Whether every vertex of this dimension has degree `direct`.
    pub constant: bool,
    pub formula: Result<BigUint>,
    pub corrected: Result<BigUint>,
}

impl DegreeRow {
    pub fn formula_matches(&self) -> bool {
        matches!(&self.formula, Ok(total) if *total == BigUint::from(self.direct))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeFormula {
    pub total: BigUint,
    /// `N_0, ..., N_{k-1}`.
    pub terms: Vec<BigUint>,
}

// prod_{i in range} (q^e - q^i)
fn falling(q: &BigUint, e: usize, range: std::ops::Range<usize>) -> BigUint {
    let top = q.pow(e as u32);
    range.map(|i| &top - q.pow(i as u32)).product()
}

fn exact_div(num: BigUint, den: BigUint, what: impl Fn() -> String) -> Result<BigUint> {
    if den.is_zero() || !(&num % &den).is_zero() {
        return Err(Error::FormulaIntegrity(format!("{}: {num} / {den}", what())));
    }
    Ok(num / den)
}

fn check_degree_args(n: usize, k: usize) -> Result<()> {
    if k < 1 || k >= n {
        return Err(Error::DimensionMismatch(format!("subspace dimension {k} outside 1..{n}")));
    }
    Ok(())
}

/// Classical closed form for the degree of a `k`-dimensional vertex, term
/// by term exactly as it is usually stated:
///
/// `N_r = (q^k-1)...(q^k-q^{r-1}) (q^n-q^k)...(q^n-q^{n-1})
///        / ((q^d-1)(q^d-q)...(q^d-q^{d-1}))`, `d = n-k+r`.
///
/// For `k >= 2` this disagrees with direct counting; see
/// [`degree_formula_corrected`].
pub fn degree_formula(n: usize, k: usize, field: &FieldParams) -> Result<DegreeFormula> {
    check_degree_args(n, k)?;
    let q = BigUint::from(field.q());
    let terms = (0..k)
        .map(|r| {
            let d = n - k + r;
            let num = falling(&q, k, 0..r) * falling(&q, n, k..n);
            let den = falling(&q, d, 0..d);
            exact_div(num, den, || format!("N_{r} at (n, k, q) = ({n}, {k}, {})", field.q()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DegreeFormula { total: terms.iter().sum(), terms })
}

/// Degree closed form with the denominator counting ordered bases of `U`
/// that extend a basis of `U ∩ W`:
/// `(q^r-1)...(q^r-q^{r-1}) (q^d-q^r)...(q^d-q^{d-1})`.
///
/// `N_r` counts the `d`-dimensional `U` with `U + W = V` and
/// `dim(U ∩ W) = r`; it agrees with direct counting.
pub fn degree_formula_corrected(n: usize, k: usize, field: &FieldParams) -> Result<DegreeFormula> {
    check_degree_args(n, k)?;
    let q = BigUint::from(field.q());
    let terms = (0..k)
        .map(|r| {
            let d = n - k + r;
            let num = falling(&q, k, 0..r) * falling(&q, n, k..n);
            let den = falling(&q, r, 0..r) * falling(&q, d, r..d);
            exact_div(num, den, || format!("corrected N_{r} at (n, k, q) = ({n}, {k}, {})", field.q()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DegreeFormula { total: terms.iter().sum(), terms })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, p: u32, m: u32) -> SumGraph {
        SumGraph::build(&FieldParams::new(p, m).unwrap(), n, &Caps::default()).unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn build_examples() {
        let g = graph(3, 2, 1);
        assert_eq!((g.len(), g.edge_count()), (14, 49));
        let k3 = graph(2, 2, 1);
        assert_eq!((k3.len(), k3.edge_count()), (3, 3));
        assert!(k3.is_complete_degenerate());
        assert!(!g.is_complete_degenerate());
        assert_eq!(graph(4, 2, 1).len(), 65);
    }

    #[test]
    fn build_errors() {
        let f2 = FieldParams::new(2, 1).unwrap();
        assert_eq!(SumGraph::build(&f2, 1, &Caps::default()).unwrap_err(), Error::EmptyVertexSet(1));
        let tiny = Caps { vertices: 13, ..Caps::default() };
        assert!(matches!(SumGraph::build(&f2, 3, &tiny), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn direct_degrees() {
        let g = graph(3, 2, 1);
        for i in g.dim_range(1) {
            assert_eq!(g.degree_direct(i).unwrap(), 4);
        }
        for i in g.dim_range(2) {
            assert_eq!(g.degree_direct(i).unwrap(), 10);
        }
        let k3 = graph(2, 2, 1);
        assert!((0..3).all(|i| k3.degree_direct(i).unwrap() == 2));
        assert_eq!(g.degree_direct(14), Err(Error::BadVertex(14)));
    }

    #[test]
    fn formula_examples() {
        let f2 = FieldParams::new(2, 1).unwrap();
        let d = degree_formula(3, 1, &f2).unwrap();
        assert_eq!((d.total, d.terms), (big(4), vec![big(4)]));
        let d = degree_formula(3, 2, &f2).unwrap();
        assert_eq!((d.total, d.terms), (big(6), vec![big(4), big(2)]));
        assert_eq!(degree_formula(2, 1, &f2).unwrap().total, big(2));
        let c = degree_formula_corrected(3, 2, &f2).unwrap();
        assert_eq!((c.total, c.terms), (big(10), vec![big(4), big(6)]));
        assert!(degree_formula(3, 3, &f2).is_err());
    }

    #[test]
    fn literal_formula_can_be_inexact() {
        // Search a few parameters for a non-integral term; any found must be
        // reported rather than truncated.
        for (p, m) in [(2, 1), (3, 1), (2, 2)] {
            let field = FieldParams::new(p, m).unwrap();
            for n in 2..7 {
                for k in 1..n {
                    match degree_formula(n, k, &field) {
                        Ok(d) => assert_eq!(d.terms.len(), k),
                        Err(e) => assert!(matches!(e, Error::FormulaIntegrity(_))),
                    }
                }
            }
        }
    }

    // N_r = [k choose r]_q * q^{(k-r)(n-k)}: choose U ∩ W, then a complement
    // of W/(U ∩ W) in V/(U ∩ W).
    #[test]
    fn corrected_formula_matches_gaussian_count() {
        for (p, m) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let field = FieldParams::new(p, m).unwrap();
            let q = field.q() as u64;
            for n in 2..7 {
                for k in 1..n {
                    let c = degree_formula_corrected(n, k, &field).unwrap();
                    for (r, term) in c.terms.iter().enumerate() {
                        let expected = gaussian_binomial(k, r, q) * BigUint::from(q).pow(((k - r) * (n - k)) as u32);
                        assert_eq!(term, &expected);
                    }
                }
            }
        }
    }

    #[test]
    fn adjacency_structure() {
        for (n, p, m) in [(3, 2, 1), (3, 3, 1), (4, 2, 1), (3, 2, 2)] {
            let g = graph(n, p, m);
            let f = g.field().clone();
            assert!(g.degrees_separate_dimensions());
            for i in 0..g.len() {
                assert!(!g.adjacent(i, i));
                for j in 0..g.len() {
                    assert_eq!(g.adjacent(i, j), g.adjacent(j, i));
                    let (a, b) = (&g.vertices()[i], &g.vertices()[j]);
                    if i != j && (a.is_subspace_of(&f, b).unwrap() || b.is_subspace_of(&f, a).unwrap()) {
                        assert!(!g.adjacent(i, j));
                    }
                    if i != j && a.dim() == n - 1 && b.dim() == n - 1 {
                        assert!(g.adjacent(i, j));
                    }
                }
            }
            let row1 = &g.degree_table()[0];
            assert!(row1.constant && row1.formula_matches());
            for row in g.degree_table() {
                assert_eq!(row.corrected.unwrap(), big(row.direct as u64));
            }
        }
    }

    #[test]
    fn exports() {
        let k3 = graph(2, 2, 1);
        let lines: Vec<String> = k3.export(ExportFormat::EdgeList).lines().map(String::from).collect();
        assert_eq!(lines, ["1\t2", "1\t3", "2\t3"]);
        assert_eq!(graph(3, 2, 1).export(ExportFormat::EdgeList).lines().count(), 49);
        let dot = k3.export(ExportFormat::Dot);
        assert!(dot.starts_with("graph subspace_sum {\n"));
        assert!(dot.contains("  1 [label=\"1:0,1\"];"));
        assert!(dot.contains("  2 -- 3;"));
        assert_eq!("".parse::<ExportFormat>(), Err(Error::UnknownFormat(String::new())));
        assert_eq!("dot".parse::<ExportFormat>(), Ok(ExportFormat::Dot));
        let table = k3.vertex_table();
        assert_eq!(table.lines().next(), Some("id\tdim\tbasis"));
        assert_eq!(table.lines().nth(1), Some("1\t1\t0,1"));
    }
}
