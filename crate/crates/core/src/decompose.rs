//! Factoring a graph automorphism `σ` as `σ_A ∘ σ_f`.
//!
//! The construction runs in stages, each consuming the previous one:
//!
//! 1. verify `σ` preserves adjacency and non-adjacency;
//! 2. find `B` with `σ_B ∘ σ` fixing every coordinate line `<e_i>`;
//! 3. read the transition maps `f_ij` off the images of `<e_i + a e_j>`;
//! 4. recover the field automorphism `f` and the diagonal correction `D`;
//! 5. set `A = B^{-1} D^{-1}` and check `σ_A ∘ σ_f` against `σ` on every
//!    vertex.
//!
//! A rejected input names the first stage that failed.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Fe, FieldParams};
use crate::linalg::{perm_matrix, Matrix, Vector};
use crate::semilinear::{canonical_pgl, SemilinearAuto};
use crate::ssgraph::SumGraph;
use crate::subspace::{span, Subspace};

pub use crate::permutation::VertexPermutation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    CheckAutomorphism,
    NormalizeBasis,
    SupportPattern,
    TransitionConsistency,
    FieldAutomorphism,
    LineFixing,
    FinalVerification,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::CheckAutomorphism => "check_automorphism",
            Stage::NormalizeBasis => "normalize_basis",
            Stage::SupportPattern => "support_pattern",
            Stage::TransitionConsistency => "transition_consistency",
            Stage::FieldAutomorphism => "field_automorphism",
            Stage::LineFixing => "line_fixing",
            Stage::FinalVerification => "final_verification",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub stage: Stage,
    pub detail: String,
}

impl Rejection {
    fn new(stage: Stage, detail: impl Into<String>) -> Self {
        Rejection { stage, detail: detail.into() }
    }
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rejected at {}: {}", self.stage, self.detail)
    }
}

type StageResult<T> = std::result::Result<T, Rejection>;

/// Whether `σ` preserves adjacency and non-adjacency for every pair.
pub fn check_automorphism(graph: &SumGraph, sigma: &VertexPermutation) -> bool {
    if sigma.len() != graph.len() {
        return false;
    }
    (0..graph.len()).all(|i| {
        let si = sigma.apply(i);
        ((i + 1)..graph.len()).all(|j| graph.adjacent(i, j) == graph.adjacent(si, sigma.apply(j)))
    })
}

fn coordinate_line(graph: &SumGraph, i: usize) -> usize {
    let e = Vector::unit(i + 1, graph.n()).expect("index in range");
    let w = span(graph.field(), &[e]).expect("a coordinate line is a vertex");
    graph.id_of(&w).expect("every line is a vertex")
}

fn line_id(graph: &SumGraph, v: Vector) -> usize {
    let w = span(graph.field(), &[v]).expect("nonzero vector spans a line");
    graph.id_of(&w).expect("every line is a vertex")
}

/// Permutation of vertex ids induced by `v -> M v`.
fn linear_action(graph: &SumGraph, m: &Matrix) -> VertexPermutation {
    let g = SemilinearAuto::linear(graph.field(), m.clone()).expect("invertible matrix");
    g.as_vertex_permutation(graph).expect("linear maps permute vertices")
}

fn line_image(graph: &SumGraph, sigma: &VertexPermutation, id: usize) -> StageResult<Vector> {
    let img = &graph.vertices()[sigma.apply(id)];
    match img.line_rep() {
        Some(rep) => Ok(rep.vector().clone()),
        None => Err(Rejection::new(
            Stage::NormalizeBasis,
            format!("line {} is sent to the {}-dimensional vertex {}", graph.vertices()[id], img.dim(), img),
        )),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalization {
    pub b: Matrix,
    /// `σ_B ∘ σ`, which fixes every `<e_i>`.
    pub sigma1: VertexPermutation,
}

/// Builds `B = B_n ⋯ B_1` so that `σ_B ∘ σ` fixes each `<e_i>`.
///
/// At step `i` the image line `<γ>` of `<e_i>` under the current map is
/// read in its normalized form, `t` is the smallest index `>= i` with
/// `γ_t != 0`, and `B_i = P_it (I - γ_t^{-1} Σ_{j != t} γ_j E_jt)`.
pub fn normalize_basis(graph: &SumGraph, sigma: &VertexPermutation) -> StageResult<Normalization> {
    let field = graph.field();
    let n = graph.n();
    let mut b = Matrix::identity(n);
    for i in 0..n {
        let raw = line_image(graph, sigma, coordinate_line(graph, i))?;
        let gamma = b.mul_vec(field, &raw).expect("square matrix");
        let t = (i..n).find(|&t| !gamma[t].is_zero()).ok_or_else(|| {
            Rejection::new(
                Stage::NormalizeBasis,
                format!("image of <e_{}> lies in <e_1, ..., e_{}>", i + 1, i),
            )
        })?;
        let ct_inv = field.inv(gamma[t]).expect("nonzero pivot");
        // I - γ_t^{-1} Σ_{j≠t} γ_j E_jt: column t becomes (-γ_j/γ_t), 1 on the diagonal.
        let mut shear = Matrix::identity(n);
        for j in (0..n).filter(|&j| j != t) {
            shear[(j, t)] = field.neg(field.mul(ct_inv, gamma[j]));
        }
        let step = perm_matrix(i + 1, t + 1, n).expect("indices in range").mul(field, &shear).expect("square");
        b = step.mul(field, &b).expect("square");
    }
    let sigma1 = linear_action(graph, &b).compose(sigma).expect("same length");
    for i in 0..n {
        let id = coordinate_line(graph, i);
        if sigma1.apply(id) != id {
            return Err(Rejection::new(Stage::NormalizeBasis, format!("<e_{}> is not fixed after normalization", i + 1)));
        }
    }
    Ok(Normalization { b, sigma1 })
}

/// The maps `f_ij` with `σ1(<e_i + a e_j>) = <e_i + f_ij(a) e_j>`, `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionTable {
    n: usize,
    q: usize,
    maps: Vec<Vec<Fe>>,
}

impl TransitionTable {
    fn slot(&self, i: usize, j: usize) -> usize {
        assert!(1 <= i && i < j && j <= self.n, "need 1 <= i < j <= n");
        (i - 1) * self.n + (j - 1)
    }

    /// Builds a table from explicit maps, one per pair `i < j` in
    /// lexicographic order, each indexed by element encoding.
    pub fn from_maps(n: usize, q: usize, maps: Vec<Vec<Fe>>) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|i| ((i + 1)..=n).map(move |j| (i, j))).collect();
        if maps.len() != pairs.len() || maps.iter().any(|m| m.len() != q) {
            return Err(Error::DimensionMismatch(format!("expected {} maps of {q} entries", pairs.len())));
        }
        let mut table = TransitionTable { n, q, maps: vec![Vec::new(); n * n] };
        for ((i, j), map) in pairs.into_iter().zip(maps) {
            let slot = table.slot(i, j);
            table.maps[slot] = map;
        }
        Ok(table)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `f_ij`, 1-based, indexed by element encoding.
    pub fn map(&self, i: usize, j: usize) -> &[Fe] {
        &self.maps[self.slot(i, j)]
    }

    pub fn get(&self, i: usize, j: usize, a: Fe) -> Fe {
        self.map(i, j)[a.0 as usize]
    }

    pub fn q(&self) -> usize {
        self.q
    }
}

/// Reads off `f_ij` and checks that `σ1` preserves the zero pattern of
/// every line.
pub fn extract_transitions(graph: &SumGraph, sigma1: &VertexPermutation) -> StageResult<TransitionTable> {
    let field = graph.field();
    let n = graph.n();
    let support = |detail: String| Rejection::new(Stage::SupportPattern, detail);
    for id in graph.dim_range(1) {
        let alpha = graph.vertices()[id].line_rep().expect("dimension 1");
        let image = &graph.vertices()[sigma1.apply(id)];
        let beta = image
            .line_rep()
            .ok_or_else(|| support(format!("line {} is sent to {}", graph.vertices()[id], image)))?;
        let pattern = |v: &Vector| v.entries().iter().map(|a| a.is_zero()).collect::<Vec<_>>();
        if pattern(alpha.vector()) != pattern(beta.vector()) {
            return Err(support(format!(
                "zero pattern of {} changes under the normalized map (image {})",
                alpha.vector().entries().iter().map(|a| a.to_string()).collect::<Vec<_>>().join(","),
                beta.vector().entries().iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")
            )));
        }
    }
    let mut maps = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut map = Vec::with_capacity(field.q() as usize);
            for a in field.elements() {
                let mut v = Vector::zeros(n);
                v.0[i] = Fe::ONE;
                v.0[j] = a;
                let id = line_id(graph, v);
                let rep = graph.vertices()[sigma1.apply(id)].line_rep().expect("checked above");
                let w = rep.vector();
                let shape_ok = w[i] == Fe::ONE
                    && (0..n).all(|t| t == i || t == j || w[t].is_zero())
                    && (w[j].is_zero() == a.is_zero());
                if !shape_ok {
                    return Err(support(format!("<e_{} + {a} e_{}> is not sent to a line <e_i + b e_j>", i + 1, j + 1)));
                }
                map.push(w[j]);
            }
            maps.push(map);
        }
    }
    Ok(TransitionTable::from_maps(n, field.q() as usize, maps).expect("shape built above"))
}

/// Recovers the Frobenius exponent `s` of `f = f_12 / f_12(1)` and the
/// diagonal `D = diag(1, f_12(1)^{-1}, ..., f_1n(1)^{-1})`.
///
/// Checks `f_1j(ab) = f_1i(a) f_ij(b)` for `2 <= i < j <= n`, then that
/// `f` is additive and multiplicative, all exhaustively over `F_q`.
pub fn solve_field_auto(table: &TransitionTable, field: &FieldParams) -> StageResult<(u32, Matrix)> {
    let n = table.n();
    if n < 3 {
        return Err(Rejection::new(Stage::TransitionConsistency, "needs n >= 3"));
    }
    for i in 2..=n {
        for j in (i + 1)..=n {
            for a in field.elements() {
                for b in field.elements() {
                    let lhs = table.get(1, j, field.mul(a, b));
                    let rhs = field.mul(table.get(1, i, a), table.get(i, j, b));
                    if lhs != rhs {
                        return Err(Rejection::new(
                            Stage::TransitionConsistency,
                            format!("f_1{j}({a}*{b}) = {lhs} but f_1{i}({a}) f_{i}{j}({b}) = {rhs}"),
                        ));
                    }
                }
            }
        }
    }
    let field_auto = |detail: String| Rejection::new(Stage::FieldAutomorphism, detail);
    let c = table.get(1, 2, Fe::ONE);
    let c_inv = field.inv(c).map_err(|_| field_auto("f_12(1) = 0".into()))?;
    let f: Vec<Fe> = field.elements().map(|a| field.mul(table.get(1, 2, a), c_inv)).collect();
    let fa = |a: Fe| f[a.0 as usize];
    for a in field.elements() {
        for b in field.elements() {
            if fa(field.add(a, b)) != field.add(fa(a), fa(b)) {
                return Err(field_auto(format!("f({a}+{b}) != f({a}) + f({b})")));
            }
            if fa(field.mul(a, b)) != field.mul(fa(a), fa(b)) {
                return Err(field_auto(format!("f({a}*{b}) != f({a}) f({b})")));
            }
        }
    }
    let s = field.identify_automorphism(&f).map_err(|e| field_auto(e.to_string()))?;
    let mut diag = vec![Fe::ONE];
    for j in 2..=n {
        diag.push(field.inv(table.get(1, j, Fe::ONE)).map_err(|_| field_auto(format!("f_1{j}(1) = 0")))?);
    }
    Ok((s, Matrix::diag(&diag)))
}

/// Proof object for `σ = σ_A ∘ σ_f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionCertificate {
    /// True only after `(A, s)` was applied to every vertex and agreed
    /// with `σ`.
    pub verified: bool,
    pub a: Option<Matrix>,
    pub s: Option<u32>,
    pub b: Option<Matrix>,
    pub d: Option<Matrix>,
    pub rejection: Option<Rejection>,
    pub n: usize,
    pub p: u32,
    pub m: u32,
    pub irreducible: Vec<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CertificateJson {
    verified: bool,
    #[serde(rename = "A")]
    a: Option<String>,
    s: Option<u32>,
    #[serde(rename = "B")]
    b: Option<String>,
    #[serde(rename = "D")]
    d: Option<String>,
    rejection_stage: Option<Stage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rejection_detail: Option<String>,
    n: usize,
    p: u32,
    m: u32,
    irreducible: Vec<u32>,
}

impl DecompositionCertificate {
    fn rejected(graph: &SumGraph, rejection: Rejection) -> Self {
        let field = graph.field();
        DecompositionCertificate {
            verified: false,
            a: None,
            s: None,
            b: None,
            d: None,
            rejection: Some(rejection),
            n: graph.n(),
            p: field.p(),
            m: field.m(),
            irreducible: field.irreducible().to_vec(),
        }
    }

    pub fn rejection_stage(&self) -> Option<Stage> {
        self.rejection.as_ref().map(|r| r.stage)
    }

    /// The verified decomposition, if any.
    pub fn automorphism(&self) -> Option<SemilinearAuto> {
        match (self.verified, &self.a, self.s) {
            (true, Some(a), Some(s)) => Some(SemilinearAuto::from_canonical_parts(a.clone(), s)),
            _ => None,
        }
    }

    pub fn to_json(&self) -> String {
        let json = CertificateJson {
            verified: self.verified,
            a: self.a.as_ref().map(Matrix::to_string),
            s: self.s,
            b: self.b.as_ref().map(Matrix::to_string),
            d: self.d.as_ref().map(Matrix::to_string),
            rejection_stage: self.rejection_stage(),
            rejection_detail: self.rejection.as_ref().map(|r| r.detail.clone()),
            n: self.n,
            p: self.p,
            m: self.m,
            irreducible: self.irreducible.clone(),
        };
        serde_json::to_string_pretty(&json).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::Parse { line: 0, msg };
        let json: CertificateJson = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        let field = FieldParams::new(json.p, json.m)?;
        if field.irreducible() != json.irreducible.as_slice() {
            return Err(bad("irreducible polynomial does not match the field's".into()));
        }
        let mat = |m: &Option<String>| m.as_deref().map(|t| Matrix::parse(t, &field)).transpose();
        Ok(DecompositionCertificate {
            verified: json.verified,
            a: mat(&json.a)?,
            s: json.s,
            b: mat(&json.b)?,
            d: mat(&json.d)?,
            rejection: json.rejection_stage.map(|stage| Rejection {
                stage,
                detail: json.rejection_detail.unwrap_or_default(),
            }),
            n: json.n,
            p: json.p,
            m: json.m,
            irreducible: json.irreducible,
        })
    }
}

/// Factors `σ` as `σ_A ∘ σ_f`, or names the stage at which it fails.
///
/// Errors only on malformed input (`n < 3`, wrong permutation length);
/// a non-automorphism yields a certificate with `verified = false`.
pub fn decompose(graph: &SumGraph, sigma: &VertexPermutation) -> Result<DecompositionCertificate> {
    if graph.n() < 3 {
        return Err(Error::TheoremDimension(graph.n()));
    }
    if sigma.len() != graph.len() {
        return Err(Error::DimensionMismatch(format!(
            "permutation of {} ids for a graph with {} vertices",
            sigma.len(),
            graph.len()
        )));
    }
    Ok(match run_stages(graph, sigma) {
        Ok(cert) => cert,
        Err(rejection) => DecompositionCertificate::rejected(graph, rejection),
    })
}

fn run_stages(graph: &SumGraph, sigma: &VertexPermutation) -> StageResult<DecompositionCertificate> {
    let field = graph.field();
    if !check_automorphism(graph, sigma) {
        return Err(Rejection::new(Stage::CheckAutomorphism, "adjacency is not preserved"));
    }
    let Normalization { b, sigma1 } = normalize_basis(graph, sigma)?;
    let table = extract_transitions(graph, &sigma1)?;
    let (s, d) = solve_field_auto(&table, field)?;

    // σ2 = σ_f^{-1} ∘ σ_D ∘ σ1 must fix every line.
    let undo_f = SemilinearAuto::frobenius(graph.n(), field, (field.m() - s) % field.m()).expect("valid exponent");
    let sigma2 = undo_f
        .as_vertex_permutation(graph)
        .and_then(|u| u.compose(&linear_action(graph, &d)))
        .and_then(|ud| ud.compose(&sigma1))
        .map_err(|e| Rejection::new(Stage::LineFixing, e.to_string()))?;
    if let Some(id) = graph.dim_range(1).find(|&id| sigma2.apply(id) != id) {
        return Err(Rejection::new(
            Stage::LineFixing,
            format!("line {} is moved after the diagonal and field corrections", graph.vertices()[id]),
        ));
    }

    let b_inv = b.invert(field).expect("B is a product of invertible factors");
    let d_inv = d.invert(field).expect("D has nonzero diagonal");
    let a = canonical_pgl(field, &b_inv.mul(field, &d_inv).expect("square"));
    let candidate = SemilinearAuto::from_canonical_parts(a.clone(), s);
    let mismatch = graph.vertices().iter().enumerate().find(|(id, w)| {
        image_id(graph, &candidate, w) != Some(sigma.apply(*id))
    });
    if let Some((_, w)) = mismatch {
        return Err(Rejection::new(Stage::FinalVerification, format!("σ_A ∘ σ_f disagrees with σ on {w}")));
    }
    Ok(DecompositionCertificate {
        verified: true,
        a: Some(a),
        s: Some(s),
        b: Some(b),
        d: Some(d),
        rejection: None,
        n: graph.n(),
        p: field.p(),
        m: field.m(),
        irreducible: field.irreducible().to_vec(),
    })
}

fn image_id(graph: &SumGraph, g: &SemilinearAuto, w: &Subspace) -> Option<usize> {
    graph.id_of(&g.apply(graph.field(), w).ok()?)
}
