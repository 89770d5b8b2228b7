//! Subspace sum graphs over finite fields.
//!
//! The graph on `F_q^n` has the nontrivial proper subspaces as vertices,
//! with `W1 ~ W2` when `W1 + W2 = F_q^n`. For `n >= 3` every automorphism is
//! uniquely `σ_A ∘ σ_f` for an invertible matrix `A` (up to scalars) and a
//! field automorphism `f`; [`decompose`] computes that factorization and
//! [`autsearch`] enumerates automorphisms independently of it.

pub mod autsearch;
pub mod caps;
pub mod decompose;
pub mod error;
pub mod gf;
pub mod linalg;
pub mod permutation;
pub mod semilinear;
pub mod ssgraph;
pub mod subspace;

pub use autsearch::{count_automorphisms, enumerate_automorphisms, for_each_automorphism, SearchOptions, SearchStats};
pub use caps::Caps;
pub use decompose::{decompose, check_automorphism, DecompositionCertificate, Rejection, Stage};
pub use error::{Error, Result};
pub use gf::{Fe, FieldParams};
pub use linalg::{Matrix, Vector};
pub use permutation::VertexPermutation;
pub use semilinear::{group_order, GroupOrder, SemilinearAuto};
pub use ssgraph::{degree_formula, degree_formula_corrected, ExportFormat, SumGraph};
pub use subspace::{span, LineRep, Subspace};
