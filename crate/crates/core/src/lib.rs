//! Exact Temperley-Lieb, Kauffman bracket and Khovanov homology computations
//! for partial infinite positive braids, together with stabilization
//! experiments comparing complete braids against the infinite twist.

pub mod bracket;
pub mod braid;
pub mod error;
pub mod khovanov;
mod linalg;
pub mod projector;
pub mod rewrite;
pub mod ring;
pub mod tl;
mod uf;

pub use bracket::{
    bracket, check_braid_relations, letter_bracket, normalized_bracket, BraidRelationReport, BraidWord, Letter,
};
pub use braid::{
    find_diagonals, find_diagonals_after, non_diagonal_positions, BraidKind, DiagonalSet, InfiniteBraidSpec,
};
pub use error::{Error, Result};
pub use khovanov::{
    all_zero_circles, closure_value, khovanov_homology, minq_check, normalized_homology, normalized_homology_upto,
    stabilization_homology_report, stabilization_table, BigradedHomology, ChainComplex, ClosureSpec, Coefficients,
    LinkDiagram, MinqReport, StabilizationHomologyReport, StabilizationTable, DEFAULT_MAX_CROSSINGS,
};
pub use projector::{
    bracket_stabilization, jones_wenzl, jw_series, verify_axioms, AxiomReport, BracketStabilization, CoefficientRecord,
    Projector, Verdict, DEFAULT_WINDOW,
};
pub use rewrite::{
    bracket_preserved, mixed_bracket, multicone_corpus, multicone_entries, multicone_term, pull_turnbacks,
    pull_turnbacks_with, raw_bracket, shift_of_moves, CorpusCase, MixedTangle, MoveKind, PullStrategy, ShiftLedger,
    Slice,
};
pub use ring::{expand_series, quantum_int, rf_normalize, Coeff, LaurentPoly, RationalFunction, TruncatedSeries};
pub use tl::{compose, tl_basis, tl_mul, PlanarMatching, TLElement};
pub use uf::UnionFind;
