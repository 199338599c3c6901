//! Homological invariants of radical-square-zero Artin algebras, computed
//! from their valued quivers.
//!
//! An algebra of this kind is presented, up to the data the invariants
//! depend on, by a finite valued quiver: one simple module per vertex, one
//! arrow per nonvanishing extension between simples, and a positive
//! multiplicity pair per arrow. Everything this crate computes — syzygies of
//! simple modules, projective dimensions, the supremum `s` of finite
//! projective dimensions of left simples, the big left finitistic dimension,
//! and the delooping level — is a function of that combinatorial datum.
//!
//! Modules:
//! - [`quiver`]: the valued-quiver data model and graph primitives
//!   (sources/sinks, reachability, longest paths, boolean power orbits).
//! - [`dsl`]: a line-oriented text format for quivers, plus DOT export.
//! - [`syzygy`]: syzygies of simple modules with exact big-integer
//!   multiplicities, on both module sides, and projective dimensions.
//! - [`invariants`]: the invariant `s`, the big left finitistic dimension,
//!   and the delooping level with machine-checkable certificates.
//! - [`verify`]: exhaustive and randomized cross-validation of the equality
//!   `findim = dell` and its surrounding inequality chain.

pub mod dsl;
pub mod invariants;
pub mod quiver;
pub mod syzygy;
pub mod verify;

pub use invariants::{
    big_findim_left, certificate_is_sound, dell_algebra, dell_condition, dell_simple,
    dell_simple_support_oracle, dell_support_oracle_all, embeds_in_radical, full_report,
    s_invariant, simple_dual_nonzero, DellCertificate, DellJustification, InvariantReport,
    LevelFailure, SInvariant,
};
pub use quiver::{
    Arrow, BoolMatrix, BoolPowerOrbit, Defect, QuiverError, Valuation, ValuedQuiver, VertexClass,
    VertexId,
};
pub use syzygy::{
    pdim_simple, syzygy_power, syzygy_power_oracle, syzygy_step, ExtendedNat, Side,
    SimpleMultiset, SyzygyError,
};
pub use verify::{
    check_all_digraphs, check_dell_monotone, check_duality, check_inequality_chain,
    check_main_theorem, enumerate_digraphs, fuzz, random_quiver, run_all_checks, CheckOutcome,
    CheckResult, EnumerationReport, FailureCase, FuzzConfig, FuzzReport, VerifyError,
};
