//! Exact-arithmetic toolkit for deciding which natural numbers occur as
//! intersection numbers of sections on a rational elliptic surface.
//!
//! Given a surface described by its Mordell-Weil data (the reducible-fiber
//! lattice `T`, the free part of `E(K)`, its torsion), the crate decides for
//! each `k >= 0` whether two sections with `P1 . P2 = k` exist. A `k` with no
//! such pair is a *gap number*. The decision combines:
//!
//! * the height formula `h(P) = 2 + 2 (P.O) - sum_v contr_v(P)` with the
//!   exact local contribution table ([`fibers`]),
//! * complete short-vector enumeration of the free lattice and membership in
//!   the narrow (finite-index, even integral) sublattice ([`lattice`]),
//! * interval criteria controlled by the contribution bounds `c_max`,
//!   `c_min` and `delta = c_max - c_min` ([`engine`]),
//! * integer representation by the associated quadratic form
//!   `Q_X = adjugate(narrow Gram)` and the critical-integer universality
//!   check ([`forms`]).
//!
//! Every verdict ships evidence: realized values come with a section witness
//! that re-validates through the height formula, gaps come with the exhausted
//! enumeration interval. All arithmetic is exact rational; there is no
//! floating point in any decision path.
//!
//! The classification rows the engine works over live in a small line-based
//! catalog format ([`catalog`]); a default table is bundled. The `resgaps`
//! binary and the `examples/` directory drive the same public API.

pub mod arith;
pub mod catalog;
pub mod cli;
pub mod engine;
pub mod fibers;
pub mod forms;
pub mod lattice;

pub use arith::{Rat, SymMatrix};
pub use catalog::{Catalog, SurfaceCase};
pub use engine::{decide, GapVerdict};
pub use fibers::FiberConfig;
pub use lattice::{Budget, LatticeSpec};
