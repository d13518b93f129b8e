//! Calculus on the symmetric group `S_N`.
//!
//! Functions on `S_N` are stored as dense arrays indexed by the Lehmer rank
//! of the permutation ([`group`]). On top of that sit the transposition
//! difference operators, the Laplacian and its heat semigroup ([`ops`]),
//! and the column flow `f(t, .)` with the product functional `eta_p(t)`
//! ([`flow`]).
//!
//! Indices are 0-based throughout: a permutation of `N` letters maps
//! `0..N` onto itself.

pub mod flow;
pub mod group;
pub mod ops;

pub use flow::{
    circulant_flow, circulant_initial_slope, circulant_phi, default_grid, eta,
    eta2_derivative_at_zero, eta_with, evolved_columns, flow_column, flow_trace, geometric_grid,
    projected_decay_rate, CirculantTrace, FlowPath, FlowTrace,
};
pub use group::{Permutation, SymmetricGroup, BRUTE_FORCE_EXTENDED_MAX, BRUTE_FORCE_MAX};
pub use ops::{apply_d, grad_sq, heat_semigroup, inner, integrate, laplacian, GroupFunction};
