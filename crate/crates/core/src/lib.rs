//! Explicit upper bounds `m(t)` on semigroup norms `‖S(t)‖` computed from
//! resolvent bounds `r(ω)`.
//!
//! * [`bound`]: continuous bounds with piecewise-affine logarithm.
//! * [`riccati`]: the Riccati flow, the crossing time `a*`, the update
//!   `U(m, ω, r)` and the quantitative Gearhart–Prüss bound.
//! * [`semigroupize`]: the submultiplicative envelope on a uniform grid.
//! * [`iteration`]: resolvent profiles and iterated updates over a finite
//!   frequency set.
//! * [`models`]: the differentiation operator on an interval and Jordan
//!   blocks, where everything is computable.
//! * [`experiment`]: JSON-configured experiments and CSV/JSON output, used by
//!   the `semibound` binary.

pub mod bound;
pub mod error;
pub mod experiment;
pub mod iteration;
mod linalg;
pub mod models;
pub mod output;
pub mod riccati;
pub mod semigroupize;

pub use bound::{pointwise_min, LogConcavityReport, Piece, PiecewiseLogAffineBound};
pub use error::{Error, Result};
pub use iteration::{
    iterate, iterate_u_only, underline_u, IterationStep, IterationTrace, OmegaSet,
    ResolventProfile,
};
pub use riccati::{
    a_star, a_star_candidate, b_star, gp_bound, phi_closed_form, update_bound,
    weighted_inv_norm_sq, MuSegment, OmegaRPair, RiccatiSolution,
};
pub use semigroupize::{is_subadditive, semigroupize, semigroupize_capped, GridBound};
