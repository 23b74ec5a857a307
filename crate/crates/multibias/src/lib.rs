//! Exact arithmetic for biases of multilinear maps of finite abelian groups.
//!
//! A multilinear map `φ : A_1 × … × A_k → T` (with `T = R/Z` the torus) has a
//! *bias*, the average of `e(φ(x)) = exp(2πi φ(x))` over the whole domain.
//! This crate computes biases exactly, checks the standard inequalities they
//! satisfy, extends maps across subgroup and range enlargements, verifies and
//! searches partition-rank certificates built from the multiplication maps
//! `m_q(x, y) = xy/q mod 1`, and enumerates the spectrum of attainable bias
//! values at small group orders.
//!
//! Everything is exact: torus values are reduced fractions, complex bias
//! values live in cyclotomic rings `Z[ζ_N]` with an integer denominator, and
//! inequalities between algebraic values are decided by exact equality or by
//! certified interval refinement. There is no floating point in any
//! decision path.
//!
//! The crate is organized around the `examples/` directory (one runnable
//! example per capability) plus a thin `multibias` binary exposing the same
//! operations on text files; see the README.

pub mod battery;
pub mod bias;
pub mod cli;
pub mod cyclo;
pub mod enclose;
pub mod format;
pub mod group;
pub mod map;
pub mod spectrum;
pub mod structure;
pub mod torus;

mod error;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Enumeration budgets for the operations that walk whole domains or
/// candidate spaces. Exceeding a budget is a hard error, never a silent
/// fallback to sampling.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    /// Maximum number of domain points an averaging loop may visit.
    pub max_points: u128,
    /// Maximum number of candidate tensors a certificate search may try.
    pub max_search_steps: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_points: 1_000_000, max_search_steps: 10_000_000 }
    }
}

impl Budget {
    pub fn with_points(max_points: u128) -> Self {
        Budget { max_points, ..Budget::default() }
    }
}
