//! Rearrangement-invariant norms on exactly represented step functions.
//!
//! Functions live on an interval `(0, b)` with `b` finite or infinite and are
//! stored as finitely many constant pieces. Everything a norm needs from a
//! function (its non-increasing rearrangement `f*`, the prefix integral of
//! `f*`, the maximal function `f**`) is computed exactly from the pieces; only
//! the final weighted integrals go through adaptive quadrature.
//!
//! On top of the classical functionals (Lebesgue, Lorentz, Lorentz-Zygmund,
//! `Λ^q(w)`, `Γ^p(w)`) the crate evaluates the bracket functional
//!
//! ```text
//! ρ^<α>(f) = ρ̄( ((f^α)**)^(1/α) )
//! ```
//!
//! and the power functional `ρ^{α}(f) = ρ(f^α)^(1/α)`, estimates embedding
//! constants, evaluates associate norms of `(Λ^q(w))^<α>` and runs axiom and
//! embedding suites over seeded samples.

pub mod associate;
pub mod bracket;
pub mod error;
pub mod funcrep;
pub mod hardy;
pub mod harness;
pub mod norms;
pub mod par;
pub mod rearrange;
pub mod sample;

pub use error::{Error, Result};
pub use funcrep::{
    CumulativeProfile, DecreasingStep, PowerLogExpr, QuadConfig, QuadStatus, QuadratureResult,
    StepFunction,
};
pub use norms::{eval_norm, EvalReport, Method, NormKind, NormSpec, RiClass, Weight};
