//! Concrete function representations and the quadrature engine.

pub mod extended;
pub mod powerlog;
mod profile;
pub mod quad;
mod step;

pub use powerlog::{
    Asymptote, Convergence, Endpoint, IntegralAsymptote, PowerLogExpr, PowerLogTerm,
};
pub use profile::CumulativeProfile;
pub use quad::{
    integrate, integrate_step, sup_on_interval, QuadConfig, QuadStatus, QuadratureResult,
};
pub use step::{DecreasingStep, StepFunction};
