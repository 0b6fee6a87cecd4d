//! Axiom suites, worked-example equivalences, `Y_{p,q}` and the embeddings
//! between `Y_{p,q}` and `L^{p,p;α}`.

mod axioms;
mod bridge;
mod examples;
mod special;
mod ypq;

pub use axioms::{
    plan, run_axioms, AxiomConfig, AxiomLine, AxiomReport, AxiomSet, AxiomTarget, Plan,
};
pub use bridge::{
    bridge_classify, bridge_numeric_crosscheck, ln_indicator_ratio, log_power_ratio,
    BridgeCondition, BridgeVerdict, CrosscheckReport, Direction, DirectionCheck, ThresholdHit,
    DELTA, THRESHOLDS,
};
pub use examples::{example_equivalences, EquivalenceReport, ExampleParams, Regime};
pub use ypq::{eval_ypq, YpqSpec};
