//! Search for the smallest curvature energy of a rotationally symmetric neck: a
//! profile with `f(0) = 0`, `f'(0) = 1` that reaches a minimal sphere `f'(R) = 0`.
//! After rescaling to `R = 1` the energy is `max(E1, E2)` with
//! `E1 = ∫|ν1|^{n/2} f^{n-1}`, `E2 = ∫|ν2|^{n/2} f^{n-1}` over `[0, 1]`.

mod objective;
mod profile;
mod search;
mod witness;

pub use objective::{neck_energies, neck_objective, UnitProfile, EVAL_POINTS, LATENT_FLOOR};
pub use profile::{NeckEval, NeckPoint, NeckProfileParams};
pub use search::{
    estimate_cn, sweep, witness_profile, C1Estimate, SearchConfig, StageResult, SweepCell,
    SweepRecord, MAX_SWEEP_DIM,
};
pub use witness::{default_ceiling, lower_bound_witness, BoundStep, WitnessReport, WITNESS_POINTS, WITNESS_TOL};
