//! Integrals, norms, entropy and detector quantities of radial profiles. Every
//! function here is pure in its inputs.

mod budget;
mod conservation;
mod diagnostics;
mod entropy;
mod minimal;
mod norms;
mod quadrature;
mod sobolev;

pub use budget::{
    budget_constants, check_non_increasing, decay_report, evolution_budget, monotone_column,
    BudgetRow, DecayReport, MonotoneReport, DECAY_MIN_SAMPLES,
};
pub use conservation::{
    adm_mass, cgb_residual, CgbReport, MassFit, CGB_MIN_DECAY, MASS_FIT_TOL, MASS_FIT_WINDOW,
};
pub use diagnostics::{
    diagnostics_csv, diagnostics_row, DiagnosticsConfig, DiagnosticsRow, EntropyMonitor,
    CSV_COLUMNS,
};
pub use entropy::{
    matched_gaussian, mu_from_mu_star, mu_star_estimate, w_functional, w_star, MuStarConfig,
    MuStarResult,
};
pub use minimal::{detect_minimal_hyperspheres, e1_e2, minimal_hyperspheres, MinimalSphere};
pub use norms::{
    curvature_power_integral, l_n2, lp_curvature_norm, min_curvature_exponent, pinching_ratio,
    q_exponent,
};
pub use quadrature::{volume_integral, VolumeForm, TAIL_FIT_FRACTION};
pub use sobolev::{
    euclidean_sobolev_constant, log_sobolev_battery, log_sobolev_check, sobolev_estimate,
    sobolev_estimate_shapes, sobolev_ratio, weighted_sobolev_battery_max, weighted_sobolev_ratio,
    BatterySpec, SobolevEstimate, TestFunction, TestShape, TAU_GRID_POINTS,
};
