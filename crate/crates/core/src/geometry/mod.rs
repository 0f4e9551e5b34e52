//! Discrete rotationally symmetric metrics `g = φ² ds² + f² dσ²` on R^n and their
//! curvature.

pub(crate) mod curvature;
mod families;
mod interp;
mod io;
mod oracle;
mod validate;

pub use curvature::{curvature, curvature_with_order, CurvatureField};
pub use families::{make_profile, schwarzschild_psi, schwarzschild_throat_rho, Family};
pub use interp::monotone_cubic;
pub use io::{fmt_f64, profile_from_json, profile_to_json, read_profile, write_atomic, write_profile};
pub use oracle::{riemann_from_jet, riemann_oracle, riemann_oracle_with_order, MetricJet, RiemannSummary};
pub use validate::{validate, Check, ValidationReport};

use crate::numerics::{cumulative_integral, fit_line, Parity};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Default order of the finite-difference stencils used for curvature.
pub const DEFAULT_STENCIL_ORDER: usize = 6;

/// Radial grid description. Every grid starts at `s = 0` and has `m + 1` nodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridSpec {
    Uniform { s_max: f64, m: usize },
    /// `s = s_max·sinh(β ξ)/sinh(β)` on uniform `ξ`, clustering nodes at the origin.
    Graded { s_max: f64, m: usize, stretch: f64 },
}

impl GridSpec {
    pub fn nodes(&self) -> Result<Vec<f64>> {
        match *self {
            GridSpec::Uniform { s_max, m } => {
                check_grid_params(s_max, m)?;
                let mut s: Vec<f64> = (0..=m).map(|i| s_max * i as f64 / m as f64).collect();
                s[m] = s_max;
                Ok(s)
            }
            GridSpec::Graded { s_max, m, stretch } => {
                check_grid_params(s_max, m)?;
                if !(stretch > 0.0 && stretch.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "grid stretch must be positive, got {stretch}"
                    )));
                }
                let d = stretch.sinh();
                let mut s: Vec<f64> = (0..=m)
                    .map(|i| s_max * (stretch * i as f64 / m as f64).sinh() / d)
                    .collect();
                s[m] = s_max;
                Ok(s)
            }
        }
    }
}

fn check_grid_params(s_max: f64, m: usize) -> Result<()> {
    if !(s_max > 0.0 && s_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "s_max must be positive, got {s_max}"
        )));
    }
    if m < 8 {
        return Err(Error::InvalidParameter(format!(
            "grid needs at least 8 intervals, got {m}"
        )));
    }
    Ok(())
}

/// Fitted asymptotic model `|f/r - 1| ≈ a·r^{-τ}` on the outer third of the grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailModel {
    pub a: f64,
    /// Fitted decay order, `+∞` for an exactly flat tail.
    pub tau: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
}

impl TailModel {
    pub const FLAT: TailModel = TailModel {
        a: 0.0,
        tau: f64::INFINITY,
        residual: 0.0,
    };
}

/// A rotationally symmetric metric sampled on a radial grid.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    n: usize,
    s: Vec<f64>,
    f: Vec<f64>,
    phi: Vec<f64>,
    tau: f64,
    tail: TailModel,
    family: String,
    params: BTreeMap<String, f64>,
}

impl RadialProfile {
    /// Builds a profile after checking the pointwise invariants: `n ≥ 2`,
    /// `s_0 = 0`, strictly increasing grid, `f_0 = 0`, `f_i > 0` for `i ≥ 1` and `φ > 0`.
    pub fn new(n: usize, s: Vec<f64>, f: Vec<f64>, phi: Vec<f64>, tau: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(n, "profiles need n >= 2"));
        }
        if s.len() != f.len() || s.len() != phi.len() {
            return Err(Error::InvalidParameter(
                "s, f and phi must have equal length".into(),
            ));
        }
        if s.len() < 9 {
            return Err(Error::InvalidParameter(
                "profiles need at least 9 nodes".into(),
            ));
        }
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "decay order tau must be positive, got {tau}"
            )));
        }
        for (name, v) in [("s", &s), ("f", &f), ("phi", &phi)] {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(name));
            }
        }
        if s[0] != 0.0 {
            return Err(Error::InvalidParameter("grid must start at s = 0".into()));
        }
        for i in 1..s.len() {
            if !(s[i] > s[i - 1]) {
                return Err(Error::GridNotMonotone(i));
            }
        }
        if f[0] != 0.0 {
            return Err(Error::InvalidParameter("f must vanish at the origin".into()));
        }
        for i in 1..f.len() {
            if !(f[i] > 0.0) {
                return Err(Error::NonPositive {
                    field: "f",
                    index: i,
                    value: f[i],
                });
            }
        }
        for (i, &p) in phi.iter().enumerate() {
            if !(p > 0.0) {
                return Err(Error::NonPositive {
                    field: "phi",
                    index: i,
                    value: p,
                });
            }
        }
        let mut p = RadialProfile {
            n,
            s,
            f,
            phi,
            tau,
            tail: TailModel::FLAT,
            family: "custom".into(),
            params: BTreeMap::new(),
        };
        p.tail = fit_tail(&p);
        Ok(p)
    }

    /// Attaches provenance labels (family name and parameters).
    pub fn with_family(mut self, family: &str, params: BTreeMap<String, f64>) -> Self {
        self.family = family.to_string();
        self.params = params;
        self.tail = fit_tail(&self);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn s(&self) -> &[f64] {
        &self.s
    }
    pub fn f(&self) -> &[f64] {
        &self.f
    }
    pub fn phi(&self) -> &[f64] {
        &self.phi
    }
    pub fn tau(&self) -> f64 {
        self.tau
    }
    pub fn tail(&self) -> TailModel {
        self.tail
    }
    pub fn family(&self) -> &str {
        &self.family
    }
    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }
    /// Number of nodes `M + 1`.
    pub fn len(&self) -> usize {
        self.s.len()
    }
    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }
    /// Asymptotic value of `φ` (and of `f/s`): the accumulated `scale_metric` factor.
    pub fn scale(&self) -> f64 {
        self.params.get("scale").copied().unwrap_or(1.0)
    }

    /// Same grid and labels with new `f` and `φ`, re-checked.
    pub fn with_fields(&self, f: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        let mut p = RadialProfile::new(self.n, self.s.clone(), f, phi, self.tau)?;
        p.family = self.family.clone();
        p.params = self.params.clone();
        p.tail = fit_tail(&p);
        Ok(p)
    }
}

/// Fits `δ(s) = max(|f/(c s) - 1|, |φ/c - 1|) ≈ a (c s)^{-τ}` on the outer third,
/// `c` the asymptotic scale.
fn fit_tail(p: &RadialProfile) -> TailModel {
    let c = p.scale();
    let m = p.len();
    let start = m - m / 3;
    let (mut lx, mut ly) = (Vec::new(), Vec::new());
    for i in start..m {
        let x = c * p.s[i];
        let d = (p.f[i] / x - 1.0).abs().max((p.phi[i] / c - 1.0).abs());
        if d > 1e-13 {
            lx.push(x.ln());
            ly.push(d.ln());
        }
    }
    if lx.len() < 3 {
        return TailModel::FLAT;
    }
    match fit_line(&lx, &ly) {
        Some((c0, c1, res)) => TailModel {
            a: c0.exp(),
            tau: -c1,
            residual: res,
        },
        None => TailModel::FLAT,
    }
}

/// Arclength `r(s) = ∫_0^s φ`. Exact for constant `φ`, fourth order otherwise.
pub fn arclength(p: &RadialProfile) -> Vec<f64> {
    arclength_of(&p.s, &p.phi)
}

pub(crate) fn arclength_of(s: &[f64], phi: &[f64]) -> Vec<f64> {
    let c = phi[0];
    if phi.iter().all(|&x| x == c) {
        return s.iter().map(|&x| c * x).collect();
    }
    cumulative_integral(s, phi, Parity::Even)
}

/// The profile of `λ² g`: `f -> λ f`, `φ -> λ φ` on the same grid.
pub fn scale_metric(p: &RadialProfile, lambda: f64) -> Result<RadialProfile> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "scale factor must be positive, got {lambda}"
        )));
    }
    let f = p.f.iter().map(|x| lambda * x).collect();
    let phi = p.phi.iter().map(|x| lambda * x).collect();
    let mut q = p.with_fields(f, phi)?;
    q.params.insert("scale".into(), p.scale() * lambda);
    q.tail = fit_tail(&q);
    Ok(q)
}

/// Interpolates the profile onto a new grid inside `[0, s_M]`.
pub fn regrid(p: &RadialProfile, grid: &GridSpec) -> Result<RadialProfile> {
    regrid_nodes(p, &grid.nodes()?)
}

pub fn regrid_nodes(p: &RadialProfile, nodes: &[f64]) -> Result<RadialProfile> {
    let smax = *p.s.last().unwrap();
    if nodes.last().copied().unwrap_or(0.0) > smax * (1.0 + 1e-14) {
        return Err(Error::InvalidParameter(format!(
            "new grid extends past s_max = {smax}"
        )));
    }
    let mut nodes = nodes.to_vec();
    if let Some(last) = nodes.last_mut() {
        *last = last.min(smax);
    }
    let f = monotone_cubic(&p.s, &p.f, Parity::Odd, &nodes);
    let phi = monotone_cubic(&p.s, &p.phi, Parity::Even, &nodes);
    let mut q = RadialProfile::new(p.n, nodes, f, phi, p.tau)?;
    q.family = p.family.clone();
    q.params = p.params.clone();
    q.tail = fit_tail(&q);
    Ok(q)
}
