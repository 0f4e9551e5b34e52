use super::quadrature::VolumeForm;
use crate::geometry::{curvature, RadialProfile};
use crate::numerics::{power_law_tail, sphere_area};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Sharp Euclidean Sobolev constant `C_{n,e} = 4/(n(n-2)) · ω_n^{-2/n}` in
/// `‖u‖²_{2n/(n-2)} ≤ C ‖∇u‖²₂`.
pub fn euclidean_sobolev_constant(n: usize) -> f64 {
    let nf = n as f64;
    4.0 / (nf * (nf - 2.0)) * sphere_area(n).powf(-2.0 / nf)
}

/// Radial test function shapes, as functions of arclength `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestShape {
    /// `(1 + (r/b)²)^{-(n-2)/2}`.
    Bubble { b: f64 },
    /// `exp(-r²/(2 width²))`.
    Gaussian { width: f64 },
    /// `(1 - (r/radius)²)³` inside `radius`, zero outside.
    CompactBump { radius: f64 },
    /// Bubble multiplied by a compact bump of the given radius.
    CutoffBubble { b: f64, radius: f64 },
}

impl TestShape {
    pub fn value(&self, n: usize, r: f64) -> f64 {
        let bump = |rad: f64| {
            let x = r / rad;
            if x < 1.0 {
                (1.0 - x * x).powi(3)
            } else {
                0.0
            }
        };
        let bubble = |b: f64| (1.0 + (r / b).powi(2)).powf(-(n as f64 - 2.0) / 2.0);
        match *self {
            TestShape::Bubble { b } => bubble(b),
            TestShape::Gaussian { width } => (-(r * r) / (2.0 * width * width)).exp(),
            TestShape::CompactBump { radius } => bump(radius),
            TestShape::CutoffBubble { b, radius } => bubble(b) * bump(radius),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            TestShape::Bubble { b } => format!("bubble(b={b:.4e})"),
            TestShape::Gaussian { width } => format!("gaussian(width={width:.4e})"),
            TestShape::CompactBump { radius } => format!("bump(radius={radius:.4e})"),
            TestShape::CutoffBubble { b, radius } => {
                format!("cutoff_bubble(b={b:.4e}, radius={radius:.4e})")
            }
        }
    }

    pub fn sample(&self, vf: &VolumeForm) -> Vec<f64> {
        vf.r.iter().map(|&r| self.value(vf.n, r)).collect()
    }
}

/// A radial test function with its normalization integrals.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    pub label: String,
    pub u: Vec<f64>,
    /// `∫ u² dV`.
    pub l2: f64,
    /// `∫ |∇u|² dV`.
    pub dirichlet: f64,
}

impl TestFunction {
    pub fn new(vf: &VolumeForm, label: impl Into<String>, u: Vec<f64>) -> Result<Self> {
        if u.len() != vf.s.len() {
            return Err(Error::InvalidParameter(
                "test function length differs from the grid".into(),
            ));
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("test function"));
        }
        let sq: Vec<f64> = u.iter().map(|x| x * x).collect();
        let l2 = vf.integrate(&sq, true);
        if !(l2 > 0.0) {
            return Err(Error::InvalidParameter(
                "test function has zero L2 norm".into(),
            ));
        }
        let dirichlet = vf.dirichlet(&u, true);
        Ok(TestFunction {
            label: label.into(),
            u,
            l2,
            dirichlet,
        })
    }

    pub fn from_shape(vf: &VolumeForm, shape: &TestShape) -> Result<Self> {
        Self::new(vf, shape.label(), shape.sample(vf))
    }

    /// Copy scaled to `∫u² dV = 1`.
    pub fn normalized(&self) -> TestFunction {
        let c = self.l2.sqrt();
        TestFunction {
            label: self.label.clone(),
            u: self.u.iter().map(|x| x / c).collect(),
            l2: 1.0,
            dirichlet: self.dirichlet / self.l2,
        }
    }
}

/// Test-function battery: log-spaced bubbles plus compact bumps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BatterySpec {
    pub bubbles: usize,
    /// Smallest bubble scale; defaults to ten times the smallest arclength spacing.
    pub b_min: Option<f64>,
    /// Largest bubble scale; defaults to a twentieth of the outer radius.
    pub b_max: Option<f64>,
    pub bumps: usize,
}

impl Default for BatterySpec {
    fn default() -> Self {
        BatterySpec {
            bubbles: 24,
            b_min: None,
            b_max: None,
            bumps: 6,
        }
    }
}

fn log_space(a: f64, b: f64, k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![(a * b).sqrt()];
    }
    (0..k)
        .map(|i| (a.ln() + (b.ln() - a.ln()) * i as f64 / (k - 1) as f64).exp())
        .collect()
}

impl BatterySpec {
    pub fn shapes(&self, vf: &VolumeForm) -> Vec<TestShape> {
        let rmax = *vf.r.last().unwrap();
        let hmin = vf
            .r
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        let b_max = self.b_max.unwrap_or(rmax / 20.0);
        let b_min = self.b_min.unwrap_or(10.0 * hmin).min(b_max);
        let mut out: Vec<TestShape> = log_space(b_min, b_max, self.bubbles.max(1))
            .into_iter()
            .take(self.bubbles)
            .map(|b| TestShape::Bubble { b })
            .collect();
        out.extend(
            log_space(20.0 * hmin.max(1e-3 * rmax), 0.5 * rmax, self.bumps.max(1))
                .into_iter()
                .take(self.bumps)
                .map(|radius| TestShape::CompactBump { radius }),
        );
        out
    }
}

/// `‖u‖²_{2n/(n-2)} / ∫|∇u|² dV`, or `None` when the gradient vanishes.
pub fn sobolev_ratio(vf: &VolumeForm, u: &[f64]) -> Option<f64> {
    let den = vf.dirichlet(u, true);
    rayleigh(vf, u, den)
}

fn rayleigh(vf: &VolumeForm, u: &[f64], den: f64) -> Option<f64> {
    let nf = vf.n as f64;
    let crit = 2.0 * nf / (nf - 2.0);
    if !(den > 1e-300) {
        return None;
    }
    let pw: Vec<f64> = u.iter().map(|x| x.abs().powf(crit)).collect();
    let num = vf.integrate(&pw, true).powf(2.0 / crit);
    Some(num / den)
}

/// Battery lower bound on the Sobolev constant.
#[derive(Clone, Debug, PartialEq)]
pub struct SobolevEstimate {
    /// Supremum of the Rayleigh ratios over the battery.
    pub lower_bound: f64,
    /// Sharp Euclidean constant, for reference.
    pub euclidean: f64,
    pub best: TestShape,
    /// Ratio per battery member; `None` for skipped (zero-gradient) members.
    pub ratios: Vec<Option<f64>>,
}

/// Maximum Rayleigh ratio over a battery: a lower bound on `C_g`.
pub fn sobolev_estimate(p: &RadialProfile, spec: &BatterySpec) -> Result<SobolevEstimate> {
    let vf = VolumeForm::new(p);
    sobolev_estimate_shapes(p, &vf, &spec.shapes(&vf))
}

pub fn sobolev_estimate_shapes(
    p: &RadialProfile,
    vf: &VolumeForm,
    shapes: &[TestShape],
) -> Result<SobolevEstimate> {
    if p.n() < 3 {
        return Err(Error::Dimension(p.n(), "Sobolev constant needs n >= 3"));
    }
    if shapes.is_empty() {
        return Err(Error::InvalidParameter("empty battery".into()));
    }
    let ratios: Vec<Option<f64>> = shapes
        .par_iter()
        .map(|sh| sobolev_ratio(vf, &sh.sample(vf)))
        .collect();
    let mut best = None;
    for (i, r) in ratios.iter().enumerate() {
        if let Some(v) = r {
            if best.map_or(true, |(_, b)| *v > b) {
                best = Some((i, *v));
            }
        }
    }
    let (bi, lb) = best.ok_or_else(|| Error::InvalidParameter("no usable test function".into()))?;
    Ok(SobolevEstimate {
        lower_bound: lb,
        euclidean: euclidean_sobolev_constant(p.n()),
        best: shapes[bi].clone(),
        ratios,
    })
}

/// `‖u‖²_{2n/(n-2)} / ∫(|∇u|² + R⁺u²) dV`, `None` for a zero denominator.
pub fn weighted_sobolev_ratio(p: &RadialProfile, u: &[f64]) -> Option<f64> {
    let vf = VolumeForm::new(p);
    let k = curvature(p);
    weighted_ratio_with(&vf, &k.scalar, u)
}

fn weighted_ratio_with(vf: &VolumeForm, scalar: &[f64], u: &[f64]) -> Option<f64> {
    let pot: Vec<f64> = u
        .iter()
        .zip(scalar)
        .map(|(x, r)| r.max(0.0) * x * x)
        .collect();
    let den = vf.dirichlet(u, true) + vf.integrate(&pot, true);
    rayleigh(vf, u, den)
}

/// Battery maximum of the weighted ratio (the empirical constant of the weighted
/// Sobolev inequality).
pub fn weighted_sobolev_battery_max(p: &RadialProfile, shapes: &[TestShape]) -> Option<f64> {
    let vf = VolumeForm::new(p);
    let k = curvature(p);
    shapes
        .par_iter()
        .map(|sh| weighted_ratio_with(&vf, &k.scalar, &sh.sample(&vf)))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
}

/// Twenty functions for the log-Sobolev check: Gaussians, compact bumps and
/// cut-off bubbles at scales fitting inside the grid.
pub fn log_sobolev_battery(p: &RadialProfile) -> Vec<TestShape> {
    let vf = VolumeForm::new(p);
    let rmax = *vf.r.last().unwrap();
    let mut out = Vec::new();
    for w in log_space(0.02 * rmax, 0.15 * rmax, 10) {
        out.push(TestShape::Gaussian { width: w });
    }
    for rad in log_space(0.1 * rmax, 0.9 * rmax, 5) {
        out.push(TestShape::CompactBump { radius: rad });
    }
    for b in log_space(0.02 * rmax, 0.2 * rmax, 5) {
        out.push(TestShape::CutoffBubble {
            b,
            radius: 0.9 * rmax,
        });
    }
    out
}

/// `∫ u² log u² dV` with `0 log 0 = 0`; rejects integrands whose tail does not decay.
pub(crate) fn entropy_term(vf: &VolumeForm, u: &[f64]) -> Result<f64> {
    let v: Vec<f64> = u
        .iter()
        .map(|x| {
            let q = x * x;
            if q > 0.0 {
                q * q.ln()
            } else {
                0.0
            }
        })
        .collect();
    let dens: Vec<f64> = v.iter().zip(&vf.density).map(|(a, b)| a.abs() * b).collect();
    if let Some(t) = power_law_tail(&vf.s, &dens, super::quadrature::TAIL_FIT_FRACTION) {
        let last = dens.last().copied().unwrap_or(0.0);
        let peak = dens.iter().cloned().fold(0.0, f64::max);
        if t.k <= 1.0 && last > 1e-8 * peak {
            return Err(Error::InvalidParameter(
                "u² log u² is not integrable at infinity".into(),
            ));
        }
    }
    Ok(vf.integrate(&v, true))
}

/// Number of points of the logarithmic `τ` grid on `[1e-3, 1e3]`.
pub const TAU_GRID_POINTS: usize = 121;

/// Slack `min_τ RHS(τ) - ∫u² log u² dV` of the log-Sobolev inequality
/// `∫u² log u² ≤ 4τ∫|∇u|² - (n/2) log τ + (n/2)(log C + log(n/8) - 1)` for
/// `∫u² = 1`. Non-negative whenever `C ≥ C_g`.
pub fn log_sobolev_check(p: &RadialProfile, u: &TestFunction, c: f64) -> Result<f64> {
    let vf = VolumeForm::new(p);
    log_sobolev_slack(&vf, u, c)
}

pub(crate) fn log_sobolev_slack(vf: &VolumeForm, u: &TestFunction, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Sobolev constant must be positive, got {c}"
        )));
    }
    let nf = vf.n as f64;
    let un = u.normalized();
    let lhs = entropy_term(vf, &un.u)?;
    let g = vf.dirichlet(&un.u, true);
    let konst = 0.5 * nf * (c.ln() + (nf / 8.0).ln() - 1.0);
    let rhs = |tau: f64| 4.0 * tau * g - 0.5 * nf * tau.ln() + konst;
    let mut taus = log_space(1e-3, 1e3, TAU_GRID_POINTS);
    if g > 0.0 {
        taus.push((nf / (8.0 * g)).clamp(1e-3, 1e3));
    }
    let best = taus
        .par_iter()
        .map(|&t| rhs(t))
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best - lhs)
}
