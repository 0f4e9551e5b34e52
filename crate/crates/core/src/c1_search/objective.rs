//! Quadrature of the two neck energies on a sampled profile.

use super::profile::{NeckEval, NeckPoint, NeckProfileParams};
use crate::numerics::simpson_weights;
use crate::{Error, Result};

/// Number of uniform evaluation points on `[0, 1]`.
pub const EVAL_POINTS: usize = 2001;

/// Smallest admissible latent value `Q(x²)` on the evaluation grid; below it the
/// profile is treated as touching `g' = 0` inside `[0, 1)`.
pub const LATENT_FLOOR: f64 = 1e-6;

/// A neck profile `f(r) = R g(r/R)` sampled on `points` uniform nodes of `[0, R]`.
#[derive(Clone, Debug)]
pub struct UnitProfile {
    pub radius: f64,
    pub r: Vec<f64>,
    pub f: Vec<f64>,
    /// `f'`.
    pub f1: Vec<f64>,
    /// `1 - f'`, free of cancellation near the origin.
    pub one_minus_f1: Vec<f64>,
    /// `f''`.
    pub f2: Vec<f64>,
}

impl UnitProfile {
    pub fn sample(params: &NeckProfileParams, radius: f64, points: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
        }
        if points < 3 || points % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "evaluation grid needs an odd number >= 3 of points, got {points}"
            )));
        }
        let ev = params.evaluator();
        let h = 1.0 / (points - 1) as f64;
        let pts: Vec<NeckPoint> = (0..points).map(|i| ev.point(i as f64 * h)).collect();
        check_latent(pts[..points - 1].iter().map(|p| p.latent))?;
        // g from g' by trapezoid with the endpoint-derivative correction, O(h⁴)
        // where g is only C³ (spline knots) and O(h⁵) elsewhere.
        let mut g = 0.0;
        let mut out = UnitProfile {
            radius,
            r: Vec::with_capacity(points),
            f: Vec::with_capacity(points),
            f1: Vec::with_capacity(points),
            one_minus_f1: Vec::with_capacity(points),
            f2: Vec::with_capacity(points),
        };
        for (i, p) in pts.iter().enumerate() {
            if i > 0 {
                let a = &pts[i - 1];
                g += 0.5 * h * (a.g1 + p.g1) - h * h / 12.0 * (p.g2 - a.g2);
            }
            out.r.push(radius * i as f64 * h);
            out.f.push(radius * g);
            out.f1.push(p.g1);
            out.one_minus_f1.push(p.one_minus_g1);
            out.f2.push(p.g2 / radius);
        }
        Ok(out)
    }

    /// `(E1, E2)` by Simpson quadrature; the integrands take their series limit,
    /// zero, at the origin.
    pub fn energies(&self, n: usize) -> (f64, f64) {
        let w = simpson_weights(&self.r);
        let (e1, e2) = energy_integrands(self, n);
        let dot = |v: &[f64]| v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
        (dot(&e1), dot(&e2))
    }
}

/// Pointwise `|ν1|^{n/2} f^{n-1}` and `|ν2|^{n/2} f^{n-1}`.
pub(crate) fn energy_integrands(p: &UnitProfile, n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = n as f64 / 2.0;
    let m = p.r.len();
    let mut e1 = vec![0.0; m];
    let mut e2 = vec![0.0; m];
    for i in 1..m {
        let f = p.f[i];
        // |1 - f'²|^{n/2} / f  and  |f''|^{n/2} f^{n/2 - 1}
        let a = (p.one_minus_f1[i] * (1.0 + p.f1[i])).abs();
        e1[i] = a.powf(h) / f;
        e2[i] = p.f2[i].abs().powf(h) * f.powf(h - 1.0);
    }
    (e1, e2)
}

/// Rejects profiles whose latent spline comes within [`LATENT_FLOOR`] of zero, or
/// changes sign, anywhere on `[0, 1)` of the evaluation grid.
pub(crate) fn check_admissible(ev: &NeckEval, points: usize) -> Result<()> {
    check_latent((0..points - 1).map(|i| ev.latent(i as f64 / (points - 1) as f64)))
}

fn check_latent(values: impl Iterator<Item = f64>) -> Result<()> {
    for (i, q) in values.enumerate() {
        if !q.is_finite() {
            return Err(Error::NonFinite("neck latent spline"));
        }
        if q < LATENT_FLOOR {
            return Err(Error::NonPositive {
                field: "neck latent spline",
                index: i,
                value: q,
            });
        }
    }
    Ok(())
}

/// `(E1, E2)` of an admissible profile on the default grid.
pub fn neck_energies(params: &NeckProfileParams, n: usize) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::Dimension(n, "neck energies need n >= 2"));
    }
    Ok(UnitProfile::sample(params, 1.0, EVAL_POINTS)?.energies(n))
}

/// `max(E1, E2)`, or `+∞` when the constraints fail.
pub fn neck_objective(params: &NeckProfileParams, n: usize) -> f64 {
    match neck_energies(params, n) {
        Ok((e1, e2)) if e1.is_finite() && e2.is_finite() => e1.max(e2),
        _ => f64::INFINITY,
    }
}
