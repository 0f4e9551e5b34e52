use super::{GridSpec, RadialProfile};
use crate::c1_search::NeckProfileParams;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Closed-form profile families.
///
/// Radial Gaussians are evenly symmetrized,
/// `G(r) = (e^{-((r-r0)/w)²} + e^{-((r+r0)/w)²}) / (1 + e^{-(2 r0/w)²})`,
/// so that the profiles are smooth at the origin; `G(r0) = 1` and `G` agrees with
/// the one-sided Gaussian up to `e^{-(r0/w)²}`. The warp bump uses
/// `B(r) = G(r)(1 - e^{-(r/w)²})`, which vanishes like `r²` so that `f'(0) = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    Flat,
    /// `f = r (1 + a B(r))`, `φ = 1`.
    GaussianBump { a: f64, r0: f64, w: f64 },
    /// Spatial Schwarzschild in isotropic form `ψ^{4/(n-2)} |dx|²`,
    /// `ψ = 1 + m/(2ρ^{n-2})`, with the inner end capped smoothly by a round-off of
    /// `ρ^{2-n}` at scale `c = ρ_throat/5`. Exact outside `ρ ≈ 2c`.
    SchwarzschildSlice { m: f64 },
    /// `g = e^{2u} |dx|²`, `u = u0 G(ρ)`.
    ConformalBump { u0: f64, r0: f64, w: f64 },
    /// `f(r) = R g(r/R)` for a neck profile `g`, a quintic blend on `[R, R+L]`
    /// bringing `f'` back to 1, then an exactly flat tail `f = r + const`.
    Neck {
        q: Vec<f64>,
        radius: f64,
        transition: f64,
    },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Flat => "flat",
            Family::GaussianBump { .. } => "gaussian_bump",
            Family::SchwarzschildSlice { .. } => "schwarzschild_slice",
            Family::ConformalBump { .. } => "conformal_bump",
            Family::Neck { .. } => "neck",
        }
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        match self {
            Family::Flat => {}
            Family::GaussianBump { a, r0, w } => {
                m.insert("a".into(), *a);
                m.insert("r0".into(), *r0);
                m.insert("w".into(), *w);
            }
            Family::SchwarzschildSlice { m: mass } => {
                m.insert("m".into(), *mass);
            }
            Family::ConformalBump { u0, r0, w } => {
                m.insert("u0".into(), *u0);
                m.insert("r0".into(), *r0);
                m.insert("w".into(), *w);
            }
            Family::Neck {
                q,
                radius,
                transition,
            } => {
                for (k, v) in q.iter().enumerate() {
                    m.insert(format!("q{}", k + 1), *v);
                }
                m.insert("radius".into(), *radius);
                m.insert("transition".into(), *transition);
            }
        }
        m
    }

    /// One-line catalog description with default parameters.
    pub fn catalog() -> Vec<(&'static str, &'static str)> {
        vec![
            ("flat", "Euclidean metric, f = r"),
            (
                "gaussian_bump",
                "a, r0, w: f = r (1 + a B(r)), B a symmetrized radial Gaussian vanishing at the origin",
            ),
            (
                "schwarzschild_slice",
                "m: isotropic Schwarzschild psi^{4/(n-2)}|dx|^2 with a smooth inner cap; has a throat",
            ),
            (
                "conformal_bump",
                "u0, r0, w: conformal metric e^{2u}|dx|^2, u = u0 G(rho)",
            ),
            (
                "neck",
                "q[], radius, transition: neck profile R g(r/R), blended to a flat tail",
            ),
        ]
    }
}

fn check_finite_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// Symmetrized radial Gaussian, even in `r` with peak value 1 at `r0`.
pub(crate) fn even_gaussian(r: f64, r0: f64, w: f64) -> f64 {
    let a = ((r - r0) / w).powi(2);
    let b = ((r + r0) / w).powi(2);
    let c = (2.0 * r0 / w).powi(2);
    ((-a).exp() + (-b).exp()) / (1.0 + (-c).exp())
}

/// Bump factor of the warp family: `G(r)(1 - e^{-(r/w)²})`.
pub(crate) fn warp_bump(r: f64, r0: f64, w: f64) -> f64 {
    even_gaussian(r, r0, w) * -(-(r / w).powi(2)).exp_m1()
}

/// Capped `ρ^{2-n}`: `c^{2-n} ((1 - e^{-x²})/x²)^{(n-2)/2}`, `x = ρ/c`.
fn capped_inverse_power(rho: f64, c: f64, n: usize) -> f64 {
    let x2 = (rho / c).powi(2);
    let core = if x2 < 1e-8 {
        1.0 - 0.5 * x2
    } else {
        -(-x2).exp_m1() / x2
    };
    c.powf(2.0 - n as f64) * core.powf((n as f64 - 2.0) / 2.0)
}

/// Throat location `ρ = (m/2)^{1/(n-2)}` of isotropic Schwarzschild.
pub fn schwarzschild_throat_rho(m: f64, n: usize) -> f64 {
    (m / 2.0).powf(1.0 / (n as f64 - 2.0))
}

/// Conformal factor `ψ(ρ)` of the capped Schwarzschild family.
pub fn schwarzschild_psi(rho: f64, m: f64, n: usize) -> f64 {
    let c = schwarzschild_throat_rho(m, n) / 5.0;
    1.0 + 0.5 * m * capped_inverse_power(rho, c, n)
}

/// Instantiates a family on a grid.
pub fn make_profile(family: &Family, n: usize, grid: &GridSpec) -> Result<RadialProfile> {
    if n < 2 {
        return Err(Error::Dimension(n, "profiles need n >= 2"));
    }
    let s = grid.nodes()?;
    let nf = n as f64;
    let (f, phi, tau): (Vec<f64>, Vec<f64>, f64) = match family {
        Family::Flat => (s.clone(), vec![1.0; s.len()], nf - 2.0),
        Family::GaussianBump { a, r0, w } => {
            check_finite_positive("w", *w)?;
            if !(a.is_finite() && r0.is_finite() && *r0 >= 0.0) {
                return Err(Error::InvalidParameter("a and r0 must be finite, r0 >= 0".into()));
            }
            let f = s.iter().map(|&r| r * (1.0 + a * warp_bump(r, *r0, *w))).collect();
            (f, vec![1.0; s.len()], nf - 2.0)
        }
        Family::SchwarzschildSlice { m } => {
            if n < 3 {
                return Err(Error::Dimension(n, "schwarzschild_slice needs n >= 3"));
            }
            check_finite_positive("m", *m)?;
            let e = 2.0 / (nf - 2.0);
            let phi: Vec<f64> = s.iter().map(|&r| schwarzschild_psi(r, *m, n).powf(e)).collect();
            let f = s.iter().zip(&phi).map(|(r, p)| r * p).collect();
            (f, phi, nf - 2.0)
        }
        Family::ConformalBump { u0, r0, w } => {
            check_finite_positive("w", *w)?;
            if !(u0.is_finite() && r0.is_finite() && *r0 >= 0.0) {
                return Err(Error::InvalidParameter("u0 and r0 must be finite, r0 >= 0".into()));
            }
            let phi: Vec<f64> = s
                .iter()
                .map(|&r| (u0 * even_gaussian(r, *r0, *w)).exp())
                .collect();
            let f = s.iter().zip(&phi).map(|(r, p)| r * p).collect();
            (f, phi, nf - 2.0)
        }
        Family::Neck {
            q,
            radius,
            transition,
        } => {
            check_finite_positive("radius", *radius)?;
            check_finite_positive("transition", *transition)?;
            let f = neck_values(&NeckProfileParams::new(q.clone())?, *radius, *transition, &s);
            (f, vec![1.0; s.len()], 1.0)
        }
    };
    // In two dimensions there is no decay scale n - 2; declare order 1.
    let tau = if n == 2 { 1.0 } else { tau.min(nf - 2.0) };
    Ok(RadialProfile::new(n, s, f, phi, tau)?.with_family(family.name(), family.params()))
}

/// Areal radius of the neck family at arclength values `r`.
pub(crate) fn neck_values(p: &NeckProfileParams, big_r: f64, len: f64, r: &[f64]) -> Vec<f64> {
    let ev = p.evaluator();
    let [_, g2, g3] = ev.derivs(1.0);
    let d = ev.g(1.0);
    // f' on [R, R+L] as p(t), t = (r-R)/L: quintic Hermite with
    // p(0)=0, p'(0)=L g''(1)/R, p''(0)=L² g'''(1)/R², p(1)=1, p'(1)=p''(1)=0.
    let d0 = len * g2 / big_r;
    let a0 = len * len * g3 / (big_r * big_r);
    // Coefficients of t^k, k = 0..5.
    let h1 = [0.0, 1.0, 0.0, -6.0, 8.0, -3.0];
    let h2 = [0.0, 0.0, 0.5, -1.5, 1.5, -0.5];
    let h3 = [0.0, 0.0, 0.0, 10.0, -15.0, 6.0];
    let c: Vec<f64> = (0..6).map(|k| d0 * h1[k] + a0 * h2[k] + h3[k]).collect();
    let prim = |t: f64| -> f64 {
        (0..6)
            .map(|k| c[k] * t.powi(k as i32 + 1) / (k as f64 + 1.0))
            .sum()
    };
    let end = big_r * d + len * prim(1.0);
    r.iter()
        .map(|&x| {
            if x <= big_r {
                big_r * ev.g(x / big_r)
            } else if x <= big_r + len {
                big_r * d + len * prim((x - big_r) / len)
            } else {
                end + (x - big_r - len)
            }
        })
        .collect()
}
