use crate::geometry::{arclength, curvature, RadialProfile, DEFAULT_STENCIL_ORDER};
use crate::geometry::curvature::radial_derivatives;
use crate::numerics::{bisect, cumulative_integral, lagrange_eval, DiffOperator, Parity};
use crate::{Error, Result};
use serde::Serialize;

/// A distance sphere on which `∂_r f` vanishes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MinimalSphere {
    /// Coordinate location.
    pub s: f64,
    /// Arclength radius.
    pub r: f64,
    /// `true` when `∂_r f` touches zero without changing sign.
    pub tangential: bool,
}

fn hermite(a: f64, b: f64, ya: f64, yb: f64, da: f64, db: f64, x: f64) -> f64 {
    let h = b - a;
    let t = (x - a) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    ya * (2.0 * t3 - 3.0 * t2 + 1.0)
        + yb * (-2.0 * t3 + 3.0 * t2)
        + h * (da * (t3 - 2.0 * t2 + t) + db * (t3 - t2))
}

struct RadialData {
    s: Vec<f64>,
    r: Vec<f64>,
    phi: Vec<f64>,
    fr: Vec<f64>,
    /// `d(f_r)/ds = φ f_rr`.
    dfr: Vec<f64>,
}

impl RadialData {
    fn new(p: &RadialProfile) -> Self {
        let op = DiffOperator::new(p.s(), DEFAULT_STENCIL_ORDER);
        let (fr, _, frr) = radial_derivatives(p.s(), p.f(), p.phi(), &op);
        let dfr = frr.iter().zip(p.phi()).map(|(a, b)| a * b).collect();
        RadialData {
            s: p.s().to_vec(),
            r: arclength(p),
            phi: p.phi().to_vec(),
            fr,
            dfr,
        }
    }

    fn fr_at(&self, i: usize, x: f64) -> f64 {
        hermite(
            self.s[i],
            self.s[i + 1],
            self.fr[i],
            self.fr[i + 1],
            self.dfr[i],
            self.dfr[i + 1],
            x,
        )
    }

    fn r_at(&self, i: usize, x: f64) -> f64 {
        hermite(
            self.s[i],
            self.s[i + 1],
            self.r[i],
            self.r[i + 1],
            self.phi[i],
            self.phi[i + 1],
            x,
        )
    }

    /// Coordinate `s` at arclength radius `r`.
    fn s_of_r(&self, r: f64) -> Option<f64> {
        let last = *self.r.last()?;
        if !(r > 0.0 && r <= last) {
            return None;
        }
        let k = self.r.partition_point(|&v| v < r).max(1) - 1;
        let k = k.min(self.s.len() - 2);
        Some(bisect(
            |x| self.r_at(k, x) - r,
            self.s[k],
            self.s[k + 1],
            1e-15 * self.s[k + 1],
        ))
    }
}

/// Every interior radius where `∂_r f` changes sign or touches zero.
pub fn minimal_hyperspheres(p: &RadialProfile) -> Vec<MinimalSphere> {
    let d = RadialData::new(p);
    let m = d.s.len();
    let scale = d.fr.iter().fold(0.0_f64, |a, x| a.max(x.abs())).max(1.0);
    let touch = 1e-10 * scale;
    let mut out = Vec::new();
    // The last node uses one-sided stencils and the first is the pole.
    for i in 1..m - 2 {
        let (a, b) = (d.fr[i], d.fr[i + 1]);
        if a == 0.0 && i > 1 && d.fr[i - 1] * b < 0.0 {
            continue;
        }
        if (a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0) || (b == 0.0 && a != 0.0) {
            let s = bisect(|x| d.fr_at(i, x), d.s[i], d.s[i + 1], 1e-15 * d.s[i + 1]);
            out.push(MinimalSphere {
                s,
                r: d.r_at(i, s),
                tangential: false,
            });
        } else if a.abs() <= touch
            && i > 1
            && a.abs() <= d.fr[i - 1].abs()
            && a.abs() <= b.abs()
            && d.fr[i - 1] * b > 0.0
        {
            out.push(MinimalSphere {
                s: d.s[i],
                r: d.r[i],
                tangential: true,
            });
        }
    }
    out
}

/// Arclength radii of all minimal hyperspheres, innermost first.
pub fn detect_minimal_hyperspheres(p: &RadialProfile) -> Vec<f64> {
    minimal_hyperspheres(p).into_iter().map(|m| m.r).collect()
}

/// `∫_0^{x*} v ds` for nodal data, with the final partial interval integrated on the
/// local cubic.
fn partial_integral(s: &[f64], v: &[f64], parity: Parity, x: f64) -> f64 {
    let cum = cumulative_integral(s, v, parity);
    let k = match s.partition_point(|&t| t <= x) {
        0 => 0,
        j => (j - 1).min(s.len() - 2),
    };
    let lo = (k.saturating_sub(1)).min(s.len() - 4);
    let xs = &s[lo..lo + 4];
    let ys = &v[lo..lo + 4];
    let (a, b) = (s[k], x);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    const G: [(f64, f64); 3] = [
        (-0.774_596_669_241_483_4, 5.0 / 9.0),
        (0.0, 8.0 / 9.0),
        (0.774_596_669_241_483_4, 5.0 / 9.0),
    ];
    let piece: f64 = G
        .iter()
        .map(|(g, w)| w * half * lagrange_eval(xs, ys, mid + half * g))
        .sum();
    cum[k] + piece
}

/// The pair `(E1, E2)` of the profile restricted to `[0, R_ms]` and rescaled to the unit
/// interval. In arclength both reduce to `∫_0^{R_ms} |ν_k|^{n/2} f^{n-1} dr`, so the values
/// are scale invariant.
pub fn e1_e2(p: &RadialProfile, r_ms: f64) -> Result<(f64, f64)> {
    let spheres = minimal_hyperspheres(p);
    let first = spheres.first().ok_or(Error::NoMinimalSphere)?;
    let rel = (r_ms - first.r).abs() / first.r;
    if rel > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "radius {r_ms} is not the first zero of the area-radius derivative (found {})",
            first.r
        )));
    }
    let d = RadialData::new(p);
    let x = d.s_of_r(r_ms).unwrap_or(first.s);
    let k = curvature(p);
    let n = p.n();
    let half_n = 0.5 * n as f64;
    let parity = if n % 2 == 1 { Parity::Even } else { Parity::Odd };
    let w: Vec<f64> = p
        .f()
        .iter()
        .zip(p.phi())
        .map(|(f, ph)| f.powi(n as i32 - 1) * ph)
        .collect();
    let i1: Vec<f64> = k.nu1.iter().zip(&w).map(|(v, w)| v.abs().powf(half_n) * w).collect();
    let i2: Vec<f64> = k.nu2.iter().zip(&w).map(|(v, w)| v.abs().powf(half_n) * w).collect();
    Ok((
        partial_integral(p.s(), &i1, parity, x),
        partial_integral(p.s(), &i2, parity, x),
    ))
}
