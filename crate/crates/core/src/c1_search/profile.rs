//! Constrained neck profiles `g: [0,1] -> [0,∞)` with `g(0)=0`, `g'(0)=1`, `g'(1)=0`.
//!
//! The derivative is `g'(x) = (1 - x²)·Q(x²)²` where `Q` is a natural cubic spline
//! in `z = x²` through `(0, 1)` and `(k/K, q_k)`, `k = 1..K`. Writing everything in
//! `z` keeps `g` odd and smooth at the origin; the square keeps `g' ≥ 0`.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Latent control values of the neck basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeckProfileParams {
    pub q: Vec<f64>,
}

#[derive(Clone, Debug)]
struct NaturalSpline {
    z: Vec<f64>,
    y: Vec<f64>,
    m2: Vec<f64>,
}

impl NaturalSpline {
    fn new(y: Vec<f64>) -> Self {
        let k = y.len() - 1;
        let z: Vec<f64> = (0..=k).map(|i| i as f64 / k as f64).collect();
        let mut m2 = vec![0.0; k + 1];
        if k >= 2 {
            let h = 1.0 / k as f64;
            // Tridiagonal system for interior second derivatives (uniform knots).
            let nint = k - 1;
            let mut diag = vec![4.0 * h / 6.0; nint];
            let off = h / 6.0;
            let mut rhs: Vec<f64> = (1..k)
                .map(|i| (y[i + 1] - 2.0 * y[i] + y[i - 1]) / h)
                .collect();
            for i in 1..nint {
                let w = off / diag[i - 1];
                diag[i] -= w * off;
                rhs[i] -= w * rhs[i - 1];
            }
            let mut sol = vec![0.0; nint];
            sol[nint - 1] = rhs[nint - 1] / diag[nint - 1];
            for i in (0..nint - 1).rev() {
                sol[i] = (rhs[i] - off * sol[i + 1]) / diag[i];
            }
            m2[1..k].copy_from_slice(&sol);
        }
        NaturalSpline { z, y, m2 }
    }

    /// Value and first three derivatives at `t ∈ [0, 1]`.
    fn eval(&self, t: f64) -> [f64; 4] {
        let k = self.z.len() - 1;
        let h = 1.0 / k as f64;
        let i = ((t / h).floor() as usize).min(k - 1);
        let (z0, z1) = (self.z[i], self.z[i + 1]);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (m0, m1) = (self.m2[i], self.m2[i + 1]);
        let a = (z1 - t) / h;
        let b = (t - z0) / h;
        let v = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (y1 - y0) / h + (-(3.0 * a * a - 1.0) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        let d2 = a * m0 + b * m1;
        let d3 = (m1 - m0) / h;
        [v, d1, d2, d3]
    }
}

/// Nodes and weights of 8-point Gauss–Legendre on `[-1, 1]`.
const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

impl NeckProfileParams {
    pub fn new(q: Vec<f64>) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::InvalidParameter(
                "neck basis needs at least one control value".into(),
            ));
        }
        if q.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("neck control value"));
        }
        Ok(NeckProfileParams { q })
    }

    /// Basis dimension `K`.
    pub fn dim(&self) -> usize {
        self.q.len()
    }

    fn spline(&self) -> NaturalSpline {
        let mut y = Vec::with_capacity(self.q.len() + 1);
        y.push(1.0);
        y.extend_from_slice(&self.q);
        NaturalSpline::new(y)
    }

    /// The same function expressed in a basis of dimension `k`; exact when the
    /// current dimension divides `k` (nested knots).
    pub fn embed(&self, k: usize) -> NeckProfileParams {
        let sp = self.spline();
        NeckProfileParams {
            q: (1..=k).map(|i| sp.eval(i as f64 / k as f64)[0]).collect(),
        }
    }

    /// Evaluator for `g` and its derivatives.
    pub fn evaluator(&self) -> NeckEval {
        let sp = self.spline();
        let k = self.q.len();
        // g is a polynomial between the images x = sqrt(j/K) of the spline knots.
        let breaks: Vec<f64> = (0..=k).map(|j| (j as f64 / k as f64).sqrt()).collect();
        let mut cum = vec![0.0; k + 1];
        let [_, c1, c2, c3] = sp.eval(0.0);
        let ev = NeckEval {
            spline: sp,
            origin: [c1, c2, c3],
            breaks,
            cum: Vec::new(),
        };
        for j in 0..k {
            cum[j + 1] = cum[j] + ev.integrate(ev.breaks[j], ev.breaks[j + 1]);
        }
        NeckEval { cum, ..ev }
    }
}

/// Latent value and derivatives of `g` at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeckPoint {
    pub latent: f64,
    pub g1: f64,
    pub g2: f64,
    pub one_minus_g1: f64,
}

/// Pointwise evaluation of a neck profile.
#[derive(Clone, Debug)]
pub struct NeckEval {
    spline: NaturalSpline,
    /// `Q'(0), Q''(0), Q'''(0)`.
    origin: [f64; 3],
    breaks: Vec<f64>,
    cum: Vec<f64>,
}

impl NeckEval {
    /// `[g', g'', g''']` at `x ∈ [0, 1]`.
    pub fn derivs(&self, x: f64) -> [f64; 3] {
        let z = (x * x).min(1.0);
        let [q, q1, q2, _] = self.spline.eval(z);
        let w = 1.0 - z;
        let g1 = w * q * q;
        let gz = -q * q + 2.0 * w * q * q1;
        let gzz = -4.0 * q * q1 + 2.0 * w * (q1 * q1 + q * q2);
        [g1, 2.0 * x * gz, 2.0 * gz + 4.0 * x * x * gzz]
    }

    /// `1 - g'(x)` without the cancellation near the origin: on the first knot
    /// interval `(Q(z) - 1)/z` is evaluated from the cubic's Taylor coefficients.
    pub fn one_minus_g1(&self, x: f64) -> f64 {
        self.point(x).one_minus_g1
    }

    /// Everything pointwise from a single spline evaluation.
    pub fn point(&self, x: f64) -> NeckPoint {
        let z = (x * x).min(1.0);
        let [q, q1, ..] = self.spline.eval(z);
        let w = 1.0 - z;
        let g1 = w * q * q;
        let gz = -q * q + 2.0 * w * q * q1;
        let k = self.spline.z.len() - 1;
        let one_minus_g1 = if z * k as f64 >= 1.0 {
            1.0 - g1
        } else {
            let [c1, c2, c3] = self.origin;
            let slope = c1 + z * (c2 / 2.0 + z * c3 / 6.0);
            z * (q * q - (q + 1.0) * slope)
        };
        NeckPoint {
            latent: q,
            g1,
            g2: 2.0 * x * gz,
            one_minus_g1,
        }
    }

    /// Latent spline value `Q(x²)`; `g' > 0` on `[0,1)` iff this never vanishes.
    pub fn latent(&self, x: f64) -> f64 {
        self.spline.eval((x * x).min(1.0))[0]
    }

    fn integrate(&self, a: f64, b: f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        GL8.iter()
            .map(|&(t, w)| w * half * self.derivs(mid + half * t)[0])
            .sum()
    }

    /// `g(x) = ∫_0^x g'`, exact up to rounding (piecewise polynomial of degree 14).
    pub fn g(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let j = match self.breaks.iter().rposition(|&b| b <= x) {
            Some(j) => j.min(self.breaks.len() - 2),
            None => 0,
        };
        self.cum[j] + self.integrate(self.breaks[j], x)
    }
}
