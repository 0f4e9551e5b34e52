use super::quadrature::VolumeForm;
use super::sobolev::{entropy_term, TestFunction};
use crate::geometry::{curvature, RadialProfile};
use crate::numerics::{solve_tridiagonal, sphere_area};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

fn check_scale(tau: f64) -> Result<()> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "entropy scale must be positive, got {tau}"
        )));
    }
    Ok(())
}

/// `W* = ∫[τ(4|∇u|² + R u²) - u² log u²] dV` for `u` normalized to unit `L²` mass.
pub(crate) fn w_star_with(vf: &VolumeForm, scalar: &[f64], u: &[f64], tau: f64) -> Result<f64> {
    let sq: Vec<f64> = u.iter().map(|x| x * x).collect();
    let mass = vf.integrate(&sq, true);
    if !(mass > 0.0) {
        return Err(Error::InvalidParameter("test function has zero L2 norm".into()));
    }
    let c = mass.sqrt();
    let un: Vec<f64> = u.iter().map(|x| x / c).collect();
    let pot: Vec<f64> = un.iter().zip(scalar).map(|(x, r)| r * x * x).collect();
    let grad = vf.dirichlet(&un, true);
    let ent = entropy_term(vf, &un)?;
    Ok(tau * (4.0 * grad + vf.integrate(&pot, true)) - ent)
}

/// `W*(g, u, τ)` after normalizing `u` to `∫u² dV = 1`.
pub fn w_star(p: &RadialProfile, u: &[f64], tau: f64) -> Result<f64> {
    check_scale(tau)?;
    let vf = VolumeForm::new(p);
    let k = curvature(p);
    w_star_with(&vf, &k.scalar, u, tau)
}

/// `W(g, u, τ) = W*(g, u, τ) - n - (n/2) log 4πτ`.
pub fn w_functional(p: &RadialProfile, u: &TestFunction, tau: f64) -> Result<f64> {
    let nf = p.n() as f64;
    Ok(w_star(p, &u.u, tau)? - nf - 0.5 * nf * (4.0 * PI * tau).ln())
}

/// Converts a `μ*(g, τ)` value to `μ(g, τ) = μ* - n - (n/2) log 4πτ`, the quantity that is
/// monotone along the flow with `τ(t) = L - t`.
pub fn mu_from_mu_star(n: usize, tau: f64, mu_star: f64) -> f64 {
    let nf = n as f64;
    mu_star - nf - 0.5 * nf * (4.0 * PI * tau).ln()
}

/// The Gaussian `u = (4πτ)^{-n/4} exp(-r²/(8τ))`, the Euclidean minimizer of `W`.
pub fn matched_gaussian(r: &[f64], n: usize, tau: f64) -> Vec<f64> {
    let amp = (4.0 * PI * tau).powf(-(n as f64) / 4.0);
    r.iter().map(|x| amp * (-(x * x) / (8.0 * tau)).exp()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MuStarConfig {
    /// Gaussian start widths, as multiples of the matched width `sqrt(τ)`.
    pub start_widths: Vec<f64>,
    /// Additional starts with widths drawn from `[0.5, 2]` times the matched width.
    pub random_starts: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Relative energy decrease below which an iteration counts as stalled.
    pub tol: f64,
}

impl Default for MuStarConfig {
    fn default() -> Self {
        MuStarConfig {
            start_widths: vec![0.5, 1.0, 2.0],
            random_starts: 1,
            seed: 0,
            max_iter: 3000,
            tol: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MuStarResult {
    /// Best evaluated `W*`: an upper bound on `μ*(g, σ)`.
    pub value: f64,
    /// Minimizer candidate, normalized to unit mass.
    pub witness: Vec<f64>,
    /// `W*` at each initialization.
    pub init_values: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Discrete energy with face-centred stiffness and lumped mass, minimized on the
/// unit sphere `Σ m v² = 1`.
struct Discrete {
    mass: Vec<f64>,
    face: Vec<f64>,
    pot: Vec<f64>,
    sigma: f64,
}

impl Discrete {
    fn new(p: &RadialProfile, vf: &VolumeForm, scalar: &[f64], sigma: f64) -> Self {
        let n = p.n() as i32;
        let omega = sphere_area(p.n() - 1);
        let (s, f, phi) = (p.s(), p.f(), p.phi());
        let face = (0..s.len() - 1)
            .map(|i| {
                let fm = 0.5 * (f[i] + f[i + 1]);
                let pm = 0.5 * (phi[i] + phi[i + 1]);
                omega * fm.powi(n - 1) / (pm * (s[i + 1] - s[i]))
            })
            .collect();
        Discrete {
            mass: vf.weight.clone(),
            face,
            pot: scalar.to_vec(),
            sigma,
        }
    }

    fn stiff(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for (i, k) in self.face.iter().enumerate() {
            let d = k * (v[i + 1] - v[i]);
            out[i] -= d;
            out[i + 1] += d;
        }
        out
    }

    fn norm2(&self, v: &[f64]) -> f64 {
        v.iter().zip(&self.mass).map(|(x, m)| m * x * x).sum()
    }

    fn normalize(&self, v: &mut [f64]) {
        let c = self.norm2(v).sqrt();
        v.iter_mut().for_each(|x| *x /= c);
    }

    fn energy(&self, v: &[f64]) -> f64 {
        let grad: f64 = self
            .face
            .iter()
            .enumerate()
            .map(|(i, k)| k * (v[i + 1] - v[i]).powi(2))
            .sum();
        let mut pot = 0.0;
        let mut ent = 0.0;
        for i in 0..v.len() {
            let q = v[i] * v[i];
            pot += self.mass[i] * self.pot[i] * q;
            if q > 0.0 {
                ent += self.mass[i] * q * q.ln();
            }
        }
        self.sigma * (4.0 * grad + pot) - ent
    }

    fn gradient(&self, v: &[f64]) -> Vec<f64> {
        let kv = self.stiff(v);
        (0..v.len())
            .map(|i| {
                let q = v[i] * v[i];
                let lg = if q > 0.0 { q.ln() } else { 0.0 };
                self.sigma * (8.0 * kv[i] + 2.0 * self.mass[i] * self.pot[i] * v[i])
                    - self.mass[i] * (2.0 * v[i] * lg + 2.0 * v[i])
            })
            .collect()
    }

    /// Solves `(M + 8σK) x = b`.
    fn precondition(&self, b: &[f64]) -> Vec<f64> {
        let m = b.len();
        let c = 8.0 * self.sigma;
        let mut lo = vec![0.0; m];
        let mut up = vec![0.0; m];
        let mut di: Vec<f64> = self.mass.clone();
        for (i, k) in self.face.iter().enumerate() {
            di[i] += c * k;
            di[i + 1] += c * k;
            up[i] = -c * k;
            lo[i + 1] = -c * k;
        }
        solve_tridiagonal(&lo, &di, &up, b)
    }

    /// Preconditioned projected gradient descent with Armijo backtracking.
    fn minimize(&self, mut v: Vec<f64>, max_iter: usize, tol: f64) -> (Vec<f64>, bool, usize) {
        self.normalize(&mut v);
        let mut e = self.energy(&v);
        let mut alpha: f64 = 1.0;
        let mut stalled = 0;
        for it in 0..max_iter {
            let g = self.gradient(&v);
            let pg = self.precondition(&g);
            let mv: Vec<f64> = v.iter().zip(&self.mass).map(|(x, m)| m * x).collect();
            let pmv = self.precondition(&mv);
            let num: f64 = mv.iter().zip(&pg).map(|(a, b)| a * b).sum();
            let den: f64 = mv.iter().zip(&pmv).map(|(a, b)| a * b).sum();
            let lam = num / den;
            let d: Vec<f64> = pg.iter().zip(&pmv).map(|(a, b)| a - lam * b).collect();
            let slope: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
            if !(slope > 1e-15 * (1.0 + e.abs())) {
                return (v, true, it);
            }
            alpha = (alpha * 2.0).min(1.0);
            let mut accepted = None;
            while alpha > 1e-12 {
                let mut trial: Vec<f64> = v.iter().zip(&d).map(|(a, b)| a - alpha * b).collect();
                self.normalize(&mut trial);
                let et = self.energy(&trial);
                if et <= e - 1e-4 * alpha * slope {
                    accepted = Some((trial, et));
                    break;
                }
                alpha *= 0.5;
            }
            let Some((nv, ne)) = accepted else {
                return (v, true, it);
            };
            let dec = e - ne;
            v = nv;
            e = ne;
            if dec < tol * (1.0 + e.abs()) {
                stalled += 1;
                if stalled >= 5 {
                    return (v, true, it + 1);
                }
            } else {
                stalled = 0;
            }
        }
        (v, false, max_iter)
    }
}

/// Upper bound on `μ*(g, σ) = inf W*(g, u, σ)` over unit-mass radial `u`.
///
/// Every start is minimized by preconditioned projected gradient on a consistent
/// discrete energy; candidates are then scored with the same evaluator as
/// [`w_star`], and the best of all final and initial values is returned, so the
/// result never exceeds the value at any initialization.
pub fn mu_star_estimate(p: &RadialProfile, sigma: f64, cfg: &MuStarConfig) -> Result<MuStarResult> {
    check_scale(sigma)?;
    let vf = VolumeForm::new(p);
    let k = curvature(p);
    let disc = Discrete::new(p, &vf, &k.scalar, sigma);
    let mut widths = cfg.start_widths.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.random_starts {
        widths.push(rng.gen_range(0.5..2.0));
    }
    if widths.is_empty() {
        return Err(Error::InvalidParameter("no entropy starts configured".into()));
    }
    let runs: Vec<_> = {
        use rayon::prelude::*;
        widths
            .par_iter()
            .map(|&c| {
                let u0 = matched_gaussian(&vf.r, p.n(), sigma * c * c);
                let w0 = w_star_with(&vf, &k.scalar, &u0, sigma);
                let (u, conv, it) = disc.minimize(u0.clone(), cfg.max_iter, cfg.tol);
                let w1 = w_star_with(&vf, &k.scalar, &u, sigma);
                (u0, w0, u, w1, conv, it)
            })
            .collect()
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut init_values = Vec::new();
    let mut converged = true;
    let mut iterations = 0;
    for (u0, w0, u, w1, conv, it) in runs {
        let w0 = w0?;
        init_values.push(w0);
        iterations += it;
        // An unconverged descent can leave a slowly decaying tail whose entropy
        // integral is undefined; such a candidate is dropped, not fatal.
        let w1 = w1.ok();
        converged &= conv && w1.is_some();
        let mut cands = vec![(w0, u0)];
        if let Some(v) = w1 {
            cands.push((v, u));
        }
        for (val, cand) in cands {
            if best.as_ref().map_or(true, |(b, _)| val < *b) {
                best = Some((val, cand));
            }
        }
    }
    let (value, mut witness) = best.expect("at least one start");
    let mass = vf.integrate(&witness.iter().map(|x| x * x).collect::<Vec<_>>(), true);
    witness.iter_mut().for_each(|x| *x /= mass.sqrt());
    Ok(MuStarResult {
        value,
        witness,
        init_values,
        converged,
        iterations,
    })
}
