use super::{FlowState, HeatField, OuterBc, StepStats};
use crate::geometry::curvature::{fill_origin, origin_tolerance};
use crate::geometry::{riemann_oracle, RadialProfile};
use crate::numerics::{cumulative_integral, lagrange_eval, DiffOperator, Parity};
use crate::{Error, Result};

/// `ψ = ∂_r f = φ^{-1} ∂_s f` at every node.
fn psi_of(p: &RadialProfile, op: &DiffOperator) -> Vec<f64> {
    let dev: Vec<f64> = p.f().iter().zip(p.s()).map(|(a, b)| a - b).collect();
    let d = op.d1(&dev, Parity::Odd);
    d.iter().zip(p.phi()).map(|(a, b)| (1.0 + a) / b).collect()
}

/// Rates of `(ψ, φ)` with `ψ = ∂_r f`:
///
/// `ψ_t = ψ_rr - (n-3) ψ ν2 + (n-2) ψ ν1` and `φ_t = -(n-1) ν2 φ`,
///
/// where `ν1 = (1 - ψ²)/f²` and `ν2 = -ψ_r/f`. This is the same flow as
/// `f_t = -λ_sph f`, `φ_t = -λ_rad φ`, but the linearization about flat space is
/// triangular: `ψ - 1` obeys a regular radial heat equation and `φ` is driven by it.
/// The form in `(f, φ)` has grid-scale growing modes at the pole because discrete
/// derivatives break the reparametrization symmetry there.
fn psi_phi_rates(
    p: &RadialProfile,
    f: &[f64],
    psi: &[f64],
    phi: &[f64],
    op: &DiffOperator,
    bc: OuterBc,
) -> (Vec<f64>, Vec<f64>) {
    let m = psi.len();
    let nf = p.n() as f64;
    let e: Vec<f64> = psi.iter().map(|x| x - 1.0).collect();
    let pd: Vec<f64> = phi.iter().map(|x| x - 1.0).collect();
    let (es, ess) = op.d12(&e, Parity::Even);
    let ps = op.d1(&pd, Parity::Even);
    let tol = origin_tolerance(f);
    let mut nu1 = vec![0.0; m];
    let mut nu2 = vec![0.0; m];
    for i in 0..m {
        if f[i] > tol {
            nu1[i] = -e[i] * (2.0 + e[i]) / (f[i] * f[i]);
            nu2[i] = -es[i] / (phi[i] * f[i]);
        }
    }
    let r = crate::geometry::arclength_of(p.s(), phi);
    fill_origin(f, &r, &mut [&mut nu1, &mut nu2], true);
    let mut psi_t: Vec<f64> = (0..m)
        .map(|i| {
            let prr = (ess[i] - es[i] * ps[i] / phi[i]) / (phi[i] * phi[i]);
            prr - (nf - 3.0) * psi[i] * nu2[i] + (nf - 2.0) * psi[i] * nu1[i]
        })
        .collect();
    let mut phi_t: Vec<f64> = (0..m).map(|i| -(nf - 1.0) * nu2[i] * phi[i]).collect();
    psi_t[0] = 0.0;
    apply_outer(p.s(), &mut psi_t, bc);
    apply_outer(p.s(), &mut phi_t, bc);
    (psi_t, phi_t)
}

/// `f` consistent with a change of `φψ = ∂_s f`: `f + ∫_0^s (φψ - φ₀ψ₀)`.
fn integrate_f(s: &[f64], f0: &[f64], base: &[f64], psi: &[f64], phi: &[f64]) -> Vec<f64> {
    let d: Vec<f64> = (0..s.len()).map(|i| phi[i] * psi[i] - base[i]).collect();
    let c = cumulative_integral(s, &d, Parity::Even);
    f0.iter().zip(&c).map(|(a, b)| a + b).collect()
}

/// Time derivatives `(∂_t f, ∂_t φ) = (-λ_sph f, -λ_rad φ)` of the warped-product
/// Ricci flow as realized by the stepper, with the outer node treated according
/// to `bc`.
pub fn ricci_rhs(p: &RadialProfile, op: &DiffOperator, bc: OuterBc) -> (Vec<f64>, Vec<f64>) {
    let psi = psi_of(p, op);
    let (psi_t, phi_t) = psi_phi_rates(p, p.f(), &psi, p.phi(), op, bc);
    let d: Vec<f64> = (0..p.len())
        .map(|i| phi_t[i] * psi[i] + p.phi()[i] * psi_t[i])
        .collect();
    (cumulative_integral(p.s(), &d, Parity::Even), phi_t)
}

fn apply_outer(s: &[f64], v: &mut [f64], bc: OuterBc) {
    let m = v.len() - 1;
    v[m] = match bc {
        OuterBc::FixedTail => 0.0,
        OuterBc::Extrapolated => lagrange_eval(&s[m - 3..m], &v[m - 3..m], s[m]),
    };
}

/// Largest `Δt` accepted by [`ricci_step`]: `min_i (φ_i h_i)²` with `h_i` the smaller
/// neighbouring spacing.
pub fn ricci_stability_bound(p: &RadialProfile) -> f64 {
    let s = p.s();
    let m = s.len();
    (0..m)
        .map(|i| {
            let left = if i > 0 { s[i] - s[i - 1] } else { f64::INFINITY };
            let right = if i + 1 < m { s[i + 1] - s[i] } else { f64::INFINITY };
            (p.phi()[i] * left.min(right)).powi(2)
        })
        .fold(f64::INFINITY, f64::min)
}

fn checked(p: &RadialProfile, f: Vec<f64>, phi: Vec<f64>) -> Result<RadialProfile> {
    p.with_fields(f, phi).map_err(|e| match e {
        Error::NonPositive { field, index, value } => Error::FlowAbort(format!(
            "{field} lost positivity at node {index} (value {value:e})"
        )),
        Error::NonFinite(what) => Error::FlowAbort(format!("{what} became non-finite")),
        other => other,
    })
}

/// One explicit midpoint (RK2) step of the metric, carried out on `(ψ, φ)` with
/// `f` recovered by integrating `∂_s f = φψ`.
pub fn ricci_step(
    state: &FlowState,
    dt: f64,
    op: &DiffOperator,
    bc: OuterBc,
) -> Result<FlowState> {
    let bound = ricci_stability_bound(&state.profile);
    if !(dt > 0.0) || dt > bound * (1.0 + 1e-12) {
        return Err(Error::FlowAbort(format!(
            "step {dt:e} outside the stability bound {bound:e}"
        )));
    }
    let p = &state.profile;
    let s = p.s();
    let psi0 = psi_of(p, op);
    let base: Vec<f64> = psi0.iter().zip(p.phi()).map(|(a, b)| a * b).collect();
    let (a1, b1) = psi_phi_rates(p, p.f(), &psi0, p.phi(), op, bc);
    let psi_m: Vec<f64> = psi0.iter().zip(&a1).map(|(x, k)| x + 0.5 * dt * k).collect();
    let phi_m: Vec<f64> = p.phi().iter().zip(&b1).map(|(x, k)| x + 0.5 * dt * k).collect();
    let f_m = integrate_f(s, p.f(), &base, &psi_m, &phi_m);
    let mid = checked(p, f_m, phi_m)?;
    let (a2, b2) = psi_phi_rates(&mid, mid.f(), &psi_m, mid.phi(), op, bc);
    let psi1: Vec<f64> = psi0.iter().zip(&a2).map(|(x, k)| x + dt * k).collect();
    let phi1: Vec<f64> = p.phi().iter().zip(&b2).map(|(x, k)| x + dt * k).collect();
    let f1 = integrate_f(s, p.f(), &base, &psi1, &phi1);
    let next = checked(p, f1, phi1)?;
    Ok(FlowState {
        t: state.t + dt,
        profile: next,
        u_eps: state.u_eps.clone(),
        stats: StepStats {
            dt,
            residual: None,
            steps: state.stats.steps + 1,
        },
    })
}

/// Sup-node norm of `(g_after - g_before)/Δt + 2 Ric(g_mid)` over both metric
/// components, `g_mid` the average of the two profiles and `Ric` taken from the
/// coordinate Riemann oracle. The pole's sphere component and the outer boundary
/// node are excluded.
pub fn ricci_residual(before: &FlowState, after: &FlowState, dt: f64) -> Result<f64> {
    let (a, b) = (&before.profile, &after.profile);
    if a.s() != b.s() {
        return Err(Error::InvalidParameter("states live on different grids".into()));
    }
    let f: Vec<f64> = a.f().iter().zip(b.f()).map(|(x, y)| 0.5 * (x + y)).collect();
    let phi: Vec<f64> = a.phi().iter().zip(b.phi()).map(|(x, y)| 0.5 * (x + y)).collect();
    let mid = a.with_fields(f, phi)?;
    let k = riemann_oracle(&mid);
    let m = a.len();
    let mut res = 0.0_f64;
    for i in 0..m - 1 {
        let (pa, pb, pm) = (a.phi()[i], b.phi()[i], mid.phi()[i]);
        let rad = (pb * pb - pa * pa) / dt + 2.0 * k.lam_rad[i] * pm * pm;
        res = res.max(rad.abs());
        if i > 0 {
            let (fa, fb, fm) = (a.f()[i], b.f()[i], mid.f()[i]);
            let sph = (fb * fb - fa * fa) / dt + 2.0 * k.lam_sph[i] * fm * fm;
            res = res.max(sph.abs());
        }
    }
    Ok(res)
}

/// Finite-volume discretization of the radial Laplace-Beltrami operator
/// `Δu = (φ f^{n-1})^{-1} ∂_s((f^{n-1}/φ) ∂_s u)`.
pub(crate) struct HeatOperator {
    /// Cell volumes (without the sphere area).
    volume: Vec<f64>,
    /// Face conductances `f̄^{n-1}/(φ̄ Δs)` between nodes `i` and `i + 1`.
    face: Vec<f64>,
}

impl HeatOperator {
    pub(crate) fn new(p: &RadialProfile) -> Self {
        let (s, f, phi) = (p.s(), p.f(), p.phi());
        let e = p.n() as i32 - 1;
        let m = s.len();
        let face: Vec<f64> = (0..m - 1)
            .map(|i| {
                let fm = 0.5 * (f[i] + f[i + 1]);
                let pm = 0.5 * (phi[i] + phi[i + 1]);
                fm.powi(e) / (pm * (s[i + 1] - s[i]))
            })
            .collect();
        let mut volume = vec![0.0; m];
        let half0 = 0.5 * s[1];
        volume[0] = phi[0] * (f[1] / s[1]).powi(e) * half0.powi(e + 1) / (e + 1) as f64;
        for i in 1..m {
            let lo = 0.5 * (s[i] + s[i - 1]);
            let hi = if i + 1 < m { 0.5 * (s[i] + s[i + 1]) } else { s[i] };
            // exact for f ∝ s, which keeps the cells next to the pole second order
            volume[i] = phi[i] * (f[i] / s[i]).powi(e) * (hi.powi(e + 1) - lo.powi(e + 1)) / (e + 1) as f64;
        }
        HeatOperator { volume, face }
    }

    fn apply(&self, u: &[f64], bc: OuterBc) -> Vec<f64> {
        let m = u.len();
        let mut out = vec![0.0; m];
        for (i, c) in self.face.iter().enumerate() {
            let flux = c * (u[i + 1] - u[i]);
            out[i] += flux;
            out[i + 1] -= flux;
        }
        for i in 0..m {
            out[i] /= self.volume[i];
        }
        if bc == OuterBc::FixedTail {
            out[m - 1] = 0.0;
        }
        out
    }

    /// Largest explicit Euler step preserving the discrete maximum principle.
    pub(crate) fn max_principle_bound(&self, bc: OuterBc) -> f64 {
        let m = self.volume.len();
        let last = if bc == OuterBc::FixedTail { m - 1 } else { m };
        (0..last)
            .map(|i| {
                let left = if i > 0 { self.face[i - 1] } else { 0.0 };
                let right = if i + 1 < m { self.face[i] } else { 0.0 };
                self.volume[i] / (left + right)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Largest heat step preserving the maximum principle on the current metric.
pub fn heat_stability_bound(p: &RadialProfile, bc: OuterBc) -> f64 {
    HeatOperator::new(p).max_principle_bound(bc)
}

/// Advances the heat companion by one SSP-RK2 (Heun) step on the current metric.
/// Each stage is a maximum-principle-preserving Euler step, so `sup u` cannot grow.
/// With the fixed tail the outer value is held (Dirichlet); otherwise the outer
/// face carries no flux.
pub fn heat_step(state: &FlowState, dt: f64, bc: OuterBc) -> Result<FlowState> {
    let heat = state
        .u_eps
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("no heat field to advance".into()))?;
    let u = heat_advance(&state.profile, &heat.u, dt, bc)?;
    Ok(FlowState {
        t: state.t,
        profile: state.profile.clone(),
        u_eps: Some(HeatField { u, eps: heat.eps }),
        stats: state.stats,
    })
}

pub(crate) fn heat_advance(p: &RadialProfile, u: &[f64], dt: f64, bc: OuterBc) -> Result<Vec<f64>> {
    let op = HeatOperator::new(p);
    let bound = op.max_principle_bound(bc);
    if !(dt > 0.0) || dt > bound * (1.0 + 1e-12) {
        return Err(Error::FlowAbort(format!(
            "heat step {dt:e} outside the maximum-principle bound {bound:e}"
        )));
    }
    let l0 = op.apply(u, bc);
    let u1: Vec<f64> = u.iter().zip(&l0).map(|(a, b)| a + dt * b).collect();
    let l1 = op.apply(&u1, bc);
    Ok(u
        .iter()
        .zip(&u1)
        .zip(&l1)
        .map(|((a, b), c)| 0.5 * a + 0.5 * (b + dt * c))
        .collect())
}
