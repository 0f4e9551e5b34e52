use super::quadrature::VolumeForm;
use crate::geometry::{curvature, CurvatureField, RadialProfile};
use crate::{Error, Result};

/// `∫ |Rm|^p dV` for a precomputed curvature field.
pub fn curvature_power_integral(vf: &VolumeForm, k: &CurvatureField, p: f64) -> f64 {
    let v: Vec<f64> = k.rm2.iter().map(|x| x.powf(0.5 * p)).collect();
    vf.integrate(&v, true)
}

/// Smallest exponent for which `∫|Rm|^p dV` converges at decay order `τ`.
pub fn min_curvature_exponent(n: usize, tau: f64) -> f64 {
    n as f64 / (2.0 + tau)
}

/// `(∫ |Rm|^p dV)^{1/p}`.
pub fn lp_curvature_norm(p: &RadialProfile, exponent: f64) -> Result<f64> {
    let pmin = min_curvature_exponent(p.n(), p.tau()).max(1.0);
    if !(exponent >= pmin) {
        return Err(Error::InvalidParameter(format!(
            "curvature exponent {exponent} below the convergence threshold {pmin}"
        )));
    }
    let vf = VolumeForm::new(p);
    let k = curvature(p);
    Ok(curvature_power_integral(&vf, &k, exponent).powf(1.0 / exponent))
}

/// `(∫|Rm|^{n/2} dV)^{2/n}`.
pub fn l_n2(p: &RadialProfile) -> f64 {
    let n = p.n() as f64;
    let vf = VolumeForm::new(p);
    curvature_power_integral(&vf, &curvature(p), 0.5 * n).powf(2.0 / n)
}

/// The exponent `q = (n/2)·n/(n-2)` of the second monotone norm.
pub fn q_exponent(n: usize) -> f64 {
    let nf = n as f64;
    0.5 * nf * nf / (nf - 2.0)
}

/// Pinching ratio `χ = C·(∫|Rm|^{n/2} dV)^{2/n}` for a Sobolev constant estimate `C`.
pub fn pinching_ratio(p: &RadialProfile, sobolev_lb: f64) -> Result<f64> {
    if !(sobolev_lb > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Sobolev constant estimate must be positive, got {sobolev_lb}"
        )));
    }
    Ok(sobolev_lb * l_n2(p))
}
