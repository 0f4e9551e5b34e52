use super::quadrature::VolumeForm;
use crate::geometry::curvature::radial_derivatives;
use crate::geometry::{curvature, RadialProfile, DEFAULT_STENCIL_ORDER};
use crate::numerics::DiffOperator;
use crate::{Error, Result};
use serde::Serialize;

/// Node window, as fractions of the grid, used by the mass fit.
pub const MASS_FIT_WINDOW: (f64, f64) = (2.0 / 3.0, 0.95);
/// Relative fit residual above which a mass value is flagged unreliable.
pub const MASS_FIT_TOL: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MassFit {
    /// Mass normalized so that `ψ = 1 + m/(2ρ^{n-2})` has mass `m`.
    pub mass: f64,
    /// Relative RMS residual of the fit.
    pub residual: f64,
    pub reliable: bool,
}

/// ADM mass from the tail model `1 - (∂_r f)² ≈ 2m f^{-(n-2)}`, fitted by least squares
/// on the outer window of the grid.
///
/// For the spatial Schwarzschild metric the left side times `f^{n-2}` equals `2m`
/// exactly, so the fit is the Misner-Sharp mass averaged over the window. The
/// one-parameter fit avoids the logarithmic terms that `f/r - 1` picks up in
/// dimension three.
pub fn adm_mass(p: &RadialProfile) -> Result<MassFit> {
    let n = p.n();
    if n < 3 {
        return Err(Error::Dimension(n, "ADM mass needs n >= 3"));
    }
    let m = p.len();
    let lo = (MASS_FIT_WINDOW.0 * m as f64) as usize;
    let hi = ((MASS_FIT_WINDOW.1 * m as f64) as usize).min(m - 1);
    if hi <= lo + 2 {
        return Err(Error::InvalidParameter("grid too short for a mass fit".into()));
    }
    let op = DiffOperator::new(p.s(), DEFAULT_STENCIL_ORDER);
    let (fr, omf, _) = radial_derivatives(p.s(), p.f(), p.phi(), &op);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    let mut pts = Vec::new();
    for i in lo..hi {
        let x = p.f()[i].powi(2 - n as i32);
        let y = omf[i] * (1.0 + fr[i]);
        sxy += x * y;
        sxx += x * x;
        syy += y * y;
        pts.push((x, y));
    }
    let a = sxy / sxx;
    let rss: f64 = pts.iter().map(|(x, y)| (y - a * x).powi(2)).sum();
    let residual = if syy > 0.0 { (rss / syy).sqrt() } else { 0.0 };
    Ok(MassFit {
        mass: 0.5 * a,
        residual,
        reliable: residual <= MASS_FIT_TOL,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CgbReport {
    /// `-½∫|E|² dV + (1/24)∫R² dV`.
    pub residual: f64,
    pub e2_integral: f64,
    pub r2_integral: f64,
    /// `|residual| / max(∫|E|², ∫R²/24)`, zero when both vanish.
    pub relative: f64,
    /// Set when the tail decays too slowly for the boundary term to be negligible.
    pub decay_warning: bool,
}

/// Fitted decay order below which the boundary term is not trusted.
pub const CGB_MIN_DECAY: f64 = 2.0;

/// Four-dimensional Gauss-Bonnet residual. The Weyl term vanishes for rotationally
/// symmetric metrics, which are conformally flat.
pub fn cgb_residual(p: &RadialProfile) -> Result<CgbReport> {
    if p.n() != 4 {
        return Err(Error::Dimension(p.n(), "the Gauss-Bonnet residual needs n = 4"));
    }
    let vf = VolumeForm::new(p);
    let k = curvature(p);
    let r2: Vec<f64> = k.scalar.iter().map(|x| x * x).collect();
    let e2_integral = vf.integrate(&k.e2, true);
    let r2_integral = vf.integrate(&r2, true);
    let residual = -0.5 * e2_integral + r2_integral / 24.0;
    let scale = e2_integral.max(r2_integral / 24.0);
    let relative = if scale > 0.0 { residual.abs() / scale } else { 0.0 };
    Ok(CgbReport {
        residual,
        e2_integral,
        r2_integral,
        relative,
        decay_warning: p.tail().tau < CGB_MIN_DECAY,
    })
}
