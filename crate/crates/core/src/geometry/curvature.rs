use super::{arclength_of, RadialProfile, DEFAULT_STENCIL_ORDER};
use crate::numerics::{lagrange_eval, DiffOperator, Parity};

/// Curvature of a rotationally symmetric metric at every grid node.
///
/// `nu1` is the sectional curvature of planes tangent to the distance spheres,
/// `nu2` that of planes containing the radial direction. `rm2` is the
/// orthonormal-frame norm `Σ_{ijkl} R_{ijkl}²`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureField {
    pub n: usize,
    pub r: Vec<f64>,
    pub nu1: Vec<f64>,
    pub nu2: Vec<f64>,
    pub scalar: Vec<f64>,
    pub lam_rad: Vec<f64>,
    pub lam_sph: Vec<f64>,
    pub rm2: Vec<f64>,
    pub e2: Vec<f64>,
}

impl CurvatureField {
    /// Assembles every derived quantity from the two sectional curvatures.
    pub fn from_sectional(n: usize, r: Vec<f64>, nu1: Vec<f64>, nu2: Vec<f64>) -> Self {
        let nf = n as f64;
        let len = r.len();
        let mut out = CurvatureField {
            n,
            r,
            nu1,
            nu2,
            scalar: vec![0.0; len],
            lam_rad: vec![0.0; len],
            lam_sph: vec![0.0; len],
            rm2: vec![0.0; len],
            e2: vec![0.0; len],
        };
        for i in 0..len {
            let (a, b) = (out.nu1[i], out.nu2[i]);
            let lr = (nf - 1.0) * b;
            let ls = b + (nf - 2.0) * a;
            let sc = lr + (nf - 1.0) * ls;
            out.lam_rad[i] = lr;
            out.lam_sph[i] = ls;
            out.scalar[i] = sc;
            out.rm2[i] = 2.0 * (nf - 1.0) * (nf - 2.0) * a * a + 4.0 * (nf - 1.0) * b * b;
            let mean = sc / nf;
            out.e2[i] = (lr - mean).powi(2) + (nf - 1.0) * (ls - mean).powi(2);
        }
        out
    }

    /// `|Rm|` at each node.
    pub fn rm_abs(&self) -> Vec<f64> {
        self.rm2.iter().map(|x| x.sqrt()).collect()
    }

    pub fn sup_rm(&self) -> f64 {
        self.rm2.iter().fold(0.0_f64, |m, &x| m.max(x)).sqrt()
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

/// Curvature by finite differences in `s` (order [`DEFAULT_STENCIL_ORDER`]),
/// converted to arclength derivatives with `∂_r = φ^{-1} ∂_s`.
pub fn curvature(p: &RadialProfile) -> CurvatureField {
    curvature_with_order(p, DEFAULT_STENCIL_ORDER)
}

pub fn curvature_with_order(p: &RadialProfile, order: usize) -> CurvatureField {
    curvature_with_op(p, &DiffOperator::new(p.s(), order))
}

/// Curvature with a prebuilt operator on the profile's grid.
pub(crate) fn curvature_with_op(p: &RadialProfile, op: &DiffOperator) -> CurvatureField {
    let r = arclength_of(p.s(), p.phi());
    let (nu1, nu2) = sectional(p.s(), p.f(), p.phi(), op, &r);
    CurvatureField::from_sectional(p.n(), r, nu1, nu2)
}

/// Arclength derivatives `(f_r, f_rr)` at every node. The deviation `f - s` is
/// differentiated instead of `f` so that flat data gives exact results.
pub(crate) fn radial_derivatives(
    s: &[f64],
    f: &[f64],
    phi: &[f64],
    op: &DiffOperator,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let dev: Vec<f64> = f.iter().zip(s).map(|(a, b)| a - b).collect();
    let m = s.len();
    let mut one_minus_fr = vec![0.0; m];
    let mut fr = vec![0.0; m];
    let mut frr = vec![0.0; m];
    for i in 0..m {
        let (dd1, dd2) = op.at(&dev, Parity::Odd, i);
        let (p1, _) = op.at(phi, Parity::Even, i);
        let fs = 1.0 + dd1;
        let ph = phi[i];
        one_minus_fr[i] = ((ph - 1.0) - dd1) / ph;
        fr[i] = fs / ph;
        frr[i] = (dd2 - fs * p1 / ph) / (ph * ph);
    }
    (fr, one_minus_fr, frr)
}

pub(crate) fn sectional(
    s: &[f64],
    f: &[f64],
    phi: &[f64],
    op: &DiffOperator,
    r: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let (fr, omf, frr) = radial_derivatives(s, f, phi, op);
    let m = s.len();
    let tol = origin_tolerance(f);
    let mut nu1 = vec![0.0; m];
    let mut nu2 = vec![0.0; m];
    for i in 0..m {
        if f[i] > tol {
            nu1[i] = omf[i] * (1.0 + fr[i]) / (f[i] * f[i]);
            nu2[i] = -frr[i] / f[i];
        }
    }
    fill_origin(f, r, &mut [&mut nu1, &mut nu2], true);
    (nu1, nu2)
}

/// Nodes with `f` below this are treated as the origin.
pub(crate) fn origin_tolerance(f: &[f64]) -> f64 {
    1e-12 * f.iter().fold(0.0_f64, |m, &x| m.max(x))
}

/// Replaces values at origin nodes by the regular limit: an even polynomial in `r`
/// through the first three regular nodes, evaluated at `r = 0`. With `equalize`
/// the first two fields share their average limit (`ν1(0) = ν2(0)`).
pub(crate) fn fill_origin(f: &[f64], r: &[f64], fields: &mut [&mut Vec<f64>], equalize: bool) {
    let tol = origin_tolerance(f);
    let regular: Vec<usize> = (0..f.len()).filter(|&i| f[i] > tol).take(3).collect();
    if regular.len() < 3 {
        return;
    }
    let z: Vec<f64> = regular.iter().map(|&i| r[i] * r[i]).collect();
    let mut limits: Vec<f64> = fields
        .iter()
        .map(|v| {
            let y: Vec<f64> = regular.iter().map(|&i| v[i]).collect();
            lagrange_eval(&z, &y, 0.0)
        })
        .collect();
    if equalize && limits.len() >= 2 {
        let avg = 0.5 * (limits[0] + limits[1]);
        limits[0] = avg;
        limits[1] = avg;
    }
    for i in 0..f.len() {
        if f[i] <= tol {
            for (v, &l) in fields.iter_mut().zip(&limits) {
                v[i] = l;
            }
        }
    }
}
