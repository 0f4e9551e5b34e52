use crate::geometry::{arclength, RadialProfile, DEFAULT_STENCIL_ORDER};
use crate::numerics::{power_law_tail, simpson_weights, sphere_area, DiffOperator, Parity};

/// Fraction of the grid used to fit power-law tails of integrands.
pub const TAIL_FIT_FRACTION: f64 = 0.1;

/// Quadrature data of a profile: Simpson weights in `s` times the volume density
/// `ω_{n-1} φ f^{n-1}`, plus a gradient operator in arclength.
#[derive(Clone, Debug)]
pub struct VolumeForm {
    pub n: usize,
    pub s: Vec<f64>,
    pub r: Vec<f64>,
    pub phi: Vec<f64>,
    /// `ω_{n-1} φ_i f_i^{n-1}`.
    pub density: Vec<f64>,
    /// Simpson weight times density.
    pub weight: Vec<f64>,
    op: DiffOperator,
}

impl VolumeForm {
    pub fn new(p: &RadialProfile) -> Self {
        let n = p.n();
        let omega = sphere_area(n - 1);
        let density: Vec<f64> = p
            .f()
            .iter()
            .zip(p.phi())
            .map(|(f, ph)| omega * ph * f.powi(n as i32 - 1))
            .collect();
        let w = simpson_weights(p.s());
        let weight = w.iter().zip(&density).map(|(a, b)| a * b).collect();
        VolumeForm {
            n,
            s: p.s().to_vec(),
            r: arclength(p),
            phi: p.phi().to_vec(),
            density,
            weight,
            op: DiffOperator::new(p.s(), DEFAULT_STENCIL_ORDER),
        }
    }

    /// `∫ F dV` over the grid, plus the fitted power-law tail beyond `s_M` when
    /// `tail` is set and the integrand decays faster than `s^{-1}`.
    pub fn integrate(&self, values: &[f64], tail: bool) -> f64 {
        let core: f64 = self.weight.iter().zip(values).map(|(w, v)| w * v).sum();
        if !tail {
            return core;
        }
        core + self.tail_of(values)
    }

    fn tail_of(&self, values: &[f64]) -> f64 {
        let dens: Vec<f64> = values
            .iter()
            .zip(&self.density)
            .map(|(v, d)| v * d)
            .collect();
        let sign = if dens.last().copied().unwrap_or(0.0) < 0.0 {
            -1.0
        } else {
            1.0
        };
        let abs: Vec<f64> = dens.iter().map(|x| sign * x).collect();
        match power_law_tail(&self.s, &abs, TAIL_FIT_FRACTION) {
            Some(t) => sign * t.integral,
            None => 0.0,
        }
    }

    /// `|∇u|` components: the arclength derivative `u_r = φ^{-1} u_s` of an even function.
    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let d = self.op.d1(u, Parity::Even);
        d.iter().zip(&self.phi).map(|(a, b)| a / b).collect()
    }

    /// `∫ |∇u|² dV`.
    pub fn dirichlet(&self, u: &[f64], tail: bool) -> f64 {
        let g = self.gradient(u);
        let g2: Vec<f64> = g.iter().map(|x| x * x).collect();
        self.integrate(&g2, tail)
    }
}

/// `ω_{n-1} ∫ F φ f^{n-1} ds` by composite Simpson, optionally with the tail term.
pub fn volume_integral(p: &RadialProfile, values: &[f64], tail: bool) -> f64 {
    VolumeForm::new(p).integrate(values, tail)
}
