//! Analytic lower-bound chains for the neck energies, checked against quadrature.

use super::profile::NeckProfileParams;
use crate::numerics::{bisect, simpson_weights};
use crate::{Error, Result};
use serde::Serialize;

/// Absolute-plus-relative slack allowed on every link of a chain.
pub const WITNESS_TOL: f64 = 1e-8;

/// Quadrature nodes in `t`. Finer than the search grid: the chains run once per
/// search and the identity link resolves to `O(h⁴)` only.
pub const WITNESS_POINTS: usize = 16001;

/// Default ceiling on `D = g(1)`: the root `D > 1` of `(D² - 1)^{n/2} = D`, above
/// which `E1 >= 1` by the large-`D` chain.
pub fn default_ceiling(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    bisect(|d| (d * d - 1.0).powf(h) - d, 1.0, 10.0, 1e-14)
}

/// One link `lower <= upper` of a chain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundStep {
    pub label: String,
    pub lower: f64,
    pub upper: f64,
    pub holds: bool,
}

impl BoundStep {
    fn new(label: &str, lower: f64, upper: f64) -> Self {
        let slack = WITNESS_TOL * upper.abs().max(1.0);
        BoundStep {
            label: label.to_string(),
            lower,
            upper,
            holds: lower <= upper + slack,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessReport {
    pub n: usize,
    /// `D = g(1)`.
    pub d: f64,
    /// `∫₀¹ (g')²`.
    pub dirichlet: f64,
    /// `[g' g^{(n-2)/n}]₀¹`.
    pub boundary_term: f64,
    pub e1: f64,
    pub e2: f64,
    pub ceiling: f64,
    /// Large-`D` chain, present when `D >= 1`.
    pub e1_large: Option<Vec<BoundStep>>,
    /// Ceiling chain, present when `D <= ceiling`.
    pub e1_ceiling: Option<Vec<BoundStep>>,
    /// Present when `n > 2` and `D <= ceiling`; at `n = 2` the prefactor vanishes.
    pub e2_chain: Option<Vec<BoundStep>>,
    /// `∫ g'' g^a - ([g' g^a]₀¹ - a ∫ (g')² g^{-2/n})`, `a = (n-2)/n`.
    pub identity_residual: f64,
}

impl WitnessReport {
    pub fn steps(&self) -> impl Iterator<Item = &BoundStep> {
        self.e1_large
            .iter()
            .chain(&self.e1_ceiling)
            .chain(&self.e2_chain)
            .flatten()
    }

    pub fn all_hold(&self) -> bool {
        self.steps().all(|s| s.holds)
    }
}

/// Evaluates every intermediate bound of the two chains on `params`.
///
/// Quadrature runs in `t` with `x = t^k`, `k = n/(n-2)` (`k = 1` at `n = 2`),
/// which turns the `g^{-2/n}` singularity at the origin into a bounded integrand.
/// `ceiling` defaults to [`default_ceiling`].
pub fn lower_bound_witness(params: &NeckProfileParams, n: usize, ceiling: Option<f64>) -> Result<WitnessReport> {
    if n < 2 {
        return Err(Error::Dimension(n, "witness chains need n >= 2"));
    }
    let c1 = ceiling.unwrap_or_else(|| default_ceiling(n));
    if !(c1 > 0.0 && c1.is_finite()) {
        return Err(Error::InvalidParameter(format!("ceiling must be positive, got {c1}")));
    }
    let ev = params.evaluator();
    super::objective::check_admissible(&ev, WITNESS_POINTS)?;
    let nf = n as f64;
    let h = nf / 2.0;
    let a = (nf - 2.0) / nf;
    let k = if n > 2 { nf / (nf - 2.0) } else { 1.0 };
    let t: Vec<f64> = (0..WITNESS_POINTS)
        .map(|i| i as f64 / (WITNESS_POINTS - 1) as f64)
        .collect();
    let w = simpson_weights(&t);
    let (mut e1, mut e2, mut jensen1, mut dir, mut mass) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut gpp, mut singular) = (0.0, 0.0);
    for (i, &ti) in t.iter().enumerate() {
        let jac = k * ti.powf(k - 1.0);
        let wi = w[i] * jac;
        let x = ti.powf(k);
        let [g1, g2, _] = ev.derivs(x);
        dir += wi * g1 * g1;
        let omg = ev.one_minus_g1(x) * (1.0 + g1);
        mass += wi * omg;
        if i == 0 {
            // Series limits: everything vanishes except (g')² g^{-2/n} dx/dt → k.
            if n > 2 {
                singular += w[0] * k;
            }
            continue;
        }
        let g = ev.g(x);
        let p = omg.abs().powf(h);
        jensen1 += wi * p;
        e1 += wi * p / g;
        e2 += wi * g2.abs().powf(h) * g.powf(h - 1.0);
        if n > 2 {
            gpp += wi * g2 * g.powf(a);
            singular += wi * g1 * g1 * g.powf(-2.0 / nf);
        }
    }
    let d = ev.g(1.0);
    let boundary_term = ev.derivs(1.0)[0] * d.powf(a);
    let identity_residual = if n > 2 { gpp - (boundary_term - a * singular) } else { 0.0 };

    let e1_large = (d >= 1.0).then(|| {
        let b1 = jensen1 / d;
        let b2 = (dir - 1.0).abs().powf(h) / d;
        let b3 = (d * d - 1.0).powf(h) / d;
        vec![
            BoundStep::new("E1 >= (1/D) int |1-g'^2|^(n/2)", b1, e1),
            BoundStep::new("(1/D) int |1-g'^2|^(n/2) >= (1/D) |int g'^2 - 1|^(n/2)", b2, b1),
            BoundStep::new("(1/D) |int g'^2 - 1|^(n/2) >= (1/D) (D^2-1)^(n/2)", b3, b2),
        ]
    });
    let e1_ceiling = (d <= c1).then(|| {
        let b1 = jensen1 / c1;
        let b2 = mass.abs().powf(h) / c1;
        vec![
            BoundStep::new("E1 >= (1/C1) int |1-g'^2|^(n/2)", b1, e1),
            BoundStep::new("(1/C1) int |1-g'^2|^(n/2) >= (1/C1) |int 1-g'^2|^(n/2)", b2, b1),
        ]
    });
    let e2_chain = (n > 2 && d <= c1).then(|| {
        let b1 = gpp.abs().powf(h);
        let b2 = (boundary_term - a * singular).abs().powf(h);
        let b3 = a.powf(h) / c1 * dir.powf(h);
        vec![
            BoundStep::new("E2 >= |int g'' g^a|^(n/2)", b1, e2),
            BoundStep::new("integration by parts", identity_residual.abs(), 0.0),
            BoundStep::new("|[g' g^a] - a int g'^2 g^(-2/n)|^(n/2) >= a^(n/2) (1/C1) (int g'^2)^(n/2)", b3, b2),
        ]
    });
    Ok(WitnessReport {
        n,
        d,
        dirichlet: dir,
        boundary_term,
        e1,
        e2,
        ceiling: c1,
        e1_large,
        e1_ceiling,
        e2_chain,
        identity_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceiling_solves_its_equation() {
        for n in 2..7 {
            let d = default_ceiling(n);
            assert!(d > 1.0);
            assert!(((d * d - 1.0).powf(n as f64 / 2.0) - d).abs() < 1e-10);
        }
        assert!((default_ceiling(2) - 0.5 * (1.0 + 5f64.sqrt())).abs() < 1e-12);
    }
}
