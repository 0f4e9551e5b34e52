use super::curvature::{radial_derivatives, sectional};
use super::{arclength_of, RadialProfile, DEFAULT_STENCIL_ORDER};
use crate::numerics::{fit_line, DiffOperator};

/// Outcome of one invariant check with the measured quantity behind it.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub value: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    /// Fitted tail decay order (`+∞` for an exactly flat tail).
    pub fitted_tau: f64,
    /// `max |ν1 - ν2| / r²` over the first regular nodes.
    pub origin_regularity: f64,
    /// `∂_r f` at the origin.
    pub origin_derivative: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Tolerance on `|∂_r f(0) - 1|`.
pub const ORIGIN_DERIVATIVE_TOL: f64 = 1e-3;

/// Checks every profile invariant and reports measured constants.
pub fn validate(p: &RadialProfile) -> ValidationReport {
    let mut checks = Vec::new();
    let s = p.s();
    let f = p.f();
    let phi = p.phi();
    checks.push(Check {
        name: "origin_value",
        pass: f[0] == 0.0 && s[0] == 0.0,
        value: f[0],
        detail: "f(0) = 0".into(),
    });
    let monotone = s.windows(2).all(|w| w[1] > w[0]);
    checks.push(Check {
        name: "grid_monotone",
        pass: monotone,
        value: 0.0,
        detail: "s strictly increasing".into(),
    });
    let min_f = f[1..].iter().cloned().fold(f64::INFINITY, f64::min);
    let min_phi = phi.iter().cloned().fold(f64::INFINITY, f64::min);
    checks.push(Check {
        name: "positivity",
        pass: min_f > 0.0 && min_phi > 0.0,
        value: min_f.min(min_phi),
        detail: "f > 0 away from the origin, phi > 0".into(),
    });

    let op = DiffOperator::new(s, DEFAULT_STENCIL_ORDER);
    let (fr, _, _) = radial_derivatives(s, f, phi, &op);
    let fr0 = fr[0];
    checks.push(Check {
        name: "origin_derivative",
        pass: (fr0 - 1.0).abs() <= ORIGIN_DERIVATIVE_TOL,
        value: fr0,
        detail: format!("|f_r(0) - 1| <= {ORIGIN_DERIVATIVE_TOL:e}"),
    });

    // Origin regularity: |ν1 - ν2| must vanish like r² (log-log slope) or be
    // negligible against the curvature scale.
    let r = arclength_of(s, phi);
    let (nu1, nu2) = sectional(s, f, phi, &op, &r);
    let scale = nu1
        .iter()
        .chain(&nu2)
        .fold(0.0_f64, |m, x| m.max(x.abs()))
        .max(1e-300);
    let idx: Vec<usize> = (1..p.len().min(7)).collect();
    let diffs: Vec<f64> = idx.iter().map(|&i| (nu1[i] - nu2[i]).abs()).collect();
    let coef = idx
        .iter()
        .zip(&diffs)
        .fold(0.0_f64, |m, (&i, d)| m.max(d / (r[i] * r[i])));
    let negligible = diffs.iter().all(|&d| d <= 1e-9 * scale.max(1.0));
    let slope = {
        let (lx, ly): (Vec<f64>, Vec<f64>) = idx
            .iter()
            .zip(&diffs)
            .filter(|(_, &d)| d > 0.0)
            .map(|(&i, d)| (r[i].ln(), d.ln()))
            .unzip();
        fit_line(&lx, &ly).map(|(_, c1, _)| c1).unwrap_or(f64::INFINITY)
    };
    checks.push(Check {
        name: "origin_regularity",
        pass: negligible || slope >= 1.5,
        value: coef,
        detail: format!("|nu1 - nu2| ~ r^{slope:.3} near the origin"),
    });

    let tail = p.tail();
    let tail_ok = tail.tau.is_infinite() || tail.tau >= 0.8 * p.tau();
    checks.push(Check {
        name: "tail_decay",
        pass: tail_ok,
        value: tail.tau,
        detail: format!(
            "fitted |f/r - 1| <= {:.3e} r^-{:.3} on the outer third, declared order {}",
            tail.a,
            tail.tau,
            p.tau()
        ),
    });
    ValidationReport {
        checks,
        fitted_tau: tail.tau,
        origin_regularity: coef,
        origin_derivative: fr0,
    }
}
