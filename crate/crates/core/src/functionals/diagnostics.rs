use super::conservation::{adm_mass, cgb_residual};
use super::entropy::{mu_star_estimate, MuStarConfig};
use super::minimal::{detect_minimal_hyperspheres, e1_e2};
use super::norms::{curvature_power_integral, q_exponent};
use super::quadrature::VolumeForm;
use super::sobolev::{sobolev_estimate_shapes, BatterySpec};
use crate::geometry::{curvature, fmt_f64, RadialProfile};
use crate::Result;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Which monitored quantities to evaluate at each diagnostics sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsConfig {
    pub sobolev: bool,
    pub battery: BatterySpec,
    pub minimal_spheres: bool,
    pub mass: bool,
    /// Only evaluated in dimension four.
    pub cgb: bool,
    /// Entropy monitor along `τ(t) = horizon - t`; disabled when absent.
    pub entropy: Option<EntropyMonitor>,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig {
            sobolev: true,
            battery: BatterySpec::default(),
            minimal_spheres: true,
            mass: true,
            cgb: true,
            entropy: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyMonitor {
    pub horizon: f64,
    #[serde(default)]
    pub optimizer: MuStarConfig,
}

/// One time sample of every monitored scalar. Optional fields are `None` when the
/// quantity is disabled or undefined for the profile.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub dt: f64,
    pub sup_rm: f64,
    /// `t · sup|Rm|`.
    pub t_sup_rm: f64,
    /// `(∫|Rm|^{n/2} dV)^{2/n}`.
    pub l_n2: f64,
    /// `(∫|Rm|^q dV)^{1/q}`, `q = (n/2)·n/(n-2)`; absent for `n = 2`.
    pub l_q: Option<f64>,
    pub chi: Option<f64>,
    pub sobolev_lb: Option<f64>,
    /// Upper bound on `μ*(g(t), horizon - t)`.
    pub mu_star: Option<f64>,
    pub e1: Option<f64>,
    pub e2: Option<f64>,
    /// Minimal hypersphere radii; `None` when detection is disabled.
    pub min_sphere: Option<Vec<f64>>,
    pub cgb: Option<f64>,
    pub mass: Option<f64>,
    /// `(∫K_ε^{n/2} dV)^{2/n}` when the heat companion is active.
    pub keps_n2: Option<f64>,
}

/// Fixed column order of the diagnostics CSV.
pub const CSV_COLUMNS: [&str; 15] = [
    "t", "dt", "sup_rm", "t_sup_rm", "l_n2", "l_q", "chi", "sobolev_lb", "mu_star", "e1", "e2",
    "min_sphere", "cgb", "mass", "keps_n2",
];

/// Evaluates every configured quantity on one profile.
pub fn diagnostics_row(
    t: f64,
    dt: f64,
    p: &RadialProfile,
    u_eps: Option<&[f64]>,
    cfg: &DiagnosticsConfig,
) -> Result<DiagnosticsRow> {
    let n = p.n();
    let nf = n as f64;
    let vf = VolumeForm::new(p);
    let k = curvature(p);
    let sup_rm = k.sup_rm();
    let l_n2 = curvature_power_integral(&vf, &k, 0.5 * nf).powf(2.0 / nf);
    let l_q = (n >= 3).then(|| {
        let q = q_exponent(n);
        curvature_power_integral(&vf, &k, q).powf(1.0 / q)
    });
    let sobolev_lb = if cfg.sobolev && n >= 3 {
        Some(sobolev_estimate_shapes(p, &vf, &cfg.battery.shapes(&vf))?.lower_bound)
    } else {
        None
    };
    let chi = sobolev_lb.map(|c| c * l_n2);
    let mu_star = match &cfg.entropy {
        Some(m) if m.horizon - t > 0.0 => {
            Some(mu_star_estimate(p, m.horizon - t, &m.optimizer)?.value)
        }
        _ => None,
    };
    let (min_sphere, e1, e2) = if cfg.minimal_spheres {
        let radii = detect_minimal_hyperspheres(p);
        let (e1, e2) = match radii.first() {
            Some(&r) => match e1_e2(p, r) {
                Ok((a, b)) => (Some(a), Some(b)),
                Err(_) => (None, None),
            },
            None => (None, None),
        };
        (Some(radii), e1, e2)
    } else {
        (None, None, None)
    };
    let cgb = if cfg.cgb && n == 4 {
        Some(cgb_residual(p)?.residual)
    } else {
        None
    };
    let mass = if cfg.mass && n >= 3 {
        Some(adm_mass(p)?.mass)
    } else {
        None
    };
    let keps_n2 = u_eps.map(|u| {
        let v: Vec<f64> = k
            .rm2
            .iter()
            .zip(u)
            .map(|(a, b)| (a + b * b).powf(0.25 * nf))
            .collect();
        vf.integrate(&v, true).powf(2.0 / nf)
    });
    Ok(DiagnosticsRow {
        t,
        dt,
        sup_rm,
        t_sup_rm: t * sup_rm,
        l_n2,
        l_q,
        chi,
        sobolev_lb,
        mu_star,
        e1,
        e2,
        min_sphere,
        cgb,
        mass,
        keps_n2,
    })
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

impl DiagnosticsRow {
    /// CSV fields in [`CSV_COLUMNS`] order. Absent values are empty; `min_sphere`
    /// is `0` when no sphere was found, else the radii joined by `;`.
    pub fn csv_fields(&self) -> Vec<String> {
        let spheres = match &self.min_sphere {
            None => String::new(),
            Some(v) if v.is_empty() => "0".into(),
            Some(v) => v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(";"),
        };
        vec![
            fmt_f64(self.t),
            fmt_f64(self.dt),
            fmt_f64(self.sup_rm),
            fmt_f64(self.t_sup_rm),
            fmt_f64(self.l_n2),
            opt(self.l_q),
            opt(self.chi),
            opt(self.sobolev_lb),
            opt(self.mu_star),
            opt(self.e1),
            opt(self.e2),
            spheres,
            opt(self.cgb),
            opt(self.mass),
            opt(self.keps_n2),
        ]
    }
}

/// The diagnostics series as CSV text with a header line.
pub fn diagnostics_csv(rows: &[DiagnosticsRow]) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.csv_fields().join(","));
    }
    out
}
