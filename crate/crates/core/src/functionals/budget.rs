use super::diagnostics::DiagnosticsRow;
use super::quadrature::VolumeForm;
use crate::flow::RunRecord;
use crate::geometry::curvature;
use crate::numerics::fit_line;
use crate::{Error, Result};
use serde::Serialize;

/// Constants of the evolution inequality
/// `d/dt∫|Rm|^{2α} ≤ -C1∫|∇|Rm|^α|² + C2∫|Rm|^{2α+1}` in the orthonormal-frame norm.
///
/// `C1 = 4 - 2/α` comes from Kato's inequality; `C2 = 16α + sqrt(n(n-1)/2)`, where
/// `16α` bounds the reaction term of `∂_t|Rm|²` and `sqrt(n(n-1)/2)` bounds `|R|/|Rm|`
/// in the volume-form derivative.
pub fn budget_constants(n: usize, alpha: f64) -> (f64, f64) {
    let nf = n as f64;
    (4.0 - 2.0 / alpha, 16.0 * alpha + (0.5 * nf * (nf - 1.0)).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BudgetRow {
    pub t: f64,
    /// `∫|Rm|^{2α} dV`.
    pub integral: f64,
    /// Centered difference of `integral` in `t`.
    pub d_dt: f64,
    /// `∫|∇|Rm|^α|² dV`.
    pub gradient: f64,
    /// `∫|Rm|^{2α+1} dV`.
    pub reaction: f64,
    /// `d_dt ≤ C2·reaction`.
    pub reaction_bound_holds: bool,
    /// `d_dt ≤ -C1·gradient + C2·reaction`.
    pub full_bound_holds: bool,
}

/// Budget terms at every snapshot of a run, with the time derivative taken by
/// centered differences of the sampled integral (one-sided second order at the ends).
pub fn evolution_budget(record: &RunRecord, alpha: f64) -> Result<Vec<BudgetRow>> {
    let snaps = &record.snapshots;
    if snaps.len() < 3 {
        return Err(Error::InvalidParameter(
            "evolution budget needs at least three snapshots".into(),
        ));
    }
    let n = snaps[0].profile.n();
    if !(alpha >= 1.0_f64.max(n as f64 / 4.0)) {
        return Err(Error::InvalidParameter(format!(
            "budget exponent {alpha} below max(1, n/4)"
        )));
    }
    let (c1, c2) = budget_constants(n, alpha);
    let terms: Vec<(f64, f64, f64)> = snaps
        .iter()
        .map(|sn| {
            let vf = VolumeForm::new(&sn.profile);
            let k = curvature(&sn.profile);
            let i: Vec<f64> = k.rm2.iter().map(|x| x.powf(alpha)).collect();
            let h: Vec<f64> = k.rm2.iter().map(|x| x.powf(alpha + 0.5)).collect();
            let pa: Vec<f64> = k.rm2.iter().map(|x| x.powf(0.5 * alpha)).collect();
            (vf.integrate(&i, true), vf.dirichlet(&pa, true), vf.integrate(&h, true))
        })
        .collect();
    let t: Vec<f64> = snaps.iter().map(|s| s.t).collect();
    let y: Vec<f64> = terms.iter().map(|x| x.0).collect();
    let m = t.len();
    let deriv = |a: usize, b: usize, c: usize, at: usize| {
        // Derivative at t[at] of the quadratic through samples a, b, c.
        let (xa, xb, xc) = (t[a], t[b], t[c]);
        let x = t[at];
        y[a] * (2.0 * x - xb - xc) / ((xa - xb) * (xa - xc))
            + y[b] * (2.0 * x - xa - xc) / ((xb - xa) * (xb - xc))
            + y[c] * (2.0 * x - xa - xb) / ((xc - xa) * (xc - xb))
    };
    let scale = y.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    Ok((0..m)
        .map(|k| {
            let d = match k {
                0 => deriv(0, 1, 2, 0),
                k if k == m - 1 => deriv(m - 3, m - 2, m - 1, k),
                k => deriv(k - 1, k, k + 1, k),
            };
            let (integral, gradient, reaction) = terms[k];
            let slack = 1e-9 * scale;
            BudgetRow {
                t: t[k],
                integral,
                d_dt: d,
                gradient,
                reaction,
                reaction_bound_holds: d <= c2 * reaction + slack,
                full_bound_holds: d <= -c1 * gradient + c2 * reaction + slack,
            }
        })
        .collect())
}

/// Outcome of a non-increase check on a sampled series.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotoneReport {
    /// `(sample index, increase, allowance)` for every increase beyond the slack.
    pub violations: Vec<(usize, f64, f64)>,
    /// Largest increase between consecutive samples, before slack.
    pub max_increase: f64,
}

impl MonotoneReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `values` does not increase between samples beyond
/// `quad_tol·|v| + 10·Δt·max|dv/dt|`, with `Δt` the stepper increment recorded in
/// each row and `max|dv/dt|` estimated from the series.
pub fn check_non_increasing(t: &[f64], dt: &[f64], values: &[f64], quad_tol: f64) -> MonotoneReport {
    let mut rate = 0.0_f64;
    for k in 1..values.len() {
        let h = t[k] - t[k - 1];
        if h > 0.0 {
            rate = rate.max(((values[k] - values[k - 1]) / h).abs());
        }
    }
    let mut violations = Vec::new();
    let mut max_increase = 0.0_f64;
    for k in 1..values.len() {
        let inc = values[k] - values[k - 1];
        max_increase = max_increase.max(inc);
        let allow = quad_tol * values[k - 1].abs() + 10.0 * dt[k] * rate;
        if inc > allow {
            violations.push((k, inc, allow));
        }
    }
    MonotoneReport {
        violations,
        max_increase,
    }
}

/// Applies [`check_non_increasing`] to one column of a diagnostics series; rows
/// where the column is absent are skipped.
pub fn monotone_column<F>(rows: &[DiagnosticsRow], column: F, quad_tol: f64) -> MonotoneReport
where
    F: Fn(&DiagnosticsRow) -> Option<f64>,
{
    let mut t = Vec::new();
    let mut dt = Vec::new();
    let mut v = Vec::new();
    for r in rows {
        if let Some(x) = column(r) {
            t.push(r.t);
            dt.push(r.dt);
            v.push(x);
        }
    }
    check_non_increasing(&t, &dt, &v, quad_tol)
}

/// Log-log fits of the late-time decay and the envelope comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    /// Set when the series does not span a decade past its first positive time,
    /// or when too few samples fall in the final decade.
    pub inconclusive: bool,
    /// Slope of `log sup|Rm|` against `log t` over the final decade.
    pub sup_rm_slope: Option<f64>,
    /// Same for `l_q`.
    pub l_q_slope: Option<f64>,
    /// `t·sup|Rm|` non-increasing over the final decade.
    pub t_sup_decreasing: bool,
    /// Envelope exponents `-2(n-2)/n` and `4(n-2)/n²`.
    pub exponents: (f64, f64),
    /// Envelope constants fitted on the first half of the positive-time samples.
    pub constants: (f64, f64),
    /// `max sup|Rm|² / envelope` over all positive-time samples.
    pub envelope_ratio: f64,
    pub envelope_holds: bool,
}

/// Minimum number of samples in the final decade for a conclusive report.
pub const DECAY_MIN_SAMPLES: usize = 4;

/// Decay summary of a run: late-time slopes, eventual decrease of `t·sup|Rm|`, and
/// `sup|Rm|² ≤ max(C1 t^a, C2 t^b)` with constants fitted on the early half and
/// tested on every sample.
pub fn decay_report(record: &RunRecord) -> DecayReport {
    let rows: Vec<&DiagnosticsRow> = record.rows.iter().filter(|r| r.t > 0.0).collect();
    let n = record
        .snapshots
        .first()
        .map(|s| s.profile.n())
        .unwrap_or(3) as f64;
    let exponents = (-2.0 * (n - 2.0) / n, 4.0 * (n - 2.0) / (n * n));
    let t_end = rows.last().map_or(0.0, |r| r.t);
    let t_first = rows.first().map_or(0.0, |r| r.t);
    let decade: Vec<&&DiagnosticsRow> = rows.iter().filter(|r| r.t >= 0.1 * t_end).collect();
    let inconclusive = rows.is_empty() || t_first > 0.1 * t_end || decade.len() < DECAY_MIN_SAMPLES;
    let slope = |sel: &dyn Fn(&DiagnosticsRow) -> Option<f64>| {
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for r in &decade {
            if let Some(v) = sel(r) {
                if v > 0.0 {
                    x.push(r.t.ln());
                    y.push(v.ln());
                }
            }
        }
        fit_line(&x, &y).map(|f| f.1)
    };
    let sup_rm_slope = slope(&|r| Some(r.sup_rm));
    let l_q_slope = slope(&|r| r.l_q);
    let t_sup_decreasing = decade
        .windows(2)
        .all(|w| w[1].t_sup_rm <= w[0].t_sup_rm * (1.0 + 1e-12));
    let half = rows.len().div_ceil(2).max(1).min(rows.len());
    let (mut c1, mut c2) = (0.0_f64, 0.0_f64);
    for r in &rows[..half] {
        let s2 = r.sup_rm * r.sup_rm;
        c1 = c1.max(s2 / r.t.powf(exponents.0));
        c2 = c2.max(s2 / r.t.powf(exponents.1));
    }
    let mut envelope_ratio = 0.0_f64;
    for r in &rows {
        let env = (c1 * r.t.powf(exponents.0)).max(c2 * r.t.powf(exponents.1));
        let s2 = r.sup_rm * r.sup_rm;
        if env > 0.0 {
            envelope_ratio = envelope_ratio.max(s2 / env);
        } else if s2 > 0.0 {
            envelope_ratio = f64::INFINITY;
        }
    }
    DecayReport {
        inconclusive,
        sup_rm_slope,
        l_q_slope,
        t_sup_decreasing,
        exponents,
        constants: (c1, c2),
        envelope_ratio,
        envelope_holds: envelope_ratio <= 1.0 + 1e-12,
    }
}
