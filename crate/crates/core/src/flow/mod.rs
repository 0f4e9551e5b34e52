//! Ricci flow of radial profiles on a frozen coordinate grid, with an optional
//! heat-equation companion and adaptive explicit time stepping.

mod record;
mod step;

pub use record::{write_run_record, Manifest, SnapshotEntry};
pub use step::{
    heat_stability_bound, heat_step, ricci_residual, ricci_rhs, ricci_stability_bound, ricci_step,
};

use crate::functionals::{
    diagnostics_row, weighted_sobolev_battery_max, BatterySpec, DiagnosticsConfig,
    DiagnosticsRow, VolumeForm,
};
use crate::geometry::curvature::curvature_with_op;
use crate::geometry::{arclength, curvature, RadialProfile, DEFAULT_STENCIL_ORDER};
use crate::numerics::DiffOperator;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Treatment of the outer grid node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OuterBc {
    /// The outer values are held fixed.
    #[default]
    FixedTail,
    /// The outer rate is extrapolated from the three preceding nodes.
    Extrapolated,
}

impl OuterBc {
    pub fn name(&self) -> &'static str {
        match self {
            OuterBc::FixedTail => "fixed_tail",
            OuterBc::Extrapolated => "extrapolated",
        }
    }
}

/// Heat companion `u_ε` and its level `ε`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatField {
    pub u: Vec<f64>,
    pub eps: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct StepStats {
    pub dt: f64,
    pub residual: Option<f64>,
    pub steps: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub profile: RadialProfile,
    pub u_eps: Option<HeatField>,
    pub stats: StepStats,
}

impl FlowState {
    pub fn new(profile: RadialProfile) -> Self {
        FlowState {
            t: 0.0,
            profile,
            u_eps: None,
            stats: StepStats::default(),
        }
    }

    /// Attaches the heat companion `u_ε(0) = ε (1 + r²)^{-(2+τ)/2}`.
    pub fn with_heat(mut self, eps: f64) -> Result<Self> {
        self.u_eps = Some(HeatField {
            u: initial_heat(&self.profile, eps)?,
            eps,
        });
        Ok(self)
    }

    /// `K_ε = sqrt(|Rm|² + u_ε²)` at each node, when the companion is active.
    pub fn k_eps(&self) -> Option<Vec<f64>> {
        let h = self.u_eps.as_ref()?;
        let k = curvature(&self.profile);
        Some(k.rm2.iter().zip(&h.u).map(|(a, b)| (a + b * b).sqrt()).collect())
    }
}

/// Regularized initial data of the heat companion.
pub fn initial_heat(p: &RadialProfile, eps: f64) -> Result<Vec<f64>> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "heat level must be positive, got {eps}"
        )));
    }
    let e = -(2.0 + p.tau()) / 2.0;
    Ok(arclength(p)
        .iter()
        .map(|r| eps * (1.0 + r * r).powf(e))
        .collect())
}

/// `ε` for which `(∫K_ε^{n/2} dV)^{2/n}` exceeds `(∫|Rm|^{n/2} dV)^{2/n}` by the given
/// relative amount (bisection in `log ε`). Fails on curvature-free profiles.
pub fn calibrate_eps(p: &RadialProfile, excess: f64) -> Result<f64> {
    if !(excess > 0.0) {
        return Err(Error::InvalidParameter("excess must be positive".into()));
    }
    let n = p.n() as f64;
    let vf = VolumeForm::new(p);
    let k = curvature(p);
    let norm = |u: Option<&[f64]>| {
        let v: Vec<f64> = match u {
            Some(u) => k
                .rm2
                .iter()
                .zip(u)
                .map(|(a, b)| (a + b * b).powf(0.25 * n))
                .collect(),
            None => k.rm2.iter().map(|a| a.powf(0.25 * n)).collect(),
        };
        vf.integrate(&v, true).powf(2.0 / n)
    };
    let base = norm(None);
    if !(base > 0.0) {
        return Err(Error::InvalidParameter(
            "cannot calibrate the heat level on a curvature-free profile".into(),
        ));
    }
    let shape = initial_heat(p, 1.0)?;
    let gap = |le: f64| {
        let e = le.exp();
        let u: Vec<f64> = shape.iter().map(|x| e * x).collect();
        norm(Some(&u)) / base - 1.0 - excess
    };
    let (mut lo, mut hi) = ((base * 1e-12).ln(), (base * 1e3).ln());
    if gap(lo) > 0.0 || gap(hi) < 0.0 {
        return Err(Error::InvalidParameter("heat level calibration failed".into()));
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo.exp())
}

fn default_cfl() -> f64 {
    0.2
}
fn default_t_end() -> f64 {
    1.0
}
fn default_blowup() -> f64 {
    1e6
}
fn default_monitor_every() -> u64 {
    100
}
fn default_order() -> usize {
    DEFAULT_STENCIL_ORDER
}
fn default_max_steps() -> u64 {
    10_000_000
}
fn default_one() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    /// Fraction of the stability bound: `Δt ≤ cfl·min_i(φ_i h_i)²`.
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    /// Abort once `sup|Rm|` exceeds this.
    #[serde(default = "default_blowup")]
    pub blowup_threshold: f64,
    /// Heat companion level; zero disables it.
    #[serde(default)]
    pub eps: f64,
    /// Diagnostics cadence in steps.
    #[serde(default = "default_monitor_every")]
    pub monitor_every: u64,
    #[serde(default)]
    pub outer_bc: OuterBc,
    #[serde(default = "default_order")]
    pub stencil_order: usize,
    /// Levels of `t·sup|Rm|` whose crossing is reported.
    #[serde(default)]
    pub decay_levels: Vec<f64>,
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
    /// Keep a snapshot every this many diagnostics samples.
    #[serde(default = "default_one")]
    pub snapshot_every: u64,
    /// Evaluate the oracle residual of the step preceding each sample.
    #[serde(default)]
    pub check_residual: bool,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            cfl: default_cfl(),
            t_end: default_t_end(),
            blowup_threshold: default_blowup(),
            eps: 0.0,
            monitor_every: default_monitor_every(),
            outer_bc: OuterBc::default(),
            stencil_order: default_order(),
            decay_levels: Vec::new(),
            max_steps: default_max_steps(),
            snapshot_every: 1,
            check_residual: false,
            diagnostics: DiagnosticsConfig::default(),
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return bad(format!("cfl must lie in (0, 1), got {}", self.cfl));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be positive and finite, got {}", self.t_end));
        }
        if !(self.blowup_threshold > 0.0) {
            return bad("blowup_threshold must be positive".into());
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return bad("eps must be non-negative".into());
        }
        if self.monitor_every == 0 || self.snapshot_every == 0 {
            return bad("monitor_every and snapshot_every must be positive".into());
        }
        if !matches!(self.stencil_order, 2 | 4 | 6) {
            return bad(format!("stencil_order must be 2, 4 or 6, got {}", self.stencil_order));
        }
        Ok(())
    }
}

/// `Δt = min(cfl·min_i(φ_i h_i)², 1/(1 + sup|Rm|))`, further capped by the heat
/// maximum-principle bound when the companion is active.
pub fn adapt_dt(state: &FlowState, config: &FlowConfig) -> f64 {
    let sup = curvature(&state.profile).sup_rm();
    adapt_dt_with(state, config, sup)
}

fn adapt_dt_with(state: &FlowState, config: &FlowConfig, sup_rm: f64) -> f64 {
    let mut dt = (config.cfl * ricci_stability_bound(&state.profile)).min(1.0 / (1.0 + sup_rm));
    if state.u_eps.is_some() {
        dt = dt.min(heat_stability_bound(&state.profile, config.outer_bc));
    }
    dt
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Blowup,
    StabilityAbort,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Blowup,
    DecayMilestone,
    StabilityAbort,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowEvent {
    pub kind: EventKind,
    pub t: f64,
    pub step: u64,
    pub value: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub step: u64,
    pub profile: RadialProfile,
    pub u_eps: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub status: RunStatus,
    pub t_final: f64,
    pub steps: u64,
    pub rows: Vec<DiagnosticsRow>,
    pub snapshots: Vec<Snapshot>,
    pub events: Vec<FlowEvent>,
    pub outer_bc: OuterBc,
    /// Oracle residuals of the steps preceding samples, when requested.
    pub residuals: Vec<(f64, f64)>,
}

/// Hook called at every diagnostics sample with the current state and row.
pub trait FlowMonitor {
    fn observe(&mut self, state: &FlowState, row: &DiagnosticsRow) -> Result<()>;
}

/// Records the battery maximum of the weighted Sobolev ratio at every sample.
#[derive(Clone, Debug, Default)]
pub struct WeightedSobolevMonitor {
    pub battery: BatterySpec,
    pub series: Vec<(f64, f64)>,
}

impl FlowMonitor for WeightedSobolevMonitor {
    fn observe(&mut self, state: &FlowState, _row: &DiagnosticsRow) -> Result<()> {
        let vf = VolumeForm::new(&state.profile);
        let shapes = self.battery.shapes(&vf);
        if let Some(v) = weighted_sobolev_battery_max(&state.profile, &shapes) {
            self.series.push((state.t, v));
        }
        Ok(())
    }
}

/// Integrates the flow from `initial` to `config.t_end`.
///
/// Diagnostics are sampled every `monitor_every` steps and at the final time. A
/// blowup or a failed step ends the run early with a partial record and the
/// corresponding status; only invalid input is reported as an error.
pub fn run_flow(
    initial: &RadialProfile,
    config: &FlowConfig,
    monitors: &mut [&mut dyn FlowMonitor],
) -> Result<RunRecord> {
    config.validate()?;
    if initial.n() < 3 {
        return Err(Error::Dimension(initial.n(), "the flow needs n >= 3"));
    }
    let op = DiffOperator::new(initial.s(), config.stencil_order);
    let mut state = FlowState::new(initial.clone());
    if config.eps > 0.0 {
        state = state.with_heat(config.eps)?;
    }
    let mut rec = RunRecord {
        status: RunStatus::Completed,
        t_final: 0.0,
        steps: 0,
        rows: Vec::new(),
        snapshots: Vec::new(),
        events: Vec::new(),
        outer_bc: config.outer_bc,
        residuals: Vec::new(),
    };
    let mut samples = 0u64;
    let mut sup = curvature_with_op(&state.profile, &op).sup_rm();
    let mut dt = adapt_dt_with(&state, config, sup);
    sample(&state, dt, config, monitors, &mut rec, &mut samples)?;
    if sup > config.blowup_threshold {
        blowup(&state, sup, config, &mut rec);
        return Ok(rec);
    }
    let mut milestones_hit = vec![false; config.decay_levels.len()];
    let mut prev_tsup = 0.0;
    while state.t < config.t_end * (1.0 - 1e-14) {
        if state.stats.steps >= config.max_steps {
            abort(&state, format!("step limit {} reached", config.max_steps), &mut rec);
            return Ok(rec);
        }
        dt = adapt_dt_with(&state, config, sup).min(config.t_end - state.t);
        let before = config.check_residual.then(|| state.clone());
        let next = match advance(&state, dt, &op, config.outer_bc) {
            Ok(s) => s,
            Err(Error::FlowAbort(msg)) => {
                abort(&state, msg, &mut rec);
                return Ok(rec);
            }
            Err(e) => return Err(e),
        };
        state = next;
        sup = curvature_with_op(&state.profile, &op).sup_rm();
        if !sup.is_finite() {
            abort(&state, "curvature became non-finite".into(), &mut rec);
            return Ok(rec);
        }
        let tsup = state.t * sup;
        for (hit, &level) in milestones_hit.iter_mut().zip(&config.decay_levels) {
            if !*hit && prev_tsup >= level && tsup < level {
                *hit = true;
                rec.events.push(FlowEvent {
                    kind: EventKind::DecayMilestone,
                    t: state.t,
                    step: state.stats.steps,
                    value: tsup,
                    detail: format!("t*sup|Rm| fell below {level:e}"),
                });
            }
        }
        prev_tsup = tsup;
        if sup > config.blowup_threshold {
            sample(&state, dt, config, monitors, &mut rec, &mut samples)?;
            blowup(&state, sup, config, &mut rec);
            return Ok(rec);
        }
        let done = state.t >= config.t_end * (1.0 - 1e-14);
        if state.stats.steps % config.monitor_every == 0 || done {
            if let Some(b) = before {
                let r = ricci_residual(&b, &state, dt)?;
                state.stats.residual = Some(r);
                rec.residuals.push((state.t, r));
            }
            sample(&state, dt, config, monitors, &mut rec, &mut samples)?;
        }
    }
    rec.t_final = state.t;
    rec.steps = state.stats.steps;
    Ok(rec)
}

/// One metric step followed by a heat step on the time-averaged metric.
fn advance(state: &FlowState, dt: f64, op: &DiffOperator, bc: OuterBc) -> Result<FlowState> {
    let mut next = ricci_step(state, dt, op, bc)?;
    if let Some(h) = &state.u_eps {
        let p0 = &state.profile;
        let p1 = &next.profile;
        let f: Vec<f64> = p0.f().iter().zip(p1.f()).map(|(a, b)| 0.5 * (a + b)).collect();
        let phi: Vec<f64> = p0.phi().iter().zip(p1.phi()).map(|(a, b)| 0.5 * (a + b)).collect();
        let avg = p0.with_fields(f, phi)?;
        let u = step::heat_advance(&avg, &h.u, dt, bc)?;
        next.u_eps = Some(HeatField { u, eps: h.eps });
    }
    Ok(next)
}

fn sample(
    state: &FlowState,
    dt: f64,
    config: &FlowConfig,
    monitors: &mut [&mut dyn FlowMonitor],
    rec: &mut RunRecord,
    samples: &mut u64,
) -> Result<()> {
    let u = state.u_eps.as_ref().map(|h| h.u.as_slice());
    let row = diagnostics_row(state.t, dt, &state.profile, u, &config.diagnostics)?;
    for m in monitors.iter_mut() {
        m.observe(state, &row)?;
    }
    if *samples % config.snapshot_every == 0 {
        rec.snapshots.push(Snapshot {
            t: state.t,
            step: state.stats.steps,
            profile: state.profile.clone(),
            u_eps: state.u_eps.as_ref().map(|h| h.u.clone()),
        });
    }
    *samples += 1;
    rec.rows.push(row);
    rec.t_final = state.t;
    rec.steps = state.stats.steps;
    Ok(())
}

fn blowup(state: &FlowState, sup: f64, config: &FlowConfig, rec: &mut RunRecord) {
    rec.status = RunStatus::Blowup;
    rec.events.push(FlowEvent {
        kind: EventKind::Blowup,
        t: state.t,
        step: state.stats.steps,
        value: sup,
        detail: format!("sup|Rm| exceeded {:e}", config.blowup_threshold),
    });
    rec.t_final = state.t;
    rec.steps = state.stats.steps;
}

fn abort(state: &FlowState, msg: String, rec: &mut RunRecord) {
    rec.status = RunStatus::StabilityAbort;
    rec.events.push(FlowEvent {
        kind: EventKind::StabilityAbort,
        t: state.t,
        step: state.stats.steps,
        value: state.stats.dt,
        detail: msg,
    });
    rec.t_final = state.t;
    rec.steps = state.stats.steps;
}
