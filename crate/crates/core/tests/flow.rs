mod common;

use common::*;
use ricci_af::flow::*;
use ricci_af::functionals::{adm_mass, DiagnosticsConfig};
use ricci_af::geometry::{arclength, curvature, DEFAULT_STENCIL_ORDER};
use ricci_af::numerics::{fit_line, DiffOperator};

fn op_for(p: &ricci_af::geometry::RadialProfile) -> DiffOperator {
    DiffOperator::new(p.s(), DEFAULT_STENCIL_ORDER)
}

fn quiet() -> DiagnosticsConfig {
    DiagnosticsConfig {
        sobolev: false,
        minimal_spheres: false,
        mass: false,
        cgb: false,
        ..DiagnosticsConfig::default()
    }
}

#[test]
fn flat_is_a_fixed_point() {
    let p = flat(3, 10.0, 100);
    let op = op_for(&p);
    let mut st = FlowState::new(p.clone());
    let dt = ricci_stability_bound(&p);
    for _ in 0..1000 {
        st = ricci_step(&st, dt, &op, OuterBc::FixedTail).unwrap();
    }
    assert!(sup_diff(st.profile.f(), p.s()) <= 1e-12);
    assert!(st.profile.phi().iter().all(|x| (x - 1.0).abs() <= 1e-12));
    let before = FlowState::new(p.clone());
    let after = ricci_step(&before, dt, &op, OuterBc::FixedTail).unwrap();
    assert!(ricci_residual(&before, &after, dt).unwrap() <= 1e-10);
}

#[test]
fn bump_curvature_decreases_at_the_stability_bound() {
    let p = bump(3, 0.05, 2.0, 0.5, 8.0, 400);
    let op = op_for(&p);
    let mut st = FlowState::new(p);
    let mut prev = curvature(&st.profile).sup_rm();
    for _ in 0..10 {
        let dt = ricci_stability_bound(&st.profile);
        st = ricci_step(&st, dt, &op, OuterBc::FixedTail).unwrap();
        let sup = curvature(&st.profile).sup_rm();
        assert!(sup < prev, "{sup} >= {prev}");
        prev = sup;
    }
    let too_big = 1.01 * ricci_stability_bound(&st.profile);
    assert!(ricci_step(&st, too_big, &op, OuterBc::FixedTail).is_err());
}

#[test]
fn round_window_shrinks_at_the_sphere_rate() {
    let err = |m: usize| {
        let p = window(3, 2.5, m, f64::sin);
        let (ft, phit) = ricci_rhs(&p, &op_for(&p), OuterBc::Extrapolated);
        let mut e = 0.0_f64;
        for i in 1..p.len() - 1 {
            e = e.max((ft[i] / (-2.0 * p.f()[i]) - 1.0).abs());
            e = e.max((phit[i] / -2.0 - 1.0).abs());
        }
        e
    };
    let (a, b) = (err(100), err(200));
    assert!(a < 1e-4, "{a}");
    assert!(b <= a, "{a} {b}");
}

fn residual_at(m: usize, corrupt: bool) -> f64 {
    let p = bump(3, 0.05, 2.0, 0.5, 8.0, m);
    let op = op_for(&p);
    let st = FlowState::new(p.clone());
    let dt = 0.2 * ricci_stability_bound(&p);
    let mut next = ricci_step(&st, dt, &op, OuterBc::FixedTail).unwrap();
    if corrupt {
        let (_, phit) = ricci_rhs(&p, &op, OuterBc::FixedTail);
        let phi: Vec<f64> = p.phi().iter().zip(&phit).map(|(a, b)| a - dt * b).collect();
        next.profile = next.profile.with_fields(next.profile.f().to_vec(), phi).unwrap();
    }
    ricci_residual(&st, &next, dt).unwrap()
}

#[test]
fn residual_converges_and_flags_a_corrupted_step() {
    let ms = [100, 200, 400];
    let res: Vec<f64> = ms.iter().map(|&m| residual_at(m, false)).collect();
    let lx: Vec<f64> = ms.iter().map(|&m| (8.0 / m as f64).ln()).collect();
    let ly: Vec<f64> = res.iter().map(|r| r.ln()).collect();
    let order = fit_line(&lx, &ly).unwrap().1;
    assert!(order >= 1.8, "order {order}, residuals {res:?}");
    let bad = residual_at(200, true);
    let sup_lam = curvature(&bump(3, 0.05, 2.0, 0.5, 8.0, 200))
        .lam_rad
        .iter()
        .fold(0.0_f64, |m, x| m.max(x.abs()));
    assert!(bad > 1e3 * res[1] && bad > sup_lam, "{bad} vs {}", res[1]);
}

#[test]
fn heat_keeps_constants_and_obeys_the_maximum_principle() {
    let p = flat(3, 10.0, 100);
    let mut st = FlowState::new(p.clone());
    st.u_eps = Some(HeatField { u: vec![0.3; p.len()], eps: 0.3 });
    let dt = heat_stability_bound(&p, OuterBc::FixedTail);
    for _ in 0..50 {
        st = heat_step(&st, dt, OuterBc::FixedTail).unwrap();
    }
    assert!(st.u_eps.as_ref().unwrap().u.iter().all(|x| (x - 0.3).abs() < 1e-14));

    let cfg = FlowConfig {
        t_end: 0.5,
        eps: 0.01,
        monitor_every: 20,
        diagnostics: quiet(),
        ..FlowConfig::default()
    };
    let b = bump(3, 0.05, 1.0, 0.4, 8.0, 200);
    let rec = run_flow(&b, &cfg, &mut []).unwrap();
    let sups: Vec<f64> = rec
        .snapshots
        .iter()
        .map(|s| s.u_eps.as_ref().unwrap().iter().cloned().fold(0.0, f64::max))
        .collect();
    assert!(sups.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-14)));
    for s in &rec.snapshots {
        let st = FlowState { t: s.t, profile: s.profile.clone(), u_eps: Some(HeatField { u: s.u_eps.clone().unwrap(), eps: 0.01 }), stats: StepStats::default() };
        let k = st.k_eps().unwrap();
        let rm = curvature(&s.profile).rm_abs();
        assert!(s.u_eps.as_ref().unwrap().iter().all(|&u| u > 0.0));
        assert!(k.iter().zip(&rm).all(|(a, b)| a >= b));
    }
}

#[test]
fn heat_matches_the_euclidean_kernel_at_second_order() {
    let n = 3;
    let (t0, t1) = (0.5, 1.0);
    let exact = |r: f64, t: f64| (t0 / t).powf(0.5 * n as f64) * (-(r * r) / (4.0 * t)).exp();
    let err = |m: usize| {
        let p = flat(n, 10.0, m);
        let r = arclength(&p);
        let mut st = FlowState::new(p.clone());
        st.u_eps = Some(HeatField { u: r.iter().map(|&x| exact(x, t0)).collect(), eps: 1.0 });
        let bound = heat_stability_bound(&p, OuterBc::FixedTail);
        let steps = ((t1 - t0) / bound).ceil() as usize;
        let dt = (t1 - t0) / steps as f64;
        for _ in 0..steps {
            st = heat_step(&st, dt, OuterBc::FixedTail).unwrap();
        }
        let u = &st.u_eps.as_ref().unwrap().u;
        r.iter().zip(u).map(|(&x, v)| (v - exact(x, t1)).abs()).fold(0.0, f64::max)
    };
    let (a, b) = (err(100), err(200));
    let order = (a / b).log2();
    assert!(order > 1.8, "order {order} ({a}, {b})");
}

#[test]
fn time_step_follows_the_grid() {
    let cfg = FlowConfig::default();
    let dt = adapt_dt(&FlowState::new(flat(3, 1.0, 100)), &cfg);
    assert!((dt - 2e-5).abs() < 1e-15, "{dt}");
    let dt2 = adapt_dt(&FlowState::new(flat(3, 1.0, 200)), &cfg);
    assert!((dt / dt2 - 4.0).abs() < 1e-10);
    // The curvature cap binds on a strongly curved slice with a coarse grid.
    let sc = schwarzschild(3, 0.1, 10.0, 40);
    let sup = curvature(&sc).sup_rm();
    let st = FlowState::new(sc.clone());
    let dt = adapt_dt(&st, &cfg);
    assert!(dt <= 1.0 / (1.0 + sup) * (1.0 + 1e-12));
    assert!(dt < cfg.cfl * ricci_stability_bound(&sc));
}

#[test]
fn flat_run_is_quiet_and_threshold_triggers_blowup() {
    let cfg = FlowConfig { t_end: 0.05, monitor_every: 500, ..FlowConfig::default() };
    let rec = run_flow(&flat(3, 8.0, 80), &cfg, &mut []).unwrap();
    assert_eq!(rec.status, RunStatus::Completed);
    assert!(rec.events.is_empty());
    for r in &rec.rows {
        assert!(r.sup_rm <= 1e-12 && r.l_n2 <= 1e-12 && r.l_q.unwrap() <= 1e-12);
        assert!(r.min_sphere.as_ref().unwrap().is_empty());
    }
    let cfg = FlowConfig { blowup_threshold: 1e-9, diagnostics: quiet(), ..FlowConfig::default() };
    let rec = run_flow(&bump(3, 0.05, 2.0, 0.5, 8.0, 100), &cfg, &mut []).unwrap();
    assert_eq!(rec.status, RunStatus::Blowup);
    assert_eq!(rec.events[0].kind, EventKind::Blowup);
    assert_eq!(rec.steps, 0);
}

#[test]
fn schwarzschild_mass_is_conserved() {
    let p = schwarzschild(3, 1.0, 40.0, 800);
    let m0 = adm_mass(&p).unwrap();
    assert!(m0.reliable && (m0.mass - 1.0).abs() < 0.02, "{m0:?}");
    let cfg = FlowConfig {
        t_end: 0.1,
        monitor_every: 1_000_000,
        diagnostics: DiagnosticsConfig { sobolev: false, ..DiagnosticsConfig::default() },
        ..FlowConfig::default()
    };
    let rec = run_flow(&p, &cfg, &mut []).unwrap();
    assert_eq!(rec.status, RunStatus::Completed);
    let masses: Vec<f64> = rec.rows.iter().map(|r| r.mass.unwrap()).collect();
    assert!(masses.iter().all(|m| rel(*m, masses[0]) < 0.01), "{masses:?}");
}

#[test]
fn run_record_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = FlowConfig { t_end: 0.01, eps: 1e-3, monitor_every: 50, diagnostics: quiet(), ..FlowConfig::default() };
    let rec = run_flow(&bump(3, 0.05, 2.0, 0.5, 8.0, 80), &cfg, &mut []).unwrap();
    let man = write_run_record(dir.path(), &rec).unwrap();
    assert_eq!(man.snapshots.len(), rec.snapshots.len());
    let csv = std::fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    assert_eq!(csv.lines().count(), rec.rows.len() + 1);
    assert!(dir.path().join(man.snapshots[0].heat_file.as_ref().unwrap()).exists());
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn heat_level_calibration() {
    let p = bump(3, 0.05, 2.0, 0.5, 8.0, 200);
    let eps = calibrate_eps(&p, 0.04).unwrap();
    assert!(eps > 0.0);
    assert!(calibrate_eps(&flat(3, 8.0, 100), 0.04).is_err());
}
