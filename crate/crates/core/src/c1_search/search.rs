//! Brute-force sweep plus multistart simplex descent for the neck minimax.

use super::objective::{neck_energies, UnitProfile, EVAL_POINTS};
use super::profile::NeckProfileParams;
use crate::geometry::{fmt_f64, make_profile, Family, GridSpec, RadialProfile};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Largest sweep dimension; the sweep is the brute-force oracle.
pub const MAX_SWEEP_DIM: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    /// Number of latent control values in the full basis.
    pub basis_dim: usize,
    /// Grid points per axis of the sweep.
    pub sweep_points: usize,
    /// Range of control values covered by the sweep and by random starts.
    pub sweep_range: (f64, f64),
    /// Simplex starts per basis level, including the carried-over best.
    pub starts: usize,
    /// Objective evaluations allowed per start; 0 skips the descent.
    pub budget: usize,
    pub seed: u64,
    /// Ceiling on `g(1)` for the witness chains; `None` uses the default.
    pub ceiling: Option<f64>,
    /// Relative spread of simplex values below which a start has converged.
    pub tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            basis_dim: 6,
            sweep_points: 20,
            sweep_range: (0.4, 1.6),
            starts: 6,
            budget: 1500,
            seed: 0,
            ceiling: None,
            tol: 1e-10,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.sweep_range;
        if self.basis_dim == 0 {
            return Err(Error::InvalidParameter("basis_dim must be at least 1".into()));
        }
        if self.sweep_points < 2 {
            return Err(Error::InvalidParameter("sweep_points must be at least 2".into()));
        }
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sweep_range must satisfy 0 < lo < hi, got ({lo}, {hi})"
            )));
        }
        if self.starts == 0 {
            return Err(Error::InvalidParameter("starts must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter("tol must be positive".into()));
        }
        if let Some(c) = self.ceiling {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidParameter("ceiling must be positive".into()));
            }
        }
        Ok(())
    }

    /// Sweep dimension: the largest divisor of `basis_dim` not above
    /// [`MAX_SWEEP_DIM`], so the sweep family nests exactly in the full basis.
    pub fn sweep_dim(&self) -> usize {
        (1..=MAX_SWEEP_DIM.min(self.basis_dim))
            .rev()
            .find(|d| self.basis_dim % d == 0)
            .unwrap_or(1)
    }

    /// Basis dimensions visited by the descent, each dividing the next.
    pub fn ladder(&self) -> Vec<usize> {
        let mut out = vec![self.sweep_dim()];
        let mut cur = out[0];
        while cur < self.basis_dim {
            cur = (cur + 1..=self.basis_dim)
                .find(|d| d % cur == 0 && self.basis_dim % d == 0)
                .unwrap_or(self.basis_dim);
            out.push(cur);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepCell {
    pub q: Vec<f64>,
    pub e1: f64,
    pub e2: f64,
    pub objective: f64,
}

/// Every cell of the brute-force sweep, in lexicographic grid order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub dim: usize,
    pub cells: Vec<SweepCell>,
}

impl SweepRecord {
    /// Best feasible cell.
    pub fn best(&self) -> Option<&SweepCell> {
        self.cells
            .iter()
            .filter(|c| c.objective.is_finite())
            .min_by(|a, b| a.objective.total_cmp(&b.objective))
    }

    /// CSV with columns `q1..qK, e1, e2, objective`; infeasible cells carry `inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let mut head: Vec<String> = (1..=self.dim).map(|k| format!("q{k}")).collect();
        head.extend(["e1", "e2", "objective"].map(String::from));
        out.push_str(&head.join(","));
        out.push('\n');
        for c in &self.cells {
            let mut row: Vec<String> = c.q.iter().map(|&x| fmt_f64(x)).collect();
            row.extend([c.e1, c.e2, c.objective].map(fmt_f64));
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Outcome of the multistart descent at one basis dimension.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageResult {
    pub dim: usize,
    pub best: f64,
    /// Final value of each start; the first start is the carried-over best.
    pub start_values: Vec<f64>,
    pub evaluations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct C1Estimate {
    pub n: usize,
    /// Smallest objective found: an upper bound on the infimum over the family.
    pub estimate: f64,
    pub best: NeckProfileParams,
    pub e1: f64,
    pub e2: f64,
    pub sweep_min: f64,
    /// Best value of the final descent stage, absent when the budget is zero.
    pub descent_min: Option<f64>,
    /// `estimate` minus the change of the best objective under grid doubling.
    pub margin: f64,
    pub stages: Vec<StageResult>,
    pub evaluations: usize,
}

fn energies_or_inf(q: &[f64], n: usize) -> (f64, f64, f64) {
    match NeckProfileParams::new(q.to_vec()).and_then(|p| neck_energies(&p, n)) {
        Ok((e1, e2)) if e1.is_finite() && e2.is_finite() => (e1, e2, e1.max(e2)),
        _ => (f64::INFINITY, f64::INFINITY, f64::INFINITY),
    }
}

/// Log-spaced sweep over the first `dim` control values.
pub fn sweep(n: usize, dim: usize, cfg: &SearchConfig) -> SweepRecord {
    let (lo, hi) = cfg.sweep_range;
    let p = cfg.sweep_points;
    let axis: Vec<f64> = (0..p)
        .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (p - 1) as f64).exp())
        .collect();
    let total = p.pow(dim as u32);
    let cells = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut q = vec![0.0; dim];
            for k in (0..dim).rev() {
                q[k] = axis[idx % p];
                idx /= p;
            }
            let (e1, e2, objective) = energies_or_inf(&q, n);
            SweepCell { q, e1, e2, objective }
        })
        .collect();
    SweepRecord { dim, cells }
}

/// Nelder-Mead on `θ = ln q` with restarts from the best vertex. Infeasible points
/// evaluate to `+∞` and are never accepted.
fn simplex_descent<F: Fn(&[f64]) -> f64>(obj: F, x0: &[f64], budget: usize, tol: f64) -> (Vec<f64>, f64, usize) {
    let d = x0.len();
    let mut evals = 0;
    let eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        obj(x)
    };
    let mut best_x = x0.to_vec();
    let mut best_f = eval(x0, &mut evals);
    let mut step = 0.25;
    while evals < budget {
        let mut pts: Vec<(Vec<f64>, f64)> = vec![(best_x.clone(), best_f)];
        for i in 0..d {
            if evals >= budget {
                break;
            }
            let mut x = best_x.clone();
            x[i] += step;
            let fx = eval(&x, &mut evals);
            pts.push((x, fx));
        }
        if pts.len() < d + 1 {
            break;
        }
        let start = best_f;
        while evals < budget {
            pts.sort_by(|a, b| a.1.total_cmp(&b.1));
            let (fl, fh) = (pts[0].1, pts[d].1);
            let size = pts[1..]
                .iter()
                .map(|p| p.0.iter().zip(&pts[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if (fh - fl).abs() <= tol * (fl.abs() + tol) || size < 1e-9 {
                break;
            }
            let mut c = vec![0.0; d];
            for p in &pts[..d] {
                for (ci, xi) in c.iter_mut().zip(&p.0) {
                    *ci += xi / d as f64;
                }
            }
            let along = |t: f64| -> Vec<f64> {
                c.iter().zip(&pts[d].0).map(|(ci, hi)| ci + t * (hi - ci)).collect()
            };
            let xr = along(-1.0);
            let fr = eval(&xr, &mut evals);
            if fr < pts[0].1 {
                let xe = along(-2.0);
                let fe = eval(&xe, &mut evals);
                pts[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < pts[d - 1].1 {
                pts[d] = (xr, fr);
            } else {
                let (xc, fc) = if fr < pts[d].1 {
                    let x = along(-0.5);
                    let f = eval(&x, &mut evals);
                    (x, f)
                } else {
                    let x = along(0.5);
                    let f = eval(&x, &mut evals);
                    (x, f)
                };
                if fc < pts[d].1.min(fr) {
                    pts[d] = (xc, fc);
                } else {
                    let x0 = pts[0].0.clone();
                    for p in pts.iter_mut().skip(1) {
                        if evals >= budget {
                            break;
                        }
                        let x: Vec<f64> = x0.iter().zip(&p.0).map(|(a, b)| a + 0.5 * (b - a)).collect();
                        let f = eval(&x, &mut evals);
                        *p = (x, f);
                    }
                }
            }
        }
        pts.sort_by(|a, b| a.1.total_cmp(&b.1));
        if pts[0].1 < best_f {
            best_x = pts[0].0.clone();
            best_f = pts[0].1;
        }
        // Restart from the best vertex; stop once a restart no longer improves.
        if !(best_f < start - tol * (start.abs() + tol)) {
            if step < 1e-3 {
                break;
            }
            step *= 0.25;
        }
    }
    (best_x, best_f, evals)
}

fn descend_stage(
    n: usize,
    dim: usize,
    carried: Option<&[f64]>,
    cfg: &SearchConfig,
) -> (StageResult, Option<Vec<f64>>) {
    let (lo, hi) = cfg.sweep_range;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(dim as u64);
    let mut starts: Vec<Vec<f64>> = Vec::new();
    if let Some(q) = carried {
        starts.push(q.iter().map(|x| x.ln()).collect());
    }
    while starts.len() < cfg.starts {
        starts.push((0..dim).map(|_| rng.gen_range(lo.ln()..hi.ln())).collect());
    }
    let obj = |theta: &[f64]| {
        let q: Vec<f64> = theta.iter().map(|t| t.exp()).collect();
        energies_or_inf(&q, n).2
    };
    let runs: Vec<(Vec<f64>, f64, usize)> = starts
        .par_iter()
        .map(|x0| simplex_descent(obj, x0, cfg.budget, cfg.tol))
        .collect();
    let evaluations = runs.iter().map(|r| r.2).sum();
    let start_values: Vec<f64> = runs.iter().map(|r| r.1).collect();
    let best = runs
        .iter()
        .filter(|r| r.1.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1));
    let stage = StageResult {
        dim,
        best: best.map_or(f64::INFINITY, |r| r.1),
        start_values,
        evaluations,
    };
    (stage, best.map(|r| r.0.iter().map(|t| t.exp()).collect()))
}

/// Estimates `C(n)` as the smallest `max(E1, E2)` over the neck family.
///
/// The sweep covers a nested sub-basis; the descent then climbs a ladder of basis
/// dimensions, each level seeded with the best point so far plus random starts
/// from a per-level ChaCha stream. Every level contains the previous one exactly,
/// so the estimate never increases with the basis dimension, and never exceeds the
/// sweep minimum. Deterministic for a fixed config.
pub fn estimate_cn(n: usize, cfg: &SearchConfig) -> Result<(C1Estimate, SweepRecord)> {
    if n < 2 {
        return Err(Error::Dimension(n, "the neck search needs n >= 2"));
    }
    cfg.validate()?;
    let sw = sweep(n, cfg.sweep_dim(), cfg);
    let mut evaluations = sw.cells.len();
    let sweep_best = sw.best().map(|c| (c.q.clone(), c.objective));
    let sweep_min = sweep_best.as_ref().map_or(f64::INFINITY, |b| b.1);
    let mut best: Option<(Vec<f64>, f64)> = sweep_best;
    let mut stages = Vec::new();
    if cfg.budget > 0 {
        for dim in cfg.ladder() {
            let carried = best.as_ref().map(|(q, _)| {
                NeckProfileParams { q: q.clone() }.embed(dim).q
            });
            let (stage, found) = descend_stage(n, dim, carried.as_deref(), cfg);
            evaluations += stage.evaluations;
            if let Some(q) = found {
                if best.as_ref().map_or(true, |b| stage.best < b.1) {
                    best = Some((q, stage.best));
                }
            }
            stages.push(stage);
        }
    }
    let (q, estimate) = best.ok_or_else(|| Error::Search("every sweep cell and start was infeasible".into()))?;
    let mut best = NeckProfileParams::new(q)?;
    if best.dim() != cfg.basis_dim {
        best = best.embed(cfg.basis_dim);
    }
    let (e1, e2) = neck_energies(&best, n)?;
    let fine = UnitProfile::sample(&best, 1.0, 2 * EVAL_POINTS - 1)?.energies(n);
    let margin = estimate - (fine.0.max(fine.1) - estimate).abs();
    let descent_min = stages.last().map(|s| s.best);
    Ok((
        C1Estimate {
            n,
            estimate,
            best,
            e1,
            e2,
            sweep_min,
            descent_min,
            margin,
            stages,
            evaluations,
        },
        sw,
    ))
}

/// The witness `f(r) = R g(r/R)` continued by a blend of length `transition` and a
/// flat tail, on a uniform grid reaching `s_max`.
pub fn witness_profile(
    best: &NeckProfileParams,
    n: usize,
    radius: f64,
    transition: f64,
    grid: &GridSpec,
) -> Result<RadialProfile> {
    make_profile(
        &Family::Neck {
            q: best.q.clone(),
            radius,
            transition,
        },
        n,
        grid,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_nests() {
        let cfg = |k| SearchConfig {
            basis_dim: k,
            ..SearchConfig::default()
        };
        assert_eq!(cfg(6).ladder(), vec![3, 6]);
        assert_eq!(cfg(5).ladder(), vec![1, 5]);
        assert_eq!(cfg(12).ladder(), vec![3, 6, 12]);
        assert_eq!(cfg(2).ladder(), vec![2]);
        for k in 1..20 {
            let l = cfg(k).ladder();
            assert_eq!(*l.last().unwrap(), k);
            assert!(l.windows(2).all(|w| w[1] % w[0] == 0));
        }
    }

    #[test]
    fn simplex_finds_quadratic_minimum() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2) + 0.25;
        let (x, v, _) = simplex_descent(f, &[0.0, 0.0], 2000, 1e-14);
        assert!((v - 0.25).abs() < 1e-9);
        assert!((x[0] - 1.0).abs() < 1e-4 && (x[1] + 0.5).abs() < 1e-4);
    }
}
