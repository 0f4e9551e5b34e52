//! Batch scenario runner behind the `ricci-af` binary.
//!
//! Every invocation reads one TOML scenario, optionally overridden by flags, and
//! writes its artifacts atomically under the output directory. Exit codes:
//! 0 success or certificate pass, 1 usage or configuration error, 2 blowup,
//! 3 stability abort, 4 certificate fail.

use crate::c1_search::{estimate_cn, lower_bound_witness, witness_profile, SearchConfig};
use crate::flow::{calibrate_eps, run_flow, write_run_record, FlowConfig, FlowMonitor, RunStatus, WeightedSobolevMonitor};
use crate::functionals::{
    decay_report, evolution_budget, l_n2, monotone_column, mu_from_mu_star, pinching_ratio, sobolev_estimate,
    BatterySpec, MonotoneReport, DecayReport, BudgetRow,
};
use crate::geometry::{make_profile, profile_to_json, read_profile, write_atomic, Family, GridSpec, RadialProfile};
use crate::{Error, Result};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

/// Environment variable read when `--threads` is absent.
pub const THREADS_ENV: &str = "RICCI_AF_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Ok = 0,
    Usage = 1,
    Blowup = 2,
    StabilityAbort = 3,
    CertifyFail = 4,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Parser)]
#[command(name = "ricci-af", version, about = "Ricci flow of rotationally symmetric asymptotically flat metrics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct CommonArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides every seed in the scenario.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; overrides `[output] dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; falls back to RICCI_AF_THREADS, then to all cores.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the flow and write snapshots, diagnostics and a summary.
    Simulate(CommonArgs),
    /// Evaluate the pinching hypothesis of a profile against a threshold.
    Certify {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Search for the smallest curvature energy of a neck.
    C1Search(CommonArgs),
    /// List the profile families.
    Families,
}

/// Where the profile comes from: a family on a grid, or a profile file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSource {
    pub n: Option<usize>,
    pub family: Option<Family>,
    pub grid: Option<GridSpec>,
    pub file: Option<PathBuf>,
}

impl ProfileSource {
    /// Builds the profile; relative file paths resolve against `base`.
    pub fn load(&self, base: &Path) -> Result<RadialProfile> {
        match (&self.family, &self.file) {
            (Some(fam), None) => {
                let n = self
                    .n
                    .ok_or_else(|| Error::InvalidParameter("profile.n is required with profile.family".into()))?;
                let grid = self
                    .grid
                    .clone()
                    .ok_or_else(|| Error::InvalidParameter("profile.grid is required with profile.family".into()))?;
                make_profile(fam, n, &grid)
            }
            (None, Some(file)) => {
                let p = read_profile(&base.join(file))?;
                if let Some(n) = self.n {
                    if n != p.n() {
                        return Err(Error::InvalidParameter(format!(
                            "profile.n = {n} but the file has n = {}",
                            p.n()
                        )));
                    }
                }
                Ok(p)
            }
            _ => Err(Error::InvalidParameter(
                "profile needs exactly one of `family` or `file`".into(),
            )),
        }
    }
}

/// Extra run-time monitors for `simulate`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MonitorSet {
    /// Battery maximum of the weighted Sobolev ratio at every sample.
    pub weighted_sobolev: bool,
    /// Exponent of the evolution budget over the snapshots; disabled when absent.
    pub budget_alpha: Option<f64>,
    /// Turns the heat companion on at the level where the `K_ε` norm exceeds the
    /// `|Rm|` norm by this fraction at `t = 0`. An explicit `flow.eps` wins.
    pub heat_excess: Option<f64>,
    /// Relative quadrature slack of the monotonicity checks.
    pub monotone_tol: f64,
}

impl Default for MonitorSet {
    fn default() -> Self {
        MonitorSet {
            weighted_sobolev: false,
            budget_alpha: None,
            heat_excess: None,
            monotone_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertifyConfig {
    pub threshold: f64,
    pub battery: BatterySpec,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            threshold: 0.1,
            battery: BatterySpec::default(),
        }
    }
}

/// Grid and blend used when exporting the best neck as a full profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WitnessExport {
    pub radius: f64,
    pub transition: f64,
    pub s_max: f64,
    pub m: usize,
}

impl Default for WitnessExport {
    fn default() -> Self {
        WitnessExport {
            radius: 1.0,
            transition: 1.0,
            s_max: 8.0,
            m: 800,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct C1Block {
    pub n: usize,
    #[serde(default)]
    pub config: SearchConfig,
    #[serde(default)]
    pub export: WitnessExport,
}

impl Default for C1Block {
    fn default() -> Self {
        C1Block {
            n: 3,
            config: SearchConfig::default(),
            export: WitnessExport::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

/// One scenario file. Blocks irrelevant to the invoked command are ignored.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: Option<u64>,
    pub profile: Option<ProfileSource>,
    #[serde(default)]
    pub flow: FlowConfig,
    #[serde(default)]
    pub monitors: MonitorSet,
    #[serde(default)]
    pub certify: CertifyConfig,
    #[serde(default)]
    pub c1_search: C1Block,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ScenarioConfig {
    /// Parses TOML; unknown keys and type errors report their line and column.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Pushes a seed into every seeded component.
    pub fn apply_seed(&mut self, seed: u64) {
        self.seed = Some(seed);
        self.c1_search.config.seed = seed;
        if let Some(e) = self.flow.diagnostics.entropy.as_mut() {
            e.optimizer.seed = seed;
        }
    }

    fn profile(&self, base: &Path) -> Result<RadialProfile> {
        self.profile
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("scenario has no [profile] block".into()))?
            .load(base)
    }
}

#[derive(Debug, Serialize)]
struct SimulateSummary<'a> {
    status: RunStatus,
    t_final: f64,
    steps: u64,
    /// Heat companion level actually used (zero when off).
    eps: f64,
    events: &'a [crate::flow::FlowEvent],
    #[serde(rename = "final")]
    final_row: Option<&'a crate::functionals::DiagnosticsRow>,
    monotone: MonotoneSummary,
    decay: DecayReport,
    weighted_sobolev: Option<Vec<(f64, f64)>>,
    budget: Option<Vec<BudgetRow>>,
}

#[derive(Debug, Serialize)]
struct MonotoneSummary {
    l_n2: MonotoneReport,
    l_q: MonotoneReport,
    keps_n2: MonotoneReport,
    /// Checked on `-μ`, with `μ = μ* - n - (n/2) log 4πτ` and `τ = horizon - t`:
    /// the entropy is expected not to decrease. Raw `μ*` is not monotone.
    mu: MonotoneReport,
}

fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s.into_bytes())
}

/// Runs the flow and writes `diagnostics.csv`, `snapshots/`, `manifest.json` and
/// `summary.json`.
pub fn cmd_simulate(cfg: &ScenarioConfig, base: &Path, out: &Path) -> Result<ExitStatus> {
    let p = cfg.profile(base)?;
    cfg.flow.validate()?;
    let mut flow = cfg.flow.clone();
    if let (Some(x), true) = (cfg.monitors.heat_excess, flow.eps == 0.0) {
        flow.eps = calibrate_eps(&p, x)?;
    }
    let mut ws = WeightedSobolevMonitor::default();
    let mut monitors: Vec<&mut dyn FlowMonitor> = Vec::new();
    if cfg.monitors.weighted_sobolev {
        monitors.push(&mut ws);
    }
    let rec = run_flow(&p, &flow, &mut monitors)?;
    std::fs::create_dir_all(out)?;
    write_run_record(out, &rec)?;
    let tol = cfg.monitors.monotone_tol;
    let monotone = MonotoneSummary {
        l_n2: monotone_column(&rec.rows, |r| Some(r.l_n2), tol),
        l_q: monotone_column(&rec.rows, |r| r.l_q, tol),
        keps_n2: monotone_column(&rec.rows, |r| r.keps_n2, tol),
        mu: match &cfg.flow.diagnostics.entropy {
            Some(e) => monotone_column(
                &rec.rows,
                |r| r.mu_star.map(|m| -mu_from_mu_star(p.n(), e.horizon - r.t, m)),
                tol,
            ),
            None => monotone_column(&rec.rows, |_| None, tol),
        },
    };
    let budget = match cfg.monitors.budget_alpha {
        Some(a) if rec.snapshots.len() >= 3 => Some(evolution_budget(&rec, a)?),
        _ => None,
    };
    let summary = SimulateSummary {
        status: rec.status,
        t_final: rec.t_final,
        steps: rec.steps,
        eps: flow.eps,
        events: &rec.events,
        final_row: rec.rows.last(),
        monotone,
        decay: decay_report(&rec),
        weighted_sobolev: cfg.monitors.weighted_sobolev.then(|| ws.series.clone()),
        budget,
    };
    write_atomic(&out.join("summary.json"), &json_bytes(&summary)?)?;
    Ok(match rec.status {
        RunStatus::Completed => ExitStatus::Ok,
        RunStatus::Blowup => ExitStatus::Blowup,
        RunStatus::StabilityAbort => ExitStatus::StabilityAbort,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub n: usize,
    pub family: String,
    pub sobolev_lower_bound: f64,
    pub euclidean_sobolev: f64,
    /// `(∫|Rm|^{n/2} dV)^{2/n}`.
    pub l_n2: f64,
    /// Pinching ratio from the battery lower bound on the Sobolev constant.
    pub chi: f64,
    pub threshold: f64,
    pub pass: bool,
    /// `"pass"` or `"fail"`.
    pub verdict: &'static str,
    pub one_sidedness_note: &'static str,
}

const ONE_SIDEDNESS_NOTE: &str = "sobolev_lower_bound is a battery supremum below the true \
Sobolev constant, so chi underestimates the true pinching ratio";

/// Evaluates `χ` and writes `certificate.json`; passes when `χ < threshold`.
pub fn cmd_certify(cfg: &ScenarioConfig, base: &Path, out: &Path, threshold: f64) -> Result<ExitStatus> {
    if !threshold.is_finite() {
        return Err(Error::InvalidParameter(format!("threshold must be finite, got {threshold}")));
    }
    let p = cfg.profile(base)?;
    let sob = sobolev_estimate(&p, &cfg.certify.battery)?;
    let l = l_n2(&p);
    let chi = pinching_ratio(&p, sob.lower_bound)?;
    let cert = Certificate {
        n: p.n(),
        family: p.family().to_string(),
        sobolev_lower_bound: sob.lower_bound,
        euclidean_sobolev: sob.euclidean,
        l_n2: l,
        chi,
        threshold,
        pass: chi < threshold,
        verdict: if chi < threshold { "pass" } else { "fail" },
        one_sidedness_note: ONE_SIDEDNESS_NOTE,
    };
    std::fs::create_dir_all(out)?;
    write_atomic(&out.join("certificate.json"), &json_bytes(&cert)?)?;
    Ok(if cert.pass { ExitStatus::Ok } else { ExitStatus::CertifyFail })
}

#[derive(Debug, Serialize)]
struct C1Summary<'a> {
    n: usize,
    estimate: f64,
    margin: f64,
    starts: usize,
    budget: usize,
    seed: u64,
    sweep_min: f64,
    descent_min: Option<f64>,
    e1: f64,
    e2: f64,
    best_q: &'a [f64],
    evaluations: usize,
    witness: crate::c1_search::WitnessReport,
}

/// Runs the search and writes `sweep.csv`, `witness_profile.json` and `summary.json`.
pub fn cmd_c1_search(cfg: &ScenarioConfig, out: &Path) -> Result<ExitStatus> {
    let block = &cfg.c1_search;
    let (est, sweep) = estimate_cn(block.n, &block.config)?;
    let witness = lower_bound_witness(&est.best, block.n, block.config.ceiling)?;
    let ex = &block.export;
    let profile = witness_profile(
        &est.best,
        block.n,
        ex.radius,
        ex.transition,
        &GridSpec::Uniform {
            s_max: ex.s_max,
            m: ex.m,
        },
    )?;
    std::fs::create_dir_all(out)?;
    write_atomic(&out.join("sweep.csv"), sweep.to_csv().as_bytes())?;
    write_atomic(&out.join("witness_profile.json"), profile_to_json(&profile).as_bytes())?;
    let summary = C1Summary {
        n: est.n,
        estimate: est.estimate,
        margin: est.margin,
        starts: block.config.starts,
        budget: block.config.budget,
        seed: block.config.seed,
        sweep_min: est.sweep_min,
        descent_min: est.descent_min,
        e1: est.e1,
        e2: est.e2,
        best_q: &est.best.q,
        evaluations: est.evaluations,
        witness,
    };
    write_atomic(&out.join("summary.json"), &json_bytes(&summary)?)?;
    Ok(ExitStatus::Ok)
}

/// Catalog listing, one `name: parameters` line per family.
pub fn families_text() -> String {
    Family::catalog()
        .iter()
        .map(|(name, doc)| format!("{name}: {doc}\n"))
        .collect()
}

fn configure_threads(flag: Option<usize>) -> Result<()> {
    let env = std::env::var(THREADS_ENV).ok();
    let threads = match (flag, env) {
        (Some(t), _) => Some(t),
        (None, Some(v)) => Some(v.trim().parse::<usize>().map_err(|_| {
            Error::InvalidParameter(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))
        })?),
        (None, None) => None,
    };
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::InvalidParameter("thread count must be positive".into()));
        }
        // A pool may already exist when the runner is driven in-process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    Ok(())
}

fn load_common(common: &CommonArgs, required: bool) -> Result<(ScenarioConfig, PathBuf, PathBuf)> {
    configure_threads(common.threads)?;
    let (mut cfg, base) = match &common.config {
        Some(path) => (
            ScenarioConfig::read(path)?,
            path.parent().map(Path::to_path_buf).unwrap_or_default(),
        ),
        None if required => {
            return Err(Error::InvalidParameter("--config is required for this command".into()))
        }
        None => (ScenarioConfig::default(), PathBuf::new()),
    };
    if let Some(seed) = common.seed.or(cfg.seed) {
        cfg.apply_seed(seed);
    }
    let out = common
        .out
        .clone()
        .or_else(|| cfg.output.dir.as_ref().map(|d| base.join(d)))
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok((cfg, base, out))
}

fn dispatch(cli: Cli) -> Result<ExitStatus> {
    match cli.command {
        Command::Simulate(common) => {
            let (cfg, base, out) = load_common(&common, true)?;
            cmd_simulate(&cfg, &base, &out)
        }
        Command::Certify { common, threshold } => {
            let (cfg, base, out) = load_common(&common, true)?;
            let t = threshold.unwrap_or(cfg.certify.threshold);
            cmd_certify(&cfg, &base, &out, t)
        }
        Command::C1Search(common) => {
            let (cfg, _, out) = load_common(&common, false)?;
            cmd_c1_search(&cfg, &out)
        }
        Command::Families => {
            print!("{}", families_text());
            Ok(ExitStatus::Ok)
        }
    }
}

/// Parses arguments, runs one command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { ExitStatus::Usage.code() } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(status) => status.code(),
        Err(e) => {
            eprintln!("error: {e}");
            ExitStatus::Usage.code()
        }
    }
}
