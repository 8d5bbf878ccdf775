//! JSON-configured experiments and their CSV/JSON output.
//!
//! One config describes one scenario; a non-empty `sweep` turns it into a
//! family of runs that differ only in the initial-data scale, each written to
//! its own subdirectory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::checkpoint::{read_checkpoint, write_checkpoint};
use crate::diagnostics::{
    balakrishnan_apply_check, beta_test_integral, build_morawetz_weight, commutator_decay_scan,
    dispersive_decay_fit, morawetz_time_average, plancherel_identity_check, virial_consistency,
    DiagnosticRecord, LambdaQuadrature,
};
use crate::dynamics::{
    evolve_with, wave_operator_residual, wrap_horizon, Evolution, EvolveConfig, Monitors,
    RunStatus, TimeSeries,
};
use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::Grid;
use crate::ground_state::{
    petviashvili_solve, pohozaev_soliton_check, GroundStateReport, GroundStateSummary,
    PetviashviliOptions,
};
use crate::params::{PhysParams, Sign};
use crate::threshold::{classify_initial_data, Classification, ThresholdReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_DIAGNOSTIC: i32 = 2;
pub const EXIT_BLOWUP: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    GroundState,
    Dichotomy,
    VirialCheck,
    BalakrishnanCheck,
    Morawetz,
    Dispersive,
    Defocusing,
    Soliton,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub d: usize,
    pub n: usize,
    pub l: f64,
}

impl GridSpec {
    pub fn build(&self) -> Result<Arc<Grid>> {
        Grid::new(self.d, self.n, self.l)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialData {
    Gaussian {
        amplitude: f64,
        width: f64,
    },
    /// `c · Q` with `Q` solved on the evolution grid.
    ScaledGroundState {
        c: f64,
    },
    /// `amplitude · exp(i k·x)`, `k = (π/l)·modes`.
    PlaneWave {
        amplitude: f64,
        modes: Vec<isize>,
    },
    Checkpoint {
        path: PathBuf,
    },
    /// Seeded random smooth bump, see [`ComplexField::random_bump`].
    RandomBump {
        amplitude: f64,
        width: f64,
        k_max: f64,
    },
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData::Gaussian {
            amplitude: 1.0,
            width: 1.0,
        }
    }
}

impl InitialData {
    fn needs_ground_state(&self) -> bool {
        matches!(self, InitialData::ScaledGroundState { .. })
    }

    /// Copy with the overall scale replaced by `value`.
    fn with_scale(&self, value: f64) -> Result<Self> {
        let mut out = self.clone();
        match &mut out {
            InitialData::Gaussian { amplitude, .. }
            | InitialData::PlaneWave { amplitude, .. }
            | InitialData::RandomBump { amplitude, .. } => *amplitude = value,
            InitialData::ScaledGroundState { c } => *c = value,
            InitialData::Checkpoint { .. } => {
                return Err(Error::Config(
                    "a sweep cannot rescale checkpoint initial data".into(),
                ))
            }
        }
        Ok(out)
    }

    fn scale(&self) -> Option<f64> {
        match self {
            InitialData::Gaussian { amplitude, .. }
            | InitialData::PlaneWave { amplitude, .. }
            | InitialData::RandomBump { amplitude, .. } => Some(*amplitude),
            InitialData::ScaledGroundState { c } => Some(*c),
            InitialData::Checkpoint { .. } => None,
        }
    }

    pub fn resolve(
        &self,
        grid: &Arc<Grid>,
        ground_state: Option<&GroundStateReport>,
        seed: u64,
    ) -> Result<ComplexField> {
        let u = match self {
            InitialData::Gaussian { amplitude, width } => {
                ComplexField::gaussian(grid, *amplitude, *width)
            }
            InitialData::ScaledGroundState { c } => {
                let gs = ground_state.ok_or_else(|| {
                    Error::Config("scaled-ground-state needs a ground state".into())
                })?;
                if gs.q.grid().as_ref() != grid.as_ref() {
                    return Err(Error::Config(
                        "scaled-ground-state needs the ground state solved on the evolution grid"
                            .into(),
                    ));
                }
                gs.q.scaled(*c)
            }
            InitialData::PlaneWave { amplitude, modes } => {
                ComplexField::plane_wave(grid, *amplitude, modes)?
            }
            InitialData::Checkpoint { path } => {
                let (u, _) = read_checkpoint(path)?;
                if u.grid().as_ref() != grid.as_ref() {
                    return Err(Error::Config(format!(
                        "checkpoint {} was written on a different grid",
                        path.display()
                    )));
                }
                u
            }
            InitialData::RandomBump {
                amplitude,
                width,
                k_max,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                ComplexField::random_bump(grid, *amplitude, *width, *k_max, &mut rng)
            }
        };
        u.ensure_finite()?;
        Ok(u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroundStateSpec {
    /// Grid for the solve when it differs from the evolution grid (threshold
    /// scalars only).
    pub grid: Option<GridSpec>,
    pub tol: f64,
    pub max_iter: usize,
    pub symmetrize: Option<bool>,
    pub guess_amplitude: f64,
    pub guess_width: f64,
}

impl Default for GroundStateSpec {
    fn default() -> Self {
        let opts = PetviashviliOptions::default();
        GroundStateSpec {
            grid: None,
            tol: opts.tol,
            max_iter: opts.max_iter,
            symmetrize: opts.symmetrize,
            guess_amplitude: 2.0,
            guess_width: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub virial: f64,
    pub identity: f64,
    pub quadrature: f64,
    pub energy_identity: f64,
    pub soliton_identity: f64,
    /// Required relative loss of mass in the concentration ball before `t_wrap`.
    pub concentration_drop: f64,
    pub soliton_concentration: f64,
    pub soliton_hs: f64,
    pub energy_drift: f64,
    /// Relative error allowed on the fitted decay exponent.
    pub decay: f64,
    /// Fitted commutator slope must be at most `-2s + commutator_margin`.
    pub commutator_margin: f64,
    pub hessian: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            virial: 1e-2,
            identity: 1e-6,
            quadrature: 1e-8,
            energy_identity: 1e-4,
            soliton_identity: 1e-2,
            concentration_drop: 0.5,
            soliton_concentration: 1e-2,
            soliton_hs: 1e-3,
            energy_drift: 1e-6,
            decay: 0.1,
            commutator_margin: 0.3,
            hessian: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Checks {
    /// Ball radius for mass concentration; `l/4` when absent.
    pub concentration_radius: Option<f64>,
    /// `R` of the localized potential `∫_{|x| ≤ R/2} |u|^{p+1}`; `l/4` when absent.
    pub potential_radius: Option<f64>,
    /// Radius of the Morawetz weight; `l/4` when absent.
    pub morawetz_radius: Option<f64>,
    pub blend: f64,
    pub quad_nodes: usize,
    /// Records between evaluations of the quadrature virial right-hand side.
    pub virial_every: usize,
    pub signs: Vec<Sign>,
    pub commutator_radii: Vec<f64>,
    /// Lebesgue exponent of the decay fit; `None` is `L^∞`.
    pub decay_r: Option<f64>,
    pub decay_t_min: f64,
    pub decay_samples: usize,
    pub tolerances: Tolerances,
}

impl Default for Checks {
    fn default() -> Self {
        Checks {
            concentration_radius: None,
            potential_radius: None,
            morawetz_radius: None,
            blend: 0.3,
            quad_nodes: 96,
            virial_every: 10,
            signs: vec![Sign::Focusing, Sign::Defocusing],
            commutator_radii: Vec::new(),
            decay_r: None,
            decay_t_min: 1.0,
            decay_samples: 12,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub kind: ScenarioKind,
    pub params: PhysParams,
    pub grid: GridSpec,
    #[serde(default)]
    pub evolve: EvolveConfig,
    #[serde(default)]
    pub initial: InitialData,
    #[serde(default)]
    pub ground_state: GroundStateSpec,
    #[serde(default)]
    pub checks: Checks,
    /// Records between checkpoints; 0 writes only the final state.
    #[serde(default)]
    pub checkpoint_stride: usize,
    #[serde(default)]
    pub seed: u64,
    /// Values replacing the initial-data scale (`c` or `amplitude`), one run each.
    #[serde(default)]
    pub sweep: Vec<f64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |e: Error| Error::Config(e.to_string());
        self.params.validate().map_err(bad)?;
        self.grid.build().map_err(bad)?;
        if let Some(g) = &self.ground_state.grid {
            g.build().map_err(bad)?;
            if g.d != self.grid.d {
                return Err(Error::Config(
                    "ground-state grid must share the evolution dimension".into(),
                ));
            }
        }
        if self.uses_evolution() {
            self.evolve.validate().map_err(bad)?;
        }
        let focusing_only = matches!(
            self.kind,
            ScenarioKind::GroundState | ScenarioKind::Soliton | ScenarioKind::Dichotomy
        ) || self.initial.needs_ground_state();
        if focusing_only && self.params.sign != Sign::Focusing {
            return Err(Error::Config(format!(
                "{:?} needs focusing params",
                self.kind
            )));
        }
        if self.initial.needs_ground_state()
            && self.ground_state.grid.is_some_and(|g| g != self.grid)
        {
            return Err(Error::Config(
                "scaled-ground-state data needs the ground state on the evolution grid".into(),
            ));
        }
        if self.kind == ScenarioKind::Soliton
            && self.ground_state.grid.is_some_and(|g| g != self.grid)
        {
            return Err(Error::Config(
                "soliton runs need the ground state on the evolution grid".into(),
            ));
        }
        if self.checks.quad_nodes < 8 {
            return Err(Error::Config("checks.quad_nodes must be at least 8".into()));
        }
        if self.checks.virial_every == 0 {
            return Err(Error::Config(
                "checks.virial_every must be at least 1".into(),
            ));
        }
        if self.kind == ScenarioKind::BalakrishnanCheck && self.params.s >= 1.0 {
            return Err(Error::Config("balakrishnan-check needs s < 1".into()));
        }
        if !self.sweep.is_empty() {
            self.initial.with_scale(1.0)?;
        }
        Ok(())
    }

    fn uses_evolution(&self) -> bool {
        matches!(
            self.kind,
            ScenarioKind::Dichotomy
                | ScenarioKind::VirialCheck
                | ScenarioKind::Morawetz
                | ScenarioKind::Defocusing
                | ScenarioKind::Soliton
        )
    }

    fn needs_ground_state(&self) -> bool {
        matches!(
            self.kind,
            ScenarioKind::GroundState | ScenarioKind::Soliton | ScenarioKind::Dichotomy
        ) || self.initial.needs_ground_state()
            || (self.ground_state.grid.is_some() && self.params.sign == Sign::Focusing)
    }

    fn radius_or_quarter(&self, r: Option<f64>) -> f64 {
        r.unwrap_or(self.grid.l / 4.0)
    }
}

/// Process-level options layered over the config.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Overrides `config.out`; falls back to `./out`.
    pub out: Option<PathBuf>,
    /// Overrides `config.seed`.
    pub seed: Option<u64>,
    /// Worker threads for sweeps.
    pub jobs: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            out: None,
            seed: None,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub name: String,
    pub kind: ScenarioKind,
    pub exit_code: i32,
    pub out_dir: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<RunStatus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_wrap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_state: Option<GroundStateSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdReport>,
    pub diagnostics: Vec<DiagnosticRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub runs: Vec<RunReport>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.diagnostics.iter().all(|r| r.pass) && self.runs.iter().all(RunReport::passed)
    }

    pub fn find(&self, name: &str) -> Option<&DiagnosticRecord> {
        self.diagnostics.iter().find(|r| r.name == name)
    }
}

/// Exit code of a single run: blow-up wins over diagnostic failure.
fn single_exit_code(status: Option<&RunStatus>, records: &[DiagnosticRecord]) -> i32 {
    if status.is_some_and(RunStatus::is_blowup) {
        EXIT_BLOWUP
    } else if records.iter().any(|r| !r.pass) {
        EXIT_DIAGNOSTIC
    } else {
        EXIT_PASS
    }
}

/// Exit code of a sweep: any diagnostic failure, then any blow-up.
fn sweep_exit_code(runs: &[RunReport]) -> i32 {
    if runs.iter().any(|r| r.exit_code == EXIT_DIAGNOSTIC) {
        EXIT_DIAGNOSTIC
    } else if runs.iter().any(|r| r.exit_code == EXIT_BLOWUP) {
        EXIT_BLOWUP
    } else {
        EXIT_PASS
    }
}

/// Run a scenario (or sweep) and write its outputs. `Err` maps to exit code 1.
pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunReport> {
    cfg.validate()?;
    let out = opts
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let seed = opts.seed.unwrap_or(cfg.seed);
    create_dir(&out)?;
    let name = cfg
        .name
        .clone()
        .unwrap_or_else(|| kind_label(cfg.kind).to_string());

    let gs = if cfg.needs_ground_state() {
        Some(solve_ground_state(cfg)?)
    } else {
        None
    };
    if let Some(gs) = &gs {
        write_json(out.join("ground_state.json"), &gs.summary())?;
        write_checkpoint(&gs.q, out.join("ground_state.fnls"), 0.0, &cfg.params)?;
    }

    let report = if cfg.sweep.is_empty() {
        run_single(cfg, &name, &out, seed, gs.as_ref())?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        let runs = pool.install(|| {
            cfg.sweep
                .par_iter()
                .enumerate()
                .map(|(i, &value)| {
                    let mut sub = cfg.clone();
                    sub.initial = cfg.initial.with_scale(value)?;
                    sub.sweep.clear();
                    let dir = out.join(format!("run_{i:02}_{value}"));
                    create_dir(&dir)?;
                    run_single(&sub, &format!("{name}[{value}]"), &dir, seed, gs.as_ref())
                })
                .collect::<Result<Vec<RunReport>>>()
        })?;
        RunReport {
            name,
            kind: cfg.kind,
            exit_code: sweep_exit_code(&runs),
            out_dir: out.clone(),
            scale: None,
            status: None,
            t_wrap: None,
            ground_state: gs.as_ref().map(GroundStateReport::summary),
            threshold: None,
            diagnostics: Vec::new(),
            runs,
        }
    };
    write_json(out.join("report.json"), &report)?;
    Ok(report)
}

fn kind_label(kind: ScenarioKind) -> &'static str {
    match kind {
        ScenarioKind::GroundState => "ground-state",
        ScenarioKind::Dichotomy => "dichotomy",
        ScenarioKind::VirialCheck => "virial-check",
        ScenarioKind::BalakrishnanCheck => "balakrishnan-check",
        ScenarioKind::Morawetz => "morawetz",
        ScenarioKind::Dispersive => "dispersive",
        ScenarioKind::Defocusing => "defocusing",
        ScenarioKind::Soliton => "soliton",
    }
}

fn solve_ground_state(cfg: &ScenarioConfig) -> Result<GroundStateReport> {
    let spec = &cfg.ground_state;
    let grid = spec.grid.unwrap_or(cfg.grid).build()?;
    let guess = ComplexField::gaussian(&grid, spec.guess_amplitude, spec.guess_width);
    let opts = PetviashviliOptions {
        tol: spec.tol,
        max_iter: spec.max_iter,
        symmetrize: spec.symmetrize,
    };
    petviashvili_solve(&cfg.params.with_sign(Sign::Focusing), &guess, &opts)
}

/// Everything a kind-specific pipeline hands back.
#[derive(Default)]
struct Outcome {
    records: Vec<DiagnosticRecord>,
    evolution: Option<Evolution>,
    threshold: Option<ThresholdReport>,
}

fn run_single(
    cfg: &ScenarioConfig,
    name: &str,
    out: &Path,
    seed: u64,
    gs: Option<&GroundStateReport>,
) -> Result<RunReport> {
    let grid = cfg.grid.build()?;
    let u0 = if cfg.kind == ScenarioKind::Soliton {
        gs.map(|g| g.q.clone())
            .ok_or_else(|| Error::Config("soliton needs a ground state".into()))?
    } else if cfg.kind == ScenarioKind::GroundState {
        ComplexField::zeros(&grid)
    } else {
        cfg.initial.resolve(&grid, gs, seed)?
    };
    let threshold = match gs {
        Some(g)
            if cfg.params.critical_index(grid.dim()) > 0.0
                && cfg.kind != ScenarioKind::GroundState =>
        {
            Some(classify_initial_data(&u0, g, &cfg.params)?)
        }
        _ => None,
    };

    let mut outcome = match cfg.kind {
        ScenarioKind::GroundState => ground_state_checks(cfg, gs.expect("solved above"))?,
        ScenarioKind::Soliton => soliton_run(cfg, &u0, gs.expect("solved above"), out)?,
        ScenarioKind::Dichotomy => {
            dichotomy_run(cfg, &u0, gs.expect("solved above"), threshold.as_ref(), out)?
        }
        ScenarioKind::VirialCheck => virial_run(cfg, &u0, threshold.as_ref(), out)?,
        ScenarioKind::BalakrishnanCheck => identity_checks(cfg, &u0, out)?,
        ScenarioKind::Morawetz => morawetz_run(cfg, &u0, gs, threshold.as_ref(), out)?,
        ScenarioKind::Dispersive => dispersive_run(cfg, &u0, out)?,
        ScenarioKind::Defocusing => defocusing_run(cfg, &u0, out)?,
    };
    outcome.threshold = outcome.threshold.or(threshold);

    let status = outcome.evolution.as_ref().map(|e| e.status);
    if let Some(evo) = &outcome.evolution {
        emit_series(
            &evo.series,
            out.join("series.csv"),
            out.join("summary.json"),
            &outcome.records,
        )?;
        write_checkpoint(
            &evo.final_state,
            out.join("final.fnls"),
            evo.t_final,
            &cfg.params,
        )?;
    }
    write_json(out.join("diagnostics.json"), &outcome.records)?;
    Ok(RunReport {
        name: name.to_string(),
        kind: cfg.kind,
        exit_code: single_exit_code(status.as_ref(), &outcome.records),
        out_dir: out.to_path_buf(),
        scale: cfg.initial.scale(),
        status,
        t_wrap: outcome.evolution.as_ref().map(|e| e.t_wrap),
        ground_state: gs.map(GroundStateReport::summary),
        threshold: outcome.threshold,
        diagnostics: outcome.records,
        runs: Vec::new(),
    })
}

/// Evolve with periodic checkpoints under `out/checkpoints`.
fn run_evolution(
    cfg: &ScenarioConfig,
    u0: &ComplexField,
    params: &PhysParams,
    monitors: &Monitors<'_>,
    out: &Path,
) -> Result<Evolution> {
    let stride = cfg.checkpoint_stride;
    let dir = out.join("checkpoints");
    if stride > 0 {
        create_dir(&dir)?;
    }
    let mut record = 0usize;
    let mut failure = None;
    let evo = evolve_with(u0, &cfg.evolve, params, monitors, |t, state| {
        if stride > 0 && record.is_multiple_of(stride) && failure.is_none() {
            if let Err(e) =
                write_checkpoint(state, dir.join(format!("ckpt_{record:06}.fnls")), t, params)
            {
                failure = Some(e);
            }
        }
        record += 1;
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(evo),
    }
}

fn ground_state_checks(cfg: &ScenarioConfig, gs: &GroundStateReport) -> Result<Outcome> {
    let tol = &cfg.checks.tolerances;
    let pot = gs.lp1.powf(cfg.params.p + 1.0);
    let identity = ((gs.hs * gs.hs + gs.mass - pot) / pot).abs();
    let grid = gs.q.grid();
    let half = 0.5 * grid.half_len();
    let interior_min =
        gs.q.values()
            .iter()
            .zip(grid.radii())
            .filter(|(_, r)| *r < half)
            .map(|(v, _)| v.re)
            .fold(f64::INFINITY, f64::min);
    let mut records = vec![
        DiagnosticRecord::at_most(
            "elliptic-residual",
            "ground-state-equation",
            gs.residual,
            cfg.ground_state.tol,
        ),
        DiagnosticRecord::at_most(
            "energy-identity",
            "ground-state-equation",
            identity,
            tol.energy_identity,
        ),
        DiagnosticRecord::verdict(
            "interior-positivity",
            "ground-state-equation",
            interior_min,
            -1e-10,
            interior_min >= -1e-10,
        ),
    ];
    if cfg.params.is_intercritical(grid.dim()) {
        let gap = pohozaev_soliton_check(gs, &cfg.params)?;
        records.push(DiagnosticRecord::at_most(
            "soliton-identity",
            "soliton-norm-identity",
            gap,
            tol.soliton_identity,
        ));
    }
    Ok(Outcome {
        records,
        ..Default::default()
    })
}

fn soliton_run(
    cfg: &ScenarioConfig,
    u0: &ComplexField,
    gs: &GroundStateReport,
    out: &Path,
) -> Result<Outcome> {
    let tol = &cfg.checks.tolerances;
    let radius = cfg.radius_or_quarter(cfg.checks.concentration_radius);
    let monitors = Monitors {
        concentration_radii: vec![radius],
        ground_state: Some(gs),
        ..Default::default()
    };
    let evo = run_evolution(cfg, u0, &cfg.params, &monitors, out)?;
    let s = &evo.series;
    let conc = &s.concentration[0];
    let records = vec![
        DiagnosticRecord::at_most(
            "concentration-variation",
            "soliton-non-scattering",
            max_rel_deviation(conc),
            tol.soliton_concentration,
        )
        .with_params(json!({ "R": radius })),
        DiagnosticRecord::at_most(
            "hs-variation",
            "soliton-non-scattering",
            max_rel_deviation(&s.hs_norm),
            tol.soliton_hs,
        ),
    ];
    Ok(Outcome {
        records,
        evolution: Some(evo),
        threshold: None,
    })
}

fn dichotomy_run(
    cfg: &ScenarioConfig,
    u0: &ComplexField,
    gs: &GroundStateReport,
    threshold: Option<&ThresholdReport>,
    out: &Path,
) -> Result<Outcome> {
    let tol = &cfg.checks.tolerances;
    let threshold = threshold.ok_or_else(|| Error::Config("dichotomy needs 0 < s_c".into()))?;
    let grid = u0.grid();
    let radius = cfg.radius_or_quarter(cfg.checks.concentration_radius);
    let horizon = wrap_horizon(grid, &cfg.params).min(cfg.evolve.t_end);
    let dyadic: Vec<f64> = (0..4).rev().map(|k| horizon / 2f64.powi(k)).collect();
    let monitors = Monitors {
        concentration_radii: vec![radius],
        potential_radii: vec![cfg.radius_or_quarter(cfg.checks.potential_radius)],
        ground_state: Some(gs),
        snapshot_times: dyadic,
        ..Default::default()
    };
    let evo = run_evolution(cfg, u0, &cfg.params, &monitors, out)?;
    let mut records = vec![DiagnosticRecord::verdict(
        "classification",
        "threshold-dichotomy",
        threshold.energy_ratio,
        1.0,
        true,
    )
    .with_params(json!({
        "classification": threshold.classification,
        "kinetic_ratio": threshold.kinetic_ratio,
    }))];
    match threshold.classification {
        Classification::ScatterCandidate => {
            let s = &evo.series;
            let y_max = s
                .y_coercivity
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            records.push(DiagnosticRecord::verdict(
                "coercivity-below-one",
                "threshold-dichotomy",
                y_max,
                1.0,
                y_max < 1.0,
            ));
            let drop = concentration_drop(s, evo.t_wrap);
            records.push(
                DiagnosticRecord::verdict(
                    "concentration-decay",
                    "mass-concentration-decay",
                    drop,
                    tol.concentration_drop,
                    drop >= tol.concentration_drop,
                )
                .with_params(json!({ "R": radius, "t_wrap": evo.t_wrap })),
            );
            let increments = dyadic_increments(&evo, &cfg.params)?;
            let decreasing = increments.len() >= 2 && increments.windows(2).all(|w| w[1] < w[0]);
            records.push(
                DiagnosticRecord::verdict(
                    "wave-operator-increments",
                    "wave-operator-limit",
                    increments.last().copied().unwrap_or(f64::NAN),
                    0.0,
                    decreasing,
                )
                .with_params(json!({ "increments": increments })),
            );
        }
        Classification::BlowupCandidate | Classification::NegativeEnergyBlowup => {
            let fired = evo.status.is_blowup();
            records.push(DiagnosticRecord::verdict(
                "blowup-sentinel",
                "blow-up-dynamics",
                evo.t_final,
                cfg.evolve.t_end,
                fired,
            ));
        }
        Classification::AboveThreshold => {}
    }
    Ok(Outcome {
        records,
        evolution: Some(evo),
        threshold: Some(*threshold),
    })
}

/// Interaction-picture increments over consecutive snapshot windows.
fn dyadic_increments(evo: &Evolution, params: &PhysParams) -> Result<Vec<f64>> {
    evo.snapshots
        .windows(2)
        .filter(|w| w[1].0 > w[0].0)
        .map(|w| wave_operator_residual(&w[0].1, &w[1].1, w[0].0, w[1].0, params))
        .collect()
}

/// `1 - C(t*)/C(0)` with `t*` the last record before `t_wrap`.
fn concentration_drop(series: &TimeSeries, t_wrap: f64) -> f64 {
    let conc = &series.concentration[0];
    let last = series.t.iter().rposition(|&t| t <= t_wrap).unwrap_or(0);
    if conc[0] == 0.0 {
        return 0.0;
    }
    1.0 - conc[last] / conc[0]
}

fn max_rel_deviation(xs: &[f64]) -> f64 {
    let x0 = xs[0];
    let scale = if x0 == 0.0 { 1.0 } else { x0.abs() };
    xs.iter()
        .map(|x| (x - x0).abs() / scale)
        .fold(0.0, f64::max)
}

fn virial_run(
    cfg: &ScenarioConfig,
    u0: &ComplexField,
    threshold: Option<&ThresholdReport>,
    out: &Path,
) -> Result<Outcome> {
    let tol = &cfg.checks.tolerances;
    let grid = u0.grid();
    let radius = cfg.radius_or_quarter(cfg.checks.morawetz_radius);
    let weight = build_morawetz_weight(grid, radius, cfg.checks.blend)?;
    let quad = if cfg.params.s < 1.0 {
        Some(LambdaQuadrature::for_grid(
            grid,
            cfg.params.s,
            cfg.checks.quad_nodes,
        )?)
    } else {
        None
    };
    let mut records = Vec::new();
    if let Some(th) = threshold {
        records.push(
            DiagnosticRecord::verdict(
                "below-threshold",
                "threshold-dichotomy",
                th.energy_ratio,
                1.0,
                th.classification == Classification::ScatterCandidate,
            )
            .with_params(json!({ "kinetic_ratio": th.kinetic_ratio })),
        );
    }
    for &sign in &cfg.checks.signs {
        let params = cfg.params.with_sign(sign);
        let vc = virial_consistency(
            u0,
            &params,
            &cfg.evolve,
            &weight,
            quad.as_ref(),
            cfg.checks.virial_every,
        )?;
        let label = sign_label(sign);
        let mut csv = String::from("t,finite_difference,rhs,direct\n");
        for i in 0..vc.t.len() {
            csv.push_str(&format!(
                "{:e},{:e},{:e},{:e}\n",
                vc.t[i], vc.finite_difference[i], vc.rhs[i], vc.direct[i]
            ));
        }
        write_text(out.join(format!("virial_{label}.csv")), &csv)?;
        let anchor = match sign {
            Sign::Focusing => "virial-identity",
            Sign::Defocusing => "defocusing-virial-identity",
        };
        records.push(
            DiagnosticRecord::at_most(format!("virial-{label}"), anchor, vc.rel_err, tol.virial)
                .with_params(json!({ "R": radius, "samples": vc.t.len(), "rel_err_direct": vc.rel_err_direct })),
        );
    }
    Ok(Outcome {
        records,
        ..Default::default()
    })
}

fn sign_label(sign: Sign) -> &'static str {
    match sign {
        Sign::Focusing => "focusing",
        Sign::Defocusing => "defocusing",
    }
}

fn identity_checks(cfg: &ScenarioConfig, u0: &ComplexField, out: &Path) -> Result<Outcome> {
    let tol = &cfg.checks.tolerances;
    let grid = u0.grid();
    let s = cfg.params.s;
    let quad = LambdaQuadrature::for_grid(grid, s, cfg.checks.quad_nodes)?;
    let mut scales: Vec<f64> = grid.k_sq().iter().copied().filter(|&k| k > 0.0).collect();
    scales.sort_by(|a, b| a.total_cmp(b));
    scales.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    let closed_form = scales
        .par_iter()
        .map(|&a| {
            let exact = beta_test_integral(s, a);
            ((quad.integrate(|l| (a + l).powi(-2)) - exact) / exact).abs()
        })
        .reduce(|| 0.0, f64::max);
    let nodes = json!({ "nodes": quad.count, "s": s });
    let mut records = vec![
        DiagnosticRecord::at_most(
            "quadrature-closed-form",
            "resolvent-quadrature",
            closed_form,
            tol.quadrature,
        )
        .with_params(json!({ "nodes": quad.count, "s": s, "scales": scales.len() })),
        DiagnosticRecord::at_most(
            "balakrishnan-apply",
            "resolvent-representation",
            balakrishnan_apply_check(u0, &cfg.params, &quad)?,
            tol.identity,
        )
        .with_params(nodes.clone()),
        DiagnosticRecord::at_most(
            "plancherel-identity",
            "plancherel-identity",
            plancherel_identity_check(u0, &cfg.params, &quad)?,
            tol.identity,
        )
        .with_params(nodes),
    ];
    if !cfg.checks.commutator_radii.is_empty() {
        let scan = commutator_decay_scan(u0, &cfg.params, &quad, &cfg.checks.commutator_radii)?;
        write_text(out.join("commutator.csv"), &scan.to_csv())?;
        let bound = -2.0 * s + tol.commutator_margin;
        records.push(
            DiagnosticRecord::verdict(
                "commutator-slope",
                "commutator-decay",
                scan.slope,
                bound,
                scan.slope <= bound,
            )
            .with_params(json!({ "radii": scan.radii })),
        );
    }
    Ok(Outcome {
        records,
        ..Default::default()
    })
}

fn morawetz_run(
    cfg: &ScenarioConfig,
    u0: &ComplexField,
    gs: Option<&GroundStateReport>,
    threshold: Option<&ThresholdReport>,
    out: &Path,
) -> Result<Outcome> {
    let tol = &cfg.checks.tolerances;
    let grid = u0.grid();
    let radius = cfg.radius_or_quarter(cfg.checks.morawetz_radius);
    let weight = build_morawetz_weight(grid, radius, cfg.checks.blend)?;
    let min_eig = weight.min_hessian_eigenvalue();
    let mut records = vec![DiagnosticRecord::verdict(
        "hessian-psd",
        "morawetz-weight-convexity",
        min_eig,
        -tol.hessian,
        min_eig >= -tol.hessian,
    )
    .with_params(json!({ "R": radius }))];
    if let Some(th) = threshold {
        records.push(DiagnosticRecord::verdict(
            "below-threshold",
            "threshold-dichotomy",
            th.energy_ratio,
            1.0,
            th.classification == Classification::ScatterCandidate
                || cfg.params.sign == Sign::Defocusing,
        ));
    }
    let monitors = Monitors {
        potential_radii: vec![radius],
        ground_state: gs.filter(|g| g.q.grid().as_ref() == grid.as_ref()),
        ..Default::default()
    };
    let evo = run_evolution(cfg, u0, &cfg.params, &monitors, out)?;
    let end = evo.t_final.min(evo.t_wrap);
    let windows: Vec<f64> = (0..4).rev().map(|k| end / 2f64.powi(k)).collect();
    let averages = windows
        .iter()
        .map(|&t| morawetz_time_average(&evo.series, radius, 0.0, t))
        .collect::<Result<Vec<f64>>>()?;
    let mut csv = String::from("T,average\n");
    for (t, a) in windows.iter().zip(&averages) {
        csv.push_str(&format!("{t:e},{a:e}\n"));
    }
    write_text(out.join("morawetz.csv"), &csv)?;
    let decreasing = averages.windows(2).all(|w| w[1] < w[0]);
    records.push(
        DiagnosticRecord::verdict(
            "morawetz-average-decreasing",
            "morawetz-estimate",
            averages.last().copied().unwrap_or(f64::NAN),
            averages[0],
            decreasing,
        )
        .with_params(json!({ "R": radius, "T": windows, "averages": averages })),
    );
    Ok(Outcome {
        records,
        evolution: Some(evo),
        threshold: None,
    })
}

fn dispersive_run(cfg: &ScenarioConfig, u0: &ComplexField, out: &Path) -> Result<Outcome> {
    let tol = &cfg.checks.tolerances;
    let grid = u0.grid();
    let t_wrap = wrap_horizon(grid, &cfg.params);
    let t_min = cfg.checks.decay_t_min;
    let samples = cfg.checks.decay_samples.max(3);
    if !(t_min > 0.0 && t_min < t_wrap) {
        return Err(Error::Config(format!(
            "decay_t_min {t_min} must lie in (0, t_wrap = {t_wrap})"
        )));
    }
    let times: Vec<f64> = (0..samples)
        .map(|i| t_min * (t_wrap / t_min).powf(i as f64 / samples as f64))
        .collect();
    let r = cfg.checks.decay_r.unwrap_or(f64::INFINITY);
    let fit = dispersive_decay_fit(u0, &cfg.params, r, &times)?;
    write_text(out.join("decay.csv"), &fit.to_csv())?;
    let expected = grid.dim() as f64 * (0.5 - 1.0 / r);
    let rel = ((fit.exponent - expected) / expected).abs();
    let records =
        vec![
            DiagnosticRecord::at_most("decay-exponent", "dispersive-estimate", rel, tol.decay)
                .with_params(
                    json!({ "exponent": fit.exponent, "expected": expected, "t_wrap": fit.t_wrap }),
                ),
        ];
    Ok(Outcome {
        records,
        ..Default::default()
    })
}

fn defocusing_run(cfg: &ScenarioConfig, u0: &ComplexField, out: &Path) -> Result<Outcome> {
    let tol = &cfg.checks.tolerances;
    let params = cfg.params.with_sign(Sign::Defocusing);
    let radius = cfg.radius_or_quarter(cfg.checks.concentration_radius);
    let monitors = Monitors {
        concentration_radii: vec![radius],
        ..Default::default()
    };
    let evo = run_evolution(cfg, u0, &params, &monitors, out)?;
    let drift = max_rel_deviation(&evo.series.energy);
    let drop = concentration_drop(&evo.series, evo.t_wrap);
    let records = vec![
        DiagnosticRecord::at_most(
            "energy-drift",
            "defocusing-scattering",
            drift,
            tol.energy_drift,
        ),
        DiagnosticRecord::verdict(
            "concentration-decay",
            "defocusing-scattering",
            drop,
            tol.concentration_drop,
            drop >= tol.concentration_drop,
        )
        .with_params(json!({ "R": radius, "t_wrap": evo.t_wrap })),
    ];
    Ok(Outcome {
        records,
        evolution: Some(evo),
        threshold: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub last: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub records: usize,
    pub columns: BTreeMap<String, ColumnSummary>,
    pub diagnostics: Vec<DiagnosticRecord>,
    pub pass: bool,
}

/// Write the time series as CSV and a JSON summary (last/min/max per column
/// plus the diagnostic records).
pub fn emit_series(
    series: &TimeSeries,
    csv_path: impl AsRef<Path>,
    json_path: impl AsRef<Path>,
    records: &[DiagnosticRecord],
) -> Result<SeriesSummary> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    series.write_csv(csv_path)?;
    let columns = series
        .columns()
        .into_iter()
        .map(|(name, values)| {
            let summary = ColumnSummary {
                last: *values.last().expect("non-empty"),
                min: values.iter().copied().fold(f64::INFINITY, f64::min),
                max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            };
            (name, summary)
        })
        .collect();
    let summary = SeriesSummary {
        records: series.len(),
        columns,
        diagnostics: records.to_vec(),
        pass: records.iter().all(|r| r.pass),
    };
    write_json(json_path, &summary)?;
    Ok(summary)
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}
