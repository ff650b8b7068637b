//! Command-line front end: single evaluations, parameter sweeps written as
//! CSV, figure presets and plotting scripts.
//!
//! Sweep configuration is a flat `key = value` file. Every key can also be
//! given on the command line with `--set key=value`, which wins over the file.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error;

use crate::dynamics::{
    amplitude_damping_family, depolarizing_family, AmplitudeDampingParams, DepolarizingParams, DynamicsError,
    DynamicsModel, HamiltonianModel, TabulatedKraus, Trajectory, DEFAULT_STEPS,
};
use crate::entropy::{EntropyError, EntropyParams, EntropyValue};
use crate::qsl::{
    integrate_bounds_with, normalize_series, qsl_general_from, qsl_nonunitary_with, qsl_unitary, EntropyTriple,
    QslError,
};
use crate::states::{bloch_state, ghz_mixed, BlochVector, DensityMatrix, GhzMixedParams, StateError};

/// Largest number of points allowed on any grid axis.
pub const MAX_AXIS_COUNT: usize = 10_000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("dataset has no column named {0:?}")]
    MissingColumn(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Numerical(_) => 2,
            _ => 1,
        }
    }
}

impl From<QslError> for CliError {
    fn from(e: QslError) -> Self {
        Self::Numerical(e.to_string())
    }
}

impl From<EntropyError> for CliError {
    fn from(e: EntropyError) -> Self {
        Self::Numerical(e.to_string())
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn dynamics_err(e: DynamicsError) -> CliError {
    match e {
        DynamicsError::InvalidParameter(_) | DynamicsError::Table(_) | DynamicsError::Io(_) => config_err(e),
        other => CliError::Numerical(other.to_string()),
    }
}

fn state_err(e: StateError) -> CliError {
    config_err(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum ModelKind {
    UnitaryQubit,
    Depolarizing,
    AmplitudeDamping,
    CustomKrausFile,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::UnitaryQubit => "unitary_qubit",
            Self::Depolarizing => "depolarizing",
            Self::AmplitudeDamping => "amplitude_damping",
            Self::CustomKrausFile => "custom_kraus_file",
        }
    }

    fn parse(s: &str) -> Result<Self, CliError> {
        <Self as ValueEnum>::from_str(s, true).map_err(|_| CliError::Config(format!("unknown model {s:?}")))
    }
}

/// A dynamical model together with the parameters of its probe state.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub field: [f64; 3],
    pub gamma: f64,
    pub lambda: f64,
    pub s: f64,
    pub p: f64,
    pub state_file: Option<PathBuf>,
    pub kraus_file: Option<PathBuf>,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            kind: ModelKind::Depolarizing,
            r: 0.75,
            theta: std::f64::consts::FRAC_PI_2,
            phi: 0.0,
            field: [0.0, 0.0, 1.0],
            gamma: 1.0,
            lambda: 1.0,
            s: 0.5,
            p: 0.25,
            state_file: None,
            kraus_file: None,
        }
    }
}

/// A built model: the dynamics plus the probe state.
#[derive(Debug, Clone)]
pub struct ModelInstance {
    pub dynamics: DynamicsModel,
    pub rho0: DensityMatrix,
    amplitude: Option<AmplitudeDampingParams>,
    time_limit: Option<f64>,
}

impl ModelSpec {
    fn param_columns(&self) -> Vec<(&'static str, String)> {
        let f = |x: f64| fmt_num(x);
        match self.kind {
            ModelKind::UnitaryQubit => vec![
                ("r", f(self.r)),
                ("theta", f(self.theta)),
                ("phi", f(self.phi)),
                ("nx", f(self.field[0])),
                ("ny", f(self.field[1])),
                ("nz", f(self.field[2])),
            ],
            ModelKind::Depolarizing => vec![
                ("r", f(self.r)),
                ("theta", f(self.theta)),
                ("phi", f(self.phi)),
                ("gamma", f(self.gamma)),
            ],
            ModelKind::AmplitudeDamping => vec![("p", f(self.p)), ("lambda", f(self.lambda)), ("s", f(self.s))],
            ModelKind::CustomKrausFile => vec![],
        }
    }

    fn bloch_probe(&self) -> Result<DensityMatrix, CliError> {
        bloch_state(BlochVector::new(self.r, self.theta, self.phi).map_err(state_err)?).map_err(state_err)
    }

    fn probe(&self, default: impl FnOnce() -> Result<DensityMatrix, CliError>) -> Result<DensityMatrix, CliError> {
        match &self.state_file {
            Some(path) => DensityMatrix::load(path).map_err(state_err),
            None => default(),
        }
    }

    pub fn build(&self) -> Result<ModelInstance, CliError> {
        let (dynamics, rho0, amplitude, time_limit) = match self.kind {
            ModelKind::UnitaryQubit => {
                let h = HamiltonianModel::qubit(self.field).map_err(dynamics_err)?;
                (DynamicsModel::Unitary(h), self.probe(|| self.bloch_probe())?, None, None)
            }
            ModelKind::Depolarizing => {
                let fam = depolarizing_family(DepolarizingParams::new(self.gamma).map_err(dynamics_err)?);
                (DynamicsModel::Kraus(Arc::new(fam)), self.probe(|| self.bloch_probe())?, None, None)
            }
            ModelKind::AmplitudeDamping => {
                let params = AmplitudeDampingParams::new(self.lambda, self.s).map_err(dynamics_err)?;
                let rho0 = self.probe(|| ghz_mixed(GhzMixedParams::new(self.p).map_err(state_err)?).map_err(state_err))?;
                (DynamicsModel::Kraus(Arc::new(amplitude_damping_family(params))), rho0, Some(params), None)
            }
            ModelKind::CustomKrausFile => {
                let path = self
                    .kraus_file
                    .as_ref()
                    .ok_or_else(|| CliError::Config("custom_kraus_file needs kraus_file".into()))?;
                let table = TabulatedKraus::load(path).map_err(dynamics_err)?;
                let state_path = self
                    .state_file
                    .as_ref()
                    .ok_or_else(|| CliError::Config("custom_kraus_file needs state_file".into()))?;
                let rho0 = DensityMatrix::load(state_path).map_err(state_err)?;
                let (start, end) = table.time_span();
                if start > 0.0 {
                    return Err(CliError::Config("Kraus table must start at t = 0".into()));
                }
                (DynamicsModel::Kraus(Arc::new(table)), rho0, None, Some(end))
            }
        };
        if dynamics.dim() != rho0.dim() {
            return Err(CliError::Config(format!(
                "state has dimension {} but the model acts on dimension {}",
                rho0.dim(),
                dynamics.dim()
            )));
        }
        Ok(ModelInstance {
            dynamics,
            rho0,
            amplitude,
            time_limit,
        })
    }
}

impl ModelInstance {
    pub fn evolve(&self, tau: f64, n_steps: usize) -> Result<Trajectory, CliError> {
        if let Some(limit) = self.time_limit {
            if tau > limit {
                return Err(CliError::Config(format!("horizon {tau} exceeds the Kraus table (ends at {limit})")));
            }
        }
        self.dynamics.evolve(&self.rho0, tau, n_steps).map_err(dynamics_err)
    }

    fn hamiltonian(&self) -> Option<&HamiltonianModel> {
        match &self.dynamics {
            DynamicsModel::Unitary(h) => Some(h),
            DynamicsModel::Kraus(_) => None,
        }
    }
}

/// Evenly spaced values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    pub fn single(value: f64) -> Self {
        Self::new(value, value, 1)
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.max } else { self.min + (self.max - self.min) * i as f64 / last })
            .collect()
    }

    fn validate(&self, axis: &str) -> Result<(), CliError> {
        if self.count == 0 || self.count > MAX_AXIS_COUNT {
            return Err(CliError::Config(format!("{axis} count must be in 1..={MAX_AXIS_COUNT}")));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.max < self.min {
            return Err(CliError::Config(format!("{axis} range [{}, {}] is invalid", self.min, self.max)));
        }
        Ok(())
    }
}

/// Groups of CSV columns a sweep can produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutputKind {
    Entropy,
    Bounds,
    Qsl,
    Errors,
}

impl OutputKind {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "entropy" => Ok(Self::Entropy),
            "bounds" => Ok(Self::Bounds),
            "qsl" => Ok(Self::Qsl),
            "errors" => Ok(Self::Errors),
            other => Err(CliError::Config(format!("unknown output {other:?}"))),
        }
    }

    fn all() -> BTreeSet<Self> {
        [Self::Entropy, Self::Bounds, Self::Qsl, Self::Errors].into_iter().collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub model: ModelSpec,
    pub alpha: GridSpec,
    pub z: GridSpec,
    pub time: GridSpec,
    pub n_steps: usize,
    pub outputs: BTreeSet<OutputKind>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            model: ModelSpec::default(),
            alpha: GridSpec::single(0.5),
            z: GridSpec::single(1.0),
            time: GridSpec::single(1.0),
            n_steps: DEFAULT_STEPS,
            outputs: OutputKind::all(),
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: {value:?} is not a number")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: {value:?} is not a count")))
}

impl SweepConfig {
    /// Parses a `key = value` file. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Applies one override. Unknown keys are config errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let m = &mut self.model;
        match key {
            "model" => m.kind = ModelKind::parse(value)?,
            "r" => m.r = parse_f64(key, value)?,
            "theta" => m.theta = parse_f64(key, value)?,
            "phi" => m.phi = parse_f64(key, value)?,
            "nx" => m.field[0] = parse_f64(key, value)?,
            "ny" => m.field[1] = parse_f64(key, value)?,
            "nz" => m.field[2] = parse_f64(key, value)?,
            "gamma" => m.gamma = parse_f64(key, value)?,
            "lambda" => m.lambda = parse_f64(key, value)?,
            "s" => m.s = parse_f64(key, value)?,
            "p" => m.p = parse_f64(key, value)?,
            "state_file" => m.state_file = Some(PathBuf::from(value)),
            "kraus_file" => m.kraus_file = Some(PathBuf::from(value)),
            "alpha" => self.alpha = GridSpec::single(parse_f64(key, value)?),
            "alpha_min" => self.alpha.min = parse_f64(key, value)?,
            "alpha_max" => self.alpha.max = parse_f64(key, value)?,
            "alpha_count" => self.alpha.count = parse_usize(key, value)?,
            "z" => self.z = GridSpec::single(parse_f64(key, value)?),
            "z_min" => self.z.min = parse_f64(key, value)?,
            "z_max" => self.z.max = parse_f64(key, value)?,
            "z_count" => self.z.count = parse_usize(key, value)?,
            "tau" => self.time = GridSpec::single(parse_f64(key, value)?),
            "t_min" => self.time.min = parse_f64(key, value)?,
            "t_max" => self.time.max = parse_f64(key, value)?,
            "t_count" => self.time.count = parse_usize(key, value)?,
            "steps" => self.n_steps = parse_usize(key, value)?,
            "outputs" => {
                self.outputs = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(OutputKind::parse)
                    .collect::<Result<_, _>>()?;
            }
            other => return Err(CliError::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.alpha.validate("alpha")?;
        self.z.validate("z")?;
        self.time.validate("time")?;
        if self.alpha.min <= 0.0 || self.alpha.max >= 1.0 {
            return Err(CliError::Config("alpha grid must lie inside (0, 1)".into()));
        }
        if self.z.min <= 0.0 || self.z.max > 1.0 {
            return Err(CliError::Config("z grid must lie inside (0, 1]".into()));
        }
        if self.time.min < 0.0 {
            return Err(CliError::Config("time grid must be nonnegative".into()));
        }
        if self.n_steps < 2 || self.n_steps > 1_000_000 {
            return Err(CliError::Config("steps must be in 2..=1000000".into()));
        }
        if self.outputs.is_empty() {
            return Err(CliError::Config("outputs must name at least one group".into()));
        }
        Ok(())
    }
}

/// Formats a value with 17 significant digits; infinities as `inf`, NaN as empty.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn fmt_entropy(v: EntropyValue) -> String {
    match v {
        EntropyValue::Finite(x) => fmt_num(x),
        EntropyValue::Infinite => "inf".into(),
    }
}

/// Short flag naming a per-point failure.
pub fn error_flag(e: &QslError) -> &'static str {
    match e {
        QslError::SingularState { .. } => "singular_state",
        QslError::DenominatorNearZero { .. } => "denominator_near_zero",
        QslError::QuadratureTooCoarse { .. } => "quadrature_too_coarse",
        QslError::ZeroSpeed { .. } => "zero_speed",
        QslError::ZeroHorizon => "zero_horizon",
        QslError::SpectrumMismatch { .. } => "spectrum_mismatch",
        QslError::ZeroVariance => "zero_variance",
        QslError::DegenerateRange(_) => "degenerate_range",
        QslError::InfiniteEntropy => "infinite_entropy",
        QslError::MissingKrausTerms => "missing_kraus_terms",
        QslError::InvalidInput(_) => "invalid_input",
        QslError::Entropy(_) => "entropy_error",
        QslError::Dynamics(_) => "dynamics_error",
    }
}

/// A table of strings with a header row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Dataset {
    pub fn column(&self, name: &str) -> Result<usize, CliError> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::MissingColumn(name.into()))
    }

    /// Values of a numeric column; empty cells become NaN.
    pub fn numbers(&self, name: &str) -> Result<Vec<f64>, CliError> {
        let i = self.column(name)?;
        Ok(self
            .rows
            .iter()
            .map(|row| row[i].parse().unwrap_or(f64::NAN))
            .collect())
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        buf
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        fs::write(path, self.to_csv_bytes()).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Replaces `source` values by their min-max normalization over the rows
    /// in each panel and stores them in `target`.
    fn normalize_into(&mut self, source: &str, target: &str) -> Result<(), CliError> {
        let src = self.column(source)?;
        let dst = self.column(target)?;
        let panel = self.column("panel").ok();
        let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            let key = panel.map(|c| row[c].clone()).unwrap_or_default();
            match groups.iter_mut().find(|(k, _)| *k == key) {
                Some((_, idx)) => idx.push(i),
                None => groups.push((key, vec![i])),
            }
        }
        for (_, idx) in groups {
            let finite: Vec<(usize, f64)> = idx
                .iter()
                .filter_map(|&i| self.rows[i][src].parse::<f64>().ok().filter(|v| v.is_finite()).map(|v| (i, v)))
                .collect();
            let values: Vec<f64> = finite.iter().map(|&(_, v)| v).collect();
            if let Ok(scaled) = normalize_series(&values) {
                for ((i, _), v) in finite.iter().zip(scaled) {
                    self.rows[*i][dst] = fmt_num(v);
                }
            }
        }
        Ok(())
    }
}

struct PointCells {
    entropy: [String; 3],
    bounds: [String; 3],
    qsl: [String; 4],
    deltas: [String; 2],
    warnings: BTreeSet<String>,
}

impl PointCells {
    fn empty() -> Self {
        Self {
            entropy: Default::default(),
            bounds: Default::default(),
            qsl: Default::default(),
            deltas: Default::default(),
            warnings: BTreeSet::new(),
        }
    }

    fn flag(&mut self, e: &QslError) {
        self.warnings.insert(error_flag(e).to_string());
    }
}

fn evaluate_point(model: &ModelInstance, traj: &Trajectory, p: EntropyParams, outputs: &BTreeSet<OutputKind>) -> PointCells {
    let mut cells = PointCells::empty();
    let d = match EntropyTriple::new(traj.initial(), traj.final_state(), p) {
        Ok(d) => d,
        Err(e) => {
            cells.flag(&e);
            return cells;
        }
    };
    cells.entropy = [fmt_entropy(d.fwd), fmt_entropy(d.bwd), fmt_entropy(d.sym)];
    let need_bounds = outputs.contains(&OutputKind::Bounds) || outputs.contains(&OutputKind::Errors);
    let need_qsl = outputs.contains(&OutputKind::Qsl) || outputs.contains(&OutputKind::Errors);
    if need_bounds {
        match integrate_bounds_with(traj, p, d) {
            Ok(b) => {
                cells.bounds = [fmt_num(b.rhs_fwd), fmt_num(b.rhs_bwd), fmt_num(b.rhs_sym)];
                cells.deltas[0] = fmt_num(b.delta_bound);
                cells.warnings.extend(b.warnings.iter().map(|w| w.to_string()));
            }
            Err(e) => cells.flag(&e),
        }
    }
    if need_qsl {
        let tau = traj.horizon();
        let report = match model.hamiltonian() {
            Some(h) => qsl_unitary(h, traj.initial(), traj.final_state(), p).and_then(|u| u.with_horizon(tau)),
            None => qsl_nonunitary_with(traj, p, d),
        };
        match report {
            Ok(q) => {
                cells.qsl = [fmt_num(q.tau_fwd), fmt_num(q.tau_bwd), fmt_num(q.tau_sym), fmt_num(q.tau_qsl)];
                cells.deltas[1] = fmt_num(q.delta_qsl);
                cells.warnings.extend(q.warnings.iter().map(|w| w.to_string()));
            }
            Err(e) => cells.flag(&e),
        }
    }
    cells
}

const ENTROPY_COLS: [&str; 3] = ["D_fwd", "D_bwd", "D_sym"];
const BOUND_COLS: [&str; 3] = ["rhs_fwd", "rhs_bwd", "rhs_sym"];
const QSL_COLS: [&str; 4] = ["tau_fwd", "tau_bwd", "tau_sym", "tau_qsl"];
const ERROR_COLS: [&str; 4] = ["delta_bound", "delta_qsl", "delta_bound_norm", "delta_qsl_norm"];

/// Runs the grid and returns one row per (α, z, τ), ordered by α, then z, then τ.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Dataset, CliError> {
    run_panel(cfg, None)
}

fn run_panel(cfg: &SweepConfig, panel: Option<&str>) -> Result<Dataset, CliError> {
    cfg.validate()?;
    let model = cfg.model.build()?;
    let alphas = cfg.alpha.values();
    let zs = cfg.z.values();
    let times = cfg.time.values();

    // Trajectories depend only on the horizon, so build each once.
    let trajectories: Vec<Result<Trajectory, String>> = times
        .par_iter()
        .map(|&t| model.evolve(t, cfg.n_steps).map_err(|e| e.to_string()))
        .collect();
    if let Some(Err(e)) = trajectories.iter().find(|t| t.is_err()) {
        if model.time_limit.is_some() || matches!(model.dynamics, DynamicsModel::Unitary(_)) {
            return Err(CliError::Config(e.clone()));
        }
    }

    let params_cols = cfg.model.param_columns();
    let mut header: Vec<String> = Vec::new();
    if panel.is_some() {
        header.push("panel".into());
    }
    header.push("model".into());
    header.extend(params_cols.iter().map(|(k, _)| k.to_string()));
    header.extend(["alpha", "z", "tau"].map(String::from));
    if model.amplitude.is_some() {
        header.push("gamma_t".into());
    }
    let o = &cfg.outputs;
    header.extend(ENTROPY_COLS.map(String::from));
    if o.contains(&OutputKind::Bounds) {
        header.extend(BOUND_COLS.map(String::from));
    }
    if o.contains(&OutputKind::Qsl) {
        header.extend(QSL_COLS.map(String::from));
    }
    if o.contains(&OutputKind::Errors) {
        header.extend(ERROR_COLS.map(String::from));
    }
    header.push("warnings".into());

    let (nz, nt) = (zs.len(), times.len());
    let points: Vec<(usize, usize, usize)> = (0..alphas.len())
        .flat_map(|i| (0..nz).flat_map(move |j| (0..nt).map(move |k| (i, j, k))))
        .collect();
    let rows: Vec<Vec<String>> = points
        .par_iter()
        .map(|&(i, j, k)| {
            let (alpha, z, t) = (alphas[i], zs[j], times[k]);
            let mut cells = match (&trajectories[k], EntropyParams::new(alpha, z)) {
                (Ok(traj), Ok(p)) => evaluate_point(&model, traj, p, o),
                (Err(_), _) => {
                    let mut c = PointCells::empty();
                    c.warnings.insert("dynamics_error".into());
                    c
                }
                (_, Err(_)) => {
                    let mut c = PointCells::empty();
                    c.warnings.insert("invalid_params".into());
                    c
                }
            };
            let mut row = Vec::with_capacity(header.len());
            if let Some(label) = panel {
                row.push(label.to_string());
            }
            row.push(cfg.model.kind.as_str().to_string());
            row.extend(params_cols.iter().map(|(_, v)| v.clone()));
            row.extend([fmt_num(alpha), fmt_num(z), fmt_num(t)]);
            if let Some(ad) = model.amplitude {
                row.push(fmt_num(ad.gamma(t)));
            }
            row.extend(std::mem::take(&mut cells.entropy));
            if o.contains(&OutputKind::Bounds) {
                row.extend(std::mem::take(&mut cells.bounds));
            }
            if o.contains(&OutputKind::Qsl) {
                row.extend(std::mem::take(&mut cells.qsl));
            }
            if o.contains(&OutputKind::Errors) {
                row.extend(std::mem::take(&mut cells.deltas));
                row.extend([String::new(), String::new()]);
            }
            row.push(cells.warnings.into_iter().collect::<Vec<_>>().join(";"));
            row
        })
        .collect();

    let mut data = Dataset { header, rows };
    if o.contains(&OutputKind::Errors) {
        data.normalize_into("delta_bound", "delta_bound_norm")?;
        data.normalize_into("delta_qsl", "delta_qsl_norm")?;
    }
    Ok(data)
}

/// Named figure reproductions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigurePreset {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

/// Grid resolution for figure presets.
pub const PRESET_RESOLUTION: usize = 100;

impl FigurePreset {
    pub fn name(self) -> &'static str {
        match self {
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
            Self::Fig4 => "fig4",
            Self::Fig5 => "fig5",
            Self::Fig6 => "fig6",
        }
    }

    /// Panels as (label, config). Depolarizing presets use Γ = 1 and amplitude
    /// damping presets use λ = 1, so the time axis is Γτ or λτ.
    pub fn panels(self) -> Vec<(String, SweepConfig)> {
        let alpha = GridSpec::new(0.01, 0.99, PRESET_RESOLUTION);
        let depolarizing = |outputs: &[OutputKind]| SweepConfig {
            model: ModelSpec {
                kind: ModelKind::Depolarizing,
                r: 0.75,
                gamma: 1.0,
                ..ModelSpec::default()
            },
            alpha,
            z: GridSpec::single(1.0),
            time: GridSpec::new(0.0, 20.0, PRESET_RESOLUTION),
            n_steps: DEFAULT_STEPS,
            outputs: outputs.iter().copied().collect(),
        };
        let damping = |outputs: &[OutputKind]| {
            let mut panels = Vec::new();
            for (label, s, p) in [("a", 0.5, 0.25), ("b", 0.5, 0.9), ("c", 10.0, 0.25), ("d", 10.0, 0.9)] {
                panels.push((
                    label.to_string(),
                    SweepConfig {
                        model: ModelSpec {
                            kind: ModelKind::AmplitudeDamping,
                            p,
                            s,
                            lambda: 1.0,
                            ..ModelSpec::default()
                        },
                        alpha,
                        z: GridSpec::single(1.0),
                        time: GridSpec::new(0.0, 10.0, PRESET_RESOLUTION),
                        n_steps: 2001,
                        outputs: outputs.iter().copied().collect(),
                    },
                ));
            }
            panels
        };
        use OutputKind::*;
        match self {
            Self::Fig2 => vec![("a".into(), depolarizing(&[Entropy, Qsl]))],
            Self::Fig3 => vec![("a".into(), depolarizing(&[Entropy, Bounds, Qsl, Errors]))],
            Self::Fig4 => damping(&[Entropy, Qsl]),
            Self::Fig5 | Self::Fig6 => damping(&[Entropy, Bounds, Qsl, Errors]),
        }
    }

    /// Column the figure colours by.
    pub fn plotted_columns(self) -> &'static [&'static str] {
        match self {
            Self::Fig2 | Self::Fig4 => &["tau_qsl"],
            Self::Fig3 => &["delta_bound_norm", "delta_qsl_norm"],
            Self::Fig5 => &["delta_bound_norm"],
            Self::Fig6 => &["delta_qsl_norm"],
        }
    }
}

/// Runs every panel of a preset, with `overrides` applied to each, and
/// concatenates the rows.
pub fn run_figure(preset: FigurePreset, overrides: &[(String, String)]) -> Result<Dataset, CliError> {
    let mut out: Option<Dataset> = None;
    for (label, mut cfg) in preset.panels() {
        for (k, v) in overrides {
            cfg.set(k, v)?;
        }
        let data = run_panel(&cfg, Some(&label))?;
        match &mut out {
            None => out = Some(data),
            Some(acc) => acc.rows.extend(data.rows),
        }
    }
    Ok(out.expect("every preset has a panel"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    Heatmap,
    Line,
}

/// A matplotlib script that draws `column` from the CSV at `csv_name`,
/// resolved relative to the script's own directory. Heatmaps put τ on the x
/// axis and α on the y axis, one panel per `panel` value; line plots draw
/// `column` against τ for the first α and z of each panel.
pub fn emit_plot_script(data: &Dataset, kind: PlotKind, column: &str, csv_name: &str) -> Result<String, CliError> {
    for needed in ["alpha", "z", "tau", column] {
        data.column(needed)?;
    }
    let mut s = String::new();
    let _ = writeln!(s, "#!/usr/bin/env python3");
    let _ = writeln!(s, "# Renders column {column:?} of {csv_name}.");
    s.push_str(
        r#"import csv
import math
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))
"#,
    );
    let _ = writeln!(s, "CSV = os.path.join(HERE, {csv_name:?})");
    let _ = writeln!(s, "COLUMN = {column:?}");
    let _ = writeln!(s, "KIND = {:?}", if kind == PlotKind::Heatmap { "heatmap" } else { "line" });
    s.push_str(
        r#"

def number(text):
    try:
        return float(text)
    except ValueError:
        return math.nan


with open(CSV, newline="") as fh:
    rows = list(csv.DictReader(fh))

panels = []
for row in rows:
    label = row.get("panel", "")
    if label not in panels:
        panels.append(label)

fig, axes = plt.subplots(1, len(panels), figsize=(4.2 * len(panels), 3.6), squeeze=False)
for ax, label in zip(axes[0], panels):
    sel = [r for r in rows if r.get("panel", "") == label]
    z0 = number(sel[0]["z"])
    sel = [r for r in sel if number(r["z"]) == z0]
    taus = sorted({number(r["tau"]) for r in sel})
    alphas = sorted({number(r["alpha"]) for r in sel})
    if KIND == "heatmap":
        grid = np.full((len(alphas), len(taus)), np.nan)
        ti = {t: i for i, t in enumerate(taus)}
        ai = {a: i for i, a in enumerate(alphas)}
        for r in sel:
            grid[ai[number(r["alpha"])], ti[number(r["tau"])]] = number(r[COLUMN])
        mesh = ax.pcolormesh(taus, alphas, grid, shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax, label=COLUMN)
        ax.set_ylabel("alpha")
    else:
        a0 = alphas[0]
        line = sorted((number(r["tau"]), number(r[COLUMN])) for r in sel if number(r["alpha"]) == a0)
        ax.plot([p[0] for p in line], [p[1] for p in line])
        ax.set_ylabel(COLUMN)
    ax.set_xlabel("tau")
    if label:
        ax.set_title(f"({label})")

fig.tight_layout()
out = os.path.splitext(CSV)[0] + "_" + COLUMN + ".png"
fig.savefig(out, dpi=150)
print(out)
"#,
    );
    Ok(s)
}

// ---------------------------------------------------------------------------
// Command-line surface

#[derive(Debug, Parser)]
#[command(name = "azqsl", version, about = "alpha-z Renyi entropies, entropic bounds and quantum speed limits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropies between the probe and its evolved state (or a given target state).
    Entropy(PointArgs),
    /// Entropies and their integrated upper bounds.
    Bound(PointArgs),
    /// Speed-limit times.
    Qsl(PointArgs),
    /// Grid sweep over alpha, z and the horizon, written as CSV.
    Sweep(SweepArgs),
    /// Reproduce a figure's data set.
    Figure(FigureArgs),
    /// Cross-check the closed-form examples against the matrix pipeline.
    Selftest,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "depolarizing")]
    pub model: ModelKind,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub phi: Option<f64>,
    /// Field components of H = n·σ.
    #[arg(long)]
    pub nx: Option<f64>,
    #[arg(long)]
    pub ny: Option<f64>,
    #[arg(long)]
    pub nz: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Probe state in the text density-matrix format.
    #[arg(long)]
    pub state_file: Option<PathBuf>,
    /// Tabulated Kraus operators for custom_kraus_file.
    #[arg(long)]
    pub kraus_file: Option<PathBuf>,
}

impl ModelArgs {
    fn overrides(&self) -> Vec<(String, String)> {
        let mut v = Vec::new();
        let mut put = |k: &str, x: Option<f64>| {
            if let Some(x) = x {
                v.push((k.to_string(), x.to_string()));
            }
        };
        put("r", self.r);
        put("theta", self.theta);
        put("phi", self.phi);
        put("nx", self.nx);
        put("ny", self.ny);
        put("nz", self.nz);
        put("gamma", self.gamma);
        put("lambda", self.lambda);
        put("s", self.s);
        put("p", self.p);
        if let Some(path) = &self.state_file {
            v.push(("state_file".into(), path.display().to_string()));
        }
        if let Some(path) = &self.kraus_file {
            v.push(("kraus_file".into(), path.display().to_string()));
        }
        v
    }

    fn spec(&self) -> Result<ModelSpec, CliError> {
        let mut cfg = SweepConfig::default();
        cfg.model.kind = self.model;
        for (k, v) in self.overrides() {
            cfg.set(&k, &v)?;
        }
        Ok(cfg.model)
    }
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub z: f64,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    pub steps: usize,
    /// Compare the probe directly with this state instead of evolving it (entropy only).
    #[arg(long)]
    pub target_file: Option<PathBuf>,
    /// For unitary models, integrate the true speed instead of using the closed form.
    #[arg(long)]
    pub general: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// key = value config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override a config key, e.g. --set alpha_count=50.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub plot: Option<PlotKind>,
    /// Column used by the plot script.
    #[arg(long, default_value = "tau_qsl")]
    pub plot_column: String,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub preset: FigurePreset,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub plot: Option<PlotKind>,
}

fn parse_overrides(items: &[String]) -> Result<Vec<(String, String)>, CliError> {
    items
        .iter()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got {kv:?}")))
        })
        .collect()
}

fn print_pairs(pairs: &[(&str, String)]) -> String {
    let mut s = String::new();
    for (k, v) in pairs {
        let _ = writeln!(s, "{k} = {v}");
    }
    s
}

fn point_params(args: &PointArgs) -> Result<EntropyParams, CliError> {
    EntropyParams::new(args.alpha, args.z).map_err(config_err)
}

fn point_trajectory(args: &PointArgs) -> Result<(ModelInstance, Trajectory), CliError> {
    let tau = args.tau.ok_or_else(|| CliError::Config("--tau is required".into()))?;
    if !(tau >= 0.0) {
        return Err(CliError::Config("--tau must be nonnegative".into()));
    }
    let model = args.model.spec()?.build()?;
    let traj = model.evolve(tau, args.steps)?;
    Ok((model, traj))
}

fn warnings_text(w: &[crate::qsl::QslWarning]) -> String {
    w.iter().map(|w| w.as_str()).collect::<Vec<_>>().join(";")
}

fn cmd_entropy(args: &PointArgs) -> Result<String, CliError> {
    let p = point_params(args)?;
    let d = match &args.target_file {
        Some(target) => {
            let rho0 = args.model.spec()?.probe(|| Err(CliError::Config("--state-file is required".into())))?;
            let rho_tau = DensityMatrix::load(target).map_err(state_err)?;
            EntropyTriple::new(&rho0, &rho_tau, p)?
        }
        None => {
            let (_, traj) = point_trajectory(args)?;
            EntropyTriple::new(traj.initial(), traj.final_state(), p)?
        }
    };
    Ok(print_pairs(&[
        ("D_fwd", fmt_entropy(d.fwd)),
        ("D_bwd", fmt_entropy(d.bwd)),
        ("D_sym", fmt_entropy(d.sym)),
        ("dpi_valid", p.dpi_valid().to_string()),
    ]))
}

fn cmd_bound(args: &PointArgs) -> Result<String, CliError> {
    let p = point_params(args)?;
    let (_, traj) = point_trajectory(args)?;
    let d = EntropyTriple::new(traj.initial(), traj.final_state(), p)?;
    let b = integrate_bounds_with(&traj, p, d)?;
    Ok(print_pairs(&[
        ("D_fwd", fmt_entropy(b.d_fwd)),
        ("D_bwd", fmt_entropy(b.d_bwd)),
        ("D_sym", fmt_entropy(b.d_sym)),
        ("rhs_fwd", fmt_num(b.rhs_fwd)),
        ("rhs_bwd", fmt_num(b.rhs_bwd)),
        ("rhs_sym", fmt_num(b.rhs_sym)),
        ("delta_bound", fmt_num(b.delta_bound)),
        ("warnings", warnings_text(&b.warnings)),
    ]))
}

fn cmd_qsl(args: &PointArgs) -> Result<String, CliError> {
    let p = point_params(args)?;
    let (model, traj) = point_trajectory(args)?;
    let d = EntropyTriple::new(traj.initial(), traj.final_state(), p)?;
    let q = match model.hamiltonian() {
        Some(h) if !args.general => qsl_unitary(h, traj.initial(), traj.final_state(), p)?.with_horizon(traj.horizon())?,
        Some(_) => qsl_general_from(&integrate_bounds_with(&traj, p, d)?, traj.horizon())?,
        None if args.general => qsl_general_from(&integrate_bounds_with(&traj, p, d)?, traj.horizon())?,
        None => qsl_nonunitary_with(&traj, p, d)?,
    };
    Ok(print_pairs(&[
        ("tau", fmt_num(q.tau)),
        ("tau_fwd", fmt_num(q.tau_fwd)),
        ("tau_bwd", fmt_num(q.tau_bwd)),
        ("tau_sym", fmt_num(q.tau_sym)),
        ("tau_qsl", fmt_num(q.tau_qsl)),
        ("delta_qsl", fmt_num(q.delta_qsl)),
        ("warnings", warnings_text(&q.warnings)),
    ]))
}

fn write_outputs(
    data: &Dataset,
    out: Option<&Path>,
    plot: Option<PlotKind>,
    columns: &[&str],
) -> Result<String, CliError> {
    let Some(path) = out else {
        if plot.is_some() {
            return Err(CliError::Config("--plot needs --out".into()));
        }
        return Ok(String::from_utf8(data.to_csv_bytes()).expect("CSV is UTF-8"));
    };
    data.save(path)?;
    let mut report = format!("wrote {} rows to {}\n", data.rows.len(), path.display());
    if let Some(kind) = plot {
        let csv_name = path
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| CliError::Config("output path has no file name".into()))?;
        for column in columns {
            let script = emit_plot_script(data, kind, column, csv_name)?;
            let script_path = path.with_file_name(format!(
                "{}_{column}.py",
                path.file_stem().and_then(|s| s.to_str()).unwrap_or("plot")
            ));
            fs::write(&script_path, script).map_err(|source| CliError::Io {
                path: script_path.clone(),
                source,
            })?;
            let _ = writeln!(report, "wrote plot script {}", script_path.display());
        }
    }
    Ok(report)
}

fn cmd_sweep(args: &SweepArgs) -> Result<String, CliError> {
    let mut cfg = match &args.config {
        Some(path) => SweepConfig::load(path)?,
        None => SweepConfig::default(),
    };
    for (k, v) in parse_overrides(&args.set)? {
        cfg.set(&k, &v)?;
    }
    let data = run_sweep(&cfg)?;
    write_outputs(&data, args.out.as_deref(), args.plot, &[args.plot_column.as_str()])
}

fn cmd_figure(args: &FigureArgs) -> Result<String, CliError> {
    let overrides = parse_overrides(&args.set)?;
    let data = run_figure(args.preset, &overrides)?;
    write_outputs(&data, args.out.as_deref(), args.plot, args.preset.plotted_columns())
}

/// Runs a parsed command and returns its standard output.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Entropy(a) => cmd_entropy(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Qsl(a) => cmd_qsl(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Figure(a) => cmd_figure(a),
        Command::Selftest => {
            let results = selftest::run();
            let text = selftest::render(&results);
            if results.iter().all(|r| r.passed) {
                Ok(text)
            } else {
                Err(CliError::Numerical(format!("self-test failed\n{text}")))
            }
        }
    }
}

/// Entry point used by the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(text) => {
            let _ = io::stdout().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub mod selftest {
    //! Reduced-size oracle cross-checks.

    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    use crate::dynamics::{amplitude_damping_family, depolarizing_family, evolve_kraus, kraus_speed_terms};
    use crate::dynamics::{AmplitudeDampingParams, DepolarizingParams, HamiltonianModel};
    use crate::entropy::{relative_purity, renyi_az, EntropyParams};
    use crate::oracles::{self, DepolarizingCase, QubitUnitaryCase, TwoQubitAdCase};
    use crate::qsl::qsl_nonunitary;
    use crate::states::{bloch_state, ghz_mixed, BlochVector, GhzMixedParams};

    #[derive(Debug, Clone)]
    pub struct CheckResult {
        pub name: &'static str,
        pub worst: f64,
        pub tolerance: f64,
        pub passed: bool,
    }

    fn check(name: &'static str, worst: f64, tolerance: f64) -> CheckResult {
        CheckResult {
            name,
            worst,
            tolerance,
            passed: worst <= tolerance,
        }
    }

    fn valid_params(rng: &mut StdRng) -> EntropyParams {
        let a = rng.random_range(0.05..0.95);
        EntropyParams::new(a, rng.random_range(a.max(1.0 - a)..=1.0)).expect("valid region")
    }

    pub fn run() -> Vec<CheckResult> {
        let mut rng = StdRng::seed_from_u64(2024);
        let mut out = Vec::new();

        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let n = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(0.1..1.0)];
            let case = QubitUnitaryCase::new(
                rng.random_range(0.01..0.95),
                rng.random_range(0.0..std::f64::consts::PI),
                rng.random_range(0.0..std::f64::consts::TAU),
                n,
                rng.random_range(0.0..5.0),
            )
            .expect("valid case");
            let p = valid_params(&mut rng);
            let rho0 = bloch_state(BlochVector::new(case.r, case.theta, case.phi).expect("r < 1")).expect("state");
            let h = HamiltonianModel::qubit(n).expect("qubit field");
            let rho_t = rho0.conjugate_by(&h.propagator(case.t)).expect("unitary");
            let g = relative_purity(&rho_t, &rho0, p).unwrap_or(f64::NAN);
            worst = worst.max((g - oracles::unitary_purity(&case, p)).abs());
        }
        out.push(check("unitary relative purity", worst, 1e-9));

        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let case = DepolarizingCase::new(rng.random_range(0.01..0.95), rng.random_range(0.0..20.0)).expect("case");
            let p = valid_params(&mut rng);
            let fam = depolarizing_family(DepolarizingParams::new(1.0).expect("rate"));
            let rho0 = bloch_state(BlochVector::new(case.r, 0.7, 2.0).expect("r < 1")).expect("state");
            let traj = evolve_kraus(&fam, &rho0, case.gamma_tau, 2).expect("trajectory");
            let d = renyi_az(traj.final_state(), &rho0, p).map(|d| d.as_f64()).unwrap_or(f64::NAN);
            worst = worst.max((d - oracles::depolarizing_entropy(&case, p.alpha())).abs());
        }
        out.push(check("depolarizing entropy", worst, 1e-9));

        let mut worst: f64 = 0.0;
        for gt in [1.0, 5.0, 12.0] {
            let case = DepolarizingCase::new(0.75, gt).expect("case");
            let p = EntropyParams::new(0.3, 0.85).expect("params");
            let fam = depolarizing_family(DepolarizingParams::new(1.0).expect("rate"));
            let rho0 = bloch_state(BlochVector::new(0.75, 0.3, 0.0).expect("r < 1")).expect("state");
            let tau = qsl_nonunitary(&fam, &rho0, gt, p, 4001).map(|q| q.tau_fwd).unwrap_or(f64::NAN);
            let want = oracles::depolarizing_tau(&case, p);
            worst = worst.max(((tau - want) / want).abs());
        }
        out.push(check("depolarizing speed limit (relative)", worst, 1e-6));

        let (mut worst_k, mut worst_s): (f64, f64) = (0.0, 0.0);
        for _ in 0..50 {
            let s = [0.5, 2.0, 10.0][rng.random_range(0..3)];
            let case = TwoQubitAdCase::new(rng.random_range(0.0..1.0), rng.random_range(0.0..20.0), s).expect("case");
            let fam = amplitude_damping_family(AmplitudeDampingParams::new(1.0, s).expect("params"));
            let rho0 = ghz_mixed(GhzMixedParams::new(case.p).expect("weight")).expect("state");
            let traj = evolve_kraus(&fam, &rho0, case.lambda_tau, 2).expect("trajectory");
            worst_k = worst_k.max((traj.final_state().k_min() - oracles::ad_kmin(&case)).abs());
            let terms: f64 = kraus_speed_terms(&fam, &rho0, case.lambda_tau).expect("terms").iter().sum();
            worst_s = worst_s.max((terms - oracles::ad_kraus_norm_sum(&case)).abs());
        }
        out.push(check("two-qubit smallest eigenvalue", worst_k, 1e-9));
        out.push(check("two-qubit Kraus norm sum", worst_s, 1e-9));
        out
    }

    pub fn render(results: &[CheckResult]) -> String {
        results
            .iter()
            .map(|r| {
                format!(
                    "{} {}: worst {:.3e} (tolerance {:.0e})\n",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.worst,
                    r.tolerance
                )
            })
            .collect()
    }
}
