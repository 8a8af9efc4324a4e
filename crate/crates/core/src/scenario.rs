//! Batch scenarios: a TOML file names a drive (or preset), an initial state,
//! a time grid, a measurement basis and a list of tasks. Each task produces
//! CSV trajectories and/or a TOML report.
//!
//! ```toml
//! preset = "fig5"
//! tasks = ["evolve", "phase_check"]
//! initial_state = "1"
//!
//! [grid]
//! t_end = 0.5
//! n_points = 1001
//! ```

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::darkstate::{dark_report, find_dark_states, DarkStateReport};
use crate::drive::{conjugate_phase, Drive, DriveConfig};
use crate::dynamics::{
    checkerboard_class, coherence_series, eigenvalue_pairing_check, evolve, fidelity_series,
    phase_comparison, PhaseFrame, TimeGrid, Trajectory, DEFAULT_PHASE_THRESHOLD,
};
use crate::error::Error;
use crate::operator::{c, eig_hermitian, OrthonormalBasis, StateVector};
use crate::preset::{cpt_basis_for, preset, Preset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Evolve,
    PhaseCheck,
    Fidelity,
    Coherence,
    DarkReport,
    PairingCheck,
}

impl Task {
    pub const ALL: [Task; 6] = [
        Task::Evolve,
        Task::PhaseCheck,
        Task::Fidelity,
        Task::Coherence,
        Task::DarkReport,
        Task::PairingCheck,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Evolve => "evolve",
            Task::PhaseCheck => "phase_check",
            Task::Fidelity => "fidelity",
            Task::Coherence => "coherence",
            Task::DarkReport => "dark_report",
            Task::PairingCheck => "pairing_check",
        }
    }

    pub fn parse(name: &str) -> Option<Task> {
        Task::ALL.into_iter().find(|t| t.as_str() == name)
    }
}

/// Failure of a scenario run, mapped onto the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Schema(String),
    Precondition(String),
    CheckFailed(String),
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Io(_) => 1,
            RunError::Schema(_) => 2,
            RunError::Precondition(_) => 3,
            RunError::CheckFailed(_) => 4,
        }
    }

    fn field(field: &str, err: Error) -> Self {
        match err {
            Error::Precondition(_) | Error::NoClosedForm(_) | Error::NoConvergence => {
                RunError::Precondition(format!("{field}: {err}"))
            }
            _ => RunError::Schema(format!("{field}: {err}")),
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Schema(m) => write!(f, "schema error: {m}"),
            RunError::Precondition(m) => write!(f, "precondition failed: {m}"),
            RunError::CheckFailed(m) => write!(f, "check failed: {m}"),
            RunError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

type RunResult<T> = std::result::Result<T, RunError>;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum StateSpec {
    Named(String),
    Components(Vec<[f64; 2]>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum BasisSpec {
    Named(String),
    Explicit {
        vectors: Vec<Vec<[f64; 2]>>,
        #[serde(default)]
        labels: Option<Vec<String>>,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSpec {
    t_start: Option<f64>,
    t_end: Option<f64>,
    n_points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSpec {
    dir: Option<PathBuf>,
    format: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoherenceSpec {
    bra: StateSpec,
    ket: StateSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    preset: Option<String>,
    drive: Option<Drive>,
    label: Option<String>,
    initial_state: Option<StateSpec>,
    #[serde(default)]
    grid: GridSpec,
    measurement_basis: Option<BasisSpec>,
    tasks: Vec<Task>,
    #[serde(default)]
    output: OutputSpec,
    threshold: Option<f64>,
    frame: Option<PhaseFrame>,
    coherence: Option<CoherenceSpec>,
}

/// A fully resolved scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub config: DriveConfig,
    pub initial_state: StateVector,
    pub grid: TimeGrid,
    pub basis: OrthonormalBasis,
    pub tasks: Vec<Task>,
    pub threshold: f64,
    /// Absolute tolerance overriding the scaled defaults of the checks.
    pub tolerance: Option<f64>,
    pub frame: PhaseFrame,
    pub coherence_pair: (StateVector, StateVector),
    pub output_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub tolerance: Option<f64>,
    pub points: Option<usize>,
}

/// Result of one task: file contents keyed by file name plus a one-line
/// summary.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskOutput {
    pub task: Task,
    pub files: Vec<(String, String)>,
    pub summary: String,
    /// `false` when a check task found its property violated.
    pub passed: bool,
}

fn components(field: &str, comps: &[[f64; 2]], dim: usize) -> RunResult<StateVector> {
    if comps.len() != dim {
        return Err(RunError::Schema(format!(
            "{field}: expected {dim} components, found {}",
            comps.len()
        )));
    }
    if comps.iter().flatten().any(|x| !x.is_finite()) {
        return Err(RunError::Schema(format!(
            "{field}: components must be finite"
        )));
    }
    StateVector::normalized(
        comps.iter().map(|[re, im]| c(*re, *im)).collect(),
        "natural",
    )
    .map_err(|e| RunError::field(field, e))
}

struct Resolver<'a> {
    preset: Option<&'a Preset>,
    config: &'a DriveConfig,
    basis: &'a OrthonormalBasis,
}

impl Resolver<'_> {
    fn state(&self, field: &str, spec: &StateSpec) -> RunResult<StateVector> {
        let dim = self.config.dim();
        match spec {
            StateSpec::Components(comps) => components(field, comps, dim),
            StateSpec::Named(label) => self
                .preset
                .and_then(|p| p.state(label))
                .or_else(|| self.basis.get(label).cloned())
                .or_else(|| {
                    cpt_basis_for(self.config)
                        .ok()
                        .and_then(|b| b.get(label).cloned())
                })
                .or_else(|| match label.parse::<usize>() {
                    Ok(k) if (1..=dim).contains(&k) => Some(StateVector::basis_state(dim, k)),
                    _ => None,
                })
                .ok_or_else(|| RunError::Schema(format!("{field}: unknown state `{label}`"))),
        }
    }
}

fn resolve_basis(
    spec: Option<&BasisSpec>,
    preset: Option<&Preset>,
    config: &DriveConfig,
) -> RunResult<OrthonormalBasis> {
    let field = "measurement_basis";
    let dim = config.dim();
    match spec {
        None => Ok(preset
            .map(|p| p.measurement.clone())
            .unwrap_or_else(|| OrthonormalBasis::natural(dim))),
        Some(BasisSpec::Named(name)) => match name.as_str() {
            "natural" => Ok(OrthonormalBasis::natural(dim)),
            "cpt" => cpt_basis_for(config).map_err(|e| RunError::field(field, e)),
            "table1" => preset.and_then(|p| p.table_basis()).ok_or_else(|| {
                RunError::Schema(format!("{field}: no tabulated basis for this drive"))
            }),
            other => Err(RunError::Schema(format!(
                "{field}: unknown basis `{other}` (expected natural, cpt, table1 or explicit vectors)"
            ))),
        },
        Some(BasisSpec::Explicit { vectors, labels }) => {
            let states = vectors
                .iter()
                .map(|v| components(field, v, dim))
                .collect::<RunResult<Vec<_>>>()?;
            let basis = match labels {
                Some(l) => OrthonormalBasis::new(states, l.clone()),
                None => OrthonormalBasis::unlabeled(states),
            };
            basis.map_err(|e| RunError::field(field, e))
        }
    }
}

impl Scenario {
    pub fn from_file(path: &Path) -> RunResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scenario".into());
        Self::from_toml_str(&text, &name, base)
    }

    /// Parses a scenario; relative output directories resolve against `base`.
    pub fn from_toml_str(text: &str, name: &str, base: &Path) -> RunResult<Self> {
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| RunError::Schema(e.to_string()))?;
        if file.tasks.is_empty() {
            return Err(RunError::Schema(
                "tasks: at least one task is required".into(),
            ));
        }
        if let Some(fmt) = &file.output.format {
            if fmt != "csv" {
                return Err(RunError::Schema(format!(
                    "output.format: unsupported format `{fmt}` (expected csv)"
                )));
            }
        }
        let preset = match &file.preset {
            Some(n) => Some(preset(n).map_err(|e| RunError::Schema(format!("preset: {e}")))?),
            None => None,
        };
        let config = match (&file.drive, &preset) {
            (Some(_), Some(_)) => {
                return Err(RunError::Schema(
                    "preset/drive: give exactly one of them".into(),
                ))
            }
            (None, None) => {
                return Err(RunError::Schema(
                    "preset/drive: one of them is required".into(),
                ))
            }
            (Some(d), None) => {
                let drive = d.validated().map_err(|e| RunError::field("drive", e))?;
                DriveConfig {
                    drive,
                    label: file.label.clone(),
                }
            }
            (None, Some(p)) => p.config.clone(),
        };
        let grid = TimeGrid::new(
            file.grid.t_start.unwrap_or(0.0),
            file.grid.t_end.unwrap_or(crate::dynamics::DEFAULT_T_END),
            file.grid
                .n_points
                .unwrap_or(crate::dynamics::DEFAULT_POINTS),
        )
        .map_err(|e| RunError::field("grid", e))?;
        let basis = resolve_basis(file.measurement_basis.as_ref(), preset.as_ref(), &config)?;
        let resolver = Resolver {
            preset: preset.as_ref(),
            config: &config,
            basis: &basis,
        };
        let initial_state = match &file.initial_state {
            Some(spec) => resolver.state("initial_state", spec)?,
            None => preset
                .as_ref()
                .map(|p| p.initial_state().clone())
                .unwrap_or_else(|| StateVector::basis_state(config.dim(), 1)),
        };
        let coherence_pair = match &file.coherence {
            Some(cs) => (
                resolver.state("coherence.bra", &cs.bra)?,
                resolver.state("coherence.ket", &cs.ket)?,
            ),
            None => {
                let (a, b) = preset
                    .as_ref()
                    .and_then(|p| p.coherence_pair)
                    .unwrap_or(("1", "2"));
                (
                    resolver.state("coherence.bra", &StateSpec::Named(a.into()))?,
                    resolver.state("coherence.ket", &StateSpec::Named(b.into()))?,
                )
            }
        };
        let threshold = file.threshold.unwrap_or(DEFAULT_PHASE_THRESHOLD);
        if !(threshold > 0.0 && threshold.is_finite()) {
            return Err(RunError::Schema(
                "threshold: must be positive and finite".into(),
            ));
        }
        Ok(Scenario {
            name: name.to_string(),
            config,
            initial_state,
            grid,
            basis,
            tasks: file.tasks,
            threshold,
            tolerance: None,
            frame: file
                .frame
                .or(preset.as_ref().map(|p| p.frame))
                .unwrap_or_default(),
            coherence_pair,
            output_dir: file.output.dir.map(|d| base.join(d)),
        })
    }

    /// Scenario running `tasks` on a preset with its documented defaults.
    pub fn from_preset(name: &str, tasks: Vec<Task>) -> RunResult<Self> {
        let p = preset(name).map_err(|e| RunError::Schema(format!("preset: {e}")))?;
        let resolver = Resolver {
            preset: Some(&p),
            config: &p.config,
            basis: &p.measurement,
        };
        let (a, b) = p.coherence_pair.unwrap_or(("1", "2"));
        let coherence_pair = (
            resolver.state("coherence.bra", &StateSpec::Named(a.into()))?,
            resolver.state("coherence.ket", &StateSpec::Named(b.into()))?,
        );
        Ok(Scenario {
            name: p.name.to_string(),
            config: p.config.clone(),
            initial_state: p.initial_state().clone(),
            grid: TimeGrid::figure_default(),
            basis: p.measurement.clone(),
            tasks,
            threshold: DEFAULT_PHASE_THRESHOLD,
            tolerance: None,
            frame: p.frame,
            coherence_pair,
            output_dir: None,
        })
    }

    pub fn apply(&mut self, options: &RunOptions) -> RunResult<()> {
        if let Some(dir) = &options.out_dir {
            self.output_dir = Some(dir.clone());
        }
        if let Some(tol) = options.tolerance {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(RunError::Schema(
                    "--tolerance: must be positive and finite".into(),
                ));
            }
            self.tolerance = Some(tol);
            self.threshold = tol;
        }
        if let Some(n) = options.points {
            self.grid = TimeGrid::new(self.grid.t_start, self.grid.t_end, n)
                .map_err(|e| RunError::field("--points", e))?;
        }
        Ok(())
    }

    pub fn execute(&self) -> RunResult<Vec<TaskOutput>> {
        self.tasks.iter().map(|t| self.run_task(*t)).collect()
    }

    fn run_task(&self, task: Task) -> RunResult<TaskOutput> {
        let field = task.as_str();
        let wrap = |e: Error| RunError::field(field, e);
        match task {
            Task::Evolve => {
                let traj = evolve(
                    &self.config.build(),
                    &self.initial_state,
                    &self.grid,
                    &self.basis,
                )
                .map_err(wrap)?;
                Ok(TaskOutput {
                    task,
                    files: vec![("evolve.csv".into(), trajectory_csv(&traj)?)],
                    summary: format!("evolve: {} points", self.grid.n_points),
                    passed: true,
                })
            }
            Task::PhaseCheck => {
                let cmp = phase_comparison(
                    &self.config,
                    &self.initial_state,
                    &self.grid,
                    &self.basis,
                    self.threshold,
                    self.frame,
                )
                .map_err(wrap)?;
                let r = &cmp.report;
                let report = PhaseReport {
                    symmetric: r.symmetric,
                    deviation: r.max_pop_deviation,
                    threshold: r.threshold,
                    frame: self.frame.as_str().into(),
                    phase: self.config.phase(),
                    labels: cmp.plus.basis_labels.clone(),
                    per_state_deviation: r.per_state_deviation.clone(),
                };
                Ok(TaskOutput {
                    task,
                    files: vec![
                        (
                            "phase_check.csv".into(),
                            interleaved_csv(&cmp.plus, &cmp.minus)?,
                        ),
                        ("phase_check.toml".into(), to_toml(&report)?),
                    ],
                    summary: format!(
                        "phase_check: symmetric={} deviation={:e} threshold={:e}",
                        r.symmetric, r.max_pop_deviation, r.threshold
                    ),
                    passed: r.symmetric,
                })
            }
            Task::Fidelity => {
                let f =
                    fidelity_series(&self.config, &self.initial_state, &self.grid).map_err(wrap)?;
                let rows = self
                    .grid
                    .points()
                    .into_iter()
                    .zip(&f.values)
                    .map(|(t, v)| vec![t, *v])
                    .collect::<Vec<_>>();
                let min = f.values.iter().copied().fold(f64::INFINITY, f64::min);
                Ok(TaskOutput {
                    task,
                    files: vec![("fidelity.csv".into(), csv_text(&["t", "fidelity"], &rows)?)],
                    summary: format!("fidelity: min={min:e}"),
                    passed: true,
                })
            }
            Task::Coherence => {
                let (bra, ket) = &self.coherence_pair;
                let plus =
                    coherence_series(&self.config, &self.initial_state, &self.grid, bra, ket)
                        .map_err(wrap)?;
                let minus = coherence_series(
                    &conjugate_phase(&self.config),
                    &self.initial_state,
                    &self.grid,
                    bra,
                    ket,
                )
                .map_err(wrap)?;
                let rows = self
                    .grid
                    .points()
                    .into_iter()
                    .zip(plus.iter().zip(&minus))
                    .map(|(t, (p, m))| vec![t, p.re, p.im, m.re, m.im])
                    .collect::<Vec<_>>();
                let antisymmetry = plus
                    .iter()
                    .zip(&minus)
                    .map(|(p, m)| (p + m).norm())
                    .fold(0.0, f64::max);
                Ok(TaskOutput {
                    task,
                    files: vec![(
                        "coherence.csv".into(),
                        csv_text(&["t", "plus_re", "plus_im", "minus_re", "minus_im"], &rows)?,
                    )],
                    summary: format!("coherence: max|plus + minus|={antisymmetry:e}"),
                    passed: true,
                })
            }
            Task::DarkReport => {
                let report = match self.tolerance {
                    Some(tol) => {
                        let mut r =
                            find_dark_states(&self.config.build(), Some(tol)).map_err(wrap)?;
                        r.residual = dark_report(&self.config).map_err(wrap)?.residual;
                        r
                    }
                    None => dark_report(&self.config).map_err(wrap)?,
                };
                let summary = format!(
                    "dark_report: exists={} degeneracy={} residual={:e}",
                    report.exists, report.degeneracy, report.residual
                );
                Ok(TaskOutput {
                    task,
                    files: vec![(
                        "dark_report.toml".into(),
                        to_toml(&DarkReportFile::from(&report))?,
                    )],
                    summary,
                    passed: true,
                })
            }
            Task::PairingCheck => {
                let h = self.config.build();
                let tol = self.tolerance.unwrap_or(1e-10 * (1.0 + h.scale()));
                let eigenvalues = eig_hermitian(&h).map_err(wrap)?.eigenvalues;
                let n = eigenvalues.len();
                let deviation = (0..n)
                    .map(|i| (eigenvalues[i] + eigenvalues[n - 1 - i]).abs())
                    .fold(0.0, f64::max);
                let paired = eigenvalue_pairing_check(&h, tol).map_err(wrap)?;
                let report = PairingReport {
                    symmetric: paired,
                    deviation,
                    tolerance: tol,
                    checkerboard: checkerboard_class(h.matrix(), tol).as_str().into(),
                    eigenvalues,
                };
                Ok(TaskOutput {
                    task,
                    files: vec![("pairing_check.toml".into(), to_toml(&report)?)],
                    summary: format!(
                        "pairing_check: symmetric={paired} deviation={deviation:e} checkerboard={}",
                        report.checkerboard
                    ),
                    passed: paired,
                })
            }
        }
    }
}

#[derive(Serialize)]
struct PhaseReport {
    symmetric: bool,
    deviation: f64,
    threshold: f64,
    frame: String,
    phase: f64,
    labels: Vec<String>,
    per_state_deviation: Vec<f64>,
}

#[derive(Serialize)]
struct PairingReport {
    symmetric: bool,
    deviation: f64,
    tolerance: f64,
    checkerboard: String,
    eigenvalues: Vec<f64>,
}

#[derive(Serialize)]
struct DarkReportFile {
    exists: bool,
    residual: f64,
    degeneracy: usize,
    tolerance: f64,
    dark_states: Vec<Vec<[f64; 2]>>,
    bright_states: Vec<Vec<[f64; 2]>>,
}

fn pairs(v: &StateVector) -> Vec<[f64; 2]> {
    v.to_vec().iter().map(|z| [z.re, z.im]).collect()
}

impl From<&DarkStateReport> for DarkReportFile {
    fn from(r: &DarkStateReport) -> Self {
        Self {
            exists: r.exists,
            residual: r.residual,
            degeneracy: r.degeneracy,
            tolerance: r.tolerance,
            dark_states: r.dark_states.iter().map(pairs).collect(),
            bright_states: r.bright_states.iter().map(pairs).collect(),
        }
    }
}

fn to_toml(value: &impl Serialize) -> RunResult<String> {
    toml::to_string(value).map_err(|e| RunError::Io(format!("report serialization: {e}")))
}

/// 17 significant digits, enough to round-trip every `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_text(header: &[impl AsRef<str>], rows: &[Vec<f64>]) -> RunResult<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| RunError::Io(e.to_string());
    w.write_record(header.iter().map(|h| h.as_ref()))
        .map_err(io)?;
    for row in rows {
        w.write_record(row.iter().map(|x| format_float(*x)))
            .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| RunError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| RunError::Io(e.to_string()))
}

/// Header `t,<label>...`, one row per grid point.
pub fn trajectory_csv(traj: &Trajectory) -> RunResult<String> {
    let mut header = vec!["t".to_string()];
    header.extend(traj.basis_labels.iter().cloned());
    let rows = traj
        .times()
        .into_iter()
        .zip(&traj.populations)
        .map(|(t, p)| std::iter::once(t).chain(p.iter().copied()).collect())
        .collect::<Vec<Vec<f64>>>();
    csv_text(&header, &rows)
}

/// Header `t,<label>+,<label>-,...` with both runs side by side.
pub fn interleaved_csv(plus: &Trajectory, minus: &Trajectory) -> RunResult<String> {
    let mut header = vec!["t".to_string()];
    for l in &plus.basis_labels {
        header.push(format!("{l}+"));
        header.push(format!("{l}-"));
    }
    let rows = plus
        .times()
        .into_iter()
        .zip(plus.populations.iter().zip(&minus.populations))
        .map(|(t, (p, m))| {
            let mut row = vec![t];
            for (a, b) in p.iter().zip(m) {
                row.push(*a);
                row.push(*b);
            }
            row
        })
        .collect::<Vec<_>>();
    csv_text(&header, &rows)
}

/// Parses a CSV written by [`trajectory_csv`] back into header and rows.
pub fn read_csv(text: &str) -> RunResult<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r
        .headers()
        .map_err(|e| RunError::Schema(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(|e| RunError::Schema(e.to_string()))?;
        rows.push(
            record
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| RunError::Schema(format!("{s}: {e}")))
                })
                .collect::<RunResult<Vec<_>>>()?,
        );
    }
    Ok((header, rows))
}

/// Writes every output file under `dir` and returns the written paths.
pub fn write_outputs(dir: &Path, outputs: &[TaskOutput]) -> RunResult<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| RunError::Io(format!("{}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for out in outputs {
        for (name, content) in &out.files {
            let path = dir.join(name);
            fs::write(&path, content)
                .map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Runs a scenario file. Outputs go to `--out`, else `output.dir`, else
/// `<stem>_out` next to the file.
pub fn run_file(path: &Path, options: &RunOptions) -> RunResult<(Vec<TaskOutput>, PathBuf)> {
    let mut scenario = Scenario::from_file(path)?;
    scenario.apply(options)?;
    let outputs = scenario.execute()?;
    let dir = scenario.output_dir.clone().unwrap_or_else(|| {
        path.parent()
            .unwrap_or(Path::new("."))
            .join(format!("{}_out", scenario.name))
    });
    write_outputs(&dir, &outputs)?;
    Ok((outputs, dir))
}

/// First failed check, for `--assert`.
pub fn first_failure(outputs: &[TaskOutput]) -> Option<RunError> {
    outputs
        .iter()
        .find(|o| !o.passed)
        .map(|o| RunError::CheckFailed(o.summary.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> RunResult<Scenario> {
        Scenario::from_toml_str(text, "t", Path::new("."))
    }

    #[test]
    fn fig5_phase_check_is_symmetric() {
        let s = parse("preset = \"fig5\"\ntasks = [\"phase_check\"]\n").unwrap();
        let out = s.execute().unwrap();
        assert!(out[0].passed);
        let report: toml::Table = toml::from_str(&out[0].files[1].1).unwrap();
        assert_eq!(report["symmetric"].as_bool(), Some(true));
        assert!(report["deviation"].as_float().unwrap() < 1e-9);
    }

    #[test]
    fn dark_report_of_delta_d1() {
        let s = parse("preset = \"Delta-D-1\"\ntasks = [\"dark_report\"]\n").unwrap();
        let out = s.execute().unwrap();
        let report: toml::Table = toml::from_str(&out[0].files[0].1).unwrap();
        assert_eq!(report["exists"].as_bool(), Some(true));
        let d = report["dark_states"].as_array().unwrap()[0]
            .as_array()
            .unwrap();
        let r3 = 1.0 / 3f64.sqrt();
        let expected = [[r3, 0.0], [0.0, r3], [-r3, 0.0]];
        for (got, want) in d.iter().zip(expected) {
            let got = got.as_array().unwrap();
            assert!((got[0].as_float().unwrap() - want[0]).abs() < 1e-12);
            assert!((got[1].as_float().unwrap() - want[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn schema_violations() {
        let degenerate = "preset = \"fig5\"\ntasks = [\"evolve\"]\n[grid]\nt_start = 0.0\nt_end = 0.0\nn_points = 2\n";
        let err = parse(degenerate).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("grid"));

        let err = parse("preset = \"fig9\"\ntasks = [\"evolve\"]\n").unwrap_err();
        assert!(matches!(err, RunError::Schema(_)) && err.to_string().contains("fig9"));

        let err = parse("preset = \"fig5\"\ntasks = []\n").unwrap_err();
        assert!(err.to_string().contains("tasks"));

        let err = parse("preset = \"fig5\"\ntasks = [\"evolve\"]\ninitial_state = [[1.0, 0.0]]\n")
            .unwrap_err();
        assert!(err.to_string().contains("initial_state"));

        let err = parse("preset = \"fig5\"\ntasks = [\"evolve\"]\ninitial_state = [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]\n").unwrap_err();
        assert!(err.to_string().contains("initial_state"));

        let err = parse("preset = \"fig5\"\ntasks = [\"evolve\"]\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn explicit_drive_and_state() {
        let text = r#"
tasks = ["evolve", "pairing_check"]
initial_state = [[3.0, 0.0], [0.0, 4.0], [0.0, 0.0], [0.0, 0.0]]
measurement_basis = "cpt"

[drive]
topology = "diamond"
omega_12 = 1.0
omega_23 = 2.0
omega_34 = 3.0
omega_41 = 4.0
phi = 1.5707963267948966
"#;
        let s = parse(text).unwrap();
        assert!((s.initial_state.amplitude(1).re - 0.6).abs() < 1e-15);
        assert_eq!(s.basis.labels()[0], "BL");
        let out = s.execute().unwrap();
        assert!(out[1].passed);
    }

    #[test]
    fn negative_rabi_rejected() {
        let text = "tasks = [\"evolve\"]\n[drive]\ntopology = \"triangle\"\nomega_12 = -1.0\nomega_23 = 1.0\nomega_31 = 1.0\n";
        let err = parse(text).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("omega_12"));
    }

    #[test]
    fn trajectory_round_trip_is_exact() {
        let s = Scenario::from_preset("fig2a", vec![Task::Evolve]).unwrap();
        let traj = evolve(&s.config.build(), &s.initial_state, &s.grid, &s.basis).unwrap();
        let text = trajectory_csv(&traj).unwrap();
        let (header, rows) = read_csv(&text).unwrap();
        assert_eq!(header, ["t", "1", "2", "3"]);
        for (row, pops) in rows.iter().zip(&traj.populations) {
            assert_eq!(&row[1..], pops.as_slice());
        }
        assert!(!text.contains('\r'));
    }

    #[test]
    fn outputs_are_deterministic() {
        let run = || {
            Scenario::from_preset("fig3a", Task::ALL.to_vec())
                .unwrap()
                .execute()
                .unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn options_override_grid_and_threshold() {
        let mut s = Scenario::from_preset("fig2a", vec![Task::PhaseCheck]).unwrap();
        s.apply(&RunOptions {
            points: Some(11),
            tolerance: Some(10.0),
            out_dir: None,
        })
        .unwrap();
        assert_eq!(s.grid.n_points, 11);
        let out = s.execute().unwrap();
        assert!(out[0].passed);
        assert!(s
            .apply(&RunOptions {
                points: Some(1),
                ..Default::default()
            })
            .is_err());
    }
}
