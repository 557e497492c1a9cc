//! Parameter sweeps, cross-engine verification and figure-data presets.
//!
//! A [`SweepConfig`] (TOML on disk) describes a grid over occupation and
//! scrambling strength, a signal-phase policy, an engine choice and an
//! output artifact. [`run_sweep`] evaluates one row per grid point —
//! optionally on a worker pool — and serializes the rows to CSV or JSON.
//!
//! Output is deterministic: rows appear in grid order (occupation outer,
//! strength inner) regardless of the worker count, floats are printed with
//! 17 significant digits in CSV and shortest-round-trip form in JSON, and
//! repeated runs produce byte-identical files.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::analytic::{analytic_info, CaseId};
use crate::bounds::{
    bound_set, case_info, classify, optimize_phase, Engine, Objective, StrategyComparison, Winner,
};
use crate::error::{Error, Result};
use crate::fock::{ProbeKind, TruncationPolicy};
use crate::model::InfoMatrices;

/// Largest scrambling strength the numeric engine accepts by default for
/// cubic scrambling; beyond it the required basis grows too fast for the
/// default truncation ceiling.
pub const SAFE_GAMMA_CAP_CUBIC: f64 = 3.0;
/// Numeric-engine default strength cap for quadratic scrambling.
pub const SAFE_GAMMA_CAP_QUADRATIC: f64 = 10.0;
/// Environment variable supplying the default worker count.
pub const WORKERS_ENV: &str = "SCRAMBLING_METROLOGY_WORKERS";
/// Cross-engine agreement threshold used by [`crosscheck`].
pub const CROSSCHECK_TOLERANCE: f64 = 1e-6;

/// Numeric-engine strength cap for scrambling exponent `m`.
pub fn safe_gamma_cap(m: u8) -> f64 {
    if m >= 3 {
        SAFE_GAMMA_CAP_CUBIC
    } else {
        SAFE_GAMMA_CAP_QUADRATIC
    }
}

fn default_rescale_m() -> f64 {
    1.0
}

fn default_degeneracy_eps() -> f64 {
    crate::bounds::DEFAULT_DEGENERACY_EPS
}

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

/// Spacing of the strength grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridScale {
    Log,
    Linear,
}

/// Grid over the scrambling strength.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GammaGrid {
    pub scale: GridScale,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GammaGrid {
    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::Config(format!(
                "gamma_grid.points: need at least 2 grid points (got {})",
                self.points
            )));
        }
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::Config(
                "gamma_grid: min and max must be finite".into(),
            ));
        }
        if !(self.min < self.max) {
            return Err(Error::Config(format!(
                "gamma_grid: min must be smaller than max (got [{}, {}])",
                self.min, self.max
            )));
        }
        match self.scale {
            GridScale::Log if !(self.min > 0.0) => Err(Error::Config(format!(
                "gamma_grid.min: must be > 0 on a log scale (got {})",
                self.min
            ))),
            GridScale::Linear if self.min < 0.0 => Err(Error::Config(format!(
                "gamma_grid.min: must be >= 0 (got {})",
                self.min
            ))),
            _ => Ok(()),
        }
    }

    /// Grid points, with both endpoints reproduced exactly.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == 0 {
                    self.min
                } else if i == n - 1 {
                    self.max
                } else {
                    let t = i as f64 / (n - 1) as f64;
                    match self.scale {
                        GridScale::Log => {
                            (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp()
                        }
                        GridScale::Linear => self.min + t * (self.max - self.min),
                    }
                }
            })
            .collect()
    }
}

/// How the signal phase is chosen at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Phi1Mode {
    /// Use the same phase everywhere.
    Fixed { value: f64 },
    /// Minimize the given objective at every grid point.
    Optimized { objective: Objective },
}

impl std::fmt::Display for Phi1Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Phi1Mode::Fixed { .. } => f.write_str("fixed"),
            Phi1Mode::Optimized { objective } => write!(f, "optimized:{objective}"),
        }
    }
}

/// Engine selection for a sweep. `Both` reports the closed-form values and
/// attaches the worst cross-engine relative deviation to every row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineChoice {
    Analytic,
    Numeric,
    Both,
}

impl EngineChoice {
    fn uses_numeric(self) -> bool {
        matches!(self, EngineChoice::Numeric | EngineChoice::Both)
    }
}

impl std::fmt::Display for EngineChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EngineChoice::Analytic => "analytic",
            EngineChoice::Numeric => "numeric",
            EngineChoice::Both => "both",
        })
    }
}

impl std::str::FromStr for EngineChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "analytic" => Ok(EngineChoice::Analytic),
            "numeric" => Ok(EngineChoice::Numeric),
            "both" => Ok(EngineChoice::Both),
            other => Err(Error::InvalidInput(format!(
                "unknown engine {other:?}; expected analytic, numeric or both"
            ))),
        }
    }
}

/// Output serialization format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidInput(format!(
                "unknown output format {other:?}; expected csv or json"
            ))),
        }
    }
}

/// Full description of a sweep run (TOML-(de)serializable).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SweepConfig {
    pub case: CaseId,
    pub nbar_list: Vec<f64>,
    pub gamma_grid: GammaGrid,
    pub phi1: Phi1Mode,
    pub engine: EngineChoice,
    pub output: PathBuf,
    pub format: OutputFormat,
    #[serde(default)]
    pub truncation: TruncationPolicy,
    /// Worker threads; `None` falls back to the environment variable
    /// [`WORKERS_ENV`] and then to the machine's available parallelism.
    #[serde(default)]
    pub workers: Option<usize>,
    /// Repetition count dividing the reported bounds (`c_q`, `c_t`,
    /// `c_step1`, `c_step2`); all other columns are per-shot quantities and
    /// unaffected.
    #[serde(default = "default_rescale_m")]
    pub rescale_m: f64,
    /// Permit numeric-engine strengths beyond the safe cap.
    #[serde(default)]
    pub allow_beyond_cap: bool,
    #[serde(default = "default_degeneracy_eps")]
    pub degeneracy_eps: f64,
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("sweep config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Check that the sweep can run. Returns human-readable warnings for
    /// conditions that are permitted but suspicious (e.g. an overridden
    /// strength cap); errors name the offending configuration field.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        if self.nbar_list.is_empty() {
            return Err(Error::Config("nbar_list: must not be empty".into()));
        }
        for &nbar in &self.nbar_list {
            if !nbar.is_finite() || nbar <= 0.0 {
                return Err(Error::Config(format!(
                    "nbar_list: occupations must be positive and finite (got {nbar})"
                )));
            }
        }
        self.gamma_grid.validate()?;
        if matches!(self.phi1, Phi1Mode::Optimized { .. }) && !(self.gamma_grid.min > 0.0) {
            return Err(Error::Config(format!(
                "gamma_grid.min: must be > 0 when phi1 mode is optimized (got {})",
                self.gamma_grid.min
            )));
        }
        if let Phi1Mode::Fixed { value } = self.phi1 {
            if !value.is_finite() {
                return Err(Error::Config(format!(
                    "phi1.value: must be finite (got {value})"
                )));
            }
        }
        if !self.rescale_m.is_finite() || self.rescale_m <= 0.0 {
            return Err(Error::Config(format!(
                "rescale_m: must be positive and finite (got {})",
                self.rescale_m
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers: must be at least 1".into()));
        }
        if !(self.degeneracy_eps >= 0.0) {
            return Err(Error::Config(format!(
                "degeneracy_eps: must be >= 0 (got {})",
                self.degeneracy_eps
            )));
        }
        self.truncation
            .validate()
            .map_err(|e| Error::Config(format!("truncation: {e}")))?;
        if self.engine.uses_numeric() {
            let cap = safe_gamma_cap(self.case.m);
            if self.gamma_grid.max > cap {
                let msg = format!(
                    "gamma_grid.max: {} exceeds the numeric-engine safe cap {cap} for m = {}",
                    self.gamma_grid.max, self.case.m
                );
                if self.allow_beyond_cap {
                    warnings.push(format!(
                        "{msg}; proceeding because allow_beyond_cap is set — expect large \
                         bases or truncation failures"
                    ));
                } else {
                    return Err(Error::Config(format!(
                        "{msg}; set allow_beyond_cap = true to override"
                    )));
                }
            }
        }
        Ok(warnings)
    }

    /// Effective configuration as TOML, for dry-run inspection.
    pub fn describe(&self) -> String {
        let body = toml::to_string(self).unwrap_or_else(|e| format!("<unserializable: {e}>"));
        format!(
            "{body}# effective workers = {}\n# numeric safe cap (m = {}) = {}\n",
            effective_workers(self),
            self.case.m,
            safe_gamma_cap(self.case.m)
        )
    }
}

// ---------------------------------------------------------------------------
// rows
// ---------------------------------------------------------------------------

/// Health of a single sweep row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    /// All quantities computed and finite.
    Ok,
    /// The model is informationally degenerate here (bounds diverge).
    Degenerate,
    /// The numeric engine could not certify convergence within its basis
    /// ceiling; numeric-dependent values are absent.
    TruncationFailure,
}

impl std::fmt::Display for RowStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RowStatus::Ok => "ok",
            RowStatus::Degenerate => "degenerate",
            RowStatus::TruncationFailure => "truncation-failure",
        })
    }
}

/// One evaluated grid point. Every derived column is reproducible from the
/// identifying columns (`case…phi1`) alone.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SweepRow {
    pub case: CaseId,
    pub probe: ProbeKind,
    pub m: u8,
    pub nbar: f64,
    pub gamma: f64,
    pub engine: EngineChoice,
    pub phi1_mode: String,
    pub phi1: f64,
    pub q11: f64,
    pub q12: f64,
    pub q22: f64,
    pub d12: f64,
    pub det_q: f64,
    pub s: f64,
    pub det_d: f64,
    pub r: f64,
    pub c_q: f64,
    pub c_t: f64,
    pub c_step1: f64,
    pub beta_opt1: f64,
    pub c_step2: f64,
    pub beta_opt2: f64,
    pub winner: Winner,
    pub status: RowStatus,
    pub trunc_dim: Option<usize>,
    pub cross_rel_dev: Option<f64>,
    pub rescale_m: f64,
}

/// CSV column order for sweep artifacts.
pub const SWEEP_CSV_HEADER: &str = "case,probe,m,nbar,gamma,engine,phi1_mode,phi1,\
q11,q12,q22,d12,det_q,s,det_d,r,c_q,c_t,c_step1,beta_opt1,c_step2,beta_opt2,\
winner,status,trunc_dim,cross_rel_dev,rescale_m";

fn blank_row(config: &SweepConfig, nbar: f64, gamma: f64, status: RowStatus) -> SweepRow {
    SweepRow {
        case: config.case,
        probe: config.case.probe,
        m: config.case.m,
        nbar,
        gamma,
        engine: config.engine,
        phi1_mode: config.phi1.to_string(),
        phi1: f64::NAN,
        q11: f64::NAN,
        q12: f64::NAN,
        q22: f64::NAN,
        d12: f64::NAN,
        det_q: f64::NAN,
        s: f64::NAN,
        det_d: f64::NAN,
        r: f64::NAN,
        c_q: f64::NAN,
        c_t: f64::NAN,
        c_step1: f64::NAN,
        beta_opt1: f64::NAN,
        c_step2: f64::NAN,
        beta_opt2: f64::NAN,
        winner: Winner::Indeterminate,
        status,
        trunc_dim: None,
        cross_rel_dev: None,
        rescale_m: config.rescale_m,
    }
}

/// Worst relative deviation between two sets of information matrices,
/// entrywise over `(Q11, Q12, Q22, D12)`. Each entry is compared against
/// `max(|a|, |b|)`, floored at `1e-9` of the largest entry magnitude so
/// that entries which are exactly zero in one engine and merely tiny in the
/// other do not register as order-one disagreements. Used by [`crosscheck`]
/// and by `engine = both` sweeps.
pub fn max_rel_deviation(a: &InfoMatrices, b: &InfoMatrices) -> f64 {
    let pairs = [
        (a.q11, b.q11),
        (a.q12, b.q12),
        (a.q22, b.q22),
        (a.d12, b.d12),
    ];
    let scale = pairs
        .iter()
        .flat_map(|&(x, y)| [x.abs(), y.abs()])
        .fold(f64::MIN_POSITIVE, f64::max);
    pairs
        .iter()
        .map(|&(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1e-9 * scale))
        .fold(0.0, f64::max)
}

fn is_convergence_failure(err: &Error) -> bool {
    matches!(
        err,
        Error::TruncationFailure { .. } | Error::TailMass { .. }
    )
}

fn compute_row(config: &SweepConfig, nbar: f64, gamma: f64) -> Result<SweepRow> {
    let policy = &config.truncation;
    let eps = config.degeneracy_eps;
    // `Both` optimizes and reports with the closed forms; the numeric
    // engine then recomputes the matrices at the very same phase.
    let primary = match config.engine {
        EngineChoice::Numeric => Engine::Numeric,
        EngineChoice::Analytic | EngineChoice::Both => Engine::Analytic,
    };

    let phi1 = match config.phi1 {
        Phi1Mode::Fixed { value } => value,
        Phi1Mode::Optimized { objective } => {
            match optimize_phase(primary, config.case, nbar, gamma, objective, policy, eps) {
                Ok(opt) => opt.phi1,
                Err(Error::Degenerate(_)) => {
                    return Ok(blank_row(config, nbar, gamma, RowStatus::Degenerate));
                }
                Err(e) if is_convergence_failure(&e) => {
                    return Ok(blank_row(config, nbar, gamma, RowStatus::TruncationFailure));
                }
                Err(e) => return Err(e),
            }
        }
    };

    let (info, dim) = match case_info(primary, config.case, nbar, gamma, phi1, policy) {
        Ok(pair) => pair,
        Err(e) if is_convergence_failure(&e) => {
            let mut row = blank_row(config, nbar, gamma, RowStatus::TruncationFailure);
            row.phi1 = phi1;
            return Ok(row);
        }
        Err(e) => return Err(e),
    };
    let set = bound_set(&info, eps)?;

    let mut row = blank_row(
        config,
        nbar,
        gamma,
        if set.degenerate {
            RowStatus::Degenerate
        } else {
            RowStatus::Ok
        },
    );
    row.phi1 = phi1;
    row.q11 = info.q11;
    row.q12 = info.q12;
    row.q22 = info.q22;
    row.d12 = info.d12;
    row.det_q = set.det_q;
    row.s = set.s;
    row.det_d = set.det_d;
    row.r = set.r;
    row.c_q = set.c_q / config.rescale_m;
    row.c_t = set.c_t / config.rescale_m;
    row.c_step1 = set.c_step1 / config.rescale_m;
    row.beta_opt1 = set.beta_opt1;
    row.c_step2 = set.c_step2 / config.rescale_m;
    row.beta_opt2 = set.beta_opt2;
    row.winner = classify(set.c_q, set.c_t, set.c_step1.min(set.c_step2));
    row.trunc_dim = dim;

    if config.engine == EngineChoice::Both {
        match case_info(Engine::Numeric, config.case, nbar, gamma, phi1, policy) {
            Ok((numeric, ndim)) => {
                row.trunc_dim = ndim;
                row.cross_rel_dev = Some(max_rel_deviation(&info, &numeric));
            }
            Err(e) if is_convergence_failure(&e) => {
                row.status = RowStatus::TruncationFailure;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(row)
}

fn effective_workers(config: &SweepConfig) -> usize {
    config
        .workers
        .or_else(|| {
            std::env::var(WORKERS_ENV)
                .ok()
                .and_then(|v| v.parse::<usize>().ok())
                .filter(|&n| n >= 1)
        })
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .max(1)
}

/// Evaluate all grid rows in deterministic (occupation-major) order.
///
/// The worker pool only affects wall-clock time: tasks are claimed from a
/// shared counter, buffered per worker and reassembled in grid order, so
/// the result is identical for any worker count. Per-point convergence
/// failures are recorded in the row status; any other error aborts the
/// sweep (the error from the earliest grid point wins, for determinism).
pub fn compute_rows(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let gammas = config.gamma_grid.values();
    let tasks: Vec<(f64, f64)> = config
        .nbar_list
        .iter()
        .flat_map(|&nbar| gammas.iter().map(move |&gamma| (nbar, gamma)))
        .collect();
    let workers = effective_workers(config).min(tasks.len().max(1));

    if workers <= 1 {
        return tasks
            .iter()
            .map(|&(nbar, gamma)| compute_row(config, nbar, gamma))
            .collect();
    }

    let next = AtomicUsize::new(0);
    let results: Vec<(usize, Result<SweepRow>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= tasks.len() {
                            break;
                        }
                        let (nbar, gamma) = tasks[i];
                        done.push((i, compute_row(config, nbar, gamma)));
                    }
                    done
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });

    let mut rows: Vec<Option<SweepRow>> = (0..tasks.len()).map(|_| None).collect();
    let mut first_error: Option<(usize, Error)> = None;
    for (i, result) in results {
        match result {
            Ok(row) => rows[i] = Some(row),
            Err(e) => {
                if first_error.as_ref().is_none_or(|(j, _)| i < *j) {
                    first_error = Some((i, e));
                }
            }
        }
    }
    if let Some((_, e)) = first_error {
        return Err(e);
    }
    Ok(rows
        .into_iter()
        .map(|r| r.expect("every claimed task produced a row"))
        .collect())
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

/// Fixed-width float formatting for CSV: 17 significant digits, with
/// `NaN`/`inf`/`-inf` spelled out.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.16e}")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

fn row_record(row: &SweepRow) -> String {
    let fields = [
        row.case.label().to_string(),
        row.probe.to_string(),
        row.m.to_string(),
        fmt_float(row.nbar),
        fmt_float(row.gamma),
        row.engine.to_string(),
        row.phi1_mode.clone(),
        fmt_float(row.phi1),
        fmt_float(row.q11),
        fmt_float(row.q12),
        fmt_float(row.q22),
        fmt_float(row.d12),
        fmt_float(row.det_q),
        fmt_float(row.s),
        fmt_float(row.det_d),
        fmt_float(row.r),
        fmt_float(row.c_q),
        fmt_float(row.c_t),
        fmt_float(row.c_step1),
        fmt_float(row.beta_opt1),
        fmt_float(row.c_step2),
        fmt_float(row.beta_opt2),
        row.winner.to_string(),
        row.status.to_string(),
        row.trunc_dim.map(|d| d.to_string()).unwrap_or_default(),
        row.cross_rel_dev.map(fmt_float).unwrap_or_default(),
        fmt_float(row.rescale_m),
    ];
    fields
        .iter()
        .map(|f| csv_field(f))
        .collect::<Vec<_>>()
        .join(",")
}

/// Render sweep rows as a CSV document (header + one record per row).
pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(256 * (rows.len() + 1));
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row_record(row));
        out.push('\n');
    }
    out
}

/// Render sweep rows as a pretty-printed JSON array. Non-finite floats
/// become `null` (JSON has no literal for them); the CSV format preserves
/// them as `NaN`/`inf` strings.
pub fn rows_to_json(rows: &[SweepRow]) -> Result<String> {
    let mut text = serde_json::to_string_pretty(rows)
        .map_err(|e| Error::Config(format!("serializing rows to JSON: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn write_output(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, contents)?;
    Ok(())
}

/// What a sweep produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSummary {
    pub rows: usize,
    /// Rows whose status is not `ok`.
    pub flagged: usize,
    pub path: PathBuf,
}

/// Validate, evaluate and serialize a sweep in one call.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepSummary> {
    config.validate()?;
    let rows = compute_rows(config)?;
    let contents = match config.format {
        OutputFormat::Csv => rows_to_csv(&rows),
        OutputFormat::Json => rows_to_json(&rows)?,
    };
    write_output(&config.output, &contents)?;
    Ok(SweepSummary {
        rows: rows.len(),
        flagged: rows.iter().filter(|r| r.status != RowStatus::Ok).count(),
        path: config.output.clone(),
    })
}

// ---------------------------------------------------------------------------
// cross-engine verification
// ---------------------------------------------------------------------------

/// Entrywise relative deviations between the two engines.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EntryDeviations {
    pub q11: f64,
    pub q12: f64,
    pub q22: f64,
    pub d12: f64,
}

impl EntryDeviations {
    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> {
        [
            ("q11", self.q11),
            ("q12", self.q12),
            ("q22", self.q22),
            ("d12", self.d12),
        ]
        .into_iter()
    }
}

/// Outcome of one cross-engine comparison point.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CrosscheckReport {
    pub case: CaseId,
    pub nbar: f64,
    pub gamma: f64,
    pub phi1: f64,
    pub analytic: InfoMatrices,
    pub numeric: InfoMatrices,
    /// Truncation dimension certified by the numeric engine.
    pub dim: usize,
    pub deviations: EntryDeviations,
    pub max_rel_dev: f64,
    /// Both engines agree the point is informationally degenerate (e.g. at
    /// zero strength); the comparison passes regardless of deviations.
    pub both_degenerate: bool,
    pub pass: bool,
}

/// Compare the closed forms against the numeric engine at one point.
///
/// The strength must lie within the numeric safe cap. Passing means every
/// entrywise relative deviation is below [`CROSSCHECK_TOLERANCE`], or both
/// engines flag degeneracy.
pub fn crosscheck(
    case: CaseId,
    nbar: f64,
    gamma: f64,
    phi1: f64,
    policy: &TruncationPolicy,
) -> Result<CrosscheckReport> {
    let cap = safe_gamma_cap(case.m);
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "strength must be finite and >= 0 (got {gamma})"
        )));
    }
    if gamma > cap {
        return Err(Error::InvalidInput(format!(
            "strength {gamma} exceeds the numeric safe cap {cap} for m = {}",
            case.m
        )));
    }
    let analytic = analytic_info(case, nbar, gamma, phi1)?;
    let (numeric, dim) = case_info(Engine::Numeric, case, nbar, gamma, phi1, policy)?;
    let eps = crate::bounds::DEFAULT_DEGENERACY_EPS;
    let both_degenerate = bound_set(&analytic, eps)?.degenerate && bound_set(&numeric, eps)?.degenerate;

    let scale = [
        analytic.q11, analytic.q12, analytic.q22, analytic.d12, numeric.q11, numeric.q12,
        numeric.q22, numeric.d12,
    ]
    .iter()
    .fold(f64::MIN_POSITIVE, |acc, v| acc.max(v.abs()));
    let dev = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-9 * scale);
    let deviations = EntryDeviations {
        q11: dev(analytic.q11, numeric.q11),
        q12: dev(analytic.q12, numeric.q12),
        q22: dev(analytic.q22, numeric.q22),
        d12: dev(analytic.d12, numeric.d12),
    };
    let max_rel_dev = deviations.iter().map(|(_, v)| v).fold(0.0, f64::max);
    let dim = dim.expect("numeric engine reports its truncation dimension");
    Ok(CrosscheckReport {
        case,
        nbar,
        gamma,
        phi1,
        analytic,
        numeric,
        dim,
        deviations,
        max_rel_dev,
        both_degenerate,
        pass: both_degenerate || max_rel_dev < CROSSCHECK_TOLERANCE,
    })
}

// ---------------------------------------------------------------------------
// strategy tables and figure presets
// ---------------------------------------------------------------------------

/// Configuration for a strategy-comparison table (TOML-(de)serializable).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StrategyRunConfig {
    pub nbar: f64,
    pub gamma_grid: GammaGrid,
    pub engine: Engine,
    #[serde(default)]
    pub truncation: TruncationPolicy,
    #[serde(default = "default_degeneracy_eps")]
    pub degeneracy_eps: f64,
}

impl StrategyRunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("strategy config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        if !self.nbar.is_finite() || self.nbar <= 0.0 {
            return Err(Error::Config(format!(
                "nbar: must be positive and finite (got {})",
                self.nbar
            )));
        }
        self.gamma_grid.validate()?;
        if !(self.gamma_grid.min > 0.0) {
            return Err(Error::Config(
                "gamma_grid.min: strategy comparison needs strictly positive strengths".into(),
            ));
        }
        self.truncation
            .validate()
            .map_err(|e| Error::Config(format!("truncation: {e}")))
    }

    /// Run [`compare_strategies`](crate::bounds::compare_strategies) for one case.
    pub fn run(&self, case: CaseId) -> Result<StrategyComparison> {
        self.validate()?;
        crate::bounds::compare_strategies(
            self.engine,
            case,
            self.nbar,
            &self.gamma_grid.values(),
            &self.truncation,
            self.degeneracy_eps,
        )
    }
}

/// CSV column order for strategy-comparison artifacts.
pub const STRATEGY_CSV_HEADER: &str = "gamma,phi_c_q,c_q,phi_c_t,c_t,\
phi_c_step1,c_step1,beta_opt1,phi_c_step2,c_step2,beta_opt2,winner";

/// Render a strategy comparison as a CSV document.
pub fn strategy_to_csv(comparison: &StrategyComparison) -> String {
    let mut out = String::new();
    out.push_str(STRATEGY_CSV_HEADER);
    out.push('\n');
    for p in &comparison.points {
        let fields = [
            fmt_float(p.gamma),
            fmt_float(p.phi_c_q),
            fmt_float(p.c_q),
            fmt_float(p.phi_c_t),
            fmt_float(p.c_t),
            fmt_float(p.phi_c_step1),
            fmt_float(p.c_step1),
            fmt_float(p.beta_opt1),
            fmt_float(p.phi_c_step2),
            fmt_float(p.c_step2),
            fmt_float(p.beta_opt2),
            p.winner.to_string(),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Write a strategy comparison to a CSV file.
pub fn write_strategy_csv(path: &Path, comparison: &StrategyComparison) -> Result<()> {
    write_output(path, &strategy_to_csv(comparison))
}

/// Checked-in sweep preset reproducing the optimized-sloppiness curves
/// (strength on a 61-point log grid over `[0.01, 10]`, occupations
/// `{0.5, 1, 2}`, closed-form engine) for the given case.
pub fn figure2_preset(case: CaseId) -> &'static str {
    match (case.probe, case.m) {
        (ProbeKind::SqueezedVacuum, 3) => {
            include_str!("../presets/figure2-squeezed-cubic.toml")
        }
        (ProbeKind::SqueezedVacuum, _) => {
            include_str!("../presets/figure2-squeezed-quadratic.toml")
        }
        (ProbeKind::Coherent, 3) => include_str!("../presets/figure2-coherent-cubic.toml"),
        (ProbeKind::Coherent, _) => include_str!("../presets/figure2-coherent-quadratic.toml"),
    }
}

/// Checked-in strategy-comparison preset (unit occupation, 41-point log
/// grid over `[0.01, 10]`, closed-form engine).
pub fn figure3_preset() -> &'static str {
    include_str!("../presets/figure3.toml")
}

/// Produce the four optimized-sloppiness sweep files in `dir`.
pub fn run_figure2(dir: &Path) -> Result<Vec<SweepSummary>> {
    CaseId::ALL
        .iter()
        .map(|&case| {
            let mut config = SweepConfig::from_toml_str(figure2_preset(case))?;
            config.output = dir.join(format!("figure2-{}.csv", case.label()));
            run_sweep(&config)
        })
        .collect()
}

/// Produce the four per-case strategy-comparison tables in `dir`.
pub fn run_figure3(dir: &Path) -> Result<Vec<PathBuf>> {
    let config = StrategyRunConfig::from_toml_str(figure3_preset())?;
    CaseId::ALL
        .iter()
        .map(|&case| {
            let comparison = config.run(case)?;
            let path = dir.join(format!("figure3-{}.csv", case.label()));
            write_strategy_csv(&path, &comparison)?;
            Ok(path)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
