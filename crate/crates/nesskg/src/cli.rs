//! Command-line layer: INI job configuration, job execution and CSV tables.
//!
//! A job file has `[model]`, `[reservoirs]` and `[profile]` sections plus an
//! optional section per command:
//!
//! ```ini
//! [model]
//! mass = 1.0
//! family = homogeneous      ; homogeneous | phase-shift | delta-potential
//! dimension = 4
//! field = complex           ; complex | real
//!
//! [reservoirs]
//! beta1 = 50
//! beta2 = half-energy       ; a number, inf, or half-energy
//! beta3 = inf
//!
//! [profile]
//! a = 707.10678118654755
//! psi = heaviside           ; heaviside | ramp (with eps = ...)
//! ```
//!
//! Optional keys of `[model]`: `delta` (phase shift), `coupling` (δ
//! potential). `[reservoirs]` also takes `mu1`, `mu2`, `mu3` (default 0).
//! Command sections, all keys optional unless noted:
//!
//! | section | keys |
//! |---|---|
//! | `[quench]` | `observable` (energy-density, heat-current, wick-square), `normalisation` (none, kms-beta1, ness), `method` (moments, exact), `rel_tol`, `x0_min`, `x0_max`, `n_x0`, `x1_min`, `x1_max`, `n_x1` (grid in units of `a`) |
//! | `[ness-2pt]` | `t`, `u`, `transverse`, `x1_min`, `x1_max`, `n`, `kernel` (full, bose) |
//! | `[convergence]` | `probe_x1`, `probe_y1`, `t_min`, `t_max`, `n_times` |
//! | `[decay]` | `kernel` (thermal with `r`, ness with `x1`), `direction` (time, x1 with `t`, x2), `min`, `max`, `n` |
//! | `[beta3]` | `x`, `y` (four coordinates each), `values` (list of β₃) |
//! | `[spectral]` | `seed` (required, or `--seed`), `n`, `s`, `beta`, `width`, `radius`, `points`, `shifts`, `lattice`, `t_min`, `t_max`, `n_times` |
//! | `[calibrate]` | `t_max` (late calibration time in units of `a`) |
//!
//! Every command produces one [`CsvTable`]. Its `#` header repeats the
//! effective configuration as an INI block (strip the leading `# ` to
//! re-run the job) followed by result metadata. Numbers are written with
//! 17 significant digits, so identical inputs give byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::Ini;

use crate::asymptotics::{self, DecayDirection, ReducedKernel};
use crate::error::{Error, Result};
use crate::evolution::{self, BoxOptions, ProbePair};
use crate::gluing::{GluedStateSpec, ProfileSpec, PsiKind, Side};
use crate::kms::Event;
use crate::model::{Beta, Family, FieldKind, ModelSpec, ReservoirTriple, ThermoParams};
use crate::ness::{self, NessKernelSpec, ObservableKind};
use crate::perturbation::{self, SpectralAmplitudeSpec};
use crate::quadrature::{self, logspace};
use crate::quench::{self, ApproxBudget, GridSpec, Normalisation, QuenchKernelSpec};

/// The jobs the command line can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    QuenchField,
    Ness2pt,
    NessObservables,
    ConvergenceScan,
    DecayScan,
    ModewiseKms,
    Beta3Sensitivity,
    PerturbationTadpole,
    SpectralDecay,
    Calibrate,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::QuenchField,
        Command::Ness2pt,
        Command::NessObservables,
        Command::ConvergenceScan,
        Command::DecayScan,
        Command::ModewiseKms,
        Command::Beta3Sensitivity,
        Command::PerturbationTadpole,
        Command::SpectralDecay,
        Command::Calibrate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::QuenchField => "quench-field",
            Command::Ness2pt => "ness-2pt",
            Command::NessObservables => "ness-observables",
            Command::ConvergenceScan => "convergence-scan",
            Command::DecayScan => "decay-scan",
            Command::ModewiseKms => "modewise-kms",
            Command::Beta3Sensitivity => "beta3-sensitivity",
            Command::PerturbationTadpole => "perturbation-tadpole",
            Command::SpectralDecay => "spectral-decay",
            Command::Calibrate => "calibrate",
        }
    }

    /// One-line description for the usage text.
    pub fn about(self) -> &'static str {
        match self {
            Command::QuenchField => "observable field of the quench on an (x0, x1) grid: x0,x1,value",
            Command::Ness2pt => "NESS two-point function along x1: x1,re,im",
            Command::NessObservables => "NESS energy density, heat current and Wick square",
            Command::ConvergenceScan => "|W_G(t) - W_N| at an equal-time probe: t,diff",
            Command::DecayScan => "large-time / large-distance decay of |W|: t_or_x,absW",
            Command::ModewiseKms => "modewise detailed-balance residual of the NESS",
            Command::Beta3Sensitivity => "spread of the NESS kernel over bridge temperatures",
            Command::PerturbationTadpole => "first-order tadpole steady value and secular terms",
            Command::SpectralDecay => "spectral amplitude against time: t,abs_a,...",
            Command::Calibrate => "calibration of the quench pipeline against KMS values",
        }
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown command `{s}`\n\n{}", usage())))
    }
}

/// Usage text listing every command.
pub fn usage() -> String {
    let mut out = String::from("usage: nesskg <COMMAND> --config PATH [--out DIR] [--threads N] [--seed N]\n\ncommands:\n");
    for c in Command::ALL {
        let _ = writeln!(out, "  {:<22}{}", c.name(), c.about());
    }
    out.push_str("\nNESSKG_THREADS sets the thread count when --threads is absent.\n");
    out
}

/// Parsed job file: the validated glued state plus the raw sections used by
/// the individual commands.
#[derive(Debug, Clone)]
pub struct JobConfig {
    pub glued: GluedStateSpec,
    ini: Ini,
    text: String,
}

fn parse_beta(s: &str) -> Option<Beta> {
    match s.trim() {
        "inf" | "infinity" => Some(Beta::Infinite),
        v => v.parse::<f64>().ok().map(Beta::Finite),
    }
}

impl JobConfig {
    /// Reads and validates a job file.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    /// Parses and validates a job from its text.
    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str) -> Result<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| Error::Parse { line: e.line + 1, message: e.msg.to_string() })?;
        let mut cfg = Self { glued: placeholder_glued(), ini, text: text.to_string() };
        cfg.glued = cfg.build_glued()?;
        Ok(cfg)
    }

    fn build_glued(&self) -> Result<GluedStateSpec> {
        for section in ["model", "reservoirs", "profile"] {
            self.section(section)?;
        }
        let m = self.f64_or("model", "mass", None)?;
        let d = self.usize_or("model", "dimension", Some(4))? as u32;
        let family = match self.str_or("model", "family", Some("homogeneous"))?.as_str() {
            "homogeneous" => Family::Homogeneous,
            "phase-shift" => Family::PhaseShift { delta: self.f64_or("model", "delta", None)? },
            "delta-potential" => Family::DeltaPotential { g: self.f64_or("model", "coupling", None)? },
            other => return Err(self.bad("model", "family", format!("unknown family `{other}`"))),
        };
        let field = match self.str_or("model", "field", Some("complex"))?.as_str() {
            "complex" => FieldKind::Complex,
            "real" => FieldKind::Real,
            other => return Err(self.bad("model", "field", format!("unknown field kind `{other}`"))),
        };
        let model = ModelSpec::new(d, m, family, field)?;
        let beta1 = self.beta_or("reservoirs", "beta1", None)?;
        let beta2 = match self.str_or("reservoirs", "beta2", None)?.as_str() {
            "half-energy" => {
                let b1 = beta1.finite().ok_or_else(|| self.bad("reservoirs", "beta2", "half-energy needs a finite beta1".into()))?;
                Beta::Finite(quench::half_energy_beta(m, b1)?)
            }
            _ => self.beta_or("reservoirs", "beta2", None)?,
        };
        let beta3 = self.beta_or("reservoirs", "beta3", Some(Beta::Infinite))?;
        let mu = |k: &str| self.f64_or("reservoirs", k, Some(0.0));
        let reservoirs = ReservoirTriple::new(
            ThermoParams::new(beta1, mu("mu1")?),
            ThermoParams::new(beta2, mu("mu2")?),
            ThermoParams::new(beta3, mu("mu3")?),
        );
        let psi = match self.str_or("profile", "psi", Some("heaviside"))?.as_str() {
            "heaviside" => PsiKind::Heaviside,
            "ramp" => PsiKind::SmoothRamp { eps: self.f64_or("profile", "eps", None)? },
            other => return Err(self.bad("profile", "psi", format!("unknown switch `{other}`"))),
        };
        let profile = ProfileSpec::with_psi(self.f64_or("profile", "a", None)?, psi)?;
        GluedStateSpec::new(model, reservoirs, profile)
    }

    fn section(&self, name: &str) -> Result<&ini::Properties> {
        self.ini.section(Some(name)).ok_or_else(|| Error::Parse { line: 0, message: format!("missing [{name}] section") })
    }

    fn has_section(&self, name: &str) -> bool {
        self.ini.section(Some(name)).is_some()
    }

    /// 1-based line of `key` inside `[section]`, 0 when absent.
    fn line_of(&self, section: &str, key: &str) -> usize {
        let mut current = String::new();
        for (i, raw) in self.text.lines().enumerate() {
            let line = raw.trim();
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                current = name.trim().to_string();
            } else if current == section && line.split('=').next().map(str::trim) == Some(key) {
                return i + 1;
            }
        }
        0
    }

    fn bad(&self, section: &str, key: &str, message: String) -> Error {
        Error::Parse { line: self.line_of(section, key), message: format!("[{section}] {key}: {message}") }
    }

    fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.ini.section(Some(section)).and_then(|p| p.get(key)).map(str::trim)
    }

    fn missing(&self, section: &str, key: &str) -> Error {
        match self.has_section(section) {
            true => Error::Parse { line: 0, message: format!("[{section}] is missing the key `{key}`") },
            false => Error::Parse { line: 0, message: format!("missing [{section}] section (needs `{key}`)") },
        }
    }

    fn str_or(&self, section: &str, key: &str, default: Option<&str>) -> Result<String> {
        match (self.raw(section, key), default) {
            (Some(v), _) => Ok(v.to_string()),
            (None, Some(d)) => Ok(d.to_string()),
            (None, None) => Err(self.missing(section, key)),
        }
    }

    fn parsed_or<T: FromStr>(&self, section: &str, key: &str, default: Option<T>, what: &str) -> Result<T> {
        match (self.raw(section, key), default) {
            (Some(v), _) => v.parse::<T>().map_err(|_| self.bad(section, key, format!("expected {what}, got `{v}`"))),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(self.missing(section, key)),
        }
    }

    fn f64_or(&self, section: &str, key: &str, default: Option<f64>) -> Result<f64> {
        self.parsed_or(section, key, default, "a number")
    }

    fn usize_or(&self, section: &str, key: &str, default: Option<usize>) -> Result<usize> {
        self.parsed_or(section, key, default, "a non-negative integer")
    }

    fn beta_or(&self, section: &str, key: &str, default: Option<Beta>) -> Result<Beta> {
        match (self.raw(section, key), default) {
            (Some(v), _) => parse_beta(v).ok_or_else(|| self.bad(section, key, format!("expected a number or inf, got `{v}`"))),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(self.missing(section, key)),
        }
    }

    fn f64_list(&self, section: &str, key: &str, default: Option<Vec<f64>>) -> Result<Vec<f64>> {
        match (self.raw(section, key), default) {
            (Some(v), _) => v
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| self.bad(section, key, format!("expected a list of numbers, got `{v}`"))))
                .collect(),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(self.missing(section, key)),
        }
    }

    fn event(&self, section: &str, key: &str, default: Event) -> Result<Event> {
        let v = self.f64_list(section, key, Some(default.to_vec()))?;
        <[f64; 4]>::try_from(v.as_slice()).map_err(|_| self.bad(section, key, "expected four coordinates t, x1, x2, x3".into()))
    }

    fn ness_spec(&self) -> NessKernelSpec {
        let r = &self.glued.reservoirs;
        NessKernelSpec::new(self.glued.model, r.left.tp, r.right.tp, r.bridge)
    }

    fn finite_betas(&self) -> Result<(f64, f64)> {
        let r = &self.glued.reservoirs;
        match (r.left.tp.beta, r.right.tp.beta) {
            (Beta::Finite(b1), Beta::Finite(b2)) => Ok((b1, b2)),
            _ => Err(Error::ConstraintViolation("this command needs finite beta1 and beta2".into())),
        }
    }

    /// The effective configuration as INI text, sections in file order.
    fn echo(&self, seed: Option<u64>) -> String {
        let mut out = String::new();
        for (name, props) in self.ini.iter() {
            let Some(name) = name else { continue };
            let _ = writeln!(out, "[{name}]");
            for (k, v) in props.iter() {
                let v = match (name, k, seed) {
                    ("spectral", "seed", Some(s)) => s.to_string(),
                    _ => v.trim().to_string(),
                };
                let _ = writeln!(out, "{k} = {v}");
            }
            if name == "spectral" && props.get("seed").is_none() {
                if let Some(s) = seed {
                    let _ = writeln!(out, "seed = {s}");
                }
            }
        }
        out
    }
}

fn placeholder_glued() -> GluedStateSpec {
    GluedStateSpec {
        model: ModelSpec::homogeneous(1.0),
        reservoirs: ReservoirTriple::betas(Beta::Infinite, Beta::Infinite, Beta::Infinite),
        profile: ProfileSpec { a: 1.0, psi: PsiKind::Heaviside },
    }
}

/// Reads a job file; see [`JobConfig::from_path`].
pub fn parse_config(path: &Path) -> Result<JobConfig> {
    JobConfig::from_path(path)
}

/// A table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Locale-independent formatting with 17 significant digits.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// CSV output with a `#` provenance header.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub command: Command,
    /// Effective job configuration (INI text).
    pub config: String,
    /// Result metadata `(key, value)` in insertion order.
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    fn new(command: Command, config: String, columns: &[&str]) -> Self {
        Self { command, config, metadata: Vec::new(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    fn meta(&mut self, key: &str, value: impl std::fmt::Display) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    fn meta_num(&mut self, key: &str, value: f64) {
        self.meta(key, format_number(value));
    }

    fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    /// Serialises the table.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# nesskg {} (library version {})", self.command.name(), env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "# --- job configuration ---");
        for line in self.config.lines() {
            let _ = writeln!(out, "# {line}");
        }
        let _ = writeln!(out, "# --- results ---");
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k} = {v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => format_number(*v),
                    Cell::Text(t) => t.clone(),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// Writes `<dir>/<command>.csv` and returns its path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.csv", self.command.name()));
        std::fs::write(&path, self.render())?;
        Ok(path)
    }
}

/// Options that override the job file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Replaces the `[spectral] seed` of Monte-Carlo jobs.
    pub seed: Option<u64>,
}

fn observable_of(cfg: &JobConfig, section: &str, key: &str, default: &str) -> Result<ObservableKind> {
    match cfg.str_or(section, key, Some(default))?.as_str() {
        "energy-density" => Ok(ObservableKind::EnergyDensity),
        "heat-current" => Ok(ObservableKind::HeatCurrent),
        "wick-square" => Ok(ObservableKind::WickSquare),
        other => Err(cfg.bad(section, key, format!("unknown observable `{other}`"))),
    }
}

fn obs_label(obs: ObservableKind) -> &'static str {
    match obs {
        ObservableKind::EnergyDensity => "energy-density",
        ObservableKind::HeatCurrent => "heat-current",
        ObservableKind::WickSquare => "wick-square",
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn fit_meta(table: &mut CsvTable, report: &quadrature::DecayReport) {
    table.meta_num("fit_exponent", report.exponent);
    table.meta_num("fit_stderr", report.stderr);
    table.meta_num("fit_prefactor", report.prefactor);
    table.meta("fit_points", report.n_points);
}

/// Runs one job and returns its table.
pub fn run(command: Command, cfg: &JobConfig, opts: RunOptions) -> Result<CsvTable> {
    let seed = match command {
        Command::SpectralDecay => Some(match opts.seed {
            Some(s) => s,
            None => cfg.parsed_or::<u64>("spectral", "seed", None, "an unsigned integer")?,
        }),
        _ => opts.seed,
    };
    let config = cfg.echo(seed);
    match command {
        Command::QuenchField => quench_field(cfg, config),
        Command::Ness2pt => ness_2pt(cfg, config),
        Command::NessObservables => ness_observables(cfg, config),
        Command::ConvergenceScan => convergence_scan(cfg, config),
        Command::DecayScan => decay_scan(cfg, config),
        Command::ModewiseKms => modewise_kms(cfg, config),
        Command::Beta3Sensitivity => beta3_sensitivity(cfg, config),
        Command::PerturbationTadpole => tadpole(cfg, config),
        Command::SpectralDecay => spectral_decay(cfg, config, seed.unwrap_or_default()),
        Command::Calibrate => calibrate(cfg, config),
    }
}

fn quench_spec(cfg: &JobConfig, section: &str) -> Result<QuenchKernelSpec> {
    let budget = match cfg.str_or(section, "method", Some("moments"))?.as_str() {
        "moments" => ApproxBudget::default(),
        "exact" => ApproxBudget::exact(),
        other => return Err(cfg.bad(section, "method", format!("unknown method `{other}`"))),
    };
    let mut spec = QuenchKernelSpec::new(cfg.glued, budget)?;
    spec.rel_tol = cfg.f64_or(section, "rel_tol", Some(spec.rel_tol))?;
    Ok(spec)
}

fn quench_field(cfg: &JobConfig, config: String) -> Result<CsvTable> {
    const S: &str = "quench";
    let spec = quench_spec(cfg, S)?;
    let obs = observable_of(cfg, S, "observable", "energy-density")?;
    let d = GridSpec::default();
    let grid = GridSpec {
        x0_min: cfg.f64_or(S, "x0_min", Some(d.x0_min))?,
        x0_max: cfg.f64_or(S, "x0_max", Some(d.x0_max))?,
        n_x0: cfg.usize_or(S, "n_x0", Some(d.n_x0))?,
        x1_min: cfg.f64_or(S, "x1_min", Some(d.x1_min))?,
        x1_max: cfg.f64_or(S, "x1_max", Some(d.x1_max))?,
        n_x1: cfg.usize_or(S, "n_x1", Some(d.n_x1))?,
    };
    let default_norm = if obs == ObservableKind::HeatCurrent { "ness" } else { "kms-beta1" };
    let field = quench::evolve_field(&spec, obs, &grid)?;
    let field = match cfg.str_or(S, "normalisation", Some(default_norm))?.as_str() {
        "none" => field,
        "kms-beta1" => quench::ratio_field(&spec, &field, Normalisation::KmsBeta1)?,
        "ness" => quench::ratio_field(&spec, &field, Normalisation::Ness)?,
        other => return Err(cfg.bad(S, "normalisation", format!("unknown normalisation `{other}`"))),
    };
    let mut table = CsvTable::new(Command::QuenchField, config, &["x0", "x1", "value"]);
    for (k, v) in &field.metadata {
        table.meta(k, v);
    }
    for (i0, &x0) in field.x0.iter().enumerate() {
        for (i1, &x1) in field.x1.iter().enumerate() {
            table.push(vec![x0.into(), x1.into(), field.at(i0, i1).into()]);
        }
    }
    Ok(table)
}

fn ness_2pt(cfg: &JobConfig, config: String) -> Result<CsvTable> {
    const S: &str = "ness-2pt";
    let spec = cfg.ness_spec();
    let t = cfg.f64_or(S, "t", Some(0.0))?;
    let u = cfg.f64_or(S, "u", Some(0.0))?;
    let transverse = cfg.f64_or(S, "transverse", Some(0.0))?;
    let xs = linspace(cfg.f64_or(S, "x1_min", Some(0.5))?, cfg.f64_or(S, "x1_max", Some(5.0))?, cfg.usize_or(S, "n", Some(10))?);
    let full = match cfg.str_or(S, "kernel", Some("full"))?.as_str() {
        "full" => true,
        "bose" => false,
        other => return Err(cfg.bad(S, "kernel", format!("unknown kernel `{other}` (full | bose)"))),
    };
    let mut table = CsvTable::new(Command::Ness2pt, config, &["x1", "re", "im"]);
    table.meta("kernel", if full { "Delta_+,N" } else { "W_N (Bose part)" });
    for x1 in xs {
        let x = [t, x1, transverse, 0.0];
        let v = if full { ness::delta_plus_ness(&spec, &x, &[0.0; 4], u)? } else { ness::w_ness(&spec, &x, &[0.0; 4], u)? };
        table.push(vec![x1.into(), v.re.into(), v.im.into()]);
    }
    Ok(table)
}

fn ness_observables(cfg: &JobConfig, config: String) -> Result<CsvTable> {
    let spec = cfg.ness_spec();
    let factor = spec.model.field_kind.observable_factor();
    let m = spec.model.m;
    let mut table = CsvTable::new(Command::NessObservables, config, &["observable", "ness", "kms_beta1", "kms_beta2"]);
    for obs in [ObservableKind::EnergyDensity, ObservableKind::HeatCurrent, ObservableKind::WickSquare] {
        let n = ness::ness_observable(&spec, obs)?;
        let k1 = factor * ness::thermal_observable_kernel(m, spec.left, obs)?;
        let k2 = factor * ness::thermal_observable_kernel(m, spec.right, obs)?;
        table.push(vec![obs_label(obs).into(), n.into(), k1.into(), k2.into()]);
    }
    Ok(table)
}

fn times_of(cfg: &JobConfig, section: &str, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    let lo = cfg.f64_or(section, "t_min", Some(lo))?;
    let hi = cfg.f64_or(section, "t_max", Some(hi))?;
    let n = cfg.usize_or(section, "n_times", Some(n))?;
    if !(lo > 0.0 && hi > lo) || n < 2 {
        return Err(Error::ConstraintViolation(format!("[{section}] needs 0 < t_min < t_max and n_times >= 2")));
    }
    Ok(logspace(lo, hi, n))
}

fn convergence_scan(cfg: &JobConfig, config: String) -> Result<CsvTable> {
    const S: &str = "convergence";
    let probe = ProbePair { x1: cfg.f64_or(S, "probe_x1", Some(0.0))?, y1: cfg.f64_or(S, "probe_y1", Some(0.5))? };
    let times = times_of(cfg, S, 20.0, 200.0, 10)?;
    let scan = evolution::convergence_scan(&cfg.glued, probe, &times, &BoxOptions::default())?;
    let mut table = CsvTable::new(Command::ConvergenceScan, config, &["t", "diff", "glued_w"]);
    fit_meta(&mut table, &scan.report);
    table.meta_num("ness_w", scan.ness);
    table.meta_num("extrapolated_limit", scan.limit);
    for (&(t, d), &(_, g)) in scan.diff.iter().zip(&scan.glued) {
        table.push(vec![t.into(), d.into(), g.into()]);
    }
    Ok(table)
}

fn decay_scan(cfg: &JobConfig, config: String) -> Result<CsvTable> {
    const S: &str = "decay";
    let m = cfg.glued.model.m;
    let (b1, b2) = cfg.finite_betas()?;
    let kernel = match cfg.str_or(S, "kernel", Some("thermal"))?.as_str() {
        "thermal" => ReducedKernel::thermal(m, b1, cfg.f64_or(S, "r", Some(0.0))?),
        "ness" => ReducedKernel::ness(m, b1, b2, cfg.f64_or(S, "x1", Some(0.0))?),
        other => return Err(cfg.bad(S, "kernel", format!("unknown kernel `{other}` (thermal | ness)"))),
    };
    let direction = match cfg.str_or(S, "direction", Some("time"))?.as_str() {
        "time" => DecayDirection::Time,
        "x1" => DecayDirection::X1 { t: cfg.f64_or(S, "t", Some(1.0))? },
        "x2" => DecayDirection::X2,
        other => return Err(cfg.bad(S, "direction", format!("unknown direction `{other}` (time | x1 | x2)"))),
    };
    let lo = cfg.f64_or(S, "min", Some(50.0))?;
    let hi = cfg.f64_or(S, "max", Some(500.0))?;
    let n = cfg.usize_or(S, "n", Some(12))?;
    if !(lo > 0.0 && hi > lo) || n < 2 {
        return Err(Error::ConstraintViolation("[decay] needs 0 < min < max and n >= 2".into()));
    }
    let samples = logspace(lo, hi, n);
    let values = asymptotics::decay_samples(&kernel, direction, &samples)?;
    let mut table = CsvTable::new(Command::DecayScan, config, &["t_or_x", "absW"]);
    match asymptotics::decay_scan(&kernel, direction, &samples) {
        Ok(report) => fit_meta(&mut table, &report),
        Err(e) => table.meta("fit", format!("not available ({e})")),
    }
    for (x, w) in values {
        table.push(vec![x.into(), w.into()]);
    }
    Ok(table)
}

fn modewise_kms(cfg: &JobConfig, config: String) -> Result<CsvTable> {
    let residual = ness::modewise_kms_residual(&cfg.ness_spec())?;
    let mut table = CsvTable::new(Command::ModewiseKms, config, &["residual"]);
    table.push(vec![residual.into()]);
    Ok(table)
}

fn beta3_sensitivity(cfg: &JobConfig, config: String) -> Result<CsvTable> {
    const S: &str = "beta3";
    let x = cfg.event(S, "x", [0.0, 0.5, 0.0, 0.0])?;
    let y = cfg.event(S, "y", [0.0, -0.5, 0.0, 0.0])?;
    let raw = cfg.str_or(S, "values", Some("inf, 10, 5"))?;
    let betas = raw
        .split(',')
        .map(|v| parse_beta(v).ok_or_else(|| cfg.bad(S, "values", format!("expected numbers or inf, got `{raw}`"))))
        .collect::<Result<Vec<_>>>()?;
    let spread = ness::beta3_sensitivity(&cfg.ness_spec(), &x, &y, &betas)?;
    let mut table = CsvTable::new(Command::Beta3Sensitivity, config, &["spread"]);
    table.push(vec![spread.into()]);
    Ok(table)
}

fn tadpole(cfg: &JobConfig, config: String) -> Result<CsvTable> {
    let m = cfg.glued.model.m;
    let (b1, b2) = cfg.finite_betas()?;
    let steady = perturbation::tadpole_first_order(b1, b2, m)?;
    let single1 = perturbation::tadpole_first_order(b1, b1, m)?;
    let single2 = perturbation::tadpole_first_order(b2, b2, m)?;
    let secular = perturbation::secular_terms(b1, b2, m)?;
    let mut table = CsvTable::new(Command::PerturbationTadpole, config, &["quantity", "value"]);
    table.meta("normalisation", "(2 pi)^-3 int d^3p (b1 + b2)/(2 omega^3), per unit coupling");
    for (name, v) in [
        ("steady", steady),
        ("single_beta1", single1),
        ("single_beta2", single2),
        ("secular_s2_plus", secular.s2_plus),
        ("secular_s2_minus", secular.s2_minus),
        ("secular_sum", secular.sum()),
    ] {
        table.push(vec![name.into(), v.into()]);
    }
    Ok(table)
}

fn spectral_decay(cfg: &JobConfig, config: String, seed: u64) -> Result<CsvTable> {
    const S: &str = "spectral";
    let m = cfg.glued.model.m;
    let (b1, _) = cfg.finite_betas()?;
    let d = SpectralAmplitudeSpec::new(2, b1, 1, m);
    let s = cfg.parsed_or::<i8>(S, "s", Some(1), "±1")?;
    let lattice = cfg.f64_list(S, "lattice", Some(d.lattice.iter().map(|&v| v as f64).collect()))?;
    if lattice.len() != 3 || lattice.iter().any(|v| v.fract() != 0.0 || *v < 2.0) {
        return Err(cfg.bad(S, "lattice", "expected three integers >= 2".into()));
    }
    let spec = SpectralAmplitudeSpec {
        n: cfg.usize_or(S, "n", Some(2))?,
        beta: cfg.f64_or(S, "beta", Some(b1))?,
        s,
        m,
        h_width: cfg.f64_or(S, "width", Some(d.h_width))?,
        h_radius: cfg.f64_or(S, "radius", Some(d.h_radius))?,
        external: [0.0; 3],
        points: cfg.usize_or(S, "points", Some(d.points))?,
        shifts: cfg.usize_or(S, "shifts", Some(d.shifts))?,
        seed,
        lattice: [lattice[0] as usize, lattice[1] as usize, lattice[2] as usize],
    };
    let times = times_of(cfg, S, 20.0, 100.0, 6)?;
    let (report, estimates) = perturbation::spectral_decay_fit(&spec, &times)?;
    let mut table = CsvTable::new(Command::SpectralDecay, config, &["t", "abs_a", "re", "im", "std_error"]);
    fit_meta(&mut table, &report);
    for e in estimates {
        table.push(vec![e.t.into(), e.value.norm().into(), e.value.re.into(), e.value.im.into(), e.std_error.into()]);
    }
    Ok(table)
}

fn calibrate(cfg: &JobConfig, config: String) -> Result<CsvTable> {
    const S: &str = "calibrate";
    let spec = QuenchKernelSpec::new(cfg.glued, ApproxBudget::default())?;
    let a = cfg.glued.profile.a;
    let t_late = cfg.f64_or(S, "t_max", Some(8.0))? * a;
    let mut table = CsvTable::new(Command::Calibrate, config, &["observable", "a", "side", "t", "pipeline", "exact", "rel_error"]);
    let mut worst = 0.0f64;
    for obs in [ObservableKind::EnergyDensity, ObservableKind::WickSquare] {
        for side in [Side::Left, Side::Right] {
            for (aa, t) in [(0.0, 0.0), (a, 0.0), (a, t_late)] {
                let r = quench::calibrate(&spec, obs, aa, side, t)?;
                worst = worst.max(r.rel_error);
                let side_label = if side == Side::Left { "left" } else { "right" };
                table.push(vec![obs_label(obs).into(), aa.into(), side_label.into(), t.into(), r.pipeline.into(), r.exact.into(), r.rel_error.into()]);
            }
        }
    }
    table.meta_num("max_rel_error", worst);
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "[model]\nmass = 1.0\n\n[reservoirs]\nbeta1 = 1.0\nbeta2 = 2.0\n\n[profile]\na = 1.0\n";

    #[test]
    fn parses_minimal_job() {
        let cfg = JobConfig::from_str(BASE).unwrap();
        assert_eq!(cfg.glued.reservoirs.left.tp.beta, Beta::Finite(1.0));
        assert_eq!(cfg.glued.reservoirs.bridge.beta, Beta::Infinite);
        assert_eq!(cfg.glued.model.field_kind, FieldKind::Complex);
    }

    #[test]
    fn missing_section_is_named() {
        let err = JobConfig::from_str("[reservoirs]\nbeta1 = 1\nbeta2 = 2\n[profile]\na = 1\n").unwrap_err();
        match err {
            Error::Parse { message, .. } => assert!(message.contains("[model]"), "{message}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_value_reports_its_line() {
        let text = BASE.replace("beta2 = 2.0", "beta2 = warm");
        match JobConfig::from_str(&text).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bridge_hotter_than_reservoirs_is_a_constraint_violation() {
        let text = BASE.replace("beta2 = 2.0", "beta2 = 2.0\nbeta3 = 0.5");
        let err = JobConfig::from_str(&text).unwrap_err();
        assert!(matches!(err, Error::ConstraintViolation(_)), "{err:?}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_command_carries_usage() {
        let err = "warp-drive".parse::<Command>().unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("convergence-scan"));
        for c in Command::ALL {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
        }
    }

    #[test]
    fn numbers_have_seventeen_significant_digits() {
        assert_eq!(format_number(0.1), "1.0000000000000001e-1");
        assert_eq!(format_number(-2.5), "-2.5000000000000000e0");
        assert_eq!("1.0000000000000001e-1".parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn header_echo_reproduces_the_job() {
        let cfg = JobConfig::from_str(BASE).unwrap();
        let table = run(Command::ModewiseKms, &cfg, RunOptions::default()).unwrap();
        let text = table.render();
        let echoed: String = text
            .lines()
            .skip_while(|l| !l.starts_with("# --- job configuration"))
            .skip(1)
            .take_while(|l| !l.starts_with("# --- results"))
            .map(|l| format!("{}\n", &l[2..]))
            .collect();
        let again = JobConfig::from_str(&echoed).unwrap();
        assert_eq!(again.glued, cfg.glued);
        assert_eq!(run(Command::ModewiseKms, &again, RunOptions::default()).unwrap().render(), text);
    }

    #[test]
    fn spectral_jobs_require_a_seed() {
        let cfg = JobConfig::from_str(&format!("{BASE}\n[spectral]\nn = 2\n")).unwrap();
        let err = run(Command::SpectralDecay, &cfg, RunOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err:?}");
    }
}
