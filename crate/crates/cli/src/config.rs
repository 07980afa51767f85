//! Command-line flags, the optional TOML run file, and their merge into a
//! validated [`RunConfig`].

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Parser;
use rydlens::scenario::PRESET_NAMES;
use rydlens::{preset, ResponseMode, Scenario};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Environment variable naming the default output directory.
pub const OUT_DIR_VAR: &str = "RYDLENS_OUT";
/// Output directory used when neither flag, file nor environment names one.
pub const DEFAULT_OUT_DIR: &str = "rydlens-out";
pub const DEFAULT_SCAN: Scan = Scan { start: -2.0, stop: 2.0, count: 81 };
pub const DEFAULT_TABLE_SIZE: usize = 128;
const MIN_TABLE_SIZE: usize = 4;
const MIN_GRID: usize = 16;

/// Simulate probe lensing under ladder Rydberg EIT and write spectra,
/// exit-plane images and a run manifest.
#[derive(Debug, Clone, Default, Parser)]
#[command(name = "rydlens", version)]
pub struct Flags {
    /// Preset name (fig2, fig3a, fig3b, fig3c, fig4) or path to a scenario TOML file.
    #[arg(long, value_name = "NAME|FILE")]
    pub scenario: Option<String>,

    /// TOML run file; flags given on the command line take precedence.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Probe detuning scan START:STOP:COUNT in units of Γ_e.
    #[arg(long, value_name = "START:STOP:COUNT", allow_hyphen_values = true)]
    pub scan: Option<Scan>,

    /// Skip transverse diffraction (no lensing).
    #[arg(long)]
    pub no_lensing: bool,

    /// Transverse grid points per axis.
    #[arg(long, value_name = "NX")]
    pub grid: Option<usize>,

    /// Transverse window edge length [µm].
    #[arg(long, value_name = "MICRONS")]
    pub window: Option<f64>,

    /// Axial step [µm].
    #[arg(long, value_name = "MICRONS")]
    pub dz: Option<f64>,

    /// Response-table resolution (points per axis).
    #[arg(long, value_name = "N")]
    pub table: Option<usize>,

    /// Solve the master equation at every point instead of interpolating.
    #[arg(long)]
    pub verify: bool,

    /// Also write an exit-plane image for every scan point.
    #[arg(long)]
    pub images: bool,

    /// Output directory [default: $RYDLENS_OUT or ./rydlens-out].
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Worker threads for the scan [default: available cores].
    #[arg(long, value_name = "N")]
    pub threads: Option<usize>,
}

/// Evenly spaced detunings in units of Γ_e, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scan {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Scan {
    pub fn detunings(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| if i + 1 == self.count { self.stop } else { self.start + i as f64 * step }).collect()
    }

    fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.count < 1 {
            v.push("scan count must be at least 1".into());
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            v.push("scan bounds must be finite".into());
        } else if self.count > 1 && self.start >= self.stop {
            v.push(format!("scan start ({}) must be below stop ({}) when count > 1", self.start, self.stop));
        }
        v
    }
}

impl FromStr for Scan {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected START:STOP:COUNT, got `{s}`"));
        }
        let number = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}"));
        Ok(Scan {
            start: number(parts[0])?,
            stop: number(parts[1])?,
            count: parts[2].trim().parse().map_err(|e| format!("`{}`: {e}", parts[2]))?,
        })
    }
}

impl fmt::Display for Scan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

/// Contents of a `--config` file. Lengths are in micrometres, detunings in Γ_e.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunFile {
    /// Preset name, scenario file path (relative to the run file), or an inline
    /// scenario table.
    scenario: Option<toml::Value>,
    scan: Option<Scan>,
    lensing: Option<bool>,
    grid: Option<usize>,
    window: Option<f64>,
    dz: Option<f64>,
    table: Option<usize>,
    verify: Option<bool>,
    images: Option<bool>,
    out: Option<PathBuf>,
    threads: Option<usize>,
}

/// A setting given both in the run file and on the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conflict {
    pub key: String,
    pub file_value: String,
    /// The value that was used.
    pub flag_value: String,
}

/// Fully resolved, validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Scenario with all grid and step overrides applied.
    pub scenario: Scenario,
    /// Where the scenario came from: `preset:<name>`, `file:<path>` or `inline`.
    pub scenario_source: String,
    pub scan: Scan,
    pub response: ResponseMode,
    pub write_images: bool,
    pub out_dir: PathBuf,
    pub threads: usize,
    pub conflicts: Vec<Conflict>,
}

impl RunConfig {
    pub fn verify(&self) -> bool {
        self.response == ResponseMode::Direct
    }

    /// Scan detunings in rad/s.
    pub fn detunings(&self) -> Vec<f64> {
        let g = self.scenario.levels.gamma_e;
        self.scan.detunings().into_iter().map(|d| d * g).collect()
    }
}

/// Parses command-line arguments (including the program name) into a run
/// configuration, reading `--config` and the output-directory variable.
pub fn parse_config<I, T>(args: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let flags = Flags::try_parse_from(args)
        .map_err(|e| CliError::Parse { origin: "command line".into(), message: e.to_string().trim().to_string() })?;
    resolve(flags, std::env::var_os(OUT_DIR_VAR).map(PathBuf::from))
}

/// Merges flags over the run file (if any) over `env_out` and the defaults.
pub fn resolve(flags: Flags, env_out: Option<PathBuf>) -> Result<RunConfig> {
    let (file, file_dir) = match &flags.config {
        Some(path) => (read_run_file(path)?, path.parent().map(Path::to_path_buf).unwrap_or_default()),
        None => (RunFile::default(), PathBuf::new()),
    };
    let mut conflicts = Vec::new();

    let scenario_flag = flags.scenario.clone();
    let (mut scenario, scenario_source) = match (&scenario_flag, &file.scenario) {
        (Some(name), file_value) => {
            if let Some(value) = file_value {
                let file_text = match value {
                    toml::Value::String(s) => s.clone(),
                    _ => "inline scenario".to_string(),
                };
                if &file_text != name {
                    conflicts.push(Conflict {
                        key: "scenario".into(),
                        file_value: file_text,
                        flag_value: name.clone(),
                    });
                }
            }
            load_scenario(name, Path::new(""))?
        }
        (None, Some(toml::Value::String(name))) => load_scenario(name, &file_dir)?,
        (None, Some(toml::Value::Table(table))) => {
            let text = toml::to_string(table)
                .map_err(|e| CliError::Parse { origin: "inline scenario".into(), message: e.to_string() })?;
            let s = Scenario::from_toml(&text)
                .map_err(|e| CliError::Parse { origin: "inline scenario".into(), message: e.to_string() })?;
            (s, "inline".to_string())
        }
        (None, Some(other)) => {
            return Err(CliError::Parse {
                origin: "scenario".into(),
                message: format!("expected a preset name, file path or table, got {}", other.type_str()),
            })
        }
        (None, None) => {
            return Err(CliError::Validation(vec![format!(
                "no scenario given; pass --scenario with one of {}",
                PRESET_NAMES.join(", ")
            )]))
        }
    };

    let scan = merge("scan", file.scan, flags.scan, &mut conflicts).unwrap_or(DEFAULT_SCAN);
    let lensing = merge("lensing", file.lensing, flags.no_lensing.then_some(false), &mut conflicts);
    let grid = merge("grid", file.grid, flags.grid, &mut conflicts);
    let window = merge("window", file.window, flags.window, &mut conflicts);
    let dz = merge("dz", file.dz, flags.dz, &mut conflicts);
    let table = merge("table", file.table, flags.table, &mut conflicts).unwrap_or(DEFAULT_TABLE_SIZE);
    let verify = merge("verify", file.verify, flags.verify.then_some(true), &mut conflicts).unwrap_or(false);
    let images = merge("images", file.images, flags.images.then_some(true), &mut conflicts).unwrap_or(false);
    let file_out = file.out.map(|p| if p.is_relative() { file_dir.join(p) } else { p });
    let out_dir = merge_path("out", file_out, flags.out, &mut conflicts)
        .or(env_out)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    let threads = merge("threads", file.threads, flags.threads, &mut conflicts)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));

    let mut violations = scan.violations();
    if let Some(lensing) = lensing {
        scenario.settings.lensing = lensing;
    }
    if let Some(n) = grid {
        if n < MIN_GRID {
            violations.push(format!("grid must have at least {MIN_GRID} points per axis, got {n}"));
        } else {
            scenario.grid.nx = n;
            scenario.grid.ny = n;
        }
    }
    if let Some(w) = window {
        if !(w > 0.0 && w.is_finite()) {
            violations.push(format!("window must be a positive length, got {w} µm"));
        } else {
            // The absorber band keeps its share of the window.
            let share = scenario.settings.absorber_width / scenario.grid.lx;
            scenario.grid.lx = w * 1e-6;
            scenario.grid.ly = w * 1e-6;
            scenario.settings.absorber_width = share * scenario.grid.lx;
        }
    }
    if let Some(step) = dz {
        if !(step > 0.0 && step.is_finite()) {
            violations.push(format!("dz must be a positive length, got {step} µm"));
        } else {
            scenario.settings.dz = step * 1e-6;
        }
    }
    if table < MIN_TABLE_SIZE {
        violations.push(format!("table resolution must be at least {MIN_TABLE_SIZE}, got {table}"));
    }
    if threads == 0 {
        violations.push("threads must be at least 1".into());
    }
    if violations.is_empty() {
        if let Err(e) = scenario.validate() {
            violations.push(e.to_string());
        }
    }
    if let Err(e) = check_writable(&out_dir) {
        violations.push(e);
    }
    if !violations.is_empty() {
        return Err(CliError::Validation(violations));
    }

    Ok(RunConfig {
        scenario,
        scenario_source,
        scan,
        response: if verify { ResponseMode::Direct } else { ResponseMode::Table { size: table } },
        write_images: images,
        out_dir,
        threads,
        conflicts,
    })
}

fn read_run_file(path: &Path) -> Result<RunFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Parse { origin: path.display().to_string(), message: e.to_string().trim().to_string() })
}

/// Resolves a preset name or scenario file (relative paths against `base`).
fn load_scenario(name: &str, base: &Path) -> Result<(Scenario, String)> {
    if PRESET_NAMES.contains(&name) {
        return Ok((preset(name)?, format!("preset:{name}")));
    }
    let path = base.join(name);
    if name.ends_with(".toml") || path.is_file() {
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let scenario = Scenario::from_toml(&text)
            .map_err(|e| CliError::Parse { origin: path.display().to_string(), message: e.to_string() })?;
        return Ok((scenario, format!("file:{}", path.display())));
    }
    Err(rydlens::Error::UnknownPreset(name.to_string()).into())
}

fn merge<T: PartialEq + fmt::Display>(
    key: &str,
    file: Option<T>,
    flag: Option<T>,
    conflicts: &mut Vec<Conflict>,
) -> Option<T> {
    match (file, flag) {
        (Some(f), Some(g)) => {
            if f != g {
                conflicts.push(Conflict { key: key.into(), file_value: f.to_string(), flag_value: g.to_string() });
            }
            Some(g)
        }
        (f, g) => g.or(f),
    }
}

fn merge_path(
    key: &str,
    file: Option<PathBuf>,
    flag: Option<PathBuf>,
    conflicts: &mut Vec<Conflict>,
) -> Option<PathBuf> {
    merge(key, file.map(DisplayPath), flag.map(DisplayPath), conflicts).map(|p| p.0)
}

#[derive(PartialEq)]
struct DisplayPath(PathBuf);

impl fmt::Display for DisplayPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.display())
    }
}

/// Checks, without creating anything that stays behind, that `dir` is (or can
/// become) a writable directory.
fn check_writable(dir: &Path) -> std::result::Result<(), String> {
    let mut existing = dir.to_path_buf();
    while !existing.exists() {
        match existing.parent() {
            Some(p) if !p.as_os_str().is_empty() => existing = p.to_path_buf(),
            _ => {
                existing = PathBuf::from(".");
                break;
            }
        }
    }
    if !existing.is_dir() {
        return Err(format!("output path {} is not a directory", existing.display()));
    }
    let probe = existing.join(format!(".rydlens-write-check-{}", std::process::id()));
    match std::fs::File::create(&probe) {
        Ok(_) => {
            let _ = std::fs::remove_file(&probe);
            Ok(())
        }
        Err(e) => Err(format!("output directory {} is not writable: {e}", existing.display())),
    }
}
