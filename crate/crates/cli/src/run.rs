//! Executes a [`RunConfig`]: the scan runs on a worker pool, then a single
//! writer emits all files in detuning order, ending with the manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use rydlens::scenario::{run_scan, spectrum_from_images, Diagnostics};
use rydlens::{thin_cloud_center_transmission, ResponseMode, Scenario, SolverOptions};
use serde::{Deserialize, Serialize};

use crate::config::{Conflict, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{write_atomic, write_image, write_spectrum};

pub const MANIFEST_FILE: &str = "manifest.toml";
pub const SCENARIO_FILE: &str = "scenario.toml";
pub const IMAGE_DIR: &str = "images";
/// Largest relative deviation from the thin-cloud formula counted as a pass.
pub const THIN_CLOUD_TOLERANCE: f64 = 0.02;

/// Reproducibility record of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub software: Software,
    pub run: RunInfo,
    pub scan: ScanInfo,
    pub thin_cloud_comparison: ThinCloudComparison,
    pub outputs: Outputs,
    /// Settings given both in the run file and as flags (the flag won).
    pub conflicts: Vec<Conflict>,
    /// Every physical and numerical parameter of the run, SI units.
    pub parameters: Scenario,
    /// Quantities computed from `parameters`, for reference only.
    pub derived: Derived,
    pub points: Vec<PointRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Software {
    pub name: String,
    pub version: String,
    pub library_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub scenario_source: String,
    /// `table` (interpolated steady state) or `direct` (verification mode).
    pub response: String,
    /// Response-table points per axis (0 in direct mode).
    pub table_size: usize,
    pub probe_headroom: f64,
    pub max_table_extensions: u32,
    pub threads: usize,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanInfo {
    pub start_over_gamma_e: f64,
    pub stop_over_gamma_e: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThinCloudComparison {
    /// `thin-cloud analytic comparison: pass` or `...: fail`.
    pub summary: String,
    pub passed: bool,
    pub max_relative_deviation: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outputs {
    pub directory: String,
    pub scenario: String,
    pub spectrum: String,
    pub manifest: String,
    /// Metadata files of the written images, in scan order.
    pub images: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    /// Ground–Rydberg coherence decay rate [rad/s].
    pub gamma_gr: f64,
    /// Resonant two-level cross section [m²].
    pub sigma_0: f64,
    /// Peak resonant two-level optical depth on axis.
    pub peak_optical_depth: f64,
    /// Coupling-beam Rayleigh length [m].
    pub coupling_rayleigh_length: f64,
    pub grid_dx: f64,
    pub grid_dy: f64,
    pub propagation_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub delta_p_over_gamma_e: f64,
    pub center_transmission: f64,
    pub thin_cloud_transmission: f64,
    pub background_transmission: f64,
    pub table_extensions: u32,
    /// Upper |Ω_p| of the final response table [rad/s].
    pub table_omega_p_max: f64,
    /// Largest exit-plane |Ω_p| [rad/s].
    pub exit_omega_p_max: f64,
    pub power_ratio: f64,
}

/// Runs the scan and writes `scenario.toml`, `spectrum.csv`, optional images
/// and `manifest.toml` into the output directory. Nothing is written unless
/// every scan point succeeded.
pub fn run(config: &RunConfig) -> Result<RunManifest> {
    let started = Instant::now();
    let s = &config.scenario;
    let gamma_e = s.levels.gamma_e;
    let opts = SolverOptions { response: config.response, ..SolverOptions::default() };
    let deltas = config.detunings();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| CliError::Validation(vec![format!("cannot start {} worker threads: {e}", config.threads)]))?;
    log::info!("{}: {} detunings on {} threads", s.name, deltas.len(), config.threads);
    type Computed = (Vec<(rydlens::ImageResult, Diagnostics)>, Vec<f64>);
    let (results, thin) = pool.install(|| -> Result<Computed> {
        let results = run_scan(s, &deltas, &opts)?;
        let thin =
            deltas.par_iter().map(|&d| thin_cloud_center_transmission(s, d)).collect::<rydlens::Result<Vec<f64>>>()?;
        Ok((results, thin))
    })?;
    let spectrum = spectrum_from_images(s, results.iter().map(|(img, _)| img));

    let points: Vec<PointRecord> = results
        .iter()
        .zip(&spectrum.entries)
        .zip(&thin)
        .map(|(((img, diag), &(delta, t)), &t_thin)| PointRecord {
            delta_p_over_gamma_e: delta / gamma_e,
            center_transmission: t,
            thin_cloud_transmission: t_thin,
            background_transmission: img.background(),
            table_extensions: diag.table_extensions,
            table_omega_p_max: diag.table_omega_p_max,
            exit_omega_p_max: diag.exit_omega_p_max,
            power_ratio: diag.power_ratio,
        })
        .collect();
    let max_dev = points
        .iter()
        .map(|p| (p.center_transmission - p.thin_cloud_transmission).abs() / p.thin_cloud_transmission)
        .fold(0.0, f64::max);
    let passed = max_dev <= THIN_CLOUD_TOLERANCE;

    // Single writer, after all results are in.
    let dir = &config.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let scenario_path = dir.join(SCENARIO_FILE);
    write_atomic(&scenario_path, s.to_toml().as_bytes())?;
    let spectrum_path = write_spectrum(&spectrum, gamma_e, dir)?;
    let mut images = Vec::new();
    if config.write_images {
        let image_dir = dir.join(IMAGE_DIR);
        std::fs::create_dir_all(&image_dir).map_err(|e| CliError::io(&image_dir, e))?;
        for (i, (img, _)) in results.iter().enumerate() {
            let paths = write_image(img, gamma_e, &image_dir, &format!("point_{i:04}"))?;
            images.push(relative(&paths.metadata, dir));
        }
    }

    let manifest = RunManifest {
        software: Software {
            name: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            library_version: rydlens::VERSION.into(),
        },
        run: RunInfo {
            scenario_source: config.scenario_source.clone(),
            response: match config.response {
                ResponseMode::Direct => "direct",
                ResponseMode::Linear => "linear",
                ResponseMode::Table { .. } => "table",
            }
            .into(),
            table_size: match config.response {
                ResponseMode::Table { size } => size,
                _ => 0,
            },
            probe_headroom: opts.probe_headroom,
            max_table_extensions: opts.max_table_extensions,
            threads: config.threads,
            wall_clock_seconds: started.elapsed().as_secs_f64(),
        },
        scan: ScanInfo {
            start_over_gamma_e: config.scan.start,
            stop_over_gamma_e: config.scan.stop,
            count: config.scan.count,
        },
        thin_cloud_comparison: ThinCloudComparison {
            summary: format!("thin-cloud analytic comparison: {}", if passed { "pass" } else { "fail" }),
            passed,
            max_relative_deviation: max_dev,
            tolerance: THIN_CLOUD_TOLERANCE,
        },
        outputs: Outputs {
            directory: dir.display().to_string(),
            scenario: SCENARIO_FILE.into(),
            spectrum: relative(&spectrum_path, dir),
            manifest: MANIFEST_FILE.into(),
            images,
        },
        conflicts: config.conflicts.clone(),
        parameters: s.clone(),
        derived: Derived {
            gamma_gr: s.levels.gamma_gr(),
            sigma_0: s.levels.sigma_0(),
            peak_optical_depth: s.levels.sigma_0() * s.cloud.column_density(),
            coupling_rayleigh_length: s.coupling.rayleigh_length(),
            grid_dx: s.grid.dx(),
            grid_dy: s.grid.dy(),
            propagation_steps: s.settings.steps().len(),
        },
        points,
    };
    let text = toml::to_string(&manifest)
        .map_err(|e| CliError::Parse { origin: MANIFEST_FILE.into(), message: e.to_string() })?;
    write_atomic(&dir.join(MANIFEST_FILE), text.as_bytes())?;
    Ok(manifest)
}

/// Reads a manifest written by [`run`].
pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Parse { origin: path.display().to_string(), message: e.to_string().trim().to_string() })
}

fn relative(path: &Path, base: &Path) -> String {
    path.strip_prefix(base).map(PathBuf::from).unwrap_or_else(|_| path.to_path_buf()).display().to_string()
}
