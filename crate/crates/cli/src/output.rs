//! Spectrum, image and metadata writers. Every file is written to a temporary
//! name and renamed into place, so a failed write never leaves a truncated
//! output behind.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rydlens::{ImageResult, SpectrumResult, TransverseGrid};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SPECTRUM_HEADER: &str = "delta_p_over_gamma_e,transmission";
pub const GRAYMAP_MAXVAL: u16 = u16::MAX;
pub const RAW_FORMAT: &str = "f64-le";

/// Formats `v` with 12 significant digits in scientific notation.
pub fn format_sig12(v: f64) -> String {
    // Avoid a "-0" that would differ from "0" between otherwise equal runs.
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.11e}")
}

/// CSV text of a spectrum, one row per point in scan order.
pub fn spectrum_csv(r: &SpectrumResult, gamma_e: f64) -> String {
    let mut out = String::with_capacity(32 * (r.entries.len() + 1));
    out.push_str(SPECTRUM_HEADER);
    out.push('\n');
    for (delta, t) in &r.entries {
        let _ = writeln!(out, "{},{}", format_sig12(delta / gamma_e), format_sig12(*t));
    }
    out
}

/// Writes `spectrum.csv` into `dir` and returns its path.
pub fn write_spectrum(r: &SpectrumResult, gamma_e: f64, dir: &Path) -> Result<PathBuf> {
    if r.entries.is_empty() {
        return Err(CliError::Validation(vec!["cannot write an empty spectrum".into()]));
    }
    let path = dir.join("spectrum.csv");
    write_atomic(&path, spectrum_csv(r, gamma_e).as_bytes())?;
    Ok(path)
}

/// Reads a spectrum CSV back as `(Δ_p/Γ_e, T)` rows.
pub fn read_spectrum(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let parse_error =
        |line: usize, message: String| CliError::Parse { origin: format!("{}:{}", path.display(), line + 1), message };
    match lines.next() {
        Some((_, SPECTRUM_HEADER)) => {}
        _ => return Err(parse_error(0, format!("expected header `{SPECTRUM_HEADER}`"))),
    }
    lines
        .map(|(i, line)| {
            let (a, b) = line.split_once(',').ok_or_else(|| parse_error(i, "expected two columns".into()))?;
            let number = |s: &str| s.parse::<f64>().map_err(|e| parse_error(i, format!("`{s}`: {e}")));
            Ok((number(a)?, number(b)?))
        })
        .collect()
}

/// Sidecar record describing an image's grid and graymap scaling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageMetadata {
    pub scenario: String,
    /// Probe detuning [rad/s].
    pub delta_p: f64,
    pub delta_p_over_gamma_e: f64,
    pub lensing: bool,
    pub nx: usize,
    pub ny: usize,
    /// Window edge lengths [m].
    pub lx: f64,
    pub ly: f64,
    /// Quantity stored in both files.
    pub quantity: String,
    pub raw_file: String,
    /// Element type and byte order of the raw grid.
    pub raw_format: String,
    /// Layout of the raw grid: `value[iy * nx + ix]` at
    /// `x = (ix - nx/2)·lx/nx`, `y = (iy - ny/2)·ly/ny`.
    pub raw_layout: String,
    pub graymap_file: String,
    /// Value mapped to gray level 0.
    pub graymap_min: f64,
    /// Value mapped to gray level `graymap_maxval` (equal to the minimum for a
    /// constant image, which then maps entirely to 0).
    pub graymap_max: f64,
    pub graymap_maxval: u16,
    /// Orientation of the graymap rows.
    pub graymap_rows: String,
}

impl ImageMetadata {
    pub fn grid(&self) -> Result<TransverseGrid> {
        Ok(TransverseGrid::new(self.nx, self.ny, self.lx, self.ly)?)
    }
}

/// Files produced for one image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImagePaths {
    pub graymap: PathBuf,
    pub raw: PathBuf,
    pub metadata: PathBuf,
}

/// 16-bit binary graymap (`P5`, big-endian samples), top row at largest `y`.
pub fn graymap_bytes(img: &ImageResult, min: f64, max: f64) -> Vec<u8> {
    let (nx, ny) = (img.grid.nx, img.grid.ny);
    let mut out = format!("P5\n{nx} {ny}\n{GRAYMAP_MAXVAL}\n").into_bytes();
    out.reserve(2 * nx * ny);
    let span = max - min;
    for iy in (0..ny).rev() {
        for v in &img.intensity[iy * nx..(iy + 1) * nx] {
            let level = if span > 0.0 {
                (((v - min) / span).clamp(0.0, 1.0) * GRAYMAP_MAXVAL as f64).round() as u16
            } else {
                0
            };
            out.extend_from_slice(&level.to_be_bytes());
        }
    }
    out
}

/// Writes `<stem>.pgm`, `<stem>.f64` and `<stem>.toml` into `dir`.
pub fn write_image(img: &ImageResult, gamma_e: f64, dir: &Path, stem: &str) -> Result<ImagePaths> {
    let (min, max) = img.min_max();
    let paths = ImagePaths {
        graymap: dir.join(format!("{stem}.pgm")),
        raw: dir.join(format!("{stem}.f64")),
        metadata: dir.join(format!("{stem}.toml")),
    };
    let file_name = |p: &Path| p.file_name().unwrap_or_default().to_string_lossy().into_owned();
    let metadata = ImageMetadata {
        scenario: img.scenario.clone(),
        delta_p: img.delta_p,
        delta_p_over_gamma_e: img.delta_p / gamma_e,
        lensing: img.lensing,
        nx: img.grid.nx,
        ny: img.grid.ny,
        lx: img.grid.lx,
        ly: img.grid.ly,
        quantity: "exit-plane probe intensity over incoming peak intensity".into(),
        raw_file: file_name(&paths.raw),
        raw_format: RAW_FORMAT.into(),
        raw_layout: "row-major, value[iy * nx + ix]".into(),
        graymap_file: file_name(&paths.graymap),
        graymap_min: min,
        graymap_max: max,
        graymap_maxval: GRAYMAP_MAXVAL,
        graymap_rows: "first row at largest y".into(),
    };
    let raw: Vec<u8> = img.intensity.iter().flat_map(|v| v.to_le_bytes()).collect();
    let meta_text = toml::to_string(&metadata).expect("image metadata serialises");
    write_atomic(&paths.graymap, &graymap_bytes(img, min, max))?;
    write_atomic(&paths.raw, &raw)?;
    write_atomic(&paths.metadata, meta_text.as_bytes())?;
    Ok(paths)
}

/// Reads an image back from its metadata file; the raw grid is returned
/// exactly as written.
pub fn read_image(metadata_path: &Path) -> Result<(ImageMetadata, ImageResult)> {
    let text = std::fs::read_to_string(metadata_path).map_err(|e| CliError::io(metadata_path, e))?;
    let metadata: ImageMetadata = toml::from_str(&text).map_err(|e| CliError::Parse {
        origin: metadata_path.display().to_string(),
        message: e.to_string().trim().to_string(),
    })?;
    if metadata.raw_format != RAW_FORMAT {
        return Err(CliError::Parse {
            origin: metadata_path.display().to_string(),
            message: format!("unsupported raw format `{}`", metadata.raw_format),
        });
    }
    let grid = metadata.grid()?;
    let raw_path = metadata_path.with_file_name(&metadata.raw_file);
    let bytes = std::fs::read(&raw_path).map_err(|e| CliError::io(&raw_path, e))?;
    if bytes.len() != 8 * grid.len() {
        return Err(CliError::Parse {
            origin: raw_path.display().to_string(),
            message: format!("expected {} bytes, found {}", 8 * grid.len(), bytes.len()),
        });
    }
    let intensity =
        bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of eight bytes"))).collect();
    let image = ImageResult {
        scenario: metadata.scenario.clone(),
        delta_p: metadata.delta_p,
        lensing: metadata.lensing,
        grid,
        intensity,
    };
    Ok((metadata, image))
}

/// Writes `bytes` to a sibling temporary file and renames it onto `path`.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(".part");
    let tmp = path.with_file_name(tmp_name);
    std::fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        CliError::io(path, e)
    })
}
