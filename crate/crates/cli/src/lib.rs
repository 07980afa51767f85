//! Command-line front end for `rydlens`: configuration parsing, the scan
//! driver, and writers for spectra, images and run manifests.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, resolve, Conflict, Flags, RunConfig, Scan, OUT_DIR_VAR};
pub use error::{CliError, Result};
pub use output::{read_image, read_spectrum, write_image, write_spectrum, ImageMetadata, ImagePaths};
pub use run::{read_manifest, run, RunManifest};
