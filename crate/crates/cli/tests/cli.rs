//! The `rydlens` binary end to end: exit codes, error categories and the
//! files a successful run leaves behind.

use std::path::Path;
use std::process::{Command, Output};

use rydlens_cli::{read_image, read_manifest, read_spectrum};

fn rydlens(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rydlens"))
        .args(args)
        .env("RYDLENS_OUT", out)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn small_run_writes_spectrum_images_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = rydlens(&["--scenario", "fig4", "--grid", "32", "--table", "32", "--scan", "-1:1:3", "--images"], &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = String::from_utf8_lossy(&o.stdout);
    assert!(summary.contains("3 points written"), "{summary}");

    let spectrum = read_spectrum(&out.join("spectrum.csv")).unwrap();
    let detunings: Vec<f64> = spectrum.iter().map(|&(d, _)| d).collect();
    assert_eq!(detunings, [-1.0, 0.0, 1.0]);
    assert!(spectrum.iter().all(|&(_, t)| t > 0.0 && t <= 1.0));

    let manifest = read_manifest(&out.join("manifest.toml")).unwrap();
    assert_eq!(manifest.points.len(), 3);
    assert_eq!(manifest.run.table_size, 32);
    assert_eq!(manifest.parameters.grid.nx, 32);
    assert_eq!(manifest.outputs.images.len(), 3);
    for (point, &(_, t)) in manifest.points.iter().zip(&spectrum) {
        // The CSV carries 12 significant digits of the manifest value.
        assert_eq!(format!("{:.11e}", point.center_transmission).parse::<f64>().unwrap(), t);
    }
    let (meta, image) = read_image(&out.join(&manifest.outputs.images[1])).unwrap();
    assert_eq!((meta.nx, meta.ny), (32, 32));
    assert_eq!(meta.delta_p_over_gamma_e, 0.0);
    assert_eq!(image.intensity.len(), 32 * 32);
    assert!(out.join("scenario.toml").is_file());
}

#[test]
fn unknown_preset_exits_with_its_own_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = rydlens(&["--scenario", "fig9"], dir.path());
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).starts_with("error[unknown-preset]"), "{}", stderr(&o));
}

#[test]
fn malformed_scan_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = rydlens(&["--scenario", "fig3b", "--scan", "-1:1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error[parse-error]"), "{}", stderr(&o));
}

#[test]
fn every_violation_is_reported_and_nothing_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let o = rydlens(&["--scenario", "fig3b", "--grid", "8", "--dz", "0", "--table", "2"], &out);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.starts_with("error[validation-error]"), "{err}");
    for needle in ["grid", "dz", "table"] {
        assert!(err.contains(needle), "missing {needle}: {err}");
    }
    assert!(!out.exists());
}

#[test]
fn version_and_help_succeed() {
    let dir = tempfile::tempdir().unwrap();
    for flag in ["--version", "--help"] {
        let o = rydlens(&[flag], dir.path());
        assert!(o.status.success());
        assert!(String::from_utf8_lossy(&o.stdout).contains("rydlens"));
    }
}
