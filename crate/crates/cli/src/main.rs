use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rydlens_cli::{resolve, run, CliError, Flags, OUT_DIR_VAR};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let flags = match Flags::try_parse() {
        Ok(flags) => flags,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let err = CliError::Parse { origin: "command line".into(), message: e.to_string().trim().to_string() };
            return fail(&err);
        }
    };
    let env_out = std::env::var_os(OUT_DIR_VAR).map(PathBuf::from);
    match resolve(flags, env_out).and_then(|config| run(&config)) {
        Ok(manifest) => {
            println!(
                "{} points written to {} in {:.1} s ({})",
                manifest.points.len(),
                manifest.outputs.directory,
                manifest.run.wall_clock_seconds,
                manifest.thin_cloud_comparison.summary
            );
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error[{}]: {e}", e.category());
    ExitCode::from(e.exit_code() as u8)
}
