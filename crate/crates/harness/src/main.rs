use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use coordsim::{parse_config, run_command, CommandKind, Format, HarnessError, RunOptions};
use serde_json::{Map, Value};

/// Deterministic flocking, coordination-dynamics and chaos simulations.
///
/// Every run is fully determined by its JSON config and seed. Outputs and a
/// manifest with SHA-256 digests are written to the output directory.
#[derive(Debug, Parser)]
#[command(name = "coordsim", version)]
struct Cli {
    #[arg(value_enum)]
    command: CommandKind,
    /// JSON run config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads (0 = all cores). Never changes the output.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn load(cli: &Cli) -> Result<coordsim::RunConfig, HarnessError> {
    let mut doc = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
                path: path.clone(),
                source,
            })?;
            match serde_json::from_str(&text) {
                Ok(Value::Object(map)) => map,
                Ok(_) => {
                    return Err(HarnessError::Config(format!(
                        "{}: expected a JSON object",
                        path.display()
                    )))
                }
                Err(e) => return Err(HarnessError::Config(format!("{}: {e}", path.display()))),
            }
        }
        None => Map::new(),
    };
    let command = Value::from(cli.command.name());
    match doc.get("command") {
        Some(c) if *c != command => {
            return Err(HarnessError::Config(format!(
                "config names command {c} but the command line asks for \"{}\"",
                cli.command.name()
            )))
        }
        _ => {
            doc.insert("command".into(), command);
        }
    }
    if let Some(seed) = cli.seed {
        doc.insert("seed".into(), seed.into());
    }
    if !doc.contains_key("seed") {
        return Err(HarnessError::Config(
            "a seed is required (--seed or \"seed\" in the config)".into(),
        ));
    }
    if let Some(out) = &cli.out {
        doc.insert(
            "output_dir".into(),
            out.to_string_lossy().into_owned().into(),
        );
    }
    if let Some(format) = cli.format {
        doc.insert(
            "format".into(),
            serde_json::to_value(format).expect("format serializes"),
        );
    }
    parse_config(&Value::Object(doc).to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load(&cli).and_then(|cfg| run_command(&cfg, &RunOptions { jobs: cli.jobs }));
    match result {
        Ok(manifest) => {
            println!(
                "{}: wrote {} files to {}",
                manifest.config.command.name(),
                manifest.outputs.len() + 1,
                manifest.config.output_dir.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            // the message already embeds its source chain
            eprintln!("coordsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
