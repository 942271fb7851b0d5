use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qrlab::lab::text_table;
use qrlab::runner::{list_experiments, replay, run, ExperimentConfig};

/// Run quasiregular-map experiments from a TOML config.
#[derive(Parser)]
#[command(version)]
struct Cli {
    /// Experiment config (TOML).
    #[arg(long, required_unless_present_any = ["replay", "list"])]
    config: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Re-run the config stored in a manifest and compare outputs byte for byte.
    #[arg(long, conflicts_with = "config")]
    replay: Option<PathBuf>,
    /// Print the experiment catalog as JSON.
    #[arg(long)]
    list: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match body(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn body(cli: Cli) -> qrlab::Result<bool> {
    if cli.list {
        println!("{}", serde_json::to_string_pretty(&list_experiments())?);
        return Ok(true);
    }
    if let Some(manifest) = cli.replay {
        let out = cli
            .out
            .unwrap_or_else(|| manifest.parent().unwrap_or(".".as_ref()).join("replay"));
        let rep = replay(&manifest, &out)?;
        for name in &rep.mismatched {
            println!("differs: {name}");
        }
        println!(
            "replay {} ({} files)",
            if rep.identical() {
                "identical"
            } else {
                "DIFFERS"
            },
            rep.manifest.outputs.len()
        );
        return Ok(rep.identical() && rep.manifest.passed);
    }
    let mut cfg = ExperimentConfig::load(cli.config.as_deref().expect("clap enforces --config"))?;
    if let Some(seed) = cli.seed {
        cfg = cfg.with_seed(seed);
    }
    let manifest = run(&cfg, cli.out.as_deref())?;
    let rows: Vec<Vec<String>> = manifest
        .checks
        .iter()
        .map(|c| {
            vec![
                if c.pass { "PASS" } else { "FAIL" }.to_string(),
                c.name.clone(),
                c.detail.clone(),
            ]
        })
        .collect();
    print!("{}", text_table(&["status", "check", "detail"], &rows));
    if let Some(e) = &manifest.error {
        println!("aborted: {e}");
    }
    println!(
        "{} in {:.1}s",
        if manifest.passed { "passed" } else { "failed" },
        manifest.wall_time_seconds
    );
    Ok(manifest.passed)
}
