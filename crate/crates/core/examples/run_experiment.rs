//! Run an experiment from an inline config and replay it from its manifest.
use qrlab::runner::{list_experiments, replay, run, ExperimentConfig, MANIFEST_FILE};

const CONFIG: &str = r#"
experiment = "decay"
map = "beurling:a=0.5"
seed = 2
"#;

fn main() -> qrlab::Result<()> {
    for e in list_experiments() {
        println!("{:<24} {}", e.name, e.description);
    }
    let dir = std::env::temp_dir().join("qrlab-example");
    let cfg = ExperimentConfig::from_toml(CONFIG)?;
    let manifest = run(&cfg, Some(&dir.join("first")))?;
    for c in &manifest.checks {
        println!(
            "{} {}: {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    let rep = replay(&dir.join("first").join(MANIFEST_FILE), &dir.join("second"))?;
    println!(
        "replay identical: {} ({:?})",
        rep.identical(),
        rep.manifest.outputs
    );
    Ok(())
}
