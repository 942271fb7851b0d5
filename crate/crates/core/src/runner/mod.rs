//! Config-driven experiment runner: TOML in, CSV or JSON tables plus a
//! manifest out, with replay from the manifest.

mod config;
mod experiments;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use config::{ConstantOverrides, Experiment, ExperimentConfig, Format, Grids, OutputConfig};
pub use experiments::{CHANG_MARSHALL_BOUND, MOSER_FAMILY_BOUND};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const REPORT_FILE: &str = "report.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

/// One output table; `csv` already carries its `#` comment line.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub csv: String,
}

impl Table {
    pub fn new(name: &str, csv: String) -> Self {
        Table {
            name: name.to_string(),
            csv,
        }
    }
}

/// In-memory result of an experiment.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub report: Value,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn new(tables: Vec<Table>, report: Value, checks: Vec<Check>) -> Self {
        Outcome {
            tables,
            report,
            checks,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub experiment: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    /// Files written next to the manifest, in write order.
    pub outputs: Vec<String>,
    pub checks: Vec<Check>,
    pub passed: bool,
    /// Set when the experiment aborted; `outputs` then holds only the report.
    pub error: Option<String>,
    pub wall_time_seconds: f64,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Run the experiment in memory without touching the filesystem.
pub fn execute(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    experiments::execute(cfg)
}

/// Run and write outputs to `out` (or `cfg.output.path`). Computation errors
/// are recorded in the manifest; configuration and I/O errors are returned.
pub fn run(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<RunManifest> {
    cfg.validate()?;
    let dir: PathBuf = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| cfg.output.path.clone());
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let start = Instant::now();
    let result = experiments::execute(cfg);
    let mut outputs = Vec::new();
    let (checks, error) = match result {
        Ok(outcome) => {
            if cfg.output.format == Format::Csv {
                for t in &outcome.tables {
                    let name = format!("{}.csv", t.name);
                    write(&dir, &name, &t.csv)?;
                    outputs.push(name);
                }
            }
            let mut report = serde_json::json!({
                "experiment": cfg.experiment.name(),
                "seed": cfg.seed,
                "config": cfg,
                "results": outcome.report,
                "checks": outcome.checks,
            });
            if cfg.output.format == Format::Json {
                let tables: serde_json::Map<String, Value> = outcome
                    .tables
                    .iter()
                    .map(|t| (t.name.clone(), Value::String(t.csv.clone())))
                    .collect();
                report["tables"] = Value::Object(tables);
            }
            write(&dir, REPORT_FILE, &serde_json::to_string_pretty(&report)?)?;
            outputs.push(REPORT_FILE.to_string());
            (outcome.checks, None)
        }
        Err(e) => {
            let report = serde_json::json!({
                "experiment": cfg.experiment.name(),
                "seed": cfg.seed,
                "config": cfg,
                "error": e.to_string(),
            });
            write(&dir, REPORT_FILE, &serde_json::to_string_pretty(&report)?)?;
            outputs.push(REPORT_FILE.to_string());
            (Vec::new(), Some(e.to_string()))
        }
    };
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        experiment: cfg.experiment.name().to_string(),
        seed: cfg.seed,
        config: cfg.clone(),
        outputs,
        passed: error.is_none() && checks.iter().all(|c| c.pass),
        checks,
        error,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    write(
        &dir,
        MANIFEST_FILE,
        &serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(manifest)
}

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub manifest: RunManifest,
    /// Output files whose bytes differ from the original run.
    pub mismatched: Vec<String>,
}

impl ReplayReport {
    pub fn identical(&self) -> bool {
        self.mismatched.is_empty()
    }
}

/// Re-run the config stored in `manifest_path` into `out` and compare every
/// output file byte for byte with the originals next to the manifest.
pub fn replay(manifest_path: &Path, out: &Path) -> Result<ReplayReport> {
    let original = RunManifest::load(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let manifest = run(&original.config, Some(out))?;
    let mut mismatched = Vec::new();
    for name in original.outputs.iter().chain(
        manifest
            .outputs
            .iter()
            .filter(|n| !original.outputs.contains(n)),
    ) {
        let a = std::fs::read(base.join(name)).ok();
        let b = std::fs::read(out.join(name)).ok();
        if a.is_none() || a != b {
            mismatched.push(name.clone());
        }
    }
    Ok(ReplayReport {
        manifest,
        mismatched,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    /// The result the experiment probes.
    pub anchor: String,
    pub required_keys: Vec<String>,
    pub optional_keys: Vec<String>,
}

pub fn list_experiments() -> Vec<CatalogEntry> {
    let entry =
        |e: Experiment, description: &str, anchor: &str, required: &[&str], optional: &[&str]| {
            CatalogEntry {
                name: e.name().to_string(),
                description: description.to_string(),
                anchor: anchor.to_string(),
                required_keys: required.iter().map(|s| s.to_string()).collect(),
                optional_keys: optional.iter().map(|s| s.to_string()).collect(),
            }
        };
    let common = ["seed", "quadrature", "output"];
    let with = |extra: &[&'static str]| -> Vec<&'static str> {
        common
            .iter()
            .copied()
            .chain(extra.iter().copied())
            .collect()
    };
    vec![
        entry(
            Experiment::Eggyolk,
            "sub-level Jacobian mass of the inverse against alpha_n M^n below the critical radius",
            "egg-yolk principle for the inverse of a normalized K-qr map",
            &["experiment", "map or maps"],
            &with(&["grids.r0", "grids.m_points", "grids.empirical_tolerance", "constants.c_n"]),
        ),
        entry(
            Experiment::Decay,
            "distribution of sphere-trace sup norms against the exponential decay shape",
            "Beurling-type decay estimate for boundary traces",
            &["experiment", "map or maps"],
            &with(&["traces", "grids.r", "grids.s_grid", "grids.stability"]),
        ),
        entry(
            Experiment::Changmarshall,
            "boundary exponential integral at the critical exponent via the trace distribution",
            "Chang-Marshall type exponential integrability for qr maps",
            &["experiment", "map or maps"],
            &with(&["traces", "grids.bound"]),
        ),
        entry(
            Experiment::Sharpness,
            "boundary exponential integral of B_(K,a) along a sweep a -> 1",
            "sharpness of the critical exponent",
            &["experiment"],
            &["grids.k", "grids.betas", "grids.a_grid", "grids.c", "grids.bound", "grids.blowup", "grids.a_limit"],
        ),
        entry(
            Experiment::Moser,
            "Moser functional on the energy-one test family and on the rescaled inverse level function",
            "reduction of the exponential integral to a Moser-type functional",
            &["experiment", "map or maps"],
            &with(&["dimension", "grids.t_values", "grids.steps", "grids.bound", "grids.r", "grids.t_max", "grids.bins"]),
        ),
        entry(
            Experiment::ModulusConvergence,
            "discrete modulus of ring and rectangle families under grid refinement",
            "closed-form modulus of rings and rectangles",
            &["experiment"],
            &["dimension", "grids.cells", "grids.inner", "grids.outer", "grids.length", "grids.width", "grids.per_cell"],
        ),
        entry(
            Experiment::CapacitySymmetrization,
            "condenser capacity of caps and random arc sets, symmetrization and the capacity lower bound",
            "spherical symmetrization and Gehring's capacity lower bound",
            &["experiment"],
            &[
                "seed", "dimension", "grids.r", "grids.thetas", "grids.cells", "grids.per_cell", "grids.instances",
                "grids.measure", "grids.pieces", "constants",
            ],
        ),
    ]
}
