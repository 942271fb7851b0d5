use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Dimension, QuadratureSpec};
use crate::lab::{Constants, TraceConfig};
use crate::maps::{parse_map, MapHandle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Eggyolk,
    Decay,
    Changmarshall,
    Sharpness,
    Moser,
    ModulusConvergence,
    CapacitySymmetrization,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Eggyolk,
        Experiment::Decay,
        Experiment::Changmarshall,
        Experiment::Sharpness,
        Experiment::Moser,
        Experiment::ModulusConvergence,
        Experiment::CapacitySymmetrization,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Eggyolk => "eggyolk",
            Experiment::Decay => "decay",
            Experiment::Changmarshall => "changmarshall",
            Experiment::Sharpness => "sharpness",
            Experiment::Moser => "moser",
            Experiment::ModulusConvergence => "modulus-convergence",
            Experiment::CapacitySymmetrization => "capacity-symmetrization",
        }
    }

    /// Whether the experiment reads `map` / `maps`.
    pub fn uses_maps(self) -> bool {
        matches!(
            self,
            Experiment::Eggyolk | Experiment::Decay | Experiment::Changmarshall | Experiment::Moser
        )
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub path: PathBuf,
    pub format: Format,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            path: PathBuf::from("out"),
            format: Format::Csv,
        }
    }
}

/// Overrides for the calibrated constants.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstantOverrides {
    pub c_n: Option<f64>,
    pub c2: Option<f64>,
    pub epsilon: Option<f64>,
}

impl ConstantOverrides {
    pub fn resolve(&self, n: Dimension) -> Constants {
        let base = Constants::calibrated(n);
        Constants {
            c_n: self.c_n.unwrap_or(base.c_n),
            c2: self.c2.unwrap_or(base.c2),
            epsilon: self.epsilon.unwrap_or(base.epsilon),
        }
    }
}

/// Sweep and grid parameters. Each experiment reads the keys listed in its
/// catalog entry; unset keys take the documented defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grids {
    /// eggyolk: radius to test; unset means the smallest closed-form `r₀`.
    pub r0: Option<f64>,
    /// eggyolk: number of `M` values (8).
    pub m_points: Option<usize>,
    /// eggyolk: also bisect for the empirical radius to this tolerance.
    pub empirical_tolerance: Option<f64>,
    /// decay: inner radius (1/2); capacity: ring parameter (1/2).
    pub r: Option<f64>,
    /// decay: levels `s`; unset means `0.05k` above `M` up to 3.
    pub s_grid: Option<Vec<f64>>,
    /// decay: repeat with a doubled budget and compare `C₁` (true).
    pub stability: Option<bool>,
    /// sharpness: distortion `K` (1).
    pub k: Option<f64>,
    /// sharpness: exponents (1, 1.2).
    pub betas: Option<Vec<f64>>,
    /// sharpness: values of `a`; unset means `1 − 10^{−j}`, `j = 1..=6`.
    pub a_grid: Option<Vec<f64>>,
    /// sharpness: half-plane scale `c` (1).
    pub c: Option<f64>,
    /// changmarshall / sharpness / moser: uniform bound to check against.
    pub bound: Option<f64>,
    /// sharpness: blow-up level for exponents above `1/K` (1000).
    pub blowup: Option<f64>,
    /// sharpness: blow-up must occur at some `a ≤ a_limit` (1 − 1e−6).
    pub a_limit: Option<f64>,
    /// moser: cut-offs of the test family (1, 4, 16).
    pub t_values: Option<Vec<f64>>,
    /// moser: steps per test-family grid (4000).
    pub steps: Option<usize>,
    /// moser: profile range and bin count (4, 800).
    pub t_max: Option<f64>,
    pub bins: Option<usize>,
    /// modulus-convergence: grid sizes (100, 200); capacity-symmetrization
    /// uses the first entry (100 in the plane, 24 in space).
    pub cells: Option<Vec<usize>>,
    /// modulus-convergence: ring radii (1, e).
    pub inner: Option<f64>,
    pub outer: Option<f64>,
    /// modulus-convergence: rectangle sides (1.5, 1).
    pub length: Option<f64>,
    pub width: Option<f64>,
    /// Curves per boundary cell (4).
    pub per_cell: Option<f64>,
    /// capacity-symmetrization: cap angles; unset means `kπ/8`, `k = 1..=8`.
    pub thetas: Option<Vec<f64>>,
    /// capacity-symmetrization: random instances (10), their measure (1.5)
    /// and number of arcs (3).
    pub instances: Option<usize>,
    pub measure: Option<f64>,
    pub pieces: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub maps: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub traces: TraceConfig,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub constants: ConstantOverrides,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::ConfigInvalid(vec![e.to_string()]))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Propagate the top-level seed into the quadrature and trace settings.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.quadrature.seed = seed;
        self.traces.seed = seed;
        self
    }

    /// Map ids in order: `map` first, then `maps`.
    pub fn map_ids(&self) -> Vec<String> {
        self.map
            .iter()
            .cloned()
            .chain(self.maps.iter().cloned())
            .collect()
    }

    pub fn resolve_maps(&self) -> Result<Vec<MapHandle>> {
        self.map_ids().iter().map(|id| parse_map(id)).collect()
    }

    /// Schema checks beyond what deserialization enforces.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if let Err(e) = self.quadrature.validate() {
            errs.push(format!("quadrature: {e}"));
        }
        if self.traces.directions < 2 {
            errs.push("traces.directions: need at least 2".into());
        }
        let ids = self.map_ids();
        if self.experiment.uses_maps() && ids.is_empty() {
            errs.push(format!(
                "map: experiment {} needs `map` or `maps`",
                self.experiment.name()
            ));
        }
        if !self.experiment.uses_maps() && !ids.is_empty() {
            errs.push(format!(
                "map: experiment {} takes no map",
                self.experiment.name()
            ));
        }
        for id in &ids {
            match parse_map(id) {
                Ok(m) => {
                    if let Some(d) = self.dimension {
                        if m.dim().get() != d {
                            errs.push(format!(
                                "map: {id} has dimension {}, config says {d}",
                                m.dim().get()
                            ));
                        }
                    }
                    if matches!(
                        self.experiment,
                        Experiment::Eggyolk | Experiment::Changmarshall | Experiment::Moser
                    ) && !m.origin_fixed()
                    {
                        errs.push(format!("map: {id} does not fix the origin"));
                    }
                }
                Err(e) => errs.push(format!("map: {e}")),
            }
        }
        if let Some(d) = self.dimension {
            if d < 2 {
                errs.push("dimension: must be at least 2".into());
            }
        }
        let g = &self.grids;
        let unit = |name: &str, v: Option<f64>, errs: &mut Vec<String>| {
            if let Some(v) = v {
                if !(v > 0.0 && v < 1.0) {
                    errs.push(format!("grids.{name}: must lie in (0, 1), got {v}"));
                }
            }
        };
        let positive = |name: &str, v: Option<f64>, errs: &mut Vec<String>| {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    errs.push(format!("grids.{name}: must be positive, got {v}"));
                }
            }
        };
        unit("r0", g.r0, &mut errs);
        unit("r", g.r, &mut errs);
        unit("empirical_tolerance", g.empirical_tolerance, &mut errs);
        unit("a_limit", g.a_limit, &mut errs);
        for (name, v) in [
            ("c", g.c),
            ("bound", g.bound),
            ("blowup", g.blowup),
            ("t_max", g.t_max),
            ("inner", g.inner),
            ("outer", g.outer),
            ("length", g.length),
            ("width", g.width),
            ("per_cell", g.per_cell),
            ("measure", g.measure),
        ] {
            positive(name, v, &mut errs);
        }
        if let Some(k) = g.k {
            if !(k >= 1.0 && k.is_finite()) {
                errs.push(format!("grids.k: must be at least 1, got {k}"));
            }
        }
        if let (Some(a), Some(b)) = (g.inner, g.outer) {
            if !(b > a) {
                errs.push("grids.outer: must exceed grids.inner".into());
            }
        }
        if let Some(s) = &g.s_grid {
            if s.is_empty() || s.windows(2).any(|w| !(w[1] > w[0])) {
                errs.push("grids.s_grid: must be non-empty and strictly increasing".into());
            }
        }
        if let Some(a) = &g.a_grid {
            if a.is_empty() || a.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
                errs.push("grids.a_grid: values must lie in (0, 1)".into());
            }
        }
        for (name, v) in [
            ("betas", &g.betas),
            ("t_values", &g.t_values),
            ("thetas", &g.thetas),
        ] {
            if let Some(v) = v {
                if v.is_empty() || v.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                    errs.push(format!("grids.{name}: values must be positive"));
                }
            }
        }
        if let Some(t) = &g.thetas {
            if t.iter().any(|&x| x > std::f64::consts::PI) {
                errs.push("grids.thetas: angles must not exceed π".into());
            }
        }
        if let Some(m) = g.measure {
            if m >= 2.0 * std::f64::consts::PI {
                errs.push("grids.measure: must be below 2π".into());
            }
        }
        for (name, v) in [
            ("m_points", g.m_points),
            ("steps", g.steps),
            ("bins", g.bins),
            ("instances", g.instances),
            ("pieces", g.pieces),
        ] {
            if v == Some(0) {
                errs.push(format!("grids.{name}: must be positive"));
            }
        }
        if let Some(c) = &g.cells {
            if c.is_empty() || c.iter().any(|&c| c < 2) {
                errs.push("grids.cells: need sizes of at least 2".into());
            }
        }
        for (name, v) in [
            ("c_n", self.constants.c_n),
            ("c2", self.constants.c2),
            ("epsilon", self.constants.epsilon),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    errs.push(format!("constants.{name}: must be positive, got {v}"));
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::ConfigInvalid(errs))
        }
    }
}
