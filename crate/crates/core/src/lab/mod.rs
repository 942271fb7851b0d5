//! Numerical checks of the exponential-integrability results: the
//! egg-yolk principle, the closed-form `r₀` radii, decay of the trace
//! distribution, the boundary exponential integral and its sharpness, and
//! the reduction to a Moser-type functional.

mod constants;
mod decay;
mod eggyolk;
mod expint;
mod moser;

use serde::{Deserialize, Serialize};

use crate::level_sets::TracePolicy;

pub use constants::{beta, r0_formula, r0_min, Constants, R0Case, R0};
pub use decay::{decay_check, DecayReport, DECAY_PROFILE_BINS};
pub use eggyolk::{
    eggyolk_check, empirical_r0, sup_on_ball, EggYolkReport, EmpiricalR0, RADIUS_FLOOR, SUP_SAMPLES,
};
pub use expint::{
    beurling_boundary_sq, changmarshall_check, sharpness_sweep, stretch_boundary_angle,
    ChangMarshallReport, CAVALIERI_NODES, OVERFLOW_SENTINEL,
};
pub use moser::{
    finiteness_check, holder_sides, moser_functional, psi_tilde, FinitenessReport, MoserInput,
    MoserOutput, PsiTilde, ENERGY_LIMIT,
};

/// Boundary trace sampling used by the checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TraceConfig {
    pub directions: usize,
    pub policy: TracePolicy,
    pub seed: u64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            directions: 4096,
            policy: TracePolicy::default(),
            seed: 0,
        }
    }
}

/// Right-aligned plain-text table.
pub fn text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{:>width$}", c, width = w))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    out.push_str(&line(widths.iter().map(|_| "").collect::<Vec<_>>()).replace(' ', "-"));
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}
