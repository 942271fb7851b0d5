//! Level-set area functions, boundary traces and their distribution.
//!
//! Multiplicity is never counted directly: the area function comes from
//! pushing `J(x, f) dx` forward under `|f|`, which is the change-of-variables
//! identity `∫ card f^{-1}(y) dy = ∫ J dx` applied bin by bin.
//!
//! CSV layout shared by all tables: one `#` comment line naming the
//! quantity, units and provenance, a header row, then numeric rows printed
//! in shortest round-trip form.

mod profile;
mod trace;

pub use profile::{level_profile, log_grid, uniform_grid, LevelProfile};
pub use trace::{
    distribution, exp_integral_via_cavalieri, sphere_directions, trace_set, CavalieriResult,
    DistributionFn, TracePolicy, TraceSet, TraceStatus,
};

pub fn csv_table<R: AsRef<[f64]>>(comment: &str, header: &[&str], rows: &[R]) -> String {
    let mut out = String::new();
    out.push_str("# ");
    out.push_str(comment);
    out.push('\n');
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.as_ref().iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
