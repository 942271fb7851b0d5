use std::f64::consts::{E, PI};

use serde_json::json;

use super::config::{Experiment, ExperimentConfig};
use super::{Check, Outcome, Table};
use crate::error::Result;
use crate::geometry::{ball_volume, Dimension};
use crate::lab::{
    beta, changmarshall_check, decay_check, eggyolk_check, empirical_r0, moser_functional,
    psi_tilde, r0_min, sharpness_sweep, sup_on_ball, MoserInput,
};
use crate::level_sets::{csv_table, level_profile, uniform_grid};
use crate::modulus::{
    cap_measure, condenser_capacity, discrete_modulus, gehring_lower_bound, random_arc_set,
    ring_modulus, symmetrization_check, CurveFamily, Plate, Resolution, SolverOptions,
};

/// Default uniform bound for the boundary exponential integral at the
/// critical exponent over the `B_a` sweep.
pub const CHANG_MARSHALL_BOUND: f64 = 18.0;

/// Default uniform bound for the Moser test family.
pub const MOSER_FAMILY_BOUND: f64 = 4.0;

pub(super) fn execute(cfg: &ExperimentConfig) -> Result<Outcome> {
    match cfg.experiment {
        Experiment::Eggyolk => eggyolk(cfg),
        Experiment::Decay => decay(cfg),
        Experiment::Changmarshall => changmarshall(cfg),
        Experiment::Sharpness => sharpness(cfg),
        Experiment::Moser => moser(cfg),
        Experiment::ModulusConvergence => modulus_convergence(cfg),
        Experiment::CapacitySymmetrization => capacity_symmetrization(cfg),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn map_list_comment(ids: &[String]) -> String {
    ids.iter()
        .enumerate()
        .map(|(i, id)| format!("{i}={id}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn eggyolk(cfg: &ExperimentConfig) -> Result<Outcome> {
    let maps = cfg.resolve_maps()?;
    let ids = cfg.map_ids();
    let m_points = cfg.grids.m_points.unwrap_or(8);
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for (i, map) in maps.iter().enumerate() {
        let n = map.dim();
        let ln_r0 = match cfg.grids.r0 {
            Some(r) => r.ln(),
            None => r0_min(n, map.declared_k(), cfg.constants.resolve(n).c_n)?.ln,
        };
        let rep = eggyolk_check(map.as_ref(), ln_r0, m_points, &cfg.quadrature)?;
        let worst = rep
            .lhs
            .iter()
            .zip(&rep.rhs)
            .map(|(l, r)| l / r - 1.0)
            .fold(f64::INFINITY, f64::min);
        checks.push(Check::new(
            format!("eggyolk {}", rep.map_id),
            rep.pass,
            format!(
                "r = {}, min lhs/rhs − 1 = {worst:.3e} (slack −2%)",
                rep.r_evaluated
            ),
        ));
        for j in 0..rep.m_grid.len() {
            rows.push([
                i as f64,
                rep.m_grid[j],
                rep.lhs[j],
                rep.lhs_stderr[j],
                rep.rhs[j],
            ]);
        }
        reports.push(serde_json::to_value(&rep)?);
    }
    let mut report = json!({ "maps": reports });
    if let Some(tol) = cfg.grids.empirical_tolerance {
        let emp = empirical_r0(&maps, tol, m_points, &cfg.quadrature)?;
        let formula = maps
            .iter()
            .map(|m| {
                r0_min(m.dim(), m.declared_k(), cfg.constants.resolve(m.dim()).c_n).map(|r| r.ln)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        checks.push(Check::new(
            "empirical r0 above closed form",
            emp.r0 > formula.exp(),
            format!("empirical {} vs ln r0 = {formula}", emp.r0),
        ));
        report["empirical_r0"] = serde_json::to_value(&emp)?;
    }
    let table = Table::new(
        "eggyolk",
        csv_table(
            &format!(
                "sub-level Jacobian mass vs alpha_n M^n; M and masses dimensionless; lhs estimate, rhs closed form; maps {}",
                map_list_comment(&ids)
            ),
            &["map", "M", "lhs", "lhs_stderr", "rhs"],
            &rows,
        ),
    );
    Ok(Outcome::new(vec![table], report, checks))
}

fn decay(cfg: &ExperimentConfig) -> Result<Outcome> {
    let maps = cfg.resolve_maps()?;
    let r = cfg.grids.r.unwrap_or(0.5);
    let mut checks = Vec::new();
    let mut tables = Vec::new();
    let mut reports = Vec::new();
    for (i, map) in maps.iter().enumerate() {
        let s_grid = match &cfg.grids.s_grid {
            Some(s) => s.clone(),
            None => {
                let (m, _) = sup_on_ball(map.as_ref(), r, cfg.quadrature.seed)?;
                (1..=60)
                    .map(|k| 0.05 * k as f64)
                    .filter(|&s| s > m)
                    .collect()
            }
        };
        let rep = decay_check(map.as_ref(), r, &s_grid, &cfg.quadrature, &cfg.traces)?;
        checks.push(Check::new(
            format!("decay {} C1 finite", rep.map_id),
            rep.fitted_c1.is_finite(),
            format!("C1 = {}", rep.fitted_c1),
        ));
        checks.push(Check::new(
            format!("decay {} rhs monotone", rep.map_id),
            rep.rhs_monotone(),
            "rhs_shape non-increasing in s".to_string(),
        ));
        let mut entry = serde_json::to_value(&rep)?;
        if cfg.grids.stability.unwrap_or(true) {
            let mut doubled = cfg.quadrature.clone();
            doubled.sample_budget *= 2;
            let again = decay_check(map.as_ref(), r, &s_grid, &doubled, &cfg.traces)?;
            let change = rel(again.fitted_c1, rep.fitted_c1);
            checks.push(Check::new(
                format!("decay {} C1 stable", rep.map_id),
                change <= 0.10,
                format!(
                    "C1 {} → {} at doubled budget (change {change:.3e}, slack 10%)",
                    rep.fitted_c1, again.fitted_c1
                ),
            ));
            entry["fitted_c1_doubled"] = json!(again.fitted_c1);
        }
        let rows: Vec<[f64; 5]> = rep
            .s_grid
            .iter()
            .enumerate()
            .map(|(j, &s)| {
                [
                    s,
                    rep.lhs[j],
                    rep.exponent_integral[j],
                    rep.rhs_shape[j],
                    rep.ratios()[j],
                ]
            })
            .collect();
        tables.push(Table::new(
            &format!("decay-{i}"),
            csv_table(
                &format!(
                    "trace distribution vs decay shape for {}; s dimensionless; lhs estimate, rhs_shape from estimated profile, ratio fitted constant",
                    rep.map_id
                ),
                &["s", "lhs", "exponent_integral", "rhs_shape", "ratio"],
                &rows,
            ),
        ));
        reports.push(entry);
    }
    Ok(Outcome::new(tables, json!({ "maps": reports }), checks))
}

fn changmarshall(cfg: &ExperimentConfig) -> Result<Outcome> {
    let maps = cfg.resolve_maps()?;
    let ids = cfg.map_ids();
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for (i, map) in maps.iter().enumerate() {
        let rep = changmarshall_check(map.as_ref(), &cfg.quadrature, &cfg.traces)?;
        checks.push(Check::new(
            format!("changmarshall {} finite", rep.map_id),
            rep.integral.is_finite(),
            format!("integral = {}", rep.integral),
        ));
        checks.push(Check::new(
            format!("changmarshall {} routes agree", rep.map_id),
            rel(rep.integral, rep.direct) <= 0.01,
            format!(
                "layer-cake {} vs direct {} (slack 1%)",
                rep.integral, rep.direct
            ),
        ));
        if let Some(bound) = cfg.grids.bound {
            checks.push(Check::new(
                format!("changmarshall {} below bound", rep.map_id),
                rep.integral <= bound,
                format!("{} ≤ {bound}", rep.integral),
            ));
        }
        rows.push([
            i as f64,
            if rep.normalized { 1.0 } else { 0.0 },
            rep.scale,
            rep.beta,
            rep.jacobian_integral,
            rep.integral,
            rep.direct,
        ]);
        reports.push(serde_json::to_value(&rep)?);
    }
    let table = Table::new(
        "changmarshall",
        csv_table(
            &format!(
                "boundary exponential integral; dimensionless; integral and direct are estimates; maps {}",
                map_list_comment(&ids)
            ),
            &["map", "normalized", "scale", "beta", "jacobian_integral", "integral", "direct"],
            &rows,
        ),
    );
    Ok(Outcome::new(
        vec![table],
        json!({ "maps": reports }),
        checks,
    ))
}

fn sharpness(cfg: &ExperimentConfig) -> Result<Outcome> {
    let g = &cfg.grids;
    let k = g.k.unwrap_or(1.0);
    let betas = g.betas.clone().unwrap_or_else(|| vec![1.0, 1.2]);
    let a_grid = g
        .a_grid
        .clone()
        .unwrap_or_else(|| (1..=6).map(|j| 1.0 - 10f64.powi(-j)).collect());
    let c = g.c.unwrap_or(1.0);
    let bound = g.bound.unwrap_or(CHANG_MARSHALL_BOUND);
    let blowup = g.blowup.unwrap_or(1e3);
    let a_limit = g.a_limit.unwrap_or(1.0 - 1e-6);
    let critical = beta(Dimension::TWO, k);
    let mut checks = Vec::new();
    let mut columns = Vec::new();
    for &b in &betas {
        let values = sharpness_sweep(k, b, &a_grid, c)?;
        if b <= critical * (1.0 + 1e-12) {
            let max = values.iter().copied().fold(0.0, f64::max);
            checks.push(Check::new(
                format!("sharpness K={k} beta={b} bounded"),
                max <= bound,
                format!("max over sweep {max} vs bound {bound}"),
            ));
        } else {
            let hit = a_grid
                .iter()
                .zip(&values)
                .find(|(a, v)| **a <= a_limit && **v > blowup);
            let reached = a_grid
                .iter()
                .zip(&values)
                .filter(|(a, _)| **a <= a_limit)
                .map(|(_, v)| *v)
                .fold(0.0, f64::max);
            checks.push(Check::new(
                format!("sharpness K={k} beta={b} blow-up"),
                hit.is_some(),
                match hit {
                    Some((a, v)) => format!("exceeds {blowup} at a = {a} ({v})"),
                    None => format!("largest value for a ≤ {a_limit} is {reached}, below {blowup}"),
                },
            ));
        }
        columns.push(values);
    }
    let rows: Vec<Vec<f64>> = a_grid
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            std::iter::once(a)
                .chain(columns.iter().map(|c| c[i]))
                .collect()
        })
        .collect();
    let names: Vec<String> = std::iter::once("a".to_string())
        .chain(betas.iter().map(|b| format!("beta={b}")))
        .collect();
    let header: Vec<&str> = names.iter().map(String::as_str).collect();
    let table = Table::new(
        "sharpness",
        csv_table(
            &format!("boundary exponential integral of B_(K,a) with K={k}, c={c}; dimensionless; closed-form traces, quadrature estimate"),
            &header,
            &rows,
        ),
    );
    let report = json!({ "k": k, "c": c, "critical_beta": critical, "a_grid": a_grid, "betas": betas, "integrals": columns });
    Ok(Outcome::new(vec![table], report, checks))
}

fn moser(cfg: &ExperimentConfig) -> Result<Outcome> {
    let g = &cfg.grids;
    let n_family = Dimension::new(cfg.dimension.unwrap_or(2))?;
    let t_values = g.t_values.clone().unwrap_or_else(|| vec![1.0, 4.0, 16.0]);
    let steps = g.steps.unwrap_or(4000);
    let bound = g.bound.unwrap_or(MOSER_FAMILY_BOUND);
    let mut checks = Vec::new();
    let mut family_rows = Vec::new();
    for &t in &t_values {
        let out = moser_functional(&MoserInput::test_family(n_family, t, steps))?;
        checks.push(Check::new(
            format!("moser family T={t} bounded"),
            out.value <= bound,
            format!(
                "energy {}, value {} vs bound {bound}",
                out.energy, out.value
            ),
        ));
        family_rows.push([t, out.energy, out.value]);
    }
    let maps = cfg.resolve_maps()?;
    let ids = cfg.map_ids();
    let r = g.r.unwrap_or(0.5);
    let t_max = g.t_max.unwrap_or(4.0);
    let bins = g.bins.unwrap_or(800);
    let mut chain_rows = Vec::new();
    let mut chain = Vec::new();
    for (i, map) in maps.iter().enumerate() {
        let n = map.dim();
        let mut profile = level_profile(map.as_ref(), &uniform_grid(t_max, bins), &cfg.quadrature)?;
        let alpha = ball_volume(n);
        let scale = if profile.total_mass > alpha * 1.02 {
            (alpha / profile.total_mass).powf(1.0 / n.as_f64())
        } else {
            1.0
        };
        profile = profile.scaled(scale, n);
        let (sup, _) = sup_on_ball(map.as_ref(), r, cfg.quadrature.seed)?;
        let m = sup * scale;
        let psi = psi_tilde(&profile, m, n, map.declared_k())?;
        let out = moser_functional(&psi.moser_input())?;
        checks.push(Check::new(
            format!("moser chain {} energy", map.id()),
            out.energy <= 1.02,
            format!(
                "energy {} (slack 2%), overflow mass {}",
                out.energy, profile.overflow_mass
            ),
        ));
        chain_rows.push([i as f64, scale, m, psi.mu, out.energy, out.value]);
        chain.push(json!({ "map_id": map.id(), "scale": scale, "m": m, "mu": psi.mu, "energy": out.energy, "value": out.value }));
    }
    let tables = vec![
        Table::new(
            "moser-family",
            csv_table(
                "Moser functional on the energy-one family min(y,T)/T^(1/n); dimensionless; estimate",
                &["T", "energy", "value"],
                &family_rows,
            ),
        ),
        Table::new(
            "moser-chain",
            csv_table(
                &format!(
                    "Moser functional of the rescaled inverse of psi-tilde; dimensionless; estimate from level profile; maps {}",
                    map_list_comment(&ids)
                ),
                &["map", "scale", "M", "mu", "energy", "value"],
                &chain_rows,
            ),
        ),
    ];
    let report = json!({ "family": family_rows, "chain": chain });
    Ok(Outcome::new(tables, report, checks))
}

fn modulus_convergence(cfg: &ExperimentConfig) -> Result<Outcome> {
    let g = &cfg.grids;
    let n = Dimension::new(cfg.dimension.unwrap_or(2))?;
    let cells = g.cells.clone().unwrap_or_else(|| vec![100, 200]);
    let inner = g.inner.unwrap_or(1.0);
    let outer = g.outer.unwrap_or(E);
    let (length, width) = (g.length.unwrap_or(1.5), g.width.unwrap_or(1.0));
    let per_cell = g.per_cell.unwrap_or(4.0);
    let opts = SolverOptions::default();
    let ring_exact = ring_modulus(n, inner, outer)?;
    let rect_exact = width / length;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut prev: Option<(f64, Option<f64>)> = None;
    for &c in &cells {
        let ring = discrete_modulus(
            &CurveFamily::ring(n, inner, outer, c, per_cell)?,
            n.as_f64(),
            &opts,
        )?;
        checks.push(Check::new(
            format!("ring modulus at {c} cells"),
            rel(ring.value, ring_exact) <= 0.02,
            format!("{} vs {ring_exact} (slack 2%)", ring.value),
        ));
        let rect = if n.get() == 2 {
            let res = discrete_modulus(&CurveFamily::rectangle(length, width, c, 4)?, 2.0, &opts)?;
            checks.push(Check::new(
                format!("rectangle modulus at {c} cells"),
                rel(res.value, rect_exact) <= 0.02,
                format!("{} vs {rect_exact} (slack 2%)", res.value),
            ));
            Some(res.value)
        } else {
            None
        };
        if let Some((pr, prect)) = prev {
            checks.push(Check::new(
                format!("ring refinement to {c} cells"),
                rel(ring.value, pr) < 0.01,
                format!("{pr} → {} (slack 1%)", ring.value),
            ));
            if let (Some(a), Some(b)) = (prect, rect) {
                checks.push(Check::new(
                    format!("rectangle refinement to {c} cells"),
                    rel(b, a) < 0.01,
                    format!("{a} → {b} (slack 1%)"),
                ));
            }
        }
        prev = Some((ring.value, rect));
        rows.push([
            c as f64,
            ring.value,
            ring_exact,
            rect.unwrap_or(f64::NAN),
            rect_exact,
            ring.iterations as f64,
        ]);
    }
    let table = Table::new(
        "modulus-convergence",
        csv_table(
            &format!("discrete modulus vs closed form, n={}; dimensionless; value estimate, exact closed form", n.get()),
            &["cells", "ring", "ring_exact", "rectangle", "rectangle_exact", "iterations"],
            &rows,
        ),
    );
    let report = json!({ "n": n.get(), "inner": inner, "outer": outer, "length": length, "width": width, "rows": rows });
    Ok(Outcome::new(vec![table], report, checks))
}

fn capacity_symmetrization(cfg: &ExperimentConfig) -> Result<Outcome> {
    let g = &cfg.grids;
    let n = Dimension::new(cfg.dimension.unwrap_or(2))?;
    let r = g.r.unwrap_or(0.5);
    let thetas = g
        .thetas
        .clone()
        .unwrap_or_else(|| (1..=8).map(|k| PI * k as f64 / 8.0).collect());
    let cells = g
        .cells
        .as_ref()
        .and_then(|c| c.first().copied())
        .unwrap_or(if n.get() == 2 { 100 } else { 24 });
    let res = Resolution {
        cells,
        per_cell: g.per_cell.unwrap_or(4.0),
        solver: SolverOptions::default(),
    };
    let consts = cfg.constants.resolve(n);
    let mut checks = Vec::new();
    let mut cap_rows = Vec::new();
    let mut caps = Vec::new();
    for &theta in &thetas {
        let cap = condenser_capacity(n, r, &Plate::Cap { theta }, &res)?;
        let measure = cap_measure(n, theta);
        let bound = match gehring_lower_bound(r, n, measure, consts.c2, consts.epsilon) {
            Ok(b) => {
                checks.push(Check::new(
                    format!("gehring bound at theta={theta:.4}"),
                    cap.symmetrized >= b,
                    format!("Cap/2 = {} vs bound {b}", cap.symmetrized),
                ));
                b
            }
            Err(crate::error::Error::ThresholdExceeded { .. }) => f64::NAN,
            Err(e) => return Err(e),
        };
        if (theta - PI).abs() < 1e-12 {
            let want = 2.0 * ring_modulus(n, r, 1.0)?;
            checks.push(Check::new(
                "full-sphere plate",
                rel(cap.capacity, want) <= 0.05,
                format!("{} vs {want} (slack 5%)", cap.capacity),
            ));
        }
        cap_rows.push([theta, measure, cap.capacity, cap.symmetrized, bound]);
        caps.push(cap.capacity);
    }
    let mut order: Vec<usize> = (0..thetas.len()).collect();
    order.sort_by(|&a, &b| thetas[a].total_cmp(&thetas[b]));
    checks.push(Check::new(
        "capacity monotone in theta",
        order.windows(2).all(|w| caps[w[1]] >= caps[w[0]]),
        "nested plates".to_string(),
    ));
    let mut tables = vec![Table::new(
        "capacity-caps",
        csv_table(
            &format!("condenser capacity of spherical caps, r={r}, n={}; dimensionless; capacity estimate, gehring_bound uses calibrated C2", n.get()),
            &["theta", "measure", "capacity", "symmetrized", "gehring_bound"],
            &cap_rows,
        ),
    )];
    let mut instances = Vec::new();
    if n.get() == 2 {
        let count = g.instances.unwrap_or(10);
        let measure = g.measure.unwrap_or(1.5);
        let pieces = g.pieces.unwrap_or(3);
        let mut rows = Vec::new();
        for i in 0..count {
            let arcs = random_arc_set(measure, pieces, cfg.seed.wrapping_add(i as u64))?;
            let inst = symmetrization_check(r, arcs, &res)?;
            checks.push(Check::new(
                format!("symmetrization instance {i}"),
                inst.pass,
                format!(
                    "cap {} vs set {} (slack 5%)",
                    inst.cap_capacity, inst.set_capacity
                ),
            ));
            rows.push([i as f64, inst.measure, inst.set_capacity, inst.cap_capacity]);
            instances.push(serde_json::to_value(&inst)?);
        }
        tables.push(Table::new(
            "capacity-random",
            csv_table(
                &format!("condenser capacity of random arc sets vs the cap of equal measure, r={r}; dimensionless; estimates"),
                &["instance", "measure", "set_capacity", "cap_capacity"],
                &rows,
            ),
        ));
    }
    let report = json!({ "n": n.get(), "r": r, "constants": consts, "caps": cap_rows, "instances": instances });
    Ok(Outcome::new(tables, report, checks))
}
