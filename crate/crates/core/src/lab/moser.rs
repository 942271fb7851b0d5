use serde::{Deserialize, Serialize};

use super::constants::beta;
use crate::error::{Error, Result};
use crate::geometry::{ball_volume, gauss_legendre, Dimension};
use crate::level_sets::LevelProfile;

/// Energies above this are treated as divergent.
pub const ENERGY_LIMIT: f64 = 1e6;

/// `ψ̃` at the profile edges up to the support end.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiTilde {
    pub n: Dimension,
    pub k: f64,
    pub beta: f64,
    pub m: f64,
    pub mu: f64,
    pub s: Vec<f64>,
    pub psi: Vec<f64>,
}

/// `ψ̃(s) = μs` on `[0, M]` and `ψ(s) + μM` beyond, with
/// `ψ(s) = α_n^{1/(n−1)} β ∫_M^s A^{−1/(n−1)} dt` and
/// `μ = (M β^{n−1} α_n / ∫_0^M A)^{1/(n−1)}`.
/// Empty bins are first merged forward (see [`LevelProfile::merged_positive`]).
pub fn psi_tilde(profile: &LevelProfile, m: f64, n: Dimension, k: f64) -> Result<PsiTilde> {
    let profile = &profile.merged_positive();
    if !(m > 0.0) {
        return Err(Error::param("M", format!("must be positive, got {m}")));
    }
    let b = beta(n, k);
    let alpha = ball_volume(n);
    let p = 1.0 / (n.as_f64() - 1.0);
    let mass = profile.mass_between(0.0, m);
    if !(mass > 0.0) {
        return Err(Error::ZeroMass { m });
    }
    let mu = (m * b.powf(n.as_f64() - 1.0) * alpha / mass).powf(p);
    let end = profile.support_end().max(m);
    let mut s: Vec<f64> = vec![0.0];
    s.extend(
        profile
            .t_grid
            .iter()
            .copied()
            .filter(|&t| t > 0.0 && t < end && t != m),
    );
    s.push(m);
    s.push(end);
    s.sort_by(f64::total_cmp);
    s.dedup();
    let coeff = alpha.powf(p) * b;
    let psi = s
        .iter()
        .map(|&t| {
            if t <= m {
                mu * t
            } else {
                mu * m
                    + coeff
                        * profile.integrate_with(m, t, |a| if a > 0.0 { a.powf(-p) } else { 0.0 })
            }
        })
        .collect();
    Ok(PsiTilde {
        n,
        k,
        beta: b,
        m,
        mu,
        s,
        psi,
    })
}

impl PsiTilde {
    /// `φ = ψ̃^{-1}` scaled by `β^{(n−1)/n}`, as a Moser input.
    pub fn moser_input(&self) -> MoserInput {
        let factor = self.beta.powf((self.n.as_f64() - 1.0) / self.n.as_f64());
        let mut y_grid = vec![0.0];
        let mut phi = vec![0.0];
        for (s, y) in self.s.iter().zip(&self.psi).skip(1) {
            if *y > *y_grid.last().unwrap() {
                y_grid.push(*y);
                phi.push(factor * s);
            }
        }
        MoserInput {
            y_grid,
            phi,
            n: self.n,
        }
    }
}

/// Piecewise-linear `φ` on `y_grid`, constant after the last node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoserInput {
    pub y_grid: Vec<f64>,
    pub phi: Vec<f64>,
    pub n: Dimension,
}

impl MoserInput {
    /// `φ(y) = min(y, T) / T^{1/n}` on `steps` equal steps of `[0, T]`:
    /// energy one for every `T`.
    pub fn test_family(n: Dimension, t: f64, steps: usize) -> Self {
        let y_grid: Vec<f64> = (0..=steps).map(|i| t * i as f64 / steps as f64).collect();
        let phi = y_grid
            .iter()
            .map(|y| y / t.powf(1.0 / n.as_f64()))
            .collect();
        MoserInput { y_grid, phi, n }
    }

    pub fn validate(&self) -> Result<()> {
        if self.y_grid.len() < 2 || self.y_grid.len() != self.phi.len() {
            return Err(Error::param(
                "moser",
                "y_grid and phi need equal length ≥ 2",
            ));
        }
        if self.y_grid[0] != 0.0 || self.phi[0] != 0.0 {
            return Err(Error::param("moser", "y_grid and phi must start at 0"));
        }
        if self.y_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("moser", "y_grid must be strictly increasing"));
        }
        if self.phi.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(Error::param("moser", "phi must be non-decreasing"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoserOutput {
    /// `∫ (φ′)^n dy`, exact for the piecewise-linear `φ`.
    pub energy: f64,
    /// `∫_0^∞ exp(φ^{n/(n−1)} − y) dy`: Gauss–Legendre on unit panels plus the
    /// closed-form tail `exp(φ_end^{n/(n−1)} − y_end)`.
    pub value: f64,
}

pub fn moser_functional(input: &MoserInput) -> Result<MoserOutput> {
    input.validate()?;
    let n = input.n.as_f64();
    let q = input.n.conjugate();
    let (nodes, weights) = gauss_legendre(8, 0.0, 1.0);
    let mut energy = 0.0;
    let mut value = 0.0;
    for i in 0..input.y_grid.len() - 1 {
        let (y0, y1) = (input.y_grid[i], input.y_grid[i + 1]);
        let (p0, p1) = (input.phi[i], input.phi[i + 1]);
        let h = y1 - y0;
        energy += ((p1 - p0) / h).powf(n) * h;
        // Unit panels in y: the integrand decays like e^{-y}.
        let panels = h.ceil().max(1.0) as usize;
        let ph = h / panels as f64;
        for k in 0..panels {
            for (x, w) in nodes.iter().zip(&weights) {
                let u = (k as f64 + x) / panels as f64;
                let phi = p0 + u * (p1 - p0);
                value += w * ph * (phi.powf(q) - (y0 + u * h)).exp();
            }
        }
    }
    if energy > ENERGY_LIMIT {
        return Err(Error::EnergyDivergent { energy });
    }
    let (y_end, p_end) = (*input.y_grid.last().unwrap(), *input.phi.last().unwrap());
    value += (p_end.powf(q) - y_end).exp();
    Ok(MoserOutput { energy, value })
}

/// `(s − M, (∫_M^s A^{−1/(n−1)})^{(n−1)/n} (∫_M^s A)^{1/n})`.
pub fn holder_sides(profile: &LevelProfile, n: Dimension, m: f64, s: f64) -> (f64, f64) {
    let d = n.as_f64();
    let inv = profile.integrate_with(m, s, |a| {
        if a > 0.0 {
            a.powf(-1.0 / (d - 1.0))
        } else {
            f64::INFINITY
        }
    });
    let mass = profile.mass_between(m, s);
    (s - m, inv.powf((d - 1.0) / d) * mass.powf(1.0 / d))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinitenessReport {
    pub m_threshold: f64,
    pub tail_mass: f64,
    /// `∫_M^∞ s^{1/(n−1)} exp(β(s^{n/(n−1)} − 2(s−M)^{n/(n−1)})) ds`.
    pub bound: f64,
}

/// Smallest grid `M` with `(∫_M^∞ A)^{−1/(n−1)} > 2β/C`, and the majorant
/// evaluated there. `c` is the constant in front of the exponent integral.
pub fn finiteness_check(
    profile: &LevelProfile,
    beta: f64,
    n: Dimension,
    c: f64,
) -> Result<FinitenessReport> {
    if !(beta > 0.0 && c > 0.0) {
        return Err(Error::param("beta", "beta and C must be positive"));
    }
    if !profile.total_mass.is_finite() {
        return Err(Error::param("profile", "total mass must be finite"));
    }
    let p = 1.0 / (n.as_f64() - 1.0);
    let target = 2.0 * beta / c;
    let (m, tail) = profile
        .t_grid
        .iter()
        .map(|&m| (m, profile.tail_mass(m)))
        .find(|&(_, tail)| tail <= 0.0 || tail.powf(-p) > target)
        .ok_or(Error::ThresholdUnreachable {
            tail_mass: profile.tail_mass(*profile.t_grid.last().unwrap()),
        })?;
    Ok(FinitenessReport {
        m_threshold: m,
        tail_mass: tail,
        bound: majorant(beta, n, m),
    })
}

fn majorant(beta: f64, n: Dimension, m: f64) -> f64 {
    let q = n.conjugate();
    let p = 1.0 / (n.as_f64() - 1.0);
    let log_f = |s: f64| p * s.max(1e-300).ln() + beta * (s.powf(q) - 2.0 * (s - m).powf(q));
    // Extend until the log-integrand has dropped 50 below its running max.
    let mut peak = log_f(m);
    let mut len = 1.0_f64;
    loop {
        let v = log_f(m + len);
        peak = peak.max(v);
        if v < peak - 50.0 && len > m {
            break;
        }
        len *= 2.0;
    }
    let panels = 4000;
    let width = len / panels as f64;
    let (nodes, weights) = gauss_legendre(8, 0.0, 1.0);
    let mut total = 0.0;
    for k in 0..panels {
        for (x, w) in nodes.iter().zip(&weights) {
            total += w * width * log_f(m + (k as f64 + x) * width).exp();
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_phi_gives_unit_value() {
        let input = MoserInput {
            y_grid: vec![0.0, 1.0, 5.0, 40.0],
            phi: vec![0.0; 4],
            n: Dimension::TWO,
        };
        let out = moser_functional(&input).unwrap();
        assert_eq!(out.energy, 0.0);
        assert!((out.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn divergent_energy_is_an_error() {
        let input = MoserInput {
            y_grid: vec![0.0, 1e-7],
            phi: vec![0.0, 1.0],
            n: Dimension::TWO,
        };
        assert!(matches!(
            moser_functional(&input),
            Err(Error::EnergyDivergent { .. })
        ));
    }

    #[test]
    fn majorant_of_compact_profile() {
        let prof = LevelProfile::from_fn(&crate::level_sets::uniform_grid(2.0, 200), |t| {
            if t < 1.0 {
                2.0 * std::f64::consts::PI * t
            } else {
                0.0
            }
        });
        let rep = finiteness_check(&prof, 1.0, Dimension::TWO, 1.0).unwrap();
        assert!(rep.m_threshold < 1.0 && rep.tail_mass < 0.5);
        assert!(rep.bound.is_finite() && rep.bound > 0.0);
    }
}
