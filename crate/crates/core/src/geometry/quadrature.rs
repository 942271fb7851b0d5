use serde::{Deserialize, Serialize};

use super::points::SamplePlan;
use super::{Dimension, Vector};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ProductRule,
    MonteCarlo,
    QuasiMonteCarlo,
}

/// How a ball or sphere integral is discretized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    pub method: Method,
    pub sample_budget: usize,
    pub seed: u64,
    /// Grading exponent `q ∈ (0, 1]` toward a declared boundary singularity;
    /// `1` means no grading.
    pub boundary_refinement: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            method: Method::QuasiMonteCarlo,
            sample_budget: 1 << 16,
            seed: 0,
            boundary_refinement: 0.5,
        }
    }
}

impl QuadratureSpec {
    pub fn product(sample_budget: usize) -> Self {
        QuadratureSpec {
            method: Method::ProductRule,
            sample_budget,
            ..Default::default()
        }
    }

    pub fn qmc(sample_budget: usize, seed: u64) -> Self {
        QuadratureSpec {
            method: Method::QuasiMonteCarlo,
            sample_budget,
            seed,
            ..Default::default()
        }
    }

    pub fn monte_carlo(sample_budget: usize, seed: u64) -> Self {
        QuadratureSpec {
            method: Method::MonteCarlo,
            sample_budget,
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_budget < 1 {
            return Err(Error::param("sample_budget", "must be at least 1"));
        }
        if !(self.boundary_refinement > 0.0 && self.boundary_refinement <= 1.0) {
            return Err(Error::param(
                "boundary_refinement",
                format!("must lie in (0, 1], got {}", self.boundary_refinement),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Vector,
    pub radius: f64,
}

impl Ball {
    pub fn unit(n: Dimension) -> Self {
        Ball {
            center: Vector::zeros(n.get()),
            radius: 1.0,
        }
    }

    pub fn centered(n: Dimension, radius: f64) -> Self {
        Ball {
            center: Vector::zeros(n.get()),
            radius,
        }
    }

    pub fn dim(&self) -> Result<Dimension> {
        Dimension::new(self.center.len())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sphere {
    pub center: Vector,
    pub radius: f64,
}

impl Sphere {
    pub fn unit(n: Dimension) -> Self {
        Sphere {
            center: Vector::zeros(n.get()),
            radius: 1.0,
        }
    }

    pub fn centered(n: Dimension, radius: f64) -> Self {
        Sphere {
            center: Vector::zeros(n.get()),
            radius,
        }
    }

    pub fn dim(&self) -> Result<Dimension> {
        Dimension::new(self.center.len())
    }
}

/// `∫_B g` with an error estimate. Non-finite values are tolerated only
/// within `1e-6·radius` of a point in `singular`, where they count as zero.
pub fn integrate_ball<G>(
    region: &Ball,
    spec: &QuadratureSpec,
    singular: &[Vector],
    g: G,
) -> Result<Estimate>
where
    G: Fn(&Vector) -> f64 + Sync,
{
    let plan = SamplePlan::ball(region.dim()?, &region.center, region.radius, spec, singular)?;
    integrate_plan(&plan, g)
}

/// `∫_S g dH_{n-1}` with an error estimate.
pub fn integrate_sphere<G>(
    region: &Sphere,
    spec: &QuadratureSpec,
    singular: &[Vector],
    g: G,
) -> Result<Estimate>
where
    G: Fn(&Vector) -> f64 + Sync,
{
    let plan = SamplePlan::sphere(region.dim()?, &region.center, region.radius, spec, singular)?;
    integrate_plan(&plan, g)
}

pub(crate) fn integrate_plan<G>(plan: &SamplePlan, g: G) -> Result<Estimate>
where
    G: Fn(&Vector) -> f64 + Sync,
{
    let sums = plan.accumulate(1, |x, w, acc| {
        let v = g(x);
        if v.is_finite() {
            acc[0] += w * v;
            Ok(())
        } else if plan.near_singular(x) {
            Ok(())
        } else {
            Err(Error::NonFiniteSample {
                point: x.iter().copied().collect(),
            })
        }
    })?;
    let per: Vec<f64> = sums.iter().map(|s| s[0]).collect();
    Ok(plan.combine(&per))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ball_volume, sphere_area};
    use std::f64::consts::PI;

    fn d(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn constant_on_disk() {
        for spec in [
            QuadratureSpec::product(4096),
            QuadratureSpec::qmc(4096, 1),
            QuadratureSpec::monte_carlo(4096, 1),
        ] {
            let e = integrate_ball(&Ball::unit(d(2)), &spec, &[], |_| 1.0).unwrap();
            assert!((e.value - PI).abs() < 1e-9, "{spec:?}: {e:?}");
        }
    }

    #[test]
    fn square_norm_on_disk() {
        let e = integrate_ball(
            &Ball::unit(d(2)),
            &QuadratureSpec::product(4096),
            &[],
            |x| x.norm_squared(),
        )
        .unwrap();
        assert!((e.value - PI / 2.0).abs() < 1e-10);
        let e = integrate_ball(
            &Ball::unit(d(2)),
            &QuadratureSpec::qmc(1 << 14, 3),
            &[],
            |x| x.norm_squared(),
        )
        .unwrap();
        assert!((e.value - PI / 2.0).abs() < 5.0 * e.stderr.max(1e-4));
    }

    #[test]
    fn sphere_values() {
        let spec = QuadratureSpec::product(2000);
        let s1 = integrate_sphere(&Sphere::unit(d(2)), &spec, &[], |_| 1.0).unwrap();
        assert!((s1.value - 2.0 * PI).abs() < 1e-12);
        let s2 = integrate_sphere(&Sphere::centered(d(3), 2.0), &spec, &[], |_| 1.0).unwrap();
        assert!((s2.value - 16.0 * PI).abs() < 1e-10);
        let z = integrate_sphere(&Sphere::unit(d(3)), &spec, &[], |x| x[0] * x[0]).unwrap();
        assert!((z.value - 4.0 * PI / 3.0).abs() < 1e-10);
    }

    #[test]
    fn higher_dimensional_layers() {
        for n in 2..=5 {
            let e = integrate_ball(
                &Ball::unit(d(n)),
                &QuadratureSpec::product(20_000),
                &[],
                |_| 1.0,
            )
            .unwrap();
            assert!(
                ((e.value - ball_volume(d(n))) / ball_volume(d(n))).abs() < 1e-6,
                "n={n}"
            );
            let s = integrate_sphere(
                &Sphere::unit(d(n)),
                &QuadratureSpec::qmc(4096, 9),
                &[],
                |_| 1.0,
            )
            .unwrap();
            assert!(((s.value - sphere_area(d(n))) / sphere_area(d(n))).abs() < 1e-9);
        }
    }

    #[test]
    fn non_finite_sample_is_reported() {
        let err = integrate_ball(&Ball::unit(d(2)), &QuadratureSpec::qmc(256, 0), &[], |_| {
            f64::NAN
        })
        .unwrap_err();
        assert!(matches!(err, Error::NonFiniteSample { .. }));
    }

    #[test]
    fn rejects_bad_spec() {
        let spec = QuadratureSpec {
            boundary_refinement: 0.0,
            ..QuadratureSpec::default()
        };
        assert!(integrate_ball(&Ball::unit(d(2)), &spec, &[], |_| 1.0).is_err());
        let spec = QuadratureSpec {
            sample_budget: 0,
            ..QuadratureSpec::default()
        };
        assert!(integrate_ball(&Ball::unit(d(2)), &spec, &[], |_| 1.0).is_err());
    }
}
