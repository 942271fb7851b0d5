//! Euclidean constants and numerical integration over balls and spheres.
//!
//! Everything downstream is normalized against the volume of the unit ball
//! `α_n` and the area of the unit sphere `ω_{n-1} = n α_n`, so both are
//! computed from a Lanczos Γ with relative error well below `1e-12`.

mod gamma;
mod points;
mod quadrature;

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use gamma::{gamma, ln_gamma};
pub use points::{gauss_legendre, halton, inverse_normal_cdf, SamplePlan};
pub use quadrature::{
    integrate_ball, integrate_sphere, Ball, Estimate, Method, QuadratureSpec, Sphere,
};

pub type Vector = nalgebra::DVector<f64>;
pub type Matrix = nalgebra::DMatrix<f64>;

/// Ambient dimension `n ≥ 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dimension(usize);

impl Dimension {
    pub const TWO: Dimension = Dimension(2);
    pub const THREE: Dimension = Dimension(3);

    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::param(
                "n",
                format!("dimension must be at least 2, got {n}"),
            ));
        }
        Ok(Dimension(n))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// Conjugate exponent `n/(n-1)` that appears in every exponential integral.
    #[inline]
    pub fn conjugate(self) -> f64 {
        self.as_f64() / (self.as_f64() - 1.0)
    }
}

impl TryFrom<usize> for Dimension {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        Dimension::new(n)
    }
}

impl From<Dimension> for usize {
    fn from(d: Dimension) -> usize {
        d.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Volume `α_n = π^{n/2} / Γ(n/2 + 1)` of the unit ball.
pub fn ball_volume(n: Dimension) -> f64 {
    let half = n.as_f64() / 2.0;
    PI.powf(half) / gamma(half + 1.0)
}

/// Surface measure `ω_{n-1} = n α_n` of the unit sphere.
pub fn sphere_area(n: Dimension) -> f64 {
    n.as_f64() * ball_volume(n)
}

pub(crate) fn check_vector(n: Dimension, x: &Vector) -> Result<()> {
    if x.len() != n.get() {
        return Err(Error::DimensionMismatch {
            expected: n.get(),
            got: x.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn rejects_dimension_one() {
        assert!(Dimension::new(1).is_err());
        assert!(Dimension::new(0).is_err());
    }

    #[test]
    fn disk_and_ball() {
        assert_relative_eq!(ball_volume(dim(2)), PI, max_relative = 1e-14);
        assert_relative_eq!(ball_volume(dim(3)), 4.0 * PI / 3.0, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(dim(2)), 2.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(dim(3)), 4.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(dim(4)), 2.0 * PI * PI, max_relative = 1e-13);
    }

    #[test]
    fn area_over_volume_is_n() {
        for n in 2..=10 {
            let d = dim(n);
            assert_relative_eq!(
                sphere_area(d) / ball_volume(d),
                n as f64,
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn even_dimensions_have_closed_forms() {
        // α_{2k} = π^k / k!
        let mut fact = 1.0;
        for k in 1..=6 {
            fact *= k as f64;
            assert_relative_eq!(
                ball_volume(dim(2 * k)),
                PI.powi(k as i32) / fact,
                max_relative = 1e-13
            );
        }
    }
}
