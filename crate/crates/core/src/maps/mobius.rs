use super::{check_dim, QrMap};
use crate::error::{Error, Result};
use crate::geometry::{Dimension, Matrix, Vector};

/// Möbius self-map of the ball followed by a similarity:
/// `f(x) = λ R (ι(x) − ι(0))`, where `ι` is inversion in the sphere centered
/// at the pole `p` (`|p| > 1`) orthogonal to the unit sphere and `R` is the
/// reflection in the first coordinate, restoring orientation. Without a pole
/// the map is `x ↦ λx`.
#[derive(Clone, Debug)]
pub struct MobiusBall {
    n: Dimension,
    pole: Option<Vector>,
    lambda: f64,
    shift: Vector,
}

impl MobiusBall {
    pub fn new(n: Dimension, pole: Option<Vector>, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::param(
                "lambda",
                format!("must be positive, got {lambda}"),
            ));
        }
        let mut shift = Vector::zeros(n.get());
        if let Some(p) = &pole {
            crate::geometry::check_vector(n, p)?;
            if !(p.norm() > 1.0) {
                return Err(Error::param(
                    "p",
                    format!("pole must lie outside the closed ball, |p| = {}", p.norm()),
                ));
            }
            // ι(0) = p / |p|²
            shift = p / p.norm_squared();
        }
        Ok(MobiusBall {
            n,
            pole,
            lambda,
            shift,
        })
    }

    /// Pole on the positive first axis at distance `p`.
    pub fn on_axis(n: Dimension, p: f64, lambda: f64) -> Result<Self> {
        let mut pole = Vector::zeros(n.get());
        pole[0] = p;
        Self::new(n, Some(pole), lambda)
    }

    pub fn identity(n: Dimension) -> Self {
        MobiusBall {
            n,
            pole: None,
            lambda: 1.0,
            shift: Vector::zeros(n.get()),
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Center and radius of `f(B^n)`.
    pub fn image_ball(&self) -> (Vector, f64) {
        (self.reflect(&(-&self.shift)) * self.lambda, self.lambda)
    }

    fn reflect(&self, y: &Vector) -> Vector {
        let mut out = y.clone();
        if self.pole.is_some() {
            out[0] = -out[0];
        }
        out
    }
}

impl QrMap for MobiusBall {
    fn dim(&self) -> Dimension {
        self.n
    }
    fn id(&self) -> String {
        match &self.pole {
            None => format!("mobius:n={},lambda={}", self.n, self.lambda),
            Some(p) if p.iter().skip(1).all(|&c| c == 0.0) => {
                format!("mobius:n={},p={},lambda={}", self.n, p[0], self.lambda)
            }
            Some(p) => format!(
                "mobius:n={},pole={:?},lambda={}",
                self.n,
                p.as_slice(),
                self.lambda
            ),
        }
    }
    fn eval(&self, x: &Vector) -> Result<Vector> {
        check_dim(self, x)?;
        let Some(p) = &self.pole else {
            return Ok(x * self.lambda);
        };
        let y = x - p;
        let d2 = y.norm_squared();
        if d2 == 0.0 {
            return Err(Error::EvalAtPole {
                point: x.iter().copied().collect(),
            });
        }
        let s = p.norm_squared() - 1.0;
        let inv = p + y * (s / d2);
        Ok(self.reflect(&(inv - &self.shift)) * self.lambda)
    }
    fn derivative(&self, x: &Vector) -> Result<Matrix> {
        check_dim(self, x)?;
        let n = self.n.get();
        let Some(p) = &self.pole else {
            return Ok(Matrix::identity(n, n) * self.lambda);
        };
        let y = x - p;
        let d2 = y.norm_squared();
        if d2 == 0.0 {
            return Err(Error::EvalAtPole {
                point: x.iter().copied().collect(),
            });
        }
        let s = p.norm_squared() - 1.0;
        // (s/|y|²)(I − 2ŷŷᵀ)
        let mut m =
            (Matrix::identity(n, n) - (&y * y.transpose()) * (2.0 / d2)) * (s / d2 * self.lambda);
        m.row_mut(0).neg_mut();
        Ok(m)
    }
    fn jacobian(&self, x: &Vector) -> Result<f64> {
        check_dim(self, x)?;
        let n = self.n.get() as i32;
        let Some(p) = &self.pole else {
            return Ok(self.lambda.powi(n));
        };
        let d2 = (x - p).norm_squared();
        if d2 == 0.0 {
            return Err(Error::EvalAtPole {
                point: x.iter().copied().collect(),
            });
        }
        let s = p.norm_squared() - 1.0;
        Ok((self.lambda * s / d2).powi(n))
    }
    fn declared_k(&self) -> f64 {
        1.0
    }
    fn origin_fixed(&self) -> bool {
        true
    }
    fn in_domain(&self, x: &Vector) -> bool {
        match &self.pole {
            None => true,
            Some(p) => (x - p).norm_squared() > 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maps_sphere_to_image_sphere() {
        let m = MobiusBall::on_axis(Dimension::THREE, 1.5, 0.8).unwrap();
        let (c, r) = m.image_ball();
        for k in 0..30 {
            let t = k as f64 * 0.37;
            let x = Vector::from_vec(vec![t.cos() * 0.6, t.sin() * 0.6, 0.8]);
            let y = m.eval(&x).unwrap();
            assert!(((y - &c).norm() - r).abs() < 1e-12);
        }
        assert!(m.eval(&Vector::zeros(3)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn jacobian_is_positive_and_consistent() {
        let m = MobiusBall::on_axis(Dimension::THREE, 1.2, 1.0).unwrap();
        let x = Vector::from_vec(vec![0.1, -0.3, 0.2]);
        let j = m.jacobian(&x).unwrap();
        assert!(j > 0.0);
        assert!((m.derivative(&x).unwrap().determinant() - j).abs() < 1e-12 * j);
    }

    #[test]
    fn rejects_interior_pole() {
        assert!(MobiusBall::on_axis(Dimension::THREE, 0.5, 1.0).is_err());
        assert!(MobiusBall::on_axis(Dimension::THREE, 2.0, 0.0).is_err());
    }
}
