use num_complex::Complex64;

use super::{check_dim, QrMap};
use crate::error::{Error, Result};
use crate::geometry::{Dimension, Matrix, Vector};

fn to_c(x: &Vector) -> Complex64 {
    Complex64::new(x[0], x[1])
}

fn from_c(z: Complex64) -> Vector {
    Vector::from_vec(vec![z.re, z.im])
}

/// Real 2×2 matrix of multiplication by a complex number.
fn cr_matrix(d: Complex64) -> Matrix {
    Matrix::from_row_slice(2, 2, &[d.re, -d.im, d.im, d.re])
}

#[derive(Clone, Debug)]
pub struct Identity {
    n: Dimension,
}

impl Identity {
    pub fn new(n: Dimension) -> Self {
        Identity { n }
    }
}

impl QrMap for Identity {
    fn dim(&self) -> Dimension {
        self.n
    }
    fn id(&self) -> String {
        format!("identity:n={}", self.n)
    }
    fn eval(&self, x: &Vector) -> Result<Vector> {
        check_dim(self, x)?;
        Ok(x.clone())
    }
    fn derivative(&self, x: &Vector) -> Result<Matrix> {
        check_dim(self, x)?;
        Ok(Matrix::identity(self.n.get(), self.n.get()))
    }
    fn jacobian(&self, x: &Vector) -> Result<f64> {
        check_dim(self, x)?;
        Ok(1.0)
    }
    fn declared_k(&self) -> f64 {
        1.0
    }
    fn origin_fixed(&self) -> bool {
        true
    }
    fn in_domain(&self, _x: &Vector) -> bool {
        true
    }
}

/// `B_a(z) = log(1/(1 − az)) · (log 1/(1 − a²))^{−1/2}`, defined for `|z| < 1/a`.
#[derive(Clone, Debug)]
pub struct Beurling {
    a: f64,
    scale: f64,
}

impl Beurling {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::param("a", format!("must lie in (0, 1), got {a}")));
        }
        Ok(Beurling {
            a,
            scale: (-(-a * a).ln_1p()).powf(-0.5),
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Normalizing factor `(log 1/(1 − a²))^{−1/2}`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn eval_c(&self, z: Complex64) -> Complex64 {
        -(Complex64::new(1.0, 0.0) - self.a * z).ln() * self.scale
    }

    pub fn derivative_c(&self, z: Complex64) -> Complex64 {
        self.a * self.scale / (Complex64::new(1.0, 0.0) - self.a * z)
    }

    /// Closed-form boundary modulus `|B_a(e^{iθ})|`.
    pub fn boundary_modulus(&self, theta: f64) -> f64 {
        self.eval_c(Complex64::from_polar(1.0, theta)).norm()
    }
}

impl QrMap for Beurling {
    fn dim(&self) -> Dimension {
        Dimension::TWO
    }
    fn id(&self) -> String {
        format!("beurling:a={}", self.a)
    }
    fn eval(&self, x: &Vector) -> Result<Vector> {
        check_dim(self, x)?;
        if !self.in_domain(x) {
            return Err(Error::EvalAtPole {
                point: x.iter().copied().collect(),
            });
        }
        Ok(from_c(self.eval_c(to_c(x))))
    }
    fn derivative(&self, x: &Vector) -> Result<Matrix> {
        check_dim(self, x)?;
        if !self.in_domain(x) {
            return Err(Error::EvalAtPole {
                point: x.iter().copied().collect(),
            });
        }
        Ok(cr_matrix(self.derivative_c(to_c(x))))
    }
    fn jacobian(&self, x: &Vector) -> Result<f64> {
        check_dim(self, x)?;
        Ok(self.derivative_c(to_c(x)).norm_sqr())
    }
    fn declared_k(&self) -> f64 {
        1.0
    }
    fn singular_points(&self) -> Vec<Vector> {
        vec![Vector::from_vec(vec![1.0, 0.0])]
    }
    fn origin_fixed(&self) -> bool {
        true
    }
    fn in_domain(&self, x: &Vector) -> bool {
        x.norm() * self.a < 1.0
    }
}

/// Planar radial stretch `z ↦ z|z|^{K−1}`.
#[derive(Clone, Debug)]
pub struct RadialStretch {
    k: f64,
}

impl RadialStretch {
    pub fn new(k: f64) -> Result<Self> {
        if !(k >= 1.0 && k.is_finite()) {
            return Err(Error::param("K", format!("must be at least 1, got {k}")));
        }
        Ok(RadialStretch { k })
    }

    pub fn k(&self) -> f64 {
        self.k
    }
}

impl QrMap for RadialStretch {
    fn dim(&self) -> Dimension {
        Dimension::TWO
    }
    fn id(&self) -> String {
        format!("stretch:K={}", self.k)
    }
    fn eval(&self, x: &Vector) -> Result<Vector> {
        check_dim(self, x)?;
        let r = x.norm();
        if r == 0.0 {
            return Ok(x.clone());
        }
        Ok(x * r.powf(self.k - 1.0))
    }
    fn derivative(&self, x: &Vector) -> Result<Matrix> {
        check_dim(self, x)?;
        let r = x.norm();
        if r == 0.0 {
            let c = if self.k == 1.0 { 1.0 } else { 0.0 };
            return Ok(Matrix::identity(2, 2) * c);
        }
        // r^{K−1} (I + (K − 1) x̂ x̂ᵀ)
        let u = x / r;
        Ok((Matrix::identity(2, 2) + (&u * u.transpose()) * (self.k - 1.0)) * r.powf(self.k - 1.0))
    }
    fn jacobian(&self, x: &Vector) -> Result<f64> {
        check_dim(self, x)?;
        let r = x.norm();
        if r == 0.0 {
            return Ok(if self.k == 1.0 { 1.0 } else { 0.0 });
        }
        Ok(self.k * r.powf(2.0 * self.k - 2.0))
    }
    fn declared_k(&self) -> f64 {
        self.k
    }
    fn origin_fixed(&self) -> bool {
        true
    }
    fn in_domain(&self, _x: &Vector) -> bool {
        true
    }
}

/// Disk to upper half plane, `z ↦ c·i(1 − z)/(1 + z)`. Sends `1 ↦ 0` and
/// `0 ↦ ci`; the pole is at `z = −1`. The scale `c > 0` is the residual
/// freedom left once `1 ↦ 0` is fixed (together with rotations of `z`
/// that move the pole, which we keep at `−1`).
#[derive(Clone, Debug)]
pub struct HalfPlane {
    c: f64,
}

impl HalfPlane {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::param(
                "c",
                format!("scale must be positive, got {c}"),
            ));
        }
        Ok(HalfPlane { c })
    }

    pub fn scale(&self) -> f64 {
        self.c
    }

    pub fn inverse(&self) -> HalfPlaneInverse {
        HalfPlaneInverse { c: self.c }
    }

    fn pole_check(&self, x: &Vector) -> Result<Complex64> {
        check_dim(self, x)?;
        let z = to_c(x);
        if (z + 1.0).norm() == 0.0 {
            return Err(Error::EvalAtPole {
                point: x.iter().copied().collect(),
            });
        }
        Ok(z)
    }
}

impl QrMap for HalfPlane {
    fn dim(&self) -> Dimension {
        Dimension::TWO
    }
    fn id(&self) -> String {
        format!("halfplane:c={}", self.c)
    }
    fn eval(&self, x: &Vector) -> Result<Vector> {
        let z = self.pole_check(x)?;
        let i = Complex64::i();
        Ok(from_c(i * self.c * (1.0 - z) / (1.0 + z)))
    }
    fn derivative(&self, x: &Vector) -> Result<Matrix> {
        let z = self.pole_check(x)?;
        let i = Complex64::i();
        Ok(cr_matrix(-2.0 * i * self.c / ((1.0 + z) * (1.0 + z))))
    }
    fn declared_k(&self) -> f64 {
        1.0
    }
    fn singular_points(&self) -> Vec<Vector> {
        vec![Vector::from_vec(vec![-1.0, 0.0])]
    }
    fn origin_fixed(&self) -> bool {
        false
    }
    fn in_domain(&self, x: &Vector) -> bool {
        x.len() == 2 && (to_c(x) + 1.0).norm() > 0.0
    }
}

/// Upper half plane to disk, `w ↦ (ci − w)/(ci + w)`.
#[derive(Clone, Debug)]
pub struct HalfPlaneInverse {
    c: f64,
}

impl HalfPlaneInverse {
    pub fn new(c: f64) -> Result<Self> {
        Ok(HalfPlane::new(c)?.inverse())
    }

    fn pole_check(&self, x: &Vector) -> Result<Complex64> {
        check_dim(self, x)?;
        let w = to_c(x);
        if (w + Complex64::i() * self.c).norm() == 0.0 {
            return Err(Error::EvalAtPole {
                point: x.iter().copied().collect(),
            });
        }
        Ok(w)
    }
}

impl QrMap for HalfPlaneInverse {
    fn dim(&self) -> Dimension {
        Dimension::TWO
    }
    fn id(&self) -> String {
        format!("halfplane-inv:c={}", self.c)
    }
    fn eval(&self, x: &Vector) -> Result<Vector> {
        let w = self.pole_check(x)?;
        let ci = Complex64::i() * self.c;
        Ok(from_c((ci - w) / (ci + w)))
    }
    fn derivative(&self, x: &Vector) -> Result<Matrix> {
        let w = self.pole_check(x)?;
        let ci = Complex64::i() * self.c;
        Ok(cr_matrix(-2.0 * ci / ((ci + w) * (ci + w))))
    }
    fn declared_k(&self) -> f64 {
        1.0
    }
    fn origin_fixed(&self) -> bool {
        false
    }
    /// Closed upper half plane (its image is the closed disk).
    fn in_domain(&self, x: &Vector) -> bool {
        x.len() == 2 && x[1] >= -1e-12 * (1.0 + x.norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn v(x: f64, y: f64) -> Vector {
        Vector::from_vec(vec![x, y])
    }

    #[test]
    fn beurling_fixes_origin_and_rejects_bad_a() {
        for a in [0.1, 0.5, 0.99] {
            let b = Beurling::new(a).unwrap();
            assert_eq!(b.eval(&v(0.0, 0.0)).unwrap().norm(), 0.0);
        }
        assert!(Beurling::new(0.0).is_err());
        assert!(Beurling::new(1.0).is_err());
    }

    #[test]
    fn beurling_real_axis_is_monotone() {
        let b = Beurling::new(0.9).unwrap();
        let mut prev = 0.0;
        for k in 1..50 {
            let t = 1.0 - 0.5_f64.powi(k);
            let w = b.eval(&v(t, 0.0)).unwrap();
            assert!(w[1].abs() < 1e-15);
            assert!(w[0] > prev);
            prev = w[0];
        }
    }

    #[test]
    fn stretch_modulus_and_jacobian() {
        let s = RadialStretch::new(2.5).unwrap();
        let x = v(0.3, -0.4);
        assert!((s.eval(&x).unwrap().norm() - 0.5_f64.powf(2.5)).abs() < 1e-15);
        let j = s.jacobian(&x).unwrap();
        assert!((j - 2.5 * 0.5_f64.powf(3.0)).abs() < 1e-14);
        assert!((s.derivative(&x).unwrap().determinant() - j).abs() < 1e-14);
        assert!(RadialStretch::new(0.9).is_err());
    }

    #[test]
    fn halfplane_sends_one_to_zero() {
        for c in [0.5, 1.0, 3.0] {
            let h = HalfPlane::new(c).unwrap();
            assert!(h.eval(&v(1.0, 0.0)).unwrap().norm() < 1e-15);
            let hi = h.inverse();
            for k in 0..20 {
                let t = 2.0 * PI * k as f64 / 20.0;
                let z = v(0.7 * t.cos(), 0.7 * t.sin());
                let w = h.eval(&z).unwrap();
                assert!(w[1] > 0.0);
                assert!((hi.eval(&w).unwrap() - &z).norm() < 1e-12);
            }
        }
        let h = HalfPlane::new(1.0).unwrap();
        assert!(matches!(
            h.eval(&v(-1.0, 0.0)),
            Err(Error::EvalAtPole { .. })
        ));
    }
}
