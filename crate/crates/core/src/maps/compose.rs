use std::sync::Arc;

use super::planar::{Beurling, HalfPlane, RadialStretch};
use super::{check_dim, interior_points, MapHandle, QrMap};
use crate::error::{Error, Result};
use crate::geometry::{Dimension, Matrix, Vector};

const RANGE_SAMPLES: usize = 1000;

/// `outer ∘ inner` with chain-rule derivative. The declared constant is the
/// product of the factors' constants.
#[derive(Clone, Debug)]
pub struct Compose {
    outer: MapHandle,
    inner: MapHandle,
    id: String,
    singular: Vec<Vector>,
    origin_fixed: bool,
}

/// Build `outer ∘ inner`, checking on 10³ interior samples that the inner
/// image stays in the outer domain.
pub fn compose(outer: MapHandle, inner: MapHandle) -> Result<Compose> {
    if outer.dim() != inner.dim() {
        return Err(Error::DimensionMismatch {
            expected: outer.dim().get(),
            got: inner.dim().get(),
        });
    }
    for x in interior_points(inner.dim(), RANGE_SAMPLES, 0.999, 0x5eed) {
        let y = inner.eval(&x)?;
        if !outer.in_domain(&y) {
            return Err(Error::RangeEscape {
                outer: outer.id(),
                point: x.iter().copied().collect(),
            });
        }
    }
    let mut singular = inner.singular_points();
    for s in outer.singular_points() {
        if !singular.iter().any(|t| (t - &s).norm() < 1e-12) {
            singular.push(s);
        }
    }
    let zero = Vector::zeros(inner.dim().get());
    let origin_fixed = match inner.eval(&zero).and_then(|y| outer.eval(&y)) {
        Ok(y) => y.norm() <= 1e-12,
        Err(_) => false,
    };
    Ok(Compose {
        id: format!("compose({},{})", outer.id(), inner.id()),
        outer,
        inner,
        singular,
        origin_fixed,
    })
}

impl Compose {
    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn with_singular_points(mut self, points: Vec<Vector>) -> Self {
        self.singular = points;
        self
    }
}

impl QrMap for Compose {
    fn dim(&self) -> Dimension {
        self.inner.dim()
    }
    fn id(&self) -> String {
        self.id.clone()
    }
    fn eval(&self, x: &Vector) -> Result<Vector> {
        self.outer.eval(&self.inner.eval(x)?)
    }
    fn derivative(&self, x: &Vector) -> Result<Matrix> {
        let y = self.inner.eval(x)?;
        Ok(self.outer.derivative(&y)? * self.inner.derivative(x)?)
    }
    fn jacobian(&self, x: &Vector) -> Result<f64> {
        let y = self.inner.eval(x)?;
        Ok(self.outer.jacobian(&y)? * self.inner.jacobian(x)?)
    }
    fn declared_k(&self) -> f64 {
        self.outer.declared_k() * self.inner.declared_k()
    }
    fn singular_points(&self) -> Vec<Vector> {
        self.singular.clone()
    }
    fn origin_fixed(&self) -> bool {
        self.origin_fixed
    }
    fn in_domain(&self, x: &Vector) -> bool {
        self.inner.in_domain(x)
            && self
                .inner
                .eval(x)
                .map(|y| self.outer.in_domain(&y))
                .unwrap_or(false)
    }
}

/// `B_{K,a} = B_a ∘ H_c^{-1} ∘ S_K ∘ H_c` with `H_c(z) = c·i(1 − z)/(1 + z)`.
/// For `c = 1` (or `K = 1`) the origin is fixed.
pub fn bka(k: f64, a: f64, c: f64) -> Result<Compose> {
    let h = HalfPlane::new(c)?;
    let hinv: MapHandle = Arc::new(h.inverse());
    let stretch: MapHandle = Arc::new(RadialStretch::new(k)?);
    let beurling: MapHandle = Arc::new(Beurling::new(a)?);
    let h: MapHandle = Arc::new(h);
    let inner = Arc::new(compose(stretch, h)?);
    let inner = Arc::new(compose(hinv, inner)?);
    let id = if c == 1.0 {
        format!("bka:K={k},a={a}")
    } else {
        format!("bka:K={k},a={a},c={c}")
    };
    Ok(compose(beurling, inner)?
        .with_id(id)
        .with_singular_points(vec![
            Vector::from_vec(vec![1.0, 0.0]),
            Vector::from_vec(vec![-1.0, 0.0]),
        ]))
}

/// Range rescaling `x ↦ λ f(x)`; preserves the distortion constant.
#[derive(Clone, Debug)]
pub struct Scaled {
    inner: MapHandle,
    lambda: f64,
}

impl Scaled {
    pub fn new(inner: MapHandle, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::param(
                "lambda",
                format!("must be positive, got {lambda}"),
            ));
        }
        Ok(Scaled { inner, lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl QrMap for Scaled {
    fn dim(&self) -> Dimension {
        self.inner.dim()
    }
    fn id(&self) -> String {
        format!("scaled({},lambda={})", self.inner.id(), self.lambda)
    }
    fn eval(&self, x: &Vector) -> Result<Vector> {
        Ok(self.inner.eval(x)? * self.lambda)
    }
    fn derivative(&self, x: &Vector) -> Result<Matrix> {
        Ok(self.inner.derivative(x)? * self.lambda)
    }
    fn jacobian(&self, x: &Vector) -> Result<f64> {
        check_dim(self, x)?;
        Ok(self.inner.jacobian(x)? * self.lambda.powi(self.dim().get() as i32))
    }
    fn declared_k(&self) -> f64 {
        self.inner.declared_k()
    }
    fn singular_points(&self) -> Vec<Vector> {
        self.inner.singular_points()
    }
    fn origin_fixed(&self) -> bool {
        self.inner.origin_fixed()
    }
    fn in_domain(&self, x: &Vector) -> bool {
        self.inner.in_domain(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{Identity, MobiusBall};

    #[test]
    fn bka_fixes_origin_only_for_unit_scale() {
        assert!(bka(2.0, 0.5, 1.0).unwrap().origin_fixed());
        assert!(!bka(2.0, 0.5, 2.0).unwrap().origin_fixed());
        assert!(bka(1.0, 0.5, 2.0).unwrap().origin_fixed());
    }

    #[test]
    fn mismatched_dimensions_fail() {
        let a: MapHandle = Arc::new(Identity::new(Dimension::TWO));
        let b: MapHandle = Arc::new(Identity::new(Dimension::THREE));
        assert!(matches!(
            compose(a, b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn range_escape_is_detected() {
        // λ = 3 pushes the unit ball past the Beurling pole at 1/a = 2.
        let big: MapHandle = Arc::new(MobiusBall::new(Dimension::TWO, None, 3.0).unwrap());
        let b: MapHandle = Arc::new(Beurling::new(0.5).unwrap());
        assert!(matches!(compose(b, big), Err(Error::RangeEscape { .. })));
    }
}
