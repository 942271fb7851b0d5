use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sphere_area, Dimension};

/// Exponent `β = (n−1)(n/2K)^{1/(n−1)}`.
pub fn beta(n: Dimension, k: f64) -> f64 {
    let m = n.as_f64();
    (m - 1.0) * (m / (2.0 * k)).powf(1.0 / (m - 1.0))
}

/// Constants the theory only asserts to exist. Defaults are calibrated
/// against discrete moduli at `r = 1/2`; see [`Constants::calibrated`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    /// Lower-bound constant for sphere-arc families.
    pub c_n: f64,
    /// Gehring's `C₂(r, n)`.
    pub c2: f64,
    /// Smallness threshold `ε(r, n)` for the Gehring bound.
    pub epsilon: f64,
}

impl Constants {
    /// n = 2: `c_2 = 0.6` sits below the discrete half-circle family value
    /// (≈ 0.637, exact `2/π`). `C₂` covers the cap grid `θ = kπ/8` at
    /// `r = 1/2` for `Cap/2`, which needs `C₂ ≥ 31.9` in the plane and
    /// `≥ 7.8` in space; `ε` is the full sphere measure.
    /// n ≥ 3: `c_n = 0.9·ω_{n−1}/π^n`, below the value of the meridian
    /// density `1/(π|x|)`.
    pub fn calibrated(n: Dimension) -> Self {
        let omega = sphere_area(n);
        match n.get() {
            2 => Constants {
                c_n: 0.6,
                c2: 35.0,
                epsilon: omega,
            },
            _ => Constants {
                c_n: 0.9 * omega / std::f64::consts::PI.powi(n.get() as i32),
                c2: 8.5,
                epsilon: omega,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum R0Case {
    One,
    Two,
    Three,
}

impl R0Case {
    pub const ALL: [R0Case; 3] = [R0Case::One, R0Case::Two, R0Case::Three];

    fn factor(self) -> f64 {
        match self {
            R0Case::One => 1.0,
            R0Case::Two => 2.0,
            R0Case::Three => 4.0,
        }
    }
}

/// Radius held as its logarithm; the closed forms underflow `f64`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct R0 {
    pub ln: f64,
}

impl R0 {
    pub fn value(self) -> f64 {
        self.ln.exp()
    }
}

/// `exp(−m (m·100^n n K^{n−1} ω_{n−1} / c_n)^{1/(n−1)})` with `m = 1, 2, 4`.
pub fn r0_formula(n: Dimension, k: f64, c_n: f64, case: R0Case) -> Result<R0> {
    if !(c_n > 0.0 && c_n.is_finite()) {
        return Err(Error::param("c_n", format!("must be positive, got {c_n}")));
    }
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::param("K", format!("must be at least 1, got {k}")));
    }
    let d = n.as_f64();
    let m = case.factor();
    let ln_x = d * 100f64.ln() + d.ln() + (d - 1.0) * k.ln() + sphere_area(n).ln() - c_n.ln();
    Ok(R0 {
        ln: -m * ((m.ln() + ln_x) / (d - 1.0)).exp(),
    })
}

/// Smallest of the three cases, which is case three.
pub fn r0_min(n: Dimension, k: f64, c_n: f64) -> Result<R0> {
    r0_formula(n, k, c_n, R0Case::Three)
}
