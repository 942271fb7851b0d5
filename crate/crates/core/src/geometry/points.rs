use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::quadrature::{Estimate, Method, QuadratureSpec};
use super::{Dimension, Vector};
use crate::error::{Error, Result};

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
const CHUNK: usize = 2048;
const RANDOM_REPLICATES: usize = 8;

/// Radical-inverse Halton point with index `index` (1-based) in `dims` dimensions.
pub fn halton(index: u64, dims: usize) -> Vec<f64> {
    assert!(
        dims <= PRIMES.len(),
        "halton supports at most {} dimensions",
        PRIMES.len()
    );
    PRIMES[..dims]
        .iter()
        .map(|&base| {
            let mut f = 1.0;
            let mut r = 0.0;
            let mut i = index;
            let inv = 1.0 / base as f64;
            while i > 0 {
                f *= inv;
                r += f * (i % base) as f64;
                i /= base;
            }
            r
        })
        .collect()
}

/// Acklam's rational approximation of the standard normal quantile
/// (relative error below 1.2e-9), which is plenty for sampling directions.
pub fn inverse_normal_cdf(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    let p = p.clamp(1e-300, 1.0 - 1e-16);
    let low = 0.02425;
    if p < low {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Gauss–Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(order: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let m = order.div_ceil(2);
    let mut x = vec![0.0; order];
    let mut w = vec![0.0; order];
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..order {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = order as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = mid - half * z;
        x[order - 1 - i] = mid + half * z;
        w[i] = half * wi;
        w[order - 1 - i] = half * wi;
    }
    (x, w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    Ball,
    Sphere,
}

/// Tensor rule on the unit sphere plus an optional radial rule (for balls).
#[derive(Clone, Debug)]
struct ProductLevel {
    radial: Vec<(f64, f64)>,
    sphere: Vec<(Vector, f64)>,
}

#[derive(Clone, Debug)]
enum Replicate {
    Product(ProductLevel),
    Random { count: usize, stream: u64 },
    Shifted { count: usize, shift: Vec<f64> },
}

impl Replicate {
    fn len(&self) -> usize {
        match self {
            Replicate::Product(level) => match level.radial.len() {
                0 => level.sphere.len(),
                r => r * level.sphere.len(),
            },
            Replicate::Random { count, .. } | Replicate::Shifted { count, .. } => *count,
        }
    }
}

/// Deterministic point set on a ball or sphere, split into replicates so
/// every estimate carries an error bar.
///
/// Product rules carry two replicates (fine and half-resolution); their
/// difference is the reported error. Monte-Carlo plans use batch means and
/// quasi-Monte-Carlo plans use independent random shifts of a Halton
/// sequence. Work is chunked in fixed blocks and reduced in block order, so
/// results do not depend on the number of worker threads.
#[derive(Clone, Debug)]
pub struct SamplePlan {
    dim: Dimension,
    center: Vector,
    radius: f64,
    shape: Shape,
    method: Method,
    seed: u64,
    replicates: Vec<Replicate>,
    singular: Vec<Vector>,
}

impl SamplePlan {
    pub fn ball(
        dim: Dimension,
        center: &Vector,
        radius: f64,
        spec: &QuadratureSpec,
        singular: &[Vector],
    ) -> Result<Self> {
        Self::build(dim, center, radius, spec, singular, Shape::Ball)
    }

    pub fn sphere(
        dim: Dimension,
        center: &Vector,
        radius: f64,
        spec: &QuadratureSpec,
        singular: &[Vector],
    ) -> Result<Self> {
        Self::build(dim, center, radius, spec, singular, Shape::Sphere)
    }

    fn build(
        dim: Dimension,
        center: &Vector,
        radius: f64,
        spec: &QuadratureSpec,
        singular: &[Vector],
        shape: Shape,
    ) -> Result<Self> {
        spec.validate()?;
        super::check_vector(dim, center)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::param(
                "radius",
                format!("must be positive, got {radius}"),
            ));
        }
        for s in singular {
            super::check_vector(dim, s)?;
        }
        let n = dim.get();
        let budget = spec.sample_budget;
        // Singular points on (or outside) the boundary sphere trigger grading.
        let boundary_singular = singular
            .iter()
            .find(|s| (*s - center).norm() >= radius * (1.0 - 1e-9))
            .map(|s| (s - center) / (s - center).norm());
        let grading = if boundary_singular.is_some() {
            spec.boundary_refinement
        } else {
            1.0
        };

        let replicates = match spec.method {
            Method::ProductRule => {
                let levels = [budget, (budget / 4).max(1)];
                levels
                    .iter()
                    .map(|&b| {
                        Replicate::Product(product_level(
                            n,
                            b,
                            shape,
                            grading,
                            boundary_singular.as_ref(),
                        ))
                    })
                    .collect()
            }
            Method::MonteCarlo | Method::QuasiMonteCarlo => {
                let reps = RANDOM_REPLICATES.min(budget);
                let count = (budget / reps).max(1);
                (0..reps)
                    .map(|r| {
                        if spec.method == Method::MonteCarlo {
                            Replicate::Random {
                                count,
                                stream: r as u64,
                            }
                        } else {
                            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
                            rng.set_stream(1_000_003 + r as u64);
                            let dims = cube_dims(n, shape);
                            Replicate::Shifted {
                                count,
                                shift: (0..dims).map(|_| rng.random::<f64>()).collect(),
                            }
                        }
                    })
                    .collect()
            }
        };
        Ok(SamplePlan {
            dim,
            center: center.clone(),
            radius,
            shape,
            method: spec.method,
            seed: spec.seed,
            replicates,
            singular: singular.to_vec(),
        })
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn replicate_count(&self) -> usize {
        self.replicates.len()
    }

    /// Total number of integrand evaluations across replicates.
    pub fn total_points(&self) -> usize {
        self.replicates.iter().map(Replicate::len).sum()
    }

    /// Whether `x` is within `1e-6 · radius` of a declared singular point.
    pub fn near_singular(&self, x: &Vector) -> bool {
        self.singular
            .iter()
            .any(|s| (x - s).norm() <= 1e-6 * self.radius)
    }

    /// Run `f(point, weight, accumulator)` over every point, returning one
    /// accumulator of length `width` per replicate. Weights sum to the
    /// measure of the region within each replicate.
    pub fn accumulate<F>(&self, width: usize, f: F) -> Result<Vec<Vec<f64>>>
    where
        F: Fn(&Vector, f64, &mut [f64]) -> Result<()> + Sync,
    {
        let tasks: Vec<(usize, usize)> = self
            .replicates
            .iter()
            .enumerate()
            .flat_map(|(r, rep)| (0..rep.len().div_ceil(CHUNK)).map(move |c| (r, c)))
            .collect();
        let partials: Vec<Result<(usize, Vec<f64>)>> = tasks
            .par_iter()
            .map(|&(r, c)| {
                let mut acc = vec![0.0; width];
                self.run_chunk(r, c, &mut acc, &f)?;
                Ok((r, acc))
            })
            .collect();
        let mut out = vec![vec![0.0; width]; self.replicates.len()];
        for partial in partials {
            let (r, acc) = partial?;
            for (o, a) in out[r].iter_mut().zip(acc) {
                *o += a;
            }
        }
        Ok(out)
    }

    fn run_chunk<F>(&self, r: usize, chunk: usize, acc: &mut [f64], f: &F) -> Result<()>
    where
        F: Fn(&Vector, f64, &mut [f64]) -> Result<()>,
    {
        let rep = &self.replicates[r];
        let start = chunk * CHUNK;
        let end = (start + CHUNK).min(rep.len());
        let n = self.dim.get();
        let measure = self.measure();
        match rep {
            Replicate::Product(level) => {
                for i in start..end {
                    let (x, w) = if level.radial.is_empty() {
                        let (u, w) = &level.sphere[i];
                        (
                            &self.center + u * self.radius,
                            w * self.radius.powi(n as i32 - 1),
                        )
                    } else {
                        let (ri, si) = (i / level.sphere.len(), i % level.sphere.len());
                        let (rho, wr) = level.radial[ri];
                        let (u, ws) = &level.sphere[si];
                        let rr = rho * self.radius;
                        (
                            &self.center + u * rr,
                            wr * ws * self.radius * rr.powi(n as i32 - 1),
                        )
                    };
                    f(&x, w, acc)?;
                }
            }
            Replicate::Random { count, stream } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream((*stream << 32) | chunk as u64);
                let dims = cube_dims(n, self.shape);
                let w = measure / *count as f64;
                let mut u = vec![0.0; dims];
                for _ in start..end {
                    for ui in u.iter_mut() {
                        *ui = rng.random::<f64>();
                    }
                    let x = self.map_cube(&u);
                    f(&x, w, acc)?;
                }
            }
            Replicate::Shifted { count, shift } => {
                let dims = shift.len();
                let w = measure / *count as f64;
                for i in start..end {
                    let mut u = halton(i as u64 + 1, dims);
                    for (ui, s) in u.iter_mut().zip(shift) {
                        *ui = (*ui + s).fract();
                    }
                    let x = self.map_cube(&u);
                    f(&x, w, acc)?;
                }
            }
        }
        Ok(())
    }

    fn measure(&self) -> f64 {
        let n = self.dim;
        match self.shape {
            Shape::Ball => super::ball_volume(n) * self.radius.powi(n.get() as i32),
            Shape::Sphere => super::sphere_area(n) * self.radius.powi(n.get() as i32 - 1),
        }
    }

    fn map_cube(&self, u: &[f64]) -> Vector {
        let n = self.dim.get();
        match self.shape {
            Shape::Sphere => &self.center + cube_to_sphere(n, u) * self.radius,
            Shape::Ball => {
                let rho = u[0].powf(1.0 / n as f64);
                &self.center + cube_to_sphere(n, &u[1..]) * (rho * self.radius)
            }
        }
    }

    /// Combine per-replicate scalar results into a value with an error bar.
    pub fn combine(&self, per_replicate: &[f64]) -> Estimate {
        match self.method {
            Method::ProductRule => Estimate {
                value: per_replicate[0],
                stderr: (per_replicate[0] - per_replicate[1]).abs(),
            },
            Method::MonteCarlo | Method::QuasiMonteCarlo => {
                let r = per_replicate.len() as f64;
                let mean = per_replicate.iter().sum::<f64>() / r;
                let stderr = if per_replicate.len() > 1 {
                    let var = per_replicate
                        .iter()
                        .map(|v| (v - mean).powi(2))
                        .sum::<f64>()
                        / (r - 1.0);
                    (var / r).sqrt()
                } else {
                    f64::NAN
                };
                Estimate {
                    value: mean,
                    stderr,
                }
            }
        }
    }
}

fn cube_dims(n: usize, shape: Shape) -> usize {
    let sphere_dims = if n <= 3 { n - 1 } else { n };
    match shape {
        Shape::Sphere => sphere_dims,
        Shape::Ball => sphere_dims + 1,
    }
}

/// Area-preserving map from the unit cube onto `S^{n-1}` (exact for n ≤ 3,
/// Gaussian normalization above).
fn cube_to_sphere(n: usize, u: &[f64]) -> Vector {
    match n {
        2 => {
            let t = 2.0 * PI * u[0];
            Vector::from_vec(vec![t.cos(), t.sin()])
        }
        3 => {
            let z = 2.0 * u[0] - 1.0;
            let phi = 2.0 * PI * u[1];
            let s = (1.0 - z * z).max(0.0).sqrt();
            Vector::from_vec(vec![s * phi.cos(), s * phi.sin(), z])
        }
        _ => {
            let mut g = Vector::from_iterator(
                n,
                u.iter()
                    .take(n)
                    .map(|&p| inverse_normal_cdf(p.clamp(1e-16, 1.0 - 1e-16))),
            );
            let norm = g.norm();
            if norm == 0.0 {
                g[0] = 1.0;
                g
            } else {
                g / norm
            }
        }
    }
}

/// Recursive hyperspherical tensor rule on `S^{k}` embedded in `R^{k+1}`
/// with `m + 4` polar nodes per angle and `2m` azimuthal nodes.
fn sphere_rule(k: usize, m: usize, azimuth: &dyn Fn(usize) -> (f64, f64)) -> Vec<(Vector, f64)> {
    if k == 1 {
        return (0..2 * m)
            .map(|j| {
                let (t, w) = azimuth(j);
                (Vector::from_vec(vec![t.cos(), t.sin()]), w)
            })
            .collect();
    }
    let lower = sphere_rule(k - 1, m, azimuth);
    // sin^{k-1} is not polynomial; a few extra polar nodes keep the rule
    // accurate to ~1e-9 even at small m.
    let (phis, ws) = gauss_legendre(m + 4, 0.0, PI);
    let mut out = Vec::with_capacity(m * lower.len());
    for (phi, w) in phis.iter().zip(&ws) {
        let (s, c) = phi.sin_cos();
        let weight = w * s.powi(k as i32 - 1);
        for (y, wy) in &lower {
            let mut x = Vector::zeros(k + 1);
            x[0] = c;
            for i in 0..k {
                x[i + 1] = s * y[i];
            }
            out.push((x, weight * wy));
        }
    }
    out
}

fn product_level(
    n: usize,
    budget: usize,
    shape: Shape,
    grading: f64,
    singular_dir: Option<&Vector>,
) -> ProductLevel {
    let sphere_budget = match shape {
        Shape::Sphere => budget as f64,
        Shape::Ball => (budget as f64).powf((n as f64 - 1.0) / n as f64),
    };
    let m = ((sphere_budget / 2.0).powf(1.0 / (n as f64 - 1.0)).round() as usize).max(2);
    let q = grading;
    // Azimuth toward the singular direction (n = 2 only), graded by `q`.
    let theta0 = match (n, singular_dir) {
        (2, Some(d)) if q < 1.0 => Some(d[1].atan2(d[0])),
        _ => None,
    };
    let count = 2 * m;
    let azimuth = move |j: usize| -> (f64, f64) {
        match theta0 {
            None => {
                let h = 2.0 * PI / count as f64;
                (h * (j as f64 + 0.5), h)
            }
            Some(t0) => {
                // v ∈ [-1, 1) equispaced, θ = t0 + π sgn(v)|v|^{1/q}
                let h = 2.0 / count as f64;
                let v = -1.0 + h * j as f64;
                let a = v.abs();
                let theta = t0 + PI * v.signum() * a.powf(1.0 / q);
                let w = PI / q * a.powf(1.0 / q - 1.0) * h;
                (theta, w)
            }
        }
    };
    let sphere = sphere_rule(n - 1, m, &azimuth);
    let radial = match shape {
        Shape::Sphere => Vec::new(),
        Shape::Ball => {
            let nr = ((budget as f64 / sphere.len() as f64).round() as usize).max(8);
            let (us, ws) = gauss_legendre(nr, 0.0, 1.0);
            us.iter()
                .zip(&ws)
                .map(|(&u, &w)| {
                    if singular_dir.is_some() && q < 1.0 {
                        // r = 1 - (1-u)^{1/q}
                        let rho = 1.0 - (1.0 - u).powf(1.0 / q);
                        (rho, w * (1.0 - u).powf(1.0 / q - 1.0) / q)
                    } else {
                        (u, w)
                    }
                })
                .collect()
        }
    };
    ProductLevel { radial, sphere }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(5, 0.0, 2.0);
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(9)).sum();
        assert!((integral - 2.0_f64.powi(10) / 10.0).abs() < 1e-10);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn halton_first_points() {
        assert_eq!(halton(1, 2), vec![0.5, 1.0 / 3.0]);
        assert_eq!(halton(2, 2), vec![0.25, 2.0 / 3.0]);
    }

    #[test]
    fn inverse_normal_is_accurate() {
        assert!(inverse_normal_cdf(0.5).abs() < 1e-9);
        assert!((inverse_normal_cdf(0.975) - 1.959_963_984_540_054).abs() < 1e-8);
        assert!((inverse_normal_cdf(0.001) + 3.090_232_306_167_813_5).abs() < 1e-7);
    }

    #[test]
    fn cube_to_sphere_lands_on_sphere() {
        for n in 2..=6 {
            let u: Vec<f64> = (0..n).map(|i| 0.1 + 0.13 * i as f64).collect();
            let x = cube_to_sphere(n, &u);
            assert_eq!(x.len(), n);
            assert!((x.norm() - 1.0).abs() < 1e-12);
        }
    }
}
