use std::f64::consts::PI;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(z: f64) -> f64 {
    let mut acc = LANCZOS_COEF[0];
    for (k, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + k as f64);
    }
    acc
}

/// Γ(x) for real `x`, using the reflection formula below 1/2.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let z = x - 1.0;
        let t = z + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
    }
}

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        (PI / (PI * x).sin()).abs().ln() - ln_gamma(1.0 - x)
    } else {
        let z = x - 1.0;
        let t = z + LANCZOS_G + 0.5;
        0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials_to_twelve_digits() {
        let mut fact = 1.0_f64;
        for k in 1..=20 {
            let g = gamma(k as f64 + 1.0);
            fact *= k as f64;
            assert!(
                ((g - fact) / fact).abs() < 1e-12,
                "Γ({}) = {g}, want {fact}",
                k + 1
            );
        }
    }

    #[test]
    fn half_integers_to_twelve_digits() {
        // Γ(k + 1/2) = (2k)! √π / (4^k k!)
        for k in 0..=12_u32 {
            let mut num = 1.0_f64;
            for j in 1..=2 * k {
                num *= j as f64;
            }
            let mut kf = 1.0_f64;
            for j in 1..=k {
                kf *= j as f64;
            }
            let want = num * PI.sqrt() / (4.0_f64.powi(k as i32) * kf);
            let got = gamma(k as f64 + 0.5);
            assert!(
                ((got - want) / want).abs() < 1e-12,
                "k={k}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn log_gamma_matches() {
        for &x in &[0.3, 1.0, 2.5, 7.25, 30.0] {
            assert!((ln_gamma(x) - gamma(x).ln()).abs() < 1e-11);
        }
    }
}
