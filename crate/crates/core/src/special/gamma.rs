//! Gamma, reciprocal gamma and digamma on the real line.

use std::f64::consts::PI;

use crate::error::SpecialError;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// Lanczos coefficients (g = 671/128, 14 terms), good to about 1e-15 on [1, 2].
const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];

/// `sin(pi * x)` with exact argument reduction, so it vanishes at integers.
pub fn sin_pi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let r = x.rem_euclid(2.0);
    // r in [0, 2)
    let (s, sign) = if r >= 1.0 { (r - 1.0, -1.0) } else { (r, 1.0) };
    let v = if s <= 0.25 {
        (PI * s).sin()
    } else if s <= 0.75 {
        (PI * (0.5 - s)).cos()
    } else {
        (PI * (1.0 - s)).sin()
    };
    sign * v
}

/// `cos(pi * x)` with exact argument reduction.
pub fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// `ln Gamma(x)` for `x` in `[1, 2]`, via the Lanczos sum.
fn ln_gamma_lanczos(x: f64) -> f64 {
    let mut y = x;
    let tmp = x + LANCZOS_G;
    let tmp = (x + 0.5) * tmp.ln() - tmp;
    let mut ser = 0.999_999_999_999_997_092;
    for c in LANCZOS {
        y += 1.0;
        ser += c / y;
    }
    tmp + (2.506_628_274_631_000_5 * ser / x).ln()
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        return PI / (sin_pi(x) * gamma_unchecked(1.0 - x));
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    let mut z = x;
    let mut scale = 1.0;
    while z > 2.0 {
        z -= 1.0;
        scale *= z;
    }
    while z < 1.0 {
        scale /= z;
        z += 1.0;
    }
    scale * ln_gamma_lanczos(z).exp()
}

/// The gamma function. Fails at the poles `0, -1, -2, ...`.
pub fn gamma(x: f64) -> Result<f64, SpecialError> {
    if x.is_nan() {
        return Err(SpecialError::Domain { what: "gamma", value: x });
    }
    if is_nonpositive_integer(x) {
        return Err(SpecialError::GammaPole(x));
    }
    Ok(gamma_unchecked(x))
}

/// `1 / Gamma(x)`, an entire function: zero at the poles of gamma and
/// for arguments large enough that gamma overflows.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x > 171.7 {
        return 0.0;
    }
    if x < 0.5 {
        // 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi
        let g = gamma_unchecked(1.0 - x);
        if g.is_infinite() {
            return sin_pi(x) * (ln_gamma(1.0 - x) - PI.ln()).exp();
        }
        return sin_pi(x) * g / PI;
    }
    1.0 / gamma_unchecked(x)
}

/// `ln |Gamma(x)|` for positive `x`.
pub fn ln_gamma(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NAN;
    }
    if x < 1.0 {
        return ln_gamma(x + 1.0) - x.ln();
    }
    if x <= 2.0 {
        return ln_gamma_lanczos(x);
    }
    if x < 20.0 {
        return gamma_unchecked(x).ln();
    }
    // Stirling series
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series
}

/// The digamma function `Psi = Gamma' / Gamma` for positive arguments.
pub fn digamma(x: f64) -> Result<f64, SpecialError> {
    if x.is_nan() || x <= 0.0 {
        return Err(SpecialError::Domain { what: "digamma", value: x });
    }
    let mut acc = 0.0;
    let mut z = x;
    while z < 10.0 {
        acc -= 1.0 / z;
        z += 1.0;
    }
    // Asymptotic series with Bernoulli numbers B2..B14.
    let inv2 = 1.0 / (z * z);
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    Ok(acc + z.ln() - 0.5 / z - tail)
}

/// Euler-Mascheroni constant.
pub const fn euler_gamma() -> f64 {
    EULER_GAMMA
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_closed_forms() {
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert_relative_eq!(gamma(0.5).unwrap(), 1.772_453_850_905_516, max_relative = 1e-15);
        assert_relative_eq!(gamma(3.0).unwrap(), 2.0, max_relative = 1e-15);
        assert_relative_eq!(gamma(-0.5).unwrap(), -2.0 * 1.772_453_850_905_516, max_relative = 1e-14);
    }

    #[test]
    fn gamma_factorials_to_fifty() {
        let mut fact = 1.0f64;
        for n in 1..50 {
            let g = gamma(n as f64 + 1.0).unwrap();
            fact *= n as f64;
            assert_relative_eq!(g, fact, max_relative = 1e-13);
        }
    }

    #[test]
    fn gamma_poles_are_errors() {
        for x in [0.0, -1.0, -2.0, -7.0] {
            assert!(matches!(gamma(x), Err(SpecialError::GammaPole(_))));
            assert_eq!(rgamma(x), 0.0);
        }
    }

    #[test]
    fn digamma_closed_forms() {
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-14);
        assert!((digamma(2.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-14);
        assert!((digamma(0.5).unwrap() + 1.963_510_026_021_423_5).abs() < 1e-14);
        assert!(digamma(0.0).is_err());
        assert!(digamma(-1.5).is_err());
    }

    #[test]
    fn digamma_matches_log_derivative() {
        for i in 0..=50 {
            let x = 0.5 + 2.5 * i as f64 / 50.0;
            let h = 1e-5;
            let fd = (ln_gamma(x + h) - ln_gamma(x - h)) / (2.0 * h);
            assert!((digamma(x).unwrap() - fd).abs() < 1e-8, "x = {x}");
        }
    }

    #[test]
    fn sin_pi_exact_at_integers() {
        for k in -5..5 {
            assert_eq!(sin_pi(k as f64), 0.0);
        }
        assert_eq!(sin_pi(0.5), 1.0);
        let x = 1.0 - 1e-12;
        assert!((sin_pi(x) - (PI * (1.0 - x)).sin()).abs() < 1e-27);
    }

    #[test]
    fn ln_gamma_continuity_at_switch() {
        let a = ln_gamma(20.0 - 1e-12);
        let b = ln_gamma(20.0 + 1e-12);
        assert!((a - b).abs() < 1e-10);
    }
}
