//! Test-only oracles, independent of the library's evaluation paths.

#![allow(dead_code)]

pub mod oracle {
    use rug::float::Constant;
    use rug::ops::Pow;
    use rug::Float;

    /// Decimal digits kept beyond the cancellation headroom.
    pub const GUARD_DIGITS: f64 = 50.0;

    /// Past this value of `|x|^(1/rho)` the Taylor series would need more than
    /// ~140 working digits and the asymptotic series is used instead; its
    /// optimal-truncation error is of order `exp(-|x|^(1/rho))`, below 1e-80.
    pub const TAYLOR_CAP: f64 = 200.0;

    fn bits(digits: f64) -> u32 {
        (digits * 3.33).ceil() as u32 + 64
    }

    fn rgamma(arg: &Float) -> Float {
        let prec = arg.prec();
        if *arg <= 0 && arg.is_integer() {
            return Float::with_val(prec, 0);
        }
        Float::with_val(prec, arg.gamma_ref()).recip()
    }

    /// `sum_n x^n / Gamma(rho n + mu)` at a working precision of
    /// `GUARD_DIGITS` plus the digits lost to cancellation.
    pub fn taylor(rho: f64, mu: f64, x: f64) -> f64 {
        let t = -x;
        let headroom = t.powf(1.0 / rho) * std::f64::consts::LOG10_E;
        let prec = bits(GUARD_DIGITS + headroom + 10.0);
        let rho_f = Float::with_val(prec, rho);
        let mu_f = Float::with_val(prec, mu);
        let x_f = Float::with_val(prec, x);
        let mut sum = Float::with_val(prec, 0);
        let mut power = Float::with_val(prec, 1);
        let cutoff = Float::with_val(prec, 10).pow(-(GUARD_DIGITS as i32) - 20);
        let mut n: u64 = 0;
        loop {
            let arg = Float::with_val(prec, &rho_f * n) + &mu_f;
            let term = Float::with_val(prec, &power * rgamma(&arg));
            sum += &term;
            if arg > 2 && n > 5 && term.clone().abs() < cutoff {
                break;
            }
            power *= &x_f;
            n += 1;
        }
        sum.to_f64()
    }

    /// Optimally truncated asymptotic series `-sum_{n>=1} (-t)^{-n} / Gamma(mu - rho n)`,
    /// plus the two pole residues when `rho > 1`.
    pub fn asymptotic(rho: f64, mu: f64, x: f64) -> f64 {
        let prec = bits(GUARD_DIGITS + 20.0);
        let t = Float::with_val(prec, -x);
        let rho_f = Float::with_val(prec, rho);
        let mu_f = Float::with_val(prec, mu);
        let neg_inv = Float::with_val(prec, -1) / &t;
        let mut power = Float::with_val(prec, 1);
        let mut sum = Float::with_val(prec, 0);
        let tiny = Float::with_val(prec, 10).pow(-(GUARD_DIGITS as i32) - 10);
        // the envelope Gamma(rho n + 1 - mu) / t^n bottoms out near rho n = t^(1/rho)
        let last = ((-x).powf(1.0 / rho) / rho).floor().max(4.0) as u64;
        for n in 1..=last {
            power *= &neg_inv;
            let arg = Float::with_val(prec, &mu_f - Float::with_val(prec, &rho_f * n));
            let term = Float::with_val(prec, &power * rgamma(&arg));
            sum -= &term;
            let reflected = Float::with_val(prec, 1 - arg.clone()).max(&Float::with_val(prec, 2));
            let envelope = Float::with_val(prec, reflected.gamma_ref()) * power.clone().abs();
            if envelope < tiny {
                break;
            }
        }
        if rho > 1.0 {
            let pi = Float::with_val(prec, Constant::Pi);
            let root = Float::with_val(prec, t.clone().pow(Float::with_val(prec, 1) / &rho_f));
            let angle = Float::with_val(prec, &pi / &rho_f);
            let decay = Float::with_val(prec, &root * angle.clone().cos()).exp();
            let one_minus_mu = Float::with_val(prec, 1 - mu_f.clone());
            let amplitude = Float::with_val(prec, t.clone().pow(Float::with_val(prec, &one_minus_mu / &rho_f)));
            let phase = Float::with_val(prec, &root * angle.clone().sin()) + Float::with_val(prec, &angle * &one_minus_mu);
            let residue = Float::with_val(prec, 2) / &rho_f * amplitude * decay * phase.cos();
            sum += residue;
        }
        sum.to_f64()
    }

    /// High-precision reference value of `E_{rho,mu}(x)`, `x <= 0`.
    pub fn mittag_leffler(rho: f64, mu: f64, x: f64) -> f64 {
        if (-x).powf(1.0 / rho) <= TAYLOR_CAP {
            taylor(rho, mu, x)
        } else {
            asymptotic(rho, mu, x)
        }
    }
}
