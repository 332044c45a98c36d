//! Leading terms of `E_{beta,2}(-x)`, `E_{beta,1}(-x)` (beta in (1,2)) and
//! `E_{alpha,1}(-x)` (alpha in (0,1)) for large `x`.
//!
//! The remainder constants are not available in closed form, so each
//! expansion carries a threshold found by sweeping [`mittag_leffler`] on a
//! logarithmic grid: above it the remainder stays below `remainder_bound / x^2`
//! and the function has the sign of its leading term.

use super::gamma::{digamma, gamma, rgamma};
use super::mittag_leffler::ml;
use crate::error::SpecialError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticExpansion {
    /// Leading term `c / x`.
    pub leading: f64,
    /// Bound on `x^2 |E(-x) - leading|` for `x` above `threshold`.
    pub remainder_bound: f64,
    /// Smallest certified `x`.
    pub threshold: f64,
}

/// The three Mittag-Leffler families whose large-argument behaviour drives
/// the gluing determinant and both observation functionals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `E_{beta,2}`, positive and decreasing in beta.
    WaveVelocity,
    /// `E_{beta,1}`, negative and increasing in beta.
    WaveDisplacement,
    /// `E_{alpha,1}`, positive and decreasing in alpha.
    Diffusion,
}

impl Family {
    fn parameters(self, order: f64) -> (f64, f64) {
        match self {
            Family::WaveVelocity => (order, 2.0),
            Family::WaveDisplacement => (order, 1.0),
            Family::Diffusion => (order, 1.0),
        }
    }

    fn order_range(self) -> (f64, f64) {
        match self {
            Family::WaveVelocity | Family::WaveDisplacement => (1.0, 2.0),
            Family::Diffusion => (0.0, 1.0),
        }
    }

    /// `x * leading` as a function of the order.
    pub fn leading_coefficient(self, order: f64) -> f64 {
        match self {
            Family::WaveVelocity => (2.0 - order) / gamma(3.0 - order).unwrap_or(f64::NAN),
            Family::WaveDisplacement => -(order - 1.0) * (2.0 - order) / gamma(3.0 - order).unwrap_or(f64::NAN),
            Family::Diffusion => (1.0 - order) / gamma(2.0 - order).unwrap_or(f64::NAN),
        }
    }

    /// Sign the function takes in the certified regime.
    pub fn sign(self) -> f64 {
        match self {
            Family::WaveDisplacement => -1.0,
            _ => 1.0,
        }
    }

    /// `x^2 |E - leading|` may not exceed this above the threshold. The
    /// second asymptotic coefficient is `1 / Gamma(mu - 2 rho)`; the bound
    /// doubles it and adds one for the higher-order and exponential terms.
    pub fn remainder_bound(self, order: f64) -> f64 {
        let (rho, mu) = self.parameters(order);
        2.0 * rgamma(mu - 2.0 * rho).abs() + 1.0
    }

    pub fn evaluate(self, order: f64, x: f64) -> Result<f64, SpecialError> {
        let (rho, mu) = self.parameters(order);
        ml(rho, mu, -x)
    }

    fn check_order(self, order: f64) -> Result<(), SpecialError> {
        let (lo, hi) = self.order_range();
        if order > lo && order < hi {
            Ok(())
        } else {
            Err(SpecialError::Domain { what: "asymptotic expansion order", value: order })
        }
    }

    /// Empirical threshold: sweeps `x = 10^(j/40)` downward from `1e8` and
    /// returns the smallest grid point above which every sample obeys the
    /// remainder bound and carries the expected sign.
    pub fn certified_threshold(self, order: f64) -> Result<f64, SpecialError> {
        self.check_order(order)?;
        let coeff = self.leading_coefficient(order);
        let bound = self.remainder_bound(order);
        let sign = self.sign();
        let mut threshold = f64::INFINITY;
        for j in (0..=320).rev() {
            let x = 10f64.powf(j as f64 / 40.0);
            let e = self.evaluate(order, x)?;
            let ok = (e - coeff / x).abs() * x * x <= bound && e * sign > 0.0;
            if !ok {
                break;
            }
            threshold = x;
        }
        if threshold.is_infinite() {
            log::warn!("{self:?} at order {order}: no certified regime below 1e8");
        }
        Ok(threshold)
    }

    pub fn expansion(self, order: f64, x: f64) -> Result<AsymptoticExpansion, SpecialError> {
        self.check_order(order)?;
        let threshold = self.certified_threshold(order)?;
        if !(x >= threshold) {
            return Err(SpecialError::BelowThreshold { value: x, threshold });
        }
        Ok(AsymptoticExpansion {
            leading: self.leading_coefficient(order) / x,
            remainder_bound: self.remainder_bound(order),
            threshold,
        })
    }

    /// Derivative in the order of the leading term of `E(-lambda t^order)`
    /// at fixed `lambda` and `t`, written with the digamma function.
    /// Diagnostic only: the neglected remainder is `O(1/(lambda t^order)^2)`.
    pub fn leading_order_derivative(self, order: f64, lambda: f64, t: f64) -> Result<f64, SpecialError> {
        self.check_order(order)?;
        let scale = 1.0 / (lambda * t.powf(order));
        let log_t = t.ln();
        Ok(match self {
            Family::WaveVelocity => {
                -scale * ((2.0 - order) * (log_t - digamma(3.0 - order)?) + 1.0) / gamma(3.0 - order)?
            }
            Family::WaveDisplacement => {
                scale * ((order - 1.0) * (2.0 - order) * (log_t - digamma(3.0 - order)?) + 2.0 * order - 3.0)
                    / gamma(3.0 - order)?
            }
            Family::Diffusion => {
                -scale * ((1.0 - order) * (log_t - digamma(2.0 - order)?) + 1.0) / gamma(2.0 - order)?
            }
        })
    }
}

/// Leading term of `E_{beta,2}(-x)`: `(2 - beta) / (Gamma(3 - beta) x)`.
pub fn ml_asymptotic_e2(beta: f64, lambda_t_beta: f64) -> Result<AsymptoticExpansion, SpecialError> {
    Family::WaveVelocity.expansion(beta, lambda_t_beta)
}

/// Leading term of `E_{beta,1}(-x)`: `-(beta - 1)(2 - beta) / (Gamma(3 - beta) x)`.
pub fn ml_asymptotic_e1(beta: f64, lambda_t_beta: f64) -> Result<AsymptoticExpansion, SpecialError> {
    Family::WaveDisplacement.expansion(beta, lambda_t_beta)
}

/// Leading term of `E_{alpha,1}(-x)`: `(1 - alpha) / (Gamma(2 - alpha) x)`.
pub fn ml_asymptotic_e3(alpha: f64, lambda_t_alpha: f64) -> Result<AsymptoticExpansion, SpecialError> {
    Family::Diffusion.expansion(alpha, lambda_t_alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leading_terms_at_ten_thousand() {
        let g15 = gamma(1.5).unwrap();
        let e2 = ml_asymptotic_e2(1.5, 1e4).unwrap();
        assert!((e2.leading - 0.5 / (g15 * 1e4)).abs() < 1e-18);
        let e1 = ml_asymptotic_e1(1.5, 1e4).unwrap();
        assert!((e1.leading + 0.25 / (g15 * 1e4)).abs() < 1e-18);
        let e3 = ml_asymptotic_e3(0.5, 1e4).unwrap();
        assert!((e3.leading - 0.5 / (g15 * 1e4)).abs() < 1e-18);
        for e in [e2, e1, e3] {
            assert!(e.remainder_bound >= 0.0);
        }
    }

    #[test]
    fn leading_terms_vanish_at_the_ends() {
        assert!(Family::WaveVelocity.leading_coefficient(2.0 - 1e-9).abs() < 1e-8);
        assert!(Family::WaveDisplacement.leading_coefficient(1.0 + 1e-9).abs() < 1e-8);
        assert!(Family::Diffusion.leading_coefficient(1.0 - 1e-9).abs() < 1e-8);
    }

    #[test]
    fn below_threshold_is_rejected() {
        assert!(matches!(ml_asymptotic_e2(1.5, 1e-3), Err(SpecialError::BelowThreshold { .. })));
        assert!(ml_asymptotic_e3(1.5, 1e4).is_err());
    }

    #[test]
    fn digamma_derivatives_match_finite_differences_of_leading_terms() {
        let (lambda, t) = (2.0f64, 30.0f64);
        for fam in [Family::WaveVelocity, Family::WaveDisplacement, Family::Diffusion] {
            let order = if fam == Family::Diffusion { 0.6 } else { 1.4 };
            let lead = |o: f64| fam.leading_coefficient(o) / (lambda * t.powf(o));
            let h = 1e-6;
            let fd = (lead(order + h) - lead(order - h)) / (2.0 * h);
            let d = fam.leading_order_derivative(order, lambda, t).unwrap();
            assert!((d - fd).abs() < 1e-8 * fd.abs().max(1e-6), "{fam:?}: {d} vs {fd}");
        }
    }
}
