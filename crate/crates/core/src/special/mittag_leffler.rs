//! Two-parameter Mittag-Leffler function `E_{rho,mu}(x)` on the closed
//! negative real axis, `0 < rho <= 2`.
//!
//! Three regimes:
//!
//! * `|x|^(1/rho) <= 4`: Taylor series with compensated summation. The largest
//!   term is then bounded by about `e^4`, so cancellation costs under two digits.
//! * otherwise, `rho != 1`: the Hankel contour of
//!   `E(-t) = (2 pi i)^{-1} \int e^s s^{rho-mu} / (s^rho + t) ds`
//!   is collapsed onto the branch cut. For `rho > 1` the two poles
//!   `s = t^{1/rho} e^{+-i pi/rho}` lie on the principal sheet and their
//!   residues are added in closed form. The cut integral converges at the
//!   origin only for `mu < 1 + rho`; larger `mu` are brought down with
//!   `E_{rho,mu}(z) = (E_{rho,mu-rho}(z) - 1/Gamma(mu-rho)) / z`.
//! * `rho == 1`: the pole sits on the cut and the integral becomes a
//!   principal value plus a pole term.

use std::f64::consts::PI;

use super::gamma::{cos_pi, rgamma, sin_pi};
use crate::error::SpecialError;
use crate::quadrature::{integrate_with_breaks, Tolerance};

/// Arguments of one Mittag-Leffler evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlParams {
    pub rho: f64,
    pub mu: f64,
    pub x: f64,
}

impl MlParams {
    pub fn new(rho: f64, mu: f64, x: f64) -> Result<Self, SpecialError> {
        let p = Self { rho, mu, x };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<(), SpecialError> {
        let ok = self.rho > 0.0 && self.rho <= 2.0 && self.mu.is_finite() && self.mu >= MU_MIN && self.mu <= MU_MAX && self.x <= 0.0 && self.x.is_finite();
        if ok {
            Ok(())
        } else {
            Err(SpecialError::Parameters { rho: self.rho, mu: self.mu, x: self.x })
        }
    }
}

const MU_MIN: f64 = -1.0;
const MU_MAX: f64 = 4.0;

/// Taylor regime boundary on `|x|^(1/rho)`.
const TAYLOR_LIMIT: f64 = 4.0;
/// Below this distance from 1, `rho` is treated as exactly 1.
const RHO_ONE_SNAP: f64 = 1e-11;
/// Upper limit of the cut integral; `e^{-R}` is far below double precision.
const CUT_LENGTH: f64 = 80.0;
/// Accuracy demanded from the internal quadratures.
const QUAD_ABS: f64 = 1e-13;
const QUAD_REL: f64 = 1e-13;
/// Error estimates above this are reported as non-convergence.
const ACCEPT: f64 = 1e-11;

/// `E_{rho,mu}(x)` for `x <= 0`.
pub fn mittag_leffler(p: MlParams) -> Result<f64, SpecialError> {
    p.validate()?;
    let t = -p.x;
    if t == 0.0 {
        return Ok(rgamma(p.mu));
    }
    if t.powf(1.0 / p.rho) <= TAYLOR_LIMIT {
        return Ok(taylor(p.rho, p.mu, t));
    }
    let unit = (p.rho - 1.0).abs() < RHO_ONE_SNAP;
    let rho = if unit { 1.0 } else { p.rho };
    let ceiling = if unit { 1.0 } else { rho + 0.5 };
    let (mut mu, mut steps) = (p.mu, 0usize);
    while mu > ceiling {
        mu -= rho;
        steps += 1;
    }
    let mut value = if unit { unit_order_cut(mu, t, &p)? } else { cut_representation(rho, mu, t, &p)? };
    // climb back: E_{rho,m+rho}(-t) = (1/Gamma(m) - E_{rho,m}(-t)) / t
    for _ in 0..steps {
        value = (rgamma(mu) - value) / t;
        mu += rho;
    }
    Ok(value)
}

/// Convenience wrapper for `E_{rho,mu}(x)`.
pub fn ml(rho: f64, mu: f64, x: f64) -> Result<f64, SpecialError> {
    mittag_leffler(MlParams { rho, mu, x })
}

fn taylor(rho: f64, mu: f64, t: f64) -> f64 {
    // Neumaier summation of sum_n (-t)^n / Gamma(rho n + mu)
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut power = 1.0f64;
    let mut n = 0usize;
    loop {
        let arg = rho * n as f64 + mu;
        let term = power * rgamma(arg);
        let s = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - s) + term;
        } else {
            comp += (term - s) + sum;
        }
        sum = s;
        // past the peak of the terms and negligible
        if arg > 2.0 && n > 2 && term.abs() <= 1e-18 * (sum + comp).abs().max(1e-300) {
            break;
        }
        if arg > 171.0 {
            break;
        }
        power *= -t;
        n += 1;
    }
    sum + comp
}

/// Collapsed Hankel-contour representation, valid for `mu < 1 + rho`,
/// `rho != 1`.
fn cut_representation(rho: f64, mu: f64, t: f64, orig: &MlParams) -> Result<f64, SpecialError> {
    let (s_mu, c_mu) = (sin_pi(mu), cos_pi(mu));
    let (c_rho, s_rho) = (cos_pi(rho), sin_pi(rho));
    let shift = t * c_rho;
    let width = t * s_rho;
    let width_sq = width * width;
    let expo = rho - mu;
    // numerator r^rho sin(pi mu) + t sin(pi (mu - rho)), regrouped around the
    // near-zero of the denominator so neither loses digits close to the pole
    let kernel = move |r: f64| -> f64 {
        let dev = r.powf(rho) + shift;
        let num = s_mu * dev - c_mu * width;
        (-r).exp() * num / (dev * dev + width_sq)
    };

    // Near-pole of the denominator when cos(pi rho) < 0.
    let mut breaks_r = Vec::new();
    if c_rho < 0.0 {
        let r0 = (-shift).powf(1.0 / rho);
        let w = (t * s_rho).abs() / (rho * r0.powf(rho - 1.0));
        breaks_r.push(r0);
        let mut d = w;
        while d < CUT_LENGTH {
            breaks_r.push(r0 - d);
            breaks_r.push(r0 + d);
            d *= 4.0;
        }
    }

    let tol = Tolerance { abs: QUAD_ABS, rel: QUAD_REL, max_panels: 4000 };
    let integral = if expo < 0.0 {
        // r = u^{1/q}: r^{rho-mu} dr = du / q with q = 1 + rho - mu in [1/2, 1)
        let q = 1.0 + expo;
        let inv_q = 1.0 / q;
        let f = |u: f64| kernel(u.powf(inv_q)) * inv_q;
        let breaks: Vec<f64> = breaks_r.iter().filter(|&&r| r > 0.0).map(|&r| r.powf(q)).collect();
        integrate_with_breaks(f, 0.0, CUT_LENGTH.powf(q), &breaks, tol)
    } else {
        let f = |r: f64| r.powf(expo) * kernel(r);
        integrate_with_breaks(f, 0.0, CUT_LENGTH, &breaks_r, tol)
    };
    let integral = integral.map_err(|e| {
        log::debug!("cut integral failed: {e}");
        non_convergence(orig, f64::INFINITY)
    })?;
    if integral.error > ACCEPT {
        return Err(non_convergence(orig, integral.error));
    }
    let mut value = integral.value / PI;

    if rho > 1.0 {
        let root = t.powf(1.0 / rho);
        let (c, s) = (cos_pi(1.0 / rho), sin_pi(1.0 / rho));
        let amplitude = t.powf((1.0 - mu) / rho) * (root * c).exp();
        let phase = root * s + PI * (1.0 - mu) / rho;
        value += 2.0 / rho * amplitude * phase.cos();
    }
    Ok(value)
}

/// `E_{1,mu}(-t)` for `mu <= 1`. At `rho = 1` the pole of the cut integrand
/// sits on the cut at `r = t`; the limit is a principal value plus the
/// pole term:
/// `E = (sin(pi mu) / pi) PV \int_0^\infty e^{-r} r^{1-mu} / (r - t) dr - cos(pi mu) t^{1-mu} e^{-t}`.
fn unit_order_cut(mu: f64, t: f64, orig: &MlParams) -> Result<f64, SpecialError> {
    let expo = 1.0 - mu;
    let s_mu = sin_pi(mu);
    let pole = -cos_pi(mu) * t.powf(expo) * (-t).exp();
    if s_mu == 0.0 {
        return Ok(pole);
    }
    let g = |r: f64| (-r).exp() * r.powf(expo);
    let g_t = g(t);
    let tol = Tolerance { abs: QUAD_ABS, rel: QUAD_REL, max_panels: 4000 };
    // PV over [0, 2t] by subtracting g(t); the odd kernel integrates to zero there
    let breaks = [t, 0.5 * t, 1.5 * t, 1.0, 4.0, 16.0, 64.0];
    let inner = integrate_with_breaks(|r: f64| (g(r) - g_t) / (r - t), 0.0, 2.0 * t, &breaks, tol);
    let outer_end = (2.0 * t).max(CUT_LENGTH + 2.0 * t);
    let outer = integrate_with_breaks(|r: f64| g(r) / (r - t), 2.0 * t, outer_end, &[], tol);
    let (inner, outer) = match (inner, outer) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return Err(non_convergence(orig, f64::INFINITY)),
    };
    let err = (inner.error + outer.error) * s_mu.abs() / PI;
    if err > ACCEPT {
        return Err(non_convergence(orig, err));
    }
    Ok(s_mu / PI * (inner.value + outer.value) + pole)
}

fn non_convergence(p: &MlParams, estimate: f64) -> SpecialError {
    SpecialError::NonConvergence { rho: p.rho, mu: p.mu, x: p.x, estimate }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (diff {:e})", (a - b).abs());
    }

    #[test]
    fn spot_values() {
        close(ml(1.0, 1.0, -1.0).unwrap(), 0.367_879_441_171_442_33, 1e-15);
        close(ml(2.0, 1.0, -(PI / 2.0).powi(2)).unwrap(), 0.0, 1e-14);
        close(ml(2.0, 2.0, -PI * PI).unwrap(), 0.0, 1e-14);
        close(ml(1.0, 2.0, -1.0).unwrap(), 0.632_120_558_828_557_7, 1e-15);
    }

    #[test]
    fn value_at_zero() {
        close(ml(0.7, 1.0, 0.0).unwrap(), 1.0, 0.0);
        close(ml(1.5, 2.0, 0.0).unwrap(), 1.0, 0.0);
        close(ml(1.5, 0.5, 0.0).unwrap(), 1.0 / 1.772_453_850_905_516, 1e-15);
        close(ml(1.3, 0.0, 0.0).unwrap(), 0.0, 0.0);
    }

    #[test]
    fn exponential_across_regimes() {
        for &t in &[0.5, 3.9, 4.1, 10.0, 30.0, 200.0, 1e4] {
            close(ml(1.0, 1.0, -t).unwrap(), (-t as f64).exp(), 1e-14);
            close(ml(1.0, 2.0, -t).unwrap(), (1.0 - (-t as f64).exp()) / t, 1e-14);
        }
    }

    #[test]
    fn cosine_and_sinc() {
        for &z in &[0.3, 2.0, 4.5, 7.0, 20.0, 49.0] {
            close(ml(2.0, 1.0, -z * z).unwrap(), (z as f64).cos(), 1e-12);
            close(ml(2.0, 2.0, -z * z).unwrap(), (z as f64).sin() / z, 1e-12);
        }
    }

    #[test]
    fn smooth_through_unit_order() {
        // one-sided difference quotients in rho agree across scales
        for &t in &[5.0, 20.0, 100.0] {
            let at_one = ml(1.0, 1.0, -t).unwrap();
            let slope = |eps: f64| (ml(1.0 + eps, 1.0, -t).unwrap() - at_one) / eps;
            let reference = slope(1e-5);
            for eps in [1e-6, 1e-7, -1e-6, -1e-5] {
                assert!((slope(eps) - reference).abs() < 1e-3 * (1.0 + reference.abs()), "t = {t}, eps = {eps}");
            }
        }
    }

    #[test]
    fn regime_switch_is_continuous() {
        for &(rho, mu) in &[(0.3, 1.0), (0.7, 0.5), (1.4, 2.0), (1.9, 1.3)] {
            let edge = TAYLOR_LIMIT.powf(rho);
            let below = ml(rho, mu, -edge * (1.0 - 1e-14)).unwrap();
            let above = ml(rho, mu, -edge * (1.0 + 1e-14)).unwrap();
            close(below, above, 1e-11);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ml(0.0, 1.0, -1.0).is_err());
        assert!(ml(2.5, 1.0, -1.0).is_err());
        assert!(ml(1.0, 1.0, 1.0).is_err());
        assert!(ml(1.0, f64::NAN, -1.0).is_err());
    }

    #[test]
    fn mu_zero_identity() {
        // E_{b,0}(-x) = -x E_{b,b}(-x)
        for &b in &[1.2, 1.5, 1.8] {
            for &x in &[0.5, 3.0, 40.0, 900.0] {
                close(ml(b, 0.0, -x).unwrap(), -x * ml(b, b, -x).unwrap(), 1e-11);
            }
        }
    }
}
