//! Per-mode gluing systems and the series solution.
//!
//! For `t < 0` every Fourier mode solves `D^beta w + lambda w = 0` with the
//! Caputo derivative taken from `t = 0`, for `t > 0` it solves
//! `D^alpha w + lambda w = 0`. Continuity at `t = 0`, the matching condition
//! `lim D^alpha w = w'(-0)` and `w(-T) = phi_k` give the 2x2 system
//!
//! ```text
//! lambda w(-0) + w'(-0)                              = 0
//! E_{beta,1}(-lambda T^beta) w(-0) + T E_{beta,2}(-lambda T^beta) w'(-0) = phi_k
//! ```
//!
//! with determinant `Delta_k(T, beta)`. Its solution is
//! `w(-0) = -phi_k / Delta_k`, `w'(-0) = lambda phi_k / Delta_k`, so on the
//! hyperbolic side `w_k(t) = phi_k Delta_k(|t|, beta) / Delta_k(T, beta)`.

use crate::error::{Error, Result};
use crate::special::{ml, rgamma};
use crate::spectral::{build_basis, EigenBasis, InitialData};

/// Smallest `|Delta_k|` for which the gluing system is solved.
pub const DELTA_FLOOR: f64 = 1e-12;
/// Default half-width of the band around `t = 0` where the tail bound degrades.
pub const DEFAULT_T_MIN: f64 = 1e-3;
/// Default number of `beta` samples in the construction audit.
pub const DEFAULT_AUDIT_POINTS: usize = 33;

/// Admissible box `[alpha1, 1) x [beta1, beta2]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OrderBox {
    pub alpha1: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl OrderBox {
    pub fn new(alpha1: f64, beta1: f64, beta2: f64) -> Result<Self> {
        let b = OrderBox { alpha1, beta1, beta2 };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let OrderBox { alpha1, beta1, beta2 } = *self;
        if 0.0 < alpha1 && alpha1 < 1.0 && 1.0 < beta1 && beta1 <= beta2 && beta2 < 2.0 {
            Ok(())
        } else {
            Err(Error::Invalid(format!(
                "order box needs 0 < alpha1 < 1 < beta1 <= beta2 < 2, got {self:?}"
            )))
        }
    }

    /// `n` equally spaced values of beta from `beta1` to `beta2`.
    pub fn beta_grid(&self, n: usize) -> Vec<f64> {
        linspace(self.beta1, self.beta2, n)
    }

    pub fn contains_alpha(&self, alpha: f64) -> bool {
        (self.alpha1..1.0).contains(&alpha)
    }

    pub fn contains_beta(&self, beta: f64) -> bool {
        (self.beta1..=self.beta2).contains(&beta)
    }
}

impl Default for OrderBox {
    fn default() -> Self {
        OrderBox { alpha1: 0.1, beta1: 1.1, beta2: 1.9 }
    }
}

pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrders {
    pub alpha: f64,
    pub beta: f64,
    pub bounds: OrderBox,
}

impl FractionalOrders {
    pub fn new(alpha: f64, beta: f64, bounds: OrderBox) -> Result<Self> {
        bounds.validate()?;
        if !bounds.contains_alpha(alpha) || !bounds.contains_beta(beta) {
            return Err(Error::Invalid(format!("orders ({alpha}, {beta}) outside the box {bounds:?}")));
        }
        Ok(FractionalOrders { alpha, beta, bounds })
    }
}

/// `delta_0(T) = 1 / (2 T^(beta-1) Gamma(2-beta))`, half the large-`lambda`
/// limit of `Delta_k(T, beta)`.
pub fn delta_floor_estimate(t: f64, beta: f64) -> f64 {
    0.5 * rgamma(2.0 - beta) / t.powf(beta - 1.0)
}

/// `Delta(lambda, T, beta) = lambda T E_{beta,2}(-lambda T^beta) - E_{beta,1}(-lambda T^beta)`.
///
/// Accepts `beta = 2`, where it reduces to `sqrt(lambda) sin(sqrt(lambda) T) - cos(sqrt(lambda) T)`.
pub fn delta_k(lambda: f64, t: f64, beta: f64) -> Result<f64> {
    if !(lambda > 0.0 && t >= 0.0 && beta > 1.0 && beta <= 2.0) {
        return Err(Error::Invalid(format!("delta_k needs lambda > 0, T >= 0, beta in (1, 2]; got ({lambda}, {t}, {beta})")));
    }
    let x = -lambda * t.powf(beta);
    Ok(lambda * t * ml(beta, 2.0, x)? - ml(beta, 1.0, x)?)
}

/// `w(t) = w0 E_{alpha,1}(-lambda t^alpha)` for `t >= 0`; `alpha = 1` is allowed.
pub fn parabolic_mode(w0: f64, lambda: f64, alpha: f64, t: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0 && t >= 0.0) {
        return Err(Error::Invalid(format!("parabolic branch needs alpha in (0, 1], t >= 0; got ({alpha}, {t})")));
    }
    if w0 == 0.0 {
        return Ok(0.0);
    }
    Ok(w0 * ml(alpha, 1.0, -lambda * t.powf(alpha))?)
}

/// `w(-s) = w0 E_{beta,1}(-lambda s^beta) + w1 s E_{beta,2}(-lambda s^beta)` for `s >= 0`.
pub fn hyperbolic_mode(w0: f64, w1: f64, lambda: f64, beta: f64, s: f64) -> Result<f64> {
    if !(beta > 1.0 && beta <= 2.0 && s >= 0.0) {
        return Err(Error::Invalid(format!("hyperbolic branch needs beta in (1, 2], s >= 0; got ({beta}, {s})")));
    }
    if w0 == 0.0 && w1 == 0.0 {
        return Ok(0.0);
    }
    let x = -lambda * s.powf(beta);
    Ok(w0 * ml(beta, 1.0, x)? + w1 * s * ml(beta, 2.0, x)?)
}

/// `max (1 + t) |E_{rho,mu}(-t)|` over a logarithmic sample of `t` in `[0, 1e6]`.
pub fn decay_constant(rho: f64, mu: f64) -> Result<f64> {
    let mut c = rgamma(mu).abs();
    for i in 0..=72 {
        let t = 10f64.powf(-3.0 + i as f64 / 8.0);
        c = c.max((1.0 + t) * ml(rho, mu, -t)?.abs());
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaRow {
    pub beta: f64,
    /// Smallest `Delta_k(T, beta)` over the retained modes.
    pub min_delta: f64,
    /// Mode attaining `min_delta`.
    pub k: usize,
    pub delta0: f64,
}

impl DeltaRow {
    pub fn above_floor(&self) -> bool {
        self.min_delta >= self.delta0
    }
}

/// `Delta_k(T, beta)` over every retained mode and grid value of beta.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaAudit {
    pub t: f64,
    pub rows: Vec<DeltaRow>,
}

impl DeltaAudit {
    pub fn evaluate(eigenvalues: &[f64], t: f64, beta_grid: &[f64]) -> Result<Self> {
        if eigenvalues.is_empty() || beta_grid.is_empty() {
            return Err(Error::Invalid("delta audit needs at least one mode and one beta".into()));
        }
        let mut rows = Vec::with_capacity(beta_grid.len());
        for &beta in beta_grid {
            let mut row = DeltaRow { beta, min_delta: f64::INFINITY, k: 0, delta0: delta_floor_estimate(t, beta) };
            for (i, &lambda) in eigenvalues.iter().enumerate() {
                let d = delta_k(lambda, t, beta)?;
                if d < row.min_delta {
                    row.min_delta = d;
                    row.k = i + 1;
                }
            }
            rows.push(row);
        }
        Ok(DeltaAudit { t, rows })
    }

    pub fn worst(&self) -> DeltaRow {
        *self.rows.iter().min_by(|a, b| a.min_delta.total_cmp(&b.min_delta)).expect("audit has rows")
    }

    /// `Err` naming the worst mode when some `Delta_k <= 0`.
    pub fn require_positive(&self) -> Result<()> {
        let w = self.worst();
        if w.min_delta > 0.0 {
            Ok(())
        } else {
            Err(Error::DeltaNotPositive { k: w.k, t: self.t, beta: w.beta, delta: w.min_delta })
        }
    }

    /// Every row reaches its `delta_0(T)`.
    pub fn above_floor(&self) -> bool {
        self.rows.iter().all(DeltaRow::above_floor)
    }
}

/// Retained mode count and an estimate of the discarded tail.
///
/// The tail uses `|E_{rho,mu}(-t)| <= C / (1 + t)` with `C` calibrated
/// numerically, the smallest `Delta_k(T, beta)` of the probed modes beyond
/// `K`, and their coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTruncation {
    pub modes: usize,
    /// Uniform bound over `t >= -T`; zero for finite expansions.
    pub tail_bound: f64,
    pub t_min: f64,
    /// Calibrated `C`, or `None` when no tail exists.
    pub decay_constant: Option<f64>,
    delta_floor: f64,
    probe: Vec<(f64, f64)>,
    sup_v: f64,
}

impl SeriesTruncation {
    /// Tail estimate at time `t`.
    pub fn bound_at(&self, alpha: f64, beta: f64, t: f64) -> f64 {
        let Some(c) = self.decay_constant else { return 0.0 };
        let scale = c * self.sup_v / self.delta_floor;
        self.probe
            .iter()
            .map(|&(lambda, phi)| {
                let g = if t >= 0.0 {
                    1.0 / (1.0 + lambda * t.powf(alpha))
                } else {
                    let s = -t;
                    (lambda * s + 1.0) / (1.0 + lambda * s.powf(beta))
                };
                phi * g
            })
            .sum::<f64>()
            * scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetupOptions {
    pub audit_points: usize,
    pub t_min: f64,
    /// Modes probed beyond `K` for the tail estimate, as a multiple of `K`.
    pub probe_factor: usize,
}

impl Default for SetupOptions {
    fn default() -> Self {
        SetupOptions { audit_points: DEFAULT_AUDIT_POINTS, t_min: DEFAULT_T_MIN, probe_factor: 2 }
    }
}

/// Basis, data and depth `T` after the `Delta_k > 0` audit over the box.
#[derive(Debug, Clone)]
pub struct ProblemSetup {
    basis: EigenBasis,
    data: InitialData,
    t: f64,
    bounds: OrderBox,
    truncation: SeriesTruncation,
    audit: DeltaAudit,
}

impl ProblemSetup {
    pub fn new(basis: EigenBasis, data: InitialData, t: f64, bounds: OrderBox) -> Result<Self> {
        Self::with_options(basis, data, t, bounds, SetupOptions::default())
    }

    pub fn with_options(
        basis: EigenBasis,
        data: InitialData,
        t: f64,
        bounds: OrderBox,
        options: SetupOptions,
    ) -> Result<Self> {
        bounds.validate()?;
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Invalid(format!("T must be positive, got {t}")));
        }
        if data.coefficients().len() != basis.len() {
            return Err(Error::Invalid("initial data and basis have different mode counts".into()));
        }
        let grid = bounds.beta_grid(options.audit_points.max(2));
        let audit = DeltaAudit::evaluate(&basis.eigenvalues(), t, &grid)?;
        audit.require_positive()?;
        let truncation = truncation(&basis, &data, t, &bounds, &grid, &options)?;
        Ok(ProblemSetup { basis, data, t, bounds, truncation, audit })
    }

    pub fn basis(&self) -> &EigenBasis {
        &self.basis
    }

    pub fn data(&self) -> &InitialData {
        &self.data
    }

    pub fn depth(&self) -> f64 {
        self.t
    }

    pub fn bounds(&self) -> OrderBox {
        self.bounds
    }

    pub fn truncation(&self) -> &SeriesTruncation {
        &self.truncation
    }

    pub fn audit(&self) -> &DeltaAudit {
        &self.audit
    }

    /// `Delta_k(T, beta)` for every retained mode.
    pub fn deltas(&self, beta: f64) -> Result<Vec<f64>> {
        self.basis.eigenvalues().iter().map(|&l| delta_k(l, self.t, beta)).collect()
    }
}

fn truncation(
    basis: &EigenBasis,
    data: &InitialData,
    t: f64,
    bounds: &OrderBox,
    grid: &[f64],
    options: &SetupOptions,
) -> Result<SeriesTruncation> {
    let k = basis.len();
    let sup_v = basis.domain().lengths().iter().map(|l| (2.0 / l).sqrt()).product();
    let mut tr = SeriesTruncation {
        modes: k,
        tail_bound: 0.0,
        t_min: options.t_min,
        decay_constant: None,
        delta_floor: f64::INFINITY,
        probe: vec![],
        sup_v,
    };
    if data.is_finite_expansion() || options.probe_factor < 2 {
        return Ok(tr);
    }
    let larger = build_basis(basis.domain(), k * options.probe_factor)?;
    let coefficients = data.extended_coefficients(&larger)?;
    let probe: Vec<(f64, f64)> = larger.modes()[k..]
        .iter()
        .zip(&coefficients[k..])
        .map(|(m, c)| (m.lambda, c.abs()))
        .filter(|&(_, c)| c > 0.0)
        .collect();
    if probe.is_empty() {
        return Ok(tr);
    }
    let lambdas: Vec<f64> = probe.iter().map(|p| p.0).collect();
    let floor = DeltaAudit::evaluate(&lambdas, t, grid)?.worst().min_delta;
    if floor <= 0.0 {
        log::warn!("a probed mode beyond K has Delta <= 0; tail estimate unavailable");
        tr.tail_bound = f64::INFINITY;
        return Ok(tr);
    }
    let mut c: f64 = 0.0;
    for beta in linspace(bounds.beta1, bounds.beta2, 5) {
        c = c.max(decay_constant(beta, 1.0)?).max(decay_constant(beta, 2.0)?);
    }
    for alpha in linspace(bounds.alpha1, 1.0, 5) {
        c = c.max(decay_constant(alpha, 1.0)?);
    }
    tr.decay_constant = Some(c);
    tr.delta_floor = floor;
    tr.tail_bound = probe.iter().map(|&(l, phi)| phi * (1.0 + l.powf(1.0 / bounds.beta1))).sum::<f64>() * c * sup_v
        / floor;
    tr.probe = probe;
    Ok(tr)
}

/// Gluing data of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState {
    pub k: usize,
    pub lambda: f64,
    pub phi: f64,
    pub delta_k: f64,
    pub w_minus0: f64,
    pub w_prime_minus0: f64,
    pub w_plus0: f64,
}

impl ModeState {
    /// Solves the gluing system for one mode.
    pub fn solve(k: usize, lambda: f64, phi: f64, t: f64, beta: f64) -> Result<Self> {
        let delta = delta_k(lambda, t, beta)?;
        if !(delta.abs() >= DELTA_FLOOR) {
            return Err(Error::SingularSystem { k, delta, floor: DELTA_FLOOR });
        }
        let q = phi / delta;
        let w = -q;
        Ok(ModeState { k, lambda, phi, delta_k: delta, w_minus0: w, w_prime_minus0: lambda * q, w_plus0: w })
    }

    /// Residuals of both rows of the gluing system.
    pub fn residuals(&self, t: f64, beta: f64) -> Result<(f64, f64)> {
        let x = -self.lambda * t.powf(beta);
        let row1 = self.lambda * self.w_minus0 + self.w_prime_minus0;
        let row2 = ml(beta, 1.0, x)? * self.w_minus0 + t * ml(beta, 2.0, x)? * self.w_prime_minus0 - self.phi;
        Ok((row1, row2))
    }
}

/// Solves the gluing system for every retained mode.
pub fn solve_gluing(setup: &ProblemSetup, orders: &FractionalOrders) -> Result<Vec<ModeState>> {
    let basis = setup.basis();
    basis
        .modes()
        .iter()
        .zip(setup.data().coefficients())
        .enumerate()
        .map(|(i, (m, &phi))| ModeState::solve(i + 1, m.lambda, phi, setup.depth(), orders.beta))
        .collect()
}

/// `w_k(t)` for `t >= -T`, continuous at `t = 0`.
pub fn mode_trajectory(m: &ModeState, orders: &FractionalOrders, t: f64) -> Result<f64> {
    if t >= 0.0 {
        parabolic_mode(m.w_plus0, m.lambda, orders.alpha, t)
    } else {
        hyperbolic_mode(m.w_minus0, m.w_prime_minus0, m.lambda, orders.beta, -t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionValue {
    pub value: f64,
    pub tail_bound: f64,
    /// `|t| < t_min`, where the tail estimate is unreliable.
    pub near_gluing_line: bool,
}

/// A setup together with solved gluing data for one pair of orders.
#[derive(Debug, Clone)]
pub struct ForwardSolution<'a> {
    setup: &'a ProblemSetup,
    orders: FractionalOrders,
    modes: Vec<ModeState>,
}

impl<'a> ForwardSolution<'a> {
    pub fn new(setup: &'a ProblemSetup, orders: FractionalOrders) -> Result<Self> {
        let modes = solve_gluing(setup, &orders)?;
        Ok(ForwardSolution { setup, orders, modes })
    }

    pub fn setup(&self) -> &ProblemSetup {
        self.setup
    }

    pub fn orders(&self) -> FractionalOrders {
        self.orders
    }

    pub fn modes(&self) -> &[ModeState] {
        &self.modes
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if t >= -self.setup.depth() && t.is_finite() {
            Ok(())
        } else {
            Err(Error::Invalid(format!("time {t} outside [-T, inf)")))
        }
    }

    /// `w_k(t)` for every retained mode.
    pub fn modal_values(&self, t: f64) -> Result<Vec<f64>> {
        self.check_time(t)?;
        self.modes.iter().map(|m| mode_trajectory(m, &self.orders, t)).collect()
    }

    /// `u(x, t)` from precomputed `modal_values(t)`.
    pub fn synthesize(&self, modal: &[f64], x: &[f64]) -> f64 {
        if self.setup.basis().domain().on_boundary(x) {
            return 0.0;
        }
        self.setup.basis().synthesize(modal, x)
    }

    pub fn evaluate(&self, x: &[f64], t: f64) -> Result<SolutionValue> {
        if !self.setup.basis().domain().contains(x) {
            return Err(Error::Invalid(format!("point {x:?} outside the domain")));
        }
        let modal = self.modal_values(t)?;
        let tr = self.setup.truncation();
        Ok(SolutionValue {
            value: self.synthesize(&modal, x),
            tail_bound: tr.bound_at(self.orders.alpha, self.orders.beta, t),
            near_gluing_line: t.abs() < tr.t_min,
        })
    }
}

/// `u(x, t)` with its tail estimate.
pub fn evaluate_solution(setup: &ProblemSetup, orders: &FractionalOrders, x: &[f64], t: f64) -> Result<SolutionValue> {
    ForwardSolution::new(setup, *orders)?.evaluate(x, t)
}

/// `W = sum_k E_{alpha,1}(-lambda_k t1^alpha)^2 (phi_k / Delta_k)^2`, the squared
/// L2 norm of `u(., t1)`. `alpha = 1` is allowed.
pub fn norm_w(setup: &ProblemSetup, alpha: f64, beta: f64, t1: f64) -> Result<f64> {
    norm_w_with(setup, alpha, &setup.deltas(beta)?, t1)
}

pub(crate) fn norm_w_with(setup: &ProblemSetup, alpha: f64, deltas: &[f64], t1: f64) -> Result<f64> {
    if !(t1 > 0.0) {
        return Err(Error::Invalid(format!("t1 must be positive, got {t1}")));
    }
    let mut sum = 0.0;
    for ((m, &phi), &delta) in setup.basis().modes().iter().zip(setup.data().coefficients()).zip(deltas) {
        if phi != 0.0 {
            sum += parabolic_mode(phi / delta, m.lambda, alpha, t1)?.powi(2);
        }
    }
    Ok(sum)
}

pub fn norm_functional_w(setup: &ProblemSetup, orders: &FractionalOrders, t1: f64) -> Result<f64> {
    norm_w(setup, orders.alpha, orders.beta, t1)
}

/// `P(beta) = Delta_{k0}(t2, beta) / Delta_{k0}(T, beta)`; `P(beta) phi_{k0}`
/// is the Fourier coefficient of `u(., -t2)` on `v_{k0}`.
pub fn ratio_p(setup: &ProblemSetup, beta: f64, t2: f64, k0: usize) -> Result<f64> {
    if k0 == 0 || k0 > setup.basis().len() {
        return Err(Error::Invalid(format!("mode index {k0} outside 1..={}", setup.basis().len())));
    }
    if !(t2 > 0.0 && t2 <= setup.depth()) {
        return Err(Error::Invalid(format!("t2 = {t2} must lie in (0, T]")));
    }
    let lambda = setup.basis().eigenvalue(k0);
    let den = delta_k(lambda, setup.depth(), beta)?;
    if !(den.abs() >= DELTA_FLOOR) {
        return Err(Error::SingularSystem { k: k0, delta: den, floor: DELTA_FLOOR });
    }
    if t2 == setup.depth() {
        return Ok(1.0);
    }
    Ok(delta_k(lambda, t2, beta)? / den)
}

/// Squared L2 norm of `u(., -t2)`, which depends on beta only.
pub fn hyperbolic_norm(setup: &ProblemSetup, beta: f64, t2: f64) -> Result<f64> {
    if !(t2 > 0.0 && t2 <= setup.depth()) {
        return Err(Error::Invalid(format!("t2 = {t2} must lie in (0, T]")));
    }
    let mut sum = 0.0;
    for (m, &phi) in setup.basis().modes().iter().zip(setup.data().coefficients()) {
        if phi != 0.0 {
            let ratio = delta_k(m.lambda, t2, beta)? / delta_k(m.lambda, setup.depth(), beta)?;
            sum += (phi * ratio).powi(2);
        }
    }
    Ok(sum)
}

/// Fourier coefficient of `u(., t1)` on `v_{k0}`: `-phi_{k0} E_{alpha,1}(-lambda t1^alpha) / Delta_{k0}(T, beta)`.
/// `alpha = 1` is allowed.
pub fn parabolic_coefficient(setup: &ProblemSetup, alpha: f64, beta: f64, t1: f64, k0: usize) -> Result<f64> {
    if k0 == 0 || k0 > setup.basis().len() {
        return Err(Error::Invalid(format!("mode index {k0} outside 1..={}", setup.basis().len())));
    }
    let m = ModeState::solve(k0, setup.basis().eigenvalue(k0), setup.data().coefficient(k0), setup.depth(), beta)?;
    parabolic_mode(m.w_plus0, m.lambda, alpha, t1)
}

/// `V(p, q) = p' q - p q'`; for positive `q` its sign is the sign of `(p / q)'`.
pub fn wronskian_test_v(p: f64, p_prime: f64, q: f64, q_prime: f64) -> f64 {
    p_prime * q - p * q_prime
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{DomainSpec, PhiSpec};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn setup(coefficients: &[f64], t: f64) -> ProblemSetup {
        let basis = build_basis(DomainSpec::Interval { length: PI }, coefficients.len()).unwrap();
        let data = InitialData::from_coefficients(&basis, coefficients).unwrap();
        ProblemSetup::new(basis, data, t, OrderBox { alpha1: 0.1, beta1: 1.1, beta2: 1.8 }).unwrap()
    }

    #[test]
    fn delta_at_beta_two() {
        assert_abs_diff_eq!(delta_k(1.0, PI, 2.0).unwrap(), 1.0, epsilon = 1e-12);
        let (l, t) = (2.3f64, 1.7f64);
        let want = l.sqrt() * (l.sqrt() * t).sin() - (l.sqrt() * t).cos();
        assert_abs_diff_eq!(delta_k(l, t, 2.0).unwrap(), want, epsilon = 1e-12);
    }

    #[test]
    fn small_argument_delta_is_negative() {
        for beta in [1.1, 1.5, 1.9] {
            assert!(delta_k(1.0, 0.1, beta).unwrap() < 0.0);
        }
        let basis = build_basis(DomainSpec::Interval { length: PI }, 1).unwrap();
        let data = InitialData::from_coefficients(&basis, &[1.0]).unwrap();
        let err = ProblemSetup::new(basis, data, 0.1, OrderBox::default()).unwrap_err();
        assert!(matches!(err, Error::DeltaNotPositive { k: 1, .. }));
    }

    #[test]
    fn order_box_validation() {
        assert!(OrderBox::new(0.0, 1.1, 1.9).is_err());
        assert!(OrderBox::new(0.1, 1.5, 1.4).is_err());
        let b = OrderBox::default();
        assert!(FractionalOrders::new(1.0, 1.5, b).is_err());
        assert!(FractionalOrders::new(0.5, 1.95, b).is_err());
        assert!(FractionalOrders::new(0.1, 1.9, b).is_ok());
    }

    #[test]
    fn gluing_rows_hold() {
        let s = setup(&[1.0], 50.0);
        let o = FractionalOrders::new(0.7, 1.5, s.bounds()).unwrap();
        let m = solve_gluing(&s, &o).unwrap()[0];
        let (r1, r2) = m.residuals(50.0, 1.5).unwrap();
        assert_eq!(r1, 0.0);
        assert!(r2.abs() <= 1e-12, "{r2:e}");
        assert_eq!(m.w_plus0, m.w_minus0);
        assert_eq!(mode_trajectory(&m, &o, 0.0).unwrap(), mode_trajectory(&m, &o, -0.0).unwrap());
        assert_abs_diff_eq!(mode_trajectory(&m, &o, -50.0).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_coefficient_gives_zero_mode() {
        let m = ModeState::solve(1, 4.0, 0.0, 50.0, 1.4).unwrap();
        assert_eq!((m.w_minus0, m.w_prime_minus0, m.w_plus0), (0.0, 0.0, 0.0));
    }

    #[test]
    fn alpha_one_branch_is_exponential() {
        let v = parabolic_mode(0.3, 2.0, 1.0, 1.5).unwrap();
        assert_abs_diff_eq!(v, 0.3 * (-3.0f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn ratio_p_edge_cases() {
        let s = setup(&[1.0, 0.5], 50.0);
        assert_eq!(ratio_p(&s, 1.4, 50.0, 1).unwrap(), 1.0);
        assert!(ratio_p(&s, 1.4, 60.0, 1).is_err());
        assert!(ratio_p(&s, 1.4, 25.0, 3).is_err());
    }

    #[test]
    fn wronskian_antisymmetry() {
        assert_eq!(wronskian_test_v(1.3, 0.2, 1.3, 0.2), 0.0);
        assert_eq!(wronskian_test_v(1.0, 2.0, 3.0, 4.0), -wronskian_test_v(3.0, 4.0, 1.0, 2.0));
    }

    #[test]
    fn parabola_setup_has_tail() {
        let basis = build_basis(DomainSpec::Interval { length: 1.0 }, 8).unwrap();
        let data = InitialData::from_spec(&basis, &PhiSpec::Parabola { scale: 1.0 }).unwrap();
        let s = ProblemSetup::new(basis, data, 50.0, OrderBox::default()).unwrap();
        let tr = s.truncation();
        assert!(tr.decay_constant.unwrap() >= 1.0);
        assert!(tr.tail_bound > 0.0 && tr.tail_bound.is_finite());
        assert!(tr.bound_at(0.5, 1.5, 10.0) < tr.bound_at(0.5, 1.5, 0.01));
    }
}
