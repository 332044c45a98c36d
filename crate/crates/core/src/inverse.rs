//! Two-stage recovery of `(alpha, beta)`.
//!
//! Stage one finds beta from an observation on the hyperbolic side, which
//! does not depend on alpha: the Fourier coefficient `d2 = P(beta) phi_{k0}`
//! at `-t2`, or in swapped mode the squared norm of `u(., -t2)`. Stage two
//! finds alpha from an observation at `t1` with beta fixed: the squared norm
//! `d1 = W(alpha, beta)`, or in swapped mode the Fourier coefficient on
//! `v_{k0}`. Each stage checks that the target lies in the range of its
//! functional over the box, audits monotonicity on a grid and then runs a
//! safeguarded bisection.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{
    delta_k, hyperbolic_norm, linspace, norm_w_with, parabolic_coefficient, ratio_p, wronskian_test_v, ProblemSetup,
};
use crate::spectral::InitialData;

/// Coefficients at or below this magnitude are treated as zero when picking `k0`.
pub const K0_THRESHOLD: f64 = 1e-8;
pub const MIN_AUDIT_POINTS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservationMode {
    /// `d1` is the squared norm at `t1`, `d2` the coefficient on `v_{k0}` at `-t2`.
    #[default]
    Standard,
    /// `d1` is the coefficient on `v_{k0}` at `t1`, `d2` the squared norm at `-t2`.
    Swapped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservationPair {
    pub t1: f64,
    pub d1: f64,
    pub t2: f64,
    pub k0: usize,
    pub d2: f64,
    #[serde(default)]
    pub mode: ObservationMode,
}

impl ObservationPair {
    pub fn validate(&self, setup: &ProblemSetup) -> Result<()> {
        if !(self.t1 > 0.0 && self.t1.is_finite()) {
            return Err(Error::Invalid(format!("t1 = {} must be positive", self.t1)));
        }
        if !(self.t2 > 0.0 && self.t2 < setup.depth()) {
            return Err(Error::Invalid(format!("t2 = {} must lie in (0, T = {})", self.t2, setup.depth())));
        }
        if self.k0 == 0 || self.k0 > setup.basis().len() {
            return Err(Error::Invalid(format!("k0 = {} outside 1..={}", self.k0, setup.basis().len())));
        }
        if setup.data().coefficient(self.k0).abs() <= K0_THRESHOLD {
            return Err(Error::Invalid(format!("phi_{} vanishes; choose another k0", self.k0)));
        }
        if !(self.d1.is_finite() && self.d2.is_finite()) {
            return Err(Error::Invalid("non-finite observation".into()));
        }
        Ok(())
    }
}

/// Smallest `k` with `|phi_k| > 1e-8`.
pub fn default_k0(data: &InitialData) -> Option<usize> {
    data.coefficients().iter().position(|c| c.abs() > K0_THRESHOLD).map(|i| i + 1)
}

/// Synthesizes the observations a given pair of orders would produce.
pub fn observe(
    setup: &ProblemSetup,
    alpha: f64,
    beta: f64,
    t1: f64,
    t2: f64,
    k0: usize,
    mode: ObservationMode,
) -> Result<ObservationPair> {
    let (d1, d2) = match mode {
        ObservationMode::Standard => (
            crate::forward::norm_w(setup, alpha, beta, t1)?,
            ratio_p(setup, beta, t2, k0)? * setup.data().coefficient(k0),
        ),
        ObservationMode::Swapped => {
            (parabolic_coefficient(setup, alpha, beta, t1, k0)?, hyperbolic_norm(setup, beta, t2)?)
        }
    };
    let obs = ObservationPair { t1, d1, t2, k0, d2, mode };
    obs.validate(setup)?;
    Ok(obs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Beta,
    Alpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// The target is below the admissible range.
    Below,
    /// The target is above the admissible range.
    Above,
}

/// The target of one stage lies outside the range of its functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub stage: Stage,
    pub side: Side,
    pub target: f64,
    pub lower: f64,
    pub upper: f64,
    pub lower_inclusive: bool,
    pub upper_inclusive: bool,
}

impl Violation {
    /// Stable machine-readable code, e.g. `beta-above`.
    pub fn code(&self) -> &'static str {
        match (self.stage, self.side) {
            (Stage::Beta, Side::Below) => "beta-below",
            (Stage::Beta, Side::Above) => "beta-above",
            (Stage::Alpha, Side::Below) => "alpha-below",
            (Stage::Alpha, Side::Above) => "alpha-above",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] target {:e} outside {}{:e}, {:e}{}",
            self.code(),
            self.target,
            if self.lower_inclusive { '[' } else { '(' },
            self.lower,
            self.upper,
            if self.upper_inclusive { ']' } else { ')' },
        )
    }
}

impl std::error::Error for Violation {}

/// Functional values at both ends of a stage's parameter interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub stage: Stage,
    pub param_lo: f64,
    pub param_hi: f64,
    pub value_lo: f64,
    pub value_hi: f64,
    pub target: f64,
    /// `param_hi` is excluded from the admissible set.
    pub hi_open: bool,
}

impl Bracket {
    fn check(self) -> Result<Self, Violation> {
        let increasing = self.value_hi >= self.value_lo;
        let (lower, upper) = if increasing { (self.value_lo, self.value_hi) } else { (self.value_hi, self.value_lo) };
        let (lower_inclusive, upper_inclusive) =
            if increasing { (true, !self.hi_open) } else { (!self.hi_open, true) };
        let below = if lower_inclusive { self.target < lower } else { self.target <= lower };
        let above = if upper_inclusive { self.target > upper } else { self.target >= upper };
        let side = match (below, above, self.target.is_nan()) {
            (_, _, true) => Side::Below,
            (true, _, _) => Side::Below,
            (_, true, _) => Side::Above,
            _ => return Ok(self),
        };
        Err(Violation { stage: self.stage, side, target: self.target, lower, upper, lower_inclusive, upper_inclusive })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Result of sampling a scalar function on a sorted grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub points: usize,
    /// `Some` when every consecutive difference has the same strict sign.
    pub direction: Option<Direction>,
    /// First interval whose difference breaks the majority direction (or is zero).
    pub offending: Option<(f64, f64)>,
    /// Smallest `|f(x_{i+1}) - f(x_i)| / (x_{i+1} - x_i)`.
    pub min_abs_slope: f64,
    /// Grid points where the Wronskian sign disagrees with the direction, when checked.
    pub wronskian_disagreements: Option<usize>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.direction.is_some() && self.wronskian_disagreements.unwrap_or(0) == 0
    }
}

/// Checks strict monotonicity of `f` on `grid` (sorted, at least 32 points).
pub fn monotonicity_audit<F: FnMut(f64) -> Result<f64>>(mut f: F, grid: &[f64]) -> Result<MonotonicityReport> {
    if grid.len() < MIN_AUDIT_POINTS {
        return Err(Error::Invalid(format!("audit grid needs at least {MIN_AUDIT_POINTS} points")));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Invalid("audit grid must be strictly increasing".into()));
    }
    let values = grid.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    Ok(classify(grid, &values))
}

fn classify(grid: &[f64], values: &[f64]) -> MonotonicityReport {
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let up = diffs.iter().filter(|&&d| d > 0.0).count();
    let down = diffs.iter().filter(|&&d| d < 0.0).count();
    let majority_up = up >= down;
    let bad = diffs.iter().position(|&d| if majority_up { !(d > 0.0) } else { !(d < 0.0) });
    let direction = match bad {
        None if majority_up => Some(Direction::Increasing),
        None => Some(Direction::Decreasing),
        Some(_) => None,
    };
    let min_abs_slope = diffs
        .iter()
        .zip(grid.windows(2))
        .map(|(d, w)| (d / (w[1] - w[0])).abs())
        .fold(f64::INFINITY, f64::min);
    MonotonicityReport {
        points: grid.len(),
        direction,
        offending: bad.map(|i| (grid[i], grid[i + 1])),
        min_abs_slope,
        wronskian_disagreements: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryOptions {
    pub audit_points: usize,
    /// Bracket width at which bisection stops.
    pub tolerance: f64,
    /// Residual accepted as success, relative to `max(1, |target|)`.
    pub residual_tolerance: f64,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        RecoveryOptions { audit_points: 64, tolerance: 1e-12, residual_tolerance: 1e-9 }
    }
}

/// Finite-difference slopes at the recovered orders, for error propagation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sensitivity {
    /// Slope of the beta-stage functional at `beta_hat`.
    pub beta_slope: f64,
    /// Slope of the alpha-stage functional at `alpha_hat`.
    pub alpha_slope: f64,
    /// Bound on `|d beta / d target|` from the smallest slope on the audit grid.
    pub beta_shift_per_unit: f64,
    pub alpha_shift_per_unit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageResult {
    pub value: f64,
    pub residual: f64,
    pub bracket: Bracket,
    pub audit: MonotonicityReport,
    pub slope: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub beta_hat: f64,
    pub alpha_hat: f64,
    /// `(|beta-stage residual|, |alpha-stage residual|)`.
    pub residuals: (f64, f64),
    pub mode: ObservationMode,
    pub k0: usize,
    pub beta_stage: StageResult,
    pub alpha_stage: StageResult,
    pub sensitivity: Sensitivity,
    pub residuals_within_tolerance: bool,
}

fn beta_functional<'a>(setup: &'a ProblemSetup, obs: &ObservationPair) -> impl Fn(f64) -> Result<f64> + 'a {
    let (t2, k0, mode) = (obs.t2, obs.k0, obs.mode);
    move |beta| match mode {
        ObservationMode::Standard => ratio_p(setup, beta, t2, k0),
        ObservationMode::Swapped => hyperbolic_norm(setup, beta, t2),
    }
}

fn beta_target(setup: &ProblemSetup, obs: &ObservationPair) -> f64 {
    match obs.mode {
        ObservationMode::Standard => obs.d2 / setup.data().coefficient(obs.k0),
        ObservationMode::Swapped => obs.d2,
    }
}

/// Confirms `target` lies in the range of the beta functional over `[beta1, beta2]`.
pub fn check_beta_solvability(setup: &ProblemSetup, obs: &ObservationPair) -> Result<Bracket> {
    obs.validate(setup)?;
    let f = beta_functional(setup, obs);
    let b = setup.bounds();
    let bracket = Bracket {
        stage: Stage::Beta,
        param_lo: b.beta1,
        param_hi: b.beta2,
        value_lo: f(b.beta1)?,
        value_hi: f(b.beta2)?,
        target: beta_target(setup, obs),
        hi_open: false,
    };
    Ok(bracket.check()?)
}

fn beta_audit(setup: &ProblemSetup, obs: &ObservationPair, points: usize) -> Result<MonotonicityReport> {
    let b = setup.bounds();
    let grid = linspace(b.beta1, b.beta2, points.max(MIN_AUDIT_POINTS));
    let mut report = monotonicity_audit(beta_functional(setup, obs), &grid)?;
    if obs.mode == ObservationMode::Standard && report.direction.is_some() {
        let lambda = setup.basis().eigenvalue(obs.k0);
        let (t, t2) = (setup.depth(), obs.t2);
        let want = if report.direction == Some(Direction::Increasing) { 1.0 } else { -1.0 };
        let h = 1e-6 * (b.beta2 - b.beta1);
        let mut disagreements = 0;
        for &beta in &grid[1..grid.len() - 1] {
            let p = delta_k(lambda, t2, beta)?;
            let q = delta_k(lambda, t, beta)?;
            let dp = (delta_k(lambda, t2, beta + h)? - delta_k(lambda, t2, beta - h)?) / (2.0 * h);
            let dq = (delta_k(lambda, t, beta + h)? - delta_k(lambda, t, beta - h)?) / (2.0 * h);
            if wronskian_test_v(p, dp, q, dq) * want <= 0.0 {
                disagreements += 1;
            }
        }
        report.wronskian_disagreements = Some(disagreements);
    }
    Ok(report)
}

/// Solves the beta-stage equation after the solvability and monotonicity checks.
pub fn recover_beta(setup: &ProblemSetup, obs: &ObservationPair) -> Result<f64> {
    Ok(beta_stage(setup, obs, &RecoveryOptions::default())?.value)
}

fn beta_stage(setup: &ProblemSetup, obs: &ObservationPair, opts: &RecoveryOptions) -> Result<StageResult> {
    let bracket = check_beta_solvability(setup, obs)?;
    let audit = beta_audit(setup, obs, opts.audit_points)?;
    if !audit.passed() {
        return Err(not_monotone("beta functional", &audit));
    }
    let f = beta_functional(setup, obs);
    run_stage(&f, bracket, audit, opts)
}

fn alpha_functional<'a>(
    setup: &'a ProblemSetup,
    obs: &ObservationPair,
    beta: f64,
) -> Result<impl Fn(f64) -> Result<f64> + 'a> {
    let deltas = setup.deltas(beta)?;
    let (t1, k0, mode) = (obs.t1, obs.k0, obs.mode);
    Ok(move |alpha| match mode {
        ObservationMode::Standard => norm_w_with(setup, alpha, &deltas, t1),
        ObservationMode::Swapped => parabolic_coefficient(setup, alpha, beta, t1, k0),
    })
}

/// Confirms `d1` lies in the range of the alpha functional over `[alpha1, 1)`;
/// the endpoint `alpha = 1` is evaluated as a limit and excluded.
pub fn check_alpha_solvability(setup: &ProblemSetup, obs: &ObservationPair, beta_star: f64) -> Result<Bracket> {
    obs.validate(setup)?;
    check_beta_in_box(setup, beta_star)?;
    let f = alpha_functional(setup, obs, beta_star)?;
    let a1 = setup.bounds().alpha1;
    let bracket = Bracket {
        stage: Stage::Alpha,
        param_lo: a1,
        param_hi: 1.0,
        value_lo: f(a1)?,
        value_hi: f(1.0)?,
        target: obs.d1,
        hi_open: true,
    };
    Ok(bracket.check()?)
}

fn check_beta_in_box(setup: &ProblemSetup, beta: f64) -> Result<()> {
    if setup.bounds().contains_beta(beta) {
        Ok(())
    } else {
        Err(Error::Invalid(format!("beta = {beta} outside the box")))
    }
}

fn alpha_audit(setup: &ProblemSetup, obs: &ObservationPair, beta: f64, points: usize) -> Result<MonotonicityReport> {
    let grid = linspace(setup.bounds().alpha1, 1.0, points.max(MIN_AUDIT_POINTS));
    monotonicity_audit(alpha_functional(setup, obs, beta)?, &grid)
}

/// Solves the alpha-stage equation with beta fixed.
pub fn recover_alpha(setup: &ProblemSetup, obs: &ObservationPair, beta_star: f64) -> Result<f64> {
    Ok(alpha_stage(setup, obs, beta_star, &RecoveryOptions::default())?.value)
}

fn alpha_stage(setup: &ProblemSetup, obs: &ObservationPair, beta: f64, opts: &RecoveryOptions) -> Result<StageResult> {
    let bracket = check_alpha_solvability(setup, obs, beta)?;
    let audit = alpha_audit(setup, obs, beta, opts.audit_points)?;
    if !audit.passed() {
        return Err(not_monotone("alpha functional", &audit));
    }
    let f = alpha_functional(setup, obs, beta)?;
    run_stage(&f, bracket, audit, opts)
}

fn not_monotone(what: &str, audit: &MonotonicityReport) -> Error {
    let detail = match (audit.offending, audit.wronskian_disagreements) {
        (Some((a, b)), _) => format!("not strictly monotone on [{a}, {b}]"),
        (None, Some(n)) => format!("Wronskian sign disagrees with the grid direction at {n} points"),
        (None, None) => "no strict direction".to_string(),
    };
    Error::NotMonotone { what: what.to_string(), detail }
}

fn run_stage<F: Fn(f64) -> Result<f64>>(
    f: &F,
    bracket: Bracket,
    audit: MonotonicityReport,
    opts: &RecoveryOptions,
) -> Result<StageResult> {
    let increasing = audit.direction == Some(Direction::Increasing);
    let (value, iterations) = solve_monotone(f, &bracket, increasing, opts.tolerance)?;
    let residual = (f(value)? - bracket.target).abs();
    let h = 1e-6 * (bracket.param_hi - bracket.param_lo);
    let (a, b) = ((value - h).max(bracket.param_lo), (value + h).min(bracket.param_hi - if bracket.hi_open { h } else { 0.0 }));
    let slope = if b > a { (f(b)? - f(a)?) / (b - a) } else { f64::NAN };
    Ok(StageResult { value, residual, bracket, audit, slope, iterations })
}

/// Bisection on a monotone function, with secant steps kept only when they
/// land strictly inside the current bracket.
fn solve_monotone<F: Fn(f64) -> Result<f64>>(
    f: &F,
    bracket: &Bracket,
    increasing: bool,
    tolerance: f64,
) -> Result<(f64, usize)> {
    let target = bracket.target;
    if bracket.value_lo == target {
        return Ok((bracket.param_lo, 0));
    }
    if !bracket.hi_open && bracket.value_hi == target {
        return Ok((bracket.param_hi, 0));
    }
    let sign = if increasing { 1.0 } else { -1.0 };
    let g = |x: f64| -> Result<f64> { Ok(sign * (f(x)? - target)) };
    let (mut lo, mut hi) = (bracket.param_lo, bracket.param_hi);
    let (mut glo, mut ghi) = (sign * (bracket.value_lo - target), sign * (bracket.value_hi - target));
    let mut iterations = 0;
    let mut bisect = false;
    while hi - lo > tolerance && iterations < 400 {
        iterations += 1;
        let before = hi - lo;
        let mut x = 0.5 * (lo + hi);
        if !bisect && ghi != glo {
            let s = lo - glo * (hi - lo) / (ghi - glo);
            if s > lo && s < hi {
                x = s;
            }
        }
        let gx = g(x)?;
        if gx == 0.0 {
            return Ok((x, iterations));
        }
        if gx < 0.0 {
            lo = x;
            glo = gx;
        } else {
            hi = x;
            ghi = gx;
        }
        bisect = hi - lo > 0.5 * before;
    }
    let x = if glo.abs() <= ghi.abs() { lo } else { hi };
    let x = if bracket.hi_open && x >= bracket.param_hi { lo } else { x };
    Ok((x, iterations))
}

/// Runs both stages, beta first.
pub fn recover(setup: &ProblemSetup, obs: &ObservationPair, opts: &RecoveryOptions) -> Result<RecoveryResult> {
    obs.validate(setup)?;
    let beta_stage = beta_stage(setup, obs, opts)?;
    let alpha_stage = alpha_stage(setup, obs, beta_stage.value, opts)?;
    let scale = |t: f64| t.abs().max(1.0);
    let residuals_within_tolerance = beta_stage.residual <= opts.residual_tolerance * scale(beta_stage.bracket.target)
        && alpha_stage.residual <= opts.residual_tolerance * scale(alpha_stage.bracket.target);
    let sensitivity = Sensitivity {
        beta_slope: beta_stage.slope,
        alpha_slope: alpha_stage.slope,
        beta_shift_per_unit: 1.0 / beta_stage.audit.min_abs_slope,
        alpha_shift_per_unit: 1.0 / alpha_stage.audit.min_abs_slope,
    };
    Ok(RecoveryResult {
        beta_hat: beta_stage.value,
        alpha_hat: alpha_stage.value,
        residuals: (beta_stage.residual, alpha_stage.residual),
        mode: obs.mode,
        k0: obs.k0,
        beta_stage,
        alpha_stage,
        sensitivity,
        residuals_within_tolerance,
    })
}

/// Recovery from swapped observations: the squared norm at `-t2` fixes beta,
/// then the coefficient on `v_{k0}` at `t1` fixes alpha.
pub fn swapped_mode_recovery(setup: &ProblemSetup, obs: &ObservationPair) -> Result<RecoveryResult> {
    if obs.mode != ObservationMode::Swapped {
        return Err(Error::Invalid("observation is not in swapped mode".into()));
    }
    recover(setup, obs, &RecoveryOptions::default())
}
