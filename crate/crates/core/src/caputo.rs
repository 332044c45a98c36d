//! L1 finite-difference approximations of Caputo derivatives, used to check
//! that computed mode trajectories satisfy their fractional ODEs.

use crate::error::{Error, Result};
use crate::forward::{hyperbolic_mode, parabolic_mode, FractionalOrders, ModeState};
use crate::special::rgamma;

/// Richardson error estimate above which a grid is reported as too coarse.
pub const RICHARDSON_TOLERANCE: f64 = 1e-4;

/// Samples of a function on a uniform grid starting at `t0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CaputoGrid {
    pub t0: f64,
    pub t_end: f64,
    pub n_steps: usize,
    pub samples: Vec<f64>,
    /// Exact `f'(t0)`; estimated from the samples when absent.
    pub slope0: Option<f64>,
}

impl CaputoGrid {
    pub fn sample<F: FnMut(f64) -> Result<f64>>(mut f: F, t0: f64, t_end: f64, n_steps: usize) -> Result<Self> {
        if n_steps < 2 || !(t_end > t0) {
            return Err(Error::Invalid(format!("grid needs t_end > t0 and at least 2 steps, got [{t0}, {t_end}] / {n_steps}")));
        }
        let h = (t_end - t0) / n_steps as f64;
        let samples = (0..=n_steps).map(|i| f(t0 + i as f64 * h)).collect::<Result<Vec<_>>>()?;
        Ok(CaputoGrid { t0, t_end, n_steps, samples, slope0: None })
    }

    pub fn with_slope(mut self, slope0: f64) -> Self {
        self.slope0 = Some(slope0);
        self
    }

    pub fn step(&self) -> f64 {
        (self.t_end - self.t0) / self.n_steps as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.step()
    }

    fn validate(&self) -> Result<()> {
        if self.samples.len() != self.n_steps + 1 || self.n_steps < 2 || !(self.step() > 0.0) {
            return Err(Error::Invalid("inconsistent Caputo grid".into()));
        }
        Ok(())
    }

    fn coarsened(&self) -> Option<CaputoGrid> {
        if self.n_steps % 2 != 0 || self.n_steps < 8 {
            return None;
        }
        Some(CaputoGrid {
            t0: self.t0,
            t_end: self.t_end,
            n_steps: self.n_steps / 2,
            samples: self.samples.iter().step_by(2).copied().collect(),
            slope0: self.slope0,
        })
    }
}

/// Derivative values at every node with a Richardson error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct CaputoDerivative {
    pub values: Vec<f64>,
    /// Estimate at even nodes from the half grid; `NaN` elsewhere or when unavailable.
    pub error_estimate: Vec<f64>,
    /// The estimate exceeds [`RICHARDSON_TOLERANCE`] past the first sixteenth of the grid.
    pub too_coarse: bool,
}

fn l1(samples: &[f64], h: f64, order: f64) -> Vec<f64> {
    let n = samples.len() - 1;
    let b: Vec<f64> = (0..n).map(|j| ((j + 1) as f64).powf(1.0 - order) - (j as f64).powf(1.0 - order)).collect();
    let diffs: Vec<f64> = samples.windows(2).map(|w| w[1] - w[0]).collect();
    let scale = h.powf(-order) * rgamma(2.0 - order);
    let mut out = vec![0.0; n + 1];
    for (m, slot) in out.iter_mut().enumerate().skip(1) {
        let mut acc = 0.0;
        for j in 0..m {
            acc += b[j] * diffs[m - 1 - j];
        }
        *slot = scale * acc;
    }
    out
}

fn derivative_samples(g: &CaputoGrid) -> Vec<f64> {
    let f = &g.samples;
    let n = g.n_steps;
    let h = g.step();
    let mut d = vec![0.0; n + 1];
    d[0] = g.slope0.unwrap_or((-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h));
    for i in 1..n {
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    d[n] = (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) / (2.0 * h);
    d
}

fn with_estimate(g: &CaputoGrid, rate: f64, eval: impl Fn(&CaputoGrid) -> Vec<f64>) -> CaputoDerivative {
    let values = eval(g);
    let mut error_estimate = vec![f64::NAN; values.len()];
    if let Some(coarse) = g.coarsened() {
        let c = eval(&coarse);
        let factor = 2f64.powf(rate) - 1.0;
        for (i, v) in c.iter().enumerate() {
            error_estimate[2 * i] = (values[2 * i] - v).abs() / factor;
        }
    }
    let skip = values.len() / 16;
    let worst = error_estimate[skip.max(1)..].iter().filter(|e| !e.is_nan()).fold(0.0, |a: f64, &b| a.max(b));
    let too_coarse = worst > RICHARDSON_TOLERANCE;
    if too_coarse {
        log::warn!("Caputo grid with {} steps looks too coarse: Richardson estimate {worst:e}", g.n_steps);
    }
    CaputoDerivative { values, error_estimate, too_coarse }
}

/// L1 approximation of the Caputo derivative of order `alpha` in `(0, 1)`,
/// consistent of order `2 - alpha` for smooth `f`.
pub fn caputo_alpha(g: &CaputoGrid, alpha: f64) -> Result<CaputoDerivative> {
    g.validate()?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Invalid(format!("alpha = {alpha} outside (0, 1)")));
    }
    Ok(with_estimate(g, 2.0 - alpha, |grid| l1(&grid.samples, grid.step(), alpha)))
}

/// Caputo derivative of order `beta` in `(1, 2)` as the L1 approximation of
/// order `beta - 1` applied to `f'`, consistent of order `3 - beta`.
pub fn caputo_beta(g: &CaputoGrid, beta: f64) -> Result<CaputoDerivative> {
    g.validate()?;
    if !(beta > 1.0 && beta < 2.0) {
        return Err(Error::Invalid(format!("beta = {beta} outside (1, 2)")));
    }
    Ok(with_estimate(g, 3.0 - beta, |grid| l1(&derivative_samples(grid), grid.step(), beta - 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `t > 0`, order alpha.
    Parabolic,
    /// `t < 0`, order beta, run in the reversed variable `s = -t`.
    Hyperbolic,
}

/// Uniform grid on `[0, t_end]` (in `|t|`) and the start of the window on
/// which residuals are measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualGrid {
    pub t_end: f64,
    pub n_steps: usize,
    pub t_min: f64,
}

/// `max |D w_k + lambda w_k|` over the nodes in `[t_min, t_end]`.
pub fn ode_residual(
    m: &ModeState,
    orders: &FractionalOrders,
    lambda: f64,
    branch: Branch,
    grid: &ResidualGrid,
) -> Result<f64> {
    if !(grid.t_min >= 0.0 && grid.t_min < grid.t_end) {
        return Err(Error::Invalid(format!("residual window [{}, {}] is empty", grid.t_min, grid.t_end)));
    }
    let (samples, derivative) = match branch {
        Branch::Parabolic => {
            let g = CaputoGrid::sample(|t| parabolic_mode(m.w_plus0, lambda, orders.alpha, t), 0.0, grid.t_end, grid.n_steps)?;
            let d = caputo_alpha(&g, orders.alpha)?;
            (g.samples, d.values)
        }
        Branch::Hyperbolic => {
            let g = CaputoGrid::sample(
                |s| hyperbolic_mode(m.w_minus0, m.w_prime_minus0, lambda, orders.beta, s),
                0.0,
                grid.t_end,
                grid.n_steps,
            )?
            .with_slope(m.w_prime_minus0);
            let d = caputo_beta(&g, orders.beta)?;
            (g.samples, d.values)
        }
    };
    let h = grid.t_end / grid.n_steps as f64;
    let first = (grid.t_min / h).ceil() as usize;
    let last = grid.n_steps - 1;
    Ok((first.max(1)..=last).map(|i| (derivative[i] + lambda * samples[i]).abs()).fold(0.0, f64::max))
}
