//! Dirichlet eigenpairs of the Laplacian on an interval or a rectangle, and
//! Fourier coefficients of initial data in that basis.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_with_breaks, Tolerance};

/// Absolute accuracy requested from the coefficient quadrature.
pub const COEFFICIENT_TOLERANCE: f64 = 1e-12;
/// Largest boundary value of `phi` accepted as zero.
pub const BOUNDARY_TOLERANCE: f64 = 1e-8;
const BOUNDARY_SAMPLES: usize = 257;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    Interval { length: f64 },
    Rectangle { lx: f64, ly: f64 },
}

impl DomainSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            DomainSpec::Interval { length } => length > 0.0 && length.is_finite(),
            DomainSpec::Rectangle { lx, ly } => lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid(format!("domain lengths must be positive and finite: {self:?}")))
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            DomainSpec::Interval { .. } => 1,
            DomainSpec::Rectangle { .. } => 2,
        }
    }

    pub fn lengths(&self) -> Vec<f64> {
        match *self {
            DomainSpec::Interval { length } => vec![length],
            DomainSpec::Rectangle { lx, ly } => vec![lx, ly],
        }
    }

    /// `true` when `x` has the right dimension and lies in the closed domain.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension() && x.iter().zip(self.lengths()).all(|(&xi, l)| (0.0..=l).contains(&xi))
    }

    pub fn on_boundary(&self, x: &[f64]) -> bool {
        self.contains(x) && x.iter().zip(self.lengths()).any(|(&xi, l)| xi == 0.0 || xi == l)
    }

    /// Sample points spread over the whole boundary.
    pub fn boundary_points(&self, per_side: usize) -> Vec<Vec<f64>> {
        match *self {
            DomainSpec::Interval { length } => vec![vec![0.0], vec![length]],
            DomainSpec::Rectangle { lx, ly } => {
                let n = per_side.max(2);
                let mut pts = Vec::with_capacity(4 * n);
                for i in 0..n {
                    let s = i as f64 / (n - 1) as f64;
                    pts.push(vec![s * lx, 0.0]);
                    pts.push(vec![s * lx, ly]);
                    pts.push(vec![0.0, s * ly]);
                    pts.push(vec![lx, s * ly]);
                }
                pts
            }
        }
    }
}

/// One eigenpair: `lambda` and the sine indices of the eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub lambda: f64,
    pub indices: (usize, usize),
}

/// The `K` smallest Dirichlet eigenpairs, ordered by eigenvalue.
///
/// Rectangle modes with equal eigenvalues are ordered by their index pair.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    domain: DomainSpec,
    modes: Vec<Mode>,
}

pub fn build_basis(domain: DomainSpec, count: usize) -> Result<EigenBasis> {
    domain.validate()?;
    if count == 0 {
        return Err(Error::Invalid("the basis needs at least one mode".into()));
    }
    let modes = match domain {
        DomainSpec::Interval { length } => (1..=count)
            .map(|k| Mode { lambda: (k as f64 * PI / length).powi(2), indices: (k, 0) })
            .collect(),
        DomainSpec::Rectangle { lx, ly } => {
            let mut all = Vec::with_capacity(count * count);
            for i in 1..=count {
                for j in 1..=count {
                    let lambda = (i as f64 * PI / lx).powi(2) + (j as f64 * PI / ly).powi(2);
                    all.push(Mode { lambda, indices: (i, j) });
                }
            }
            all.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then(a.indices.cmp(&b.indices)));
            all.truncate(count);
            all
        }
    };
    Ok(EigenBasis { domain, modes })
}

impl EigenBasis {
    pub fn domain(&self) -> DomainSpec {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// Eigenvalue of the 1-based mode `k`.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        self.modes[k - 1].lambda
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.lambda).collect()
    }

    /// `v_k(x)` for the 1-based mode `k`.
    pub fn eval(&self, k: usize, x: &[f64]) -> f64 {
        let (i, j) = self.modes[k - 1].indices;
        match self.domain {
            DomainSpec::Interval { length } => sine(i, length, x[0]),
            DomainSpec::Rectangle { lx, ly } => sine(i, lx, x[0]) * sine(j, ly, x[1]),
        }
    }

    /// `sum_k c_k v_k(x)` over the first `coefficients.len()` modes.
    pub fn synthesize(&self, coefficients: &[f64], x: &[f64]) -> f64 {
        coefficients.iter().enumerate().filter(|(_, c)| **c != 0.0).map(|(i, c)| c * self.eval(i + 1, x)).sum()
    }

    /// `integral over the domain of f(x) v_k(x) dx`.
    pub fn project<F: Fn(&[f64]) -> f64>(&self, k: usize, f: F) -> Result<f64> {
        let (i, j) = self.modes[k - 1].indices;
        match self.domain {
            DomainSpec::Interval { length } => {
                Ok(integrate_1d(|x| f(&[x]) * sine(i, length, x), length, i, COEFFICIENT_TOLERANCE)?)
            }
            DomainSpec::Rectangle { lx, ly } => {
                let inner_tol = COEFFICIENT_TOLERANCE / (4.0 * lx);
                let failure = std::cell::RefCell::new(None);
                let outer = integrate_1d(
                    |x| {
                        let sx = sine(i, lx, x);
                        if sx == 0.0 {
                            return 0.0;
                        }
                        match integrate_1d(|y| f(&[x, y]) * sine(j, ly, y), ly, j, inner_tol) {
                            Ok(v) => sx * v,
                            Err(e) => {
                                failure.borrow_mut().get_or_insert(e);
                                0.0
                            }
                        }
                    },
                    lx,
                    i,
                    COEFFICIENT_TOLERANCE,
                );
                if let Some(e) = failure.into_inner() {
                    return Err(e);
                }
                outer
            }
        }
    }
}

fn sine(k: usize, length: f64, x: f64) -> f64 {
    (2.0 / length).sqrt() * (k as f64 * PI * x / length).sin()
}

fn integrate_1d<F: Fn(f64) -> f64>(f: F, length: f64, k: usize, abs: f64) -> Result<f64> {
    let panels = k.max(1);
    let breaks: Vec<f64> = (1..panels).map(|p| p as f64 * length / panels as f64).collect();
    let tol = Tolerance { abs, rel: 0.0, max_panels: 4000 + 8 * panels };
    Ok(integrate_with_breaks(f, 0.0, length, &breaks, tol)?.value)
}

/// Built-in initial data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum PhiSpec {
    /// `scale * x (L - x)`, or the product of such factors on a rectangle.
    Parabola {
        #[serde(default = "one")]
        scale: f64,
    },
    /// `amplitude * v_k`.
    Sine {
        k: usize,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `sum_k c_k v_k`.
    Coefficients { values: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

type Profile = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Initial datum `phi` with its Fourier coefficients in a given basis.
#[derive(Clone)]
pub struct InitialData {
    coefficients: Vec<f64>,
    profile: Option<Profile>,
}

impl fmt::Debug for InitialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialData")
            .field("coefficients", &self.coefficients)
            .field("profile", &self.profile.as_ref().map(|_| "fn"))
            .finish()
    }
}

/// Computes `phi_k = integral of phi v_k` for every mode of `basis`.
///
/// Rejects data that vanish identically or do not vanish on the boundary.
pub fn fourier_coefficients<F>(basis: &EigenBasis, phi: F) -> Result<InitialData>
where
    F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
{
    let domain = basis.domain();
    let edge = domain
        .boundary_points(BOUNDARY_SAMPLES)
        .iter()
        .map(|x| phi(x).abs())
        .fold(0.0, f64::max);
    if !edge.is_finite() || edge > BOUNDARY_TOLERANCE {
        return Err(Error::BoundaryIncompatible(edge));
    }
    let coefficients = (1..=basis.len()).map(|k| basis.project(k, &phi)).collect::<Result<Vec<_>>>()?;
    let data = InitialData { coefficients, profile: Some(Arc::new(phi)) };
    data.require_nonzero()?;
    Ok(data)
}

impl InitialData {
    /// Data given directly by eigen-coefficients; missing modes are zero.
    pub fn from_coefficients(basis: &EigenBasis, values: &[f64]) -> Result<Self> {
        if values.len() > basis.len() {
            return Err(Error::Invalid(format!(
                "{} coefficients given for a basis of {} modes",
                values.len(),
                basis.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite coefficient".into()));
        }
        let mut coefficients = values.to_vec();
        coefficients.resize(basis.len(), 0.0);
        let data = InitialData { coefficients, profile: None };
        data.require_nonzero()?;
        Ok(data)
    }

    pub fn from_spec(basis: &EigenBasis, spec: &PhiSpec) -> Result<Self> {
        match spec {
            PhiSpec::Parabola { scale } => {
                let lengths = basis.domain().lengths();
                let scale = *scale;
                fourier_coefficients(basis, move |x| {
                    scale * x.iter().zip(&lengths).map(|(&xi, &l)| xi * (l - xi)).product::<f64>()
                })
            }
            PhiSpec::Sine { k, amplitude } => {
                if *k == 0 || *k > basis.len() {
                    return Err(Error::Invalid(format!("sine mode {k} outside 1..={}", basis.len())));
                }
                let mut values = vec![0.0; *k];
                values[k - 1] = *amplitude;
                Self::from_coefficients(basis, &values)
            }
            PhiSpec::Coefficients { values } => Self::from_coefficients(basis, values),
        }
    }

    fn require_nonzero(&self) -> Result<()> {
        if self.coefficients.iter().all(|c| c.abs() <= f64::MIN_POSITIVE) {
            Err(Error::ZeroInitialData)
        } else {
            Ok(())
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// The 1-based coefficient `phi_k`.
    pub fn coefficient(&self, k: usize) -> f64 {
        self.coefficients[k - 1]
    }

    /// `phi(x)`; for coefficient data this is the finite expansion.
    pub fn value(&self, basis: &EigenBasis, x: &[f64]) -> f64 {
        match &self.profile {
            Some(p) => p(x),
            None => basis.synthesize(&self.coefficients, x),
        }
    }

    /// `true` when the datum is exactly a finite expansion in the basis.
    pub fn is_finite_expansion(&self) -> bool {
        self.profile.is_none()
    }

    /// Coefficients in a larger basis on the same domain, used to estimate
    /// the truncated tail. Coefficient data have no modes beyond their own.
    pub fn extended_coefficients(&self, larger: &EigenBasis) -> Result<Vec<f64>> {
        match &self.profile {
            Some(p) => (1..=larger.len()).map(|k| larger.project(k, |x| p(x))).collect(),
            None => {
                let mut c = self.coefficients.clone();
                c.resize(larger.len(), 0.0);
                Ok(c)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayReport {
    /// `sum_k lambda_k^{2(tau+1)} phi_k^2` over the retained modes.
    pub sum: f64,
    /// The terms in the upper half of the range whose coefficients exceed the
    /// quadrature noise level are not decreasing.
    pub tail_not_decreasing: bool,
}

/// Smoothness diagnostic on the coefficient decay.
pub fn decay_report(data: &InitialData, basis: &EigenBasis, tau: f64) -> Result<DecayReport> {
    let n = basis.domain().dimension() as f64;
    if !(tau > n / 4.0) {
        return Err(Error::Invalid(format!("tau = {tau} must exceed N/4 = {}", n / 4.0)));
    }
    let terms: Vec<f64> = basis
        .modes()
        .iter()
        .zip(data.coefficients())
        .map(|(m, c)| m.lambda.powf(2.0 * (tau + 1.0)) * c * c)
        .collect();
    let sum = terms.iter().sum();
    let half = terms.len() / 2;
    let tail: Vec<f64> = terms[half..]
        .iter()
        .zip(&data.coefficients()[half..])
        .filter(|(_, c)| c.abs() > 10.0 * COEFFICIENT_TOLERANCE)
        .map(|(t, _)| *t)
        .collect();
    let tail_not_decreasing = tail.windows(2).any(|w| w[1] >= w[0]);
    Ok(DecayReport { sum, tail_not_decreasing })
}
