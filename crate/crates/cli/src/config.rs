use std::path::Path;

use fracmix::forward::{OrderBox, ProblemSetup};
use fracmix::inverse::default_k0;
use fracmix::spectral::{build_basis, DomainSpec, InitialData, PhiSpec};
use serde::{Deserialize, Serialize};

use crate::exit::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputPaths {
    pub solution: String,
    pub modes: String,
    pub observation: String,
    pub report: String,
}

impl Default for OutputPaths {
    fn default() -> Self {
        OutputPaths {
            solution: "solution.csv".into(),
            modes: "modes.csv".into(),
            observation: "observation.json".into(),
            report: "recovery.txt".into(),
        }
    }
}

/// One experiment: domain, initial data, times, order box and outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub domain: DomainSpec,
    pub phi: PhiSpec,
    #[serde(rename = "T")]
    pub t: f64,
    pub t1: f64,
    pub t2: f64,
    pub k0: Option<usize>,
    #[serde(rename = "box")]
    pub bounds: OrderBox,
    pub modes: usize,
    /// Largest acceptable tail bound away from the gluing line; larger values only warn.
    pub truncation_tolerance: f64,
    pub output: OutputPaths,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            domain: DomainSpec::Interval { length: 1.0 },
            phi: PhiSpec::Parabola { scale: 1.0 },
            t: 50.0,
            t1: 10.0,
            t2: 25.0,
            k0: None,
            bounds: OrderBox::default(),
            modes: 32,
            truncation_tolerance: 1e-6,
            output: OutputPaths::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), Failure> {
        self.domain.validate()?;
        self.bounds.validate()?;
        if self.modes == 0 {
            return Err(Failure::invalid("modes must be positive"));
        }
        if !(self.t > 0.0 && self.t1 > 0.0 && self.t2 > 0.0 && self.t2 < self.t) {
            return Err(Failure::invalid(format!(
                "times need T > 0, t1 > 0 and 0 < t2 < T, got T = {}, t1 = {}, t2 = {}",
                self.t, self.t1, self.t2
            )));
        }
        Ok(())
    }

    pub fn data(&self) -> Result<(fracmix::spectral::EigenBasis, InitialData), Failure> {
        self.validate()?;
        let basis = build_basis(self.domain, self.modes)?;
        let data = InitialData::from_spec(&basis, &self.phi)?;
        Ok((basis, data))
    }

    /// Builds the audited setup; fails when some `Delta_k` is not positive on the box.
    pub fn setup(&self) -> Result<ProblemSetup, Failure> {
        let (basis, data) = self.data()?;
        Ok(ProblemSetup::new(basis, data, self.t, self.bounds)?)
    }

    pub fn k0(&self, setup: &ProblemSetup) -> Result<usize, Failure> {
        match self.k0 {
            Some(k) => Ok(k),
            None => default_k0(setup.data()).ok_or_else(|| Failure::invalid("no nonzero coefficient for k0")),
        }
    }
}
