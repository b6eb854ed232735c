//! Physical parameter set and the modelling conventions shared across modules.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("parameter `{name}` = {value} is outside its domain ({expected})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("parameter `{name}` is not finite")]
    NotFinite { name: &'static str },
}

/// Physical parameters of one or two anyonic oscillators in a thermal bath.
///
/// `omega` sets the energy scale; `beta` is an inverse temperature so that
/// `beta * omega` is the dimensionless βℏω.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnyonParams {
    /// Statistical angle in [0, π].
    pub theta: f64,
    pub omega: f64,
    #[serde(rename = "coupling")]
    pub coupling_j: f64,
    pub gamma: f64,
    pub beta: f64,
    /// Bath correlation in [-1, 1].
    pub xi: f64,
}

impl Default for AnyonParams {
    fn default() -> Self {
        Self {
            theta: 0.0,
            omega: 1.0,
            coupling_j: 0.2,
            gamma: 0.1,
            beta: 1.0,
            xi: 0.0,
        }
    }
}

impl AnyonParams {
    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_xi(mut self, xi: f64) -> Self {
        self.xi = xi;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_coupling(mut self, coupling_j: f64) -> Self {
        self.coupling_j = coupling_j;
        self
    }

    pub fn beta_omega(&self) -> f64 {
        self.beta * self.omega
    }

    /// Boltzmann factor z = exp(-βω).
    pub fn z(&self) -> f64 {
        (-self.beta_omega()).exp()
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let fields = [
            ("theta", self.theta),
            ("omega", self.omega),
            ("coupling", self.coupling_j),
            ("gamma", self.gamma),
            ("beta", self.beta),
            ("xi", self.xi),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(ParamError::NotFinite { name });
            }
        }
        check(self.theta, 0.0..=PI, "theta", "0 <= theta <= pi")?;
        check(self.xi, -1.0..=1.0, "xi", "-1 <= xi <= 1")?;
        if self.omega <= 0.0 {
            return Err(ParamError::OutOfRange {
                name: "omega",
                value: self.omega,
                expected: "omega > 0",
            });
        }
        if self.gamma < 0.0 {
            return Err(ParamError::OutOfRange {
                name: "gamma",
                value: self.gamma,
                expected: "gamma >= 0",
            });
        }
        if self.beta <= 0.0 {
            return Err(ParamError::OutOfRange {
                name: "beta",
                value: self.beta,
                expected: "beta > 0",
            });
        }
        let z = self.z();
        if !(z > 0.0 && z < 1.0) {
            return Err(ParamError::OutOfRange {
                name: "beta",
                value: self.beta,
                expected: "0 < exp(-beta*omega) < 1",
            });
        }
        Ok(())
    }
}

fn check(
    value: f64,
    range: std::ops::RangeInclusive<f64>,
    name: &'static str,
    expected: &'static str,
) -> Result<(), ParamError> {
    if range.contains(&value) {
        Ok(())
    } else {
        Err(ParamError::OutOfRange {
            name,
            value,
            expected,
        })
    }
}

/// Which normal-mode splitting to use: ω± = ω ± J cos(θ/2) or ω ± J cos θ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyConvention {
    /// Half-angle splitting J cos(θ/2).
    #[default]
    #[serde(alias = "half-angle")]
    Appendix,
    /// Full-angle splitting J cos θ.
    #[serde(alias = "full-angle")]
    Maintext,
}

impl FrequencyConvention {
    pub fn splitting_factor(self, theta: f64) -> f64 {
        match self {
            FrequencyConvention::Appendix => (0.5 * theta).cos(),
            FrequencyConvention::Maintext => theta.cos(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FrequencyConvention::Appendix => "appendix",
            FrequencyConvention::Maintext => "maintext",
        }
    }
}

/// How the products λ_i λ_j° of channel coefficients treat the complex
/// occupation factor.
///
/// With `Modulus` every channel enters with weight |γ n̄| (ordinary complex
/// conjugation). With `Analytic` the complex weight γ n̄ is kept and only the
/// explicit phase factors are conjugated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Conjugation {
    #[default]
    Modulus,
    Analytic,
}

impl Conjugation {
    /// Weight a complex channel rate γ n̄ according to the convention.
    pub fn weight(self, rate: num_complex::Complex64) -> num_complex::Complex64 {
        match self {
            Conjugation::Modulus => num_complex::Complex64::new(rate.norm(), 0.0),
            Conjugation::Analytic => rate,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Conjugation::Modulus => "modulus",
            Conjugation::Analytic => "analytic",
        }
    }
}

/// Operator basis of the truncated Fock-space model.
///
/// `Site` uses the hopping Hamiltonian with collective jump operators
/// √(γ n̄)√(1±ξ)(a₁ ± a₂)/√2. `Deformed` writes both the Hamiltonian and the
/// jump operators in the deformed normal modes b̃±, normalised so that the
/// first-moment equations of the generator coincide with W_eff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JumpBasis {
    Site,
    #[default]
    Deformed,
}

impl JumpBasis {
    pub fn as_str(self) -> &'static str {
        match self {
            JumpBasis::Site => "site",
            JumpBasis::Deformed => "deformed",
        }
    }
}
