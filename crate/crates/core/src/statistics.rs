//! Closed-form single-oscillator quantities: the deformed commutator
//! spectrum, the complex thermal occupation n_θ, the thermal average of the
//! statistical phase and the resulting coherence relaxation rates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::{AnyonParams, ParamError};

/// Smallest βω accepted by [`thermal_occupation`].
pub const BETA_OMEGA_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatisticsError {
    #[error("beta*omega = {beta_omega:e} is below the floor {floor:e}; n_theta has a pole there")]
    OccupationPole { beta_omega: f64, floor: f64 },
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// A rate that may carry an imaginary part inherited from n_θ.
///
/// The real part is the decay contribution, the imaginary part a frequency
/// shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexRate(pub Complex64);

impl ComplexRate {
    pub fn decay(&self) -> f64 {
        self.0.re
    }

    pub fn shift(&self) -> f64 {
        self.0.im
    }
}

/// q-number [n]_q = 1 + q + ... + q^{n-1} with q = e^{iθ}.
///
/// Summed term by term so the θ → 0 limit (= n) needs no special case.
pub fn q_number(n: u32, theta: f64) -> Complex64 {
    let q = Complex64::from_polar(1.0, theta);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        acc += power;
        power *= q;
    }
    acc
}

/// Eigenvalue of Φ(N̂) = 1 + (e^{iθ} - 1)N̂ on the n-quantum state, with N̂
/// evaluated through the deformed product a†a (eigenvalue [n]_q).
pub fn deformed_commutator_eigenvalue(n: u32, theta: f64) -> Complex64 {
    let q = Complex64::from_polar(1.0, theta);
    Complex64::new(1.0, 0.0) + (q - 1.0) * q_number(n, theta)
}

/// n_θ = 1 / (e^{βω} - e^{iθ}).
pub fn thermal_occupation(theta: f64, beta: f64, omega: f64) -> Result<Complex64, StatisticsError> {
    let beta_omega = beta * omega;
    if !(beta_omega >= BETA_OMEGA_FLOOR) {
        return Err(StatisticsError::OccupationPole {
            beta_omega,
            floor: BETA_OMEGA_FLOOR,
        });
    }
    let denom = Complex64::new(beta_omega.exp(), 0.0) - Complex64::from_polar(1.0, theta);
    Ok(denom.inv())
}

/// Thermal average ⟨e^{iθN̂}⟩ = (1 - z) / (1 - z e^{iθ}) over a geometric
/// population with ratio z.
pub fn phase_average(theta: f64, z: f64) -> Complex64 {
    Complex64::new(1.0 - z, 0.0) / (1.0 - z * Complex64::from_polar(1.0, theta))
}

/// Real part of [`phase_average`] in its explicitly real form.
pub fn phase_average_re(theta: f64, z: f64) -> f64 {
    let c = theta.cos();
    (1.0 - z) * (1.0 - z * c) / (1.0 - 2.0 * z * c + z * z)
}

/// Purely statistical coherence relaxation (γ/2)(1 - Re⟨e^{iθN̂}⟩).
pub fn gamma_stat(theta: f64, z: f64, gamma: f64) -> f64 {
    // 1 − (1−z)/(1−zq) = z(1−q)/(1−zq): no cancellation, exactly 0 at θ = 0
    let q = Complex64::from_polar(1.0, theta);
    let bracket = (z * (1.0 - q) / (1.0 - z * q)).re;
    (0.5 * gamma * bracket).max(0.0)
}

/// Total single-oscillator phase relaxation rate
/// (γ/2)[2n_θ + 1 + (1 - Re⟨e^{iθN̂}⟩)].
pub fn gamma_full_single(params: &AnyonParams) -> Result<ComplexRate, StatisticsError> {
    params.validate()?;
    let n = thermal_occupation(params.theta, params.beta, params.omega)?;
    let stat = 1.0 - phase_average_re(params.theta, params.z());
    let value = 0.5 * params.gamma * (2.0 * n + 1.0 + stat);
    Ok(ComplexRate(value))
}
