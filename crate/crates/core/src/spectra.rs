//! Third-order rephasing response of the braided dimer on a 2D frequency
//! grid, diagonal lineshape slices and the W_eff bright-mode overlay.
//!
//! Frequency axes are detunings from the carrier ω. The resolvents are
//! evaluated on the lab-frame generator at ω + detuning.

use nalgebra::Vector2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dimer::{build_weff, continuity_labels, DimerError, EffectiveMatrix, WeffOptions};
use crate::fock::{
    CMatrix, CVector, FockError, FockSystem, GeneratorOptions, Liouvillian, Propagator,
};
use crate::params::AnyonParams;

/// Smallest cutoff that holds the two-excitation manifold.
pub const MIN_SPECTRUM_CUTOFF: usize = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("Fock cutoff {0} is too small for third-order spectra (need at least 2)")]
    CutoffTooSmall(usize),
    #[error("spectra need gamma > 0, got {0}")]
    NonPositiveGamma(f64),
    #[error("axis needs count >= 2 and start < stop (got {start}:{stop}:{count})")]
    InvalidAxis { start: f64, stop: f64, count: usize },
    #[error("diagonal slice needs identical axes")]
    AxisMismatch,
    #[error("empty slice")]
    EmptySlice,
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Dimer(#[from] DimerError),
}

/// μ = a₁ + a₁† + e^{iθN̂₁}a₂† + e^{−iθN̂₁}a₂ on the Fock space (a + a† for a
/// single mode).
#[derive(Debug, Clone)]
pub struct DipoleSet {
    pub mu: CMatrix,
}

impl DipoleSet {
    pub fn braided(system: &FockSystem) -> Self {
        let a1 = &system.lowering[0];
        let mut mu = a1 + a1.adjoint();
        if system.modes() == 2 {
            let a2 = &system.lowering[1];
            let p = &system.mode1_string;
            mu += p * a2.adjoint() + p.adjoint() * a2;
        }
        Self { mu }
    }

    /// Plain sum of site dipoles (a₁+a₁†) + (a₂+a₂†) without phase strings.
    pub fn unbraided(system: &FockSystem) -> Self {
        let mut mu = CMatrix::zeros(system.dimension, system.dimension);
        for a in &system.lowering {
            mu += a + a.adjoint();
        }
        Self { mu }
    }

    /// vec(μρ).
    pub fn apply_left(&self, v: &CVector) -> CVector {
        let d = self.mu.nrows();
        let mut out = CVector::zeros(d * d);
        for i in 0..d {
            for k in 0..d {
                let m = self.mu[(i, k)];
                if m.re == 0.0 && m.im == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out[i * d + j] += m * v[k * d + j];
                }
            }
        }
        out
    }

    /// vec(ρμ).
    pub fn apply_right(&self, v: &CVector) -> CVector {
        let d = self.mu.nrows();
        let mut out = CVector::zeros(d * d);
        for k in 0..d {
            for j in 0..d {
                let m = self.mu[(k, j)];
                if m.re == 0.0 && m.im == 0.0 {
                    continue;
                }
                for i in 0..d {
                    out[i * d + j] += v[i * d + k] * m;
                }
            }
        }
        out
    }

    /// Coefficients f with f·vec(ρ) = Tr(μρ).
    pub fn trace_functional(&self) -> CVector {
        let d = self.mu.nrows();
        CVector::from_fn(d * d, |idx, _| self.mu[(idx % d, idx / d)])
    }
}

/// Inclusive uniformly spaced axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self, SpectraError> {
        let axis = Self { start, stop, count };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<(), SpectraError> {
        if self.count >= 2 && self.start.is_finite() && self.stop.is_finite() && self.start < self.stop {
            Ok(())
        } else {
            Err(SpectraError::InvalidAxis { start: self.start, stop: self.stop, count: self.count })
        }
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.count - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        let step = self.step();
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.stop } else { self.start + step * k as f64 })
            .collect()
    }
}

/// Detuning axes and waiting time of a 2D spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub omega_tau: Axis,
    pub omega_t: Axis,
    pub t2: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::square(-0.5, 0.5, 256)
    }
}

impl GridSpec {
    pub fn square(start: f64, stop: f64, count: usize) -> Self {
        let axis = Axis { start, stop, count };
        Self { omega_tau: axis, omega_t: axis, t2: 0.0 }
    }
}

/// Equilibrium state the response starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    #[default]
    Vacuum,
    /// Steady state of the generator.
    Thermal,
}

/// Model settings for a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    pub cutoff: usize,
    pub generator: GeneratorOptions,
    pub initial: InitialState,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { cutoff: 2, generator: GeneratorOptions::default(), initial: InitialState::Vacuum }
    }
}

/// R(ω_τ, t₂, ω_t) on a grid; `values[(i, j)]` is at (omega_tau[i], omega_t[j]).
#[derive(Debug, Clone)]
pub struct SpectrumGrid {
    pub omega_tau: Vec<f64>,
    pub omega_t: Vec<f64>,
    pub t2: f64,
    pub values: CMatrix,
    pub params: AnyonParams,
    pub options: SpectrumOptions,
}

impl SpectrumGrid {
    pub fn max_abs(&self) -> f64 {
        crate::fock::max_abs(&self.values)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Precomputed pieces of the rephasing pathway for one parameter set.
pub struct ResponseEngine {
    pub liouvillian: Liouvillian,
    pub dipole: DipoleSet,
    /// vec(ρ_eq μ).
    first: CVector,
    carrier: f64,
}

impl ResponseEngine {
    pub fn new(params: &AnyonParams, options: &SpectrumOptions) -> Result<Self, SpectraError> {
        let system = FockSystem::two_mode(options.cutoff, params.theta)?;
        let dipole = DipoleSet::braided(&system);
        Self::with_dipole(&system, params, options, dipole)
    }

    pub fn with_dipole(
        system: &FockSystem,
        params: &AnyonParams,
        options: &SpectrumOptions,
        dipole: DipoleSet,
    ) -> Result<Self, SpectraError> {
        if system.cutoff < MIN_SPECTRUM_CUTOFF {
            return Err(SpectraError::CutoffTooSmall(system.cutoff));
        }
        if !(params.gamma > 0.0) {
            return Err(SpectraError::NonPositiveGamma(params.gamma));
        }
        let liouvillian = Liouvillian::from_params(system, params, &options.generator)?;
        let rho = match options.initial {
            InitialState::Vacuum => crate::fock::DensityState::vacuum(system.dimension),
            InitialState::Thermal => liouvillian.steady_state()?,
        };
        let first = dipole.apply_right(&rho.to_vector());
        Ok(Self { liouvillian, dipole, first, carrier: params.omega })
    }

    /// μ G(t₂) μ G̃(−, ω_τ) μ ρ_eq for one ω_τ detuning.
    fn middle(&self, detuning: f64, propagator: &Propagator) -> Result<CVector, SpectraError> {
        let x = self.liouvillian.resolvent_apply(self.carrier + detuning, -1, &self.first)?;
        let y = self.dipole.apply_left(&x);
        let y = propagator.apply(&self.liouvillian, &y);
        Ok(self.dipole.apply_left(&y))
    }

    /// w with w·y = Tr(μ G̃(+, ω_t) y), from the transposed shifted blocks.
    fn closing(&self, detuning: f64, functional: &CVector) -> Result<CVector, SpectraError> {
        let l = &self.liouvillian;
        let omega = self.carrier + detuning;
        let shift = Complex64::new(0.0, omega);
        let mut w = CVector::zeros(functional.len());
        for s in l.support(functional) {
            let sector = &l.sectors[s];
            let mut a = sector.generator.transpose();
            for i in 0..a.nrows() {
                a[(i, i)] += shift;
            }
            let lu = a.lu();
            let rhs = l.gather(s, functional);
            let sol = lu.solve(&rhs).ok_or(FockError::Singular {
                omega,
                sign: 1,
                condition: f64::INFINITY,
            })?;
            // x = −A⁻¹y, so Tr(μx) = −(A⁻ᵀf)·y
            for (&idx, z) in sector.indices.iter().zip(sol.iter()) {
                w[idx] = -z;
            }
        }
        Ok(w)
    }

    /// Evaluate the grid; rows (ω_τ) and closing vectors (ω_t) are computed
    /// in parallel and gathered in index order.
    pub fn evaluate(&self, omega_tau: &[f64], omega_t: &[f64], t2: f64) -> Result<CMatrix, SpectraError> {
        let propagator = self.liouvillian.propagator(t2)?;
        let functional = self.dipole.trace_functional();
        let rows: Vec<CVector> = omega_tau
            .par_iter()
            .map(|&d| self.middle(d, &propagator))
            .collect::<Result<_, _>>()?;
        let cols: Vec<CVector> = omega_t
            .par_iter()
            .map(|&d| self.closing(d, &functional))
            .collect::<Result<_, _>>()?;
        // (i/ħ)³ = −i
        let prefactor = Complex64::new(0.0, -1.0);
        let values: Vec<Vec<Complex64>> = rows
            .par_iter()
            .map(|y| cols.iter().map(|w| prefactor * w.dot(y)).collect())
            .collect();
        Ok(CMatrix::from_fn(omega_tau.len(), omega_t.len(), |i, j| values[i][j]))
    }

    /// Only the ω_t = ω_τ cells; agrees bit-for-bit with the diagonal of
    /// [`ResponseEngine::evaluate`].
    pub fn evaluate_diagonal(&self, axis: &[f64], t2: f64) -> Result<Vec<Complex64>, SpectraError> {
        let propagator = self.liouvillian.propagator(t2)?;
        let functional = self.dipole.trace_functional();
        let prefactor = Complex64::new(0.0, -1.0);
        axis.par_iter()
            .map(|&d| {
                let y = self.middle(d, &propagator)?;
                let w = self.closing(d, &functional)?;
                Ok(prefactor * w.dot(&y))
            })
            .collect()
    }
}

/// Rephasing third-order response on `grid`.
pub fn rephasing_response(
    params: &AnyonParams,
    options: &SpectrumOptions,
    grid: &GridSpec,
) -> Result<SpectrumGrid, SpectraError> {
    params.validate().map_err(|e| FockError::Statistics(e.into()))?;
    grid.omega_tau.validate()?;
    grid.omega_t.validate()?;
    if !(grid.t2 >= 0.0) {
        return Err(FockError::NegativeTime(grid.t2).into());
    }
    let engine = ResponseEngine::new(params, options)?;
    let omega_tau = grid.omega_tau.values();
    let omega_t = grid.omega_t.values();
    let values = engine.evaluate(&omega_tau, &omega_t, grid.t2)?;
    Ok(SpectrumGrid { omega_tau, omega_t, t2: grid.t2, values, params: *params, options: *options })
}

/// Values along ω_t = ω_τ.
pub fn diagonal_slice(grid: &SpectrumGrid) -> Result<Vec<(f64, Complex64)>, SpectraError> {
    if grid.omega_tau != grid.omega_t {
        return Err(SpectraError::AxisMismatch);
    }
    Ok(grid
        .omega_tau
        .iter()
        .enumerate()
        .map(|(k, &x)| (x, grid.values[(k, k)]))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineshapeMetrics {
    pub peak_detuning: f64,
    /// Σ(x−x_p)Re / Σ|x−x_p||Re|, in [−1, 1].
    pub asymmetry: f64,
    /// 1 − |Re(peak)| / max|Re|.
    pub dispersiveness: f64,
}

pub fn lineshape_metrics(slice: &[(f64, Complex64)]) -> Result<LineshapeMetrics, SpectraError> {
    let (peak, _) = slice
        .iter()
        .enumerate()
        .fold((None, -1.0), |(best, top), (k, (_, v))| {
            let m = v.norm();
            if m > top {
                (Some(k), m)
            } else {
                (best, top)
            }
        });
    let peak = peak.ok_or(SpectraError::EmptySlice)?;
    let xp = slice[peak].0;
    let (mut num, mut den) = (0.0, 0.0);
    for (x, v) in slice {
        num += (x - xp) * v.re;
        den += (x - xp).abs() * v.re.abs();
    }
    let max_re = slice.iter().map(|(_, v)| v.re.abs()).fold(0.0, f64::max);
    Ok(LineshapeMetrics {
        peak_detuning: xp,
        asymmetry: if den > 0.0 { num / den } else { 0.0 },
        dispersiveness: if max_re > 0.0 { 1.0 - slice[peak].1.re.abs() / max_re } else { 0.0 },
    })
}

/// Dipole amplitude of μ|0⟩ on the deformed one-excitation modes b̃±†|0⟩.
pub fn bright_vector(theta: f64) -> Vector2<Complex64> {
    let p = Complex64::from_polar(1.0, 0.5 * theta);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Vector2::new((1.0 + p) * s, (1.0 - p) * s)
}

/// Index of the W_eff eigenvector with the largest dipole overlap.
pub fn bright_branch(weff: &EffectiveMatrix, theta: f64) -> usize {
    let d = bright_vector(theta);
    let weight = |k: usize| d.dotc(&weff.right_eigenvectors[k]).norm_sqr();
    if weight(1) > weight(0) {
        1
    } else {
        0
    }
}

/// Normal-mode frequencies of W_eff at one θ, as detunings from ω.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlayPoint {
    pub theta: f64,
    /// −Im λ − ω for the two continuity-labelled branches.
    pub detunings: [f64; 2],
    /// Which entry of `detunings` is the bright branch.
    pub bright: usize,
}

impl OverlayPoint {
    pub fn bright_detuning(&self) -> f64 {
        self.detunings[self.bright]
    }
}

pub fn bright_mode_overlay(
    thetas: &[f64],
    params: &AnyonParams,
    options: &WeffOptions,
) -> Result<Vec<OverlayPoint>, SpectraError> {
    let mats: Vec<EffectiveMatrix> = thetas
        .iter()
        .map(|&t| build_weff(&params.with_theta(t), options))
        .collect::<Result<_, _>>()?;
    let pairs: Vec<[Complex64; 2]> = mats.iter().map(|m| m.eigenvalues).collect();
    let swaps = continuity_labels(&pairs);
    let mut flipped = false;
    Ok(thetas
        .iter()
        .zip(mats.iter().zip(swaps))
        .map(|(&theta, (m, swap))| {
            flipped ^= swap;
            let order = if flipped { [1, 0] } else { [0, 1] };
            let bright_raw = bright_branch(m, theta);
            OverlayPoint {
                theta,
                detunings: order.map(|k| -m.eigenvalues[k].im - params.omega),
                bright: order.iter().position(|&k| k == bright_raw).unwrap_or(0),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::max_abs;
    use std::f64::consts::PI;

    #[test]
    fn dipole_structure() {
        let sys = FockSystem::single_mode(1, 0.0).unwrap();
        let mu = DipoleSet::braided(&sys).mu;
        assert_eq!(mu[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(mu[(1, 0)], Complex64::new(1.0, 0.0));

        for theta in [0.0, 0.7, PI / 2.0, PI] {
            let sys = FockSystem::two_mode(2, theta).unwrap();
            let mu = DipoleSet::braided(&sys).mu;
            assert!(max_abs(&(&mu - mu.adjoint())) < 1e-15);
            let two = (&mu * &mu)[(0, 0)];
            assert!((two - 2.0).norm() < 1e-14);
            // only Δ(total N) = ±1 couplings
            for i in 0..sys.dimension {
                for j in 0..sys.dimension {
                    if mu[(i, j)].norm() > 0.0 {
                        assert_eq!((sys.total_number[i] - sys.total_number[j]).abs(), 1);
                    }
                }
            }
        }
        let sys = FockSystem::two_mode(2, 0.0).unwrap();
        assert_eq!(DipoleSet::braided(&sys).mu, DipoleSet::unbraided(&sys).mu);
    }

    #[test]
    fn fermionic_string_on_mode_two_terms() {
        let sys = FockSystem::two_mode(2, PI).unwrap();
        let mu = DipoleSet::braided(&sys).mu;
        // the string inside a₂ cancels the one in μ: ⟨1,1|μ|1,0⟩ = +1
        let m = 3;
        let v = mu[(m + 1, m)];
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let string = &sys.mode1_string;
        assert!((string[(m, m)] + 1.0).norm() < 1e-15);
    }

    #[test]
    fn left_right_actions() {
        let sys = FockSystem::two_mode(2, 0.9).unwrap();
        let dip = DipoleSet::braided(&sys);
        let d = sys.dimension;
        let rho = CMatrix::from_fn(d, d, |i, j| Complex64::new(i as f64 + 0.5, j as f64 - 0.25));
        let v = crate::fock::DensityState { matrix: rho.clone() }.to_vector();
        let left = crate::fock::DensityState::from_vector(d, &dip.apply_left(&v)).matrix;
        let right = crate::fock::DensityState::from_vector(d, &dip.apply_right(&v)).matrix;
        assert!(max_abs(&(left - &dip.mu * &rho)) < 1e-13);
        assert!(max_abs(&(right - &rho * &dip.mu)) < 1e-13);
        let tr = dip.trace_functional().dot(&v);
        assert!((tr - (&dip.mu * &rho).trace()).norm() < 1e-12);
    }

    #[test]
    fn axis_values() {
        let a = Axis::new(-0.5, 0.5, 5).unwrap();
        assert_eq!(a.values(), vec![-0.5, -0.25, 0.0, 0.25, 0.5]);
        assert!(Axis::new(0.0, 1.0, 1).is_err());
        assert!(Axis::new(1.0, 0.0, 3).is_err());
    }

    #[test]
    fn rejects_small_cutoff_and_zero_gamma() {
        let grid = GridSpec::square(-0.5, 0.5, 4);
        let opts = SpectrumOptions { cutoff: 1, ..Default::default() };
        assert!(matches!(
            rephasing_response(&AnyonParams::default(), &opts, &grid),
            Err(SpectraError::CutoffTooSmall(1))
        ));
        assert!(matches!(
            rephasing_response(&AnyonParams::default().with_gamma(0.0), &SpectrumOptions::default(), &grid),
            Err(SpectraError::NonPositiveGamma(_))
        ));
    }

    #[test]
    fn evaluation_order_is_irrelevant() {
        let p = AnyonParams::default().with_theta(1.0).with_xi(0.5);
        let engine = ResponseEngine::new(&p, &SpectrumOptions::default()).unwrap();
        let axis = Axis::new(-0.5, 0.5, 9).unwrap().values();
        let forward = engine.evaluate(&axis, &axis, 0.0).unwrap();
        let rev: Vec<f64> = axis.iter().rev().copied().collect();
        let backward = engine.evaluate(&rev, &rev, 0.0).unwrap();
        let n = axis.len();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(forward[(i, j)], backward[(n - 1 - i, n - 1 - j)]);
            }
        }
        let single = engine.evaluate(&axis[3..4], &axis[5..6], 0.0).unwrap();
        assert_eq!(single[(0, 0)], forward[(3, 5)]);
        let diag = engine.evaluate_diagonal(&axis, 0.0).unwrap();
        for k in 0..n {
            assert_eq!(diag[k], forward[(k, k)]);
        }
    }

    #[test]
    fn braided_equals_unbraided_at_zero_angle() {
        let p = AnyonParams::default().with_xi(0.5);
        let opts = SpectrumOptions::default();
        let sys = FockSystem::two_mode(2, 0.0).unwrap();
        let axis = Axis::new(-0.5, 0.5, 7).unwrap().values();
        let a = ResponseEngine::with_dipole(&sys, &p, &opts, DipoleSet::braided(&sys)).unwrap();
        let b = ResponseEngine::with_dipole(&sys, &p, &opts, DipoleSet::unbraided(&sys)).unwrap();
        assert_eq!(a.evaluate(&axis, &axis, 0.0).unwrap(), b.evaluate(&axis, &axis, 0.0).unwrap());
    }

    #[test]
    fn cutoff_convergence() {
        for (theta, xi) in [(0.0, 0.0), (PI / 2.0, 0.5)] {
            let p = AnyonParams::default().with_theta(theta).with_xi(xi);
            let grid = GridSpec::square(-0.5, 0.5, 12);
            let r2 = rephasing_response(&p, &SpectrumOptions::default(), &grid).unwrap();
            let opts3 = SpectrumOptions { cutoff: 3, ..Default::default() };
            let r3 = rephasing_response(&p, &opts3, &grid).unwrap();
            let rel = max_abs(&(&r2.values - &r3.values)) / r2.max_abs();
            assert!(rel <= 1e-3, "rel change {rel}");
        }
    }

    #[test]
    fn thermal_option_runs() {
        let grid = GridSpec::square(-0.5, 0.5, 6);
        let opts = SpectrumOptions { initial: InitialState::Thermal, ..Default::default() };
        let g = rephasing_response(&AnyonParams::default(), &opts, &grid).unwrap();
        assert!(g.is_finite() && g.max_abs() > 0.0);
    }

    #[test]
    fn large_damping_washes_out() {
        let grid = GridSpec::square(-0.5, 0.5, 32);
        let opts = SpectrumOptions::default();
        let base = rephasing_response(&AnyonParams::default(), &opts, &grid).unwrap();
        let damped = rephasing_response(&AnyonParams::default().with_gamma(10.0), &opts, &grid).unwrap();
        assert!(damped.max_abs() < 0.01 * base.max_abs());
    }

    #[test]
    fn slice_of_lorentzian() {
        let axis = Axis::new(-1.0, 1.0, 41).unwrap().values();
        let values = CMatrix::from_fn(41, 41, |i, j| {
            let z = Complex64::new(0.1, axis[i] + axis[j]);
            z.inv()
        });
        let grid = SpectrumGrid {
            omega_tau: axis.clone(),
            omega_t: axis.clone(),
            t2: 0.0,
            values,
            params: AnyonParams::default(),
            options: SpectrumOptions::default(),
        };
        let slice = diagonal_slice(&grid).unwrap();
        let m = lineshape_metrics(&slice).unwrap();
        assert_eq!(m.peak_detuning, 0.0);
        assert!(m.dispersiveness.abs() < 1e-12);
        assert!(m.asymmetry.abs() < 1e-12);

        let mut bad = grid.clone();
        bad.omega_t[0] = -2.0;
        assert!(matches!(diagonal_slice(&bad), Err(SpectraError::AxisMismatch)));
    }

    #[test]
    fn metrics_for_dispersive_profile() {
        // Lorentzian whose real part is the derivative-shaped dispersion
        let slice: Vec<(f64, Complex64)> = (0..201)
            .map(|k| {
                let x = -1.0 + 0.01 * k as f64;
                (x, Complex64::new(x, 0.1).inv())
            })
            .collect();
        let m = lineshape_metrics(&slice).unwrap();
        assert!(m.dispersiveness >= 0.9, "{m:?}");
        assert!(lineshape_metrics(&[]).is_err());
        let flat = [(0.0, Complex64::new(0.0, 1.0))];
        assert_eq!(lineshape_metrics(&flat).unwrap().dispersiveness, 0.0);
    }

    #[test]
    fn overlay_limits() {
        let p = AnyonParams::default();
        let o = WeffOptions::default();
        let pts = bright_mode_overlay(&[0.0], &p, &o).unwrap();
        let mut d = pts[0].detunings;
        d.sort_by(f64::total_cmp);
        assert!((d[0] + 0.2).abs() < 1e-14 && (d[1] - 0.2).abs() < 1e-14);
        assert!((pts[0].bright_detuning() - 0.2).abs() < 1e-14);

        let thetas: Vec<f64> = (0..100).map(|k| PI * k as f64 / 100.0).collect();
        for pt in bright_mode_overlay(&thetas, &p, &o).unwrap() {
            assert!((pt.detunings[0] - pt.detunings[1]).abs() > 1e-3);
        }
    }
}
