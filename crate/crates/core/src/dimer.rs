//! Two-mode dimer in the deformed normal-mode basis b̃± = (a₁ ± e^{iθ/2}a₂)/√2:
//! correlated-bath channel coefficients, the effective first-moment matrix
//! W_eff, its eigen-analysis and the location of exceptional points.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::{AnyonParams, Conjugation, FrequencyConvention};
use crate::statistics::{self, gamma_stat, thermal_occupation, StatisticsError};

/// Eigenvector condition number above which a matrix is marked as sitting
/// in the neighbourhood of an exceptional point.
pub const NEAR_DEFECTIVE_CONDITION: f64 = 1e8;

/// An exceptional point is declared when the eigenvalue gap falls below
/// this multiple of γ.
pub const EP_GAP_FACTOR: f64 = 1e-6;

/// Number of points in the coarse scan preceding golden-section refinement.
pub const EP_COARSE_POINTS: usize = 512;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DimerError {
    #[error(transparent)]
    Statistics(#[from] StatisticsError),
    #[error("theta bracket [{lo}, {hi}] must be an increasing sub-interval of [0, pi]")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("no exceptional point: minimal gap {gap:e} at theta = {theta} (threshold {threshold:e})")]
    NoExceptionalPoint { theta: f64, gap: f64, threshold: f64 },
}

/// Options controlling the assembly of W_eff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct WeffOptions {
    pub frequency: FrequencyConvention,
    pub conjugation: Conjugation,
    /// Add Γ_stat(θ, z, γ) to both diagonal decay rates.
    pub stat_dephasing: bool,
}

/// (ω₊, ω₋) for the chosen splitting convention.
pub fn normal_mode_frequencies(params: &AnyonParams, convention: FrequencyConvention) -> (f64, f64) {
    let split = params.coupling_j * convention.splitting_factor(params.theta);
    (params.omega + split, params.omega - split)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Emission,
    Absorption,
}

/// One Lindblad channel L_k = λ^{(+)} b̃₊ + λ^{(-)} b̃₋.
///
/// The coefficients factor as λ^{(i)} = √rate · structure[i], where `rate`
/// is γ(n_θ+1) or γ n_θ (complex in general) and `structure` carries the
/// √(1±ξ)/2 weights and the e^{-iθ/2} phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub kind: ChannelKind,
    /// +1 for the symmetric (1+ξ) channel, -1 for the antisymmetric one.
    pub sign: i8,
    pub rate: Complex64,
    pub structure: [Complex64; 2],
}

impl Channel {
    pub fn lambda_plus(&self) -> Complex64 {
        self.rate.sqrt() * self.structure[0]
    }

    pub fn lambda_minus(&self) -> Complex64 {
        self.rate.sqrt() * self.structure[1]
    }

    /// λ^{(i)} (λ^{(j)})° under the given conjugation convention.
    pub fn product(&self, i: usize, j: usize, conjugation: Conjugation) -> Complex64 {
        conjugation.weight(self.rate) * self.structure[i] * self.structure[j].conj()
    }
}

/// The four correlated-bath channels: emission ±, absorption ±.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSet {
    pub channels: [Channel; 4],
}

impl ChannelSet {
    /// Σ_k λ_k^{(i)} (λ_k^{(j)})°.
    pub fn overlap(&self, i: usize, j: usize, conjugation: Conjugation) -> Complex64 {
        self.channels
            .iter()
            .map(|c| c.product(i, j, conjugation))
            .sum()
    }

    /// The 2×2 dissipative matrix Γ_ij.
    pub fn dissipator(&self, conjugation: Conjugation) -> Matrix2<Complex64> {
        Matrix2::from_fn(|i, j| self.overlap(i, j, conjugation))
    }
}

/// Channel coefficients for the correlated thermal bath.
///
/// Absorption channels use the same b̃ structure as emission with weight
/// γ n_θ; both enter the dissipative sums with positive sign.
pub fn lindblad_coefficients(params: &AnyonParams) -> Result<ChannelSet, DimerError> {
    params.validate().map_err(StatisticsError::from)?;
    let n = thermal_occupation(params.theta, params.beta, params.omega)?;
    let phase = Complex64::from_polar(1.0, -0.5 * params.theta);
    let make = |kind: ChannelKind, sign: i8| {
        let occupation = match kind {
            ChannelKind::Emission => n + 1.0,
            ChannelKind::Absorption => n,
        };
        let s = f64::from(sign);
        let amp = 0.5 * (1.0 + s * params.xi).max(0.0).sqrt();
        Channel {
            kind,
            sign,
            rate: params.gamma * occupation,
            structure: [Complex64::new(amp, 0.0), s * amp * phase],
        }
    };
    Ok(ChannelSet {
        channels: [
            make(ChannelKind::Emission, 1),
            make(ChannelKind::Emission, -1),
            make(ChannelKind::Absorption, 1),
            make(ChannelKind::Absorption, -1),
        ],
    })
}

/// W_eff with its eigen-decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveMatrix {
    /// [[A, B], [C, D]].
    pub entries: Matrix2<Complex64>,
    pub omega_plus: f64,
    pub omega_minus: f64,
    /// λ₊ (principal square root with + sign) first.
    pub eigenvalues: [Complex64; 2],
    pub right_eigenvectors: [Vector2<Complex64>; 2],
    /// τ± = 1/(-Re λ±); infinite for a non-decaying mode.
    pub lifetimes: [f64; 2],
    /// 2-norm condition number of the eigenvector matrix.
    pub condition: f64,
}

impl EffectiveMatrix {
    /// Wrap raw entries; eigen data is filled by [`eigen_analysis`].
    pub fn from_entries(entries: Matrix2<Complex64>, omega_plus: f64, omega_minus: f64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            entries,
            omega_plus,
            omega_minus,
            eigenvalues: [zero; 2],
            right_eigenvectors: [Vector2::zeros(); 2],
            lifetimes: [f64::NAN; 2],
            condition: f64::NAN,
        }
    }

    pub fn a(&self) -> Complex64 {
        self.entries[(0, 0)]
    }

    pub fn b(&self) -> Complex64 {
        self.entries[(0, 1)]
    }

    pub fn c(&self) -> Complex64 {
        self.entries[(1, 0)]
    }

    pub fn d(&self) -> Complex64 {
        self.entries[(1, 1)]
    }

    pub fn gap(&self) -> f64 {
        (self.eigenvalues[0] - self.eigenvalues[1]).norm()
    }

    pub fn near_defective(&self) -> bool {
        !(self.condition <= NEAR_DEFECTIVE_CONDITION)
    }

    /// Norm of the traceless part W - tr(W)/2·I. Zero means W is a multiple
    /// of the identity, where coincident eigenvalues are not an EP.
    pub fn traceless_norm(&self) -> f64 {
        let half = 0.5 * (self.a() - self.d());
        (2.0 * half.norm_sqr() + self.b().norm_sqr() + self.c().norm_sqr()).sqrt()
    }

    /// Coincident eigenvalues on a matrix that is not scalar.
    pub fn is_exceptional(&self, gap_threshold: f64) -> bool {
        self.gap() < gap_threshold && self.traceless_norm() > gap_threshold
    }
}

/// Assemble W_eff from the channel set and run the eigen-analysis.
pub fn build_weff(params: &AnyonParams, options: &WeffOptions) -> Result<EffectiveMatrix, DimerError> {
    let channels = lindblad_coefficients(params)?;
    let (omega_plus, omega_minus) = normal_mode_frequencies(params, options.frequency);
    let gamma = channels.dissipator(options.conjugation);
    let i = Complex64::i();
    let mut entries = Matrix2::new(
        -i * omega_plus - gamma[(0, 0)],
        -gamma[(0, 1)],
        -gamma[(1, 0)],
        -i * omega_minus - gamma[(1, 1)],
    );
    if options.stat_dephasing {
        let extra = gamma_stat(params.theta, params.z(), params.gamma);
        entries[(0, 0)] -= extra;
        entries[(1, 1)] -= extra;
    }
    Ok(eigen_analysis(EffectiveMatrix::from_entries(
        entries,
        omega_plus,
        omega_minus,
    )))
}

/// Closed-form eigenvalues λ± = ½(A + D ± √((A-D)² + 4BC)), eigenvectors
/// from the better-conditioned row of (W - λI)v = 0, lifetimes and the
/// eigenvector condition number.
pub fn eigen_analysis(mut m: EffectiveMatrix) -> EffectiveMatrix {
    let (a, b, c, d) = (m.a(), m.b(), m.c(), m.d());
    let root = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
    let eigenvalues = [0.5 * (a + d + root), 0.5 * (a + d - root)];
    let vectors = [
        null_vector(&m.entries, eigenvalues[0], 0),
        null_vector(&m.entries, eigenvalues[1], 1),
    ];
    m.lifetimes = eigenvalues.map(|l| if l.re < 0.0 { -1.0 / l.re } else { f64::INFINITY });
    m.condition = condition_number(&vectors);
    m.eigenvalues = eigenvalues;
    m.right_eigenvectors = vectors;
    m
}

fn null_vector(w: &Matrix2<Complex64>, lambda: Complex64, fallback: usize) -> Vector2<Complex64> {
    let r0 = (w[(0, 0)] - lambda, w[(0, 1)]);
    let r1 = (w[(1, 0)], w[(1, 1)] - lambda);
    let n0 = r0.0.norm_sqr() + r0.1.norm_sqr();
    let n1 = r1.0.norm_sqr() + r1.1.norm_sqr();
    let scale = w.iter().map(|z| z.norm_sqr()).sum::<f64>().max(f64::MIN_POSITIVE);
    if n0.max(n1) <= 1e-30 * scale {
        // W = λI: any vector works, keep the natural basis
        let mut v = Vector2::zeros();
        v[fallback] = Complex64::new(1.0, 0.0);
        return v;
    }
    let (p, q) = if n0 >= n1 { r0 } else { r1 };
    let v = Vector2::new(-q, p);
    let norm = v.norm();
    let mut v = v / Complex64::new(norm, 0.0);
    // fix the phase so the largest component is real and positive
    let k = if v[0].norm() >= v[1].norm() { 0 } else { 1 };
    let phase = v[k] / v[k].norm();
    v /= phase;
    v
}

fn condition_number(vectors: &[Vector2<Complex64>; 2]) -> f64 {
    // singular values of V = [v0 v1] from the Hermitian 2x2 V†V
    let g00 = vectors[0].norm_squared();
    let g11 = vectors[1].norm_squared();
    let g01 = vectors[0].dotc(&vectors[1]).norm();
    let mean = 0.5 * (g00 + g11);
    let disc = (0.25 * (g00 - g11).powi(2) + g01 * g01).sqrt();
    let smax = mean + disc;
    let smin = mean - disc;
    if smin <= 0.0 {
        f64::INFINITY
    } else {
        (smax / smin).sqrt()
    }
}

/// Result of an exceptional-point search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalPoint {
    pub theta: f64,
    pub gap: f64,
}

/// Locate the θ minimising |λ₊ - λ₋| in `bracket` by a coarse scan followed
/// by golden-section refinement. θ in `params` is ignored.
///
/// Returns [`DimerError::NoExceptionalPoint`] carrying the minimal gap when
/// it stays above 10⁻⁶γ, or when the minimum sits on a scalar matrix.
pub fn find_exceptional_point(
    params: &AnyonParams,
    bracket: (f64, f64),
    options: &WeffOptions,
) -> Result<ExceptionalPoint, DimerError> {
    let (lo, hi) = bracket;
    if !(lo >= 0.0 && hi <= std::f64::consts::PI && lo < hi) {
        return Err(DimerError::InvalidBracket { lo, hi });
    }
    let weff_at = |theta: f64| build_weff(&params.with_theta(theta), options);
    let gap_at = |theta: f64| weff_at(theta).map(|m| m.gap());

    let step = (hi - lo) / (EP_COARSE_POINTS - 1) as f64;
    let grid = |k: usize| {
        if k + 1 == EP_COARSE_POINTS {
            hi
        } else {
            lo + step * k as f64
        }
    };
    let mut best = (0usize, f64::INFINITY);
    for k in 0..EP_COARSE_POINTS {
        let g = gap_at(grid(k))?;
        if g < best.1 {
            best = (k, g);
        }
    }

    let mut a = grid(best.0.saturating_sub(1));
    let mut b = grid((best.0 + 1).min(EP_COARSE_POINTS - 1));
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = gap_at(x1)?;
    let mut f2 = gap_at(x2)?;
    for _ in 0..200 {
        if b - a <= 4.0 * f64::EPSILON * b.abs().max(1.0) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = gap_at(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = gap_at(x2)?;
        }
    }
    let mut candidates = [(x1, f1), (x2, f2), (a, gap_at(a)?), (b, gap_at(b)?), (grid(best.0), best.1)];
    candidates.sort_by(|p, q| p.1.total_cmp(&q.1));
    let (theta, gap) = candidates[0];

    let threshold = EP_GAP_FACTOR * params.gamma;
    let weff = weff_at(theta)?;
    if weff.is_exceptional(threshold) {
        Ok(ExceptionalPoint { theta, gap })
    } else {
        Err(DimerError::NoExceptionalPoint {
            theta,
            gap,
            threshold,
        })
    }
}

/// Relabel eigenvalue pairs along a parameter path so that each branch
/// follows its nearest neighbour in the complex plane. Returns, for every
/// point, the permutation applied (`true` = swapped).
pub fn continuity_labels(points: &[[Complex64; 2]]) -> Vec<bool> {
    let mut swaps = Vec::with_capacity(points.len());
    let mut prev: Option<[Complex64; 2]> = None;
    for pair in points {
        let swap = match prev {
            None => false,
            Some(p) => {
                let keep = (pair[0] - p[0]).norm() + (pair[1] - p[1]).norm();
                let cross = (pair[1] - p[0]).norm() + (pair[0] - p[1]).norm();
                cross < keep
            }
        };
        let ordered = if swap { [pair[1], pair[0]] } else { *pair };
        prev = Some(ordered);
        swaps.push(swap);
    }
    swaps
}

/// Single-oscillator rate with the same parameters, for cross-checks.
pub fn single_oscillator_rate(params: &AnyonParams) -> Result<Complex64, DimerError> {
    Ok(statistics::gamma_full_single(params)?.0)
}
