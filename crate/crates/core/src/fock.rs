//! Truncated Fock-space representation of the deformed oscillator algebra,
//! the Lindblad generator on vectorised density matrices, time propagation,
//! resolvents and exponential fitting.
//!
//! Density matrices are vectorised row-major: `v[i * d + j] = ρ[i, j]`.
//! Every generator built here conserves ΔN = N(ket) − N(bra), so it is
//! stored as independent blocks, one per ΔN sector.

use nalgebra::{DMatrix, DVector, Dim, Matrix, RawStorage};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dimer::{lindblad_coefficients, ChannelKind, DimerError};
use crate::params::{AnyonParams, Conjugation, FrequencyConvention, JumpBasis};
use crate::statistics::{q_number, thermal_occupation, StatisticsError};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Residual above which an exponential fit is reported as not converged.
pub const FIT_RESIDUAL_LIMIT: f64 = 1e-2;

/// Reciprocal condition number below which a shifted generator is treated
/// as singular.
pub const SINGULAR_RCOND: f64 = 1e-14;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("Fock cutoff {cutoff} is too small (need at least {required})")]
    CutoffTooSmall { cutoff: usize, required: usize },
    #[error("vector length {got} does not match the Liouville dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("shifted generator is singular at omega = {omega} (sign {sign}, condition estimate {condition:e})")]
    Singular { omega: f64, sign: i8, condition: f64 },
    #[error("propagation time must be finite and non-negative, got {0}")]
    NegativeTime(f64),
    #[error("time series needs at least 3 samples and a positive step")]
    SeriesTooShort,
    #[error("the generator has no unique steady state")]
    NoSteadyState,
    #[error(transparent)]
    Statistics(#[from] StatisticsError),
    #[error(transparent)]
    Dimer(#[from] DimerError),
}

/// a|n⟩ = √([n]_q)|n−1⟩ on the (cutoff+1)-dimensional truncated space.
pub fn anyon_ladder_matrix(cutoff: usize, theta: f64) -> CMatrix {
    let mut a = CMatrix::zeros(cutoff + 1, cutoff + 1);
    for n in 1..=cutoff {
        a[(n - 1, n)] = q_number(n as u32, theta).sqrt();
    }
    a
}

/// Formal creation partner a⁺|n⟩ = √([n+1]_q)|n+1⟩ (the transpose of the
/// ladder matrix). It satisfies aa⁺ − e^{iθ}a⁺a = 1 below the cutoff and
/// [a, a⁺] = e^{iθN̂}; it equals the Hermitian adjoint only for θ ∈ {0, π}.
/// Generators use the adjoint so the Lindblad form stays intact.
pub fn anyon_creation_matrix(cutoff: usize, theta: f64) -> CMatrix {
    anyon_ladder_matrix(cutoff, theta).transpose()
}

/// Diagonal e^{iθN̂} on one mode.
pub fn phase_string(cutoff: usize, theta: f64) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_fn(cutoff + 1, |n, _| {
        Complex64::from_polar(1.0, theta * n as f64)
    }))
}

fn number_matrix(cutoff: usize) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_fn(cutoff + 1, |n, _| {
        Complex64::new(n as f64, 0.0)
    }))
}

/// (a ⊗ I, P ⊗ a) with P = e^{iθN̂} on mode 1, so that a₁a₂ = e^{iθ}a₂a₁.
pub fn braided_embedding(cutoff: usize, theta: f64) -> (CMatrix, CMatrix) {
    let a = anyon_ladder_matrix(cutoff, theta);
    let id = CMatrix::identity(cutoff + 1, cutoff + 1);
    let p = phase_string(cutoff, theta);
    (a.kronecker(&id), p.kronecker(&a))
}

/// One or two truncated anyonic modes with their ladder and number operators.
#[derive(Debug, Clone)]
pub struct FockSystem {
    pub cutoff: usize,
    pub theta: f64,
    pub dimension: usize,
    /// a (single mode) or a₁, a₂ (braided pair).
    pub lowering: Vec<CMatrix>,
    /// Undeformed number operators, one per mode.
    pub number: Vec<CMatrix>,
    /// e^{iθN̂₁} lifted to the full space.
    pub mode1_string: CMatrix,
    /// Total excitation number of each basis state.
    pub total_number: Vec<i32>,
}

impl FockSystem {
    pub fn single_mode(cutoff: usize, theta: f64) -> Result<Self, FockError> {
        if cutoff < 1 {
            return Err(FockError::CutoffTooSmall { cutoff, required: 1 });
        }
        Ok(Self {
            cutoff,
            theta,
            dimension: cutoff + 1,
            lowering: vec![anyon_ladder_matrix(cutoff, theta)],
            number: vec![number_matrix(cutoff)],
            mode1_string: phase_string(cutoff, theta),
            total_number: (0..=cutoff as i32).collect(),
        })
    }

    /// Basis state (n₁, n₂) sits at index n₁·(cutoff+1) + n₂.
    pub fn two_mode(cutoff: usize, theta: f64) -> Result<Self, FockError> {
        if cutoff < 1 {
            return Err(FockError::CutoffTooSmall { cutoff, required: 1 });
        }
        let m = cutoff + 1;
        let id = CMatrix::identity(m, m);
        let (a1, a2) = braided_embedding(cutoff, theta);
        let n = number_matrix(cutoff);
        let total_number = (0..m * m).map(|i| (i / m + i % m) as i32).collect();
        Ok(Self {
            cutoff,
            theta,
            dimension: m * m,
            lowering: vec![a1, a2],
            number: vec![n.kronecker(&id), id.kronecker(&n)],
            mode1_string: phase_string(cutoff, theta).kronecker(&id),
            total_number,
        })
    }

    pub fn modes(&self) -> usize {
        self.lowering.len()
    }

    pub fn total_number_operator(&self) -> CMatrix {
        self.number.iter().fold(
            CMatrix::zeros(self.dimension, self.dimension),
            |acc, n| acc + n,
        )
    }

    /// Deformed normal modes b̃± = (a₁ ± e^{iθ/2}a₂)/√2 (two-mode only).
    pub fn deformed_modes(&self) -> (CMatrix, CMatrix) {
        assert_eq!(self.modes(), 2, "deformed modes need two oscillators");
        let phase = Complex64::from_polar(1.0, 0.5 * self.theta);
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let a1 = &self.lowering[0];
        let a2 = &self.lowering[1];
        ((a1 + a2 * phase) * s, (a1 - a2 * phase) * s)
    }
}

/// Which operator the absorption channels use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AbsorptionOperator {
    /// Same lowering structure as emission, weight γn̄.
    #[default]
    Lowering,
    /// Hermitian conjugate of the emission operator; the truncated thermal
    /// state is then a fixed point.
    Raising,
}

/// Model choices for the Fock-space generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GeneratorOptions {
    pub basis: JumpBasis,
    pub frequency: FrequencyConvention,
    pub conjugation: Conjugation,
    pub absorption: AbsorptionOperator,
}

/// H = ωΣN̂ᵢ plus the exchange term.
///
/// `Site`: J(a₁†a₂ + a₂†a₁). `Deformed`: splitting·(b̃₊†b̃₊ − b̃₋†b̃₋) with
/// the splitting J·cos(θ/2) or J·cos θ from `frequency`.
pub fn build_hamiltonian(
    system: &FockSystem,
    params: &AnyonParams,
    basis: JumpBasis,
    frequency: FrequencyConvention,
) -> CMatrix {
    let mut h = system.total_number_operator() * Complex64::new(params.omega, 0.0);
    if system.modes() == 1 {
        return h;
    }
    match basis {
        JumpBasis::Site => {
            let a1 = &system.lowering[0];
            let a2 = &system.lowering[1];
            let hop = a1.adjoint() * a2 + a2.adjoint() * a1;
            h += hop * Complex64::new(params.coupling_j, 0.0);
        }
        JumpBasis::Deformed => {
            let (bp, bm) = system.deformed_modes();
            let split = params.coupling_j * frequency.splitting_factor(params.theta);
            h += (bp.adjoint() * &bp - bm.adjoint() * &bm) * Complex64::new(split, 0.0);
        }
    }
    h
}

/// A jump operator O with complex rate r; the physical channel is √r·O.
#[derive(Debug, Clone)]
pub struct JumpOperator {
    pub rate: Complex64,
    pub operator: CMatrix,
}

/// Thermal jump operators for the system.
///
/// Single mode: a with rate γ(n_θ+1), and a or a† with rate γn_θ.
/// Two modes, site basis: √(1±ξ)(a₁ ± a₂)/√2. Two modes, deformed basis:
/// √2(λ̂⁺b̃₊ + λ̂⁻b̃₋) with the channel structure of the dimer model, which
/// makes the first-moment equations reproduce W_eff.
pub fn jump_operators(
    system: &FockSystem,
    params: &AnyonParams,
    basis: JumpBasis,
    absorption: AbsorptionOperator,
) -> Result<Vec<JumpOperator>, FockError> {
    params.validate().map_err(StatisticsError::from)?;
    let n = thermal_occupation(params.theta, params.beta, params.omega)?;
    let absorb = |op: CMatrix| match absorption {
        AbsorptionOperator::Lowering => op,
        AbsorptionOperator::Raising => op.adjoint(),
    };
    let mut out = Vec::new();
    if system.modes() == 1 {
        let a = system.lowering[0].clone();
        out.push(JumpOperator { rate: params.gamma * (n + 1.0), operator: a.clone() });
        out.push(JumpOperator { rate: params.gamma * n, operator: absorb(a) });
        return Ok(out);
    }
    match basis {
        JumpBasis::Site => {
            let a1 = &system.lowering[0];
            let a2 = &system.lowering[1];
            for s in [1.0, -1.0] {
                let weight = (0.5 * (1.0 + s * params.xi)).max(0.0).sqrt();
                if weight == 0.0 {
                    continue;
                }
                let op = (a1 + a2 * Complex64::new(s, 0.0)) * Complex64::new(weight, 0.0);
                out.push(JumpOperator { rate: params.gamma * (n + 1.0), operator: op.clone() });
                out.push(JumpOperator { rate: params.gamma * n, operator: absorb(op) });
            }
        }
        JumpBasis::Deformed => {
            let (bp, bm) = system.deformed_modes();
            let root2 = Complex64::new(std::f64::consts::SQRT_2, 0.0);
            for ch in lindblad_coefficients(params)?.channels {
                if ch.structure.iter().all(|c| c.norm() == 0.0) {
                    continue;
                }
                let op = (&bp * ch.structure[0] + &bm * ch.structure[1]) * root2;
                let op = match ch.kind {
                    ChannelKind::Emission => op,
                    ChannelKind::Absorption => absorb(op),
                };
                out.push(JumpOperator { rate: ch.rate, operator: op });
            }
        }
    }
    Ok(out)
}

/// One ΔN block of the generator.
#[derive(Debug, Clone)]
pub struct Sector {
    pub delta: i32,
    /// Positions in the full vectorised space, ascending.
    pub indices: Vec<usize>,
    pub generator: CMatrix,
}

/// Block-diagonal Lindblad generator.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    /// Hilbert-space dimension d; the generator acts on d² vectors.
    pub dim: usize,
    pub sectors: Vec<Sector>,
    /// Full index to (sector, position within sector).
    location: Vec<(usize, usize)>,
}

impl Liouvillian {
    /// Assemble dρ/dt = −i[H,ρ] + Σ_k w_k(OρO† − ½{O†O, ρ}) with w_k the
    /// rate weighted by `conjugation`.
    pub fn build(
        system: &FockSystem,
        hamiltonian: &CMatrix,
        jumps: &[JumpOperator],
        conjugation: Conjugation,
    ) -> Self {
        let d = system.dimension;
        let weighted: Vec<(CMatrix, CMatrix)> = jumps
            .iter()
            .map(|j| {
                let w = conjugation.weight(j.rate);
                let half_m = j.operator.adjoint() * &j.operator * (w * 0.5);
                (j.operator.clone() * w, half_m)
            })
            .collect();
        let mut deltas: Vec<i32> = Vec::new();
        for &ni in &system.total_number {
            for &nj in &system.total_number {
                let delta = ni - nj;
                if !deltas.contains(&delta) {
                    deltas.push(delta);
                }
            }
        }
        deltas.sort_unstable();
        let mut location = vec![(0, 0); d * d];
        let mut sectors = Vec::with_capacity(deltas.len());
        for (s, &delta) in deltas.iter().enumerate() {
            let indices: Vec<usize> = (0..d * d)
                .filter(|&idx| system.total_number[idx / d] - system.total_number[idx % d] == delta)
                .collect();
            for (pos, &idx) in indices.iter().enumerate() {
                location[idx] = (s, pos);
            }
            let size = indices.len();
            let mut block = CMatrix::zeros(size, size);
            for (r, &row) in indices.iter().enumerate() {
                let (i, j) = (row / d, row % d);
                for (c, &col) in indices.iter().enumerate() {
                    let (k, l) = (col / d, col % d);
                    let mut acc = ZERO;
                    if j == l {
                        acc -= Complex64::i() * hamiltonian[(i, k)];
                    }
                    if i == k {
                        acc += Complex64::i() * hamiltonian[(l, j)];
                    }
                    for (jump, (wo, half_m)) in jumps.iter().zip(&weighted) {
                        acc += wo[(i, k)] * jump.operator[(j, l)].conj();
                        if j == l {
                            acc -= half_m[(i, k)];
                        }
                        if i == k {
                            acc -= half_m[(l, j)];
                        }
                    }
                    block[(r, c)] = acc;
                }
            }
            sectors.push(Sector { delta, indices, generator: block });
        }
        Self { dim: d, sectors, location }
    }

    /// Generator for `params` with the given model options.
    pub fn from_params(
        system: &FockSystem,
        params: &AnyonParams,
        options: &GeneratorOptions,
    ) -> Result<Self, FockError> {
        let h = build_hamiltonian(system, params, options.basis, options.frequency);
        let jumps = jump_operators(system, params, options.basis, options.absorption)?;
        Ok(Self::build(system, &h, &jumps, options.conjugation))
    }

    pub fn liouville_dim(&self) -> usize {
        self.dim * self.dim
    }

    pub fn sector_index(&self, delta: i32) -> Option<usize> {
        self.sectors.iter().position(|s| s.delta == delta)
    }

    fn check_len(&self, v: &CVector) -> Result<(), FockError> {
        if v.len() == self.liouville_dim() {
            Ok(())
        } else {
            Err(FockError::DimensionMismatch { expected: self.liouville_dim(), got: v.len() })
        }
    }

    /// Restriction of `v` to sector `s`.
    pub fn gather(&self, s: usize, v: &CVector) -> CVector {
        CVector::from_iterator(
            self.sectors[s].indices.len(),
            self.sectors[s].indices.iter().map(|&i| v[i]),
        )
    }

    fn scatter(&self, s: usize, part: &CVector, out: &mut CVector) {
        for (&i, x) in self.sectors[s].indices.iter().zip(part.iter()) {
            out[i] = *x;
        }
    }

    /// Sectors in which `v` has a non-zero component.
    pub fn support(&self, v: &CVector) -> Vec<usize> {
        let mut hit = vec![false; self.sectors.len()];
        for (idx, x) in v.iter().enumerate() {
            if *x != ZERO {
                hit[self.location[idx].0] = true;
            }
        }
        (0..hit.len()).filter(|&s| hit[s]).collect()
    }

    pub fn apply(&self, v: &CVector) -> Result<CVector, FockError> {
        self.check_len(v)?;
        let mut out = CVector::zeros(v.len());
        for s in 0..self.sectors.len() {
            let part = &self.sectors[s].generator * self.gather(s, v);
            self.scatter(s, &part, &mut out);
        }
        Ok(out)
    }

    /// Full d²×d² matrix, for checks.
    pub fn to_dense(&self) -> CMatrix {
        let n = self.liouville_dim();
        let mut m = CMatrix::zeros(n, n);
        for sector in &self.sectors {
            for (r, &row) in sector.indices.iter().enumerate() {
                for (c, &col) in sector.indices.iter().enumerate() {
                    m[(row, col)] = sector.generator[(r, c)];
                }
            }
        }
        m
    }

    /// Eigenvalues of the block with ΔN = `delta`.
    pub fn sector_eigenvalues(&self, delta: i32) -> Vec<Complex64> {
        match self.sector_index(delta) {
            Some(s) => block_eigenvalues(&self.sectors[s].generator),
            None => Vec::new(),
        }
    }

    /// All eigenvalues, sector by sector.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.sectors
            .iter()
            .flat_map(|s| block_eigenvalues(&s.generator))
            .collect()
    }

    /// e^{Lt} as per-sector dense exponentials.
    pub fn propagator(&self, t: f64) -> Result<Propagator, FockError> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(FockError::NegativeTime(t));
        }
        let blocks = self
            .sectors
            .iter()
            .map(|s| {
                if t == 0.0 {
                    CMatrix::identity(s.indices.len(), s.indices.len())
                } else {
                    (&s.generator * Complex64::new(t, 0.0)).exp()
                }
            })
            .collect();
        Ok(Propagator { blocks })
    }

    pub fn propagate(&self, v: &CVector, t: f64) -> Result<CVector, FockError> {
        self.check_len(v)?;
        Ok(self.propagator(t)?.apply(self, v))
    }

    /// Factor (B + sign·iω) for the requested sectors (all when `None`).
    pub fn resolvent(
        &self,
        omega: f64,
        sign: i8,
        sectors: Option<&[usize]>,
    ) -> Result<Resolvent, FockError> {
        let all: Vec<usize> = (0..self.sectors.len()).collect();
        let wanted = sectors.unwrap_or(&all);
        let shift = Complex64::new(0.0, f64::from(sign) * omega);
        let mut factors = Vec::with_capacity(wanted.len());
        let mut condition: f64 = 1.0;
        for &s in wanted {
            let a = shifted(&self.sectors[s].generator, shift);
            let (lu, cond) = factor(&a).ok_or(FockError::Singular {
                omega,
                sign,
                condition: f64::INFINITY,
            })?;
            if !(cond.recip() > SINGULAR_RCOND) {
                return Err(FockError::Singular { omega, sign, condition: cond });
            }
            condition = condition.max(cond);
            factors.push((s, lu));
        }
        Ok(Resolvent { omega, sign, factors, condition })
    }

    /// x = ∫₀^∞ e^{sign·iωt} e^{Lt} v dt, i.e. the solution of
    /// (L + sign·iω)x = −v.
    pub fn resolvent_apply(&self, omega: f64, sign: i8, v: &CVector) -> Result<CVector, FockError> {
        self.check_len(v)?;
        let support = self.support(v);
        self.resolvent(omega, sign, Some(&support))?.apply(self, v)
    }

    /// Unit-trace null vector of the ΔN = 0 block.
    pub fn steady_state(&self) -> Result<DensityState, FockError> {
        let s = self.sector_index(0).ok_or(FockError::NoSteadyState)?;
        let sector = &self.sectors[s];
        let d = self.dim;
        let mut a = sector.generator.clone();
        let mut rhs = CVector::zeros(a.nrows());
        // replace the first row by the trace functional
        for (c, &idx) in sector.indices.iter().enumerate() {
            a[(0, c)] = if idx / d == idx % d { ONE } else { ZERO };
        }
        rhs[0] = ONE;
        let (lu, cond) = factor(&a).ok_or(FockError::NoSteadyState)?;
        if !(cond.recip() > SINGULAR_RCOND) {
            return Err(FockError::NoSteadyState);
        }
        let x = lu.solve(&rhs).ok_or(FockError::NoSteadyState)?;
        let mut full = CVector::zeros(d * d);
        self.scatter(s, &x, &mut full);
        Ok(DensityState::from_vector(d, &full))
    }
}

fn shifted(block: &CMatrix, shift: Complex64) -> CMatrix {
    let mut a = block.clone();
    for i in 0..a.nrows() {
        a[(i, i)] += shift;
    }
    a
}

type Lu = nalgebra::linalg::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>;

/// LU factorisation with a 1-norm condition estimate.
fn factor(a: &CMatrix) -> Option<(Lu, f64)> {
    let lu = a.clone().lu();
    let inv = lu.try_inverse()?;
    let cond = one_norm(a) * one_norm(&inv);
    if !cond.is_finite() {
        return None;
    }
    Some((lu, cond))
}

/// Largest entry modulus.
pub fn max_abs<R: Dim, C: Dim, S: RawStorage<Complex64, R, C>>(m: &Matrix<Complex64, R, C, S>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn one_norm(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn block_eigenvalues(block: &CMatrix) -> Vec<Complex64> {
    if block.is_empty() {
        return Vec::new();
    }
    let (_, t) = block.clone().schur().unpack();
    t.diagonal().iter().copied().collect()
}

/// Cached e^{Lt}.
#[derive(Debug, Clone)]
pub struct Propagator {
    blocks: Vec<CMatrix>,
}

impl Propagator {
    pub fn apply(&self, l: &Liouvillian, v: &CVector) -> CVector {
        let mut out = CVector::zeros(v.len());
        for (s, block) in self.blocks.iter().enumerate() {
            let part = l.gather(s, v);
            if part.iter().all(|z| *z == ZERO) {
                continue;
            }
            l.scatter(s, &(block * part), &mut out);
        }
        out
    }
}

/// Factored (L + sign·iω) on a set of sectors.
pub struct Resolvent {
    pub omega: f64,
    pub sign: i8,
    factors: Vec<(usize, Lu)>,
    /// Largest 1-norm condition number over the factored sectors.
    pub condition: f64,
}

impl Resolvent {
    /// Solve (L + sign·iω)x = −v. Components of `v` outside the factored
    /// sectors are an error.
    pub fn apply(&self, l: &Liouvillian, v: &CVector) -> Result<CVector, FockError> {
        let mut out = CVector::zeros(v.len());
        let mut covered = vec![false; l.sectors.len()];
        for (s, lu) in &self.factors {
            covered[*s] = true;
            let rhs = -l.gather(*s, v);
            let x = lu.solve(&rhs).ok_or(FockError::Singular {
                omega: self.omega,
                sign: self.sign,
                condition: self.condition,
            })?;
            l.scatter(*s, &x, &mut out);
        }
        if l.support(v).iter().any(|&s| !covered[s]) {
            return Err(FockError::DimensionMismatch {
                expected: self.factors.len(),
                got: l.support(v).len(),
            });
        }
        Ok(out)
    }
}

/// Hermitian unit-trace density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    pub matrix: CMatrix,
}

impl DensityState {
    pub fn vacuum(dim: usize) -> Self {
        let mut m = CMatrix::zeros(dim, dim);
        m[(0, 0)] = ONE;
        Self { matrix: m }
    }

    /// |ψ⟩⟨ψ| with ψ normalised.
    pub fn pure(psi: &CVector) -> Self {
        let psi = psi / Complex64::new(psi.norm(), 0.0);
        Self { matrix: &psi * psi.adjoint() }
    }

    pub fn from_vector(dim: usize, v: &CVector) -> Self {
        Self { matrix: CMatrix::from_fn(dim, dim, |i, j| v[i * dim + j]) }
    }

    pub fn to_vector(&self) -> CVector {
        let d = self.matrix.nrows();
        CVector::from_fn(d * d, |idx, _| self.matrix[(idx / d, idx % d)])
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// max |ρ − ρ†|.
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigen().eigenvalues.min()
    }

    /// Tr(O ρ).
    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        (op * &self.matrix).trace()
    }
}

/// Tr(O ρ) on a vectorised state.
pub fn expectation(op: &CMatrix, v: &CVector) -> Complex64 {
    let d = op.nrows();
    let mut acc = ZERO;
    for i in 0..d {
        for j in 0..d {
            acc += op[(j, i)] * v[i * d + j];
        }
    }
    acc
}

/// Result of fitting A·e^{(−Γ−iΩ)t} to a sampled series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub rate: f64,
    pub frequency: f64,
    pub amplitude: Complex64,
    /// ‖y − fit‖ / ‖y‖.
    pub residual: f64,
    pub converged: bool,
}

/// Least-squares single-exponential fit of a uniformly sampled series
/// starting at t = 0: one-step Prony estimate refined by Gauss–Newton.
pub fn fit_decay_rate(series: &[Complex64], dt: f64) -> Result<DecayFit, FockError> {
    if series.len() < 3 || !(dt > 0.0) {
        return Err(FockError::SeriesTooShort);
    }
    let (mut num, mut den) = (ZERO, 0.0);
    for w in series.windows(2) {
        num += w[0].conj() * w[1];
        den += w[0].norm_sqr();
    }
    let mut lambda = if den > 0.0 && num != ZERO { (num / den).ln() / dt } else { ZERO };
    let mut amp = best_amplitude(series, dt, lambda);
    let mut residual = fit_residual(series, dt, amp, lambda);
    for _ in 0..100 {
        // normal equations of the holomorphic model f = A e^{λt}
        let mut jtj = [[ZERO; 2]; 2];
        let mut jtr = [ZERO; 2];
        for (k, y) in series.iter().enumerate() {
            let t = dt * k as f64;
            let e = (lambda * t).exp();
            let g = [e, amp * t * e];
            let r = y - amp * e;
            for p in 0..2 {
                jtr[p] += g[p].conj() * r;
                for q in 0..2 {
                    jtj[p][q] += g[p].conj() * g[q];
                }
            }
        }
        let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
        if det.norm() == 0.0 {
            break;
        }
        let da = (jtj[1][1] * jtr[0] - jtj[0][1] * jtr[1]) / det;
        let dl = (jtj[0][0] * jtr[1] - jtj[1][0] * jtr[0]) / det;
        let mut step = 1.0;
        let mut improved = false;
        while step > 1e-6 {
            let (a2, l2) = (amp + da * step, lambda + dl * step);
            let r2 = fit_residual(series, dt, a2, l2);
            if r2 <= residual {
                let gain = residual - r2;
                amp = a2;
                lambda = l2;
                residual = r2;
                improved = gain > 1e-15 * residual.max(1e-300);
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok(DecayFit {
        rate: -lambda.re,
        frequency: -lambda.im,
        amplitude: amp,
        residual,
        converged: residual <= FIT_RESIDUAL_LIMIT,
    })
}

fn best_amplitude(series: &[Complex64], dt: f64, lambda: Complex64) -> Complex64 {
    let (mut num, mut den) = (ZERO, 0.0);
    for (k, y) in series.iter().enumerate() {
        let e = (lambda * dt * k as f64).exp();
        num += e.conj() * y;
        den += e.norm_sqr();
    }
    if den > 0.0 {
        num / den
    } else {
        ZERO
    }
}

fn fit_residual(series: &[Complex64], dt: f64, amp: Complex64, lambda: Complex64) -> f64 {
    let (mut err, mut norm) = (0.0, 0.0);
    for (k, y) in series.iter().enumerate() {
        let f = amp * (lambda * dt * k as f64).exp();
        err += (y - f).norm_sqr();
        norm += y.norm_sqr();
    }
    if norm > 0.0 {
        (err / norm).sqrt()
    } else {
        0.0
    }
}
