//! Generalized Bloch tensors and the state/observable correspondence between
//! L qudits and L truncated modes.
//!
//! A Hermitian operator on `(C^n)^{⊗L}` is expanded over products of the basis
//! `g_0 = 1_n, g_x = s_x` (x = 1..n²-1, canonical generator order):
//!
//! ```text
//! op = sum_{x_1..x_L} t_{x_1..x_L} g_{x_1} ⊗ ... ⊗ g_{x_L}
//! ```
//!
//! Because `Tr(1_n 1_n) = n` and `Tr(s_x s_y) = 2 δ_xy`, a coefficient is
//! recovered as `Tr(op g_{x_1}⊗...⊗g_{x_L}) / prod_i c_i` with `c_i = n` for an
//! identity slot and `c_i = 2` for a generator slot.
//!
//! Full-correlation observables (no identity slot) lift to the ambient space
//! by replacing every `s_x` with its block-replicated `S_x`. For states, a
//! whole class of ambient states reproduces the qudit expectation values; the
//! [`induced_qudit_state`] map goes the other way, reading the correlations of
//! an ambient state back into an n-level state.

use rayon::prelude::*;

use crate::embedding::{build_embedded, used_subspace_projector, EmbeddedGeneratorSet};
use crate::error::{check_dim, invalid, Error, Result};
use crate::su::{build_generators, GeneratorSet};
use crate::tensor::{real_part, ComplexMatrix, ComplexVector, SparseMatrix, C64, ONE, ZERO};
use crate::{ALGEBRA_TOL, EXPECTATION_TOL};

/// Weight outside the block-covered subspace above which a warning is attached.
pub const TAIL_WARNING_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorKind {
    State,
    Observable,
}

/// Real coefficient table `t_{x_1..x_L}`, `x_i` in `0..n²` with 0 the identity slot.
///
/// Flat layout: party 0 is the most significant digit in base `n²`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochTensor {
    n: usize,
    parties: usize,
    kind: TensorKind,
    coeffs: Vec<f64>,
}

impl BlochTensor {
    pub fn new(n: usize, parties: usize, kind: TensorKind, coeffs: Vec<f64>) -> Result<Self> {
        if n < 2 || parties == 0 {
            return invalid(format!("need n >= 2 and at least one party, got n={n}, L={parties}"));
        }
        check_dim((n * n).pow(parties as u32), coeffs.len())?;
        if coeffs.iter().any(|c| !c.is_finite()) {
            return invalid("Bloch coefficients must be finite");
        }
        if kind == TensorKind::State {
            let expected = 1.0 / (n as f64).powi(parties as i32);
            if (coeffs[0] - expected).abs() > ALGEBRA_TOL {
                return invalid(format!("state tensor needs t_0..0 = {expected}, got {}", coeffs[0]));
            }
        }
        Ok(Self {
            n,
            parties,
            kind,
            coeffs,
        })
    }

    /// Observable with only full-correlation terms, `value(x)` receiving
    /// 0-based generator indices (slot index minus one).
    pub fn full_correlation_observable(
        n: usize,
        parties: usize,
        mut value: impl FnMut(&[usize]) -> f64,
    ) -> Result<Self> {
        let len = (n * n).pow(parties as u32);
        let mut coeffs = vec![0.0; len];
        let mut gens = vec![0; parties];
        for (flat, c) in coeffs.iter_mut().enumerate() {
            let idx = unflatten(flat, n * n, parties);
            if idx.iter().all(|&x| x > 0) {
                for (g, x) in gens.iter_mut().zip(&idx) {
                    *g = x - 1;
                }
                *c = value(&gens);
            }
        }
        Self::new(n, parties, TensorKind::Observable, coeffs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn kind(&self) -> TensorKind {
        self.kind
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient at slot indices (0 = identity).
    pub fn get(&self, index: &[usize]) -> f64 {
        assert_eq!(index.len(), self.parties, "index length must equal party count");
        self.coeffs[flatten(index, self.n * self.n)]
    }

    /// Slot indices of a flat position.
    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        unflatten(flat, self.n * self.n, self.parties)
    }

    /// Largest coefficient on any term that has at least one identity slot
    /// (the all-identity term included).
    pub fn identity_slot_magnitude(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|&(flat, _)| self.multi_index(flat).contains(&0))
            .map(|(_, c)| c.abs())
            .fold(0.0, f64::max)
    }

    fn full_correlation_terms(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.coeffs.iter().enumerate().filter_map(move |(flat, &c)| {
            let idx = self.multi_index(flat);
            idx.iter().all(|&x| x > 0).then_some((idx, c))
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.coeffs.len(), other.coeffs.len(), "tensor shape mismatch");
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn flatten(index: &[usize], base: usize) -> usize {
    index.iter().fold(0, |acc, &x| acc * base + x)
}

fn unflatten(mut flat: usize, base: usize, parties: usize) -> Vec<usize> {
    let mut idx = vec![0; parties];
    for slot in idx.iter_mut().rev() {
        *slot = flat % base;
        flat /= base;
    }
    idx
}

/// `[1_n, s_1, ..., s_{n²-1}]` as sparse matrices.
fn qudit_basis(gens: &GeneratorSet) -> Vec<SparseMatrix> {
    std::iter::once(SparseMatrix::identity(gens.n()))
        .chain(gens.generators().iter().map(SparseMatrix::from_dense))
        .collect()
}

fn slot_norm(index: &[usize], n: usize) -> f64 {
    index.iter().map(|&x| if x == 0 { n as f64 } else { 2.0 }).product()
}

/// Expands a Hermitian operator on `L` qudits into its Bloch tensor.
pub fn decompose(op: &ComplexMatrix, n: usize, parties: usize, kind: TensorKind) -> Result<BlochTensor> {
    if n < 2 || parties == 0 {
        return invalid(format!("need n >= 2 and at least one party, got n={n}, L={parties}"));
    }
    check_dim(n.pow(parties as u32), op.dim())?;
    if !op.is_hermitian(ALGEBRA_TOL) {
        return invalid("operator is not Hermitian");
    }
    if kind == TensorKind::State && (op.trace() - ONE).norm() > ALGEBRA_TOL {
        return invalid("state must have unit trace");
    }
    let basis = qudit_basis(&build_generators(n)?);
    let len = (n * n).pow(parties as u32);
    let coeffs = (0..len)
        .map(|flat| {
            let idx = unflatten(flat, n * n, parties);
            let factors: Vec<&SparseMatrix> = idx.iter().map(|&x| &basis[x]).collect();
            let value = SparseMatrix::kron_all(&factors).trace_with_dense(op)?;
            Ok(real_part(value, EXPECTATION_TOL)? / slot_norm(&idx, n))
        })
        .collect::<Result<Vec<_>>>()?;
    BlochTensor::new(n, parties, kind, coeffs)
}

/// `sum_x t_x g_{x_1} ⊗ ... ⊗ g_{x_L}` as a dense matrix.
pub fn reconstruct(t: &BlochTensor) -> ComplexMatrix {
    let basis = qudit_basis(&build_generators(t.n).expect("n >= 2 checked at construction"));
    let dim = t.n.pow(t.parties as u32);
    let terms: Vec<(C64, SparseMatrix)> = t
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0.0)
        .map(|(flat, &c)| {
            let idx = t.multi_index(flat);
            let factors: Vec<&SparseMatrix> = idx.iter().map(|&x| &basis[x]).collect();
            (C64::new(c, 0.0), SparseMatrix::kron_all(&factors))
        })
        .collect();
    SparseMatrix::linear_combination(dim, terms.iter().map(|(c, m)| (*c, m))).to_dense()
}

fn check_pair(state: &BlochTensor, obs: &BlochTensor) -> Result<()> {
    if state.n != obs.n || state.parties != obs.parties {
        return invalid(format!(
            "tensor shapes differ: state (n={}, L={}), observable (n={}, L={})",
            state.n, state.parties, obs.n, obs.parties
        ));
    }
    if state.kind != TensorKind::State || obs.kind != TensorKind::Observable {
        return invalid("expected a state tensor and an observable tensor");
    }
    Ok(())
}

/// `2^L sum_{x_i >= 1} t_x a_x`.
pub fn bloch_expectation(state: &BlochTensor, obs: &BlochTensor) -> Result<f64> {
    check_pair(state, obs)?;
    let sum: f64 = state
        .full_correlation_terms()
        .map(|(idx, t)| t * obs.coeffs[flatten(&idx, obs.n * obs.n)])
        .sum();
    Ok(2f64.powi(state.parties as i32) * sum)
}

/// `A = sum a_x S_{x_1} ⊗ ... ⊗ S_{x_L}` on `N^L` levels. Observables with
/// identity-slot terms have no lifted counterpart and are rejected.
pub fn lift_observable(obs: &BlochTensor, embedded: &EmbeddedGeneratorSet) -> Result<SparseMatrix> {
    if obs.kind != TensorKind::Observable {
        return invalid("only observable tensors can be lifted");
    }
    if obs.n != embedded.n() {
        return invalid(format!(
            "observable is for n={}, embedding for n={}",
            obs.n,
            embedded.n()
        ));
    }
    if obs.identity_slot_magnitude() > ALGEBRA_TOL {
        return invalid("observable has identity-slot terms; only full-correlation observables lift");
    }
    let dim = embedded.ambient().pow(obs.parties as u32);
    let terms: Vec<(C64, SparseMatrix)> = obs
        .full_correlation_terms()
        .filter(|&(_, a)| a != 0.0)
        .map(|(idx, a)| {
            let factors: Vec<&SparseMatrix> = idx.iter().map(|&x| embedded.generator(x - 1)).collect();
            (C64::new(a, 0.0), SparseMatrix::kron_all(&factors))
        })
        .collect();
    Ok(SparseMatrix::linear_combination(
        dim,
        terms.iter().map(|(c, m)| (*c, m)),
    ))
}

/// Coefficients `T_x = t_x / floor(N/n)^L` representing the class of ambient
/// states that share the correlations of a qudit state.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassCoefficients {
    n: usize,
    parties: usize,
    ambient: usize,
    /// Same flat layout as [`BlochTensor`]; identity-slot entries are zero.
    values: Vec<f64>,
}

impl ClassCoefficients {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn blocks(&self) -> usize {
        self.ambient / self.n
    }

    /// `T` at slot indices, each in `1..n²`.
    pub fn get(&self, index: &[usize]) -> f64 {
        assert!(
            index.iter().all(|&x| x > 0),
            "class coefficients carry generator slots only"
        );
        self.values[flatten(index, self.n * self.n)]
    }
}

pub fn class_coefficients(t: &BlochTensor, ambient: usize) -> Result<ClassCoefficients> {
    if t.kind != TensorKind::State {
        return invalid("class coefficients are defined for state tensors");
    }
    if ambient < t.n {
        return invalid(format!("ambient dimension {ambient} smaller than n={}", t.n));
    }
    let scale = ((ambient / t.n) as f64).powi(t.parties as i32);
    let values = t
        .coeffs
        .iter()
        .enumerate()
        .map(|(flat, &c)| {
            if t.multi_index(flat).contains(&0) {
                0.0
            } else {
                c / scale
            }
        })
        .collect();
    Ok(ClassCoefficients {
        n: t.n,
        parties: t.parties,
        ambient,
        values,
    })
}

/// `(2 floor(N/n))^L sum T_x a_x`.
pub fn class_expectation(class: &ClassCoefficients, obs: &BlochTensor) -> Result<f64> {
    if class.n != obs.n || class.parties != obs.parties || obs.kind != TensorKind::Observable {
        return invalid("class coefficients and observable do not match");
    }
    let sum: f64 = class.values.iter().zip(&obs.coeffs).map(|(t, a)| t * a).sum();
    Ok((2.0 * class.blocks() as f64).powi(class.parties as i32) * sum)
}

/// An L-mode state on `N^L` levels that can report expectation values of
/// sparse operators.
pub trait AmbientState: Sync {
    /// Per-mode dimension `N`.
    fn ambient(&self) -> usize;

    fn parties(&self) -> usize;

    /// `Tr(Ω op)` for an operator on `N^L` levels.
    fn expectation_of(&self, op: &SparseMatrix) -> Result<C64>;
}

/// Density operator on `N^L` levels.
#[derive(Debug, Clone)]
pub struct AmbientDensity {
    matrix: ComplexMatrix,
    ambient: usize,
    parties: usize,
}

impl AmbientDensity {
    pub fn new(matrix: ComplexMatrix, ambient: usize, parties: usize) -> Result<Self> {
        check_dim(ambient.pow(parties as u32), matrix.dim())?;
        if !matrix.is_hermitian(ALGEBRA_TOL) {
            return invalid("density operator is not Hermitian");
        }
        if (matrix.trace() - ONE).norm() > ALGEBRA_TOL {
            return invalid("density operator must have unit trace");
        }
        Ok(Self {
            matrix,
            ambient,
            parties,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

impl AmbientState for AmbientDensity {
    fn ambient(&self) -> usize {
        self.ambient
    }

    fn parties(&self) -> usize {
        self.parties
    }

    fn expectation_of(&self, op: &SparseMatrix) -> Result<C64> {
        op.trace_with_dense(&self.matrix)
    }
}

/// Ambient state `sum_m p(m) (V_m1 ⊗ ... ⊗ V_mL) ρ (...)†`, where `V_m`
/// places the n levels of a qudit on block `m`. Weights are indexed by
/// block tuples (party 0 most significant) and must sum to one.
pub fn block_copy_state(
    rho: &ComplexMatrix,
    n: usize,
    parties: usize,
    ambient: usize,
    weights: &[f64],
) -> Result<AmbientDensity> {
    check_dim(n.pow(parties as u32), rho.dim())?;
    if n < 2 || n > ambient {
        return invalid(format!("need 2 <= n <= N, got n={n}, N={ambient}"));
    }
    let blocks = ambient / n;
    check_dim(blocks.pow(parties as u32), weights.len())?;
    if weights.iter().any(|&p| p < 0.0) {
        return invalid("block weights must be nonnegative");
    }
    if (weights.iter().sum::<f64>() - 1.0).abs() > ALGEBRA_TOL {
        return invalid("block weights must sum to one");
    }
    let dim = ambient.pow(parties as u32);
    let qdim = rho.dim();
    let mut data = vec![ZERO; dim * dim];
    for (tuple, &p) in weights.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let ms = unflatten(tuple, blocks, parties);
        let place = |q: usize| {
            let levels = unflatten(q, n, parties);
            levels
                .iter()
                .zip(&ms)
                .fold(0, |acc, (&j, &m)| acc * ambient + n * m + j)
        };
        let positions: Vec<usize> = (0..qdim).map(place).collect();
        for (a, &pa) in positions.iter().enumerate() {
            for (b, &pb) in positions.iter().enumerate() {
                data[pa * dim + pb] += rho.get(a, b) * p;
            }
        }
    }
    AmbientDensity::new(ComplexMatrix::new(dim, data)?, ambient, parties)
}

/// Qudit state read off an ambient state through its lifted correlations.
#[derive(Debug, Clone)]
pub struct InducedState {
    /// Bloch tensor of the induced state; `t_0..0 = w / n^L` where `w` is the
    /// weight inside the block-covered subspace.
    pub tensor: BlochTensor,
    pub density: ComplexMatrix,
    pub min_eigenvalue: f64,
    /// `Tr(Ω Π^{⊗L})`, Π projecting onto the block-covered levels.
    pub used_weight: f64,
    pub warning: Option<String>,
}

impl InducedState {
    /// Schmidt coefficients (descending) of the dominant eigenvector of a
    /// two-party induced state.
    pub fn schmidt_coefficients(&self) -> Result<Vec<f64>> {
        if self.tensor.parties != 2 {
            return invalid("Schmidt coefficients need a two-party state");
        }
        let (_, vectors) = self.density.hermitian_eigen()?;
        let leading = vectors.last().expect("nonempty spectrum");
        schmidt_coefficients(leading, self.tensor.n)
    }
}

/// Schmidt coefficients (descending) of a pure state on `n x n` levels.
pub fn schmidt_coefficients(psi: &ComplexVector, n: usize) -> Result<Vec<f64>> {
    check_dim(n * n, psi.dim())?;
    let m = ComplexMatrix::new(n, psi.entries().to_vec())?;
    Ok(m.singular_values())
}

/// `<psi|rho|psi>`.
pub fn pure_fidelity(rho: &ComplexMatrix, psi: &ComplexVector) -> Result<f64> {
    let value = psi.inner(&rho.apply(psi)?)?;
    real_part(value, EXPECTATION_TOL)
}

/// Reads the correlations `<S_{x_1} ⊗ ... ⊗ S_{x_L}>_Ω` of an ambient state
/// into a qudit state. Identity slots use the projector Π onto the
/// block-covered levels, so block-diagonal members of a class map back onto
/// the qudit state they represent.
pub fn induced_qudit_state(omega: &dyn AmbientState, n: usize) -> Result<InducedState> {
    let ambient = omega.ambient();
    let parties = omega.parties();
    let embedded = build_embedded(ambient, n)?;
    let basis: Vec<SparseMatrix> = std::iter::once(used_subspace_projector(ambient, n)?)
        .chain(embedded.generators().iter().cloned())
        .collect();
    let len = (n * n).pow(parties as u32);
    let coeffs = (0..len)
        .into_par_iter()
        .map(|flat| {
            let idx = unflatten(flat, n * n, parties);
            let factors: Vec<&SparseMatrix> = idx.iter().map(|&x| &basis[x]).collect();
            let value = omega.expectation_of(&SparseMatrix::kron_all(&factors))?;
            Ok(real_part(value, EXPECTATION_TOL)? / slot_norm(&idx, n))
        })
        .collect::<Result<Vec<f64>>>()?;
    let used_weight = coeffs[0] * (n as f64).powi(parties as i32);
    let tensor = BlochTensor {
        n,
        parties,
        kind: TensorKind::State,
        coeffs,
    };
    let density = reconstruct(&tensor);
    let min_eigenvalue = density
        .hermitian_eigenvalues()?
        .first()
        .copied()
        .ok_or_else(|| Error::Numerical("empty spectrum".into()))?;
    let lost = 1.0 - used_weight;
    let warning = (lost > TAIL_WARNING_THRESHOLD).then(|| {
        format!(
            "state has weight {lost:.3e} outside the {} block-covered levels per mode",
            n * embedded.blocks()
        )
    });
    Ok(InducedState {
        tensor,
        density,
        min_eigenvalue,
        used_weight,
        warning,
    })
}
