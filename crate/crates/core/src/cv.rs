//! Truncated two-mode states in the Fock basis: the two-mode squeezed vacuum
//! (NOPA state), per-block maximally entangled states, block mixtures and
//! block projections.
//!
//! Two-mode amplitudes are stored row-major in the first mode: the amplitude
//! of `|k1>|k2>` sits at `k1 * trunc + k2`.

use crate::bloch::AmbientState;
use crate::error::{check_dim, invalid, Error, Result};
use crate::tensor::{ComplexVector, SparseMatrix, C64, ZERO};

/// Default per-mode Fock truncation.
pub const DEFAULT_TRUNCATION: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct FockKet {
    modes: usize,
    trunc: usize,
    amplitudes: ComplexVector,
    tail_mass: f64,
}

impl FockKet {
    /// Wraps amplitudes over `trunc^modes` levels. The vector must be normalized.
    pub fn new(modes: usize, trunc: usize, amplitudes: ComplexVector) -> Result<Self> {
        if !(1..=2).contains(&modes) || trunc == 0 {
            return invalid(format!(
                "need 1 or 2 modes and trunc >= 1, got modes={modes}, trunc={trunc}"
            ));
        }
        check_dim(trunc.pow(modes as u32), amplitudes.dim())?;
        if !amplitudes.is_normalized(crate::ALGEBRA_TOL) {
            return invalid("Fock ket must be normalized");
        }
        Ok(Self {
            modes,
            trunc,
            amplitudes,
            tail_mass: 0.0,
        })
    }

    /// `|a> ⊗ |b>` for two normalized single-mode kets of equal truncation.
    pub fn product(a: &ComplexVector, b: &ComplexVector) -> Result<Self> {
        check_dim(a.dim(), b.dim())?;
        Self::new(2, a.dim(), a.kron(b))
    }

    /// `(1/sqrt(N)) sum_j |j>|j>`, the finite analog of the EPR state.
    pub fn uniform(trunc: usize) -> Result<Self> {
        let amp = 1.0 / (trunc as f64).sqrt();
        diagonal_ket(trunc, |_| amp, 0.0)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    /// Probability weight lost to truncation before any renormalization.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn amplitude(&self, k1: usize, k2: usize) -> C64 {
        assert_eq!(self.modes, 2, "two-mode amplitude requested from a single-mode ket");
        self.amplitudes.entries()[k1 * self.trunc + k2]
    }
}

fn diagonal_ket(trunc: usize, amp: impl Fn(usize) -> f64, tail_mass: f64) -> Result<FockKet> {
    if trunc == 0 {
        return invalid("truncation must be at least 1");
    }
    let mut data = vec![ZERO; trunc * trunc];
    for k in 0..trunc {
        data[k * trunc + k] = C64::new(amp(k), 0.0);
    }
    Ok(FockKet {
        modes: 2,
        trunc,
        amplitudes: ComplexVector::new(data)?,
        tail_mass,
    })
}

/// Truncated, renormalized two-mode squeezed vacuum
/// `sum_k tanh(r)^k / cosh(r) |k>|k>`.
pub fn nopa(r: f64, trunc: usize) -> Result<FockKet> {
    nopa_with(r, trunc, true)
}

/// As [`nopa`], optionally leaving the truncated amplitudes unnormalized
/// (their norm is then `1 - tail_mass`).
pub fn nopa_with(r: f64, trunc: usize, renormalize: bool) -> Result<FockKet> {
    if !r.is_finite() || r < 0.0 {
        return invalid(format!("squeezing parameter must be finite and >= 0, got {r}"));
    }
    if trunc == 0 {
        return invalid("truncation must be at least 1");
    }
    let t = r.tanh();
    // sum_{k >= trunc} (1 - t²) t^{2k} = t^{2 trunc}
    let tail_mass = (t * t).powi(trunc as i32);
    let norm = if renormalize { (1.0 - tail_mass).sqrt() } else { 1.0 };
    let lead = 1.0 / (r.cosh() * norm);
    diagonal_ket(trunc, |k| lead * t.powi(k as i32), tail_mass)
}

/// `(1/sqrt(n)) sum_j |n m + j>|n m + j>`.
pub fn max_entangled_block(n: usize, m: usize, trunc: usize) -> Result<FockKet> {
    if n < 1 || n * (m + 1) > trunc {
        return invalid(format!("block {m} of size {n} does not fit in truncation {trunc}"));
    }
    let amp = 1.0 / (n as f64).sqrt();
    diagonal_ket(
        trunc,
        |k| if (n * m..n * (m + 1)).contains(&k) { amp } else { 0.0 },
        0.0,
    )
}

/// `sum_m p(m) |psi(m)><psi(m)|` over disjoint blocks, kept in weight form.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMixture {
    n: usize,
    trunc: usize,
    weights: Vec<f64>,
    deficit: f64,
}

impl BlockMixture {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    /// Renormalized weights.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `1 - sum p(m)` of the weights as supplied.
    pub fn deficit(&self) -> f64 {
        self.deficit
    }

    pub fn component(&self, m: usize) -> Result<FockKet> {
        max_entangled_block(self.n, m, self.trunc)
    }
}

/// Block mixture of maximally entangled block states. Weights are
/// renormalized to sum to one and the shortfall is recorded.
pub fn block_mixture_w(n: usize, weights: &[f64], trunc: usize) -> Result<BlockMixture> {
    if n < 2 {
        return invalid(format!("block size must be at least 2, got {n}"));
    }
    if weights.iter().any(|&p| !p.is_finite() || p < 0.0) {
        return invalid("mixture weights must be finite and nonnegative");
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return invalid("mixture weights sum to zero");
    }
    if let Some(m) = weights.iter().rposition(|&p| p > 0.0) {
        if n * (m + 1) > trunc {
            return invalid(format!("block {m} of size {n} does not fit in truncation {trunc}"));
        }
    }
    Ok(BlockMixture {
        n,
        trunc,
        weights: weights.iter().map(|p| p / total).collect(),
        deficit: 1.0 - total,
    })
}

/// `p(m) = (1 - lambda) lambda^m` for `m = 0..count`.
pub fn geometric_weights(lambda: f64, count: usize) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&lambda) {
        return invalid(format!("geometric ratio must lie in [0, 1), got {lambda}"));
    }
    Ok((0..count).map(|m| (1.0 - lambda) * lambda.powi(m as i32)).collect())
}

/// Amplitudes of a two-mode ket on the `n x n` levels
/// `|n m1 + j>|n m2 + k>`, renormalized, together with their weight.
pub fn project_block(ket: &FockKet, n: usize, m1: usize, m2: usize) -> Result<(ComplexVector, f64)> {
    if ket.modes != 2 {
        return invalid("block projection needs a two-mode ket");
    }
    if n == 0 || n * (m1.max(m2) + 1) > ket.trunc {
        return invalid(format!(
            "blocks ({m1}, {m2}) of size {n} exceed truncation {}",
            ket.trunc
        ));
    }
    let data: Vec<C64> = (0..n)
        .flat_map(|j| (0..n).map(move |k| (j, k)))
        .map(|(j, k)| ket.amplitude(n * m1 + j, n * m2 + k))
        .collect();
    let projected = ComplexVector::new(data)?;
    let weight = projected.norm_sqr();
    if weight == 0.0 {
        return Err(Error::EmptyProjection { m1, m2 });
    }
    Ok((projected.normalized()?, weight))
}

impl AmbientState for FockKet {
    fn ambient(&self) -> usize {
        self.trunc
    }

    fn parties(&self) -> usize {
        self.modes
    }

    fn expectation_of(&self, op: &SparseMatrix) -> Result<C64> {
        op.sandwich(&self.amplitudes)
    }
}

impl AmbientState for BlockMixture {
    fn ambient(&self) -> usize {
        self.trunc
    }

    fn parties(&self) -> usize {
        2
    }

    fn expectation_of(&self, op: &SparseMatrix) -> Result<C64> {
        check_dim(self.trunc * self.trunc, op.dim())?;
        let n = self.n;
        let amp2 = 1.0 / n as f64;
        let diag = |k: usize| k * self.trunc + k;
        let mut total = ZERO;
        for (m, &p) in self.weights.iter().enumerate().filter(|(_, &p)| p > 0.0) {
            let levels = n * m..n * (m + 1);
            let block: C64 = levels
                .clone()
                .flat_map(|a| levels.clone().map(move |b| (a, b)))
                .map(|(a, b)| op.get(diag(a), diag(b)))
                .sum();
            total += block * (p * amp2);
        }
        Ok(total)
    }
}
