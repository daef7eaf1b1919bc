//! Defining-representation generators of SU(n) built from transition
//! projectors, and their numerically computed structure constants.
//!
//! Generators come in a fixed canonical order: every symmetric `u_jk`
//! (pairs `j < k` in lexicographic order), then every antisymmetric `v_jk`
//! in the same pair order, then the diagonal `w_1 .. w_{n-1}`. That order
//! fixes the meaning of every Bloch-tensor index in the crate.

use std::fmt;

use crate::error::{check_dim, invalid, Error, Result};
use crate::tensor::{commutator, trace_product, ComplexMatrix, C64, I, ONE, ZERO};
use crate::ALGEBRA_TOL;

/// Name of a generator. Level labels are 1-based, as in `|1>, ..., |n>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorLabel {
    /// `P_jk + P_kj`
    U(usize, usize),
    /// `i (P_jk - P_kj)`
    V(usize, usize),
    /// `-sqrt(2/(l(l+1))) (P_11 + ... + P_ll - l P_{l+1,l+1})`
    W(usize),
}

impl fmt::Display for GeneratorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorLabel::U(j, k) => write!(f, "u{j}{k}"),
            GeneratorLabel::V(j, k) => write!(f, "v{j}{k}"),
            GeneratorLabel::W(l) => write!(f, "w{l}"),
        }
    }
}

/// Canonical label sequence for dimension `n`.
pub fn canonical_labels(n: usize) -> Vec<GeneratorLabel> {
    let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|j| (j + 1..=n).map(move |k| (j, k))).collect();
    pairs
        .iter()
        .map(|&(j, k)| GeneratorLabel::U(j, k))
        .chain(pairs.iter().map(|&(j, k)| GeneratorLabel::V(j, k)))
        .chain((1..n).map(GeneratorLabel::W))
        .collect()
}

/// Entries `(row, col, value)` of a generator, 0-based.
pub(crate) fn generator_entries(label: GeneratorLabel) -> Vec<(usize, usize, C64)> {
    match label {
        GeneratorLabel::U(j, k) => vec![(j - 1, k - 1, ONE), (k - 1, j - 1, ONE)],
        GeneratorLabel::V(j, k) => vec![(j - 1, k - 1, I), (k - 1, j - 1, -I)],
        GeneratorLabel::W(l) => {
            let lf = l as f64;
            let norm = -(2.0 / (lf * (lf + 1.0))).sqrt();
            let mut e: Vec<_> = (0..l).map(|d| (d, d, C64::new(norm, 0.0))).collect();
            e.push((l, l, C64::new(-lf * norm, 0.0)));
            e
        }
    }
}

/// Real table `f[j][k][l]` of size `d^3`, `d = n^2 - 1`, indexed 0-based in
/// canonical generator order.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    size: usize,
    data: Vec<f64>,
}

impl StructureConstants {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, j: usize, k: usize, l: usize) -> f64 {
        self.data[(j * self.size + k) * self.size + l]
    }

    /// Nonzero entries as `(j, k, l, value)`, skipping `|value| <= tol`.
    pub fn nonzero(&self, tol: f64) -> Vec<(usize, usize, usize, f64)> {
        let d = self.size;
        (0..d)
            .flat_map(|j| (0..d).flat_map(move |k| (0..d).map(move |l| (j, k, l))))
            .map(|(j, k, l)| (j, k, l, self.get(j, k, l)))
            .filter(|e| e.3.abs() > tol)
            .collect()
    }

    /// Largest violation of total antisymmetry over all index swaps.
    pub fn antisymmetry_residual(&self) -> f64 {
        let d = self.size;
        let mut worst = 0.0f64;
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let f = self.get(j, k, l);
                    worst = worst
                        .max((f + self.get(k, j, l)).abs())
                        .max((f + self.get(j, l, k)).abs())
                        .max((f + self.get(l, k, j)).abs());
                }
            }
        }
        worst
    }
}

/// The `n^2 - 1` generators of SU(n) with their structure constants.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    n: usize,
    labels: Vec<GeneratorLabel>,
    generators: Vec<ComplexMatrix>,
    structure: StructureConstants,
}

impl GeneratorSet {
    /// Wraps an arbitrary list of `n^2 - 1` Hermitian `n x n` matrices and
    /// computes their structure constants. Labels are taken from the
    /// canonical order.
    pub fn from_matrices(n: usize, generators: Vec<ComplexMatrix>) -> Result<Self> {
        if n < 2 {
            return invalid(format!("SU(n) needs n >= 2, got {n}"));
        }
        check_dim(n * n - 1, generators.len())?;
        for g in &generators {
            check_dim(n, g.dim())?;
            if !g.is_hermitian(ALGEBRA_TOL) {
                return invalid("generators must be Hermitian");
            }
        }
        let structure = compute_structure_constants(&generators)?;
        Ok(Self {
            n,
            labels: canonical_labels(n),
            generators,
            structure,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    pub fn generator(&self, index: usize) -> &ComplexMatrix {
        &self.generators[index]
    }

    pub fn labels(&self) -> &[GeneratorLabel] {
        &self.labels
    }

    pub fn structure_constants(&self) -> &StructureConstants {
        &self.structure
    }
}

/// Builds `u_jk`, `v_jk` and `w_l` for dimension `n` in canonical order.
pub fn build_generators(n: usize) -> Result<GeneratorSet> {
    if n < 2 {
        return invalid(format!("SU(n) needs n >= 2, got {n}"));
    }
    let generators = canonical_labels(n)
        .into_iter()
        .map(|label| {
            let mut m = vec![ZERO; n * n];
            for (r, c, v) in generator_entries(label) {
                m[r * n + c] = v;
            }
            ComplexMatrix::new(n, m)
        })
        .collect::<Result<Vec<_>>>()?;
    GeneratorSet::from_matrices(n, generators)
}

/// `f_jkl = -(i/4) Tr([s_j, s_k] s_l)`; the discarded imaginary part must
/// stay below `1e-12`.
pub fn structure_constants(gens: &GeneratorSet) -> Result<StructureConstants> {
    compute_structure_constants(&gens.generators)
}

fn compute_structure_constants(generators: &[ComplexMatrix]) -> Result<StructureConstants> {
    let d = generators.len();
    let mut data = vec![0.0; d * d * d];
    let quarter = C64::new(0.0, -0.25);
    for j in 0..d {
        for k in j + 1..d {
            let c = commutator(&generators[j], &generators[k])?;
            for l in 0..d {
                let value = quarter * trace_product(&c, &generators[l])?;
                if value.im.abs() >= ALGEBRA_TOL {
                    return Err(Error::Numerical(format!(
                        "structure constant f[{j}][{k}][{l}] has imaginary residue {:e}",
                        value.im
                    )));
                }
                data[(j * d + k) * d + l] = value.re;
                data[(k * d + j) * d + l] = -value.re;
            }
        }
    }
    Ok(StructureConstants { size: d, data })
}

/// Largest entrywise residual of `[s_j, s_k] - 2i sum_l f_jkl s_l` over all pairs.
pub fn verify_algebra(gens: &GeneratorSet) -> f64 {
    let d = gens.len();
    let n = gens.n;
    let f = &gens.structure;
    let mut worst = 0.0f64;
    for j in 0..d {
        for k in 0..d {
            let lhs = commutator(&gens.generators[j], &gens.generators[k]).expect("equal dims");
            let mut rhs = ComplexMatrix::zeros(n);
            for l in 0..d {
                let coeff = f.get(j, k, l);
                if coeff != 0.0 {
                    rhs = &rhs + &gens.generators[l].scale(C64::new(0.0, 2.0 * coeff));
                }
            }
            worst = worst.max(lhs.max_abs_diff(&rhs));
        }
    }
    worst
}

/// Largest deviation from `Tr(s_j) = 0`, `Tr(s_i s_j) = 2 delta_ij` and
/// hermiticity across the set.
pub fn trace_relation_residual(gens: &GeneratorSet) -> f64 {
    let g = &gens.generators;
    let mut worst = 0.0f64;
    for (i, a) in g.iter().enumerate() {
        worst = worst.max(a.trace().norm()).max(a.max_abs_diff(&a.dagger()));
        for (j, b) in g.iter().enumerate() {
            let expected = if i == j { 2.0 } else { 0.0 };
            let tp = trace_product(a, b).expect("equal dims");
            worst = worst.max((tp - C64::new(expected, 0.0)).norm());
        }
    }
    worst
}
