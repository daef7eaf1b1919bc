//! Block embedding of SU(n) into an N-dimensional space.
//!
//! The space is cut into `floor(N/n)` consecutive blocks `n*m .. n*m + n - 1`.
//! Each block carries its own copy of the n-dimensional generators, and the
//! embedded generator `S_j` is the direct sum of those copies. When `n` does
//! not divide `N` the trailing `N - n*floor(N/n)` levels are left untouched
//! by every `S_j`.

use crate::error::{invalid, Result};
use crate::su::{build_generators, generator_entries, GeneratorSet, StructureConstants};
use crate::tensor::{SparseMatrix, C64, ONE};

fn check_dims(ambient: usize, n: usize) -> Result<usize> {
    if n < 2 {
        return invalid(format!("qudit dimension must be at least 2, got {n}"));
    }
    if n > ambient {
        return invalid(format!("qudit dimension {n} exceeds ambient dimension {ambient}"));
    }
    Ok(ambient / n)
}

/// `P_jk(m) = |n m + j><n m + k|` with 1-based `j, k` in `1..=n`.
pub fn block_projector(ambient: usize, n: usize, m: usize, j: usize, k: usize) -> Result<SparseMatrix> {
    let blocks = check_dims(ambient, n)?;
    if m >= blocks {
        return invalid(format!(
            "block {m} out of range: only {blocks} blocks of size {n} fit in {ambient}"
        ));
    }
    if !(1..=n).contains(&j) || !(1..=n).contains(&k) {
        return invalid(format!("level labels ({j}, {k}) must lie in 1..={n}"));
    }
    SparseMatrix::from_triplets(ambient, vec![(n * m + j - 1, n * m + k - 1, ONE)])
}

/// Diagonal projector onto the `n * floor(N/n)` levels covered by blocks.
pub fn used_subspace_projector(ambient: usize, n: usize) -> Result<SparseMatrix> {
    let blocks = check_dims(ambient, n)?;
    let used = n * blocks;
    let diag: Vec<C64> = (0..ambient)
        .map(|i| if i < used { ONE } else { C64::new(0.0, 0.0) })
        .collect();
    Ok(SparseMatrix::from_diagonal(&diag))
}

/// Direct-sum generators `S_j` on an N-dimensional space.
#[derive(Debug, Clone)]
pub struct EmbeddedGeneratorSet {
    ambient: usize,
    blocks: usize,
    base: GeneratorSet,
    generators: Vec<SparseMatrix>,
}

impl EmbeddedGeneratorSet {
    /// Ambient dimension `N`.
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    /// `floor(N/n)`.
    pub fn blocks(&self) -> usize {
        self.blocks
    }

    /// Number of trailing levels no generator acts on.
    pub fn unused_tail(&self) -> usize {
        self.ambient - self.n() * self.blocks
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[SparseMatrix] {
        &self.generators
    }

    pub fn generator(&self, index: usize) -> &SparseMatrix {
        &self.generators[index]
    }

    /// The n-dimensional set the blocks replicate.
    pub fn base(&self) -> &GeneratorSet {
        &self.base
    }

    pub fn structure_constants(&self) -> &StructureConstants {
        self.base.structure_constants()
    }

    /// `s_j(m)`: generator `index` acting on block `m` only.
    pub fn block_generator(&self, index: usize, m: usize) -> Result<SparseMatrix> {
        if m >= self.blocks {
            return invalid(format!("block {m} out of range 0..{}", self.blocks));
        }
        let label = self.base.labels()[index];
        let offset = self.n() * m;
        SparseMatrix::from_triplets(
            self.ambient,
            generator_entries(label)
                .into_iter()
                .map(|(r, c, v)| (r + offset, c + offset, v))
                .collect(),
        )
    }

    /// Restriction of `S_j` to the rows and columns of block `m`, as a dense n x n matrix.
    pub fn block_restriction(&self, index: usize, m: usize) -> crate::tensor::ComplexMatrix {
        let n = self.n();
        let s = &self.generators[index];
        crate::tensor::ComplexMatrix::from_fn(n, |i, j| s.get(n * m + i, n * m + j))
    }
}

/// Builds `S_j = sum_m s_j(m)` over `m = 0 .. floor(N/n) - 1`.
pub fn build_embedded(ambient: usize, n: usize) -> Result<EmbeddedGeneratorSet> {
    let blocks = check_dims(ambient, n)?;
    let base = build_generators(n)?;
    let generators = base
        .labels()
        .iter()
        .map(|&label| {
            let entries = generator_entries(label);
            let triplets = (0..blocks)
                .flat_map(|m| entries.iter().map(move |&(r, c, v)| (r + n * m, c + n * m, v)))
                .collect();
            SparseMatrix::from_triplets(ambient, triplets)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EmbeddedGeneratorSet {
        ambient,
        blocks,
        base,
        generators,
    })
}

/// Largest entrywise residual of `[S_j, S_k] - 2i sum_l f_jkl S_l`, combined
/// with the largest entry of any cross-block commutator `[s_j(m), s_k(r)]`, `m != r`.
pub fn verify_embedded(eg: &EmbeddedGeneratorSet) -> f64 {
    let d = eg.len();
    let f = eg.structure_constants();
    let mut worst = 0.0f64;
    for j in 0..d {
        for k in 0..d {
            let lhs = eg.generators[j].commutator(&eg.generators[k]).expect("equal dims");
            let rhs = SparseMatrix::linear_combination(
                eg.ambient,
                (0..d)
                    .filter(|&l| f.get(j, k, l) != 0.0)
                    .map(|l| (C64::new(0.0, 2.0 * f.get(j, k, l)), &eg.generators[l])),
            );
            worst = worst.max(lhs.max_abs_diff(&rhs));
        }
    }
    worst.max(cross_block_residual(eg))
}

fn cross_block_residual(eg: &EmbeddedGeneratorSet) -> f64 {
    let d = eg.len();
    let per_block: Vec<Vec<SparseMatrix>> = (0..eg.blocks)
        .map(|m| {
            (0..d)
                .map(|j| eg.block_generator(j, m).expect("block in range"))
                .collect()
        })
        .collect();
    let mut worst = 0.0f64;
    for m in 0..eg.blocks {
        for r in (0..eg.blocks).filter(|&r| r != m) {
            for a in &per_block[m] {
                for b in &per_block[r] {
                    worst = worst.max(a.commutator(b).expect("equal dims").max_abs());
                }
            }
        }
    }
    worst
}

/// Largest deviation from `Tr(S_j) = 0` and `Tr(S_i S_j) = 2 floor(N/n) delta_ij`.
pub fn embedded_trace_residual(eg: &EmbeddedGeneratorSet) -> f64 {
    let scale = 2.0 * eg.blocks as f64;
    let mut worst = 0.0f64;
    for (i, a) in eg.generators.iter().enumerate() {
        worst = worst.max(a.trace().norm());
        for (j, b) in eg.generators.iter().enumerate() {
            let expected = if i == j { scale } else { 0.0 };
            worst = worst.max((a.trace_product(b).expect("equal dims") - C64::new(expected, 0.0)).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_projector_positions() {
        let p = block_projector(6, 2, 1, 1, 2).unwrap();
        assert_eq!(p.triplets().collect::<Vec<_>>(), vec![(2, 3, ONE)]);
        let d = block_projector(6, 2, 0, 1, 1).unwrap();
        assert_eq!(d.triplets().collect::<Vec<_>>(), vec![(0, 0, ONE)]);
    }

    #[test]
    fn block_projector_rejects_out_of_range() {
        assert!(block_projector(7, 3, 2, 1, 2).is_err());
        assert!(block_projector(7, 3, 1, 1, 2).is_ok());
        assert!(block_projector(6, 2, 0, 0, 1).is_err());
        assert!(block_projector(6, 2, 0, 1, 3).is_err());
    }

    #[test]
    fn pseudospin_u_on_six_levels() {
        let eg = build_embedded(6, 2).unwrap();
        let mut pos: Vec<_> = eg.generator(0).triplets().map(|(r, c, _)| (r, c)).collect();
        pos.sort();
        assert_eq!(pos, vec![(0, 1), (1, 0), (2, 3), (3, 2), (4, 5), (5, 4)]);
        assert!(eg.generator(0).triplets().all(|(_, _, v)| v == ONE));
    }

    #[test]
    fn tail_is_untouched() {
        let eg = build_embedded(7, 3).unwrap();
        assert_eq!(eg.blocks(), 2);
        assert_eq!(eg.unused_tail(), 1);
        for s in eg.generators() {
            assert!(s.triplets().all(|(r, c, _)| r != 6 && c != 6));
        }
    }

    #[test]
    fn scaled_trace_relation() {
        let eg = build_embedded(6, 2).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 6.0 } else { 0.0 };
                assert_eq!(
                    eg.generator(i).trace_product(eg.generator(j)).unwrap(),
                    C64::new(expected, 0.0)
                );
            }
        }
        assert_eq!(embedded_trace_residual(&eg), 0.0);
    }

    #[test]
    fn rejects_bad_dims() {
        assert!(build_embedded(3, 4).is_err());
        assert!(build_embedded(5, 1).is_err());
        assert!(used_subspace_projector(3, 4).is_err());
    }

    #[test]
    fn closure_residuals() {
        assert!(verify_embedded(&build_embedded(4, 2).unwrap()) < 1e-14);
        assert!(verify_embedded(&build_embedded(9, 3).unwrap()) < 1e-12);
        let eg = build_embedded(10, 3).unwrap();
        assert!(verify_embedded(&eg) < 1e-12);
        assert!(eg.generators().iter().all(|s| s.row(9).count() == 0));
    }

    #[test]
    fn used_projectors() {
        let diag = |p: SparseMatrix| (0..p.dim()).map(|i| p.get(i, i).re).collect::<Vec<_>>();
        assert_eq!(diag(used_subspace_projector(6, 2).unwrap()), vec![1.0; 6]);
        assert_eq!(
            diag(used_subspace_projector(7, 3).unwrap()),
            vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0]
        );
        assert_eq!(
            diag(used_subspace_projector(5, 4).unwrap()),
            vec![1.0, 1.0, 1.0, 1.0, 0.0]
        );
    }

    #[test]
    fn blocks_replicate_base_generators() {
        let eg = build_embedded(11, 3).unwrap();
        for j in 0..eg.len() {
            for m in 0..eg.blocks() {
                assert_eq!(eg.block_restriction(j, m), *eg.base().generator(j));
            }
        }
    }

    #[test]
    fn block_sum_equals_direct_construction() {
        let eg = build_embedded(8, 2).unwrap();
        for j in 0..eg.len() {
            let blocks: Vec<_> = (0..eg.blocks()).map(|m| eg.block_generator(j, m).unwrap()).collect();
            let summed = SparseMatrix::linear_combination(8, blocks.iter().map(|b| (ONE, b)));
            assert_eq!(&summed, eg.generator(j));
        }
        assert!(eg.block_generator(0, 4).is_err());
    }
}
