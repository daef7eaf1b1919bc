//! Mapping between truncated continuous-variable (Fock space) systems and
//! n-level qudits.
//!
//! The crate builds the defining-representation SU(n) generators, replicates
//! them block-wise over an N-dimensional space, maps states and observables
//! through their generalized Bloch tensors, and evaluates the qutrit and
//! CHSH Bell expressions on two-mode squeezed vacuum states.
//!
//! All basis labels are 0-based: the qudit level `|j>` for `j = 1..n` in the
//! usual physics notation is index `j - 1` here, and Fock states `|k>` keep
//! their photon number as index.

pub mod bell;
pub mod bloch;
pub mod cv;
pub mod embedding;
pub mod error;
pub mod su;
pub mod tensor;

pub use bell::{BellCurve, ChshSettings, SchmidtTriple};
pub use bloch::{AmbientDensity, AmbientState, BlochTensor, ClassCoefficients, InducedState, TensorKind};
pub use cv::{BlockMixture, FockKet};
pub use embedding::EmbeddedGeneratorSet;
pub use error::{Error, Result};
pub use su::{GeneratorLabel, GeneratorSet, StructureConstants};
pub use tensor::{ComplexMatrix, ComplexVector, SparseMatrix, C64};

/// Absolute tolerance for algebraic identities (traces, commutators, round trips).
pub const ALGEBRA_TOL: f64 = 1e-12;

/// Absolute tolerance for expectation values.
pub const EXPECTATION_TOL: f64 = 1e-10;
