//! Measurement-operator bases for d-level systems, built for efficient gate
//! characterization.
//!
//! For prime `d`, the generalized Pauli operators `X^a Z^b` form a complete,
//! orthonormal basis of unitaries whose non-identity members are traceless,
//! carry the d-th roots of unity as their spectrum, and partition into `d + 1`
//! Abelian families whose common eigenbases are mutually unbiased. Gates that
//! conjugate this basis onto itself (up to phases) admit Monte Carlo fidelity
//! estimation with a sampling cost that does not grow with system size.
//!
//! This crate provides:
//!
//! - [`zd`]: exact arithmetic over `Z_d` and the d-th roots of unity,
//!   including an exact decision procedure for vanishing root sums.
//! - [`monomial`]: exact algebra of generalized permutation operators (one
//!   unimodular entry per row and column) — the representation in which every
//!   basis element lives — with analytic spectra and eigenbases.
//! - [`pauli`]: construction of the generalized Pauli basis for prime `d` and
//!   tensor-product bases for multi-qudit and composite-dimension systems.
//! - [`mub`]: the partition into Abelian families, mutual-unbiasedness
//!   verification, and the change-of-basis permutation matrices with one
//!   entry per cyclic diagonal.
//! - [`classify`]: decides whether a unitary maps the basis onto itself,
//!   extracts its conjugation cycle structure, and checks that the partition
//!   into mutually unbiased bases is preserved.
//! - [`fidelity`]: Kraus-operator channel simulation, exact average-fidelity
//!   references, and seeded Monte Carlo estimation.
//!
//! All values are immutable and all operations are pure functions; everything
//! here is safe to call concurrently without synchronization.
//!
//! # Example
//!
//! ```
//! use qudit_mub::classify::{classify, UnitaryGate};
//! use qudit_mub::mub::{partition_basis, verify_mub};
//! use qudit_mub::pauli::OperatorBasis;
//! use qudit_mub::zd::Dimension;
//!
//! # fn main() -> qudit_mub::Result<()> {
//! let d = Dimension::new(5)?;
//! let basis = OperatorBasis::build(d)?;      // 25 exactly orthonormal operators
//! let families = partition_basis(&basis)?;   // 6 Abelian families
//! assert!(verify_mub(&families).pass);       // eigenbases mutually unbiased
//!
//! let gate = UnitaryGate::fourier(vec![d])?;
//! assert!(classify(&gate, &basis)?.characterizable);
//! # Ok(())
//! # }
//! ```

pub mod classify;
pub mod dense;
pub mod fidelity;
pub mod monomial;
pub mod mub;
pub mod pauli;
pub mod zd;

use thiserror::Error;

pub use classify::{ClassificationReport, ConjugationMatch, CycleDecomposition, UnitaryGate};
pub use fidelity::{FidelityEstimate, QuantumChannel, RelevanceDistribution};
pub use monomial::{
    DenseOperator, HsInner, MonomialOperator, OrderedEigenbasis, SpectrumReport, UnitRoot,
};
pub use mub::{AbelianFamily, BasisChangeMatrix, MubCollection, MubReport, ShiftOperator};
pub use pauli::{OperatorBasis, PauliLabel};
pub use zd::{CsVector, Dimension, PhaseExp};

/// Errors shared by all modules of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("dimension {0} is not prime; {1}")]
    NonPrime(usize, &'static str),
    #[error("permutation is not a bijection on 0..{0}")]
    InvalidPermutation(usize),
    #[error("matrix is not monomial: {0}")]
    NotMonomial(String),
    #[error("entry is not a {0}-th root of unity within tolerance")]
    NotDnaryPhase(usize),
    #[error("spectrum is not d-nary: {0}")]
    NotDnarySpectrum(String),
    #[error("{what} exceeds the resource guard: limit {limit}, requested {requested}")]
    ResourceLimit {
        what: &'static str,
        limit: usize,
        requested: usize,
    },
    #[error("{what} out of range: {value} not in [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: i64,
        min: i64,
        max: i64,
    },
    #[error("parameter {name} = {value} outside [{min}, {max}]")]
    ParameterRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("matrix is not unitary: max |UU† - 1| entry is {0:.3e}")]
    NotUnitary(f64),
    #[error("channel is not trace preserving: max |ΣK†K - 1| entry is {0:.3e}")]
    NotTracePreserving(f64),
    #[error("operator basis inconsistency: {0}")]
    BasisInconsistency(String),
    #[error("gate is not characterizable; no cycle structure available")]
    NotCharacterizable,
    #[error("need at least one Monte Carlo sample")]
    NoSamples,
}

pub type Result<T> = std::result::Result<T, Error>;
