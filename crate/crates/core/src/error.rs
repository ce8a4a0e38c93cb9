//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors raised by matrix kernels, state constructors and analyses.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A constructed matrix or ket would exceed the supported dimension.
    #[error("dimension {0} exceeds the supported maximum of {max}", max = crate::matcore::MAX_DIM)]
    DimensionTooLarge(usize),

    /// Dimension is zero or otherwise unusable.
    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    /// Dimension is not a power of two, so no qubit factorization exists.
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    /// A qubit slot index lies outside the factorization.
    #[error("slot index {slot} out of range for {num_qubits} qubit slots")]
    SlotOutOfRange { slot: usize, num_qubits: usize },

    /// Operand shapes do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Input expected to be Hermitian deviates beyond tolerance.
    #[error("matrix is not Hermitian: deviation {deviation:.3e} exceeds tolerance {tol:.1e}")]
    NotHermitian { deviation: f64, tol: f64 },

    /// Input expected to be a density matrix fails a structural check.
    #[error("not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),

    /// A probability-like parameter lies outside [0, 1].
    #[error("parameter p = {0} lies outside [0, 1]")]
    InvalidProbability(f64),

    /// A ket expected to be normalized is not.
    #[error("amplitudes are not normalized: |psi|^2 = {0}")]
    NotNormalized(f64),

    /// Relabeling failed: some term has both particles on the same label value.
    #[error("label collision: both particles share the same {0} value; post-selection fails")]
    LabelCollision(&'static str),

    /// A sector decomposition was requested for a state with coherence
    /// between different local-charge sectors.
    #[error("cross-sector coherence {0:.3e} above tolerance; state is not twirled")]
    NotTwirled(f64),

    /// The state has coherence between global-charge sectors, so no
    /// decomposition into charge-definite pure states exists.
    #[error("no SSR decomposition exists: cross-charge coherence {0:.3e}")]
    NoSsrDecomposition(f64),

    /// Party layout does not partition the slot set.
    #[error("invalid party layout: {0}")]
    InvalidLayout(String),
}

pub type Result<T> = std::result::Result<T, Error>;
