//! Heisenberg-picture Pauli propagation.
//!
//! Observables are bit-packed weighted Pauli sums evolved backward through a
//! circuit gate by gate, merging equal strings and truncating small or
//! unwanted terms as they arise. The crate also provides expectation-value
//! overlaps, rigorous and Monte Carlo error estimates, magic diagnostics, a
//! compiled surrogate for fast re-evaluation over parameters, and a dense
//! brute-force oracle for verification at small size.
//!
//! Everything is generic over the coefficient scalar (`f32` or `f64`) and
//! over the word storage (`u8` through `u128`, or a multi-limb array beyond
//! 64 sites). The aliases at the crate root fix `f64` coefficients with
//! 64-bit words, enough for 32 sites.

pub mod analysis;
pub mod bits;
pub mod circuits;
pub mod coeff;
pub mod gates;
pub(crate) mod linalg;
pub mod oracle;
pub mod overlaps;
pub mod pauli;
pub mod propagation;
pub mod sum;
pub mod surrogate;

pub use bits::{Limbs, Limbs4, PauliBits};
pub use coeff::{Coeff, PathCoeff, PathCounters, Real};
pub use pauli::{PauliWord, Phase, PAULI_I, PAULI_X, PAULI_Y, PAULI_Z};
pub use sum::{Norms, PauliSum, TruncationConfig};

/// Default word/scalar choices: up to 32 sites, double precision.
pub type Word = PauliWord<u64>;
pub type Sum = PauliSum<u64, f64>;
pub type TrackedSum = PauliSum<u64, f64, PathCoeff<f64>>;
pub type Truncation = TruncationConfig<u64, f64>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("site {site} out of range for {nqubits} qubits")]
    SiteOutOfRange { site: usize, nqubits: usize },
    #[error("duplicate site {0}")]
    DuplicateSite(usize),
    #[error("invalid Pauli code {0}")]
    InvalidPauliCode(u8),
    #[error("qubit count mismatch: {0} vs {1}")]
    NQubitsMismatch(usize, usize),
    #[error("counter-based truncation requires tracked coefficients")]
    TrackingRequired,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown Clifford gate '{0}'")]
    UnknownClifford(String),
    #[error("matrix is not a Clifford unitary: {0}")]
    NotClifford(String),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("parameter count mismatch: circuit has {expected} slots, got {got}")]
    ParameterCount { expected: usize, got: usize },
    #[error("problem size exceeds guard: {0}")]
    GuardExceeded(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
