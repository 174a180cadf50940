//! Verification strategies and direct fidelity estimation for bipartite
//! qudit states.
//!
//! The crate is organized around the pipeline used to certify a two-qudit
//! target state with local measurements:
//!
//! - [`linalg`]: dense complex matrices/vectors, Hermitian eigendecomposition,
//!   partial transpose and negativity for small Hilbert spaces,
//! - [`bases`]: Pauli, Gell-Mann, generalized SU(d) and Weyl operator bases,
//! - [`states`]: the squeezing-evolution target families for d = 2, 3,
//!   general Schmidt states and the orthogonal/separable states that enter
//!   the strategies,
//! - [`verify`]: verification operators Ω, their mixing-weight optimization,
//!   and the measurement count n(ε, δ),
//! - [`charfunc`]: SU(d) and Weyl characteristic functions, reconstruction
//!   and fidelity overlaps,
//! - [`dfe`]: importance-sampled direct fidelity estimation with seeded
//!   Monte Carlo measurement simulation.

pub mod bases;
pub mod charfunc;
pub mod dfe;
pub mod error;
pub mod linalg;
pub mod states;
pub mod verify;

pub use bases::{ObservablePair, SudLabel, WeylLabel};
pub use charfunc::{BasisKind, CharFunction};
pub use dfe::{CoverageReport, EstimateReport, SamplingPlan};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector, EigenDecomposition};
pub use states::{PhasePair, QutritAngles, SchmidtState};
pub use verify::{Strategy, StrategyReport, Theta3Policy};
