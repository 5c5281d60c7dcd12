//! Outcome-space combinatorics, permanents, Haar unitaries and Fock-state
//! transition amplitudes.

pub mod amplitude;
pub mod combinatorics;
mod occupation;
pub mod permanent;
pub mod unitary;

pub use amplitude::{full_distribution, output_amplitude, Amplitude, ProbabilityTable};
pub use combinatorics::{enumerate_outcomes, OutcomeSpace, DEFAULT_ENUMERATION_CAP};
pub use occupation::OccupationList;
pub use permanent::{permanent, DEFAULT_PERMANENT_CAP};
pub use unitary::{build_submatrix, haar_random_unitary, UnitaryMatrix, UNITARITY_TOLERANCE};
