//! Exact computations for hyperbolic toral automorphisms `f_A` on the
//! 2-torus, their antipodal sphere quotients `g_A`, and the carpet systems
//! obtained by blowing up finitely many periodic orbits.
//!
//! Everything that can be exact is exact: points are rationals, the
//! expanding eigenvalue lives in the real quadratic field where it belongs,
//! periodic sets are enumerated through Smith normal form, and shadowing
//! corrections are solved in closed form so that periodicity of the output
//! is a field identity rather than a numerical claim.
//!
//! The crate is organised around the objects of study:
//!
//! * [`exactlat`] — unbounded 2x2 integer matrices, quadratic-field scalars,
//!   Smith normal form, eigen-data for the stable/unstable splitting;
//! * [`toral`] — the torus system: exact dynamics and periodic /
//!   antipodal-periodic point enumeration with counting certificates;
//! * [`sphere`] — the antipodal quotient: canonical class representatives,
//!   the quotient metric, spines, and sphere periodic sets;
//! * [`shadowing`] — periodic pseudo-orbits, the spectral shadowing solver,
//!   orbit-segment gluing and the periodic specification constructor;
//! * [`measures`] — periodic-orbit empirical measures, character integrals,
//!   discrepancy against Haar, Bowen balls and the homogeneity probe;
//! * [`entropy`] — greedy separated sets, growth-rate fits, and the exact
//!   periodic-growth sandwich;
//! * [`carpet`] — blown-orbit registries, circle-direction dynamics, the
//!   carpet periodic-point ledger and its projected measures.
//!
//! With the default `parallel` feature the data-parallel inner loops
//! (enumeration, pairwise separation checks, character sums, ball masses)
//! run on rayon; disabling the feature produces a dependency-free
//! sequential build with identical results.

pub mod carpet;
pub mod entropy;
pub mod exactlat;
pub mod highprec;
pub mod measures;
mod par;
pub mod rational;
pub mod shadowing;
pub mod sphere;
pub mod toral;

pub use exactlat::{EigenData, IntMatrix2, QuadNumber, SnfDecomposition};
pub use rational::Rat;
pub use sphere::SpherePoint;
pub use toral::TorusPoint;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not hyperbolic with positive eigenvalues: {0}")]
    NotHyperbolic(String),
    #[error("zero matrix has no Smith normal form")]
    ZeroMatrix,
    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(String),
    #[error("enumeration size {0} exceeds the supported limit {1}")]
    EnumerationTooLarge(String, u64),
    #[error("pseudo-orbit is not periodic: {0}")]
    NotPeriodic(String),
    #[error("pseudo-orbit jump {0} is too large for an unambiguous antipodal lift (needs < 1/4)")]
    LiftAmbiguous(String),
    #[error("lattice search bound exhausted for gap {gap}; enlarge the search radius (got {achieved}, wanted {wanted})")]
    SearchExhausted {
        gap: u32,
        achieved: String,
        wanted: String,
    },
    #[error("invalid blow-up registry: {0}")]
    RegistryInvalid(String),
    #[error("malformed carpet point: {0}")]
    MalformedCarpetPoint(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("common denominator {0} is too large for the exact separation lane")]
    DenominatorTooLarge(String),
    #[error("periodic-point count mismatch: {0}")]
    CountMismatch(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Which of the two phase spaces an object lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Torus,
    Sphere,
}

impl Space {
    pub fn as_str(self) -> &'static str {
        match self {
            Space::Torus => "torus",
            Space::Sphere => "sphere",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "torus" => Ok(Space::Torus),
            "sphere" => Ok(Space::Sphere),
            other => Err(Error::Parse(format!("unknown space {other:?}"))),
        }
    }
}
