//! Isospectral h-transforms of Markov jump generators and one-dimensional
//! diffusion operators, with principal-eigenvalue bounds for birth–death chains.
//!
//! ```
//! use isospec_core::chain::{bd_to_qpair, bd_measures, BirthDeathSpec, RateSeq};
//! use isospec_core::duality::h_transform_local;
//! use isospec_core::harmonic::bd_harmonic_explicit;
//! use isospec_core::spectra::isospectral_check;
//!
//! let spec = BirthDeathSpec::new(
//!     RateSeq::constant(1.0),
//!     RateSeq::constant(1.0),
//!     RateSeq::constant(-1.0),
//!     10,
//! );
//! let qp = bd_to_qpair(&spec, 10).unwrap();
//! let mu = bd_measures(&spec, 10).unwrap().mu;
//! let h = bd_harmonic_explicit(&spec, 10).unwrap();
//! let dual = h_transform_local(&qp, &h.values, &h.harmonic_set, 1e-9).unwrap();
//! let mu_dual: Vec<f64> = mu.iter().zip(&h.values).map(|(m, h)| m * h * h).collect();
//! assert!(isospectral_check(&qp, &mu, &dual, &mu_dual, None).unwrap().pass);
//! ```

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod diffops;
pub mod duality;
pub mod eigenbounds;
pub mod error;
pub mod expr;
pub mod fixtures;
pub mod harmonic;
pub mod io;
pub mod linalg;
pub mod spectra;

pub use chain::{BirthDeathSpec, MeasurePair, QPairSpec, RateSeq, Truncation};
pub use error::{Error, Result};
pub use harmonic::{HarmonicVector, ScaledHarmonic};
pub use spectra::SpectrumReport;
