//! Coherence quantifiers and assisted coherence distillation on bipartite
//! states.
//!
//! The crate computes the relative entropy of coherence, the QI relative
//! entropy and the basis-dependent discord of small bipartite systems, runs
//! the one-round X-basis and erasing-measurement distillation protocols on
//! Werner states, and checks the resulting rates against closed forms and a
//! brute-force search over Alice's measurements.

pub mod cli;
pub mod coherence;
pub mod error;
pub mod gates;
pub mod linalg;
pub mod optimize;
pub mod protocols;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use states::DensityMatrix;
