//! Black-box boundary value exploration.

pub mod candidate;
pub mod detection;
pub mod distance;
pub mod error;
pub mod experiment;
pub mod io;
pub mod oracle;
pub mod rank;
pub mod report;
pub mod sampling;
pub mod summarize;
pub mod sut;
pub mod value;

pub use candidate::{validity_of, BoundaryCandidate, Validity};
pub use error::{Error, Result};
pub use value::{InputTuple, SutValue};
