//! Boundary candidates: ordered input pairs with their outcomes and score.

use serde::{Deserialize, Serialize};

use crate::distance::{pdq, Boundariness, OutputDistanceKind};
use crate::error::Result;
use crate::sut::ExecutionOutcome;
use crate::value::InputTuple;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Validity {
    VV,
    VE,
    EE,
}

impl Validity {
    pub const ALL: [Validity; 3] = [Validity::VV, Validity::VE, Validity::EE];

    pub fn as_str(self) -> &'static str {
        match self {
            Validity::VV => "VV",
            Validity::VE => "VE",
            Validity::EE => "EE",
        }
    }
}

impl std::fmt::Display for Validity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundaryCandidate {
    pub i1: InputTuple,
    pub o1: ExecutionOutcome,
    pub i2: InputTuple,
    pub o2: ExecutionOutcome,
    pub score: Boundariness,
}

impl BoundaryCandidate {
    /// Builds a candidate scored with `d_o`; fails if the inputs coincide.
    pub fn scored(
        i1: InputTuple,
        o1: ExecutionOutcome,
        i2: InputTuple,
        o2: ExecutionOutcome,
        d_o: OutputDistanceKind,
    ) -> Result<Self> {
        let score = pdq(&i1, &o1, &i2, &o2, d_o)?;
        Ok(BoundaryCandidate {
            i1,
            o1,
            i2,
            o2,
            score,
        })
    }

    /// Ordered identity: `(a, b)` and `(b, a)` are different candidates.
    pub fn key(&self) -> String {
        format!("{};{}", self.i1.render(), self.i2.render())
    }

    pub fn validity(&self) -> Validity {
        validity_of(self)
    }

    /// Recomputes the score under another output distance.
    pub fn rescore(&self, d_o: OutputDistanceKind) -> Result<Boundariness> {
        pdq(&self.i1, &self.o1, &self.i2, &self.o2, d_o)
    }

    /// Total rendered length of both inputs and outputs.
    pub fn rendered_len(&self) -> usize {
        [
            self.i1.render(),
            self.i2.render(),
            self.o1.text().to_string(),
            self.o2.text().to_string(),
        ]
        .iter()
        .map(|s| s.chars().count())
        .sum()
    }
}

pub fn validity_of(c: &BoundaryCandidate) -> Validity {
    match (c.o1.is_valid(), c.o2.is_valid()) {
        (true, true) => Validity::VV,
        (false, false) => Validity::EE,
        _ => Validity::VE,
    }
}
