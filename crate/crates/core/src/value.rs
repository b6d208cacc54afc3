//! Argument values fed to a system under test.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A single SUT argument: a boolean or an arbitrary-precision integer.
///
/// Booleans are integers in the value model (`false == 0`, `true == 1`)
/// but keep their own rendering.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SutValue {
    Bool(bool),
    Int(BigInt),
}

impl SutValue {
    pub fn int<T: Into<BigInt>>(v: T) -> Self {
        SutValue::Int(v.into())
    }

    pub fn is_bool(&self) -> bool {
        matches!(self, SutValue::Bool(_))
    }

    /// Numeric value, booleans as 0 / 1.
    pub fn magnitude(&self) -> BigInt {
        match self {
            SutValue::Bool(b) => {
                if *b {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            }
            SutValue::Int(v) => v.clone(),
        }
    }

    /// Absolute difference of the numeric values.
    pub fn abs_diff(&self, other: &SutValue) -> BigInt {
        match (self, other) {
            (SutValue::Int(a), SutValue::Int(b)) => (a - b).abs(),
            (SutValue::Bool(a), SutValue::Bool(b)) => BigInt::from(u8::from(a != b)),
            (SutValue::Bool(a), SutValue::Int(b)) | (SutValue::Int(b), SutValue::Bool(a)) => {
                (b - i32::from(*a)).abs()
            }
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            SutValue::Bool(_) => false,
            SutValue::Int(v) => v.is_negative(),
        }
    }

    /// Text form: `false`/`true` for booleans, plain decimal otherwise.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SutValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SutValue::Bool(b) => write!(f, "{b}"),
            SutValue::Int(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for SutValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "true" => Ok(SutValue::Bool(true)),
            "false" => Ok(SutValue::Bool(false)),
            t => t
                .parse::<BigInt>()
                .map(SutValue::Int)
                .map_err(|_| Error::Parse(format!("not an integer or boolean: {s:?}"))),
        }
    }
}

impl From<bool> for SutValue {
    fn from(b: bool) -> Self {
        SutValue::Bool(b)
    }
}

macro_rules! from_int {
    ($($t:ty),*) => {$(
        impl From<$t> for SutValue {
            fn from(v: $t) -> Self {
                SutValue::Int(BigInt::from(v))
            }
        }
    )*};
}
from_int!(i8, i16, i32, i64, i128, u8, u16, u32, u64, u128, usize);

impl From<BigInt> for SutValue {
    fn from(v: BigInt) -> Self {
        SutValue::Int(v)
    }
}

/// Values serialize as their rendered text.
impl Serialize for SutValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for SutValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Ordered argument list for one SUT invocation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InputTuple(pub Vec<SutValue>);

impl InputTuple {
    pub fn new(values: Vec<SutValue>) -> Self {
        InputTuple(values)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[SutValue] {
        &self.0
    }

    pub fn get(&self, idx: usize) -> Option<&SutValue> {
        self.0.get(idx)
    }

    /// Rendered values joined by `;`, the form used in archive keys and CSV.
    pub fn render(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(SutValue::render).collect();
        parts.join(";")
    }

    /// Inverse of [`InputTuple::render`].
    pub fn parse(s: &str) -> Result<Self, Error> {
        if s.is_empty() {
            return Ok(InputTuple(Vec::new()));
        }
        s.split(';')
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()
            .map(InputTuple)
    }

    /// Numeric comparison, argument by argument (booleans as 0/1).
    pub fn numeric_cmp(&self, other: &InputTuple) -> std::cmp::Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            let ord = a.magnitude().cmp(&b.magnitude());
            if ord.is_ne() {
                return ord;
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl fmt::Display for InputTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            let parts: Vec<String> = self.0.iter().map(SutValue::render).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

impl<T: Into<SutValue>> FromIterator<T> for InputTuple {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        InputTuple(iter.into_iter().map(Into::into).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_like_julia() {
        assert_eq!(SutValue::Bool(false).render(), "false");
        assert_eq!(SutValue::Bool(true).render(), "true");
        assert_eq!(SutValue::int(0).render(), "0");
        assert_eq!(SutValue::int(-10).render(), "-10");
        let big: BigInt = "-1000000000000000000000000000000".parse().unwrap();
        assert_eq!(SutValue::Int(big).render(), "-1000000000000000000000000000000");
    }

    #[test]
    fn bool_magnitude() {
        assert_eq!(SutValue::Bool(false).magnitude(), BigInt::zero());
        assert_eq!(SutValue::Bool(true).magnitude(), BigInt::one());
    }

    #[test]
    fn tuple_parse_render() {
        let t: InputTuple = [0, 2, 1].into_iter().collect();
        assert_eq!(t.render(), "0;2;1");
        assert_eq!(InputTuple::parse("0;2;1").unwrap(), t);
        let b = InputTuple::parse("false").unwrap();
        assert_eq!(b.values(), &[SutValue::Bool(false)]);
        assert!(InputTuple::parse("1;x").is_err());
        assert_eq!(t.to_string(), "(0,2,1)");
    }
}
