//! Output and input distances and the program difference quotient.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sut::ExecutionOutcome;
use crate::value::InputTuple;

/// Distance between two rendered outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OutputDistanceKind {
    #[default]
    StrLen,
    /// Jaccard distance over n-gram sets, `n >= 1`.
    Jaccard(usize),
    Levenshtein,
}

impl OutputDistanceKind {
    /// Exact distance between two texts.
    pub fn measure(self, a: &str, b: &str) -> BigRational {
        match self {
            OutputDistanceKind::StrLen => BigRational::from_integer(strlendist(a, b).into()),
            OutputDistanceKind::Levenshtein => {
                BigRational::from_integer(levenshtein(a, b).into())
            }
            OutputDistanceKind::Jaccard(n) => {
                let (num, den) = jaccard_parts(n, a, b);
                if den == 0 {
                    BigRational::zero()
                } else {
                    BigRational::new(num.into(), den.into())
                }
            }
        }
    }

    pub fn measure_f64(self, a: &str, b: &str) -> f64 {
        match self {
            OutputDistanceKind::StrLen => strlendist(a, b) as f64,
            OutputDistanceKind::Levenshtein => levenshtein(a, b) as f64,
            OutputDistanceKind::Jaccard(n) => jaccard_ngram(n, a, b),
        }
    }

    pub fn name(self) -> String {
        self.to_string()
    }
}

impl fmt::Display for OutputDistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputDistanceKind::StrLen => write!(f, "strlen"),
            OutputDistanceKind::Jaccard(n) => write!(f, "jaccard{n}"),
            OutputDistanceKind::Levenshtein => write!(f, "levenshtein"),
        }
    }
}

impl FromStr for OutputDistanceKind {
    type Err = Error;

    /// Accepts `strlen`, `strlendist`, `levenshtein` and `jaccard<N>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strlen" | "strlendist" => Ok(OutputDistanceKind::StrLen),
            "levenshtein" | "lev" => Ok(OutputDistanceKind::Levenshtein),
            _ => {
                let n = s
                    .strip_prefix("jaccard")
                    .and_then(|n| n.parse::<usize>().ok())
                    .filter(|n| *n >= 1)
                    .ok_or_else(|| {
                        Error::Config(format!(
                            "unknown output distance {s:?} (strlen, jaccard<N>, levenshtein)"
                        ))
                    })?;
                Ok(OutputDistanceKind::Jaccard(n))
            }
        }
    }
}

impl Serialize for OutputDistanceKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for OutputDistanceKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Absolute difference of Unicode scalar counts.
pub fn strlendist(a: &str, b: &str) -> usize {
    a.chars().count().abs_diff(b.chars().count())
}

/// Set of contiguous n-grams. A non-empty string shorter than `n` is a
/// single gram; the empty string has none.
pub fn ngrams(n: usize, s: &str) -> HashSet<&str> {
    assert!(n >= 1, "n-gram size must be positive");
    let bounds: Vec<usize> = s
        .char_indices()
        .map(|(i, _)| i)
        .chain(std::iter::once(s.len()))
        .collect();
    let chars = bounds.len() - 1;
    if chars == 0 {
        return HashSet::new();
    }
    if chars < n {
        return HashSet::from([s]);
    }
    (0..=chars - n).map(|i| &s[bounds[i]..bounds[i + n]]).collect()
}

/// `(|A ∪ B| - |A ∩ B|, |A ∪ B|)`; both zero when both gram sets are empty.
fn jaccard_parts(n: usize, a: &str, b: &str) -> (usize, usize) {
    let ga = ngrams(n, a);
    let gb = ngrams(n, b);
    let inter = ga.intersection(&gb).count();
    let union = ga.len() + gb.len() - inter;
    (union - inter, union)
}

/// `1 - |A ∩ B| / |A ∪ B|` over n-gram sets, 0 when both are empty.
pub fn jaccard_ngram(n: usize, a: &str, b: &str) -> f64 {
    let (num, den) = jaccard_parts(n, a, b);
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Minimal number of single-character edits.
pub fn levenshtein(a: &str, b: &str) -> usize {
    strsim::levenshtein(a, b)
}

/// L1 distance over argument magnitudes, booleans counting as 0/1.
pub fn input_distance(a: &InputTuple, b: &InputTuple) -> Result<BigInt> {
    if a.arity() != b.arity() {
        return Err(Error::Precondition(format!(
            "input arities differ: {} vs {}",
            a.arity(),
            b.arity()
        )));
    }
    Ok(a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| x.abs_diff(y))
        .sum())
}

/// Exact, non-negative boundariness score.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Boundariness(BigRational);

impl Boundariness {
    pub fn new(value: BigRational) -> Self {
        assert!(!value.is_negative(), "boundariness must be non-negative");
        Boundariness(value)
    }

    pub fn zero() -> Self {
        Boundariness(BigRational::zero())
    }

    pub fn from_parts(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Parse("zero score denominator".into()));
        }
        let r = BigRational::new(num, den);
        if r.is_negative() {
            return Err(Error::Parse(format!("negative score {r}")));
        }
        Ok(Boundariness(r))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_positive(&self) -> bool {
        !self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Boundariness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Boundariness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let r: BigRational = s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("not a rational score: {s:?}")))?;
        if r.is_negative() {
            return Err(Error::Parse(format!("negative score {s:?}")));
        }
        Ok(Boundariness(r))
    }
}

impl Serialize for Boundariness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Boundariness {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// `d_o(P(a), P(b)) / d_i(a, b)`. Errors compare by their rendered text.
pub fn pdq(
    i1: &InputTuple,
    o1: &ExecutionOutcome,
    i2: &InputTuple,
    o2: &ExecutionOutcome,
    d_o: OutputDistanceKind,
) -> Result<Boundariness> {
    let di = input_distance(i1, i2)?;
    if di.is_zero() {
        return Err(Error::Precondition(format!(
            "inputs {i1} and {i2} have zero distance"
        )));
    }
    let num = d_o.measure(o1.text(), o2.text());
    if di.is_one() {
        return Ok(Boundariness(num));
    }
    Ok(Boundariness(num / BigRational::from_integer(di)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sut::SutDescriptor;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn strlendist_examples() {
        assert_eq!(strlendist("999.9 MB", "1.0 GB"), 2);
        assert_eq!(strlendist("x", "x"), 0);
        assert_eq!(strlendist("99.9 kB", "100.0 kB"), 1);
        assert_eq!(strlendist("é", "ab"), 1);
    }

    #[test]
    fn jaccard_examples() {
        assert_eq!(jaccard_ngram(1, "9B", "10B"), 0.75);
        assert_eq!(jaccard_ngram(1, "999.9 MB", "1.0 GB"), 0.625);
        assert_eq!(jaccard_ngram(2, "ab", "ab"), 0.0);
        assert_eq!(jaccard_ngram(2, "", ""), 0.0);
        assert_eq!(jaccard_ngram(2, "", "a"), 1.0);
        // short strings form one gram
        assert_eq!(jaccard_ngram(3, "9B", "9B"), 0.0);
        assert_eq!(jaccard_ngram(3, "9B", "10B"), 1.0);
        assert_eq!(
            OutputDistanceKind::Jaccard(1).measure("99.9 kB", "100.0 kB"),
            ratio(3, 7)
        );
    }

    #[test]
    fn levenshtein_examples() {
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("kitten", "kitten"), 0);
        assert_eq!(levenshtein("9B", "10B"), 2);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
    }

    #[test]
    fn input_distance_examples() {
        let t = |v: &[i64]| -> InputTuple { v.iter().copied().collect() };
        assert_eq!(input_distance(&t(&[99949]), &t(&[99951])).unwrap(), 2.into());
        assert_eq!(input_distance(&t(&[0, 2, 0]), &t(&[0, 2, 1])).unwrap(), 1.into());
        let f: InputTuple = [false].into_iter().collect();
        let tr: InputTuple = [true].into_iter().collect();
        assert_eq!(input_distance(&f, &tr).unwrap(), 1.into());
        assert!(input_distance(&t(&[1]), &t(&[1, 2])).is_err());
    }

    #[test]
    fn pdq_examples() {
        let sut = SutDescriptor::bytecount();
        let score = |a: i64, b: i64, k| {
            let (i1, i2): (InputTuple, InputTuple) =
                ([a].into_iter().collect(), [b].into_iter().collect());
            pdq(&i1, &sut.execute(&i1), &i2, &sut.execute(&i2), k).unwrap()
        };
        assert_eq!(score(9, 10, OutputDistanceKind::StrLen).value(), &ratio(1, 1));
        assert_eq!(
            score(99949, 99951, OutputDistanceKind::StrLen).value(),
            &ratio(1, 2)
        );
        assert_eq!(
            score(99949, 99951, OutputDistanceKind::Jaccard(1)).value(),
            &ratio(3, 14)
        );
        for k in [
            OutputDistanceKind::StrLen,
            OutputDistanceKind::Jaccard(1),
            OutputDistanceKind::Levenshtein,
        ] {
            assert!(!score(99948, 99949, k).is_positive());
        }
        let i: InputTuple = [5].into_iter().collect();
        let o = sut.execute(&i);
        assert!(pdq(&i, &o, &i, &o, OutputDistanceKind::StrLen).is_err());
    }

    #[test]
    fn kind_names_round_trip() {
        for s in ["strlen", "jaccard1", "jaccard2", "levenshtein"] {
            assert_eq!(s.parse::<OutputDistanceKind>().unwrap().to_string(), s);
        }
        assert!("jaccard0".parse::<OutputDistanceKind>().is_err());
        assert!("nope".parse::<OutputDistanceKind>().is_err());
    }

    #[test]
    fn boundariness_text_round_trip() {
        let b = Boundariness::new(ratio(6, 4));
        assert_eq!(b.to_string(), "3/2");
        assert_eq!("3/2".parse::<Boundariness>().unwrap(), b);
        assert_eq!("2".parse::<Boundariness>().unwrap().to_string(), "2");
        assert!("-1".parse::<Boundariness>().is_err());
    }
}
