//! Increment/decrement mutation of a single argument.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::value::{InputTuple, SutValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increment,
    Decrement,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Increment, Direction::Decrement];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MutationOperator {
    pub direction: Direction,
    pub argument_index: usize,
}

impl MutationOperator {
    pub fn new(direction: Direction, argument_index: usize) -> Self {
        MutationOperator {
            direction,
            argument_index,
        }
    }
}

impl fmt::Display for MutationOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = match self.direction {
            Direction::Increment => "++",
            Direction::Decrement => "--",
        };
        write!(f, "arg{}{sym}", self.argument_index)
    }
}

/// Moves one argument by `step` in the operator's direction.
///
/// Booleans only move by one and saturate: `false` can be incremented,
/// `true` decremented; anything else is inapplicable (`None`), as is an
/// out-of-range argument index.
pub fn mutate_by(i: &InputTuple, op: MutationOperator, step: &BigInt) -> Option<InputTuple> {
    let target = i.get(op.argument_index)?;
    let moved = match (target, op.direction) {
        (SutValue::Bool(b), dir) => {
            if !step.is_one() {
                return None;
            }
            match (b, dir) {
                (false, Direction::Increment) => SutValue::Bool(true),
                (true, Direction::Decrement) => SutValue::Bool(false),
                _ => return None,
            }
        }
        (SutValue::Int(v), Direction::Increment) => SutValue::Int(v + step),
        (SutValue::Int(v), Direction::Decrement) => SutValue::Int(v - step),
    };
    let mut values = i.values().to_vec();
    values[op.argument_index] = moved;
    Some(InputTuple::new(values))
}

/// Single-step mutation.
pub fn mutate(i: &InputTuple, op: MutationOperator) -> Option<InputTuple> {
    mutate_by(i, op, &BigInt::one())
}

/// Operators that apply to `i`, argument by argument, increment first.
pub fn applicable_operators(i: &InputTuple) -> Vec<MutationOperator> {
    (0..i.arity())
        .flat_map(|a| Direction::BOTH.map(|d| MutationOperator::new(d, a)))
        .filter(|op| mutate(i, *op).is_some())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> InputTuple {
        InputTuple::parse(s).unwrap()
    }

    #[test]
    fn integer_steps() {
        let inc = MutationOperator::new(Direction::Increment, 0);
        let dec = MutationOperator::new(Direction::Decrement, 0);
        assert_eq!(mutate(&t("10"), inc), Some(t("11")));
        assert_eq!(mutate(&t("10"), dec), Some(t("9")));
        assert_eq!(mutate_by(&t("10"), dec, &BigInt::from(16)), Some(t("-6")));
        let mid = MutationOperator::new(Direction::Increment, 1);
        assert_eq!(mutate(&t("0;2;1"), mid), Some(t("0;3;1")));
    }

    #[test]
    fn booleans_saturate() {
        let inc = MutationOperator::new(Direction::Increment, 0);
        let dec = MutationOperator::new(Direction::Decrement, 0);
        assert_eq!(mutate(&t("false"), inc), Some(t("true")));
        assert_eq!(mutate(&t("true"), inc), None);
        assert_eq!(mutate(&t("true"), dec), Some(t("false")));
        assert_eq!(mutate(&t("false"), dec), None);
        assert_eq!(mutate_by(&t("false"), inc, &BigInt::from(2)), None);
    }

    #[test]
    fn applicable_set() {
        assert_eq!(applicable_operators(&t("true")).len(), 1);
        assert_eq!(applicable_operators(&t("1;2;3")).len(), 6);
        assert_eq!(applicable_operators(&t("false;2")).len(), 3);
        let op = MutationOperator::new(Direction::Increment, 5);
        assert_eq!(mutate(&t("1"), op), None);
    }
}
