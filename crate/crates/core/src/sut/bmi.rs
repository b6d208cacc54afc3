//! Body-mass index value and classification.

use super::bytecount::to_f64_nearest;
use super::float::format_shortest;
use super::{ErrorKind, ExecutionOutcome};
use crate::value::SutValue;

const NEGATIVE: &str = "height or weight negative";

fn round1(x: f64) -> f64 {
    let r = (x * 10.0).round_ties_even() / 10.0;
    if r.is_finite() {
        r
    } else {
        x
    }
}

/// `weight / (height / 100)^2` rounded to one decimal, or `None` when an
/// argument is negative. Height is in centimetres.
fn bmi(height: &SutValue, weight: &SutValue) -> Option<f64> {
    if height.is_negative() || weight.is_negative() {
        return None;
    }
    let h = to_f64_nearest(&height.magnitude()) / 100.0;
    let w = to_f64_nearest(&weight.magnitude());
    Some(round1(w / (h * h)))
}

pub fn bmi_value(height: &SutValue, weight: &SutValue) -> ExecutionOutcome {
    match bmi(height, weight) {
        Some(v) => ExecutionOutcome::valid(format_shortest(v)),
        None => ExecutionOutcome::message_error(ErrorKind::DomainError, NEGATIVE),
    }
}

pub fn bmi_classification(height: &SutValue, weight: &SutValue) -> ExecutionOutcome {
    let Some(v) = bmi(height, weight) else {
        return ExecutionOutcome::message_error(ErrorKind::DomainError, NEGATIVE);
    };
    let label = if v < 18.5 {
        "Underweight"
    } else if v < 23.0 {
        "Normal"
    } else if v < 25.0 {
        "Overweight"
    } else if v < 30.0 {
        "Obese"
    } else {
        // NaN (0/0) lands here as well.
        "Severely obese"
    };
    ExecutionOutcome::valid(label)
}
