//! Human-readable byte counts, including the rounding and overflow quirks
//! of the widely copied snippet it ports.

use num_bigint::{BigInt, Sign};
use num_traits::{FromPrimitive, ToPrimitive};

use super::ExecutionOutcome;
use crate::value::SutValue;

const PREFIXES: &str = "kMGTPE";

/// Converts to the nearest binary64, ties to even.
///
/// Keeps the top 64 bits, folds the remaining ones into a sticky bit and
/// lets the hardware `u64 -> f64` conversion do the rounding.
pub fn to_f64_nearest(n: &BigInt) -> f64 {
    let mag = n.magnitude();
    let bits = mag.bits();
    let f = if bits <= 64 {
        mag.to_u64().expect("fits in 64 bits") as f64
    } else {
        let shift = bits - 64;
        let top = (mag >> shift).to_u64().expect("64 bits after shift");
        let sticky = mag.trailing_zeros().is_some_and(|tz| tz < shift);
        let f = (top | sticky as u64) as f64;
        f * 2f64.powi(shift as i32)
    };
    if n.sign() == Sign::Minus {
        -f
    } else {
        f
    }
}

/// Formats `b` bytes as e.g. `999B`, `1.0 kB`, `100.0 PB`.
///
/// Values below 1000 (negatives and booleans included) pass through with a
/// `B` suffix. Inputs past the exabyte range index outside `"kMGTPE"` and
/// yield `BoundsError("kMGTPE", exp)`.
pub fn bytecount(b: &SutValue) -> ExecutionOutcome {
    let n = b.magnitude();
    if n < BigInt::from(1000) {
        return ExecutionOutcome::valid(format!("{}B", b.render()));
    }
    let f = to_f64_nearest(&n);
    let mut exp = (f.ln() / 1000f64.ln()).floor() as i64;
    if exp < 6 {
        // Carry when the one-decimal rendering would reach 1000.0.
        let th = (1000f64.powi(exp as i32) * 999.95).ceil();
        if n >= BigInt::from_f64(th).expect("finite threshold") {
            exp += 1;
        }
    }
    if exp > PREFIXES.len() as i64 {
        return ExecutionOutcome::bounds_error(PREFIXES, exp);
    }
    let prefix = &PREFIXES[exp as usize - 1..exp as usize];
    let (n, exp) = if exp > 4 {
        (n / 1000, exp - 1)
    } else {
        (n, exp)
    };
    let val = to_f64_nearest(&n) / 1000f64.powi(exp as i32);
    ExecutionOutcome::valid(format!("{val:.1} {prefix}B"))
}
