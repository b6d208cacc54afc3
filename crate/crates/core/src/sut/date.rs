//! Proleptic Gregorian date construction with 64-bit day-number arithmetic.
//!
//! Validation mirrors the host-language constructor; the round trip through
//! the day number wraps on overflow, which is what makes very large years
//! come back as unrelated dates.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::{ErrorKind, ExecutionOutcome};
use crate::value::SutValue;

/// Days before each month in a year shifted to start in March.
const SHIFTED_MONTH_DAYS: [i64; 12] = [306, 337, 0, 31, 61, 92, 122, 153, 184, 214, 245, 275];

fn is_leap(y: i64) -> bool {
    (y % 4 == 0) && (y % 100 != 0 || y % 400 == 0)
}

fn days_in_month(y: i64, m: i64) -> i64 {
    match m {
        2 if is_leap(y) => 29,
        2 => 28,
        4 | 6 | 9 | 11 => 30,
        _ => 31,
    }
}

/// Two's-complement truncation to 64 bits.
fn wrap_i64(v: &BigInt) -> i64 {
    let mask: BigInt = (BigInt::from(1) << 64) - 1;
    let low = (v & &mask).to_u64().expect("masked to 64 bits");
    low as i64
}

fn fld(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

fn total_days(y: i64, m: i64, d: i64) -> i64 {
    let z = if m < 3 { y.wrapping_sub(1) } else { y };
    d.wrapping_add(SHIFTED_MONTH_DAYS[(m - 1) as usize])
        .wrapping_add(z.wrapping_mul(365))
        .wrapping_add(fld(z, 4))
        .wrapping_sub(fld(z, 100))
        .wrapping_add(fld(z, 400))
        .wrapping_sub(306)
}

fn year_month_day(days: i64) -> (i64, i64, i64) {
    let z = days.wrapping_add(306);
    let h = z.wrapping_mul(100).wrapping_sub(25);
    let a = fld(h, 3652425);
    let b = a - fld(a, 4);
    let y = fld(b.wrapping_mul(100).wrapping_add(h), 36525);
    let c = b
        .wrapping_add(z)
        .wrapping_sub(y.wrapping_mul(365))
        .wrapping_sub(fld(y, 4));
    let m = c.wrapping_mul(5).wrapping_add(456) / 153;
    let d = c.wrapping_sub(m.wrapping_mul(153).wrapping_sub(457) / 5);
    if m > 12 {
        (y.wrapping_add(1), m - 12, d)
    } else {
        (y, m, d)
    }
}

fn lpad(s: String, width: usize) -> String {
    let n = s.chars().count();
    if n >= width {
        s
    } else {
        format!("{}{}", "0".repeat(width - n), s)
    }
}

fn render_date(y: i64, m: i64, d: i64) -> String {
    let yy = if y < 0 {
        format!("-{:04}", y.unsigned_abs())
    } else {
        lpad(y.to_string(), 4)
    };
    format!("{yy}-{}-{}", lpad(m.to_string(), 2), lpad(d.to_string(), 2))
}

pub fn date_ctor(year: &SutValue, month: &SutValue, day: &SutValue) -> ExecutionOutcome {
    let m = month.magnitude();
    if m < BigInt::from(1) || m > BigInt::from(12) {
        return ExecutionOutcome::message_error(
            ErrorKind::ArgumentError,
            format!("Month: {} out of range (1:12)", month.magnitude()),
        );
    }
    let m = m.to_i64().expect("month within 1..=12");
    let y = wrap_i64(&year.magnitude());
    let max = days_in_month(y, m);
    let d = day.magnitude();
    if d < BigInt::from(1) || d > BigInt::from(max) {
        return ExecutionOutcome::message_error(
            ErrorKind::ArgumentError,
            format!("Day: {d} out of range (1:{max})"),
        );
    }
    let d = d.to_i64().expect("day within month");
    let (yy, mm, dd) = year_month_day(total_days(y, m, d));
    ExecutionOutcome::valid(render_date(yy, mm, dd))
}
