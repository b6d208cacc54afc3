//! Float rendering compatible with the subject programs' host language.

/// Shortest round-trip rendering: `930000.0`, `9.8`, `1.0e6`, `Inf`, `NaN`.
///
/// Plain decimal notation is used while the decimal point position `pt`
/// (digits before the point) satisfies `-4 < pt <= 6`; otherwise the
/// exponent form `d.ddde±x` with at least one fractional digit.
pub fn format_shortest(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "Inf" } else { "-Inf" }.to_string();
    }
    let sign = if x.is_sign_negative() { "-" } else { "" };
    if x == 0.0 {
        return format!("{sign}0.0");
    }
    // `{:e}` yields the shortest round-trip digits, e.g. "9.3e5" or "1e-5".
    let sci = format!("{:e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let len = digits.len() as i32;
    let pt = exp + 1;

    let body = if -4 < pt && pt <= 6 {
        if pt <= 0 {
            format!("0.{}{}", "0".repeat((-pt) as usize), digits)
        } else if pt >= len {
            format!("{}{}.0", digits, "0".repeat((pt - len) as usize))
        } else {
            let (int, frac) = digits.split_at(pt as usize);
            format!("{int}.{frac}")
        }
    } else {
        let (first, rest) = digits.split_at(1);
        let rest = if rest.is_empty() { "0" } else { rest };
        format!("{first}.{rest}e{exp}")
    };
    format!("{sign}{body}")
}

/// One fractional digit, rounding the exact binary value half-to-even.
pub fn format_fixed1(x: f64) -> String {
    format!("{x:.1}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_forms() {
        assert_eq!(format_shortest(930000.0), "930000.0");
        assert_eq!(format_shortest(9.8), "9.8");
        assert_eq!(format_shortest(10.7), "10.7");
        assert_eq!(format_shortest(0.0), "0.0");
        assert_eq!(format_shortest(f64::INFINITY), "Inf");
        assert_eq!(format_shortest(f64::NAN), "NaN");
        assert_eq!(format_shortest(1e6), "1.0e6");
        assert_eq!(format_shortest(1234567.0), "1.234567e6");
        assert_eq!(format_shortest(123456.5), "123456.5");
        assert_eq!(format_shortest(0.0001), "0.0001");
        assert_eq!(format_shortest(0.00001), "1.0e-5");
        assert_eq!(format_shortest(-2.5), "-2.5");
        assert_eq!(format_shortest(1e34), "1.0e34");
    }

    #[test]
    fn fixed_rounds_half_even_on_exact_ties() {
        assert_eq!(format_fixed1(1.25), "1.2");
        assert_eq!(format_fixed1(1.75), "1.8");
        assert_eq!(format_fixed1(0.25), "0.2");
        // 99.95 is slightly above the tie in binary.
        assert_eq!(format_fixed1(99.95), "100.0");
        // 9.95 is slightly below.
        assert_eq!(format_fixed1(9.95), "9.9");
    }
}
