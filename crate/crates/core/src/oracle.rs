//! Exhaustive adjacent-pair scan over an input window.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::candidate::BoundaryCandidate;
use crate::distance::OutputDistanceKind;
use crate::error::{Error, Result};
use crate::sut::SutDescriptor;
use crate::value::{InputTuple, SutValue};

/// Windows needing more executions than this are refused unless forced.
pub const MAX_EVALUATIONS: u64 = 100_000_000;

#[derive(Debug, Clone)]
pub struct OracleWindow {
    /// Values of the other arguments; the scanned slot is overwritten.
    pub template: InputTuple,
    pub argument: usize,
    pub from: BigInt,
    pub to: BigInt,
}

impl OracleWindow {
    /// Window over the only argument of a one-argument SUT.
    pub fn single(from: impl Into<BigInt>, to: impl Into<BigInt>) -> Self {
        OracleWindow {
            template: InputTuple::new(vec![SutValue::int(0)]),
            argument: 0,
            from: from.into(),
            to: to.into(),
        }
    }

    /// Executions needed: one per point in `[from, to]`, none when empty.
    pub fn evaluations(&self) -> BigInt {
        if self.to <= self.from {
            BigInt::from(0)
        } else {
            &self.to - &self.from + 1
        }
    }

    fn at(&self, x: &BigInt) -> InputTuple {
        let mut v = self.template.values().to_vec();
        v[self.argument] = SutValue::Int(x.clone());
        InputTuple::new(v)
    }
}

/// Every pair `(x, x + 1)` with `from <= x < to` whose outputs are at
/// positive distance, in ascending order.
pub fn oracle_scan(
    sut: &SutDescriptor,
    window: &OracleWindow,
    d_o: OutputDistanceKind,
    force: bool,
) -> Result<Vec<BoundaryCandidate>> {
    if window.template.arity() != sut.arity() || window.argument >= sut.arity() {
        return Err(Error::Config(format!(
            "{} takes {} arguments; template has {}, scanned index {}",
            sut.name(),
            sut.arity(),
            window.template.arity(),
            window.argument
        )));
    }
    let n = window.evaluations();
    if !force && n.to_u64().is_none_or(|n| n > MAX_EVALUATIONS) {
        return Err(Error::Config(format!(
            "window needs {n} evaluations (limit {MAX_EVALUATIONS}); pass force to run it"
        )));
    }
    let mut out = Vec::new();
    if n == BigInt::from(0) {
        return Ok(out);
    }
    let mut x = window.from.clone();
    let mut ix = window.at(&x);
    let mut ox = sut.execute(&ix);
    while x < window.to {
        let y = &x + BigInt::one();
        let iy = window.at(&y);
        let oy = sut.execute(&iy);
        if ox.text() != oy.text() && d_o.measure_f64(ox.text(), oy.text()) > 0.0 {
            out.push(BoundaryCandidate::scored(ix, ox.clone(), iy.clone(), oy.clone(), d_o)?);
        }
        x = y;
        ix = iy;
        ox = oy;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn keys(cs: &[BoundaryCandidate]) -> Vec<String> {
        cs.iter().map(BoundaryCandidate::key).collect()
    }

    #[test]
    fn bytecount_first_two_thousand() {
        let cs = oracle_scan(
            &SutDescriptor::bytecount(),
            &OracleWindow::single(0, 2000),
            OutputDistanceKind::StrLen,
            false,
        )
        .unwrap();
        assert_eq!(keys(&cs), ["9;10", "99;100", "999;1000"]);
    }

    #[test]
    fn includes_kilobyte_rollover() {
        let cs = oracle_scan(
            &SutDescriptor::bytecount(),
            &OracleWindow::single(99000, 100000),
            OutputDistanceKind::StrLen,
            false,
        )
        .unwrap();
        assert!(keys(&cs).contains(&"99949;99950".to_string()));
    }

    #[test]
    fn empty_and_oversized_windows() {
        let sut = SutDescriptor::bytecount();
        let d = OutputDistanceKind::StrLen;
        assert!(oracle_scan(&sut, &OracleWindow::single(5, 5), d, false)
            .unwrap()
            .is_empty());
        assert!(oracle_scan(&sut, &OracleWindow::single(0, 1u64 << 40), d, false).is_err());
    }

    #[test]
    fn fixed_other_arguments() {
        let w = OracleWindow {
            template: InputTuple::parse("2000;2;0").unwrap(),
            argument: 2,
            from: BigInt::from(-1),
            to: BigInt::from(31),
        };
        let cs = oracle_scan(&SutDescriptor::date(), &w, OutputDistanceKind::StrLen, false).unwrap();
        let ks = keys(&cs);
        assert!(ks.contains(&"2000;2;0;2000;2;1".to_string()));
        assert!(ks.contains(&"2000;2;29;2000;2;30".to_string()));
    }
}
