//! Boundary crossing search: expand the step exponentially until the output
//! changes, then binary-search down to the adjacent pair that straddles it.

use num_bigint::BigInt;
use num_traits::One;
use rand::Rng;

use super::mutation::{mutate, mutate_by, Direction, MutationOperator};
use super::Executor;
use crate::candidate::BoundaryCandidate;
use crate::distance::{Boundariness, OutputDistanceKind};
use crate::sampling::TypeDomain;
use crate::sut::{ExecutionOutcome, SutDescriptor};
use crate::value::InputTuple;

pub const DEFAULT_MAX_DOUBLINGS: u32 = 96;

/// Result of one search from a starting point.
#[derive(Debug, Clone)]
pub struct BcsResult {
    pub candidate: BoundaryCandidate,
    /// Score of the initial single-step pair.
    pub initial_score: Boundariness,
    /// `true` when the candidate came out of the expand/squeeze phases
    /// rather than being the initial pair.
    pub squeezed: bool,
    pub operator: MutationOperator,
}

/// Searches from `i` along one randomly chosen argument and direction.
///
/// `domains`, when given, bounds the expansion: a probe leaving the domain
/// its argument was sampled from ends the search with the initial pair.
/// Returns `None` only for a SUT without arguments.
pub fn bcs_search<R: Rng + ?Sized>(
    sut: &SutDescriptor,
    d_o: OutputDistanceKind,
    i: &InputTuple,
    rng: &mut R,
    max_doublings: u32,
    domains: Option<&[TypeDomain]>,
) -> Option<BcsResult> {
    let domains: Option<Vec<&TypeDomain>> = domains.map(|ds| ds.iter().collect());
    bcs_with(
        &mut Executor::new(sut),
        d_o,
        i,
        rng,
        max_doublings,
        domains.as_deref(),
    )
}

fn differs(d_o: OutputDistanceKind, a: &ExecutionOutcome, b: &ExecutionOutcome) -> bool {
    a.text() != b.text() && d_o.measure_f64(a.text(), b.text()) > 0.0
}

pub(crate) fn bcs_with<R: Rng + ?Sized>(
    exec: &mut Executor<'_>,
    d_o: OutputDistanceKind,
    i: &InputTuple,
    rng: &mut R,
    max_doublings: u32,
    domains: Option<&[&TypeDomain]>,
) -> Option<BcsResult> {
    if i.arity() == 0 {
        return None;
    }
    let a = rng.gen_range(0..i.arity());
    let ops: Vec<MutationOperator> = Direction::BOTH
        .map(|d| MutationOperator::new(d, a))
        .into_iter()
        .filter(|op| mutate(i, *op).is_some())
        .collect();
    let op = ops[rng.gen_range(0..ops.len())];

    let oi = exec.run(i);
    let n = mutate(i, op).expect("operator chosen as applicable");
    let on = exec.run(&n);
    let init = BoundaryCandidate::scored(i.clone(), oi.clone(), n, on, d_o)
        .expect("single-step neighbours are distinct");
    let initial_score = init.score.clone();
    let give_up = |init: BoundaryCandidate| {
        Some(BcsResult {
            candidate: init,
            initial_score: initial_score.clone(),
            squeezed: false,
            operator: op,
        })
    };
    if init.score.is_positive() {
        return give_up(init);
    }

    // Expand: steps 2, 4, 8, ... until P(i ⊕ step) leaves P(i)'s class.
    let domain = domains.and_then(|ds| ds.get(a).copied());
    let mut lo = BigInt::one();
    let mut found = None;
    for _ in 1..=max_doublings {
        let step: BigInt = &lo << 1u32;
        let Some(x) = mutate_by(i, op, &step) else {
            return give_up(init);
        };
        if let Some(d) = domain {
            if !d.contains(&x.values()[a]) {
                return give_up(init);
            }
        }
        let ox = exec.run(&x);
        if differs(d_o, &oi, &ox) {
            found = Some((step, x, ox));
            break;
        }
        lo = step;
    }
    let Some((mut hi, mut x_hi, mut o_hi)) = found else {
        return give_up(init);
    };

    // Squeeze: keep P(i ⊕ lo) ~ P(i) and P(i ⊕ hi) !~ P(i) until adjacent.
    let mut x_lo = mutate_by(i, op, &lo).expect("applicable");
    let mut o_lo: Option<ExecutionOutcome> = None;
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) >> 1u32;
        let xm = mutate_by(i, op, &mid).expect("applicable");
        let om = exec.run(&xm);
        if differs(d_o, &oi, &om) {
            hi = mid;
            x_hi = xm;
            o_hi = om;
        } else {
            lo = mid;
            x_lo = xm;
            o_lo = Some(om);
        }
    }
    let o_lo = match o_lo {
        Some(o) => o,
        None => exec.run(&x_lo),
    };
    let candidate = BoundaryCandidate::scored(x_lo, o_lo, x_hi, o_hi, d_o)
        .expect("squeezed inputs are adjacent");
    Some(BcsResult {
        candidate,
        initial_score,
        squeezed: true,
        operator: op,
    })
}
