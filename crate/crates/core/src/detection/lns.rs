//! Local neighbour sampling: every applicable ±1 move around a point.

use super::mutation::{applicable_operators, mutate};
use super::Executor;
use crate::candidate::BoundaryCandidate;
use crate::distance::OutputDistanceKind;
use crate::sut::{ExecutionOutcome, SutDescriptor};
use crate::value::InputTuple;

/// All `⟨i, P(i), n, P(n)⟩` for the applicable neighbours `n` of `i`,
/// unfiltered. At most `2 * arity` candidates.
pub fn lns_search(
    sut: &SutDescriptor,
    i: &InputTuple,
    d_o: OutputDistanceKind,
) -> Vec<BoundaryCandidate> {
    lns_with(&mut Executor::new(sut), i, d_o, |_, _| true)
}

/// As [`lns_search`], building candidates only for outcome pairs accepted
/// by `keep`; every neighbour is still executed.
pub(crate) fn lns_with(
    exec: &mut Executor<'_>,
    i: &InputTuple,
    d_o: OutputDistanceKind,
    keep: impl Fn(&ExecutionOutcome, &ExecutionOutcome) -> bool,
) -> Vec<BoundaryCandidate> {
    let o = exec.run(i);
    applicable_operators(i)
        .into_iter()
        .filter_map(|op| {
            let n = mutate(i, op)?;
            let on = exec.run(&n);
            if !keep(&o, &on) {
                return None;
            }
            BoundaryCandidate::scored(i.clone(), o.clone(), n, on, d_o).ok()
        })
        .collect()
}
