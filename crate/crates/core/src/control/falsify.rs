use rayon::prelude::*;
use serde::Serialize;

use super::{difference_quotient, ControlClaim, ControlError, Violation, ViolationSide};
use crate::numeric::{Interval, Precision, Rational};
use crate::sample::subinterval_family;

/// Outcome of a violation search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Falsification {
    Violation {
        violation: Box<Violation>,
        index: usize,
    },
    /// No violation among `tried` subintervals. This is not a proof of the claim.
    NotFound { tried: usize },
}

const RANGE_PIECES: [usize; 3] = [1, 16, 256];

/// Certified violation on `[u, v]`, if a range enclosure of `f` over the
/// subinterval excludes the difference quotient of `F`.
pub fn refute_on(
    claim: &ControlClaim,
    u: &Rational,
    v: &Rational,
    prec: Precision,
) -> Result<Option<Violation>, ControlError> {
    let dq = difference_quotient(claim.controlled(), u, v, prec)?;
    // A point value certainly on one side of the quotient rules that side out,
    // since every range enclosure contains it.
    let (mut above_possible, mut below_possible) = (true, true);
    for x in [u.clone(), v.clone(), u.midpoint(v)] {
        let Ok(fx) = claim.control().eval_point(&x, prec) else {
            continue;
        };
        above_possible &= fx.hi() > dq.hi();
        below_possible &= fx.lo() < dq.lo();
    }
    if !above_possible && !below_possible {
        return Ok(None);
    }
    let span = Interval::new(u.clone(), v.clone()).expect("u < v");
    for pieces in RANGE_PIECES {
        // A coarse enclosure may fail where a finer one succeeds.
        let Ok(range) = claim.control().range(&span, pieces, prec) else {
            continue;
        };
        let side = if range.lo() > dq.hi() {
            ViolationSide::ControlAboveQuotient
        } else if range.hi() < dq.lo() {
            ViolationSide::ControlBelowQuotient
        } else {
            continue;
        };
        return Ok(Some(Violation {
            u: u.clone(),
            v: v.clone(),
            dq,
            control_range: range,
            side,
            range_pieces: pieces,
            precision_bits: prec.bits(),
        }));
    }
    Ok(None)
}

/// Searches `budget` subintervals of the claim domain for a certified
/// violation. The family is deterministic in `seed`: the dyadic partition
/// in level order interleaved with seeded random pairs. Subintervals are
/// examined in parallel; the violation with the smallest index wins.
pub fn falsify_control(
    claim: &ControlClaim,
    budget: usize,
    seed: u64,
    prec: Precision,
) -> Result<Falsification, ControlError> {
    let family = subinterval_family(claim.domain(), budget, seed);
    let found = family
        .par_iter()
        .enumerate()
        .map(|(i, (u, v))| refute_on(claim, u, v, prec).map(|v| v.map(|v| (i, v))))
        .find_map_first(|r| r.transpose());
    match found {
        Some(Ok((index, violation))) => Ok(Falsification::Violation {
            violation: Box::new(violation),
            index,
        }),
        Some(Err(e)) => Err(e),
        None => Ok(Falsification::NotFound {
            tried: family.len(),
        }),
    }
}
