use super::{
    check_bracket, check_direct, difference_quotient, BracketWitness, ControlClaim, ControlError,
    ControlVerdict,
};
use crate::expr::{FunctionSpec, Value};
use crate::numeric::{Precision, Rational};
use crate::verdict::Verdict;

/// Combines two claims about the same pair `(F, f)` on overlapping
/// intervals into a claim on their union.
pub fn glue_claims(a: &ControlClaim, b: &ControlClaim) -> Result<ControlClaim, ControlError> {
    if a.controlled.body() != b.controlled.body() || a.control.body() != b.control.body() {
        return Err(ControlError::MismatchedClaims);
    }
    if !a.domain.overlaps(&b.domain) {
        return Err(ControlError::DisjointDomains {
            a: a.domain.to_string(),
            b: b.domain.to_string(),
        });
    }
    let domain = a.domain.hull(&b.domain);
    let mut pieces: Vec<_> = a.pieces.iter().chain(&b.pieces).cloned().collect();
    pieces.sort_by(|x, y| x.lo().cmp(y.lo()).then_with(|| x.hi().cmp(y.hi())));
    pieces.dedup();
    Ok(ControlClaim {
        controlled: FunctionSpec::new(a.controlled.body().clone(), domain.clone())?,
        control: FunctionSpec::new(a.control.body().clone(), domain.clone())?,
        domain,
        pieces,
    })
}

/// `[u, v]` straddles a piece boundary: split at the right end `a` of the
/// piece holding `u`, certify both halves, and take the candidate with the
/// smallest `f` as `p` and the one with the largest `f` as `q`. The
/// quotient over `[u, v]` is a weighted mean of the two half quotients, so
/// it lies between those values.
pub(super) fn check_across_pieces(
    claim: &ControlClaim,
    u: &Rational,
    v: &Rational,
    grid_n: usize,
    prec: Precision,
) -> Result<ControlVerdict, ControlError> {
    let split = claim
        .pieces
        .iter()
        .filter(|piece| piece.contains(u))
        .map(|piece| piece.hi())
        .max()
        .expect("pieces cover the domain")
        .clone();
    let left = check_direct(claim, u, &split, grid_n, prec)?;
    let right = check_bracket(claim, &split, v, grid_n, prec)?;
    let (l, r) = match (left, right) {
        (Verdict::Certified { witness: l }, Verdict::Certified { witness: r }) => (l, r),
        (refuted @ Verdict::Refuted { .. }, _) | (_, refuted @ Verdict::Refuted { .. }) => {
            return Ok(refuted)
        }
        _ => return check_direct(claim, u, v, grid_n, prec),
    };
    let candidates = [
        (&l.p, &l.f_p),
        (&l.q, &l.f_q),
        (&r.p, &r.f_p),
        (&r.q, &r.f_q),
    ];
    let (p, f_p) = candidates
        .iter()
        .min_by(|a, b| a.1.hi().cmp(b.1.hi()))
        .expect("four candidates");
    let (q, f_q) = candidates
        .iter()
        .max_by(|a, b| a.1.lo().cmp(b.1.lo()))
        .expect("four candidates");
    let dq = difference_quotient(&claim.controlled, u, v, prec)?;
    if !(f_p.hi() <= dq.lo() && dq.hi() <= f_q.lo()) {
        // Enclosure slack can hide the weighted-mean argument; search directly.
        return check_direct(claim, u, v, grid_n, prec);
    }
    let strict = f_p.hi() < dq.lo() && dq.hi() < f_q.lo();
    Ok(Verdict::Certified {
        witness: BracketWitness {
            u: u.clone(),
            v: v.clone(),
            p: (*p).clone(),
            q: (*q).clone(),
            dq,
            f_p: Value::clone(f_p),
            f_q: Value::clone(f_q),
            strict,
            precision_bits: prec.bits(),
            grid_n,
            split: Some(split),
        },
    })
}
