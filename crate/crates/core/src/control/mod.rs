//! Difference-quotient control claims.
//!
//! A [`ControlClaim`] asserts that `f` controls `F` on an interval: for every
//! `u < v` in it there are `p, q ∈ [u, v]` with
//! `f(p) ≤ (F(v) - F(u)) / (v - u) ≤ f(q)`.
//! [`check_bracket`] decides one subinterval at finite precision, returning a
//! [`Verdict`] that is certified by a witness, refuted by a certified range
//! bound of `f`, or inconclusive.

mod approx;
mod cubic;
mod falsify;
mod glue;
mod shape;
mod survey;

pub use approx::{approximate_with_error, ApproxError, Approximation};
pub use cubic::{
    cubic_control_certificate, CubicCertificate, CubicVerdict, IdentityCheck, IdentityMismatch,
};
pub use falsify::{falsify_control, refute_on, Falsification};
pub use glue::glue_claims;
pub use shape::{
    infer_shape, Monotonicity, Premise, ShapeError, ShapeProperty, ShapeReport, SpotCheck,
};
pub use survey::{survey_control, Survey, Undecided};

pub(crate) use shape::certify_monotone;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{EvalError, FunctionSpec, FunctionSpecParseError, Value};
use crate::numeric::{Interval, Precision, Rational};
use crate::verdict::Verdict;

pub type ControlVerdict = Verdict<BracketWitness, Violation>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ControlError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Function(#[from] FunctionSpecParseError),
    #[error("claim domain {domain} is not inside the {role} function's domain {declared}")]
    DomainNotCovered {
        role: &'static str,
        domain: String,
        declared: String,
    },
    #[error("[{u}, {v}] is not a non-degenerate subinterval of {domain}")]
    BadSubinterval {
        u: String,
        v: String,
        domain: String,
    },
    #[error("grid_n must be at least 1")]
    EmptyGrid,
    #[error("cannot glue claims on disjoint domains {a} and {b}")]
    DisjointDomains { a: String, b: String },
    #[error("cannot glue claims about different functions")]
    MismatchedClaims,
}

impl From<crate::expr::SpecError> for ControlError {
    fn from(e: crate::expr::SpecError) -> Self {
        ControlError::Function(e.into())
    }
}

/// `f` controls `F` on `domain`.
///
/// A claim built by [`glue_claims`] remembers the pieces it was glued from;
/// subintervals straddling a piece boundary are checked by splitting there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlClaim {
    controlled: FunctionSpec,
    control: FunctionSpec,
    domain: Interval,
    pieces: Vec<Interval>,
}

impl ControlClaim {
    pub fn new(
        controlled: FunctionSpec,
        control: FunctionSpec,
        domain: Interval,
    ) -> Result<Self, ControlError> {
        for (role, spec) in [("controlled", &controlled), ("control", &control)] {
            if !spec.domain().encloses(&domain) {
                return Err(ControlError::DomainNotCovered {
                    role,
                    domain: domain.to_string(),
                    declared: spec.domain().to_string(),
                });
            }
        }
        Ok(ControlClaim {
            controlled,
            control,
            pieces: vec![domain.clone()],
            domain,
        })
    }

    /// Parses both functions and declares them on `domain`.
    pub fn parse(controlled: &str, control: &str, domain: Interval) -> Result<Self, ControlError> {
        let big_f = FunctionSpec::parse(controlled, domain.clone())?;
        let f = FunctionSpec::parse(control, domain.clone())?;
        ControlClaim::new(big_f, f, domain)
    }

    pub fn controlled(&self) -> &FunctionSpec {
        &self.controlled
    }

    pub fn control(&self) -> &FunctionSpec {
        &self.control
    }

    pub fn domain(&self) -> &Interval {
        &self.domain
    }

    /// Intervals the claim was glued from, sorted by left endpoint.
    pub fn pieces(&self) -> &[Interval] {
        &self.pieces
    }

    fn within_one_piece(&self, u: &Rational, v: &Rational) -> bool {
        self.pieces.iter().any(|p| p.contains(u) && p.contains(v))
    }

    fn check_subinterval(&self, u: &Rational, v: &Rational) -> Result<(), ControlError> {
        if u < v && self.domain.contains(u) && self.domain.contains(v) {
            Ok(())
        } else {
            Err(ControlError::BadSubinterval {
                u: u.to_string(),
                v: v.to_string(),
                domain: self.domain.to_string(),
            })
        }
    }
}

/// Points `p, q ∈ [u, v]` bracketing the difference quotient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BracketWitness {
    pub u: Rational,
    pub v: Rational,
    pub p: Rational,
    pub q: Rational,
    pub dq: Value,
    pub f_p: Value,
    pub f_q: Value,
    /// Both inequalities hold strictly.
    pub strict: bool,
    pub precision_bits: u32,
    pub grid_n: usize,
    /// Shared point used when the witness was combined from two glued pieces.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<Rational>,
}

impl BracketWitness {
    /// `{p, q} ⊆ {u, v}`.
    pub fn uses_endpoints(&self) -> bool {
        let end = |x: &Rational| x == &self.u || x == &self.v;
        end(&self.p) && end(&self.q)
    }

    /// Re-evaluates `F` and `f` from scratch at `prec` and re-checks the
    /// bracket.
    pub fn verify(&self, claim: &ControlClaim, prec: Precision) -> Result<bool, ControlError> {
        let inside = |x: &Rational| &self.u <= x && x <= &self.v;
        if !(inside(&self.p) && inside(&self.q)) {
            return Ok(false);
        }
        let dq = difference_quotient(&claim.controlled, &self.u, &self.v, prec)?;
        let f_p = claim.control.eval_point(&self.p, prec)?;
        let f_q = claim.control.eval_point(&self.q, prec)?;
        Ok(f_p.hi() <= dq.lo() && dq.hi() <= f_q.lo())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationSide {
    /// `f > D` on all of `[u, v]`, so no `p` exists.
    ControlAboveQuotient,
    /// `f < D` on all of `[u, v]`, so no `q` exists.
    ControlBelowQuotient,
}

/// A subinterval on which the certified range of `f` excludes the
/// difference quotient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub u: Rational,
    pub v: Rational,
    pub dq: Value,
    pub control_range: Interval,
    pub side: ViolationSide,
    pub range_pieces: usize,
    pub precision_bits: u32,
}

impl Violation {
    /// Recomputes the quotient and the range bound at `prec`.
    pub fn verify(&self, claim: &ControlClaim, prec: Precision) -> Result<bool, ControlError> {
        let dq = difference_quotient(&claim.controlled, &self.u, &self.v, prec)?;
        let span = Interval::new(self.u.clone(), self.v.clone()).expect("u < v");
        let range = claim.control.range(&span, self.range_pieces, prec)?;
        Ok(match self.side {
            ViolationSide::ControlAboveQuotient => range.lo() > dq.hi(),
            ViolationSide::ControlBelowQuotient => range.hi() < dq.lo(),
        })
    }
}

/// `(F(v) - F(u)) / (v - u)`, exact when `F` is exactly evaluable at both
/// endpoints.
pub fn difference_quotient(
    big_f: &FunctionSpec,
    u: &Rational,
    v: &Rational,
    prec: Precision,
) -> Result<Value, ControlError> {
    if u == v || !big_f.domain().contains(u) || !big_f.domain().contains(v) {
        return Err(ControlError::BadSubinterval {
            u: u.to_string(),
            v: v.to_string(),
            domain: big_f.domain().to_string(),
        });
    }
    let fv = big_f.eval_point(v, prec)?;
    let fu = big_f.eval_point(u, prec)?;
    Ok(fv.sub(&fu).div_by(&(v - u)).expect("u != v"))
}

/// Decides the control inequality on `[u, v]`.
///
/// Candidate points are tried in order: the endpoints, `grid_n` equispaced
/// interior points, then dyadic points down to `1/256` of the width. A
/// candidate `p` is accepted when the upper bound of `f(p)` is at most the
/// lower bound of the quotient, and symmetrically for `q`. When no witness
/// is found the claim is refuted if a range enclosure of `f` over `[u, v]`
/// excludes the quotient.
pub fn check_bracket(
    claim: &ControlClaim,
    u: &Rational,
    v: &Rational,
    grid_n: usize,
    prec: Precision,
) -> Result<ControlVerdict, ControlError> {
    claim.check_subinterval(u, v)?;
    if grid_n == 0 {
        return Err(ControlError::EmptyGrid);
    }
    if !claim.within_one_piece(u, v) {
        return glue::check_across_pieces(claim, u, v, grid_n, prec);
    }
    check_direct(claim, u, v, grid_n, prec)
}

const DYADIC_DEPTH: u32 = 8;

fn candidate_points<'a>(
    u: &'a Rational,
    v: &Rational,
    grid_n: usize,
) -> impl Iterator<Item = Rational> + 'a {
    let width = v - u;
    let grid_step = &width / Rational::from(grid_n as i64 + 1);
    let endpoints = [u.clone(), v.clone()].into_iter();
    let grid = (1..=grid_n as i64).map(move |k| u + &grid_step * Rational::from(k));
    let dyadic = (1..=DYADIC_DEPTH).flat_map(move |level| {
        let width = width.clone();
        (0..1i64 << (level - 1))
            .map(move |j| u + &width * Rational::new(2 * j + 1, 1i64 << level).expect("nonzero"))
    });
    endpoints.chain(grid).chain(dyadic)
}

pub(crate) fn check_direct(
    claim: &ControlClaim,
    u: &Rational,
    v: &Rational,
    grid_n: usize,
    prec: Precision,
) -> Result<ControlVerdict, ControlError> {
    let dq = difference_quotient(&claim.controlled, u, v, prec)?;
    let mut p: Option<(Rational, Value)> = None;
    let mut q: Option<(Rational, Value)> = None;
    let mut tried = 0usize;
    for x in candidate_points(u, v, grid_n) {
        tried += 1;
        let fx = claim.control.eval_point(&x, prec)?;
        if p.is_none() && fx.hi() <= dq.lo() {
            p = Some((x.clone(), fx.clone()));
        }
        if q.is_none() && dq.hi() <= fx.lo() {
            q = Some((x, fx));
        }
        if p.is_some() && q.is_some() {
            break;
        }
    }
    if let (Some((p, f_p)), Some((q, f_q))) = (p, q) {
        let strict = f_p.hi() < dq.lo() && dq.hi() < f_q.lo();
        return Ok(Verdict::Certified {
            witness: BracketWitness {
                u: u.clone(),
                v: v.clone(),
                p,
                q,
                dq,
                f_p,
                f_q,
                strict,
                precision_bits: prec.bits(),
                grid_n,
                split: None,
            },
        });
    }
    if let Some(violation) = refute_on(claim, u, v, prec)? {
        return Ok(Verdict::Refuted { violation });
    }
    Ok(Verdict::inconclusive(format!(
        "no certified witness among {tried} candidate points and the range of f on [{u}, {v}] overlaps the quotient {}",
        dq.to_interval()
    )))
}
