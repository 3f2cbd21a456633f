use serde::Serialize;
use thiserror::Error;

use super::{certify_monotone, Monotonicity};
use crate::expr::{EvalError, ExactValue, FunctionSpec};
use crate::numeric::{Interval, Precision, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApproxError {
    #[error("premise not certified: {0}")]
    PremiseNotCertified(String),
    #[error("{what} is not exactly evaluable at {at}")]
    NotExact { what: &'static str, at: String },
    #[error("{point} lies outside the declared domain {domain}")]
    OutsideDomain { point: String, domain: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// First-order approximation of `F(target)` from `base` with a certified
/// error bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Approximation {
    pub base: Rational,
    pub target: Rational,
    pub approx: Rational,
    pub error_bound: Rational,
    pub f_base: Rational,
    pub f_target: Interval,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monotonicity: Option<Monotonicity>,
    pub precision_bits: u32,
}

/// `F(target) ≈ F(base) + f(base)(target - base)`.
///
/// With `f` a monotone control of `F` between `base` and `target`, the
/// difference quotient lies between `f(base)` and `f(target)`, so the error
/// is at most `|target - base| * |f(target) - f(base)|`, bounded using an
/// enclosure of `f(target)`. Monotonicity of `f` is certified from its
/// derivative; `F(base)` and `f(base)` must be exact.
pub fn approximate_with_error(
    big_f: &FunctionSpec,
    f: &FunctionSpec,
    base: &Rational,
    target: &Rational,
    prec: Precision,
) -> Result<Approximation, ApproxError> {
    for (spec, point) in [(big_f, base), (big_f, target), (f, base), (f, target)] {
        if !spec.domain().contains(point) {
            return Err(ApproxError::OutsideDomain {
                point: point.to_string(),
                domain: spec.domain().to_string(),
            });
        }
    }
    let exact_at = |spec: &FunctionSpec, what: &'static str| match spec.body().eval_exact(base)? {
        ExactValue::Exact(r) => Ok(r),
        ExactValue::NotExact => Err(ApproxError::NotExact {
            what,
            at: base.to_string(),
        }),
    };
    let big_f_base = exact_at(big_f, "F")?;
    let f_base = exact_at(f, "f")?;
    if base == target {
        return Ok(Approximation {
            base: base.clone(),
            target: target.clone(),
            approx: big_f_base,
            error_bound: Rational::zero(),
            f_target: Interval::point(f_base.clone()),
            f_base,
            monotonicity: None,
            precision_bits: prec.bits(),
        });
    }
    let span = Interval::spanning(base.clone(), target.clone());
    let monotonicity = certify_monotone(f, &span, prec).ok_or_else(|| {
        ApproxError::PremiseNotCertified(format!(
            "f = {} is not certified monotone on {span}",
            f.body()
        ))
    })?;
    let delta = target - base;
    let f_target = f.eval_point(target, prec)?.to_interval();
    let gap = f_target.sub(&Interval::point(f_base.clone())).abs();
    Ok(Approximation {
        base: base.clone(),
        target: target.clone(),
        approx: big_f_base + &f_base * &delta,
        error_bound: delta.abs() * gap.hi(),
        f_base,
        f_target,
        monotonicity: Some(monotonicity),
        precision_bits: prec.bits(),
    })
}
