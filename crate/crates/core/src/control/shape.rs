use serde::Serialize;
use thiserror::Error;

use super::ControlClaim;
use crate::expr::{EvalError, FunctionSpec, Value};
use crate::numeric::{Interval, Precision, Rational};

/// Facts about the control function `f` that imply a shape of `F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Premise {
    IdenticallyZero,
    IdenticallyConst,
    Positive,
    Negative,
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeProperty {
    Constant,
    Linear,
    Increasing,
    Decreasing,
    /// `F((u + v) / 2) ≤ (F(u) + F(v)) / 2`.
    ConvexDown,
    /// `F((u + v) / 2) ≥ (F(u) + F(v)) / 2`.
    ConvexUp,
}

impl Premise {
    pub const ALL: [Premise; 6] = [
        Premise::IdenticallyZero,
        Premise::IdenticallyConst,
        Premise::Positive,
        Premise::Negative,
        Premise::Increasing,
        Premise::Decreasing,
    ];

    pub fn conclusion(self) -> ShapeProperty {
        match self {
            Premise::IdenticallyZero => ShapeProperty::Constant,
            Premise::IdenticallyConst => ShapeProperty::Linear,
            Premise::Positive => ShapeProperty::Increasing,
            Premise::Negative => ShapeProperty::Decreasing,
            Premise::Increasing => ShapeProperty::ConvexDown,
            Premise::Decreasing => ShapeProperty::ConvexUp,
        }
    }

    pub fn implication(self) -> &'static str {
        match self {
            Premise::IdenticallyZero => "f = 0 on Q implies F is constant on Q",
            Premise::IdenticallyConst => "f = C on Q implies F is linear on Q",
            Premise::Positive => "f > 0 on Q implies F is increasing on Q",
            Premise::Negative => "f < 0 on Q implies F is decreasing on Q",
            Premise::Increasing => "f increasing on Q implies F is convex down on Q",
            Premise::Decreasing => "f decreasing on Q implies F is convex up on Q",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

/// Grid evaluation of `F` confirming the emitted property.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpotCheck {
    pub points: usize,
    pub comparisons: usize,
    pub precision_bits: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShapeReport {
    pub property: ShapeProperty,
    pub premise: Premise,
    pub implication: &'static str,
    pub domain: Interval,
    /// The control claim itself is taken as given.
    pub claim: &'static str,
    pub premise_evidence: String,
    pub spot_check: SpotCheck,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("premise {premise:?} not certified: {reason}")]
    PremiseNotCertified { premise: Premise, reason: String },
    #[error("spot check contradicts {property:?} at {at}; the control claim is false")]
    SpotCheckFailed { property: ShapeProperty, at: String },
    #[error("spot check of {property:?} undecided at {at} up to {precision_bits} bits")]
    SpotCheckUndecided {
        property: ShapeProperty,
        at: String,
        precision_bits: u32,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

const PIECES: [usize; 3] = [1, 16, 256];
const GRID: usize = 16;
const PRECISION_RETRIES: u32 = 4;

/// Whether `test` holds on every piece of some uniform subdivision of
/// `domain`. Pieces whose enclosure fails count as not holding.
fn on_all_pieces(domain: &Interval, mut test: impl FnMut(&Interval) -> bool) -> Option<usize> {
    PIECES
        .into_iter()
        .find(|&n| domain.subdivide(n).iter().all(&mut test))
}

/// Certifies that `f` is monotone on `domain` from enclosures of its
/// symbolic derivative.
pub(crate) fn certify_monotone(
    f: &FunctionSpec,
    domain: &Interval,
    prec: Precision,
) -> Option<Monotonicity> {
    let df = f.body().derivative().ok()?;
    let sign = |want_nonneg: bool| {
        on_all_pieces(domain, |piece| match df.eval_enclosure(piece, prec) {
            Ok(e) if want_nonneg => !e.lo().is_negative(),
            Ok(e) => !e.hi().is_positive(),
            Err(_) => false,
        })
    };
    if sign(true).is_some() {
        Some(Monotonicity::Increasing)
    } else if sign(false).is_some() {
        Some(Monotonicity::Decreasing)
    } else {
        None
    }
}

fn certify_premise(
    f: &FunctionSpec,
    domain: &Interval,
    premise: Premise,
    prec: Precision,
) -> Result<String, String> {
    let enclose = |piece: &Interval| f.body().eval_enclosure(piece, prec).ok();
    match premise {
        Premise::IdenticallyZero | Premise::IdenticallyConst => {
            let whole = enclose(domain).ok_or("no enclosure of f on the domain")?;
            if !whole.is_point() {
                return Err(format!(
                    "enclosure of f on the domain is {whole}, not a single value"
                ));
            }
            if premise == Premise::IdenticallyZero && !whole.lo().is_zero() {
                return Err(format!("f is the constant {}", whole.lo()));
            }
            Ok(format!("enclosure of f on {domain} is {whole}"))
        }
        Premise::Positive | Premise::Negative => {
            let positive = premise == Premise::Positive;
            on_all_pieces(domain, |piece| match enclose(piece) {
                Some(e) if positive => e.lo().is_positive(),
                Some(e) => e.hi().is_negative(),
                None => false,
            })
            .map(|n| format!("enclosures of f on {n} pieces of {domain} exclude 0"))
            .ok_or_else(|| format!("could not certify the sign of f on {domain}"))
        }
        Premise::Increasing | Premise::Decreasing => {
            let want = if premise == Premise::Increasing {
                Monotonicity::Increasing
            } else {
                Monotonicity::Decreasing
            };
            match certify_monotone(f, domain, prec) {
                Some(m) if m == want => Ok(format!(
                    "derivative enclosure of f has constant sign on {domain}"
                )),
                _ => Err(format!("could not certify f is {want:?} on {domain}").to_lowercase()),
            }
        }
    }
}

enum Check {
    Pass,
    Fail,
    Undecided,
}

fn compare_le(a: &Interval, b: &Interval, strict: bool) -> Check {
    let holds = if strict {
        a.hi() < b.lo()
    } else {
        a.hi() <= b.lo()
    };
    let fails = if strict {
        a.lo() >= b.hi()
    } else {
        a.lo() > b.hi()
    };
    if holds {
        Check::Pass
    } else if fails {
        Check::Fail
    } else {
        Check::Undecided
    }
}

fn zero_check(e: &Value) -> Check {
    match e {
        Value::Exact(r) if r.is_zero() => Check::Pass,
        _ if !e.to_interval().contains_zero() => Check::Fail,
        _ => Check::Undecided,
    }
}

fn spot_check(
    big_f: &FunctionSpec,
    domain: &Interval,
    property: ShapeProperty,
    slope: Option<&Rational>,
    prec: Precision,
) -> Result<(SpotCheck, Option<(Check, String)>), EvalError> {
    let points: Vec<Rational> = domain
        .subdivide(GRID)
        .iter()
        .map(|p| p.lo().clone())
        .chain([domain.hi().clone()])
        .collect();
    let values = points
        .iter()
        .map(|x| big_f.eval_point(x, prec))
        .collect::<Result<Vec<_>, _>>()?;
    let mut outcomes: Vec<(Check, String)> = Vec::new();
    match property {
        ShapeProperty::Constant | ShapeProperty::Linear => {
            for (x, fx) in points.iter().zip(&values).skip(1) {
                let mut diff = fx.sub(&values[0]);
                if let Some(c) = slope {
                    diff = diff.sub(&Value::Exact(c * (x - &points[0])));
                }
                outcomes.push((zero_check(&diff), format!("x = {x}")));
            }
        }
        ShapeProperty::Increasing | ShapeProperty::Decreasing => {
            for i in 0..points.len() - 1 {
                let (a, b) = (values[i].to_interval(), values[i + 1].to_interval());
                let check = if property == ShapeProperty::Increasing {
                    compare_le(&a, &b, true)
                } else {
                    compare_le(&b, &a, true)
                };
                outcomes.push((check, format!("[{}, {}]", points[i], points[i + 1])));
            }
        }
        ShapeProperty::ConvexDown | ShapeProperty::ConvexUp => {
            for i in 0..points.len() {
                for j in (i + 2..points.len()).step_by(2) {
                    let mid = values[(i + j) / 2].to_interval();
                    let mean = values[i]
                        .to_interval()
                        .add(&values[j].to_interval())
                        .scale(&Rational::frac(1, 2));
                    let check = if property == ShapeProperty::ConvexDown {
                        compare_le(&mid, &mean, false)
                    } else {
                        compare_le(&mean, &mid, false)
                    };
                    outcomes.push((check, format!("[{}, {}]", points[i], points[j])));
                }
            }
        }
    }
    let summary = SpotCheck {
        points: points.len(),
        comparisons: outcomes.len(),
        precision_bits: prec.bits(),
    };
    let first_bad = outcomes
        .iter()
        .position(|(c, _)| matches!(c, Check::Fail))
        .or_else(|| {
            outcomes
                .iter()
                .position(|(c, _)| matches!(c, Check::Undecided))
        });
    Ok((summary, first_bad.map(|i| outcomes.swap_remove(i))))
}

/// Certifies `premise` about the control function on the claim domain and
/// emits the implied shape of the controlled function, confirmed on a grid.
///
/// Undecided grid comparisons are retried at doubled precision a few times.
pub fn infer_shape(
    claim: &ControlClaim,
    premise: Premise,
    prec: Precision,
) -> Result<ShapeReport, ShapeError> {
    let domain = claim.domain();
    let evidence = certify_premise(claim.control(), domain, premise, prec)
        .map_err(|reason| ShapeError::PremiseNotCertified { premise, reason })?;
    let property = premise.conclusion();
    let slope = if premise == Premise::IdenticallyConst {
        Some(
            claim
                .control()
                .body()
                .eval_enclosure(domain, prec)?
                .lo()
                .clone(),
        )
    } else {
        None
    };
    let mut p = prec;
    for attempt in 0..=PRECISION_RETRIES {
        let (summary, bad) = spot_check(claim.controlled(), domain, property, slope.as_ref(), p)?;
        match bad {
            None => {
                return Ok(ShapeReport {
                    property,
                    premise,
                    implication: premise.implication(),
                    domain: domain.clone(),
                    claim: "assumed",
                    premise_evidence: evidence,
                    spot_check: summary,
                })
            }
            Some((Check::Fail, at)) => return Err(ShapeError::SpotCheckFailed { property, at }),
            Some((_, at)) if attempt == PRECISION_RETRIES => {
                return Err(ShapeError::SpotCheckUndecided {
                    property,
                    at,
                    precision_bits: p.bits(),
                })
            }
            Some(_) => p = p.doubled(),
        }
    }
    unreachable!("loop returns on the last attempt")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn claim(big_f: &str, f: &str, lo: i64, hi: i64) -> ControlClaim {
        ControlClaim::parse(big_f, f, Interval::new(lo.into(), hi.into()).unwrap()).unwrap()
    }

    fn infer(c: &ControlClaim, premise: Premise) -> Result<ShapeReport, ShapeError> {
        infer_shape(c, premise, Precision::default())
    }

    #[test]
    fn positive_control_gives_increasing() {
        let report = infer(&claim("x^2", "2*x", 1, 5), Premise::Positive).unwrap();
        assert_eq!(report.property, ShapeProperty::Increasing);
        assert_eq!(report.spot_check.comparisons, GRID);
    }

    #[test]
    fn increasing_control_gives_convex_down() {
        let report = infer(&claim("x^2", "2*x", 0, 5), Premise::Increasing).unwrap();
        assert_eq!(report.property, ShapeProperty::ConvexDown);
    }

    #[test]
    fn premise_failing_at_a_point() {
        let err = infer(&claim("x^3", "3*x^2", -1, 1), Premise::Positive).unwrap_err();
        assert!(matches!(err, ShapeError::PremiseNotCertified { .. }));
    }

    #[test]
    fn remaining_implications() {
        let cases = [
            (
                claim("5", "0", -2, 3),
                Premise::IdenticallyZero,
                ShapeProperty::Constant,
            ),
            (
                claim("3*x + 1", "3", -2, 3),
                Premise::IdenticallyConst,
                ShapeProperty::Linear,
            ),
            (
                claim("1/x", "-1/x^2", 1, 4),
                Premise::Negative,
                ShapeProperty::Decreasing,
            ),
            (
                claim("sqrt(x)", "1/(2*sqrt(x))", 1, 4),
                Premise::Decreasing,
                ShapeProperty::ConvexUp,
            ),
        ];
        for (c, premise, property) in cases {
            assert_eq!(infer(&c, premise).unwrap().property, property);
        }
    }

    #[test]
    fn false_claim_is_caught_by_the_spot_check() {
        // -x^2 is not controlled by 2x; the premise holds but F decreases
        let err = infer(&claim("-x^2", "2*x", 1, 5), Premise::Positive).unwrap_err();
        assert!(matches!(err, ShapeError::SpotCheckFailed { .. }));
    }
}
