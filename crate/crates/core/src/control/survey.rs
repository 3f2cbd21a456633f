use rayon::prelude::*;
use serde::Serialize;

use super::{check_bracket, ControlClaim, ControlError, ControlVerdict, Violation};
use crate::numeric::{Precision, Rational};
use crate::sample::subinterval_family;
use crate::verdict::Verdict;

/// A subinterval whose bracket check was inconclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Undecided {
    pub index: usize,
    pub u: Rational,
    pub v: Rational,
    pub reason: String,
}

/// Bracket checks over a seeded subinterval family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Survey {
    pub checked: usize,
    pub certified: usize,
    /// Certified witnesses with `{p, q} ⊆ {u, v}`.
    pub endpoint_witnesses: usize,
    pub undecided: Vec<Undecided>,
    /// The refuted subinterval with the smallest index.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation_index: Option<usize>,
}

impl Survey {
    pub fn status(&self) -> &'static str {
        if self.violation.is_some() {
            "refuted"
        } else if !self.undecided.is_empty() {
            "inconclusive"
        } else {
            "certified"
        }
    }
}

/// Runs [`check_bracket`] on `count` subintervals from
/// [`subinterval_family`]. Checks run in parallel; the tally is assembled in
/// family order, so the result depends only on the arguments.
pub fn survey_control(
    claim: &ControlClaim,
    count: usize,
    seed: u64,
    grid_n: usize,
    prec: Precision,
) -> Result<Survey, ControlError> {
    let family = subinterval_family(claim.domain(), count, seed);
    let verdicts: Vec<ControlVerdict> = family
        .par_iter()
        .map(|(u, v)| check_bracket(claim, u, v, grid_n, prec))
        .collect::<Result<_, _>>()?;
    let mut survey = Survey {
        checked: family.len(),
        certified: 0,
        endpoint_witnesses: 0,
        undecided: Vec::new(),
        violation: None,
        violation_index: None,
    };
    for (index, ((u, v), verdict)) in family.into_iter().zip(verdicts).enumerate() {
        match verdict {
            Verdict::Certified { witness } => {
                survey.certified += 1;
                if witness.uses_endpoints() {
                    survey.endpoint_witnesses += 1;
                }
            }
            Verdict::Refuted { violation } => {
                if survey.violation.is_none() {
                    survey.violation = Some(violation);
                    survey.violation_index = Some(index);
                }
            }
            Verdict::Inconclusive { reason } => survey.undecided.push(Undecided {
                index,
                u,
                v,
                reason,
            }),
        }
    }
    Ok(survey)
}
