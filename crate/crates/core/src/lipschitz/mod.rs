//! Lipschitz constants, the two-sided Linqun inequalities and the
//! constructive bracket search they license.
//!
//! A function `g` is a Lipschitz control of `f` on `[a, b]` exactly when for
//! some `M`, every `u < v` and every `s ∈ [u, v]`:
//!
//! ```text
//! |(f(v) - f(u)) / (v - u) - g(s)| ≤ M |v - u|
//! ```
//!
//! [`check_linqun`] tests this on a deterministic sample,
//! [`control_is_2m_lipschitz`] propagates it to `|g(v) - g(u)| ≤ 2M|v - u|`,
//! and [`find_bracket_by_subdivision`] turns it into explicit bracket points.

mod linqun;
mod subdivision;

pub use linqun::{
    check_linqun, control_is_2m_lipschitz, LinqunCounterexample, LinqunForm, LinqunReport,
    LinqunVerdict, PairViolation, TwoMReport, TwoMVerdict,
};
pub use subdivision::{find_bracket_by_subdivision, BracketBranch, SubdivisionBracket};

use serde::Serialize;
use thiserror::Error;

use crate::control::ControlError;
use crate::expr::{EvalError, Expr, FunctionSpec};
use crate::numeric::{Interval, Precision, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LipschitzError {
    #[error("not Lipschitz: {reason}")]
    NotLipschitz {
        reason: String,
        /// The derivative bound kept growing past the cap; this is evidence,
        /// not a proof.
        unbounded_within_budget: bool,
    },
    #[error("{what} {interval} is not inside the declared domain {domain}")]
    OutsideDomain {
        what: &'static str,
        interval: String,
        domain: String,
    },
    #[error("premise missing: {0}")]
    PremiseMissing(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Control(#[from] ControlError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LipschitzMethod {
    /// Supremum of a derivative enclosure over a uniform subdivision.
    DerivativeRange,
    /// `M(|e|) = M(e)`, then a derivative range for `e`.
    SyntacticRule,
    UserSupplied,
}

/// `|f(u) - f(v)| ≤ M |u - v|` on `domain`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LipschitzCert {
    pub function: String,
    pub domain: Interval,
    #[serde(rename = "M")]
    pub m: Rational,
    pub method: LipschitzMethod,
    /// Number of pieces of the subdivision that produced the bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pieces: Option<usize>,
}

impl LipschitzCert {
    pub fn user_supplied(f: &FunctionSpec, domain: Interval, m: Rational) -> Self {
        LipschitzCert {
            function: f.body().to_string(),
            domain,
            m,
            method: LipschitzMethod::UserSupplied,
            pieces: None,
        }
    }
}

/// Refinement limits for [`lipschitz_bound_with`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundBudget {
    /// The finest subdivision has `2^max_level` pieces.
    pub max_level: u32,
    /// Bounds above this are reported as unbounded.
    pub cap: Rational,
}

impl Default for BoundBudget {
    fn default() -> Self {
        BoundBudget {
            max_level: 10,
            cap: Rational::pow2(32),
        }
    }
}

/// Certified Lipschitz constant of `f` on `domain` with the default budget.
pub fn lipschitz_bound(
    f: &FunctionSpec,
    domain: &Interval,
    prec: Precision,
) -> Result<LipschitzCert, LipschitzError> {
    lipschitz_bound_with(f, domain, prec, &BoundBudget::default())
}

/// Bounds `|f'|` on `domain` by enclosing the symbolic derivative over
/// `2^k` equal pieces for increasing `k`, stopping once the bound improves by
/// less than 1/64 of itself. Every level that evaluates on all pieces gives
/// a valid bound; the smallest is returned.
///
/// Any `sgn` node makes the function not Lipschitz. A derivative that cannot
/// be enclosed on some piece at every level (a pole or a square root at zero
/// touching the domain) does too.
pub fn lipschitz_bound_with(
    f: &FunctionSpec,
    domain: &Interval,
    prec: Precision,
    budget: &BoundBudget,
) -> Result<LipschitzCert, LipschitzError> {
    if !f.domain().encloses(domain) {
        return Err(LipschitzError::OutsideDomain {
            what: "interval",
            interval: domain.to_string(),
            domain: f.domain().to_string(),
        });
    }
    if f.body().contains_sgn() {
        return Err(LipschitzError::NotLipschitz {
            reason: format!("`{}` contains sgn, which jumps", f.body()),
            unbounded_within_budget: false,
        });
    }
    let mut body = f.body();
    let mut method = LipschitzMethod::DerivativeRange;
    while let Expr::Abs(inner) = body {
        body = inner;
        method = LipschitzMethod::SyntacticRule;
    }
    let derivative = body
        .derivative()
        .expect("sgn-free expressions are differentiable");
    let mut best: Option<(Rational, usize)> = None;
    for level in 0..=budget.max_level {
        let pieces = 1usize << level;
        let Some(sup) = sup_abs(&derivative, domain, pieces, prec) else {
            continue;
        };
        let improved = !matches!(&best, Some((m, _)) if &sup >= m);
        let settled = match &best {
            Some((m, _)) => (m - &sup) * Rational::from(64) <= *m,
            None => false,
        };
        if improved {
            best = Some((sup, pieces));
        }
        if settled {
            break;
        }
    }
    let Some((m, pieces)) = best else {
        return Err(LipschitzError::NotLipschitz {
            reason: format!(
                "derivative `{derivative}` has no enclosure on {domain} at any refinement"
            ),
            unbounded_within_budget: false,
        });
    };
    if m > budget.cap {
        return Err(LipschitzError::NotLipschitz {
            reason: format!(
                "derivative bound {m} exceeds the cap {} after {pieces} pieces",
                budget.cap
            ),
            unbounded_within_budget: true,
        });
    }
    Ok(LipschitzCert {
        function: f.body().to_string(),
        domain: domain.clone(),
        m,
        method,
        pieces: Some(pieces),
    })
}

fn sup_abs(e: &Expr, domain: &Interval, pieces: usize, prec: Precision) -> Option<Rational> {
    domain
        .subdivide(pieces)
        .iter()
        .map(|piece| {
            e.eval_enclosure(piece, prec)
                .ok()
                .map(|enc| enc.abs().hi().clone())
        })
        .try_fold(Rational::zero(), |acc, hi| hi.map(|hi| acc.max(hi)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str, lo: i64, hi: i64) -> FunctionSpec {
        FunctionSpec::parse(text, Interval::new(lo.into(), hi.into()).unwrap()).unwrap()
    }

    fn bound(text: &str, lo: i64, hi: i64) -> Result<LipschitzCert, LipschitzError> {
        let f = spec(text, lo, hi);
        lipschitz_bound(&f, &f.domain().clone(), Precision::default())
    }

    #[test]
    fn derivative_range_bounds() {
        let cert = bound("x^2", 0, 1).unwrap();
        assert_eq!(cert.m, Rational::from(2));
        assert_eq!(cert.method, LipschitzMethod::DerivativeRange);
        assert_eq!(bound("7", -3, 3).unwrap().m, Rational::zero());
        // the 1-piece enclosure of 3x^2 - 2x on [0, 1] is [-2, 3]; refinement
        // brings the bound close to the true sup 1
        let m = bound("x^3 - x^2", 0, 1).unwrap().m;
        assert!(m >= Rational::one() && m <= Rational::frac(9, 8));
    }

    #[test]
    fn abs_uses_syntactic_rule() {
        let cert = bound("abs(2*x - 1)", -1, 1).unwrap();
        assert_eq!(cert.method, LipschitzMethod::SyntacticRule);
        assert_eq!(cert.m, Rational::from(2));
    }

    #[test]
    fn not_lipschitz_cases() {
        assert!(matches!(
            bound("sgn(x)", -1, 1),
            Err(LipschitzError::NotLipschitz {
                unbounded_within_budget: false,
                ..
            })
        ));
        assert!(matches!(
            bound("sqrt(x)", 0, 1),
            Err(LipschitzError::NotLipschitz { .. })
        ));
        let f = spec("1/x", 1, 2);
        let tight = BoundBudget {
            max_level: 4,
            cap: Rational::frac(1, 2),
        };
        assert!(matches!(
            lipschitz_bound_with(&f, f.domain(), Precision::default(), &tight),
            Err(LipschitzError::NotLipschitz {
                unbounded_within_budget: true,
                ..
            })
        ));
    }
}
