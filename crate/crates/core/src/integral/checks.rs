use serde::Serialize;

use super::{
    integrate_enclosure, integrate_piecewise, IntegralEnclosure, IntegralError, PiecewisePlan,
};
use crate::expr::{FunctionSpec, Value};
use crate::numeric::{Interval, Precision, Rational};
use crate::verdict::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdditivityReport {
    pub whole: IntegralEnclosure,
    pub left: IntegralEnclosure,
    pub right: IntegralEnclosure,
    /// `left + right` as an interval sum.
    pub sum: Interval,
}

pub type AdditivityVerdict = Verdict<AdditivityReport, AdditivityReport>;

/// Checks that the enclosure on `[u, w]` meets the sum of the enclosures on
/// `[u, v]` and `[v, w]`. Both contain the true value, so a disjoint pair
/// signals a defect in the quadrature itself.
pub fn check_additivity(
    f: &FunctionSpec,
    u: &Rational,
    v: &Rational,
    w: &Rational,
    n: usize,
    prec: Precision,
) -> Result<AdditivityVerdict, IntegralError> {
    if !(u < v && v < w) {
        return Err(IntegralError::Order("u < v < w"));
    }
    let whole = integrate_enclosure(f, u, w, n, prec)?;
    let left = integrate_enclosure(f, u, v, n, prec)?;
    let right = integrate_enclosure(f, v, w, n, prec)?;
    let sum = left.interval().add(&right.interval());
    let overlap = whole.interval().overlaps(&sum);
    let report = AdditivityReport {
        whole,
        left,
        right,
        sum,
    };
    Ok(if overlap {
        Verdict::Certified { witness: report }
    } else {
        Verdict::Refuted { violation: report }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NewtonLeibnizReport {
    /// `F(v) - F(u)`.
    pub difference: Value,
    pub enclosure: IntegralEnclosure,
    /// Whether the whole difference enclosure lies inside the integral
    /// enclosure, not just meets it.
    pub contained: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NewtonLeibnizMismatch {
    pub difference: Value,
    pub enclosure: IntegralEnclosure,
    /// Certified positive distance between the two enclosures.
    pub gap: Rational,
}

pub type NewtonLeibnizVerdict = Verdict<NewtonLeibnizReport, NewtonLeibnizMismatch>;

/// Compares `F(v) - F(u)` with an enclosure of `∫_u^v f`. Refuted means the
/// two are certainly different, so `f` is not the derivative of `F` on
/// `[u, v]`. `plan` splits the integral where `f` jumps or turns.
pub fn newton_leibniz_check(
    big_f: &FunctionSpec,
    f: &FunctionSpec,
    u: &Rational,
    v: &Rational,
    n: usize,
    plan: Option<&PiecewisePlan>,
    prec: Precision,
) -> Result<NewtonLeibnizVerdict, IntegralError> {
    for x in [u, v] {
        if !big_f.domain().contains(x) {
            return Err(IntegralError::OutsideDomain {
                u: u.to_string(),
                v: v.to_string(),
                domain: big_f.domain().to_string(),
            });
        }
    }
    let difference = big_f.eval_point(v, prec)?.sub(&big_f.eval_point(u, prec)?);
    let enclosure = match plan {
        Some(plan) => integrate_piecewise(f, plan, u, v, n, prec)?,
        None => integrate_enclosure(f, u, v, n, prec)?,
    };
    let diff = difference.to_interval();
    let whole = enclosure.interval();
    if whole.overlaps(&diff) {
        let contained = whole.encloses(&diff);
        return Ok(Verdict::Certified {
            witness: NewtonLeibnizReport {
                difference,
                enclosure,
                contained,
            },
        });
    }
    let gap = if diff.hi() < whole.lo() {
        whole.lo() - diff.hi()
    } else {
        diff.lo() - whole.hi()
    };
    Ok(Verdict::Refuted {
        violation: NewtonLeibnizMismatch {
            difference,
            enclosure,
            gap,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str, lo: &str, hi: &str) -> FunctionSpec {
        FunctionSpec::parse(text, Interval::new(r(lo), r(hi)).unwrap()).unwrap()
    }

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn prec() -> Precision {
        Precision::default()
    }

    #[test]
    fn additivity_examples() {
        let sq = spec("x^2", "0", "1");
        assert!(
            check_additivity(&sq, &r("0"), &r("1/2"), &r("1"), 100, prec())
                .unwrap()
                .is_certified()
        );
        let sgn = spec("sgn(x)", "-1", "2");
        let verdict = check_additivity(&sgn, &r("-1"), &r("0"), &r("2"), 10, prec()).unwrap();
        assert!(verdict.witness().unwrap().sum.contains(&r("1")));
        assert_eq!(
            check_additivity(&sq, &r("0"), &r("1"), &r("1"), 10, prec()),
            Err(IntegralError::Order("u < v < w"))
        );
    }

    #[test]
    fn cube_and_its_derivative() {
        let verdict = newton_leibniz_check(
            &spec("x^3", "0", "1"),
            &spec("3*x^2", "0", "1"),
            &r("0"),
            &r("1"),
            1000,
            None,
            prec(),
        )
        .unwrap();
        let report = verdict.witness().expect("certified");
        assert!(report.contained);
        assert_eq!(report.difference, Value::Exact(r("1")));
        assert!(report.enclosure.width() <= r("6/1000"));
    }

    #[test]
    fn wrong_derivative_is_refuted() {
        let verdict = newton_leibniz_check(
            &spec("x^3", "0", "1"),
            &spec("2*x", "0", "1"),
            &r("0"),
            &r("1/2"),
            1000,
            None,
            prec(),
        )
        .unwrap();
        let mismatch = verdict.violation().expect("refuted");
        // F(1/2) - F(0) = 1/8 sits below the enclosure of the integral 1/4
        assert_eq!(mismatch.difference, Value::Exact(r("1/8")));
        assert!(mismatch.gap.is_positive());
        assert!(mismatch.enclosure.contains(&r("1/4")));
    }

    #[test]
    fn abs_and_sign_with_split() {
        let plan = PiecewisePlan::new(vec![r("0")]).unwrap();
        let verdict = newton_leibniz_check(
            &spec("abs(x)", "-1", "2"),
            &spec("sgn(x)", "-1", "2"),
            &r("-1"),
            &r("2"),
            1200,
            Some(&plan),
            prec(),
        )
        .unwrap();
        assert!(verdict.witness().unwrap().contained);
    }

    #[test]
    fn degenerate_interval_is_zero() {
        let f = spec("x^3", "0", "1");
        let verdict = newton_leibniz_check(
            &f,
            &spec("3*x^2", "0", "1"),
            &r("1/3"),
            &r("1/3"),
            10,
            None,
            prec(),
        )
        .unwrap();
        let report = verdict.witness().unwrap();
        assert_eq!(report.difference, Value::Exact(Rational::zero()));
        assert_eq!(report.enclosure.width(), Rational::zero());
    }
}
