use serde::Serialize;

use super::LipschitzError;
use crate::control::difference_quotient;
use crate::expr::{FunctionSpec, Value};
use crate::numeric::{Interval, Precision, Rational};
use crate::sample::DyadicLevels;

/// How one bracket point was found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum BracketBranch {
    /// No probed subinterval had a quotient certainly on the needed side of
    /// the reference quotient, so the left endpoint is used.
    ConstantQuotient,
    /// `[r, s]` has quotient gap `d` from the reference; it was cut into `n`
    /// pieces with `M (s - r) / n < d`.
    Subdivided {
        r: Rational,
        s: Rational,
        d: Rational,
        n: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubdivisionBracket {
    pub u: Rational,
    pub v: Rational,
    pub p: Rational,
    pub q: Rational,
    pub dq: Value,
    pub g_p: Value,
    pub g_q: Value,
    pub p_branch: BracketBranch,
    pub q_branch: BracketBranch,
}

/// Subintervals of `[u, v]` probed for a quotient gap: the dyadic partition
/// down to `2^-PROBE_DEPTH` of the width.
const PROBE_DEPTH: u32 = 8;
/// Largest subdivision count the scan will attempt.
const MAX_PIECES: u64 = 1 << 16;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    /// Looking for `p` with `g(p) ≤ D`.
    Below,
    /// Looking for `q` with `g(q) ≥ D`.
    Above,
}

/// Finds `p, q ∈ [u, v]` with `g(p) ≤ (f(v) - f(u)) / (v - u) ≤ g(q)`
/// following the constructive argument that the Linqun inequality with
/// constant `M` makes `g` a control of `f`.
///
/// For `p`: pick a probed `[r, s]` whose quotient is below `D` by `d > 0`,
/// minimising `(s - r) / d`; cut it into `n` pieces of width `h` with
/// `M h < d`; the piece with the smallest quotient has quotient at most that
/// of `[r, s]`, and its left end is `p`. Then
/// `g(p) ≤ Q(p, p + h) + M h < Q(r, s) + d = D`. `q` is symmetric.
///
/// The returned pair always passes a final certified bracket check;
/// otherwise `HypothesisViolated` reports that the inequality was false.
pub fn find_bracket_by_subdivision(
    f: &FunctionSpec,
    g: &FunctionSpec,
    m: &Rational,
    u: &Rational,
    v: &Rational,
    prec: Precision,
) -> Result<SubdivisionBracket, LipschitzError> {
    if u >= v {
        return Err(LipschitzError::OutsideDomain {
            what: "subinterval",
            interval: format!("[{u}, {v}]"),
            domain: "a non-degenerate interval".into(),
        });
    }
    for spec in [f, g] {
        if !(spec.domain().contains(u) && spec.domain().contains(v)) {
            return Err(LipschitzError::OutsideDomain {
                what: "subinterval",
                interval: format!("[{u}, {v}]"),
                domain: spec.domain().to_string(),
            });
        }
    }
    let dq = difference_quotient(f, u, v, prec)?;
    let span = Interval::new(u.clone(), v.clone()).expect("u < v");
    let probes = probe_quotients(f, &span, prec)?;
    let (p, p_branch) = locate(f, m, u, &dq, &probes, Side::Below, prec)?;
    let (q, q_branch) = locate(f, m, u, &dq, &probes, Side::Above, prec)?;
    let g_p = g.eval_point(&p, prec)?;
    let g_q = g.eval_point(&q, prec)?;
    if g_p.hi() > dq.lo() {
        return Err(LipschitzError::HypothesisViolated(format!(
            "g(p) = {} at p = {p} is not certainly at most the quotient {} on [{u}, {v}]",
            g_p.to_interval(),
            dq.to_interval()
        )));
    }
    if g_q.lo() < dq.hi() {
        return Err(LipschitzError::HypothesisViolated(format!(
            "g(q) = {} at q = {q} is not certainly at least the quotient {} on [{u}, {v}]",
            g_q.to_interval(),
            dq.to_interval()
        )));
    }
    Ok(SubdivisionBracket {
        u: u.clone(),
        v: v.clone(),
        p,
        q,
        dq,
        g_p,
        g_q,
        p_branch,
        q_branch,
    })
}

fn probe_quotients(
    f: &FunctionSpec,
    span: &Interval,
    prec: Precision,
) -> Result<Vec<(Rational, Rational, Value)>, LipschitzError> {
    let count = (1usize << (PROBE_DEPTH + 1)) - 1;
    DyadicLevels::new(span.clone())
        .take(count)
        .map(|(r, s)| Ok((r.clone(), s.clone(), difference_quotient(f, &r, &s, prec)?)))
        .collect()
}

/// Certified lower bound of the gap between the reference quotient and a
/// probe quotient on the requested side, when positive.
fn gap(dq: &Value, probe: &Value, side: Side) -> Option<Rational> {
    let d = match side {
        Side::Below => dq.lo() - probe.hi(),
        Side::Above => probe.lo() - dq.hi(),
    };
    d.is_positive().then_some(d)
}

fn locate(
    f: &FunctionSpec,
    m: &Rational,
    u: &Rational,
    dq: &Value,
    probes: &[(Rational, Rational, Value)],
    side: Side,
    prec: Precision,
) -> Result<(Rational, BracketBranch), LipschitzError> {
    let best = probes
        .iter()
        .filter_map(|(r, s, q)| gap(dq, q, side).map(|d| ((s - r) / &d, r, s, d)))
        .min_by(|a, b| a.0.cmp(&b.0));
    let Some((_, r, s, d)) = best else {
        return Ok((u.clone(), BracketBranch::ConstantQuotient));
    };
    let n = (m * (s - r) / &d).floor() + 1;
    let n: u64 = u64::try_from(n)
        .ok()
        .filter(|n| *n <= MAX_PIECES)
        .ok_or_else(|| {
            LipschitzError::BudgetExhausted(format!(
                "more than {MAX_PIECES} pieces needed on [{r}, {s}]"
            ))
        })?;
    let h = (s - r) / Rational::from(n as i64);
    let mut chosen: Option<(Rational, Value)> = None;
    for k in 0..n {
        let p = r + &h * Rational::from(k as i64);
        let q = difference_quotient(f, &p, &(&p + &h), prec)?;
        let better = match &chosen {
            None => true,
            Some((_, c)) => match side {
                Side::Below => q.hi() < c.hi(),
                Side::Above => q.lo() > c.lo(),
            },
        };
        if better {
            chosen = Some((p, q));
        }
    }
    // The extreme piece quotient is on the right side of the mean quotient of
    // [r, s] in exact arithmetic; enclosure slack is caught by the final check.
    let (point, _) = chosen.expect("n >= 1");
    Ok((
        point,
        BracketBranch::Subdivided {
            r: r.clone(),
            s: s.clone(),
            d,
            n,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str) -> FunctionSpec {
        FunctionSpec::parse(text, Interval::new((-1).into(), 2.into()).unwrap()).unwrap()
    }

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn cube_on_symmetric_interval() {
        let b = find_bracket_by_subdivision(
            &spec("x^3"),
            &spec("3*x^2"),
            &r("6"),
            &r("-1"),
            &r("1"),
            Precision::default(),
        )
        .unwrap();
        assert_eq!(b.dq, Value::Exact(r("1")));
        let three = r("3");
        assert!(&three * &b.p * &b.p <= r("1"));
        assert!(&three * &b.q * &b.q >= r("1"));
        assert!(matches!(b.p_branch, BracketBranch::Subdivided { .. }));
    }

    #[test]
    fn linear_function_uses_constant_branch() {
        let b = find_bracket_by_subdivision(
            &spec("2*x + 1"),
            &spec("2"),
            &r("1"),
            &r("0"),
            &r("1"),
            Precision::default(),
        )
        .unwrap();
        assert_eq!((&b.p, &b.q), (&r("0"), &r("0")));
        assert_eq!(b.p_branch, BracketBranch::ConstantQuotient);
    }

    #[test]
    fn false_hypothesis_is_reported() {
        // g = x is not a control of x^2: on [0, 2] the quotient is 2 but g < 2 off the right end
        let err = find_bracket_by_subdivision(
            &spec("x^2"),
            &spec("x"),
            &r("1"),
            &r("0"),
            &r("2"),
            Precision::default(),
        )
        .unwrap_err();
        assert!(matches!(err, LipschitzError::HypothesisViolated(_)));
    }
}
