use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::LipschitzError;
use crate::expr::FunctionSpec;
use crate::numeric::{Interval, Precision, Rational};
use crate::sample::{rng, subinterval_family};
use crate::verdict::Verdict;

/// The two equivalent forms of the inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinqunForm {
    /// `|(f(v) - f(u)) / (v - u) - g(s)| ≤ M (v - u)`
    Quotient,
    /// `|f(v) - f(u) - g(s)(v - u)| ≤ M (v - u)^2`
    Product,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinqunReport {
    pub f: String,
    pub g: String,
    pub domain: Interval,
    #[serde(rename = "M")]
    pub m: Rational,
    pub samples_checked: usize,
    /// Minimum over samples of a certified lower bound on
    /// `M (v - u) - |dq - g(s)|`.
    pub worst_slack: Rational,
    pub seed: u64,
    pub precision_bits: u32,
}

/// A sample where one form certainly fails; `gap` is a certified positive
/// lower bound on the excess of the left side over the right.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinqunCounterexample {
    pub u: Rational,
    pub v: Rational,
    pub s: Rational,
    pub form: LinqunForm,
    pub lhs: Interval,
    pub rhs: Rational,
    pub gap: Rational,
    /// Whether the other form also certainly fails at this sample.
    pub other_form_fails: bool,
}

pub type LinqunVerdict = Verdict<LinqunReport, LinqunCounterexample>;

/// Symmetric pairs `m ± w 2^-(k+1)` about the domain midpoint reach scale
/// `2^-SYMMETRIC_LEVELS` of the width; they expose jumps at the midpoint for
/// constants `M` up to about `2^SYMMETRIC_LEVELS`.
const SYMMETRIC_LEVELS: u32 = 40;

fn sample_pairs(domain: &Interval, count: usize, seed: u64) -> Vec<(Rational, Rational)> {
    if domain.is_point() || count == 0 {
        return Vec::new();
    }
    let mid = domain.midpoint();
    let symmetric = (0..=SYMMETRIC_LEVELS).map(|k| {
        let half = domain.width() * Rational::pow2(-(i64::from(k) + 1));
        (&mid - &half, &mid + &half)
    });
    let rest = count.saturating_sub(SYMMETRIC_LEVELS as usize + 1);
    symmetric
        .chain(subinterval_family(domain, rest, seed))
        .take(count)
        .collect()
}

/// `(u, v, s)` with `s` at `u`, `v`, the midpoint, and a seeded random point.
fn sample_triples(
    domain: &Interval,
    count: usize,
    seed: u64,
) -> Vec<(Rational, Rational, Rational)> {
    let pairs = sample_pairs(domain, count.div_ceil(4), seed);
    let mut rng = rng(seed ^ 0x5eed_5eed);
    let mut triples = Vec::with_capacity(pairs.len() * 4);
    for (u, v) in pairs {
        let t = Rational::new(rng.gen_range(0..=1024i64), 1024).expect("nonzero");
        let random = &u + (&v - &u) * t;
        for s in [u.clone(), v.clone(), u.midpoint(&v), random] {
            triples.push((u.clone(), v.clone(), s));
        }
    }
    triples.truncate(count);
    triples
}

/// Undecided samples are re-evaluated at doubled precision this many times;
/// tiny symmetric pairs need far more bits than the quotient width suggests.
const PRECISION_RETRIES: u32 = 2;

enum Outcome {
    Pass(Rational),
    Fail(Box<LinqunCounterexample>),
    Undecided,
}

fn judge(lhs: &Interval, rhs: &Rational) -> (bool, bool) {
    (lhs.hi() <= rhs, lhs.lo() > rhs)
}

fn check_triple(
    f: &FunctionSpec,
    g: &FunctionSpec,
    m: &Rational,
    (u, v, s): &(Rational, Rational, Rational),
    prec: Precision,
) -> Result<Outcome, LipschitzError> {
    let h = v - u;
    let fu = f.eval_point(u, prec)?;
    let fv = f.eval_point(v, prec)?;
    let gs = g.eval_point(s, prec)?;
    let diff = fv.sub(&fu);
    let quotient_lhs = diff.div_by(&h).expect("u < v").sub(&gs).to_interval().abs();
    let quotient_rhs = m * &h;
    let product_lhs = diff.sub(&gs.scale(&h)).to_interval().abs();
    let product_rhs = m * &h * &h;
    let (q_pass, q_fail) = judge(&quotient_lhs, &quotient_rhs);
    let (p_pass, p_fail) = judge(&product_lhs, &product_rhs);
    if (q_pass && p_fail) || (q_fail && p_pass) {
        unreachable!("the two forms differ by the positive factor v - u and cannot disagree");
    }
    let counterexample = |form, lhs: Interval, rhs: Rational, other_form_fails| {
        Outcome::Fail(Box::new(LinqunCounterexample {
            u: u.clone(),
            v: v.clone(),
            s: s.clone(),
            form,
            gap: lhs.lo() - &rhs,
            lhs,
            rhs,
            other_form_fails,
        }))
    };
    Ok(if q_fail {
        counterexample(LinqunForm::Quotient, quotient_lhs, quotient_rhs, p_fail)
    } else if p_fail {
        counterexample(LinqunForm::Product, product_lhs, product_rhs, q_fail)
    } else if q_pass && p_pass {
        Outcome::Pass(&quotient_rhs - quotient_lhs.hi())
    } else {
        Outcome::Undecided
    })
}

/// Checks both forms of the inequality on `sample_n` triples `u < v`,
/// `s ∈ [u, v]`. The sample is deterministic in `seed` and includes pairs
/// symmetric about the domain midpoint down to very small scales.
///
/// Refuted on the first sample (in sample order) where either form
/// certainly fails; certified when every sample certainly passes both.
/// Undecided samples are retried at doubled precision, twice.
pub fn check_linqun(
    f: &FunctionSpec,
    g: &FunctionSpec,
    domain: &Interval,
    m: &Rational,
    sample_n: usize,
    seed: u64,
    prec: Precision,
) -> Result<LinqunVerdict, LipschitzError> {
    inside(f, domain)?;
    inside(g, domain)?;
    let triples = sample_triples(domain, sample_n, seed);
    let outcomes = triples
        .par_iter()
        .map(|t| {
            let mut p = prec;
            let mut outcome = check_triple(f, g, m, t, p)?;
            for _ in 0..PRECISION_RETRIES {
                if !matches!(outcome, Outcome::Undecided) {
                    break;
                }
                p = p.doubled();
                outcome = check_triple(f, g, m, t, p)?;
            }
            Ok(outcome)
        })
        .collect::<Result<Vec<_>, LipschitzError>>()?;
    let mut worst: Option<Rational> = None;
    let mut undecided = 0usize;
    for outcome in outcomes {
        match outcome {
            Outcome::Fail(c) => return Ok(Verdict::Refuted { violation: *c }),
            Outcome::Pass(slack) => {
                if worst.as_ref().map_or(true, |w| &slack < w) {
                    worst = Some(slack);
                }
            }
            Outcome::Undecided => undecided += 1,
        }
    }
    if undecided > 0 {
        return Ok(Verdict::inconclusive(format!(
            "{undecided} of {} samples undecided at up to {} bits",
            triples.len(),
            prec.bits() << PRECISION_RETRIES
        )));
    }
    let Some(worst_slack) = worst else {
        return Ok(Verdict::inconclusive("no samples"));
    };
    Ok(Verdict::Certified {
        witness: LinqunReport {
            f: f.body().to_string(),
            g: g.body().to_string(),
            domain: domain.clone(),
            m: m.clone(),
            samples_checked: triples.len(),
            worst_slack,
            seed,
            precision_bits: prec.bits(),
        },
    })
}

fn inside(spec: &FunctionSpec, domain: &Interval) -> Result<(), LipschitzError> {
    if spec.domain().encloses(domain) {
        Ok(())
    } else {
        Err(LipschitzError::OutsideDomain {
            what: "interval",
            interval: domain.to_string(),
            domain: spec.domain().to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwoMReport {
    /// The propagated constant `2M`.
    pub bound: Rational,
    pub pairs_checked: usize,
    pub worst_slack: Rational,
    pub linqun: LinqunReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairViolation {
    pub u: Rational,
    pub v: Rational,
    pub lhs: Interval,
    pub rhs: Rational,
}

pub type TwoMVerdict = Verdict<TwoMReport, PairViolation>;

/// Checks `|g(v) - g(u)| ≤ 2M |v - u|` on the pairs underlying a passing
/// Linqun check. Fails with `PremiseMissing` when the Linqun check does not
/// pass; a refuted pair also impeaches the Linqun premise.
pub fn control_is_2m_lipschitz(
    f: &FunctionSpec,
    g: &FunctionSpec,
    domain: &Interval,
    m: &Rational,
    sample_n: usize,
    seed: u64,
    prec: Precision,
) -> Result<TwoMVerdict, LipschitzError> {
    let linqun = match check_linqun(f, g, domain, m, sample_n, seed, prec)? {
        Verdict::Certified { witness } => witness,
        Verdict::Refuted { violation } => {
            return Err(LipschitzError::PremiseMissing(format!(
                "Linqun inequality fails at u = {}, v = {}, s = {}",
                violation.u, violation.v, violation.s
            )))
        }
        Verdict::Inconclusive { reason } => {
            return Err(LipschitzError::PremiseMissing(format!(
                "Linqun inequality not certified: {reason}"
            )))
        }
    };
    let bound = m * Rational::from(2);
    let pairs = sample_pairs(domain, sample_n.div_ceil(4), seed);
    let results = pairs
        .par_iter()
        .map(|(u, v)| -> Result<_, LipschitzError> {
            let lhs = g
                .eval_point(v, prec)?
                .sub(&g.eval_point(u, prec)?)
                .to_interval()
                .abs();
            Ok((lhs, &bound * (v - u)))
        })
        .collect::<Result<Vec<_>, LipschitzError>>()?;
    let mut worst: Option<Rational> = None;
    for ((u, v), (lhs, rhs)) in pairs.iter().zip(results) {
        if lhs.lo() > &rhs {
            return Ok(Verdict::Refuted {
                violation: PairViolation {
                    u: u.clone(),
                    v: v.clone(),
                    lhs,
                    rhs,
                },
            });
        }
        if lhs.hi() > &rhs {
            return Ok(Verdict::inconclusive(format!(
                "pair [{u}, {v}] undecided at {} bits",
                prec.bits()
            )));
        }
        let slack = &rhs - lhs.hi();
        if worst.as_ref().map_or(true, |w| &slack < w) {
            worst = Some(slack);
        }
    }
    Ok(Verdict::Certified {
        witness: TwoMReport {
            bound,
            pairs_checked: pairs.len(),
            worst_slack: worst.unwrap_or_else(Rational::zero),
            linqun,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str) -> FunctionSpec {
        FunctionSpec::parse(text, Interval::new((-1).into(), 1.into()).unwrap()).unwrap()
    }

    fn unit() -> Interval {
        Interval::new(0.into(), 1.into()).unwrap()
    }

    fn linqun(f: &str, g: &str, domain: &Interval, m: Rational, n: usize) -> LinqunVerdict {
        check_linqun(&spec(f), &spec(g), domain, &m, n, 0, Precision::default()).unwrap()
    }

    #[test]
    fn square_passes_with_unit_constant() {
        let verdict = linqun("x^2", "2*x", &unit(), Rational::one(), 400);
        let report = verdict.witness().expect("certified");
        assert_eq!(report.samples_checked, 400);
        // s at an endpoint makes |u + v - 2s| = v - u, so the slack reaches 0
        assert_eq!(report.worst_slack, Rational::zero());
    }

    #[test]
    fn zero_constant_fails_on_whole_domain() {
        let verdict = linqun("x^2", "2*x", &unit(), Rational::zero(), 40);
        let c = verdict.violation().expect("refuted");
        assert_eq!(
            (&c.u, &c.v, &c.s),
            (&Rational::zero(), &Rational::one(), &Rational::zero())
        );
        assert!(c.other_form_fails);
    }

    #[test]
    fn abs_with_sgn_fails_for_large_constants() {
        let domain = Interval::new((-1).into(), 1.into()).unwrap();
        let verdict = linqun("abs(x)", "sgn(x)", &domain, Rational::from(1_000_000), 200);
        let c = verdict.violation().expect("refuted");
        assert_eq!(&c.u + &c.v, Rational::zero());
        assert!(c.gap.is_positive());
    }

    #[test]
    fn two_m_propagation() {
        let verdict = control_is_2m_lipschitz(
            &spec("x^2"),
            &spec("2*x"),
            &unit(),
            &Rational::one(),
            400,
            0,
            Precision::default(),
        )
        .unwrap();
        assert_eq!(verdict.witness().unwrap().worst_slack, Rational::zero());
        let missing = control_is_2m_lipschitz(
            &spec("x^2"),
            &spec("3*x"),
            &unit(),
            &Rational::one(),
            400,
            0,
            Precision::default(),
        );
        assert!(matches!(missing, Err(LipschitzError::PremiseMissing(_))));
    }

    #[test]
    fn samples_are_deterministic() {
        let d = unit();
        assert_eq!(sample_triples(&d, 100, 9), sample_triples(&d, 100, 9));
        assert_eq!(sample_triples(&d, 101, 9).len(), 101);
    }
}
