use super::{EvalError, Expr};
use crate::numeric::{sincos_enclosure, sqrt_enclosure, Interval, Precision, Rational, TrigFn};

/// Outcome of exact evaluation. `NotExact` is not an error: the value exists
/// but is irrational along the evaluation path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactValue {
    Exact(Rational),
    NotExact,
}

impl ExactValue {
    pub fn into_option(self) -> Option<Rational> {
        match self {
            ExactValue::Exact(r) => Some(r),
            ExactValue::NotExact => None,
        }
    }
}

impl Expr {
    /// Exact rational value at `x`, or `NotExact` when an intermediate value is
    /// irrational (square root of a non-square, sine or cosine of a nonzero
    /// argument). Domain errors take precedence over `NotExact`.
    pub fn eval_exact(&self, x: &Rational) -> Result<ExactValue, EvalError> {
        // Domain errors inside a NotExact branch still have to surface, so an
        // irrational subterm falls back to an enclosure check.
        match self.exact(x)? {
            Some(r) => Ok(ExactValue::Exact(r)),
            None => {
                self.eval_enclosure(
                    &Interval::point(x.clone()),
                    Precision::new(32).expect("nonzero"),
                )?;
                Ok(ExactValue::NotExact)
            }
        }
    }

    fn exact(&self, x: &Rational) -> Result<Option<Rational>, EvalError> {
        let at = || x.to_string();
        Ok(match self {
            Expr::Const(c) => Some(c.clone()),
            Expr::Var => Some(x.clone()),
            Expr::Add(a, b) => a.exact(x)?.zip(b.exact(x)?).map(|(a, b)| a + b),
            Expr::Sub(a, b) => a.exact(x)?.zip(b.exact(x)?).map(|(a, b)| a - b),
            Expr::Mul(a, b) => a.exact(x)?.zip(b.exact(x)?).map(|(a, b)| a * b),
            Expr::Div(a, b) => match a.exact(x)?.zip(b.exact(x)?) {
                Some((_, d)) if d.is_zero() => {
                    return Err(EvalError::domain(self, at(), "division by zero"))
                }
                Some((n, d)) => Some(n / d),
                None => None,
            },
            Expr::PowInt(base, n) => match base.exact(x)? {
                Some(b) => Some(
                    b.pow(*n)
                        .map_err(|_| EvalError::domain(self, at(), "negative power of zero"))?,
                ),
                None => None,
            },
            Expr::Sqrt(e) => match e.exact(x)? {
                Some(t) if t.is_negative() => {
                    return Err(EvalError::domain(
                        self,
                        at(),
                        "square root of a negative value",
                    ))
                }
                Some(t) => t.exact_sqrt(),
                None => None,
            },
            Expr::Sin(e) => e.exact(x)?.filter(Rational::is_zero),
            Expr::Cos(e) => e
                .exact(x)?
                .filter(Rational::is_zero)
                .map(|_| Rational::one()),
            Expr::Abs(e) => e.exact(x)?.map(|t| t.abs()),
            Expr::Sgn(e) => e.exact(x)?.map(|t| Rational::from(t.signum())),
        })
    }

    /// Enclosure of the range of the expression over `x`.
    ///
    /// Fails when a denominator enclosure contains zero or a square-root
    /// argument enclosure reaches below zero. Refining `x` (or raising
    /// `prec`) can turn such a failure into success when the true range
    /// avoids the singular value.
    pub fn eval_enclosure(&self, x: &Interval, prec: Precision) -> Result<Interval, EvalError> {
        Ok(match self {
            Expr::Const(c) => Interval::point(c.clone()),
            Expr::Var => x.clone(),
            Expr::Add(a, b) => a.eval_enclosure(x, prec)?.add(&b.eval_enclosure(x, prec)?),
            Expr::Sub(a, b) => a.eval_enclosure(x, prec)?.sub(&b.eval_enclosure(x, prec)?),
            Expr::Mul(a, b) => a.eval_enclosure(x, prec)?.mul(&b.eval_enclosure(x, prec)?),
            Expr::Div(a, b) => {
                let num = a.eval_enclosure(x, prec)?;
                let den = b.eval_enclosure(x, prec)?;
                num.div(&den).map_err(|_| {
                    EvalError::domain(self, x, format!("denominator encloses zero: {den}"))
                })?
            }
            Expr::PowInt(base, n) => {
                let b = base.eval_enclosure(x, prec)?;
                b.pow_int(*n).map_err(|_| {
                    EvalError::domain(
                        self,
                        x,
                        format!("negative power of an interval containing zero: {b}"),
                    )
                })?
            }
            Expr::Sqrt(e) => {
                let t = e.eval_enclosure(x, prec)?;
                sqrt_enclosure(&t, prec).map_err(|_| {
                    EvalError::domain(
                        self,
                        x,
                        format!("square root argument reaches below zero: {t}"),
                    )
                })?
            }
            Expr::Sin(e) => sincos_enclosure(&e.eval_enclosure(x, prec)?, TrigFn::Sin, prec),
            Expr::Cos(e) => sincos_enclosure(&e.eval_enclosure(x, prec)?, TrigFn::Cos, prec),
            Expr::Abs(e) => e.eval_enclosure(x, prec)?.abs(),
            Expr::Sgn(e) => e.eval_enclosure(x, prec)?.sgn(),
        })
    }
}
