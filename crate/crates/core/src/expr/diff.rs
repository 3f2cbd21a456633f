use thiserror::Error;

use super::Expr;
use crate::numeric::Rational;

/// The expression contains a node without a derivative rule (`sgn`).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{node}` has no derivative rule")]
pub struct NotDifferentiable {
    pub node: String,
}

impl Expr {
    /// Symbolic derivative with respect to `x`.
    ///
    /// `abs(e)` differentiates to `sgn(e) * e'`; `sgn` itself has no rule.
    /// Results are lightly folded (`0 * e`, `1 * e`, constant arithmetic) but
    /// not otherwise simplified.
    pub fn derivative(&self) -> Result<Expr, NotDifferentiable> {
        Ok(match self {
            Expr::Const(_) => zero(),
            Expr::Var => one(),
            Expr::Add(a, b) => add(a.derivative()?, b.derivative()?),
            Expr::Sub(a, b) => sub(a.derivative()?, b.derivative()?),
            Expr::Mul(a, b) => add(
                mul(a.derivative()?, (**b).clone()),
                mul((**a).clone(), b.derivative()?),
            ),
            Expr::Div(a, b) => div(
                sub(
                    mul(a.derivative()?, (**b).clone()),
                    mul((**a).clone(), b.derivative()?),
                ),
                pow((**b).clone(), 2),
            ),
            Expr::PowInt(e, n) => {
                if *n == 0 {
                    zero()
                } else {
                    mul(
                        mul(Expr::constant(*n), pow((**e).clone(), n - 1)),
                        e.derivative()?,
                    )
                }
            }
            Expr::Sqrt(e) => div(e.derivative()?, mul(Expr::constant(2), self.clone())),
            Expr::Sin(e) => mul(Expr::cos((**e).clone()), e.derivative()?),
            Expr::Cos(e) => mul(neg(Expr::sin((**e).clone())), e.derivative()?),
            Expr::Abs(e) => mul(Expr::sgn((**e).clone()), e.derivative()?),
            Expr::Sgn(_) => {
                return Err(NotDifferentiable {
                    node: self.to_string(),
                })
            }
        })
    }
}

fn zero() -> Expr {
    Expr::Const(Rational::zero())
}

fn one() -> Expr {
    Expr::Const(Rational::one())
}

fn is(e: &Expr, k: i64) -> bool {
    e.as_const() == Some(&Rational::from(k))
}

fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        _ if is(&a, 0) => b,
        _ if is(&b, 0) => a,
        _ => Expr::add(a, b),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        _ if is(&b, 0) => a,
        _ if is(&a, 0) => neg(b),
        _ => Expr::sub(a, b),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        _ if is(&a, 0) || is(&b, 0) => zero(),
        _ if is(&a, 1) => b,
        _ if is(&b, 1) => a,
        _ => Expr::mul(a, b),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) if !y.is_zero() => Expr::Const(x / y),
        _ if is(&b, 1) => a,
        _ => Expr::div(a, b),
    }
}

fn pow(e: Expr, n: i32) -> Expr {
    match n {
        0 => one(),
        1 => e,
        _ => Expr::pow(e, n),
    }
}

fn neg(e: Expr) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(-c),
        other => Expr::mul(Expr::constant(-1), other),
    }
}
