//! Single-variable elementary-function expressions.
//!
//! An [`Expr`] is parsed from text, printed back canonically, evaluated
//! exactly where possible ([`Expr::eval_exact`]), enclosed over intervals
//! ([`Expr::eval_enclosure`]) and differentiated symbolically
//! ([`Expr::derivative`]). A [`FunctionSpec`] pairs an expression with the
//! interval it is declared on.

mod diff;
mod eval;
mod format;
mod json;
mod parse;

pub use diff::NotDifferentiable;
pub use eval::ExactValue;
pub use parse::{parse, ParseError};

use std::fmt;

use thiserror::Error;

use crate::numeric::{Interval, NumericError, Precision, Rational};

/// Expression tree over the single variable `x`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Rational),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    PowInt(Box<Expr>, i32),
    Sqrt(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Abs(Box<Expr>),
    Sgn(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("expression `{expr}` is undefined on {at}: {reason}")]
    Domain {
        expr: String,
        at: String,
        reason: String,
    },
}

impl EvalError {
    pub(crate) fn domain(expr: &Expr, at: impl fmt::Display, reason: impl fmt::Display) -> Self {
        EvalError::Domain {
            expr: expr.to_string(),
            at: at.to_string(),
            reason: reason.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("function `{body}` is not evaluable on its declared domain {domain}: {source}")]
    PoleInDomain {
        body: String,
        domain: String,
        #[source]
        source: EvalError,
    },
}

impl Expr {
    pub fn constant(c: impl Into<Rational>) -> Expr {
        Expr::Const(c.into())
    }

    pub fn var() -> Expr {
        Expr::Var
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(base: Expr, n: i32) -> Expr {
        Expr::PowInt(Box::new(base), n)
    }

    pub fn sqrt(e: Expr) -> Expr {
        Expr::Sqrt(Box::new(e))
    }

    pub fn sin(e: Expr) -> Expr {
        Expr::Sin(Box::new(e))
    }

    pub fn cos(e: Expr) -> Expr {
        Expr::Cos(Box::new(e))
    }

    pub fn abs(e: Expr) -> Expr {
        Expr::Abs(Box::new(e))
    }

    pub fn sgn(e: Expr) -> Expr {
        Expr::Sgn(Box::new(e))
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Whether any `Sgn` node occurs in the tree.
    pub fn contains_sgn(&self) -> bool {
        self.any_node(&|e| matches!(e, Expr::Sgn(_)))
    }

    pub fn contains_var(&self) -> bool {
        self.any_node(&|e| matches!(e, Expr::Var))
    }

    fn any_node(&self, pred: &dyn Fn(&Expr) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Expr::Const(_) | Expr::Var => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.any_node(pred) || b.any_node(pred)
            }
            Expr::PowInt(a, _)
            | Expr::Sqrt(a)
            | Expr::Sin(a)
            | Expr::Cos(a)
            | Expr::Abs(a)
            | Expr::Sgn(a) => a.any_node(pred),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var => 1,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.size() + b.size()
            }
            Expr::PowInt(a, _)
            | Expr::Sqrt(a)
            | Expr::Sin(a)
            | Expr::Cos(a)
            | Expr::Abs(a)
            | Expr::Sgn(a) => 1 + a.size(),
        }
    }

    /// Exact rational value at `x` when it exists, otherwise an enclosure of
    /// the value at precision `prec`.
    pub fn eval_point(&self, x: &Rational, prec: Precision) -> Result<Value, EvalError> {
        match self.eval_exact(x)? {
            ExactValue::Exact(r) => Ok(Value::Exact(r)),
            ExactValue::NotExact => Ok(Value::Enclosed(
                self.eval_enclosure(&Interval::point(x.clone()), prec)?,
            )),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

/// A value that is either known exactly or enclosed by an interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Exact(Rational),
    Enclosed(Interval),
}

impl Value {
    pub fn to_interval(&self) -> Interval {
        match self {
            Value::Exact(r) => Interval::point(r.clone()),
            Value::Enclosed(i) => i.clone(),
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Enclosed(_) => None,
        }
    }

    pub fn lo(&self) -> &Rational {
        match self {
            Value::Exact(r) => r,
            Value::Enclosed(i) => i.lo(),
        }
    }

    pub fn hi(&self) -> &Rational {
        match self {
            Value::Exact(r) => r,
            Value::Enclosed(i) => i.hi(),
        }
    }

    /// `self - other`, exact when both are.
    pub fn sub(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a - b),
            _ => Value::Enclosed(self.to_interval().sub(&other.to_interval())),
        }
    }

    pub fn scale(&self, k: &Rational) -> Value {
        match self {
            Value::Exact(a) => Value::Exact(a * k),
            Value::Enclosed(i) => Value::Enclosed(i.scale(k)),
        }
    }

    pub fn div_by(&self, k: &Rational) -> Result<Value, NumericError> {
        let inv = k.recip()?;
        Ok(self.scale(&inv))
    }
}

impl serde::Serialize for Value {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Exact(r) => r.serialize(serializer),
            Value::Enclosed(i) => i.serialize(serializer),
        }
    }
}

/// An expression together with the interval it is declared on.
///
/// Construction checks that the body has a certified enclosure on the whole
/// domain, which rules out poles of `Div` / negative powers and square roots
/// of negative values inside the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionSpec {
    body: Expr,
    domain: Interval,
}

impl FunctionSpec {
    /// Pieces tried when the whole-domain enclosure is too coarse.
    const VALIDATION_PIECES: [usize; 3] = [1, 16, 256];

    pub fn new(body: Expr, domain: Interval) -> Result<Self, SpecError> {
        let prec = Precision::new(16).expect("nonzero");
        let mut last_err = None;
        for pieces in Self::VALIDATION_PIECES {
            match domain
                .subdivide(pieces)
                .iter()
                .try_for_each(|piece| body.eval_enclosure(piece, prec).map(|_| ()))
            {
                Ok(()) => return Ok(FunctionSpec { body, domain }),
                Err(e) => last_err = Some(e),
            }
            if domain.is_point() {
                break;
            }
        }
        Err(SpecError::PoleInDomain {
            body: body.to_string(),
            domain: domain.to_string(),
            source: last_err.expect("at least one attempt"),
        })
    }

    pub fn parse(text: &str, domain: Interval) -> Result<Self, FunctionSpecParseError> {
        let body = parse(text)?;
        Ok(FunctionSpec::new(body, domain)?)
    }

    pub fn body(&self) -> &Expr {
        &self.body
    }

    pub fn domain(&self) -> &Interval {
        &self.domain
    }

    /// The same body declared on a sub-interval of the current domain.
    pub fn restrict(&self, domain: Interval) -> Result<Self, SpecError> {
        FunctionSpec::new(self.body.clone(), domain)
    }

    pub fn eval_point(&self, x: &Rational, prec: Precision) -> Result<Value, EvalError> {
        self.body.eval_point(x, prec)
    }

    /// Enclosure of the range over `x`, refined by splitting `x` into `pieces`.
    pub fn range(
        &self,
        x: &Interval,
        pieces: usize,
        prec: Precision,
    ) -> Result<Interval, EvalError> {
        let mut parts = x.subdivide(pieces).into_iter();
        let first = self
            .body
            .eval_enclosure(&parts.next().expect("non-empty"), prec)?;
        parts.try_fold(first, |acc, p| {
            Ok(acc.hull(&self.body.eval_enclosure(&p, prec)?))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FunctionSpecParseError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Spec(#[from] SpecError),
}
