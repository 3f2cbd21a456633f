use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use serde::Serialize;

use super::{glue_claims, ControlClaim, ControlError};
use crate::expr::{Expr, FunctionSpec};
use crate::numeric::{Interval, Rational};
use crate::verdict::Verdict;

/// Polynomial in `u` and `v` with rational coefficients, keyed by the
/// exponent pair. Zero coefficients are never stored, so equality of two
/// polynomials is equality of their maps.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
struct Poly2(BTreeMap<(u32, u32), Rational>);

impl Poly2 {
    fn term(c: Rational, i: u32, j: u32) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert((i, j), c);
        }
        Poly2(m)
    }

    fn constant(c: &Rational) -> Self {
        Poly2::term(c.clone(), 0, 0)
    }

    fn u() -> Self {
        Poly2::term(Rational::one(), 1, 0)
    }

    fn v() -> Self {
        Poly2::term(Rational::one(), 0, 1)
    }

    fn accumulate(&mut self, key: (u32, u32), c: Rational) {
        let entry = self.0.entry(key).or_default();
        *entry += &c;
        if entry.is_zero() {
            self.0.remove(&key);
        }
    }

    fn scale(&self, k: &Rational) -> Self {
        let mut out = Poly2::default();
        for (key, c) in &self.0 {
            out.accumulate(*key, c * k);
        }
        out
    }

    fn terms(&self) -> usize {
        self.0.len()
    }
}

impl Add for &Poly2 {
    type Output = Poly2;
    fn add(self, rhs: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (key, c) in &rhs.0 {
            out.accumulate(*key, c.clone());
        }
        out
    }
}

impl Sub for &Poly2 {
    type Output = Poly2;
    fn sub(self, rhs: &Poly2) -> Poly2 {
        self + &rhs.scale(&Rational::from(-1))
    }
}

impl Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: &Poly2) -> Poly2 {
        let mut out = Poly2::default();
        for ((i1, j1), c1) in &self.0 {
            for ((i2, j2), c2) in &rhs.0 {
                out.accumulate((i1 + i2, j1 + j2), c1 * c2);
            }
        }
        out
    }
}

/// One polynomial identity in `u, v`, checked by expanding both sides and
/// comparing coefficient lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub statement: String,
    pub terms: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityMismatch {
    pub statement: String,
}

/// The control certificate for `g = 3x^2 + 2ax + b` over
/// `F = x^3 + ax^2 + bx + c`.
///
/// From the identities, `g(u) ≤ D ≤ g(v)` for `-a/3 ≤ u < v` and
/// `g(v) ≤ D ≤ g(u)` for `u < v ≤ -a/3`; straddling subintervals are handled
/// by gluing the two half-lines at the split point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CubicCertificate {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub window: Interval,
    pub split: Rational,
    pub identities: Vec<IdentityCheck>,
}

pub type CubicVerdict = Verdict<CubicCertificate, IdentityMismatch>;

fn cubic(t: &Poly2, a: &Rational, b: &Rational, c: &Rational) -> Poly2 {
    let t2 = t * t;
    let t3 = &t2 * t;
    &(&(&t3 + &t2.scale(a)) + &t.scale(b)) + &Poly2::constant(c)
}

fn control(t: &Poly2, a: &Rational, b: &Rational) -> Poly2 {
    let t2 = t * t;
    &(&t2.scale(&Rational::from(3)) + &t.scale(&(a * Rational::from(2)))) + &Poly2::constant(b)
}

fn check(statement: &str, lhs: Poly2, rhs: Poly2) -> IdentityCheck {
    IdentityCheck {
        statement: statement.to_string(),
        terms: lhs.terms().max(rhs.terms()),
        holds: lhs == rhs,
    }
}

/// Verifies the three identities behind the cubic certificate by exact
/// coefficient comparison:
///
/// * `(v - u) D = F(v) - F(u)` with `D = v^2 + uv + u^2 + a(u + v) + b`
/// * `(v - u)(D - g(u)) = (v - u)^2 (v + 2u + a)`
/// * `(v - u)(g(v) - D) = (v - u)^2 (2v + u + a)`
///
/// The last two are the quotient identities multiplied through by `v - u`.
pub fn cubic_control_certificate(
    a: &Rational,
    b: &Rational,
    c: &Rational,
    window: &Interval,
) -> CubicVerdict {
    let (u, v) = (Poly2::u(), Poly2::v());
    let a_poly = Poly2::constant(a);
    let h = &v - &u;
    let h2 = &h * &h;
    let big_diff = &cubic(&v, a, b, c) - &cubic(&u, a, b, c);
    let d = &(&(&(&v * &v) + &(&u * &v)) + &(&u * &u))
        + &(&(&(&u + &v) * &a_poly) + &Poly2::constant(b));
    let (g_u, g_v) = (control(&u, a, b), control(&v, a, b));
    let identities = vec![
        check("(v - u) D = F(v) - F(u)", &h * &d, big_diff.clone()),
        check(
            "(v - u)(D - g(u)) = (v - u)^2 (v + 2u + a)",
            &big_diff - &(&h * &g_u),
            &h2 * &(&(&v + &u.scale(&Rational::from(2))) + &a_poly),
        ),
        check(
            "(v - u)(g(v) - D) = (v - u)^2 (2v + u + a)",
            &(&h * &g_v) - &big_diff,
            &h2 * &(&(&v.scale(&Rational::from(2)) + &u) + &a_poly),
        ),
    ];
    if let Some(bad) = identities.iter().find(|i| !i.holds) {
        return Verdict::Refuted {
            violation: IdentityMismatch {
                statement: bad.statement.clone(),
            },
        };
    }
    Verdict::Certified {
        witness: CubicCertificate {
            a: a.clone(),
            b: b.clone(),
            c: c.clone(),
            window: window.clone(),
            split: -(a / Rational::from(3)),
            identities,
        },
    }
}

impl CubicCertificate {
    pub fn controlled_expr(&self) -> Expr {
        let x = Expr::Var;
        Expr::add(
            Expr::add(
                Expr::add(
                    Expr::pow(x.clone(), 3),
                    Expr::mul(Expr::Const(self.a.clone()), Expr::pow(x.clone(), 2)),
                ),
                Expr::mul(Expr::Const(self.b.clone()), x),
            ),
            Expr::Const(self.c.clone()),
        )
    }

    pub fn control_expr(&self) -> Expr {
        let x = Expr::Var;
        Expr::add(
            Expr::add(
                Expr::mul(Expr::constant(3), Expr::pow(x.clone(), 2)),
                Expr::mul(Expr::Const(&self.a * Rational::from(2)), x),
            ),
            Expr::Const(self.b.clone()),
        )
    }

    /// The claim on the window, glued at the split point when it lies
    /// strictly inside.
    pub fn claim(&self) -> Result<ControlClaim, ControlError> {
        let on = |domain: Interval| -> Result<ControlClaim, ControlError> {
            ControlClaim::new(
                FunctionSpec::new(self.controlled_expr(), domain.clone())?,
                FunctionSpec::new(self.control_expr(), domain.clone())?,
                domain,
            )
        };
        let (lo, hi) = (self.window.lo(), self.window.hi());
        if lo < &self.split && &self.split < hi {
            let left = on(Interval::new(lo.clone(), self.split.clone()).expect("ordered"))?;
            let right = on(Interval::new(self.split.clone(), hi.clone()).expect("ordered"))?;
            glue_claims(&left, &right)
        } else {
            on(self.window.clone())
        }
    }

    /// The endpoint witness `(p, q)` the identities guarantee when `[u, v]`
    /// lies on one side of the split.
    pub fn endpoint_witness(&self, u: &Rational, v: &Rational) -> Option<(Rational, Rational)> {
        if u >= &self.split {
            Some((u.clone(), v.clone()))
        } else if v <= &self.split {
            Some((v.clone(), u.clone()))
        } else {
            None
        }
    }
}
