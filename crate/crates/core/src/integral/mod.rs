//! Certified enclosures of definite integrals.
//!
//! An integral system of `f` on `[a, b]` is any `S(u, v)` that is additive,
//! `S(u, v) + S(v, w) = S(u, w)`, and satisfies the intermediate-value
//! condition: for `u < v` there are `p, q ∈ [u, v]` with
//!
//! ```text
//! f(p)(v - u) ≤ S(u, v) ≤ f(q)(v - u)
//! ```
//!
//! Splitting `[u, v]` into `n` equal pieces and bounding `f` on each piece
//! gives an interval `[Σ m_k h, Σ M_k h]` that contains every such `S`.
//! Its width is bounded a priori by [`uniqueness_gap`]; as that bound goes to
//! zero with `n`, the integral system is unique.

mod checks;

pub use checks::{
    check_additivity, newton_leibniz_check, AdditivityReport, AdditivityVerdict,
    NewtonLeibnizMismatch, NewtonLeibnizReport, NewtonLeibnizVerdict,
};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::control::{certify_monotone, Monotonicity};
use crate::expr::{EvalError, FunctionSpec};
use crate::numeric::{Interval, Precision, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntegralError {
    #[error("subdivision count must be at least 1")]
    ZeroPieces,
    #[error("[{u}, {v}] is not inside the declared domain {domain}")]
    OutsideDomain {
        u: String,
        v: String,
        domain: String,
    },
    #[error("points must satisfy {0}")]
    Order(&'static str),
    #[error("invalid breakpoints: {0}")]
    Plan(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// `[lo, hi]` contains `S(u, v)` for every integral system `S` of the
/// integrand. Reversed bounds give `S(v, u) = -S(u, v)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegralEnclosure {
    pub u: Rational,
    pub v: Rational,
    pub lo: Rational,
    pub hi: Rational,
    /// Subdivisions per piece of the plan (the whole interval when there are
    /// no breakpoints).
    pub n: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub breakpoints: Vec<Rational>,
    /// A priori bound on `hi - lo`, when one was supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width_bound: Option<Rational>,
}

impl IntegralEnclosure {
    fn zero(u: &Rational, v: &Rational, n: usize) -> Self {
        IntegralEnclosure {
            u: u.clone(),
            v: v.clone(),
            lo: Rational::zero(),
            hi: Rational::zero(),
            n,
            breakpoints: Vec::new(),
            width_bound: None,
        }
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.lo.clone(), self.hi.clone()).expect("lo <= hi")
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn with_width_bound(mut self, bound: Rational) -> Self {
        self.width_bound = Some(bound);
        self
    }

    fn reversed(self) -> Self {
        IntegralEnclosure {
            u: self.v,
            v: self.u,
            lo: -self.hi,
            hi: -self.lo,
            ..self
        }
    }
}

/// Range of the integrand over one piece of the subdivision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubintervalRange {
    pub x0: Rational,
    pub x1: Rational,
    pub min: Rational,
    pub max: Rational,
}

/// Bound used by [`uniqueness_gap`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VariationBound {
    /// `|f(x) - f(y)| ≤ M |x - y|`.
    Lipschitz(Rational),
    /// Total variation of `f` over the interval, e.g. from monotone pieces.
    TotalVariation(Rational),
}

/// A priori bound on the disagreement of any two integral systems when
/// `[u, v]` is cut into `n` equal pieces: each piece contributes at most
/// `h |f(q_k) - f(p_k)|`, so the sum is at most `M (v - u)^2 / n` for a
/// Lipschitz constant and `(v - u) V / n` for a total variation `V`.
pub fn uniqueness_gap(u: &Rational, v: &Rational, n: usize, bound: &VariationBound) -> Rational {
    let len = (v - u).abs();
    let n = Rational::from(n.max(1) as i64);
    match bound {
        VariationBound::Lipschitz(m) => m * &len * &len / n,
        VariationBound::TotalVariation(total) => total * &len / n,
    }
}

/// Interior breakpoints where the integrand changes formula or direction.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct PiecewisePlan {
    breakpoints: Vec<Rational>,
}

impl PiecewisePlan {
    pub fn new(breakpoints: Vec<Rational>) -> Result<Self, IntegralError> {
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(IntegralError::Plan(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(PiecewisePlan { breakpoints })
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }

    /// `[u, b_1], [b_1, b_2], …, [b_k, v]`.
    fn pieces(
        &self,
        u: &Rational,
        v: &Rational,
    ) -> Result<Vec<(Rational, Rational)>, IntegralError> {
        if let Some(b) = self.breakpoints.iter().find(|b| *b <= u || *b >= v) {
            return Err(IntegralError::Plan(format!(
                "breakpoint {b} is not inside ({u}, {v})"
            )));
        }
        let mut cuts = Vec::with_capacity(self.breakpoints.len() + 2);
        cuts.push(u.clone());
        cuts.extend(self.breakpoints.iter().cloned());
        cuts.push(v.clone());
        Ok(cuts
            .windows(2)
            .map(|w| (w[0].clone(), w[1].clone()))
            .collect())
    }
}

/// Enclosure of `∫_u^v f` from `n` equal pieces. `u > v` integrates over
/// `[v, u]` and negates; `u = v` gives exactly zero.
pub fn integrate_enclosure(
    f: &FunctionSpec,
    u: &Rational,
    v: &Rational,
    n: usize,
    prec: Precision,
) -> Result<IntegralEnclosure, IntegralError> {
    integrate_enclosure_with(f, u, v, n, None, prec)
}

/// As [`integrate_enclosure`], taking piece ranges from endpoint values when
/// `monotone` is given. The caller must have certified the monotonicity on
/// the integration interval.
pub fn integrate_enclosure_with(
    f: &FunctionSpec,
    u: &Rational,
    v: &Rational,
    n: usize,
    monotone: Option<Monotonicity>,
    prec: Precision,
) -> Result<IntegralEnclosure, IntegralError> {
    if n == 0 {
        return Err(IntegralError::ZeroPieces);
    }
    if u == v {
        return Ok(IntegralEnclosure::zero(u, v, n));
    }
    if u > v {
        return Ok(integrate_enclosure_with(f, v, u, n, monotone, prec)?.reversed());
    }
    let ranges = subinterval_ranges(f, u, v, n, monotone, prec)?;
    let h = (v - u) / Rational::from(n as i64);
    let (lo, hi) = ranges
        .iter()
        .fold((Rational::zero(), Rational::zero()), |(lo, hi), r| {
            (lo + &r.min, hi + &r.max)
        });
    Ok(IntegralEnclosure {
        u: u.clone(),
        v: v.clone(),
        lo: lo * &h,
        hi: hi * &h,
        n,
        breakpoints: Vec::new(),
        width_bound: None,
    })
}

/// Certified ranges of `f` over the `n` equal pieces of `[u, v]`, `u < v`.
pub fn subinterval_ranges(
    f: &FunctionSpec,
    u: &Rational,
    v: &Rational,
    n: usize,
    monotone: Option<Monotonicity>,
    prec: Precision,
) -> Result<Vec<SubintervalRange>, IntegralError> {
    if n == 0 {
        return Err(IntegralError::ZeroPieces);
    }
    if u >= v {
        return Err(IntegralError::Order("u < v"));
    }
    let span = Interval::new(u.clone(), v.clone()).expect("u < v");
    if !f.domain().encloses(&span) {
        return Err(IntegralError::OutsideDomain {
            u: u.to_string(),
            v: v.to_string(),
            domain: f.domain().to_string(),
        });
    }
    span.subdivide(n)
        .par_iter()
        .map(|piece| {
            let range = match monotone {
                Some(_) => {
                    let a = f.eval_point(piece.lo(), prec)?.to_interval();
                    let b = f.eval_point(piece.hi(), prec)?.to_interval();
                    a.hull(&b)
                }
                None => piece_range(f, piece, prec)?,
            };
            let (min, max) = range.into_bounds();
            Ok(SubintervalRange {
                x0: piece.lo().clone(),
                x1: piece.hi().clone(),
                min,
                max,
            })
        })
        .collect()
}

/// A single enclosure can fail where finer ones succeed, e.g. a square root
/// whose argument enclosure dips below zero.
fn piece_range(f: &FunctionSpec, piece: &Interval, prec: Precision) -> Result<Interval, EvalError> {
    let mut last = None;
    for pieces in [1, 16, 256] {
        match f.range(piece, pieces, prec) {
            Ok(r) => return Ok(r),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("tried at least once"))
}

/// Sum of enclosures over the pieces of `plan`, each cut into `n_per_piece`
/// equal subintervals. Pieces on which `f` is certified monotone use
/// endpoint values.
pub fn integrate_piecewise(
    f: &FunctionSpec,
    plan: &PiecewisePlan,
    u: &Rational,
    v: &Rational,
    n_per_piece: usize,
    prec: Precision,
) -> Result<IntegralEnclosure, IntegralError> {
    if n_per_piece == 0 {
        return Err(IntegralError::ZeroPieces);
    }
    if u == v && plan.is_empty() {
        return Ok(IntegralEnclosure::zero(u, v, n_per_piece));
    }
    if u > v {
        return Ok(integrate_piecewise(f, plan, v, u, n_per_piece, prec)?.reversed());
    }
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    for (a, b) in plan.pieces(u, v)? {
        let span = Interval::new(a.clone(), b.clone()).expect("a < b");
        let monotone = certify_monotone(f, &span, prec);
        let part = integrate_enclosure_with(f, &a, &b, n_per_piece, monotone, prec)?;
        lo = lo + part.lo;
        hi = hi + part.hi;
    }
    Ok(IntegralEnclosure {
        u: u.clone(),
        v: v.clone(),
        lo,
        hi,
        n: n_per_piece,
        breakpoints: plan.breakpoints.clone(),
        width_bound: None,
    })
}

/// The per-subinterval ranges behind [`integrate_piecewise`], in order.
pub fn piecewise_ranges(
    f: &FunctionSpec,
    plan: &PiecewisePlan,
    u: &Rational,
    v: &Rational,
    n_per_piece: usize,
    prec: Precision,
) -> Result<Vec<SubintervalRange>, IntegralError> {
    let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
    let mut rows = Vec::new();
    for (a, b) in plan.pieces(lo, hi)? {
        let span = Interval::new(a.clone(), b.clone()).expect("a < b");
        let monotone = certify_monotone(f, &span, prec);
        rows.extend(subinterval_ranges(f, &a, &b, n_per_piece, monotone, prec)?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str, lo: i64, hi: i64) -> FunctionSpec {
        FunctionSpec::parse(text, Interval::new(lo.into(), hi.into()).unwrap()).unwrap()
    }

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn prec() -> Precision {
        Precision::default()
    }

    #[test]
    fn square_with_four_pieces() {
        let e = integrate_enclosure(&spec("x^2", 0, 1), &r("0"), &r("1"), 4, prec()).unwrap();
        // oracle: left and right sums of k^2 / 16 over k = 0..3 and 1..4, times 1/4
        let left: i64 = (0..4).map(|k| k * k).sum();
        let right: i64 = (1..=4).map(|k| k * k).sum();
        assert_eq!(e.lo, Rational::frac(left, 64));
        assert_eq!(e.hi, Rational::frac(right, 64));
        assert_eq!((e.lo.clone(), e.hi.clone()), (r("7/32"), r("15/32")));
        assert!(e.contains(&r("1/3")));
    }

    #[test]
    fn constant_integrand_is_exact() {
        let e = integrate_enclosure(&spec("5/2", -3, 3), &r("-1"), &r("2"), 1, prec()).unwrap();
        assert_eq!((e.lo, e.hi), (r("15/2"), r("15/2")));
    }

    #[test]
    fn width_law_for_square() {
        let f = spec("x^2", 0, 1);
        let e = integrate_enclosure(&f, &r("0"), &r("1"), 1000, prec()).unwrap();
        assert!(e.contains(&r("1/3")));
        let gap = uniqueness_gap(&r("0"), &r("1"), 1000, &VariationBound::Lipschitz(r("2")));
        assert_eq!(gap, r("1/500"));
        assert!(e.width() <= gap);
        let finer = integrate_enclosure(&f, &r("0"), &r("1"), 2000, prec()).unwrap();
        assert_eq!(finer.width() * Rational::from(2), e.width());
    }

    #[test]
    fn orientation_and_degenerate_interval() {
        let f = spec("x^2", 0, 1);
        let fwd = integrate_enclosure(&f, &r("0"), &r("1"), 4, prec()).unwrap();
        let back = integrate_enclosure(&f, &r("1"), &r("0"), 4, prec()).unwrap();
        assert_eq!((back.lo, back.hi), (-fwd.hi, -fwd.lo));
        let none = integrate_enclosure(&f, &r("1/2"), &r("1/2"), 4, prec()).unwrap();
        assert_eq!((none.lo, none.hi), (Rational::zero(), Rational::zero()));
    }

    #[test]
    fn errors() {
        let f = spec("x^2", 0, 1);
        assert_eq!(
            integrate_enclosure(&f, &r("0"), &r("1"), 0, prec()),
            Err(IntegralError::ZeroPieces)
        );
        assert!(matches!(
            integrate_enclosure(&f, &r("0"), &r("2"), 4, prec()),
            Err(IntegralError::OutsideDomain { .. })
        ));
        assert!(PiecewisePlan::new(vec![r("1"), r("1")]).is_err());
        let plan = PiecewisePlan::new(vec![r("1")]).unwrap();
        assert!(matches!(
            integrate_piecewise(&f, &plan, &r("0"), &r("1"), 4, prec()),
            Err(IntegralError::Plan(_))
        ));
    }

    #[test]
    fn sign_function_split_at_zero() {
        let f = spec("sgn(x)", -1, 2);
        let plan = PiecewisePlan::new(vec![r("0")]).unwrap();
        for n in [1, 10, 300] {
            let e = integrate_piecewise(&f, &plan, &r("-1"), &r("2"), n, prec()).unwrap();
            assert!(e.contains(&r("1")));
            // only the pieces touching 0 contribute slack: 1/n on the left, 2/n on the right
            assert_eq!(e.width(), Rational::frac(3, n as i64));
        }
        let whole = integrate_enclosure(&f, &r("-1"), &r("2"), 300, prec()).unwrap();
        assert!(whole.contains(&r("1")));
        let gap = uniqueness_gap(
            &r("-1"),
            &r("2"),
            300,
            &VariationBound::TotalVariation(r("2")),
        );
        assert_eq!(gap, r("1/50"));
        assert_eq!(whole.width(), gap);
    }

    #[test]
    fn abs_as_two_monotone_pieces() {
        let f = spec("abs(x)", -1, 1);
        let plan = PiecewisePlan::new(vec![r("0")]).unwrap();
        let e = integrate_piecewise(&f, &plan, &r("-1"), &r("1"), 8, prec()).unwrap();
        assert!(e.contains(&r("1")));
        assert_eq!(e.width(), Rational::frac(2, 8));
    }

    #[test]
    fn empty_plan_matches_plain_quadrature() {
        let f = spec("x^2", 0, 1);
        let plain = integrate_enclosure(&f, &r("0"), &r("1"), 16, prec()).unwrap();
        let piecewise =
            integrate_piecewise(&f, &PiecewisePlan::default(), &r("0"), &r("1"), 16, prec())
                .unwrap();
        assert_eq!(plain, piecewise);
    }

    #[test]
    fn monotone_fast_path_removes_dependency_slack() {
        // x^2 - x on [1, 2]: naive interval evaluation overestimates each piece range
        let f = spec("x^2 - x", 1, 2);
        let slow = integrate_enclosure(&f, &r("1"), &r("2"), 8, prec()).unwrap();
        let fast = integrate_enclosure_with(
            &f,
            &r("1"),
            &r("2"),
            8,
            Some(Monotonicity::Increasing),
            prec(),
        )
        .unwrap();
        assert!(fast.width() < slow.width());
        assert!(fast.contains(&r("5/6")) && slow.contains(&r("5/6")));
    }
}
