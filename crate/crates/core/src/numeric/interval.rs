use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ArithOp, NumericError, Rational};

/// A closed interval `[lo, hi]` with exact rational endpoints.
///
/// Field operations are exact on the endpoints, so the result of an
/// operation is the tightest interval containing every pointwise result.
/// Enclosures of irrational values round their endpoints outward onto a
/// dyadic grid.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, NumericError> {
        if lo > hi {
            return Err(NumericError::InvalidInterval {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        Ok(Interval { lo, hi })
    }

    /// Interval spanning two values given in either order.
    pub fn spanning(a: Rational, b: Rational) -> Self {
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn point(x: Rational) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn into_bounds(self) -> (Rational, Rational) {
        (self.lo, self.hi)
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        self.lo.midpoint(&self.hi)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// `other ⊆ self`.
    pub fn encloses(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max_ref(&other.lo).clone();
        let hi = self.hi.min_ref(&other.hi).clone();
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min_ref(&other.lo).clone(),
            hi: self.hi.max_ref(&other.hi).clone(),
        }
    }

    /// Certainly below: every element of `self` is `<=` every element of `other`.
    pub fn certainly_le(&self, other: &Interval) -> bool {
        self.hi <= other.lo
    }

    pub fn certainly_lt(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    pub fn add(&self, rhs: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }

    pub fn sub(&self, rhs: &Interval) -> Interval {
        Interval {
            lo: &self.lo - &rhs.hi,
            hi: &self.hi - &rhs.lo,
        }
    }

    pub fn mul(&self, rhs: &Interval) -> Interval {
        let products = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let (lo, hi) = min_max(products);
        Interval { lo, hi }
    }

    pub fn div(&self, rhs: &Interval) -> Result<Interval, NumericError> {
        Ok(self.mul(&rhs.recip()?))
    }

    pub fn recip(&self) -> Result<Interval, NumericError> {
        if self.contains_zero() {
            return Err(NumericError::DivisionByZeroInterval);
        }
        Ok(Interval {
            lo: self.hi.recip()?,
            hi: self.lo.recip()?,
        })
    }

    pub fn scale(&self, k: &Rational) -> Interval {
        Interval::spanning(&self.lo * k, &self.hi * k)
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn abs(&self) -> Interval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            Interval {
                lo: Rational::zero(),
                hi: (-&self.lo).max_ref(&self.hi).clone(),
            }
        }
    }

    /// Range of the sign function over the interval.
    pub fn sgn(&self) -> Interval {
        let s = |x: &Rational| Rational::from(i64::from(x.signum()));
        Interval {
            lo: s(&self.lo),
            hi: s(&self.hi),
        }
    }

    /// Integer power with even-power sign analysis. Negative exponents
    /// require `0 ∉ self`.
    pub fn pow_int(&self, n: i32) -> Result<Interval, NumericError> {
        if n == 0 {
            return Ok(Interval::point(Rational::one()));
        }
        if n < 0 {
            return self.pow_int(-n)?.recip();
        }
        let lo_n = self.lo.pow(n)?;
        let hi_n = self.hi.pow(n)?;
        if n % 2 == 1 {
            return Ok(Interval { lo: lo_n, hi: hi_n });
        }
        Ok(if !self.lo.is_negative() {
            Interval { lo: lo_n, hi: hi_n }
        } else if !self.hi.is_positive() {
            Interval { lo: hi_n, hi: lo_n }
        } else {
            Interval {
                lo: Rational::zero(),
                hi: lo_n.max_ref(&hi_n).clone(),
            }
        })
    }

    /// Rounds the endpoints outward onto the grid `2^-bits`.
    pub fn round_outward(&self, bits: u32) -> Interval {
        Interval {
            lo: self.lo.floor_dyadic(bits),
            hi: self.hi.ceil_dyadic(bits),
        }
    }

    /// Splits into `n` equal closed pieces.
    pub fn subdivide(&self, n: usize) -> Vec<Interval> {
        let n = n.max(1);
        let step = self.width() / Rational::from(n as i64);
        (0..n)
            .map(|k| {
                let lo = &self.lo + &step * Rational::from(k as i64);
                let hi = if k + 1 == n {
                    self.hi.clone()
                } else {
                    &self.lo + &step * Rational::from(k as i64 + 1)
                };
                Interval { lo, hi }
            })
            .collect()
    }
}

/// Applies `op` to two intervals. Division requires `0 ∉ b`.
pub fn interval_arith(a: &Interval, b: &Interval, op: ArithOp) -> Result<Interval, NumericError> {
    Ok(match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Mul => a.mul(b),
        ArithOp::Div => a.div(b)?,
    })
}

fn min_max(values: [Rational; 4]) -> (Rational, Rational) {
    let mut it = values.into_iter();
    let first = it.next().expect("non-empty");
    it.fold((first.clone(), first), |(lo, hi), x| {
        let lo = if x < lo { x.clone() } else { lo };
        let hi = if x > hi { x } else { hi };
        (lo, hi)
    })
}

impl From<Rational> for Interval {
    fn from(x: Rational) -> Self {
        Interval::point(x)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: i64, hi: i64) -> Interval {
        Interval::new(lo.into(), hi.into()).unwrap()
    }

    #[test]
    fn products() {
        assert_eq!(
            interval_arith(&iv(1, 2), &iv(3, 4), ArithOp::Mul).unwrap(),
            iv(3, 8)
        );
        assert_eq!(
            interval_arith(&iv(-1, 1), &iv(-1, 1), ArithOp::Mul).unwrap(),
            iv(-1, 1)
        );
    }

    #[test]
    fn division_by_interval_containing_zero() {
        assert_eq!(
            interval_arith(&iv(1, 1), &iv(0, 1), ArithOp::Div),
            Err(NumericError::DivisionByZeroInterval)
        );
        let q = interval_arith(&iv(1, 2), &iv(2, 4), ArithOp::Div).unwrap();
        assert_eq!(
            q,
            Interval::new(Rational::frac(1, 4), Rational::one()).unwrap()
        );
    }

    #[test]
    fn rejects_reversed_endpoints() {
        assert!(Interval::new(2.into(), 1.into()).is_err());
    }

    #[test]
    fn even_powers_straddling_zero() {
        assert_eq!(iv(-2, 1).pow_int(2).unwrap(), iv(0, 4));
        assert_eq!(iv(-2, -1).pow_int(2).unwrap(), iv(1, 4));
        assert_eq!(iv(-2, 1).pow_int(3).unwrap(), iv(-8, 1));
        assert_eq!(iv(-2, 1).pow_int(0).unwrap(), iv(1, 1));
        assert!(iv(-2, 1).pow_int(-2).is_err());
    }

    #[test]
    fn sign_and_abs() {
        assert_eq!(iv(-1, 2).sgn(), iv(-1, 1));
        assert_eq!(iv(0, 2).sgn(), iv(0, 1));
        assert_eq!(iv(-3, 2).abs(), iv(0, 3));
        assert_eq!(iv(-3, -2).abs(), iv(2, 3));
    }

    #[test]
    fn subdivision_covers_exactly() {
        let parts = iv(-1, 2).subdivide(3);
        assert_eq!(parts, vec![iv(-1, 0), iv(0, 1), iv(1, 2)]);
    }
}
