use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{isqrt_floor, Interval, NumericError, Precision, Rational};

/// Enclosure of `{√t : t ∈ x}`.
///
/// Endpoints are computed by integer bisection on the squared inequality, so
/// a point input yields an interval of width at most `2^-bits` (zero for
/// perfect squares).
pub fn sqrt_enclosure(x: &Interval, prec: Precision) -> Result<Interval, NumericError> {
    if x.lo().is_negative() {
        return Err(NumericError::Domain(format!(
            "sqrt of interval {x} with negative part"
        )));
    }
    let bits = prec.bits();
    let lo = x
        .lo()
        .exact_sqrt()
        .unwrap_or_else(|| sqrt_floor(x.lo(), bits));
    let hi = x
        .hi()
        .exact_sqrt()
        .unwrap_or_else(|| sqrt_ceil(x.hi(), bits));
    Interval::new(lo, hi)
}

fn scaled_by_four_pow(t: &Rational, bits: u32) -> Rational {
    t * &Rational::pow2(2 * i64::from(bits))
}

fn sqrt_floor(t: &Rational, bits: u32) -> Rational {
    let n = scaled_by_four_pow(t, bits).floor();
    let root = isqrt_floor(n.magnitude());
    Rational::from(BigInt::from(root)) * Rational::pow2(-i64::from(bits))
}

fn sqrt_ceil(t: &Rational, bits: u32) -> Rational {
    let n = scaled_by_four_pow(t, bits).ceil();
    let mag = n.magnitude();
    let mut root = isqrt_floor(mag);
    if &(&root * &root) != mag {
        root += 1u32;
    }
    Rational::from(BigInt::from(root)) * Rational::pow2(-i64::from(bits))
}

/// Enclosure of π of width at most `2^-bits`, from Machin's formula
/// `π = 16·atan(1/5) − 4·atan(1/239)` in fixed point with tracked truncation.
pub fn pi_enclosure(bits: u32) -> Interval {
    static CACHED: OnceLock<Interval> = OnceLock::new();
    if bits <= CACHED_PI_BITS {
        return CACHED
            .get_or_init(|| machin_pi(CACHED_PI_BITS))
            .round_outward(bits + 2);
    }
    machin_pi(bits)
}

const CACHED_PI_BITS: u32 = 1024;

fn machin_pi(bits: u32) -> Interval {
    let scale = bits + 32;
    let (a, a_err) = atan_inverse_fixed(5, scale);
    let (b, b_err) = atan_inverse_fixed(239, scale);
    let center = a * 16 - b * 4;
    let err = BigInt::from(16 * a_err + 4 * b_err);
    let ulp = Rational::pow2(-i64::from(scale));
    let lo = Rational::from(&center - &err) * &ulp;
    let hi = Rational::from(&center + &err) * &ulp;
    Interval::new(lo, hi)
        .expect("ordered by construction")
        .round_outward(bits + 2)
}

/// `atan(1/k)·2^scale`, truncated, plus a bound on the error in ulps.
///
/// Each partial power is `floor(2^scale / k^(2j+1))` exactly, so every term
/// is off by less than one ulp, and the alternating tail after the last
/// nonzero power is below one ulp.
fn atan_inverse_fixed(k: u32, scale: u32) -> (BigInt, u64) {
    let k2 = BigInt::from(k) * BigInt::from(k);
    let mut power = (BigInt::one() << scale) / BigInt::from(k);
    let mut sum = BigInt::zero();
    let mut j: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * j + 1);
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &k2;
        j += 1;
    }
    (sum, j + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrigFn {
    Sin,
    Cos,
}

pub fn sin_enclosure(x: &Interval, prec: Precision) -> Interval {
    sincos_enclosure(x, TrigFn::Sin, prec)
}

pub fn cos_enclosure(x: &Interval, prec: Precision) -> Interval {
    sincos_enclosure(x, TrigFn::Cos, prec)
}

/// Enclosure of the range of `sin` or `cos` over `x`, always within `[-1, 1]`.
///
/// Endpoints are evaluated by quadrant reduction against a π enclosure and a
/// Taylor partial sum with the alternating-series remainder. Interior extrema
/// are detected by testing every critical point `m·π/2` that may lie in `x`.
pub fn sincos_enclosure(x: &Interval, f: TrigFn, prec: Precision) -> Interval {
    let unit = Interval::new(Rational::from(-1), Rational::one()).expect("ordered");
    if x.is_point() {
        return point_enclosure(x.lo(), f, prec.bits());
    }
    // wider than 2π
    if x.width() >= Rational::from(7) {
        return unit;
    }
    let at_lo = point_enclosure(x.lo(), f, prec.bits());
    let at_hi = point_enclosure(x.hi(), f, prec.bits());
    let mut out = at_lo.hull(&at_hi);

    let mag_bits = magnitude_bits(x.lo()).max(magnitude_bits(x.hi()));
    let pi = pi_enclosure(prec.bits() + mag_bits + 8);
    let half_pi = pi.scale(&Rational::frac(1, 2));
    // π/2 lies in (3/2, 8/5)
    let m_min = bound_index(x.lo(), true);
    let m_max = bound_index(x.hi(), false);
    let mut m = m_min;
    while m <= m_max {
        let critical = half_pi.scale(&Rational::from(m.clone()));
        if critical.overlaps(x) {
            let residue = m.mod_floor(&BigInt::from(4)).to_u8().expect("residue < 4");
            let maximum = match f {
                TrigFn::Sin => residue == 1,
                TrigFn::Cos => residue == 0,
            };
            let minimum = match f {
                TrigFn::Sin => residue == 3,
                TrigFn::Cos => residue == 2,
            };
            let (lo, hi) = out.clone().into_bounds();
            if maximum {
                out = Interval::new(lo, Rational::one()).expect("ordered");
            } else if minimum {
                out = Interval::new(Rational::from(-1), hi).expect("ordered");
            }
        }
        m += 1;
    }
    out.intersect(&unit).unwrap_or(unit)
}

/// Conservative integer bound on `m` with `m·π/2` near `t`.
fn bound_index(t: &Rational, lower: bool) -> BigInt {
    let three_halves = Rational::frac(3, 2);
    let eight_fifths = Rational::frac(8, 5);
    if lower {
        let q = if t.is_negative() {
            t / &three_halves
        } else {
            t / &eight_fifths
        };
        q.floor() - 1
    } else {
        let q = if t.is_negative() {
            t / &eight_fifths
        } else {
            t / &three_halves
        };
        q.ceil() + 1
    }
}

fn magnitude_bits(t: &Rational) -> u32 {
    let m = t.abs().ceil();
    u32::try_from(m.bits()).unwrap_or(u32::MAX / 4)
}

fn point_enclosure(x: &Rational, f: TrigFn, bits: u32) -> Interval {
    let unit = Interval::new(Rational::from(-1), Rational::one()).expect("ordered");
    if x.is_zero() {
        return Interval::point(match f {
            TrigFn::Sin => Rational::zero(),
            TrigFn::Cos => Rational::one(),
        });
    }
    let work = bits + 8;
    let pi_bits = (2 * bits).max(work + magnitude_bits(x) + 4);
    let half_pi = pi_enclosure(pi_bits).scale(&Rational::frac(1, 2));

    // Any integer k is sound; the nearest one keeps the reduced argument
    // inside roughly [-π/4, π/4] where the series converges quickly.
    let k = (x / half_pi.lo() + Rational::frac(1, 2)).floor();
    let reduced = Interval::point(x.clone()).sub(&half_pi.scale(&Rational::from(k.clone())));
    let center = reduced.lo().floor_dyadic(work);
    // sin and cos are 1-Lipschitz, so the reduction error widens additively
    let spread = reduced.hi() - &center;

    let quadrant = k.mod_floor(&BigInt::from(4)).to_u8().expect("residue < 4");
    let base = match (f, quadrant) {
        (TrigFn::Sin, 0) | (TrigFn::Cos, 3) => taylor_sin(&center, work, bits),
        (TrigFn::Sin, 1) | (TrigFn::Cos, 0) => taylor_cos(&center, work, bits),
        (TrigFn::Sin, 2) | (TrigFn::Cos, 1) => taylor_sin(&center, work, bits).neg(),
        _ => taylor_cos(&center, work, bits).neg(),
    };
    let widened = Interval::new(base.lo() - &spread, base.hi() + &spread).expect("spread >= 0");
    let rounded = widened.round_outward(bits + 2);
    rounded.intersect(&unit).unwrap_or(unit)
}

/// Alternating Taylor series of `sin c` (`odd`) or `cos c` for a dyadic
/// `c = cn / 2^work` with `|c| < 1`, in fixed point with `bits + 16`
/// fractional bits beyond `work`. Stops at the first term of magnitude at most
/// `2^-(bits + 4)`; since `c^2` is below every factorial ratio, each
/// truncated division adds at most one ulp to the running term error and
/// the terms shrink, so the first omitted term bounds the tail.
fn alternating_series(cn: &BigInt, work: u32, odd: bool, bits: u32) -> Interval {
    let scale = work.max(bits) + 16;
    let mut term = if odd {
        cn << (scale - work)
    } else {
        BigInt::one() << scale
    };
    let offset: u64 = if odd { 1 } else { 0 };
    let c2 = cn * cn;
    let tol = BigInt::one() << (scale - bits - 4);
    let mut sum = BigInt::zero();
    let mut err_sum = BigInt::zero();
    let mut err: u64 = 0;
    let mut j: u64 = 0;
    loop {
        sum += &term;
        err_sum += err;
        let denom = BigInt::from((2 * j + 1 + offset) * (2 * j + 2 + offset)) << (2 * work);
        let next = -(&term * &c2) / denom;
        let next_err = err + 1;
        let bound = next.magnitude().clone() + next_err;
        if BigInt::from(bound.clone()) <= tol {
            let r = BigInt::from(bound) + &err_sum;
            let lo = Rational::dyadic(&sum - &r, scale);
            let hi = Rational::dyadic(&sum + &r, scale);
            return Interval::new(lo, hi).expect("r >= 0");
        }
        term = next;
        err = next_err;
        j += 1;
    }
}

fn dyadic_numerator(c: &Rational, work: u32) -> BigInt {
    let scaled = c * &Rational::pow2(i64::from(work));
    assert!(scaled.is_integer(), "center is on the 2^-work grid");
    assert!(
        c.abs() < Rational::one(),
        "reduced argument is below 1 in magnitude"
    );
    scaled.numer().clone()
}

fn taylor_sin(c: &Rational, work: u32, bits: u32) -> Interval {
    alternating_series(&dyadic_numerator(c, work), work, true, bits)
}

fn taylor_cos(c: &Rational, work: u32, bits: u32) -> Interval {
    alternating_series(&dyadic_numerator(c, work), work, false, bits)
}
