use limitless::integral::PiecewisePlan;
use limitless::numeric::{Interval, Rational};

pub(crate) type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

pub(crate) fn rational(name: &str, text: &str) -> CliResult<Rational> {
    text.parse().map_err(|_| {
        format!("--{name}: `{text}` is not a rational number (use p, p/q or a finite decimal)")
            .into()
    })
}

enum Bound {
    Finite(Rational),
    NegInf,
    PosInf,
}

fn bound(name: &str, text: &str) -> CliResult<Bound> {
    match text.trim() {
        "-inf" => Ok(Bound::NegInf),
        "inf" | "+inf" => Ok(Bound::PosInf),
        t => rational(name, t).map(Bound::Finite),
    }
}

fn pair(name: &str, text: &str) -> CliResult<(String, String)> {
    let (lo, hi) = text
        .split_once(',')
        .ok_or_else(|| format!("--{name}: expected `lo,hi`, got `{text}`"))?;
    Ok((lo.trim().to_string(), hi.trim().to_string()))
}

fn finite_interval(name: &str, text: &str) -> CliResult<Interval> {
    let (lo, hi) = pair(name, text)?;
    let (lo, hi) = (rational(name, &lo)?, rational(name, &hi)?);
    if lo > hi {
        return Err(format!("--{name}: lower end {lo} exceeds upper end {hi}").into());
    }
    Ok(Interval::new(lo, hi)?)
}

/// `lo,hi` with rational ends; an infinite end is replaced by the matching
/// end of `window`, and a finite domain is cut to the window when one is
/// given.
pub(crate) fn domain(name: &str, text: &str, window: Option<&str>) -> CliResult<Interval> {
    let (lo, hi) = pair(name, text)?;
    let (lo, hi) = (bound(name, &lo)?, bound(name, &hi)?);
    let window = window.map(|w| finite_interval("window", w)).transpose()?;
    let unbounded = !matches!((&lo, &hi), (Bound::Finite(_), Bound::Finite(_)));
    let Some(window) = window else {
        if unbounded {
            return Err(
                format!("--{name}: unbounded domain `{text}` needs an explicit --window").into(),
            );
        }
        return finite_interval(name, text);
    };
    let lo = match lo {
        Bound::Finite(r) => r,
        Bound::NegInf => window.lo().clone(),
        Bound::PosInf => return Err(format!("--{name}: lower end cannot be +inf").into()),
    };
    let hi = match hi {
        Bound::Finite(r) => r,
        Bound::PosInf => window.hi().clone(),
        Bound::NegInf => return Err(format!("--{name}: upper end cannot be -inf").into()),
    };
    if lo > hi {
        return Err(format!("--{name}: lower end {lo} exceeds upper end {hi}").into());
    }
    let declared = Interval::new(lo, hi)?;
    declared
        .intersect(&window)
        .ok_or_else(|| format!("--{name}: {declared} does not meet the window {window}").into())
}

pub(crate) fn breakpoints(text: Option<&str>) -> CliResult<PiecewisePlan> {
    let Some(text) = text else {
        return Ok(PiecewisePlan::default());
    };
    let points = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| rational("breakpoints", s))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(PiecewisePlan::new(points)?)
}
