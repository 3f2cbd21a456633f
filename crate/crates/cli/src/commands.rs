use std::fmt::Write as _;

use limitless::control::{
    approximate_with_error, falsify_control, glue_claims, infer_shape, survey_control, ApproxError,
    ControlClaim, Falsification, Premise, ShapeError, Survey,
};
use limitless::expr::{parse, FunctionSpec};
use limitless::integral::{
    integrate_piecewise, newton_leibniz_check, piecewise_ranges, uniqueness_gap, VariationBound,
};
use limitless::lipschitz::{
    check_linqun, control_is_2m_lipschitz, lipschitz_bound, LipschitzError,
};
use limitless::numeric::{Interval, Precision, Rational};
use limitless::verdict::Verdict;

use crate::args::{self, CliResult};
use crate::render::{decimal, Exit, Outcome};
use crate::{Cli, Command, GlobalOpts, OutputFormat, PremiseArg};

pub(crate) fn dispatch(cli: &Cli) -> CliResult<Outcome> {
    let opts = &cli.opts;
    let prec = Precision::new(opts.precision_bits)?;
    let window = opts.window.as_deref();
    match &cli.command {
        Command::VerifyControl { big_f, f, domain } => {
            let domain = args::domain("domain", domain, window)?;
            verify_control(ControlClaim::parse(big_f, f, domain)?, opts, prec)
        }
        Command::Integrate {
            f,
            u,
            v,
            n,
            breakpoints,
        } => integrate(f, u, v, *n, breakpoints.as_deref(), opts, prec),
        Command::Approx {
            big_f,
            f,
            base,
            target,
        } => approx(big_f, f, base, target, prec),
        Command::Lipschitz { f, domain } => {
            lipschitz(f, &args::domain("domain", domain, window)?, prec)
        }
        Command::Linqun {
            f,
            g,
            domain,
            m,
            samples,
        } => {
            let domain = args::domain("domain", domain, window)?;
            linqun(
                f,
                g,
                &domain,
                &args::rational("M", m)?,
                *samples,
                opts.seed,
                prec,
            )
        }
        Command::NlCheck {
            big_f,
            f,
            u,
            v,
            n,
            breakpoints,
        } => nl_check(big_f, f, u, v, *n, breakpoints.as_deref(), prec),
        Command::Shape {
            big_f,
            f,
            domain,
            premise,
        } => {
            let domain = args::domain("domain", domain, window)?;
            shape(ControlClaim::parse(big_f, f, domain)?, *premise, prec)
        }
        Command::Glue {
            big_f,
            f,
            left,
            right,
        } => {
            let left = ControlClaim::parse(big_f, f, args::domain("left", left, window)?)?;
            let right = ControlClaim::parse(big_f, f, args::domain("right", right, window)?)?;
            let glued = glue_claims(&left, &right)?;
            let pieces = glued.pieces().to_vec();
            Ok(verify_control(glued, opts, prec)?.field("pieces", pieces))
        }
        Command::Fmt { expr } => {
            let e = parse(expr)?;
            let canonical = e.to_string();
            Ok(Outcome::new(Exit::Success, format!("{canonical}\n"))
                .field("canonical", &canonical)
                .field("tree", &e))
        }
    }
}

fn grid_n(opts: &GlobalOpts) -> usize {
    usize::try_from(opts.grid_n).unwrap_or(usize::MAX)
}

fn verify_control(claim: ControlClaim, opts: &GlobalOpts, prec: Precision) -> CliResult<Outcome> {
    let survey = survey_control(&claim, opts.budget, opts.seed, grid_n(opts), prec)?;
    let falsification = falsify_control(&claim, opts.budget, opts.seed, prec)?;
    let found = matches!(falsification, Falsification::Violation { .. });
    let (exit, status) = if survey.violation.is_some() || found {
        (Exit::Violation, "refuted")
    } else if !survey.undecided.is_empty() {
        (Exit::Inconclusive, "inconclusive")
    } else {
        (Exit::Success, "certified")
    };
    let text = survey_text(&claim, &survey, &falsification, status);
    Ok(Outcome::new(exit, text)
        .field("status", status)
        .field("F", claim.controlled().body().to_string())
        .field("f", claim.control().body().to_string())
        .field("domain", claim.domain())
        .field("grid_n", opts.grid_n)
        .field("budget", opts.budget)
        .field("seed", opts.seed)
        .field("survey", &survey)
        .field("falsification", &falsification))
}

fn survey_text(
    claim: &ControlClaim,
    survey: &Survey,
    falsification: &Falsification,
    status: &str,
) -> String {
    let mut t = String::new();
    let _ = writeln!(
        t,
        "claim: f = {} controls F = {} on {}",
        claim.control().body(),
        claim.controlled().body(),
        claim.domain()
    );
    let _ = writeln!(
        t,
        "bracket checks: {} subintervals, {} certified ({} with endpoint witnesses), {} inconclusive",
        survey.checked,
        survey.certified,
        survey.endpoint_witnesses,
        survey.undecided.len()
    );
    for u in survey.undecided.iter().take(5) {
        let _ = writeln!(t, "  inconclusive on [{}, {}]: {}", u.u, u.v, u.reason);
    }
    if let Some(v) = &survey.violation {
        let _ = writeln!(
            t,
            "violation on [{}, {}]: quotient {} but f ranges over {}",
            v.u,
            v.v,
            v.dq.to_interval(),
            v.control_range
        );
    }
    match falsification {
        Falsification::Violation { violation, index } => {
            let _ = writeln!(
                t,
                "falsification: subinterval #{index} [{}, {}] has quotient {} outside f range {}",
                violation.u,
                violation.v,
                violation.dq.to_interval(),
                violation.control_range
            );
        }
        Falsification::NotFound { tried } => {
            let _ = writeln!(t, "falsification: no violation among {tried} subintervals");
        }
    }
    let _ = writeln!(t, "status: {status}");
    t
}

fn ordered(u: &Rational, v: &Rational) -> Interval {
    Interval::spanning(u.clone(), v.clone())
}

fn integrate(
    f: &str,
    u: &str,
    v: &str,
    n: u64,
    breakpoints: Option<&str>,
    opts: &GlobalOpts,
    prec: Precision,
) -> CliResult<Outcome> {
    let (u, v) = (args::rational("u", u)?, args::rational("v", v)?);
    let n = usize::try_from(n)?;
    let span = ordered(&u, &v);
    let f = FunctionSpec::parse(f, span.clone())?;
    let plan = args::breakpoints(breakpoints)?;
    let enclosure = integrate_piecewise(&f, &plan, &u, &v, n, prec)?;
    let width = enclosure.width();
    // with breakpoints the integrand is usually not Lipschitz across them
    let lipschitz = if plan.is_empty() && !span.is_point() {
        lipschitz_bound(&f, &span, prec).ok()
    } else {
        None
    };
    let gap = lipschitz
        .as_ref()
        .map(|cert| uniqueness_gap(&u, &v, n, &VariationBound::Lipschitz(cert.m.clone())));

    let mut text = format!(
        "integral of {} over [{}, {}] lies in [{}, {}]\nwidth: {} (~{})\nsubdivisions: {}{}\n",
        f.body(),
        u,
        v,
        enclosure.lo,
        enclosure.hi,
        width,
        decimal(&width),
        n,
        if plan.is_empty() { "" } else { " per piece" }
    );
    if let (Some(cert), Some(gap)) = (&lipschitz, &gap) {
        let _ = writeln!(
            text,
            "uniqueness gap: {gap} from Lipschitz constant M = {}",
            cert.m
        );
    }
    let mut outcome = Outcome::new(Exit::Success, text)
        .field("status", "certified")
        .field("f", f.body().to_string())
        .field("enclosure", &enclosure)
        .field("width", &width)
        .display("lo", &enclosure.lo)
        .display("hi", &enclosure.hi)
        .display("width", &width);
    if let (Some(cert), Some(gap)) = (lipschitz, gap) {
        outcome = outcome
            .field("lipschitz_constant", &cert.m)
            .field("uniqueness_gap", gap);
    }
    if opts.output == OutputFormat::CsvPlot {
        let mut csv = String::from("x_lo,x_hi,f_min,f_max\n");
        if !span.is_point() {
            for row in piecewise_ranges(&f, &plan, &u, &v, n, prec)? {
                let _ = writeln!(
                    csv,
                    "{},{},{},{}",
                    decimal(&row.x0),
                    decimal(&row.x1),
                    decimal(&row.min),
                    decimal(&row.max)
                );
            }
        }
        outcome.csv = Some(csv);
    }
    Ok(outcome)
}

fn approx(big_f: &str, f: &str, base: &str, target: &str, prec: Precision) -> CliResult<Outcome> {
    let (base, target) = (
        args::rational("base", base)?,
        args::rational("target", target)?,
    );
    let span = ordered(&base, &target);
    let big_f = FunctionSpec::parse(big_f, span.clone())?;
    let f = FunctionSpec::parse(f, span)?;
    match approximate_with_error(&big_f, &f, &base, &target, prec) {
        Ok(a) => {
            let text = format!(
                "F({}) ~ {} (~{})\ncertified error bound: {} (~{})\n",
                a.target,
                a.approx,
                decimal(&a.approx),
                a.error_bound,
                decimal(&a.error_bound)
            );
            Ok(Outcome::new(Exit::Success, text)
                .field("status", "certified")
                .field("approximation", &a)
                .display("approx", &a.approx)
                .display("error_bound", &a.error_bound))
        }
        Err(err @ (ApproxError::PremiseNotCertified(_) | ApproxError::NotExact { .. })) => {
            let status = match err {
                ApproxError::PremiseNotCertified(_) => "premise_not_certified",
                _ => "not_exact",
            };
            Ok(Outcome::new(Exit::Inconclusive, format!("{err}\n"))
                .field("status", status)
                .field("reason", err.to_string()))
        }
        Err(err) => Err(err.into()),
    }
}

fn lipschitz(f: &str, domain: &Interval, prec: Precision) -> CliResult<Outcome> {
    let f = FunctionSpec::parse(f, domain.clone())?;
    match lipschitz_bound(&f, domain, prec) {
        Ok(cert) => {
            let text = format!("|f(u) - f(v)| <= {} |u - v| on {}\n", cert.m, cert.domain);
            Ok(Outcome::new(Exit::Success, text)
                .field("status", "certified")
                .field("certificate", &cert)
                .display("M", &cert.m))
        }
        // no constant was certified; that is not a proof that none exists
        Err(LipschitzError::NotLipschitz {
            reason,
            unbounded_within_budget,
        }) => Ok(
            Outcome::new(Exit::Inconclusive, format!("not Lipschitz: {reason}\n"))
                .field("status", "not_lipschitz")
                .field("reason", reason)
                .field("unbounded_within_budget", unbounded_within_budget),
        ),
        Err(err) => Err(err.into()),
    }
}

fn linqun(
    f: &str,
    g: &str,
    domain: &Interval,
    m: &Rational,
    samples: usize,
    seed: u64,
    prec: Precision,
) -> CliResult<Outcome> {
    let f = FunctionSpec::parse(f, domain.clone())?;
    let g = FunctionSpec::parse(g, domain.clone())?;
    let verdict = check_linqun(&f, &g, domain, m, samples, seed, prec)?;
    match verdict {
        Verdict::Certified { witness } => {
            let two_m = control_is_2m_lipschitz(&f, &g, domain, m, samples, seed, prec)?;
            let exit = match &two_m {
                Verdict::Certified { .. } => Exit::Success,
                Verdict::Refuted { .. } => Exit::Violation,
                Verdict::Inconclusive { .. } => Exit::Inconclusive,
            };
            let text = format!(
                "pass: {} samples, worst slack {} (~{})\n2M propagation: {}\n",
                witness.samples_checked,
                witness.worst_slack,
                decimal(&witness.worst_slack),
                two_m.status()
            );
            let worst = witness.worst_slack.clone();
            Ok(Outcome::new(exit, text)
                .field("status", "certified")
                .field("linqun", &witness)
                .field("two_m", &two_m)
                .display("worst_slack", &worst))
        }
        Verdict::Refuted { violation } => {
            let text = format!(
                "counterexample: u = {}, v = {}, s = {} ({:?} form exceeds its bound by at least {})\n",
                violation.u, violation.v, violation.s, violation.form, violation.gap
            );
            Ok(Outcome::new(Exit::Violation, text)
                .field("status", "refuted")
                .field("counterexample", &violation))
        }
        Verdict::Inconclusive { reason } => Ok(Outcome::new(
            Exit::Inconclusive,
            format!("inconclusive: {reason}\n"),
        )
        .field("status", "inconclusive")
        .field("reason", reason)),
    }
}

fn nl_check(
    big_f: &str,
    f: &str,
    u: &str,
    v: &str,
    n: u64,
    breakpoints: Option<&str>,
    prec: Precision,
) -> CliResult<Outcome> {
    let (u, v) = (args::rational("u", u)?, args::rational("v", v)?);
    let span = ordered(&u, &v);
    let big_f = FunctionSpec::parse(big_f, span.clone())?;
    let f = FunctionSpec::parse(f, span)?;
    let plan = args::breakpoints(breakpoints)?;
    let plan = (!plan.is_empty()).then_some(plan);
    let verdict =
        newton_leibniz_check(&big_f, &f, &u, &v, usize::try_from(n)?, plan.as_ref(), prec)?;
    let (exit, text) = match &verdict {
        Verdict::Certified { witness } => (
            Exit::Success,
            format!(
                "F(v) - F(u) = {} meets the integral enclosure [{}, {}]{}\n",
                witness.difference.to_interval(),
                witness.enclosure.lo,
                witness.enclosure.hi,
                if witness.contained {
                    " and lies inside it"
                } else {
                    ""
                }
            ),
        ),
        Verdict::Refuted { violation } => (
            Exit::Violation,
            format!(
                "F(v) - F(u) = {} is at least {} away from the integral enclosure [{}, {}]\n",
                violation.difference.to_interval(),
                violation.gap,
                violation.enclosure.lo,
                violation.enclosure.hi
            ),
        ),
        Verdict::Inconclusive { reason } => {
            (Exit::Inconclusive, format!("inconclusive: {reason}\n"))
        }
    };
    Ok(
        Outcome::new(exit, format!("{text}status: {}\n", verdict.status()))
            .field("status", verdict.status())
            .field("F", big_f.body().to_string())
            .field("f", f.body().to_string())
            .field("verdict", &verdict),
    )
}

fn shape(claim: ControlClaim, premise: PremiseArg, prec: Precision) -> CliResult<Outcome> {
    let premise = match premise {
        PremiseArg::Zero => Premise::IdenticallyZero,
        PremiseArg::Const => Premise::IdenticallyConst,
        PremiseArg::Positive => Premise::Positive,
        PremiseArg::Negative => Premise::Negative,
        PremiseArg::Increasing => Premise::Increasing,
        PremiseArg::Decreasing => Premise::Decreasing,
    };
    match infer_shape(&claim, premise, prec) {
        Ok(report) => {
            let text = format!(
                "{}\nF = {} is {:?} on {} (premise: {}; spot check over {} points)\n",
                report.implication,
                claim.controlled().body(),
                report.property,
                report.domain,
                report.premise_evidence,
                report.spot_check.points
            );
            Ok(Outcome::new(Exit::Success, text)
                .field("status", "certified")
                .field("report", &report))
        }
        Err(err @ ShapeError::SpotCheckFailed { .. }) => {
            Ok(Outcome::new(Exit::Violation, format!("{err}\n"))
                .field("status", "refuted")
                .field("reason", err.to_string()))
        }
        Err(
            err @ (ShapeError::PremiseNotCertified { .. } | ShapeError::SpotCheckUndecided { .. }),
        ) => Ok(Outcome::new(Exit::Inconclusive, format!("{err}\n"))
            .field("status", "inconclusive")
            .field("reason", err.to_string())),
        Err(err) => Err(err.into()),
    }
}
