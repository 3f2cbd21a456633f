//! Acceptance criteria, one pass/fail line each. Exits nonzero when any
//! criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use limitless::control::{
    check_bracket, cubic_control_certificate, falsify_control, ControlClaim, Falsification,
};
use limitless::expr::{parse, Expr, FunctionSpec};
use limitless::lipschitz::{check_linqun, control_is_2m_lipschitz, find_bracket_by_subdivision};
use limitless::numeric::{
    cos_enclosure, sin_enclosure, sqrt_enclosure, Interval, Precision, Rational,
};
use limitless::sample::{random_pair, rng};
use limitless::verdict::Verdict;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn limitless(args: &[&str]) -> Result<(i32, Value), String> {
    let mut full = vec!["--output", "json"];
    full.extend_from_slice(args);
    let out = Command::new(env!("CARGO_BIN_EXE_limitless"))
        .args(&full)
        .env_remove("LIMITLESS_PRECISION_BITS")
        .output()
        .map_err(|e| e.to_string())?;
    let code = out.status.code().ok_or("killed by a signal")?;
    let report = serde_json::from_slice(&out.stdout).map_err(|e| {
        format!(
            "{} {e}: {}",
            full.join(" "),
            String::from_utf8_lossy(&out.stderr)
        )
    })?;
    Ok((code, report))
}

fn rat(v: &Value) -> Result<Rational, String> {
    v.as_str()
        .ok_or_else(|| format!("expected a fraction string, got {v}"))?
        .parse()
        .map_err(|_| format!("`{v}` is not a fraction"))
}

fn iv(lo: &str, hi: &str) -> Interval {
    Interval::new(lo.parse().unwrap(), hi.parse().unwrap()).unwrap()
}

fn prec() -> Precision {
    Precision::default()
}

fn timed(limit: Duration, check: impl FnOnce() -> Check) -> Check {
    let start = Instant::now();
    let detail = check()?;
    let elapsed = start.elapsed();
    ensure!(elapsed < limit, "took {elapsed:.2?}, limit {limit:?}");
    Ok(format!("{detail} in {elapsed:.2?}"))
}

fn approx_sqrt_ten() -> Check {
    timed(Duration::from_secs(1), || {
        let (code, report) = limitless(&[
            "approx",
            "--F",
            "sqrt(x)",
            "--f",
            "1/(2*sqrt(x))",
            "--base",
            "9",
            "--target",
            "10",
        ])?;
        ensure!(code == 0, "exit {code}");
        let approx = rat(&report["approximation"]["approx"])?;
        let bound = rat(&report["approximation"]["error_bound"])?;
        ensure!(approx == Rational::frac(19, 6), "approx {approx}");
        ensure!(
            bound <= Rational::frac(1, 114),
            "error bound {bound} exceeds 1/114"
        );
        Ok(format!("approx 19/6, error bound {bound}"))
    })
}

fn power_families() -> Check {
    timed(Duration::from_secs(10), || {
        let families = [
            ("x^2", "2*x"),
            ("x^3", "3*x^2"),
            ("sqrt(x)", "1/(2*sqrt(x))"),
            ("1/x", "-1/x^2"),
        ];
        for (big_f, f) in families {
            let (code, report) = limitless(&[
                "--budget",
                "1000",
                "verify-control",
                "--F",
                big_f,
                "--f",
                f,
                "--domain",
                "1/10,100",
            ])?;
            ensure!(code == 0, "{big_f}: exit {code}");
            let survey = &report["survey"];
            ensure!(
                survey["checked"] == 1000,
                "{big_f}: checked {}",
                survey["checked"]
            );
            ensure!(
                survey["certified"] == survey["checked"]
                    && survey["endpoint_witnesses"] == survey["checked"],
                "{big_f}: {} certified, {} endpoint witnesses",
                survey["certified"],
                survey["endpoint_witnesses"]
            );
        }
        Ok("4 families, 1000 subintervals each, all endpoint witnesses".into())
    })
}

fn falsification() -> Check {
    let (code, report) = limitless(&[
        "--budget",
        "100",
        "verify-control",
        "--F",
        "x^2",
        "--f",
        "3*x",
        "--domain",
        "1,3",
    ])?;
    ensure!(code == 1, "exit {code}");
    ensure!(
        report["falsification"]["outcome"] == "violation",
        "falsification {}",
        report["falsification"]
    );
    let claim = ControlClaim::parse("x^2", "3*x", iv("1", "3")).unwrap();
    let Falsification::Violation { violation, .. } =
        falsify_control(&claim, 100, 0, prec()).map_err(|e| e.to_string())?
    else {
        return Err("library falsifier found nothing".into());
    };
    // oracle: D = u + v must miss [3u, 3v]
    let d = &violation.u + &violation.v;
    let (lo, hi) = (
        Rational::from(3) * &violation.u,
        Rational::from(3) * &violation.v,
    );
    ensure!(d < lo || d > hi, "D = {d} lies in [{lo}, {hi}]");
    Ok(format!("violation on [{}, {}]", violation.u, violation.v))
}

fn enclosure(report: &Value) -> Result<(Rational, Rational), String> {
    Ok((
        rat(&report["enclosure"]["lo"])?,
        rat(&report["enclosure"]["hi"])?,
    ))
}

fn width_law() -> Check {
    let mut widths = Vec::new();
    for n in ["1000", "2000"] {
        let (code, report) =
            limitless(&["integrate", "--f", "x^2", "--u", "0", "--v", "1", "--n", n])?;
        ensure!(code == 0, "n = {n}: exit {code}");
        let (lo, hi) = enclosure(&report)?;
        let third = Rational::frac(1, 3);
        ensure!(
            lo <= third && third <= hi,
            "n = {n}: [{lo}, {hi}] misses 1/3"
        );
        widths.push(hi - lo);
    }
    ensure!(widths[0] <= Rational::frac(1, 500), "width {}", widths[0]);
    ensure!(
        &widths[1] * Rational::from(2) == widths[0],
        "widths {} and {}",
        widths[0],
        widths[1]
    );
    Ok(format!("widths {} and {}", widths[0], widths[1]))
}

fn newton_leibniz() -> Check {
    let pairs: [(&str, &str, &str, &str, Option<&str>); 5] = [
        ("x^3", "3*x^2", "0", "1", None),
        ("x^2", "2*x", "0", "1", None),
        ("sqrt(x)", "1/(2*sqrt(x))", "1/4", "4", None),
        ("sin(x)", "cos(x)", "0", "1", None),
        ("abs(x)", "sgn(x)", "-1", "2", Some("0")),
    ];
    for (big_f, f, u, v, breakpoints) in pairs {
        let mut args = vec![
            "nl-check", "--F", big_f, "--f", f, "--u", u, "--v", v, "--n", "2000",
        ];
        if let Some(b) = breakpoints {
            args.extend(["--breakpoints", b]);
        }
        let (code, report) = limitless(&args)?;
        ensure!(
            code == 0 && report["status"] == "certified",
            "{big_f}: exit {code}"
        );
    }
    let (code, report) = limitless(&[
        "nl-check", "--F", "x^3", "--f", "2*x", "--u", "0", "--v", "1/2", "--n", "2000",
    ])?;
    ensure!(
        code == 1 && report["status"] == "refuted",
        "negative control: exit {code}"
    );
    Ok("5 pairs certified, negative control refuted".into())
}

fn piecewise_sign() -> Check {
    for n in [10u64, 300, 1000] {
        let n_arg = n.to_string();
        let (code, report) = limitless(&[
            "integrate",
            "--f",
            "sgn(x)",
            "--u",
            "-1",
            "--v",
            "2",
            "--breakpoints",
            "0",
            "--n",
            &n_arg,
        ])?;
        ensure!(code == 0, "n = {n}: exit {code}");
        let (lo, hi) = enclosure(&report)?;
        // |2| - |-1| = 1
        ensure!(
            lo <= Rational::one() && Rational::one() <= hi,
            "n = {n}: [{lo}, {hi}] misses 1"
        );
        ensure!(
            &hi - &lo <= Rational::frac(6, n as i64),
            "n = {n}: width {}",
            &hi - &lo
        );
    }
    Ok("n = 10, 300, 1000 enclose 1 within 6/n".into())
}

fn spec(text: &str, domain: &Interval) -> FunctionSpec {
    FunctionSpec::parse(text, domain.clone()).unwrap()
}

fn linqun_suite() -> Check {
    let domain = iv("0", "1");
    let (f, g, m) = (
        spec("x^2", &domain),
        spec("2*x", &domain),
        Rational::from(2),
    );
    let verdict =
        check_linqun(&f, &g, &domain, &m, 10_000, 0, prec()).map_err(|e| e.to_string())?;
    let Verdict::Certified { witness } = verdict else {
        return Err(format!("x^2: {verdict:?}"));
    };
    ensure!(
        witness.samples_checked >= 10_000 && !witness.worst_slack.is_negative(),
        "x^2: {witness:?}"
    );
    let two_m = control_is_2m_lipschitz(&f, &g, &domain, &m, 10_000, 0, prec())
        .map_err(|e| e.to_string())?;
    let Verdict::Certified { witness: two_m } = two_m else {
        return Err(format!("2M check: {two_m:?}"));
    };
    ensure!(
        two_m.bound == Rational::from(4) && !two_m.worst_slack.is_negative(),
        "2M check: {two_m:?}"
    );

    let domain = iv("-1", "1");
    let (f, g) = (spec("abs(x)", &domain), spec("sgn(x)", &domain));
    for m in [1i64, 10, 1000, 1_000_000] {
        let verdict = check_linqun(&f, &g, &domain, &Rational::from(m), 10_000, 0, prec())
            .map_err(|e| e.to_string())?;
        ensure!(
            matches!(verdict, Verdict::Refuted { .. }),
            "abs/sgn with M = {m}: {verdict:?}"
        );
    }
    Ok(format!(
        "worst slack {}, abs/sgn refuted for M up to 10^6",
        witness.worst_slack
    ))
}

fn subdivision_bracket() -> Check {
    let domain = iv("-1", "1");
    let (f, g) = (spec("x^3", &domain), spec("3*x^2", &domain));
    let b =
        find_bracket_by_subdivision(&f, &g, &Rational::from(6), domain.lo(), domain.hi(), prec())
            .map_err(|e| e.to_string())?;
    let three = Rational::from(3);
    ensure!(
        &three * &b.p * &b.p <= Rational::one(),
        "3p^2 > 1 at p = {}",
        b.p
    );
    ensure!(
        Rational::one() <= &three * &b.q * &b.q,
        "3q^2 < 1 at q = {}",
        b.q
    );
    Ok(format!("p = {}, q = {}", b.p, b.q))
}

fn random_rational(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    Rational::frac(rng.gen_range(-bound..=bound), rng.gen_range(1..=12))
}

fn cubic_certificates() -> Check {
    let window = iv("-4", "4");
    let mut rng = rng(9);
    for _ in 0..100 {
        let (a, b, c) = (
            random_rational(&mut rng, 30),
            random_rational(&mut rng, 30),
            random_rational(&mut rng, 30),
        );
        let Verdict::Certified { witness: cert } = cubic_control_certificate(&a, &b, &c, &window)
        else {
            return Err(format!("identities fail for a = {a}, b = {b}, c = {c}"));
        };
        ensure!(
            cert.identities.iter().all(|i| i.holds),
            "a = {a}: {:?}",
            cert.identities
        );
        let claim = cert.claim().map_err(|e| e.to_string())?;
        let big_f = |x: &Rational| x * x * x + &a * x * x + &b * x + &c;
        let g = |x: &Rational| Rational::from(3) * x * x + Rational::from(2) * &a * x + &b;
        for _ in 0..100 {
            let (u, v) = random_pair(&mut rng, &window);
            let d = (big_f(&v) - big_f(&u)) / (&v - &u);
            ensure!(
                &d - g(&u) == (&v - &u) * (&v + Rational::from(2) * &u + &a),
                "D - g(u) at [{u}, {v}]"
            );
            ensure!(
                g(&v) - &d == (&v - &u) * (Rational::from(2) * &v + &u + &a),
                "g(v) - D at [{u}, {v}]"
            );
            let verdict = check_bracket(&claim, &u, &v, 8, prec()).map_err(|e| e.to_string())?;
            ensure!(
                verdict.is_certified(),
                "a = {a}, b = {b} on [{u}, {v}]: {verdict:?}"
            );
        }
    }
    Ok("100 certificates, 100 subintervals each".into())
}

fn containment_probes(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let mut probes = 0;
    let point_in = |rng: &mut ChaCha8Rng| {
        let a = random_rational(rng, 400);
        let b = random_rational(rng, 400);
        let iv = Interval::spanning(a, b);
        let x = iv.lo() + iv.width() * Rational::frac(rng.gen_range(0..=64), 64);
        (iv, x)
    };
    for _ in 0..2000 {
        let ((a, x), (b, y)) = (point_in(rng), point_in(rng));
        ensure!(a.add(&b).contains(&(&x + &y)), "{a} + {b}");
        ensure!(a.sub(&b).contains(&(&x - &y)), "{a} - {b}");
        ensure!(a.mul(&b).contains(&(&x * &y)), "{a} * {b}");
        match a.div(&b) {
            Ok(q) => ensure!(q.contains(&(&x / &y)), "{a} / {b}"),
            Err(_) => ensure!(b.contains_zero(), "{a} / {b} refused"),
        }
        let (s, t) = (
            x.abs(),
            Interval::new(
                a.lo().abs().min(a.hi().abs()),
                a.lo().abs().max(a.hi().abs()),
            )
            .unwrap(),
        );
        let t = if t.contains(&s) {
            t
        } else {
            Interval::point(s.clone())
        };
        let r = sqrt_enclosure(&t, prec()).map_err(|e| e.to_string())?;
        ensure!(
            r.lo() * r.lo() <= s && s <= r.hi() * r.hi(),
            "sqrt of {s} in {r}"
        );
        probes += 5;
    }
    // trig against partial sums of the Taylor series, which bracket the value for |x| ≤ 4
    while probes < 10_000 {
        let x = Rational::frac(rng.gen_range(-4000..=4000), 1000);
        for (enc, odd) in [
            (sin_enclosure(&Interval::point(x.clone()), prec()), true),
            (cos_enclosure(&Interval::point(x.clone()), prec()), false),
        ] {
            let mut term = if odd { x.clone() } else { Rational::one() };
            let mut k: i64 = if odd { 1 } else { 0 };
            let (mut prev, mut sum) = (term.clone(), term.clone());
            for _ in 0..30 {
                term = -(term * &x * &x) / Rational::from((k + 1) * (k + 2));
                k += 2;
                prev = sum.clone();
                sum += &term;
            }
            let (lo, hi) = if prev <= sum {
                (prev, sum)
            } else {
                (sum, prev)
            };
            ensure!(
                enc.lo() <= &hi && &lo <= enc.hi(),
                "trig at {x}: {enc} vs [{lo}, {hi}]"
            );
            probes += 1;
        }
    }
    Ok(probes)
}

const CORPUS: [&str; 50] = [
    "x",
    "0",
    "7",
    "3/19",
    "-3/19",
    "x^2",
    "x^3",
    "x^-2",
    "x^(-3)",
    "2*x",
    "3*x^2",
    "x^3+2*x^2",
    "-x",
    "-x^2",
    "--x",
    "- 2 * x",
    "1/x",
    "-1/x^2",
    "1 / (2*sqrt(x))",
    "sqrt(x)",
    "sqrt(x^2 + 1)",
    "sin(x)",
    "cos(x)",
    "-cos(x)",
    "sin(x)^2 + cos(x)^2",
    "abs(x)",
    "sgn(x)",
    "abs(2*x - 1)",
    "x*sgn(x)",
    "x - (1 - x)",
    "(x - 1) - x",
    "x / (3/4)",
    "(3/19)^2",
    "(x^2)^3",
    "x^2^3",
    "x ÷ 2",
    "1 - 2 + 3 - 4",
    "1 - (2 + 3)",
    "x * (x + 1) * (x + 2)",
    "x / x / x",
    "x / (x / x)",
    "(1 + x)^-1",
    "sqrt(sqrt(x))",
    "sin(cos(x))",
    "abs(sin(x)) + sgn(cos(x))",
    "2 * (x + 3/2)^2 - 5",
    "(-2) * x",
    "x * -2",
    "1/2*x",
    "x^0",
];

fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_ratio(1, 4) {
        return if rng.gen() {
            Expr::var()
        } else {
            Expr::Const(random_rational(rng, 50))
        };
    }
    let mut sub = || random_expr(rng, depth - 1);
    let (a, b) = (sub(), sub());
    match rng.gen_range(0..10) {
        0 => Expr::add(a, b),
        1 => Expr::sub(a, b),
        2 => Expr::mul(a, b),
        3 => Expr::div(a, b),
        4 => Expr::pow(a, rng.gen_range(-3..=5)),
        5 => Expr::sqrt(a),
        6 => Expr::sin(a),
        7 => Expr::cos(a),
        8 => Expr::abs(a),
        _ => Expr::sgn(a),
    }
}

fn round_trip(e: &Expr) -> Result<(), String> {
    let printed = e.to_string();
    let reparsed = parse(&printed).map_err(|err| format!("`{printed}`: {err}"))?;
    ensure!(
        &reparsed == e && reparsed.to_string() == printed,
        "`{printed}` does not round-trip"
    );
    Ok(())
}

fn shape_spot_checks() -> Result<usize, String> {
    let cases = [
        ("5", "0", "-2,3", "zero"),
        ("3*x + 1", "3", "-2,3", "const"),
        ("x^2", "2*x", "1,5", "positive"),
        ("x^3", "3*x^2", "1/2,2", "positive"),
        ("sin(x)", "cos(x)", "0,1", "positive"),
        ("1/x", "-1/x^2", "1,4", "negative"),
        ("x^2", "2*x", "0,5", "increasing"),
        ("x^3", "3*x^2", "0,2", "increasing"),
        ("sqrt(x)", "1/(2*sqrt(x))", "1/4,4", "decreasing"),
        ("sin(x)", "cos(x)", "0,1", "decreasing"),
    ];
    for (big_f, f, domain, premise) in cases {
        let (code, _) = limitless(&[
            "shape",
            "--F",
            big_f,
            "--f",
            f,
            "--domain",
            domain,
            "--premise",
            premise,
        ])?;
        ensure!(
            code == 0,
            "{premise} for {big_f} on [{domain}]: exit {code}"
        );
    }
    let (code, _) = limitless(&[
        "shape",
        "--F",
        "-x^2",
        "--f",
        "2*x",
        "--domain",
        "1,5",
        "--premise",
        "positive",
    ])?;
    ensure!(code == 1, "false claim passed the spot check: exit {code}");
    Ok(cases.len())
}

fn json_determinism() -> Result<(), String> {
    let args = [
        "--seed",
        "11",
        "--budget",
        "300",
        "verify-control",
        "--F",
        "x^3",
        "--f",
        "3*x^2",
        "--domain",
        "-2,2",
    ];
    let (first, second) = (limitless(&args)?, limitless(&args)?);
    ensure!(first == second, "two runs differ");
    let args = [
        "--seed",
        "3",
        "linqun",
        "--f",
        "x^2",
        "--g",
        "2*x",
        "--domain",
        "0,1",
        "--M",
        "2",
        "--samples",
        "2000",
    ];
    ensure!(limitless(&args)? == limitless(&args)?, "linqun runs differ");
    Ok(())
}

fn property_suites() -> Check {
    let mut rng = rng(10);
    let probes = containment_probes(&mut rng)?;
    for text in CORPUS {
        round_trip(&parse(text).map_err(|e| format!("{text}: {e}"))?)?;
    }
    for _ in 0..1000 {
        round_trip(&random_expr(&mut rng, 5))?;
    }
    let shapes = shape_spot_checks()?;
    json_determinism()?;
    Ok(format!("{probes} containment probes, 50 + 1000 round-trips, {shapes} shape checks, deterministic JSON"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("approximation of sqrt(10) from 9", approx_sqrt_ten),
        ("power families on [1/10, 100]", power_families),
        ("falsification of x^2 by 3x", falsification),
        ("quadrature width law", width_law),
        ("Newton-Leibniz suite", newton_leibniz),
        ("piecewise integral of sgn", piecewise_sign),
        ("Linqun suite", linqun_suite),
        ("bracket by subdivision", subdivision_bracket),
        ("cubic certificates", cubic_certificates),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
