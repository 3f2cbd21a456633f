use limitless::control::{
    check_bracket, cubic_control_certificate, falsify_control, ControlClaim, Falsification,
};
use limitless::lipschitz::check_linqun;
use limitless::numeric::{Interval, Precision, Rational};
use limitless::verdict::Verdict;
use proptest::prelude::*;

fn iv(lo: &str, hi: &str) -> Interval {
    Interval::new(lo.parse().unwrap(), hi.parse().unwrap()).unwrap()
}

fn prec() -> Precision {
    Precision::default()
}

/// `u < v` inside `domain`, on a grid of `1/den` of its width.
fn subinterval(domain: Interval, den: i64) -> impl Strategy<Value = (Rational, Rational)> {
    (0..den, 1..=den).prop_filter_map("u < v", move |(i, j)| {
        (i < j).then(|| {
            let at = |k| domain.lo() + domain.width() * Rational::frac(k, den);
            (at(i), at(j))
        })
    })
}

/// Controlled/control pairs with a Lipschitz constant `M` for the
/// inequality on the given domain.
fn linqun_library() -> Vec<(&'static str, &'static str, Interval, Rational)> {
    vec![
        ("x^2", "2*x", iv("0", "1"), Rational::from(1)),
        ("x^3", "3*x^2", iv("-1", "1"), Rational::from(6)),
        ("sin(x)", "cos(x)", iv("0", "3"), Rational::from(1)),
        ("x^3 - 2*x", "3*x^2 - 2", iv("-2", "2"), Rational::from(12)),
    ]
}

#[test]
fn linqun_library_certifies() {
    for (f, g, domain, m) in linqun_library() {
        let claim = ControlClaim::parse(f, g, domain.clone()).unwrap();
        let verdict = check_linqun(
            claim.controlled(),
            claim.control(),
            &domain,
            &m,
            400,
            7,
            prec(),
        )
        .unwrap();
        assert!(verdict.is_certified(), "{f} / {g}: {verdict:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn linqun_pairs_are_never_refuted(which in 0usize..4, t in (0i64..64, 1i64..=64)) {
        let (f, g, domain, _) = linqun_library().swap_remove(which);
        prop_assume!(t.0 < t.1);
        let at = |k| domain.lo() + domain.width() * Rational::frac(k, 64);
        let claim = ControlClaim::parse(f, g, domain.clone()).unwrap();
        let verdict = check_bracket(&claim, &at(t.0), &at(t.1), 16, prec()).unwrap();
        prop_assert!(!verdict.is_refuted(), "{:?}", verdict);
    }

    #[test]
    fn certified_witnesses_reverify((u, v) in subinterval(iv("1/10", "100"), 997), which in 0usize..4) {
        let (f, g) = [("x^2", "2*x"), ("x^3", "3*x^2"), ("sqrt(x)", "1/(2*sqrt(x))"), ("1/x", "-1/x^2")][which];
        let claim = ControlClaim::parse(f, g, iv("1/10", "100")).unwrap();
        match check_bracket(&claim, &u, &v, 64, prec()).unwrap() {
            Verdict::Certified { witness } => {
                prop_assert!(witness.uses_endpoints());
                prop_assert!(witness.strict);
                prop_assert!(witness.verify(&claim, prec().doubled()).unwrap());
            }
            other => prop_assert!(false, "{} on [{}, {}]: {:?}", f, u, v, other),
        }
    }

    #[test]
    fn cubic_identities_match_direct_quotients(
        a in (-20i64..=20, 1i64..=7),
        b in (-20i64..=20, 1i64..=7),
        c in (-20i64..=20, 1i64..=7),
        (u, v) in subinterval(iv("-5", "5"), 60),
    ) {
        let (a, b, c) = (Rational::frac(a.0, a.1), Rational::frac(b.0, b.1), Rational::frac(c.0, c.1));
        let cert = cubic_control_certificate(&a, &b, &c, &iv("-5", "5"));
        let cert = cert.witness().expect("identities hold");
        // oracle: the quotient computed from F directly
        let big_f = |x: &Rational| x * x * x + &a * x * x + &b * x + &c;
        let g = |x: &Rational| Rational::from(3) * x * x + Rational::from(2) * &a * x + &b;
        let d = (big_f(&v) - big_f(&u)) / (&v - &u);
        prop_assert_eq!(&d - g(&u), (&v - &u) * (&v + Rational::from(2) * &u + &a));
        prop_assert_eq!(g(&v) - &d, (&v - &u) * (Rational::from(2) * &v + &u + &a));

        let claim = cert.claim().unwrap();
        let verdict = check_bracket(&claim, &u, &v, 16, prec()).unwrap();
        prop_assert!(verdict.is_certified(), "{:?}", verdict);
        if let Some((p, q)) = cert.endpoint_witness(&u, &v) {
            prop_assert!(g(&p) <= d && d <= g(&q));
        }
    }
}

#[test]
fn violations_reverify_and_reports_are_deterministic() {
    let claim = ControlClaim::parse("x^2", "3*x", iv("1", "3")).unwrap();
    let first = falsify_control(&claim, 100, 0, prec()).unwrap();
    let Falsification::Violation { violation, .. } = &first else {
        panic!("expected a violation, got {first:?}");
    };
    assert!(violation.verify(&claim, prec().doubled()).unwrap());
    let again = falsify_control(&claim, 100, 0, prec()).unwrap();
    assert_eq!(
        serde_json::to_string(&first).unwrap(),
        serde_json::to_string(&again).unwrap()
    );
}
