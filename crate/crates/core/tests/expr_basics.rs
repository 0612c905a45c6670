//! Parser, normal form, differentiation, substitution, and evaluation.

use foliate_core::expr::{
    collect_powers, differentiate, equivalent, eval_numeric, is_zero, parse, substitute,
    ZeroVerdict,
};
use foliate_core::{Error, Expr, Symbol};
use std::collections::BTreeMap;

fn ok(s: &str) -> Expr {
    parse(s).unwrap_or_else(|e| panic!("parse `{}`: {}", s, e))
}

fn eq(a: &str, b: &str) {
    let ea = ok(a);
    let eb = ok(b);
    assert!(
        equivalent(&ea, &eb).unwrap(),
        "`{}` != `{}`  ({} vs {})",
        a,
        b,
        ea,
        eb
    );
}

#[test]
fn parse_power_with_symbolic_exponent() {
    let e = ok("v^(1+q/2)");
    match &e {
        Expr::Pow(b, x) => {
            assert_eq!(**b, Expr::sym("v"));
            assert!(x.contains_symbol(&Symbol::new("q")));
        }
        other => panic!("expected power node, got {:?}", other),
    }
}

#[test]
fn parse_function_call() {
    let e = ok("tanh((p/2)^(1/2)*(x+c1))");
    match e {
        Expr::Fun(f, _) => assert_eq!(f.name(), "tanh"),
        other => panic!("expected tanh application, got {}", other),
    }
}

#[test]
fn parse_zero_denominator_is_an_error() {
    match parse("1/0") {
        Err(Error::Parse(p)) => assert!(p.msg.contains("zero denominator")),
        other => panic!("expected zero-denominator error, got {:?}", other),
    }
}

#[test]
fn parse_unknown_function_reports_position() {
    match parse("1 + sech(x)") {
        Err(Error::Parse(p)) => {
            assert!(p.msg.contains("sech"));
            assert_eq!(p.pos, 4);
        }
        other => panic!("expected parse error, got {:?}", other),
    }
}

#[test]
fn print_reparses_normalize_equal() {
    for s in [
        "1 - 2*x + x^2",
        "(p/2)^(1/2)*tanh((p/2)^(1/2)*(x+c1))",
        "v^(1+q/2) - (p*k)^(1/2)*v",
        "3/2*(p*v + (p*k)^(1/2)*v^2)",
        "exp(-3*p*(t+c)/2)",
        "cosh(x)^3*sinh(x)",
        "1/(x+c1) + x^(-2)",
        "(-p*k)^(1/2)*v^(-1/3)",
    ] {
        let e = ok(s);
        let printed = e.to_string();
        let reparsed = parse(&printed)
            .unwrap_or_else(|err| panic!("reparse `{}` (from `{}`): {}", printed, s, err));
        assert_eq!(e, reparsed, "round trip for `{}` via `{}`", s, printed);
    }
}

#[test]
fn normal_form_basics() {
    eq("x + x", "2*x");
    eq("x*x", "x^2");
    eq("(x+1)^2", "x^2 + 2*x + 1");
    eq("(x+1)*(x-1)", "x^2 - 1");
    eq("2^(1/2)*2^(1/2)", "2");
    eq("sqrt(8)", "2*sqrt(2)");
    eq("sqrt(12)", "2*sqrt(3)");
    eq("sqrt(1/2)", "2^(-1/2)");
    eq("(4*x+4*c1)^(1/2)", "2*(x+c1)^(1/2)");
    eq("(p*k)^(1/2)", "p^(1/2)*k^(1/2)");
    eq("(x^2)^a", "x^(2*a)");
    eq("v^a*v", "v^(a+1)");
    eq("x^(3/2)", "x*x^(1/2)");
    eq("(n-2)/(2-n)", "-1");
    eq("cosh(y)^2 - sinh(y)^2", "1");
    eq("cos(y)^2 + sin(y)^2", "1");
    eq("tanh(-y)", "-tanh(y)");
    eq("cosh(-y)", "cosh(y)");
    eq("exp(x)^2", "exp(2*x)");
}

#[test]
fn negative_radicands_stay_glued() {
    // (-p*k)^(1/2) squared recovers -p*k exactly
    eq("(-p*k)^(1/2)*(-p*k)^(1/2)", "-p*k");
    // even-root extraction keeps the sign inside
    eq("(-4*p^3*k)^(1/2)", "2*p*(-p*k)^(1/2)");
    // quartic root squared meets the square root spelling
    eq("(-4*p^3*k)^(1/4)*(-4*p^3*k)^(1/4)", "2*p*(-p*k)^(1/2)");
    // and cube roots pull signs out
    eq("(-8)^(1/3)", "-2");
    eq("(-p^3)^(1/3)", "-p");
}

#[test]
fn radical_products_combine() {
    eq("(-k)^(1/2)*p^(1/2)", "(-k*p)^(1/2)");
    eq(
        "(2*p/(q+2))^(1/2)*(2*k/(q+2))^(1/2)",
        "2*(p*k)^(1/2)/(q+2)",
    );
    // cube-root products used by the two-extra-powers family
    eq("(k^2*p)^(1/3)*(k*p^2)^(1/3)", "k*p");
}

#[test]
fn normalize_is_idempotent_on_samples() {
    for s in [
        "x^2 + 2*x*y + y^2",
        "(x+1)^3/(x-1)",
        "tanh(x)^2*p - sqrt(2)*x",
        "(-p*k)^(1/2)*v^(-1/3) + v",
    ] {
        let e = ok(s);
        let e2 = foliate_core::expr::normalize(&e).unwrap();
        assert_eq!(e, e2, "normalize not idempotent on `{}`", s);
    }
}

#[test]
fn differentiate_power_rule() {
    let d = differentiate(&ok("v^a"), &Symbol::new("v")).unwrap();
    assert!(equivalent(&d, &ok("a*v^(a-1)")).unwrap());
}

#[test]
fn differentiate_tanh() {
    let d = differentiate(&ok("tanh(m*(x+c1))"), &Symbol::new("x")).unwrap();
    assert!(equivalent(&d, &ok("m*(1 - tanh(m*(x+c1))^2)")).unwrap());
}

#[test]
fn differentiate_linear_combination() {
    let d = differentiate(&ok("g1*v + g2*v^a"), &Symbol::new("v")).unwrap();
    assert!(equivalent(&d, &ok("g1 + a*g2*v^(a-1)")).unwrap());
}

#[test]
fn substitute_resolves_bindings_through_each_other() {
    let mut b = BTreeMap::new();
    b.insert(Symbol::new("a"), ok("1+q/2"));
    b.insert(Symbol::new("q"), ok("2"));
    let r = substitute(&ok("v^a"), &b).unwrap();
    assert!(equivalent(&r, &ok("v^2")).unwrap());
}

#[test]
fn substitute_empty_is_identity() {
    let r = substitute(&ok("x"), &BTreeMap::new()).unwrap();
    assert_eq!(r, Expr::sym("x"));
}

#[test]
fn substitute_rejects_cycles() {
    let mut b = BTreeMap::new();
    b.insert(Symbol::new("x"), ok("y+1"));
    b.insert(Symbol::new("y"), ok("x+1"));
    match substitute(&ok("x"), &b) {
        Err(Error::CyclicBindings(_)) => {}
        other => panic!("expected cyclic-bindings error, got {:?}", other),
    }
}

#[test]
fn eval_exact_square() {
    let mut a = BTreeMap::new();
    a.insert(Symbol::new("v"), foliate_core::Rational::from_integer(3.into()));
    let v = eval_numeric(&ok("v^2"), &a, 30).unwrap();
    let s = format!("{:?}", v);
    assert!(s.starts_with("9.0") || s.starts_with("9e") || s.contains("9.000"), "{}", s);
}

#[test]
fn eval_fractional_power_of_negative_base_errors() {
    let mut a = BTreeMap::new();
    a.insert(
        Symbol::new("v"),
        foliate_core::Rational::from_integer((-1).into()),
    );
    match eval_numeric(&ok("v^(1/2)"), &a, 30) {
        Err(Error::Domain(_)) => {}
        other => panic!("expected domain error, got {:?}", other),
    }
}

#[test]
fn collect_identity_case() {
    let m = collect_powers(&ok("v"), &Symbol::new("v")).unwrap();
    assert_eq!(m.len(), 1);
    assert!(equivalent(&m[0].0, &Expr::one()).unwrap());
    assert!(equivalent(&m[0].1, &Expr::one()).unwrap());
}

#[test]
fn collect_rejects_symbol_inside_function() {
    match collect_powers(&ok("tanh(v) + v"), &Symbol::new("v")) {
        Err(Error::NotCollectable(msg)) => assert!(msg.contains("v")),
        other => panic!("expected not-collectable, got {:?}", other),
    }
}

#[test]
fn is_zero_detects_rational_function_identities() {
    // needs denominator clearing over (q+2)
    let e = ok("(q+4)*p/(q+2) - 2*p/(q+2) - p");
    assert_eq!(is_zero(&e).unwrap(), ZeroVerdict::IdenticallyZero);
    let nz = ok("(q+4)*p/(q+2) - p");
    assert_eq!(is_zero(&nz).unwrap(), ZeroVerdict::Nonzero);
}

#[test]
fn is_zero_mixed_symbolic_powers() {
    // W^(n-3) = W * W^(n-4) with W a sum
    let e = ok("(x+y)^(n-3) - (x+y)*(x+y)^(n-4)");
    assert_eq!(is_zero(&e).unwrap(), ZeroVerdict::IdenticallyZero);
}
