//! Fully parenthesized printing of the expression grammar.
//!
//! Output reparses to a normalize-equal expression.

use super::{Expr, Rational};
use num_traits::{One, Signed};

pub fn print(e: &Expr) -> String {
    match e {
        Expr::Add(terms) => {
            let mut s = String::from("(");
            for (i, t) in terms.iter().enumerate() {
                let (neg, body) = signed_term(t);
                if i == 0 {
                    if neg {
                        s.push('-');
                    }
                } else {
                    s.push_str(if neg { " - " } else { " + " });
                }
                s.push_str(&body);
            }
            s.push(')');
            s
        }
        _ => {
            let (neg, body) = signed_term(e);
            if neg {
                format!("(-{})", body)
            } else {
                body
            }
        }
    }
}

fn rat_atom(r: &Rational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders a non-Add term as (negative?, unsigned body).
fn signed_term(e: &Expr) -> (bool, String) {
    match e {
        Expr::Num(r) => {
            let a = r.abs();
            (r.is_negative(), rat_atom(&a))
        }
        Expr::Mul(parts) => {
            let mut neg = false;
            let mut pieces: Vec<String> = Vec::new();
            for p in parts {
                match p {
                    Expr::Num(r) => {
                        if r.is_negative() {
                            neg = !neg;
                        }
                        let a = r.abs();
                        if !a.is_one() {
                            pieces.push(wrap_operand(&Expr::Num(a)));
                        }
                    }
                    other => pieces.push(wrap_operand(other)),
                }
            }
            if pieces.is_empty() {
                pieces.push("1".into());
            }
            (neg, pieces.join("*"))
        }
        Expr::Pow(b, x) => (false, format!("{}^{}", wrap_operand(b), wrap_operand(x))),
        Expr::Fun(f, a) => (false, format!("{}({})", f.name(), print_inner(a))),
        Expr::Sym(s) => (false, s.to_string()),
        Expr::Add(_) => (false, print(e)),
    }
}

/// Argument position: no outer parens needed.
fn print_inner(e: &Expr) -> String {
    match e {
        Expr::Add(_) => {
            let s = print(e);
            s[1..s.len() - 1].to_string()
        }
        _ => print(e),
    }
}

/// Operand inside a product or power: parenthesize anything compound.
fn wrap_operand(e: &Expr) -> String {
    match e {
        Expr::Sym(s) => s.to_string(),
        Expr::Num(r) if r.denom().is_one() && !r.is_negative() => rat_atom(r),
        Expr::Num(r) => format!("({})", rat_atom(r)),
        Expr::Fun(f, a) => format!("{}({})", f.name(), print_inner(a)),
        Expr::Pow(b, x) => format!("({}^{})", wrap_operand(b), wrap_operand(x)),
        _ => print(e),
    }
}
