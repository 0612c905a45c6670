//! Restricted computer-algebra core.
//!
//! Expressions are immutable trees over exact rational constants, named
//! symbols, sums, products, powers, and a fixed function class
//! (exp, log, sinh, cosh, tanh, coth, sin, cos, tan, cot, arctan; sqrt is
//! parsed as a half power). All operations are pure; the canonical form is
//! a flat sum of products, each product a rational coefficient times a
//! sorted sequence of power factors.

mod collect;
mod derive;
mod eval;
mod normalize;
mod parse;
mod print;
mod subst;
mod zero;

pub use collect::{collect_powers, collect_powers_rel, AffineExpo, Decision, RelationSet};
pub use derive::{differentiate, differentiate_with};
pub use eval::{bf_to_f64, eval_f64, eval_in, eval_numeric, EvalCtx};
pub use normalize::normalize;
pub(crate) use normalize::{normalize_protected, term_parts, FTerm};
pub use parse::parse;
pub use subst::substitute;
pub use zero::{equivalent, is_zero, rational_combine, ZeroVerdict};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

pub type Rational = BigRational;

/// Interned symbol name. Cheap to clone and order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

/// Fixed function class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Exp,
    Log,
    Sinh,
    Cosh,
    Tanh,
    Coth,
    Sin,
    Cos,
    Tan,
    Cot,
    Arctan,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Coth => "coth",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Cot => "cot",
            Func::Arctan => "arctan",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "exp" => Func::Exp,
            "log" | "ln" => Func::Log,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "coth" => Func::Coth,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "cot" => Func::Cot,
            "arctan" | "atan" => Func::Arctan,
            _ => return None,
        })
    }

    /// Odd functions absorb an argument sign; even functions drop it.
    pub fn parity(self) -> Option<bool> {
        match self {
            Func::Sin | Func::Tan | Func::Cot | Func::Sinh | Func::Tanh | Func::Coth
            | Func::Arctan => Some(true),
            Func::Cos | Func::Cosh => Some(false),
            Func::Exp | Func::Log => None,
        }
    }
}

/// Immutable symbolic expression tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Num(Rational),
    Sym(Symbol),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Fun(Func, Box<Expr>),
}

impl Expr {
    pub fn num_i64(n: i64) -> Expr {
        Expr::Num(Rational::from_integer(n.into()))
    }

    pub fn rat(num: i64, den: i64) -> Expr {
        assert!(den != 0, "rational with zero denominator");
        Expr::Num(Rational::new(num.into(), den.into()))
    }

    pub fn sym(name: &str) -> Expr {
        Expr::Sym(Symbol::new(name))
    }

    pub fn zero() -> Expr {
        Expr::Num(Rational::zero())
    }

    pub fn one() -> Expr {
        Expr::Num(Rational::one())
    }

    pub fn is_num_zero(&self) -> bool {
        matches!(self, Expr::Num(r) if r.is_zero())
    }

    pub fn is_num_one(&self) -> bool {
        matches!(self, Expr::Num(r) if r.is_one())
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Expr::Num(r) => Some(r),
            _ => None,
        }
    }

    /// Structural size (node count); used by growth guards.
    pub fn size(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Sym(_) => 1,
            Expr::Add(v) | Expr::Mul(v) => 1 + v.iter().map(Expr::size).sum::<usize>(),
            Expr::Pow(b, e) => 1 + b.size() + e.size(),
            Expr::Fun(_, a) => 1 + a.size(),
        }
    }

    pub fn contains_symbol(&self, s: &Symbol) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Sym(y) => y == s,
            Expr::Add(v) | Expr::Mul(v) => v.iter().any(|e| e.contains_symbol(s)),
            Expr::Pow(b, e) => b.contains_symbol(s) || e.contains_symbol(s),
            Expr::Fun(_, a) => a.contains_symbol(s),
        }
    }

    pub fn free_symbols(&self) -> std::collections::BTreeSet<Symbol> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut std::collections::BTreeSet<Symbol>) {
        match self {
            Expr::Num(_) => {}
            Expr::Sym(y) => {
                out.insert(y.clone());
            }
            Expr::Add(v) | Expr::Mul(v) => v.iter().for_each(|e| e.collect_symbols(out)),
            Expr::Pow(b, e) => {
                b.collect_symbols(out);
                e.collect_symbols(out);
            }
            Expr::Fun(_, a) => a.collect_symbols(out),
        }
    }

    /// Splits a factor into (base, exponent).
    pub(crate) fn pow_parts(&self) -> (&Expr, Option<&Expr>) {
        match self {
            Expr::Pow(b, e) => (b, Some(e)),
            other => (other, None),
        }
    }
}

fn variant_rank(e: &Expr) -> u8 {
    match e {
        Expr::Num(_) => 0,
        Expr::Sym(_) => 1,
        Expr::Fun(..) => 2,
        Expr::Pow(..) => 3,
        Expr::Add(_) => 4,
        Expr::Mul(_) => 5,
    }
}

/// Total structural order; drives canonical sorting of terms and factors.
pub fn cmp_expr(a: &Expr, b: &Expr) -> Ordering {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => x.cmp(y),
        (Expr::Sym(x), Expr::Sym(y)) => x.cmp(y),
        (Expr::Fun(f, x), Expr::Fun(g, y)) => f.cmp(g).then_with(|| cmp_expr(x, y)),
        (Expr::Pow(b1, e1), Expr::Pow(b2, e2)) => {
            cmp_expr(b1, b2).then_with(|| cmp_expr(e1, e2))
        }
        (Expr::Add(x), Expr::Add(y)) | (Expr::Mul(x), Expr::Mul(y)) => {
            for (u, v) in x.iter().zip(y.iter()) {
                let c = cmp_expr(u, v);
                if c != Ordering::Equal {
                    return c;
                }
            }
            x.len().cmp(&y.len())
        }
        _ => variant_rank(a).cmp(&variant_rank(b)),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::print(self))
    }
}

pub(crate) fn rat_is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

pub(crate) fn rat_floor_i64(r: &Rational) -> Option<i64> {
    use num_traits::ToPrimitive;
    r.floor().to_integer().to_i64()
}

pub(crate) fn rat_abs(r: &Rational) -> Rational {
    r.abs()
}
