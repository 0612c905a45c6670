//! Exact differentiation over the function class.

use super::{normalize, Expr, Func, Symbol};
use crate::error::Result;

/// d/ds, treating every other symbol as a constant.
pub fn differentiate(e: &Expr, s: &Symbol) -> Result<Expr> {
    differentiate_with(e, s, &|_| None)
}

/// d/ds with a derivative rule for dependent symbols: `dep(y)` returns
/// dy/ds for symbols that are not constants (jet bookkeeping).
pub fn differentiate_with(
    e: &Expr,
    s: &Symbol,
    dep: &dyn Fn(&Symbol) -> Option<Expr>,
) -> Result<Expr> {
    let raw = d(e, s, dep);
    normalize(&raw)
}

fn d(e: &Expr, s: &Symbol, dep: &dyn Fn(&Symbol) -> Option<Expr>) -> Expr {
    match e {
        Expr::Num(_) => Expr::zero(),
        Expr::Sym(y) => {
            if y == s {
                Expr::one()
            } else {
                dep(y).unwrap_or_else(Expr::zero)
            }
        }
        Expr::Add(terms) => Expr::Add(terms.iter().map(|t| d(t, s, dep)).collect()),
        Expr::Mul(parts) => {
            let mut sum = Vec::with_capacity(parts.len());
            for (i, _p) in parts.iter().enumerate() {
                let mut prod = Vec::with_capacity(parts.len());
                for (j, q) in parts.iter().enumerate() {
                    prod.push(if i == j { d(q, s, dep) } else { q.clone() });
                }
                sum.push(Expr::Mul(prod));
            }
            Expr::Add(sum)
        }
        Expr::Pow(b, x) => {
            let db = d(b, s, dep);
            let dx = d(x, s, dep);
            let mut sum = Vec::new();
            if !db.is_num_zero() {
                // x * b^(x-1) * db
                let xm1 = Expr::Add(vec![(**x).clone(), Expr::num_i64(-1)]);
                sum.push(Expr::Mul(vec![
                    (**x).clone(),
                    Expr::Pow(b.clone(), Box::new(xm1)),
                    db,
                ]));
            }
            if !dx.is_num_zero() {
                // b^x * log(b) * dx
                sum.push(Expr::Mul(vec![
                    e.clone(),
                    Expr::Fun(Func::Log, b.clone()),
                    dx,
                ]));
            }
            match sum.len() {
                0 => Expr::zero(),
                1 => sum.pop().unwrap(),
                _ => Expr::Add(sum),
            }
        }
        Expr::Fun(f, a) => {
            let da = d(a, s, dep);
            if da.is_num_zero() {
                return Expr::zero();
            }
            let fp = fun_derivative(*f, a);
            Expr::Mul(vec![fp, da])
        }
    }
}

fn sq(e: Expr) -> Expr {
    Expr::Pow(Box::new(e), Box::new(Expr::num_i64(2)))
}

fn fun_derivative(f: Func, a: &Expr) -> Expr {
    let a = a.clone();
    match f {
        Func::Exp => Expr::Fun(Func::Exp, Box::new(a)),
        Func::Log => Expr::Pow(Box::new(a), Box::new(Expr::num_i64(-1))),
        Func::Sin => Expr::Fun(Func::Cos, Box::new(a)),
        Func::Cos => Expr::Mul(vec![Expr::num_i64(-1), Expr::Fun(Func::Sin, Box::new(a))]),
        // tan' = 1 + tan^2, cot' = -(1 + cot^2)
        Func::Tan => Expr::Add(vec![Expr::one(), sq(Expr::Fun(Func::Tan, Box::new(a)))]),
        Func::Cot => Expr::Mul(vec![
            Expr::num_i64(-1),
            Expr::Add(vec![Expr::one(), sq(Expr::Fun(Func::Cot, Box::new(a)))]),
        ]),
        Func::Sinh => Expr::Fun(Func::Cosh, Box::new(a)),
        Func::Cosh => Expr::Fun(Func::Sinh, Box::new(a)),
        // tanh' = 1 - tanh^2 (sech^2), coth' = 1 - coth^2 (-csch^2)
        Func::Tanh => Expr::Add(vec![
            Expr::one(),
            Expr::Mul(vec![Expr::num_i64(-1), sq(Expr::Fun(Func::Tanh, Box::new(a)))]),
        ]),
        Func::Coth => Expr::Add(vec![
            Expr::one(),
            Expr::Mul(vec![Expr::num_i64(-1), sq(Expr::Fun(Func::Coth, Box::new(a)))]),
        ]),
        Func::Arctan => Expr::Pow(
            Box::new(Expr::Add(vec![Expr::one(), sq(a)])),
            Box::new(Expr::num_i64(-1)),
        ),
    }
}
