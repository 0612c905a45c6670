//! Numeric evaluation: arbitrary-precision (decimal-digit controlled) and
//! a fast f64 path for grid sweeps.
//!
//! Domain violations (log of a non-positive value, tan/cot/coth at a pole,
//! fractional power of a negative base, zero to a negative power) are
//! reported as errors, never silently propagated as NaN.

use super::{rat_is_integer, Expr, Func, Rational, Symbol};
use crate::error::{Error, Result};
use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_traits::{Signed, ToPrimitive, Zero};
use std::cell::RefCell;
use std::collections::BTreeMap;

const RM: RoundingMode = RoundingMode::ToEven;

pub struct EvalCtx {
    pub digits: usize,
    prec: usize,
    consts: RefCell<Consts>,
}

impl EvalCtx {
    pub fn new(digits: usize) -> Self {
        let digits = digits.max(10);
        let prec = (digits as f64 * 3.3220).ceil() as usize + 64;
        EvalCtx {
            digits,
            prec,
            consts: RefCell::new(Consts::new().expect("constants cache")),
        }
    }

    pub fn rational(&self, r: &Rational) -> BigFloat {
        let num = bigint_to_bf(r.numer(), self.prec);
        if rat_is_integer(r) {
            return num;
        }
        let den = bigint_to_bf(r.denom(), self.prec);
        num.div(&den, self.prec, RM)
    }

    pub fn from_f64(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.prec)
    }

    pub fn to_string(&self, v: &BigFloat) -> String {
        v.format(Radix::Dec, RM, &mut self.consts.borrow_mut())
            .unwrap_or_else(|_| "<format error>".into())
    }
}

fn bigint_to_bf(n: &num_bigint::BigInt, prec: usize) -> BigFloat {
    if let Some(i) = n.to_i64() {
        return BigFloat::from_i64(i, prec);
    }
    // decimal digits, widest path
    let s = n.to_string();
    let mut cc = Consts::new().expect("constants cache");
    BigFloat::parse(&s, Radix::Dec, prec, RM, &mut cc)
}

/// 10^k at the given working precision.
pub(crate) fn pow10(k: i64, digits: usize) -> BigFloat {
    let prec = (digits as f64 * 3.3220).ceil() as usize + 64;
    let ten = BigFloat::from_i64(10, prec);
    let mut acc = BigFloat::from_i64(1, prec);
    for _ in 0..k.abs() {
        acc = acc.mul(&ten, prec, RM);
    }
    if k < 0 {
        BigFloat::from_i64(1, prec).div(&acc, prec, RM)
    } else {
        acc
    }
}

pub(crate) fn bf_gt(a: &BigFloat, b: &BigFloat) -> bool {
    matches!(a.cmp(b), Some(c) if c > 0)
}

/// Evaluates with exact rational inputs at the requested working precision.
pub fn eval_numeric(
    e: &Expr,
    assign: &BTreeMap<Symbol, Rational>,
    digits: usize,
) -> Result<BigFloat> {
    let ctx = EvalCtx::new(digits);
    eval_in(e, assign, &ctx)
}

pub fn eval_in(e: &Expr, assign: &BTreeMap<Symbol, Rational>, ctx: &EvalCtx) -> Result<BigFloat> {
    let v = go(e, assign, ctx)?;
    if v.is_nan() || v.is_inf() {
        return Err(Error::Numeric(format!(
            "evaluation produced a non-finite value for `{}`",
            e
        )));
    }
    Ok(v)
}

/// Best-effort exact rational evaluation (used for exponents so that signs
/// of negative bases are resolved exactly).
fn eval_exact(e: &Expr, assign: &BTreeMap<Symbol, Rational>) -> Option<Rational> {
    match e {
        Expr::Num(r) => Some(r.clone()),
        Expr::Sym(s) => assign.get(s).cloned(),
        Expr::Add(v) => {
            let mut acc = Rational::zero();
            for t in v {
                acc += eval_exact(t, assign)?;
            }
            Some(acc)
        }
        Expr::Mul(v) => {
            let mut acc = Rational::from_integer(1.into());
            for t in v {
                acc *= eval_exact(t, assign)?;
            }
            Some(acc)
        }
        Expr::Pow(b, x) => {
            let xb = eval_exact(x, assign)?;
            if !rat_is_integer(&xb) {
                return None;
            }
            let m = xb.to_integer().to_i64()?;
            if m.abs() > 256 {
                return None;
            }
            let bv = eval_exact(b, assign)?;
            if bv.is_zero() && m < 0 {
                return None;
            }
            let mut acc = Rational::from_integer(1.into());
            let base = if m >= 0 { bv.clone() } else { bv.recip() };
            for _ in 0..m.abs() {
                acc *= &base;
            }
            Some(acc)
        }
        Expr::Fun(..) => None,
    }
}

fn go(e: &Expr, assign: &BTreeMap<Symbol, Rational>, ctx: &EvalCtx) -> Result<BigFloat> {
    let p = ctx.prec;
    match e {
        Expr::Num(r) => Ok(ctx.rational(r)),
        Expr::Sym(s) => assign
            .get(s)
            .map(|r| ctx.rational(r))
            .ok_or_else(|| Error::UnboundSymbol(s.to_string())),
        Expr::Add(v) => {
            let mut acc = BigFloat::from_i64(0, p);
            for t in v {
                let tv = go(t, assign, ctx)?;
                acc = acc.add(&tv, p, RM);
            }
            Ok(acc)
        }
        Expr::Mul(v) => {
            let mut acc = BigFloat::from_i64(1, p);
            for t in v {
                let tv = go(t, assign, ctx)?;
                acc = acc.mul(&tv, p, RM);
            }
            Ok(acc)
        }
        Expr::Pow(b, x) => {
            let bv = go(b, assign, ctx)?;
            if let Some(r) = eval_exact(x, assign) {
                return pow_rational(&bv, &r, ctx);
            }
            let xv = go(x, assign, ctx)?;
            if bv.is_zero() {
                if bf_gt(&xv, &BigFloat::from_i64(0, p)) {
                    return Ok(BigFloat::from_i64(0, p));
                }
                return Err(Error::ZeroDenominator);
            }
            if bv.is_negative() {
                return Err(Error::Domain(format!(
                    "fractional power of negative base in `{}`",
                    e
                )));
            }
            let mut cc = ctx.consts.borrow_mut();
            Ok(bv.pow(&xv, p, RM, &mut cc))
        }
        Expr::Fun(f, a) => {
            let av = go(a, assign, ctx)?;
            fun_value(*f, &av, ctx, e)
        }
    }
}

fn pow_rational(bv: &BigFloat, r: &Rational, ctx: &EvalCtx) -> Result<BigFloat> {
    let p = ctx.prec;
    if r.is_zero() {
        return Ok(BigFloat::from_i64(1, p));
    }
    if bv.is_zero() {
        if r.is_positive() {
            return Ok(BigFloat::from_i64(0, p));
        }
        return Err(Error::ZeroDenominator);
    }
    let neg_base = bv.is_negative();
    let abs = bv.abs();
    let s = r
        .numer()
        .to_i64()
        .ok_or_else(|| Error::Numeric("exponent numerator too large".into()))?;
    let t = r
        .denom()
        .to_i64()
        .ok_or_else(|| Error::Numeric("exponent denominator too large".into()))?;
    if neg_base && t % 2 == 0 {
        return Err(Error::Domain(
            "fractional power of negative base".to_string(),
        ));
    }
    let value = if t == 1 {
        powi(&abs, s, p)
    } else {
        let mut cc = ctx.consts.borrow_mut();
        let ebf = BigFloat::from_i64(s, p).div(&BigFloat::from_i64(t, p), p, RM);
        abs.pow(&ebf, p, RM, &mut cc)
    };
    // sign: negative base contributes (-1)^s (t odd here)
    if neg_base && s % 2 != 0 {
        Ok(value.neg())
    } else {
        Ok(value)
    }
}

fn powi(b: &BigFloat, mut m: i64, p: usize) -> BigFloat {
    let invert = m < 0;
    m = m.abs();
    let mut acc = BigFloat::from_i64(1, p);
    let mut base = b.clone();
    while m > 0 {
        if m & 1 == 1 {
            acc = acc.mul(&base, p, RM);
        }
        base = base.mul(&base, p, RM);
        m >>= 1;
    }
    if invert {
        BigFloat::from_i64(1, p).div(&acc, p, RM)
    } else {
        acc
    }
}

fn fun_value(f: Func, a: &BigFloat, ctx: &EvalCtx, whole: &Expr) -> Result<BigFloat> {
    let p = ctx.prec;
    let mut cc = ctx.consts.borrow_mut();
    let pole_tol = {
        let digits = ctx.digits as i64;
        pow10(-digits, ctx.digits)
    };
    let near_zero = |v: &BigFloat| !bf_gt(&v.abs(), &pole_tol);
    Ok(match f {
        Func::Exp => a.exp(p, RM, &mut cc),
        Func::Log => {
            if a.is_zero() || a.is_negative() {
                return Err(Error::Domain(format!(
                    "log of non-positive value in `{}`",
                    whole
                )));
            }
            a.ln(p, RM, &mut cc)
        }
        Func::Sin => a.sin(p, RM, &mut cc),
        Func::Cos => a.cos(p, RM, &mut cc),
        Func::Tan => {
            let c = a.cos(p, RM, &mut cc);
            if near_zero(&c) {
                return Err(Error::Domain(format!("tan at a pole in `{}`", whole)));
            }
            a.sin(p, RM, &mut cc).div(&c, p, RM)
        }
        Func::Cot => {
            let s = a.sin(p, RM, &mut cc);
            if near_zero(&s) {
                return Err(Error::Domain(format!("cot at a pole in `{}`", whole)));
            }
            a.cos(p, RM, &mut cc).div(&s, p, RM)
        }
        Func::Sinh => a.sinh(p, RM, &mut cc),
        Func::Cosh => a.cosh(p, RM, &mut cc),
        Func::Tanh => a.tanh(p, RM, &mut cc),
        Func::Coth => {
            let s = a.sinh(p, RM, &mut cc);
            if near_zero(&s) {
                return Err(Error::Domain(format!("coth at a pole in `{}`", whole)));
            }
            a.cosh(p, RM, &mut cc).div(&s, p, RM)
        }
        Func::Arctan => a.atan(p, RM, &mut cc),
    })
}

/// Rounds an arbitrary-precision value to f64 through the decimal formatter.
pub fn bf_to_f64(v: &BigFloat) -> f64 {
    let mut cc = Consts::new().expect("constants cache");
    match v.format(Radix::Dec, RM, &mut cc) {
        Ok(s) => s.parse::<f64>().unwrap_or(f64::NAN),
        Err(_) => f64::NAN,
    }
}

/// Plain f64 evaluation with the same domain rules.
pub fn eval_f64(e: &Expr, assign: &BTreeMap<Symbol, f64>) -> Result<f64> {
    let v = go64(e, assign)?;
    if !v.is_finite() {
        return Err(Error::Numeric("non-finite f64 value".into()));
    }
    Ok(v)
}

fn go64(e: &Expr, assign: &BTreeMap<Symbol, f64>) -> Result<f64> {
    Ok(match e {
        Expr::Num(r) => r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN),
        Expr::Sym(s) => *assign
            .get(s)
            .ok_or_else(|| Error::UnboundSymbol(s.to_string()))?,
        Expr::Add(v) => {
            let mut acc = 0.0;
            for t in v {
                acc += go64(t, assign)?;
            }
            acc
        }
        Expr::Mul(v) => {
            let mut acc = 1.0;
            for t in v {
                acc *= go64(t, assign)?;
            }
            acc
        }
        Expr::Pow(b, x) => {
            let bv = go64(b, assign)?;
            if let Expr::Num(r) = &**x {
                if rat_is_integer(r) {
                    let m = r.to_integer().to_i64().unwrap_or(0) as i32;
                    if bv == 0.0 && m < 0 {
                        return Err(Error::ZeroDenominator);
                    }
                    return Ok(bv.powi(m));
                }
                let s = r.numer().to_i64().unwrap_or(1);
                let t = r.denom().to_i64().unwrap_or(1);
                if bv < 0.0 {
                    if t % 2 == 0 {
                        return Err(Error::Domain(
                            "fractional power of negative base".into(),
                        ));
                    }
                    let m = (-bv).powf(s as f64 / t as f64);
                    return Ok(if s % 2 == 0 { m } else { -m });
                }
                if bv == 0.0 && *r < Rational::zero() {
                    return Err(Error::ZeroDenominator);
                }
                return Ok(bv.powf(s as f64 / t as f64));
            }
            let xv = go64(x, assign)?;
            if bv < 0.0 {
                return Err(Error::Domain(
                    "fractional power of negative base".into(),
                ));
            }
            if bv == 0.0 && xv <= 0.0 {
                return Err(Error::ZeroDenominator);
            }
            bv.powf(xv)
        }
        Expr::Fun(f, a) => {
            let av = go64(a, assign)?;
            match f {
                Func::Exp => av.exp(),
                Func::Log => {
                    if av <= 0.0 {
                        return Err(Error::Domain("log of non-positive value".into()));
                    }
                    av.ln()
                }
                Func::Sin => av.sin(),
                Func::Cos => av.cos(),
                Func::Tan => {
                    if av.cos().abs() < 1e-12 {
                        return Err(Error::Domain("tan at a pole".into()));
                    }
                    av.tan()
                }
                Func::Cot => {
                    if av.sin().abs() < 1e-12 {
                        return Err(Error::Domain("cot at a pole".into()));
                    }
                    av.cos() / av.sin()
                }
                Func::Sinh => av.sinh(),
                Func::Cosh => av.cosh(),
                Func::Tanh => av.tanh(),
                Func::Coth => {
                    if av.sinh().abs() < 1e-12 {
                        return Err(Error::Domain("coth at a pole".into()));
                    }
                    av.cosh() / av.sinh()
                }
                Func::Arctan => av.atan(),
            }
        }
    })
}
