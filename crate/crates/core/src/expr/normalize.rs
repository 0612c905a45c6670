//! Canonicalization to normal form.
//!
//! Normal form: a flat sum of terms; every term is a rational coefficient
//! times a sorted sequence of power factors. Products of sums and positive
//! integer powers of sums are expanded. Power factors are merged per base.
//! Non-integer rational exponents are split into an integer slot and a
//! fractional slot in (0, 1); fractional powers of products distribute over
//! factors with positive rational content, while a negative content stays
//! glued to the residual radicand (even roots of negative quantities never
//! split a formal -1 loose). Even integer powers of cosh and cos are
//! rewritten through cosh^2 = 1 + sinh^2 and cos^2 = 1 - sin^2.

use super::{cmp_expr, rat_is_integer, Expr, Func, Rational, Symbol};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

const MAX_PASSES: usize = 32;
const MAX_TERMS: usize = 100_000;
const MAX_SUM_POWER: i64 = 64;

#[derive(Debug, Clone, Default)]
pub(crate) struct NormCtx {
    /// Symbols excluded from cross-base radical merging (collection variables).
    pub protected: BTreeSet<Symbol>,
}

pub fn normalize(e: &Expr) -> Result<Expr> {
    norm(e, &NormCtx::default())
}

pub(crate) fn normalize_protected(e: &Expr, protected: &BTreeSet<Symbol>) -> Result<Expr> {
    let ctx = NormCtx {
        protected: protected.clone(),
    };
    norm(e, &ctx)
}

/// A term decomposed as coefficient times sorted power factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct FTerm {
    pub coeff: Rational,
    pub factors: Vec<(Expr, Expr)>,
}

impl FTerm {
    pub fn one() -> Self {
        FTerm {
            coeff: Rational::one(),
            factors: Vec::new(),
        }
    }
}

pub(crate) fn cmp_factors(a: &[(Expr, Expr)], b: &[(Expr, Expr)]) -> Ordering {
    for ((b1, e1), (b2, e2)) in a.iter().zip(b.iter()) {
        let c = cmp_expr(b1, b2).then_with(|| cmp_expr(e1, e2));
        if c != Ordering::Equal {
            return c;
        }
    }
    a.len().cmp(&b.len())
}

/// Decomposes a normalized non-Add expression.
pub(crate) fn term_parts(e: &Expr) -> FTerm {
    match e {
        Expr::Num(r) => FTerm {
            coeff: r.clone(),
            factors: Vec::new(),
        },
        Expr::Mul(parts) => {
            let mut coeff = Rational::one();
            let mut factors = Vec::new();
            for p in parts {
                match p {
                    Expr::Num(r) => coeff *= r,
                    Expr::Pow(b, x) => factors.push(((**b).clone(), (**x).clone())),
                    other => factors.push((other.clone(), Expr::one())),
                }
            }
            FTerm { coeff, factors }
        }
        Expr::Pow(b, x) => FTerm {
            coeff: Rational::one(),
            factors: vec![((**b).clone(), (**x).clone())],
        },
        other => FTerm {
            coeff: Rational::one(),
            factors: vec![(other.clone(), Expr::one())],
        },
    }
}

pub(crate) fn term_build(t: FTerm) -> Expr {
    if t.coeff.is_zero() {
        return Expr::zero();
    }
    let mut parts: Vec<Expr> = Vec::with_capacity(t.factors.len() + 1);
    if !t.coeff.is_one() {
        parts.push(Expr::Num(t.coeff));
    }
    for (b, e) in t.factors {
        if e.is_num_one() {
            parts.push(b);
        } else {
            parts.push(Expr::Pow(Box::new(b), Box::new(e)));
        }
    }
    match parts.len() {
        0 => Expr::one(),
        1 => parts.pop().unwrap(),
        _ => Expr::Mul(parts),
    }
}

pub(crate) fn norm(e: &Expr, ctx: &NormCtx) -> Result<Expr> {
    match e {
        Expr::Num(_) | Expr::Sym(_) => Ok(e.clone()),
        Expr::Add(parts) => {
            let mut normed = Vec::with_capacity(parts.len());
            for p in parts {
                normed.push(norm(p, ctx)?);
            }
            norm_add(normed, ctx)
        }
        Expr::Mul(parts) => {
            let mut normed = Vec::with_capacity(parts.len());
            for p in parts {
                normed.push(norm(p, ctx)?);
            }
            norm_mul(normed, ctx)
        }
        Expr::Pow(b, x) => {
            let b = norm(b, ctx)?;
            let x = norm(x, ctx)?;
            norm_mul(vec![Expr::Pow(Box::new(b), Box::new(x))], ctx)
        }
        Expr::Fun(f, a) => {
            let a = norm(a, ctx)?;
            fun_canon(*f, a, ctx)
        }
    }
}

fn fun_canon(f: Func, arg: Expr, ctx: &NormCtx) -> Result<Expr> {
    if arg.is_num_zero() {
        match f {
            Func::Exp | Func::Cos | Func::Cosh => return Ok(Expr::one()),
            Func::Sin | Func::Sinh | Func::Tan | Func::Tanh | Func::Arctan => {
                return Ok(Expr::zero())
            }
            // log(0), cot(0), coth(0): poles, kept symbolic; evaluation rejects them
            Func::Log | Func::Cot | Func::Coth => {}
        }
    }
    if f == Func::Log && arg.is_num_one() {
        return Ok(Expr::zero());
    }
    // sign extraction for odd/even functions
    if let Some(odd) = f.parity() {
        if let Some(neg) = negated_if_leading_negative(&arg) {
            let inner = Expr::Fun(f, Box::new(norm(&neg, ctx)?));
            return if odd {
                norm_mul(vec![Expr::num_i64(-1), inner], ctx)
            } else {
                Ok(inner)
            };
        }
    }
    Ok(Expr::Fun(f, Box::new(arg)))
}

/// If the canonical leading sign of `e` is negative, returns -e (raw).
fn negated_if_leading_negative(e: &Expr) -> Option<Expr> {
    let lead_coeff = |t: &Expr| -> Rational {
        match t {
            Expr::Num(r) => r.clone(),
            Expr::Mul(parts) => match parts.first() {
                Some(Expr::Num(r)) => r.clone(),
                _ => Rational::one(),
            },
            _ => Rational::one(),
        }
    };
    let negative = match e {
        Expr::Num(r) => r.is_negative(),
        Expr::Mul(_) => lead_coeff(e).is_negative(),
        Expr::Add(terms) => terms.first().map(|t| lead_coeff(t).is_negative()).unwrap_or(false),
        _ => false,
    };
    if !negative {
        return None;
    }
    Some(match e {
        Expr::Num(r) => Expr::Num(-r.clone()),
        Expr::Add(terms) => Expr::Add(
            terms
                .iter()
                .map(|t| Expr::Mul(vec![Expr::num_i64(-1), t.clone()]))
                .collect(),
        ),
        other => Expr::Mul(vec![Expr::num_i64(-1), other.clone()]),
    })
}

pub(crate) fn norm_add(parts: Vec<Expr>, _ctx: &NormCtx) -> Result<Expr> {
    #[derive(PartialEq, Eq)]
    struct Key(Vec<(Expr, Expr)>);
    impl Ord for Key {
        fn cmp(&self, other: &Self) -> Ordering {
            cmp_factors(&self.0, &other.0)
        }
    }
    impl PartialOrd for Key {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }

    let mut acc: BTreeMap<Key, Rational> = BTreeMap::new();
    let mut stack = parts;
    stack.reverse();
    while let Some(p) = stack.pop() {
        match p {
            Expr::Add(inner) => stack.extend(inner.into_iter().rev()),
            other => {
                let t = term_parts(&other);
                if !t.coeff.is_zero() {
                    let entry = acc.entry(Key(t.factors)).or_insert_with(Rational::zero);
                    *entry += t.coeff;
                }
            }
        }
        if acc.len() > MAX_TERMS {
            return Err(Error::SizeLimit("sum expansion"));
        }
    }
    let mut terms: Vec<Expr> = Vec::with_capacity(acc.len());
    for (Key(factors), coeff) in acc {
        if coeff.is_zero() {
            continue;
        }
        terms.push(term_build(FTerm { coeff, factors }));
    }
    Ok(match terms.len() {
        0 => Expr::zero(),
        1 => terms.pop().unwrap(),
        _ => Expr::Add(terms),
    })
}

/// Outcome of one power canonicalization step.
struct PowOut {
    coeff: Rational,
    factors: Vec<(Expr, Expr)>,
    /// Sums to distribute into the enclosing product (each appears once).
    sums: Vec<Expr>,
}

impl PowOut {
    fn unit() -> Self {
        PowOut {
            coeff: Rational::one(),
            factors: Vec::new(),
            sums: Vec::new(),
        }
    }
    fn factor(b: Expr, e: Expr) -> Self {
        let mut o = PowOut::unit();
        o.factors.push((b, e));
        o
    }
}

pub(crate) fn norm_mul(parts: Vec<Expr>, ctx: &NormCtx) -> Result<Expr> {
    let mut coeff = Rational::one();
    // working factor list (not yet merged)
    let mut work: Vec<(Expr, Expr)> = Vec::new();
    let mut sums: Vec<Expr> = Vec::new();

    let mut stack = parts;
    while let Some(p) = stack.pop() {
        match p {
            Expr::Num(r) => {
                if r.is_zero() {
                    return Ok(Expr::zero());
                }
                coeff *= &r;
            }
            Expr::Mul(inner) => stack.extend(inner),
            Expr::Add(_) => sums.push(p),
            Expr::Pow(b, e) => work.push((*b, *e)),
            other => work.push((other, Expr::one())),
        }
    }

    let mut snapshot: Option<(Rational, Vec<(Expr, Expr)>)> = None;
    for _pass in 0..MAX_PASSES {
        // 1. merge exponents per base
        let mut merged: Vec<(Expr, Expr)> = Vec::new();
        {
            let mut order: Vec<Expr> = Vec::new();
            let mut expos: BTreeMap<usize, Vec<Expr>> = BTreeMap::new();
            let mut index: Vec<(Expr, usize)> = Vec::new();
            for (b, e) in work.drain(..) {
                let idx = match index.iter().find(|(bb, _)| *bb == b) {
                    Some((_, i)) => *i,
                    None => {
                        let i = order.len();
                        index.push((b.clone(), i));
                        order.push(b);
                        i
                    }
                };
                expos.entry(idx).or_default().push(e);
            }
            for (i, b) in order.into_iter().enumerate() {
                let es = expos.remove(&i).unwrap();
                let e = if es.len() == 1 {
                    es.into_iter().next().unwrap()
                } else {
                    norm_add(es, ctx)?
                };
                let e = canon_exponent(e, ctx)?;
                if e.is_num_zero() {
                    continue;
                }
                merged.push((b, e));
            }
        }

        // 2. canonicalize each power, 3. split rational exponents
        let mut next: Vec<(Expr, Expr)> = Vec::new();
        for (b, e) in merged {
            let out = pow_canon(b, e, ctx)?;
            if out.coeff.is_zero() {
                return Ok(Expr::zero());
            }
            coeff *= out.coeff;
            sums.extend(out.sums);
            for (fb, fe) in out.factors {
                split_slots(fb, fe, &mut next);
            }
        }

        // 4. cosh/cos even power reduction
        let mut reduced: Vec<(Expr, Expr)> = Vec::new();
        for (b, e) in next.drain(..) {
            match (&b, e.as_rational()) {
                (Expr::Fun(f @ (Func::Cosh | Func::Cos), arg), Some(r))
                    if rat_is_integer(r) && !r.abs().is_one() =>
                {
                    let m = r.to_integer();
                    let two = BigInt::from(2);
                    let j: BigInt = num_integer::Integer::div_floor(&m, &two);
                    let rho = m - &j * &two; // 0 or 1
                    let sq = match f {
                        Func::Cosh => Expr::Add(vec![
                            Expr::one(),
                            Expr::Pow(
                                Box::new(Expr::Fun(Func::Sinh, arg.clone())),
                                Box::new(Expr::num_i64(2)),
                            ),
                        ]),
                        _ => Expr::Add(vec![
                            Expr::one(),
                            Expr::Mul(vec![
                                Expr::num_i64(-1),
                                Expr::Pow(
                                    Box::new(Expr::Fun(Func::Sin, arg.clone())),
                                    Box::new(Expr::num_i64(2)),
                                ),
                            ]),
                        ]),
                    };
                    let sq = norm(&sq, ctx)?;
                    if !j.is_zero() {
                        let je = Expr::Num(Rational::from_integer(j));
                        if je.as_rational().map(|r| r.is_positive()).unwrap_or(false)
                            && je.as_rational().unwrap().to_integer().to_i64().unwrap_or(i64::MAX)
                                <= MAX_SUM_POWER
                        {
                            let n = je.as_rational().unwrap().to_integer().to_i64().unwrap();
                            for _ in 0..n {
                                sums.push(sq.clone());
                            }
                        } else {
                            reduced.push((sq.clone(), je));
                        }
                    }
                    if !rho.is_zero() {
                        reduced.push((b.clone(), Expr::one()));
                    }
                }
                _ => reduced.push((b, e)),
            }
        }

        // 5. radical merging: negative-content radicals absorb same-exponent
        //    radical cofactors (protected bases excluded)
        merge_radicals(&mut reduced, ctx)?;

        work = reduced;
        if !sums.is_empty() {
            break; // distribute below; distribution re-enters norm_mul
        }
        let mut snap_factors = work.clone();
        snap_factors.sort_by(|(b1, e1), (b2, e2)| cmp_expr(b1, b2).then_with(|| cmp_expr(e1, e2)));
        let snap = (coeff.clone(), snap_factors);
        if snapshot.as_ref() == Some(&snap) {
            break;
        }
        snapshot = Some(snap);
    }

    if !sums.is_empty() {
        // distribute sums over the accumulated product
        let base = term_build(FTerm {
            coeff: coeff.clone(),
            factors: work.clone(),
        });
        let mut products: Vec<Expr> = vec![base];
        for s in sums {
            let terms: Vec<Expr> = match s {
                Expr::Add(ts) => ts,
                other => vec![other],
            };
            let mut nxt: Vec<Expr> = Vec::new();
            for acc in &products {
                for t in &terms {
                    nxt.push(norm_mul(vec![acc.clone(), t.clone()], ctx)?);
                    if nxt.len() > MAX_TERMS {
                        return Err(Error::SizeLimit("product expansion"));
                    }
                }
            }
            products = nxt;
        }
        return norm_add(products, ctx);
    }

    work.sort_by(|(b1, e1), (b2, e2)| cmp_expr(b1, b2).then_with(|| cmp_expr(e1, e2)));
    Ok(term_build(FTerm {
        coeff,
        factors: work,
    }))
}

/// Rational-function cleanup of exponent expressions so that spellings such
/// as `(n-3)/(n-2) - 1` and `-1/(n-2)` coincide.
fn canon_exponent(e: Expr, ctx: &NormCtx) -> Result<Expr> {
    let has_neg_pow = |x: &Expr| -> bool {
        let check_term = |t: &Expr| {
            term_parts(t).factors.iter().any(|(_, fe)| {
                fe.as_rational().map(|r| r.is_negative()).unwrap_or(false)
            })
        };
        match x {
            Expr::Add(ts) => ts.iter().any(check_term),
            other => check_term(other),
        }
    };
    if matches!(e, Expr::Add(_)) && has_neg_pow(&e) {
        super::zero::rational_combine_ctx(&e, ctx)
    } else {
        Ok(e)
    }
}

fn split_slots(base: Expr, expo: Expr, out: &mut Vec<(Expr, Expr)>) {
    if let Some(r) = expo.as_rational() {
        if !rat_is_integer(r) {
            let fl = r.floor();
            let frac = r - &fl;
            if !fl.is_zero() {
                out.push((base.clone(), Expr::Num(fl)));
            }
            out.push((base, Expr::Num(frac)));
            return;
        }
    }
    out.push((base, expo));
}

fn content_sign_of(e: &Expr) -> i8 {
    match e {
        Expr::Num(r) => {
            if r.is_negative() {
                -1
            } else {
                1
            }
        }
        Expr::Mul(parts) => match parts.first() {
            Some(Expr::Num(r)) if r.is_negative() => -1,
            _ => 1,
        },
        _ => 1,
    }
}

fn merge_radicals(factors: &mut Vec<(Expr, Expr)>, ctx: &NormCtx) -> Result<bool> {
    // group indices by fractional rational exponent in (0,1)
    let mut groups: BTreeMap<Rational, Vec<usize>> = BTreeMap::new();
    for (i, (b, e)) in factors.iter().enumerate() {
        if let Some(r) = e.as_rational() {
            if !rat_is_integer(r) && r.is_positive() && r < &Rational::one() {
                if ctx.protected.iter().any(|s| b.contains_symbol(s)) {
                    continue;
                }
                groups.entry(r.clone()).or_default().push(i);
            }
        }
    }
    let mut to_merge: Vec<(Rational, Vec<usize>)> = Vec::new();
    for (r, idxs) in groups {
        if idxs.len() < 2 {
            continue;
        }
        let any_negative = idxs
            .iter()
            .any(|&i| content_sign_of(&factors[i].0) < 0);
        if any_negative {
            to_merge.push((r, idxs));
        }
    }
    if to_merge.is_empty() {
        return Ok(false);
    }
    let mut remove: BTreeSet<usize> = BTreeSet::new();
    let mut added: Vec<(Expr, Expr)> = Vec::new();
    for (r, idxs) in to_merge {
        let bases: Vec<Expr> = idxs.iter().map(|&i| factors[i].0.clone()).collect();
        remove.extend(idxs);
        let merged_base = norm_mul(bases, ctx)?;
        added.push((merged_base, Expr::Num(r)));
    }
    let mut kept: Vec<(Expr, Expr)> = Vec::new();
    for (i, fe) in factors.drain(..).enumerate() {
        if !remove.contains(&i) {
            kept.push(fe);
        }
    }
    kept.extend(added);
    *factors = kept;
    Ok(true)
}

/// Canonicalizes base^expo into coefficient, atomic factors and sums.
fn pow_canon(base: Expr, expo: Expr, ctx: &NormCtx) -> Result<PowOut> {
    if expo.is_num_zero() {
        return Ok(PowOut::unit());
    }
    match base {
        Expr::Num(c) => pow_num(c, expo),
        Expr::Pow(b2, e2) => {
            let e = norm_mul(vec![(*e2).clone(), expo], ctx)?;
            pow_canon(*b2, e, ctx)
        }
        Expr::Fun(Func::Exp, arg) => {
            if expo.is_num_one() {
                Ok(PowOut::factor(Expr::Fun(Func::Exp, arg), expo))
            } else {
                let a = norm_mul(vec![(*arg).clone(), expo], ctx)?;
                if a.is_num_zero() {
                    Ok(PowOut::unit())
                } else {
                    Ok(PowOut::factor(Expr::Fun(Func::Exp, Box::new(a)), Expr::one()))
                }
            }
        }
        Expr::Mul(parts) => pow_mul(parts, expo, ctx),
        Expr::Add(terms) => pow_add(terms, expo, ctx),
        atom => Ok(PowOut::factor(atom, expo)),
    }
}

fn pow_num(c: Rational, expo: Expr) -> Result<PowOut> {
    let mut out = PowOut::unit();
    if c.is_zero() {
        return match expo.as_rational() {
            Some(r) if r.is_positive() => {
                out.coeff = Rational::zero();
                Ok(out)
            }
            Some(_) => Err(Error::ZeroDenominator),
            None => Ok(PowOut::factor(Expr::Num(c), expo)),
        };
    }
    if c.is_one() {
        return Ok(out);
    }
    match expo.as_rational() {
        Some(r) if rat_is_integer(r) => {
            let m = r
                .to_integer()
                .to_i64()
                .ok_or(Error::SizeLimit("integer power"))?;
            if m.abs() > 4096 {
                return Err(Error::SizeLimit("integer power"));
            }
            out.coeff = rat_pow_i64(&c, m);
            Ok(out)
        }
        Some(r) => {
            // rational root: per-prime extraction
            let s = r
                .numer()
                .to_i64()
                .ok_or(Error::SizeLimit("root exponent"))?;
            let t = r
                .denom()
                .to_i64()
                .ok_or(Error::SizeLimit("root exponent"))?;
            if s.abs() > 64 {
                return Err(Error::SizeLimit("root exponent"));
            }
            let x = rat_pow_i64(&c, s);
            let negative = x.is_negative();
            let ax = x.abs();
            let (mut dout, rem) = extract_root(&ax, t);
            if negative {
                if t % 2 == 1 {
                    dout = -dout;
                    out.coeff = dout;
                    push_prime_radicals(&rem, t, &mut out.factors);
                } else {
                    out.coeff = dout;
                    // keep the signed residual glued under the even root
                    out.factors
                        .push((Expr::Num(-rem), Expr::Num(Rational::new(1.into(), t.into()))));
                }
            } else {
                out.coeff = dout;
                push_prime_radicals(&rem, t, &mut out.factors);
            }
            Ok(out)
        }
        None => {
            // symbolic exponent: split into signed unit and prime parts
            if c.is_negative() {
                let e = reduce_mod2(&expo);
                if !e.is_num_zero() {
                    out.factors.push((Expr::Num(-Rational::one()), e));
                }
                let a = c.abs();
                if !a.is_one() {
                    push_symbolic_prime_powers(&a, &expo, &mut out.factors)?;
                }
            } else {
                push_symbolic_prime_powers(&c, &expo, &mut out.factors)?;
            }
            Ok(out)
        }
    }
}

/// (-1)^e with the rational constant of e reduced modulo 2.
fn reduce_mod2(e: &Expr) -> Expr {
    let two = Rational::from_integer(2.into());
    match e {
        Expr::Num(r) => {
            let m = r - (r / &two).floor() * &two;
            Expr::Num(m)
        }
        Expr::Add(terms) => {
            let mut out = Vec::new();
            for t in terms {
                match t {
                    Expr::Num(r) => {
                        let m = r - (r / &two).floor() * &two;
                        if !m.is_zero() {
                            out.push(Expr::Num(m));
                        }
                    }
                    other => out.push(other.clone()),
                }
            }
            match out.len() {
                0 => Expr::zero(),
                1 => out.pop().unwrap(),
                _ => Expr::Add(out),
            }
        }
        other => other.clone(),
    }
}

fn rat_pow_i64(c: &Rational, m: i64) -> Rational {
    if m == 0 {
        return Rational::one();
    }
    let mut acc = Rational::one();
    let base = if m > 0 { c.clone() } else { c.recip() };
    for _ in 0..m.abs() {
        acc *= &base;
    }
    acc
}

/// Extracts the maximal d with d^t dividing x (x > 0): returns (d, x / d^t).
fn extract_root(x: &Rational, t: i64) -> (Rational, Rational) {
    let (dn, rn) = extract_root_int(x.numer(), t);
    let (dd, rd) = extract_root_int(x.denom(), t);
    (
        Rational::new(dn, dd),
        Rational::new(rn, rd),
    )
}

fn extract_root_int(x: &BigInt, t: i64) -> (BigInt, BigInt) {
    let mut d = BigInt::one();
    let mut r = BigInt::one();
    for (p, m) in trial_factor(x) {
        let q = m / t;
        let rem = m % t;
        for _ in 0..q {
            d *= &p;
        }
        for _ in 0..rem {
            r *= &p;
        }
    }
    (d, r)
}

/// Trial-division factorization; a residual above the bound is kept whole.
fn trial_factor(x: &BigInt) -> Vec<(BigInt, i64)> {
    let mut out = Vec::new();
    let mut n = x.clone();
    if n.is_negative() {
        n = -n;
    }
    if n.is_zero() || n.is_one() {
        return out;
    }
    let mut p = BigInt::from(2);
    let bound = BigInt::from(1_000_000i64);
    while &p * &p <= n && p <= bound {
        let mut m = 0i64;
        while (&n % &p).is_zero() {
            n /= &p;
            m += 1;
        }
        if m > 0 {
            out.push((p.clone(), m));
        }
        p += 1;
    }
    if !n.is_one() {
        out.push((n, 1));
    }
    out
}

fn push_prime_radicals(rem: &Rational, t: i64, factors: &mut Vec<(Expr, Expr)>) {
    if rem.is_one() {
        return;
    }
    for (p, m) in trial_factor(rem.numer()) {
        factors.push((
            Expr::Num(Rational::from_integer(p)),
            Expr::Num(Rational::new(m.into(), t.into())),
        ));
    }
    for (p, m) in trial_factor(rem.denom()) {
        factors.push((
            Expr::Num(Rational::from_integer(p)),
            Expr::Num(Rational::new((-m).into(), t.into())),
        ));
    }
}

fn push_symbolic_prime_powers(
    c: &Rational,
    expo: &Expr,
    factors: &mut Vec<(Expr, Expr)>,
) -> Result<()> {
    let ctx = NormCtx::default();
    for (p, m) in trial_factor(c.numer()) {
        let e = norm_mul(vec![Expr::num_i64(m), expo.clone()], &ctx)?;
        factors.push((Expr::Num(Rational::from_integer(p)), e));
    }
    for (p, m) in trial_factor(c.denom()) {
        let e = norm_mul(vec![Expr::num_i64(-m), expo.clone()], &ctx)?;
        factors.push((Expr::Num(Rational::from_integer(p)), e));
    }
    Ok(())
}

fn pow_mul(parts: Vec<Expr>, expo: Expr, ctx: &NormCtx) -> Result<PowOut> {
    let mut coeff = Rational::one();
    let mut inner: Vec<(Expr, Expr)> = Vec::new();
    for p in parts {
        match p {
            Expr::Num(r) => coeff *= &r,
            Expr::Pow(b, e) => inner.push((*b, *e)),
            other => inner.push((other, Expr::one())),
        }
    }
    let negative = coeff.is_negative();
    let (s_opt, t_opt) = match expo.as_rational() {
        Some(r) => (
            r.numer().to_i64(),
            r.denom().to_i64(),
        ),
        None => (None, None),
    };
    let even_root = matches!((s_opt, t_opt), (Some(_), Some(t)) if t % 2 == 0);

    if negative && even_root {
        // glued extraction: pull t-th powers out, keep the signed residue
        let s = s_opt.unwrap();
        let t = t_opt.unwrap();
        if s.abs() > 64 {
            return Err(Error::SizeLimit("root exponent"));
        }
        let mut out = PowOut::unit();
        let x = rat_pow_i64(&coeff, s); // negative (s odd since gcd(s,t)=1, t even)
        let ax = x.abs();
        let (d, rem_c) = extract_root(&ax, t);
        out.coeff = d;
        let mut residue: Vec<(Expr, Expr)> = Vec::new();
        let te = Rational::from_integer(t.into());
        for (b, e) in inner {
            // total exponent of this factor inside the root
            let tot = norm_mul(vec![e, Expr::num_i64(s)], ctx)?;
            match tot.as_rational() {
                Some(r) => {
                    let q = (r / &te).floor();
                    let rem = r - &q * &te;
                    if !q.is_zero() {
                        out.factors.push((b.clone(), Expr::Num(q)));
                    }
                    if !rem.is_zero() {
                        residue.push((b, Expr::Num(rem)));
                    }
                }
                None => {
                    residue.push((b, tot));
                }
            }
        }
        residue.sort_by(|(b1, e1), (b2, e2)| cmp_expr(b1, b2).then_with(|| cmp_expr(e1, e2)));
        let residue_base = term_build(FTerm {
            coeff: -rem_c,
            factors: residue,
        });
        out.factors.push((
            residue_base,
            Expr::Num(Rational::new(1.into(), t.into())),
        ));
        return Ok(out);
    }

    if negative && s_opt.is_none() {
        // negative content under a symbolic exponent: keep whole
        let rebuilt = term_build(FTerm {
            coeff,
            factors: inner,
        });
        return Ok(PowOut::factor(rebuilt, expo));
    }

    // positive content (or odd root of negative): distribute fully
    let mut out = PowOut::unit();
    let cpow = pow_num(coeff, expo.clone())?;
    out.coeff = cpow.coeff;
    out.factors.extend(cpow.factors);
    out.sums.extend(cpow.sums);
    for (b, e) in inner {
        let te = norm_mul(vec![e, expo.clone()], ctx)?;
        let sub = pow_canon(b, te, ctx)?;
        out.coeff *= sub.coeff;
        out.factors.extend(sub.factors);
        out.sums.extend(sub.sums);
    }
    Ok(out)
}

fn pow_add(terms: Vec<Expr>, expo: Expr, ctx: &NormCtx) -> Result<PowOut> {
    // content and sign extraction: gcd of coefficients, leading term positive
    let mut content: Option<Rational> = None;
    for t in &terms {
        let c = term_parts(t).coeff;
        content = Some(match content {
            None => c.abs(),
            Some(g) => rat_gcd(&g, &c.abs()),
        });
    }
    let mut content = content.unwrap_or_else(Rational::one);
    if content.is_zero() {
        content = Rational::one();
    }
    let lead_negative = terms
        .first()
        .map(|t| term_parts(t).coeff.is_negative())
        .unwrap_or(false);
    if lead_negative {
        content = -content;
    }
    let stripped: Vec<Expr> = if content.is_one() {
        terms
    } else {
        let inv = Expr::Num(content.recip());
        let mut v = Vec::with_capacity(terms.len());
        for t in terms {
            v.push(norm_mul(vec![inv.clone(), t], ctx)?);
        }
        v
    };
    let base = match stripped.len() {
        0 => Expr::zero(),
        1 => stripped.into_iter().next().unwrap(),
        _ => Expr::Add(stripped),
    };

    let mut out = PowOut::unit();
    let cpow = pow_num(content, expo.clone())?;
    out.coeff = cpow.coeff;
    out.factors.extend(cpow.factors);

    if let Some(r) = expo.as_rational() {
        if rat_is_integer(r) && r.is_positive() {
            let m = r.to_integer().to_i64().unwrap_or(i64::MAX);
            if m <= MAX_SUM_POWER {
                for _ in 0..m {
                    out.sums.push(base.clone());
                }
                return Ok(out);
            }
        }
    }
    match &base {
        Expr::Add(_) => out.factors.push((base, expo)),
        _ => {
            // content stripping collapsed the sum to a single term
            let sub = pow_canon(base, expo, ctx)?;
            out.coeff *= sub.coeff;
            out.factors.extend(sub.factors);
            out.sums.extend(sub.sums);
        }
    }
    Ok(out)
}

fn rat_gcd(a: &Rational, b: &Rational) -> Rational {
    use num_integer::Integer;
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    let num = a.numer().gcd(b.numer());
    let den = a.denom().lcm(b.denom());
    Rational::new(num, den)
}
