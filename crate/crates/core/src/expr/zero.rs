//! Symbolic zero-testing.
//!
//! Normalization alone leaves rational-function and mixed-power structure
//! uncancelled, so the zero test clears denominators: for every factor base
//! appearing with a negative or symbolically-shifted exponent, the whole
//! expression is multiplied by the base raised to minus the smallest
//! exponent of its group, then re-expanded. When a nonzero form survives,
//! nonzeroness is confirmed by evaluation at random rational points before
//! the verdict is reported; an all-zero sample leaves the test undecided
//! rather than guessing.

use super::eval::eval_numeric;
use super::normalize::{norm, norm_add, term_build, term_parts, FTerm, NormCtx};
use super::{cmp_expr, normalize, Expr, Rational, Symbol};
use crate::error::{Error, Result};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroVerdict {
    IdenticallyZero,
    Nonzero,
    Undecided,
}

const CLEAR_ROUNDS: usize = 8;
const SAMPLE_POINTS: usize = 20;
const SAMPLE_ATTEMPTS: usize = 600;

pub fn is_zero(e: &Expr) -> Result<ZeroVerdict> {
    let n = normalize(e)?;
    if n.is_num_zero() {
        return Ok(ZeroVerdict::IdenticallyZero);
    }
    let cleared = clear_denominators(&n)?;
    if cleared.is_num_zero() {
        return Ok(ZeroVerdict::IdenticallyZero);
    }
    // Sampling backstop: confirm nonzeroness before reporting it.
    match sample_nonzero(&cleared)? {
        Some(true) => Ok(ZeroVerdict::Nonzero),
        Some(false) => Ok(ZeroVerdict::Undecided),
        None => Ok(ZeroVerdict::Undecided),
    }
}

pub fn equivalent(a: &Expr, b: &Expr) -> Result<bool> {
    let d = Expr::Add(vec![a.clone(), Expr::Mul(vec![Expr::num_i64(-1), b.clone()])]);
    Ok(is_zero(&d)? == ZeroVerdict::IdenticallyZero)
}

/// Splits an exponent into (rational constant part, symbolic remainder).
fn exponent_parts(e: &Expr) -> (Rational, Expr) {
    match e {
        Expr::Num(r) => (r.clone(), Expr::zero()),
        Expr::Add(terms) => {
            let mut c = Rational::zero();
            let mut rest = Vec::new();
            for t in terms {
                match t {
                    Expr::Num(r) => c += r,
                    other => rest.push(other.clone()),
                }
            }
            let r = match rest.len() {
                0 => Expr::zero(),
                1 => rest.pop().unwrap(),
                _ => Expr::Add(rest),
            };
            (c, r)
        }
        other => (Rational::zero(), other.clone()),
    }
}

pub(crate) fn clear_denominators(e: &Expr) -> Result<Expr> {
    let ctx = NormCtx::default();
    let mut cur = e.clone();
    for _ in 0..CLEAR_ROUNDS {
        let terms: Vec<Expr> = match &cur {
            Expr::Add(ts) => ts.clone(),
            other => vec![other.clone()],
        };
        // per base: the distinct symbolic exponent parts with min constants
        let mut groups: Vec<(Expr, Vec<(Expr, Rational)>)> = Vec::new();
        for t in &terms {
            for (b, x) in term_parts(t).factors {
                let (c, sym) = exponent_parts(&x);
                let entry = match groups.iter_mut().find(|(k, _)| *k == b) {
                    Some((_, v)) => v,
                    None => {
                        groups.push((b.clone(), Vec::new()));
                        &mut groups.last_mut().unwrap().1
                    }
                };
                match entry.iter_mut().find(|(s, _)| *s == sym) {
                    Some((_, m)) => {
                        if c < *m {
                            *m = c;
                        }
                    }
                    None => entry.push((sym, c)),
                }
            }
        }
        let mut multipliers: Vec<Expr> = Vec::new();
        for (base, parts) in groups {
            // A base shifted by a single symbolic exponent clears whole;
            // mixed symbolic parts only clear their pure-rational group.
            let (sym, min_c) = if parts.len() == 1 {
                parts.into_iter().next().unwrap()
            } else {
                match parts.into_iter().find(|(s, _)| s.is_num_zero()) {
                    Some(p) => p,
                    None => continue,
                }
            };
            let needs = if sym.is_num_zero() {
                min_c.is_negative()
            } else {
                true
            };
            if !needs {
                continue;
            }
            // base^(-sym - min_c)
            let expo = norm_add(
                vec![
                    Expr::Mul(vec![Expr::num_i64(-1), sym]),
                    Expr::Num(-min_c),
                ],
                &ctx,
            )?;
            if expo.is_num_zero() {
                continue;
            }
            multipliers.push(Expr::Pow(Box::new(base), Box::new(expo)));
        }
        if multipliers.is_empty() {
            return Ok(cur);
        }
        let mut parts = multipliers;
        parts.push(cur.clone());
        let next = norm(&Expr::Mul(parts), &ctx)?;
        if next.is_num_zero() {
            return Ok(next);
        }
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
    Ok(cur)
}

/// Puts a rational expression over a cleared numerator and a factored
/// denominator: returns `num * den_factors^-1` with the numerator expanded.
/// Used to canonicalize exponent spellings such as `(n-3)/(n-2) - 1`.
pub fn rational_combine(e: &Expr) -> Result<Expr> {
    rational_combine_ctx(e, &NormCtx::default())
}

pub(crate) fn rational_combine_ctx(e: &Expr, ctx: &NormCtx) -> Result<Expr> {
    let n = norm(e, ctx)?;
    let terms: Vec<Expr> = match &n {
        Expr::Add(ts) => ts.clone(),
        other => vec![other.clone()],
    };
    // collect denominator factors: (base, most negative exponent)
    let mut dens: Vec<(Expr, Rational)> = Vec::new();
    for t in &terms {
        for (b, x) in term_parts(t).factors {
            if let Some(r) = x.as_rational() {
                if r.is_negative() {
                    match dens.iter_mut().find(|(k, _)| *k == b) {
                        Some((_, m)) => {
                            if r < &*m {
                                *m = r.clone();
                            }
                        }
                        None => dens.push((b, r.clone())),
                    }
                }
            }
        }
    }
    if dens.is_empty() {
        return Ok(n);
    }
    let mut mult: Vec<Expr> = vec![n.clone()];
    for (b, m) in &dens {
        mult.push(Expr::Pow(Box::new(b.clone()), Box::new(Expr::Num(-m.clone()))));
    }
    let num = norm(&Expr::Mul(mult), ctx)?;
    let mut back: Vec<Expr> = vec![num];
    for (b, m) in dens {
        back.push(Expr::Pow(Box::new(b), Box::new(Expr::Num(m))));
    }
    // reassemble without distributing the inverse factors over the numerator
    let mut coeff = Rational::one();
    let mut factors: Vec<(Expr, Expr)> = Vec::new();
    for p in back {
        let ft = term_parts(&p);
        coeff *= ft.coeff;
        factors.extend(ft.factors);
    }
    // merge duplicate bases conservatively
    let mut merged: Vec<(Expr, Expr)> = Vec::new();
    for (b, x) in factors {
        match merged.iter_mut().find(|(k, _)| *k == b) {
            Some((_, x0)) => {
                *x0 = norm_add(vec![x0.clone(), x], ctx)?;
            }
            None => merged.push((b, x)),
        }
    }
    merged.retain(|(_, x)| !x.is_num_zero());
    merged.sort_by(|(b1, e1), (b2, e2)| cmp_expr(b1, b2).then_with(|| cmp_expr(e1, e2)));
    Ok(term_build(FTerm { coeff, factors: merged }))
}

/// Deterministic sampling: Some(true) = a sample was clearly nonzero,
/// Some(false) = enough valid samples and all were numerically zero,
/// None = not enough admissible points found.
fn sample_nonzero(e: &Expr) -> Result<Option<bool>> {
    let syms: Vec<Symbol> = e.free_symbols().into_iter().collect();
    let digits = 40usize;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f01);
    let mut valid = 0usize;
    for _ in 0..SAMPLE_ATTEMPTS {
        if valid >= SAMPLE_POINTS {
            break;
        }
        let mut assign: BTreeMap<Symbol, Rational> = BTreeMap::new();
        for s in &syms {
            assign.insert(s.clone(), random_rational(&mut rng));
        }
        match eval_numeric(e, &assign, digits) {
            Ok(v) => {
                valid += 1;
                let mag = v.abs();
                // anything truly nonzero lands far above this at 40 digits
                let thresh = crate::expr::eval::pow10(-(digits as i64) + 15, digits);
                if crate::expr::eval::bf_gt(&mag, &thresh) {
                    return Ok(Some(true));
                }
            }
            Err(Error::Domain(_)) | Err(Error::ZeroDenominator) => continue,
            Err(other) => return Err(other),
        }
    }
    if valid >= SAMPLE_POINTS / 2 {
        Ok(Some(false))
    } else {
        Ok(None)
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num = rng.gen_range(1..=24i64);
    let den = rng.gen_range(7..=13i64);
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    Rational::new((sign * num).into(), den.into())
}
