//! Power collection and exponent bookkeeping.
//!
//! `collect_powers` splits a sum into v-free coefficients keyed by the
//! exponent of a chosen symbol. Exponent keys are rational-affine forms in
//! the remaining symbols; equality of keys is decided modulo a set of
//! active relations and inequations, and a comparison that is not decided
//! by them surfaces as a case-split request instead of a guess.

use super::{cmp_expr, normalize, normalize_protected, term_parts, Expr, Rational, Symbol};
use crate::error::{Error, Result};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Rational-affine form `constant + sum coeff_i * sym_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineExpo {
    pub constant: Rational,
    pub terms: BTreeMap<Symbol, Rational>,
}

impl AffineExpo {
    pub fn constant(c: Rational) -> Self {
        AffineExpo {
            constant: c,
            terms: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn try_from_expr(e: &Expr) -> Result<AffineExpo> {
        let mut out = AffineExpo::constant(Rational::zero());
        let terms: Vec<&Expr> = match e {
            Expr::Add(ts) => ts.iter().collect(),
            other => vec![other],
        };
        for t in terms {
            let ft = term_parts(t);
            match ft.factors.len() {
                0 => out.constant += ft.coeff,
                1 => {
                    let (base, expo) = &ft.factors[0];
                    match (base, expo.as_rational()) {
                        (Expr::Sym(s), Some(r)) if r.is_one() => {
                            let c = out.terms.entry(s.clone()).or_insert_with(Rational::zero);
                            *c += ft.coeff;
                        }
                        _ => return Err(Error::NonAffineExponent(e.to_string())),
                    }
                }
                _ => return Err(Error::NonAffineExponent(e.to_string())),
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    pub fn to_expr(&self) -> Expr {
        let mut parts = Vec::new();
        if !self.constant.is_zero() {
            parts.push(Expr::Num(self.constant.clone()));
        }
        for (s, c) in &self.terms {
            parts.push(Expr::Mul(vec![Expr::Num(c.clone()), Expr::Sym(s.clone())]));
        }
        let raw = match parts.len() {
            0 => Expr::zero(),
            1 => parts.pop().unwrap(),
            _ => Expr::Add(parts),
        };
        normalize(&raw).expect("affine form normalizes")
    }

    pub fn sub(&self, other: &AffineExpo) -> AffineExpo {
        let mut out = self.clone();
        out.constant -= &other.constant;
        for (s, c) in &other.terms {
            let e = out.terms.entry(s.clone()).or_insert_with(Rational::zero);
            *e -= c;
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    fn scale(&self, k: &Rational) -> AffineExpo {
        let mut out = self.clone();
        out.constant *= k;
        for c in out.terms.values_mut() {
            *c *= k;
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    /// Leading symbol (largest in symbol order).
    fn pivot(&self) -> Option<&Symbol> {
        self.terms.keys().next_back()
    }

    /// Canonical scaling: pivot coefficient 1, or constant 1 for constants.
    fn monic(&self) -> AffineExpo {
        if let Some(p) = self.pivot() {
            let c = self.terms[p].clone();
            self.scale(&c.recip())
        } else if !self.constant.is_zero() {
            let c = self.constant.clone();
            self.scale(&c.recip())
        } else {
            self.clone()
        }
    }
}

impl fmt::Display for AffineExpo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Equal,
    NotEqual,
    Unknown,
}

/// Active exponent relations (= 0) and inequations (!= 0), kept reduced.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RelationSet {
    /// Reduced basis, each entry monic with a distinct pivot symbol.
    basis: Vec<AffineExpo>,
    /// Reduced, monic, deduplicated inequations.
    neqs: Vec<AffineExpo>,
}

impl RelationSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn equalities(&self) -> &[AffineExpo] {
        &self.basis
    }

    pub fn inequations(&self) -> &[AffineExpo] {
        &self.neqs
    }

    /// Reduces a form by the equality basis.
    pub fn reduce(&self, f: &AffineExpo) -> AffineExpo {
        let mut out = f.clone();
        loop {
            let mut changed = false;
            for b in &self.basis {
                let p = b.pivot().expect("basis rows have pivots");
                if let Some(c) = out.terms.get(p).cloned() {
                    if !c.is_zero() {
                        out = out.sub(&b.scale(&c));
                        changed = true;
                    }
                }
            }
            if !changed {
                return out;
            }
        }
    }

    pub fn decide(&self, a: &AffineExpo, b: &AffineExpo) -> Decision {
        let d = self.reduce(&a.sub(b));
        if d.is_zero() {
            return Decision::Equal;
        }
        if d.is_constant() {
            return Decision::NotEqual;
        }
        let dm = d.monic();
        if self.neqs.iter().any(|n| *n == dm) {
            return Decision::NotEqual;
        }
        Decision::Unknown
    }

    /// Adds `f = 0`. Returns None when inconsistent with the current set.
    pub fn assume_equal(&self, f: &AffineExpo) -> Option<RelationSet> {
        let r = self.reduce(f);
        if r.is_zero() {
            return Some(self.clone());
        }
        if r.is_constant() {
            return None;
        }
        let mut rows = self.basis.clone();
        rows.push(r);
        let basis = rref(rows)?;
        let mut next = RelationSet {
            basis,
            neqs: Vec::new(),
        };
        // revalidate inequations under the extended basis
        for n in &self.neqs {
            let rn = next.reduce(n);
            if rn.is_zero() {
                return None;
            }
            if rn.is_constant() {
                continue; // vacuously true
            }
            let m = rn.monic();
            if !next.neqs.contains(&m) {
                next.neqs.push(m);
            }
        }
        next.neqs.sort_by(|a, b| cmp_expr(&a.to_expr(), &b.to_expr()));
        Some(next)
    }

    /// Adds `f != 0`. Returns None when inconsistent (f reduces to zero).
    pub fn assume_not_equal(&self, f: &AffineExpo) -> Option<RelationSet> {
        let r = self.reduce(f);
        if r.is_zero() {
            return None;
        }
        if r.is_constant() {
            return Some(self.clone());
        }
        let m = r.monic();
        let mut next = self.clone();
        if !next.neqs.contains(&m) {
            next.neqs.push(m);
            next.neqs.sort_by(|a, b| cmp_expr(&a.to_expr(), &b.to_expr()));
        }
        Some(next)
    }

    /// Stable textual signature for memoization and reports.
    pub fn signature(&self) -> String {
        let eqs: Vec<String> = self.basis.iter().map(|b| format!("{}=0", b)).collect();
        let nes: Vec<String> = self.neqs.iter().map(|n| format!("{}!=0", n)).collect();
        format!("[{}][{}]", eqs.join(","), nes.join(","))
    }

    /// Substitution map sending each pivot symbol to its solved expression.
    pub fn pivot_bindings(&self) -> BTreeMap<Symbol, Expr> {
        let mut out = BTreeMap::new();
        for b in &self.basis {
            let p = b.pivot().unwrap().clone();
            // pivot + rest = 0  =>  pivot = -rest
            let mut rest = b.clone();
            rest.terms.remove(&p);
            let e = normalize(&Expr::Mul(vec![Expr::num_i64(-1), rest.to_expr()]))
                .expect("affine rest normalizes");
            out.insert(p, e);
        }
        out
    }
}

/// Gauss-Jordan canonicalization; None when a row reduces to a nonzero
/// constant.
fn rref(rows: Vec<AffineExpo>) -> Option<Vec<AffineExpo>> {
    let mut basis: Vec<AffineExpo> = Vec::new();
    for row in rows {
        let tmp = RelationSet {
            basis: basis.clone(),
            neqs: Vec::new(),
        };
        let r = tmp.reduce(&row);
        if r.is_zero() {
            continue;
        }
        if r.is_constant() {
            return None;
        }
        basis.push(r.monic());
    }
    // back-substitute until every row is reduced against the others
    for _ in 0..16 {
        let mut changed = false;
        for i in 0..basis.len() {
            let mut others = basis.clone();
            let row = others.remove(i);
            let tmp = RelationSet {
                basis: others,
                neqs: Vec::new(),
            };
            let r = tmp.reduce(&row).monic();
            if r != basis[i] {
                basis[i] = r;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    basis.sort_by(|a, b| cmp_expr(&a.to_expr(), &b.to_expr()));
    Some(basis)
}

/// Collects `e` as a sum of `coeff * s^expo` terms keyed by exponent.
///
/// Exponent keys are compared structurally (no relations).
pub fn collect_powers(e: &Expr, s: &Symbol) -> Result<Vec<(Expr, Expr)>> {
    let buckets = collect_raw(e, s)?;
    let mut out: Vec<(Expr, Expr)> = Vec::new();
    for (key, parts) in buckets {
        let coeff = normalize(&Expr::Add(parts))?;
        if !coeff.is_num_zero() {
            out.push((key, coeff));
        }
    }
    out.sort_by(|(a, _), (b, _)| cmp_expr(a, b));
    Ok(out)
}

/// Relation-aware collection: keys are reduced affine forms, pairwise
/// distinct under `rel`; an undecided comparison is a case-split request.
pub fn collect_powers_rel(
    e: &Expr,
    s: &Symbol,
    rel: &RelationSet,
) -> Result<Vec<(AffineExpo, Expr)>> {
    let buckets = collect_raw(e, s)?;
    let mut out: Vec<(AffineExpo, Vec<Expr>)> = Vec::new();
    for (key, parts) in buckets {
        let af = rel.reduce(&AffineExpo::try_from_expr(&key)?);
        let mut placed = false;
        for (k, ps) in out.iter_mut() {
            match rel.decide(k, &af) {
                Decision::Equal => {
                    ps.extend(parts.iter().cloned());
                    placed = true;
                    break;
                }
                Decision::NotEqual => {}
                Decision::Unknown => {
                    return Err(Error::NeedCaseSplit(k.to_string(), af.to_string()))
                }
            }
        }
        if !placed {
            out.push((af, parts));
        }
    }
    let mut res = Vec::with_capacity(out.len());
    for (k, parts) in out {
        let coeff = normalize(&Expr::Add(parts))?;
        if !coeff.is_num_zero() {
            res.push((k, coeff));
        }
    }
    res.sort_by(|(a, _), (b, _)| cmp_expr(&a.to_expr(), &b.to_expr()));
    Ok(res)
}

/// Shared scan: buckets of raw coefficient terms per structural exponent.
fn collect_raw(e: &Expr, s: &Symbol) -> Result<Vec<(Expr, Vec<Expr>)>> {
    let mut protected = BTreeSet::new();
    protected.insert(s.clone());
    let n = normalize_protected(e, &protected)?;
    let terms: Vec<Expr> = match n {
        Expr::Add(ts) => ts,
        Expr::Num(r) if r.is_zero() => Vec::new(),
        other => vec![other],
    };
    let mut buckets: Vec<(Expr, Vec<Expr>)> = Vec::new();
    for t in terms {
        let ft = term_parts(&t);
        let mut expo_parts: Vec<Expr> = Vec::new();
        let mut rest = Vec::new();
        for (base, expo) in ft.factors {
            if let Expr::Sym(ref y) = base {
                if y == s {
                    if expo.contains_symbol(s) {
                        return Err(Error::NotCollectable(format!(
                            "`{}` occurs in its own exponent in `{}`",
                            s, t
                        )));
                    }
                    expo_parts.push(expo);
                    continue;
                }
            }
            if base.contains_symbol(s) || expo.contains_symbol(s) {
                return Err(Error::NotCollectable(format!(
                    "`{}` occurs inside a non-power position in `{}`",
                    s, t
                )));
            }
            rest.push((base, expo));
        }
        let key = normalize(&Expr::Add(expo_parts))?;
        let coeff_term = super::normalize::term_build(super::FTerm {
            coeff: ft.coeff,
            factors: rest,
        });
        match buckets.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(coeff_term),
            None => buckets.push((key, vec![coeff_term])),
        }
    }
    Ok(buckets)
}
