//! Simultaneous substitution with transitive binding resolution.

use super::{normalize, Expr, Symbol};
use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Replaces bound symbols by their values, resolving bindings through one
/// another (`{a -> 1 + q/2, q -> 2}` sends `v^a` to `v^2`). Bindings whose
/// dependency graph has a cycle are rejected.
pub fn substitute(e: &Expr, bindings: &BTreeMap<Symbol, Expr>) -> Result<Expr> {
    if bindings.is_empty() {
        return normalize(e);
    }
    let order = topo_order(bindings)?;
    let mut resolved: BTreeMap<Symbol, Expr> = BTreeMap::new();
    for s in order {
        let v = bindings.get(&s).unwrap();
        let r = replace(v, &resolved);
        resolved.insert(s, r);
    }
    normalize(&replace(e, &resolved))
}

fn topo_order(bindings: &BTreeMap<Symbol, Expr>) -> Result<Vec<Symbol>> {
    // depth-first with cycle detection, restricted to bound symbols
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Visiting,
        Done,
    }
    fn visit(
        s: &Symbol,
        bindings: &BTreeMap<Symbol, Expr>,
        marks: &mut BTreeMap<Symbol, Mark>,
        out: &mut Vec<Symbol>,
    ) -> Result<()> {
        match marks.get(s) {
            Some(Mark::Done) => return Ok(()),
            Some(Mark::Visiting) => return Err(Error::CyclicBindings(s.to_string())),
            None => {}
        }
        marks.insert(s.clone(), Mark::Visiting);
        if let Some(v) = bindings.get(s) {
            for dep in v.free_symbols() {
                if bindings.contains_key(&dep) {
                    visit(&dep, bindings, marks, out)?;
                }
            }
        }
        marks.insert(s.clone(), Mark::Done);
        out.push(s.clone());
        Ok(())
    }
    let mut marks = BTreeMap::new();
    let mut out = Vec::new();
    for s in bindings.keys() {
        visit(s, bindings, &mut marks, &mut out)?;
    }
    Ok(out)
}

fn replace(e: &Expr, map: &BTreeMap<Symbol, Expr>) -> Expr {
    match e {
        Expr::Num(_) => e.clone(),
        Expr::Sym(s) => map.get(s).cloned().unwrap_or_else(|| e.clone()),
        Expr::Add(v) => Expr::Add(v.iter().map(|x| replace(x, map)).collect()),
        Expr::Mul(v) => Expr::Mul(v.iter().map(|x| replace(x, map)).collect()),
        Expr::Pow(b, x) => Expr::Pow(
            Box::new(replace(b, map)),
            Box::new(replace(x, map)),
        ),
        Expr::Fun(f, a) => Expr::Fun(*f, Box::new(replace(a, map))),
    }
}

/// Single-symbol convenience.
pub(crate) fn subst1(e: &Expr, s: &Symbol, v: &Expr) -> Result<Expr> {
    let mut m = BTreeMap::new();
    m.insert(s.clone(), v.clone());
    substitute(e, &m)
}
