//! Partial, total and coordinate derivatives, and on-shell substitution.

use std::collections::{BTreeMap, HashMap};

use super::atom::{Atom, DerivIndex, Field, Var};
use super::poly::{Mono, Poly};
use super::ring::Rational;
use super::Expr;
use crate::error::{Error, Result};

/// Jet-order cap for derivative and substitution operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JetConfig {
    pub max_order: usize,
}

impl Default for JetConfig {
    fn default() -> Self {
        JetConfig { max_order: 4 }
    }
}

impl JetConfig {
    pub const ENV_VAR: &'static str = "LIESYM_MAX_JET";

    pub fn new(max_order: usize) -> Self {
        JetConfig { max_order }
    }

    /// Default cap, overridden by `LIESYM_MAX_JET` when it parses.
    pub fn from_env() -> Result<Self> {
        match std::env::var(Self::ENV_VAR) {
            Ok(s) => s
                .trim()
                .parse::<usize>()
                .ok()
                .filter(|k| *k >= 1)
                .map(JetConfig::new)
                .ok_or_else(|| {
                    Error::InvalidArgument(format!("{} must be a positive integer, got `{s}`", Self::ENV_VAR))
                }),
            Err(_) => Ok(JetConfig::default()),
        }
    }

    fn check(&self, order: usize) -> Result<()> {
        if order > self.max_order {
            Err(Error::MaxJetOrder {
                order,
                max: self.max_order,
            })
        } else {
            Ok(())
        }
    }
}

/// Substitution rules keyed by jet coordinate.
pub type Rules = BTreeMap<Atom, Expr>;

impl Poly {
    /// `∂p/∂a` with every other atom held fixed.
    pub fn partial(&self, a: &Atom) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in self.terms() {
            if let Some((e, rest)) = m.reduce(a) {
                out.add_term(rest, c.scale(&Rational::from_integer(e as i128)));
            }
        }
        out
    }

    /// Derivative along `v` where each atom is mapped to its derivative by
    /// `lift` (`None` means the atom is constant along `v`).
    fn derive_with(&self, lift: impl Fn(&Atom) -> Result<Option<Poly>>) -> Result<Poly> {
        let mut cache: HashMap<Atom, Option<Poly>> = HashMap::new();
        let mut out = Poly::zero();
        for (m, c) in self.terms() {
            for (a, _) in m.factors() {
                if !cache.contains_key(a) {
                    cache.insert(a.clone(), lift(a)?);
                }
                let Some(da) = &cache[a] else { continue };
                let (e, rest) = m.reduce(a).expect("factor present");
                let k = c.scale(&Rational::from_integer(e as i128));
                out += &da.mul_mono(&rest).scale(&k);
            }
        }
        Ok(out)
    }

    /// Total derivative `D_v`: every jet coordinate of `u`, `phi` and `F`
    /// is a function of the independent variables.
    pub fn total(&self, v: Var, cfg: &JetConfig) -> Result<Poly> {
        self.derive_with(|a| match a {
            Atom::Var(w) => Ok((*w == v).then(Poly::one)),
            Atom::Jet(f, j) => {
                let k = j.with(v);
                cfg.check(k.order())?;
                Ok(Some(Poly::atom(Atom::Jet(*f, k))))
            }
        })
    }

    /// `D_J` for a multi-index.
    pub fn total_multi(&self, idx: &DerivIndex, cfg: &JetConfig) -> Result<Poly> {
        let mut p = self.clone();
        for v in idx.vars() {
            p = p.total(*v, cfg)?;
        }
        Ok(p)
    }

    /// Derivative along a coordinate of the space `(t, x, u)`. The
    /// dependent `u` is an independent coordinate here, while `phi` and
    /// `F` remain functions of `(t, x)` and are differentiated through.
    pub fn coord(&self, a: &Atom, cfg: &JetConfig) -> Result<Poly> {
        match a {
            Atom::Var(v) => {
                let v = *v;
                self.derive_with(|b| match b {
                    Atom::Var(w) => Ok((*w == v).then(Poly::one)),
                    Atom::Jet(Field::U, _) => Ok(None),
                    Atom::Jet(f, j) => {
                        let k = j.with(v);
                        cfg.check(k.order())?;
                        Ok(Some(Poly::atom(Atom::Jet(*f, k))))
                    }
                })
            }
            _ => Ok(self.partial(a)),
        }
    }

    /// Replace an atom by a polynomial, without derivative propagation.
    pub fn replace(&self, a: &Atom, by: &Poly) -> Poly {
        let mut out = Poly::zero();
        let mut powers: Vec<Poly> = vec![Poly::one()];
        for (m, c) in self.terms() {
            let (e, rest) = m.split(a);
            if e == 0 {
                out.add_term(rest, c.clone());
                continue;
            }
            while powers.len() <= e as usize {
                let next = powers.last().unwrap() * by;
                powers.push(next);
            }
            out += &powers[e as usize].mul_mono(&rest).scale(c);
        }
        out
    }

    /// Apply jet rules to a fixpoint: a rule `u_K -> R` rewrites every
    /// `u_J` with `K ⊆ J` into `D_{J-K} R`.
    pub fn substitute(&self, rules: &[(Atom, Poly)], cfg: &JetConfig) -> Result<Poly> {
        check_acyclic(rules)?;
        let bound = (cfg.max_order + 1) * rules.len().max(1) + 1;
        let mut p = self.clone();
        for _ in 0..bound {
            let mut hits: BTreeMap<Atom, Poly> = BTreeMap::new();
            for a in p.atoms() {
                if let Some((rhs, rest)) = match_rule(rules, &a) {
                    hits.insert(a, rhs.total_multi(&rest, cfg)?);
                }
            }
            if hits.is_empty() {
                return Ok(p);
            }
            p = replace_all(&p, &hits);
        }
        Err(Error::FixpointNotReached(bound))
    }
}

fn match_rule<'a>(rules: &'a [(Atom, Poly)], a: &Atom) -> Option<(&'a Poly, DerivIndex)> {
    let Atom::Jet(f, j) = a else { return None };
    rules.iter().find_map(|(k, rhs)| match k {
        Atom::Jet(g, key) if g == f => j.strip(key).map(|rest| (rhs, rest)),
        _ => None,
    })
}

fn replace_all(p: &Poly, hits: &BTreeMap<Atom, Poly>) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        let mut kept = Vec::new();
        let mut acc = Poly::coeff(c.clone());
        for (a, e) in m.factors() {
            match hits.get(a) {
                Some(r) => acc = &acc * &r.pow(*e),
                None => kept.push((a.clone(), *e)),
            }
        }
        out += &acc.mul_mono(&Mono::from_factors(kept));
    }
    out
}

fn check_acyclic(rules: &[(Atom, Poly)]) -> Result<()> {
    for (k, _) in rules {
        if !matches!(k, Atom::Jet(..)) {
            return Err(Error::InvalidArgument(format!(
                "substitution key `{k}` is not a jet coordinate"
            )));
        }
    }
    let n = rules.len();
    let deps: Vec<Vec<usize>> = rules
        .iter()
        .map(|(_, rhs)| {
            let atoms = rhs.atoms();
            (0..n)
                .filter(|&j| atoms.iter().any(|a| matches_key(&rules[j].0, a)))
                .collect()
        })
        .collect();
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    fn visit(i: usize, deps: &[Vec<usize>], state: &mut [u8]) -> Option<usize> {
        state[i] = 1;
        for &j in &deps[i] {
            if state[j] == 1 {
                return Some(j);
            }
            if state[j] == 0 {
                if let Some(c) = visit(j, deps, state) {
                    return Some(c);
                }
            }
        }
        state[i] = 2;
        None
    }
    for i in 0..n {
        if state[i] == 0 {
            if let Some(c) = visit(i, &deps, &mut state) {
                return Err(Error::SubstitutionCycle(rules[c].0.to_string()));
            }
        }
    }
    Ok(())
}

fn matches_key(key: &Atom, a: &Atom) -> bool {
    match (key, a) {
        (Atom::Jet(f, k), Atom::Jet(g, j)) => f == g && j.strip(k).is_some(),
        _ => false,
    }
}

pub fn partial_derivative(e: &Expr, a: &Atom) -> Expr {
    Expr::from(&e.to_poly().partial(a))
}

pub fn total_derivative(e: &Expr, v: Var, cfg: &JetConfig) -> Result<Expr> {
    e.to_poly().total(v, cfg).map(Expr::from)
}

pub fn total_derivative_multi(e: &Expr, idx: &DerivIndex, cfg: &JetConfig) -> Result<Expr> {
    e.to_poly().total_multi(idx, cfg).map(Expr::from)
}

pub fn coordinate_derivative(e: &Expr, a: &Atom, cfg: &JetConfig) -> Result<Expr> {
    e.to_poly().coord(a, cfg).map(Expr::from)
}

pub fn substitute(e: &Expr, rules: &Rules, cfg: &JetConfig) -> Result<Expr> {
    let r: Vec<(Atom, Poly)> = rules.iter().map(|(k, v)| (k.clone(), v.to_poly())).collect();
    e.to_poly().substitute(&r, cfg).map(Expr::from)
}
