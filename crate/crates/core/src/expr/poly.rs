//! Canonical sum-of-monomials representation. All heavy symbolic work runs
//! here; [`Expr`](super::Expr) trees are converted in and out.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use super::atom::{Atom, Field};
use super::ring::{AlphaPoly, Rational};

/// Product of atom powers, sorted by atom, exponents positive.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mono(Vec<(Atom, u32)>);

impl Mono {
    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn atom(a: Atom) -> Self {
        Mono(vec![(a, 1)])
    }

    pub fn from_factors(mut f: Vec<(Atom, u32)>) -> Self {
        f.retain(|(_, e)| *e > 0);
        f.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Atom, u32)> = Vec::with_capacity(f.len());
        for (a, e) in f {
            match out.last_mut() {
                Some((b, k)) if *b == a => *k += e,
                _ => out.push((a, e)),
            }
        }
        Mono(out)
    }

    pub fn factors(&self) -> &[(Atom, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, a: &Atom) -> u32 {
        self.0
            .binary_search_by(|(b, _)| b.cmp(a))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Mono(out)
    }

    /// Divide out one power of `a`, returning the old exponent.
    pub fn reduce(&self, a: &Atom) -> Option<(u32, Mono)> {
        let i = self.0.binary_search_by(|(b, _)| b.cmp(a)).ok()?;
        let mut f = self.0.clone();
        let e = f[i].1;
        if e == 1 {
            f.remove(i);
        } else {
            f[i].1 -= 1;
        }
        Some((e, Mono(f)))
    }

    /// Remove every power of `a`, returning the exponent and the rest.
    pub fn split(&self, a: &Atom) -> (u32, Mono) {
        match self.0.binary_search_by(|(b, _)| b.cmp(a)) {
            Ok(i) => {
                let mut f = self.0.clone();
                let (_, e) = f.remove(i);
                (e, Mono(f))
            }
            Err(_) => (0, self.clone()),
        }
    }
}

/// Polynomial in jet atoms with `Q[α]` coefficients. Zero coefficients are
/// never stored, so structural equality is mathematical equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Mono, AlphaPoly>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::coeff(AlphaPoly::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::coeff(AlphaPoly::constant(c))
    }

    pub fn int(n: i128) -> Self {
        Poly::constant(Rational::from_integer(n))
    }

    pub fn alpha() -> Self {
        Poly::coeff(AlphaPoly::alpha())
    }

    pub fn coeff(c: AlphaPoly) -> Self {
        Poly::term(Mono::one(), c)
    }

    pub fn atom(a: Atom) -> Self {
        Poly::term(Mono::atom(a), AlphaPoly::one())
    }

    pub fn term(m: Mono, c: AlphaPoly) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &AlphaPoly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Mono) -> AlphaPoly {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// `Some(c)` when the polynomial has no atoms.
    pub fn as_coeff(&self) -> Option<AlphaPoly> {
        match self.terms.len() {
            0 => Some(AlphaPoly::zero()),
            1 => self.terms.get(&Mono::one()).cloned(),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.as_coeff().and_then(|c| c.as_constant())
    }

    pub fn add_term(&mut self, m: Mono, c: AlphaPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = &*o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, c: &AlphaPoly) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn scale_rational(&self, c: Rational) -> Poly {
        self.scale(&AlphaPoly::constant(c))
    }

    pub fn mul_mono(&self, m: &Mono) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.mul(m), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(a, _)| a.clone()))
            .collect()
    }

    pub fn contains_field(&self, f: Field) -> bool {
        self.atoms()
            .iter()
            .any(|a| matches!(a, Atom::Jet(g, _) if *g == f))
    }

    pub fn max_jet_order(&self) -> usize {
        self.atoms().iter().map(Atom::order).max().unwrap_or(0)
    }

    pub fn max_var(&self) -> u8 {
        self.atoms().iter().map(Atom::max_var).max().unwrap_or(0)
    }

    /// Degree in the atoms of field `f`.
    pub fn field_degree(&self, f: Field) -> u32 {
        self.terms
            .keys()
            .map(|m| {
                m.0.iter()
                    .filter(|(a, _)| matches!(a, Atom::Jet(g, _) if *g == f))
                    .map(|(_, e)| e)
                    .sum()
            })
            .max()
            .unwrap_or(0)
    }

    /// Collect as a polynomial in the atom `a`: `Σ_k c_k a^k`.
    pub fn collect(&self, a: &Atom) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split(a);
            out.entry(e).or_default().add_term(rest, c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Split into parts whose monomials satisfy / fail `pred`.
    pub fn partition(&self, pred: impl Fn(&Mono) -> bool) -> (Poly, Poly) {
        let mut yes = Poly::zero();
        let mut no = Poly::zero();
        for (m, c) in &self.terms {
            if pred(m) {
                yes.terms.insert(m.clone(), c.clone());
            } else {
                no.terms.insert(m.clone(), c.clone());
            }
        }
        (yes, no)
    }

    /// Evaluate the α coefficients at an exact rational.
    pub fn at_alpha(&self, alpha: &Rational) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), AlphaPoly::constant(c.eval_exact(alpha)));
        }
        out
    }

    /// Largest monomial with its coefficient.
    pub fn leading(&self) -> Option<(&Mono, &AlphaPoly)> {
        self.terms.iter().next_back()
    }

    pub fn map_coeffs(&self, f: impl Fn(&AlphaPoly) -> AlphaPoly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn is_rational_multiple_of(&self, other: &Poly) -> Option<Rational> {
        let (m, c) = other.terms.iter().next()?;
        let c0 = c.as_constant()?;
        let d = self.terms.get(m)?.as_constant()?;
        let r = d / c0;
        if *self == other.scale_rational(r) {
            Some(r)
        } else {
            None
        }
    }
}

impl FromIterator<(Mono, AlphaPoly)> for Poly {
    fn from_iter<I: IntoIterator<Item = (Mono, AlphaPoly)>>(iter: I) -> Self {
        let mut p = Poly::zero();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly { (&self).$f(&rhs) }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $f(self, rhs: &Poly) -> Poly { (&self).$f(rhs) }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly { self.$f(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Zero for Poly {
    fn zero() -> Self {
        Poly::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Poly {
    fn one() -> Self {
        Poly::one()
    }
}

#[cfg(test)]
mod tests {
    use super::super::atom::Var;
    use super::*;
    use crate::expr::ring::int;

    fn x() -> Poly {
        Poly::atom(Atom::x(1))
    }

    fn u() -> Poly {
        Poly::atom(Atom::u())
    }

    #[test]
    fn binomial_square_cancels() {
        let s = &u() + &x();
        let d = s.pow(2) - u().pow(2) - (&u() * &x()).scale_rational(int(2)) - x().pow(2);
        assert!(d.is_zero());
    }

    #[test]
    fn collect_and_degree() {
        let p = &(&u() * &u()) * &x() + Poly::atom(Atom::jet(Field::U, &[Var(1)]));
        assert_eq!(p.field_degree(Field::U), 2);
        let c = p.collect(&Atom::u());
        assert_eq!(c.len(), 2);
        assert_eq!(c[&2], x());
    }

    #[test]
    fn rational_multiple() {
        let p = &u() + &x();
        let q = p.scale_rational(int(-3));
        assert_eq!(q.is_rational_multiple_of(&p), Some(int(-3)));
        assert_eq!((&q + &u()).is_rational_multiple_of(&p), None);
    }
}
