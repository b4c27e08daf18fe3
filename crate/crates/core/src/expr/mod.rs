//! Computer-algebra kernel on the jet space of `u(t, x_1..x_n)`.
//!
//! [`Expr`] is the user-facing tree; [`Poly`] is the canonical
//! sum-of-monomials form every operation reduces to. Normal form is the
//! fully expanded monomial sum with atoms ordered
//! `t < x_1 < … < x_n < u_J < phi_J < F_J` and powers of α last.

mod atom;
mod calculus;
mod eval;
mod parse;
mod poly;
mod print;
mod ring;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub use atom::{Atom, DerivIndex, Field, Naming, Var};
pub use calculus::{
    coordinate_derivative, partial_derivative, substitute, total_derivative, total_derivative_multi,
    JetConfig, Rules,
};
pub use eval::{eval_numeric, Binding, FieldFn};
pub use parse::parse;
pub use poly::{Mono, Poly};
pub use print::{latex, latex_poly};
pub use ring::{int, rat, AlphaPoly, AlphaRatio, Rational};

use num_traits::{One, Zero};

/// Symbolic expression tree. Values built through the arithmetic operators
/// or [`normalize`] are in normal form; hand-built trees need not be.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Num(Rational),
    Alpha,
    Atom(Atom),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Num(Rational::zero())
    }

    pub fn one() -> Expr {
        Expr::Num(Rational::one())
    }

    pub fn int(n: i128) -> Expr {
        Expr::Num(int(n))
    }

    pub fn rat(n: i128, d: i128) -> Expr {
        Expr::Num(rat(n, d))
    }

    pub fn alpha() -> Expr {
        Expr::Alpha
    }

    pub fn t() -> Expr {
        Expr::Atom(Atom::t())
    }

    pub fn x(i: usize) -> Expr {
        Expr::Atom(Atom::x(i))
    }

    pub fn var(v: Var) -> Expr {
        Expr::Atom(Atom::Var(v))
    }

    pub fn u() -> Expr {
        Expr::Atom(Atom::u())
    }

    pub fn jet(field: Field, vars: &[Var]) -> Expr {
        Expr::Atom(Atom::jet(field, vars))
    }

    pub fn pow(&self, e: u32) -> Expr {
        Expr::from(&self.to_poly().pow(e))
    }

    pub fn to_poly(&self) -> Poly {
        match self {
            Expr::Num(c) => Poly::constant(*c),
            Expr::Alpha => Poly::alpha(),
            Expr::Atom(a) => Poly::atom(a.clone()),
            Expr::Sum(v) => {
                let mut acc = Poly::zero();
                for e in v {
                    acc += &e.to_poly();
                }
                acc
            }
            Expr::Product(v) => v.iter().fold(Poly::one(), |acc, e| &acc * &e.to_poly()),
            Expr::Pow(b, k) => b.to_poly().pow(*k),
        }
    }

    pub fn is_zero(&self) -> bool {
        equals_zero(self)
    }

    pub fn scale(&self, c: Rational) -> Expr {
        Expr::from(&self.to_poly().scale_rational(c))
    }

    pub fn atoms(&self) -> std::collections::BTreeSet<Atom> {
        self.to_poly().atoms()
    }

    fn max_var(&self) -> u8 {
        match self {
            Expr::Num(_) | Expr::Alpha => 0,
            Expr::Atom(a) => a.max_var(),
            Expr::Sum(v) | Expr::Product(v) => v.iter().map(Expr::max_var).max().unwrap_or(0),
            Expr::Pow(b, _) => b.max_var(),
        }
    }

    /// Render with an explicit coordinate spelling.
    pub fn render(&self, naming: Naming) -> String {
        print::render(self, naming)
    }
}

/// Expanded canonical tree of `e`.
pub fn normalize(e: &Expr) -> Expr {
    Expr::from(&e.to_poly())
}

pub fn equals_zero(e: &Expr) -> bool {
    e.to_poly().is_zero()
}

impl From<&Poly> for Expr {
    fn from(p: &Poly) -> Expr {
        let mut terms = Vec::new();
        for (m, c) in p.terms() {
            for (k, ck) in c.coeffs().iter().enumerate() {
                if ck.is_zero() {
                    continue;
                }
                let mut factors = Vec::new();
                let bare = m.is_one() && k == 0;
                if !ck.is_one() || bare {
                    factors.push(Expr::Num(*ck));
                }
                for (a, e) in m.factors() {
                    let at = Expr::Atom(a.clone());
                    factors.push(if *e == 1 { at } else { Expr::Pow(Box::new(at), *e) });
                }
                match k {
                    0 => {}
                    1 => factors.push(Expr::Alpha),
                    _ => factors.push(Expr::Pow(Box::new(Expr::Alpha), k as u32)),
                }
                terms.push(if factors.len() == 1 {
                    factors.pop().unwrap()
                } else {
                    Expr::Product(factors)
                });
            }
        }
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.pop().unwrap(),
            _ => Expr::Sum(terms),
        }
    }
}

impl From<Poly> for Expr {
    fn from(p: Poly) -> Expr {
        Expr::from(&p)
    }
}

impl From<&Expr> for Poly {
    fn from(e: &Expr) -> Poly {
        e.to_poly()
    }
}

impl From<Rational> for Expr {
    fn from(c: Rational) -> Expr {
        Expr::Num(c)
    }
}

impl From<i128> for Expr {
    fn from(n: i128) -> Expr {
        Expr::int(n)
    }
}

impl From<Atom> for Expr {
    fn from(a: Atom) -> Expr {
        Expr::Atom(a)
    }
}

macro_rules! expr_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for &Expr {
            type Output = Expr;
            fn $f(self, rhs: &Expr) -> Expr {
                Expr::from(&self.to_poly().$f(rhs.to_poly()))
            }
        }
        impl $tr for Expr {
            type Output = Expr;
            fn $f(self, rhs: Expr) -> Expr { (&self).$f(&rhs) }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $f(self, rhs: &Expr) -> Expr { (&self).$f(rhs) }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $f(self, rhs: Expr) -> Expr { self.$f(&rhs) }
        }
    )*};
}
expr_ops!(Add add, Sub sub, Mul mul);

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::from(&-self.to_poly())
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let naming = if self.max_var() > 4 {
            Naming::Numbered
        } else {
            Naming::Letters
        };
        f.write_str(&print::render(self, naming))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let naming = if self.max_var() > 4 {
            Naming::Numbered
        } else {
            Naming::Letters
        };
        f.write_str(&print::render_poly(self, naming))
    }
}
