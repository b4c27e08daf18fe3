//! Point-symmetry generators and their Lie algebra.
//!
//! Fields act on functions of `(t, x_1..x_n, u)`; the arbitrary solution
//! `F(t, x)` and the adjoint `phi(t, x)` are carried along as functions of
//! the independent variables, so brackets with `F ∂_u` produce derivatives
//! of `F`.

mod canonical;
mod linalg;
mod table;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Atom, Expr, Field, JetConfig, Poly, Rational};

pub use canonical::{match_canonical, CanonicalMatch, Pattern};
pub use linalg::SpanSolver;
pub use table::{
    closure_report, commutator_table, decompose_in_basis, derived_series, ClosureReport,
    CommutatorTable, Decomposition, OffendingPair, StructureConstants,
};

/// `ξ⁰ ∂_t + Σ ξⁱ ∂_{x_i} + η ∂_u`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VectorField {
    pub name: String,
    pub xi0: Expr,
    pub xi: Vec<Expr>,
    pub eta: Expr,
}

/// Jet cap for bracket computations; only `F` and `phi` gain derivatives
/// here, and nested brackets stay shallow.
const BRACKET_JET: JetConfig = JetConfig { max_order: 16 };

impl VectorField {
    pub fn new(name: impl Into<String>, xi0: Expr, xi: Vec<Expr>, eta: Expr) -> Self {
        VectorField {
            name: name.into(),
            xi0: crate::expr::normalize(&xi0),
            xi: xi.iter().map(crate::expr::normalize).collect(),
            eta: crate::expr::normalize(&eta),
        }
    }

    pub fn from_polys(name: impl Into<String>, comps: &[Poly]) -> Self {
        let n = comps.len() - 2;
        VectorField {
            name: name.into(),
            xi0: Expr::from(&comps[0]),
            xi: comps[1..=n].iter().map(Expr::from).collect(),
            eta: Expr::from(&comps[n + 1]),
        }
    }

    /// Parse from component strings in the expression grammar.
    pub fn parse(name: &str, xi0: &str, xi: &[&str], eta: &str) -> Result<Self> {
        Ok(VectorField {
            name: name.to_string(),
            xi0: crate::expr::parse(xi0)?,
            xi: xi.iter().map(|s| crate::expr::parse(s)).collect::<Result<_>>()?,
            eta: crate::expr::parse(eta)?,
        })
    }

    pub fn zero(name: impl Into<String>, n: usize) -> Self {
        VectorField::new(name, Expr::zero(), vec![Expr::zero(); n], Expr::zero())
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    /// `[ξ⁰, ξ¹, …, ξⁿ, η]` in canonical form.
    pub fn components(&self) -> Vec<Poly> {
        let mut v = Vec::with_capacity(self.dim() + 2);
        v.push(self.xi0.to_poly());
        v.extend(self.xi.iter().map(Expr::to_poly));
        v.push(self.eta.to_poly());
        v
    }

    /// Coordinates matching [`components`](Self::components).
    pub fn coordinates(n: usize) -> Vec<Atom> {
        let mut v = vec![Atom::t()];
        v.extend((1..=n).map(Atom::x));
        v.push(Atom::u());
        v
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(Poly::is_zero)
    }

    pub fn scale(&self, c: Rational) -> VectorField {
        let comps: Vec<Poly> = self.components().iter().map(|p| p.scale_rational(c)).collect();
        VectorField::from_polys(self.name.clone(), &comps)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Apply the field as a derivation to a function of `(t, x, u)`.
    pub fn apply(&self, f: &Poly) -> Result<Poly> {
        apply_comps(&self.components(), f)
    }

    /// True when some coefficient involves the arbitrary solution `F`.
    pub fn involves_f(&self) -> bool {
        self.components().iter().any(|p| p.contains_field(Field::F))
    }

    /// Point-field check: coefficients may depend on `t`, `x`, `u`, and
    /// (for the infinite family) on `F` and its derivatives, nothing else.
    pub fn is_point_field(&self) -> bool {
        self.components().iter().all(|p| {
            p.atoms().iter().all(|a| match a {
                Atom::Var(v) => (v.0 as usize) <= self.dim(),
                Atom::Jet(Field::U, j) => j.order() == 0,
                Atom::Jet(Field::F, j) => (j.max_var() as usize) <= self.dim(),
                Atom::Jet(Field::Phi, _) => false,
            })
        })
    }
}

fn apply_comps(comps: &[Poly], f: &Poly) -> Result<Poly> {
    let coords = VectorField::coordinates(comps.len() - 2);
    let mut out = Poly::zero();
    for (c, a) in comps.iter().zip(&coords) {
        if c.is_zero() {
            continue;
        }
        let d = f.coord(a, &BRACKET_JET)?;
        if !d.is_zero() {
            out += &(c * &d);
        }
    }
    Ok(out)
}

/// `[A, B]^k = A(B^k) − B(A^k)`.
pub fn lie_bracket(a: &VectorField, b: &VectorField) -> Result<VectorField> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "[{}, {}]: {} vs {} spatial dimensions",
            a.name,
            b.name,
            a.dim(),
            b.dim()
        )));
    }
    let ca = a.components();
    let cb = b.components();
    let mut out = Vec::with_capacity(ca.len());
    for k in 0..ca.len() {
        let ab = apply_comps(&ca, &cb[k])?;
        let ba = apply_comps(&cb, &ca[k])?;
        out.push(&ab - &ba);
    }
    Ok(VectorField::from_polys(format!("[{},{}]", a.name, b.name), &out))
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coords = VectorField::coordinates(self.dim());
        let mut parts = Vec::new();
        for (c, a) in self.components().iter().zip(&coords) {
            if c.is_zero() {
                continue;
            }
            let s = c.to_string();
            let wrapped = if c.len() > 1 || c.terms().any(|(_, k)| k.coeffs().len() > 1) {
                format!("({s})")
            } else {
                s
            };
            parts.push(format!("{wrapped}*d_{a}"));
        }
        if parts.is_empty() {
            write!(f, "{}: 0", self.name)
        } else {
            write!(f, "{}: {}", self.name, parts.join(" + "))
        }
    }
}

/// Serializable form used by the catalog JSON.
#[derive(Clone, Debug, Serialize, serde::Deserialize, PartialEq, Eq)]
pub struct FieldRecord {
    pub name: String,
    pub xi0: String,
    pub xi: Vec<String>,
    pub eta: String,
}

impl From<&VectorField> for FieldRecord {
    fn from(v: &VectorField) -> Self {
        FieldRecord {
            name: v.name.clone(),
            xi0: v.xi0.to_poly().to_string(),
            xi: v.xi.iter().map(|e| e.to_poly().to_string()).collect(),
            eta: v.eta.to_poly().to_string(),
        }
    }
}

impl TryFrom<&FieldRecord> for VectorField {
    type Error = Error;
    fn try_from(r: &FieldRecord) -> Result<Self> {
        let xi: Vec<&str> = r.xi.iter().map(String::as_str).collect();
        VectorField::parse(&r.name, &r.xi0, &xi, &r.eta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{int, parse};

    fn vf(name: &str, xi0: &str, xi: &[&str], eta: &str) -> VectorField {
        VectorField::parse(name, xi0, xi, eta).unwrap()
    }

    #[test]
    fn time_translation_and_dilation() {
        let g3 = vf("G3", "1", &["0"], "0");
        let g4 = vf("G4", "2*t", &["x"], "0");
        let b = lie_bracket(&g3, &g4).unwrap();
        assert_eq!(b.components(), g3.scale(int(2)).components());
        assert!(lie_bracket(&g4, &g4).unwrap().is_zero());
    }

    #[test]
    fn fractional_translation_dilation() {
        let g01 = vf("G01", "0", &["1"], "0");
        let g02 = vf("G02", "2*t", &["alpha*x"], "0");
        let b = lie_bracket(&g01, &g02).unwrap();
        assert_eq!(b.xi[0], parse("alpha").unwrap());
        assert!(b.xi0.is_zero() && b.eta.is_zero());
    }

    #[test]
    fn bracket_with_infinite_family_differentiates_f() {
        let g1 = vf("G1", "0", &["1"], "0");
        let g7 = vf("G7", "0", &["0"], "F");
        let b = lie_bracket(&g1, &g7).unwrap();
        assert_eq!(b.eta, parse("F_x").unwrap());
        assert!(b.involves_f());
    }

    #[test]
    fn dimension_mismatch() {
        let a = VectorField::zero("a", 1);
        let b = VectorField::zero("b", 2);
        assert!(matches!(lie_bracket(&a, &b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn record_round_trip() {
        let g = vf("G14", "4*t", &["2*alpha*x", "2*alpha*y"], "u*(3*alpha-2)");
        let r = FieldRecord::from(&g);
        assert_eq!(r.eta, "(3*alpha - 2)*u");
        assert_eq!(VectorField::try_from(&r).unwrap(), g);
    }
}
