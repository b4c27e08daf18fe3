//! Conserved vectors from the formal Lagrangian `L = φ·(D_t^α u − Δu)`.
//!
//! For a generator with characteristic `W = η − ξ⁰u_t − Σ ξⁱ u_{x_i}` the
//! components are
//!
//! * `Cᵗ = ξ⁰L + Wφ` (integer) or `Cᵗ = ξ⁰L + φ·₀I_t^{1−α}W + J(W, φ_t)`
//!   (fractional),
//! * `C^{x_i} = ξⁱL + W(∂L/∂u_{x_i} − D_{x_i} ∂L/∂u_{x_i x_i}) + D_{x_i}(W) ∂L/∂u_{x_i x_i}`.
//!
//! Integer laws are certified symbolically on both shells (`u_t = Δu`,
//! `φ_t = −Δφ`). Fractional laws carry nonlocal nodes and are checked by
//! a numeric flux balance in [`flux`].

pub mod flux;
pub mod printed;

use std::fmt;

use serde_json::{json, Value};

use crate::catalog::{HeatEquation, Regime};
use crate::error::{Error, Result};
use crate::expr::{latex_poly, Atom, Field, JetConfig, Poly, Var};
use crate::prolong::{characteristic_of, on_shell_rules};
use crate::vector_fields::VectorField;

pub use flux::{
    flux_balance, quadratic_adjoint, refinement, singular_adjoint, singular_solution, Cell, Fields, FluxReport,
    FluxSettings,
};
pub use printed::{
    check_printed, printed_diff, printed_laws, unprinted, DiffEntry, DiffStatus, Known, PrintedComponent,
    PrintedLaw, PrintedReport,
};

fn u_jet(vars: &[Var]) -> Atom {
    Atom::jet(Field::U, vars)
}

fn phi() -> Poly {
    Poly::atom(Atom::jet(Field::Phi, &[]))
}

fn phi_jet(vars: &[Var]) -> Poly {
    Poly::atom(Atom::jet(Field::Phi, vars))
}

fn involves_alpha(p: &Poly) -> bool {
    p.terms().any(|(_, c)| !c.is_constant())
}

/// Jet cap for conservation work: components reach order two and the
/// divergence, after on-shell substitution, order four.
fn jet_config() -> Result<JetConfig> {
    let cfg = JetConfig::from_env()?;
    Ok(JetConfig::new(cfg.max_order.max(6)))
}

/// `L = φ·(D_t^α u − Σ u_{x_i x_i})`, with `D_t^α u` the jet coordinate `u_t`
/// in the integer regime and an opaque symbol otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalLagrangian {
    pub eq: HeatEquation,
}

impl FormalLagrangian {
    pub fn new(eq: HeatEquation) -> Self {
        FormalLagrangian { eq }
    }

    /// The part of `L` expressible in jet coordinates: all of `L` when
    /// `α = 1`, `−φΔu` otherwise.
    pub fn local(&self) -> Poly {
        let mut p = -(&phi() * &self.eq.laplacian(Field::U));
        if self.eq.regime == Regime::Integer {
            p += &(&phi() * &Poly::atom(u_jet(&[Var::T])));
        }
        p
    }

    /// `∂L/∂(D_t^α u)`.
    pub fn time_coefficient(&self) -> Poly {
        phi()
    }

    pub fn text(&self) -> String {
        let lap: Vec<String> = (1..=self.eq.n)
            .map(|i| {
                let v = Var::space(i);
                u_jet(&[v, v]).to_string()
            })
            .collect();
        let dt = match self.eq.regime {
            Regime::Integer => "u_t",
            Regime::Fractional => "D_t^alpha u",
        };
        format!("phi*({dt} - {})", lap.join(" - "))
    }
}

/// `W = η − ξ⁰u_t − Σ ξⁱ u_{x_i}`, normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct Characteristic {
    pub w: Poly,
}

pub fn characteristic(f: &VectorField) -> Characteristic {
    Characteristic {
        w: characteristic_of(f),
    }
}

/// Nonlocal building blocks of fractional time components.
#[derive(Clone, Debug, PartialEq)]
pub enum Nonlocal {
    /// `coeff · ₀I_t^{1−α}(arg)`
    FracInt { coeff: Poly, arg: Poly },
    /// `J(f, g)`
    J { f: Poly, g: Poly },
}

impl Nonlocal {
    pub fn kind(&self) -> &'static str {
        match self {
            Nonlocal::FracInt { .. } => "frac_int",
            Nonlocal::J { .. } => "J",
        }
    }

    pub fn text(&self) -> String {
        match self {
            Nonlocal::FracInt { coeff, arg } => {
                format!("{}I_t^(1-alpha)[{arg}]", star(factor_text(coeff)))
            }
            Nonlocal::J { f, g } => format!("J[{f}, {g}]"),
        }
    }

    pub fn latex(&self) -> String {
        match self {
            Nonlocal::FracInt { coeff, arg } => format!(
                "{}{{}}_{{0}}I_{{t}}^{{1-\\alpha}}\\left({}\\right)",
                factor_latex(coeff),
                latex_poly(arg)
            ),
            Nonlocal::J { f, g } => {
                format!("J\\left({}, {}\\right)", latex_poly(f), latex_poly(g))
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Nonlocal::FracInt { coeff, arg } => json!({
                "kind": self.kind(),
                "order": "1-alpha",
                "coefficient": coeff.to_string(),
                "argument": arg.to_string(),
            }),
            Nonlocal::J { f, g } => json!({
                "kind": self.kind(),
                "f": f.to_string(),
                "g": g.to_string(),
            }),
        }
    }
}

fn factor_text(p: &Poly) -> String {
    if *p == Poly::one() {
        String::new()
    } else if -p == Poly::one() {
        "-".into()
    } else if p.len() > 1 {
        format!("({p})")
    } else {
        p.to_string()
    }
}

/// `c` → `c*`, leaving the empty and `-` prefixes alone.
fn star(c: String) -> String {
    if c.is_empty() || c == "-" {
        c
    } else {
        c + "*"
    }
}

fn factor_latex(p: &Poly) -> String {
    if *p == Poly::one() {
        String::new()
    } else if -p == Poly::one() {
        "-".into()
    } else if p.len() > 1 {
        format!("\\left({}\\right)", latex_poly(p))
    } else {
        latex_poly(p)
    }
}

/// `lagrangian · L + local + Σ nonlocal`. The Lagrangian coefficient is
/// only kept apart in the fractional regime, where `L` itself is nonlocal.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub lagrangian: Poly,
    pub local: Poly,
    pub nonlocal: Vec<Nonlocal>,
}

impl Component {
    pub fn local(p: Poly) -> Self {
        Component {
            lagrangian: Poly::zero(),
            local: p,
            nonlocal: Vec::new(),
        }
    }

    pub fn is_local(&self) -> bool {
        self.lagrangian.is_zero() && self.nonlocal.is_empty()
    }

    fn pieces(&self, local: String, lag: impl Fn(&Poly) -> String, nl: impl Fn(&Nonlocal) -> String) -> String {
        let mut parts = Vec::new();
        if !self.lagrangian.is_zero() {
            parts.push(lag(&self.lagrangian));
        }
        if !self.local.is_zero() {
            parts.push(local);
        }
        parts.extend(self.nonlocal.iter().map(nl));
        if parts.is_empty() {
            return "0".into();
        }
        let mut s = parts[0].clone();
        for p in &parts[1..] {
            match p.strip_prefix('-') {
                Some(rest) => {
                    s.push_str(" - ");
                    s.push_str(rest);
                }
                None => {
                    s.push_str(" + ");
                    s.push_str(p);
                }
            }
        }
        s
    }

    pub fn text(&self) -> String {
        self.pieces(self.local.to_string(), |c| format!("{}L", star(factor_text(c))), Nonlocal::text)
    }

    pub fn latex(&self) -> String {
        self.pieces(latex_poly(&self.local), |c| format!("{}L", factor_latex(c)), Nonlocal::latex)
    }

    fn scale_add(&self, other: &Component, a: &Poly, b: &Poly) -> Option<Component> {
        if !self.nonlocal.is_empty() || !other.nonlocal.is_empty() {
            return None;
        }
        Some(Component {
            lagrangian: &(a * &self.lagrangian) + &(b * &other.lagrangian),
            local: &(a * &self.local) + &(b * &other.local),
            nonlocal: Vec::new(),
        })
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConservedVector {
    pub symmetry: String,
    pub eq: HeatEquation,
    pub w: Characteristic,
    pub ct: Component,
    pub cx: Vec<Component>,
}

/// Components of the conserved vector attached to `f`.
pub fn conserved_vector(f: &VectorField, eq: &HeatEquation) -> Result<ConservedVector> {
    if f.dim() != eq.n {
        return Err(Error::DimensionMismatch(format!(
            "{} acts in {} dimensions, equation has {}",
            f.name,
            f.dim(),
            eq.n
        )));
    }
    let comps = f.components();
    if eq.regime == Regime::Integer && comps.iter().any(involves_alpha) {
        return Err(Error::InvalidArgument(format!(
            "{} has alpha-dependent coefficients; it belongs to the fractional regime",
            f.name
        )));
    }
    let cfg = jet_config()?;
    let lag = FormalLagrangian::new(*eq);
    let l = lag.local();
    let w = characteristic_of(f);
    let fractional = eq.regime == Regime::Fractional;

    let ct = if fractional {
        Component {
            lagrangian: comps[0].clone(),
            local: Poly::zero(),
            nonlocal: vec![
                Nonlocal::FracInt {
                    coeff: lag.time_coefficient(),
                    arg: w.clone(),
                },
                Nonlocal::J {
                    f: w.clone(),
                    g: phi_jet(&[Var::T]),
                },
            ],
        }
    } else {
        Component::local(&(&comps[0] * &l) + &(&w * &lag.time_coefficient()))
    };

    let mut cx = Vec::with_capacity(eq.n);
    for i in 1..=eq.n {
        let v = Var::space(i);
        let dl_du = l.partial(&u_jet(&[v]));
        let dl_duu = l.partial(&u_jet(&[v, v]));
        let mut p = &w * &(&dl_du - &dl_duu.total(v, &cfg)?);
        p += &(&w.total(v, &cfg)? * &dl_duu);
        cx.push(if fractional {
            Component {
                lagrangian: comps[i].clone(),
                local: p,
                nonlocal: Vec::new(),
            }
        } else {
            Component::local(&(&comps[i] * &l) + &p)
        });
    }
    Ok(ConservedVector {
        symmetry: f.name.clone(),
        eq: *eq,
        w: Characteristic { w },
        ct,
        cx,
    })
}

/// Rules for both shells: `u_t ↦ Δu`, `F_t ↦ ΔF`, `φ_t ↦ −Δφ`.
pub fn both_shells(eq: &HeatEquation) -> Vec<(Atom, Poly)> {
    let mut rules = on_shell_rules(eq);
    rules.push((Atom::jet(Field::Phi, &[Var::T]), -eq.laplacian(Field::Phi)));
    rules
}

/// `D_t Cᵗ + Σ D_{x_i} C^{x_i}` on both shells. Zero certifies the law.
pub fn divergence_onshell_symbolic(cv: &ConservedVector, eq: &HeatEquation) -> Result<Poly> {
    if eq.regime == Regime::Fractional || !cv.ct.is_local() || cv.cx.iter().any(|c| !c.is_local()) {
        return Err(Error::Unsupported(
            "symbolic divergence needs local components; check fractional laws with flux_balance".into(),
        ));
    }
    if cv.cx.len() != eq.n {
        return Err(Error::DimensionMismatch(format!(
            "{} spatial components for n = {}",
            cv.cx.len(),
            eq.n
        )));
    }
    let cfg = jet_config()?;
    let mut d = cv.ct.local.total(Var::T, &cfg)?;
    for (i, c) in cv.cx.iter().enumerate() {
        d += &c.local.total(Var::space(i + 1), &cfg)?;
    }
    d.substitute(&both_shells(eq), &cfg)
}

/// A conserved vector is trivial when every component vanishes on the
/// solutions of the equation.
pub fn is_trivial(cv: &ConservedVector) -> Result<bool> {
    let cfg = jet_config()?;
    let rules = on_shell_rules(&cv.eq);
    let vanishes = |p: &Poly| -> Result<bool> { Ok(p.substitute(&rules, &cfg)?.is_zero()) };
    for c in std::iter::once(&cv.ct).chain(&cv.cx) {
        if !vanishes(&c.local)? {
            return Ok(false);
        }
        for nl in &c.nonlocal {
            let arg = match nl {
                Nonlocal::FracInt { arg, .. } => arg,
                Nonlocal::J { f, .. } => f,
            };
            if !vanishes(arg)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `a·cv₁ + b·cv₂` for local vectors over the same equation.
pub fn combine(a: &Poly, c1: &ConservedVector, b: &Poly, c2: &ConservedVector) -> Option<ConservedVector> {
    if c1.eq != c2.eq || c1.cx.len() != c2.cx.len() {
        return None;
    }
    Some(ConservedVector {
        symmetry: format!("{a}*{} + {b}*{}", c1.symmetry, c2.symmetry),
        eq: c1.eq,
        w: Characteristic {
            w: &(a * &c1.w.w) + &(b * &c2.w.w),
        },
        ct: c1.ct.scale_add(&c2.ct, a, b)?,
        cx: c1
            .cx
            .iter()
            .zip(&c2.cx)
            .map(|(x, y)| x.scale_add(y, a, b))
            .collect::<Option<Vec<_>>>()?,
    })
}

fn component_names(n: usize) -> Vec<String> {
    (1..=n)
        .map(|i| {
            let v = Var::space(i);
            if n <= 4 {
                format!("C{}", v.name(crate::expr::Naming::Letters))
            } else {
                format!("Cx{i}")
            }
        })
        .collect()
}

impl ConservedVector {
    pub fn nonlocal_nodes(&self) -> Vec<&Nonlocal> {
        std::iter::once(&self.ct)
            .chain(&self.cx)
            .flat_map(|c| c.nonlocal.iter())
            .collect()
    }

    pub fn component_names(&self) -> Vec<String> {
        component_names(self.cx.len())
    }

    pub fn to_json(&self, diff: &[DiffEntry]) -> Value {
        json!({
            "symmetry": self.symmetry,
            "W": self.w.w.to_string(),
            "Ct": self.ct.text(),
            "Cx": self.cx.iter().map(Component::text).collect::<Vec<_>>(),
            "nonlocal_nodes": self.nonlocal_nodes().iter().map(|n| n.to_json()).collect::<Vec<_>>(),
            "paper_diff": diff.iter().map(DiffEntry::to_json).collect::<Vec<_>>(),
        })
    }

    /// `eqnarray` block in the customary layout.
    pub fn to_latex(&self) -> String {
        let mut rows = vec![format!("C^{{t}}&=&{}", self.ct.latex())];
        for (i, c) in self.cx.iter().enumerate() {
            let v = Var::space(i + 1);
            let name = if self.cx.len() <= 4 {
                v.name(crate::expr::Naming::Letters)
            } else {
                format!("x_{{{}}}", i + 1)
            };
            rows.push(format!("C^{{{name}}}&=&{}", c.latex()));
        }
        rows.push(format!("W&=&{}", latex_poly(&self.w.w)));
        let body = rows.join(",\\nonumber\\\\\n");
        format!("% {}\n\\begin{{eqnarray}}\n{body}.\n\\end{{eqnarray}}\n", self.symmetry)
    }
}

impl fmt::Display for ConservedVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}:", self.symmetry)?;
        writeln!(f, "  W  = {}", self.w.w)?;
        writeln!(f, "  Ct = {}", self.ct)?;
        for (name, c) in self.component_names().iter().zip(&self.cx) {
            writeln!(f, "  {name} = {c}")?;
        }
        Ok(())
    }
}

/// The adjoint equation of `L` with respect to `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjointEquation {
    pub eq: HeatEquation,
    /// `φ_t + Δφ` (integer); the local part `−Δφ` (fractional)
    pub residual: Poly,
    /// closed form text of the full operator
    pub text: String,
}

impl AdjointEquation {
    /// Residual of a candidate `φ(t, x)` given as a polynomial in `t, x`.
    pub fn residual_of(&self, candidate: &Poly) -> Result<Poly> {
        if self.eq.regime == Regime::Fractional {
            return Err(Error::Unsupported(
                "the fractional adjoint involves a right derivative; check candidates numerically".into(),
            ));
        }
        if candidate.contains_field(Field::U) || candidate.contains_field(Field::Phi) || candidate.contains_field(Field::F) {
            return Err(Error::InvalidArgument("candidate must depend on t and x only".into()));
        }
        let mut r = candidate.partial(&Atom::t());
        for i in 1..=self.eq.n {
            let x = Atom::x(i);
            r += &candidate.partial(&x).partial(&x);
        }
        Ok(r)
    }

    /// Polynomial solutions `1`, `x_i`, `x_i² − 2t` of the backward heat
    /// equation, each confirmed by [`residual_of`](Self::residual_of).
    pub fn verified_family(&self) -> Result<Vec<(String, Poly)>> {
        let mut out = vec![("1".to_string(), Poly::one())];
        for i in 1..=self.eq.n {
            let x = Poly::atom(Atom::x(i));
            out.push((Atom::x(i).to_string(), x.clone()));
            let q = &(&x * &x) - &(&Poly::int(2) * &Poly::atom(Atom::t()));
            out.push((q.to_string(), q));
        }
        for (name, p) in &out {
            if !self.residual_of(p)?.is_zero() {
                return Err(Error::InvalidArgument(format!("{name} does not solve the adjoint equation")));
            }
        }
        Ok(out)
    }
}

pub fn adjoint_residual(eq: &HeatEquation) -> AdjointEquation {
    let lap = eq.laplacian(Field::Phi);
    match eq.regime {
        Regime::Integer => {
            let residual = &phi_jet(&[Var::T]) + &lap;
            AdjointEquation {
                eq: *eq,
                text: format!("{residual}"),
                residual,
            }
        }
        Regime::Fractional => AdjointEquation {
            eq: *eq,
            text: format!("(D_t^alpha)^* phi - ({lap})"),
            residual: -lap,
        },
    }
}

/// Conserved vectors for every generator of a catalog.
pub fn conserved_vectors(gens: &[VectorField], eq: &HeatEquation) -> Result<Vec<ConservedVector>> {
    use rayon::prelude::*;
    gens.par_iter().map(|f| conserved_vector(f, eq)).collect()
}
