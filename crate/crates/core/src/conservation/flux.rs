//! Numeric flux balance `∮(Cᵗ dx − C^x dt)` of a one-dimensional
//! conserved vector over a cell `[t₁,t₂]×[x₁,x₂]`.
//!
//! The fields `u` and `φ` are given as jet callables. Local parts are
//! evaluated pointwise, `₀I_t^{1−α}` and `D_t^α` by a single-node
//! Grünwald–Letnikov sum with `K` steps on `[0, t]`, and `J` by the graded
//! product rule with `k` nodes per half range. Edge integrals use a fixed
//! Gauss–Legendre rule.

use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::legendre::GaussLegendre;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{Component, ConservedVector, Nonlocal};
use crate::catalog::Regime;
use crate::error::{Error, Result};
use crate::expr::{Atom, Binding, DerivIndex, Field, FieldFn, Poly, Var};
use crate::numerics::{gamma, gl_at, j_quadrature_fn};

/// Integration cell, bounded away from `t = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub t: (f64, f64),
    pub x: (f64, f64),
}

impl Cell {
    pub fn new(t: (f64, f64), x: (f64, f64)) -> Result<Self> {
        if !(t.0 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "cell starts at t = {}; cells touching t = 0 see singular data",
                t.0
            )));
        }
        if !(t.1 > t.0 && x.1 > x.0) || !(t.1.is_finite() && x.0.is_finite() && x.1.is_finite()) {
            return Err(Error::InvalidArgument(format!("empty cell {t:?} x {x:?}")));
        }
        Ok(Cell { t, x })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FluxSettings {
    pub alpha: f64,
    /// right end `T` of the time interval
    pub t_end: f64,
    /// Grünwald–Letnikov steps on `[0, t]`
    pub grid: usize,
    /// `J` nodes per half range
    pub quad: usize,
    /// Gauss–Legendre nodes along each edge
    pub edge_nodes: usize,
    /// exponents handled exactly by the starting weights
    pub starting: Vec<f64>,
}

impl FluxSettings {
    pub fn new(alpha: f64, t_end: f64, grid: usize, quad: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha = {alpha} outside (0, 1)")));
        }
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Error::InvalidArgument(format!("T = {t_end} must be positive")));
        }
        if grid < 4 || quad == 0 {
            return Err(Error::InvalidArgument(format!("grid {grid} and quad {quad} too small")));
        }
        Ok(FluxSettings {
            alpha,
            t_end,
            grid,
            quad,
            edge_nodes: 32,
            starting: vec![alpha - 1.0, 2.0 * alpha - 1.0],
        })
    }

    /// Same settings with `K` and `k` doubled.
    pub fn refined(&self) -> Self {
        FluxSettings {
            grid: 2 * self.grid,
            quad: 2 * self.quad,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FluxReport {
    pub symmetry: String,
    pub cell: Cell,
    pub grid: usize,
    pub quad: usize,
    /// `∫Cᵗ dx` at `t₁` and `t₂`
    pub bottom: f64,
    pub top: f64,
    /// `∫C^x dt` at `x₁` and `x₂`
    pub left: f64,
    pub right: f64,
    /// `top − bottom + right − left`
    pub imbalance: f64,
    /// `imbalance / (|top| + |bottom| + |left| + |right|)`
    pub normalized: f64,
}

impl FluxReport {
    pub fn to_json(&self) -> Value {
        json!({
            "symmetry": self.symmetry,
            "cell": { "t": [self.cell.t.0, self.cell.t.1], "x": [self.cell.x.0, self.cell.x.1] },
            "grid": self.grid,
            "quad": self.quad,
            "edges": { "bottom": self.bottom, "top": self.top, "left": self.left, "right": self.right },
            "imbalance": self.imbalance,
            "normalized": self.normalized,
        })
    }
}

/// `u` and `φ` as jet callables.
#[derive(Clone)]
pub struct Fields {
    pub u: FieldFn,
    pub phi: FieldFn,
}

impl Fields {
    fn binding(&self, t: f64, x: f64) -> Binding {
        Binding::new()
            .point(t, &[x])
            .field(Field::U, self.u.clone())
            .field(Field::Phi, self.phi.clone())
    }

    fn eval(&self, p: &Poly, t: f64, x: f64, alpha: f64) -> Result<f64> {
        p.eval(&self.binding(t, x), alpha)
    }
}

/// `c (a)(a−1)…(a−m+1) s^{a−m}`, the `m`-th derivative of `c s^a`.
fn power_derivative(c: f64, a: f64, m: usize, s: f64) -> f64 {
    let falling: f64 = (0..m).map(|i| a - i as f64).product();
    c * falling * s.powf(a - m as f64)
}

/// `u = t^{α−1}`, a solution of `D_t^α u = u_xx`.
pub fn singular_solution(alpha: f64) -> FieldFn {
    Arc::new(move |j: &DerivIndex, p: &[f64]| {
        if j.order() != j.count(Var::T) {
            return 0.0;
        }
        power_derivative(1.0, alpha - 1.0, j.order(), p[0])
    })
}

/// `φ = (T−t)^{α−1}`.
pub fn singular_adjoint(alpha: f64, t_end: f64) -> FieldFn {
    Arc::new(move |j: &DerivIndex, p: &[f64]| {
        let m = j.count(Var::T);
        if j.order() != m {
            return 0.0;
        }
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        sign * power_derivative(1.0, alpha - 1.0, m, t_end - p[0])
    })
}

/// `φ = x² + 2(T−t)^α/Γ(1+α)`, which solves `ᶜD_{T−}^α φ = φ_xx` with the
/// right Caputo derivative.
pub fn quadratic_adjoint(alpha: f64, t_end: f64) -> FieldFn {
    let c = 2.0 / gamma(1.0 + alpha);
    Arc::new(move |j: &DerivIndex, p: &[f64]| {
        let (m, n) = (j.count(Var::T), j.order() - j.count(Var::T));
        match (m, n) {
            (0, 0) => p[1] * p[1] + c * (t_end - p[0]).powf(alpha),
            (0, 1) => 2.0 * p[1],
            (0, 2) => 2.0,
            (0, _) => 0.0,
            (m, 0) => {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                sign * power_derivative(c, alpha, m, t_end - p[0])
            }
            _ => 0.0,
        }
    })
}

fn edge_rule(n: usize, a: f64, b: f64) -> Result<Vec<(f64, f64)>> {
    let n = NonZeroUsize::new(n).ok_or_else(|| Error::InvalidArgument("edge rule needs nodes".into()))?;
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    Ok(GaussLegendre::new(n)
        .as_node_weight_pairs()
        .iter()
        .map(|(x, w)| (m + r * x, r * w))
        .collect())
}

struct Evaluator<'a> {
    fields: &'a Fields,
    s: &'a FluxSettings,
    laplacian: Poly,
}

impl Evaluator<'_> {
    /// Samples of `p(τ, x)` at `τ_j = j t / K`, the `τ = 0` entry left at 0.
    fn series(&self, p: &Poly, t: f64, x: f64) -> Result<(Vec<f64>, f64)> {
        let k = self.s.grid;
        let h = t / k as f64;
        let mut v = vec![0.0; k + 1];
        for (j, o) in v.iter_mut().enumerate().skip(1) {
            *o = self.fields.eval(p, j as f64 * h, x, self.s.alpha)?;
        }
        Ok((v, h))
    }

    /// `L = φ·(D_t^α u − u_xx)` at `(t, x)`.
    fn lagrangian(&self, t: f64, x: f64) -> Result<f64> {
        let a = self.s.alpha;
        let (v, h) = self.series(&Poly::atom(Atom::u()), t, x)?;
        let d = gl_at(&v, a, h, &self.s.starting)?;
        let phi = self.fields.eval(&Poly::atom(Atom::jet(Field::Phi, &[])), t, x, a)?;
        Ok(phi * (d - self.fields.eval(&self.laplacian, t, x, a)?))
    }

    fn component(&self, c: &Component, t: f64, x: f64) -> Result<f64> {
        let a = self.s.alpha;
        let mut v = self.fields.eval(&c.local, t, x, a)?;
        if !c.lagrangian.is_zero() {
            v += self.fields.eval(&c.lagrangian, t, x, a)? * self.lagrangian(t, x)?;
        }
        for nl in &c.nonlocal {
            v += match nl {
                Nonlocal::FracInt { coeff, arg } => {
                    let (series, h) = self.series(arg, t, x)?;
                    self.fields.eval(coeff, t, x, a)? * gl_at(&series, a - 1.0, h, &self.s.starting)?
                }
                Nonlocal::J { f, g } => {
                    let fv = |tau: f64| self.fields.eval(f, tau, x, a).unwrap_or(f64::NAN);
                    let gv = |mu: f64| self.fields.eval(g, mu, x, a).unwrap_or(f64::NAN);
                    let j = j_quadrature_fn(fv, gv, a, t, self.s.t_end, self.s.quad)?;
                    if !j.is_finite() {
                        return Err(Error::NonFinite(format!("J at t = {t}, x = {x}")));
                    }
                    j
                }
            };
        }
        Ok(v)
    }

    /// Nodes run in parallel; the sum is taken in node order so results
    /// do not depend on scheduling.
    fn edge(&self, c: &Component, nodes: &[(f64, f64)], at: impl Fn(f64) -> (f64, f64) + Sync) -> Result<f64> {
        let terms: Vec<f64> = nodes
            .par_iter()
            .map(|&(s, w)| {
                let (t, x) = at(s);
                Ok(w * self.component(c, t, x)?)
            })
            .collect::<Result<_>>()?;
        Ok(terms.iter().sum())
    }
}

/// Flux balance of a one-dimensional conserved vector over `cell`.
pub fn flux_balance(cv: &ConservedVector, fields: &Fields, cell: &Cell, s: &FluxSettings) -> Result<FluxReport> {
    if cv.eq.n != 1 || cv.cx.len() != 1 {
        return Err(Error::Unsupported(format!(
            "flux balance is implemented for n = 1, got n = {}",
            cv.eq.n
        )));
    }
    let cell = Cell::new(cell.t, cell.x)?;
    if cell.t.1 >= s.t_end {
        return Err(Error::InvalidArgument(format!(
            "cell ends at t = {}, beyond T = {}",
            cell.t.1, s.t_end
        )));
    }
    if cv.eq.regime == Regime::Integer && !cv.nonlocal_nodes().is_empty() {
        return Err(Error::InvalidArgument("integer law with nonlocal nodes".into()));
    }
    let ev = Evaluator {
        fields,
        s,
        laplacian: cv.eq.laplacian(Field::U),
    };
    let xs = edge_rule(s.edge_nodes, cell.x.0, cell.x.1)?;
    let ts = edge_rule(s.edge_nodes, cell.t.0, cell.t.1)?;
    let (ct, cx) = (&cv.ct, &cv.cx[0]);
    let bottom = ev.edge(ct, &xs, |x| (cell.t.0, x))?;
    let top = ev.edge(ct, &xs, |x| (cell.t.1, x))?;
    let left = ev.edge(cx, &ts, |t| (t, cell.x.0))?;
    let right = ev.edge(cx, &ts, |t| (t, cell.x.1))?;
    let imbalance = top - bottom + right - left;
    let scale = top.abs() + bottom.abs() + left.abs() + right.abs();
    let normalized = if scale > 0.0 { imbalance.abs() / scale } else { imbalance.abs() };
    Ok(FluxReport {
        symmetry: cv.symmetry.clone(),
        cell,
        grid: s.grid,
        quad: s.quad,
        bottom,
        top,
        left,
        right,
        imbalance,
        normalized,
    })
}

/// Reports at `levels` successive doublings of `K` and `k`.
pub fn refinement(
    cv: &ConservedVector,
    fields: &Fields,
    cell: &Cell,
    s: &FluxSettings,
    levels: usize,
) -> Result<Vec<FluxReport>> {
    let mut out = Vec::with_capacity(levels);
    let mut cur = s.clone();
    for _ in 0..levels {
        out.push(flux_balance(cv, fields, cell, &cur)?);
        cur = cur.refined();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{fields as catalog_fields, generators, HeatEquation};
    use crate::conservation::conserved_vector;

    fn homogeneity() -> ConservedVector {
        let eq = HeatEquation::fractional(1);
        let gens = catalog_fields(&generators(&eq).unwrap());
        let g = gens.iter().find(|g| g.name == "G03").unwrap();
        conserved_vector(g, &eq).unwrap()
    }

    fn companion(alpha: f64, t_end: f64) -> Fields {
        Fields {
            u: singular_solution(alpha),
            phi: quadratic_adjoint(alpha, t_end),
        }
    }

    #[test]
    fn constant_vector_balances_exactly() {
        let mut cv = homogeneity();
        cv.ct = Component::local(Poly::one());
        cv.cx = vec![Component::local(Poly::zero())];
        let cell = Cell::new((0.5, 1.0), (0.0, 1.0)).unwrap();
        let s = FluxSettings::new(0.5, 2.0, 16, 8).unwrap();
        let r = flux_balance(&cv, &companion(0.5, 2.0), &cell, &s).unwrap();
        assert_eq!(r.imbalance, 0.0);
        assert_eq!((r.top, r.bottom), (1.0, 1.0));
    }

    #[test]
    fn companion_fields_are_consistent() {
        // ᶜD_{T−}^α of 2(T−t)^α/Γ(1+α) is 2, matching φ_xx
        let (alpha, t_end) = (0.5, 2.0);
        let phi = quadratic_adjoint(alpha, t_end);
        let d = |vars: &[Var]| DerivIndex::new(vars.to_vec());
        let p = [0.7, 0.3];
        assert!((phi(&d(&[]), &p) - (0.09 + 2.0 * 1.3f64.sqrt() / gamma(1.5))).abs() < 1e-14);
        assert_eq!(phi(&d(&[Var(1), Var(1)]), &p), 2.0);
        let h = 1e-6;
        let fd = (phi(&d(&[]), &[p[0] + h, p[1]]) - phi(&d(&[]), &[p[0] - h, p[1]])) / (2.0 * h);
        assert!((fd - phi(&d(&[Var::T]), &p)).abs() < 1e-6);
        let u = singular_solution(alpha);
        assert!((u(&d(&[Var::T]), &p) + 0.5 * 0.7f64.powf(-1.5)).abs() < 1e-12);
    }

    #[test]
    fn companion_balances_and_refines() {
        let cv = homogeneity();
        let cell = Cell::new((0.5, 1.0), (0.0, 1.0)).unwrap();
        let s = FluxSettings::new(0.5, 2.0, 500, 32).unwrap();
        let r = refinement(&cv, &companion(0.5, 2.0), &cell, &s, 2).unwrap();
        assert!(r[0].normalized < 1e-2, "{:?}", r[0]);
        assert!(r[1].normalized < r[0].normalized, "{:?}", r);
    }

    #[test]
    fn corrupted_time_component_does_not_refine_away() {
        let mut cv = homogeneity();
        for nl in &mut cv.ct.nonlocal {
            if let Nonlocal::J { f, .. } = nl {
                *f = -&*f;
            }
        }
        let cell = Cell::new((0.5, 1.0), (0.0, 1.0)).unwrap();
        let s = FluxSettings::new(0.5, 2.0, 500, 32).unwrap();
        let r = refinement(&cv, &companion(0.5, 2.0), &cell, &s, 2).unwrap();
        assert!(r[0].normalized > 1e-2, "{:?}", r[0]);
        assert!(r[1].normalized > 0.9 * r[0].normalized, "{r:?}");
    }

    #[test]
    fn singular_adjoint_makes_j_diverge() {
        // φ_t ~ (T−t)^{α−2} is not integrable at T, so J grows with k
        let cv = homogeneity();
        let fields = Fields {
            u: singular_solution(0.5),
            phi: singular_adjoint(0.5, 2.0),
        };
        let cell = Cell::new((0.5, 1.0), (0.0, 1.0)).unwrap();
        let s = FluxSettings::new(0.5, 2.0, 200, 16).unwrap();
        let r = refinement(&cv, &fields, &cell, &s, 2).unwrap();
        assert!(r[1].top.abs() > 2.0 * r[0].top.abs(), "{r:?}");
    }

    #[test]
    fn rejects_bad_cells() {
        assert!(Cell::new((0.0, 1.0), (0.0, 1.0)).is_err());
        assert!(Cell::new((0.5, 0.5), (0.0, 1.0)).is_err());
        let cv = homogeneity();
        let cell = Cell::new((0.5, 2.5), (0.0, 1.0)).unwrap();
        let s = FluxSettings::new(0.5, 2.0, 16, 8).unwrap();
        assert!(flux_balance(&cv, &companion(0.5, 2.0), &cell, &s).is_err());
    }
}
