//! Second prolongation and the determining equations of the integer-order
//! heat equation, closed-form flows of the catalog generators, and
//! randomized non-symmetries used as negative controls.

mod flow;
mod perturb;

use std::collections::BTreeMap;

use crate::catalog::{HeatEquation, Regime};
use crate::error::{Error, Result};
use crate::expr::{Atom, DerivIndex, Field, JetConfig, Poly, Var};
use crate::vector_fields::VectorField;

pub use flow::{exponentiate_catalog, exponentiate_field, PointTransformation};
pub use perturb::{perturbed_fields, Perturbation};

/// A point field together with its first and second prolongation
/// coefficients `η^t`, `η^{x_i}`, `η^{x_i x_j}` (`i ≤ j`).
#[derive(Clone, Debug)]
pub struct ProlongedField {
    pub base: VectorField,
    pub eta_t: Poly,
    pub eta_x: Vec<Poly>,
    pub eta_xx: BTreeMap<(usize, usize), Poly>,
}

/// `W = η − ξ⁰u_t − Σ ξⁱ u_{x_i}`.
pub fn characteristic_of(f: &VectorField) -> Poly {
    let comps = f.components();
    let n = f.dim();
    let mut w = comps[n + 1].clone();
    w -= &(&comps[0] * &Poly::atom(Atom::jet(Field::U, &[Var::T])));
    for i in 1..=n {
        w -= &(&comps[i] * &Poly::atom(Atom::jet(Field::U, &[Var::space(i)])));
    }
    w
}

/// `η^J = D_J W + ξ⁰ u_{Jt} + Σ ξⁱ u_{J x_i}`.
fn eta_j(f: &VectorField, w: &Poly, idx: &[Var], cfg: &JetConfig) -> Result<Poly> {
    let comps = f.components();
    let mut out = w.total_multi(&DerivIndex::new(idx.to_vec()), cfg)?;
    let base = DerivIndex::new(idx.to_vec());
    for (k, c) in comps[..=f.dim()].iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let v = if k == 0 { Var::T } else { Var::space(k) };
        let jet = Atom::Jet(Field::U, base.with(v));
        out += &(c * &Poly::atom(jet));
    }
    Ok(out)
}

pub fn prolong2_with(f: &VectorField, eq: &HeatEquation, cfg: &JetConfig) -> Result<ProlongedField> {
    if f.dim() != eq.n {
        return Err(Error::DimensionMismatch(format!(
            "{} acts in {} dimensions, equation has {}",
            f.name,
            f.dim(),
            eq.n
        )));
    }
    if !f.is_point_field() {
        return Err(Error::InvalidArgument(format!(
            "{} is not a point field: coefficients may depend on t, x and u only",
            f.name
        )));
    }
    let w = characteristic_of(f);
    let eta_t = eta_j(f, &w, &[Var::T], cfg)?;
    let eta_x = (1..=eq.n)
        .map(|i| eta_j(f, &w, &[Var::space(i)], cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut eta_xx = BTreeMap::new();
    for i in 1..=eq.n {
        for j in i..=eq.n {
            eta_xx.insert((i, j), eta_j(f, &w, &[Var::space(i), Var::space(j)], cfg)?);
        }
    }
    Ok(ProlongedField {
        base: f.clone(),
        eta_t,
        eta_x,
        eta_xx,
    })
}

pub fn prolong2(f: &VectorField, eq: &HeatEquation) -> Result<ProlongedField> {
    prolong2_with(f, eq, &JetConfig::default())
}

/// Substitution rules `u_t ↦ Δu` and `F_t ↦ ΔF` (`F` is itself a solution).
pub fn on_shell_rules(eq: &HeatEquation) -> Vec<(Atom, Poly)> {
    [Field::U, Field::F]
        .into_iter()
        .map(|fld| (Atom::jet(fld, &[Var::T]), eq.laplacian(fld)))
        .collect()
}

/// `pr⁽²⁾f (u_t − Δu)` restricted to solutions. Zero exactly when `f` is a
/// Lie point symmetry.
pub fn determining_residual_with(f: &VectorField, eq: &HeatEquation, cfg: &JetConfig) -> Result<Poly> {
    if eq.regime == Regime::Fractional {
        return Err(Error::Unsupported(
            "determining equations are implemented for the integer regime only; verify \
             fractional generators numerically with invariance_check"
                .into(),
        ));
    }
    let p = prolong2_with(f, eq, cfg)?;
    let mut r = p.eta_t.clone();
    for i in 1..=eq.n {
        r -= &p.eta_xx[&(i, i)];
    }
    r.substitute(&on_shell_rules(eq), cfg)
}

pub fn determining_residual(f: &VectorField, eq: &HeatEquation) -> Result<Poly> {
    determining_residual_with(f, eq, &JetConfig::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{generators, HeatEquation};
    use crate::expr::parse;

    fn p(s: &str) -> Poly {
        parse(s).unwrap().to_poly()
    }

    #[test]
    fn translation_and_scaling_prolong_trivially() {
        let eq = HeatEquation::integer(1);
        let dx = VectorField::parse("dx", "0", &["1"], "0").unwrap();
        let pr = prolong2(&dx, &eq).unwrap();
        assert!(pr.eta_t.is_zero() && pr.eta_x[0].is_zero() && pr.eta_xx[&(1, 1)].is_zero());
        let hom = VectorField::parse("h", "0", &["0"], "u").unwrap();
        let pr = prolong2(&hom, &eq).unwrap();
        assert_eq!(pr.eta_t, p("u_t"));
        assert_eq!(pr.eta_xx[&(1, 1)], p("u_{xx}"));
    }

    #[test]
    fn galilean_fixture() {
        let eq = HeatEquation::integer(1);
        let g2 = VectorField::parse("G2", "0", &["2*t"], "-u*x").unwrap();
        let pr = prolong2(&g2, &eq).unwrap();
        assert_eq!(pr.eta_t, p("-x*u_t - 2*u_x"));
        assert_eq!(pr.eta_x[0], p("-u - x*u_x"));
        assert_eq!(pr.eta_xx[&(1, 1)], p("-x*u_{xx} - 2*u_x"));
    }

    #[test]
    fn catalog_generators_are_symmetries() {
        for n in 1..=3 {
            let eq = HeatEquation::integer(n);
            for g in generators(&eq).unwrap() {
                let r = determining_residual(&g.field, &eq).unwrap();
                assert!(r.is_zero(), "{}: {r}", g.name());
            }
        }
    }

    #[test]
    fn negative_control_and_fractional_rejection() {
        let eq = HeatEquation::integer(1);
        // x is itself a solution, so dx + x du is a symmetry; x^2 is not
        let sup = VectorField::parse("sup", "0", &["1"], "x").unwrap();
        assert!(determining_residual(&sup, &eq).unwrap().is_zero());
        let bad = VectorField::parse("bad", "0", &["1"], "x^2").unwrap();
        assert_eq!(determining_residual(&bad, &eq).unwrap(), p("-2"));
        let err = determining_residual(&bad, &HeatEquation::fractional(1)).unwrap_err();
        assert!(err.to_string().contains("invariance_check"));
        let jetty = VectorField::parse("j", "0", &["u_x"], "0").unwrap();
        assert!(prolong2(&jetty, &eq).is_err());
    }
}
