//! Closed-form one-parameter groups generated by catalog fields.
//!
//! Fields affine in `(t, x)` with `η = c u` (translations, rotations,
//! dilations, homogeneity) flow by a matrix exponential. The Galilean
//! boosts and the projective field have the classical closed forms
//!
//! * `2t∂_{x_i} − u x_i ∂_u`: `x̃_i = x_i + 2εt`, `ũ = u e^{−εx_i − ε²t}`;
//! * `4t²∂_t + 4t x·∂_x − u(2nt + |x|²)∂_u`: with `d = 1 − 4εt`,
//!   `t̃ = t/d`, `x̃ = x/d`, `ũ = u d^{n/2} e^{−ε|x|²/d}` (defined for `d > 0`).

use crate::catalog::{GeneratorClass, NamedGenerator};
use crate::error::{Error, Result};
use crate::expr::{Atom, Field, Poly, Var};
use crate::vector_fields::VectorField;

#[derive(Clone, Debug, PartialEq)]
enum FlowKind {
    /// `d/dε (t, x, 1) = M (t, x, 1)`, `d/dε u = rate · u`
    Affine { m: Vec<Vec<f64>>, rate: f64 },
    Galilean { axis: usize, c: f64 },
    Projective { c: f64 },
}

/// The finite transformation `exp(ε X)` of a generator `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointTransformation {
    pub name: String,
    pub n: usize,
    pub eps: f64,
    kind: FlowKind,
}

type Point = (f64, Vec<f64>, f64);

impl PointTransformation {
    /// The same group at another parameter value.
    pub fn at(&self, eps: f64) -> Self {
        PointTransformation {
            eps,
            ..self.clone()
        }
    }

    /// `(t, x, u) ↦ (t̃, x̃, ũ)`.
    pub fn forward(&self, t: f64, x: &[f64], u: f64) -> Result<Point> {
        self.map(self.eps, t, x, u)
    }

    /// Inverse map, i.e. the flow at `−ε`.
    pub fn inverse(&self, t: f64, x: &[f64], u: f64) -> Result<Point> {
        self.map(-self.eps, t, x, u)
    }

    /// Flow at an arbitrary parameter.
    pub fn map(&self, eps: f64, t: f64, x: &[f64], u: f64) -> Result<Point> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{}: point with {} coordinates, expected {}",
                self.name,
                x.len(),
                self.n
            )));
        }
        match &self.kind {
            FlowKind::Affine { m, rate } => {
                let e = expm(m, eps);
                let mut y = Vec::with_capacity(self.n + 2);
                y.push(t);
                y.extend_from_slice(x);
                y.push(1.0);
                let z: Vec<f64> = e
                    .iter()
                    .map(|row| row.iter().zip(&y).map(|(a, b)| a * b).sum())
                    .collect();
                Ok((z[0], z[1..=self.n].to_vec(), u * (rate * eps).exp()))
            }
            FlowKind::Galilean { axis, c } => {
                let e = c * eps;
                let mut xt = x.to_vec();
                xt[*axis - 1] += 2.0 * e * t;
                let ut = u * (-e * x[*axis - 1] - e * e * t).exp();
                Ok((t, xt, ut))
            }
            FlowKind::Projective { c } => {
                let e = c * eps;
                let d = 1.0 - 4.0 * e * t;
                if !(d > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "projective flow undefined at t = {t}, eps = {eps} (1 - 4 eps t <= 0)"
                    )));
                }
                let r2: f64 = x.iter().map(|v| v * v).sum();
                let ut = u * d.powf(self.n as f64 / 2.0) * (-e * r2 / d).exp();
                Ok((t / d, x.iter().map(|v| v / d).collect(), ut))
            }
        }
    }
}

/// `exp(ε M)` by scaling and squaring of a Taylor polynomial.
fn expm(m: &[Vec<f64>], eps: f64) -> Vec<Vec<f64>> {
    let n = m.len();
    let norm = m
        .iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        * eps.abs();
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = eps / 2f64.powi(s as i32);
    let a: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|v| v * scale).collect()).collect();
    let ident = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let mut out: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| ident(i, j)).collect()).collect();
    let mut term = out.clone();
    for k in 1..=24 {
        term = matmul(&term, &a);
        for r in term.iter_mut() {
            for v in r.iter_mut() {
                *v /= k as f64;
            }
        }
        for i in 0..n {
            for j in 0..n {
                out[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..s {
        out = matmul(&out, &out);
    }
    out
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

fn unsupported(f: &VectorField, why: &str) -> Error {
    Error::Unsupported(format!("no closed-form flow for {}: {why}", f.name))
}

/// Coefficients of an affine function of `(t, x_1..x_n)`: `[c_t, c_1..c_n, c_0]`.
fn affine_row(p: &Poly, n: usize, alpha: f64, f: &VectorField) -> Result<Vec<f64>> {
    let mut row = vec![0.0; n + 2];
    for (m, c) in p.terms() {
        let v = c.eval(alpha);
        match m.factors() {
            [] => row[n + 1] += v,
            [(Atom::Var(var), 1)] => row[var.0 as usize] += v,
            _ => return Err(unsupported(f, "coefficients are not affine in (t, x)")),
        }
    }
    Ok(row)
}

fn affine_flow(f: &VectorField, alpha: f64) -> Result<FlowKind> {
    let n = f.dim();
    let comps = f.components();
    let mut m = Vec::with_capacity(n + 2);
    for c in &comps[..=n] {
        m.push(affine_row(c, n, alpha, f)?);
    }
    m.push(vec![0.0; n + 2]);
    let u = Poly::atom(Atom::u());
    let mut rate = 0.0;
    for (mono, c) in comps[n + 1].terms() {
        if Poly::term(mono.clone(), c.clone()) != u.scale(c) {
            return Err(unsupported(f, "eta is not a constant multiple of u"));
        }
        rate += c.eval(alpha);
    }
    Ok(FlowKind::Affine { m, rate })
}

fn galilean(n: usize, axis: usize) -> VectorField {
    let mut xi = vec!["0".to_string(); n];
    xi[axis - 1] = "2*t".into();
    let xs: Vec<&str> = xi.iter().map(String::as_str).collect();
    let eta = format!("-u*{}", Var::space(axis).name(naming(n)));
    VectorField::parse("gal", "0", &xs, &eta).expect("galilean field parses")
}

fn projective(n: usize) -> VectorField {
    let names: Vec<String> = (1..=n).map(|i| Var::space(i).name(naming(n))).collect();
    let xi: Vec<String> = names.iter().map(|x| format!("4*t*{x}")).collect();
    let xs: Vec<&str> = xi.iter().map(String::as_str).collect();
    let r2: Vec<String> = names.iter().map(|x| format!("{x}^2")).collect();
    let eta = format!("-u*({}*t + {})", 2 * n, r2.join(" + "));
    VectorField::parse("proj", "4*t^2", &xs, &eta).expect("projective field parses")
}

fn naming(n: usize) -> crate::expr::Naming {
    if n > 4 {
        crate::expr::Naming::Numbered
    } else {
        crate::expr::Naming::Letters
    }
}

/// Rational multiple `c` with `f = c · model`, if any.
fn multiple_of(f: &VectorField, model: &VectorField) -> Option<f64> {
    let fc = f.components();
    let mc = model.components();
    let mut c = None;
    for (a, b) in fc.iter().zip(&mc) {
        if b.is_zero() {
            if !a.is_zero() {
                return None;
            }
            continue;
        }
        let k = a.is_rational_multiple_of(b)?;
        match c {
            None => c = Some(k),
            Some(prev) if prev == k => {}
            _ => return None,
        }
    }
    c.map(|k| *k.numer() as f64 / *k.denom() as f64)
}

/// Flow of a field, recognised by shape. `alpha` evaluates symbolic
/// coefficients of the fractional dilation.
pub fn exponentiate_field(f: &VectorField, eps: f64, alpha: f64) -> Result<PointTransformation> {
    if f.components().iter().any(|c| c.contains_field(Field::F)) {
        return Err(unsupported(f, "the infinite family has no finite flow without a chosen solution"));
    }
    let n = f.dim();
    let kind = if let Ok(k) = affine_flow(f, alpha) {
        k
    } else if let Some((axis, c)) = (1..=n).find_map(|i| multiple_of(f, &galilean(n, i)).map(|c| (i, c))) {
        FlowKind::Galilean { axis, c }
    } else if let Some(c) = multiple_of(f, &projective(n)) {
        FlowKind::Projective { c }
    } else {
        return Err(unsupported(f, "not affine, Galilean or projective"));
    };
    Ok(PointTransformation {
        name: f.name.clone(),
        n,
        eps,
        kind,
    })
}

/// Flow of a catalog generator.
pub fn exponentiate_catalog(g: &NamedGenerator, eps: f64, alpha: f64) -> Result<PointTransformation> {
    if g.class == GeneratorClass::Infinite {
        return Err(unsupported(&g.field, "infinite class"));
    }
    exponentiate_field(&g.field, eps, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{generators, HeatEquation, Regime};

    #[test]
    fn translation_and_rotation() {
        let eq = HeatEquation::fractional(2);
        let gens = generators(&eq).unwrap();
        let dx = exponentiate_catalog(&gens[0], 0.3, 0.5).unwrap();
        let (t, x, u) = dx.forward(1.0, &[0.5, 0.25], 2.0).unwrap();
        assert!((t - 1.0).abs() < 1e-15 && (x[0] - 0.8).abs() < 1e-15 && x[1] == 0.25 && u == 2.0);
        let rot = exponentiate_catalog(&gens[2], 0.4, 0.5).unwrap();
        let (_, x, _) = rot.forward(1.0, &[1.0, 2.0], 1.0).unwrap();
        let (c, s) = (0.4f64.cos(), 0.4f64.sin());
        assert!((x[0] - (c + 2.0 * s)).abs() < 1e-14);
        assert!((x[1] - (-s + 2.0 * c)).abs() < 1e-14);
    }

    #[test]
    fn galilean_closed_form() {
        let gens = generators(&HeatEquation::integer(1)).unwrap();
        let g = exponentiate_catalog(&gens[1], 0.2, 1.0).unwrap();
        let (t, x, u) = g.forward(0.7, &[0.3], 1.5).unwrap();
        assert_eq!(t, 0.7);
        assert!((x[0] - (0.3 + 0.4 * 0.7)).abs() < 1e-15);
        assert!((u - 1.5 * (-0.2 * 0.3 - 0.04 * 0.7f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn fractional_dilation_rates() {
        let gens = generators(&HeatEquation::fractional(1)).unwrap();
        let d = exponentiate_catalog(&gens[1], 0.1, 0.5).unwrap();
        let (t, x, _) = d.forward(1.0, &[1.0], 1.0).unwrap();
        assert!((t - 0.2f64.exp()).abs() < 1e-14);
        assert!((x[0] - 0.05f64.exp()).abs() < 1e-14);
    }

    #[test]
    fn group_law_and_inverse() {
        for n in 1..=3 {
            for regime in [Regime::Integer, Regime::Fractional] {
                let eq = HeatEquation::new(n, regime).unwrap();
                for g in generators(&eq).unwrap() {
                    if g.class == GeneratorClass::Infinite {
                        assert!(exponentiate_catalog(&g, 0.1, 0.5).is_err());
                        continue;
                    }
                    let tr = exponentiate_catalog(&g, 0.07, 0.5).unwrap();
                    let x: Vec<f64> = (0..n).map(|i| 0.3 - 0.2 * i as f64).collect();
                    let a = tr.map(0.05, 0.4, &x, 1.3).unwrap();
                    let b = tr.map(0.07, a.0, &a.1, a.2).unwrap();
                    let c = tr.map(0.12, 0.4, &x, 1.3).unwrap();
                    assert!((b.0 - c.0).abs() < 1e-9 && (b.2 - c.2).abs() < 1e-9, "{}", g.name());
                    for (p, q) in b.1.iter().zip(&c.1) {
                        assert!((p - q).abs() < 1e-9);
                    }
                    let f = tr.forward(0.4, &x, 1.3).unwrap();
                    let back = tr.inverse(f.0, &f.1, f.2).unwrap();
                    assert!((back.0 - 0.4).abs() < 1e-12 && (back.2 - 1.3).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn projective_singularity_reported() {
        let gens = generators(&HeatEquation::integer(1)).unwrap();
        let p = exponentiate_catalog(&gens[4], 0.5, 1.0).unwrap();
        assert!(p.forward(1.0, &[0.0], 1.0).is_err());
        assert!(p.forward(0.1, &[0.0], 1.0).is_ok());
    }
}
