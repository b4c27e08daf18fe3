//! Numeric evaluation of expressions.

use std::collections::HashMap;
use std::sync::Arc;

use super::atom::{Atom, DerivIndex, Field, Var};
use super::poly::Poly;
use super::ring::rational_to_f64;
use super::Expr;
use crate::error::{Error, Result};

/// Callable giving `∂_J f` at a point `(t, x_1, …, x_n)`.
pub type FieldFn = Arc<dyn Fn(&DerivIndex, &[f64]) -> f64 + Send + Sync>;

/// Values for independent variables and jet coordinates. A field may
/// instead be bound to a callable, which is then queried at the point
/// given by the bound independent variables.
#[derive(Clone, Default)]
pub struct Binding {
    values: HashMap<Atom, f64>,
    fields: HashMap<Field, FieldFn>,
}

impl Binding {
    pub fn new() -> Self {
        Binding::default()
    }

    pub fn set(mut self, a: Atom, v: f64) -> Self {
        self.values.insert(a, v);
        self
    }

    pub fn var(self, v: Var, val: f64) -> Self {
        self.set(Atom::Var(v), val)
    }

    /// Bind `t` and `x_1..x_n` at once.
    pub fn point(mut self, t: f64, x: &[f64]) -> Self {
        self.values.insert(Atom::t(), t);
        for (i, xi) in x.iter().enumerate() {
            self.values.insert(Atom::x(i + 1), *xi);
        }
        self
    }

    pub fn field(mut self, f: Field, g: FieldFn) -> Self {
        self.fields.insert(f, g);
        self
    }

    pub fn get(&self, a: &Atom) -> Result<f64> {
        if let Some(v) = self.values.get(a) {
            return Ok(*v);
        }
        if let Atom::Jet(f, j) = a {
            if let Some(g) = self.fields.get(f) {
                let dim = self
                    .values
                    .keys()
                    .filter_map(|k| match k {
                        Atom::Var(v) if !v.is_time() => Some(v.0 as usize),
                        _ => None,
                    })
                    .max()
                    .unwrap_or(0);
                let mut pt = Vec::with_capacity(dim + 1);
                for i in 0..=dim {
                    let key = Atom::Var(Var(i as u8));
                    pt.push(
                        *self
                            .values
                            .get(&key)
                            .ok_or_else(|| Error::UnboundSymbol(key.to_string()))?,
                    );
                }
                return Ok(g(j, &pt));
            }
        }
        Err(Error::UnboundSymbol(a.to_string()))
    }
}

impl std::fmt::Debug for Binding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Binding")
            .field("values", &self.values)
            .field("fields", &self.fields.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl Poly {
    pub fn eval(&self, b: &Binding, alpha: f64) -> Result<f64> {
        let mut cache: HashMap<&Atom, f64> = HashMap::new();
        let mut acc = 0.0;
        for (m, c) in self.terms() {
            let mut term = c.eval(alpha);
            for (a, e) in m.factors() {
                let v = match cache.get(a) {
                    Some(v) => *v,
                    None => {
                        let v = b.get(a)?;
                        cache.insert(a, v);
                        v
                    }
                };
                term *= v.powi(*e as i32);
            }
            acc += term;
        }
        if acc.is_finite() {
            Ok(acc)
        } else {
            Err(Error::NonFinite(format!("evaluating {self}")))
        }
    }
}

/// Evaluate `e` with α replaced by `alpha`.
pub fn eval_numeric(e: &Expr, b: &Binding, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} outside (0, 1]")));
    }
    eval_tree(e, b, alpha)
}

fn eval_tree(e: &Expr, b: &Binding, alpha: f64) -> Result<f64> {
    let v = match e {
        Expr::Num(c) => rational_to_f64(c),
        Expr::Alpha => alpha,
        Expr::Atom(a) => b.get(a)?,
        Expr::Sum(v) => v.iter().map(|t| eval_tree(t, b, alpha)).sum::<Result<f64>>()?,
        Expr::Product(v) => v
            .iter()
            .map(|t| eval_tree(t, b, alpha))
            .product::<Result<f64>>()?,
        Expr::Pow(base, k) => eval_tree(base, b, alpha)?.powi(*k as i32),
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(format!("evaluating {e}")))
    }
}
