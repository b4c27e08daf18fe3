//! Seeded random non-symmetries: catalog generators plus a term from a
//! family that can never satisfy the determining equations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{generators, HeatEquation};
use crate::error::Result;
use crate::expr::Expr;
use crate::vector_fields::VectorField;

/// The added term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Perturbation {
    /// `c x_i^a t^b ∂_t`, `a ≥ 1`: `ξ⁰` may depend on `t` only
    TimeCoefficient { c: i64, axis: usize, a: u32, b: u32 },
    /// `c u² x_i^a ∂_u`: `η` must be linear in `u`
    Quadratic { c: i64, axis: usize, a: u32 },
    /// `c t^b x_i^a u ∂_u`, `a ≥ 1`: leaves a `u_{x_i}` term
    Weight { c: i64, axis: usize, a: u32, b: u32 },
}

fn monomial(c: i64, axis: usize, a: u32, b: u32) -> Expr {
    Expr::int(c as i128) * Expr::x(axis).pow(a) * Expr::t().pow(b)
}

impl Perturbation {
    fn random(rng: &mut ChaCha8Rng, n: usize) -> Self {
        let mut c = 0;
        while c == 0 {
            c = rng.gen_range(-5..=5);
        }
        let axis = rng.gen_range(1..=n);
        let a = rng.gen_range(1..=3);
        let b = rng.gen_range(0..=2);
        match rng.gen_range(0..3) {
            0 => Perturbation::TimeCoefficient { c, axis, a, b },
            1 => Perturbation::Quadratic { c, axis, a: a - 1 },
            _ => Perturbation::Weight { c, axis, a, b },
        }
    }

    fn apply(&self, f: &VectorField) -> VectorField {
        let mut g = f.clone();
        match *self {
            Perturbation::TimeCoefficient { c, axis, a, b } => g.xi0 = &g.xi0 + monomial(c, axis, a, b),
            Perturbation::Quadratic { c, axis, a } => {
                g.eta = &g.eta + monomial(c, axis, a, 0) * Expr::u().pow(2)
            }
            Perturbation::Weight { c, axis, a, b } => g.eta = &g.eta + monomial(c, axis, a, b) * Expr::u(),
        }
        g
    }
}

/// `count` perturbed catalog generators of the integer equation in `n`
/// dimensions, reproducible from `seed`.
pub fn perturbed_fields(n: usize, count: usize, seed: u64) -> Result<Vec<(VectorField, Perturbation)>> {
    let gens = generators(&HeatEquation::integer(n))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|k| {
            let base = &gens[rng.gen_range(0..gens.len())].field;
            let p = Perturbation::random(&mut rng, n);
            let mut f = p.apply(base);
            f.name = format!("{}~{k}", base.name);
            (f, p)
        })
        .collect())
}
