//! Closed-form solutions used to test transformations and residuals.

use super::{HeatEquation, Regime};
use crate::error::Result;
use crate::expr::{parse, Expr};
use crate::numerics::mittag_leffler;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SolutionKind {
    Constant,
    Linear,
    /// `x_1² + 2t`
    Quadratic,
    /// `e^{t + x_1}`
    Exponential,
    /// `t^{−n/2} e^{−|x|²/4t}`
    HeatKernel,
    /// `t^{α−1}`
    RlKernel,
    /// `x_1 t^{α−1}`
    LinearRlKernel,
    /// `t^{α−1} E_{α,α}(−k² t^α) cos(k x_1)`
    Eigen { k: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactSolution {
    pub kind: SolutionKind,
    pub formula: String,
    /// polynomial solutions also come as expressions
    pub expr: Option<Expr>,
    pub note: String,
}

impl ExactSolution {
    fn new(kind: SolutionKind, formula: &str, poly: bool, note: &str) -> Self {
        ExactSolution {
            kind,
            formula: formula.to_string(),
            expr: poly.then(|| parse(formula).expect("solution formula parses")),
            note: note.to_string(),
        }
    }

    /// Value at `(t, x)`; `alpha` is ignored in the integer regime.
    pub fn eval(&self, alpha: f64, t: f64, x: &[f64]) -> Result<f64> {
        let x1 = x.first().copied().unwrap_or(0.0);
        Ok(match self.kind {
            SolutionKind::Constant => 1.0,
            SolutionKind::Linear => x1,
            SolutionKind::Quadratic => x1 * x1 + 2.0 * t,
            SolutionKind::Exponential => (t + x1).exp(),
            SolutionKind::HeatKernel => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                t.powf(-(x.len() as f64) / 2.0) * (-r2 / (4.0 * t)).exp()
            }
            SolutionKind::RlKernel => t.powf(alpha - 1.0),
            SolutionKind::LinearRlKernel => x1 * t.powf(alpha - 1.0),
            SolutionKind::Eigen { k } => {
                t.powf(alpha - 1.0) * mittag_leffler(alpha, alpha, -k * k * t.powf(alpha))? * (k * x1).cos()
            }
        })
    }

    /// Callable for grid sampling; errors surface as NaN.
    pub fn as_fn(&self, alpha: f64) -> impl Fn(f64, &[f64]) -> f64 + Sync + '_ {
        move |t, x| self.eval(alpha, t, x).unwrap_or(f64::NAN)
    }
}

/// Known solutions of `eq`. `k` is the wave number of the eigen-solution.
pub fn exact_solutions(eq: &HeatEquation, k: f64) -> Vec<ExactSolution> {
    use SolutionKind::*;
    match eq.regime {
        Regime::Integer => vec![
            ExactSolution::new(Constant, "1", true, "all t, x"),
            ExactSolution::new(Linear, "x1", true, "all t, x"),
            ExactSolution::new(Quadratic, "x1^2 + 2*t", true, "all t, x"),
            ExactSolution::new(Exponential, "exp(t + x1)", false, "all t, x"),
            ExactSolution::new(HeatKernel, "t^(-n/2) * exp(-|x|^2/(4t))", false, "t > 0"),
        ],
        Regime::Fractional => vec![
            ExactSolution::new(RlKernel, "t^(alpha-1)", false, "t > 0; kernel of the RL derivative"),
            ExactSolution::new(LinearRlKernel, "x1 * t^(alpha-1)", false, "t > 0"),
            ExactSolution::new(
                Eigen { k },
                "t^(alpha-1) * E_{alpha,alpha}(-k^2 t^alpha) * cos(k x1)",
                false,
                "t > 0; Mittag-Leffler series window |k^2 t^alpha| <= 50",
            ),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Atom;

    #[test]
    fn polynomial_solutions_satisfy_heat_equation() {
        let eq = HeatEquation::integer(1);
        for s in exact_solutions(&eq, 1.0) {
            let Some(e) = &s.expr else { continue };
            let p = e.to_poly();
            let ut = p.partial(&Atom::t());
            let uxx = p.partial(&Atom::x(1)).partial(&Atom::x(1));
            assert!((&ut - &uxx).is_zero(), "{}", s.formula);
        }
    }

    #[test]
    fn closed_forms_satisfy_equation_numerically() {
        let eq = HeatEquation::integer(2);
        let h = 1e-4;
        for s in exact_solutions(&eq, 1.0) {
            let (t, x) = (0.7, [0.3, -0.2]);
            let f = |t: f64, x: &[f64]| s.eval(1.0, t, x).unwrap();
            let ut = (f(t + h, &x) - f(t - h, &x)) / (2.0 * h);
            let mut lap = 0.0;
            for i in 0..2 {
                let mut xp = x;
                let mut xm = x;
                xp[i] += h;
                xm[i] -= h;
                lap += (f(t, &xp) - 2.0 * f(t, &x) + f(t, &xm)) / (h * h);
            }
            assert!((ut - lap).abs() < 1e-5, "{}: {ut} vs {lap}", s.formula);
        }
    }

    #[test]
    fn eigen_solution_values() {
        let eq = HeatEquation::fractional(1);
        let sols = exact_solutions(&eq, 2.0);
        let v = sols[2].eval(1.0, 0.5, &[0.0]).unwrap();
        // alpha = 1: E_{1,1}(-4t) = e^{-4t}
        assert!((v - (-2.0f64).exp()).abs() < 1e-12);
    }
}
