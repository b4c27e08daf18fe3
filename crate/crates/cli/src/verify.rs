//! The full symbolic and numeric verification suite.

use liesym::catalog::{exact_solutions, generators, GeneratorClass, HeatEquation, Regime, SolutionKind};
use liesym::conservation::{
    conserved_vector, flux_balance, quadratic_adjoint, singular_solution, Cell, Fields, FluxSettings, Nonlocal,
};
use liesym::numerics::{invariance_check, residual_on_grid, Axis, FracDerivSpec, GridFunction};
use liesym::prolong::{determining_residual_with, exponentiate_catalog, exponentiate_field, perturbed_fields};
use liesym::vector_fields::VectorField;
use serde_json::{json, Value};

use crate::commands::{algebra_of, conserve_eq, fixture_report, Outcome};
use crate::config::RunConfig;
use crate::Failure;

/// Numeric checks run on the time interval `[0, 1]` and `x ∈ [−1, 1]`.
const X_POINTS: usize = 21;
const INVARIANCE_EPS: [f64; 2] = [0.1, 0.3];
const RESIDUAL_TOL: f64 = 5e-3;
const FLUX_TOL: f64 = 1e-2;
/// flux imbalances below this are at round-off level
const FLUX_FLOOR: f64 = 1e-10;

pub struct Check {
    pub n: usize,
    pub regime: Regime,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(eq: &HeatEquation, name: &str, passed: bool, detail: String) -> Self {
        Check {
            n: eq.n,
            regime: eq.regime,
            name: name.to_string(),
            passed,
            detail,
        }
    }

    fn json(&self) -> Value {
        json!({
            "n": self.n,
            "regime": self.regime.as_str(),
            "check": self.name,
            "passed": self.passed,
            "detail": self.detail,
        })
    }
}

fn core(e: liesym::Error) -> Failure {
    Failure::from(e)
}

fn symbolic(eq: &HeatEquation, cfg: &RunConfig, out: &mut Vec<Check>) -> Result<(), Failure> {
    let gens = generators(eq).map_err(core)?;
    let expected = liesym::catalog::count_formula(eq.n, eq.regime);
    out.push(Check::new(
        eq,
        "count",
        gens.len() == expected,
        format!("{} generators, formula {expected}", gens.len()),
    ));
    if eq.regime == Regime::Integer {
        let mut zero = 0;
        for g in &gens {
            if determining_residual_with(&g.field, eq, &cfg.jet).map_err(core)?.is_zero() {
                zero += 1;
            }
        }
        out.push(Check::new(
            eq,
            "determining",
            zero == gens.len(),
            format!("{zero}/{} residuals zero", gens.len()),
        ));
        let perturbed = perturbed_fields(eq.n, 10, cfg.seed).map_err(core)?;
        let mut rejected = 0;
        for (f, _) in &perturbed {
            if !determining_residual_with(f, eq, &cfg.jet).map_err(core)?.is_zero() {
                rejected += 1;
            }
        }
        out.push(Check::new(
            eq,
            "perturbed",
            rejected == perturbed.len(),
            format!("{rejected}/{} perturbed fields rejected (seed {})", perturbed.len(), cfg.seed),
        ));
    }
    if let Some(r) = fixture_report(eq, cfg.fixtures.as_deref())? {
        let allowed = r.mismatches.iter().filter(|m| m.allowed.is_some()).count();
        out.push(Check::new(
            eq,
            "brackets",
            r.passed(),
            format!(
                "{} printed entries, {allowed} allow-listed, {} unexpected, {} stale",
                r.checked,
                r.unexpected().len(),
                r.stale_allow.len()
            ),
        ));
    }
    let alg = algebra_of(eq)?;
    let failed: Vec<&str> = alg.lines.iter().filter(|l| !l.0).map(|l| l.1.as_str()).collect();
    out.push(Check::new(
        eq,
        "algebra",
        failed.is_empty(),
        if failed.is_empty() {
            format!("{} structure checks", alg.lines.len())
        } else {
            failed.join("; ")
        },
    ));
    let run = conserve_eq(eq)?;
    if let Some((zero, total)) = run.divergences_zero {
        out.push(Check::new(
            eq,
            "conservation",
            zero == total,
            format!("{zero}/{total} divergences zero on both shells"),
        ));
    } else {
        let structured = run.vectors.iter().all(|(cv, _)| {
            let kinds: Vec<&str> = cv.ct.nonlocal.iter().map(Nonlocal::kind).collect();
            kinds == ["frac_int", "J"] && cv.cx.iter().all(|c| c.nonlocal.is_empty())
        });
        out.push(Check::new(
            eq,
            "conservation-structure",
            structured,
            format!("{} vectors with one I^(1-alpha) node and one J node in Ct", run.vectors.len()),
        ));
    }
    out.push(Check::new(
        eq,
        "printed-laws",
        run.printed_passed,
        format!(
            "{} printed laws, disagreements {}",
            run.printed_json["laws"],
            if run.printed_passed { "all documented" } else { "undocumented" }
        ),
    ));
    Ok(())
}

fn eigen(eq: &HeatEquation) -> liesym::catalog::ExactSolution {
    exact_solutions(eq, 1.0)
        .into_iter()
        .find(|s| matches!(s.kind, SolutionKind::Eigen { .. }))
        .expect("fractional catalog has the eigen-solution")
}

fn numeric(eq: &HeatEquation, cfg: &RunConfig, out: &mut Vec<Check>) -> Result<(), Failure> {
    let spec = FracDerivSpec::left(cfg.alpha).map_err(core)?.with_scheme(cfg.scheme.scheme());
    let t = Axis::time(1.0, cfg.grid).map_err(core)?;
    let x = vec![Axis::new(-1.0, 1.0, X_POINTS).map_err(core)?; eq.n];
    let sol = eigen(eq);
    let f = sol.as_fn(cfg.alpha);
    let grid = GridFunction::from_fn(t.clone(), x.clone(), &f).map_err(core)?;
    let r = residual_on_grid(eq, &grid, &spec, cfg.t_cut).map_err(core)?;
    out.push(Check::new(
        eq,
        "eigen-residual",
        r.interior_max < RESIDUAL_TOL,
        format!("interior residual {:.3e} (K = {}, {})", r.interior_max, cfg.grid, cfg.scheme.as_str()),
    ));
    for g in generators(eq).map_err(core)? {
        if g.class == GeneratorClass::Infinite {
            continue;
        }
        let mut worst: f64 = 0.0;
        let mut passed = true;
        for eps in INVARIANCE_EPS {
            let tr = exponentiate_catalog(&g, eps, cfg.alpha).map_err(core)?;
            let rep = invariance_check(eq, &f, &tr, &t, &x, &spec, cfg.t_cut).map_err(core)?;
            passed &= rep.passed;
            worst = worst.max(rep.ratio());
        }
        out.push(Check::new(
            eq,
            &format!("invariance-{}", g.name()),
            passed,
            format!("{} at eps {INVARIANCE_EPS:?}, worst residual ratio {worst:.3}", g.class.as_str()),
        ));
    }
    if eq.n == 1 {
        let bad = VectorField::parse("mis-weighted", "2*t", &["x"], "0").map_err(core)?;
        let tr = exponentiate_field(&bad, 0.2, cfg.alpha).map_err(core)?;
        let rep = invariance_check(eq, &f, &tr, &t, &x, &spec, cfg.t_cut).map_err(core)?;
        out.push(Check::new(
            eq,
            "invariance-negative-control",
            !rep.passed,
            format!("2t d_t + x d_x rejected, residual ratio {:.3e}", rep.ratio()),
        ));
        flux(eq, cfg, out)?;
    }
    Ok(())
}

fn flux(eq: &HeatEquation, cfg: &RunConfig, out: &mut Vec<Check>) -> Result<(), Failure> {
    let gens = generators(eq).map_err(core)?;
    let Some(g) = gens.iter().find(|g| g.class == GeneratorClass::Homogeneity) else { return Ok(()) };
    let cv = conserved_vector(&g.field, eq).map_err(core)?;
    let t_end = 2.0;
    let fields = Fields {
        u: singular_solution(cfg.alpha),
        phi: quadratic_adjoint(cfg.alpha, t_end),
    };
    let cell = Cell::new((0.5, 1.0), (0.0, 1.0)).map_err(core)?;
    let s = FluxSettings::new(cfg.alpha, t_end, cfg.grid, cfg.quad).map_err(core)?;
    let coarse = flux_balance(&cv, &fields, &cell, &s).map_err(core)?;
    let fine = flux_balance(&cv, &fields, &cell, &s.refined()).map_err(core)?;
    let passed = coarse.normalized < FLUX_TOL && (fine.normalized <= coarse.normalized || fine.normalized < FLUX_FLOOR);
    out.push(Check::new(
        eq,
        &format!("flux-balance-{}", g.name()),
        passed,
        format!(
            "u = t^(alpha-1), phi = x^2 + 2(T-t)^alpha/Gamma(1+alpha), normalized imbalance {:.3e} -> {:.3e}",
            coarse.normalized, fine.normalized
        ),
    ));
    Ok(())
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let mut checks = Vec::new();
    for eq in cfg.equations() {
        symbolic(&eq, cfg, &mut checks)?;
        if eq.regime == Regime::Fractional && eq.n <= 2 {
            numeric(&eq, cfg, &mut checks)?;
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    let total = checks.len();
    let ok = checks.iter().filter(|c| c.passed).count();
    let mut text = String::new();
    for c in &checks {
        text.push_str(&format!(
            "{} n={} {:<10} {:<28} {}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.n,
            c.regime.as_str(),
            c.name,
            c.detail
        ));
    }
    text.push_str(&format!("{ok}/{total} checks passed\n"));
    let rows: String = checks
        .iter()
        .map(|c| {
            format!(
                "{} & {} & {} & {}\\\\\n",
                c.n,
                c.regime.as_str(),
                c.name,
                if c.passed { "pass" } else { "fail" }
            )
        })
        .collect();
    let latex = format!("\\begin{{tabular}}{{lllc}}\n{rows}\\end{{tabular}}\n");
    let json = json!({
        "config": {
            "n": cfg.dims.to_string(),
            "regime": format!("{:?}", cfg.regime).to_lowercase(),
            "alpha": cfg.alpha,
            "grid": cfg.grid,
            "quad": cfg.quad,
            "scheme": cfg.scheme.as_str(),
            "tcut": cfg.t_cut,
            "seed": cfg.seed,
            "max_jet": cfg.jet.max_order,
        },
        "checks": checks.iter().map(Check::json).collect::<Vec<_>>(),
        "passed": passed,
        "summary": {"passed": ok, "total": total},
    });
    Ok(Outcome {
        text,
        json,
        latex,
        passed,
    })
}
