use liesym::catalog::{exact_solutions, generators, GeneratorClass, HeatEquation, SolutionKind};
use liesym::numerics::*;
use liesym::prolong::{exponentiate_catalog, exponentiate_field};
use liesym::vector_fields::VectorField;

/// `t_j^σ` for `j ≥ 1`, the `t = 0` sample set to 0.
fn power_series(sigma: f64, h: f64, k: usize) -> Vec<f64> {
    (0..=k).map(|j| if j == 0 { 0.0 } else { (j as f64 * h).powf(sigma) }).collect()
}

fn interior_max(d: &[f64], h: f64, t_cut: f64, exact: impl Fn(f64) -> f64) -> f64 {
    d.iter()
        .enumerate()
        .filter(|(j, _)| *j as f64 * h >= t_cut)
        .map(|(j, v)| (v - exact(j as f64 * h)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn plain_grunwald_power_rule() {
    let spec = FracDerivSpec::left(0.5).unwrap().plain();
    let h = 1e-3;
    let d = rl_derivative_series(&power_series(1.0, h, 1000), h, &spec).unwrap();
    let rel = d
        .iter()
        .enumerate()
        .skip(100)
        .map(|(j, v)| {
            let e = power_rule(1.0, 0.5, j as f64 * h);
            ((v - e) / e).abs()
        })
        .fold(0.0, f64::max);
    assert!(rel < 1e-2, "{rel}");
}

#[test]
fn kernel_derivatives_vanish_under_refinement() {
    let (alpha, t_end) = (0.5, 1.0);
    let left = FracDerivSpec::left(alpha).unwrap().plain();
    let right = FracDerivSpec::right(alpha).unwrap().plain();
    let mut prev = (f64::INFINITY, f64::INFINITY);
    for k in [250, 500, 1000, 2000] {
        let h = t_end / k as f64;
        let f = power_series(alpha - 1.0, h, k);
        let l = interior_max(&rl_derivative_series(&f, h, &left).unwrap(), h, 0.1, |_| 0.0);
        // (T − t)^{α−1} is the mirror image of t^{α−1}
        let mirrored: Vec<f64> = f.iter().rev().copied().collect();
        let d = right_rl_derivative_series(&mirrored, h, &right).unwrap();
        let r = d[..=k - k / 10].iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!((l - r).abs() < 1e-10, "reflection: {l} {r}");
        // the uncorrected sum converges like h^α on this kernel
        assert!(l < 0.75 * prev.0 && r < 0.75 * prev.1, "k = {k}: {l} {r}");
        prev = (l, r);
        let corrected = rl_derivative_series(&f, h, &FracDerivSpec::left(alpha).unwrap()).unwrap();
        assert!(interior_max(&corrected, h, 0.1, |_| 0.0) < 1e-10);
    }
}

#[test]
fn mittag_leffler_recurrence_on_a_lattice() {
    for alpha in [0.3, 0.5, 0.7, 0.9, 1.0] {
        for beta in [0.5, 1.0, 1.5, 2.0, 2.5] {
            for z in [-2.0, -1.0, -0.3, 0.4, 1.5] {
                let lhs = mittag_leffler(alpha, beta, z).unwrap();
                let rhs = z * mittag_leffler(alpha, alpha + beta, z).unwrap() + rgamma(beta);
                assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0), "{alpha} {beta} {z}");
            }
        }
    }
    assert!((mittag_leffler(1.0, 1.0, 1.0).unwrap() - std::f64::consts::E).abs() < 1e-12);
}

fn eigen(eq: &HeatEquation) -> liesym::catalog::ExactSolution {
    exact_solutions(eq, 1.0)
        .into_iter()
        .find(|s| matches!(s.kind, SolutionKind::Eigen { .. }))
        .unwrap()
}

fn axes(n: usize) -> (Axis, Vec<Axis>) {
    (Axis::time(1.0, 400).unwrap(), vec![Axis::new(-1.0, 1.0, 21).unwrap(); n])
}

#[test]
fn fractional_catalog_preserves_the_eigen_solution() {
    let spec = FracDerivSpec::left(0.5).unwrap();
    for n in 1..=2 {
        let eq = HeatEquation::fractional(n);
        let sol = eigen(&eq);
        let f = sol.as_fn(0.5);
        let (t, x) = axes(n);
        for g in generators(&eq).unwrap() {
            if g.class == GeneratorClass::Infinite {
                continue;
            }
            for eps in [0.1, 0.3] {
                let tr = exponentiate_catalog(&g, eps, 0.5).unwrap();
                let r = invariance_check(&eq, &f, &tr, &t, &x, &spec, None).unwrap();
                assert!(r.passed, "n = {n} {} eps {eps}: {r:?}", g.name());
            }
        }
    }
}

#[test]
fn mis_weighted_dilation_is_not_a_symmetry() {
    let eq = HeatEquation::fractional(1);
    let sol = eigen(&eq);
    let f = sol.as_fn(0.5);
    let spec = FracDerivSpec::left(0.5).unwrap();
    let bad = VectorField::parse("bad", "2*t", &["x"], "0").unwrap();
    let mut prev = 0.0;
    for k in [200, 400, 800] {
        let t = Axis::time(1.0, k).unwrap();
        let x = vec![Axis::new(-1.0, 1.0, 21).unwrap()];
        let tr = exponentiate_field(&bad, 0.2, 0.5).unwrap();
        let r = invariance_check(&eq, &f, &tr, &t, &x, &spec, None).unwrap();
        // the wrong weights leave an O(1) residual that refinement does not remove
        assert!(!r.passed, "{r:?}");
        assert!(r.transformed.interior_max > 0.9 * prev, "k = {k}: {r:?}");
        prev = r.transformed.interior_max;
    }
}

#[test]
fn grid_files_round_trip() {
    let dir = std::env::temp_dir().join(format!("liesym-grid-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let g = GridFunction::from_fn(Axis::time(1.0, 16).unwrap(), vec![Axis::new(0.0, 1.0, 5).unwrap()], |t, x| {
        t * t + x[0] / 3.0
    })
    .unwrap();
    for name in ["g.csv", "g.bin"] {
        let p = dir.join(name);
        g.save(&p).unwrap();
        assert_eq!(GridFunction::load(&p).unwrap(), g);
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn j_matches_the_closed_form_double_integral() {
    let exact = (4.0 / 3.0) * (2f64.powf(1.5) - 2.0) / gamma(0.5);
    let j = j_quadrature_fn(|_| 1.0, |_| 1.0, 0.5, 1.0, 2.0, 256).unwrap();
    assert!((j - exact).abs() < 1e-4, "{j} {exact}");
}

#[test]
fn gamma_agrees_with_an_independent_implementation() {
    for i in 1..200 {
        let x = -4.95 + 0.05 * i as f64;
        if (x - x.round()).abs() < 1e-9 && x <= 0.0 {
            assert_eq!(rgamma(x), 0.0);
            continue;
        }
        let want = statrs::function::gamma::gamma(x);
        assert!((gamma(x) - want).abs() < 1e-12 * want.abs().max(1.0), "{x}");
    }
}
