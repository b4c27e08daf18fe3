use liesym::catalog::{fields, generators, HeatEquation};
use liesym::conservation::*;
use liesym::expr::{parse, Poly};
use liesym::vector_fields::VectorField;

fn poly(s: &str) -> Poly {
    parse(s).unwrap().to_poly()
}

fn catalog(eq: &HeatEquation) -> Vec<VectorField> {
    fields(&generators(eq).unwrap())
}

fn vector(eq: &HeatEquation, name: &str) -> ConservedVector {
    let g = catalog(eq).into_iter().find(|g| g.name == name).unwrap();
    conserved_vector(&g, eq).unwrap()
}

#[test]
fn characteristics_of_printed_examples() {
    let eq = HeatEquation::integer(1);
    assert_eq!(vector(&eq, "G6").w.w, poly("u"));
    assert_eq!(vector(&eq, "G5").w.w, poly("-u*(2*t+x^2)-4*t^2*u_t-4*t*x*u_x"));
    assert_eq!(vector(&eq, "G1").w.w, poly("-u_x"));
}

#[test]
fn homogeneity_components() {
    let cv = vector(&HeatEquation::integer(1), "G6");
    assert_eq!(cv.ct.local, poly("u*phi"));
    assert_eq!(cv.cx[0].local, poly("u*phi_x - phi*u_x"));
    let d = divergence_onshell_symbolic(&cv, &cv.eq).unwrap();
    assert!(d.is_zero());
}

#[test]
fn translation_components_in_three_dimensions() {
    let eq = HeatEquation::integer(3);
    let cv = vector(&eq, "G31");
    assert_eq!(cv.ct.local, poly("-phi*u_x"));
    assert_eq!(
        cv.cx[0].local,
        poly("phi*(u_t-u_{xx}-u_{yy}-u_{zz}) - u_x*phi_x + phi*u_{xx}")
    );
    assert_eq!(cv.cx[1].local, poly("-u_x*phi_y + phi*u_{xy}"));
    assert_eq!(cv.cx[2].local, poly("-u_x*phi_z + phi*u_{xz}"));
}

#[test]
fn every_integer_law_is_conserved_on_both_shells() {
    let mut count = 0;
    for n in 1..=4 {
        let eq = HeatEquation::integer(n);
        for cv in conserved_vectors(&catalog(&eq), &eq).unwrap() {
            let d = divergence_onshell_symbolic(&cv, &eq).unwrap();
            assert!(d.is_zero(), "{}: {d}", cv.symmetry);
            count += 1;
        }
    }
    assert_eq!(count, 50);
}

#[test]
fn corrupted_flux_is_detected() {
    let eq = HeatEquation::integer(2);
    let mut cv = vector(&eq, "G23");
    cv.cx[1].local = &cv.cx[1].local - &(&Poly::int(2) * &poly("phi*u_{xy}"));
    assert!(!divergence_onshell_symbolic(&cv, &eq).unwrap().is_zero());
}

#[test]
fn fractional_divergence_is_not_symbolic() {
    let eq = HeatEquation::fractional(1);
    let cv = vector(&eq, "G03");
    assert!(divergence_onshell_symbolic(&cv, &eq).is_err());
}

#[test]
fn characteristic_is_reproducible() {
    for n in 1..=2 {
        for eq in [HeatEquation::integer(n), HeatEquation::fractional(n)] {
            for g in catalog(&eq) {
                let a = conserved_vector(&g, &eq).unwrap();
                assert_eq!(characteristic(&g).w, a.w.w, "{}", g.name);
                let b = conserved_vector(&g, &eq).unwrap();
                assert_eq!(a, b);
            }
        }
    }
}

#[test]
fn combination_of_symmetries_gives_combined_vector() {
    let eq = HeatEquation::integer(2);
    let gens = catalog(&eq);
    let (a, b) = (&gens[0], &gens[4]);
    let (ca, cb) = (Poly::int(3), poly("-1/2"));
    let mixed = VectorField::from_polys(
        "mix",
        &a.components()
            .iter()
            .zip(b.components())
            .map(|(p, q)| &(&ca * p) + &(&cb * &q))
            .collect::<Vec<_>>(),
    );
    let direct = conserved_vector(&mixed, &eq).unwrap();
    let combined = combine(
        &ca,
        &conserved_vector(a, &eq).unwrap(),
        &cb,
        &conserved_vector(b, &eq).unwrap(),
    )
    .unwrap();
    assert_eq!(direct.w.w, combined.w.w);
    assert_eq!(direct.ct, combined.ct);
    assert_eq!(direct.cx, combined.cx);
}

#[test]
fn fractional_structure() {
    for n in 1..=4 {
        let eq = HeatEquation::fractional(n);
        for cv in conserved_vectors(&catalog(&eq), &eq).unwrap() {
            let kinds: Vec<&str> = cv.ct.nonlocal.iter().map(Nonlocal::kind).collect();
            assert_eq!(kinds, ["frac_int", "J"], "{}", cv.symmetry);
            assert!(cv.cx.iter().all(|c| c.nonlocal.is_empty()), "{}", cv.symmetry);
            assert!(cv.ct.local.is_zero());
        }
    }
    let cv = vector(&HeatEquation::fractional(1), "G03");
    assert_eq!(cv.ct.text(), "phi*I_t^(1-alpha)[u] + J[u, phi_t]");
    assert_eq!(cv.cx[0].text(), "u*phi_x - u_x*phi");
}

#[test]
fn regime_and_dimension_are_checked() {
    let frac = catalog(&HeatEquation::fractional(1));
    let dil = frac.iter().find(|g| g.name == "G02").unwrap();
    assert!(conserved_vector(dil, &HeatEquation::integer(1)).is_err());
    assert!(conserved_vector(dil, &HeatEquation::fractional(2)).is_err());
}

#[test]
fn adjoint_families() {
    for n in 1..=3 {
        let adj = adjoint_residual(&HeatEquation::integer(n));
        assert_eq!(adj.verified_family().unwrap().len(), 1 + 2 * n);
        assert!(!adj.residual_of(&poly("x^2")).unwrap().is_zero());
        assert!(!adj.residual_of(&poly("t")).unwrap().is_zero());
    }
    let frac = adjoint_residual(&HeatEquation::fractional(1));
    assert!(frac.residual_of(&Poly::one()).is_err());
}

#[test]
fn triviality() {
    let eq = HeatEquation::integer(1);
    for cv in conserved_vectors(&catalog(&eq), &eq).unwrap() {
        assert!(!is_trivial(&cv).unwrap(), "{}", cv.symmetry);
    }
    let mut cv = vector(&eq, "G6");
    let bracket = poly("u_t - u_{xx}");
    cv.ct = Component::local(&poly("phi") * &bracket);
    cv.cx = vec![Component::local(&poly("x") * &bracket)];
    assert!(is_trivial(&cv).unwrap());
}

#[test]
fn printed_laws_agree_up_to_known_disagreements() {
    for n in 1..=4 {
        for eq in [HeatEquation::integer(n), HeatEquation::fractional(n)] {
            let cvs = conserved_vectors(&catalog(&eq), &eq).unwrap();
            let r = check_printed(&eq, &cvs).unwrap();
            assert!(r.passed(), "{}: unexpected {:#?} stale {:#?}", r.name, r.unexpected, r.stale);
            assert_eq!(r.laws, liesym::catalog::count_formula(n, eq.regime));
        }
    }
}

#[test]
fn homogeneity_discrepancy_is_reported() {
    let cv = vector(&HeatEquation::fractional(1), "G03");
    let diff = printed_diff(&cv).unwrap();
    assert_eq!(diff.len(), 1);
    assert_eq!(diff[0].component, "Cx");
    assert_eq!(diff[0].status, DiffStatus::Differs);
    assert_eq!(diff[0].difference, "-u_x*phi");
    assert_eq!(diff[0].printed, "u*phi_x - 2*u_x*phi");
}

#[test]
fn json_and_latex_output() {
    let cv = vector(&HeatEquation::fractional(1), "G03");
    let v = cv.to_json(&printed_diff(&cv).unwrap());
    assert_eq!(v["W"], "u");
    assert_eq!(v["nonlocal_nodes"].as_array().unwrap().len(), 2);
    assert_eq!(v["paper_diff"][0]["component"], "Cx");
    let tex = cv.to_latex();
    assert!(tex.contains("\\begin{eqnarray}"));
    assert!(tex.contains("C^{x}&=&"));
}
