//! The catalog, bracket, algebra, conservation and count subcommands.

use std::path::Path;

use liesym::catalog::fixtures::{check_fixture, compare_fixture, fixture_for, parse_fixture, FixtureReport};
use liesym::catalog::{
    catalog_json, count_formula, fields, find, generators, GeneratorClass, HeatEquation, NamedGenerator, Regime,
};
use liesym::conservation::{
    check_printed, conserved_vectors, divergence_onshell_symbolic, printed_diff, ConservedVector, DiffEntry,
};
use liesym::expr::latex_poly;
use liesym::vector_fields::{
    closure_report, commutator_table, derived_series, match_canonical, CanonicalMatch, Pattern, VectorField,
};
use serde_json::{json, Value};

use crate::config::{DimRange, RunConfig};
use crate::Failure;

/// Rendered result of a subcommand.
pub struct Outcome {
    pub text: String,
    pub json: Value,
    pub latex: String,
    pub passed: bool,
}

fn core(e: liesym::Error) -> Failure {
    Failure::from(e)
}

fn field_latex(f: &VectorField) -> String {
    let coords = VectorField::coordinates(f.dim());
    let mut parts = Vec::new();
    for (c, a) in f.components().iter().zip(&coords) {
        if c.is_zero() {
            continue;
        }
        let body = latex_poly(c);
        let coeff = match body.as_str() {
            "1" => String::new(),
            "-1" => "-".into(),
            _ if c.len() > 1 => format!("({body})"),
            _ => body,
        };
        parts.push(format!("{coeff}\\partial_{{{a}}}"));
    }
    let name = f.name.trim_start_matches('G');
    let mut rhs = String::new();
    for p in &parts {
        if !rhs.is_empty() && !p.starts_with('-') {
            rhs.push('+');
        }
        rhs.push_str(p);
    }
    if rhs.is_empty() {
        rhs.push('0');
    }
    format!("\\Gamma_{{{name}}}&=&{rhs}")
}

pub fn gen(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let mut text = String::new();
    let mut latex = String::new();
    let mut records = Vec::new();
    for eq in cfg.equations() {
        let gens = generators(&eq).map_err(core)?;
        text.push_str(&format!("{} (n = {}, {} generators)\n", eq.describe(), eq.n, gens.len()));
        for g in &gens {
            text.push_str(&format!("  [{}] {}\n", g.class.as_str(), g.field));
        }
        let rows: Vec<String> = gens.iter().map(|g| field_latex(&g.field)).collect();
        latex.push_str(&format!(
            "% n = {}, {}\n\\begin{{eqnarray}}\n{}.\n\\end{{eqnarray}}\n",
            eq.n,
            eq.regime.as_str(),
            rows.join(",\\nonumber\\\\\n")
        ));
        records.push(catalog_json(&eq, &gens));
    }
    Ok(Outcome {
        text,
        json: Value::Array(records),
        latex,
        passed: true,
    })
}

/// Bracket fixture of `eq`, taken from `--fixtures` when a file is there.
pub fn fixture_report(eq: &HeatEquation, dir: Option<&Path>) -> Result<Option<FixtureReport>, Failure> {
    let name = format!("{}d-{}", eq.n, eq.regime.as_str());
    if let Some(dir) = dir {
        let path = dir.join(format!("{}d_{}.toml", eq.n, eq.regime.as_str()));
        if path.exists() {
            let src = std::fs::read_to_string(&path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            let fx = parse_fixture(&name, &src).map_err(core)?;
            if fx.dimension != eq.n || fx.regime != eq.regime {
                return Err(Failure::Check(format!("{}: header does not match {name}", path.display())));
            }
            return compare_fixture(&name, &fx).map(Some).map_err(core);
        }
    }
    if fixture_for(eq).is_none() {
        return Ok(None);
    }
    check_fixture(&name).map(Some).map_err(core)
}

pub fn fixture_json(r: &FixtureReport) -> Value {
    json!({
        "name": r.name,
        "checked": r.checked,
        "passed": r.passed(),
        "mismatches": r.mismatches.iter().map(|m| json!({
            "printed": m.entry,
            "computed": m.computed,
            "allowed": m.allowed,
        })).collect::<Vec<_>>(),
        "stale_allow": r.stale_allow,
        "missing_from_print": r.missing_from_print,
    })
}

fn fixture_text(r: &FixtureReport) -> String {
    let mut s = format!(
        "printed entries: {} checked, {} disagree, {}\n",
        r.checked,
        r.mismatches.len(),
        if r.passed() { "all allow-listed" } else { "UNEXPECTED" }
    );
    for m in &r.mismatches {
        let why = m.allowed.as_deref().unwrap_or("not allow-listed");
        s.push_str(&format!("  printed  {}\n  computed {}\n    ({why})\n", m.entry, m.computed));
    }
    for e in &r.stale_allow {
        s.push_str(&format!("  stale allow-list entry: {e}\n"));
    }
    for e in &r.missing_from_print {
        s.push_str(&format!("  not printed: {e}\n"));
    }
    s
}

pub fn brackets(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let mut text = String::new();
    let mut latex = String::new();
    let mut records = Vec::new();
    let mut passed = true;
    for eq in cfg.equations() {
        let table = commutator_table(&fields(&generators(&eq).map_err(core)?)).map_err(core)?;
        let report = fixture_report(&eq, cfg.fixtures.as_deref())?;
        text.push_str(&format!("{} (n = {})\n", eq.describe(), eq.n));
        for (i, j, _) in table.nonzero() {
            text.push_str(&format!("  [{}, {}] = {}\n", table.basis[i], table.basis[j], table.entry_text(i, j)));
        }
        if let Some(r) = &report {
            text.push_str(&fixture_text(r));
            passed &= r.passed();
        }
        latex.push_str(&format!("% n = {}, {}\n{}", eq.n, eq.regime.as_str(), table.to_latex()));
        records.push(json!({
            "dimension": eq.n,
            "regime": eq.regime.as_str(),
            "table": table.to_json(),
            "fixture": report.as_ref().map(fixture_json),
        }));
    }
    Ok(Outcome {
        text,
        json: Value::Array(records),
        latex,
        passed,
    })
}

fn point_fields(gens: &[NamedGenerator]) -> Vec<VectorField> {
    fields(gens).into_iter().filter(|f| !f.involves_f()).collect()
}

fn first(gens: &[NamedGenerator], class: GeneratorClass) -> Option<VectorField> {
    find(gens, class).first().map(|g| g.field.clone())
}

fn match_json(m: &CanonicalMatch) -> Value {
    json!({
        "matched": m.matched,
        "scaling": m.scaling.as_ref().map(|s| s.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
        "dropped_central": m.dropped_central,
        "reason": m.reason,
    })
}

/// sl(2) from the time translation, dilation and projective fields
/// (integer regime), modulo the homogeneity field.
pub fn sl2_match(gens: &[NamedGenerator]) -> Result<Option<CanonicalMatch>, Failure> {
    let triple = [
        first(gens, GeneratorClass::TimeTranslation),
        first(gens, GeneratorClass::Dilation),
        first(gens, GeneratorClass::Projective),
    ];
    let [Some(e), Some(h), Some(f)] = triple else { return Ok(None) };
    let modulo: Vec<VectorField> = first(gens, GeneratorClass::Homogeneity).into_iter().collect();
    match_canonical(&[e, h, f], Pattern::Sl2, &modulo).map(Some).map_err(core)
}

/// so(n) from the rotations, ordered by plane.
pub fn so_match(gens: &[NamedGenerator], n: usize) -> Result<Option<CanonicalMatch>, Failure> {
    if n < 2 {
        return Ok(None);
    }
    let mut rot = find(gens, GeneratorClass::Rotation);
    rot.sort_by_key(|g| g.plane);
    let rot: Vec<VectorField> = rot.into_iter().map(|g| g.field.clone()).collect();
    match_canonical(&rot, Pattern::So(n), &[]).map(Some).map_err(core)
}

pub struct AlgebraReport {
    pub json: Value,
    pub lines: Vec<(bool, String)>,
}

pub fn algebra_of(eq: &HeatEquation) -> Result<AlgebraReport, Failure> {
    let gens = generators(eq).map_err(core)?;
    let all = closure_report(&fields(&gens)).map_err(core)?;
    let points = point_fields(&gens);
    let closed = closure_report(&points).map_err(core)?;
    let sc = commutator_table(&points).map_err(core)?.structure_constants().map_err(core)?;
    let antisym = sc.is_antisymmetric();
    let jacobi = sc.jacobi_violations();
    let series = derived_series(&points).map_err(core)?;
    let sl2 = if eq.regime == Regime::Integer { sl2_match(&gens)? } else { None };
    let so = so_match(&gens, eq.n)?;
    let mut lines = vec![
        (
            closed.closed && all.closed_modulo_infinite,
            format!(
                "closure: point algebra of dimension {} closed, full catalog closed up to the infinite family",
                points.len()
            ),
        ),
        (antisym, "structure constants antisymmetric".to_string()),
        (jacobi.is_empty(), format!("Jacobi identity ({} violations)", jacobi.len())),
        (true, format!("derived series dimensions {series:?}")),
    ];
    if let Some(m) = &sl2 {
        lines.push((m.matched, "sl(2,R) from time translation, dilation, projective".into()));
    }
    if let Some(m) = &so {
        lines.push((m.matched, format!("so({}) from the rotations", eq.n)));
    }
    let json = json!({
        "dimension": eq.n,
        "regime": eq.regime.as_str(),
        "point_dimension": points.len(),
        "closed": closed.closed,
        "closed_modulo_infinite": all.closed_modulo_infinite,
        "offending": all.offending.iter().map(|o| json!({
            "pair": [o.names.0, o.names.1],
            "infinite": o.infinite,
        })).collect::<Vec<_>>(),
        "antisymmetric": antisym,
        "jacobi_violations": jacobi.len(),
        "derived_series": series,
        "sl2": sl2.as_ref().map(match_json),
        "so_n": so.as_ref().map(match_json),
    });
    Ok(AlgebraReport { json, lines })
}

pub fn algebra(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let mut text = String::new();
    let mut records = Vec::new();
    let mut passed = true;
    let mut rows = Vec::new();
    for eq in cfg.equations() {
        let r = algebra_of(&eq)?;
        text.push_str(&format!("{} (n = {})\n", eq.describe(), eq.n));
        for (ok, line) in &r.lines {
            text.push_str(&format!("  {} {line}\n", if *ok { "ok  " } else { "FAIL" }));
            passed &= ok;
            rows.push(format!(
                "{} & {} & {} & {}\\\\",
                eq.n,
                eq.regime.as_str(),
                line,
                if *ok { "yes" } else { "no" }
            ));
        }
        records.push(r.json);
    }
    let latex = format!("\\begin{{tabular}}{{llll}}\n{}\n\\end{{tabular}}\n", rows.join("\n"));
    Ok(Outcome {
        text,
        json: Value::Array(records),
        latex,
        passed,
    })
}

pub struct ConserveRun {
    pub vectors: Vec<(ConservedVector, Vec<DiffEntry>)>,
    /// symbolic divergence of each integer law vanishes
    pub divergences_zero: Option<(usize, usize)>,
    pub printed_passed: bool,
    pub printed_json: Value,
}

pub fn conserve_eq(eq: &HeatEquation) -> Result<ConserveRun, Failure> {
    let cvs = conserved_vectors(&fields(&generators(eq).map_err(core)?), eq).map_err(core)?;
    let divergences_zero = if eq.regime == Regime::Integer {
        let mut zero = 0;
        for cv in &cvs {
            if divergence_onshell_symbolic(cv, eq).map_err(core)?.is_zero() {
                zero += 1;
            }
        }
        Some((zero, cvs.len()))
    } else {
        None
    };
    let printed = check_printed(eq, &cvs).map_err(core)?;
    let printed_json = json!({
        "name": printed.name,
        "laws": printed.laws,
        "passed": printed.passed(),
        "unexpected": printed.unexpected.iter().map(DiffEntry::to_json).collect::<Vec<_>>(),
        "stale": printed.stale.iter().map(|(s, k)| format!("{s} {}", k.component)).collect::<Vec<_>>(),
    });
    let vectors = cvs
        .into_iter()
        .map(|cv| {
            let d = printed_diff(&cv).map_err(core)?;
            Ok((cv, d))
        })
        .collect::<Result<_, Failure>>()?;
    Ok(ConserveRun {
        vectors,
        divergences_zero,
        printed_passed: printed.passed(),
        printed_json,
    })
}

pub fn conserve(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let mut text = String::new();
    let mut latex = String::new();
    let mut records = Vec::new();
    let mut passed = true;
    for eq in cfg.equations() {
        let run = conserve_eq(&eq)?;
        text.push_str(&format!("{} (n = {})\n", eq.describe(), eq.n));
        for (cv, diff) in &run.vectors {
            text.push_str(&cv.to_string());
            for d in diff.iter().filter(|d| d.status.as_str() != "match") {
                text.push_str(&format!(
                    "  printed {} [{}]: {} (printed - computed = {}){}\n",
                    d.component,
                    d.status.as_str(),
                    d.printed,
                    d.difference,
                    d.reason.as_deref().map(|r| format!("; {r}")).unwrap_or_default()
                ));
            }
            latex.push_str(&cv.to_latex());
        }
        if let Some((zero, total)) = run.divergences_zero {
            text.push_str(&format!("divergence on both shells: {zero}/{total} zero\n"));
            passed &= zero == total;
        }
        passed &= run.printed_passed;
        records.push(json!({
            "dimension": eq.n,
            "regime": eq.regime.as_str(),
            "vectors": run.vectors.iter().map(|(cv, d)| cv.to_json(d)).collect::<Vec<_>>(),
            "divergence_zero": run.divergences_zero.map(|(z, t)| json!({"zero": z, "total": t})),
            "printed": run.printed_json,
        }));
    }
    Ok(Outcome {
        text,
        json: Value::Array(records),
        latex,
        passed,
    })
}

pub fn count(dims: DimRange) -> Result<Outcome, Failure> {
    let ns: Vec<usize> = dims.iter().collect();
    let mut rows = Vec::new();
    let mut passed = true;
    for regime in [Regime::Integer, Regime::Fractional] {
        let formula: Vec<usize> = ns.iter().map(|&n| count_formula(n, regime)).collect();
        let listed: Vec<usize> = ns
            .iter()
            .map(|&n| generators(&HeatEquation::new(n, regime).expect("n >= 1")).map(|g| g.len()))
            .collect::<Result<_, _>>()
            .map_err(core)?;
        passed &= formula == listed;
        rows.push((regime, formula, listed));
    }
    let cell = |v: &[usize]| v.iter().map(|c| format!("{c:>4}")).collect::<String>();
    let mut text = format!("{:<12}{}\n", "n", cell(&ns));
    for (r, f, l) in &rows {
        text.push_str(&format!("{:<12}{}\n", r.as_str(), cell(f)));
        if f != l {
            text.push_str(&format!("{:<12}{}  (catalog length differs)\n", "", cell(l)));
        }
    }
    let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" & ");
    let latex = format!(
        "\\begin{{tabular}}{{l{}}}\n$n$ & {}\\\\\n{}\\end{{tabular}}\n",
        "r".repeat(ns.len()),
        join(&ns),
        rows.iter()
            .map(|(r, f, _)| format!("{} & {}\\\\\n", r.as_str(), join(f)))
            .collect::<String>()
    );
    let json = json!({
        "n": ns,
        "integer": rows[0].1,
        "fractional": rows[1].1,
        "catalog_lengths_agree": passed,
    });
    Ok(Outcome {
        text,
        json,
        latex,
        passed,
    })
}
