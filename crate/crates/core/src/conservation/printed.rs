//! Published conserved vectors, transcribed law by law, and their
//! comparison with the operator-derived components.
//!
//! In a transcription `W` stands for the printed characteristic of the
//! same law and `B` for the bracket `D_t^α u − Δu` (`u_t − Δu` when
//! `α = 1`). Fractional time components are given by the coefficient of
//! `B`, the argument of `₀I_t^{1−α}` and the first argument of `J`.
//! Every disagreement must be listed under `known` with a reason.

use std::collections::BTreeSet;

use serde::Deserialize;
use serde_json::{json, Value};

use super::{phi, phi_jet, Component, ConservedVector, Nonlocal};
use crate::catalog::{HeatEquation, Regime};
use crate::error::{Error, Result};
use crate::expr::{parse, Atom, Field, JetConfig, Poly, Var};
use crate::prolong::on_shell_rules;

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum RawTime {
    Local(String),
    Fractional {
        #[serde(default)]
        bracket: Option<String>,
        frac_int: String,
        j: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
pub struct Known {
    pub component: String,
    pub status: DiffStatus,
    #[serde(default)]
    pub reason: String,
}

#[derive(Clone, Debug, Deserialize)]
struct RawLaw {
    label: String,
    #[serde(default)]
    symmetry: Option<String>,
    #[serde(rename = "W", default)]
    w: Option<String>,
    #[serde(rename = "Ct", default)]
    ct: Option<RawTime>,
    #[serde(rename = "Cx", default)]
    cx: Option<String>,
    #[serde(rename = "Cy", default)]
    cy: Option<String>,
    #[serde(rename = "Cz", default)]
    cz: Option<String>,
    #[serde(rename = "Cw", default)]
    cw: Option<String>,
    #[serde(default)]
    known: Vec<Known>,
}

#[derive(Clone, Debug, Deserialize)]
struct RawFile {
    dimension: usize,
    regime: Regime,
    /// catalog generators for which no law is printed
    #[serde(default)]
    unprinted: Vec<String>,
    law: Vec<RawLaw>,
}

/// `bracket·B + local + Σ nonlocal`, as printed. In the integer regime
/// the bracket is expanded into the local part.
#[derive(Clone, Debug, PartialEq)]
pub struct PrintedComponent {
    pub bracket: Poly,
    pub local: Poly,
    pub nonlocal: Vec<Nonlocal>,
}

impl PrintedComponent {
    fn local(p: Poly) -> Self {
        PrintedComponent {
            bracket: Poly::zero(),
            local: p,
            nonlocal: Vec::new(),
        }
    }

    pub fn text(&self) -> String {
        let as_component = Component {
            lagrangian: Poly::zero(),
            local: self.local.clone(),
            nonlocal: self.nonlocal.clone(),
        };
        let rest = as_component.text();
        if self.bracket.is_zero() {
            return rest;
        }
        let b = format!("{}B", super::star(super::factor_text(&self.bracket)));
        match (rest.as_str(), rest.strip_prefix('-')) {
            ("0", _) => b,
            (_, Some(r)) => format!("{b} - {r}"),
            _ => format!("{b} + {rest}"),
        }
    }
}

/// One printed law, parsed. Missing components are `None`.
#[derive(Clone, Debug)]
pub struct PrintedLaw {
    pub label: String,
    pub symmetry: String,
    pub w: Option<Poly>,
    pub ct: Option<PrintedComponent>,
    pub cx: Vec<Option<PrintedComponent>>,
    pub known: Vec<Known>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiffStatus {
    /// identical after normalization
    Match,
    /// equal once `u_t = Δu` is imposed (terms proportional to `L` differ)
    OnShell,
    Differs,
    /// the component is not printed
    Missing,
}

impl DiffStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            DiffStatus::Match => "match",
            DiffStatus::OnShell => "on-shell",
            DiffStatus::Differs => "differs",
            DiffStatus::Missing => "missing",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiffEntry {
    pub symmetry: String,
    pub label: String,
    pub component: String,
    pub status: DiffStatus,
    pub printed: String,
    pub computed: String,
    /// printed minus computed, on-shell, for local parts
    pub difference: String,
    pub reason: Option<String>,
}

impl DiffEntry {
    pub fn to_json(&self) -> Value {
        json!({
            "symmetry": self.symmetry,
            "label": self.label,
            "component": self.component,
            "status": self.status.as_str(),
            "printed": self.printed,
            "computed": self.computed,
            "difference": self.difference,
            "reason": self.reason,
        })
    }
}

const SOURCES: [(&str, &str); 8] = [
    ("1d-integer", include_str!("printed/1d_integer.toml")),
    ("2d-integer", include_str!("printed/2d_integer.toml")),
    ("3d-integer", include_str!("printed/3d_integer.toml")),
    ("4d-integer", include_str!("printed/4d_integer.toml")),
    ("1d-fractional", include_str!("printed/1d_fractional.toml")),
    ("2d-fractional", include_str!("printed/2d_fractional.toml")),
    ("3d-fractional", include_str!("printed/3d_fractional.toml")),
    ("4d-fractional", include_str!("printed/4d_fractional.toml")),
];

fn source_for(eq: &HeatEquation) -> Option<(&'static str, &'static str)> {
    let name = format!("{}d-{}", eq.n, eq.regime.as_str());
    SOURCES.iter().find(|(n, _)| *n == name).copied()
}

fn load(eq: &HeatEquation) -> Result<Option<RawFile>> {
    let Some((name, src)) = source_for(eq) else { return Ok(None) };
    let raw: RawFile = toml::from_str(src).map_err(|e| Error::Format(format!("printed laws {name}: {e}")))?;
    if raw.dimension != eq.n || raw.regime != eq.regime {
        return Err(Error::Format(format!("printed laws {name}: header does not match")));
    }
    Ok(Some(raw))
}

/// Replace the whole-word token `tok` by `(by)`.
fn replace_token(text: &str, tok: char, by: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let chars: Vec<char> = text.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        let word = |j: Option<&char>| j.is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_');
        if c == tok && !word(i.checked_sub(1).and_then(|j| chars.get(j))) && !word(chars.get(i + 1)) {
            out.push('(');
            out.push_str(by);
            out.push(')');
        } else {
            out.push(c);
        }
    }
    out
}

fn parse_poly(text: &str, w: Option<&str>) -> Result<Poly> {
    let text = match w {
        Some(w) => replace_token(text, 'W', w),
        None if text.contains('W') => {
            return Err(Error::Format(format!("`{text}` uses W but no W is printed")));
        }
        None => text.to_string(),
    };
    Ok(parse(&text)?.to_poly())
}

/// Split `text` into (coefficient of `B`, rest).
fn split_bracket(text: &str, w: Option<&str>) -> Result<(Poly, Poly)> {
    let rest = parse_poly(&replace_token(text, 'B', "0"), w)?;
    let with = parse_poly(&replace_token(text, 'B', "1"), w)?;
    Ok((&with - &rest, rest))
}

fn component(text: &str, w: Option<&str>, eq: &HeatEquation) -> Result<PrintedComponent> {
    let (b, rest) = split_bracket(text, w)?;
    Ok(match eq.regime {
        Regime::Integer => {
            let bracket = &Poly::atom(Atom::jet(Field::U, &[Var::T])) - &eq.laplacian(Field::U);
            PrintedComponent::local(&(&b * &bracket) + &rest)
        }
        Regime::Fractional => PrintedComponent {
            bracket: b,
            local: rest,
            nonlocal: Vec::new(),
        },
    })
}

fn parse_law(raw: &RawLaw, eq: &HeatEquation) -> Result<PrintedLaw> {
    let ctx = |e: Error| Error::Format(format!("printed law {}: {e}", raw.label));
    let w_text = raw.w.as_deref();
    let w = w_text.map(|s| parse_poly(s, None)).transpose().map_err(ctx)?;
    let ct = match &raw.ct {
        None => None,
        Some(RawTime::Local(s)) => Some(component(s, w_text, eq).map_err(ctx)?),
        Some(RawTime::Fractional { bracket, frac_int, j }) => {
            let b = bracket.as_deref().map(|s| parse_poly(s, w_text)).transpose().map_err(ctx)?;
            let mut c = PrintedComponent::local(Poly::zero());
            c.bracket = b.unwrap_or_else(Poly::zero);
            c.nonlocal = vec![
                Nonlocal::FracInt {
                    coeff: phi(),
                    arg: parse_poly(frac_int, w_text).map_err(ctx)?,
                },
                Nonlocal::J {
                    f: parse_poly(j, w_text).map_err(ctx)?,
                    g: phi_jet(&[Var::T]),
                },
            ];
            Some(c)
        }
    };
    let spatial = [&raw.cx, &raw.cy, &raw.cz, &raw.cw];
    if spatial[eq.n..].iter().any(|c| c.is_some()) {
        return Err(ctx(Error::Format("spatial component beyond the dimension".into())));
    }
    let cx = spatial[..eq.n]
        .iter()
        .map(|c| c.as_deref().map(|s| component(s, w_text, eq)).transpose())
        .collect::<Result<Vec<_>>>()
        .map_err(ctx)?;
    Ok(PrintedLaw {
        label: raw.label.clone(),
        symmetry: raw.symmetry.clone().unwrap_or_else(|| raw.label.clone()),
        w,
        ct,
        cx,
        known: raw.known.clone(),
    })
}

/// All printed laws for `eq`; empty when none were published.
pub fn printed_laws(eq: &HeatEquation) -> Result<Vec<PrintedLaw>> {
    match load(eq)? {
        None => Ok(Vec::new()),
        Some(raw) => raw.law.iter().map(|l| parse_law(l, eq)).collect(),
    }
}

/// Catalog generators without a printed law.
pub fn unprinted(eq: &HeatEquation) -> Result<Vec<String>> {
    Ok(load(eq)?.map(|r| r.unprinted).unwrap_or_default())
}

fn onshell(p: &Poly, eq: &HeatEquation) -> Result<Poly> {
    p.substitute(&on_shell_rules(eq), &JetConfig::new(8))
}

fn compare(printed: &PrintedComponent, computed: &Component, eq: &HeatEquation) -> Result<(DiffStatus, Poly)> {
    let d_local = &printed.local - &computed.local;
    let same_nl = printed.nonlocal == computed.nonlocal;
    if d_local.is_zero() && printed.bracket == &phi() * &computed.lagrangian && same_nl {
        return Ok((DiffStatus::Match, Poly::zero()));
    }
    let d = onshell(&d_local, eq)?;
    if d.is_zero() && same_nl {
        Ok((DiffStatus::OnShell, d))
    } else {
        Ok((DiffStatus::Differs, d))
    }
}

fn component_label(i: usize) -> String {
    format!("C{}", Var::space(i).name(crate::expr::Naming::Letters))
}

/// Components of `cv` that disagree with the printed law, or are not
/// printed. Matching components are omitted; an empty result means full
/// agreement or no published law (`n > 4`).
pub fn printed_diff(cv: &ConservedVector) -> Result<Vec<DiffEntry>> {
    let eq = cv.eq;
    let laws = printed_laws(&eq)?;
    let missing_law = || DiffEntry {
        symmetry: cv.symmetry.clone(),
        label: String::new(),
        component: "*".into(),
        status: DiffStatus::Missing,
        printed: String::new(),
        computed: String::new(),
        difference: String::new(),
        reason: Some("no conserved vector is printed for this generator".into()),
    };
    let Some(law) = laws.iter().find(|l| l.symmetry == cv.symmetry) else {
        if unprinted(&eq)?.contains(&cv.symmetry) {
            return Ok(vec![missing_law()]);
        }
        return Ok(Vec::new());
    };
    let reason = |comp: &str, st: DiffStatus| {
        law.known
            .iter()
            .find(|k| k.component == comp && k.status == st)
            .map(|k| k.reason.clone())
    };
    let mut out = Vec::new();
    let mut push = |comp: String, st: DiffStatus, printed: String, computed: String, diff: String| {
        if st != DiffStatus::Match {
            out.push(DiffEntry {
                symmetry: cv.symmetry.clone(),
                label: law.label.clone(),
                reason: reason(&comp, st),
                component: comp,
                status: st,
                printed,
                computed,
                difference: diff,
            });
        }
    };

    match &law.w {
        None => push("W".into(), DiffStatus::Missing, String::new(), cv.w.w.to_string(), String::new()),
        Some(w) => {
            let d = w - &cv.w.w;
            let st = if d.is_zero() { DiffStatus::Match } else { DiffStatus::Differs };
            push("W".into(), st, w.to_string(), cv.w.w.to_string(), d.to_string());
        }
    }
    let pairs = std::iter::once(("Ct".to_string(), law.ct.as_ref(), &cv.ct)).chain(
        law.cx
            .iter()
            .zip(&cv.cx)
            .enumerate()
            .map(|(i, (p, c))| (component_label(i + 1), p.as_ref(), c)),
    );
    for (name, printed, computed) in pairs {
        match printed {
            None => push(name, DiffStatus::Missing, String::new(), computed.text(), String::new()),
            Some(p) => {
                let (st, d) = compare(p, computed, &eq)?;
                push(name, st, p.text(), computed.text(), d.to_string());
            }
        }
    }
    Ok(out)
}

/// Outcome of comparing every printed law of one equation.
#[derive(Clone, Debug, Default)]
pub struct PrintedReport {
    pub name: String,
    pub laws: usize,
    /// disagreements without a matching `known` entry
    pub unexpected: Vec<DiffEntry>,
    /// `known` entries that no longer disagree
    pub stale: Vec<(String, Known)>,
}

impl PrintedReport {
    pub fn passed(&self) -> bool {
        self.unexpected.is_empty() && self.stale.is_empty()
    }
}

/// Compare all printed laws of `eq` against `cvs`.
pub fn check_printed(eq: &HeatEquation, cvs: &[ConservedVector]) -> Result<PrintedReport> {
    let laws = printed_laws(eq)?;
    let mut report = PrintedReport {
        name: format!("{}d-{}", eq.n, eq.regime.as_str()),
        laws: laws.len(),
        ..Default::default()
    };
    for law in &laws {
        let cv = cvs.iter().find(|c| c.symmetry == law.symmetry).ok_or_else(|| {
            Error::Format(format!("printed law {} names unknown generator {}", law.label, law.symmetry))
        })?;
        let diff = printed_diff(cv)?;
        let found: BTreeSet<(String, DiffStatus)> =
            diff.iter().map(|d| (d.component.clone(), d.status)).collect();
        let known: BTreeSet<(String, DiffStatus)> =
            law.known.iter().map(|k| (k.component.clone(), k.status)).collect();
        report
            .unexpected
            .extend(diff.into_iter().filter(|d| !known.contains(&(d.component.clone(), d.status))));
        report.stale.extend(
            law.known
                .iter()
                .filter(|k| !found.contains(&(k.component.clone(), k.status)))
                .map(|k| (law.label.clone(), k.clone())),
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn token_replacement_respects_words() {
        assert_eq!(replace_token("W*phi_x - phi*W", 'W', "u"), "(u)*phi_x - phi*(u)");
        assert_eq!(replace_token("phi*B + u_{xx}", 'B', "0"), "phi*(0) + u_{xx}");
    }

    #[test]
    fn bracket_coefficients() {
        let (b, rest) = split_bracket("alpha*x*phi*B + W*phi_x", Some("u")).unwrap();
        assert_eq!(b, parse("alpha*x*phi").unwrap().to_poly());
        assert_eq!(rest, parse("u*phi_x").unwrap().to_poly());
    }

    #[test]
    fn every_file_parses() {
        for n in 1..=4 {
            for eq in [HeatEquation::integer(n), HeatEquation::fractional(n)] {
                let laws = printed_laws(&eq).unwrap();
                assert!(!laws.is_empty(), "{eq:?}");
            }
        }
        assert!(printed_laws(&HeatEquation::integer(5)).unwrap().is_empty());
    }
}
