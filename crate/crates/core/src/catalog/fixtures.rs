//! Published bracket tables, transcribed entry by entry, and their
//! comparison with the computed tables.
//!
//! Each fixture lists the printed entries as `[A, B] = rhs` and an
//! allow-list of printed entries known to disagree with the computation,
//! each with a reason. A fixture passes when the set of disagreeing
//! entries equals the allow-list exactly.

use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;

use super::{fields, generators, HeatEquation, Regime};
use crate::error::{Error, Result};
use crate::expr::{parse, AlphaRatio};
use crate::vector_fields::{commutator_table, CommutatorTable, Decomposition};

#[derive(Clone, Debug, Deserialize)]
pub struct AllowEntry {
    pub entry: String,
    pub reason: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct BracketFixture {
    pub dimension: usize,
    pub regime: Regime,
    pub printed: Vec<String>,
    #[serde(default)]
    pub allow: Vec<AllowEntry>,
}

const SOURCES: [(&str, &str); 8] = [
    ("1d-integer", include_str!("fixtures/1d_integer.toml")),
    ("2d-integer", include_str!("fixtures/2d_integer.toml")),
    ("3d-integer", include_str!("fixtures/3d_integer.toml")),
    ("4d-integer", include_str!("fixtures/4d_integer.toml")),
    ("1d-fractional", include_str!("fixtures/1d_fractional.toml")),
    ("2d-fractional", include_str!("fixtures/2d_fractional.toml")),
    ("3d-fractional", include_str!("fixtures/3d_fractional.toml")),
    ("4d-fractional", include_str!("fixtures/4d_fractional.toml")),
];

/// Names of all fixtures.
pub fn fixture_names() -> Vec<&'static str> {
    SOURCES.iter().map(|(n, _)| *n).collect()
}

pub fn load_fixture(name: &str) -> Result<BracketFixture> {
    let (_, src) = SOURCES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::InvalidArgument(format!("no bracket fixture `{name}`")))?;
    parse_fixture(name, src)
}

/// Parse fixture TOML, e.g. an edited copy of a built-in fixture.
pub fn parse_fixture(name: &str, src: &str) -> Result<BracketFixture> {
    toml::from_str(src).map_err(|e| Error::Format(format!("fixture {name}: {e}")))
}

/// Fixture for a given equation, if one was published.
pub fn fixture_for(eq: &HeatEquation) -> Option<BracketFixture> {
    let name = format!("{}d-{}", eq.n, eq.regime.as_str());
    load_fixture(&name).ok()
}

/// Right-hand side of a printed entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrintedValue {
    Combination(BTreeMap<String, AlphaRatio>),
    /// a member of the infinite family `G ∂_u`
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrintedEntry {
    pub text: String,
    pub left: String,
    pub right: String,
    pub value: PrintedValue,
}

fn split_top_level(s: &str) -> Vec<(bool, String)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut neg = false;
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' if depth == 0 => {
                if cur.trim().is_empty() {
                    neg ^= ch == '-';
                } else {
                    out.push((neg, cur.trim().to_string()));
                    cur.clear();
                    neg = ch == '-';
                }
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        out.push((neg, cur.trim().to_string()));
    }
    out
}

/// Parse `[A, B] = c1*N1 + c2*N2 ...`. Coefficients may involve `alpha`.
pub fn parse_entry(text: &str) -> Result<PrintedEntry> {
    let bad = |m: &str| Error::Format(format!("bracket entry `{text}`: {m}"));
    let (lhs, rhs) = text.split_once('=').ok_or_else(|| bad("missing `=`"))?;
    let lhs = lhs.trim();
    let inner = lhs
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| bad("left side must be `[A, B]`"))?;
    let (left, right) = inner.split_once(',').ok_or_else(|| bad("left side needs two names"))?;
    let rhs = rhs.trim();
    let value = if rhs == "infinite" {
        PrintedValue::Infinite
    } else {
        let mut map: BTreeMap<String, AlphaRatio> = BTreeMap::new();
        for (neg, term) in split_top_level(rhs) {
            let (coef, name) = match term.rfind('*') {
                Some(k) => {
                    let c = parse(&term[..k])?
                        .to_poly()
                        .as_coeff()
                        .ok_or_else(|| bad("coefficient must be a polynomial in alpha"))?;
                    (AlphaRatio::from_poly(c), term[k + 1..].trim().to_string())
                }
                None => (AlphaRatio::one(), term.trim().to_string()),
            };
            let coef = if neg { -&coef } else { coef };
            let slot = map.entry(name).or_insert_with(AlphaRatio::zero);
            *slot = &*slot + &coef;
        }
        map.retain(|_, c| !c.is_zero());
        PrintedValue::Combination(map)
    };
    Ok(PrintedEntry {
        text: text.to_string(),
        left: left.trim().to_string(),
        right: right.trim().to_string(),
        value,
    })
}

/// One printed entry that disagrees with the computation.
#[derive(Clone, Debug)]
pub struct Mismatch {
    pub entry: String,
    pub computed: String,
    pub allowed: Option<String>,
}

#[derive(Clone, Debug)]
pub struct FixtureReport {
    pub name: String,
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
    /// allow-list entries whose printed value actually agrees
    pub stale_allow: Vec<String>,
    /// computed nonzero brackets with no printed entry in either order
    pub missing_from_print: Vec<String>,
}

impl FixtureReport {
    /// Mismatches not covered by the allow-list.
    pub fn unexpected(&self) -> Vec<&Mismatch> {
        self.mismatches.iter().filter(|m| m.allowed.is_none()).collect()
    }

    pub fn passed(&self) -> bool {
        self.unexpected().is_empty() && self.stale_allow.is_empty()
    }
}

fn matches_computed(table: &CommutatorTable, e: &PrintedEntry) -> Option<String> {
    let (Some(i), Some(j)) = (table.index_of(&e.left), table.index_of(&e.right)) else {
        return Some("unknown generator name in the printed entry".into());
    };
    let computed = table.entry(i, j);
    let text = format!("[{}, {}] = {}", e.left, e.right, table.entry_text(i, j));
    let agree = match (&e.value, computed) {
        (PrintedValue::Infinite, Decomposition::Outside { infinite }) => *infinite,
        (PrintedValue::Combination(map), Decomposition::Span(c)) => {
            map.keys().all(|k| table.index_of(k).is_some())
                && table
                    .basis
                    .iter()
                    .zip(c)
                    .all(|(n, k)| map.get(n).cloned().unwrap_or_else(AlphaRatio::zero) == *k)
        }
        _ => false,
    };
    (!agree).then_some(text)
}

/// Compare a fixture with the freshly computed table.
pub fn check_fixture(name: &str) -> Result<FixtureReport> {
    compare_fixture(name, &load_fixture(name)?)
}

/// Compare a parsed fixture with the freshly computed table.
pub fn compare_fixture(name: &str, fx: &BracketFixture) -> Result<FixtureReport> {
    let eq = HeatEquation::new(fx.dimension, fx.regime)?;
    let table = commutator_table(&fields(&generators(&eq)?))?;
    let allow: BTreeMap<&str, &str> = fx
        .allow
        .iter()
        .map(|a| (a.entry.as_str(), a.reason.as_str()))
        .collect();
    let mut mismatches = Vec::new();
    let mut stale = Vec::new();
    let mut printed_pairs = BTreeSet::new();
    for text in &fx.printed {
        let e = parse_entry(text)?;
        if let (Some(i), Some(j)) = (table.index_of(&e.left), table.index_of(&e.right)) {
            printed_pairs.insert((i.min(j), i.max(j)));
        }
        match matches_computed(&table, &e) {
            Some(computed) => mismatches.push(Mismatch {
                entry: text.clone(),
                computed,
                allowed: allow.get(text.as_str()).map(|r| r.to_string()),
            }),
            None => {
                if allow.contains_key(text.as_str()) {
                    stale.push(text.clone());
                }
            }
        }
    }
    for a in &fx.allow {
        if !fx.printed.contains(&a.entry) {
            stale.push(a.entry.clone());
        }
    }
    let missing = table
        .nonzero()
        .filter(|(i, j, _)| !printed_pairs.contains(&(*i, *j)))
        .map(|(i, j, _)| format!("[{}, {}] = {}", table.basis[i], table.basis[j], table.entry_text(i, j)))
        .collect();
    Ok(FixtureReport {
        name: name.to_string(),
        checked: fx.printed.len(),
        mismatches,
        stale_allow: stale,
        missing_from_print: missing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{int, AlphaPoly};

    #[test]
    fn entry_parsing() {
        let e = parse_entry("[G3, G5] = -2*G6 + 4*G4").unwrap();
        let PrintedValue::Combination(m) = e.value else { panic!() };
        assert_eq!(m["G6"], AlphaRatio::from_rational(int(-2)));
        assert_eq!(m["G4"], AlphaRatio::from_rational(int(4)));
        let e = parse_entry("[G14, G12] = -2*alpha*G12").unwrap();
        let PrintedValue::Combination(m) = e.value else { panic!() };
        assert_eq!(m["G12"], AlphaRatio::from_poly(AlphaPoly::from_coeffs(vec![int(0), int(-2)])));
        let e = parse_entry("[G1, G2] = (alpha - 1)*G3 - G4").unwrap();
        let PrintedValue::Combination(m) = e.value else { panic!() };
        assert_eq!(m.len(), 2);
        assert_eq!(parse_entry("[G11, G16] = infinite").unwrap().value, PrintedValue::Infinite);
        assert!(parse_entry("[G1 G2] = G3").is_err());
    }

    #[test]
    fn all_fixtures_load() {
        for n in fixture_names() {
            let f = load_fixture(n).unwrap();
            for e in &f.printed {
                parse_entry(e).unwrap();
            }
        }
    }
}
