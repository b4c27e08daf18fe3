//! Basis decomposition, commutator tables, structure constants, closure and
//! derived series.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::linalg::{SparseVec, SpanSolver};
use super::{lie_bracket, VectorField};
use crate::error::{Error, Result};
use crate::expr::{AlphaPoly, AlphaRatio, Mono, Poly};

type Key = (usize, Mono);

/// Result of expressing a field in a basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decomposition {
    Span(Vec<AlphaRatio>),
    /// Not a combination of the basis. `infinite` marks fields involving
    /// the arbitrary solution `F`, i.e. members of the infinite family.
    Outside { infinite: bool },
}

impl Decomposition {
    pub fn is_zero(&self) -> bool {
        matches!(self, Decomposition::Span(v) if v.iter().all(AlphaRatio::is_zero))
    }

    pub fn coeffs(&self) -> Option<&[AlphaRatio]> {
        match self {
            Decomposition::Span(v) => Some(v),
            Decomposition::Outside { .. } => None,
        }
    }

    fn negated(&self) -> Decomposition {
        match self {
            Decomposition::Span(v) => Decomposition::Span(v.iter().map(|c| -c).collect()),
            o => o.clone(),
        }
    }
}

fn key_vector(f: &VectorField) -> SparseVec<Key> {
    let mut v = SparseVec::new();
    for (i, c) in f.components().iter().enumerate() {
        for (m, k) in c.terms() {
            v.insert((i, m.clone()), AlphaRatio::from_poly(k.clone()));
        }
    }
    v
}

fn lcm(a: &AlphaPoly, b: &AlphaPoly) -> AlphaPoly {
    let g = AlphaPoly::gcd(a, b);
    let (q, _) = (a * b).div_rem(&g);
    q.monic()
}

/// Prepared basis for repeated decompositions.
pub struct Decomposer<'a> {
    basis: &'a [VectorField],
    comps: Vec<Vec<Poly>>,
    solver: SpanSolver<Key>,
}

impl<'a> Decomposer<'a> {
    pub fn new(basis: &'a [VectorField]) -> Self {
        let vectors: Vec<_> = basis.iter().map(key_vector).collect();
        Decomposer {
            basis,
            comps: basis.iter().map(VectorField::components).collect(),
            solver: SpanSolver::new(&vectors),
        }
    }

    pub fn decompose(&self, f: &VectorField) -> Decomposition {
        let outside = Decomposition::Outside {
            infinite: f.involves_f(),
        };
        if self.basis.iter().any(|b| b.dim() != f.dim()) {
            return outside;
        }
        let Some(lambda) = self.solver.solve(&key_vector(f)) else {
            return outside;
        };
        // independent symbolic check: D f = Σ (D λ_k) b_k
        let d = lambda
            .iter()
            .fold(AlphaPoly::one(), |acc, l| lcm(&acc, l.den()));
        let fc = f.components();
        for (i, fi) in fc.iter().enumerate() {
            let mut acc = fi.scale(&d);
            for (l, bc) in lambda.iter().zip(&self.comps) {
                if l.is_zero() {
                    continue;
                }
                let (q, _) = d.div_rem(l.den());
                acc -= &bc[i].scale(&(l.num() * &q));
            }
            if !acc.is_zero() {
                return outside;
            }
        }
        Decomposition::Span(lambda)
    }
}

pub fn decompose_in_basis(f: &VectorField, basis: &[VectorField]) -> Decomposition {
    Decomposer::new(basis).decompose(f)
}

/// All pairwise brackets of a basis, decomposed.
#[derive(Clone, Debug)]
pub struct CommutatorTable {
    pub basis: Vec<String>,
    entries: Vec<Vec<Decomposition>>,
}

pub fn commutator_table(basis: &[VectorField]) -> Result<CommutatorTable> {
    let n = basis.len();
    for (i, a) in basis.iter().enumerate() {
        if a.dim() != basis[0].dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} has dimension {}, expected {}",
                a.name,
                a.dim(),
                basis[0].dim()
            )));
        }
        if basis[..i].iter().any(|b| b.name == a.name) {
            return Err(Error::InvalidArgument(format!("duplicate basis name {}", a.name)));
        }
    }
    let dec = Decomposer::new(basis);
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let computed: Vec<Result<Decomposition>> = pairs
        .par_iter()
        .map(|&(i, j)| lie_bracket(&basis[i], &basis[j]).map(|b| dec.decompose(&b)))
        .collect();
    let zero = Decomposition::Span(vec![AlphaRatio::zero(); n]);
    let mut entries = vec![vec![zero; n]; n];
    for ((i, j), d) in pairs.into_iter().zip(computed) {
        let d = d?;
        entries[j][i] = d.negated();
        entries[i][j] = d;
    }
    Ok(CommutatorTable {
        basis: basis.iter().map(|b| b.name.clone()).collect(),
        entries,
    })
}

impl CommutatorTable {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Decomposition {
        &self.entries[i][j]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b == name)
    }

    /// Nonzero entries with `i < j`.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, &Decomposition)> {
        let n = self.len();
        (0..n).flat_map(move |i| {
            (i + 1..n).filter_map(move |j| {
                let e = &self.entries[i][j];
                (!e.is_zero()).then_some((i, j, e))
            })
        })
    }

    /// Text form of the bracket value, e.g. `2*G3 - G1`.
    pub fn entry_text(&self, i: usize, j: usize) -> String {
        match &self.entries[i][j] {
            Decomposition::Span(c) => combination_text(c, &self.basis),
            Decomposition::Outside { infinite: true } => "outside span (infinite family)".into(),
            Decomposition::Outside { infinite: false } => "outside span".into(),
        }
    }

    pub fn structure_constants(&self) -> Result<StructureConstants> {
        let mut c = Vec::with_capacity(self.len());
        for (i, row) in self.entries.iter().enumerate() {
            let mut r = Vec::with_capacity(self.len());
            for (j, e) in row.iter().enumerate() {
                match e {
                    Decomposition::Span(v) => r.push(v.clone()),
                    Decomposition::Outside { .. } => {
                        return Err(Error::InvalidArgument(format!(
                            "basis not closed: [{}, {}] lies outside the span",
                            self.basis[i], self.basis[j]
                        )))
                    }
                }
            }
            c.push(r);
        }
        Ok(StructureConstants {
            names: self.basis.clone(),
            c,
        })
    }

    pub fn to_json(&self) -> Value {
        let mut entries = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                match &self.entries[i][j] {
                    Decomposition::Span(c) => {
                        if c.iter().all(AlphaRatio::is_zero) {
                            continue;
                        }
                        let coeffs: serde_json::Map<String, Value> = c
                            .iter()
                            .zip(&self.basis)
                            .filter(|(k, _)| !k.is_zero())
                            .map(|(k, name)| (name.clone(), Value::String(k.to_string())))
                            .collect();
                        entries.push(json!({"i": i, "j": j, "coeffs": coeffs}));
                    }
                    Decomposition::Outside { infinite } => {
                        entries.push(json!({"i": i, "j": j, "outside": true, "infinite": infinite}));
                    }
                }
            }
        }
        json!({"basis": self.basis, "entries": entries})
    }

    /// Three-column tabular listing of the nonzero brackets.
    pub fn to_latex(&self) -> String {
        let mut cells = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let e = &self.entries[i][j];
                if e.is_zero() {
                    continue;
                }
                let rhs = match e {
                    Decomposition::Span(c) => combination_latex(c, &self.basis),
                    Decomposition::Outside { infinite: true } => "\\text{outside span }(\\infty)".into(),
                    Decomposition::Outside { infinite: false } => "\\text{outside span}".into(),
                };
                cells.push(format!(
                    "$[{},{}]_{{LB}}={}$",
                    name_latex(&self.basis[i]),
                    name_latex(&self.basis[j]),
                    rhs
                ));
            }
        }
        let mut s = String::from("\\begin{tabular}{lll}\n");
        for chunk in cells.chunks(3) {
            s.push_str(&chunk.join(" & "));
            s.push_str("\\\\\n");
        }
        s.push_str("\\end{tabular}\n");
        s
    }
}

fn coeff_text(c: &AlphaRatio) -> (bool, String) {
    let neg = c.num().leading() < num_traits::Zero::zero();
    let mag = if neg { -c } else { c.clone() };
    (neg, mag.to_string())
}

fn needs_parens(s: &str) -> bool {
    s.contains(' ') || s.contains('/')
}

pub(crate) fn combination_text(c: &[AlphaRatio], names: &[String]) -> String {
    let mut s = String::new();
    for (k, name) in c.iter().zip(names) {
        if k.is_zero() {
            continue;
        }
        let (neg, mag) = coeff_text(k);
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if mag != "1" {
            if needs_parens(&mag) && mag.contains(' ') {
                s.push_str(&format!("({mag})*"));
            } else {
                s.push_str(&format!("{mag}*"));
            }
        }
        s.push_str(name);
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

pub(crate) fn name_latex(name: &str) -> String {
    match name.strip_prefix('G') {
        Some(d) if !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()) => {
            format!("\\Gamma_{{{d}}}")
        }
        _ => format!("\\mathrm{{{}}}", name.replace('_', "\\_")),
    }
}

fn ratio_latex(c: &AlphaRatio) -> String {
    let p = |a: &AlphaPoly| crate::expr::latex_poly(&Poly::coeff(a.clone()));
    if c.den() == &AlphaPoly::one() {
        p(c.num())
    } else {
        format!("\\frac{{{}}}{{{}}}", p(c.num()), p(c.den()))
    }
}

fn combination_latex(c: &[AlphaRatio], names: &[String]) -> String {
    let mut s = String::new();
    for (k, name) in c.iter().zip(names) {
        if k.is_zero() {
            continue;
        }
        let neg = k.num().leading() < num_traits::Zero::zero();
        let mag = if neg { -k } else { k.clone() };
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push(if neg { '-' } else { '+' });
        }
        let m = ratio_latex(&mag);
        if m != "1" {
            if m.contains(' ') {
                s.push_str(&format!("\\left({m}\\right)"));
            } else {
                s.push_str(&m);
            }
        }
        s.push_str(&name_latex(name));
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

/// `c[i][j][k]` with `[e_i, e_j] = Σ_k c[i][j][k] e_k`.
#[derive(Clone, Debug)]
pub struct StructureConstants {
    pub names: Vec<String>,
    pub c: Vec<Vec<Vec<AlphaRatio>>>,
}

impl StructureConstants {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// Bracket of two coordinate vectors.
    pub fn bracket(&self, v: &SparseVec<usize>, w: &SparseVec<usize>) -> SparseVec<usize> {
        let mut out: BTreeMap<usize, AlphaRatio> = BTreeMap::new();
        for (i, vi) in v {
            for (j, wj) in w {
                let vw = vi * wj;
                for (k, c) in self.c[*i][*j].iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let add = &vw * c;
                    let e = out.entry(k).or_insert_with(AlphaRatio::zero);
                    *e = &*e + &add;
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| {
                self.c[i][j]
                    .iter()
                    .zip(&self.c[j][i])
                    .all(|(a, b)| (a + b).is_zero())
            })
        })
    }

    /// Triples `(i, j, k)` violating the Jacobi identity.
    pub fn jacobi_violations(&self) -> Vec<(usize, usize, usize)> {
        let n = self.dim();
        let unit = |i: usize| -> SparseVec<usize> { [(i, AlphaRatio::one())].into_iter().collect() };
        let mut bad = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (a, b, c) = (unit(i), unit(j), unit(k));
                    let t1 = self.bracket(&a, &self.bracket(&b, &c));
                    let t2 = self.bracket(&b, &self.bracket(&c, &a));
                    let t3 = self.bracket(&c, &self.bracket(&a, &b));
                    let mut sum: BTreeMap<usize, AlphaRatio> = BTreeMap::new();
                    for t in [t1, t2, t3] {
                        for (key, v) in t {
                            let e = sum.entry(key).or_insert_with(AlphaRatio::zero);
                            *e = &*e + &v;
                        }
                    }
                    if sum.values().any(|v| !v.is_zero()) {
                        bad.push((i, j, k));
                    }
                }
            }
        }
        bad
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OffendingPair {
    pub i: usize,
    pub j: usize,
    pub names: (String, String),
    pub infinite: bool,
}

#[derive(Clone, Debug)]
pub struct ClosureReport {
    /// every bracket lies in the span
    pub closed: bool,
    /// closed apart from brackets landing in the infinite family
    pub closed_modulo_infinite: bool,
    pub offending: Vec<OffendingPair>,
}

pub fn closure_report(basis: &[VectorField]) -> Result<ClosureReport> {
    let table = commutator_table(basis)?;
    let mut offending = Vec::new();
    for i in 0..table.len() {
        for j in i + 1..table.len() {
            if let Decomposition::Outside { infinite } = table.entry(i, j) {
                offending.push(OffendingPair {
                    i,
                    j,
                    names: (table.basis[i].clone(), table.basis[j].clone()),
                    infinite: *infinite,
                });
            }
        }
    }
    Ok(ClosureReport {
        closed: offending.is_empty(),
        closed_modulo_infinite: offending.iter().all(|o| o.infinite),
        offending,
    })
}

/// Dimensions of `g ⊇ [g,g] ⊇ …` until the series stabilizes.
pub fn derived_series(basis: &[VectorField]) -> Result<Vec<usize>> {
    let sc = commutator_table(basis)?.structure_constants()?;
    let n = sc.dim();
    let mut current: Vec<SparseVec<usize>> = (0..n)
        .map(|i| [(i, AlphaRatio::one())].into_iter().collect())
        .collect();
    let mut dims = vec![SpanSolver::new(&current).rank()];
    loop {
        let mut brackets = Vec::new();
        for a in 0..current.len() {
            for b in a + 1..current.len() {
                let v = sc.bracket(&current[a], &current[b]);
                if !v.is_empty() {
                    brackets.push(v);
                }
            }
        }
        let solver = SpanSolver::new(&brackets);
        let d = solver.rank();
        let last = *dims.last().unwrap();
        dims.push(d);
        if d == 0 || d == last {
            return Ok(dims);
        }
        current = solver.echelon_rows();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{int, AlphaPoly};

    fn vf(name: &str, xi0: &str, xi: &[&str], eta: &str) -> VectorField {
        VectorField::parse(name, xi0, xi, eta).unwrap()
    }

    fn r(n: i128) -> AlphaRatio {
        AlphaRatio::from_rational(int(n))
    }

    #[test]
    fn decomposition_examples() {
        let dt = vf("dt", "1", &["0"], "0");
        let dx = vf("dx", "0", &["1"], "0");
        let b = [dt.clone(), dx.clone()];
        assert_eq!(
            decompose_in_basis(&dt.scale(int(2)), &b),
            Decomposition::Span(vec![r(2), r(0)])
        );
        let adx = vf("a", "0", &["alpha"], "0");
        assert_eq!(
            decompose_in_basis(&adx, std::slice::from_ref(&dx)),
            Decomposition::Span(vec![AlphaRatio::from_poly(AlphaPoly::alpha())])
        );
        let xdu = vf("xdu", "0", &["0"], "x");
        assert_eq!(
            decompose_in_basis(&xdu, &[dx, dt]),
            Decomposition::Outside { infinite: false }
        );
    }

    fn one_d_integer() -> Vec<VectorField> {
        vec![
            vf("G1", "0", &["1"], "0"),
            vf("G2", "0", &["2*t"], "-u*x"),
            vf("G3", "1", &["0"], "0"),
            vf("G4", "2*t", &["x"], "0"),
            vf("G5", "4*t^2", &["4*t*x"], "-u*(2*t+x^2)"),
            vf("G6", "0", &["0"], "u"),
        ]
    }

    #[test]
    fn one_dimensional_table() {
        let b = one_d_integer();
        let t = commutator_table(&b).unwrap();
        assert_eq!(t.entry_text(0, 1), "-G6");
        assert_eq!(t.entry_text(3, 4), "2*G5");
        assert_eq!(t.entry_text(2, 1), "2*G1");
        let sc = t.structure_constants().unwrap();
        assert!(sc.is_antisymmetric());
        assert!(sc.jacobi_violations().is_empty());
    }

    #[test]
    fn so3_table_and_series() {
        let b = vec![
            vf("G37", "0", &["-y", "x", "0"], "0"),
            vf("G38", "0", &["-z", "0", "x"], "0"),
            vf("G39", "0", &["0", "-z", "y"], "0"),
        ];
        let t = commutator_table(&b).unwrap();
        assert_eq!(t.entry_text(0, 1), "-G39");
        assert_eq!(derived_series(&b).unwrap(), vec![3, 3]);
    }

    #[test]
    fn series_and_closure() {
        let ab = vec![vf("a", "0", &["1", "0"], "0"), vf("b", "0", &["0", "1"], "0")];
        assert_eq!(derived_series(&ab).unwrap(), vec![2, 0]);
        let frac = vec![
            vf("G01", "0", &["1"], "0"),
            vf("G02", "2*t", &["alpha*x"], "0"),
            vf("G03", "0", &["0"], "u"),
        ];
        assert_eq!(derived_series(&frac).unwrap(), vec![3, 1, 0]);
        assert!(closure_report(&[]).unwrap().closed);

        let open = vec![
            vf("dt", "1", &["0"], "0"),
            vf("proj", "4*t^2", &["4*t*x"], "-u*(2*t+x^2)"),
        ];
        let rep = closure_report(&open).unwrap();
        assert!(!rep.closed);
        assert_eq!(rep.offending.len(), 1);
        assert!(derived_series(&open).is_err());
    }

    #[test]
    fn infinite_family_is_flagged() {
        let b = vec![vf("G1", "0", &["1"], "0"), vf("G7", "0", &["0"], "F")];
        let rep = closure_report(&b).unwrap();
        assert!(!rep.closed);
        assert!(rep.closed_modulo_infinite);
        let t = commutator_table(&b).unwrap();
        let j = t.to_json();
        assert_eq!(j["entries"][0]["outside"], true);
    }

    #[test]
    fn json_and_latex() {
        let t = commutator_table(&one_d_integer()).unwrap();
        let j = t.to_json();
        assert_eq!(j["basis"][0], "G1");
        let first = &j["entries"][0];
        assert_eq!(first["coeffs"]["G6"], "-1");
        let l = t.to_latex();
        assert!(l.contains("$[\\Gamma_{4},\\Gamma_{5}]_{LB}=2\\Gamma_{5}$"));
    }
}
