//! Matching structure constants against so(n) and sl(2,R).

use num_integer::Roots;
use num_traits::{Signed, Zero};

use super::table::{Decomposer, Decomposition};
use super::{lie_bracket, VectorField};
use crate::error::{Error, Result};
use crate::expr::{int, rat, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pattern {
    /// ordered `(e, h, f)` with `[e,h] = 2e`, `[f,h] = −2f`, `[e,f] = h`
    Sl2,
    /// `J_ab` for `a < b`, ordered `12, 13, …, 1n, 23, …`, with
    /// `[J_ab, J_cd] = δ_bc J_ad − δ_ac J_bd − δ_bd J_ac + δ_ad J_bc`
    So(usize),
}

impl Pattern {
    pub fn dim(self) -> usize {
        match self {
            Pattern::Sl2 => 3,
            Pattern::So(n) => n * (n - 1) / 2,
        }
    }

    /// `P[i][j][k]`.
    pub fn constants(self) -> Vec<Vec<Vec<Rational>>> {
        let d = self.dim();
        let mut p = vec![vec![vec![Rational::zero(); d]; d]; d];
        match self {
            Pattern::Sl2 => {
                let (e, h, f) = (0, 1, 2);
                let mut set = |i: usize, j: usize, k: usize, v: i128| {
                    p[i][j][k] = int(v);
                    p[j][i][k] = int(-v);
                };
                set(e, h, e, 2);
                set(f, h, f, -2);
                set(e, f, h, 1);
            }
            Pattern::So(n) => {
                let pairs: Vec<(usize, usize)> = (0..n)
                    .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                    .collect();
                // signed index of J_xy
                let idx = |x: usize, y: usize| -> Option<(usize, i128)> {
                    if x == y {
                        return None;
                    }
                    let (a, b, s) = if x < y { (x, y, 1) } else { (y, x, -1) };
                    pairs.iter().position(|&q| q == (a, b)).map(|k| (k, s))
                };
                let delta = |x: usize, y: usize| i128::from(x == y);
                for (i, &(a, b)) in pairs.iter().enumerate() {
                    for (j, &(c, dd)) in pairs.iter().enumerate() {
                        let terms = [
                            (delta(b, c), a, dd),
                            (-delta(a, c), b, dd),
                            (-delta(b, dd), a, c),
                            (delta(a, dd), b, c),
                        ];
                        for (coef, x, y) in terms {
                            if coef == 0 {
                                continue;
                            }
                            if let Some((k, s)) = idx(x, y) {
                                p[i][j][k] += int(coef * s);
                            }
                        }
                    }
                }
            }
        }
        p
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalMatch {
    pub matched: bool,
    /// `s_i` such that `s_i · basis_i` has the canonical constants
    pub scaling: Option<Vec<Rational>>,
    /// brackets had components along the `modulo` fields, which were
    /// dropped (quotient by a central extension)
    pub dropped_central: bool,
    pub reason: Option<String>,
}

impl CanonicalMatch {
    fn fail(reason: impl Into<String>) -> Self {
        CanonicalMatch {
            matched: false,
            scaling: None,
            dropped_central: false,
            reason: Some(reason.into()),
        }
    }
}

const SEEDS: [(i128, i128); 10] = [
    (1, 1),
    (-1, 1),
    (2, 1),
    (-2, 1),
    (1, 2),
    (-1, 2),
    (4, 1),
    (-4, 1),
    (1, 4),
    (-1, 4),
];

/// Compare the structure constants of `basis` (taken modulo the span of
/// `modulo`) with `pattern`, allowing a rational rescaling of each element.
pub fn match_canonical(
    basis: &[VectorField],
    pattern: Pattern,
    modulo: &[VectorField],
) -> Result<CanonicalMatch> {
    let d = pattern.dim();
    if basis.len() != d {
        return Err(Error::InvalidArgument(format!(
            "pattern needs {d} elements, got {}",
            basis.len()
        )));
    }
    let mut full: Vec<VectorField> = basis.to_vec();
    full.extend_from_slice(modulo);
    let dec = Decomposer::new(&full);
    let mut c = vec![vec![vec![Rational::zero(); d]; d]; d];
    let mut dropped = false;
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            let b = lie_bracket(&basis[i], &basis[j])?;
            let Decomposition::Span(lam) = dec.decompose(&b) else {
                return Ok(CanonicalMatch::fail(format!(
                    "[{}, {}] is outside the span",
                    basis[i].name, basis[j].name
                )));
            };
            dropped |= lam[d..].iter().any(|l| !l.is_zero());
            for k in 0..d {
                match lam[k].as_rational() {
                    Some(r) => c[i][j][k] = r,
                    None => {
                        return Ok(CanonicalMatch::fail(format!(
                            "[{}, {}] has an α-dependent coefficient",
                            basis[i].name, basis[j].name
                        )))
                    }
                }
            }
        }
    }
    let p = pattern.constants();
    let mut eqs = Vec::new();
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                match (c[i][j][k].is_zero(), p[i][j][k].is_zero()) {
                    (true, true) => {}
                    (false, false) => eqs.push((i, j, k, p[i][j][k] / c[i][j][k])),
                    _ => {
                        return Ok(CanonicalMatch::fail(format!(
                            "zero pattern differs at ([{}, {}], {})",
                            basis[i].name, basis[j].name, basis[k].name
                        )))
                    }
                }
            }
        }
    }
    let mut s = vec![None; d];
    match search(&mut s, &eqs) {
        Some(scaling) => Ok(CanonicalMatch {
            matched: true,
            scaling: Some(scaling),
            dropped_central: dropped,
            reason: None,
        }),
        None => Ok(CanonicalMatch::fail("no rational rescaling matches the pattern")),
    }
}

fn rational_sqrt(r: Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (*r.numer(), *r.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (sn * sn == n && sd * sd == d).then(|| rat(sn, sd))
}

/// Constraint propagation: `s_i s_j = r s_k` for each equation.
fn propagate(s: &mut [Option<Rational>], eqs: &[(usize, usize, usize, Rational)]) -> bool {
    loop {
        let mut changed = false;
        for &(i, j, k, r) in eqs {
            match (s[i], s[j], s[k]) {
                (Some(a), Some(b), Some(c)) => {
                    if a * b != r * c {
                        return false;
                    }
                }
                (Some(a), Some(b), None) => {
                    s[k] = Some(a * b / r);
                    changed = true;
                }
                (Some(a), None, Some(c)) if i != j => {
                    s[j] = Some(r * c / a);
                    changed = true;
                }
                (None, Some(b), Some(c)) if i != j => {
                    s[i] = Some(r * c / b);
                    changed = true;
                }
                (None, None, Some(c)) if i == j => match rational_sqrt(r * c) {
                    Some(q) if !q.is_zero() => {
                        s[i] = Some(q);
                        changed = true;
                    }
                    _ => return false,
                },
                _ => {}
            }
        }
        if !changed {
            return true;
        }
    }
}

fn search(s: &mut Vec<Option<Rational>>, eqs: &[(usize, usize, usize, Rational)]) -> Option<Vec<Rational>> {
    if !propagate(s, eqs) {
        return None;
    }
    let Some(free) = s.iter().position(Option::is_none) else {
        return Some(s.iter().map(|v| v.unwrap()).collect());
    };
    let constrained = eqs.iter().any(|&(i, j, k, _)| i == free || j == free || k == free);
    let seeds: &[(i128, i128)] = if constrained { &SEEDS } else { &SEEDS[..1] };
    for &(n, dd) in seeds {
        let mut trial = s.clone();
        trial[free] = Some(rat(n, dd));
        if let Some(found) = search(&mut trial, eqs) {
            *s = trial;
            return Some(found);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vf(name: &str, xi0: &str, xi: &[&str], eta: &str) -> VectorField {
        VectorField::parse(name, xi0, xi, eta).unwrap()
    }

    #[test]
    fn pattern_constants_are_lie_algebras() {
        for p in [Pattern::Sl2, Pattern::So(3), Pattern::So(4)] {
            let c = p.constants();
            let d = p.dim();
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        assert_eq!(c[i][j][k], -c[j][i][k]);
                    }
                }
            }
        }
    }

    #[test]
    fn sl2_in_two_dimensions() {
        let b = vec![
            vf("G26", "1", &["0", "0"], "0"),
            vf("G27", "2*t", &["x", "y"], "0"),
            vf("G28", "4*t^2", &["4*x*t", "4*y*t"], "-u*(4*t+x^2+y^2)"),
        ];
        let hom = vf("G29", "0", &["0", "0"], "u");
        let m = match_canonical(&b, Pattern::Sl2, std::slice::from_ref(&hom)).unwrap();
        assert!(m.matched, "{m:?}");
        assert_eq!(m.scaling.unwrap(), vec![int(1), int(1), rat(1, 4)]);
        assert!(m.dropped_central);
        // without the central element the bracket [e, f] leaves the span
        assert!(!match_canonical(&b, Pattern::Sl2, &[]).unwrap().matched);
    }

    #[test]
    fn abelian_is_not_so3() {
        let b = vec![
            vf("a", "0", &["1", "0", "0"], "0"),
            vf("b", "0", &["0", "1", "0"], "0"),
            vf("c", "0", &["0", "0", "1"], "0"),
        ];
        assert!(!match_canonical(&b, Pattern::So(3), &[]).unwrap().matched);
        assert!(match_canonical(&b[..2], Pattern::So(3), &[]).is_err());
    }

    #[test]
    fn rotations_match_so3_up_to_sign() {
        let b = vec![
            vf("J12", "0", &["-y", "x", "0"], "0"),
            vf("J13", "0", &["z", "0", "-x"], "0"),
            vf("J23", "0", &["0", "-z", "y"], "0"),
        ];
        let m = match_canonical(&b, Pattern::So(3), &[]).unwrap();
        assert!(m.matched);
        assert!(m.scaling.unwrap().iter().all(|s| s.abs() == int(1)));
    }
}
