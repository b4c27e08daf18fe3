//! Atoms of the jet space: independent variables and jet coordinates of the
//! dependent fields `u`, `phi` and `F`.

use std::cmp::Ordering;
use std::fmt;

/// Independent variable. Index 0 is `t`, index `i ≥ 1` is the spatial
/// coordinate `x_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u8);

impl Var {
    pub const T: Var = Var(0);

    pub fn space(i: usize) -> Var {
        assert!((1..=u8::MAX as usize).contains(&i), "spatial index out of range");
        Var(i as u8)
    }

    pub fn is_time(self) -> bool {
        self.0 == 0
    }

    pub fn name(self, naming: Naming) -> String {
        match (self.0, naming) {
            (0, _) => "t".into(),
            (1, Naming::Letters) => "x".into(),
            (2, Naming::Letters) => "y".into(),
            (3, Naming::Letters) => "z".into(),
            (4, Naming::Letters) => "w".into(),
            (i, _) => format!("x{i}"),
        }
    }
}

/// How spatial coordinates are spelled when printing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Naming {
    /// `x, y, z, w` (only valid up to four spatial dimensions)
    Letters,
    /// `x1, x2, …`
    Numbered,
}

/// Multiset of independent variables, kept sorted. The empty index is the
/// field itself.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DerivIndex(Vec<Var>);

impl DerivIndex {
    pub fn empty() -> Self {
        DerivIndex(Vec::new())
    }

    pub fn new(mut vars: Vec<Var>) -> Self {
        vars.sort();
        DerivIndex(vars)
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn vars(&self) -> &[Var] {
        &self.0
    }

    pub fn with(&self, v: Var) -> Self {
        let mut vars = self.0.clone();
        let pos = vars.partition_point(|w| *w <= v);
        vars.insert(pos, v);
        DerivIndex(vars)
    }

    pub fn count(&self, v: Var) -> usize {
        self.0.iter().filter(|w| **w == v).count()
    }

    /// `self − other` as multisets, when `other ⊆ self`.
    pub fn strip(&self, other: &DerivIndex) -> Option<DerivIndex> {
        let mut rest = self.0.clone();
        for v in &other.0 {
            let pos = rest.iter().position(|w| w == v)?;
            rest.remove(pos);
        }
        Some(DerivIndex(rest))
    }

    pub fn max_var(&self) -> u8 {
        self.0.iter().map(|v| v.0).max().unwrap_or(0)
    }
}

impl PartialOrd for DerivIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DerivIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

/// Dependent quantities living on the jet space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    /// the unknown of the heat equation
    U,
    /// the adjoint variable of the formal Lagrangian
    Phi,
    /// an arbitrary solution (the infinite-dimensional symmetry)
    F,
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::U => "u",
            Field::Phi => "phi",
            Field::F => "F",
        }
    }
}

/// Ordered `t < x_1 < … < x_n < u_J < phi_J < F_J`; α lives in the
/// coefficient ring and sorts after every atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Var(Var),
    Jet(Field, DerivIndex),
}

impl Atom {
    pub fn t() -> Atom {
        Atom::Var(Var::T)
    }

    pub fn x(i: usize) -> Atom {
        Atom::Var(Var::space(i))
    }

    pub fn u() -> Atom {
        Atom::Jet(Field::U, DerivIndex::empty())
    }

    pub fn jet(field: Field, vars: &[Var]) -> Atom {
        Atom::Jet(field, DerivIndex::new(vars.to_vec()))
    }

    pub fn order(&self) -> usize {
        match self {
            Atom::Var(_) => 0,
            Atom::Jet(_, j) => j.order(),
        }
    }

    pub fn max_var(&self) -> u8 {
        match self {
            Atom::Var(v) => v.0,
            Atom::Jet(_, j) => j.max_var(),
        }
    }

    pub fn render(&self, naming: Naming) -> String {
        match self {
            Atom::Var(v) => v.name(naming),
            Atom::Jet(f, j) => {
                if j.order() == 0 {
                    return f.name().to_string();
                }
                let names: Vec<String> = j.vars().iter().map(|v| v.name(naming)).collect();
                if names.len() == 1 && names[0].len() == 1 {
                    format!("{}_{}", f.name(), names[0])
                } else {
                    format!("{}_{{{}}}", f.name(), names.concat())
                }
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let naming = if self.max_var() > 4 {
            Naming::Numbered
        } else {
            Naming::Letters
        };
        write!(f, "{}", self.render(naming))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_is_a_multiset() {
        let a = DerivIndex::new(vec![Var(2), Var(1)]);
        let b = DerivIndex::new(vec![Var(1), Var(2)]);
        assert_eq!(a, b);
        assert_eq!(a.with(Var(1)).count(Var(1)), 2);
        assert_eq!(
            a.with(Var::T).strip(&DerivIndex::new(vec![Var::T])),
            Some(a.clone())
        );
        assert!(a.strip(&DerivIndex::new(vec![Var::T])).is_none());
    }

    #[test]
    fn rendering() {
        assert_eq!(Atom::jet(Field::U, &[Var::T]).to_string(), "u_t");
        assert_eq!(Atom::jet(Field::U, &[Var(2), Var(1)]).to_string(), "u_{xy}");
        assert_eq!(Atom::jet(Field::Phi, &[Var(1)]).to_string(), "phi_x");
        assert_eq!(Atom::jet(Field::U, &[Var(5)]).to_string(), "u_{x5}");
        assert_eq!(Atom::x(6).to_string(), "x6");
    }

    #[test]
    fn atom_order() {
        assert!(Atom::t() < Atom::x(1));
        assert!(Atom::x(4) < Atom::u());
        assert!(Atom::u() < Atom::jet(Field::U, &[Var::T]));
        assert!(Atom::jet(Field::U, &[Var(3)]) < Atom::jet(Field::Phi, &[]));
    }
}
