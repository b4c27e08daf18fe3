//! Plain-text printer (emits the parser grammar) and LaTeX emitter.

use num_traits::{One, Signed, Zero};

use super::atom::{Atom, Field, Naming};
use super::poly::{Mono, Poly};
use super::ring::{fmt_rational, AlphaPoly, Rational};
use super::Expr;

pub(crate) fn render(e: &Expr, naming: Naming) -> String {
    let mut s = String::new();
    write_expr(e, naming, &mut s);
    s
}

fn is_negative_term(e: &Expr) -> bool {
    match e {
        Expr::Num(c) => c.is_negative(),
        Expr::Product(v) => matches!(v.first(), Some(Expr::Num(c)) if c.is_negative()),
        _ => false,
    }
}

fn negate_term(e: &Expr) -> Expr {
    match e {
        Expr::Num(c) => Expr::Num(-c),
        Expr::Product(v) => {
            let Some(Expr::Num(c)) = v.first() else { unreachable!() };
            let mut rest: Vec<Expr> = v[1..].to_vec();
            if !(-c).is_one() {
                rest.insert(0, Expr::Num(-c));
            }
            match rest.len() {
                0 => Expr::one(),
                1 => rest.pop().unwrap(),
                _ => Expr::Product(rest),
            }
        }
        _ => unreachable!(),
    }
}

fn write_expr(e: &Expr, naming: Naming, s: &mut String) {
    match e {
        Expr::Num(c) => s.push_str(&fmt_rational(c)),
        Expr::Alpha => s.push_str("alpha"),
        Expr::Atom(a) => s.push_str(&a.render(naming)),
        Expr::Sum(v) => {
            if v.is_empty() {
                s.push('0');
            }
            for (i, t) in v.iter().enumerate() {
                if i > 0 && is_negative_term(t) {
                    s.push_str(" - ");
                    write_expr(&negate_term(t), naming, s);
                } else {
                    if i > 0 {
                        s.push_str(" + ");
                    }
                    write_expr(t, naming, s);
                }
            }
        }
        Expr::Product(v) => {
            if v.is_empty() {
                s.push('1');
            }
            for (i, f) in v.iter().enumerate() {
                if i == 0 {
                    if let Expr::Num(c) = f {
                        if *c == -Rational::one() && v.len() > 1 {
                            s.push('-');
                            continue;
                        }
                        s.push_str(&fmt_rational(c));
                        continue;
                    }
                } else if !(i == 1 && matches!(v[0], Expr::Num(c) if c == -Rational::one())) {
                    s.push('*');
                }
                write_factor(f, naming, s);
            }
        }
        Expr::Pow(b, k) => {
            write_base(b, naming, s);
            s.push('^');
            s.push_str(&k.to_string());
        }
    }
}

fn write_factor(f: &Expr, naming: Naming, s: &mut String) {
    match f {
        Expr::Sum(_) | Expr::Product(_) => {
            s.push('(');
            write_expr(f, naming, s);
            s.push(')');
        }
        Expr::Num(c) if c.is_negative() || !c.is_integer() => {
            s.push('(');
            s.push_str(&fmt_rational(c));
            s.push(')');
        }
        _ => write_expr(f, naming, s),
    }
}

fn write_base(b: &Expr, naming: Naming, s: &mut String) {
    match b {
        Expr::Alpha | Expr::Atom(_) => write_expr(b, naming, s),
        Expr::Num(c) if !c.is_negative() && c.is_integer() => write_expr(b, naming, s),
        _ => {
            s.push('(');
            write_expr(b, naming, s);
            s.push(')');
        }
    }
}

/// Grouped rendering: monomials in the jet atoms, each with its full
/// `Q[α]` coefficient, e.g. `(3*alpha - 2)*u`.
pub(crate) fn render_poly(p: &Poly, naming: Naming) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (m, c)) in ordered_terms(p).into_iter().enumerate() {
        let neg = c.leading().is_negative();
        let c = if neg { -c } else { c.clone() };
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let atoms = mono_text(m, naming);
        let coeff = coeff_text(&c, false);
        match (coeff.as_str(), atoms.is_empty()) {
            // a negated multi-term constant keeps its parentheses
            (_, true) => s.push_str(&coeff_text(&c, !neg)),
            ("1", false) => s.push_str(&atoms),
            (k, false) => {
                s.push_str(k);
                s.push('*');
                s.push_str(&atoms);
            }
        }
    }
    s
}

/// Terms sorted by total degree (descending), then by the monomial order.
fn ordered_terms(p: &Poly) -> Vec<(&Mono, &AlphaPoly)> {
    let mut v: Vec<_> = p.terms().collect();
    v.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then_with(|| a.0.cmp(b.0)));
    v
}

fn coeff_text(c: &AlphaPoly, standalone: bool) -> String {
    let multi = c.coeffs().iter().filter(|k| !k.is_zero()).count() > 1;
    if multi && !standalone {
        format!("({c})")
    } else {
        c.to_string()
    }
}

fn mono_text(m: &Mono, naming: Naming) -> String {
    m.factors()
        .iter()
        .map(|(a, e)| {
            let r = a.render(naming);
            if *e == 1 {
                r
            } else {
                format!("{r}^{e}")
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

fn latex_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom())
    }
}

fn latex_alpha_poly(c: &AlphaPoly) -> String {
    let mut s = String::new();
    let mut first = true;
    for (k, ck) in c.coeffs().iter().enumerate().rev() {
        if ck.is_zero() {
            continue;
        }
        let neg = ck.is_negative();
        if first {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        first = false;
        let mag = ck.abs();
        let a = match k {
            0 => String::new(),
            1 => "\\alpha".into(),
            _ => format!("\\alpha^{{{k}}}"),
        };
        if a.is_empty() {
            s.push_str(&latex_rational(&mag));
        } else if mag.is_one() {
            s.push_str(&a);
        } else {
            s.push_str(&latex_rational(&mag));
            s.push_str(&a);
        }
    }
    if first {
        s.push('0');
    }
    s
}

fn latex_atom(a: &Atom, naming: Naming) -> String {
    let var = |v: &super::atom::Var| match naming {
        Naming::Numbered if v.0 > 0 => format!("x_{{{}}}", v.0),
        _ => v.name(Naming::Letters),
    };
    match a {
        Atom::Var(v) => var(v),
        Atom::Jet(f, j) => {
            let base = match f {
                Field::U => "u",
                Field::Phi => "\\phi",
                Field::F => "F",
            };
            if j.order() == 0 {
                base.into()
            } else {
                let idx: String = j.vars().iter().map(var).collect();
                format!("{base}_{{{idx}}}")
            }
        }
    }
}

pub fn latex_poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let naming = if p.max_var() > 4 {
        Naming::Numbered
    } else {
        Naming::Letters
    };
    let mut s = String::new();
    for (i, (m, c)) in ordered_terms(p).into_iter().enumerate() {
        let neg = c.leading().is_negative();
        let c = if neg { -c } else { c.clone() };
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let atoms: Vec<String> = m
            .factors()
            .iter()
            .map(|(a, e)| {
                let r = latex_atom(a, naming);
                if *e == 1 {
                    r
                } else {
                    format!("{r}^{{{e}}}")
                }
            })
            .collect();
        let multi = c.coeffs().iter().filter(|k| !k.is_zero()).count() > 1;
        let coeff = latex_alpha_poly(&c);
        if atoms.is_empty() {
            if multi && neg {
                s.push_str(&format!("\\left({coeff}\\right)"));
            } else {
                s.push_str(&coeff);
            }
        } else {
            if multi {
                s.push_str(&format!("\\left({coeff}\\right) "));
            } else if coeff != "1" {
                s.push_str(&coeff);
                s.push(' ');
            }
            s.push_str(&atoms.join(" "));
        }
    }
    s
}

pub fn latex(e: &Expr) -> String {
    latex_poly(&e.to_poly())
}
