//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('+' | '-') unary | power
//! power   := primary ('^' exponent)?
//! primary := number | symbol | '(' expr ')'
//! symbol  := t | x | y | z | w | x<k> | alpha | (u | phi | F) ['_' index] [args]
//! index   := letter | '{' coord+ '}'
//! ```

use num_traits::Zero;

use super::atom::{Atom, DerivIndex, Field, Var};
use super::poly::Poly;
use super::ring::Rational;
use super::Expr;
use crate::error::{Error, Result};

/// Parse text into a normalized expression.
pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(Expr::from(&e))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn syntax(&self, msg: impl Into<String>) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc += &self.term()?;
            } else if self.eat(b'-') {
                acc -= &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.unary()?;
            } else if self.peek() == Some(b'/') {
                let at = self.pos;
                self.pos += 1;
                let d = self.unary()?;
                match d.as_rational() {
                    Some(c) if !c.is_zero() => acc = acc.scale_rational(c.recip()),
                    Some(_) => {
                        return Err(Error::Syntax {
                            pos: at,
                            msg: "division by zero".into(),
                        })
                    }
                    None => {
                        return Err(Error::Syntax {
                            pos: at,
                            msg: "divisor must be a nonzero rational constant".into(),
                        })
                    }
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Poly> {
        if self.eat(b'-') {
            Ok(-self.unary()?)
        } else if self.eat(b'+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.primary()?;
        if self.eat(b'^') {
            let e = self.exponent()?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn exponent(&mut self) -> Result<u32> {
        let paren = self.eat(b'(');
        self.skip_ws();
        let start = self.pos;
        if self.eat(b'-') {
            return Err(Error::Syntax {
                pos: start,
                msg: "negative exponents are not supported".into(),
            });
        }
        self.skip_ws();
        let digits = self.digits();
        if digits.is_empty() {
            return Err(self.syntax("expected a non-negative integer exponent"));
        }
        let e = digits
            .parse::<u32>()
            .map_err(|_| Error::Syntax {
                pos: start,
                msg: "exponent too large".into(),
            })?;
        if paren {
            self.expect(b')')?;
        }
        Ok(e)
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn primary(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number().map(Poly::constant),
            Some(c) if c.is_ascii_alphabetic() => self.symbol(),
            Some(c) => Err(self.syntax(format!("unexpected `{}`", c as char))),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    /// Decimal or scientific literal, converted exactly.
    fn number(&mut self) -> Result<Rational> {
        let start = self.pos;
        let int_part = self.digits();
        let mut frac = String::new();
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            frac = self.digits();
        }
        if int_part.is_empty() && frac.is_empty() {
            return Err(Error::Syntax {
                pos: start,
                msg: "malformed number".into(),
            });
        }
        let mut exp: i32 = 0;
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let save = self.pos;
            self.pos += 1;
            let neg = match self.src.get(self.pos) {
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                _ => false,
            };
            let d = self.digits();
            if d.is_empty() {
                self.pos = save;
            } else {
                exp = d.parse::<i32>().map_err(|_| Error::Syntax {
                    pos: save,
                    msg: "exponent too large".into(),
                })?;
                if neg {
                    exp = -exp;
                }
            }
        }
        let overflow = || Error::Syntax {
            pos: start,
            msg: "numeric literal out of range".into(),
        };
        let mantissa: i128 = format!("{int_part}{frac}").parse().map_err(|_| overflow())?;
        let scale = exp - frac.len() as i32;
        let ten = |k: u32| 10i128.checked_pow(k).ok_or_else(overflow);
        let r = if scale >= 0 {
            Rational::from_integer(mantissa.checked_mul(ten(scale as u32)?).ok_or_else(overflow)?)
        } else {
            Rational::new(mantissa, ten((-scale) as u32)?)
        };
        Ok(r)
    }

    fn ident(&mut self) -> (usize, String) {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        (start, String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn symbol(&mut self) -> Result<Poly> {
        let (start, name) = self.ident();
        if let Some(v) = coordinate(&name) {
            return Ok(Poly::atom(Atom::Var(v)));
        }
        let field = match name.as_str() {
            "alpha" => return Ok(Poly::alpha()),
            "u" => Field::U,
            "phi" => Field::Phi,
            "F" => Field::F,
            _ => return Err(Error::UnknownSymbol { pos: start, name }),
        };
        let mut idx = DerivIndex::empty();
        if self.pos < self.src.len() && self.src[self.pos] == b'_' {
            self.pos += 1;
            idx = self.index()?;
        }
        if field != Field::U && self.peek() == Some(b'(') {
            self.args()?;
        }
        Ok(Poly::atom(Atom::Jet(field, idx)))
    }

    fn index(&mut self) -> Result<DerivIndex> {
        let start = self.pos;
        if self.pos < self.src.len() && self.src[self.pos] == b'{' {
            self.pos += 1;
            let mut vars = Vec::new();
            loop {
                while self.pos < self.src.len() && self.src[self.pos] == b' ' {
                    self.pos += 1;
                }
                match self.src.get(self.pos) {
                    Some(b'}') => {
                        self.pos += 1;
                        break;
                    }
                    Some(c) if matches!(c, b't' | b'x' | b'y' | b'z' | b'w') => {
                        let at = self.pos;
                        self.pos += 1;
                        if *c == b'x' {
                            let d = self.digits();
                            if !d.is_empty() {
                                vars.push(numbered(&d).ok_or(Error::UnknownSymbol {
                                    pos: at,
                                    name: format!("x{d}"),
                                })?);
                                continue;
                            }
                        }
                        vars.push(coordinate(&(*c as char).to_string()).unwrap());
                    }
                    Some(c) => {
                        return Err(Error::Syntax {
                            pos: self.pos,
                            msg: format!("unexpected `{}` in derivative index", *c as char),
                        })
                    }
                    None => return Err(self.syntax("unterminated derivative index")),
                }
            }
            if vars.is_empty() {
                return Err(Error::Syntax {
                    pos: start,
                    msg: "empty derivative index".into(),
                });
            }
            return Ok(DerivIndex::new(vars));
        }
        match self.src.get(self.pos) {
            Some(c) if matches!(c, b't' | b'x' | b'y' | b'z' | b'w') => {
                self.pos += 1;
                if self
                    .src
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_alphanumeric())
                {
                    return Err(Error::Syntax {
                        pos: start,
                        msg: "multi-character derivative index needs braces".into(),
                    });
                }
                Ok(DerivIndex::new(vec![coordinate(&(*c as char).to_string()).unwrap()]))
            }
            _ => Err(Error::Syntax {
                pos: start,
                msg: "expected a derivative index".into(),
            }),
        }
    }

    /// Argument lists like `phi(t,x)` are accepted for readability.
    fn args(&mut self) -> Result<()> {
        self.expect(b'(')?;
        loop {
            let (start, name) = self.ident();
            if coordinate(&name).is_none() {
                return Err(if name.is_empty() {
                    Error::Syntax {
                        pos: start,
                        msg: "expected an independent variable".into(),
                    }
                } else {
                    Error::UnknownSymbol { pos: start, name }
                });
            }
            if self.eat(b')') {
                return Ok(());
            }
            self.expect(b',')?;
        }
    }
}

fn numbered(d: &str) -> Option<Var> {
    let k: usize = d.parse().ok()?;
    (1..=u8::MAX as usize).contains(&k).then(|| Var::space(k))
}

fn coordinate(name: &str) -> Option<Var> {
    match name {
        "t" => Some(Var::T),
        "x" => Some(Var(1)),
        "y" => Some(Var(2)),
        "z" => Some(Var(3)),
        "w" => Some(Var(4)),
        _ => {
            let d = name.strip_prefix('x')?;
            if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) || d.starts_with('0') {
                return None;
            }
            numbered(d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{equals_zero, rat};

    #[test]
    fn basic_forms() {
        let e = parse("2*t*u_t + x*u_x").unwrap();
        let want = Expr::Sum(vec![
            Expr::Product(vec![Expr::int(2), Expr::t(), Expr::jet(Field::U, &[Var::T])]),
            Expr::Product(vec![Expr::x(1), Expr::jet(Field::U, &[Var(1)])]),
        ]);
        assert_eq!(e, want);
        assert!(equals_zero(&parse("u_{xy} - u_{yx}").unwrap()));
        assert_eq!(
            parse("alpha*x*u_x").unwrap(),
            Expr::Product(vec![Expr::x(1), Expr::jet(Field::U, &[Var(1)]), Expr::Alpha])
        );
    }

    #[test]
    fn numbered_coordinates_alias_letters() {
        assert_eq!(parse("x1 + x2").unwrap(), parse("x + y").unwrap());
        assert_eq!(parse("u_{x1x2}").unwrap(), parse("u_{xy}").unwrap());
        assert_eq!(parse("u_{x5 x5}").unwrap(), parse("u_{x5x5}").unwrap());
    }

    #[test]
    fn literals_are_exact() {
        assert_eq!(parse("0.25").unwrap(), Expr::Num(rat(1, 4)));
        assert_eq!(parse("1e-3").unwrap(), Expr::Num(rat(1, 1000)));
        assert_eq!(parse("3/6").unwrap(), Expr::Num(rat(1, 2)));
        assert_eq!(parse("-x^2").unwrap(), parse("-(x^2)").unwrap());
    }

    #[test]
    fn function_arguments_are_ignored() {
        assert_eq!(parse("phi(t,x)*u").unwrap(), parse("phi*u").unwrap());
        assert_eq!(parse("F_x(t, x, y)").unwrap(), parse("F_x").unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        match parse("u + q") {
            Err(Error::UnknownSymbol { pos, name }) => {
                assert_eq!(pos, 4);
                assert_eq!(name, "q");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("u_xx"), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse("(u + t"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("u / x"), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse("x^-1"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("2 t"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("x0"), Err(Error::UnknownSymbol { .. })));
    }
}
