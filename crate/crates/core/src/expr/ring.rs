//! Coefficient ring: exact rationals, polynomials in the order parameter α,
//! and the fraction field Q(α) used by basis decomposition.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = Ratio<i128>;

pub fn rat(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

pub fn int(n: i128) -> Rational {
    Rational::from_integer(n)
}

pub(crate) fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Polynomial in α with rational coefficients, dense, lowest degree first.
/// Trailing zeros are always trimmed so the zero polynomial is empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct AlphaPoly(Vec<Rational>);

impl AlphaPoly {
    pub fn zero() -> Self {
        AlphaPoly(Vec::new())
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        AlphaPoly(vec![c]).trimmed()
    }

    /// The monomial `c·α^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        AlphaPoly(v).trimmed()
    }

    pub fn alpha() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        AlphaPoly(coeffs).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.0.len() <= 1
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.0.len() {
            0 => Some(Rational::zero()),
            1 => Some(self.0[0]),
            _ => None,
        }
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.0.last().copied().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        AlphaPoly(self.0.iter().map(|x| x * c).collect())
    }

    pub fn eval(&self, alpha: f64) -> f64 {
        self.0
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * alpha + rational_to_f64(c))
    }

    pub fn eval_exact(&self, alpha: &Rational) -> Rational {
        self.0
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * alpha + c)
    }

    /// Euclidean division over Q.
    pub fn div_rem(&self, divisor: &AlphaPoly) -> (AlphaPoly, AlphaPoly) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let dd = divisor.degree().unwrap();
        let lead = divisor.leading();
        let mut rem = self.0.clone();
        let mut quot = vec![Rational::zero(); rem.len().saturating_sub(dd).max(1)];
        while rem.len() > dd && !rem.is_empty() {
            let shift = rem.len() - 1 - dd;
            let c = rem[rem.len() - 1] / lead;
            quot[shift] = c;
            for (i, dc) in divisor.0.iter().enumerate() {
                rem[shift + i] -= c * dc;
            }
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        (AlphaPoly(quot).trimmed(), AlphaPoly(rem).trimmed())
    }

    pub fn monic(&self) -> AlphaPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(Rational::one() / self.leading()))
    }

    pub fn gcd(a: &AlphaPoly, b: &AlphaPoly) -> AlphaPoly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
}

impl Add for &AlphaPoly {
    type Output = AlphaPoly;
    fn add(self, rhs: &AlphaPoly) -> AlphaPoly {
        let n = self.0.len().max(rhs.0.len());
        let v = (0..n)
            .map(|i| {
                self.0.get(i).copied().unwrap_or_else(Rational::zero)
                    + rhs.0.get(i).copied().unwrap_or_else(Rational::zero)
            })
            .collect();
        AlphaPoly(v).trimmed()
    }
}

impl Sub for &AlphaPoly {
    type Output = AlphaPoly;
    fn sub(self, rhs: &AlphaPoly) -> AlphaPoly {
        self + &(-rhs)
    }
}

impl Neg for &AlphaPoly {
    type Output = AlphaPoly;
    fn neg(self) -> AlphaPoly {
        AlphaPoly(self.0.iter().map(|c| -c).collect())
    }
}

impl Mul for &AlphaPoly {
    type Output = AlphaPoly;
    fn mul(self, rhs: &AlphaPoly) -> AlphaPoly {
        if self.is_zero() || rhs.is_zero() {
            return AlphaPoly::zero();
        }
        let mut v = vec![Rational::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        AlphaPoly(v).trimmed()
    }
}

impl fmt::Display for AlphaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let alpha = match k {
                0 => String::new(),
                1 => "alpha".to_string(),
                _ => format!("alpha^{k}"),
            };
            if alpha.is_empty() {
                write!(f, "{}", fmt_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{alpha}")?;
            } else {
                write!(f, "{}*{alpha}", fmt_rational(&mag))?;
            }
        }
        Ok(())
    }
}

impl PartialOrd for AlphaPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AlphaPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

/// Element of Q(α): `num / den` with coprime parts and a monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlphaRatio {
    num: AlphaPoly,
    den: AlphaPoly,
}

impl AlphaRatio {
    pub fn new(num: AlphaPoly, den: AlphaPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator in Q(alpha)");
        if num.is_zero() {
            return Self::zero();
        }
        let g = AlphaPoly::gcd(&num, &den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let lead = den.leading();
        let inv = Rational::one() / lead;
        AlphaRatio {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn zero() -> Self {
        AlphaRatio {
            num: AlphaPoly::zero(),
            den: AlphaPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_poly(AlphaPoly::one())
    }

    pub fn from_poly(p: AlphaPoly) -> Self {
        AlphaRatio {
            num: p,
            den: AlphaPoly::one(),
        }
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::from_poly(AlphaPoly::constant(r))
    }

    pub fn num(&self) -> &AlphaPoly {
        &self.num
    }

    pub fn den(&self) -> &AlphaPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The polynomial value when the denominator is 1.
    pub fn as_poly(&self) -> Option<&AlphaPoly> {
        (self.den == AlphaPoly::one()).then_some(&self.num)
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.as_poly().and_then(|p| p.as_constant())
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero in Q(alpha)");
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn eval(&self, alpha: f64) -> f64 {
        self.num.eval(alpha) / self.den.eval(alpha)
    }
}

impl Add for &AlphaRatio {
    type Output = AlphaRatio;
    fn add(self, rhs: &AlphaRatio) -> AlphaRatio {
        if self.den == rhs.den {
            return AlphaRatio::new(&self.num + &rhs.num, self.den.clone());
        }
        AlphaRatio::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &AlphaRatio {
    type Output = AlphaRatio;
    fn sub(self, rhs: &AlphaRatio) -> AlphaRatio {
        self + &(-rhs)
    }
}

impl Neg for &AlphaRatio {
    type Output = AlphaRatio;
    fn neg(self) -> AlphaRatio {
        AlphaRatio {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &AlphaRatio {
    type Output = AlphaRatio;
    fn mul(self, rhs: &AlphaRatio) -> AlphaRatio {
        if self.is_zero() || rhs.is_zero() {
            return AlphaRatio::zero();
        }
        AlphaRatio::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl fmt::Display for AlphaRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == AlphaPoly::one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &AlphaPoly| {
            if p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 {
                format!("({p})")
            } else {
                p.to_string()
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_arithmetic() {
        let a = AlphaPoly::alpha();
        let one = AlphaPoly::one();
        let p = &(&a * &a) - &one; // α² − 1
        let q = &a - &one;
        let (quot, rem) = p.div_rem(&q);
        assert!(rem.is_zero());
        assert_eq!(quot, &a + &one);
        assert_eq!(p.to_string(), "alpha^2 - 1");
        assert_eq!(AlphaPoly::gcd(&p, &q), q);
    }

    #[test]
    fn ratio_reduces() {
        let a = AlphaPoly::alpha();
        let one = AlphaPoly::one();
        let r = AlphaRatio::new(&(&a * &a) - &one, (&a - &one).scale(&int(2)));
        assert_eq!(r.den(), &AlphaPoly::one());
        assert_eq!(r.num(), &(&a + &one).scale(&rat(1, 2)));
        let s = AlphaRatio::new(one.clone(), a.clone());
        assert_eq!(s.to_string(), "1/alpha");
        let back = &s * &AlphaRatio::from_poly(a);
        assert_eq!(back, AlphaRatio::one());
    }

    #[test]
    fn eval_polynomial() {
        let p = AlphaPoly::from_coeffs(vec![int(-2), int(3)]);
        assert!((p.eval(0.5) + 0.5).abs() < 1e-15);
        assert_eq!(p.eval_exact(&rat(2, 3)), int(0));
    }
}
