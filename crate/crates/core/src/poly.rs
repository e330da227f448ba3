//! Multivariate polynomials with exact rational coefficients.
//!
//! A [`Polynomial`] lives in a fixed ambient space of `nvars` variables and
//! stores its terms in a `BTreeMap` keyed by exponent vectors, so two
//! polynomials built from the same mathematical expression are structurally
//! equal regardless of how the expression was associated.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::vars::VarList;

/// Exact rational number used throughout the crate.
pub type Rational = BigRational;

/// Builds a rational from an integer numerator and denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds an integral rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats a rational as `p` or `p/q`.
pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p` or `p/q` (optionally signed). Returns `None` on a zero denominator.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Exponent vector ordered by total degree, then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in `nvars` variables with nonzero rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Polynomial::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Polynomial::constant(nvars, Rational::one())
    }

    /// The coordinate function of variable `index`.
    pub fn var(nvars: usize, index: usize) -> Self {
        assert!(index < nvars, "variable index {index} out of range {nvars}");
        let mut exps = vec![0; nvars];
        exps[index] = 1;
        Polynomial::monomial(Monomial(exps), Rational::one())
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let nvars = m.0.len();
        let mut p = Polynomial::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging repeats.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, Rational)>) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (exps, c) in terms {
            assert_eq!(exps.len(), nvars, "exponent vector length mismatch");
            p.add_term(Monomial(exps), c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value if the polynomial has no variable terms.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Total degree counted only over the variables whose mask entry is set.
    pub fn degree_in(&self, mask: &[bool]) -> u32 {
        self.terms
            .keys()
            .map(|m| {
                m.0.iter()
                    .zip(mask)
                    .filter(|(_, &sel)| sel)
                    .map(|(e, _)| *e)
                    .sum()
            })
            .max()
            .unwrap_or(0)
    }

    /// Per-variable maximal exponent.
    pub fn max_exponents(&self) -> Vec<u32> {
        let mut out = vec![0; self.nvars];
        for m in self.terms.keys() {
            for (o, e) in out.iter_mut().zip(&m.0) {
                *o = (*o).max(*e);
            }
        }
        out
    }

    /// Which variables occur with positive exponent.
    pub fn support(&self) -> Vec<bool> {
        self.max_exponents().into_iter().map(|e| e > 0).collect()
    }

    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.terms.values().next_back()
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact value at a rational point.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars, "point dimension mismatch");
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            total += t;
        }
        total
    }

    /// Sign of the value at a rational point.
    pub fn sign_at(&self, point: &[Rational]) -> i8 {
        let v = self.eval(point);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    /// Re-embeds into a space of `nvars` variables, sending variable `i` to
    /// variable `map[i]`.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Polynomial {
        assert_eq!(map.len(), self.nvars);
        let mut out = Polynomial::zero(nvars);
        for (m, c) in &self.terms {
            let mut exps = vec![0; nvars];
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    exps[map[i]] += e;
                }
            }
            out.add_term(Monomial(exps), c.clone());
        }
        out
    }

    /// Substitutes `images[i]` for variable `i`. All images share one space.
    pub fn substitute(&self, images: &[Polynomial]) -> Polynomial {
        assert_eq!(images.len(), self.nvars);
        let target = images.first().map(|p| p.nvars).unwrap_or(0);
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (img, &e) in images.iter().zip(&m.0) {
                if e > 0 {
                    t = &t * &img.pow(e);
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Returns `(q, flipped)` where `q` is this polynomial divided by the
    /// absolute value of its leading coefficient and then negated if needed so
    /// that its leading coefficient is 1; `flipped` reports the negation.
    /// The zero polynomial is returned unchanged.
    pub fn monic(&self) -> (Polynomial, bool) {
        match self.leading_coefficient() {
            None => (self.clone(), false),
            Some(lc) => {
                let flipped = lc.is_negative();
                let inv = lc.recip();
                (self.scale(&inv), flipped)
            }
        }
    }

    pub fn display<'a>(&'a self, vars: &'a VarList) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, vars }
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = Polynomial::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl Ord for Polynomial {
    /// Orders by leading terms first, so sorted polynomial sets are stable.
    fn cmp(&self, other: &Self) -> Ordering {
        self.nvars.cmp(&other.nvars).then_with(|| {
            let a = self.terms.iter().rev();
            let b = other.terms.iter().rev();
            for (x, y) in a.zip(b) {
                let o = x.0.cmp(y.0).then_with(|| x.1.cmp(y.1));
                if o != Ordering::Equal {
                    return o;
                }
            }
            self.terms.len().cmp(&other.terms.len())
        })
    }
}

impl PartialOrd for Polynomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Display adapter binding a polynomial to variable names.
pub struct PolyDisplay<'a> {
    poly: &'a Polynomial,
    vars: &'a VarList,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if m.is_one() || !abs.is_one() {
                factors.push(fmt_rational(&abs));
            }
            for (v, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars.name(v).to_string()),
                    _ => factors.push(format!("{}^{}", self.vars.name(v), e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> (Polynomial, Polynomial) {
        (Polynomial::var(2, 0), Polynomial::var(2, 1))
    }

    #[test]
    fn association_order_is_irrelevant() {
        let (x, y) = xy();
        let one = Polynomial::one(2);
        let a = &(&x + &y) + &one;
        let b = &x + &(&y + &one);
        assert_eq!(a, b);
        let c = &(&x * &y) * &x;
        let d = &x * &(&y * &x);
        assert_eq!(c, d);
    }

    #[test]
    fn cancellation_removes_terms() {
        let (x, y) = xy();
        let p = &(&x + &y) - &x;
        assert_eq!(p, y);
        assert_eq!((&x - &x).num_terms(), 0);
    }

    #[test]
    fn display_orders_by_degree() {
        let vars = VarList::new(["x", "y"]);
        let (x, y) = xy();
        let p = &(&(&x * &x) + &(&y * &y)) - &Polynomial::one(2);
        assert_eq!(p.display(&vars).to_string(), "x^2 + y^2 - 1");
        let q = &x.scale(&rat(-1, 2)) + &Polynomial::constant(2, int(3));
        assert_eq!(q.display(&vars).to_string(), "-1/2*x + 3");
    }

    #[test]
    fn monic_tracks_sign() {
        let (x, _) = xy();
        let p = &x.scale(&int(-2)) + &Polynomial::constant(2, int(4));
        let (q, flipped) = p.monic();
        assert!(flipped);
        assert_eq!(q, &x - &Polynomial::constant(2, int(2)));
    }

    #[test]
    fn substitution_and_eval_agree() {
        let (x, y) = xy();
        let p = &(&x * &y) - &x;
        let images = vec![&x + &y, y.clone()];
        let q = p.substitute(&images);
        let pt = [rat(1, 3), rat(-2, 5)];
        let direct = p.eval(&[&pt[0] + &pt[1], pt[1].clone()]);
        assert_eq!(q.eval(&pt), direct);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/6"), Some(rat(1, 2)));
        assert_eq!(parse_rational("-4"), Some(int(-4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(fmt_rational(&rat(-6, 4)), "-3/2");
    }
}
