//! Closed rational intervals, boxes, and sound interval evaluation of
//! polynomials.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::poly::{fmt_rational, parse_rational, Polynomial, Rational};

/// Three-valued truth used for conservative evaluation over boxes.
///
/// Ordered `False < Unknown < True`, so conjunction is `min` and disjunction
/// is `max`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Truth {
    False,
    Unknown,
    True,
}

impl std::ops::Not for Truth {
    type Output = Truth;

    fn not(self) -> Truth {
        match self {
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
            Truth::True => Truth::False,
        }
    }
}

impl Truth {
    pub fn from_bool(b: bool) -> Truth {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    pub fn possibly(self) -> bool {
        self != Truth::False
    }
}

/// Closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "empty interval");
        Interval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn scale(&self, c: &Rational) -> Interval {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if c.is_negative() {
            Interval { lo: b, hi: a }
        } else {
            Interval { lo: a, hi: b }
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let c = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    /// Exact image of `x -> x^e` over the interval.
    pub fn pow(&self, e: u32) -> Interval {
        if e == 0 {
            return Interval::point(Rational::from_integer(1.into()));
        }
        let p = |x: &Rational| num_traits::pow(x.clone(), e as usize);
        if e % 2 == 1 || !self.lo.is_negative() {
            Interval {
                lo: p(&self.lo),
                hi: p(&self.hi),
            }
        } else if !self.hi.is_positive() {
            Interval {
                lo: p(&self.hi),
                hi: p(&self.lo),
            }
        } else {
            let a = p(&self.lo);
            let b = p(&self.hi);
            Interval {
                lo: Rational::zero(),
                hi: a.max(b),
            }
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", fmt_rational(&self.lo), fmt_rational(&self.hi))
    }
}

/// Axis-aligned product of closed rational intervals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntervalBox {
    axes: Vec<Interval>,
}

impl IntervalBox {
    pub fn new(axes: Vec<Interval>) -> Self {
        IntervalBox { axes }
    }

    /// `[-radius, radius]^dim`.
    pub fn cube(dim: usize, radius: &Rational) -> Self {
        assert!(radius.is_positive(), "radius must be positive");
        IntervalBox {
            axes: vec![Interval::new(-radius.clone(), radius.clone()); dim],
        }
    }

    pub fn point(p: &[Rational]) -> Self {
        IntervalBox {
            axes: p.iter().cloned().map(Interval::point).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Interval] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &Interval {
        &self.axes[i]
    }

    pub fn contains(&self, p: &[Rational]) -> bool {
        p.len() == self.axes.len() && self.axes.iter().zip(p).all(|(a, x)| a.contains(x))
    }

    pub fn center(&self) -> Vec<Rational> {
        self.axes.iter().map(Interval::midpoint).collect()
    }

    /// Concatenation of two boxes (product).
    pub fn product(&self, other: &IntervalBox) -> IntervalBox {
        IntervalBox {
            axes: self.axes.iter().chain(&other.axes).cloned().collect(),
        }
    }

    /// Parses `"lo,hi;lo,hi;..."`.
    pub fn parse(text: &str) -> Result<IntervalBox, Error> {
        let mut axes = Vec::new();
        for part in text.split(';').filter(|s| !s.trim().is_empty()) {
            let (a, b) = part
                .split_once(',')
                .ok_or_else(|| Error::Format(format!("box axis `{part}` is not `lo,hi`")))?;
            let lo = parse_rational(a).ok_or_else(|| Error::Format(format!("bad rational `{a}`")))?;
            let hi = parse_rational(b).ok_or_else(|| Error::Format(format!("bad rational `{b}`")))?;
            if lo > hi {
                return Err(Error::Format(format!("box axis `{part}` has lo > hi")));
            }
            axes.push(Interval::new(lo, hi));
        }
        Ok(IntervalBox { axes })
    }
}

impl fmt::Display for IntervalBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .axes
            .iter()
            .map(|a| format!("{},{}", fmt_rational(&a.lo), fmt_rational(&a.hi)))
            .collect();
        write!(f, "{}", parts.join(";"))
    }
}

/// Sound enclosure of the range of `p` over `b`: per-monomial products of
/// exact interval powers, summed.
pub fn eval_interval(p: &Polynomial, b: &IntervalBox) -> Interval {
    assert_eq!(p.nvars(), b.dim(), "box dimension mismatch");
    let mut acc = Interval::point(Rational::zero());
    for (m, c) in p.terms() {
        let mut term = Interval::point(c.clone());
        for (axis, &e) in b.axes.iter().zip(m.exponents()) {
            if e > 0 {
                term = term.mul(&axis.pow(e));
            }
        }
        acc = acc.add(&term);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    #[test]
    fn even_power_of_straddling_interval() {
        let i = Interval::new(int(-1), int(1));
        assert_eq!(i.pow(2), Interval::new(int(0), int(1)));
        assert_eq!(i.mul(&i), Interval::new(int(-1), int(1)));
        assert_eq!(Interval::new(int(-3), int(-2)).pow(2), Interval::new(int(4), int(9)));
        assert_eq!(Interval::new(int(-3), int(2)).pow(3), Interval::new(int(-27), int(8)));
    }

    #[test]
    fn enclosure_contains_values() {
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let p = &(&x * &y) - &x;
        let b = IntervalBox::new(vec![
            Interval::new(rat(-1, 2), int(1)),
            Interval::new(int(0), int(2)),
        ]);
        let r = eval_interval(&p, &b);
        for pt in [[rat(-1, 2), int(0)], [int(1), int(2)], [rat(1, 3), rat(1, 7)]] {
            assert!(r.contains(&p.eval(&pt)));
        }
    }

    #[test]
    fn box_text_round_trip() {
        let b = IntervalBox::parse("-2,2;-1/2,3").unwrap();
        assert_eq!(b.dim(), 2);
        assert_eq!(b.to_string(), "-2,2;-1/2,3");
        assert!(IntervalBox::parse("3,1").is_err());
    }
}
