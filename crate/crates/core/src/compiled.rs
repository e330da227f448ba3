//! Formulas compiled against an indexed polynomial set, for repeated
//! three-valued evaluation.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::formula::{Formula, Relation};
use crate::interval::Truth;
use crate::poly::Polynomial;

#[derive(Clone, Debug)]
enum Node {
    Atom(usize, Relation),
    And(Vec<Node>),
    Or(Vec<Node>),
    Not(Box<Node>),
}

/// A quantifier-free formula whose atoms refer to polynomials by index.
#[derive(Clone, Debug)]
pub struct CompiledFormula {
    root: Node,
    polys: Vec<Polynomial>,
}

impl CompiledFormula {
    /// Compiles against the formula's own sorted polynomial set.
    pub fn new(f: &Formula) -> Result<Self> {
        Self::with_polys(f, &f.polynomials())
    }

    /// Compiles against a given polynomial set, which must contain every atom
    /// polynomial of `f`.
    pub fn with_polys(f: &Formula, polys: &[Polynomial]) -> Result<Self> {
        let index: HashMap<&Polynomial, usize> = polys.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let root = compile(f, &index)?;
        Ok(CompiledFormula {
            root,
            polys: polys.to_vec(),
        })
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    /// Three-valued evaluation with short-circuiting; `atom(i, rel)` gives the
    /// truth of `polys[i] rel 0`.
    pub fn eval(&self, atom: &mut impl FnMut(usize, Relation) -> Truth) -> Truth {
        eval(&self.root, atom)
    }
}

fn compile(f: &Formula, index: &HashMap<&Polynomial, usize>) -> Result<Node> {
    Ok(match f {
        Formula::Atom(a) => {
            let i = *index
                .get(a.poly())
                .ok_or_else(|| Error::AtomOutsidePolySet(format!("{:?}", a.poly())))?;
            Node::Atom(i, a.relation())
        }
        Formula::And(cs) => Node::And(cs.iter().map(|c| compile(c, index)).collect::<Result<_>>()?),
        Formula::Or(cs) => Node::Or(cs.iter().map(|c| compile(c, index)).collect::<Result<_>>()?),
        Formula::Not(c) => Node::Not(Box::new(compile(c, index)?)),
        Formula::Exists(..) => return Err(Error::Quantified),
    })
}

fn eval(n: &Node, atom: &mut impl FnMut(usize, Relation) -> Truth) -> Truth {
    match n {
        Node::Atom(i, r) => atom(*i, *r),
        Node::And(cs) => {
            let mut acc = Truth::True;
            for c in cs {
                acc = acc.min(eval(c, atom));
                if acc == Truth::False {
                    break;
                }
            }
            acc
        }
        Node::Or(cs) => {
            let mut acc = Truth::False;
            for c in cs {
                acc = acc.max(eval(c, atom));
                if acc == Truth::True {
                    break;
                }
            }
            acc
        }
        Node::Not(c) => !eval(c, atom),
    }
}

/// Range information for an indexed polynomial set over one box, able to
/// compare each polynomial against a fixed list of nonnegative thresholds
/// (index 0 is always zero).
pub trait RangeQuery {
    /// Truth of `polys[poly] rel t` over the box, where `t` is
    /// `thresholds[threshold]`, negated when `negated` is set.
    fn compare(&self, poly: usize, rel: Relation, threshold: usize, negated: bool) -> Truth;
}

/// A predicate over boxes expressed through comparisons of indexed
/// polynomials against indexed thresholds.
pub trait BoxPredicate: Send + Sync {
    fn arity(&self) -> usize;
    fn polys(&self) -> &[Polynomial];
    fn thresholds(&self) -> &[crate::poly::Rational];
    fn eval(&self, q: &dyn RangeQuery) -> Truth;
}

/// Exact rational ranges, one interval per polynomial.
pub struct RationalRanges<'a> {
    pub ranges: &'a [crate::interval::Interval],
    pub thresholds: &'a [crate::poly::Rational],
}

impl RangeQuery for RationalRanges<'_> {
    fn compare(&self, poly: usize, rel: Relation, threshold: usize, negated: bool) -> Truth {
        let r = &self.ranges[poly];
        let t = &self.thresholds[threshold];
        if num_traits::Zero::is_zero(t) {
            return rel.over_range(&r.lo, &r.hi);
        }
        let t = if negated { -t.clone() } else { t.clone() };
        rel.over_range(&(&r.lo - &t), &(&r.hi - &t))
    }
}

/// The compiled formula as a box predicate over its own polynomial set.
pub struct FormulaPredicate {
    compiled: CompiledFormula,
    arity: usize,
    zero: [crate::poly::Rational; 1],
}

impl FormulaPredicate {
    pub fn new(f: &Formula, arity: usize) -> Result<Self> {
        if let Some(n) = f.arity() {
            if n != arity {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: arity,
                });
            }
        }
        Ok(FormulaPredicate {
            compiled: CompiledFormula::new(f)?,
            arity,
            zero: [num_traits::Zero::zero()],
        })
    }
}

impl BoxPredicate for FormulaPredicate {
    fn arity(&self) -> usize {
        self.arity
    }

    fn polys(&self) -> &[Polynomial] {
        self.compiled.polys()
    }

    fn thresholds(&self) -> &[crate::poly::Rational] {
        &self.zero
    }

    fn eval(&self, q: &dyn RangeQuery) -> Truth {
        self.compiled.eval(&mut |i, r| q.compare(i, r, 0, false))
    }
}
