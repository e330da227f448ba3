//! Quantifier-free formulas over polynomial sign conditions.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::interval::{eval_interval, IntervalBox, Truth};
use crate::poly::{Polynomial, Rational};
use crate::vars::VarList;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Relation {
    Eq,
    Lt,
    Gt,
    Le,
    Ge,
}

impl Relation {
    /// The relation satisfied by `-P` whenever `P` satisfies `self`.
    pub fn flip(self) -> Relation {
        match self {
            Relation::Eq => Relation::Eq,
            Relation::Lt => Relation::Gt,
            Relation::Gt => Relation::Lt,
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
        }
    }

    /// Whether a value of sign `s` satisfies `value ⋈ 0`.
    pub fn holds(self, s: i8) -> bool {
        match self {
            Relation::Eq => s == 0,
            Relation::Lt => s < 0,
            Relation::Gt => s > 0,
            Relation::Le => s <= 0,
            Relation::Ge => s >= 0,
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, Relation::Lt | Relation::Gt)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Lt => "<",
            Relation::Gt => ">",
            Relation::Le => "<=",
            Relation::Ge => ">=",
        }
    }

    /// Three-valued truth of `v ⋈ 0` for `v` ranging over `[lo, hi]`.
    pub fn over_range(self, lo: &Rational, hi: &Rational) -> Truth {
        let (lo_pos, lo_nonneg) = (lo.is_positive(), !lo.is_negative());
        let (hi_neg, hi_nonpos) = (hi.is_negative(), !hi.is_positive());
        match self {
            Relation::Eq => {
                if lo.is_zero() && hi.is_zero() {
                    Truth::True
                } else if lo_pos || hi_neg {
                    Truth::False
                } else {
                    Truth::Unknown
                }
            }
            Relation::Lt => three(hi_neg, lo_nonneg),
            Relation::Gt => three(lo_pos, hi_nonpos),
            Relation::Le => three(hi_nonpos, lo_pos),
            Relation::Ge => three(lo_nonneg, hi_neg),
        }
    }
}

fn three(surely: bool, never: bool) -> Truth {
    if surely {
        Truth::True
    } else if never {
        Truth::False
    } else {
        Truth::Unknown
    }
}

/// `P ⋈ 0` with `P` normalized to leading coefficient 1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Atom {
    poly: Polynomial,
    rel: Relation,
}

impl Atom {
    /// Normalizes `poly` to be monic (flipping the relation when the leading
    /// coefficient is negative).
    pub fn new(poly: Polynomial, rel: Relation) -> Atom {
        let (poly, flipped) = poly.monic();
        let rel = if flipped { rel.flip() } else { rel };
        Atom { poly, rel }
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn relation(&self) -> Relation {
        self.rel
    }

    pub fn eval_point(&self, p: &[Rational]) -> bool {
        self.rel.holds(self.poly.sign_at(p))
    }

    pub fn eval_box(&self, b: &IntervalBox) -> Truth {
        let r = eval_interval(&self.poly, b);
        self.rel.over_range(&r.lo, &r.hi)
    }

    /// The negation as a formula (a disjunction for equalities).
    pub fn negate(&self) -> Formula {
        let p = self.poly.clone();
        match self.rel {
            Relation::Eq => Formula::or(vec![
                Formula::atom(p.clone(), Relation::Lt),
                Formula::atom(p, Relation::Gt),
            ]),
            Relation::Lt => Formula::atom(p, Relation::Ge),
            Relation::Gt => Formula::atom(p, Relation::Le),
            Relation::Le => Formula::atom(p, Relation::Gt),
            Relation::Ge => Formula::atom(p, Relation::Lt),
        }
    }
}

/// Formula tree. Build through the associated constructors, which flatten
/// nested connectives of the same kind and collapse singletons; the result is
/// the canonical shape that the parser also produces.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Formula {
    Atom(Atom),
    /// Conjunction; empty means `true`.
    And(Vec<Formula>),
    /// Disjunction; empty means `false`.
    Or(Vec<Formula>),
    Not(Box<Formula>),
    /// Existential block over the listed variable indices.
    Exists(Vec<usize>, Box<Formula>),
}

impl Formula {
    pub fn atom(poly: Polynomial, rel: Relation) -> Formula {
        Formula::Atom(Atom::new(poly, rel))
    }

    pub fn tt() -> Formula {
        Formula::And(Vec::new())
    }

    pub fn ff() -> Formula {
        Formula::Or(Vec::new())
    }

    pub fn and(children: Vec<Formula>) -> Formula {
        let mut out = Vec::with_capacity(children.len());
        for c in children {
            match c {
                Formula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Formula::And(out)
        }
    }

    pub fn or(children: Vec<Formula>) -> Formula {
        let mut out = Vec::with_capacity(children.len());
        for c in children {
            match c {
                Formula::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Formula::Or(out)
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(child: Formula) -> Formula {
        Formula::Not(Box::new(child))
    }

    pub fn exists(vars: Vec<usize>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Exists(vars, Box::new(body))
        }
    }

    /// `lo <= p <= hi` style conjunction helper: `p - c ⋈ 0`.
    pub fn cmp_const(p: &Polynomial, rel: Relation, c: &Rational) -> Formula {
        let shifted = p - &Polynomial::constant(p.nvars(), c.clone());
        Formula::atom(shifted, rel)
    }

    pub fn is_quantified(&self) -> bool {
        match self {
            Formula::Atom(_) => false,
            Formula::And(cs) | Formula::Or(cs) => cs.iter().any(Formula::is_quantified),
            Formula::Not(c) => c.is_quantified(),
            Formula::Exists(..) => true,
        }
    }

    /// Syntactic closedness: no negation, no existential block, and only
    /// `<=`, `>=` atoms, with `=` read as `<= and >=`.
    pub fn is_closed(&self) -> bool {
        match self {
            Formula::Atom(a) => !a.rel.is_strict(),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().all(Formula::is_closed),
            Formula::Not(_) | Formula::Exists(..) => false,
        }
    }

    /// Replaces each `P = 0` by `P <= 0 and P >= 0`.
    pub fn expand_equalities(&self) -> Formula {
        self.map_atoms(&mut |a| {
            if a.rel == Relation::Eq {
                Formula::and(vec![
                    Formula::Atom(Atom {
                        poly: a.poly.clone(),
                        rel: Relation::Le,
                    }),
                    Formula::Atom(Atom {
                        poly: a.poly.clone(),
                        rel: Relation::Ge,
                    }),
                ])
            } else {
                Formula::Atom(a.clone())
            }
        })
    }

    /// Rebuilds the formula with every atom replaced by `f(atom)`.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Formula) -> Formula {
        match self {
            Formula::Atom(a) => f(a),
            Formula::And(cs) => Formula::and(cs.iter().map(|c| c.map_atoms(f)).collect()),
            Formula::Or(cs) => Formula::or(cs.iter().map(|c| c.map_atoms(f)).collect()),
            Formula::Not(c) => Formula::not(c.map_atoms(f)),
            Formula::Exists(vs, c) => Formula::exists(vs.clone(), c.map_atoms(f)),
        }
    }

    /// Fallible variant of [`Formula::map_atoms`].
    pub fn try_map_atoms(&self, f: &mut impl FnMut(&Atom) -> Result<Formula>) -> Result<Formula> {
        Ok(match self {
            Formula::Atom(a) => f(a)?,
            Formula::And(cs) => Formula::and(
                cs.iter()
                    .map(|c| c.try_map_atoms(f))
                    .collect::<Result<_>>()?,
            ),
            Formula::Or(cs) => Formula::or(
                cs.iter()
                    .map(|c| c.try_map_atoms(f))
                    .collect::<Result<_>>()?,
            ),
            Formula::Not(c) => Formula::not(c.try_map_atoms(f)?),
            Formula::Exists(vs, c) => Formula::exists(vs.clone(), c.try_map_atoms(f)?),
        })
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Formula::Atom(a) => out.push(a),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.collect_atoms(out)),
            Formula::Not(c) | Formula::Exists(_, c) => c.collect_atoms(out),
        }
    }

    /// Distinct atom polynomials, sorted.
    pub fn polynomials(&self) -> Vec<Polynomial> {
        let set: BTreeSet<&Polynomial> = self.atoms().into_iter().map(Atom::poly).collect();
        set.into_iter().cloned().collect()
    }

    /// Variable count of the atoms, if any atom exists.
    pub fn arity(&self) -> Option<usize> {
        self.atoms().first().map(|a| a.poly.nvars())
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        match self.arity() {
            Some(n) if n != dim => Err(Error::DimensionMismatch {
                expected: n,
                found: dim,
            }),
            _ => Ok(()),
        }
    }

    /// Exact truth value at a rational point.
    pub fn eval_point(&self, p: &[Rational]) -> Result<bool> {
        if self.is_quantified() {
            return Err(Error::Quantified);
        }
        self.check_dim(p.len())?;
        Ok(self.eval_point_unchecked(p))
    }

    pub(crate) fn eval_point_unchecked(&self, p: &[Rational]) -> bool {
        match self {
            Formula::Atom(a) => a.eval_point(p),
            Formula::And(cs) => cs.iter().all(|c| c.eval_point_unchecked(p)),
            Formula::Or(cs) => cs.iter().any(|c| c.eval_point_unchecked(p)),
            Formula::Not(c) => !c.eval_point_unchecked(p),
            Formula::Exists(..) => unreachable!("checked by caller"),
        }
    }

    /// Conservative truth over a box: `True` means every point satisfies the
    /// formula, `False` means none does.
    pub fn eval_box(&self, b: &IntervalBox) -> Result<Truth> {
        if self.is_quantified() {
            return Err(Error::Quantified);
        }
        self.check_dim(b.dim())?;
        Ok(self.eval_box_unchecked(b))
    }

    pub(crate) fn eval_box_unchecked(&self, b: &IntervalBox) -> Truth {
        match self {
            Formula::Atom(a) => a.eval_box(b),
            Formula::And(cs) => {
                let mut acc = Truth::True;
                for c in cs {
                    acc = acc.min(c.eval_box_unchecked(b));
                    if acc == Truth::False {
                        break;
                    }
                }
                acc
            }
            Formula::Or(cs) => {
                let mut acc = Truth::False;
                for c in cs {
                    acc = acc.max(c.eval_box_unchecked(b));
                    if acc == Truth::True {
                        break;
                    }
                }
                acc
            }
            Formula::Not(c) => !c.eval_box_unchecked(b),
            Formula::Exists(..) => unreachable!("checked by caller"),
        }
    }

    /// Truth under an assignment of signs to atom polynomials. `sign_of`
    /// returns `None` for polynomials it does not know.
    pub fn eval_signs(&self, sign_of: &impl Fn(&Polynomial) -> Option<i8>) -> Result<bool> {
        Ok(match self {
            Formula::Atom(a) => {
                let s = sign_of(&a.poly)
                    .ok_or_else(|| Error::AtomOutsidePolySet(format!("{:?}", a.poly)))?;
                a.rel.holds(s)
            }
            Formula::And(cs) => {
                for c in cs {
                    if !c.eval_signs(sign_of)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(cs) => {
                for c in cs {
                    if c.eval_signs(sign_of)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Not(c) => !c.eval_signs(sign_of)?,
            Formula::Exists(..) => return Err(Error::Quantified),
        })
    }

    /// Re-embeds all atoms into a space of `nvars` variables (`map[i]` is the
    /// new index of old variable `i`).
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Formula {
        match self {
            Formula::Atom(a) => Formula::atom(a.poly.remap(nvars, map), a.rel),
            Formula::And(cs) => Formula::and(cs.iter().map(|c| c.remap(nvars, map)).collect()),
            Formula::Or(cs) => Formula::or(cs.iter().map(|c| c.remap(nvars, map)).collect()),
            Formula::Not(c) => Formula::not(c.remap(nvars, map)),
            Formula::Exists(vs, c) => {
                Formula::exists(vs.iter().map(|&v| map[v]).collect(), c.remap(nvars, map))
            }
        }
    }

    /// Pushes negations to the atoms and distributes, returning a list of
    /// conjunctions of atoms.
    pub fn to_dnf(&self) -> Result<Vec<Vec<Atom>>> {
        self.dnf(false)
    }

    fn dnf(&self, negated: bool) -> Result<Vec<Vec<Atom>>> {
        match (self, negated) {
            (Formula::Exists(..), _) => Err(Error::Quantified),
            (Formula::Atom(a), false) => Ok(vec![vec![a.clone()]]),
            (Formula::Atom(a), true) => a.negate().dnf(false),
            (Formula::Not(c), n) => c.dnf(!n),
            (Formula::And(cs), false) | (Formula::Or(cs), true) => {
                let mut acc: Vec<Vec<Atom>> = vec![Vec::new()];
                for c in cs {
                    let part = c.dnf(negated)?;
                    let mut next = Vec::with_capacity(acc.len() * part.len());
                    for left in &acc {
                        for right in &part {
                            let mut conj = left.clone();
                            conj.extend(right.iter().cloned());
                            next.push(conj);
                        }
                    }
                    acc = next;
                }
                Ok(acc)
            }
            (Formula::Or(cs), false) | (Formula::And(cs), true) => {
                let mut acc = Vec::new();
                for c in cs {
                    acc.extend(c.dnf(negated)?);
                }
                Ok(acc)
            }
        }
    }

    /// Disjunctive normal form with only `<=`/`>=` atoms. Fails on formulas
    /// that are not negation- and strict-inequality-free.
    pub fn to_closed_dnf(&self) -> Result<Formula> {
        if !self.is_closed() {
            return Err(Error::Format(
                "closed DNF requires a formula without negations or strict atoms".into(),
            ));
        }
        let dnf = self.expand_equalities().to_dnf()?;
        Ok(Formula::or(
            dnf.into_iter()
                .map(|conj| Formula::and(conj.into_iter().map(Formula::Atom).collect()))
                .collect(),
        ))
    }

    pub fn display<'a>(&'a self, vars: &'a VarList) -> FormulaDisplay<'a> {
        FormulaDisplay { formula: self, vars }
    }
}

/// `ℓ^d · P(X/ℓ)` for every atom `P ⋈ 0`, where `d` is the degree of `P` in
/// the substituted block.
///
/// `var_map[i]` gives the output index of input variable `i`; input variables
/// with `block[i]` set are the `Z` variables replaced by `X/ℓ`; the others
/// must be listed in `passthrough` and are copied unchanged. The result agrees
/// in sign with `P(Z)` under `Z = X/ℓ` wherever `ℓ > 0`.
pub fn homogenize_substitute(
    f: &Formula,
    var_map: &[usize],
    block: &[bool],
    passthrough: &[bool],
    scale: &Polynomial,
    in_vars: &VarList,
) -> Result<Formula> {
    let out_nvars = scale.nvars();
    f.try_map_atoms(&mut |a: &Atom| {
        let p = a.poly();
        if p.nvars() != var_map.len() {
            return Err(Error::DimensionMismatch {
                expected: var_map.len(),
                found: p.nvars(),
            });
        }
        for (v, used) in p.support().into_iter().enumerate() {
            if used && !block[v] && !passthrough[v] {
                return Err(Error::ForeignVariable(in_vars.name(v).to_string()));
            }
        }
        let d = p.degree_in(block);
        let mut scale_pows = vec![Polynomial::one(out_nvars)];
        for i in 1..=d as usize {
            let next = &scale_pows[i - 1] * scale;
            scale_pows.push(next);
        }
        let mut out = Polynomial::zero(out_nvars);
        for (m, c) in p.terms() {
            let mut exps = vec![0u32; out_nvars];
            let mut block_deg = 0;
            for (v, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    exps[var_map[v]] += e;
                    if block[v] {
                        block_deg += e;
                    }
                }
            }
            let mono = Polynomial::from_terms(out_nvars, [(exps, c.clone())]);
            out = &out + &(&mono * &scale_pows[(d - block_deg) as usize]);
        }
        Ok(Formula::atom(out, a.relation()))
    })
}

/// Display adapter; prints canonical text accepted by the parser.
pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    vars: &'a VarList,
}

impl FormulaDisplay<'_> {
    fn write(&self, f: &mut fmt::Formatter<'_>, node: &Formula) -> fmt::Result {
        match node {
            Formula::Atom(a) => write!(f, "{} {} 0", a.poly.display(self.vars), a.rel.symbol()),
            Formula::And(cs) if cs.is_empty() => write!(f, "true"),
            Formula::Or(cs) if cs.is_empty() => write!(f, "false"),
            Formula::And(cs) | Formula::Or(cs) => {
                let sep = if matches!(node, Formula::And(_)) {
                    " and "
                } else {
                    " or "
                };
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "{sep}")?;
                    }
                    let wrap = matches!(c, Formula::And(v) | Formula::Or(v) if !v.is_empty())
                        || matches!(c, Formula::Exists(..));
                    if wrap {
                        write!(f, "(")?;
                        self.write(f, c)?;
                        write!(f, ")")?;
                    } else {
                        self.write(f, c)?;
                    }
                }
                Ok(())
            }
            Formula::Not(c) => {
                write!(f, "not (")?;
                self.write(f, c)?;
                write!(f, ")")
            }
            Formula::Exists(vs, body) => {
                write!(f, "exists")?;
                for &v in vs {
                    write!(f, " {}", self.vars.name(v))?;
                }
                write!(f, " . ")?;
                self.write(f, body)
            }
        }
    }
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.formula)
    }
}
