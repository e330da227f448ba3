//! Replacing a formula by a syntactically closed relaxation.
//!
//! For a polynomial set `P = {P_1..P_s}` and a formula `phi` over `P`, the
//! relaxation is the union, over all sign conditions `sigma` that force
//! `phi`, of the closed sets
//!
//! ```text
//! sigma_bar(c, d) = AND_P  (-d <= P <= d  if sigma(P) = 0)
//!                          (P >= c        if sigma(P) = 1)
//!                          (P <= -c       if sigma(P) = -1)
//! ```
//!
//! with thresholds `c = mu_j`, `d = nu_j` picked by the level `j` (number of
//! zeros) of `sigma`. The thresholds come from an [`InfinitesimalLadder`] of
//! decreasing rationals, or are left symbolic as the reserved variables
//! `__mu_j` and `__nu_j`.
//!
//! The guarantees of the relaxation hold only when the realization of `phi`
//! is closed and bounded; that hypothesis is not checked.

use std::cell::Cell;

use num_traits::{One, Signed, Zero};

use crate::compiled::{BoxPredicate, CompiledFormula, RangeQuery};
use crate::error::{Error, Result};
use crate::formula::{Formula, Relation};
use crate::interval::Truth;
use crate::poly::{fmt_rational, rat, Polynomial, Rational};
use crate::vars::VarList;

/// Default cap on the size of the polynomial set (the enumeration is `3^s`).
pub const DEFAULT_SIGMA_CAP: usize = 14;

/// Default ladder base.
pub fn default_eta() -> Rational {
    rat(1, 16)
}

/// A sign in `{-1, 0, 1}` for each polynomial of a fixed indexed set.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SignCondition(Vec<i8>);

impl SignCondition {
    pub fn new(signs: Vec<i8>) -> Self {
        assert!(signs.iter().all(|s| (-1..=1).contains(s)), "signs must be -1, 0 or 1");
        SignCondition(signs)
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn sign(&self, poly: usize) -> i8 {
        self.0[poly]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of polynomials assigned zero.
    pub fn level(&self) -> usize {
        self.0.iter().filter(|&&s| s == 0).count()
    }

    /// The sign condition realized at a point.
    pub fn at_point(polys: &[Polynomial], p: &[Rational]) -> Self {
        SignCondition(polys.iter().map(|q| q.sign_at(p)).collect())
    }
}

/// Concrete values `mu_j = eta^(2(s-j)+1)`, `nu_j = eta^(2(s-j)+2)` for
/// `j = 0..=s`, so that `mu_s > nu_s > ... > mu_0 > nu_0 > 0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InfinitesimalLadder {
    s: usize,
    eta: Rational,
    mu: Vec<Rational>,
    nu: Vec<Rational>,
}

impl InfinitesimalLadder {
    pub fn new(s: usize, eta: Rational) -> Result<Self> {
        if !eta.is_positive() || eta >= Rational::one() {
            return Err(Error::Config(format!(
                "ladder base must lie in (0, 1), got {}",
                fmt_rational(&eta)
            )));
        }
        let pow = |e: usize| num_traits::pow(eta.clone(), e);
        let mu = (0..=s).map(|j| pow(2 * (s - j) + 1)).collect();
        let nu = (0..=s).map(|j| pow(2 * (s - j) + 2)).collect();
        Ok(InfinitesimalLadder { s, eta, mu, nu })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn eta(&self) -> &Rational {
        &self.eta
    }

    pub fn mu(&self, j: usize) -> &Rational {
        &self.mu[j]
    }

    pub fn nu(&self, j: usize) -> &Rational {
        &self.nu[j]
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum ThresholdKind {
    Mu,
    Nu,
}

/// An unevaluated ladder value, `mu_j` or `nu_j`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SymbolicThreshold {
    pub kind: ThresholdKind,
    pub level: usize,
}

impl SymbolicThreshold {
    pub fn mu(level: usize) -> Self {
        SymbolicThreshold {
            kind: ThresholdKind::Mu,
            level,
        }
    }

    pub fn nu(level: usize) -> Self {
        SymbolicThreshold {
            kind: ThresholdKind::Nu,
            level,
        }
    }

    pub fn name(&self) -> String {
        match self.kind {
            ThresholdKind::Mu => format!("__mu_{}", self.level),
            ThresholdKind::Nu => format!("__nu_{}", self.level),
        }
    }

    /// Index of the threshold variable after `nvars` ordinary variables.
    pub fn var_index(&self, nvars: usize) -> usize {
        nvars + 2 * self.level + usize::from(self.kind == ThresholdKind::Nu)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Threshold {
    Numeric(Rational),
    Symbolic(SymbolicThreshold),
}

/// How `phi_bar` chooses thresholds.
#[derive(Clone, Debug)]
pub enum LadderMode {
    Numeric(InfinitesimalLadder),
    Symbolic,
}

/// Appends `__mu_0 __nu_0 .. __mu_s __nu_s` to `vars`.
pub fn threshold_vars(vars: &VarList, s: usize) -> Result<VarList> {
    let mut out = vars.clone();
    for j in 0..=s {
        for t in [SymbolicThreshold::mu(j), SymbolicThreshold::nu(j)] {
            let name = t.name();
            if vars.index_of(&name).is_some() {
                return Err(Error::Format(format!("variable name `{name}` is reserved")));
            }
            out.push(name);
        }
    }
    Ok(out)
}

fn index_polys(phi: &Formula, polys: &[Polynomial]) -> Result<CompiledFormula> {
    let compiled = CompiledFormula::with_polys(phi, polys).map_err(|e| match e {
        Error::AtomOutsidePolySet(_) => {
            let known: std::collections::HashSet<&Polynomial> = polys.iter().collect();
            let missing = phi
                .atoms()
                .into_iter()
                .find(|a| !known.contains(a.poly()))
                .map(|a| {
                    let names = VarList::numbered("v", a.poly().nvars());
                    a.poly().display(&names).to_string()
                })
                .unwrap_or_default();
            Error::AtomOutsidePolySet(missing)
        }
        other => other,
    })?;
    Ok(compiled)
}

fn sign_truth(rel: Relation, s: i8) -> Truth {
    Truth::from_bool(rel.holds(s))
}

/// All sign conditions on `polys` under which `phi` evaluates to true, in
/// lexicographic order (`-1 < 0 < 1`, first polynomial most significant).
pub fn enumerate_sigma(phi: &Formula, polys: &[Polynomial]) -> Result<Vec<SignCondition>> {
    enumerate_sigma_capped(phi, polys, DEFAULT_SIGMA_CAP)
}

pub fn enumerate_sigma_capped(phi: &Formula, polys: &[Polynomial], cap: usize) -> Result<Vec<SignCondition>> {
    if polys.len() > cap {
        return Err(Error::TooManyPolynomials {
            count: polys.len(),
            cap,
        });
    }
    let compiled = index_polys(phi, polys)?;
    let mut out = Vec::new();
    let mut sigma = vec![0i8; polys.len()];
    enumerate_rec(&compiled, 0, &mut sigma, &mut out);
    Ok(out)
}

fn partial_truth(f: &CompiledFormula, sigma: &[i8], assigned: usize) -> Truth {
    f.eval(&mut |i, r| {
        if i < assigned {
            sign_truth(r, sigma[i])
        } else {
            Truth::Unknown
        }
    })
}

fn enumerate_rec(f: &CompiledFormula, idx: usize, sigma: &mut [i8], out: &mut Vec<SignCondition>) {
    let s = sigma.len();
    if idx == s {
        if partial_truth(f, sigma, s) == Truth::True {
            out.push(SignCondition(sigma.to_vec()));
        }
        return;
    }
    for v in [-1i8, 0, 1] {
        sigma[idx] = v;
        match partial_truth(f, sigma, idx + 1) {
            Truth::False => {}
            Truth::True => collect_all(idx + 1, sigma, out),
            Truth::Unknown => enumerate_rec(f, idx + 1, sigma, out),
        }
    }
}

fn collect_all(idx: usize, sigma: &mut [i8], out: &mut Vec<SignCondition>) {
    if idx == sigma.len() {
        out.push(SignCondition(sigma.to_vec()));
        return;
    }
    for v in [-1i8, 0, 1] {
        sigma[idx] = v;
        collect_all(idx + 1, sigma, out);
    }
}

/// The closed conjunction `sigma_bar(c, d)` over `polys`.
///
/// With symbolic thresholds the result lives over the ordinary variables
/// followed by the threshold variables for `s = polys.len()`.
pub fn sigma_bar(sigma: &SignCondition, polys: &[Polynomial], c: &Threshold, d: &Threshold) -> Result<Formula> {
    if sigma.len() != polys.len() {
        return Err(Error::DimensionMismatch {
            expected: polys.len(),
            found: sigma.len(),
        });
    }
    if let (Threshold::Numeric(c), Threshold::Numeric(d)) = (c, d) {
        if !(d.is_positive() && d < c) {
            return Err(Error::Thresholds {
                c: fmt_rational(c),
                d: fmt_rational(d),
            });
        }
    }
    let symbolic = matches!(c, Threshold::Symbolic(_)) || matches!(d, Threshold::Symbolic(_));
    let base = polys.first().map(Polynomial::nvars).unwrap_or(0);
    let nvars = if symbolic { base + 2 * (polys.len() + 1) } else { base };
    let embed: Vec<usize> = (0..base).collect();
    let tp = |t: &Threshold| match t {
        Threshold::Numeric(q) => Polynomial::constant(nvars, q.clone()),
        Threshold::Symbolic(st) => Polynomial::var(nvars, st.var_index(base)),
    };
    let (cp, dp) = (tp(c), tp(d));
    let mut parts = Vec::new();
    for (p, &s) in polys.iter().zip(sigma.signs()) {
        let p = if symbolic { p.remap(nvars, &embed) } else { p.clone() };
        match s {
            0 => {
                parts.push(Formula::atom(&p - &dp, Relation::Le));
                parts.push(Formula::atom(&p + &dp, Relation::Ge));
            }
            1 => parts.push(Formula::atom(&p - &cp, Relation::Ge)),
            _ => parts.push(Formula::atom(&p + &cp, Relation::Le)),
        }
    }
    Ok(Formula::and(parts))
}

/// The closed relaxation: `OR` over `Sigma_phi` of `sigma_bar(mu_l, nu_l)`
/// with `l = level(sigma)`.
pub fn phi_bar(phi: &Formula, polys: &[Polynomial], mode: &LadderMode) -> Result<Formula> {
    if let LadderMode::Numeric(ladder) = mode {
        if ladder.s() < polys.len() {
            return Err(Error::Config(format!(
                "ladder has {} levels but the polynomial set has {} members",
                ladder.s(),
                polys.len()
            )));
        }
    }
    let sigmas = enumerate_sigma(phi, polys)?;
    let mut disjuncts = Vec::with_capacity(sigmas.len());
    for sigma in &sigmas {
        let j = sigma.level();
        let (c, d) = match mode {
            LadderMode::Numeric(l) => (
                Threshold::Numeric(l.mu(j).clone()),
                Threshold::Numeric(l.nu(j).clone()),
            ),
            LadderMode::Symbolic => (
                Threshold::Symbolic(SymbolicThreshold::mu(j)),
                Threshold::Symbolic(SymbolicThreshold::nu(j)),
            ),
        };
        disjuncts.push(sigma_bar(sigma, polys, &c, &d)?);
    }
    Ok(Formula::or(disjuncts))
}

/// Relaxation of a formula-file body, with its own polynomial set.
pub fn closedify_formula(phi: &Formula, vars: &VarList, mode: &LadderMode) -> Result<(Formula, VarList)> {
    let polys = phi.polynomials();
    let f = phi_bar(phi, &polys, mode)?;
    let vars = match mode {
        LadderMode::Numeric(_) => vars.clone(),
        LadderMode::Symbolic => threshold_vars(vars, polys.len())?,
    };
    Ok((f, vars))
}

/// Substitutes ladder values for the threshold variables of a symbolic
/// relaxation over `nvars` ordinary variables.
pub fn instantiate_thresholds(f: &Formula, nvars: usize, ladder: &InfinitesimalLadder) -> Formula {
    let total = nvars + 2 * (ladder.s() + 1);
    let mut images: Vec<Polynomial> = (0..nvars).map(|i| Polynomial::var(nvars, i)).collect();
    for j in 0..=ladder.s() {
        images.push(Polynomial::constant(nvars, ladder.mu(j).clone()));
        images.push(Polynomial::constant(nvars, ladder.nu(j).clone()));
    }
    f.map_atoms(&mut |a| {
        debug_assert_eq!(a.poly().nvars(), total);
        Formula::atom(a.poly().substitute(&images), a.relation())
    })
}

/// The numeric relaxation evaluated directly over boxes, without
/// materializing the (possibly large) disjunction.
///
/// Its box truth equals `eval_box` of the materialized [`phi_bar`] output:
/// the maximum over `Sigma_phi` of the minimum over the band conditions.
pub struct RelaxedFormula {
    phi: Formula,
    compiled: CompiledFormula,
    arity: usize,
    ladder: InfinitesimalLadder,
    /// `[0, mu_0, nu_0, mu_1, nu_1, ...]`.
    thresholds: Vec<Rational>,
}

impl RelaxedFormula {
    pub fn new(phi: &Formula, polys: &[Polynomial], ladder: InfinitesimalLadder, arity: usize) -> Result<Self> {
        if polys.len() > DEFAULT_SIGMA_CAP {
            return Err(Error::TooManyPolynomials {
                count: polys.len(),
                cap: DEFAULT_SIGMA_CAP,
            });
        }
        if ladder.s() < polys.len() {
            return Err(Error::Config(format!(
                "ladder has {} levels but the polynomial set has {} members",
                ladder.s(),
                polys.len()
            )));
        }
        if let Some(p) = polys.iter().find(|p| p.nvars() != arity) {
            return Err(Error::DimensionMismatch {
                expected: arity,
                found: p.nvars(),
            });
        }
        let compiled = index_polys(phi, polys)?;
        let mut thresholds = vec![Rational::zero()];
        for j in 0..=ladder.s() {
            thresholds.push(ladder.mu(j).clone());
            thresholds.push(ladder.nu(j).clone());
        }
        Ok(RelaxedFormula {
            phi: phi.clone(),
            compiled,
            arity,
            ladder,
            thresholds,
        })
    }

    pub fn ladder(&self) -> &InfinitesimalLadder {
        &self.ladder
    }

    /// The materialized closed formula.
    pub fn materialize(&self) -> Result<Formula> {
        phi_bar(&self.phi, self.compiled.polys(), &LadderMode::Numeric(self.ladder.clone()))
    }
}

struct Dfs<'a> {
    f: &'a CompiledFormula,
    q: &'a dyn RangeQuery,
    s: usize,
    cache: Vec<Cell<u8>>,
    sigma: Vec<i8>,
    best: Truth,
}

impl Dfs<'_> {
    /// Truth of the band condition for polynomial `p`, sign `v`, level `j`.
    fn band(&self, p: usize, v: i8, j: usize) -> Truth {
        let slot = (p * 3 + (v + 1) as usize) * (self.s + 1) + j;
        let c = self.cache[slot].get();
        if c != u8::MAX {
            return decode(c);
        }
        let (mu, nu) = (1 + 2 * j, 2 + 2 * j);
        let t = match v {
            0 => self
                .q
                .compare(p, Relation::Le, nu, false)
                .min(self.q.compare(p, Relation::Ge, nu, true)),
            1 => self.q.compare(p, Relation::Ge, mu, false),
            _ => self.q.compare(p, Relation::Le, mu, true),
        };
        self.cache[slot].set(t as u8);
        t
    }

    fn run(&mut self, idx: usize, zeros: usize, acc: Truth, j: usize) {
        if idx == self.s {
            if zeros == j && partial_truth(self.f, &self.sigma, self.s) == Truth::True {
                self.best = self.best.max(acc);
            }
            return;
        }
        let remaining = self.s - idx - 1;
        for v in [-1i8, 0, 1] {
            let nz = zeros + usize::from(v == 0);
            if nz > j || nz + remaining < j {
                continue;
            }
            let next = acc.min(self.band(idx, v, j));
            if next == Truth::False || (self.best == Truth::Unknown && next != Truth::True) {
                continue;
            }
            self.sigma[idx] = v;
            if partial_truth(self.f, &self.sigma, idx + 1) == Truth::False {
                continue;
            }
            self.run(idx + 1, nz, next, j);
            if self.best == Truth::True {
                return;
            }
        }
    }
}

fn decode(c: u8) -> Truth {
    match c {
        0 => Truth::False,
        1 => Truth::Unknown,
        _ => Truth::True,
    }
}

impl BoxPredicate for RelaxedFormula {
    fn arity(&self) -> usize {
        self.arity
    }

    fn polys(&self) -> &[Polynomial] {
        self.compiled.polys()
    }

    fn thresholds(&self) -> &[Rational] {
        &self.thresholds
    }

    fn eval(&self, q: &dyn RangeQuery) -> Truth {
        let s = self.compiled.polys().len();
        let mut dfs = Dfs {
            f: &self.compiled,
            q,
            s,
            cache: (0..3 * s * (s + 1)).map(|_| Cell::new(u8::MAX)).collect(),
            sigma: vec![0; s],
            best: Truth::False,
        };
        for j in 0..=s {
            dfs.run(0, 0, Truth::True, j);
            if dfs.best == Truth::True {
                break;
            }
        }
        dfs.best
    }
}
