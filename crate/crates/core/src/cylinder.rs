//! Semi-algebraic mapping cylinders.
//!
//! For a map `f: S -> T` given by formulas `phi_S(X)`, `phi_T(Y)` and the
//! graph formula `phi_f(X, Y)`, the cylinder
//!
//! ```text
//! cyl(f) = { (t*x, f(x), t) : x in S, t in [0, 1] }  U  { (0, y, 0) : y in T }
//! ```
//!
//! is described by the existential formula `Theta` over `(X, Y, T)`. The
//! existential block is eliminated by the witness `Z = X / T`, valid because
//! the conjunct `X = T*Z` pins `Z` whenever `T > 0`.
//!
//! Directed cylinders reparametrize `[0, 1]` to `[a, b]`; the zigzag cylinder
//! glues directed cylinders and prisms along slices of the last coordinate.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::formula::{homogenize_substitute, Formula, Relation};
use crate::interval::IntervalBox;
use crate::poly::{fmt_rational, rat, Polynomial, Rational};
use crate::vars::VarList;

/// A map `f: S -> T` by formulas. `phi_f` is over `X` followed by `Y`.
#[derive(Clone, PartialEq, Debug)]
pub struct SemialgebraicMapDesc {
    pub k: usize,
    pub m: usize,
    pub phi_s: Formula,
    pub phi_t: Formula,
    pub phi_f: Formula,
}

fn check_arity(f: &Formula, n: usize, what: &str) -> Result<()> {
    if f.is_quantified() {
        return Err(Error::Format(format!("{what} must be quantifier-free")));
    }
    match f.arity() {
        Some(a) if a != n => Err(Error::DimensionMismatch {
            expected: n,
            found: a,
        }),
        _ => Ok(()),
    }
}

impl SemialgebraicMapDesc {
    pub fn new(k: usize, m: usize, phi_s: Formula, phi_t: Formula, phi_f: Formula) -> Result<Self> {
        check_arity(&phi_s, k, "phi_s")?;
        check_arity(&phi_t, m, "phi_t")?;
        check_arity(&phi_f, k + m, "phi_f")?;
        Ok(SemialgebraicMapDesc {
            k,
            m,
            phi_s,
            phi_t,
            phi_f,
        })
    }
}

/// Which end of `[a, b]` carries the source copy of `S`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    /// Apex (the copy of `T`) at `a`, source at `b`.
    Fwd,
    /// Apex at `b`, source at `a`.
    Bwd,
}

/// Formulas describing one (directed) cylinder over the layout
/// `X (k), Y (m), lambda`; the raw `theta` additionally binds `Z (k)`.
#[derive(Clone, Debug)]
pub struct CylinderArtifact {
    pub desc: SemialgebraicMapDesc,
    pub a: Rational,
    pub b: Rational,
    pub dir: Direction,
    /// `x1..xk y1..ym t`, the free variables.
    pub vars: VarList,
    /// `vars` followed by the bound `z1..zk`.
    pub theta_vars: VarList,
    pub theta: Formula,
    pub theta_qf: Option<Formula>,
    pub theta_t1: Option<Formula>,
}

impl CylinderArtifact {
    pub fn dim(&self) -> usize {
        self.desc.k + self.desc.m + 1
    }

    /// Parameter value of the source copy of `S`.
    pub fn source_level(&self) -> &Rational {
        match self.dir {
            Direction::Fwd => &self.b,
            Direction::Bwd => &self.a,
        }
    }

    /// Parameter value of the apex copy of `T`.
    pub fn apex_level(&self) -> &Rational {
        match self.dir {
            Direction::Fwd => &self.a,
            Direction::Bwd => &self.b,
        }
    }

    pub fn theta_qf(&self) -> Result<&Formula> {
        self.theta_qf
            .as_ref()
            .ok_or_else(|| Error::Config("cylinder has not been eliminated".into()))
    }

    pub fn theta_t1(&self) -> Result<&Formula> {
        self.theta_t1
            .as_ref()
            .ok_or_else(|| Error::Config("cylinder has not been restricted to its source slice".into()))
    }
}

/// Standard names `x1..xk y1..ym <param>`.
pub fn layout_vars(k: usize, m: usize, param: &str) -> VarList {
    let mut v = VarList::numbered("x", k).concat(&VarList::numbered("y", m));
    v.push(param);
    v
}

/// The scale `l(lambda)` with `X = l(lambda) * Z` on the cylinder body.
fn scale_poly(n: usize, lambda: usize, a: &Rational, b: &Rational, dir: Direction) -> Polynomial {
    let inv = (b - a).recip();
    let lam = Polynomial::var(n, lambda);
    let shifted = match dir {
        Direction::Fwd => &lam - &Polynomial::constant(n, a.clone()),
        Direction::Bwd => &Polynomial::constant(n, b.clone()) - &lam,
    };
    shifted.scale(&inv)
}

/// Embeds `f` (over `count` variables) at offset `at` of an `n`-variable space.
fn embed(f: &Formula, n: usize, at: usize, count: usize) -> Formula {
    let map: Vec<usize> = (at..at + count).collect();
    f.remap(n, &map)
}

/// `(lambda = apex) and X = 0 and phi_T(Y)` over `n >= k + m + 1` variables.
fn apex_clause(desc: &SemialgebraicMapDesc, n: usize, apex: &Rational) -> Formula {
    let (k, m) = (desc.k, desc.m);
    let lam = Polynomial::var(n, k + m);
    let mut parts = vec![Formula::cmp_const(&lam, Relation::Eq, apex)];
    for i in 0..k {
        parts.push(Formula::atom(Polynomial::var(n, i), Relation::Eq));
    }
    parts.push(embed(&desc.phi_t, n, k, m));
    Formula::and(parts)
}

fn directed_vars(k: usize, m: usize, param: &str) -> (VarList, VarList) {
    let vars = layout_vars(k, m, param);
    let theta_vars = vars.concat(&VarList::numbered("z", k));
    (vars, theta_vars)
}

fn build(desc: &SemialgebraicMapDesc, a: &Rational, b: &Rational, dir: Direction, param: &str) -> Result<CylinderArtifact> {
    if a >= b {
        return Err(Error::EmptyRange {
            a: fmt_rational(a),
            b: fmt_rational(b),
        });
    }
    let (k, m) = (desc.k, desc.m);
    let n = 2 * k + m + 1;
    let lambda = k + m;
    let lam = Polynomial::var(n, lambda);
    let apex = if dir == Direction::Fwd { a } else { b };
    let scale = scale_poly(n, lambda, a, b, dir);
    let mut body = Vec::new();
    for i in 0..k {
        let z = Polynomial::var(n, k + m + 1 + i);
        body.push(Formula::atom(&Polynomial::var(n, i) - &(&scale * &z), Relation::Eq));
    }
    body.push(embed(&desc.phi_s, n, k + m + 1, k));
    let fmap: Vec<usize> = (0..k).map(|i| k + m + 1 + i).chain(k..k + m).collect();
    body.push(desc.phi_f.remap(n, &fmap));
    body.push(embed(&desc.phi_t, n, k, m));
    let bound: Vec<usize> = (k + m + 1..n).collect();
    let theta = Formula::or(vec![
        apex_clause(desc, n, apex),
        Formula::and(vec![
            Formula::cmp_const(&lam, Relation::Ge, a),
            Formula::cmp_const(&lam, Relation::Le, b),
            Formula::exists(bound, Formula::and(body)),
        ]),
    ]);
    let (vars, theta_vars) = directed_vars(k, m, param);
    Ok(CylinderArtifact {
        desc: desc.clone(),
        a: a.clone(),
        b: b.clone(),
        dir,
        vars,
        theta_vars,
        theta,
        theta_qf: None,
        theta_t1: None,
    })
}

/// `Theta` for the cylinder over `T in [0, 1]`.
pub fn build_theta(desc: &SemialgebraicMapDesc) -> Result<CylinderArtifact> {
    build(desc, &Rational::zero(), &Rational::one(), Direction::Fwd, "t")
}

/// Replaces the existential block by the witness `Z = X / l(lambda)`.
pub fn eliminate_theta(mut art: CylinderArtifact) -> Result<CylinderArtifact> {
    let desc = &art.desc;
    let (k, m) = (desc.k, desc.m);
    let n = k + m + 1;
    let lambda = k + m;
    let lam = Polynomial::var(n, lambda);
    let scale = scale_poly(n, lambda, &art.a, &art.b, art.dir);
    let zs = VarList::numbered("z", k);
    let h_s = homogenize_substitute(&desc.phi_s, &(0..k).collect::<Vec<_>>(), &vec![true; k], &vec![false; k], &scale, &zs)?;
    let f_vars = zs.concat(&VarList::numbered("y", m));
    let mut block = vec![true; k];
    block.extend(vec![false; m]);
    let passthrough: Vec<bool> = block.iter().map(|b| !b).collect();
    let h_f = homogenize_substitute(&desc.phi_f, &(0..k + m).collect::<Vec<_>>(), &block, &passthrough, &scale, &f_vars)?;
    let (lo, hi) = match art.dir {
        Direction::Fwd => (
            Formula::cmp_const(&lam, Relation::Gt, &art.a),
            Formula::cmp_const(&lam, Relation::Le, &art.b),
        ),
        Direction::Bwd => (
            Formula::cmp_const(&lam, Relation::Ge, &art.a),
            Formula::cmp_const(&lam, Relation::Lt, &art.b),
        ),
    };
    let apex = art.apex_level().clone();
    let qf = Formula::or(vec![
        apex_clause(desc, n, &apex),
        Formula::and(vec![lo, hi, h_s, h_f, embed(&desc.phi_t, n, k, m)]),
    ]);
    art.theta_qf = Some(qf);
    Ok(art)
}

/// `theta_qf and (lambda = source level)`: the embedded copy of `S`.
pub fn restrict_t1(mut art: CylinderArtifact) -> Result<CylinderArtifact> {
    let qf = art.theta_qf()?.clone();
    let n = art.dim();
    let lam = Polynomial::var(n, n - 1);
    let slice = Formula::cmp_const(&lam, Relation::Eq, art.source_level());
    art.theta_t1 = Some(Formula::and(vec![qf, slice]));
    Ok(art)
}

/// Directed cylinder over `[a, b]`, eliminated and restricted.
pub fn build_directed_cyl(desc: &SemialgebraicMapDesc, a: &Rational, b: &Rational, dir: Direction) -> Result<CylinderArtifact> {
    restrict_t1(eliminate_theta(build(desc, a, b, dir, "mu")?)?)
}

/// The full map pipeline: build, eliminate, restrict.
pub fn map_cylinder(desc: &SemialgebraicMapDesc) -> Result<CylinderArtifact> {
    restrict_t1(eliminate_theta(build_theta(desc)?)?)
}

/// A diagram `S_0 <- S_1 -> S_2 <- S_3 ...` of sets in a common `R^k`.
///
/// `psi[i - 1]` is the graph of `f_i` over `(domain, codomain)`: for odd `i`
/// `f_i: S_i -> S_{i-1}`, for even `i` `f_i: S_{i-1} -> S_i`.
#[derive(Clone, PartialEq, Debug)]
pub struct ZigzagDiagramDesc {
    pub n: usize,
    pub k: usize,
    pub phi: Vec<Formula>,
    pub psi: Vec<Formula>,
}

impl ZigzagDiagramDesc {
    pub fn new(k: usize, phi: Vec<Formula>, psi: Vec<Formula>) -> Result<Self> {
        if phi.len() < 2 || psi.len() + 1 != phi.len() {
            return Err(Error::Shape(format!(
                "need n + 1 set formulas and n graph formulas with n >= 1 (got {} and {})",
                phi.len(),
                psi.len()
            )));
        }
        for (i, f) in phi.iter().enumerate() {
            check_arity(f, k, &format!("phi[{i}]"))?;
        }
        for (i, f) in psi.iter().enumerate() {
            check_arity(f, 2 * k, &format!("psi[{}]", i + 1))?;
        }
        Ok(ZigzagDiagramDesc {
            n: psi.len(),
            k,
            phi,
            psi,
        })
    }

    /// `(domain, codomain)` indices of `f_i`.
    pub fn arrow(&self, i: usize) -> (usize, usize) {
        if i % 2 == 1 {
            (i, i - 1)
        } else {
            (i - 1, i)
        }
    }

    /// The single map `f_i` as a map description.
    pub fn map_desc(&self, i: usize) -> Result<SemialgebraicMapDesc> {
        let (s, t) = self.arrow(i);
        SemialgebraicMapDesc::new(self.k, self.k, self.phi[s].clone(), self.phi[t].clone(), self.psi[i - 1].clone())
    }
}

/// A graph formula with an affine weight `w(mu) = c0 + c1*mu`.
#[derive(Clone, PartialEq, Debug)]
pub struct WeightedGraph {
    /// Graph over `(X, Y)`, `2k` variables.
    pub graph: Formula,
    pub c0: Rational,
    pub c1: Rational,
}

impl WeightedGraph {
    pub fn weight(&self, mu: &Rational) -> Rational {
        &self.c0 + &(&self.c1 * mu)
    }
}

/// `{ (x, sum_g w_g(mu) * f_g(x), mu) : x in S, mu in [lo, hi] }` where each
/// `f_g` is given by its graph formula. Membership is resolved by witness
/// search during rasterization.
#[derive(Clone, PartialEq, Debug)]
pub struct PrismDesc {
    pub k: usize,
    pub source: Formula,
    pub graphs: Vec<WeightedGraph>,
    pub mu_lo: Rational,
    pub mu_hi: Rational,
}

impl PrismDesc {
    pub fn dim(&self) -> usize {
        2 * self.k + 1
    }
}

#[derive(Clone, Debug)]
pub enum Piece {
    Cylinder(Box<CylinderArtifact>),
    Prism(PrismDesc),
}

/// The zigzag cylinder: shared pieces and, for each index, the pieces whose
/// union is `S~_i`. Nesting `S~_{i+-1} subset S~_i` (even `i`) holds because
/// the odd members are literally shared.
#[derive(Clone, Debug)]
pub struct ZigzagCylinder {
    pub n: usize,
    pub k: usize,
    pub vars: VarList,
    pub labels: Vec<String>,
    pub pieces: Vec<Piece>,
    pub members: Vec<Vec<usize>>,
}

fn half(i: usize) -> Rational {
    rat(2 * i as i64 - 1, 2)
}

pub fn build_zigzag_cyl(d: &ZigzagDiagramDesc) -> Result<ZigzagCylinder> {
    let (n, k) = (d.n, d.k);
    let mut labels = Vec::new();
    let mut pieces = Vec::new();
    let mut prism_of = vec![None; n + 1];
    for i in (1..=n).step_by(2) {
        let lo = half(i);
        let source = d.phi[i].clone();
        let prism = if i == n {
            PrismDesc {
                k,
                source,
                graphs: vec![WeightedGraph {
                    graph: d.psi[i - 1].clone(),
                    c0: Rational::one(),
                    c1: Rational::zero(),
                }],
                mu_lo: lo,
                mu_hi: Rational::from_integer((n as i64).into()),
            }
        } else {
            // Endpoint-matching weights: f_i at i - 1/2, f_{i+1} at i + 1/2.
            let i_q = Rational::from_integer((i as i64).into());
            PrismDesc {
                k,
                source,
                graphs: vec![
                    WeightedGraph {
                        graph: d.psi[i - 1].clone(),
                        c0: &i_q + &rat(1, 2),
                        c1: -Rational::one(),
                    },
                    WeightedGraph {
                        graph: d.psi[i].clone(),
                        c0: -&i_q + &rat(1, 2),
                        c1: Rational::one(),
                    },
                ],
                mu_lo: lo,
                mu_hi: half(i + 1),
            }
        };
        prism_of[i] = Some(pieces.len());
        labels.push(format!("prism{i}"));
        pieces.push(Piece::Prism(prism));
    }
    let mut members = vec![Vec::new(); n + 1];
    for i in (0..=n).step_by(2) {
        let i_q = Rational::from_integer((i as i64).into());
        if i > 0 {
            let desc = d.map_desc(i)?;
            let art = build_directed_cyl(&desc, &half(i), &i_q, Direction::Bwd)?;
            members[i].push(pieces.len());
            labels.push(format!("bwd{i}"));
            pieces.push(Piece::Cylinder(Box::new(art)));
        }
        if i < n {
            let desc = d.map_desc(i + 1)?;
            let art = build_directed_cyl(&desc, &i_q, &half(i + 1), Direction::Fwd)?;
            members[i].push(pieces.len());
            labels.push(format!("fwd{i}"));
            pieces.push(Piece::Cylinder(Box::new(art)));
        }
        for j in [i.wrapping_sub(1), i + 1] {
            if let Some(Some(p)) = prism_of.get(j) {
                members[i].push(*p);
            }
        }
    }
    for i in (1..=n).step_by(2) {
        members[i].push(prism_of[i].unwrap());
    }
    for m in &mut members {
        m.sort_unstable();
    }
    Ok(ZigzagCylinder {
        n,
        k,
        vars: layout_vars(k, k, "mu"),
        labels,
        pieces,
        members,
    })
}

/// The retraction `g_j: S~_j -> S_j` at a point `p = (x, y, mu)`.
///
/// For odd `j` it forgets everything but `x`. For even `j` it returns `y` on
/// the central band `[j - 1/2, j + 1/2]` and `f_j(x)` or `f_{j+1}(x)` on the
/// neighbouring prism bands, where the function values are found by witness
/// search on the graph formulas down to cells of width `width(ybox) / res`.
pub fn eval_g(d: &ZigzagDiagramDesc, j: usize, p: &[Rational], ybox: &IntervalBox, res: u32) -> Result<Vec<Rational>> {
    let k = d.k;
    if j > d.n {
        return Err(Error::DimensionOutOfRange { index: j, max: d.n });
    }
    if p.len() != 2 * k + 1 || ybox.dim() != k {
        return Err(Error::DimensionMismatch {
            expected: 2 * k + 1,
            found: p.len(),
        });
    }
    let (x, y, mu) = (&p[..k], &p[k..2 * k], &p[2 * k]);
    if j % 2 == 1 {
        return Ok(x.to_vec());
    }
    let jq = Rational::from_integer((j as i64).into());
    let half = rat(1, 2);
    let band = |lo: Rational, hi: Rational| &lo <= mu && mu <= &hi;
    if band(&jq - &half, &jq + &half) {
        Ok(y.to_vec())
    } else if j > 0 && band(&jq - &Rational::one(), &jq - &half) {
        crate::raster::graph_value(&d.psi[j - 1], x, ybox, res)
    } else if j < d.n && band(&jq + &half, &jq + &Rational::one()) {
        crate::raster::graph_value(&d.psi[j], x, ybox, res)
    } else {
        Err(Error::Witness(format!("mu = {} is outside the bands of index {j}", fmt_rational(mu))))
    }
}
