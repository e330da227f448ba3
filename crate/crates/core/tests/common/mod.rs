//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

pub mod cylinder;

use std::collections::HashMap;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRng, TestRunner};
use sahom::homology::SimplicialComplex;
use sahom::poly::rat;
use sahom::raster::CubicalSet;
use sahom::formula::homogenize_substitute;
use sahom::{Formula, Interval, IntervalBox, Polynomial, Rational, Relation, Truth, VarList};

/// A runner with a fixed seed, so failures reproduce.
pub fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(config_algorithm()))
}

fn config_algorithm() -> proptest::test_runner::RngAlgorithm {
    proptest::test_runner::RngAlgorithm::ChaCha
}

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

pub fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (1i64..=12, 1i64..=4, any::<bool>()).prop_map(|(n, d, neg)| rat(if neg { -n } else { n }, d))
}

/// Sparse polynomials with small coefficients and degree at most `max_deg`
/// per variable.
pub fn arb_poly(nvars: usize, max_deg: u32, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::collection::vec(0..=max_deg, nvars), small_rational()), 1..=max_terms)
        .prop_map(move |terms| Polynomial::from_terms(nvars, terms))
}

pub fn arb_relation() -> impl Strategy<Value = Relation> {
    prop_oneof![
        Just(Relation::Eq),
        Just(Relation::Lt),
        Just(Relation::Gt),
        Just(Relation::Le),
        Just(Relation::Ge),
    ]
}

#[derive(Clone, Debug)]
pub enum Shape {
    Atom(usize, Relation),
    And(Vec<Shape>),
    Or(Vec<Shape>),
    Not(Box<Shape>),
}

fn arb_shape(pool: usize, depth: u32) -> impl Strategy<Value = Shape> {
    let leaf = (0..pool, arb_relation()).prop_map(|(i, r)| Shape::Atom(i, r));
    leaf.prop_recursive(depth, 12, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Shape::And),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Shape::Or),
            inner.prop_map(|s| Shape::Not(Box::new(s))),
        ]
    })
}

fn realize(s: &Shape, pool: &[Polynomial]) -> Formula {
    match s {
        Shape::Atom(i, r) => Formula::atom(pool[*i].clone(), *r),
        Shape::And(cs) => Formula::and(cs.iter().map(|c| realize(c, pool)).collect()),
        Shape::Or(cs) => Formula::or(cs.iter().map(|c| realize(c, pool)).collect()),
        Shape::Not(c) => Formula::not(realize(c, pool)),
    }
}

/// Quantifier-free formulas whose atoms come from a pool of at most `pool`
/// nonconstant polynomials.
pub fn arb_formula(nvars: usize, pool: usize, max_deg: u32) -> impl Strategy<Value = Formula> {
    prop::collection::vec(arb_poly(nvars, max_deg, 3).prop_filter("nonconstant", |p| p.degree() > 0), 1..=pool)
        .prop_flat_map(move |polys| {
            let n = polys.len();
            arb_shape(n, 3).prop_map(move |s| realize(&s, &polys))
        })
}

/// A box with rational corners together with a rational point inside it.
pub fn arb_box_and_point(nvars: usize) -> impl Strategy<Value = (IntervalBox, Vec<Rational>)> {
    prop::collection::vec((small_rational(), 0i64..=8, 0i64..=8), nvars).prop_map(|axes| {
        let mut ivs = Vec::new();
        let mut p = Vec::new();
        for (lo, w, t) in axes {
            let hi = &lo + rat(w, 4);
            let x = &lo + &(&(&hi - &lo) * &rat(t, 8));
            ivs.push(Interval::new(lo, hi));
            p.push(x);
        }
        (IntervalBox::new(ivs), p)
    })
}

pub fn arb_point(nvars: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-16i64..=16, 1i64..=8).prop_map(|(n, d)| rat(n, d)), nvars)
}

/// `eval_box = TRUE` forces the point value true and `FALSE` forces false.
pub fn interval_sound(f: &Formula, b: &IntervalBox, p: &[Rational]) -> bool {
    let at_point = f.eval_point(p).unwrap();
    match f.eval_box(b).unwrap() {
        Truth::True => at_point,
        Truth::False => !at_point,
        Truth::Unknown => true,
    }
}

/// The homogenized formula at `(x0, lambda0)` agrees with `f` at
/// `x0 / l(lambda0)` for `l(lambda) = (lambda - a) / width`.
pub fn homogenized_agrees(f: &Formula, a: &Rational, width: &Rational, x0: &[Rational], lambda0: &Rational) -> bool {
    let k = x0.len();
    let n = k + 1;
    let lam = Polynomial::var(n, k);
    let scale = (&lam - &Polynomial::constant(n, a.clone())).scale(&width.recip());
    let l0 = (lambda0 - a) / width;
    if l0 <= Rational::from_integer(0.into()) {
        return true;
    }
    let h = homogenize_substitute(f, &(0..k).collect::<Vec<_>>(), &vec![true; k], &vec![false; k], &scale, &VarList::numbered("z", k)).unwrap();
    let mut p = x0.to_vec();
    p.push(lambda0.clone());
    let z: Vec<Rational> = x0.iter().map(|x| x / &l0).collect();
    h.eval_point(&p).unwrap() == f.eval_point(&z).unwrap()
}

// ---------------------------------------------------------------------------
// Homology oracles over a prime field, written independently of the library.

pub const P: u64 = 2_147_483_647;

fn inv(a: u64) -> u64 {
    let (mut r, mut b, mut e) = (1u64, a % P, P - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % P;
        }
        b = b * b % P;
        e >>= 1;
    }
    r
}

type Column = Vec<(usize, u64)>;

fn normalize(col: Vec<(usize, i64)>) -> Column {
    let mut v: Column = col.into_iter().map(|(i, c)| (i, c.rem_euclid(P as i64) as u64)).collect();
    v.sort_unstable();
    let mut out: Column = Vec::with_capacity(v.len());
    for (i, c) in v {
        match out.last_mut() {
            Some((j, d)) if *j == i => *d = (*d + c) % P,
            _ => out.push((i, c)),
        }
    }
    out.retain(|&(_, c)| c != 0);
    out
}

/// `v - c * p` for sorted columns.
fn sub_multiple(v: &Column, c: u64, p: &Column) -> Column {
    let mut out = Vec::with_capacity(v.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < p.len() {
        let take_v = j == p.len() || (i < v.len() && v[i].0 < p[j].0);
        let take_p = i == v.len() || (j < p.len() && p[j].0 < v[i].0);
        if take_v {
            out.push(v[i]);
            i += 1;
        } else if take_p {
            out.push((p[j].0, (P - c * p[j].1 % P) % P));
            j += 1;
        } else {
            let x = (v[i].1 + P - c * p[j].1 % P) % P;
            if x != 0 {
                out.push((v[i].0, x));
            }
            i += 1;
            j += 1;
        }
    }
    out.retain(|&(_, x)| x != 0);
    out
}

/// Column reduction over `GF(P)`, pivoting on the largest row index.
/// Returns the pivot rows of the columns that survive.
pub fn pivots_mod_p(columns: impl IntoIterator<Item = Vec<(usize, i64)>>) -> Vec<usize> {
    let mut pivots: HashMap<usize, Column> = HashMap::new();
    let mut rows = Vec::new();
    for col in columns {
        let mut v = normalize(col);
        while let Some(&(low, c)) = v.last() {
            match pivots.get(&low) {
                Some(p) => v = sub_multiple(&v, c, p),
                None => {
                    let ic = inv(c);
                    pivots.insert(low, v.iter().map(|&(i, x)| (i, x * ic % P)).collect());
                    rows.push(low);
                    break;
                }
            }
        }
    }
    rows
}

/// Rank over `GF(P)` of a matrix given by sparse integer columns.
pub fn rank_mod_p(columns: Vec<Vec<(usize, i64)>>) -> usize {
    pivots_mod_p(columns).len()
}

/// Betti numbers `0..=max_dim` of a simplicial complex from dense counts
/// and mod-`P` ranks of boundary matrices built here from scratch.
pub fn simplicial_betti_mod_p(k: &SimplicialComplex, max_dim: usize) -> Vec<usize> {
    let top = k.dim().unwrap_or(0);
    let rank = |d: usize| -> usize {
        if d == 0 || d > top {
            return 0;
        }
        let index: HashMap<&[u64], usize> = k.simplices(d - 1).iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
        let cols = k
            .simplices(d)
            .iter()
            .map(|s| {
                (0..s.len())
                    .map(|j| {
                        let mut f = s.clone();
                        f.remove(j);
                        (index[f.as_slice()], if j % 2 == 0 { 1 } else { -1 })
                    })
                    .collect()
            })
            .collect();
        rank_mod_p(cols)
    };
    (0..=max_dim)
        .map(|d| {
            let n = if k.is_empty() || d > top { 0 } else { k.count(d) };
            n - rank(d) - rank(d + 1)
        })
        .collect()
}

/// Betti numbers of the union of closed grid cubes, computed from the
/// cubical chain complex over `GF(P)`. Boundary matrices are reduced from
/// the top dimension down, skipping columns known to reduce to zero.
pub fn cubical_betti_mod_p(set: &CubicalSet, max_dim: usize) -> Vec<usize> {
    let dim = set.grid().dim();
    // Elementary cubes in doubled coordinates: odd entries span an interval.
    let mut by_dim: Vec<std::collections::BTreeSet<Vec<u32>>> = vec![Default::default(); dim + 1];
    for c in set.cells() {
        let mut stack = vec![Vec::with_capacity(dim)];
        for &x in c {
            stack = stack
                .iter()
                .flat_map(|s| {
                    [2 * x, 2 * x + 1, 2 * x + 2].map(|d| {
                        let mut t: Vec<u32> = s.clone();
                        t.push(d);
                        t
                    })
                })
                .collect();
        }
        for f in stack {
            by_dim[f.iter().filter(|&&v| v % 2 == 1).count()].insert(f);
        }
    }
    let faces: Vec<Vec<Vec<u32>>> = by_dim.into_iter().map(|s| s.into_iter().collect()).collect();
    let index: Vec<HashMap<&[u32], usize>> = faces
        .iter()
        .map(|fs| fs.iter().enumerate().map(|(i, f)| (f.as_slice(), i)).collect())
        .collect();
    let mut rank = vec![0usize; dim + 2];
    let mut cleared: std::collections::HashSet<usize> = Default::default();
    for k in (1..=dim).rev() {
        let cols = faces[k].iter().enumerate().filter(|(i, _)| !cleared.contains(i)).map(|(_, f)| {
            let mut col = Vec::new();
            let mut pos = 0;
            for (axis, &v) in f.iter().enumerate() {
                if v % 2 == 1 {
                    let sign = if pos % 2 == 0 { 1 } else { -1 };
                    for (delta, s) in [(-1i64, -sign), (1, sign)] {
                        let mut g = f.clone();
                        g[axis] = (v as i64 + delta) as u32;
                        col.push((index[k - 1][g.as_slice()], s));
                    }
                    pos += 1;
                }
            }
            col
        });
        let rows = pivots_mod_p(cols);
        rank[k] = rows.len();
        cleared = rows.into_iter().collect();
    }
    (0..=max_dim)
        .map(|k| faces.get(k).map_or(0, Vec::len) - rank[k] - rank.get(k + 1).copied().unwrap_or(0))
        .collect()
}

// ---------------------------------------------------------------------------
// Simplicial fixtures.

pub fn hollow_triangle() -> SimplicialComplex {
    SimplicialComplex::from_maximal([[0u64, 1], [1, 2], [0, 2]]).unwrap()
}

pub fn full_triangle() -> SimplicialComplex {
    SimplicialComplex::from_maximal([[0u64, 1, 2]]).unwrap()
}

/// The seven-vertex torus.
pub fn torus() -> SimplicialComplex {
    let t: Vec<[u64; 3]> = (0..7u64)
        .flat_map(|i| [[i, (i + 1) % 7, (i + 3) % 7], [i, (i + 2) % 7, (i + 3) % 7]])
        .map(|mut s| {
            s.sort();
            s
        })
        .collect();
    SimplicialComplex::from_maximal(t).unwrap()
}

/// The boundary of a tetrahedron.
pub fn sphere() -> SimplicialComplex {
    SimplicialComplex::from_maximal([[0u64, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]).unwrap()
}

/// The six-vertex projective plane: rationally acyclic, but not mod 2.
pub fn projective_plane() -> SimplicialComplex {
    let t = [[1u64, 2, 3], [1, 3, 4], [1, 4, 5], [1, 5, 6], [1, 2, 6], [2, 3, 5], [3, 4, 6], [2, 4, 5], [3, 5, 6], [2, 4, 6]];
    SimplicialComplex::from_maximal(t).unwrap()
}

pub fn simplicial_fixtures() -> Vec<(&'static str, SimplicialComplex)> {
    vec![
        ("hollow triangle", hollow_triangle()),
        ("full triangle", full_triangle()),
        ("torus", torus()),
        ("sphere", sphere()),
        ("projective plane", projective_plane()),
    ]
}

fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = sahom::linalg::Matrix> {
    (prop::collection::vec(-2i64..=2, rows * cols), any::<bool>()).prop_map(move |(entries, low)| {
        let mut m = sahom::linalg::Matrix::zeros(rows, cols);
        for (idx, e) in entries.into_iter().enumerate() {
            m.set(idx / cols.max(1), idx % cols.max(1), sahom::poly::int(e));
        }
        if low && rows > 1 {
            // A repeated row makes degenerate arrows common.
            for j in 0..cols {
                let v = m.get(0, j).clone();
                m.set(rows - 1, j, v);
            }
        }
        m
    })
}

/// Zigzag modules of length up to `max_n` with spaces of dimension up to
/// `max_dim` and small integer arrows.
pub fn arb_module(max_n: usize, max_dim: usize) -> impl Strategy<Value = sahom::zigzag::ZigzagModule> {
    (1..=max_n)
        .prop_flat_map(move |n| prop::collection::vec(0..=max_dim, n + 1))
        .prop_flat_map(|dims| {
            let n = dims.len() - 1;
            let arrows: Vec<_> = (1..=n)
                .map(|j| {
                    let (s, t) = sahom::zigzag::arrow_ends(j);
                    arb_matrix(dims[t], dims[s])
                })
                .collect();
            (Just(dims), arrows)
        })
        .prop_map(|(dims, arrows)| sahom::zigzag::ZigzagModule::new(dims, arrows).unwrap())
}

/// An invertible `n x n` matrix, as a product of unit triangular factors
/// with a nonzero diagonal in between.
pub fn arb_invertible(n: usize) -> impl Strategy<Value = sahom::linalg::Matrix> {
    let half = n * n.saturating_sub(1) / 2;
    (
        prop::collection::vec(-2i64..=2, half),
        prop::collection::vec(-2i64..=2, half),
        prop::collection::vec(prop_oneof![-2i64..=-1, 1i64..=2], n),
    )
        .prop_map(move |(lo, up, diag)| {
            let (mut l, mut u) = (sahom::linalg::Matrix::identity(n), sahom::linalg::Matrix::identity(n));
            let mut it = lo.into_iter().zip(up);
            for i in 0..n {
                u.set(i, i, sahom::poly::int(diag[i]));
                for j in 0..i {
                    let (a, b) = it.next().unwrap();
                    l.set(i, j, sahom::poly::int(a));
                    u.set(j, i, sahom::poly::int(b));
                }
            }
            l.mul(&u).unwrap()
        })
}

/// A module together with a change of basis at every index.
pub fn arb_module_and_basis(max_n: usize, max_dim: usize) -> impl Strategy<Value = (sahom::zigzag::ZigzagModule, Vec<sahom::linalg::Matrix>)> {
    arb_module(max_n, max_dim).prop_flat_map(|m| {
        let basis: Vec<_> = m.dims().iter().map(|&d| arb_invertible(d)).collect();
        (Just(m), basis)
    })
}
