//! Simplicial homology with rational coefficients.
//!
//! Boundary matrices are reduced column by column, each column's pivot being
//! its largest nonzero row. For a reduced `R = ∂V`, the columns of `V` at zero
//! columns of `R` span the cycles, and those whose simplex is not a pivot of
//! the next boundary matrix form a basis of homology.

use std::collections::{HashMap, HashSet};

use num_traits::One;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Reducer, SparseVec};
use crate::poly::Rational;

/// Sorted vertex ids.
pub type Simplex = Vec<u64>;

/// A finite abstract simplicial complex, face-closed, with simplices of each
/// dimension kept in sorted order.
#[derive(Clone, Debug, Default)]
pub struct SimplicialComplex {
    simplices: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.simplices == other.simplices
    }
}

impl Eq for SimplicialComplex {}

fn normalize(s: &[u64]) -> Result<Simplex> {
    let mut v = s.to_vec();
    v.sort_unstable();
    v.dedup();
    if v.is_empty() || v.len() != s.len() {
        return Err(Error::Format(format!("bad simplex {s:?}")));
    }
    Ok(v)
}

/// Faces of codimension one, in the order of the deleted vertex.
pub fn facets(s: &[u64]) -> impl Iterator<Item = Simplex> + '_ {
    (0..s.len()).map(move |k| {
        let mut f = s.to_vec();
        f.remove(k);
        f
    })
}

impl SimplicialComplex {
    pub fn empty() -> Self {
        SimplicialComplex::default()
    }

    /// The closure of the given simplices under taking faces.
    pub fn from_maximal<I, S>(simplices: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u64]>,
    {
        let mut levels: Vec<HashSet<Simplex>> = Vec::new();
        for s in simplices {
            let s = normalize(s.as_ref())?;
            let d = s.len() - 1;
            if levels.len() <= d {
                levels.resize_with(d + 1, HashSet::new);
            }
            levels[d].insert(s);
        }
        for d in (1..levels.len()).rev() {
            let faces: Vec<Simplex> = levels[d].iter().flat_map(|s| facets(s).collect::<Vec<_>>()).collect();
            levels[d - 1].extend(faces);
        }
        Ok(Self::from_levels(levels.into_iter().map(|l| l.into_iter().collect()).collect()))
    }

    /// Exactly the given simplices, which must be face-closed.
    pub fn from_simplices<I, S>(simplices: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u64]>,
    {
        let mut levels: Vec<Vec<Simplex>> = Vec::new();
        for s in simplices {
            let s = normalize(s.as_ref())?;
            let d = s.len() - 1;
            if levels.len() <= d {
                levels.resize_with(d + 1, Vec::new);
            }
            levels[d].push(s);
        }
        let k = Self::from_levels(levels);
        for d in 1..k.simplices.len() {
            for s in &k.simplices[d] {
                if let Some(f) = facets(s).find(|f| !k.contains(f)) {
                    return Err(Error::Format(format!("simplex {s:?} is missing its face {f:?}")));
                }
            }
        }
        Ok(k)
    }

    fn from_levels(mut levels: Vec<Vec<Simplex>>) -> Self {
        for l in &mut levels {
            l.sort_unstable();
            l.dedup();
        }
        while levels.last().is_some_and(Vec::is_empty) {
            levels.pop();
        }
        let index = levels
            .iter()
            .map(|l| l.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        SimplicialComplex {
            simplices: levels,
            index,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Top dimension; `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.simplices.len().checked_sub(1)
    }

    pub fn vertices(&self) -> Vec<u64> {
        self.simplices(0).iter().map(|s| s[0]).collect()
    }

    pub fn simplices(&self, d: usize) -> &[Simplex] {
        self.simplices.get(d).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, d: usize) -> usize {
        self.simplices(d).len()
    }

    pub fn total_count(&self) -> usize {
        self.simplices.iter().map(Vec::len).sum()
    }

    pub fn index_of(&self, s: &[u64]) -> Option<usize> {
        self.index.get(s.len().checked_sub(1)?)?.get(s).copied()
    }

    pub fn contains(&self, s: &[u64]) -> bool {
        self.index_of(s).is_some()
    }

    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.simplices.iter().flatten().all(|s| other.contains(s))
    }

    /// Simplices that are not a face of any other simplex.
    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        let faces: HashSet<Simplex> = self
            .simplices
            .iter()
            .skip(1)
            .flatten()
            .flat_map(|s| facets(s).collect::<Vec<_>>())
            .collect();
        let mut out: Vec<Simplex> = self.simplices.iter().flatten().filter(|s| !faces.contains(*s)).cloned().collect();
        out.sort();
        out
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .enumerate()
            .map(|(d, l)| if d % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) })
            .sum()
    }

    /// `∂` of the `j`-th `d`-simplex as a sparse column over `(d-1)`-simplices.
    pub fn boundary_column(&self, d: usize, j: usize) -> SparseVec {
        if d == 0 {
            return SparseVec::new();
        }
        let s = &self.simplices[d][j];
        let entries = facets(s)
            .enumerate()
            .map(|(k, f)| {
                let sign = if k % 2 == 0 { Rational::one() } else { -Rational::one() };
                (self.index[d - 1][&f], sign)
            })
            .collect();
        SparseVec::from_entries(entries)
    }

    pub fn boundary_columns(&self, d: usize) -> Vec<SparseVec> {
        (0..self.count(d)).map(|j| self.boundary_column(d, j)).collect()
    }
}

/// `∂_i: C_i -> C_{i-1}` as a dense matrix.
pub fn boundary_matrix(k: &SimplicialComplex, i: usize) -> Result<Matrix> {
    let max = k.dim().unwrap_or(0);
    if i == 0 || i > max {
        return Err(Error::DimensionOutOfRange { index: i, max });
    }
    Ok(Matrix::from_columns(k.count(i - 1), &k.boundary_columns(i)))
}

struct Reduced {
    /// Pivot rows of the nonzero reduced columns.
    pivots: HashSet<usize>,
    /// `V` columns of the zero reduced columns (when tracked).
    kernel: Vec<(usize, SparseVec)>,
}

/// Reduces `∂_d`, skipping the columns in `clear` (known to reduce to zero).
fn reduce_boundary(k: &SimplicialComplex, d: usize, clear: &HashSet<usize>, track: bool) -> Reduced {
    let mut reducer = Reducer::new();
    let mut pivots = HashSet::new();
    let mut kernel = Vec::new();
    for j in 0..k.count(d) {
        if clear.contains(&j) {
            continue;
        }
        let mut col = k.boundary_column(d, j);
        let mut tag = if track { SparseVec::unit(j) } else { SparseVec::new() };
        reducer.reduce(&mut col, &mut tag);
        match col.pivot() {
            Some(p) => {
                pivots.insert(p);
                reducer.insert(col, tag);
            }
            None => {
                if track {
                    kernel.push((j, tag));
                }
            }
        }
    }
    Reduced { pivots, kernel }
}

/// Betti numbers `β_0..β_max_dim`.
pub fn betti_numbers(k: &SimplicialComplex, max_dim: usize) -> Vec<usize> {
    let top = k.dim().map_or(0, |d| d + 1);
    let mut ranks = vec![0usize; top.max(max_dim + 2) + 1];
    let mut clear = HashSet::new();
    for d in (1..top).rev() {
        let r = reduce_boundary(k, d, &clear, false);
        ranks[d] = r.pivots.len();
        clear = r.pivots;
    }
    (0..=max_dim)
        .map(|i| k.count(i) - ranks[i] - ranks[i + 1])
        .collect()
}

/// Cycle representatives of a basis of `H_i`, as chains over `i`-simplices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HomologyBasis {
    pub dim: usize,
    pub cycles: Vec<SparseVec>,
}

impl HomologyBasis {
    pub fn betti(&self) -> usize {
        self.cycles.len()
    }
}

pub fn homology_basis(k: &SimplicialComplex, i: usize) -> HomologyBasis {
    let next = reduce_boundary(k, i + 1, &HashSet::new(), false);
    let cur = reduce_boundary(k, i, &next.pivots, true);
    HomologyBasis {
        dim: i,
        cycles: cur
            .kernel
            .into_iter()
            .filter(|(j, _)| !next.pivots.contains(j))
            .map(|(_, v)| v)
            .collect(),
    }
}

/// Coordinates of cycles with respect to a homology basis.
pub struct HomologyCoordinates {
    dim: usize,
    rank: usize,
    reducer: Reducer,
}

impl HomologyCoordinates {
    pub fn new(k: &SimplicialComplex, basis: &HomologyBasis) -> Self {
        let mut reducer = Reducer::new();
        for col in k.boundary_columns(basis.dim + 1) {
            reducer.insert(col, SparseVec::new());
        }
        for (j, z) in basis.cycles.iter().enumerate() {
            reducer.insert(z.clone(), SparseVec::unit(j));
        }
        HomologyCoordinates {
            dim: basis.dim,
            rank: basis.betti(),
            reducer,
        }
    }

    /// Coefficients `a` with `z = sum_j a_j * basis_j + boundary`.
    pub fn coordinates(&self, z: &SparseVec) -> Result<SparseVec> {
        self.reducer
            .express(z)
            .ok_or_else(|| Error::Internal(format!("chain is not a cycle in dimension {}", self.dim)))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

/// A linear map between homology groups in the given bases
/// (`codomain x domain`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InducedMap {
    pub dim: usize,
    pub matrix: Matrix,
}

fn assemble(images: &[SparseVec], coords: &HomologyCoordinates) -> Result<Matrix> {
    let cols = images
        .iter()
        .map(|z| coords.coordinates(z))
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_columns(coords.rank(), &cols))
}

/// The map `H_i(sub) -> H_i(k)` induced by inclusion.
pub fn induced_inclusion_map(
    sub: &SimplicialComplex,
    k: &SimplicialComplex,
    i: usize,
    b_sub: &HomologyBasis,
    b_k: &HomologyBasis,
) -> Result<InducedMap> {
    let coords = HomologyCoordinates::new(k, b_k);
    induced_inclusion_with(sub, k, i, b_sub, &coords)
}

/// As [`induced_inclusion_map`] with precomputed target coordinates.
pub fn induced_inclusion_with(
    sub: &SimplicialComplex,
    k: &SimplicialComplex,
    i: usize,
    b_sub: &HomologyBasis,
    coords: &HomologyCoordinates,
) -> Result<InducedMap> {
    let map: Vec<usize> = sub
        .simplices(i)
        .iter()
        .map(|s| {
            k.index_of(s)
                .ok_or_else(|| Error::NotSubcomplex(format!("simplex {s:?} is missing from the ambient complex")))
        })
        .collect::<Result<_>>()?;
    if !sub.is_subcomplex_of(k) {
        return Err(Error::NotSubcomplex("complex is not contained in the target".into()));
    }
    let images: Vec<SparseVec> = b_sub
        .cycles
        .iter()
        .map(|z| SparseVec::from_entries(z.entries().iter().map(|(j, c)| (map[*j], c.clone())).collect()))
        .collect();
    Ok(InducedMap {
        dim: i,
        matrix: assemble(&images, coords)?,
    })
}

/// The chain map of a vertex map on `i`-chains: degenerate images vanish,
/// others carry the sign of the sorting permutation.
pub fn chain_map(
    k: &SimplicialComplex,
    l: &SimplicialComplex,
    vmap: &HashMap<u64, u64>,
    i: usize,
    z: &SparseVec,
) -> Result<SparseVec> {
    let mut out = Vec::new();
    for (j, c) in z.entries() {
        let s = &k.simplices(i)[*j];
        let mut img: Vec<u64> = s
            .iter()
            .map(|v| vmap.get(v).copied().ok_or_else(|| Error::NotSimplicial(format!("vertex {v} is unmapped"))))
            .collect::<Result<_>>()?;
        let mut sign = 1i32;
        for a in 0..img.len() {
            for b in 0..img.len() - 1 - a {
                if img[b] > img[b + 1] {
                    img.swap(b, b + 1);
                    sign = -sign;
                }
            }
        }
        if img.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let idx = l
            .index_of(&img)
            .ok_or_else(|| Error::NotSimplicial(format!("image {img:?} of {s:?} is not a simplex")))?;
        let v = if sign > 0 { c.clone() } else { -c.clone() };
        out.push((idx, v));
    }
    Ok(SparseVec::from_entries(out))
}

fn check_simplicial(k: &SimplicialComplex, l: &SimplicialComplex, vmap: &HashMap<u64, u64>) -> Result<()> {
    for d in 0..=k.dim().unwrap_or(0) {
        for s in k.simplices(d) {
            let mut img = Vec::with_capacity(s.len());
            for v in s {
                img.push(*vmap.get(v).ok_or_else(|| Error::NotSimplicial(format!("vertex {v} is unmapped")))?);
            }
            img.sort_unstable();
            img.dedup();
            if !l.contains(&img) {
                return Err(Error::NotSimplicial(format!("image {img:?} of {s:?} is not a simplex")));
            }
        }
    }
    Ok(())
}

/// The map `H_i(k) -> H_i(l)` induced by a simplicial vertex map.
pub fn induced_simplicial_map(
    k: &SimplicialComplex,
    l: &SimplicialComplex,
    vmap: &HashMap<u64, u64>,
    i: usize,
    b_k: &HomologyBasis,
    b_l: &HomologyBasis,
) -> Result<InducedMap> {
    check_simplicial(k, l, vmap)?;
    let coords = HomologyCoordinates::new(l, b_l);
    let images = b_k
        .cycles
        .iter()
        .map(|z| chain_map(k, l, vmap, i, z))
        .collect::<Result<Vec<_>>>()?;
    Ok(InducedMap {
        dim: i,
        matrix: assemble(&images, &coords)?,
    })
}

/// `true` iff `∂z = 0`.
pub fn is_cycle(k: &SimplicialComplex, i: usize, z: &SparseVec) -> bool {
    let mut acc = SparseVec::new();
    for (j, c) in z.entries() {
        acc.axpy(c, &k.boundary_column(i, *j));
    }
    acc.is_zero()
}

/// Rank of a family of chains modulo `im ∂_{i+1}`.
pub fn rank_mod_boundaries(k: &SimplicialComplex, i: usize, chains: &[SparseVec]) -> usize {
    let mut r = Reducer::new();
    for col in k.boundary_columns(i + 1) {
        r.insert(col, SparseVec::new());
    }
    chains
        .iter()
        .filter(|z| r.insert((*z).clone(), SparseVec::new()))
        .count()
}

impl HomologyBasis {
    /// Checks the representatives are cycles, independent modulo boundaries.
    pub fn validate(&self, k: &SimplicialComplex) -> bool {
        self.cycles.iter().all(|z| is_cycle(k, self.dim, z))
            && rank_mod_boundaries(k, self.dim, &self.cycles) == self.cycles.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::int;
    use proptest::prelude::*;

    fn hollow(v: [u64; 3]) -> Vec<Vec<u64>> {
        vec![vec![v[0], v[1]], vec![v[1], v[2]], vec![v[0], v[2]]]
    }

    fn full_triangle() -> SimplicialComplex {
        SimplicialComplex::from_maximal([[0u64, 1, 2]]).unwrap()
    }

    fn torus() -> SimplicialComplex {
        let mut tris = Vec::new();
        for i in 0..7u64 {
            tris.push([i, (i + 1) % 7, (i + 3) % 7]);
            tris.push([i, (i + 2) % 7, (i + 3) % 7]);
        }
        SimplicialComplex::from_maximal(tris).unwrap()
    }

    fn sphere() -> SimplicialComplex {
        SimplicialComplex::from_maximal([[0u64, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]).unwrap()
    }

    /// Betti numbers from dense ranks, independently of the sparse reducer.
    fn dense_betti(k: &SimplicialComplex) -> Vec<usize> {
        let top = k.dim().unwrap();
        let rank = |i: usize| if i == 0 || i > top { 0 } else { boundary_matrix(k, i).unwrap().rank() };
        (0..=top).map(|i| k.count(i) - rank(i) - rank(i + 1)).collect()
    }

    #[test]
    fn edge_boundary() {
        let k = SimplicialComplex::from_maximal([[0u64, 1]]).unwrap();
        let m = boundary_matrix(&k, 1).unwrap();
        assert_eq!(m.column(0), vec![int(-1), int(1)]);
        assert!(boundary_matrix(&k, 2).is_err());
        assert!(boundary_matrix(&k, 0).is_err());
    }

    #[test]
    fn triangle_boundaries_compose_to_zero() {
        let k = full_triangle();
        let d1 = boundary_matrix(&k, 1).unwrap();
        let d2 = boundary_matrix(&k, 2).unwrap();
        assert!(d1.mul(&d2).unwrap().is_zero());
        for j in 0..d1.cols() {
            assert_eq!(d1.column(j).iter().sum::<Rational>(), int(0));
        }
    }

    #[test]
    fn circle_and_disk() {
        let c = SimplicialComplex::from_maximal(hollow([0, 1, 2])).unwrap();
        let b = homology_basis(&c, 1);
        assert_eq!(b.betti(), 1);
        assert!(b.validate(&c));
        assert_eq!(b.cycles[0].len(), 3);
        assert_eq!(betti_numbers(&c, 2), vec![1, 1, 0]);
        assert_eq!(homology_basis(&full_triangle(), 1).betti(), 0);
        assert_eq!(betti_numbers(&full_triangle(), 2), vec![1, 0, 0]);
    }

    #[test]
    fn torus_betti_numbers() {
        let t = torus();
        assert_eq!(t.count(1), 21);
        assert_eq!(dense_betti(&t), vec![1, 2, 1]);
        assert_eq!(betti_numbers(&t, 2), vec![1, 2, 1]);
        for i in 0..3 {
            let b = homology_basis(&t, i);
            assert_eq!(b.betti(), [1, 2, 1][i]);
            assert!(b.validate(&t));
        }
        assert_eq!(t.euler_characteristic(), 0);
    }

    #[test]
    fn face_closure_is_checked() {
        assert!(SimplicialComplex::from_simplices([vec![0u64, 1]]).is_err());
        assert!(SimplicialComplex::from_simplices([vec![0u64], vec![1], vec![0, 1]]).is_ok());
        assert!(SimplicialComplex::from_maximal([vec![1u64, 1]]).is_err());
    }

    #[test]
    fn maximal_simplices_of_a_closure() {
        let k = SimplicialComplex::from_maximal([vec![0u64, 1, 2], vec![2, 3], vec![5]]).unwrap();
        assert_eq!(k.maximal_simplices(), vec![vec![0, 1, 2], vec![2, 3], vec![5]]);
    }

    #[test]
    fn inclusion_maps() {
        let t = torus();
        let b = homology_basis(&t, 1);
        let id = induced_inclusion_map(&t, &t, 1, &b, &b).unwrap();
        assert_eq!(id.matrix, Matrix::identity(2));

        let c = SimplicialComplex::from_maximal(hollow([0, 1, 2])).unwrap();
        let d = full_triangle();
        let m = induced_inclusion_map(&c, &d, 1, &homology_basis(&c, 1), &homology_basis(&d, 1)).unwrap();
        assert_eq!((m.matrix.rows(), m.matrix.cols()), (0, 1));
        assert!(induced_inclusion_map(&d, &c, 1, &homology_basis(&d, 1), &homology_basis(&c, 1)).is_err());
    }

    #[test]
    fn two_circles_joined_by_an_edge() {
        let mut s = hollow([0, 1, 2]);
        s.extend(hollow([3, 4, 5]));
        let sub = SimplicialComplex::from_maximal(s.clone()).unwrap();
        s.push(vec![2, 3]);
        let k = SimplicialComplex::from_maximal(s).unwrap();
        let m = induced_inclusion_map(&sub, &k, 0, &homology_basis(&sub, 0), &homology_basis(&k, 0)).unwrap();
        assert_eq!(m.matrix, Matrix::from_rows(vec![vec![int(1), int(1)]]).unwrap());
        assert_eq!(m.matrix.rank(), 1);
    }

    #[test]
    fn simplicial_maps() {
        let c = SimplicialComplex::from_maximal(hollow([0, 1, 2])).unwrap();
        let b = homology_basis(&c, 1);
        let id: HashMap<u64, u64> = (0..3).map(|v| (v, v)).collect();
        assert_eq!(induced_simplicial_map(&c, &c, &id, 1, &b, &b).unwrap().matrix, Matrix::identity(1));
        let pt = SimplicialComplex::from_maximal([[7u64]]).unwrap();
        let to_pt: HashMap<u64, u64> = (0..3).map(|v| (v, 7)).collect();
        let m = induced_simplicial_map(&c, &pt, &to_pt, 1, &b, &homology_basis(&pt, 1)).unwrap();
        assert_eq!((m.matrix.rows(), m.matrix.cols()), (0, 1));
        let m0 = induced_simplicial_map(&c, &pt, &to_pt, 0, &homology_basis(&c, 0), &homology_basis(&pt, 0)).unwrap();
        assert_eq!(m0.matrix, Matrix::identity(1));
        // A reflection reverses the orientation of the circle.
        let flip: HashMap<u64, u64> = [(0, 1), (1, 0), (2, 2)].into();
        assert_eq!(
            induced_simplicial_map(&c, &c, &flip, 1, &b, &b).unwrap().matrix,
            Matrix::from_rows(vec![vec![int(-1)]]).unwrap()
        );
        let bad: HashMap<u64, u64> = (0..3).map(|v| (v, v + 10)).collect();
        assert!(induced_simplicial_map(&c, &c, &bad, 1, &b, &b).is_err());
    }

    proptest! {
        #[test]
        fn functoriality(f in prop::collection::vec(0u64..4, 7), g in prop::collection::vec(0u64..4, 4)) {
            let t = torus();
            let s = sphere();
            let fm: HashMap<u64, u64> = f.iter().enumerate().map(|(i, &v)| (i as u64, v)).collect();
            let gm: HashMap<u64, u64> = g.iter().enumerate().map(|(i, &v)| (i as u64, v)).collect();
            let gf: HashMap<u64, u64> = fm.iter().map(|(&a, b)| (a, gm[b])).collect();
            for i in 0..3 {
                let (bt, bs) = (homology_basis(&t, i), homology_basis(&s, i));
                let hf = induced_simplicial_map(&t, &s, &fm, i, &bt, &bs).unwrap().matrix;
                let hg = induced_simplicial_map(&s, &s, &gm, i, &bs, &bs).unwrap().matrix;
                let hgf = induced_simplicial_map(&t, &s, &gf, i, &bt, &bs).unwrap().matrix;
                prop_assert_eq!(hg.mul(&hf).unwrap(), hgf);
            }
        }

        #[test]
        fn random_complex_invariants(tris in prop::collection::vec((0u64..7, 0u64..7, 0u64..7), 1..12)) {
            let tris: Vec<Vec<u64>> = tris
                .into_iter()
                .map(|(a, b, c)| { let mut v = vec![a, b, c]; v.sort(); v.dedup(); v })
                .collect();
            let k = SimplicialComplex::from_maximal(tris).unwrap();
            let top = k.dim().unwrap();
            for i in 1..top {
                let d = boundary_matrix(&k, i).unwrap().mul(&boundary_matrix(&k, i + 1).unwrap()).unwrap();
                prop_assert!(d.is_zero());
            }
            let betti = betti_numbers(&k, top);
            prop_assert_eq!(&betti, &dense_betti(&k));
            let chi: i64 = betti.iter().enumerate().map(|(i, &b)| if i % 2 == 0 { b as i64 } else { -(b as i64) }).sum();
            prop_assert_eq!(chi, k.euler_characteristic());
            for i in 0..=top {
                let b = homology_basis(&k, i);
                prop_assert_eq!(b.betti(), betti[i]);
                prop_assert!(b.validate(&k));
                // rank-nullity for ∂_i
                let rank = if i == 0 { 0 } else { boundary_matrix(&k, i).unwrap().rank() };
                let kernel = k.count(i) - rank;
                prop_assert_eq!(kernel, b.betti() + if i < top { boundary_matrix(&k, i + 1).unwrap().rank() } else { 0 });
            }
        }
    }
}
