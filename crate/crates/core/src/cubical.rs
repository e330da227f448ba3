//! Cubical complexes of grid cells, signature-preserving collapses, and the
//! Kuhn triangulation.
//!
//! Elementary cubes are addressed in doubled coordinates: along each axis an
//! odd coordinate `2c + 1` is the interval of cell `c` and an even coordinate
//! `2c` is the grid line at its lower end. Every cube carries a bitmask, its
//! signature, of the input sets whose closure contains it.
//!
//! A free pair `(σ, τ)` is removed only when both have the same signature.
//! Then every input set either contains both (and the removal is an
//! elementary collapse of that set too) or neither, so all sets keep their
//! homotopy types and the inclusions among them commute with the collapses.

use std::collections::VecDeque;

use itertools::Itertools;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::homology::Simplex;
use crate::raster::CubicalSet;

/// At most this many member sets per complex.
pub const MAX_MEMBERS: usize = 64;

#[derive(Clone, Debug)]
pub struct CubicalComplex {
    dim: usize,
    res: u32,
    /// `(2 res + 1)^v` for each axis.
    radix: Vec<u64>,
    keys: Vec<u64>,
    sigs: Vec<u64>,
    alive: Vec<bool>,
    index: FxHashMap<u64, u32>,
    members: usize,
}

impl CubicalComplex {
    /// The closed cubical complex of the union of `sets`, all on one grid.
    pub fn from_sets(sets: &[&CubicalSet]) -> Result<Self> {
        let Some(first) = sets.first() else {
            return Err(Error::Shape("no sets to combine".into()));
        };
        if sets.len() > MAX_MEMBERS {
            return Err(Error::Shape(format!("at most {MAX_MEMBERS} sets per complex")));
        }
        let grid = first.grid();
        if sets.iter().any(|s| s.grid().bbox() != grid.bbox() || s.grid().res() != grid.res()) {
            return Err(Error::Shape("sets lie on different grids".into()));
        }
        let (dim, res) = (grid.dim(), grid.res());
        let base = 2 * res as u64 + 1;
        let mut radix = Vec::with_capacity(dim);
        let mut r: u64 = 1;
        for _ in 0..dim {
            radix.push(r);
            r = r
                .checked_mul(base)
                .ok_or_else(|| Error::Config(format!("grid {res}^{dim} is too large to index")))?;
        }
        let offsets: Vec<Vec<i64>> = (0..dim).map(|_| [-1i64, 0, 1]).multi_cartesian_product().collect();
        let mut top: FxHashMap<u64, u64> = FxHashMap::default();
        for (m, set) in sets.iter().enumerate() {
            for cell in set.cells() {
                let key: u64 = cell.iter().zip(&radix).map(|(&c, r)| (2 * c as u64 + 1) * r).sum();
                *top.entry(key).or_default() |= 1 << m;
            }
        }
        let mut faces: Vec<(u64, u64)> = Vec::with_capacity(top.len() * offsets.len().min(1 << 12));
        for (&key, &sig) in &top {
            for off in &offsets {
                let k = off
                    .iter()
                    .zip(&radix)
                    .fold(key as i64, |acc, (&o, &r)| acc + o * r as i64);
                faces.push((k as u64, sig));
            }
        }
        faces.sort_unstable_by_key(|f| f.0);
        let mut keys = Vec::with_capacity(faces.len() / 4);
        let mut sigs: Vec<u64> = Vec::with_capacity(faces.len() / 4);
        for (k, s) in faces {
            if keys.last() == Some(&k) {
                *sigs.last_mut().unwrap() |= s;
            } else {
                keys.push(k);
                sigs.push(s);
            }
        }
        let index = keys.iter().enumerate().map(|(i, &k)| (k, i as u32)).collect();
        Ok(CubicalComplex {
            dim,
            res,
            radix,
            alive: vec![true; keys.len()],
            keys,
            sigs,
            index,
            members: sets.len(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn members(&self) -> usize {
        self.members
    }

    fn coords(&self, key: u64) -> Vec<u64> {
        let base = 2 * self.res as u64 + 1;
        (0..self.dim).map(|v| key / self.radix[v] % base).collect()
    }

    fn cube_dim(&self, key: u64) -> usize {
        self.coords(key).iter().filter(|&&c| c % 2 == 1).count()
    }

    /// Number of alive cubes per dimension.
    pub fn counts(&self) -> Vec<usize> {
        let mut out = vec![0; self.dim + 1];
        for (i, &k) in self.keys.iter().enumerate() {
            if self.alive[i] {
                out[self.cube_dim(k)] += 1;
            }
        }
        out
    }

    pub fn alive_count(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    fn facets(&self, key: u64) -> Vec<u32> {
        let c = self.coords(key);
        let mut out = Vec::with_capacity(2 * self.dim);
        for v in (0..self.dim).filter(|&v| c[v] % 2 == 1) {
            out.push(self.index[&(key - self.radix[v])]);
            out.push(self.index[&(key + self.radix[v])]);
        }
        out
    }

    fn cofaces(&self, key: u64) -> Vec<u32> {
        let c = self.coords(key);
        let top = 2 * self.res as u64;
        let mut out = Vec::with_capacity(2 * self.dim);
        for v in (0..self.dim).filter(|&v| c[v].is_multiple_of(2)) {
            if c[v] > 0 {
                out.extend(self.index.get(&(key - self.radix[v])));
            }
            if c[v] < top {
                out.extend(self.index.get(&(key + self.radix[v])));
            }
        }
        out
    }

    /// Removes free pairs with equal signatures until none is left.
    /// Returns the number of pairs removed.
    pub fn collapse(&mut self) -> usize {
        let n = self.keys.len();
        let mut cnt = vec![0u32; n];
        for i in 0..n {
            if self.alive[i] {
                for f in self.facets(self.keys[i]) {
                    cnt[f as usize] += 1;
                }
            }
        }
        let mut queue: VecDeque<u32> = (0..n as u32).filter(|&i| self.alive[i as usize] && cnt[i as usize] == 1).collect();
        let mut removed = 0;
        while let Some(s) = queue.pop_front() {
            let s = s as usize;
            if !self.alive[s] || cnt[s] != 1 {
                continue;
            }
            let Some(t) = self.cofaces(self.keys[s]).into_iter().find(|&t| self.alive[t as usize]) else {
                continue;
            };
            let t = t as usize;
            if self.sigs[s] != self.sigs[t] {
                continue;
            }
            self.alive[s] = false;
            self.alive[t] = false;
            removed += 1;
            for f in self.facets(self.keys[t]) {
                let f = f as usize;
                cnt[f] -= 1;
                if self.alive[f] && cnt[f] == 1 {
                    queue.push_back(f as u32);
                }
            }
            for f in self.facets(self.keys[s]) {
                let f = f as usize;
                cnt[f] -= 1;
                if self.alive[f] && cnt[f] == 1 {
                    queue.push_back(f as u32);
                }
            }
        }
        removed
    }

    /// Alive cubes of member `m` (all alive cubes when `None`) that are not a
    /// face of another such cube.
    fn maximal_cubes(&self, m: Option<usize>) -> Vec<u64> {
        let inside = |i: usize| self.alive[i] && m.is_none_or(|m| self.sigs[i] >> m & 1 == 1);
        (0..self.keys.len())
            .filter(|&i| inside(i) && !self.cofaces(self.keys[i]).into_iter().any(|t| inside(t as usize)))
            .map(|i| self.keys[i])
            .collect()
    }

    /// Lattice vertex id of grid point `p` (coordinates in `0..=res`).
    pub fn vertex_id(&self, p: &[u64]) -> u64 {
        let base = self.res as u64 + 1;
        p.iter().rev().fold(0, |acc, &c| acc * base + c)
    }

    /// Grid point of a vertex id.
    pub fn vertex_coords(&self, id: u64) -> Vec<u64> {
        vertex_coords(id, self.dim, self.res)
    }

    fn kuhn(&self, key: u64, out: &mut Vec<Simplex>) {
        let c = self.coords(key);
        let base: Vec<u64> = c.iter().map(|&x| x / 2).collect();
        let free: Vec<usize> = (0..self.dim).filter(|&v| c[v] % 2 == 1).collect();
        if free.is_empty() {
            out.push(vec![self.vertex_id(&base)]);
            return;
        }
        for perm in free.iter().copied().permutations(free.len()) {
            let mut p = base.clone();
            let mut s = vec![self.vertex_id(&p)];
            for v in perm {
                p[v] += 1;
                s.push(self.vertex_id(&p));
            }
            s.sort_unstable();
            out.push(s);
        }
    }

    /// Maximal simplices of the Kuhn triangulation of member `m`, or of the
    /// whole complex.
    pub fn triangulate(&self, m: Option<usize>) -> Vec<Simplex> {
        let mut out = Vec::new();
        for key in self.maximal_cubes(m) {
            self.kuhn(key, &mut out);
        }
        out.sort();
        out
    }
}

pub fn vertex_coords(id: u64, dim: usize, res: u32) -> Vec<u64> {
    let base = res as u64 + 1;
    let mut x = id;
    (0..dim)
        .map(|_| {
            let c = x % base;
            x /= base;
            c
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::{betti_numbers, SimplicialComplex};
    use crate::poly::int;
    use crate::raster::{GridSpec, MembershipMode};

    fn set(dim: usize, res: u32, cells: &[&[u32]]) -> CubicalSet {
        let g = GridSpec::cube(dim, &int(1), res, MembershipMode::Outer).unwrap();
        CubicalSet::from_cells(g, cells.iter().map(|c| c.to_vec())).unwrap()
    }

    fn ring(res: u32) -> CubicalSet {
        let mut cells = Vec::new();
        for i in 0..res {
            for j in 0..res {
                if i == 0 || j == 0 || i == res - 1 || j == res - 1 {
                    cells.push(vec![i, j]);
                }
            }
        }
        let g = GridSpec::cube(2, &int(1), res, MembershipMode::Outer).unwrap();
        CubicalSet::from_cells(g, cells).unwrap()
    }

    #[test]
    fn single_cells_triangulate_to_factorial_simplices() {
        let c2 = CubicalComplex::from_sets(&[&set(2, 2, &[&[0, 0]])]).unwrap();
        let t = c2.triangulate(None);
        assert_eq!(t.len(), 2);
        let k = SimplicialComplex::from_maximal(&t).unwrap();
        assert_eq!(k.count(0), 4);
        let c3 = CubicalComplex::from_sets(&[&set(3, 2, &[&[1, 0, 1]])]).unwrap();
        assert_eq!(c3.triangulate(None).len(), 6);
        assert_eq!(c3.counts(), vec![8, 12, 6, 1]);
    }

    #[test]
    fn adjacent_cells_share_their_edge() {
        let c = CubicalComplex::from_sets(&[&set(2, 2, &[&[0, 0], &[1, 0]])]).unwrap();
        let k = SimplicialComplex::from_maximal(c.triangulate(None)).unwrap();
        assert_eq!((k.count(0), k.count(1), k.count(2)), (6, 9, 4));
        assert_eq!(k.euler_characteristic(), 1);
    }

    #[test]
    fn collapse_keeps_homotopy_type() {
        let r = ring(8);
        let mut c = CubicalComplex::from_sets(&[&r]).unwrap();
        let before = SimplicialComplex::from_maximal(c.triangulate(None)).unwrap();
        assert!(c.collapse() > 0);
        let after = SimplicialComplex::from_maximal(c.triangulate(None)).unwrap();
        assert_eq!(betti_numbers(&before, 2), vec![1, 1, 0]);
        assert_eq!(betti_numbers(&after, 2), vec![1, 1, 0]);
        assert!(after.total_count() < before.total_count());
        assert_eq!(c.counts()[2], 0);
    }

    #[test]
    fn collapse_respects_members() {
        // A filled square containing a ring: the ring must survive as a
        // subcomplex with its loop, while the square contracts.
        let full = {
            let g = GridSpec::cube(2, &int(1), 4, MembershipMode::Outer).unwrap();
            CubicalSet::from_cells(g, (0..4).flat_map(|i| (0..4).map(move |j| vec![i, j]))).unwrap()
        };
        let r = ring(4);
        let mut c = CubicalComplex::from_sets(&[&full, &r]).unwrap();
        c.collapse();
        let k = SimplicialComplex::from_maximal(c.triangulate(None)).unwrap();
        let sub = SimplicialComplex::from_maximal(c.triangulate(Some(1))).unwrap();
        assert!(sub.is_subcomplex_of(&k));
        assert_eq!(betti_numbers(&k, 1), vec![1, 0]);
        assert_eq!(betti_numbers(&sub, 1), vec![1, 1]);
    }

    #[test]
    fn vertex_ids_round_trip() {
        let c = CubicalComplex::from_sets(&[&set(3, 4, &[&[1, 2, 3]])]).unwrap();
        let id = c.vertex_id(&[1, 4, 2]);
        assert_eq!(c.vertex_coords(id), vec![1, 4, 2]);
    }
}
