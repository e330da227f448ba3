//! Simplicial replacements of tuples of sets: rasterize each set on a common
//! grid, optionally collapse, and triangulate so that every set becomes a
//! subcomplex of one ambient complex.

use std::sync::Arc;

use crate::compiled::BoxPredicate;
use crate::cubical::{vertex_coords, CubicalComplex};
use crate::cylinder::PrismDesc;
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::homology::SimplicialComplex;
use crate::raster::{rasterize, rasterize_predicate, rasterize_prism, CubicalSet, GridSpec};

/// A set to rasterize.
#[derive(Clone)]
pub enum SetDesc {
    Formula(Formula),
    Predicate(Arc<dyn BoxPredicate>),
    Prism(PrismDesc),
    /// Rasterized as the union of the member rasters.
    Union(Vec<SetDesc>),
    Cells(CubicalSet),
}

impl std::fmt::Debug for SetDesc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SetDesc::Formula(x) => write!(f, "Formula({x:?})"),
            SetDesc::Predicate(p) => write!(f, "Predicate(arity {})", p.arity()),
            SetDesc::Prism(p) => write!(f, "Prism({p:?})"),
            SetDesc::Union(m) => f.debug_tuple("Union").field(m).finish(),
            SetDesc::Cells(c) => write!(f, "Cells({})", c.len()),
        }
    }
}

pub fn rasterize_desc(d: &SetDesc, grid: &GridSpec) -> Result<CubicalSet> {
    match d {
        SetDesc::Formula(f) => rasterize(f, grid),
        SetDesc::Predicate(p) => rasterize_predicate(p.as_ref(), grid),
        SetDesc::Prism(p) => rasterize_prism(p, grid),
        SetDesc::Union(members) => {
            let mut acc = CubicalSet::empty(grid.clone());
            for m in members {
                acc = acc.union(&rasterize_desc(m, grid)?)?;
            }
            Ok(acc)
        }
        SetDesc::Cells(c) => {
            if c.grid().bbox() != grid.bbox() || c.grid().res() != grid.res() {
                return Err(Error::Shape("precomputed cells lie on another grid".into()));
            }
            Ok(c.clone())
        }
    }
}

/// An ambient complex with named subcomplexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestedComplexes {
    pub dim: usize,
    pub res: u32,
    pub complex: SimplicialComplex,
    pub names: Vec<String>,
    pub subcomplexes: Vec<SimplicialComplex>,
}

impl NestedComplexes {
    /// Grid point (in `0..=res` per axis) of a vertex id.
    pub fn vertex_coords(&self, id: u64) -> Vec<u64> {
        vertex_coords(id, self.dim, self.res)
    }

    pub fn get(&self, name: &str) -> Option<&SimplicialComplex> {
        self.names.iter().position(|n| n == name).map(|i| &self.subcomplexes[i])
    }

    /// Every subcomplex is a subcomplex of the ambient complex.
    pub fn is_nested(&self) -> bool {
        self.subcomplexes.iter().all(|s| s.is_subcomplex_of(&self.complex))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ReplaceOptions {
    /// Collapse free faces shared by the same sets before triangulating.
    pub collapse: bool,
}

impl Default for ReplaceOptions {
    fn default() -> Self {
        ReplaceOptions { collapse: true }
    }
}

/// The Kuhn triangulation of a cubical set.
pub fn triangulate(c: &CubicalSet) -> Result<SimplicialComplex> {
    if c.is_empty() {
        return Ok(SimplicialComplex::empty());
    }
    let cc = CubicalComplex::from_sets(&[c])?;
    SimplicialComplex::from_maximal(cc.triangulate(None))
}

/// Nested complexes for already rasterized sets on a common grid.
pub fn replace_sets(sets: &[CubicalSet], names: &[String], opts: ReplaceOptions) -> Result<NestedComplexes> {
    if sets.len() != names.len() {
        return Err(Error::Shape("one name per set is required".into()));
    }
    let Some(first) = sets.first() else {
        return Err(Error::Shape("empty tuple".into()));
    };
    let grid = first.grid().clone();
    let mut out = NestedComplexes {
        dim: grid.dim(),
        res: grid.res(),
        complex: SimplicialComplex::empty(),
        names: names.to_vec(),
        subcomplexes: vec![SimplicialComplex::empty(); sets.len()],
    };
    if sets.iter().all(CubicalSet::is_empty) {
        return Ok(out);
    }
    let refs: Vec<&CubicalSet> = sets.iter().collect();
    let mut cc = CubicalComplex::from_sets(&refs)?;
    if opts.collapse {
        cc.collapse();
    }
    out.complex = SimplicialComplex::from_maximal(cc.triangulate(None))?;
    for (i, s) in sets.iter().enumerate() {
        if !s.is_empty() {
            out.subcomplexes[i] = SimplicialComplex::from_maximal(cc.triangulate(Some(i)))?;
        }
    }
    Ok(out)
}

/// Rasterizes and triangulates a tuple of sets over one grid.
pub fn replace_tuple(fs: &[SetDesc], names: &[String], grid: &GridSpec, opts: ReplaceOptions) -> Result<NestedComplexes> {
    let sets = fs.iter().map(|f| rasterize_desc(f, grid)).collect::<Result<Vec<_>>>()?;
    replace_sets(&sets, names, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::betti_numbers;
    use crate::parse::parse_formula;
    use crate::poly::int;
    use crate::raster::MembershipMode;
    use crate::vars::VarList;

    fn f2(text: &str) -> Formula {
        parse_formula(text, &VarList::new(["x", "y"])).unwrap()
    }

    #[test]
    fn unit_circle_ring_has_one_loop() {
        let g = GridSpec::cube(2, &int(2), 16, MembershipMode::Outer).unwrap();
        let c = rasterize(&f2("x^2 + y^2 - 1 = 0"), &g).unwrap();
        let k = triangulate(&c).unwrap();
        assert_eq!(betti_numbers(&k, 2), vec![1, 1, 0]);
    }

    #[test]
    fn singleton_tuple() {
        let g = GridSpec::cube(2, &int(2), 8, MembershipMode::Outer).unwrap();
        for collapse in [false, true] {
            let n = replace_tuple(&[SetDesc::Formula(f2("x^2 + y^2 - 1 <= 0"))], &["disk".into()], &g, ReplaceOptions { collapse }).unwrap();
            assert_eq!(n.subcomplexes[0], n.complex);
            assert_eq!(betti_numbers(&n.complex, 1), vec![1, 0]);
        }
    }

    #[test]
    fn conjunction_and_union_nest() {
        let g = GridSpec::cube(2, &int(2), 16, MembershipMode::Outer).unwrap();
        let disk = f2("x^2 + y^2 - 1 <= 0");
        let circle = Formula::and(vec![disk.clone(), f2("x^2 + y^2 - 1 >= 0")]);
        let right = f2("x - 1 >= 0 and x - 3/2 <= 0 and y^2 - 1/4 <= 0");
        let fs = vec![
            SetDesc::Formula(disk.clone()),
            SetDesc::Formula(circle),
            SetDesc::Union(vec![SetDesc::Formula(disk), SetDesc::Formula(right)]),
        ];
        let names: Vec<String> = ["disk", "circle", "both"].map(String::from).to_vec();
        let raw = replace_tuple(&fs, &names, &g, ReplaceOptions { collapse: false }).unwrap();
        let col = replace_tuple(&fs, &names, &g, ReplaceOptions { collapse: true }).unwrap();
        for n in [&raw, &col] {
            assert!(n.is_nested());
            assert!(n.subcomplexes[1].is_subcomplex_of(&n.subcomplexes[0]));
            assert!(n.subcomplexes[0].is_subcomplex_of(&n.subcomplexes[2]));
            assert_eq!(betti_numbers(&n.subcomplexes[0], 1), vec![1, 0]);
            assert_eq!(betti_numbers(&n.subcomplexes[1], 1), vec![1, 1]);
        }
        assert!(col.complex.total_count() < raw.complex.total_count());
    }
}
