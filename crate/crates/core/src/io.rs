//! File formats: map and diagram descriptions (TOML), complexes and reports
//! (JSON). Rationals are written as exact strings such as `"-3/4"`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::cylinder::{SemialgebraicMapDesc, ZigzagDiagramDesc};
use crate::error::{Error, Result};
use crate::homology::{HomologyBasis, SimplicialComplex};
use crate::parse::parse_formula;
use crate::raster::{CubicalSet, MembershipMode};
use crate::poly::{fmt_rational, parse_rational, Rational};
use crate::simpreplace::NestedComplexes;
use crate::vars::VarList;

/// Serde helpers for a rational written as a string or an integer.
pub mod rational_str {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Str(String),
    }

    pub fn serialize<S: serde::Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(x))
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        use serde::de::Error as _;
        match Repr::deserialize(d)? {
            Repr::Int(i) => Ok(Rational::from_integer(i.into())),
            Repr::Str(s) => parse_rational(s.trim()).ok_or_else(|| D::Error::custom(format!("not an exact rational: `{s}`"))),
        }
    }
}

/// A map description file.
///
/// ```toml
/// k = 2
/// m = 2
/// phi_s = "x1^2 + x2^2 - 1 = 0"
/// phi_t = "y1^2 + y2^2 - 1 <= 0"
/// phi_f = "y1 - x1 = 0 and y2 - x2 = 0"
/// ```
///
/// `phi_s` is over `x1..xk`, `phi_t` over `y1..ym` and `phi_f` over both,
/// unless other names are given in `x_vars` and `y_vars`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDescFile {
    pub k: usize,
    pub m: usize,
    pub phi_s: String,
    pub phi_t: String,
    pub phi_f: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_vars: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_vars: Option<Vec<String>>,
}

fn names(given: &Option<Vec<String>>, prefix: &str, n: usize) -> Result<VarList> {
    match given {
        None => Ok(VarList::numbered(prefix, n)),
        Some(v) if v.len() == n => Ok(VarList::new(v.iter().map(String::as_str))),
        Some(v) => Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        }),
    }
}

impl MapDescFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_desc(&self) -> Result<SemialgebraicMapDesc> {
        let xs = names(&self.x_vars, "x", self.k)?;
        let ys = names(&self.y_vars, "y", self.m)?;
        let xy = xs.concat(&ys);
        SemialgebraicMapDesc::new(
            self.k,
            self.m,
            parse_formula(&self.phi_s, &xs)?,
            parse_formula(&self.phi_t, &ys)?,
            parse_formula(&self.phi_f, &xy)?,
        )
    }
}

/// A zigzag diagram file: `k`, the `n + 1` set formulas `phi` over
/// `x1..xk` and the `n` graph formulas `psi` over `x1..xk, y1..yk`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramFile {
    pub k: usize,
    pub phi: Vec<String>,
    pub psi: Vec<String>,
}

impl DiagramFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_desc(&self) -> Result<ZigzagDiagramDesc> {
        let xs = VarList::numbered("x", self.k);
        let xy = xs.concat(&VarList::numbered("y", self.k));
        let phi = self.phi.iter().map(|t| parse_formula(t, &xs)).collect::<Result<Vec<_>>>()?;
        let psi = self.psi.iter().map(|t| parse_formula(t, &xy)).collect::<Result<Vec<_>>>()?;
        ZigzagDiagramDesc::new(self.k, phi, psi)
    }
}

/// A complex as vertex coordinates plus maximal simplices given by vertex
/// positions, with optional named subcomplexes in the same vertex numbering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexFile {
    pub vertices: Vec<Vec<u64>>,
    pub simplices: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub subcomplexes: BTreeMap<String, Vec<Vec<usize>>>,
}

/// Assigns stable vertex ids to coordinate tuples across several files.
#[derive(Default, Debug)]
pub struct VertexInterner {
    ids: HashMap<Vec<u64>, u64>,
    coords: Vec<Vec<u64>>,
}

impl VertexInterner {
    pub fn id(&mut self, c: &[u64]) -> u64 {
        if let Some(&i) = self.ids.get(c) {
            return i;
        }
        let i = self.coords.len() as u64;
        self.ids.insert(c.to_vec(), i);
        self.coords.push(c.to_vec());
        i
    }

    pub fn coords(&self, id: u64) -> &[u64] {
        &self.coords[id as usize]
    }
}

impl ComplexFile {
    /// Writes a complex whose vertex ids decode to coordinates via `coords`.
    pub fn from_complex(k: &SimplicialComplex, coords: &dyn Fn(u64) -> Vec<u64>) -> Self {
        let ids = k.vertices();
        let pos: HashMap<u64, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        ComplexFile {
            vertices: ids.iter().map(|&v| coords(v)).collect(),
            simplices: k
                .maximal_simplices()
                .iter()
                .map(|s| s.iter().map(|v| pos[v]).collect())
                .collect(),
            subcomplexes: BTreeMap::new(),
        }
    }

    pub fn from_nested(n: &NestedComplexes) -> Self {
        let coords = |v: u64| n.vertex_coords(v);
        let mut f = ComplexFile::from_complex(&n.complex, &coords);
        let ids = n.complex.vertices();
        let pos: HashMap<u64, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        for (name, sub) in n.names.iter().zip(&n.subcomplexes) {
            f.subcomplexes.insert(
                name.clone(),
                sub.maximal_simplices()
                    .iter()
                    .map(|s| s.iter().map(|v| pos[v]).collect())
                    .collect(),
            );
        }
        f
    }

    fn build(&self, simplices: &[Vec<usize>], interner: &mut VertexInterner) -> Result<SimplicialComplex> {
        let mut out = Vec::with_capacity(simplices.len());
        for s in simplices {
            let mut ids = Vec::with_capacity(s.len());
            for &v in s {
                let c = self
                    .vertices
                    .get(v)
                    .ok_or_else(|| Error::Format(format!("vertex index {v} out of range")))?;
                ids.push(interner.id(c));
            }
            out.push(ids);
        }
        SimplicialComplex::from_maximal(out)
    }

    pub fn to_complex(&self, interner: &mut VertexInterner) -> Result<SimplicialComplex> {
        for v in &self.vertices {
            interner.id(v);
        }
        self.build(&self.simplices, interner)
    }

    pub fn subcomplex(&self, name: &str, interner: &mut VertexInterner) -> Result<SimplicialComplex> {
        let s = self
            .subcomplexes
            .get(name)
            .ok_or_else(|| Error::Format(format!("no subcomplex named `{name}`")))?;
        self.build(s, interner)
    }
}

/// A rasterized set: the grid and the occupied cell indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellsFile {
    pub res: u32,
    pub mode: MembershipMode,
    /// `[lo, hi]` per axis, as exact rationals.
    pub bbox: Vec<[String; 2]>,
    pub cells: Vec<Vec<u32>>,
}

impl CellsFile {
    pub fn from_set(c: &CubicalSet) -> Self {
        let g = c.grid();
        CellsFile {
            res: g.res(),
            mode: g.mode(),
            bbox: g
                .bbox()
                .axes()
                .iter()
                .map(|iv| [fmt_rational(&iv.lo), fmt_rational(&iv.hi)])
                .collect(),
            cells: c.cells().cloned().collect(),
        }
    }
}

/// A chain as `(simplex vertices, coefficient)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainTerm {
    pub simplex: Vec<Vec<u64>>,
    pub coefficient: String,
}

pub fn chain_terms(k: &SimplicialComplex, b: &HomologyBasis, coords: &dyn Fn(u64) -> Vec<u64>) -> Vec<Vec<ChainTerm>> {
    b.cycles
        .iter()
        .map(|z| {
            z.entries()
                .iter()
                .map(|(j, c)| ChainTerm {
                    simplex: k.simplices(b.dim)[*j].iter().map(|&v| coords(v)).collect(),
                    coefficient: fmt_rational(c),
                })
                .collect()
        })
        .collect()
}

pub fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}
