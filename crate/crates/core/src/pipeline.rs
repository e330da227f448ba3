//! End-to-end pipelines: homology of a map through its mapping cylinder, and
//! zigzag modules and barcodes of diagrams through the zigzag cylinder.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closedify::{default_eta, InfinitesimalLadder, RelaxedFormula};
use crate::compiled::BoxPredicate;
use crate::cylinder::{build_zigzag_cyl, map_cylinder, Piece, SemialgebraicMapDesc, ZigzagDiagramDesc};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::homology::{homology_basis, induced_inclusion_with, HomologyBasis, HomologyCoordinates, SimplicialComplex};
use crate::interval::{Interval, IntervalBox};
use crate::io::{chain_terms, rational_str, ChainTerm};
use crate::linalg::Matrix;
use crate::poly::{fmt_rational, Rational};
use crate::raster::{rasterize_predicate, rasterize_prism, CubicalSet, GridSpec, MembershipMode};
use crate::simpreplace::{replace_sets, NestedComplexes, ReplaceOptions};
use crate::zigzag::{arrow_ends, barcode, validate_barcode, Barcode, BarcodeReport, ZigzagModule};

/// Settings shared by the pipelines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Largest homology dimension reported.
    pub max_dim: usize,
    /// Grid cells per axis (a power of two).
    pub res: u32,
    /// Half-width of the box for the set coordinates.
    #[serde(with = "rational_str")]
    pub radius: Rational,
    /// Base of the threshold ladder used to close formulas.
    #[serde(with = "rational_str")]
    pub eta: Rational,
    pub mode: MembershipMode,
    /// Collapse the cubical complexes before triangulating.
    pub collapse: bool,
    /// Recompute Betti numbers at twice the resolution and at `eta^2`.
    pub stability: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            max_dim: 2,
            res: 16,
            radius: Rational::from_integer(2.into()),
            eta: default_eta(),
            mode: MembershipMode::Outer,
            collapse: true,
            stability: true,
            out: None,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: PipelineConfig = toml::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.res < 2 || !self.res.is_power_of_two() {
            return Err(Error::Config(format!("res must be a power of two >= 2, got {}", self.res)));
        }
        if !self.radius.is_positive() {
            return Err(Error::Config("radius must be positive".into()));
        }
        if !(self.eta.is_positive() && self.eta < Rational::one()) {
            return Err(Error::Config("eta must lie strictly between 0 and 1".into()));
        }
        Ok(())
    }

    fn warnings(&self, grid_dim: usize) -> Vec<String> {
        let mut w = Vec::new();
        if self.max_dim >= grid_dim {
            w.push(format!(
                "max_dim {} is at least the grid dimension {grid_dim}; higher groups vanish",
                self.max_dim
            ));
        }
        w
    }
}

/// One induced matrix with its rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapEntry {
    pub dim: usize,
    pub rank: usize,
    pub matrix: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisEntry {
    pub dim: usize,
    pub source: Vec<Vec<ChainTerm>>,
    pub target: Vec<Vec<ChainTerm>>,
}

/// Betti numbers and ranks recomputed with one parameter changed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityCheck {
    pub parameter: String,
    pub value: String,
    pub betti: Vec<Vec<usize>>,
    pub ranks: Vec<Vec<usize>>,
    pub stable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapReport {
    pub config: PipelineConfig,
    pub k: usize,
    pub m: usize,
    pub polynomials: usize,
    pub cells: BTreeMap<String, usize>,
    pub simplices: BTreeMap<String, usize>,
    pub betti_source: Vec<usize>,
    pub betti_target: Vec<usize>,
    pub maps: Vec<MapEntry>,
    pub bases: Vec<BasisEntry>,
    pub stability: Vec<StabilityCheck>,
    pub warnings: Vec<String>,
}

pub struct MapOutput {
    pub report: MapReport,
    pub complexes: NestedComplexes,
}

pub const TARGET_NAME: &str = "theta_prime";
pub const SOURCE_NAME: &str = "theta_double_prime";

fn closed_predicate(f: &Formula, polys: &[crate::poly::Polynomial], eta: &Rational, arity: usize) -> Result<Arc<dyn BoxPredicate>> {
    let ladder = InfinitesimalLadder::new(polys.len(), eta.clone())?;
    Ok(Arc::new(RelaxedFormula::new(f, polys, ladder, arity)?))
}

fn map_grid(desc: &SemialgebraicMapDesc, cfg: &PipelineConfig, res: u32) -> Result<GridSpec> {
    let r = &cfg.radius;
    let mut axes = vec![Interval::new(-r.clone(), r.clone()); desc.k + desc.m];
    axes.push(Interval::new(Rational::zero(), Rational::one()));
    GridSpec::new(IntervalBox::new(axes), res, cfg.mode)
}

struct Homology {
    betti: [Vec<usize>; 2],
    maps: Vec<MapEntry>,
    bases: Vec<(HomologyBasis, HomologyBasis)>,
}

fn map_homology(n: &NestedComplexes, max_dim: usize) -> Result<Homology> {
    let (target, source) = (&n.subcomplexes[0], &n.subcomplexes[1]);
    let per_dim: Vec<(HomologyBasis, HomologyBasis, Matrix)> = (0..=max_dim)
        .into_par_iter()
        .map(|i| {
            let bs = homology_basis(source, i);
            let bt = homology_basis(target, i);
            let coords = HomologyCoordinates::new(target, &bt);
            let m = induced_inclusion_with(source, target, i, &bs, &coords)?.matrix;
            Ok((bs, bt, m))
        })
        .collect::<Result<_>>()?;
    Ok(Homology {
        betti: [
            per_dim.iter().map(|p| p.0.betti()).collect(),
            per_dim.iter().map(|p| p.1.betti()).collect(),
        ],
        maps: per_dim
            .iter()
            .enumerate()
            .map(|(i, p)| MapEntry {
                dim: i,
                rank: p.2.rank(),
                matrix: p.2.clone(),
            })
            .collect(),
        bases: per_dim.into_iter().map(|p| (p.0, p.1)).collect(),
    })
}

/// Rasterizes the closed cylinder `Theta'` and its source slice `Theta''`
/// and triangulates them as a nested pair.
pub fn map_complexes(desc: &SemialgebraicMapDesc, cfg: &PipelineConfig, res: u32, eta: &Rational) -> Result<(NestedComplexes, [usize; 2], usize)> {
    let art = map_cylinder(desc)?;
    let qf = art.theta_qf()?;
    let t1 = art.theta_t1()?;
    // One polynomial set for both formulas, so the closed relaxation of the
    // slice is a sub-disjunction of that of the cylinder.
    let polys = t1.polynomials();
    let n = art.dim();
    let grid = map_grid(desc, cfg, res)?;
    let preds = [closed_predicate(qf, &polys, eta, n)?, closed_predicate(t1, &polys, eta, n)?];
    let sets: Vec<CubicalSet> = preds
        .par_iter()
        .map(|p| rasterize_predicate(p.as_ref(), &grid))
        .collect::<Result<_>>()?;
    let cells = [sets[0].len(), sets[1].len()];
    let nested = replace_sets(&sets, &[TARGET_NAME.into(), SOURCE_NAME.into()], ReplaceOptions { collapse: cfg.collapse })?;
    Ok((nested, cells, polys.len()))
}

fn square(x: &Rational) -> Rational {
    x * x
}

/// Homology of `f: S -> T`: bases of `H_i(S)`, `H_i(T)` and the matrices of
/// `H_i(f)` for `i <= max_dim`.
pub fn map_functor(desc: &SemialgebraicMapDesc, cfg: &PipelineConfig) -> Result<MapOutput> {
    cfg.validate()?;
    let (nested, cells, npolys) = map_complexes(desc, cfg, cfg.res, &cfg.eta)?;
    let h = map_homology(&nested, cfg.max_dim)?;
    let coords = |v: u64| nested.vertex_coords(v);
    let bases = h
        .bases
        .iter()
        .enumerate()
        .map(|(i, (bs, bt))| BasisEntry {
            dim: i,
            source: chain_terms(&nested.subcomplexes[1], bs, &coords),
            target: chain_terms(&nested.subcomplexes[0], bt, &coords),
        })
        .collect();
    let betti = vec![h.betti[0].clone(), h.betti[1].clone()];
    let ranks = vec![h.maps.iter().map(|m| m.rank).collect::<Vec<_>>()];
    let mut stability = Vec::new();
    if cfg.stability {
        let variants = [
            ("res".to_string(), (2 * cfg.res).to_string(), 2 * cfg.res, cfg.eta.clone()),
            ("eta".to_string(), fmt_rational(&square(&cfg.eta)), cfg.res, square(&cfg.eta)),
        ];
        for (parameter, value, res, eta) in variants {
            let (n2, _, _) = map_complexes(desc, cfg, res, &eta)?;
            let h2 = map_homology(&n2, cfg.max_dim)?;
            let b2 = vec![h2.betti[0].clone(), h2.betti[1].clone()];
            let r2 = vec![h2.maps.iter().map(|m| m.rank).collect::<Vec<_>>()];
            stability.push(StabilityCheck {
                parameter,
                value,
                stable: b2 == betti && r2 == ranks,
                betti: b2,
                ranks: r2,
            });
        }
    }
    let mut warnings = cfg.warnings(desc.k + desc.m + 1);
    for s in stability.iter().filter(|s| !s.stable) {
        warnings.push(format!("homology changed with {} = {}", s.parameter, s.value));
    }
    let report = MapReport {
        config: cfg.clone(),
        k: desc.k,
        m: desc.m,
        polynomials: npolys,
        cells: [(TARGET_NAME.to_string(), cells[0]), (SOURCE_NAME.to_string(), cells[1])].into(),
        simplices: [
            (TARGET_NAME.to_string(), nested.subcomplexes[0].total_count()),
            (SOURCE_NAME.to_string(), nested.subcomplexes[1].total_count()),
        ]
        .into(),
        betti_source: h.betti[0].clone(),
        betti_target: h.betti[1].clone(),
        maps: h.maps,
        bases,
        stability,
        warnings,
    };
    Ok(MapOutput {
        report,
        complexes: nested,
    })
}

// ---------------------------------------------------------------------------
// Zigzags

fn zigzag_grid(d: &ZigzagDiagramDesc, cfg: &PipelineConfig, res: u32) -> Result<GridSpec> {
    let r = &cfg.radius;
    let mut axes = vec![Interval::new(-r.clone(), r.clone()); 2 * d.k];
    axes.push(Interval::new(Rational::zero(), Rational::from_integer((d.n as i64).into())));
    GridSpec::new(IntervalBox::new(axes), res, cfg.mode)
}

/// Rasterized pieces of the zigzag cylinder and the nested complexes of
/// `S~_0, ..., S~_n`.
pub struct ZigzagComplexes {
    pub labels: Vec<String>,
    pub piece_cells: Vec<usize>,
    pub set_cells: Vec<usize>,
    pub complexes: NestedComplexes,
}

pub fn zigzag_complexes(d: &ZigzagDiagramDesc, cfg: &PipelineConfig, res: u32, eta: &Rational) -> Result<ZigzagComplexes> {
    let zc = build_zigzag_cyl(d)?;
    let grid = zigzag_grid(d, cfg, res)?;
    let n = 2 * d.k + 1;
    let pieces: Vec<CubicalSet> = zc
        .pieces
        .par_iter()
        .map(|p| match p {
            Piece::Cylinder(art) => {
                let qf = art.theta_qf()?;
                let pred = closed_predicate(qf, &qf.polynomials(), eta, n)?;
                rasterize_predicate(pred.as_ref(), &grid)
            }
            Piece::Prism(prism) => rasterize_prism(prism, &grid),
        })
        .collect::<Result<_>>()?;
    let mut sets = Vec::with_capacity(d.n + 1);
    for members in &zc.members {
        let mut acc = CubicalSet::empty(grid.clone());
        for &m in members {
            acc = acc.union(&pieces[m])?;
        }
        sets.push(acc);
    }
    let names: Vec<String> = (0..=d.n).map(|i| format!("S{i}")).collect();
    let complexes = replace_sets(&sets, &names, ReplaceOptions { collapse: cfg.collapse })?;
    Ok(ZigzagComplexes {
        labels: zc.labels,
        piece_cells: pieces.iter().map(CubicalSet::len).collect(),
        set_cells: sets.iter().map(CubicalSet::len).collect(),
        complexes,
    })
}

/// The homology modules `H_i(S~_0) <- H_i(S~_1) -> ...` for `i <= max_dim`.
pub fn zigzag_modules(c: &NestedComplexes, max_dim: usize) -> Result<Vec<ZigzagModule>> {
    let subs = &c.subcomplexes;
    let n = subs.len() - 1;
    (0..=max_dim)
        .into_par_iter()
        .map(|i| {
            let bases: Vec<HomologyBasis> = subs.iter().map(|k| homology_basis(k, i)).collect();
            let coords: Vec<Option<HomologyCoordinates>> = subs
                .iter()
                .enumerate()
                .map(|(j, k)| (j % 2 == 0).then(|| HomologyCoordinates::new(k, &bases[j])))
                .collect();
            let arrows = (1..=n)
                .map(|j| {
                    let (s, t) = arrow_ends(j);
                    let coords = coords[t].as_ref().expect("arrows end at even indices");
                    Ok(induced_inclusion_with(&subs[s], &subs[t], i, &bases[s], coords)?.matrix)
                })
                .collect::<Result<Vec<_>>>()?;
            ZigzagModule::new(bases.iter().map(HomologyBasis::betti).collect(), arrows)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleEntry {
    pub dim: usize,
    pub module: ZigzagModule,
    pub ranks: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarcodeEntry {
    pub dim: usize,
    pub barcode: Barcode,
    pub validation: BarcodeReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZigzagReport {
    pub config: PipelineConfig,
    pub n: usize,
    pub k: usize,
    pub pieces: BTreeMap<String, usize>,
    pub cells: Vec<usize>,
    pub simplices: Vec<usize>,
    pub nested: bool,
    pub modules: Vec<ModuleEntry>,
    pub barcodes: Vec<BarcodeEntry>,
    pub stability: Vec<StabilityCheck>,
    pub warnings: Vec<String>,
}

pub struct ZigzagOutput {
    pub report: ZigzagReport,
    pub complexes: NestedComplexes,
}

fn summary(modules: &[ZigzagModule]) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    (
        modules.iter().map(|m| m.dims().to_vec()).collect(),
        modules.iter().map(|m| m.arrows().iter().map(Matrix::rank).collect()).collect(),
    )
}

/// Zigzag modules of a diagram, their barcodes and validation.
pub fn zigzag_functor(d: &ZigzagDiagramDesc, cfg: &PipelineConfig) -> Result<ZigzagOutput> {
    cfg.validate()?;
    let zc = zigzag_complexes(d, cfg, cfg.res, &cfg.eta)?;
    let c = &zc.complexes;
    let nested = (0..=d.n).all(|i| {
        let near = [i.wrapping_sub(1), i + 1];
        i % 2 == 1 || near.iter().filter(|&&j| j <= d.n).all(|&j| c.subcomplexes[j].is_subcomplex_of(&c.subcomplexes[i]))
    });
    let modules = zigzag_modules(c, cfg.max_dim)?;
    let (betti, ranks) = summary(&modules);
    let mut stability = Vec::new();
    if cfg.stability {
        let variants = [
            ("res".to_string(), (2 * cfg.res).to_string(), 2 * cfg.res, cfg.eta.clone()),
            ("eta".to_string(), fmt_rational(&square(&cfg.eta)), cfg.res, square(&cfg.eta)),
        ];
        for (parameter, value, res, eta) in variants {
            let z2 = zigzag_complexes(d, cfg, res, &eta)?;
            let (b2, r2) = summary(&zigzag_modules(&z2.complexes, cfg.max_dim)?);
            stability.push(StabilityCheck {
                parameter,
                value,
                stable: b2 == betti && r2 == ranks,
                betti: b2,
                ranks: r2,
            });
        }
    }
    let mut warnings = cfg.warnings(2 * d.k + 1);
    for s in stability.iter().filter(|s| !s.stable) {
        warnings.push(format!("homology changed with {} = {}", s.parameter, s.value));
    }
    let barcodes = modules
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let bc = barcode(m);
            BarcodeEntry {
                dim: i,
                validation: validate_barcode(m, &bc),
                barcode: bc,
            }
        })
        .collect();
    let report = ZigzagReport {
        config: cfg.clone(),
        n: d.n,
        k: d.k,
        pieces: zc.labels.iter().cloned().zip(zc.piece_cells.iter().copied()).collect(),
        cells: zc.set_cells.clone(),
        simplices: c.subcomplexes.iter().map(SimplicialComplex::total_count).collect(),
        nested,
        modules: modules
            .iter()
            .enumerate()
            .map(|(i, m)| ModuleEntry {
                dim: i,
                ranks: m.arrows().iter().map(Matrix::rank).collect(),
                module: m.clone(),
            })
            .collect(),
        barcodes,
        stability,
        warnings,
    };
    Ok(ZigzagOutput {
        report,
        complexes: zc.complexes,
    })
}

/// Barcodes per homology dimension.
pub fn zigzag_barcode(d: &ZigzagDiagramDesc, cfg: &PipelineConfig) -> Result<Vec<Barcode>> {
    Ok(zigzag_functor(d, cfg)?
        .report
        .barcodes
        .into_iter()
        .map(|b| b.barcode)
        .collect())
}
