//! Grid rasterization of formulas into cubical sets.
//!
//! Cells are visited hierarchically: a box whose three-valued truth is
//! `False` is dropped with all its cells, a `True` box marks all its cells,
//! and `Unknown` boxes are split in half along every axis. Because interval
//! enclosures shrink on sub-boxes, the result is identical to testing every
//! cell separately.
//!
//! Box enclosures are exact. When every axis step divides the box corner,
//! polynomials are rescaled to integer coefficients over a lattice of
//! half-cells and evaluated in `i128`; any overflow falls back to rational
//! arithmetic for that polynomial.

use std::cell::RefCell;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::compiled::{BoxPredicate, FormulaPredicate, RangeQuery};
use crate::cylinder::PrismDesc;
use crate::error::{Error, Result};
use crate::formula::{Formula, Relation};
use crate::interval::{eval_interval, Interval, IntervalBox, Truth};
use crate::poly::{Polynomial, Rational};

/// How a cell's membership is decided.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MembershipMode {
    /// Marked unless interval evaluation proves the cell disjoint from the set.
    #[default]
    Outer,
    /// Marked iff the cell center satisfies the formula.
    Center,
}

impl std::str::FromStr for MembershipMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "outer" => Ok(MembershipMode::Outer),
            "center" => Ok(MembershipMode::Center),
            other => Err(Error::Config(format!("unknown membership mode `{other}`"))),
        }
    }
}

/// A box cut into `res` cells per axis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GridSpec {
    bbox: IntervalBox,
    res: u32,
    mode: MembershipMode,
}

impl GridSpec {
    pub fn new(bbox: IntervalBox, res: u32, mode: MembershipMode) -> Result<Self> {
        if res < 2 || !res.is_power_of_two() {
            return Err(Error::Config(format!("resolution must be a power of two >= 2, got {res}")));
        }
        if bbox.axes().iter().any(|a| a.lo >= a.hi) {
            return Err(Error::Config(format!("degenerate box {bbox}")));
        }
        Ok(GridSpec { bbox, res, mode })
    }

    /// `[-radius, radius]^dim`.
    pub fn cube(dim: usize, radius: &Rational, res: u32, mode: MembershipMode) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::Config("radius must be positive".into()));
        }
        GridSpec::new(IntervalBox::cube(dim, radius), res, mode)
    }

    pub fn dim(&self) -> usize {
        self.bbox.dim()
    }

    pub fn res(&self) -> u32 {
        self.res
    }

    pub fn mode(&self) -> MembershipMode {
        self.mode
    }

    pub fn bbox(&self) -> &IntervalBox {
        &self.bbox
    }

    pub fn with_mode(&self, mode: MembershipMode) -> GridSpec {
        GridSpec { mode, ..self.clone() }
    }

    pub fn with_res(&self, res: u32) -> Result<GridSpec> {
        GridSpec::new(self.bbox.clone(), res, self.mode)
    }

    /// The grid on a subset of the axes.
    pub fn project(&self, axes: &[usize]) -> GridSpec {
        GridSpec {
            bbox: IntervalBox::new(axes.iter().map(|&a| self.bbox.axis(a).clone()).collect()),
            res: self.res,
            mode: self.mode,
        }
    }

    /// Width of one cell along `axis`.
    pub fn step(&self, axis: usize) -> Rational {
        self.bbox.axis(axis).width() / Rational::from_integer(self.res.into())
    }

    /// Coordinate of grid line `i` (in half-cell units `h`) along `axis`.
    pub fn coord_half(&self, axis: usize, h: i64) -> Rational {
        let a = self.bbox.axis(axis);
        &a.lo + &(self.step(axis) * Rational::new(h.into(), 2.into()))
    }

    pub fn cell_box(&self, cell: &[u32]) -> IntervalBox {
        IntervalBox::new(
            cell.iter()
                .enumerate()
                .map(|(a, &c)| Interval::new(self.coord_half(a, 2 * c as i64), self.coord_half(a, 2 * c as i64 + 2)))
                .collect(),
        )
    }

    pub fn cell_center(&self, cell: &[u32]) -> Vec<Rational> {
        cell.iter()
            .enumerate()
            .map(|(a, &c)| self.coord_half(a, 2 * c as i64 + 1))
            .collect()
    }

    /// The cell containing `p` (points on grid lines go to the upper cell,
    /// except on the upper box face).
    pub fn locate(&self, p: &[Rational]) -> Option<Vec<u32>> {
        if !self.bbox.contains(p) {
            return None;
        }
        Some(
            p.iter()
                .enumerate()
                .map(|(a, x)| {
                    let t = (x - &self.bbox.axis(a).lo) / self.step(a);
                    let c = t.floor().to_integer().to_u32().unwrap_or(0);
                    c.min(self.res - 1)
                })
                .collect(),
        )
    }

    /// Cells sharing a segment of positive length with `iv` along `axis`, or
    /// containing it when `iv` is a single point.
    pub fn cells_overlapping(&self, axis: usize, iv: &Interval) -> Option<(u32, u32)> {
        if iv.lo == iv.hi {
            return self.cells_meeting(axis, iv);
        }
        let a = self.bbox.axis(axis);
        let step = self.step(axis);
        let lo = (&iv.lo - &a.lo) / &step;
        let hi = (&iv.hi - &a.lo) / &step;
        let first = lo.floor().to_integer().max(BigInt::zero());
        let last = (hi.ceil().to_integer() - BigInt::one()).min(BigInt::from(self.res - 1));
        if first > last {
            return None;
        }
        Some((first.to_u32()?, last.to_u32()?))
    }

    /// Cells whose closed box meets the closed interval `iv` along `axis`.
    pub fn cells_meeting(&self, axis: usize, iv: &Interval) -> Option<(u32, u32)> {
        let a = self.bbox.axis(axis);
        let step = self.step(axis);
        let lo = (&iv.lo - &a.lo) / &step;
        let hi = (&iv.hi - &a.lo) / &step;
        let first = (lo.ceil().to_integer() - BigInt::one()).max(BigInt::zero());
        let last = hi.floor().to_integer().min(BigInt::from(self.res - 1));
        if first > last {
            return None;
        }
        Some((first.to_u32()?, last.to_u32()?))
    }
}

/// Marked top-dimensional cells of a grid.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CubicalSet {
    grid: GridSpec,
    cells: BTreeSet<Vec<u32>>,
}

impl CubicalSet {
    pub fn empty(grid: GridSpec) -> Self {
        CubicalSet {
            grid,
            cells: BTreeSet::new(),
        }
    }

    pub fn from_cells(grid: GridSpec, cells: impl IntoIterator<Item = Vec<u32>>) -> Result<Self> {
        let mut out = CubicalSet::empty(grid);
        for c in cells {
            out.insert(c)?;
        }
        Ok(out)
    }

    pub fn insert(&mut self, cell: Vec<u32>) -> Result<()> {
        if cell.len() != self.grid.dim() || cell.iter().any(|&c| c >= self.grid.res) {
            return Err(Error::Format(format!("cell {cell:?} outside the grid")));
        }
        self.cells.insert(cell);
        Ok(())
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn cells(&self) -> impl Iterator<Item = &Vec<u32>> {
        self.cells.iter()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, cell: &[u32]) -> bool {
        self.cells.contains(cell)
    }

    pub fn is_subset(&self, other: &CubicalSet) -> bool {
        self.cells.is_subset(&other.cells)
    }

    pub fn union(&self, other: &CubicalSet) -> Result<CubicalSet> {
        if self.grid.bbox != other.grid.bbox || self.grid.res != other.grid.res {
            return Err(Error::Format("union of rasters on different grids".into()));
        }
        Ok(CubicalSet {
            grid: self.grid.clone(),
            cells: self.cells.union(&other.cells).cloned().collect(),
        })
    }
}

// ---------------------------------------------------------------------------
// Box evaluation

/// Polynomials rescaled to integer coefficients over the half-cell lattice.
struct Lattice {
    /// Lattice coordinate of the lower box corner, per axis.
    offset: Vec<i64>,
    polys: Vec<Option<LatticePoly>>,
}

struct LatticePoly {
    terms: Vec<(Vec<u32>, i128)>,
    /// `ceil(D*t)` and `floor(D*t)` per threshold, for `+t` and `-t`.
    bounds: Vec<[(i128, i128); 2]>,
}

fn to_i128(x: &BigInt) -> Option<i128> {
    x.to_i128()
}

impl Lattice {
    fn compile(pred: &dyn BoxPredicate, grid: &GridSpec) -> Option<Lattice> {
        let dim = grid.dim();
        let units: Vec<Rational> = (0..dim)
            .map(|a| grid.step(a) / Rational::from_integer(2.into()))
            .collect();
        let mut offset = Vec::with_capacity(dim);
        for (a, u) in units.iter().enumerate() {
            let o = &grid.bbox.axis(a).lo / u;
            if !o.is_integer() {
                return None;
            }
            offset.push(o.to_integer().to_i64()?);
        }
        let polys = pred
            .polys()
            .iter()
            .map(|p| LatticePoly::compile(p, &units, pred.thresholds()))
            .collect();
        Some(Lattice { offset, polys })
    }
}

impl LatticePoly {
    fn compile(p: &Polynomial, units: &[Rational], thresholds: &[Rational]) -> Option<LatticePoly> {
        let mut scaled = Vec::with_capacity(p.num_terms());
        let mut denom = BigInt::one();
        for (m, c) in p.terms() {
            let mut v = c.clone();
            for (u, &e) in units.iter().zip(m.exponents()) {
                if e > 0 {
                    v *= num_traits::pow(u.clone(), e as usize);
                }
            }
            denom = denom.lcm(v.denom());
            scaled.push((m.exponents().to_vec(), v));
        }
        let d = Rational::from_integer(denom);
        let mut terms = Vec::with_capacity(scaled.len());
        for (e, v) in scaled {
            let w = v * &d;
            terms.push((e, to_i128(w.numer())?));
        }
        let mut bounds = Vec::with_capacity(thresholds.len());
        for t in thresholds {
            let pos = t * &d;
            let neg = -pos.clone();
            let cf = |q: &Rational| -> Option<(i128, i128)> {
                Some((to_i128(&q.ceil().to_integer())?, to_i128(&q.floor().to_integer())?))
            };
            bounds.push([cf(&pos)?, cf(&neg)?]);
        }
        Some(LatticePoly { terms, bounds })
    }

    /// Enclosure of `D*P` over the lattice box `[lo, hi]`.
    fn range(&self, lo: &[i64], hi: &[i64]) -> Option<(i128, i128)> {
        let (mut a, mut b) = (0i128, 0i128);
        for (exps, c) in &self.terms {
            let (mut tl, mut th) = (*c, *c);
            for (axis, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let (pl, ph) = ipow(lo[axis] as i128, hi[axis] as i128, e)?;
                let cands = [
                    tl.checked_mul(pl)?,
                    tl.checked_mul(ph)?,
                    th.checked_mul(pl)?,
                    th.checked_mul(ph)?,
                ];
                tl = *cands.iter().min().unwrap();
                th = *cands.iter().max().unwrap();
            }
            a = a.checked_add(tl)?;
            b = b.checked_add(th)?;
        }
        Some((a, b))
    }
}

fn ipow(lo: i128, hi: i128, e: u32) -> Option<(i128, i128)> {
    let p = |x: i128| x.checked_pow(e);
    if e % 2 == 1 || lo >= 0 {
        Some((p(lo)?, p(hi)?))
    } else if hi <= 0 {
        Some((p(hi)?, p(lo)?))
    } else {
        Some((0, p(lo)?.max(p(hi)?)))
    }
}

#[derive(Clone)]
enum Range {
    Int(i128, i128),
    Rat(Interval),
}

/// Per-box range oracle with lazily computed, cached polynomial ranges.
struct BoxRanges<'a> {
    pred: &'a dyn BoxPredicate,
    grid: &'a GridSpec,
    lattice: Option<&'a Lattice>,
    /// Box in half-cell units relative to the lower corner.
    lo: &'a [i64],
    hi: &'a [i64],
    cache: RefCell<Vec<Option<Range>>>,
}

impl BoxRanges<'_> {
    fn range(&self, poly: usize) -> Range {
        if let Some(r) = &self.cache.borrow()[poly] {
            return r.clone();
        }
        let r = self.compute(poly);
        self.cache.borrow_mut()[poly] = Some(r.clone());
        r
    }

    fn compute(&self, poly: usize) -> Range {
        if let Some(lat) = self.lattice {
            if let Some(lp) = &lat.polys[poly] {
                let lo: Vec<i64> = self.lo.iter().zip(&lat.offset).map(|(h, o)| h + o).collect();
                let hi: Vec<i64> = self.hi.iter().zip(&lat.offset).map(|(h, o)| h + o).collect();
                if let Some((a, b)) = lp.range(&lo, &hi) {
                    return Range::Int(a, b);
                }
            }
        }
        let bx = IntervalBox::new(
            (0..self.grid.dim())
                .map(|a| Interval::new(self.grid.coord_half(a, self.lo[a]), self.grid.coord_half(a, self.hi[a])))
                .collect(),
        );
        Range::Rat(eval_interval(&self.pred.polys()[poly], &bx))
    }
}

fn int_truth(rel: Relation, a: i128, b: i128, (ceil, floor): (i128, i128)) -> Truth {
    let three = |surely: bool, never: bool| {
        if surely {
            Truth::True
        } else if never {
            Truth::False
        } else {
            Truth::Unknown
        }
    };
    match rel {
        Relation::Ge => three(a >= ceil, b < ceil),
        Relation::Gt => three(a > floor, b <= floor),
        Relation::Le => three(b <= floor, a > floor),
        Relation::Lt => three(b < ceil, a >= ceil),
        Relation::Eq => {
            if ceil == floor && a == ceil && b == ceil {
                Truth::True
            } else if a > floor || b < ceil {
                Truth::False
            } else {
                Truth::Unknown
            }
        }
    }
}

impl RangeQuery for BoxRanges<'_> {
    fn compare(&self, poly: usize, rel: Relation, threshold: usize, negated: bool) -> Truth {
        match self.range(poly) {
            Range::Int(a, b) => {
                let lp = self.lattice.unwrap().polys[poly].as_ref().unwrap();
                int_truth(rel, a, b, lp.bounds[threshold][usize::from(negated)])
            }
            Range::Rat(iv) => {
                let t = &self.pred.thresholds()[threshold];
                if t.is_zero() {
                    rel.over_range(&iv.lo, &iv.hi)
                } else {
                    let t = if negated { -t.clone() } else { t.clone() };
                    rel.over_range(&(&iv.lo - &t), &(&iv.hi - &t))
                }
            }
        }
    }
}

/// Evaluates a predicate over grid-aligned boxes.
pub struct BoxEvaluator<'a> {
    pred: &'a dyn BoxPredicate,
    grid: &'a GridSpec,
    lattice: Option<Lattice>,
}

impl<'a> BoxEvaluator<'a> {
    pub fn new(pred: &'a dyn BoxPredicate, grid: &'a GridSpec) -> Result<Self> {
        if pred.arity() != grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: pred.arity(),
                found: grid.dim(),
            });
        }
        Ok(BoxEvaluator {
            pred,
            grid,
            lattice: Lattice::compile(pred, grid),
        })
    }

    /// Exact rational evaluation only (used to cross-check the lattice path).
    pub fn rational_only(pred: &'a dyn BoxPredicate, grid: &'a GridSpec) -> Result<Self> {
        let mut e = BoxEvaluator::new(pred, grid)?;
        e.lattice = None;
        Ok(e)
    }

    pub fn uses_lattice(&self) -> bool {
        self.lattice.is_some()
    }

    /// Truth over the box `[lo, hi]` given in half-cell units.
    pub fn eval_half(&self, lo: &[i64], hi: &[i64]) -> Truth {
        let q = BoxRanges {
            pred: self.pred,
            grid: self.grid,
            lattice: self.lattice.as_ref(),
            lo,
            hi,
            cache: RefCell::new(vec![None; self.pred.polys().len()]),
        };
        self.pred.eval(&q)
    }

    /// Truth over a single cell.
    pub fn eval_cell(&self, cell: &[u32]) -> Truth {
        let lo: Vec<i64> = cell.iter().map(|&c| 2 * c as i64).collect();
        let hi: Vec<i64> = lo.iter().map(|l| l + 2).collect();
        self.eval_half(&lo, &hi)
    }

    /// Truth at a cell center (always `True` or `False`).
    pub fn eval_center(&self, cell: &[u32]) -> Truth {
        let c: Vec<i64> = cell.iter().map(|&c| 2 * c as i64 + 1).collect();
        self.eval_half(&c, &c)
    }

    /// Hierarchical search over the `active` axes; inactive axes stay fixed
    /// at the cells given in `fixed`. Returns the marked cells (full
    /// coordinates) in lexicographic order.
    pub fn search(&self, active: &[bool], fixed: &[u32], mode: MembershipMode) -> Vec<Vec<u32>> {
        let dim = self.grid.dim();
        let res = self.grid.res as i64;
        let lo: Vec<i64> = (0..dim).map(|a| if active[a] { 0 } else { fixed[a] as i64 }).collect();
        let mut out = Vec::new();
        self.visit(active, &lo, res, mode, &mut out);
        out.sort();
        out
    }

    fn visit(&self, active: &[bool], lo: &[i64], size: i64, mode: MembershipMode, out: &mut Vec<Vec<u32>>) {
        let dim = lo.len();
        let lo_h: Vec<i64> = lo.iter().map(|c| 2 * c).collect();
        let hi_h: Vec<i64> = (0..dim)
            .map(|a| 2 * (lo[a] + if active[a] { size } else { 1 }))
            .collect();
        match self.eval_half(&lo_h, &hi_h) {
            Truth::False => {}
            Truth::True => fill(active, lo, size, out),
            Truth::Unknown if size == 1 => match mode {
                MembershipMode::Outer => out.push(lo.iter().map(|&c| c as u32).collect()),
                MembershipMode::Center => {
                    let cell: Vec<u32> = lo.iter().map(|&c| c as u32).collect();
                    if self.eval_center(&cell) == Truth::True {
                        out.push(cell);
                    }
                }
            },
            Truth::Unknown => {
                let half = size / 2;
                let axes: Vec<usize> = (0..dim).filter(|&a| active[a]).collect();
                let mut child = lo.to_vec();
                for mask in 0u32..(1 << axes.len()) {
                    for (bit, &a) in axes.iter().enumerate() {
                        child[a] = lo[a] + if mask >> bit & 1 == 1 { half } else { 0 };
                    }
                    self.visit(active, &child, half, mode, out);
                }
            }
        }
    }
}

fn fill(active: &[bool], lo: &[i64], size: i64, out: &mut Vec<Vec<u32>>) {
    let dim = lo.len();
    let mut cur: Vec<i64> = lo.to_vec();
    loop {
        out.push(cur.iter().map(|&c| c as u32).collect());
        let mut a = 0;
        loop {
            if a == dim {
                return;
            }
            if active[a] && cur[a] + 1 < lo[a] + size {
                cur[a] += 1;
                break;
            }
            cur[a] = lo[a];
            a += 1;
        }
    }
}

/// Rasterizes any box predicate over the whole grid.
pub fn rasterize_predicate(pred: &dyn BoxPredicate, grid: &GridSpec) -> Result<CubicalSet> {
    let ev = BoxEvaluator::new(pred, grid)?;
    let dim = grid.dim();
    let cells = ev.search(&vec![true; dim], &vec![0; dim], grid.mode());
    Ok(CubicalSet {
        grid: grid.clone(),
        cells: cells.into_iter().collect(),
    })
}

/// Rasterizes a quantifier-free formula.
pub fn rasterize(f: &Formula, grid: &GridSpec) -> Result<CubicalSet> {
    let pred = FormulaPredicate::new(f, grid.dim())?;
    rasterize_predicate(&pred, grid)
}

/// Cells of the `free` axes (given as full cells with the fixed axes copied
/// from `fixed`) where `graph` is not disproved.
fn witness_cells(ev: &BoxEvaluator, dim: usize, free: std::ops::Range<usize>, fixed: &[u32]) -> Vec<Vec<u32>> {
    let active: Vec<bool> = (0..dim).map(|a| free.contains(&a)).collect();
    ev.search(&active, fixed, MembershipMode::Outer)
}

/// Rasterizes a prism over the layout `X (k), Y (k), mu`.
///
/// A cell is marked when there are source cell `c_x`, witness cells `w_g`
/// for each graph over `c_x`, and a parameter cell whose weighted interval
/// sum `sum_g w_g(mu) * box(w_g)` meets the cell's `Y` box.
pub fn rasterize_prism(prism: &PrismDesc, grid: &GridSpec) -> Result<CubicalSet> {
    let k = prism.k;
    let dim = 2 * k + 1;
    if grid.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: grid.dim(),
        });
    }
    let xgrid = grid.project(&(0..k).collect::<Vec<_>>()).with_mode(MembershipMode::Outer);
    let source = rasterize(&prism.source, &xgrid)?;
    let ggrid = grid.project(&(0..2 * k).collect::<Vec<_>>());
    let preds: Vec<FormulaPredicate> = prism
        .graphs
        .iter()
        .map(|g| FormulaPredicate::new(&g.graph, 2 * k))
        .collect::<Result<_>>()?;
    let evals: Vec<BoxEvaluator> = preds
        .iter()
        .map(|p| BoxEvaluator::new(p, &ggrid))
        .collect::<Result<_>>()?;
    let mu_range = Interval::new(prism.mu_lo.clone(), prism.mu_hi.clone());
    let mu_cells: Vec<(u32, Interval)> = match grid.cells_overlapping(2 * k, &mu_range) {
        None => Vec::new(),
        Some((a, b)) => (a..=b)
            .filter_map(|c| {
                let cell = Interval::new(grid.coord_half(2 * k, 2 * c as i64), grid.coord_half(2 * k, 2 * c as i64 + 2));
                cell.intersection(&mu_range).filter(|iv| iv.lo < iv.hi || mu_range.lo == mu_range.hi).map(|iv| (c, iv))
            })
            .collect(),
    };
    let mut out = CubicalSet::empty(grid.clone());
    for xc in source.cells() {
        let mut fixed = xc.clone();
        fixed.extend(vec![0; k]);
        let witnesses: Vec<Vec<IntervalBox>> = evals
            .iter()
            .map(|ev| {
                witness_cells(ev, 2 * k, k..2 * k, &fixed)
                    .into_iter()
                    .map(|c| ggrid.cell_box(&c).axes()[k..].to_vec())
                    .map(IntervalBox::new)
                    .collect()
            })
            .collect();
        if witnesses.iter().any(Vec::is_empty) {
            continue;
        }
        for (mc, mu) in &mu_cells {
            let weights: Vec<Interval> = prism
                .graphs
                .iter()
                .map(|g| {
                    let a = g.weight(&mu.lo);
                    let b = g.weight(&mu.hi);
                    if a <= b {
                        Interval::new(a, b)
                    } else {
                        Interval::new(b, a)
                    }
                })
                .collect();
            for_each_combination(&witnesses, &mut |combo| {
                let mut sum: Vec<Interval> = vec![Interval::point(Rational::zero()); k];
                for (g, bx) in combo.iter().enumerate() {
                    for (s, axis) in sum.iter_mut().zip(bx.axes()) {
                        *s = s.add(&weights[g].mul(axis));
                    }
                }
                let ranges: Option<Vec<(u32, u32)>> =
                    (0..k).map(|a| grid.cells_overlapping(k + a, &sum[a])).collect();
                if let Some(ranges) = ranges {
                    let lo: Vec<i64> = ranges.iter().map(|r| r.0 as i64).collect();
                    let mut ys = Vec::new();
                    fill_ranges(&lo, &ranges, &mut ys);
                    for y in ys {
                        let mut cell = xc.clone();
                        cell.extend(y);
                        cell.push(*mc);
                        out.cells.insert(cell);
                    }
                }
            });
        }
    }
    Ok(out)
}

fn fill_ranges(lo: &[i64], ranges: &[(u32, u32)], out: &mut Vec<Vec<u32>>) {
    let mut cur: Vec<u32> = lo.iter().map(|&c| c as u32).collect();
    loop {
        out.push(cur.clone());
        let mut a = 0;
        loop {
            if a == cur.len() {
                return;
            }
            if cur[a] < ranges[a].1 {
                cur[a] += 1;
                break;
            }
            cur[a] = ranges[a].0;
            a += 1;
        }
    }
}

fn for_each_combination(lists: &[Vec<IntervalBox>], f: &mut impl FnMut(&[&IntervalBox])) {
    fn rec<'a>(lists: &'a [Vec<IntervalBox>], acc: &mut Vec<&'a IntervalBox>, f: &mut impl FnMut(&[&IntervalBox])) {
        match lists.split_first() {
            None => f(acc),
            Some((head, rest)) => {
                for b in head {
                    acc.push(b);
                    rec(rest, acc, f);
                    acc.pop();
                }
            }
        }
    }
    rec(lists, &mut Vec::new(), f);
}

/// Approximates `y` with `graph(x, y)` by refining the witness cells of the
/// graph over the point `x` down to `depth` extra halvings of the grid.
/// Returns the center of the bounding box of the surviving cells.
pub fn graph_value(graph: &Formula, x: &[Rational], ybox: &IntervalBox, res: u32) -> Result<Vec<Rational>> {
    let k = x.len();
    let mut axes: Vec<Interval> = x.iter().cloned().map(Interval::point).collect();
    axes.extend(ybox.axes().iter().cloned());
    let full = IntervalBox::new(axes);
    let mut boxes = vec![full];
    let mut size = ybox.axes()[0].width();
    let target = size.clone() / Rational::from_integer(res.into());
    while size > target {
        let mut next = Vec::new();
        for b in &boxes {
            for child in split_box(b, k) {
                if graph.eval_box(&child)? != Truth::False {
                    next.push(child);
                }
            }
        }
        if next.is_empty() {
            return Err(Error::Witness("no graph cell over the given point".into()));
        }
        boxes = next;
        size /= Rational::from_integer(2.into());
    }
    let mut out = Vec::with_capacity(ybox.dim());
    for a in 0..ybox.dim() {
        let lo = boxes.iter().map(|b| b.axis(k + a).lo.clone()).min().unwrap();
        let hi = boxes.iter().map(|b| b.axis(k + a).hi.clone()).max().unwrap();
        out.push((lo + hi) / Rational::from_integer(2.into()));
    }
    Ok(out)
}

fn split_box(b: &IntervalBox, from: usize) -> Vec<IntervalBox> {
    let dim = b.dim();
    let free = dim - from;
    let mut out = Vec::with_capacity(1 << free);
    for mask in 0u32..(1 << free) {
        let axes = (0..dim)
            .map(|a| {
                let iv = b.axis(a);
                if a < from {
                    iv.clone()
                } else {
                    let mid = iv.midpoint();
                    if mask >> (a - from) & 1 == 1 {
                        Interval::new(mid, iv.hi.clone())
                    } else {
                        Interval::new(iv.lo.clone(), mid)
                    }
                }
            })
            .collect();
        out.push(IntervalBox::new(axes));
    }
    out
}
