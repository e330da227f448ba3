//! Zigzag modules `V_0 <- V_1 -> V_2 <- V_3 ...` and their barcodes.
//!
//! The barcode is read off the generalized rank invariant: for `b <= d` the
//! rank of the canonical map from the limit to the colimit of the module
//! restricted to `[b, d]` counts the bars containing `[b, d]`, and Möbius
//! inversion over intervals recovers the multiplicities.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Direction of arrow `j` (between `j - 1` and `j`).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arrow {
    /// `V_j -> V_{j-1}` (odd `j`).
    Left,
    /// `V_{j-1} -> V_j` (even `j`).
    Right,
}

impl Arrow {
    pub fn of(j: usize) -> Arrow {
        if j % 2 == 1 {
            Arrow::Left
        } else {
            Arrow::Right
        }
    }
}

/// `(source, target)` indices of arrow `j`.
pub fn arrow_ends(j: usize) -> (usize, usize) {
    match Arrow::of(j) {
        Arrow::Left => (j, j - 1),
        Arrow::Right => (j - 1, j),
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ZigzagModule {
    n: usize,
    dims: Vec<usize>,
    /// `arrows[j - 1]` is `A_j`, shaped `target x source`.
    arrows: Vec<Matrix>,
}

#[derive(Deserialize)]
struct ModuleRepr {
    dims: Vec<usize>,
    arrows: Vec<Matrix>,
    #[serde(default)]
    directions: Option<Vec<Arrow>>,
}

impl<'de> Deserialize<'de> for ZigzagModule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = ModuleRepr::deserialize(d)?;
        if let Some(dirs) = &r.directions {
            if dirs.iter().enumerate().any(|(i, &a)| a != Arrow::of(i + 1)) {
                return Err(D::Error::custom(
                    "only alternating zigzags (left, right, left, ...) are supported",
                ));
            }
        }
        ZigzagModule::new(r.dims, r.arrows).map_err(D::Error::custom)
    }
}

impl ZigzagModule {
    pub fn new(dims: Vec<usize>, arrows: Vec<Matrix>) -> Result<Self> {
        if dims.is_empty() || arrows.len() + 1 != dims.len() {
            return Err(Error::Shape(format!(
                "{} spaces need {} arrows, got {}",
                dims.len(),
                dims.len().saturating_sub(1),
                arrows.len()
            )));
        }
        for (k, a) in arrows.iter().enumerate() {
            let (s, t) = arrow_ends(k + 1);
            if a.rows() != dims[t] || a.cols() != dims[s] {
                return Err(Error::Shape(format!(
                    "arrow {} must be {}x{}, got {}x{}",
                    k + 1,
                    dims[t],
                    dims[s],
                    a.rows(),
                    a.cols()
                )));
            }
        }
        Ok(ZigzagModule {
            n: arrows.len(),
            dims,
            arrows,
        })
    }

    pub fn zero(n: usize) -> Self {
        ZigzagModule::new(vec![0; n + 1], vec![Matrix::zeros(0, 0); n]).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn arrow(&self, j: usize) -> &Matrix {
        &self.arrows[j - 1]
    }

    pub fn arrows(&self) -> &[Matrix] {
        &self.arrows
    }

    /// Block sum of two modules over the same index range.
    pub fn direct_sum(&self, other: &ZigzagModule) -> Result<ZigzagModule> {
        if self.n != other.n {
            return Err(Error::Shape("direct sum of modules of different lengths".into()));
        }
        ZigzagModule::new(
            self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect(),
            self.arrows.iter().zip(&other.arrows).map(|(a, b)| a.direct_sum(b)).collect(),
        )
    }

    /// The module with `basis[j]` as new basis of `V_j` (columns in old
    /// coordinates): `A_j` becomes `P_t^{-1} A_j P_s`.
    pub fn change_basis(&self, basis: &[Matrix]) -> Result<ZigzagModule> {
        let invs = basis
            .iter()
            .map(|p| p.inverse().ok_or_else(|| Error::Shape("change of basis is not invertible".into())))
            .collect::<Result<Vec<_>>>()?;
        let arrows = (1..=self.n)
            .map(|j| {
                let (s, t) = arrow_ends(j);
                invs[t].mul(self.arrow(j))?.mul(&basis[s])
            })
            .collect::<Result<Vec<_>>>()?;
        ZigzagModule::new(self.dims.clone(), arrows)
    }

    /// The restriction to indices `0..=n'`.
    pub fn truncate(&self, n: usize) -> Result<ZigzagModule> {
        if n > self.n {
            return Err(Error::Shape(format!("cannot truncate length {} to {n}", self.n)));
        }
        ZigzagModule::new(self.dims[..=n].to_vec(), self.arrows[..n].to_vec())
    }

    /// Offsets of each `V_j` inside `⊕_{j in [b, d]} V_j`.
    fn offsets(&self, b: usize, d: usize) -> Vec<usize> {
        let mut off = vec![0; d - b + 2];
        for j in b..=d {
            off[j - b + 1] = off[j - b] + self.dims[j];
        }
        off
    }

    /// Number of bars containing `[b, d]`: the rank of the map from the limit
    /// to the colimit of the restriction to `[b, d]`.
    pub fn interval_rank(&self, b: usize, d: usize) -> usize {
        let off = self.offsets(b, d);
        let total = off[d - b + 1];
        if self.dims[b] == 0 || total == 0 {
            return 0;
        }
        // Limit: tuples with v_t = A v_s along every arrow in range.
        let arrows: Vec<usize> = (b + 1..=d).collect();
        let rows: usize = arrows.iter().map(|&j| self.dims[arrow_ends(j).1]).sum();
        let mut c = Matrix::zeros(rows, total);
        // Relations spanning the colimit's kernel: columns ι_s(v) - ι_t(A v).
        let rel_cols: usize = arrows.iter().map(|&j| self.dims[arrow_ends(j).0]).sum();
        let mut rel = Matrix::zeros(total, rel_cols);
        let (mut r0, mut c0) = (0, 0);
        for &j in &arrows {
            let (s, t) = arrow_ends(j);
            let a = self.arrow(j);
            let (os, ot) = (off[s - b], off[t - b]);
            for i in 0..self.dims[t] {
                for k in 0..self.dims[s] {
                    c.set(r0 + i, os + k, a.get(i, k).clone());
                    rel.set(ot + i, c0 + k, -a.get(i, k).clone());
                }
                c.set(r0 + i, ot + i, -crate::poly::Rational::one());
            }
            for k in 0..self.dims[s] {
                rel.set(os + k, c0 + k, crate::poly::Rational::one());
            }
            r0 += self.dims[t];
            c0 += self.dims[s];
        }
        let lim = c.nullspace();
        // Image of the limit in the colimit through component b.
        let mut img = Matrix::zeros(total, lim.cols());
        for col in 0..lim.cols() {
            for i in 0..self.dims[b] {
                img.set(i, col, lim.get(i, col).clone());
            }
        }
        let base = rel.rank();
        rel.hcat(&img).map(|m| m.rank() - base).unwrap_or(0)
    }
}

/// One bar `[birth, death]` with its multiplicity.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash, Serialize, Deserialize)]
pub struct Bar {
    pub birth: usize,
    pub death: usize,
    pub multiplicity: usize,
}

/// Multiset of closed intervals of `0..=n`, sorted by `(birth, death)`.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Barcode {
    bars: Vec<Bar>,
}

impl Barcode {
    pub fn new(bars: impl IntoIterator<Item = (usize, usize, usize)>) -> Self {
        let mut acc: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (b, d, m) in bars {
            if m > 0 {
                *acc.entry((b, d)).or_default() += m;
            }
        }
        Barcode {
            bars: acc
                .into_iter()
                .map(|((birth, death), multiplicity)| Bar {
                    birth,
                    death,
                    multiplicity,
                })
                .collect(),
        }
    }

    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    /// Total multiplicity of bars containing all of `indices`.
    pub fn covering(&self, lo: usize, hi: usize) -> usize {
        self.bars
            .iter()
            .filter(|b| b.birth <= lo && hi <= b.death)
            .map(|b| b.multiplicity)
            .sum()
    }
}

impl fmt::Display for Barcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .bars
            .iter()
            .map(|b| {
                if b.multiplicity == 1 {
                    format!("[{},{}]", b.birth, b.death)
                } else {
                    format!("[{},{}]x{}", b.birth, b.death, b.multiplicity)
                }
            })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Interval decomposition of a zigzag module.
pub fn barcode(m: &ZigzagModule) -> Barcode {
    let n = m.n;
    let mut rk = vec![vec![0i64; n + 2]; n + 2];
    for b in 0..=n {
        for d in b..=n {
            rk[b][d] = m.interval_rank(b, d) as i64;
        }
    }
    let get = |b: isize, d: usize| -> i64 {
        if b < 0 || d > n {
            0
        } else {
            rk[b as usize][d]
        }
    };
    let mut bars = Vec::new();
    for b in 0..=n {
        for d in b..=n {
            let bi = b as isize;
            let mult = get(bi, d) - get(bi - 1, d) - get(bi, d + 1) + get(bi - 1, d + 1);
            debug_assert!(mult >= 0, "negative multiplicity at [{b},{d}]");
            if mult > 0 {
                bars.push((b, d, mult as usize));
            }
        }
    }
    Barcode::new(bars)
}

/// The interval module `I[b, d]` over `0..=n`.
pub fn build_interval_module(b: usize, d: usize, n: usize) -> Result<ZigzagModule> {
    if b > d || d > n {
        return Err(Error::Shape(format!("interval [{b}, {d}] is not inside [0, {n}]")));
    }
    let dims: Vec<usize> = (0..=n).map(|j| usize::from(b <= j && j <= d)).collect();
    let arrows = (1..=n)
        .map(|j| {
            let (s, t) = arrow_ends(j);
            let mut a = Matrix::zeros(dims[t], dims[s]);
            if dims[s] == 1 && dims[t] == 1 {
                a.set(0, 0, crate::poly::Rational::one());
            }
            a
        })
        .collect();
    ZigzagModule::new(dims, arrows)
}

/// The direct sum of the interval modules of a barcode.
pub fn module_of_barcode(bc: &Barcode, n: usize) -> Result<ZigzagModule> {
    let mut m = ZigzagModule::zero(n);
    for bar in bc.bars() {
        let i = build_interval_module(bar.birth, bar.death, n)?;
        for _ in 0..bar.multiplicity {
            m = m.direct_sum(&i)?;
        }
    }
    Ok(m)
}

/// Outcome of [`validate_barcode`].
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct BarcodeReport {
    pub valid: bool,
    pub violations: Vec<String>,
}

/// Checks the dimension identity at every index and the rank identity at
/// every arrow.
pub fn validate_barcode(m: &ZigzagModule, bc: &Barcode) -> BarcodeReport {
    let mut violations = Vec::new();
    for bar in bc.bars() {
        if bar.birth > bar.death || bar.death > m.n {
            violations.push(format!("bar [{}, {}] is outside [0, {}]", bar.birth, bar.death, m.n));
        }
    }
    for j in 0..=m.n {
        let got = bc.covering(j, j);
        if got != m.dims[j] {
            violations.push(format!("dimension at {j}: module has {}, bars cover {got}", m.dims[j]));
        }
    }
    for j in 1..=m.n {
        let rank = m.arrow(j).rank();
        let got = bc.covering(j - 1, j);
        if rank != got {
            violations.push(format!("rank of arrow {j}: module has {rank}, bars spanning it {got}"));
        }
    }
    BarcodeReport {
        valid: violations.is_empty(),
        violations,
    }
}

impl Matrix {
    /// `true` iff square and equal to the identity.
    pub fn is_identity(&self) -> bool {
        self.rows() == self.cols()
            && (0..self.rows()).all(|i| (0..self.cols()).all(|j| *self.get(i, j) == if i == j { One::one() } else { Zero::zero() }))
    }
}
