//! Exact rational linear algebra: small dense matrices and sparse column
//! reduction.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::{fmt_rational, parse_rational, Rational};

/// Dense `rows x cols` matrix over the rationals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a matrix from sparse columns.
    pub fn from_columns(rows: usize, cols: &[SparseVec]) -> Self {
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.entries() {
                m.set(*i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `[self | other]`.
    pub fn hcat(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::Shape("hcat of matrices with different row counts".into()));
        }
        let mut out = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        Ok(out)
    }

    /// Rank by exact Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            let Some(p) = (rank..m.rows).find(|&r| !m.get(r, c).is_zero()) else {
                continue;
            };
            for j in 0..m.cols {
                m.data.swap(p * m.cols + j, rank * m.cols + j);
            }
            let inv = m.get(rank, c).recip();
            for r in rank + 1..m.rows {
                let f = m.get(r, c) * &inv;
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = m.get(r, j) - &(&f * m.get(rank, j));
                    m.set(r, j, v);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            for j in 0..m.cols {
                m.data.swap(p * m.cols + j, r * m.cols + j);
            }
            let inv = m.get(r, c).recip();
            for j in 0..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j) - &(&f * m.get(r, j));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    /// A basis of the null space, as the columns of a `cols x k` matrix.
    pub fn nullspace(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            out.set(f, k, Rational::one());
            for (i, &p) in pivots.iter().enumerate() {
                out.set(p, k, -r.get(i, f).clone());
            }
        }
        out
    }

    /// The inverse of a square matrix, if it is invertible.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let (r, pivots) = self.hcat(&Matrix::identity(n)).ok()?.rref();
        if pivots.len() < n || (n > 0 && pivots[n - 1] >= n) {
            return None;
        }
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(out)
    }

    /// `[self; other]`.
    pub fn vcat(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(Error::Shape("vcat of matrices with different column counts".into()));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    /// Entries as exact rational strings, row by row.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(fmt_rational).collect())
            .collect()
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_strings() {
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<String>>,
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: self.to_strings(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = MatrixRepr::deserialize(d)?;
        if r.entries.len() != r.rows || r.entries.iter().any(|row| row.len() != r.cols) {
            return Err(D::Error::custom("matrix entries do not match its shape"));
        }
        let mut data = Vec::with_capacity(r.rows * r.cols);
        for row in &r.entries {
            for e in row {
                data.push(parse_rational(e).ok_or_else(|| D::Error::custom(format!("bad rational `{e}`")))?);
            }
        }
        Ok(Matrix {
            rows: r.rows,
            cols: r.cols,
            data,
        })
    }
}

/// Sparse vector with entries sorted by index and no stored zeros.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SparseVec {
    entries: Vec<(usize, Rational)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec::default()
    }

    pub fn unit(i: usize) -> Self {
        SparseVec {
            entries: vec![(i, Rational::one())],
        }
    }

    /// From unsorted entries; repeated indices are summed.
    pub fn from_entries(mut entries: Vec<(usize, Rational)>) -> Self {
        entries.sort_by_key(|e| e.0);
        let mut out: Vec<(usize, Rational)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            match out.last_mut() {
                Some((j, w)) if *j == i => *w += v,
                _ => out.push((i, v)),
            }
        }
        out.retain(|e| !e.1.is_zero());
        SparseVec { entries: out }
    }

    pub fn entries(&self) -> &[(usize, Rational)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest index with a nonzero entry.
    pub fn pivot(&self) -> Option<usize> {
        self.entries.last().map(|e| e.0)
    }

    pub fn get(&self, i: usize) -> Rational {
        match self.entries.binary_search_by_key(&i, |e| e.0) {
            Ok(k) => self.entries[k].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: &Rational, other: &SparseVec) {
        if c.is_zero() || other.is_zero() {
            return;
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(x), Some(y)) if x.0 == y.0 => {
                    let v = &x.1 + &(c * &y.1);
                    if !v.is_zero() {
                        out.push((x.0, v));
                    }
                    a.next();
                    b.next();
                }
                (Some(x), Some(y)) if x.0 < y.0 => out.push(a.next().unwrap().clone()),
                (Some(_), Some(_)) | (None, Some(_)) => {
                    let y = b.next().unwrap();
                    out.push((y.0, c * &y.1));
                }
                (Some(_), None) => out.push(a.next().unwrap().clone()),
                (None, None) => break,
            }
        }
        self.entries = out;
    }

    pub fn scale(&mut self, c: &Rational) {
        if c.is_zero() {
            self.entries.clear();
        } else {
            for e in &mut self.entries {
                e.1 *= c;
            }
        }
    }

    pub fn to_dense(&self, n: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); n];
        for (i, x) in &self.entries {
            v[*i] = x.clone();
        }
        v
    }
}

/// Columns in echelon form keyed by pivot, each carrying a tag vector that
/// records how it was combined from tagged inputs.
#[derive(Clone, Debug, Default)]
pub struct Reducer {
    columns: Vec<(SparseVec, SparseVec)>,
    by_pivot: HashMap<usize, usize>,
}

impl Reducer {
    pub fn new() -> Self {
        Reducer::default()
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn has_pivot(&self, p: usize) -> bool {
        self.by_pivot.contains_key(&p)
    }

    /// Reduces `(v, tag)` against the stored columns, returning the residue.
    /// Afterwards `v_in = v_out + sum(stored combination)` and the tag is
    /// updated by the same combination.
    pub fn reduce(&self, v: &mut SparseVec, tag: &mut SparseVec) {
        while let Some(p) = v.pivot() {
            let Some(&k) = self.by_pivot.get(&p) else {
                return;
            };
            let (col, ctag) = &self.columns[k];
            let c = -(v.get(p) / col.get(p));
            v.axpy(&c, col);
            tag.axpy(&c, ctag);
        }
    }

    /// Reduces and stores the residue if nonzero. Returns whether it was new.
    pub fn insert(&mut self, mut v: SparseVec, mut tag: SparseVec) -> bool {
        self.reduce(&mut v, &mut tag);
        match v.pivot() {
            None => false,
            Some(p) => {
                self.by_pivot.insert(p, self.columns.len());
                self.columns.push((v, tag));
                true
            }
        }
    }

    /// Coefficients `a` with `v = sum_k a_k * (tagged input k)`, read off the
    /// tags, or `None` if `v` is outside the span.
    pub fn express(&self, v: &SparseVec) -> Option<SparseVec> {
        let mut v = v.clone();
        let mut tag = SparseVec::new();
        self.reduce(&mut v, &mut tag);
        if v.is_zero() {
            tag.scale(&-Rational::one());
            Some(tag)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn rank_and_product() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(a.rank(), 2);
        assert_eq!(Matrix::identity(3).mul(&a).unwrap(), a);
        assert!(a.mul(&m(&[&[1, 2]])).is_err());
        assert_eq!(a.transpose().rank(), 2);
        assert_eq!(Matrix::zeros(0, 3).rank(), 0);
    }

    #[test]
    fn nullspace_and_inverse() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        let n = a.nullspace();
        assert_eq!(n.cols(), 1);
        assert!(a.mul(&n).unwrap().is_zero());
        assert!(a.inverse().is_none());
        let b = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(b.mul(&b.inverse().unwrap()).unwrap(), Matrix::identity(2));
        assert_eq!(Matrix::zeros(0, 0).inverse(), Some(Matrix::zeros(0, 0)));
    }

    #[test]
    fn matrix_json_round_trip() {
        let mut a = Matrix::zeros(2, 1);
        a.set(1, 0, rat(-3, 7));
        let s = serde_json::to_string(&a).unwrap();
        assert!(s.contains("\"-3/7\""));
        assert_eq!(serde_json::from_str::<Matrix>(&s).unwrap(), a);
    }

    #[test]
    fn axpy_cancels() {
        let mut a = SparseVec::from_entries(vec![(0, int(1)), (3, int(2))]);
        let b = SparseVec::from_entries(vec![(3, int(1)), (5, int(1))]);
        a.axpy(&int(-2), &b);
        assert_eq!(a.entries(), &[(0, int(1)), (5, int(-2))]);
    }

    #[test]
    fn reducer_expresses_combinations() {
        let mut r = Reducer::new();
        let u = SparseVec::from_entries(vec![(0, int(1)), (1, int(1))]);
        let w = SparseVec::from_entries(vec![(1, int(1)), (2, int(1))]);
        assert!(r.insert(u.clone(), SparseVec::unit(0)));
        assert!(r.insert(w.clone(), SparseVec::unit(1)));
        let mut target = u.clone();
        target.axpy(&int(3), &w);
        let coeffs = r.express(&target).unwrap();
        assert_eq!(coeffs.entries(), &[(0, int(1)), (1, int(3))]);
        assert!(r.express(&SparseVec::unit(0)).is_none());
        assert!(!r.insert(target, SparseVec::new()));
    }
}
