//! Exact rational linear algebra: dense matrices and a sparse linear solver.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::Q;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinalgError {
    Shape { op: &'static str, left: (usize, usize), right: (usize, usize) },
    Singular,
    NotSquare(usize, usize),
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::Shape { op, left, right } => {
                write!(f, "shape mismatch in {}: {}x{} vs {}x{}", op, left.0, left.1, right.0, right.1)
            }
            LinalgError::Singular => f.write_str("matrix is singular"),
            LinalgError::NotSquare(r, c) => write!(f, "matrix is not square ({}x{})", r, c),
        }
    }
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: alloc::vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::Shape { op: "from_rows", left: (r, c), right: (r, 0) });
        }
        Ok(RatMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Integer entries, row-major.
    pub fn from_ints(rows: usize, cols: usize, vals: &[i64]) -> Self {
        assert_eq!(vals.len(), rows * cols);
        RatMatrix { rows, cols, data: vals.iter().map(|v| Q::from_integer((*v).into())).collect() }
    }

    pub fn scalar(c: Q) -> Self {
        RatMatrix { rows: 1, cols: 1, data: alloc::vec![c] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Q::is_zero)
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn add(&self, o: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        self.same_shape("add", o)?;
        Ok(RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, o: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        self.same_shape("sub", o)?;
        Ok(RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() })
    }

    pub fn scale(&self, c: &Q) -> RatMatrix {
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, o: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        if self.cols != o.rows {
            return Err(LinalgError::Shape { op: "mul", left: (self.rows, self.cols), right: (o.rows, o.cols) });
        }
        let mut out = RatMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        out.data[i * o.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<RatMatrix, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare(self.rows, self.cols));
        }
        let mut out = RatMatrix::identity(self.rows);
        for _ in 0..n {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    pub fn trace(&self) -> Q {
        (0..self.rows.min(self.cols)).fold(Q::zero(), |acc, i| acc + self.get(i, i))
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self) -> Result<RatMatrix, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RatMatrix::identity(n);
        for col in 0..n {
            let piv = (col..n).find(|&r| !a.get(r, col).is_zero()).ok_or(LinalgError::Singular)?;
            a.swap_rows(piv, col);
            inv.swap_rows(piv, col);
            let p = a.get(col, col).clone();
            for j in 0..n {
                let v = a.get(col, j) / &p;
                a.set(col, j, v);
                let v = inv.get(col, j) / &p;
                inv.set(col, j, v);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..n {
                    let v = a.get(r, j) - &f * a.get(col, j);
                    a.set(r, j, v);
                    let v = inv.get(r, j) - &f * inv.get(col, j);
                    inv.set(r, j, v);
                }
            }
        }
        Ok(inv)
    }

    pub fn det(&self) -> Result<Q, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Q::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a.get(r, col).is_zero()) else {
                return Ok(Q::zero());
            };
            if piv != col {
                a.swap_rows(piv, col);
                det = -det;
            }
            let p = a.get(col, col).clone();
            det *= &p;
            for r in col + 1..n {
                if a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col) / &p;
                for j in col..n {
                    let v = a.get(r, j) - &f * a.get(col, j);
                    a.set(r, j, v);
                }
            }
        }
        Ok(det)
    }

    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(piv) = (rank..self.rows).find(|&r| !a.get(r, col).is_zero()) else { continue };
            a.swap_rows(piv, rank);
            let p = a.get(rank, col).clone();
            for r in rank + 1..self.rows {
                if a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col) / &p;
                for j in col..self.cols {
                    let v = a.get(r, j) - &f * a.get(rank, j);
                    a.set(r, j, v);
                }
            }
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn same_shape(&self, op: &'static str, o: &RatMatrix) -> Result<(), LinalgError> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(LinalgError::Shape { op, left: (self.rows, self.cols), right: (o.rows, o.cols) });
        }
        Ok(())
    }
}

/// Solve `Σ_j x_j · columns[j] = target` for sparse columns keyed by `K`.
/// Returns one solution (free unknowns set to zero) or `None` if inconsistent.
pub fn solve_sparse<K: Ord + Clone>(columns: &[BTreeMap<K, Q>], target: &BTreeMap<K, Q>) -> Option<Vec<Q>> {
    let mut keys: BTreeMap<K, usize> = BTreeMap::new();
    for col in columns.iter().chain(core::iter::once(target)) {
        for k in col.keys() {
            let next = keys.len();
            keys.entry(k.clone()).or_insert(next);
        }
    }
    let n = columns.len();
    // rows: sparse map column index -> coeff; index n is the right-hand side
    let mut rows: Vec<BTreeMap<usize, Q>> = alloc::vec![BTreeMap::new(); keys.len()];
    for (j, col) in columns.iter().enumerate() {
        for (k, v) in col {
            if !v.is_zero() {
                rows[keys[k]].insert(j, v.clone());
            }
        }
    }
    for (k, v) in target {
        if !v.is_zero() {
            rows[keys[k]].insert(n, v.clone());
        }
    }
    let mut pivots: Vec<(usize, BTreeMap<usize, Q>)> = Vec::new();
    for mut row in rows {
        for (pc, prow) in &pivots {
            if let Some(f) = row.get(pc).cloned() {
                for (c, v) in prow {
                    let e = row.entry(*c).or_insert_with(Q::zero);
                    *e -= &f * v;
                    if e.is_zero() {
                        row.remove(c);
                    }
                }
            }
        }
        let Some((&pc, _)) = row.iter().find(|(c, _)| **c < n) else {
            if row.contains_key(&n) {
                return None;
            }
            continue;
        };
        let p = row[&pc].clone();
        for v in row.values_mut() {
            *v /= &p;
        }
        // keep earlier pivot rows reduced in the new pivot column
        for (_, prow) in pivots.iter_mut() {
            if let Some(f) = prow.get(&pc).cloned() {
                for (c, v) in &row {
                    let e = prow.entry(*c).or_insert_with(Q::zero);
                    *e -= &f * v;
                    if e.is_zero() {
                        prow.remove(c);
                    }
                }
            }
        }
        pivots.push((pc, row));
    }
    let mut x = alloc::vec![Q::zero(); n];
    for (pc, row) in &pivots {
        x[*pc] = row.get(&n).cloned().unwrap_or_else(Q::zero);
    }
    Some(x)
}
