use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_traits::One;

use crate::linalg::RatMatrix;
use crate::ncpoly::VarIndex;
use crate::Q;

use super::ring::{same_ring, Jet, JetRing};
use super::JetError;

/// Matrix with jet entries, row-major. Shape mismatches in arithmetic panic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixJet {
    ring: Arc<JetRing>,
    rows: usize,
    cols: usize,
    entries: Vec<Jet>,
}

impl MatrixJet {
    pub fn zeros(ring: &Arc<JetRing>, rows: usize, cols: usize) -> Self {
        MatrixJet { ring: ring.clone(), rows, cols, entries: alloc::vec![Jet::zero(ring); rows * cols] }
    }

    pub fn identity(ring: &Arc<JetRing>, n: usize) -> Self {
        let mut m = MatrixJet::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, Jet::one(ring));
        }
        m
    }

    pub fn from_rat(ring: &Arc<JetRing>, a: &RatMatrix) -> Self {
        let mut m = MatrixJet::zeros(ring, a.rows(), a.cols());
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                m.set(i, j, Jet::constant(ring, a.get(i, j).clone()));
            }
        }
        m
    }

    pub fn from_jet(j: Jet) -> Self {
        MatrixJet { ring: j.ring().clone(), rows: 1, cols: 1, entries: alloc::vec![j] }
    }

    pub fn from_entries(ring: &Arc<JetRing>, rows: usize, cols: usize, entries: Vec<Jet>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count");
        assert!(entries.iter().all(|e| same_ring(e.ring(), ring)), "jets from different rings");
        MatrixJet { ring: ring.clone(), rows, cols, entries }
    }

    pub fn ring(&self) -> &Arc<JetRing> {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &Jet {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Jet) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Jet] {
        &self.entries
    }

    /// The single entry of a 1×1 matrix.
    pub fn scalar(&self) -> &Jet {
        assert_eq!((self.rows, self.cols), (1, 1), "not a 1x1 matrix");
        &self.entries[0]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Jet::is_zero)
    }

    /// First entry with a nonzero coefficient: `(i, j, monomial, coefficient)`.
    pub fn first_nonzero(&self) -> Option<(usize, usize, String, Q)> {
        self.entries.iter().enumerate().find_map(|(k, e)| {
            e.first_nonzero().map(|(m, c)| (k / self.cols, k % self.cols, m, c))
        })
    }

    fn map(&self, f: impl Fn(&Jet) -> Jet) -> MatrixJet {
        MatrixJet { ring: self.ring.clone(), rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    fn zip(&self, o: &MatrixJet, op: &str, f: impl Fn(&Jet, &Jet) -> Jet) -> MatrixJet {
        assert_eq!(self.shape(), o.shape(), "shape mismatch in {}", op);
        MatrixJet {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, o: &MatrixJet) -> MatrixJet {
        self.zip(o, "add", |a, b| a + b)
    }

    pub fn sub(&self, o: &MatrixJet) -> MatrixJet {
        self.zip(o, "sub", |a, b| a - b)
    }

    pub fn neg(&self) -> MatrixJet {
        self.map(|a| -a)
    }

    pub fn scale(&self, c: &Q) -> MatrixJet {
        self.map(|a| a.scale(c))
    }

    /// Entrywise ordinary product with a scalar jet.
    pub fn scale_jet(&self, c: &Jet) -> MatrixJet {
        self.map(|a| a.mul(c))
    }

    /// Matrix product with an arbitrary bilinear entry product.
    pub fn mul_with(&self, o: &MatrixJet, f: impl Fn(&Jet, &Jet) -> Jet) -> MatrixJet {
        assert_eq!(self.cols, o.rows, "shape mismatch in mul: {}x{} vs {}x{}", self.rows, self.cols, o.rows, o.cols);
        let mut out = MatrixJet::zeros(&self.ring, self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = Jet::zero(&self.ring);
                for k in 0..self.cols {
                    let (a, b) = (self.get(i, k), o.get(k, j));
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc.add_scaled(&Q::one(), &f(a, b));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// Ordinary product.
    pub fn mul(&self, o: &MatrixJet) -> MatrixJet {
        self.mul_with(o, Jet::mul)
    }

    /// `A · self` for a constant matrix A; constant factors commute with every star product.
    pub fn lmul_rat(&self, a: &RatMatrix) -> MatrixJet {
        assert_eq!(a.cols(), self.rows, "shape mismatch in lmul_rat");
        let mut out = MatrixJet::zeros(&self.ring, a.rows(), self.cols);
        for i in 0..a.rows() {
            for j in 0..self.cols {
                let mut acc = Jet::zero(&self.ring);
                for k in 0..self.rows {
                    acc.add_scaled(a.get(i, k), self.get(k, j));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// `self · A` for a constant matrix A.
    pub fn rmul_rat(&self, a: &RatMatrix) -> MatrixJet {
        assert_eq!(self.cols, a.rows(), "shape mismatch in rmul_rat");
        let mut out = MatrixJet::zeros(&self.ring, self.rows, a.cols());
        for i in 0..self.rows {
            for j in 0..a.cols() {
                let mut acc = Jet::zero(&self.ring);
                for k in 0..self.cols {
                    acc.add_scaled(a.get(k, j), self.get(i, k));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn derivative(&self, v: &VarIndex) -> MatrixJet {
        self.map(|a| a.derivative(v))
    }

    pub fn derivatives(&self, vars: &[VarIndex]) -> MatrixJet {
        self.map(|a| a.derivatives(vars))
    }

    pub fn truncated(&self, d: u32) -> MatrixJet {
        self.map(|a| a.truncated(d))
    }

    pub fn truncated_weighted(&self, weights: &[u32], d: u32) -> MatrixJet {
        self.map(|a| a.truncated_weighted(weights, d))
    }

    pub fn restrict_zero(&self, vars: &[VarIndex]) -> MatrixJet {
        self.map(|a| a.restrict_zero(vars))
    }

    pub fn embed(&self, target: &Arc<JetRing>) -> Result<MatrixJet, JetError> {
        let entries = self.entries.iter().map(|e| e.embed(target)).collect::<Result<Vec<_>, _>>()?;
        Ok(MatrixJet { ring: target.clone(), rows: self.rows, cols: self.cols, entries })
    }

    /// Degree-0 part.
    pub fn constant_part(&self) -> RatMatrix {
        let mut m = RatMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).constant_term());
            }
        }
        m
    }

    pub fn transpose(&self) -> MatrixJet {
        let mut out = MatrixJet::zeros(&self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> MatrixJet {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of range");
        let mut out = MatrixJet::zeros(&self.ring, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, self.get(r0 + i, c0 + j).clone());
            }
        }
        out
    }

    /// `(top; bottom)`
    pub fn vstack(top: &MatrixJet, bottom: &MatrixJet) -> MatrixJet {
        assert_eq!(top.cols, bottom.cols, "shape mismatch in vstack");
        let mut entries = top.entries.clone();
        entries.extend(bottom.entries.iter().cloned());
        MatrixJet { ring: top.ring.clone(), rows: top.rows + bottom.rows, cols: top.cols, entries }
    }

    pub fn trace(&self) -> Jet {
        let mut acc = Jet::zero(&self.ring);
        for i in 0..self.rows.min(self.cols) {
            acc.add_scaled(&Q::one(), self.get(i, i));
        }
        acc
    }

    /// Determinant with the ordinary product, by cofactor expansion.
    pub fn det(&self) -> Jet {
        assert_eq!(self.rows, self.cols, "det of a non-square matrix");
        let idx: Vec<usize> = (0..self.rows).collect();
        self.minor(0, &idx)
    }

    fn minor(&self, row: usize, cols: &[usize]) -> Jet {
        if cols.is_empty() {
            return Jet::one(&self.ring);
        }
        let mut acc = Jet::zero(&self.ring);
        for (k, &c) in cols.iter().enumerate() {
            let e = self.get(row, c);
            if e.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let sign = if k % 2 == 0 { Q::one() } else { -Q::one() };
            acc.add_scaled(&sign, &e.mul(&self.minor(row + 1, &rest)));
        }
        acc
    }

    /// Exponential series of a matrix without constant term, ordinary product.
    pub fn exp(&self) -> Result<MatrixJet, JetError> {
        if self.rows != self.cols {
            return Err(JetError::Shape(alloc::format!("exp of a {}x{} matrix", self.rows, self.cols)));
        }
        if !self.constant_part().is_zero() {
            return Err(JetError::Invalid("exp needs a vanishing constant term".into()));
        }
        let mut out = MatrixJet::identity(&self.ring, self.rows);
        let mut pow = out.clone();
        for k in 1..=self.ring.degree() {
            pow = pow.mul(self).scale(&Q::new(1.into(), k.into()));
            if pow.is_zero() {
                break;
            }
            out = out.add(&pow);
        }
        Ok(out)
    }
}

impl fmt::Display for MatrixJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str("; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        f.write_str("]")
    }
}
