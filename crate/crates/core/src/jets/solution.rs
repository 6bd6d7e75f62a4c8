use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::linalg::RatMatrix;
use crate::ncpoly::VarIndex;

use super::matrix::MatrixJet;
use super::ring::JetRing;
use super::star::{Star, StarSpec};
use super::JetError;

/// The blocks of `H = [[R, Q], [S, L]]` acting on `Z = (X; Y)`, X being N×N and Y M×N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constants {
    pub l: RatMatrix,
    pub q: RatMatrix,
    pub r: RatMatrix,
    pub s: RatMatrix,
}

/// `(L_n, Q_n, R_n, S_n)`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    pub l: RatMatrix,
    pub q: RatMatrix,
    pub r: RatMatrix,
    pub s: RatMatrix,
}

impl Constants {
    pub fn new(l: RatMatrix, q: RatMatrix, r: RatMatrix, s: RatMatrix) -> Result<Self, JetError> {
        let (m, n) = (l.rows(), r.rows());
        let ok = l.cols() == m && r.cols() == n && q.rows() == n && q.cols() == m && s.rows() == m && s.cols() == n;
        if !ok {
            return Err(JetError::Shape("L must be MxM, R NxN, Q NxM, S MxN".into()));
        }
        Ok(Constants { l, q, r, s })
    }

    pub fn m(&self) -> usize {
        self.l.rows()
    }

    pub fn n(&self) -> usize {
        self.r.rows()
    }

    pub fn h(&self) -> RatMatrix {
        let (m, n) = (self.m(), self.n());
        let mut h = RatMatrix::zeros(n + m, n + m);
        let put = |h: &mut RatMatrix, a: &RatMatrix, r0: usize, c0: usize| {
            for i in 0..a.rows() {
                for j in 0..a.cols() {
                    h.set(r0 + i, c0 + j, a.get(i, j).clone());
                }
            }
        };
        put(&mut h, &self.r, 0, 0);
        put(&mut h, &self.q, 0, n);
        put(&mut h, &self.s, n, 0);
        put(&mut h, &self.l, n, n);
        h
    }

    /// Blocks of `Hⁿ`.
    pub fn family(&self, n: u32) -> Family {
        let hn = self.h().pow(n).expect("H is square");
        let (m, nn) = (self.m(), self.n());
        let sub = |r0: usize, c0: usize, rows: usize, cols: usize| {
            let mut a = RatMatrix::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    a.set(i, j, hn.get(r0 + i, c0 + j).clone());
                }
            }
            a
        };
        Family { r: sub(0, 0, nn, nn), q: sub(0, nn, nn, m), s: sub(nn, 0, m, nn), l: sub(nn, nn, m, m) }
    }
}

/// Data of the `S = 0`, `Q = RK − KL` solution.
#[derive(Clone, Debug)]
pub struct SolutionSpec {
    pub l: RatMatrix,
    pub r: RatMatrix,
    pub k: RatMatrix,
    pub phi0: RatMatrix,
    /// The `t_n` entering `ξ(H) = Σ t_n Hⁿ`; `[1]` gives the t₁-only variant.
    pub xi_vars: Vec<u32>,
    pub ring: Arc<JetRing>,
    pub star: StarSpec,
}

impl SolutionSpec {
    pub fn new(
        l: RatMatrix,
        r: RatMatrix,
        k: RatMatrix,
        phi0: RatMatrix,
        xi_vars: Vec<u32>,
        ring: Arc<JetRing>,
        star: StarSpec,
    ) -> Result<Self, JetError> {
        let (m, n) = (l.rows(), r.rows());
        let ok = l.cols() == m && r.cols() == n && k.rows() == n && k.cols() == m && phi0.rows() == m && phi0.cols() == n;
        if !ok {
            return Err(JetError::Shape("L must be MxM, R NxN, K NxM, phi0 MxN".into()));
        }
        for &v in &xi_vars {
            if !ring.contains(&VarIndex::t(v)) {
                return Err(JetError::UnknownVar(VarIndex::t(v)));
            }
        }
        Ok(SolutionSpec { l, r, k, phi0, xi_vars, ring, star })
    }

    pub fn m(&self) -> usize {
        self.l.rows()
    }

    pub fn n(&self) -> usize {
        self.r.rows()
    }

    /// `RK − KL`
    pub fn q(&self) -> RatMatrix {
        let rk = self.r.mul(&self.k).expect("shapes checked");
        rk.sub(&self.k.mul(&self.l).expect("shapes checked")).expect("shapes checked")
    }

    pub fn constants(&self) -> Constants {
        Constants { l: self.l.clone(), q: self.q(), r: self.r.clone(), s: RatMatrix::zeros(self.m(), self.n()) }
    }
}

/// `exp(Σ_{n ∈ vars} t_n Hⁿ)` with the ordinary product.
pub fn exp_xi(h: &RatMatrix, ring: &Arc<JetRing>, vars: &[u32]) -> Result<MatrixJet, JetError> {
    if h.rows() != h.cols() {
        return Err(JetError::Shape("exp_xi needs a square matrix".into()));
    }
    let mut xi = MatrixJet::zeros(ring, h.rows(), h.cols());
    for &n in vars {
        let t = super::ring::Jet::var(ring, &VarIndex::t(n))?;
        let hn = h.pow(n).expect("square");
        xi = xi.add(&MatrixJet::from_rat(ring, &hn).scale_jet(&t));
    }
    xi.exp()
}

/// `Y ⋆ X^{⋆−1}`
pub fn phi_from_linear(x: &MatrixJet, y: &MatrixJet, star: &Star) -> Result<MatrixJet, JetError> {
    if y.cols() != x.rows() {
        return Err(JetError::Shape("Y must have as many columns as X has rows".into()));
    }
    let xi = star.inv(x)?;
    Ok(star.mat_mul(y, &xi))
}

/// `X = e^{ξ(R)}(I + Kφ₀) − K e^{ξ(L)} φ₀` and `Y = e^{ξ(L)} φ₀`, i.e. `Z = e^{ξ(H)} (I; φ₀)`.
pub fn linear_solution(s: &SolutionSpec) -> Result<(MatrixJet, MatrixJet), JetError> {
    let ring = &s.ring;
    let id = RatMatrix::identity(s.n());
    let ikp = id.add(&s.k.mul(&s.phi0).expect("shapes checked")).expect("shapes checked");
    if ikp.det().map_err(|_| JetError::Singular)? == num_traits::Zero::zero() {
        return Err(JetError::Singular);
    }
    let el = exp_xi(&s.l, ring, &s.xi_vars)?;
    let er = exp_xi(&s.r, ring, &s.xi_vars)?;
    let y = el.rmul_rat(&s.phi0);
    let x = er.rmul_rat(&ikp).sub(&y.lmul_rat(&s.k));
    Ok((x, y))
}

pub fn phi_solution(s: &SolutionSpec) -> Result<MatrixJet, JetError> {
    let (x, y) = linear_solution(s)?;
    let star = Star::new(&s.ring, &s.star)?;
    phi_from_linear(&x, &y, &star)
}

pub fn phi_solution_with(s: &SolutionSpec, star: &Star) -> Result<MatrixJet, JetError> {
    let (x, y) = linear_solution(s)?;
    phi_from_linear(&x, &y, star)
}
