use crate::linalg::RatMatrix;
use crate::ncpoly::VarIndex;

use super::matrix::MatrixJet;
use super::ring::Jet;
use super::star::StarSpec;
use super::JetError;

/// `τ = det X` and `(log τ)_{t₁} − tr R`. Only meaningful for the ordinary product.
///
/// The t₁-derivative costs one degree, so the second jet lives in the same variables at D − 1.
pub fn tau_and_reduce(x: &MatrixJet, r: &RatMatrix, spec: &StarSpec) -> Result<(Jet, Jet), JetError> {
    if !matches!(spec, StarSpec::Ordinary) {
        return Err(JetError::Invalid(alloc::format!("tau functions need the ordinary product, not {}", spec)));
    }
    if x.rows() != x.cols() || r.rows() != x.rows() || r.cols() != x.cols() {
        return Err(JetError::Shape("X and R must be square of the same size".into()));
    }
    let ring = x.ring();
    if ring.degree() == 0 {
        return Err(JetError::Invalid("tau reduction needs D >= 1".into()));
    }
    let tau = x.det();
    let inv = tau.inverse()?;
    let phi_hat = &tau.derivative(&VarIndex::t(1)).mul(&inv) - &Jet::constant(ring, r.trace());
    Ok((tau, phi_hat.embed(&ring.with_degree(ring.degree() - 1))?))
}

/// `Uᵀ φ V` for `Q = V Uᵀ`.
pub fn sandwich_reduce(phi: &MatrixJet, u: &RatMatrix, v: &RatMatrix) -> Result<MatrixJet, JetError> {
    if u.rows() != phi.rows() || v.rows() != phi.cols() || u.cols() != v.cols() {
        return Err(JetError::Shape(alloc::format!(
            "phi is {}x{}, U {}x{}, V {}x{}",
            phi.rows(),
            phi.cols(),
            u.rows(),
            u.cols(),
            v.rows(),
            v.cols()
        )));
    }
    Ok(phi.lmul_rat(&u.transpose()).rmul_rat(v))
}
