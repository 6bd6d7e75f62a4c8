use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::ncpoly::VarIndex;
use crate::Q;

use super::ring::{Jet, JetRing};
use super::star::{Star, StarSpec};
use super::JetError;

/// `M_{(m₁,…,m_r)}(k) = Σ_{i₁<…<i_r} k_{i₁}^{m₁} ⋯ k_{i_r}^{m_r}`
pub fn quasi_symmetric(word: &[u32], k: &[Q]) -> Q {
    // acc[j] = sum over increasing tuples using the first j letters
    let mut acc: Vec<Q> = alloc::vec![Q::zero(); word.len() + 1];
    acc[0] = Q::one();
    for ki in k {
        for j in (1..=word.len()).rev() {
            let add = &acc[j - 1] * pow(ki, word[j - 1]);
            acc[j] += add;
        }
    }
    acc.swap_remove(word.len())
}

fn pow(x: &Q, n: u32) -> Q {
    (0..n).fold(Q::one(), |a, _| a * x)
}

/// Power sum `M_{(n)}`.
pub fn power_sum(n: u32, k: &[Q]) -> Q {
    quasi_symmetric(&[n], k)
}

/// Elementary symmetric function `M_{(1ⁿ)}`.
pub fn elementary(n: u32, k: &[Q]) -> Q {
    quasi_symmetric(&alloc::vec![1; n as usize], k)
}

/// Elementary Schur polynomials `p_0 … p_n` at rational arguments, `n p_n = Σ j y_j p_{n−j}`.
pub fn schur_values(n: usize, y: &[Q]) -> Vec<Q> {
    let mut p = alloc::vec![Q::one()];
    for m in 1..=n {
        let mut acc = Q::zero();
        for j in 1..=m {
            if let Some(yj) = y.get(j - 1) {
                acc += Q::from_integer(j.into()) * yj * &p[m - j];
            }
        }
        p.push(acc / Q::from_integer(m.into()));
    }
    p
}

/// `(−1)ⁿ p_n(−M̃)` with `M̃ = (M_{(1)}, M_{(2)}/2, …)`.
pub fn elementary_from_power_sums(n: u32, k: &[Q]) -> Q {
    let y: Vec<Q> = (1..=n).map(|j| -power_sum(j, k) / Q::from_integer(j.into())).collect();
    let p = schur_values(n as usize, &y).swap_remove(n as usize);
    if n % 2 == 0 {
        p
    } else {
        -p
    }
}

/// All words of length ≤ `level` in letters `1..=max_letter`.
pub fn composed_ring(level: u32, max_letter: u32, degree: u32) -> Arc<JetRing> {
    let mut words: Vec<Vec<u32>> = (1..=max_letter).map(|m| alloc::vec![m]).collect();
    let mut frontier = words.clone();
    for _ in 1..level {
        let mut next = Vec::new();
        for w in &frontier {
            for m in 1..=max_letter {
                let mut w2 = w.clone();
                w2.push(m);
                next.push(w2);
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    JetRing::new(words.into_iter().map(VarIndex::Composition), degree)
}

/// `e^{ξ(k)}` with `ξ(k) = Σ t_m k^m` over the ordinary variables of the ring.
pub fn exp_xi_scalar(ring: &Arc<JetRing>, k: &Q) -> Result<Jet, JetError> {
    let mut xi = Jet::zero(ring);
    for v in ring.vars() {
        if let VarIndex::Composition(w) = v {
            if w.len() == 1 {
                xi.add_scaled(&pow(k, w[0]), &Jet::var(ring, v)?);
            }
        }
    }
    xi.exp()
}

/// `(e^{ξ(k₁)} ∗_n ⋯ ∗_n e^{ξ(k_N)}, exp(Σ_{r ≤ n+1} Σ t_{m₁…m_r} M_{(m₁…m_r)}(k)))`, the
/// exponent running over the composition variables of the ring.
pub fn xi_product_check(k: &[Q], level: u32, ring: &Arc<JetRing>) -> Result<(Jet, Jet), JetError> {
    let star = Star::new(ring, &StarSpec::Composed(level))?;
    let mut lhs = Jet::one(ring);
    for ki in k {
        lhs = star.mul(&lhs, &exp_xi_scalar(ring, ki)?);
    }
    let mut xi = Jet::zero(ring);
    for v in ring.vars() {
        if let VarIndex::Composition(w) = v {
            if w.len() as u32 <= level + 1 {
                xi.add_scaled(&quasi_symmetric(w, k), &Jet::var(ring, v)?);
            }
        }
    }
    Ok((lhs, xi.exp()?))
}

fn check_undeformed(g: &Jet) -> Result<(), JetError> {
    for (m, _) in g.terms() {
        for (i, &e) in m.iter().enumerate() {
            if e > 0 && !g.ring().vars()[i].is_ordinary() {
                return Err(JetError::Invalid(alloc::format!("input depends on {}", g.ring().vars()[i])));
            }
        }
    }
    Ok(())
}

/// `Σ_{σ∈S₃} sign(σ) g_{σ(1)} ⋆ g_{σ(2)} ⋆ g_{σ(3)}`
pub fn nambu_triple(g: [&Jet; 3], star: &Star) -> Result<Jet, JetError> {
    for x in g {
        check_undeformed(x)?;
    }
    const PERMS: [([usize; 3], i64); 6] =
        [([0, 1, 2], 1), ([1, 2, 0], 1), ([2, 0, 1], 1), ([1, 0, 2], -1), ([0, 2, 1], -1), ([2, 1, 0], -1)];
    let mut out = Jet::zero(star.ring());
    for (p, s) in PERMS {
        let prod = star.mul(&star.mul(g[p[0]], g[p[1]]), g[p[2]]);
        out.add_scaled(&Q::from_integer(s.into()), &prod);
    }
    Ok(out)
}

/// `(∂_{t_{mnr}}(g₁ ⋆ g₂ ⋆ g₃), g₁,_{t_m} ⋆ g₂,_{t_n} ⋆ g₃,_{t_r})`, both cut to degree D − 1.
pub fn nambu_derivative_pair(g: [&Jet; 3], mnr: [u32; 3], star: &Star) -> Result<(Jet, Jet), JetError> {
    for x in g {
        check_undeformed(x)?;
    }
    let d = star.ring().degree().saturating_sub(1);
    let v = VarIndex::Composition(mnr.to_vec());
    if !star.ring().contains(&v) {
        return Err(JetError::UnknownVar(v));
    }
    let lhs = star.mul(&star.mul(g[0], g[1]), g[2]).derivative(&v);
    let dg: Vec<Jet> = g.iter().zip(mnr).map(|(x, m)| x.derivative(&VarIndex::t(m))).collect();
    let rhs = star.mul(&star.mul(&dg[0], &dg[1]), &dg[2]);
    Ok((lhs.truncated(d), rhs.truncated(d)))
}
