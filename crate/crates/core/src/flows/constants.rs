use alloc::vec::Vec;

use crate::ncpoly::{Atom, NcExpr, Symbol};

/// Generators L, Q, R, S with optional structure flags.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ConstantSpec {
    /// S = 0
    pub s_zero: bool,
    /// Q = RK − KL
    pub q_rk_kl: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    L,
    Q,
    R,
    S,
}

impl Family {
    pub fn base(self) -> &'static str {
        match self {
            Family::L => "L",
            Family::Q => "Q",
            Family::R => "R",
            Family::S => "S",
        }
    }

    pub fn from_base(s: &str) -> Option<Family> {
        match s {
            "L" => Some(Family::L),
            "Q" => Some(Family::Q),
            "R" => Some(Family::R),
            "S" => Some(Family::S),
            _ => None,
        }
    }
}

/// The symbol `L_n` (plain `L` for n = 1).
pub fn family_symbol(f: Family, n: u32) -> Symbol {
    if n == 1 {
        Symbol::new(f.base())
    } else {
        Symbol::indexed(f.base(), n)
    }
}

pub fn family_expr(f: Family, n: u32) -> NcExpr {
    NcExpr::atom(Atom::new(family_symbol(f, n)))
}

impl ConstantSpec {
    pub const GENERIC: ConstantSpec = ConstantSpec { s_zero: false, q_rk_kl: false };
    pub const S_ZERO: ConstantSpec = ConstantSpec { s_zero: true, q_rk_kl: false };
    pub const SOLVABLE: ConstantSpec = ConstantSpec { s_zero: true, q_rk_kl: true };

    fn generator(&self, f: Family) -> NcExpr {
        match f {
            Family::S if self.s_zero => NcExpr::zero(),
            Family::Q if self.q_rk_kl => &NcExpr::product(&["R", "K"]) - &NcExpr::product(&["K", "L"]),
            _ => NcExpr::sym(f.base()),
        }
    }

    /// `[L_k, Q_k, R_k, S_k]` for k = 1..=n, expanded in the generators.
    pub fn table(&self, n: u32) -> Vec<[NcExpr; 4]> {
        let g = [self.generator(Family::L), self.generator(Family::Q), self.generator(Family::R), self.generator(Family::S)];
        let mut out: Vec<[NcExpr; 4]> = Vec::with_capacity(n as usize);
        if n == 0 {
            return out;
        }
        out.push(g.clone());
        for _ in 1..n {
            let [l, q, r, s] = out.last().unwrap();
            let [gl, gq, gr, gs] = &g;
            out.push([
                &gl.mul(l) + &gs.mul(q),
                &gr.mul(q) + &gq.mul(l),
                &gr.mul(r) + &gq.mul(s),
                &gl.mul(s) + &gs.mul(r),
            ]);
        }
        out
    }
}

/// Fully expanded `L_n`, `Q_n`, `R_n` or `S_n` following the recursion `H^n = H·H^{n−1}`.
pub fn lqrs_expand(family: Family, n: u32, spec: &ConstantSpec) -> NcExpr {
    assert!(n >= 1, "family index starts at 1");
    let t = spec.table(n);
    let idx = match family {
        Family::L => 0,
        Family::Q => 1,
        Family::R => 2,
        Family::S => 3,
    };
    t[(n - 1) as usize][idx].clone()
}

/// Replace every L, Q, R, S, L{n}, ... by its expansion under `spec`.
pub fn expand_constants(e: &NcExpr, spec: &ConstantSpec) -> NcExpr {
    let max_n = e
        .atoms()
        .iter()
        .filter(|a| Family::from_base(&a.symbol.base).is_some())
        .map(|a| a.symbol.index.unwrap_or(1))
        .max()
        .unwrap_or(0);
    if max_n == 0 {
        return e.clone();
    }
    let table = spec.table(max_n);
    e.substitute(|a| {
        let f = Family::from_base(&a.symbol.base)?;
        let n = a.symbol.index.unwrap_or(1);
        if n == 0 {
            return None;
        }
        let idx = match f {
            Family::L => 0,
            Family::Q => 1,
            Family::R => 2,
            Family::S => 3,
        };
        Some(table[(n - 1) as usize][idx].clone())
    })
}
