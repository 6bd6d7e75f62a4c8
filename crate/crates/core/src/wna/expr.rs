use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use core::fmt::{self, Write};
use core::ops::{Add, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::ncpoly::{atom_latex, atom_plain, Format, NcExpr, Word};
use crate::Q;

use super::WnaError;

/// A monomial of the WNA algebra: the generator `f`, a nucleus monomial, or a graded product.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tree {
    F,
    /// Product of nucleus atoms; concatenation is `∘`.
    N(Word),
    Prod(u32, Box<Tree>, Box<Tree>),
}

impl Tree {
    /// Everything except the bare generator lies in the middle nucleus.
    pub fn is_nucleus(&self) -> bool {
        !matches!(self, Tree::F)
    }

    pub fn max_grade(&self) -> u32 {
        match self {
            Tree::Prod(n, a, b) => (*n).max(a.max_grade()).max(b.max_grade()),
            _ => 0,
        }
    }

    pub fn render(&self, format: Format) -> String {
        let mut s = String::new();
        self.write(&mut s, format, true);
        s
    }

    fn write(&self, s: &mut String, format: Format, top: bool) {
        match self {
            Tree::F => s.push('f'),
            Tree::N(w) => {
                let sep = match format {
                    Format::Plain => "∘",
                    Format::Latex => " \\circ ",
                };
                let wrap = !top && w.len() > 1;
                if wrap {
                    s.push('(');
                }
                for (i, a) in w.atoms().iter().enumerate() {
                    if i > 0 {
                        s.push_str(sep);
                    }
                    match format {
                        Format::Plain => s.push_str(&atom_plain(a)),
                        Format::Latex => s.push_str(&atom_latex(a)),
                    }
                }
                if wrap {
                    s.push(')');
                }
            }
            Tree::Prod(n, a, b) => {
                if !top {
                    s.push('(');
                }
                a.write(s, format, false);
                match (format, *n) {
                    (Format::Plain, 1) => s.push('∘'),
                    (Format::Plain, n) => {
                        let _ = write!(s, "∘_{}", n);
                    }
                    (Format::Latex, 1) => s.push_str(" \\circ "),
                    (Format::Latex, n) => {
                        let _ = write!(s, " \\circ_{{{}}} ", n);
                    }
                }
                b.write(s, format, false);
                if !top {
                    s.push(')');
                }
            }
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Format::Plain))
    }
}

/// Rational linear combination of [`Tree`]s.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WnaExpr {
    terms: BTreeMap<Tree, Q>,
}

impl WnaExpr {
    pub fn zero() -> Self {
        WnaExpr::default()
    }

    pub fn f() -> Self {
        WnaExpr::tree(Tree::F)
    }

    pub fn tree(t: Tree) -> Self {
        let mut e = WnaExpr::zero();
        e.add_tree(Q::one(), t);
        e
    }

    /// Embed a nucleus element. A bare `f` atom or a constant term is rejected since neither
    /// lies in the nucleus.
    pub fn nucleus(e: &NcExpr) -> Result<Self, WnaError> {
        let mut out = WnaExpr::zero();
        for (w, c) in e.terms() {
            if w.is_empty() {
                return Err(WnaError::Invalid("nucleus elements have no constant term".into()));
            }
            if w.atoms().iter().any(|a| a.symbol.base == "f" && a.derivs().is_empty()) {
                return Err(WnaError::Invalid("bare f is not a nucleus element; use WnaExpr::f".into()));
            }
            out.add_tree(c.clone(), Tree::N(w.clone()));
        }
        Ok(out)
    }

    pub fn add_tree(&mut self, c: Q, t: Tree) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(t.clone()).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&t);
        }
    }

    pub fn add_scaled(&mut self, c: &Q, other: &WnaExpr) {
        for (t, d) in &other.terms {
            self.add_tree(c * d, t.clone());
        }
    }

    pub fn scale(&self, c: &Q) -> WnaExpr {
        let mut out = WnaExpr::zero();
        out.add_scaled(c, self);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Tree, &Q)> {
        self.terms.iter()
    }

    pub fn max_grade(&self) -> u32 {
        self.terms.keys().map(Tree::max_grade).max().unwrap_or(0)
    }

    /// Unreduced grade-n product node, extended bilinearly.
    pub fn prod(n: u32, a: &WnaExpr, b: &WnaExpr) -> WnaExpr {
        assert!(n >= 1, "grades start at 1");
        let mut out = WnaExpr::zero();
        for (x, c) in &a.terms {
            for (y, d) in &b.terms {
                out.add_tree(c * d, Tree::Prod(n, Box::new(x.clone()), Box::new(y.clone())));
            }
        }
        out
    }

    /// Grade-1 normal form: higher grades unfolded by `a∘_{n}b = a∘(f∘_{n−1}b) − (a∘f)∘_{n−1}b`,
    /// then products reassociated to the right whenever the middle factor is a nucleus element.
    pub fn normal_form(&self) -> WnaExpr {
        let mut out = WnaExpr::zero();
        for (t, c) in &self.terms {
            out.add_scaled(c, &normal_tree(t));
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (t, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mag = c.abs();
            if !mag.is_one() {
                match format {
                    Format::Plain => {
                        let _ = write!(s, "{}*", mag);
                    }
                    Format::Latex if mag.is_integer() => {
                        let _ = write!(s, "{} ", mag);
                    }
                    Format::Latex => {
                        let _ = write!(s, "\\frac{{{}}}{{{}}} ", mag.numer(), mag.denom());
                    }
                }
                let compound = matches!(t, Tree::Prod(..)) || matches!(t, Tree::N(w) if w.len() > 1);
                if compound {
                    s.push('(');
                    s.push_str(&t.render(format));
                    s.push(')');
                    continue;
                }
            }
            s.push_str(&t.render(format));
        }
        s
    }
}

impl fmt::Display for WnaExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Format::Plain))
    }
}

impl Add for &WnaExpr {
    type Output = WnaExpr;
    fn add(self, rhs: &WnaExpr) -> WnaExpr {
        let mut out = self.clone();
        out.add_scaled(&Q::one(), rhs);
        out
    }
}

impl Sub for &WnaExpr {
    type Output = WnaExpr;
    fn sub(self, rhs: &WnaExpr) -> WnaExpr {
        let mut out = self.clone();
        out.add_scaled(&-Q::one(), rhs);
        out
    }
}

impl Add for WnaExpr {
    type Output = WnaExpr;
    fn add(self, rhs: WnaExpr) -> WnaExpr {
        &self + &rhs
    }
}

impl Sub for WnaExpr {
    type Output = WnaExpr;
    fn sub(self, rhs: WnaExpr) -> WnaExpr {
        &self - &rhs
    }
}

impl Neg for WnaExpr {
    type Output = WnaExpr;
    fn neg(self) -> WnaExpr {
        self.scale(&-Q::one())
    }
}

/// `a ∘_n b` in grade-1 normal form.
pub fn circ(n: u32, a: &WnaExpr, b: &WnaExpr) -> WnaExpr {
    assert!(n >= 1, "grades start at 1");
    circ_nf(n, &a.normal_form(), &b.normal_form())
}

fn normal_tree(t: &Tree) -> WnaExpr {
    match t {
        Tree::F | Tree::N(_) => WnaExpr::tree(t.clone()),
        Tree::Prod(n, a, b) => circ_nf(*n, &normal_tree(a), &normal_tree(b)),
    }
}

fn circ_nf(n: u32, a: &WnaExpr, b: &WnaExpr) -> WnaExpr {
    if n == 1 {
        let mut out = WnaExpr::zero();
        for (x, c) in &a.terms {
            for (y, d) in &b.terms {
                out.add_tree(c * d, mul1(x, y));
            }
        }
        return out;
    }
    let f = WnaExpr::f();
    let first = circ_nf(1, a, &circ_nf(n - 1, &f, b));
    let second = circ_nf(n - 1, &circ_nf(1, a, &f), b);
    first - second
}

fn mul1(x: &Tree, y: &Tree) -> Tree {
    match (x, y) {
        (Tree::Prod(1, a, b), _) if b.is_nucleus() => mul1(a, &mul1(b, y)),
        (Tree::N(u), Tree::N(v)) => Tree::N(u.concat(v)),
        (Tree::N(_), Tree::Prod(1, c, d)) if matches!(**c, Tree::N(_)) => mul1(&mul1(x, c), d),
        _ => Tree::Prod(1, Box::new(x.clone()), Box::new(y.clone())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Left: `f∘_n a = L_fⁿa − Σ_{k=1}^{n−1} p_{n−k}∘L_f^{k−1}a`.
/// Right: `a∘_n f = (−1)^{n+1}R_fⁿa − Σ_{k=1}^{n−1}(−1)^k (R_f^{k−1}a)∘p_{n−k}`.
/// Here `p_j = f∘_j f` is kept as an unreduced grade-j node.
pub fn lemma_expand(side: Side, n: u32, a: &WnaExpr) -> WnaExpr {
    assert!(n >= 1, "grades start at 1");
    let f = WnaExpr::f();
    let p = |j: u32| WnaExpr::prod(j, &f, &f);
    let act = |x: &WnaExpr| match side {
        Side::Left => WnaExpr::prod(1, &f, x),
        Side::Right => WnaExpr::prod(1, x, &f),
    };
    let mut powers = alloc::vec![a.clone()];
    for _ in 0..n {
        let next = act(powers.last().expect("non-empty"));
        powers.push(next);
    }
    let mut out = match side {
        Side::Left => powers[n as usize].clone(),
        Side::Right => powers[n as usize].scale(&sign(n + 1)),
    };
    for k in 1..n {
        let corr = match side {
            Side::Left => WnaExpr::prod(1, &p(n - k), &powers[(k - 1) as usize]),
            Side::Right => WnaExpr::prod(1, &powers[(k - 1) as usize], &p(n - k)).scale(&sign(k)),
        };
        out = out - corr;
    }
    out
}

fn sign(k: u32) -> Q {
    if k % 2 == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}
