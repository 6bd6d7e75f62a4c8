use alloc::string::{String, ToString};
use core::fmt::{self, Write};

use num_traits::{One, Signed};

use super::expr::{Atom, NcExpr, Symbol, VarIndex, Word};
use crate::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Plain,
    Latex,
}

pub fn render(e: &NcExpr, format: Format) -> String {
    match format {
        Format::Plain => render_plain(e),
        Format::Latex => render_latex(e),
    }
}

pub fn atom_plain(a: &Atom) -> String {
    if a.derivs().is_empty() {
        return a.symbol.to_string();
    }
    let mut s = String::from("D[");
    for (i, v) in a.derivs().iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{}", v);
    }
    let _ = write!(s, "]({})", a.symbol);
    s
}

fn word_plain(w: &Word) -> String {
    let parts: alloc::vec::Vec<String> = w.atoms().iter().map(atom_plain).collect();
    parts.join("*")
}

/// DSL text; parsing it gives back the same expression.
pub fn render_plain(e: &NcExpr) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (w, c)) in e.terms().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if w.is_empty() {
            let _ = write!(s, "{}", mag);
        } else if mag.is_one() {
            s.push_str(&word_plain(w));
        } else {
            let _ = write!(s, "{}*{}", mag, word_plain(w));
        }
    }
    s
}

fn symbol_latex(sym: &Symbol) -> String {
    let base = match sym.base.as_str() {
        "phi" => "\\phi",
        "nu" => "\\nu",
        "theta" => "\\theta",
        "varphi" => "\\varphi",
        other => other,
    };
    match sym.index {
        Some(i) => alloc::format!("{}_{{{}}}", base, i),
        None => base.to_string(),
    }
}

fn var_latex(v: &VarIndex) -> String {
    match v {
        VarIndex::Composition(w) if w.len() == 1 => alloc::format!("t_{}", w[0]),
        VarIndex::Composition(w) => {
            let sep = if w.iter().any(|m| *m >= 10) { "," } else { "" };
            let idx: alloc::vec::Vec<String> = w.iter().map(|m| m.to_string()).collect();
            alloc::format!("t_{{{}}}", idx.join(sep))
        }
        VarIndex::Theta(m, n) => {
            if *m >= 10 || *n >= 10 {
                alloc::format!("\\theta_{{{},{}}}", m, n)
            } else {
                alloc::format!("\\theta_{{{}{}}}", m, n)
            }
        }
    }
}

pub fn atom_latex(a: &Atom) -> String {
    let base = symbol_latex(&a.symbol);
    if a.derivs().is_empty() {
        return base;
    }
    let subs: alloc::vec::Vec<String> = a.derivs().iter().map(var_latex).collect();
    if a.symbol.index.is_some() {
        alloc::format!("({})_{{{}}}", base, subs.join(" "))
    } else {
        alloc::format!("{}_{{{}}}", base, subs.join(" "))
    }
}

fn coeff_latex(c: &Q) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        alloc::format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom())
    }
}

pub fn render_latex(e: &NcExpr) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (w, c)) in e.terms().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let body: alloc::vec::Vec<String> = w.atoms().iter().map(atom_latex).collect();
        let body = body.join(" ");
        if w.is_empty() {
            s.push_str(&coeff_latex(&mag));
        } else if mag.is_one() {
            s.push_str(&body);
        } else {
            let _ = write!(s, "{} {}", coeff_latex(&mag), body);
        }
    }
    s
}

impl fmt::Display for NcExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_plain(self))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&atom_plain(self))
    }
}
