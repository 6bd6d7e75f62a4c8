use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;

use super::derive::{apply_derivative, DerivationRules};
use super::expr::{Atom, NcExpr, Symbol, VarIndex};
use super::NcError;
use crate::Q;

/// Symbols accepted in strict mode, keyed by base name; `indexed` bases also accept `B{n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolTable {
    pub plain: BTreeSet<String>,
    pub indexed: BTreeSet<String>,
}

impl SymbolTable {
    pub fn standard() -> Self {
        SymbolTable {
            plain: ["phi", "u", "nu", "f", "L", "Q", "R", "S", "K"].iter().map(|s| s.to_string()).collect(),
            indexed: ["L", "Q", "R", "S"].iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn with(mut self, name: &str) -> Self {
        self.plain.insert(name.to_string());
        self
    }

    fn accepts(&self, sym: &Symbol) -> bool {
        match sym.index {
            None => self.plain.contains(&sym.base),
            Some(_) => self.indexed.contains(&sym.base),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ParseOptions {
    pub strict: Option<SymbolTable>,
    pub rules: Option<DerivationRules>,
}

/// Parse with standard derivation rules and no symbol restriction.
pub fn parse(text: &str) -> Result<NcExpr, NcError> {
    parse_with(text, &ParseOptions::default())
}

pub fn parse_with(text: &str, opts: &ParseOptions) -> Result<NcExpr, NcError> {
    let standard = DerivationRules::standard();
    let rules = opts.rules.as_ref().unwrap_or(&standard);
    let mut p = Parser { src: text.as_bytes(), pos: 0, opts, rules };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected character"));
    }
    Ok(e)
}

/// Parse a variable such as `t{1,2}` or `th{2,1}`; returns the sign absorbed by θ canonicalization.
pub fn parse_var(text: &str) -> Result<(i32, VarIndex), NcError> {
    let opts = ParseOptions::default();
    let rules = DerivationRules::standard();
    let mut p = Parser { src: text.as_bytes(), pos: 0, opts: &opts, rules: &rules };
    let v = p.var()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected character"));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    opts: &'a ParseOptions,
    rules: &'a DerivationRules,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> NcError {
        let msg = if self.pos >= self.src.len() {
            alloc::format!("{} at end of input", msg)
        } else {
            msg.to_string()
        };
        NcError::Syntax { pos: self.pos, msg }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), NcError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&alloc::format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<NcExpr, NcError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<NcExpr, NcError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<NcExpr, NcError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let p = self.integer()?;
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    if !self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        return Err(self.err("expected denominator"));
                    }
                    let q = self.integer()?;
                    if q == BigInt::from(0) {
                        return Err(self.err("zero denominator"));
                    }
                    Ok(NcExpr::scalar(Q::new(p, q)))
                } else {
                    Ok(NcExpr::scalar(Q::from_integer(p)))
                }
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                let name = self.ident();
                if name == "D" && self.peek() == Some(b'[') {
                    return self.derivative();
                }
                let sym = if self.peek() == Some(b'{') {
                    self.pos += 1;
                    let i = self.small_int()?;
                    self.expect(b'}')?;
                    Symbol::indexed(&name, i)
                } else {
                    Symbol::new(&name)
                };
                if let Some(table) = &self.opts.strict {
                    if !table.accepts(&sym) {
                        return Err(NcError::UnknownSymbol { name: sym.to_string(), pos: start });
                    }
                }
                Ok(NcExpr::atom(Atom::new(sym)))
            }
            _ => Err(self.err("expected a factor")),
        }
    }

    fn derivative(&mut self) -> Result<NcExpr, NcError> {
        self.expect(b'[')?;
        let mut vars = Vec::new();
        loop {
            vars.push(self.var()?);
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b']') => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.err("expected ',' or ']'")),
            }
        }
        self.expect(b'(')?;
        let mut e = self.expr()?;
        self.expect(b')')?;
        for (sign, v) in vars {
            e = apply_derivative(&v, &e, self.rules)?;
            if sign < 0 {
                e = -e;
            }
        }
        Ok(e)
    }

    fn var(&mut self) -> Result<(i32, VarIndex), NcError> {
        self.skip_ws();
        let name = self.ident();
        match name.as_str() {
            "t" => {
                self.expect(b'{')?;
                let mut w = Vec::new();
                loop {
                    w.push(self.small_int()?);
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b'}') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.err("expected ',' or '}'")),
                    }
                }
                let v = VarIndex::composition(&w).map_err(|_| self.err("zero index in t{...}"))?;
                Ok((1, v))
            }
            "th" => {
                self.expect(b'{')?;
                let m = self.small_int()?;
                self.expect(b',')?;
                let n = self.small_int()?;
                self.expect(b'}')?;
                VarIndex::theta(m, n).map_err(|_| self.err("th{m,n} needs distinct positive indices"))
            }
            _ => Err(self.err("expected variable t{...} or th{m,n}")),
        }
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn digits(&mut self) -> Result<&str, NcError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        Ok(core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("0"))
    }

    fn integer(&mut self) -> Result<BigInt, NcError> {
        let d = self.digits()?;
        d.parse::<BigInt>().map_err(|_| NcError::Syntax { pos: self.pos, msg: "bad integer".to_string() })
    }

    fn small_int(&mut self) -> Result<u32, NcError> {
        let d = self.digits()?;
        d.parse::<u32>().map_err(|_| NcError::Syntax { pos: self.pos, msg: "index out of range".to_string() })
    }
}
