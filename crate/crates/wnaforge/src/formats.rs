//! JSON input files: rational matrices, solution specs, flow systems and identity checks.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use wnaforge_core::flows::{ConstantSpec, FlowSystem, MoyalForm};
use wnaforge_core::jets::{SolutionSpec, StarSpec, ThetaParam};
use wnaforge_core::linalg::RatMatrix;
use wnaforge_core::ncpoly::{parse, parse_var, NcExpr, Symbol, VarIndex};
use wnaforge_core::Q;

use crate::error::Failure;

/// `{"rows": 2, "cols": 2, "data": [["1", "1/2"], ["0", "-3"]]}`
#[derive(Clone, Debug, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<String>>,
}

impl MatrixFile {
    pub fn to_matrix(&self) -> Result<RatMatrix, Failure> {
        if self.data.len() != self.rows || self.data.iter().any(|r| r.len() != self.cols) {
            return Err(Failure::usage(format!("matrix data does not have shape {}x{}", self.rows, self.cols)));
        }
        let mut m = RatMatrix::zeros(self.rows, self.cols);
        for (i, row) in self.data.iter().enumerate() {
            for (j, s) in row.iter().enumerate() {
                m.set(i, j, parse_rational(s)?);
            }
        }
        Ok(m)
    }
}

/// A matrix given inline or as a path to a matrix file, relative to the referring file.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum MatrixRef {
    Inline(MatrixFile),
    Path(String),
}

impl MatrixRef {
    pub fn load(&self, base: &Path) -> Result<RatMatrix, Failure> {
        match self {
            MatrixRef::Inline(m) => m.to_matrix(),
            MatrixRef::Path(p) => {
                let path = base.join(p);
                let m: MatrixFile = read_json(&path)?;
                m.to_matrix()
            }
        }
    }
}

pub fn parse_rational(s: &str) -> Result<Q, Failure> {
    s.trim().parse::<Q>().map_err(|_| Failure::usage(format!("not a rational number: '{}'", s)))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {}", path.display(), e)))?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {}", path.display(), e)))
}

pub fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// Flow variables: `t{1,2}`, `th{1,3}`, or the shorthands `t3`, `th13`.
pub fn parse_flow_var(s: &str) -> Result<VarIndex, Failure> {
    let s = s.trim();
    if s.contains('{') {
        let (sign, v) = parse_var(s).map_err(|e| Failure::usage(format!("{}: {}", s, e)))?;
        if sign < 0 {
            return Err(Failure::usage(format!("{} is not in canonical order", s)));
        }
        return Ok(v);
    }
    let digits = |t: &str| t.chars().all(|c| c.is_ascii_digit()) && !t.is_empty();
    if let Some(rest) = s.strip_prefix("th") {
        if rest.len() == 2 && digits(rest) {
            let m = rest[..1].parse().unwrap();
            let n = rest[1..].parse().unwrap();
            if m < n {
                return Ok(VarIndex::Theta(m, n));
            }
        }
    } else if let Some(rest) = s.strip_prefix('t') {
        if digits(rest) {
            let n: u32 = rest.parse().unwrap();
            if n > 0 {
                return Ok(VarIndex::t(n));
            }
        }
    }
    Err(Failure::usage(format!("cannot read flow variable '{}'", s)))
}

/// A parsed `--star` value: the product and, for composed products, the parameters
/// `t_{m₁…m_r}` that enter the ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarChoice {
    pub spec: StarSpec,
    pub words: Vec<Vec<u32>>,
}

/// `ordinary`, `moyal`, `moyal:th{1,2}=1/2;th13=formal`, `composed:N`, `composed:N:t{1,2};t{2,1}`.
///
/// Plain `moyal` makes every θ_{mn} over the active t-variables formal; the list form fixes
/// the parameters given and leaves the rest out of the product. Plain `composed:N` takes every
/// word of length 2..=N over the active variables; the list form keeps only the words given,
/// which sets the other parameters to zero.
pub fn parse_star(s: &str, vars: &[u32]) -> Result<StarChoice, Failure> {
    let s = s.trim();
    let plain = |spec| Ok(StarChoice { spec, words: Vec::new() });
    if s == "ordinary" {
        return plain(StarSpec::Ordinary);
    }
    if s == "moyal" {
        let mut map = std::collections::BTreeMap::new();
        for (i, &m) in vars.iter().enumerate() {
            for &n in &vars[i + 1..] {
                map.insert((m.min(n), m.max(n)), ThetaParam::Formal);
            }
        }
        return plain(StarSpec::Moyal(map));
    }
    if let Some(list) = s.strip_prefix("moyal:") {
        let mut map = std::collections::BTreeMap::new();
        for item in list.split(';').filter(|x| !x.trim().is_empty()) {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Failure::usage(format!("expected th{{m,n}}=value in '{}'", item)))?;
            let (m, n) = match parse_flow_var(name)? {
                VarIndex::Theta(m, n) => (m, n),
                v => return Err(Failure::usage(format!("{} is not a Moyal parameter", v))),
            };
            let p = if value.trim() == "formal" { ThetaParam::Formal } else { ThetaParam::Value(parse_rational(value)?) };
            map.insert((m, n), p);
        }
        return plain(StarSpec::Moyal(map));
    }
    if let Some(rest) = s.strip_prefix("composed:") {
        let (level, list) = match rest.split_once(':') {
            Some((l, list)) => (l, Some(list)),
            None => (rest, None),
        };
        let n: u32 = level.trim().parse().map_err(|_| Failure::usage(format!("bad composed level '{}'", level)))?;
        if n < 2 {
            return Err(Failure::usage("composed level must be at least 2"));
        }
        let words = match list {
            None => all_words(vars, n),
            Some(list) => {
                let mut words = Vec::new();
                for item in list.split(';').filter(|x| !x.trim().is_empty()) {
                    match parse_flow_var(item)? {
                        VarIndex::Composition(w) if (2..=n as usize).contains(&w.len()) => words.push(w),
                        v => return Err(Failure::usage(format!("{} is not a parameter of composed:{}", v, n))),
                    }
                }
                words
            }
        };
        return Ok(StarChoice { spec: StarSpec::Composed(n), words });
    }
    Err(Failure::usage(format!("unknown star product '{}' (ordinary, moyal, moyal:..., composed:N)", s)))
}

/// Words of length 2..=level over `letters`, shortest first.
pub fn all_words(letters: &[u32], level: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<u32>> = letters.iter().map(|&m| vec![m]).collect();
    for _ in 1..level {
        frontier = frontier
            .iter()
            .flat_map(|w| letters.iter().map(move |&m| w.iter().copied().chain([m]).collect::<Vec<u32>>()))
            .collect();
        out.extend(frontier.iter().cloned());
    }
    out
}

/// Input for `solve`, `tau` and `hat`.
#[derive(Clone, Debug, Deserialize)]
pub struct SolutionFile {
    #[serde(rename = "L")]
    pub l: MatrixRef,
    #[serde(rename = "R")]
    pub r: MatrixRef,
    #[serde(rename = "K")]
    pub k: MatrixRef,
    pub phi0: MatrixRef,
    /// Active t-variables; defaults to t₁, t₂, t₃.
    #[serde(default)]
    pub vars: Option<Vec<u32>>,
    #[serde(default)]
    pub star: Option<String>,
    #[serde(default)]
    pub order: Option<u32>,
}

pub struct SolutionInput {
    pub l: RatMatrix,
    pub r: RatMatrix,
    pub k: RatMatrix,
    pub phi0: RatMatrix,
    pub vars: Vec<u32>,
    pub star: Option<String>,
    pub order: Option<u32>,
}

impl SolutionInput {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        Self::from_file(read_json(path)?, &base_dir(path))
    }

    pub fn from_file(f: SolutionFile, base: &Path) -> Result<Self, Failure> {
        let vars = f.vars.unwrap_or_else(|| vec![1, 2, 3]);
        if vars.is_empty() || vars.contains(&0) {
            return Err(Failure::usage("vars must be a non-empty list of positive integers"));
        }
        Ok(SolutionInput {
            l: f.l.load(base)?,
            r: f.r.load(base)?,
            k: f.k.load(base)?,
            phi0: f.phi0.load(base)?,
            vars,
            star: f.star,
            order: f.order,
        })
    }

    pub fn spec(&self, ring: &std::sync::Arc<wnaforge_core::jets::JetRing>, xi: &[u32], star: StarSpec) -> Result<SolutionSpec, Failure> {
        SolutionSpec::new(self.l.clone(), self.r.clone(), self.k.clone(), self.phi0.clone(), xi.to_vec(), ring.clone(), star)
            .map_err(|e| Failure::usage(e.to_string()))
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct ConstantsFile {
    #[serde(default)]
    pub s_zero: bool,
    #[serde(default)]
    pub q_rk_kl: bool,
}

#[derive(Clone, Debug, Deserialize)]
pub struct MoyalEntry {
    pub m: u32,
    pub n: u32,
    #[serde(default)]
    pub form: FormName,
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormName {
    #[default]
    Ode,
    Derivative,
}

impl From<FormName> for MoyalForm {
    fn from(f: FormName) -> Self {
        match f {
            FormName::Ode => MoyalForm::Ode,
            FormName::Derivative => MoyalForm::Derivative,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct CompositionEntry {
    pub word: Vec<u32>,
    #[serde(default = "yes")]
    pub unfold: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize)]
pub struct FlowEntry {
    pub symbol: String,
    pub var: String,
    pub rhs: String,
}

/// A flow system: Riccati, Moyal and composition flows of φ plus explicit flows in the DSL.
#[derive(Clone, Debug, Default, Deserialize)]
pub struct FlowFile {
    #[serde(default)]
    pub constants: ConstantsFile,
    #[serde(default)]
    pub riccati: Vec<u32>,
    #[serde(default)]
    pub moyal: Vec<MoyalEntry>,
    #[serde(default)]
    pub composition: Vec<CompositionEntry>,
    #[serde(default)]
    pub flows: Vec<FlowEntry>,
    /// The two flows compared by `verify-commute`, as `symbol:var` or bare vars of φ.
    #[serde(default)]
    pub pair: Option<[String; 2]>,
}

impl FlowFile {
    pub fn build(&self, max_iter: Option<usize>) -> Result<FlowSystem, Failure> {
        let constants = ConstantSpec { s_zero: self.constants.s_zero, q_rk_kl: self.constants.q_rk_kl };
        let mut sys = FlowSystem::riccati(&self.riccati, constants);
        for e in &self.moyal {
            sys.add_moyal(e.m, e.n, e.form.into()).map_err(|e| Failure::usage(e.to_string()))?;
        }
        for e in &self.composition {
            sys.add_composition(&e.word, e.unfold).map_err(|e| Failure::usage(e.to_string()))?;
        }
        for e in &self.flows {
            let var = parse_flow_var(&e.var)?;
            let rhs = parse_expr(&e.rhs)?;
            sys.insert(Symbol::new(&e.symbol), var, rhs);
        }
        if let Some(n) = max_iter {
            sys.max_iter = n;
        }
        Ok(sys)
    }
}

pub fn parse_expr(s: &str) -> Result<NcExpr, Failure> {
    parse(s).map_err(|e| Failure::usage(format!("{} in '{}'", e, s)))
}

/// `symbol:var` or a bare variable (symbol φ).
pub fn parse_flow_key(s: &str) -> Result<(Symbol, VarIndex), Failure> {
    match s.split_once(':') {
        Some((sym, var)) => Ok((Symbol::new(sym.trim()), parse_flow_var(var)?)),
        None => Ok((Symbol::new("phi"), parse_flow_var(s)?)),
    }
}

/// Input for `check`: `candidate − target` must vanish modulo the flows and constraints.
#[derive(Clone, Debug, Deserialize)]
pub struct CheckFile {
    pub flows: FlowFile,
    pub candidate: String,
    pub target: String,
    #[serde(default)]
    pub constraints: Vec<String>,
}
