//! Built-in fixtures, the same files as `fixtures/` in the crate.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;

use crate::error::Failure;
use crate::formats::{base_dir, read_json};

const FIXTURES: &[(&str, &str)] = &[
    ("nckdv", include_str!("../fixtures/nckdv.json")),
    ("riccati", include_str!("../fixtures/riccati.json")),
    ("theta12-elimination", include_str!("../fixtures/theta12-elimination.json")),
    ("theta12-elimination-perturbed", include_str!("../fixtures/theta12-elimination-perturbed.json")),
    ("kdv-example", include_str!("../fixtures/kdv-example.json")),
    ("scalar", include_str!("../fixtures/scalar.json")),
    ("rect", include_str!("../fixtures/rect.json")),
    ("square", include_str!("../fixtures/square.json")),
    ("singular", include_str!("../fixtures/singular.json")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|(n, _)| *n)
}

pub fn builtin(name: &str) -> Option<&'static str> {
    let key = name.to_ascii_lowercase();
    FIXTURES.iter().find(|(n, _)| *n == key).map(|(_, text)| *text)
}

/// A fixture name or a path; returns the parsed value and the directory for relative references.
pub fn load<T: DeserializeOwned>(name_or_path: &str) -> Result<(T, PathBuf), Failure> {
    if let Some(text) = builtin(name_or_path) {
        let v = serde_json::from_str(text).map_err(|e| Failure::usage(format!("fixture {}: {}", name_or_path, e)))?;
        return Ok((v, PathBuf::new()));
    }
    let path = Path::new(name_or_path);
    if !path.exists() {
        let known: Vec<&str> = names().collect();
        return Err(Failure::usage(format!("no file or fixture named '{}' (fixtures: {})", name_or_path, known.join(", "))));
    }
    Ok((read_json(path)?, base_dir(path)))
}
