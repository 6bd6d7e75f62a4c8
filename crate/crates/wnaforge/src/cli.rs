use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Clone, Debug, Parser)]
#[command(name = "wnaforge", version, about = "Derive and verify deformed KP hierarchy flows with exact arithmetic")]
pub struct Cli {
    /// Truncation degree D of all jets.
    #[arg(long, global = true)]
    pub order: Option<u32>,

    /// Solution spec: a JSON file or a built-in fixture (scalar, rect, square, singular).
    #[arg(long, global = true)]
    pub spec: Option<String>,

    /// Star product: ordinary, moyal, moyal:th{1,2}=1/2;th{1,3}=formal, composed:N, composed:N:t{1,2};t{2,1}.
    #[arg(long, global = true)]
    pub star: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,

    /// Directory for the report and any artifacts.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Bound on rewrite passes.
    #[arg(long, global = true, env = "WNAFORGE_MAX_ITER")]
    pub max_iter: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Latex,
    Plain,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Check that two flows commute, possibly modulo the other flows of the system.
    VerifyCommute {
        /// Flow system file or fixture (ncKdV, riccati).
        system: String,
        /// The two flows, e.g. `t2 t3`, `th12 t{1,2}`, `u:t3`; defaults to the pair in the file.
        flows: Vec<String>,
        /// Check every pair of flows of φ against the expected auxiliary sets.
        #[arg(long)]
        all: bool,
    },
    /// Derive a deformation equation from the WNA product structure.
    Derive {
        #[command(subcommand)]
        target: DeriveTarget,
        /// Largest m + n kept in the h-table.
        #[arg(long, global = true, default_value_t = wnaforge_core::wna::DEFAULT_DEPTH)]
        depth: u32,
    },
    /// Build the closed-form solution and run the residual suite on it.
    Solve,
    /// Check an identity modulo a flow system and constraints.
    Check {
        /// Check file or fixture (theta12-elimination, theta12-elimination-perturbed, kdv-example).
        file: String,
    },
    /// τ = det X and the scalar reduction (log τ)_{t1} − tr R.
    Tau,
    /// Compare a deformed product of exponentials with its quasi-symmetric exponent.
    XiCheck {
        /// k₁,…,k_N as rationals.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        k: Vec<String>,
        /// Level n of the product.
        #[arg(long, default_value_t = 2)]
        level: u32,
        /// Largest letter m in the variables t_{m₁…m_r}.
        #[arg(long, default_value_t = 3)]
        letters: u32,
    },
    /// Solve in t₁ and t_{1^k} only, then map back with the hat operator.
    Hat {
        /// Number K of deformation levels (t₁ … t_{1^K}, and t₂ … t_K after the map).
        #[arg(long, default_value_t = 3)]
        k: u32,
    },
}

#[derive(Clone, Debug, Subcommand)]
pub enum DeriveTarget {
    /// The θ_{mn} flow.
    Theta { m: u32, n: u32 },
    /// The t_{m₁…m_k} composition flow.
    Word {
        #[arg(required = true, num_args = 2..)]
        letters: Vec<u32>,
    },
}
