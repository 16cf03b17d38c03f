use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(
    name = "latmass",
    version,
    about = "Congruence counts, mass-ratio bounds and conductor limits for shifted quadratic lattices"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Read the command and its parameters from a JSON job file.
    #[arg(long, global = true, value_name = "FILE")]
    pub job: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Count solutions of Q(x) ≡ Q(u) mod p^k.
    Count(CountArgs),
    /// Lower bounds for the mass ratio m(L + u/c) / m(L).
    MassBound(MassArgs),
    /// Lower bound for the class number of L + u/c.
    ClassBound(ClassArgs),
    /// Largest odd conductors for class number one, ranks 3 to 10.
    Table1(TableArgs),
    /// Certified enclosure of the constant C_δ.
    Cdelta(CdeltaArgs),
    /// p-adic invariants of a vector in a diagonal lattice.
    Structure(StructureArgs),
    /// Check every counting property over the verification grid.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Oracle,
    Convolution,
    ClosedForm,
}

#[derive(Debug, Clone, Args)]
pub struct CountArgs {
    /// Diagonal coefficients a_1,…,a_ℓ.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub form: Vec<i64>,
    /// Shift vector u.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub u: Vec<i64>,
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub k: u32,
    /// Congruence depth: require x ≡ u mod p^r.
    #[arg(long, default_value_t = 0)]
    pub r: u32,
    /// Indices (1-based) j with p ∤ x_j required.
    #[arg(long = "subset", short = 'S', value_delimiter = ',')]
    pub subset: Vec<usize>,
    /// Pivot index (1-based); shorthand for --subset j.
    #[arg(long, conflicts_with = "subset")]
    pub pivot: Option<usize>,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "oracle,convolution"
    )]
    pub methods: Vec<MethodArg>,
}

#[derive(Debug, Clone, Args)]
pub struct MassArgs {
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub form: Vec<i64>,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub u: Vec<i64>,
    /// Odd conductor c.
    #[arg(long)]
    pub c: u64,
    /// m(L); adds the class-number bound when given.
    #[arg(long = "mass-of-L", alias = "mass-of-l")]
    pub mass_of_l: Option<String>,
    #[arg(long, default_value = "1/2")]
    pub delta: String,
    /// Width of the interval enclosures.
    #[arg(long, default_value = "1/1000000")]
    pub width: String,
}

#[derive(Debug, Clone, Args)]
pub struct ClassArgs {
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub form: Vec<i64>,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub u: Vec<i64>,
    #[arg(long)]
    pub c: u64,
    #[arg(long = "mass-of-L", alias = "mass-of-l")]
    pub mass_of_l: String,
    #[arg(long, default_value = "1/2")]
    pub delta: String,
    #[arg(long, default_value = "1/1000000")]
    pub width: String,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[arg(long, default_value = "1/2")]
    pub delta: String,
    /// Lower bound for C_δ, or `auto` to compute one.
    #[arg(long, default_value = "13/200")]
    pub c_lo: String,
}

#[derive(Debug, Clone, Args)]
pub struct CdeltaArgs {
    #[arg(long, default_value = "1/2")]
    pub delta: String,
    #[arg(long, default_value = "1/10000")]
    pub width: String,
}

#[derive(Debug, Clone, Args)]
pub struct StructureArgs {
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub form: Vec<i64>,
    #[arg(long)]
    pub p: u64,
    /// The vector to analyse.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub x: Vec<i64>,
    /// A second vector to test for association with x.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub y: Option<Vec<i64>>,
    /// Working precision K (coordinates are taken mod p^K).
    #[arg(long)]
    pub precision: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Largest p^k in the grid.
    #[arg(long, default_value_t = latmass::verify::DEFAULT_MAX_PK)]
    pub max_pk: u64,
    /// Worker threads (0: one per core).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Corrupt one count to exercise the failure path.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

/// Contents of a `--job` file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: String,
    pub form: Option<Vec<i64>>,
    pub u: Option<Vec<i64>>,
    pub c: Option<u64>,
    pub p: Option<u64>,
    pub k: Option<u32>,
    pub r: Option<u32>,
    #[serde(alias = "S")]
    pub subset: Option<Vec<usize>>,
    pub pivot: Option<usize>,
    pub methods: Option<Vec<String>>,
    pub delta: Option<String>,
    pub c_lo: Option<String>,
    pub width: Option<String>,
    pub mass_of_l: Option<String>,
    pub x: Option<Vec<i64>>,
    pub y: Option<Vec<i64>>,
    pub precision: Option<u32>,
    pub max_pk: Option<u64>,
    pub jobs: Option<usize>,
    pub format: Option<Format>,
}

impl JobSpec {
    /// Equivalent command line, so jobs go through the same validation.
    pub fn to_argv(&self) -> Vec<String> {
        fn list<T: ToString>(v: &[T]) -> String {
            v.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        }
        let mut argv = vec!["latmass".to_string(), self.command.clone()];
        let mut push = |flag: &str, value: Option<String>| {
            if let Some(v) = value {
                argv.push(format!("--{flag}={v}"));
            }
        };
        push("form", self.form.as_deref().map(list));
        push("u", self.u.as_deref().map(list));
        push("c", self.c.map(|v| v.to_string()));
        push("p", self.p.map(|v| v.to_string()));
        push("k", self.k.map(|v| v.to_string()));
        push("r", self.r.map(|v| v.to_string()));
        push("subset", self.subset.as_deref().map(list));
        push("pivot", self.pivot.map(|v| v.to_string()));
        push("methods", self.methods.as_deref().map(list));
        push("delta", self.delta.clone());
        push("c-lo", self.c_lo.clone());
        push("width", self.width.clone());
        push("mass-of-L", self.mass_of_l.clone());
        push("x", self.x.as_deref().map(list));
        push("y", self.y.as_deref().map(list));
        push("precision", self.precision.map(|v| v.to_string()));
        push("max-pk", self.max_pk.map(|v| v.to_string()));
        push("jobs", self.jobs.map(|v| v.to_string()));
        argv
    }
}
