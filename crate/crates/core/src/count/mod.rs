//! Exact counts of solutions to `Q(x) ≡ Q(u) (mod p^k)` over
//! `x ∈ (ℤ/p^k)^ℓ`, optionally restricted by
//!
//! * `p ∤ x_j` for every `j ∈ S`, and
//! * `x ≡ u (mod p^r)`.
//!
//! With `S = ∅` and `r = 0` the solutions must also be primitive
//! (`x ∉ pL`), which is the count `r(Q; u, p^k)` entering the mass ratio.
//! Three independent methods are provided: brute-force enumeration
//! ([`count_oracle`]), per-coordinate convolution ([`count_convolution`])
//! and the pivot closed form ([`closed_form_pivot_count`]).

mod bounds;
mod closed_form;
mod convolution;
mod oracle;

pub use bounds::{lower_bound_shifted, lower_bound_unit};
pub use closed_form::{
    closed_form_pivot_count, cp_branch, cp_coefficient, pivot_counts, valid_pivots,
};
pub use convolution::count_convolution;
pub use oracle::{count_oracle, count_oracle_many};

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::arith::check_odd_prime;
use crate::error::{Error, Result};
use crate::padic::DiagonalForm;

/// Default limit on `p^{kℓ}` for [`count_oracle`].
pub const DEFAULT_ORACLE_CEILING: u128 = 100_000_000;
/// Default limit on `p^k` for [`count_convolution`].
pub const DEFAULT_CONVOLUTION_CEILING: u64 = 19_683;
/// Environment variable overriding [`Ceilings`].
pub const CEILING_ENV: &str = "LATMASS_CEILING";

/// Enumeration ceilings for the exact counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Ceilings {
    pub oracle: u128,
    pub convolution: u64,
}

impl Default for Ceilings {
    fn default() -> Self {
        Self {
            oracle: DEFAULT_ORACLE_CEILING,
            convolution: DEFAULT_CONVOLUTION_CEILING,
        }
    }
}

impl Ceilings {
    /// Defaults, overridden by `LATMASS_CEILING` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(CEILING_ENV) {
            Ok(v) => Self::parse(&v),
            Err(_) => Ok(Self::default()),
        }
    }

    /// Parse `"N"` (oracle ceiling) or `"oracle=N,convolution=M"`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("bad {CEILING_ENV} value {spec:?}"));
        let mut out = Self::default();
        let spec = spec.trim();
        if let Ok(n) = spec.parse::<u128>() {
            out.oracle = n;
            return Ok(out);
        }
        for part in spec.split(',') {
            let (key, val) = part.split_once('=').ok_or_else(bad)?;
            match key.trim() {
                "oracle" => out.oracle = val.trim().parse().map_err(|_| bad())?,
                "convolution" => out.convolution = val.trim().parse().map_err(|_| bad())?,
                _ => return Err(bad()),
            }
        }
        Ok(out)
    }
}

/// Counting method that produced a [`CountResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Oracle,
    Convolution,
    ClosedForm,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Oracle => "oracle",
            Method::Convolution => "convolution",
            Method::ClosedForm => "closed-form",
        })
    }
}

/// A counting problem `(Q, u, S, r, p, k)`. Indices in `S` are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountQuery {
    form: DiagonalForm,
    u: Vec<i64>,
    subset: Vec<usize>,
    r: u32,
    p: u64,
    k: u32,
}

impl CountQuery {
    pub fn new(
        form: DiagonalForm,
        u: Vec<i64>,
        subset: Vec<usize>,
        r: u32,
        p: u64,
        k: u32,
    ) -> Result<Self> {
        check_odd_prime(p)?;
        if k == 0 {
            return Err(Error::InvalidInput("k must be ≥ 1".into()));
        }
        form.check_len(u.len())?;
        let mut subset = subset;
        subset.sort_unstable();
        subset.dedup();
        if let Some(&j) = subset.iter().find(|&&j| j >= form.rank()) {
            return Err(Error::InvalidInput(format!(
                "index {} outside 1..={}",
                j + 1,
                form.rank()
            )));
        }
        if r >= 1 && u.iter().all(|&x| x.rem_euclid(p as i64) == 0) {
            return Err(Error::NotPrimitive(p));
        }
        (p as u128)
            .checked_pow(k)
            .filter(|&m| m <= u64::MAX as u128)
            .ok_or(Error::TooLarge {
                size: u128::MAX,
                ceiling: u64::MAX as u128,
            })?;
        Ok(Self {
            form,
            u,
            subset,
            r,
            p,
            k,
        })
    }

    pub fn form(&self) -> &DiagonalForm {
        &self.form
    }

    pub fn u(&self) -> &[i64] {
        &self.u
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn rank(&self) -> usize {
        self.form.rank()
    }

    /// The same problem at another congruence modulus `p^k`.
    pub fn with_k(&self, k: u32) -> Result<Self> {
        Self::new(
            self.form.clone(),
            self.u.clone(),
            self.subset.clone(),
            self.r,
            self.p,
            k,
        )
    }

    pub fn with_r(&self, r: u32) -> Result<Self> {
        Self::new(
            self.form.clone(),
            self.u.clone(),
            self.subset.clone(),
            r,
            self.p,
            self.k,
        )
    }

    pub fn with_subset(&self, subset: Vec<usize>) -> Result<Self> {
        Self::new(
            self.form.clone(),
            self.u.clone(),
            subset,
            self.r,
            self.p,
            self.k,
        )
    }

    /// `m = Q(u)` over ℤ.
    pub fn m(&self) -> BigInt {
        self.form
            .evaluate(&self.u)
            .expect("length checked at construction")
    }

    /// `p^k`.
    pub(crate) fn modulus(&self) -> u64 {
        self.p.pow(self.k)
    }

    /// `Q(u) mod p^k`.
    pub(crate) fn target(&self) -> u64 {
        let m = BigInt::from(self.modulus());
        let t = ((self.m() % &m) + &m) % &m;
        t.to_u64().expect("reduced below p^k")
    }

    /// Modulus of the `x ≡ u` constraint, `p^min(r, k)`; 1 when `r = 0`.
    pub(crate) fn shift_modulus(&self) -> u64 {
        self.p.pow(self.r.min(self.k))
    }

    /// Primitivity is imposed explicitly only when nothing else forces it.
    pub(crate) fn requires_primitive(&self) -> bool {
        self.subset.is_empty() && self.r == 0
    }

    pub(crate) fn coeff_residue(&self, j: usize) -> u64 {
        let m = self.modulus() as i128;
        (self.form.coeffs()[j] as i128).rem_euclid(m) as u64
    }

    pub(crate) fn u_residue(&self, j: usize, m: u64) -> u64 {
        (self.u[j] as i128).rem_euclid(m as i128) as u64
    }
}

/// An exact count with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountResult {
    pub count: u128,
    pub method: Method,
    /// Pivot index (0-based) used by the closed form.
    pub pivot: Option<usize>,
}

/// Count with a specific method.
pub fn count_with(q: &CountQuery, method: Method, ceilings: &Ceilings) -> Result<CountResult> {
    match method {
        Method::Oracle => count_oracle(q, ceilings.oracle),
        Method::Convolution => count_convolution(q, ceilings.convolution),
        Method::ClosedForm => closed_form_pivot_count(q),
    }
}

/// Exact count by the cheapest method within the ceilings: convolution,
/// falling back to enumeration.
pub fn count_exact(q: &CountQuery, ceilings: &Ceilings) -> Result<CountResult> {
    match count_convolution(q, ceilings.convolution) {
        Err(Error::TooLarge { .. }) => count_oracle(q, ceilings.oracle),
        other => other,
    }
}
