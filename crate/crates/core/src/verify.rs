//! Grid verification of the counting layer against the brute-force oracle,
//! plus per-vector consistency checks for the structure layer.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::legendre_u;
use crate::count::{
    closed_form_pivot_count, count_convolution, count_oracle_many, cp_branch, cp_coefficient,
    lower_bound_shifted, lower_bound_unit, valid_pivots, Ceilings, CountQuery,
};
use crate::error::{Error, Result};
use crate::mass::f;
use crate::padic::{self, DiagonalForm, LocalContext, LocalVector};
use crate::Rational;

/// Default `p^k` limit for the grid.
pub const DEFAULT_MAX_PK: u64 = 49;
/// Largest `r` used in the monotonicity check.
const MAX_R: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridConfig {
    pub primes: Vec<u64>,
    pub ks: Vec<u32>,
    pub ranks: Vec<usize>,
    pub max_pk: u64,
    /// Worker threads; 0 means the rayon default.
    pub jobs: usize,
    pub ceilings: Ceilings,
    /// Corrupt one convolution count, as a negative control.
    pub inject_fault: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            primes: vec![3, 5, 7],
            ks: vec![1, 2],
            ranks: vec![2, 3, 4],
            max_pk: DEFAULT_MAX_PK,
            jobs: 0,
            ceilings: Ceilings::default(),
            inject_fault: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct GridCell {
    pub p: u64,
    pub k: u32,
    pub coeffs: Vec<i64>,
    pub u: Vec<i64>,
}

impl fmt::Display for GridCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p={} k={} a={:?} u={:?}",
            self.p, self.k, self.coeffs, self.u
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    OracleConvolution,
    ClosedForm,
    Lifting,
    UnitBound,
    ShiftedBound,
    CpRange,
    MonotoneR,
    MassChain,
}

impl Property {
    pub const ALL: [Property; 8] = [
        Property::OracleConvolution,
        Property::ClosedForm,
        Property::Lifting,
        Property::UnitBound,
        Property::ShiftedBound,
        Property::CpRange,
        Property::MonotoneR,
        Property::MassChain,
    ];
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        f.write_str(s.as_str().expect("string"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub property: Property,
    pub checked: u64,
    pub passed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub property: Property,
    pub cell: GridCell,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub cells: usize,
    pub tallies: Vec<Tally>,
    pub violations: Vec<Violation>,
    /// `C_p` cases (1..=7) exercised by closed-form comparisons.
    pub cp_branches: Vec<u8>,
    /// `t_p mod 2` values exercised by closed-form comparisons.
    pub t_parities: Vec<u8>,
    /// Cells where the unit lower bound equals the exact count.
    pub tight_unit_bounds: Vec<GridCell>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn tally(&self, property: Property) -> &Tally {
        self.tallies
            .iter()
            .find(|t| t.property == property)
            .expect("every property is tallied")
    }
}

/// Smallest positive quadratic non-residue modulo `p`.
pub fn nonresidue(p: u64) -> u64 {
    (2..p).find(|&a| legendre_u(a, p) == -1).expect("odd prime")
}

/// Cells sorted lexicographically by `(p, k, coefficients, shift)`.
///
/// Coefficients are non-decreasing multisets over `{1, ν, p, p²}`; shifts
/// range over `{0, 1, 2}^ℓ` with gcd 1, taken non-increasing within runs of
/// equal coefficients.
pub fn grid_cells(cfg: &GridConfig) -> Vec<GridCell> {
    let mut out = Vec::new();
    for &p in &cfg.primes {
        for &k in &cfg.ks {
            if p.checked_pow(k).is_none_or(|pk| pk > cfg.max_pk) {
                continue;
            }
            for &l in &cfg.ranks {
                let pi = p as i64;
                let pool = [1, nonresidue(p) as i64, pi, pi * pi];
                for idx in multisets(pool.len(), l) {
                    let coeffs: Vec<i64> = idx.iter().map(|&i| pool[i]).collect();
                    for u in shifts(&coeffs) {
                        out.push(GridCell {
                            p,
                            k,
                            coeffs: coeffs.clone(),
                            u,
                        });
                    }
                }
            }
        }
    }
    out.sort();
    out
}

fn multisets(n: usize, l: usize) -> Vec<Vec<usize>> {
    if l == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in multisets(n, l - 1) {
        let lo = rest.last().copied().unwrap_or(0);
        for i in lo..n {
            let mut v = rest.clone();
            v.push(i);
            out.push(v);
        }
    }
    out
}

fn shifts(coeffs: &[i64]) -> Vec<Vec<i64>> {
    let l = coeffs.len();
    let mut out = Vec::new();
    for code in 0..3usize.pow(l as u32) {
        let u: Vec<i64> = (0..l)
            .map(|j| ((code / 3usize.pow(j as u32)) % 3) as i64)
            .collect();
        let canonical = (1..l).all(|j| coeffs[j] != coeffs[j - 1] || u[j] <= u[j - 1]);
        let g = u.iter().fold(0i64, |g, &x| g.gcd(&x));
        if canonical && g == 1 {
            out.push(u);
        }
    }
    out
}

#[derive(Default)]
struct CellOutcome {
    checks: Vec<(Property, bool)>,
    violations: Vec<Violation>,
    branches: BTreeSet<u8>,
    parities: BTreeSet<u8>,
    tight: bool,
}

impl CellOutcome {
    fn check(
        &mut self,
        cell: &GridCell,
        property: Property,
        ok: bool,
        detail: impl FnOnce() -> String,
    ) {
        self.checks.push((property, ok));
        if !ok {
            self.violations.push(Violation {
                property,
                cell: cell.clone(),
                detail: detail(),
            });
        }
    }
}

/// Run every property over the grid.
pub fn run_grid(cfg: &GridConfig) -> Result<VerifyReport> {
    let cells = grid_cells(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let outcomes: Vec<Result<CellOutcome>> = pool.install(|| {
        cells
            .par_iter()
            .enumerate()
            .map(|(i, cell)| check_cell(cell, cfg, cfg.inject_fault && i == 0))
            .collect()
    });

    let mut tallies: Vec<Tally> = Property::ALL
        .iter()
        .map(|&property| Tally {
            property,
            checked: 0,
            passed: 0,
        })
        .collect();
    let mut report = VerifyReport {
        cells: cells.len(),
        tallies: Vec::new(),
        violations: Vec::new(),
        cp_branches: Vec::new(),
        t_parities: Vec::new(),
        tight_unit_bounds: Vec::new(),
    };
    let mut branches = BTreeSet::new();
    let mut parities = BTreeSet::new();
    for (cell, outcome) in cells.iter().zip(outcomes) {
        let outcome = outcome?;
        for (property, ok) in outcome.checks {
            let t = tallies
                .iter_mut()
                .find(|t| t.property == property)
                .expect("tallied");
            t.checked += 1;
            t.passed += u64::from(ok);
        }
        report.violations.extend(outcome.violations);
        branches.extend(outcome.branches);
        parities.extend(outcome.parities);
        if outcome.tight {
            report.tight_unit_bounds.push(cell.clone());
        }
    }
    report.tallies = tallies;
    report.cp_branches = branches.into_iter().collect();
    report.t_parities = parities.into_iter().collect();
    Ok(report)
}

fn query(
    form: &DiagonalForm,
    cell: &GridCell,
    subset: &[usize],
    r: u32,
    k: u32,
) -> Result<CountQuery> {
    CountQuery::new(form.clone(), cell.u.clone(), subset.to_vec(), r, cell.p, k)
}

/// Oracle counts for `S ∈ {∅, I_{u,p}}` and `r ∈ 0..=MAX_R`, indexed
/// `[s][r]`, at modulus `p^k`.
fn family(
    form: &DiagonalForm,
    cell: &GridCell,
    unit_coords: &[usize],
    k: u32,
    ceilings: &Ceilings,
) -> Result<(Vec<CountQuery>, Vec<u128>)> {
    let mut qs = Vec::new();
    for s in [&[][..], unit_coords] {
        for r in 0..=MAX_R {
            qs.push(query(form, cell, s, r, k)?);
        }
    }
    let counts = count_oracle_many(&qs, ceilings.oracle)?
        .into_iter()
        .map(|c| c.count)
        .collect();
    Ok((qs, counts))
}

fn check_cell(cell: &GridCell, cfg: &GridConfig, fault: bool) -> Result<CellOutcome> {
    let mut out = CellOutcome::default();
    let (p, k) = (cell.p, cell.k);
    let form = DiagonalForm::new(cell.coeffs.clone())?;
    let l = form.rank();
    let pi = p as i64;
    let m = form.evaluate(&cell.u)?;
    let t = cell.coeffs.iter().filter(|&&a| a % pi != 0).count();
    let unit_coords: Vec<usize> = (0..l).filter(|&j| cell.u[j] % pi != 0).collect();
    let ctx = form.local(p)?;
    let d = padic::depth(&ctx, &ctx.vector(&cell.u)?)?;
    let per_r = (MAX_R + 1) as usize;

    let (qs, exact) = family(&form, cell, &unit_coords, k, &cfg.ceilings)?;
    let pivots = valid_pivots(&form, &cell.u, p)?;
    let pivot_qs = pivots
        .iter()
        .map(|&j| query(&form, cell, &[j], 0, k))
        .collect::<Result<Vec<_>>>()?;
    let pivot_exact: Vec<u128> = count_oracle_many(&pivot_qs, cfg.ceilings.oracle)?
        .into_iter()
        .map(|c| c.count)
        .collect();

    for (i, (q, &want)) in qs
        .iter()
        .zip(&exact)
        .chain(pivot_qs.iter().zip(&pivot_exact))
        .enumerate()
    {
        let mut got = count_convolution(q, cfg.ceilings.convolution)?.count;
        if fault && i == 0 {
            got += 1;
        }
        out.check(cell, Property::OracleConvolution, got == want, || {
            format!(
                "S={:?} r={}: convolution {got}, oracle {want}",
                q.subset(),
                q.r()
            )
        });
    }

    let mut pivot_counts = Vec::new();
    for (q, &want) in pivot_qs.iter().zip(&pivot_exact) {
        let j = q.subset()[0];
        let r_p = u32::from(legendre_u(cell.coeffs[j].rem_euclid(pi) as u64, p) == -1);
        let c = cp_coefficient(&m, p, t, r_p)?;
        let top = Rational::new(BigInt::from(p + 1), BigInt::from(p - 1));
        out.check(
            cell,
            Property::CpRange,
            c >= Rational::from_integer((-1).into()) && c <= top,
            || format!("C_p = {c} outside [-1, {top}]"),
        );
        match closed_form_pivot_count(q) {
            Ok(got) => {
                out.branches.insert(cp_branch(&m, p, t, r_p)?);
                out.parities.insert((t % 2) as u8);
                pivot_counts.push((j, want));
                out.check(cell, Property::ClosedForm, got.count == want, || {
                    format!("pivot {}: closed form {}, oracle {want}", j + 1, got.count)
                });
            }
            Err(Error::HypothesisViolated(_)) => {}
            Err(e) => return Err(e),
        }
    }

    if k >= 2 && k > d {
        let (_, below) = family(&form, cell, &unit_coords, k - 1, &cfg.ceilings)?;
        let scale = (p as u128).pow(l as u32 - 1);
        for r in 0..=1u32.min(k - 1) {
            let i = per_r + r as usize;
            out.check(
                cell,
                Property::Lifting,
                exact[i] == scale * below[i],
                || {
                    format!(
                        "S=I r={r}: {} at p^{k}, {} at p^{}",
                        exact[i],
                        below[i],
                        k - 1
                    )
                },
            );
        }
    }

    let p_divides_m = (&m % BigInt::from(p)).is_zero();
    if let Ok(bound) = lower_bound_unit(l, p, k, p_divides_m, t) {
        let count = Rational::from_integer(BigInt::from(exact[0]));
        out.check(cell, Property::UnitBound, count >= bound, || {
            format!("r(Q;u,p^k) = {count} below {bound}")
        });
        for &(j, want) in &pivot_counts {
            let count = Rational::from_integer(BigInt::from(want));
            out.tight |= count == bound;
            out.check(cell, Property::UnitBound, count >= bound, || {
                format!("pivot {}: r_{{j}} = {count} below {bound}", j + 1)
            });
        }
    }

    for r in 0..=MAX_R {
        if let Ok(bound) = lower_bound_shifted(l, d, r, p, k) {
            let count = Rational::from_integer(BigInt::from(exact[r as usize]));
            out.check(cell, Property::ShiftedBound, count >= bound, || {
                format!("r = {r}: count {count} below {bound}")
            });
        }
    }

    for s in 0..2 {
        let row = &exact[s * per_r..(s + 1) * per_r];
        out.check(
            cell,
            Property::MonotoneR,
            row.windows(2).all(|w| w[0] >= w[1]),
            || format!("counts over r = 0..={MAX_R}: {row:?}"),
        );
    }

    let omega2 = (form.determinant() % BigInt::from(p)).is_zero() && p_divides_m;
    if l >= 3 && !omega2 {
        let lhs = Rational::new(BigInt::from(exact[0]), 2.into());
        let rhs = Rational::from_integer(BigInt::from(p).pow((l as u32 - 1) * k)) * f(p)?;
        out.check(cell, Property::MassChain, lhs >= rhs, || {
            format!("r/2 = {lhs} below p^((ℓ-1)k) f_p = {rhs}")
        });
    }
    Ok(out)
}

/// Consistency failures of the structure layer on one primitive vector:
/// the James decomposition must recompose to `x` with summand indices equal
/// to the critical indices, and simplicity must agree with the witness test.
pub fn structure_violations(ctx: &LocalContext, x: &LocalVector) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let terms = padic::james_decompose(ctx, x)?;
    let crit = padic::critical_indices(ctx, x)?;
    let indices: Vec<u32> = terms.iter().map(|t| t.r).collect();
    if indices != crit {
        out.push(format!(
            "summand indices {indices:?} != critical indices {crit:?}"
        ));
    }
    let modulus = (ctx.p() as i128).pow(x.precision());
    let mut sum = vec![0i128; ctx.rank()];
    for term in &terms {
        let scale = (ctx.p() as i128).pow(term.b);
        for (s, &c) in sum.iter_mut().zip(term.lambda.coords()) {
            *s += scale * c as i128;
        }
        if padic::is_simple(ctx, &term.lambda)? != Some(term.r) {
            out.push(format!(
                "summand {:?} is not simple of index {}",
                term.lambda.coords(),
                term.r
            ));
        }
    }
    let recomposed = sum
        .iter()
        .zip(x.coords())
        .all(|(&s, &c)| (s - c as i128).rem_euclid(modulus) == 0);
    if !recomposed {
        out.push(format!("Σ p^b λ = {sum:?} differs from {:?}", x.coords()));
    }
    let direct = padic::is_simple(ctx, x)?;
    let witness = padic::simple_by_witness(ctx, x)?;
    if direct != witness {
        out.push(format!(
            "is_simple {direct:?} vs witness search {witness:?}"
        ));
    }
    Ok(out)
}
