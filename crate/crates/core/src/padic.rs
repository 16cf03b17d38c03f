//! Structure theory of diagonal ℤ_p-lattices for odd `p`.
//!
//! A lattice `L = ℤ_p^ℓ` carries the diagonal form `Σ a_j x_j²`, so
//! `½B(x, y) = Σ a_j x_j y_j`. Everything here reduces to the per-coordinate
//! exponents `e_j = ord_p(a_j)`:
//!
//! * `v(L; x) = min_j (e_j + ord_p(x_j))`
//! * `L^(r) = ⊕_j p^max(0, r − e_j) ℤ_p`, hence
//!   `v(L^(r); x) = min_j (max(e_j, r) + ord_p(x_j))`.
//!
//! ℤ_p elements are integer representatives modulo `p^K`. A coordinate that
//! vanishes modulo `p^K` has unknown order `≥ K`; any answer that such a
//! coordinate could undercut is reported as [`Error::PrecisionError`].

use num_bigint::BigInt;
use serde::Serialize;

use crate::arith::{self, check_odd_prime, legendre_u, Valuation};
use crate::error::{Error, Result};

/// `p^K` must stay below this so residues multiply inside `i128`.
const MAX_MODULUS: i128 = 1 << 62;

/// Diagonal integral quadratic form `a₁x₁² + … + a_ℓx_ℓ²`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DiagonalForm {
    coeffs: Vec<i64>,
}

impl DiagonalForm {
    pub fn new(coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("form must have rank ≥ 1".into()));
        }
        if coeffs.contains(&0) {
            return Err(Error::InvalidInput(
                "diagonal coefficients must be nonzero".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    /// A form whose coefficients are all required to be positive.
    pub fn positive_definite(coeffs: Vec<i64>) -> Result<Self> {
        let f = Self::new(coeffs)?;
        if !f.is_positive_definite() {
            return Err(Error::InvalidInput("form is not positive definite".into()));
        }
        Ok(f)
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_positive_definite(&self) -> bool {
        self.coeffs.iter().all(|&a| a > 0)
    }

    /// `d_L = ∏ a_j`.
    pub fn determinant(&self) -> BigInt {
        self.coeffs.iter().map(|&a| BigInt::from(a)).product()
    }

    /// `Q(x)` over the integers.
    pub fn evaluate(&self, x: &[i64]) -> Result<BigInt> {
        self.check_len(x.len())?;
        Ok(self
            .coeffs
            .iter()
            .zip(x)
            .map(|(&a, &xi)| BigInt::from(a) * BigInt::from(xi) * BigInt::from(xi))
            .sum())
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if n != self.rank() {
            return Err(Error::InvalidInput(format!(
                "vector has {n} coordinates, form has rank {}",
                self.rank()
            )));
        }
        Ok(())
    }

    /// Per-prime data for `p`.
    pub fn local(&self, p: u64) -> Result<LocalContext> {
        LocalContext::new(self, p)
    }
}

/// Everything about a [`DiagonalForm`] that depends on one odd prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalContext {
    p: u64,
    coeffs: Vec<i64>,
    exponents: Vec<u32>,
    units: Vec<u64>,
    unit_indices: Vec<usize>,
    delta: i64,
}

impl LocalContext {
    pub fn new(form: &DiagonalForm, p: u64) -> Result<Self> {
        check_odd_prime(p)?;
        let mut exponents = Vec::with_capacity(form.rank());
        let mut units = Vec::with_capacity(form.rank());
        for &a in form.coeffs() {
            let e = arith::ord_u(p, a as i128);
            let unit = (a as i128 / (p as i128).pow(e)).rem_euclid(p as i128) as u64;
            exponents.push(e);
            units.push(unit);
        }
        let unit_indices = (0..form.rank()).filter(|&j| exponents[j] == 0).collect();
        Ok(Self {
            p,
            coeffs: form.coeffs().to_vec(),
            exponents,
            units,
            unit_indices,
            delta: arith::delta(p)?,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// `e_j = ord_p(a_j)`.
    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// `a_j / p^{e_j} mod p`.
    pub fn units(&self) -> &[u64] {
        &self.units
    }

    /// `I_p = {j : p ∤ a_j}` (0-based).
    pub fn unit_indices(&self) -> &[usize] {
        &self.unit_indices
    }

    /// `t_p = #I_p`.
    pub fn t(&self) -> usize {
        self.unit_indices.len()
    }

    /// `Δ_p = (−1/p)·p`.
    pub fn delta(&self) -> i64 {
        self.delta
    }

    pub fn max_exponent(&self) -> u32 {
        self.exponents.iter().copied().max().unwrap_or(0)
    }

    /// `L_p` unimodular iff `p ∤ d_L`.
    pub fn is_unimodular(&self) -> bool {
        self.t() == self.rank()
    }

    /// `s_{J,p} = #{j ∈ J : p ∤ a_j}`.
    pub fn s_count(&self, subset: &[usize]) -> usize {
        subset.iter().filter(|&&j| self.exponents[j] == 0).count()
    }

    /// `r_{J,p} = #{j ∈ J : (a_j/p) = −1}`.
    pub fn r_count(&self, subset: &[usize]) -> usize {
        subset
            .iter()
            .filter(|&&j| legendre_u(self.coeff_residue(j), self.p) == -1)
            .count()
    }

    pub(crate) fn coeff_residue(&self, j: usize) -> u64 {
        (self.coeffs[j] as i128).rem_euclid(self.p as i128) as u64
    }

    /// Wrap integer coordinates with a working precision large enough for
    /// every comparison made by this module:
    /// `K = max e_j + max ord_p(x_j) + 3`.
    pub fn vector(&self, coords: &[i64]) -> Result<LocalVector> {
        let max_v = coords
            .iter()
            .filter(|&&x| x != 0)
            .map(|&x| arith::ord_u(self.p, x as i128))
            .max()
            .unwrap_or(0);
        LocalVector::new(coords.to_vec(), self.max_exponent() + max_v + 3)
    }

    fn modulus(&self, precision: u32) -> Result<i128> {
        let mut m: i128 = 1;
        for _ in 0..precision {
            m = m.saturating_mul(self.p as i128);
            if m >= MAX_MODULUS {
                return Err(Error::PrecisionError {
                    what: "modulus p^K (too large)",
                    precision,
                });
            }
        }
        Ok(m)
    }

    /// `ord_p` of each coordinate, `None` where it vanishes modulo `p^K`.
    fn coord_orders(&self, x: &LocalVector) -> Result<Vec<Option<u32>>> {
        if x.coords.len() != self.rank() {
            return Err(Error::InvalidInput(format!(
                "vector has {} coordinates, lattice has rank {}",
                x.coords.len(),
                self.rank()
            )));
        }
        let m = self.modulus(x.precision)?;
        Ok(x.coords
            .iter()
            .map(|&c| {
                let c = (c as i128).rem_euclid(m);
                (c != 0).then(|| arith::ord_u(self.p, c))
            })
            .collect())
    }

    fn is_primitive(&self, x: &LocalVector) -> Result<bool> {
        Ok(self.coord_orders(x)?.contains(&Some(0)))
    }

    /// `Q(x) mod p^K`.
    fn q_residue(&self, x: &LocalVector, precision: u32) -> Result<i128> {
        let m = self.modulus(precision)?;
        let mut acc: i128 = 0;
        for (&a, &xi) in self.coeffs.iter().zip(&x.coords) {
            let a = (a as i128).rem_euclid(m);
            let xi = (xi as i128).rem_euclid(m);
            acc = (acc + a * (xi * xi % m)) % m;
        }
        Ok(acc)
    }

    fn congruent(&self, x: &LocalVector, y: &LocalVector, precision: u32) -> Result<bool> {
        let m = self.modulus(precision)?;
        Ok(x.coords
            .iter()
            .zip(&y.coords)
            .all(|(&a, &b)| (a as i128 - b as i128).rem_euclid(m) == 0))
    }

    /// `ord_p(½B(x, y))`, `None` when it is `≥ K` for the smaller precision.
    fn half_bilinear_order(&self, x: &LocalVector, y: &LocalVector) -> Result<Option<u32>> {
        let precision = x.precision.min(y.precision);
        let m = self.modulus(precision)?;
        let mut acc: i128 = 0;
        for ((&a, &xi), &yi) in self.coeffs.iter().zip(&x.coords).zip(&y.coords) {
            let a = (a as i128).rem_euclid(m);
            let t = (xi as i128).rem_euclid(m) * (yi as i128).rem_euclid(m) % m;
            acc = (acc + a * t) % m;
        }
        Ok((acc != 0).then(|| arith::ord_u(self.p, acc)))
    }
}

/// A vector of `L_p = ℤ_p^ℓ` given by integer representatives modulo `p^K`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalVector {
    coords: Vec<i64>,
    precision: u32,
}

impl LocalVector {
    pub fn new(coords: Vec<i64>, precision: u32) -> Result<Self> {
        if precision == 0 {
            return Err(Error::InvalidInput("working precision must be ≥ 1".into()));
        }
        Ok(Self { coords, precision })
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    /// The working precision `K`.
    pub fn precision(&self) -> u32 {
        self.precision
    }
}

/// `v(L; x) = min_j (e_j + ord_p(x_j))`; infinite iff `x ≡ 0 (mod p^K)`.
pub fn order(ctx: &LocalContext, x: &LocalVector) -> Result<Valuation> {
    sublattice_order(ctx, 0, x)
}

/// `v(L^(r); x) = min_j (max(e_j, r) + ord_p(x_j))`.
pub fn sublattice_order(ctx: &LocalContext, r: u32, x: &LocalVector) -> Result<Valuation> {
    let orders = ctx.coord_orders(x)?;
    let mut best: Option<u32> = None;
    // Lowest value a coordinate that vanished at precision could still contribute.
    let mut unresolved = u32::MAX;
    for (&e, v) in ctx.exponents.iter().zip(&orders) {
        let shift = e.max(r);
        match v {
            Some(v) => best = Some(best.map_or(shift + v, |b| b.min(shift + v))),
            None => unresolved = unresolved.min(shift + x.precision),
        }
    }
    match best {
        None => Ok(Valuation::Infinite),
        Some(b) if b < unresolved => Ok(Valuation::Finite(b)),
        Some(_) => Err(Error::PrecisionError {
            what: "sublattice order",
            precision: x.precision,
        }),
    }
}

fn nonzero_order(ctx: &LocalContext, r: u32, x: &LocalVector) -> Result<u32> {
    sublattice_order(ctx, r, x)?
        .finite()
        .ok_or_else(|| Error::InvalidInput("vector is zero at working precision".into()))
}

/// All critical indices of `x`, ascending.
///
/// `r = 0` is critical when `v(L; x) < v(L^(1); x)`; `r > 0` when
/// `v(L^(r−1); x) = v(L^(r); x) < v(L^(r+1); x)`. Beyond `max e_j` the
/// profile `r ↦ v(L^(r); x)` has slope one, so the scan stops there.
pub fn critical_indices(ctx: &LocalContext, x: &LocalVector) -> Result<Vec<u32>> {
    let top = ctx.max_exponent() + 1;
    let profile = (0..=top)
        .map(|r| nonzero_order(ctx, r, x))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    if profile[0] < profile[1] {
        out.push(0);
    }
    for r in 1..top as usize {
        if profile[r - 1] == profile[r] && profile[r] < profile[r + 1] {
            out.push(r as u32);
        }
    }
    Ok(out)
}

/// `d_{u,p} = min_{p ∤ u_j} (e_j + 1)`.
pub fn depth(ctx: &LocalContext, u: &LocalVector) -> Result<u32> {
    let orders = ctx.coord_orders(u)?;
    orders
        .iter()
        .zip(&ctx.exponents)
        .filter(|(v, _)| **v == Some(0))
        .map(|(_, &e)| e + 1)
        .min()
        .ok_or(Error::NotPrimitive(ctx.p))
}

/// Index `r` if `x` is simple of index `r`, i.e. `v(L; x) = v(L^(r); x) = r`.
pub fn is_simple(ctx: &LocalContext, x: &LocalVector) -> Result<Option<u32>> {
    let r = nonzero_order(ctx, 0, x)?;
    let at_r = nonzero_order(ctx, r, x)?;
    Ok((at_r == r).then_some(r))
}

/// Simplicity decided by a witness `w` with `v(L; x) = v(½B(x, w)) = v(L; w) = r`.
///
/// Only coordinate multiples `w = p^s e_j` with `s ≤ r` are tried; for a
/// diagonal lattice these suffice.
pub fn simple_by_witness(ctx: &LocalContext, x: &LocalVector) -> Result<Option<u32>> {
    let r = nonzero_order(ctx, 0, x)?;
    let p = ctx.p as i64;
    for j in 0..ctx.rank() {
        for s in 0..=r {
            let Some(ps) = p.checked_pow(s) else { break };
            let mut coords = vec![0i64; ctx.rank()];
            coords[j] = ps;
            let w = LocalVector::new(coords, x.precision)?;
            if ctx.half_bilinear_order(x, &w)? == Some(r) && order(ctx, &w)? == Valuation::Finite(r)
            {
                return Ok(Some(r));
            }
        }
    }
    Ok(None)
}

/// One summand `p^b · λ` of a decomposition, `λ` simple of index `r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JamesTerm {
    pub b: u32,
    pub lambda: LocalVector,
    pub r: u32,
}

/// Write a primitive `x` as `Σ p^{b_j} λ_j` with pairwise orthogonal,
/// primitive, simple `λ_j` of index `r_j`, where `r_1 < … < r_s` are the
/// critical indices of `x` and `b_j = v(L^(r_j); x) − r_j`.
///
/// Coordinate `i` (with `e_i + ord_p(x_i) = k_i`) is placed in the last
/// summand `j` with `r_j + b_j ≤ k_i`; summands therefore have disjoint
/// supports.
pub fn james_decompose(ctx: &LocalContext, x: &LocalVector) -> Result<Vec<JamesTerm>> {
    if !ctx.is_primitive(x)? {
        return Err(Error::NotPrimitive(ctx.p));
    }
    let crit = critical_indices(ctx, x)?;
    let levels = crit
        .iter()
        .map(|&r| Ok((r, nonzero_order(ctx, r, x)? - r)))
        .collect::<Result<Vec<_>>>()?;

    let orders = ctx.coord_orders(x)?;
    let mut blocks = vec![vec![0i64; ctx.rank()]; levels.len()];
    for (i, v) in orders.iter().enumerate() {
        let Some(v) = *v else { continue };
        let key = ctx.exponents[i] + v;
        let j = levels
            .iter()
            .rposition(|&(r, b)| r + b <= key)
            .expect("v(L; x) = r_1 + b_1 bounds every coordinate");
        let b = levels[j].1;
        debug_assert!(v >= b);
        blocks[j][i] = x.coords[i] / (ctx.p as i64).pow(b);
    }

    levels
        .into_iter()
        .zip(blocks)
        .map(|((r, b), coords)| {
            Ok(JamesTerm {
                b,
                lambda: LocalVector::new(coords, x.precision - b)?,
                r,
            })
        })
        .collect()
}

/// Outcome of [`are_associated`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Association {
    Yes,
    No,
    Unknown,
}

/// Whether `x ∼_L y` (some isometry of `L` maps `x` to `y`), as far as the
/// simple-vector, unit-value and unimodular criteria decide it.
///
/// Isometries of `L` preserve `Q` and `v(L; ·)`, so a mismatch in either
/// is a definite `No`.
pub fn are_associated(ctx: &LocalContext, x: &LocalVector, y: &LocalVector) -> Result<Association> {
    let ox = order(ctx, x)?;
    let oy = order(ctx, y)?;
    if ox.is_infinite() || oy.is_infinite() {
        return Err(Error::InvalidInput("zero vector".into()));
    }
    let precision = x.precision.min(y.precision);
    let qx = ctx.q_residue(x, precision)?;
    if qx != ctx.q_residue(y, precision)? || ox != oy {
        return Ok(Association::No);
    }
    if ctx.congruent(x, y, precision)? {
        return Ok(Association::Yes);
    }
    if is_simple(ctx, x)?.is_some() && is_simple(ctx, y)?.is_some() {
        return Ok(Association::Yes);
    }
    if qx % ctx.p as i128 != 0 {
        return Ok(Association::Yes);
    }
    if ctx.is_unimodular() && ctx.is_primitive(x)? && ctx.is_primitive(y)? {
        return Ok(Association::Yes);
    }
    Ok(Association::Unknown)
}
