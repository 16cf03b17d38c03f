//! Lower bounds for the mass ratio `m(L + u/c) / m(L)` and for class
//! numbers of shifted lattices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{
    check_odd_prime, factorize, mod_inverse, next_prime, pow_interval, RationalInterval,
};
use crate::count::{count_exact, pivot_counts, Ceilings, CountQuery, CountResult};
use crate::error::{Error, Result};
use crate::padic::{DiagonalForm, LocalVector};
use crate::Rational;

/// Primes examined by [`c_delta`] before giving up.
pub const C_DELTA_PRIME_CEILING: u64 = 10_000_000;

/// The shifted lattice `L + u/c` with `L = ℤ^ℓ` under a diagonal form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftedLatticeSpec {
    form: DiagonalForm,
    u: Vec<i64>,
    c: u64,
}

impl ShiftedLatticeSpec {
    pub fn new(form: DiagonalForm, u: Vec<i64>, c: u64) -> Result<Self> {
        form.check_len(u.len())?;
        if c == 0 {
            return Err(Error::InvalidInput("conductor must be positive".into()));
        }
        if c.is_multiple_of(2) {
            return Err(Error::EvenConductor(c));
        }
        let g = u.iter().fold(0i64, |g, &x| g.gcd(&x));
        if g != 1 {
            return Err(Error::InvalidInput(format!(
                "shift coordinates must have gcd 1, got {g}"
            )));
        }
        Ok(Self { form, u, c })
    }

    pub fn form(&self) -> &DiagonalForm {
        &self.form
    }

    pub fn u(&self) -> &[i64] {
        &self.u
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn rank(&self) -> usize {
        self.form.rank()
    }

    /// `Q(u)`.
    pub fn m(&self) -> BigInt {
        self.form
            .evaluate(&self.u)
            .expect("length checked at construction")
    }

    /// `(p, c_p)` for each prime dividing `c`, ascending.
    pub fn conductor_primes(&self) -> Result<Vec<(u64, u32)>> {
        factorize(self.c)
    }
}

/// Split of the primes dividing `c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeClassification {
    pub omega1: Vec<u64>,
    pub omega2: Vec<u64>,
}

/// `Ω₂` holds the primes dividing `gcd(d_L, Q(u), c)`; `Ω₁` the rest of
/// the primes dividing `c`.
pub fn classify_primes(spec: &ShiftedLatticeSpec) -> Result<PrimeClassification> {
    let det = spec.form.determinant();
    let m = spec.m();
    let mut out = PrimeClassification {
        omega1: Vec::new(),
        omega2: Vec::new(),
    };
    for (p, _) in spec.conductor_primes()? {
        let bp = BigInt::from(p);
        if (&det % &bp).is_zero() && (&m % &bp).is_zero() {
            out.omega2.push(p);
        } else {
            out.omega1.push(p);
        }
    }
    Ok(out)
}

/// `u_p = d⁻¹·u mod p^{c_p}` where `c = p^{c_p}·d`.
pub fn localize_shift(spec: &ShiftedLatticeSpec, p: u64) -> Result<LocalVector> {
    check_odd_prime(p)?;
    if !spec.c.is_multiple_of(p) {
        return Err(Error::InvalidPrime(p as i128));
    }
    let mut k = 0;
    let mut d = spec.c;
    while d.is_multiple_of(p) {
        d /= p;
        k += 1;
    }
    let pk = (p as i128).pow(k);
    let inv = mod_inverse(d as i128, pk).expect("d is prime to p");
    let coords = spec
        .u
        .iter()
        .map(|&x| ((x as i128).rem_euclid(pk) * inv % pk) as i64)
        .collect();
    LocalVector::new(coords, k)
}

/// `f_p`: 1/9 for `p = 3`, else `1/2 − 3/(2p)`.
pub fn f(p: u64) -> Result<Rational> {
    check_odd_prime(p)?;
    Ok(if p == 3 {
        Rational::new(1.into(), 9.into())
    } else {
        Rational::new(BigInt::from(p) - 3, BigInt::from(2 * p))
    })
}

fn check_delta(delta: &Rational) -> Result<(u32, u32)> {
    if !delta.is_positive() {
        return Err(Error::InvalidInput(format!(
            "δ must be positive, got {delta}"
        )));
    }
    let n = delta.numer().to_u32();
    let d = delta.denom().to_u32();
    match (n, d) {
        (Some(n), Some(d)) => Ok((n, d)),
        _ => Err(Error::InvalidInput(format!("δ = {delta} is too large"))),
    }
}

/// Whether `p^δ f_p < 1`, decided as `p^n num(f_p)^d < den(f_p)^d`.
pub fn s_delta_nonempty(p: u64, delta: &Rational) -> Result<bool> {
    let (n, d) = check_delta(delta)?;
    let fp = f(p)?;
    let lhs = BigInt::from(p).pow(n) * fp.numer().pow(d);
    Ok(lhs < fp.denom().pow(d))
}

/// The primes `p` with `p^δ f_p < 1`, ascending.
pub fn c_delta_primes(delta: &Rational) -> Result<Vec<u64>> {
    check_delta(delta)?;
    let mut out = Vec::new();
    if s_delta_nonempty(3, delta)? {
        out.push(3);
    }
    // p^δ f_p increases with p from 5 on
    let mut p = 5;
    while s_delta_nonempty(p, delta)? {
        out.push(p);
        p = next_prime(p);
        if p > C_DELTA_PRIME_CEILING {
            return Err(Error::TooLarge {
                size: p as u128,
                ceiling: C_DELTA_PRIME_CEILING as u128,
            });
        }
    }
    Ok(out)
}

/// `C_δ = ∏ p^δ f_p` over the primes of [`c_delta_primes`], enclosed in an
/// interval of width at most `width`.
pub fn c_delta(delta: &Rational, width: &Rational) -> Result<RationalInterval> {
    if !width.is_positive() {
        return Err(Error::InvalidInput(format!(
            "width must be positive, got {width}"
        )));
    }
    let primes = c_delta_primes(delta)?;
    let mut w = width / Rational::from_integer(BigInt::from(2 * primes.len() + 2));
    loop {
        let mut acc = RationalInterval::point(Rational::one());
        for &p in &primes {
            let factor = pow_interval(p, delta, &w)?.scale(&f(p)?);
            acc = acc.mul(&factor);
            if !acc.is_point() {
                acc = acc.round_outward(bits_below(&w) + 8);
            }
        }
        if &acc.width() <= width {
            return Ok(acc);
        }
        w /= Rational::from_integer(16.into());
    }
}

/// Smallest `b` with `2^-b ≤ w`.
fn bits_below(w: &Rational) -> u32 {
    let mut b = 0;
    let mut x = w.clone();
    while x < Rational::one() {
        x *= Rational::from_integer(2.into());
        b += 1;
    }
    b
}

/// Which lower bound [`mass_ratio_lower_bound`] computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MassMode {
    /// `∏_{p | c} r(Q; u_p, p^{c_p}) / 2`.
    General,
    /// `c^{ℓ−1} ∏_{p | c} f_p`.
    DiagonalClosedForm,
}

impl fmt::Display for MassMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MassMode::General => "general",
            MassMode::DiagonalClosedForm => "closed-form",
        })
    }
}

/// One prime's contribution to a mass bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeFactor {
    pub p: u64,
    pub c_p: u32,
    #[serde(serialize_with = "crate::ser::rational")]
    pub value: Rational,
    /// The count behind a general-mode factor.
    pub count: Option<CountResult>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MassBoundResult {
    pub mode: MassMode,
    pub factors: Vec<PrimeFactor>,
    #[serde(serialize_with = "crate::ser::rational")]
    pub total: Rational,
}

fn check_bound_hypotheses(spec: &ShiftedLatticeSpec) -> Result<()> {
    if spec.rank() < 3 {
        return Err(Error::RankTooSmall(spec.rank()));
    }
    if spec.m().is_zero() {
        return Err(Error::IsotropicShift);
    }
    if let Some(&p) = classify_primes(spec)?.omega2.first() {
        return Err(Error::GcdHypothesisViolated { prime: p });
    }
    Ok(())
}

/// A certified lower bound for `m(L + u/c) / m(L)`.
///
/// General mode counts `r(Q; u_p, p^{c_p})` exactly when it fits the
/// ceilings and otherwise uses the largest pivot closed form, which never
/// exceeds it.
pub fn mass_ratio_lower_bound(
    spec: &ShiftedLatticeSpec,
    mode: MassMode,
    ceilings: &Ceilings,
) -> Result<MassBoundResult> {
    check_bound_hypotheses(spec)?;
    let l = spec.rank() as u32;
    let mut factors = Vec::new();
    for (p, c_p) in spec.conductor_primes()? {
        let factor = match mode {
            MassMode::DiagonalClosedForm => PrimeFactor {
                p,
                c_p,
                value: Rational::from_integer(BigInt::from(p).pow((l - 1) * c_p)) * f(p)?,
                count: None,
            },
            MassMode::General => {
                let count = local_count(spec, p, c_p, ceilings)?;
                PrimeFactor {
                    p,
                    c_p,
                    value: Rational::new(BigInt::from(count.count), 2.into()),
                    count: Some(count),
                }
            }
        };
        factors.push(factor);
    }
    let total = factors.iter().map(|f| &f.value).product();
    Ok(MassBoundResult {
        mode,
        factors,
        total,
    })
}

fn local_count(
    spec: &ShiftedLatticeSpec,
    p: u64,
    c_p: u32,
    ceilings: &Ceilings,
) -> Result<CountResult> {
    let u_p = localize_shift(spec, p)?;
    let q = CountQuery::new(spec.form.clone(), u_p.coords().to_vec(), vec![], 0, p, c_p)?;
    match count_exact(&q, ceilings) {
        Err(Error::TooLarge { .. }) => pivot_counts(&spec.form, u_p.coords(), p, c_p)?
            .into_iter()
            .max_by_key(|c| c.count)
            .ok_or(Error::NoPivot),
        other => other,
    }
}

/// `m(L) · C_δ · c^{ℓ−1−δ}`; the lower endpoint bounds the class number of
/// `L + u/c` from below.
pub fn class_number_lower_bound(
    spec: &ShiftedLatticeSpec,
    mass_of_l: &Rational,
    delta: &Rational,
    width: &Rational,
) -> Result<RationalInterval> {
    check_bound_hypotheses(spec)?;
    if !mass_of_l.is_positive() {
        return Err(Error::InvalidInput(format!(
            "m(L) must be positive, got {mass_of_l}"
        )));
    }
    if !width.is_positive() {
        return Err(Error::InvalidInput(format!(
            "width must be positive, got {width}"
        )));
    }
    let exponent = Rational::from_integer(BigInt::from(spec.rank() as u64 - 1)) - delta;
    if exponent.is_negative() {
        return Err(Error::InvalidInput(format!("δ = {delta} exceeds ℓ − 1")));
    }
    let mut w = width.clone();
    loop {
        let cd = c_delta(delta, &w)?;
        let cpow = pow_interval(spec.c, &exponent, &w)?;
        let out = cd.mul(&cpow).scale(mass_of_l);
        if &out.width() <= width {
            return Ok(out);
        }
        w /= Rational::from_integer(16.into());
    }
}
