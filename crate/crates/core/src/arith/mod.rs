//! Exact integer and rational primitives: p-adic valuations, Legendre
//! symbols, trial-division factorization and rational enclosures of real
//! powers.
//!
//! The integer routines are generic over [`IntScalar`] so the same code
//! serves machine integers and `BigInt`; everything that feeds a bound is
//! carried as an exact [`Rational`](crate::Rational).

mod interval;
mod scalar;

pub use interval::{parse_rational, pow_interval, RationalInterval};
pub use scalar::IntScalar;

use std::fmt;

use num_integer::Integer;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Default upper limit for [`factorize`].
pub const DEFAULT_FACTOR_CEILING: u64 = 1_000_000_000;

/// A p-adic order: a natural number, or infinity for the zero element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_u32(*v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Trial-division primality test, adequate for the desk-scale primes used here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn is_odd_prime(p: u64) -> bool {
    p != 2 && is_prime(p)
}

pub(crate) fn check_odd_prime(p: u64) -> Result<()> {
    if is_odd_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidPrime(p as i128))
    }
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime(c) {
        c += 1;
    }
    c
}

/// `ord_p(n)`: the exponent of the largest power of `p` dividing `n`.
pub fn ord<T: IntScalar>(p: u64, n: &T) -> Result<Valuation> {
    check_odd_prime(p)?;
    if n.is_zero() {
        return Ok(Valuation::Infinite);
    }
    let p = T::from_u64(p).expect("odd prime fits the scalar type");
    let mut n = n.clone();
    let mut e = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Ok(Valuation::Finite(e));
        }
        n = q;
        e += 1;
    }
}

/// Finite valuation of a nonzero machine integer; `p` is trusted.
pub(crate) fn ord_u(p: u64, n: i128) -> u32 {
    debug_assert!(n != 0);
    let p = p as i128;
    let mut n = n;
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

/// Legendre symbol `(a / p)` as -1, 0 or +1.
pub fn legendre<T: IntScalar>(a: &T, p: u64) -> Result<i8> {
    check_odd_prime(p)?;
    let pt = T::from_u64(p).expect("odd prime fits the scalar type");
    let r = a.mod_floor(&pt).to_u64().expect("residue below p");
    Ok(legendre_u(r, p))
}

/// Euler's criterion on a reduced residue; `p` is trusted.
pub(crate) fn legendre_u(a: u64, p: u64) -> i8 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    match pow_mod(a, (p - 1) / 2, p) {
        1 => 1,
        _ => -1,
    }
}

pub(crate) fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut acc: u128 = 1 % m128;
    let mut b = (base % m) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// `Δ_p = (−1 / p) · p`.
pub fn delta(p: u64) -> Result<i64> {
    check_odd_prime(p)?;
    Ok(if p % 4 == 1 { p as i64 } else { -(p as i64) })
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(n: u64) -> Result<Vec<(u64, u32)>> {
    factorize_with_ceiling(n, DEFAULT_FACTOR_CEILING)
}

pub fn factorize_with_ceiling(n: u64, ceiling: u64) -> Result<Vec<(u64, u32)>> {
    if n == 0 {
        return Err(Error::InvalidInput("cannot factorize 0".into()));
    }
    if n > ceiling {
        return Err(Error::TooLarge {
            size: n as u128,
            ceiling: ceiling as u128,
        });
    }
    let mut out = Vec::new();
    let mut n = n;
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    Ok(out)
}

/// Inverse of `a` modulo `m` (`m ≥ 1`), if it exists.
pub fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    if m == 1 {
        return Some(0);
    }
    let g = a.extended_gcd(&m);
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.mod_floor(&m))
}
