use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// A closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalInterval {
    lo: Rational,
    hi: Rational,
}

impl RationalInterval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidInput(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: Rational) -> Self {
        Self {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Interval product; exact enclosure of `{a·b}`.
    pub fn mul(&self, other: &Self) -> Self {
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        Self { lo, hi }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if a <= b {
            Self { lo: a, hi: b }
        } else {
            Self { lo: b, hi: a }
        }
    }

    /// Reciprocal of a strictly positive interval.
    pub fn recip(&self) -> Result<Self> {
        if !self.lo.is_positive() {
            return Err(Error::InvalidInput(
                "reciprocal of non-positive interval".into(),
            ));
        }
        Ok(Self {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        })
    }

    /// Widen the endpoints outward onto the grid `2^-bits ℤ`, bounding the
    /// size of the denominators in long products.
    pub fn round_outward(&self, bits: u32) -> Self {
        let scale = BigInt::one() << bits;
        let lo = (&self.lo * &scale).floor().to_integer();
        let hi = (&self.hi * &scale).ceil().to_integer();
        Self {
            lo: Rational::new(lo, scale.clone()),
            hi: Rational::new(hi, scale),
        }
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Parse `"n/d"` or `"n"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad_rational(s))?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad_rational(s))?;
        if d.is_zero() {
            return Err(bad_rational(s));
        }
        return Ok(Rational::new(n, d));
    }
    if let Ok(n) = BigInt::from_str(t) {
        return Ok(Rational::from_integer(n));
    }
    parse_decimal(t).ok_or_else(|| bad_rational(s))
}

fn parse_decimal(t: &str) -> Option<Rational> {
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int, frac) = body.split_once('.')?;
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n = BigInt::from_str(&digits).ok()?;
    let d = BigInt::from(10u32).pow(frac.len() as u32);
    let r = Rational::new(n, d);
    Some(if neg { -r } else { r })
}

fn bad_rational(s: &str) -> Error {
    Error::InvalidInput(format!("not a rational number: {s:?}"))
}

/// Enclose the real number `base^e` in a rational interval of width at most
/// `width`.
///
/// For `e = n/d` the root is found as the integer `d`-th root of
/// `base^n · 2^(bd)`, so `lo^d ≤ base^n ≤ hi^d` holds exactly.
/// Integer exponents give a point interval.
pub fn pow_interval(base: u64, e: &Rational, width: &Rational) -> Result<RationalInterval> {
    if base == 0 {
        return Err(Error::InvalidInput("base must be positive".into()));
    }
    if !width.is_positive() {
        return Err(Error::InvalidInput(format!(
            "width must be positive, got {width}"
        )));
    }
    let n = e.numer();
    let d = e
        .denom()
        .to_u32()
        .ok_or_else(|| Error::InvalidInput(format!("exponent denominator too large: {e}")))?;
    let abs_n = n
        .abs()
        .to_u32()
        .ok_or_else(|| Error::InvalidInput(format!("exponent numerator too large: {e}")))?;
    let power = BigUint::from(base).pow(abs_n);

    let positive = if d == 1 || base == 1 {
        let v = if base == 1 { BigUint::one() } else { power };
        RationalInterval::point(Rational::from_integer(BigInt::from(v)))
    } else {
        let bits = bits_for_width(width);
        let scaled = &power << (bits as usize * d as usize);
        let root = scaled.nth_root(d);
        let exact = root.pow(d) == scaled;
        let denom = BigInt::one() << bits;
        let lo = Rational::new(BigInt::from(root.clone()), denom.clone());
        let hi = if exact {
            lo.clone()
        } else {
            Rational::new(BigInt::from(root + 1u32), denom)
        };
        RationalInterval { lo, hi }
    };

    if n.is_negative() {
        // base^|e| ≥ 1, so taking reciprocals does not widen the interval.
        positive.recip()
    } else {
        Ok(positive)
    }
}

/// Smallest `b` with `2^-b ≤ width`.
fn bits_for_width(width: &Rational) -> u32 {
    let (num, den) = (width.numer(), width.denom());
    let mut b = 0u32;
    let mut lhs = num.clone();
    while &lhs < den {
        lhs <<= 1;
        b += 1;
    }
    b
}

#[cfg(test)]
/// `x^e` for a rational `x` and natural `e`.
pub(crate) fn rat_pow(x: &Rational, e: u32) -> Rational {
    num_traits::pow(x.clone(), e as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn sqrt3_to_a_thousandth() {
        let iv = pow_interval(3, &r(1, 2), &r(1, 1000)).unwrap();
        assert!(iv.width() <= r(1, 1000));
        // 1.7320508… lies between these decimal truncations
        assert!(iv.lo() <= &r(17_320_509, 10_000_000));
        assert!(iv.hi() >= &r(17_320_508, 10_000_000));
        assert!(rat_pow(iv.lo(), 2) <= r(3, 1));
        assert!(rat_pow(iv.hi(), 2) >= r(3, 1));
    }

    #[test]
    fn integer_and_zero_exponents_are_exact() {
        let iv = pow_interval(7, &r(2, 1), &r(1, 10)).unwrap();
        assert_eq!(iv, RationalInterval::point(r(49, 1)));
        let iv = pow_interval(5, &r(0, 1), &r(1, 10)).unwrap();
        assert_eq!(iv, RationalInterval::point(r(1, 1)));
        let iv = pow_interval(4, &r(1, 2), &r(1, 10)).unwrap();
        assert_eq!(iv, RationalInterval::point(r(2, 1)));
    }

    #[test]
    fn negative_exponent() {
        let iv = pow_interval(2, &r(-1, 2), &r(1, 1_000_000)).unwrap();
        assert!(iv.width() <= r(1, 1_000_000));
        assert!(rat_pow(iv.lo(), 2) <= r(1, 2));
        assert!(rat_pow(iv.hi(), 2) >= r(1, 2));
    }

    #[test]
    fn rejects_bad_width_and_base() {
        assert!(pow_interval(3, &r(1, 2), &r(0, 1)).is_err());
        assert!(pow_interval(3, &r(1, 2), &r(-1, 5)).is_err());
        assert!(pow_interval(0, &r(1, 2), &r(1, 5)).is_err());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("1/2").unwrap(), r(1, 2));
        assert_eq!(parse_rational(" 13/200 ").unwrap(), r(13, 200));
        assert_eq!(parse_rational("4/8").unwrap(), r(1, 2));
        assert_eq!(parse_rational("7").unwrap(), r(7, 1));
        assert_eq!(parse_rational("0.065").unwrap(), r(13, 200));
        assert_eq!(parse_rational("-1.5").unwrap(), r(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    #[test]
    fn outward_rounding_encloses() {
        let iv = RationalInterval::new(r(1, 3), r(2, 3)).unwrap();
        let w = iv.round_outward(8);
        assert!(w.lo() <= iv.lo() && w.hi() >= iv.hi());
        assert!(w.width() <= iv.width() + r(2, 256));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn pow_interval_encloses_exactly(base in 1u64..60, n in 0i64..12, d in 1i64..7,
                                            wexp in 1u32..40) {
                let e = r(n, d);
                let width = Rational::new(BigInt::one(), BigInt::one() << wexp);
                let iv = pow_interval(base, &e, &width).unwrap();
                prop_assert!(iv.width() <= width);
                let dd = e.denom();
                let nn = e.numer().to_u32().unwrap();
                let target = Rational::from_integer(BigInt::from(base).pow(nn));
                let d32 = dd.to_u32().unwrap();
                prop_assert!(rat_pow(iv.lo(), d32) <= target);
                prop_assert!(rat_pow(iv.hi(), d32) >= target);
            }
        }
    }
}
