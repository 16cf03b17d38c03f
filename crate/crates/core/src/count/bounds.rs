use num_bigint::BigInt;

use crate::arith::check_odd_prime;
use crate::error::{Error, Result};
use crate::Rational;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn p_pow(p: u64, e: u32) -> Rational {
    Rational::from_integer(BigInt::from(p).pow(e))
}

/// Lower bound for the primitive count `r(Q; u, p^k)` at a prime where
/// `Q(u)` is a unit, or where `p | Q(u)` and at least three coefficients
/// are units.
pub fn lower_bound_unit(
    l: usize,
    p: u64,
    k: u32,
    p_divides_m: bool,
    t_p: usize,
) -> Result<Rational> {
    check_odd_prime(p)?;
    if l == 0 || k == 0 {
        return Err(Error::InvalidInput("rank and k must be positive".into()));
    }
    let scale = p_pow(p, (l as u32 - 1) * k);
    let unit = rat(1, 1) - rat(1, p as i64);
    if !p_divides_m {
        let tail = if p == 3 {
            rat(1, 3)
        } else {
            rat(1, 1) - rat(2, p as i64 - 1)
        };
        Ok(scale * unit * tail)
    } else if t_p >= 3 {
        Ok(scale * unit.clone() * unit)
    } else {
        Err(Error::HypothesisViolated(format!(
            "{p} divides Q(u) and only {t_p} coefficients are units"
        )))
    }
}

/// `p^{(ℓ-1)(k - max(d, r))}`, a lower bound for `r(Q; u, r, p^k)`.
pub fn lower_bound_shifted(l: usize, d: u32, r: u32, p: u64, k: u32) -> Result<Rational> {
    check_odd_prime(p)?;
    if l == 0 {
        return Err(Error::InvalidInput("rank must be positive".into()));
    }
    let floor = d.max(r);
    if k < floor {
        return Err(Error::HypothesisViolated(format!(
            "k = {k} is below max(d, r) = {floor}"
        )));
    }
    Ok(p_pow(p, (l as u32 - 1) * (k - floor)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_examples() {
        assert_eq!(lower_bound_unit(3, 3, 1, false, 3).unwrap(), rat(2, 1));
        assert_eq!(lower_bound_unit(3, 5, 1, false, 3).unwrap(), rat(10, 1));
        assert_eq!(lower_bound_unit(4, 3, 1, true, 4).unwrap(), rat(12, 1));
        assert!(matches!(
            lower_bound_unit(4, 3, 1, true, 2),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(lower_bound_unit(3, 9, 1, false, 3).is_err());
    }

    #[test]
    fn shifted_examples() {
        assert_eq!(lower_bound_shifted(3, 1, 1, 3, 2).unwrap(), rat(9, 1));
        assert_eq!(lower_bound_shifted(3, 1, 1, 3, 1).unwrap(), rat(1, 1));
        assert_eq!(lower_bound_shifted(5, 2, 1, 5, 3).unwrap(), rat(625, 1));
        assert!(matches!(
            lower_bound_shifted(3, 2, 1, 3, 1),
            Err(Error::HypothesisViolated(_))
        ));
    }
}
