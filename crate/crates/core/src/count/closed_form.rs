use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{CountQuery, CountResult, Method};
use crate::arith::{check_odd_prime, delta, legendre, legendre_u, IntScalar};
use crate::error::{Error, Result};
use crate::padic::DiagonalForm;
use crate::Rational;

/// Which of the seven cases of `C_p(m, t_p, r_p)` applies, numbered 1..=7
/// in the order: `p ∤ m` with (odd `t_p`, `r_p` = 0), (odd, 1), (even, 0),
/// (even, 1); then `p | m` with odd `t_p`, (even, 0), (even, 1).
pub fn cp_branch<T: IntScalar>(m: &T, p: u64, t_p: usize, r_p: u32) -> Result<u8> {
    check_odd_prime(p)?;
    if t_p == 0 || r_p > 1 {
        return Err(Error::UndefinedBranch { t_p, r_p });
    }
    let unit = legendre(m, p)? != 0;
    let odd = t_p % 2 == 1;
    Ok(match (unit, odd, r_p) {
        (true, true, 0) => 1,
        (true, true, _) => 2,
        (true, false, 0) => 3,
        (true, false, _) => 4,
        (false, true, _) => 5,
        (false, false, 0) => 6,
        (false, false, _) => 7,
    })
}

/// The coefficient `C_p(m, t_p, r_p)` of the pivot formula.
pub fn cp_coefficient<T: IntScalar>(m: &T, p: u64, t_p: usize, r_p: u32) -> Result<Rational> {
    let branch = cp_branch(m, p, t_p, r_p)?;
    let pi = p as i64;
    let (num, den): (i64, i64) = match branch {
        1 | 2 => {
            let s = i64::from(legendre(m, p)?) * pi;
            (if branch == 1 { 1 + s } else { 1 - s }, pi - 1)
        }
        3 | 4 => {
            let neg = i64::from(legendre(&(T::zero() - m.clone()), p)?);
            (if branch == 3 { -1 - neg } else { 1 - neg }, pi - 1)
        }
        6 => (1, 1),
        _ => (-1, 1),
    };
    Ok(Rational::new(num.into(), den.into()))
}

/// Indices `j` (0-based) with `p ∤ a_j u_j`.
pub fn valid_pivots(form: &DiagonalForm, u: &[i64], p: u64) -> Result<Vec<usize>> {
    check_odd_prime(p)?;
    form.check_len(u.len())?;
    let pi = p as i64;
    Ok((0..form.rank())
        .filter(|&j| form.coeffs()[j] % pi != 0 && u[j] % pi != 0)
        .collect())
}

/// `r_{{j}}(Q; u, p^k)` from the pivot formula. The query must have
/// `S = {j}` and `r = 0`.
///
/// The `C_p` term carries the sign `(∏_{i ∈ I_p, i ≠ j} a_i / p)`.
pub fn closed_form_pivot_count(q: &CountQuery) -> Result<CountResult> {
    let j = match (q.subset(), q.r()) {
        (&[j], 0) => j,
        _ => {
            return Err(Error::InvalidInput(
                "closed form needs a single pivot index and r = 0".into(),
            ))
        }
    };
    let p = q.p();
    let pi = p as i64;
    let a = q.form().coeffs();
    if a[j] % pi == 0 || q.u()[j] % pi == 0 {
        return Err(Error::NoPivot);
    }
    let m = q.m();
    let p_divides_m = (&m % BigInt::from(p)).is_zero();
    if p_divides_m && a.iter().any(|&x| x % pi == 0) {
        return Err(Error::HypothesisViolated(format!(
            "{p} divides both Q(u) and the determinant"
        )));
    }

    let l = q.rank() as u32;
    let k = q.k();
    let t = a.iter().filter(|&&x| x % pi != 0).count();
    let r_p = u32::from(legendre_u(a[j].rem_euclid(pi) as u64, p) == -1);
    let eta: i64 = a
        .iter()
        .enumerate()
        .filter(|&(i, &x)| i != j && x % pi != 0)
        .map(|(_, &x)| i64::from(legendre_u(x.rem_euclid(pi) as u64, p)))
        .product();
    let c = cp_coefficient(&m, p, t, r_p)?;

    let pr = Rational::from_integer(BigInt::from(p));
    let inner = pr.recip()
        + Rational::from_integer(eta * BigInt::from(delta(p)?).pow((t / 2) as u32))
            / num_traits::pow(pr.clone(), t)
            * c;
    let value = Rational::from_integer(BigInt::from(p).pow((l - 1) * (k - 1) + l))
        * (Rational::from_integer(1.into()) - pr.recip())
        * inner;
    if !value.is_integer() || value.is_negative() {
        return Err(Error::HypothesisViolated(format!(
            "pivot formula gave non-natural value {value}"
        )));
    }
    let count = value.to_integer().to_u128().ok_or(Error::TooLarge {
        size: u128::MAX,
        ceiling: u128::MAX,
    })?;
    Ok(CountResult {
        count,
        method: Method::ClosedForm,
        pivot: Some(j),
    })
}

/// Closed-form counts for every valid pivot, in index order.
pub fn pivot_counts(form: &DiagonalForm, u: &[i64], p: u64, k: u32) -> Result<Vec<CountResult>> {
    let pivots = valid_pivots(form, u, p)?;
    if pivots.is_empty() {
        return Err(Error::NoPivot);
    }
    pivots
        .into_iter()
        .map(|j| {
            let q = CountQuery::new(form.clone(), u.to_vec(), vec![j], 0, p, k)?;
            closed_form_pivot_count(&q)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::{count_convolution, count_oracle};
    use super::*;

    fn q(a: &[i64], u: &[i64], s: &[usize], p: u64, k: u32) -> CountQuery {
        let f = DiagonalForm::new(a.to_vec()).unwrap();
        CountQuery::new(f, u.to_vec(), s.to_vec(), 0, p, k).unwrap()
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn cp_examples() {
        assert_eq!(cp_coefficient(&1i64, 3, 3, 0).unwrap(), rat(2, 1));
        assert_eq!(cp_coefficient(&3i64, 3, 3, 0).unwrap(), rat(-1, 1));
        assert_eq!(cp_coefficient(&3i64, 3, 3, 1).unwrap(), rat(-1, 1));
        assert_eq!(cp_coefficient(&1i64, 5, 2, 1).unwrap(), rat(0, 1));
        assert_eq!(cp_coefficient(&5i64, 5, 2, 0).unwrap(), rat(1, 1));
        assert_eq!(cp_coefficient(&5i64, 5, 2, 1).unwrap(), rat(-1, 1));
        assert_eq!(cp_coefficient(&2i64, 3, 1, 1).unwrap(), rat(2, 1));
        assert_eq!(cp_coefficient(&2i64, 3, 2, 0).unwrap(), rat(-1, 1));
    }

    #[test]
    fn branch_numbering() {
        let cases = [
            (1i64, 3, 0, 1),
            (1, 3, 1, 2),
            (1, 2, 0, 3),
            (1, 2, 1, 4),
            (3, 1, 0, 5),
            (3, 2, 0, 6),
            (3, 2, 1, 7),
        ];
        for (m, t, r_p, want) in cases {
            assert_eq!(cp_branch(&m, 3, t, r_p).unwrap(), want);
        }
    }

    #[test]
    fn cp_undefined_branches() {
        assert_eq!(
            cp_coefficient(&1i64, 3, 0, 0),
            Err(Error::UndefinedBranch { t_p: 0, r_p: 0 })
        );
        assert_eq!(
            cp_coefficient(&1i64, 3, 2, 2),
            Err(Error::UndefinedBranch { t_p: 2, r_p: 2 })
        );
    }

    #[test]
    fn pivot_examples() {
        let c = closed_form_pivot_count(&q(&[1, 1, 1], &[1, 0, 0], &[0], 3, 1)).unwrap();
        assert_eq!((c.count, c.pivot), (2, Some(0)));
        assert_eq!(
            closed_form_pivot_count(&q(&[1, 1, 1], &[1, 0, 0], &[0], 3, 2))
                .unwrap()
                .count,
            18
        );
        let qq = q(&[1, 1], &[1, 0], &[0], 5, 1);
        assert_eq!(
            closed_form_pivot_count(&qq).unwrap().count,
            count_oracle(&qq, 1 << 20).unwrap().count
        );
    }

    #[test]
    fn sign_of_the_other_unit_coefficients() {
        // η = (2/3) = -1 here; the unsigned formula would give 2
        let qq = q(&[1, 1, 2], &[1, 0, 0], &[0], 3, 1);
        assert_eq!(closed_form_pivot_count(&qq).unwrap().count, 10);
        assert_eq!(count_oracle(&qq, 1 << 20).unwrap().count, 10);
        // t_p = 4: the sign multiplies Δ_p², it is not raised with it
        let qq = q(&[1, 1, 1, 2], &[2, 1, 1, 0], &[1], 3, 1);
        assert_eq!(closed_form_pivot_count(&qq).unwrap().count, 12);
        assert_eq!(count_oracle(&qq, 1 << 20).unwrap().count, 12);
    }

    #[test]
    fn pivot_errors() {
        assert_eq!(
            closed_form_pivot_count(&q(&[1, 1, 1], &[1, 0, 0], &[1], 3, 1)),
            Err(Error::NoPivot)
        );
        assert_eq!(
            closed_form_pivot_count(&q(&[3, 1, 1], &[1, 1, 0], &[0], 3, 1)),
            Err(Error::NoPivot)
        );
        assert!(matches!(
            closed_form_pivot_count(&q(&[1, 2, 3], &[1, 1, 0], &[0], 3, 1)),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(matches!(
            closed_form_pivot_count(&q(&[1, 1, 1], &[1, 0, 0], &[], 3, 1)),
            Err(Error::InvalidInput(_))
        ));
        let f = DiagonalForm::new(vec![3, 1]).unwrap();
        assert_eq!(pivot_counts(&f, &[1, 0], 3, 1), Err(Error::NoPivot));
    }

    #[test]
    fn every_pivot_reported() {
        let f = DiagonalForm::new(vec![1, 2, 1]).unwrap();
        let all = pivot_counts(&f, &[1, 1, 1], 5, 1).unwrap();
        assert_eq!(
            all.iter().map(|c| c.pivot.unwrap()).collect::<Vec<_>>(),
            vec![0, 1, 2]
        );
        for c in all {
            let qq = q(&[1, 2, 1], &[1, 1, 1], &[c.pivot.unwrap()], 5, 1);
            assert_eq!(c.count, count_oracle(&qq, 1 << 20).unwrap().count);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn cp_range(m in -1000i64..1000, p in prop::sample::select(vec![3u64, 5, 7, 11, 13]),
                        t in 1usize..8, r_p in 0u32..2) {
                let c = cp_coefficient(&m, p, t, r_p).unwrap();
                prop_assert!(c >= rat(-1, 1));
                prop_assert!(c <= rat(p as i64 + 1, p as i64 - 1));
            }

            #[test]
            fn matches_exact_count(p in prop::sample::select(vec![3u64, 5, 7]), l in 2usize..=4,
                                   k in 1u32..=2, seed in any::<u64>()) {
                let pi = p as i64;
                let pool = [1, 2, 3, pi, 2 * pi, pi * pi];
                let mut s = seed;
                let mut next = |n: u64| { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (s >> 33) % n };
                let a: Vec<i64> = (0..l).map(|_| pool[next(6) as usize]).collect();
                let u: Vec<i64> = (0..l).map(|_| next(p) as i64).collect();
                let f = DiagonalForm::new(a.clone()).unwrap();
                for j in valid_pivots(&f, &u, p).unwrap() {
                    let qq = q(&a, &u, &[j], p, k);
                    match closed_form_pivot_count(&qq) {
                        Ok(c) => prop_assert_eq!(c.count, count_convolution(&qq, 1 << 20).unwrap().count),
                        Err(Error::HypothesisViolated(_)) => {}
                        Err(e) => prop_assert!(false, "{e}"),
                    }
                }
            }
        }
    }
}
