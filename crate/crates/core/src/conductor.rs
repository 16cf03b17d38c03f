//! Largest odd conductors compatible with class number one, per rank.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::RationalInterval;
use crate::error::{Error, Result};
use crate::mass::c_delta;
use crate::Rational;

mod table {
    include!("rank_table.rs");
}

pub use table::RANK_TABLE;

/// Data file the build checks [`RANK_TABLE`] against.
pub const RANK_CONSTANTS_JSON: &str = include_str!("../data/rank_constants.json");

/// Width used to derive `c_lo` from [`c_delta`] when none is given.
pub fn auto_c_lo_width() -> Rational {
    Rational::new(1.into(), 1_000_000.into())
}

pub fn default_delta() -> Rational {
    Rational::new(1.into(), 2.into())
}

pub fn default_c_lo() -> Rational {
    Rational::new(13.into(), 200.into())
}

/// Lower endpoint of `C_δ` at width `10⁻⁶`.
pub fn auto_c_lo(delta: &Rational) -> Result<Rational> {
    Ok(c_delta(delta, &auto_c_lo_width())?.lo().clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RankConstants {
    pub rank: usize,
    pub inv_mass_max: u64,
    pub det_max: u64,
}

pub fn rank_constants(rank: usize) -> Result<RankConstants> {
    RANK_TABLE
        .iter()
        .find(|row| row.0 == rank)
        .map(|&(rank, inv_mass_max, det_max)| RankConstants {
            rank,
            inv_mass_max,
            det_max,
        })
        .ok_or(Error::UnsupportedRank(rank))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConductorBound {
    pub rank: usize,
    #[serde(serialize_with = "crate::ser::rational")]
    pub delta: Rational,
    #[serde(serialize_with = "crate::ser::rational")]
    pub c_lo: Rational,
    /// `B` with `c^{ℓ−1−δ} ≤ B`; exact, so a point interval.
    pub threshold: RationalInterval,
    pub c_max: u64,
}

/// Whether `c^{ℓ−1−δ} ≤ b`, by integer cross-multiplication.
pub fn conductor_admissible(c: u64, rank: usize, delta: &Rational, b: &Rational) -> Result<bool> {
    let (e, d) = exponents(rank, delta)?;
    if !b.is_positive() {
        return Ok(false);
    }
    let lhs = BigInt::from(c).pow(e) * b.denom().pow(d);
    Ok(lhs <= b.numer().pow(d))
}

/// `(E, d)` with `ℓ−1−δ = E/d`.
fn exponents(rank: usize, delta: &Rational) -> Result<(u32, u32)> {
    let top = Rational::from_integer(BigInt::from(rank) - 1);
    if !delta.is_positive() || delta >= &top {
        return Err(Error::InvalidInput(format!(
            "δ = {delta} must lie strictly between 0 and ℓ − 1 = {top}"
        )));
    }
    let n = delta.numer().to_u32();
    let d = delta.denom().to_u32();
    match (n, d) {
        (Some(n), Some(d)) => Ok(((rank as u32 - 1) * d - n, d)),
        _ => Err(Error::InvalidInput(format!("δ = {delta} is too large"))),
    }
}

/// Largest odd `c` with `c^{ℓ−1−δ} ≤ inv_mass / c_lo`.
pub fn solve_conductor(
    rank: usize,
    inv_mass: &Rational,
    delta: &Rational,
    c_lo: &Rational,
) -> Result<ConductorBound> {
    if !c_lo.is_positive() {
        return Err(Error::InvalidInput(format!(
            "c_lo must be positive, got {c_lo}"
        )));
    }
    if !inv_mass.is_positive() {
        return Err(Error::InvalidInput(format!(
            "1/m(L) must be positive, got {inv_mass}"
        )));
    }
    let (e, d) = exponents(rank, delta)?;
    let b = inv_mass / c_lo;
    // c^E ≤ B^d  ⟺  c^E ≤ ⌊num^d / den^d⌋
    let bound = b.numer().pow(d) / b.denom().pow(d);
    let root = bound.nth_root(e);
    let c_max = if root.is_zero() || root.is_odd() {
        root
    } else {
        root - 1
    };
    if c_max.is_zero() {
        return Err(Error::InvalidInput(format!(
            "no odd conductor satisfies c^({e}/{d}) ≤ {b}"
        )));
    }
    let c_max = c_max.to_u64().ok_or(Error::TooLarge {
        size: u128::MAX,
        ceiling: u64::MAX as u128,
    })?;
    Ok(ConductorBound {
        rank,
        delta: delta.clone(),
        c_lo: c_lo.clone(),
        threshold: RationalInterval::point(b),
        c_max,
    })
}

pub fn max_odd_conductor(rank: usize, delta: &Rational, c_lo: &Rational) -> Result<ConductorBound> {
    let rc = rank_constants(rank)?;
    solve_conductor(
        rank,
        &Rational::from_integer(rc.inv_mass_max.into()),
        delta,
        c_lo,
    )
}

/// [`max_odd_conductor`] for every rank 3..=10.
pub fn table1(delta: &Rational, c_lo: &Rational) -> Result<Vec<ConductorBound>> {
    RANK_TABLE
        .iter()
        .map(|&(rank, _, _)| max_odd_conductor(rank, delta, c_lo))
        .collect()
}

/// `⌊B⌋` for a bound, the integer form in which thresholds are usually quoted.
pub fn threshold_floor(bound: &ConductorBound) -> BigInt {
    bound.threshold.lo().floor().to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn constants() {
        assert_eq!(
            rank_constants(3).unwrap(),
            RankConstants {
                rank: 3,
                inv_mass_max: 48,
                det_max: 1728
            }
        );
        assert_eq!(
            rank_constants(5).unwrap().det_max,
            2u64.pow(12) * 7u64.pow(4)
        );
        assert_eq!(rank_constants(10).unwrap().inv_mass_max, 8_360_755_200);
        assert_eq!(rank_constants(2), Err(Error::UnsupportedRank(2)));
        assert_eq!(rank_constants(11), Err(Error::UnsupportedRank(11)));
    }

    #[test]
    fn data_file_matches_table() {
        let v: serde_json::Value = serde_json::from_str(RANK_CONSTANTS_JSON).unwrap();
        let rows = v["ranks"].as_array().unwrap();
        assert_eq!(rows.len(), 8);
        for (row, &(rank, inv, det)) in rows.iter().zip(RANK_TABLE.iter()) {
            assert_eq!(row["rank"], rank as u64);
            assert_eq!(row["inv_mass_max"], inv);
            assert_eq!(row["det_max"], det);
        }
    }

    #[test]
    fn table_reproduced() {
        let rows = table1(&default_delta(), &default_c_lo()).unwrap();
        let got: Vec<(usize, u64)> = rows.iter().map(|b| (b.rank, b.c_max)).collect();
        assert_eq!(
            got,
            vec![
                (3, 81),
                (4, 49),
                (5, 23),
                (6, 23),
                (7, 23),
                (8, 33),
                (9, 23),
                (10, 19)
            ]
        );
    }

    #[test]
    fn tightened_c_lo_keeps_table() {
        let c_lo = auto_c_lo(&default_delta()).unwrap();
        assert!(c_lo > default_c_lo());
        let a: Vec<u64> = table1(&default_delta(), &c_lo)
            .unwrap()
            .iter()
            .map(|b| b.c_max)
            .collect();
        assert_eq!(a, vec![81, 49, 23, 23, 23, 33, 23, 19]);
    }

    #[test]
    fn maximality() {
        for b in table1(&default_delta(), &default_c_lo()).unwrap() {
            let t = b.threshold.lo();
            assert_eq!(b.c_max % 2, 1);
            assert!(conductor_admissible(b.c_max, b.rank, &b.delta, t).unwrap());
            assert!(!conductor_admissible(b.c_max + 2, b.rank, &b.delta, t).unwrap());
        }
    }

    #[test]
    fn printed_thresholds_within_one() {
        let printed: [(usize, i64); 7] = [
            (4, 17_723),
            (5, 59_077),
            (6, 1_595_077),
            (7, 44_662_154),
            (8, 10_718_916_923),
            (9, 21_437_833_847),
            (10, 128_627_003_077),
        ];
        for (rank, value) in printed {
            let b = max_odd_conductor(rank, &default_delta(), &default_c_lo()).unwrap();
            let exact = b.threshold.lo();
            let diff = (exact - rat(value, 1)).abs();
            assert!(diff <= rat(1, 1), "rank {rank}: {exact} vs {value}");
        }
        let b = max_odd_conductor(3, &default_delta(), &default_c_lo()).unwrap();
        assert_eq!(b.threshold.lo(), &rat(9600, 13));
    }

    #[test]
    fn solver_errors() {
        assert_eq!(
            max_odd_conductor(2, &default_delta(), &default_c_lo()),
            Err(Error::UnsupportedRank(2))
        );
        assert!(max_odd_conductor(3, &rat(2, 1), &default_c_lo()).is_err());
        assert!(max_odd_conductor(3, &rat(0, 1), &default_c_lo()).is_err());
        assert!(max_odd_conductor(3, &default_delta(), &rat(0, 1)).is_err());
        // B < 1 leaves no odd conductor
        assert!(solve_conductor(3, &rat(1, 2), &default_delta(), &rat(1, 1)).is_err());
        // B = 1 admits c = 1
        assert_eq!(
            solve_conductor(3, &rat(1, 1), &default_delta(), &rat(1, 1))
                .unwrap()
                .c_max,
            1
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn monotone_in_c_lo_and_mass(rank in 3usize..=10, a in 1i64..500, b in 1i64..500,
                                         n in 1i64..4, d in 1i64..5) {
                let delta = rat(n, d);
                prop_assume!(delta < rat(rank as i64 - 1, 1));
                let inv = Rational::from_integer(rank_constants(rank).unwrap().inv_mass_max.into());
                let lo = rat(a.min(b), 10_000);
                let hi = rat(a.max(b), 10_000);
                let c_small = solve_conductor(rank, &inv, &delta, &hi).map(|x| x.c_max).unwrap_or(0);
                let c_big = solve_conductor(rank, &inv, &delta, &lo).map(|x| x.c_max).unwrap_or(0);
                prop_assert!(c_small <= c_big);
                let more = &inv * rat(a, 1);
                let c_more = solve_conductor(rank, &more, &delta, &hi).map(|x| x.c_max).unwrap_or(0);
                prop_assert!(c_small <= c_more);
            }

            #[test]
            fn solution_is_maximal(rank in 3usize..=10, num in 1i64..100_000, den in 1i64..1000,
                                   n in 1i64..4, d in 1i64..4) {
                let delta = rat(n, d);
                prop_assume!(delta < rat(rank as i64 - 1, 1));
                let inv = rat(num, 1);
                let c_lo = rat(1, den);
                if let Ok(s) = solve_conductor(rank, &inv, &delta, &c_lo) {
                    let b = &inv / &c_lo;
                    prop_assert_eq!(s.c_max % 2, 1);
                    prop_assert!(conductor_admissible(s.c_max, rank, &delta, &b).unwrap());
                    prop_assert!(!conductor_admissible(s.c_max + 2, rank, &delta, &b).unwrap());
                }
            }
        }
    }
}
