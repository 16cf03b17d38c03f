use super::{CountQuery, CountResult, Method};
use crate::error::{Error, Result};

/// Count by convolving per-coordinate distributions of `a_j x_j² mod p^k`.
///
/// The `S` and `x ≡ u (mod p^r)` constraints are applied while building
/// each coordinate's distribution. For `S = ∅, r = 0` the imprimitive
/// solutions `x = p·y` are subtracted afterwards.
pub fn count_convolution(q: &CountQuery, ceiling: u64) -> Result<CountResult> {
    let m = q.modulus();
    if m > ceiling {
        return Err(Error::TooLarge {
            size: m as u128,
            ceiling: ceiling as u128,
        });
    }
    let p = q.p();
    let shift = q.shift_modulus();
    let dists: Vec<Vec<u128>> = (0..q.rank())
        .map(|j| {
            let start = q.u_residue(j, shift);
            let unit = q.subset().contains(&j);
            let xs = (start..m)
                .step_by(shift as usize)
                .filter(|x| !unit || x % p != 0);
            distribution(q.coeff_residue(j), xs, m)
        })
        .collect();
    let target = q.target();
    let mut count = solutions(&dists, target, m);
    if q.requires_primitive() {
        count -= imprimitive(q, target);
    }
    Ok(CountResult {
        count,
        method: Method::Convolution,
        pivot: None,
    })
}

/// Solutions of the form `x = p·y`.
fn imprimitive(q: &CountQuery, target: u64) -> u128 {
    let p = q.p();
    if q.k() == 1 {
        return u128::from(target.is_multiple_of(p));
    }
    if !target.is_multiple_of(p * p) {
        return 0;
    }
    // Q(py) = p²Q(y): count y mod p^{k-2}, each with p^ℓ lifts mod p^{k-1}.
    let m = p.pow(q.k() - 2);
    let dists: Vec<Vec<u128>> = (0..q.rank())
        .map(|j| {
            let a = (q.form().coeffs()[j] as i128).rem_euclid(m as i128) as u64;
            distribution(a, 0..m, m)
        })
        .collect();
    solutions(&dists, (target / (p * p)) % m, m) * (p as u128).pow(q.rank() as u32)
}

fn distribution(a: u64, xs: impl Iterator<Item = u64>, m: u64) -> Vec<u128> {
    let mut d = vec![0u128; m as usize];
    let m128 = m as u128;
    for x in xs {
        let v = a as u128 * (x as u128 * x as u128 % m128) % m128;
        d[v as usize] += 1;
    }
    d
}

/// Number of tuples whose values sum to `target` modulo `m`.
fn solutions(dists: &[Vec<u128>], target: u64, m: u64) -> u128 {
    let m = m as usize;
    let (last, init) = dists.split_last().expect("rank ≥ 1");
    let mut acc = vec![0u128; m];
    acc[0] = 1;
    for d in init {
        let mut next = vec![0u128; m];
        for (s, &cs) in acc.iter().enumerate().filter(|(_, c)| **c != 0) {
            for (v, &cv) in d.iter().enumerate().filter(|(_, c)| **c != 0) {
                next[(s + v) % m] += cs * cv;
            }
        }
        acc = next;
    }
    let target = target as usize;
    acc.iter()
        .enumerate()
        .map(|(s, &cs)| cs * last[(target + m - s) % m])
        .sum()
}
