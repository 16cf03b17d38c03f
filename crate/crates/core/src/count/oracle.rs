use super::{CountQuery, CountResult, Method};
use crate::error::{Error, Result};

/// Count by enumerating all of `(ℤ/p^k)^ℓ`, checking every condition at
/// each point.
pub fn count_oracle(q: &CountQuery, ceiling: u128) -> Result<CountResult> {
    Ok(count_oracle_many(std::slice::from_ref(q), ceiling)?.remove(0))
}

/// [`count_oracle`] for several queries sharing `(Q, u, p, k)` and
/// differing in `S` and `r`, in a single enumeration.
pub fn count_oracle_many(qs: &[CountQuery], ceiling: u128) -> Result<Vec<CountResult>> {
    let Some(q) = qs.first() else {
        return Ok(Vec::new());
    };
    if qs
        .iter()
        .any(|o| o.form() != q.form() || o.u() != q.u() || o.p() != q.p() || o.k() != q.k())
    {
        return Err(Error::InvalidInput(
            "batched queries must share form, u, p and k".into(),
        ));
    }
    let l = q.rank();
    let size = (q.modulus() as u128)
        .checked_pow(l as u32)
        .unwrap_or(u128::MAX);
    if size > ceiling {
        return Err(Error::TooLarge { size, ceiling });
    }
    let m = q.modulus();
    let walker = Walker {
        m,
        p: q.p(),
        target: q.target(),
        terms: (0..l)
            .map(|j| {
                let a = q.coeff_residue(j) as u128;
                (0..m)
                    .map(|v| (a * (v as u128 * v as u128 % m as u128) % m as u128) as u64)
                    .collect()
            })
            .collect(),
        filters: qs.iter().map(Filter::new).collect(),
    };
    let mut counts = vec![0u128; qs.len()];
    let mut x = vec![0u64; l];
    walker.walk(&mut x, 0, 0, &mut counts);
    Ok(counts
        .into_iter()
        .map(|count| CountResult {
            count,
            method: Method::Oracle,
            pivot: None,
        })
        .collect())
}

struct Filter {
    shift: u64,
    u: Vec<u64>,
    in_subset: Vec<bool>,
    primitive: bool,
}

impl Filter {
    fn new(q: &CountQuery) -> Self {
        let shift = q.shift_modulus();
        Self {
            shift,
            u: (0..q.rank()).map(|j| q.u_residue(j, shift)).collect(),
            in_subset: (0..q.rank()).map(|j| q.subset().contains(&j)).collect(),
            primitive: q.requires_primitive(),
        }
    }

    fn admits(&self, x: &[u64], p: u64) -> bool {
        if self.primitive && x.iter().all(|v| v % p == 0) {
            return false;
        }
        x.iter()
            .enumerate()
            .all(|(j, &v)| (!self.in_subset[j] || v % p != 0) && v % self.shift == self.u[j])
    }
}

struct Walker {
    m: u64,
    p: u64,
    target: u64,
    /// `terms[j][v] = a_j v² mod p^k`.
    terms: Vec<Vec<u64>>,
    filters: Vec<Filter>,
}

impl Walker {
    fn walk(&self, x: &mut [u64], depth: usize, partial: u64, counts: &mut [u128]) {
        let last = x.len() - 1;
        if depth == last {
            for (v, &term) in self.terms[last].iter().enumerate() {
                if (partial + term) % self.m == self.target {
                    x[last] = v as u64;
                    for (c, f) in counts.iter_mut().zip(&self.filters) {
                        *c += u128::from(f.admits(x, self.p));
                    }
                }
            }
            return;
        }
        for (v, &term) in self.terms[depth].iter().enumerate() {
            x[depth] = v as u64;
            self.walk(x, depth + 1, (partial + term) % self.m, counts);
        }
    }
}
