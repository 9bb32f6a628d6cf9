//! Independent degree-by-degree linear algebra for one-variable morphism complexes.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Rank over Q by plain Gaussian elimination.
pub fn rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let mut r = 0;
    let cols = rows.first().map_or(0, Vec::len);
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = BigRational::one() / rows[r][c].clone();
        let pivot: Vec<BigRational> = rows[r].iter().map(|v| v * &inv).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot) {
                    *v -= &f * pv;
                }
            }
        }
        rows[r] = pivot;
        r += 1;
    }
    r
}

/// `Hom((x^a, x^{d-a}), (x^c, x^{d-c}))` over `k[x]`, split by internal degree
/// with `deg x = 2`; generator `i` of the pair `(p, q)` sits in degree `0` or `d - 2p`.
pub struct OneVarHom {
    d: i64,
    ea: [[Option<i64>; 2]; 2],
    eb: [[Option<i64>; 2]; 2],
    ga: [i64; 2],
    gb: [i64; 2],
}

pub type Unit = (usize, usize, i64);

impl OneVarHom {
    pub fn new(d: i64, a: i64, c: i64) -> Self {
        let delta = |p: i64| [[None, Some(d - p)], [Some(p), None]];
        OneVarHom { d, ea: delta(a), eb: delta(c), ga: [0, d - 2 * a], gb: [0, d - 2 * c] }
    }

    fn units(&self, parity: usize, deg: i64) -> Vec<Unit> {
        let mut out = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                if (i + j) % 2 != parity {
                    continue;
                }
                let twice_k = deg - self.gb[i] + self.ga[j];
                if twice_k >= 0 && twice_k % 2 == 0 {
                    out.push((i, j, twice_k / 2));
                }
            }
        }
        out
    }

    /// `delta_B phi - (-1)^p phi delta_A` on a unit.
    fn apply(&self, parity: usize, (i, j, k): Unit) -> BTreeMap<Unit, i64> {
        let mut out = BTreeMap::new();
        for i2 in 0..2 {
            if let Some(e) = self.eb[i2][i] {
                *out.entry((i2, j, k + e)).or_insert(0) += 1;
            }
        }
        let s = if parity == 0 { -1 } else { 1 };
        for j2 in 0..2 {
            if let Some(e) = self.ea[j][j2] {
                *out.entry((i, j2, k + e)).or_insert(0) += s;
            }
        }
        out.retain(|_, v| *v != 0);
        out
    }

    fn differential_rank(&self, parity: usize, deg: i64) -> usize {
        let src = self.units(parity, deg);
        let tgt = self.units(1 - parity, deg + self.d);
        if src.is_empty() || tgt.is_empty() {
            return 0;
        }
        let rows: Vec<Vec<BigRational>> = src
            .iter()
            .map(|&u| {
                let img = self.apply(parity, u);
                assert!(img.keys().all(|k| tgt.contains(k)), "differential leaves its degree");
                tgt.iter().map(|t| BigRational::from_integer(BigInt::from(*img.get(t).unwrap_or(&0)))).collect()
            })
            .collect();
        rank(rows)
    }

    /// `(dim H^0, dim H^1)` summed over internal degrees up to `top`.
    pub fn dims(&self, top: i64) -> (usize, usize) {
        let low = -2 * self.d;
        let mut h = [0usize; 2];
        for deg in low..=top {
            for (p, hp) in h.iter_mut().enumerate() {
                let dim = self.units(p, deg).len();
                *hp += dim - self.differential_rank(p, deg) - self.differential_rank(1 - p, deg - self.d);
            }
        }
        (h[0], h[1])
    }
}

