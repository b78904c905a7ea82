//! Exact rank of sparse integer vectors by fraction-free elimination.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A sparse vector: `(column, coefficient)` pairs sorted by column, no zeros.
pub type SparseVec = Vec<(usize, BigInt)>;

/// Sorts, merges repeated columns and drops zeros.
pub fn normalize(mut v: SparseVec) -> SparseVec {
    v.sort_by_key(|(c, _)| *c);
    let mut out: SparseVec = Vec::with_capacity(v.len());
    for (c, x) in v {
        match out.last_mut() {
            Some((lc, lx)) if *lc == c => *lx += x,
            _ => out.push((c, x)),
        }
        if out.last().is_some_and(|(_, x)| x.is_zero()) {
            out.pop();
        }
    }
    out
}

/// Divides by the gcd of the coefficients and makes the leading one positive.
fn primitive(v: &mut SparseVec) {
    let mut g = BigInt::zero();
    for (_, x) in v.iter() {
        g = g.gcd(x);
        if g.is_one() {
            break;
        }
    }
    if v.first().is_some_and(|(_, x)| x.is_negative()) {
        g = -g;
    }
    if !g.is_one() && !g.is_zero() {
        for (_, x) in v.iter_mut() {
            *x /= &g;
        }
    }
}

/// `a·u − b·w` for sparse `u`, `w`.
fn combine(a: &BigInt, u: &SparseVec, b: &BigInt, w: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(u.len() + w.len());
    let (mut i, mut j) = (0, 0);
    while i < u.len() || j < w.len() {
        let take_u = j >= w.len() || (i < u.len() && u[i].0 < w[j].0);
        let take_w = i >= u.len() || (j < w.len() && w[j].0 < u[i].0);
        let (c, x) = if take_u {
            i += 1;
            (u[i - 1].0, a * &u[i - 1].1)
        } else if take_w {
            j += 1;
            (w[j - 1].0, -(b * &w[j - 1].1))
        } else {
            i += 1;
            j += 1;
            (u[i - 1].0, a * &u[i - 1].1 - b * &w[j - 1].1)
        };
        if !x.is_zero() {
            out.push((c, x));
        }
    }
    out
}

/// Incremental row echelon form keyed by leading column.
#[derive(Debug, Default, Clone)]
pub struct Echelon {
    pivots: HashMap<usize, SparseVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Leading columns of the stored rows.
    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    /// Adds a vector; returns whether it raised the rank.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let mut v = normalize(v);
        while let Some(lead) = v.first().map(|(c, _)| *c) {
            let Some(p) = self.pivots.get(&lead) else {
                primitive(&mut v);
                self.pivots.insert(lead, v);
                return true;
            };
            let a = p[0].1.clone();
            let b = v[0].1.clone();
            let g = a.gcd(&b);
            v = combine(&(&a / &g), &v, &(&b / &g), p);
            primitive(&mut v);
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(t: &[(usize, i64)]) -> SparseVec {
        t.iter().map(|&(c, x)| (c, BigInt::from(x))).collect()
    }

    #[test]
    fn rank_of_small_systems() {
        let mut e = Echelon::new();
        assert!(e.insert(sv(&[(0, 2), (1, 4)])));
        assert!(!e.insert(sv(&[(1, 2), (0, 1)])));
        assert!(e.insert(sv(&[(1, 1), (2, -1)])));
        assert!(!e.insert(sv(&[(0, 1), (2, 2)])));
        assert!(!e.insert(sv(&[])));
        assert!(!e.insert(sv(&[(3, 1), (3, -1)])));
        assert_eq!(e.rank(), 2);
    }

    #[test]
    fn rank_matches_dense_determinant_cases() {
        // rows of a 3x3 with determinant 0 over Q but not mod small primes
        let mut e = Echelon::new();
        e.insert(sv(&[(0, 3), (1, 5), (2, 7)]));
        e.insert(sv(&[(0, 6), (1, 10), (2, 14)]));
        e.insert(sv(&[(0, 1), (1, 1), (2, 1)]));
        assert_eq!(e.rank(), 2);
        e.insert(sv(&[(2, 1)]));
        assert_eq!(e.rank(), 3);
    }
}
