//! Weight-2 blocks of symmetric groups: abacus combinatorics, pyramids,
//! shorthand labels, the parametrisation `λ_B`, Scopes pairs and the map to a
//! Cubist subset of `Z^3`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cubist::{CubistError, CubistSet, LatticePoint};
use crate::qmatrix::{c_u_brauer_points, PolyMatrix, QMatrixError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlockError {
    #[error("parts must be positive and weakly decreasing: {0:?}")]
    BadPartition(Vec<u64>),
    #[error("{beads} beads cannot represent a partition with {parts} parts")]
    TooFewBeads { beads: usize, parts: usize },
    #[error("p = {0} is not an odd prime")]
    BadPrime(u64),
    #[error("partition has weight {0}, not a {1}-core")]
    NotCore(u64, u64),
    #[error("invalid gap vector: {0}")]
    BadGaps(String),
    #[error("({0},{1}) is not a label index pair")]
    NotInS(usize, usize),
    #[error("label {0} is out of range")]
    BadLabel(ShorthandLabel),
    #[error("{0:?} is not a Scopes pair of this block")]
    NotScopesPair(ScopesPair),
    #[error(transparent)]
    Cubist(#[from] CubistError),
    #[error(transparent)]
    Matrix(#[from] QMatrixError),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition(Vec<u64>);

impl Partition {
    /// Trailing zeros are dropped.
    pub fn new(parts: impl Into<Vec<u64>>) -> Result<Self, BlockError> {
        let mut parts = parts.into();
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(BlockError::BadPartition(parts));
        }
        Ok(Self(parts))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn parts(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn size(&self) -> u64 {
        self.0.iter().sum()
    }

    /// No part is repeated `p` or more times.
    pub fn is_p_regular(&self, p: u64) -> bool {
        let mut run = 0;
        for (i, x) in self.0.iter().enumerate() {
            run = if i > 0 && self.0[i - 1] == *x { run + 1 } else { 1 };
            if run >= p {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// James's abacus: `n` beads on `p` runners, position `k` on runner `k mod p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Abacus {
    pub p: u64,
    pub beads: BTreeSet<u64>,
}

impl Abacus {
    pub fn n(&self) -> usize {
        self.beads.len()
    }

    /// Bead count on each runner.
    pub fn runner_counts(&self) -> Vec<u64> {
        let mut c = vec![0; self.p as usize];
        for b in &self.beads {
            c[(b % self.p) as usize] += 1;
        }
        c
    }

    /// The same partition with `k` extra beads.
    pub fn with_extra_beads(&self, k: u64) -> Self {
        let mut beads: BTreeSet<u64> = self.beads.iter().map(|b| b + k).collect();
        beads.extend(0..k);
        Self { p: self.p, beads }
    }

    fn moved(&self, from: u64, to: u64) -> Self {
        assert!(self.beads.contains(&from), "no bead at {from}");
        assert!(!self.beads.contains(&to), "position {to} is occupied");
        let mut a = self.clone();
        a.beads.remove(&from);
        a.beads.insert(to);
        a
    }
}

/// Beads at `λ_k + n - k` for `k = 1..n`.
pub fn abacus_from_partition(lambda: &Partition, n: usize, p: u64) -> Result<Abacus, BlockError> {
    if n < lambda.len() {
        return Err(BlockError::TooFewBeads { beads: n, parts: lambda.len() });
    }
    let beads = (0..n)
        .map(|k| lambda.0.get(k).copied().unwrap_or(0) + (n - 1 - k) as u64)
        .collect();
    Ok(Abacus { p, beads })
}

pub fn partition_from_abacus(a: &Abacus) -> Partition {
    let parts: Vec<u64> = a.beads.iter().rev().enumerate().map(|(k, b)| b - (a.n() - 1 - k) as u64).collect();
    Partition::new(parts).expect("bead positions give a partition")
}

/// Pushes every bead up its runner; the weight counts the gaps jumped.
pub fn core_and_weight(a: &Abacus) -> (Partition, u64) {
    let p = a.p;
    let mut weight = 0;
    let mut seen = vec![0u64; p as usize];
    for b in &a.beads {
        let r = (b % p) as usize;
        weight += b / p - seen[r];
        seen[r] += 1;
    }
    let beads = (0..p).flat_map(|r| (0..seen[r as usize]).map(move |k| r + k * p)).collect();
    (partition_from_abacus(&Abacus { p, beads }), weight)
}

/// First unoccupied position on each runner, sorted.
pub fn gaps(a: &Abacus) -> Result<Vec<u64>, BlockError> {
    let (_, w) = core_and_weight(a);
    if w > 0 {
        return Err(BlockError::NotCore(w, a.p));
    }
    let mut q: Vec<u64> = a.runner_counts().iter().enumerate().map(|(r, c)| r as u64 + c * a.p).collect();
    q.sort();
    Ok(q)
}

fn is_odd_prime(p: u64) -> bool {
    p > 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Labels of partitions in a weight-2 block, relative to its gap vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ShorthandLabel {
    /// `⟨u,v⟩`, `u < v`: beads at `q_u - p` and `q_v - p` each drop one step.
    Pair { u: usize, v: usize },
    /// `⟨u⟩`: the bead at `q_u - p` drops two steps.
    Single { u: usize },
    /// `⟨u,u⟩`: beads at `q_u - 2p` and `q_u - p` each drop one step.
    Double { u: usize },
}

impl ShorthandLabel {
    pub fn pair(u: usize, v: usize) -> Self {
        assert_ne!(u, v, "use ShorthandLabel::Double for <u,u>");
        Self::Pair { u: u.min(v), v: u.max(v) }
    }

    fn max_index(&self) -> usize {
        match *self {
            Self::Pair { v, .. } => v,
            Self::Single { u } | Self::Double { u } => u,
        }
    }
}

impl fmt::Display for ShorthandLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Pair { u, v } => write!(f, "<{u},{v}>"),
            Self::Single { u } => write!(f, "<{u}>"),
            Self::Double { u } => write!(f, "<{u},{u}>"),
        }
    }
}

/// `s < t` with `q_t - q_s = m p + 1`, `m > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ScopesPair {
    pub s: usize,
    pub t: usize,
    pub m: u64,
}

/// A block of weight 2, described by its `p`-core on an abacus with `n` beads.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockDescriptor {
    pub p: u64,
    pub core: Partition,
    pub n: usize,
    pub gaps: Vec<u64>,
    pub pyramid: BTreeSet<(usize, usize)>,
}

impl BlockDescriptor {
    /// Uses the smallest positive multiple of `p` beads that fits the core.
    pub fn from_core(p: u64, core: Partition) -> Result<Self, BlockError> {
        let n = core.len().div_ceil(p as usize).max(1) * p as usize;
        Self::with_beads(p, core, n)
    }

    pub fn with_beads(p: u64, core: Partition, n: usize) -> Result<Self, BlockError> {
        if !is_odd_prime(p) {
            return Err(BlockError::BadPrime(p));
        }
        let a = abacus_from_partition(&core, n, p)?;
        let q = gaps(&a)?;
        let pyramid = pyramid_of(p, &q);
        assert!(crate::cubist::pyramid_is_closed(&pyramid), "pyramid of a core is closed");
        Ok(Self { p, core, n, gaps: q, pyramid })
    }

    /// From a gap vector: one value per residue class mod `p`.
    pub fn from_gaps(p: u64, q: &[u64]) -> Result<Self, BlockError> {
        if !is_odd_prime(p) {
            return Err(BlockError::BadPrime(p));
        }
        let residues: BTreeSet<u64> = q.iter().map(|x| x % p).collect();
        if q.len() != p as usize || residues.len() != p as usize {
            return Err(BlockError::BadGaps(format!("need {p} values, one per residue mod {p}, got {q:?}")));
        }
        let beads = q.iter().flat_map(|&x| (0..x / p).map(move |k| x % p + k * p)).collect();
        let a = Abacus { p, beads };
        let core = partition_from_abacus(&a);
        Self::with_beads(p, core, a.n())
    }

    pub fn abacus(&self) -> Abacus {
        abacus_from_partition(&self.core, self.n, self.p).expect("checked at construction")
    }

    /// `S_B`: the pyramid plus all `(u,u)` with `u >= 1`.
    pub fn sset(&self) -> BTreeSet<(usize, usize)> {
        let mut s = self.pyramid.clone();
        s.extend((1..self.p as usize).map(|u| (u, u)));
        s
    }

    pub fn in_sset(&self, u: usize, v: usize) -> bool {
        let p = self.p as usize;
        u <= v && v < p && (u, v) != (0, 0) && self.gaps[v] - self.gaps[u] < self.p
    }

    /// The partition with the given label.
    pub fn shorthand_to_partition(&self, label: ShorthandLabel) -> Result<Partition, BlockError> {
        if label.max_index() >= self.p as usize {
            return Err(BlockError::BadLabel(label));
        }
        let p = self.p;
        // 2p extra beads so that q_u - 2p is always a bead
        let a = self.abacus().with_extra_beads(2 * p);
        let q = |u: usize| self.gaps[u] + 2 * p;
        let a = match label {
            ShorthandLabel::Pair { u, v } => a.moved(q(u) - p, q(u)).moved(q(v) - p, q(v)),
            ShorthandLabel::Single { u } => a.moved(q(u) - p, q(u) + p),
            ShorthandLabel::Double { u } => a.moved(q(u) - p, q(u)).moved(q(u) - 2 * p, q(u) - p),
        };
        Ok(partition_from_abacus(&a))
    }

    /// `λ_B(u,v)` for `(u,v)` in `S = {0 <= u <= v < p} \ {(0,0)}`.
    pub fn lambda_b(&self, u: usize, v: usize) -> Result<ShorthandLabel, BlockError> {
        if u > v || v >= self.p as usize || (u, v) == (0, 0) {
            return Err(BlockError::NotInS(u, v));
        }
        Ok(if !self.in_sset(u, v) {
            if !self.in_sset(u + 1, v) {
                ShorthandLabel::pair(u + 1, v)
            } else {
                ShorthandLabel::Double { u: v }
            }
        } else if self.in_sset(u, v + 1) {
            ShorthandLabel::pair(u, v + 1)
        } else {
            ShorthandLabel::Single { u }
        })
    }

    /// `λ_B` on all of `S`, in lexicographic order of `(u,v)`.
    pub fn lambda_table(&self) -> Vec<((usize, usize), ShorthandLabel)> {
        let p = self.p as usize;
        (0..p)
            .flat_map(|u| (u.max(1)..p).map(move |v| (u, v)))
            .map(|(u, v)| ((u, v), self.lambda_b(u, v).expect("in S")))
            .collect()
    }

    pub fn scopes_pairs(&self) -> Vec<ScopesPair> {
        let p = self.p;
        let q = &self.gaps;
        let mut out = Vec::new();
        for s in 0..q.len() {
            for t in s + 1..q.len() {
                let d = q[t] - q[s];
                if d > p && d % p == 1 {
                    out.push(ScopesPair { s, t, m: d / p });
                }
            }
        }
        out
    }

    /// `B̄`: beads at `q_t - kp`, `k = 1..m`, each move one position left.
    pub fn scopes_partner(&self, pair: ScopesPair) -> Result<Self, BlockError> {
        if !self.scopes_pairs().contains(&pair) {
            return Err(BlockError::NotScopesPair(pair));
        }
        let qt = self.gaps[pair.t];
        let mut a = self.abacus();
        for k in 1..=pair.m {
            a = a.moved(qt - k * self.p, qt - k * self.p - 1);
        }
        Self::with_beads(self.p, partition_from_abacus(&a), self.n)
    }

    /// Scopes's bijection on labels from this block to its partner.
    pub fn phi(&self, pair: ScopesPair, label: ShorthandLabel) -> Result<ShorthandLabel, BlockError> {
        if !self.scopes_pairs().contains(&pair) {
            return Err(BlockError::NotScopesPair(pair));
        }
        if pair.m >= 2 {
            return Ok(label);
        }
        let (s, t) = (pair.s, pair.t);
        Ok(match label {
            ShorthandLabel::Double { u } if u == t => ShorthandLabel::Single { u: s },
            ShorthandLabel::Pair { u, v } if (u, v) == (s, t) => ShorthandLabel::Double { u: t },
            ShorthandLabel::Single { u } if u == s => ShorthandLabel::Pair { u: s, v: t },
            other => other,
        })
    }

    /// `x_B(u,v)` for `u < v`.
    pub fn x_b(&self, u: i64, v: i64) -> LatticePoint {
        assert!(u < v, "x_B needs u < v");
        let in_pyramid = u >= 0 && v >= 0 && self.pyramid.contains(&(u as usize, v as usize));
        if in_pyramid {
            LatticePoint::new(vec![-u, 1 + v, 1])
        } else {
            LatticePoint::new(vec![-u - 1, v, 0])
        }
    }

    /// `x_B` on `P = {0 <= u < v < p}`, in lexicographic order of `(u,v)`.
    pub fn x_b_of_p(&self) -> Vec<LatticePoint> {
        let p = self.p as i64;
        (0..p).flat_map(|u| (u + 1..p).map(move |v| (u, v))).map(|(u, v)| self.x_b(u, v)).collect()
    }
}

fn pyramid_of(p: u64, q: &[u64]) -> BTreeSet<(usize, usize)> {
    let n = q.len();
    (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| q[v] - q[u] < p)
        .collect()
}

/// The Cubist subset `X_B` of `Z^3`.
pub fn cubist_from_block(b: &BlockDescriptor) -> Result<CubistSet, BlockError> {
    Ok(CubistSet::weight2(b.p as usize, b.pyramid.clone())?)
}

/// `C_U` of `X_B` restricted to `x_B(P)`.
pub fn block_truncated_cartan(b: &BlockDescriptor) -> Result<PolyMatrix, BlockError> {
    let set = cubist_from_block(b)?;
    Ok(c_u_brauer_points(&set, &b.x_b_of_p())?)
}
