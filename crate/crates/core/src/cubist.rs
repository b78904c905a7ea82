//! Cubist subsets of `Z^r`: a base ideal minus an ordered list of removed
//! maximal points, with all the point-local combinatorics (facets, the vertex
//! to facet bijection λ, μ-cones, `I_X` sets, flat vertices, the order ⪰).
//!
//! Axes are numbered `1..=r` in every public signature (facet axes, flat
//! witnesses, permutations). Coordinates of a [`LatticePoint`] are indexed
//! from 0 like any slice.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CubistError {
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("point {0} is not in the set")]
    NotInSet(LatticePoint),
    #[error("removal #{index} at {point} is illegal: {reason}")]
    InvalidRemoval {
        index: usize,
        point: LatticePoint,
        reason: String,
    },
    #[error("invalid base: {0}")]
    InvalidBase(String),
    #[error("invalid axis order: {0}")]
    InvalidAxisOrder(String),
}

/// A point of `Z^r`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn new(coords: impl Into<Vec<i64>>) -> Self {
        LatticePoint(coords.into())
    }

    pub fn zero(r: usize) -> Self {
        LatticePoint(vec![0; r])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    /// `x[m] = x + m(1,…,1)`.
    pub fn shift(&self, m: i64) -> Self {
        LatticePoint(self.0.iter().map(|c| c + m).collect())
    }

    /// `x + delta·ε_axis` with a 1-based axis.
    pub fn step(&self, axis: usize, delta: i64) -> Self {
        let mut out = self.clone();
        out.0[axis - 1] += delta;
        out
    }

    /// L1 distance.
    pub fn distance(&self, other: &LatticePoint) -> i64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum()
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &LatticePoint) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &LatticePoint) -> Self {
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &LatticePoint) -> Self {
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Index<usize> for LatticePoint {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for LatticePoint {
    fn index_mut(&mut self, i: usize) -> &mut i64 {
        &mut self.0[i]
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Vec<i64>> for LatticePoint {
    fn from(v: Vec<i64>) -> Self {
        LatticePoint(v)
    }
}

impl<const N: usize> From<[i64; N]> for LatticePoint {
    fn from(v: [i64; N]) -> Self {
        LatticePoint(v.to_vec())
    }
}

/// L1 distance between two points of equal rank.
pub fn distance(x: &LatticePoint, y: &LatticePoint) -> Result<i64, CubistError> {
    if x.rank() != y.rank() {
        return Err(CubistError::RankMismatch {
            expected: x.rank(),
            got: y.rank(),
        });
    }
    Ok(x.distance(y))
}

/// A finite axis-parallel box `lo <= x <= hi`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lo: LatticePoint,
    pub hi: LatticePoint,
}

impl Window {
    pub fn new(lo: LatticePoint, hi: LatticePoint) -> Self {
        assert_eq!(lo.rank(), hi.rank(), "window corners of different rank");
        Window { lo, hi }
    }

    /// The L∞ ball of the given radius.
    pub fn cube(center: &LatticePoint, radius: i64) -> Self {
        Window {
            lo: center.shift(-radius),
            hi: center.shift(radius),
        }
    }

    /// Smallest box containing all the points.
    pub fn bounding<'a>(points: impl IntoIterator<Item = &'a LatticePoint>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut lo = first.clone();
        let mut hi = first.clone();
        for p in it {
            for i in 0..lo.rank() {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        Some(Window { lo, hi })
    }

    pub fn rank(&self) -> usize {
        self.lo.rank()
    }

    pub fn inflate(&self, k: i64) -> Self {
        Window {
            lo: self.lo.shift(-k),
            hi: self.hi.shift(k),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo.0.iter().zip(&self.hi.0).any(|(a, b)| a > b)
    }

    pub fn contains(&self, x: &LatticePoint) -> bool {
        x.rank() == self.rank() && self.lo.le(x) && x.le(&self.hi)
    }

    /// All lattice points in lexicographic order.
    pub fn points(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        let empty = self.is_empty() || self.rank() == 0;
        let mut cur = if empty { None } else { Some(self.lo.clone()) };
        std::iter::from_fn(move || {
            let out = cur.clone()?;
            let mut next = out.clone();
            let mut i = self.rank();
            loop {
                if i == 0 {
                    cur = None;
                    break;
                }
                i -= 1;
                if next[i] < self.hi[i] {
                    next[i] += 1;
                    cur = Some(next);
                    break;
                }
                next[i] = self.lo[i];
            }
            Some(out)
        })
    }

    /// Short tag used in file names, e.g. `lo-2_-2_-2-hi2_2_2`.
    pub fn tag(&self) -> String {
        let join = |p: &LatticePoint| p.0.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("_");
        format!("lo{}-hi{}", join(&self.lo), join(&self.hi))
    }
}

/// The base ideal `X^-` before removals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum BaseIdeal {
    /// `{x : x_axis <= level}`.
    Flat { axis: usize, level: i64 },
    /// `anchor + Z^r_{<=0}`.
    Corner { anchor: LatticePoint },
    /// The rank-3 ideal attached to a weight-2 block with prime `p` and the
    /// given pyramid: `Z×Z×Z_{<=0}` plus the points `(i,j,1)` with
    /// `i+j <= 1` or `(-i, j-1)` in the pyramid.
    Weight2 { p: usize, pyramid: BTreeSet<(usize, usize)> },
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Richards closure: `(u,v)` in the set and `u<w<v` force `(u,w)` and `(w,v)`.
pub fn pyramid_is_closed(pyramid: &BTreeSet<(usize, usize)>) -> bool {
    pyramid
        .iter()
        .all(|&(u, v)| (u + 1..v).all(|w| pyramid.contains(&(u, w)) && pyramid.contains(&(w, v))))
}

impl BaseIdeal {
    fn check(&self, rank: usize) -> Result<(), CubistError> {
        match self {
            BaseIdeal::Flat { axis, .. } => {
                if *axis < 1 || *axis > rank {
                    return Err(CubistError::InvalidBase(format!("flat axis {axis} outside 1..={rank}")));
                }
            }
            BaseIdeal::Corner { anchor } => {
                if anchor.rank() != rank {
                    return Err(CubistError::RankMismatch {
                        expected: rank,
                        got: anchor.rank(),
                    });
                }
            }
            BaseIdeal::Weight2 { p, pyramid } => {
                if rank != 3 {
                    return Err(CubistError::InvalidBase("weight-2 bases have rank 3".into()));
                }
                if !is_prime(*p) {
                    return Err(CubistError::InvalidBase(format!("{p} is not prime")));
                }
                if let Some(bad) = pyramid.iter().find(|&&(u, v)| !(u < v && v < *p)) {
                    return Err(CubistError::InvalidBase(format!(
                        "pyramid pair {bad:?} is not of the form u<v<{p}"
                    )));
                }
                if !pyramid_is_closed(pyramid) {
                    return Err(CubistError::InvalidBase("pyramid is not closed under u<w<v".into()));
                }
            }
        }
        Ok(())
    }

    fn contains(&self, y: &LatticePoint) -> bool {
        match self {
            BaseIdeal::Flat { axis, level } => y[axis - 1] <= *level,
            BaseIdeal::Corner { anchor } => y.le(anchor),
            BaseIdeal::Weight2 { pyramid, .. } => {
                let (i, j, k) = (y[0], y[1], y[2]);
                if k <= 0 {
                    return true;
                }
                if k > 1 {
                    return false;
                }
                if i + j <= 1 {
                    return true;
                }
                match (usize::try_from(-i), usize::try_from(j - 1)) {
                    (Ok(u), Ok(v)) => pyramid.contains(&(u, v)),
                    _ => false,
                }
            }
        }
    }
}

/// The (r−1)-cube `anchor + F_axis`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Facet {
    pub anchor: LatticePoint,
    pub axis: usize,
}

impl Facet {
    /// The `2^{r-1}` points `anchor + Σ_{j<i} a_j ε_j − Σ_{j>i} a_j ε_j`,
    /// counting in binary over the free axes with the lowest axis as the low bit.
    pub fn points(&self) -> Vec<LatticePoint> {
        let r = self.anchor.rank();
        let free: Vec<usize> = (1..=r).filter(|&j| j != self.axis).collect();
        (0u64..1 << free.len())
            .map(|mask| {
                let mut p = self.anchor.clone();
                for (bit, &j) in free.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        p[j - 1] += if j < self.axis { 1 } else { -1 };
                    }
                }
                p
            })
            .collect()
    }

    pub fn contains(&self, y: &LatticePoint) -> bool {
        (1..=self.anchor.rank()).all(|j| {
            let d = y[j - 1] - self.anchor[j - 1];
            match j.cmp(&self.axis) {
                std::cmp::Ordering::Less => d == 0 || d == 1,
                std::cmp::Ordering::Equal => d == 0,
                std::cmp::Ordering::Greater => d == 0 || d == -1,
            }
        })
    }
}

/// `facet_points` as a free function; `r` must match the anchor's rank.
pub fn facet_points(f: &Facet, r: usize) -> Vec<LatticePoint> {
    assert!(f.axis >= 1 && f.axis <= r && f.anchor.rank() == r);
    f.points()
}

/// Outcome of a bounded search for a ⪰-chain. A negative answer only says
/// that no chain exists inside the searched box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reach {
    Holds,
    NotFoundWithinBox,
}

#[derive(Serialize, Deserialize)]
struct RawSet {
    rank: usize,
    base: BaseIdeal,
    #[serde(default)]
    removals: Vec<LatticePoint>,
}

/// A Cubist subset `X = X^- \ X^-[-1]` with `X^-` a base ideal minus an
/// ordered list of removed points.
///
/// [`CubistSet::new`] validates the removals; deserialization only checks the
/// shape, so that [`CubistSet::validate`] can report the offending removal.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "RawSet", into = "RawSet")]
pub struct CubistSet {
    rank: usize,
    base: BaseIdeal,
    removals: Vec<LatticePoint>,
    removed: HashSet<LatticePoint>,
}

impl From<CubistSet> for RawSet {
    fn from(s: CubistSet) -> Self {
        RawSet {
            rank: s.rank,
            base: s.base,
            removals: s.removals,
        }
    }
}

impl TryFrom<RawSet> for CubistSet {
    type Error = CubistError;
    fn try_from(raw: RawSet) -> Result<Self, CubistError> {
        CubistSet::unvalidated(raw.rank, raw.base, raw.removals)
    }
}

impl PartialEq for CubistSet {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.base == other.base && self.removals == other.removals
    }
}

impl Eq for CubistSet {}

impl fmt::Debug for CubistSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CubistSet")
            .field("rank", &self.rank)
            .field("base", &self.base)
            .field("removals", &self.removals)
            .finish()
    }
}

impl CubistSet {
    /// Builds and validates a set.
    pub fn new(rank: usize, base: BaseIdeal, removals: Vec<LatticePoint>) -> Result<Self, CubistError> {
        let set = Self::unvalidated(rank, base, removals)?;
        set.validate()?;
        Ok(set)
    }

    /// Checks ranks and the base, but not the legality of the removals.
    pub fn unvalidated(rank: usize, base: BaseIdeal, removals: Vec<LatticePoint>) -> Result<Self, CubistError> {
        if rank == 0 {
            return Err(CubistError::InvalidBase("rank must be positive".into()));
        }
        base.check(rank)?;
        if let Some(bad) = removals.iter().find(|p| p.rank() != rank) {
            return Err(CubistError::RankMismatch {
                expected: rank,
                got: bad.rank(),
            });
        }
        let removed = removals.iter().cloned().collect();
        Ok(CubistSet {
            rank,
            base,
            removals,
            removed,
        })
    }

    pub fn flat(rank: usize, axis: usize, level: i64) -> Result<Self, CubistError> {
        Self::new(rank, BaseIdeal::Flat { axis, level }, vec![])
    }

    pub fn corner(anchor: LatticePoint) -> Result<Self, CubistError> {
        Self::new(anchor.rank(), BaseIdeal::Corner { anchor }, vec![])
    }

    pub fn weight2(p: usize, pyramid: BTreeSet<(usize, usize)>) -> Result<Self, CubistError> {
        Self::new(3, BaseIdeal::Weight2 { p, pyramid }, vec![])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn base(&self) -> &BaseIdeal {
        &self.base
    }

    pub fn removals(&self) -> &[LatticePoint] {
        &self.removals
    }

    /// Every removal, in order, must be a maximal element of the ideal left by
    /// the earlier ones. Flat bases have no maximal elements at all.
    pub fn validate(&self) -> Result<(), CubistError> {
        let mut removed: HashSet<LatticePoint> = HashSet::new();
        for (index, z) in self.removals.iter().enumerate() {
            let fail = |reason: String| CubistError::InvalidRemoval {
                index,
                point: z.clone(),
                reason,
            };
            if matches!(self.base, BaseIdeal::Flat { .. }) {
                return Err(fail("a flat base has no maximal elements".into()));
            }
            let in_ideal = |y: &LatticePoint| self.base.contains(y) && !removed.contains(y);
            if !in_ideal(z) {
                return Err(fail("not in the current ideal".into()));
            }
            if let Some(i) = (1..=self.rank).find(|&i| in_ideal(&z.step(i, 1))) {
                return Err(fail(format!("not maximal: z+e{i} is still in the ideal")));
            }
            removed.insert(z.clone());
        }
        Ok(())
    }

    fn check_rank(&self, y: &LatticePoint) -> Result<(), CubistError> {
        if y.rank() != self.rank {
            return Err(CubistError::RankMismatch {
                expected: self.rank,
                got: y.rank(),
            });
        }
        Ok(())
    }

    fn check_member(&self, y: &LatticePoint) -> Result<(), CubistError> {
        self.check_rank(y)?;
        if !self.has(y) {
            return Err(CubistError::NotInSet(y.clone()));
        }
        Ok(())
    }

    pub(crate) fn in_ideal(&self, y: &LatticePoint) -> bool {
        self.base.contains(y) && !self.removed.contains(y)
    }

    /// Membership in `X` without the rank check.
    pub(crate) fn has(&self, y: &LatticePoint) -> bool {
        self.in_ideal(y) && !self.in_ideal(&y.shift(1))
    }

    pub fn contains_ideal(&self, y: &LatticePoint) -> Result<bool, CubistError> {
        self.check_rank(y)?;
        Ok(self.in_ideal(y))
    }

    pub fn contains(&self, y: &LatticePoint) -> Result<bool, CubistError> {
        self.check_rank(y)?;
        Ok(self.has(y))
    }

    /// 0-based position (in `order`) of the λ axis.
    fn lambda_position(&self, x: &LatticePoint, order: &[usize]) -> usize {
        let mut y = x.clone();
        let mut best = 0;
        for (pos, &axis) in order.iter().enumerate() {
            if self.has(&y) {
                best = pos;
            }
            y[axis - 1] += 1;
        }
        best
    }

    pub(crate) fn lambda_axis(&self, x: &LatticePoint) -> usize {
        let order: Vec<usize> = (1..=self.rank).collect();
        self.lambda_position(x, &order) + 1
    }

    /// `λx = x + F_i` with `i = max{j : x+ε_1+…+ε_{j−1} ∈ X}`.
    pub fn lambda(&self, x: &LatticePoint) -> Result<Facet, CubistError> {
        self.check_member(x)?;
        Ok(Facet {
            anchor: x.clone(),
            axis: self.lambda_axis(x),
        })
    }

    /// Points of the λ-facet of `x` computed with the axes taken in `order`.
    fn lambda_points_ordered(&self, x: &LatticePoint, order: &[usize]) -> Vec<LatticePoint> {
        let k = self.lambda_position(x, order);
        let mut out = vec![x.clone()];
        for (pos, &axis) in order.iter().enumerate() {
            if pos == k {
                continue;
            }
            let delta = if pos < k { 1 } else { -1 };
            let n = out.len();
            for m in 0..n {
                let mut p = out[m].clone();
                p[axis - 1] += delta;
                out.push(p);
            }
        }
        out
    }

    /// Whether `y − base` lies in the cone `C_i` of the λ axis of `base`.
    pub fn in_mu(&self, base: &LatticePoint, y: &LatticePoint) -> Result<bool, CubistError> {
        self.check_member(base)?;
        self.check_rank(y)?;
        Ok(self.in_mu_unchecked(base, self.lambda_axis(base), y))
    }

    pub(crate) fn in_mu_unchecked(&self, base: &LatticePoint, axis: usize, y: &LatticePoint) -> bool {
        (1..=self.rank).all(|k| {
            let d = y[k - 1] - base[k - 1];
            match k.cmp(&axis) {
                std::cmp::Ordering::Less => d <= 0,
                std::cmp::Ordering::Equal => true,
                std::cmp::Ordering::Greater => d >= 0,
            }
        })
    }

    /// The least axis `i` with `x ± ε_i` both outside `X`, or `None` when `x`
    /// is crooked.
    pub fn is_flat(&self, x: &LatticePoint) -> Result<Option<usize>, CubistError> {
        self.check_member(x)?;
        Ok((1..=self.rank).find(|&i| !self.has(&x.step(i, 1)) && !self.has(&x.step(i, -1))))
    }

    /// `I_X(x)`: the points of `X` in the unit box `[x, x[1]]`, sorted.
    pub fn i_set(&self, x: &LatticePoint) -> Result<Vec<LatticePoint>, CubistError> {
        self.check_member(x)?;
        Ok(self.i_set_unchecked(x))
    }

    pub(crate) fn i_set_unchecked(&self, x: &LatticePoint) -> Vec<LatticePoint> {
        let mut out: Vec<LatticePoint> = Window::new(x.clone(), x.shift(1))
            .points()
            .filter(|z| self.has(z))
            .collect();
        out.sort();
        out
    }

    /// All facets inside `X` through `x`, one per sign pattern `(S, i ∉ S)`.
    pub fn facets_containing(&self, x: &LatticePoint) -> Result<Vec<Facet>, CubistError> {
        self.check_member(x)?;
        Ok(self.facets_containing_unchecked(x))
    }

    pub(crate) fn facets_containing_unchecked(&self, x: &LatticePoint) -> Vec<Facet> {
        let r = self.rank;
        let mut out = Vec::new();
        for mask in 0u64..1 << r {
            let mut top = x.clone();
            for j in 0..r {
                if mask >> j & 1 == 1 {
                    top[j] += 1;
                }
            }
            if !self.has(&top) {
                continue;
            }
            for i in 1..=r {
                if mask >> (i - 1) & 1 == 1 || self.has(&top.step(i, 1)) {
                    continue;
                }
                let mut anchor = x.clone();
                for j in 1..=r {
                    let in_s = mask >> (j - 1) & 1 == 1;
                    if j < i && !in_s {
                        anchor[j - 1] -= 1;
                    } else if j > i && in_s {
                        anchor[j - 1] += 1;
                    }
                }
                out.push(Facet { anchor, axis: i });
            }
        }
        out.sort();
        out
    }

    /// The vertex of `λx` opposite `x`.
    pub fn opposite(&self, x: &LatticePoint) -> Result<LatticePoint, CubistError> {
        let i = self.lambda(x)?.axis;
        let mut out = x.clone();
        for j in 1..=self.rank {
            if j < i {
                out[j - 1] += 1;
            } else if j > i {
                out[j - 1] -= 1;
            }
        }
        Ok(out)
    }

    /// Default search box for [`CubistSet::order_geq`]: the bounding box of
    /// `{x, y}` inflated by `2r(d(x,y)+1)`.
    pub fn default_order_box(&self, x: &LatticePoint, y: &LatticePoint) -> Window {
        let d = x.distance(y);
        Window::bounding([x, y]).unwrap().inflate(2 * self.rank as i64 * (d + 1))
    }

    /// Searches for a chain `x = x⁰, x¹, …, x^l = y` with `x^{m+1} ∈ λx^m`
    /// staying inside `search` (the default box when `None`).
    pub fn order_geq(&self, x: &LatticePoint, y: &LatticePoint, search: Option<&Window>) -> Result<Reach, CubistError> {
        let order: Vec<usize> = (1..=self.rank).collect();
        self.order_geq_permuted(x, y, search, &order)
    }

    /// Like [`CubistSet::order_geq`] for the order obtained by taking the axes
    /// in the sequence `order` (a permutation of `1..=r`).
    pub fn order_geq_permuted(
        &self,
        x: &LatticePoint,
        y: &LatticePoint,
        search: Option<&Window>,
        order: &[usize],
    ) -> Result<Reach, CubistError> {
        self.check_member(x)?;
        self.check_member(y)?;
        let mut seen = vec![false; self.rank];
        if order.len() != self.rank || !order.iter().all(|&a| a >= 1 && a <= self.rank && !std::mem::replace(&mut seen[a - 1], true)) {
            return Err(CubistError::InvalidAxisOrder(format!("{order:?} is not a permutation of 1..={}", self.rank)));
        }
        let default_box;
        let search = match search {
            Some(w) => w,
            None => {
                default_box = self.default_order_box(x, y);
                &default_box
            }
        };
        if x == y {
            return Ok(Reach::Holds);
        }
        let mut visited: HashSet<LatticePoint> = HashSet::new();
        let mut queue = VecDeque::new();
        visited.insert(x.clone());
        queue.push_back(x.clone());
        while let Some(cur) = queue.pop_front() {
            for next in self.lambda_points_ordered(&cur, order) {
                if next == *y {
                    return Ok(Reach::Holds);
                }
                if search.contains(&next) && visited.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        Ok(Reach::NotFoundWithinBox)
    }

    /// Largest `t` with `w[t]` in the ideal; exists because every line parallel
    /// to `(1,…,1)` meets the ideal in a nonempty proper down-set.
    fn fiber_top(&self, w: &LatticePoint) -> i64 {
        let (mut lo, mut hi);
        if self.in_ideal(w) {
            lo = 0;
            let mut step = 1;
            while self.in_ideal(&w.shift(lo + step)) {
                lo += step;
                step *= 2;
            }
            hi = lo + step;
        } else {
            hi = 0;
            let mut step = 1;
            while !self.in_ideal(&w.shift(hi - step)) {
                hi -= step;
                step *= 2;
            }
            lo = hi - step;
        }
        // invariant: lo in the ideal, hi not
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.in_ideal(&w.shift(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// The unique point of `X` on the line through `w` parallel to `(1,…,1)`.
    pub fn fiber_point(&self, w: &LatticePoint) -> Result<LatticePoint, CubistError> {
        self.check_rank(w)?;
        Ok(w.shift(self.fiber_top(w)))
    }

    /// `X ∩ window` in lexicographic order, found line by line.
    pub fn points_in_window(&self, window: &Window) -> Vec<LatticePoint> {
        if window.is_empty() {
            return vec![];
        }
        assert_eq!(window.rank(), self.rank, "window rank");
        let mut out: Vec<LatticePoint> = window
            .points()
            .filter(|w| (0..self.rank).any(|i| w[i] == window.lo[i]))
            .map(|w| w.shift(self.fiber_top(&w)))
            .filter(|x| window.contains(x))
            .collect();
        out.sort();
        out
    }

    /// Same result as [`CubistSet::points_in_window`] by testing every point.
    pub fn points_in_window_scan(&self, window: &Window) -> Vec<LatticePoint> {
        window.points().filter(|x| self.has(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[i64]) -> LatticePoint {
        LatticePoint::new(c.to_vec())
    }

    fn corner(r: usize) -> CubistSet {
        CubistSet::corner(LatticePoint::zero(r)).unwrap()
    }

    #[test]
    fn ideal_and_set_membership() {
        let c = corner(3);
        assert!(c.contains_ideal(&pt(&[-3, 0, -1])).unwrap());
        assert!(!c.contains_ideal(&pt(&[1, -5, -5])).unwrap());
        let c0 = CubistSet::new(3, c.base().clone(), vec![pt(&[0, 0, 0])]).unwrap();
        assert!(!c0.contains_ideal(&pt(&[0, 0, 0])).unwrap());
        assert!(c.contains(&pt(&[0, -2, -5])).unwrap());
        assert!(!c.contains(&pt(&[-1, -1, -1])).unwrap());
        let f = CubistSet::flat(3, 2, 0).unwrap();
        assert!(f.contains(&pt(&[7, 0, -4])).unwrap());
        assert_eq!(
            c.contains(&pt(&[0, 0])),
            Err(CubistError::RankMismatch { expected: 3, got: 2 })
        );
    }

    #[test]
    fn removal_validation() {
        let base = BaseIdeal::Corner { anchor: pt(&[0, 0, 0]) };
        assert!(CubistSet::new(3, base.clone(), vec![pt(&[0, 0, 0])]).is_ok());
        let err = CubistSet::new(3, base.clone(), vec![pt(&[-1, 0, 0])]).unwrap_err();
        assert!(matches!(err, CubistError::InvalidRemoval { index: 0, .. }));
        assert!(CubistSet::new(3, base, vec![pt(&[0, 0, 0]), pt(&[-1, 0, 0])]).is_ok());
        let flat = BaseIdeal::Flat { axis: 1, level: 0 };
        assert!(CubistSet::new(1, flat, vec![pt(&[0])]).is_err());
    }

    #[test]
    fn distances() {
        assert_eq!(distance(&pt(&[0, 0]), &pt(&[2, -1])), Ok(3));
        assert_eq!(distance(&pt(&[1, 2, 3]), &pt(&[0, 0, 0])), Ok(6));
        assert_eq!(distance(&pt(&[4, 4]), &pt(&[4, 4])), Ok(0));
    }

    #[test]
    fn lambda_examples() {
        let c = corner(3);
        let x = pt(&[-2, 0, -1]);
        assert_eq!(c.lambda(&x).unwrap(), Facet { anchor: x.clone(), axis: 2 });
        let f = CubistSet::flat(3, 2, 0).unwrap();
        assert_eq!(f.lambda(&pt(&[3, 0, 5])).unwrap().axis, 2);
        let one = CubistSet::corner(pt(&[4])).unwrap();
        assert_eq!(one.lambda(&pt(&[4])).unwrap().points(), vec![pt(&[4])]);
        assert!(c.lambda(&pt(&[-1, -1, -1])).is_err());
    }

    #[test]
    fn facet_point_order() {
        let f = Facet { anchor: pt(&[0, 0]), axis: 1 };
        assert_eq!(facet_points(&f, 2), vec![pt(&[0, 0]), pt(&[0, -1])]);
        let f = Facet { anchor: pt(&[0, 0, 0]), axis: 2 };
        assert_eq!(
            facet_points(&f, 3),
            vec![pt(&[0, 0, 0]), pt(&[1, 0, 0]), pt(&[0, 0, -1]), pt(&[1, 0, -1])]
        );
        let f = Facet { anchor: pt(&[0, 0, 0, 0]), axis: 4 };
        assert!(f.points().iter().all(|p| p.0.iter().all(|&c| c == 0 || c == 1) && p[3] == 0));
    }

    #[test]
    fn mu_cone_and_flatness() {
        let c = corner(3);
        let base = pt(&[-2, 0, -1]);
        assert!(c.in_mu(&base, &base).unwrap());
        assert!(c.in_mu(&base, &pt(&[-2, 5, -1])).unwrap());
        assert!(!c.in_mu(&base, &pt(&[-1, 5, -1])).unwrap());
        assert_eq!(corner(2).is_flat(&pt(&[0, 0])).unwrap(), None);
        assert_eq!(c.is_flat(&pt(&[0, -5, -5])).unwrap(), Some(1));
        assert_eq!(CubistSet::flat(3, 3, 2).unwrap().is_flat(&pt(&[1, 1, 2])).unwrap(), Some(3));
    }

    #[test]
    fn i_sets() {
        let c = corner(3);
        assert_eq!(c.i_set(&pt(&[0, 0, 0])).unwrap(), vec![pt(&[0, 0, 0])]);
        let f = CubistSet::flat(3, 1, 0).unwrap();
        let s = f.i_set(&pt(&[0, 3, 3])).unwrap();
        assert_eq!(s, vec![pt(&[0, 3, 3]), pt(&[0, 3, 4]), pt(&[0, 4, 3]), pt(&[0, 4, 4])]);
    }

    #[test]
    fn facet_counts() {
        let one = CubistSet::corner(pt(&[0])).unwrap();
        assert_eq!(one.facets_containing(&pt(&[0])).unwrap().len(), 1);
        // a flat set is a square grid: four squares at every vertex
        let f = CubistSet::flat(3, 2, 0).unwrap();
        assert_eq!(f.facets_containing(&pt(&[1, 0, 1])).unwrap().len(), 4);
        assert_eq!(corner(3).facets_containing(&pt(&[0, 0, 0])).unwrap().len(), 3);
    }

    #[test]
    fn opposites() {
        let one = CubistSet::corner(pt(&[2])).unwrap();
        assert_eq!(one.opposite(&pt(&[2])).unwrap(), pt(&[2]));
        let f = CubistSet::flat(3, 2, 0).unwrap();
        assert_eq!(f.opposite(&pt(&[5, 0, 5])).unwrap(), pt(&[6, 0, 4]));
    }

    #[test]
    fn window_enumeration() {
        let w = Window::new(pt(&[0, 0]), pt(&[-1, 0]));
        assert!(corner(2).points_in_window(&w).is_empty());
        let one = CubistSet::corner(pt(&[3])).unwrap();
        assert_eq!(one.points_in_window(&Window::cube(&pt(&[0]), 5)), vec![pt(&[3])]);
        let w = Window::new(pt(&[-1, -1]), pt(&[0, 0]));
        assert_eq!(
            corner(2).points_in_window(&w),
            vec![pt(&[-1, 0]), pt(&[0, -1]), pt(&[0, 0])]
        );
    }

    #[test]
    fn small_orders() {
        let c = corner(2);
        let x = pt(&[0, 0]);
        for y in c.lambda(&x).unwrap().points() {
            assert_eq!(c.order_geq(&x, &y, None).unwrap(), Reach::Holds);
        }
        assert!(c.order_geq_permuted(&x, &x, None, &[1, 1]).is_err());
    }

    #[test]
    fn weight2_json_round_trip() {
        let s = CubistSet::weight2(7, [(0, 1), (0, 2), (1, 2)].into_iter().collect()).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["base"]["type"], "weight2");
        let back: CubistSet = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
        let bad = serde_json::json!({"rank": 2, "base": {"type": "weight2", "p": 7, "pyramid": []}, "removals": []});
        assert!(serde_json::from_value::<CubistSet>(bad).is_err());
        let open = serde_json::json!({"rank": 3, "base": {"type": "weight2", "p": 7, "pyramid": [[0, 2]]}});
        assert!(serde_json::from_value::<CubistSet>(open).is_err());
    }
}
