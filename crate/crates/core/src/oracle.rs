//! Brute-force graded dimensions `dim e_y A_n e_x` of quiver algebras with
//! quadratic relations: paths of length `n` from `x`, modulo every relation
//! embedded in a longer path, by exact rank computation.
//!
//! Used as an independent check of the closed-form Cartan matrices.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use serde::Serialize;

use crate::cubist::{CubistSet, LatticePoint, Window};
use crate::laurent::geometric_power;
use crate::linalg::Echelon;
use crate::qmatrix::{c_u_brauer, QMatrixError};

/// An arrow direction: `axis` in `1..=r`, `up` for `+ε_axis`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub axis: usize,
    pub up: bool,
}

impl Step {
    fn code(self) -> u8 {
        (2 * (self.axis - 1) + usize::from(!self.up)) as u8
    }

    fn from_code(c: u8) -> Self {
        Step {
            axis: c as usize / 2 + 1,
            up: c % 2 == 0,
        }
    }

    fn apply(self, x: &LatticePoint) -> LatticePoint {
        x.step(self.axis, if self.up { 1 } else { -1 })
    }
}

fn up(axis: usize) -> Step {
    Step { axis, up: true }
}

fn down(axis: usize) -> Step {
    Step { axis, up: false }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    /// The Cubist algebra `U_X` (arrows `a`, `b`).
    UOfX,
    /// Its quadratic dual `V_X` (arrows `α`, `β`).
    VOfX,
    /// `V_r` on all of `Z^r`.
    VFull,
}

/// Scalings of the `U` relations that must not change any dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Signs {
    Standard,
    /// Every arrow rescaled by the sign automorphism τ.
    Tau,
    /// The primed relations used for rhombal algebras.
    Peach,
}

#[derive(Debug, Clone)]
pub struct QuiverPresentation {
    kind: Kind,
    rank: usize,
    set: Option<CubistSet>,
    signs: Signs,
}

/// A quadratic relation at a vertex: a combination of two-step paths with a
/// common endpoint.
type Relation = Vec<([Step; 2], i64)>;

impl QuiverPresentation {
    pub fn u_of_x(set: &CubistSet) -> Self {
        QuiverPresentation {
            kind: Kind::UOfX,
            rank: set.rank(),
            set: Some(set.clone()),
            signs: Signs::Standard,
        }
    }

    pub fn v_of_x(set: &CubistSet) -> Self {
        QuiverPresentation {
            kind: Kind::VOfX,
            rank: set.rank(),
            set: Some(set.clone()),
            signs: Signs::Standard,
        }
    }

    pub fn v_full(rank: usize) -> Self {
        assert!(rank >= 1);
        QuiverPresentation {
            kind: Kind::VFull,
            rank,
            set: None,
            signs: Signs::Standard,
        }
    }

    /// Only meaningful for `U`; other kinds ignore it.
    pub fn with_signs(mut self, signs: Signs) -> Self {
        self.signs = signs;
        self
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_vertex(&self, x: &LatticePoint) -> bool {
        match &self.set {
            Some(s) => s.has(x),
            None => true,
        }
    }

    fn term_exists(&self, x: &LatticePoint, s: [Step; 2]) -> bool {
        let mid = s[0].apply(x);
        self.is_vertex(&mid) && self.is_vertex(&s[1].apply(&mid))
    }

    /// Relations starting at the vertex `x`.
    fn relations_at(&self, x: &LatticePoint) -> Vec<Relation> {
        match self.kind {
            Kind::UOfX => self.u_relations(x),
            Kind::VOfX | Kind::VFull => self.v_relations(x),
        }
    }

    fn u_relations(&self, x: &LatticePoint) -> Vec<Relation> {
        let r = self.rank;
        let mut rels: Vec<Relation> = Vec::new();
        // a "primed" relation subtracts where the standard one adds
        let pm = if self.signs == Signs::Peach { -1 } else { 1 };
        for i in 1..=r {
            rels.push(vec![([up(i), up(i)], 1)]);
            rels.push(vec![([down(i), down(i)], 1)]);
        }
        for i in 1..=r {
            for j in 1..=r {
                if i == j {
                    continue;
                }
                if i < j {
                    rels.push(vec![([up(i), up(j)], 1), ([up(j), up(i)], pm)]);
                    rels.push(vec![([down(i), down(j)], 1), ([down(j), down(i)], pm)]);
                }
                rels.push(vec![([up(i), down(j)], 1), ([down(j), up(i)], pm)]);
            }
        }
        for i in 1..r {
            let rel = if self.signs == Signs::Peach {
                let si = if x[i - 1].rem_euclid(2) == 0 { 1 } else { -1 };
                let sj = if x[i].rem_euclid(2) == 0 { 1 } else { -1 };
                vec![
                    ([down(i), up(i)], si),
                    ([up(i), down(i)], -si),
                    ([down(i + 1), up(i + 1)], -sj),
                    ([up(i + 1), down(i + 1)], sj),
                ]
            } else {
                vec![
                    ([down(i), up(i)], 1),
                    ([up(i), down(i)], 1),
                    ([down(i + 1), up(i + 1)], -1),
                    ([up(i + 1), down(i + 1)], -1),
                ]
            };
            rels.push(rel);
        }
        rels.into_iter()
            .map(|rel| {
                rel.into_iter()
                    .filter(|(s, _)| self.term_exists(x, *s))
                    .map(|(s, c)| (s, c * self.tau(x, s)))
                    .collect::<Relation>()
            })
            .filter(|rel| !rel.is_empty())
            .collect()
    }

    /// Product of the τ scalars of the two arrows of a term.
    fn tau(&self, x: &LatticePoint, s: [Step; 2]) -> i64 {
        if self.signs != Signs::Tau {
            return 1;
        }
        let arrow = |y: &LatticePoint, st: Step| {
            let upto = if st.up { st.axis } else { st.axis - 1 };
            let sum: i64 = y.coords()[..upto].iter().sum();
            if sum.rem_euclid(2) == 0 {
                1
            } else {
                -1
            }
        };
        arrow(x, s[0]) * arrow(&s[0].apply(x), s[1])
    }

    fn v_relations(&self, x: &LatticePoint) -> Vec<Relation> {
        let r = self.rank;
        let mut rels: Vec<Relation> = Vec::new();
        // commutations, kept only when both sides exist
        let mut comm = |a: [Step; 2], b: [Step; 2]| {
            if self.term_exists(x, a) && self.term_exists(x, b) {
                rels.push(vec![(a, 1), (b, -1)]);
            }
        };
        for i in 1..=r {
            for j in 1..=r {
                if i < j {
                    comm([up(i), up(j)], [up(j), up(i)]);
                    comm([down(i), down(j)], [down(j), down(i)]);
                }
                comm([up(i), down(j)], [down(j), up(i)]);
            }
        }
        let milnor = match &self.set {
            None => Some((1..=r).map(|i| ([down(i), up(i)], 1)).collect::<Relation>()),
            Some(set) => {
                let crooked = (1..=r).all(|i| set.has(&x.step(i, 1)) || set.has(&x.step(i, -1)));
                crooked.then(|| {
                    (1..=r)
                        .map(|i| {
                            if set.has(&x.step(i, -1)) {
                                ([down(i), up(i)], 1)
                            } else {
                                ([up(i), down(i)], 1)
                            }
                        })
                        .collect()
                })
            }
        };
        rels.extend(milnor);
        rels
    }

    /// All paths of length `n` from `x`, as step codes, in lexicographic order.
    fn paths(&self, x: &LatticePoint, n: usize) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(n);
        self.extend_paths(x, n, &mut cur, &mut out);
        out
    }

    fn extend_paths(&self, x: &LatticePoint, left: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for code in 0..(2 * self.rank) as u8 {
            let y = Step::from_code(code).apply(x);
            if self.is_vertex(&y) {
                cur.push(code);
                self.extend_paths(&y, left - 1, cur, out);
                cur.pop();
            }
        }
    }
}

fn endpoint(x: &LatticePoint, path: &[u8]) -> LatticePoint {
    let mut y = x.clone();
    for &c in path {
        let s = Step::from_code(c);
        y[s.axis - 1] += if s.up { 1 } else { -1 };
    }
    y
}

/// `dim e_y A_n e_x` for every endpoint `y` of a length-`n` path from `x`.
/// Endpoints with dimension 0 are omitted.
pub fn graded_dims_from(pres: &QuiverPresentation, x: &LatticePoint, n: usize) -> BTreeMap<LatticePoint, usize> {
    assert_eq!(x.rank(), pres.rank, "rank");
    if !pres.is_vertex(x) {
        return BTreeMap::new();
    }
    let paths = pres.paths(x, n);
    let index: HashMap<&[u8], usize> = paths.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    let ends: Vec<LatticePoint> = paths.iter().map(|p| endpoint(x, p)).collect();
    let mut echelon = Echelon::new();
    if n >= 2 {
        let mut suffixes: HashMap<(LatticePoint, usize), Vec<Vec<u8>>> = HashMap::new();
        for k in 0..=n - 2 {
            for prefix in pres.paths(x, k) {
                let v = endpoint(x, &prefix);
                for rel in pres.relations_at(&v) {
                    let w = endpoint(&v, &[rel[0].0[0].code(), rel[0].0[1].code()]);
                    let tails = suffixes
                        .entry((w.clone(), n - k - 2))
                        .or_insert_with(|| pres.paths(&w, n - k - 2));
                    for tail in tails.iter() {
                        let vec = rel
                            .iter()
                            .map(|(s, c)| {
                                let mut full = prefix.clone();
                                full.push(s[0].code());
                                full.push(s[1].code());
                                full.extend_from_slice(tail);
                                (index[full.as_slice()], BigInt::from(*c))
                            })
                            .collect();
                        echelon.insert(vec);
                    }
                }
            }
        }
    }
    let mut dims: BTreeMap<LatticePoint, usize> = BTreeMap::new();
    for y in &ends {
        *dims.entry(y.clone()).or_default() += 1;
    }
    for col in echelon.pivot_columns() {
        *dims.get_mut(&ends[col]).unwrap() -= 1;
    }
    dims.retain(|_, d| *d > 0);
    dims
}

/// `dim e_y A_n e_x`.
pub fn graded_dim(pres: &QuiverPresentation, x: &LatticePoint, y: &LatticePoint, n: usize) -> usize {
    graded_dims_from(pres, x, n).get(y).copied().unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub x: LatticePoint,
    pub y: LatticePoint,
    pub degree: usize,
    pub expected: String,
    pub actual: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub kind: Kind,
    pub rank: usize,
    pub max_degree: usize,
    pub points: usize,
    /// Number of (x, y, n) triples compared.
    pub compared: usize,
    pub mismatches: Vec<Mismatch>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares the oracle with the closed forms for all pairs in `window` and
/// all degrees up to `max_degree`: `C_U` for `U_X`, and
/// `(1-q^2)^{1-r} q^{d(x,y)}` for `V_X` and `V_r`.
pub fn oracle_check(pres: &QuiverPresentation, window: &Window, max_degree: usize) -> Result<OracleReport, QMatrixError> {
    let pts = match &pres.set {
        Some(s) => s.points_in_window(window),
        None => window.points().collect(),
    };
    let cu = match (pres.kind, &pres.set) {
        (Kind::UOfX, Some(s)) => Some(c_u_brauer(s, window)?),
        _ => None,
    };
    let g = geometric_power(pres.rank, max_degree as i64);
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for x in &pts {
        for n in 0..=max_degree {
            let dims = graded_dims_from(pres, x, n);
            for y in &pts {
                let expected: BigInt = match &cu {
                    Some(m) => m.value(x, y).coeff(n as i64),
                    None => {
                        let d = x.distance(y);
                        if d > n as i64 {
                            BigInt::from(0)
                        } else {
                            g.coeff(n as i64 - d)
                        }
                    }
                };
                let actual = dims.get(y).copied().unwrap_or(0);
                compared += 1;
                if expected != BigInt::from(actual) {
                    mismatches.push(Mismatch {
                        x: x.clone(),
                        y: y.clone(),
                        degree: n,
                        expected: expected.to_string(),
                        actual,
                    });
                }
            }
        }
    }
    Ok(OracleReport {
        kind: pres.kind,
        rank: pres.rank,
        max_degree,
        points: pts.len(),
        compared,
        mismatches,
    })
}
