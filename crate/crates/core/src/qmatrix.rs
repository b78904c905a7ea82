//! Windowed graded decomposition and Cartan matrices (`D_U`, `D_V`, `C_U`,
//! `C_V`) and the checker for the matrix identities relating them.
//!
//! Every matrix is indexed by the points of `X` inside a caller's window. Sums
//! that reach outside the window enumerate `X` on an internally inflated box,
//! which is exact because membership is known everywhere.

use std::collections::{BTreeMap, HashMap};

use serde::ser::{SerializeMap, SerializeStruct, Serializer};
use serde::Serialize;
use thiserror::Error;

use crate::cubist::{CubistError, CubistSet, Facet, LatticePoint, Window};
use crate::laurent::{geometric_power, quantum_integer, LaurentPoly, TruncSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QMatrixError {
    #[error(transparent)]
    Cubist(#[from] CubistError),
    #[error("cutoff {cutoff} is below 2r = {min}")]
    CutoffTooSmall { cutoff: i64, min: i64 },
    #[error("window has rank {got}, set has rank {expected}")]
    WindowRank { expected: usize, got: usize },
}

/// A finite matrix indexed by lists of lattice points; missing entries are 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix<T> {
    rows: Vec<LatticePoint>,
    cols: Vec<LatticePoint>,
    row_index: HashMap<LatticePoint, usize>,
    col_index: HashMap<LatticePoint, usize>,
    entries: BTreeMap<(usize, usize), T>,
}

pub type PolyMatrix = QMatrix<LaurentPoly>;
pub type SeriesMatrix = QMatrix<TruncSeries>;

fn index_of(points: &[LatticePoint]) -> HashMap<LatticePoint, usize> {
    points.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect()
}

impl<T> QMatrix<T> {
    pub fn new(rows: Vec<LatticePoint>, cols: Vec<LatticePoint>) -> Self {
        QMatrix {
            row_index: index_of(&rows),
            col_index: index_of(&cols),
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn rows(&self) -> &[LatticePoint] {
        &self.rows
    }

    pub fn cols(&self) -> &[LatticePoint] {
        &self.cols
    }

    pub fn row_of(&self, x: &LatticePoint) -> Option<usize> {
        self.row_index.get(x).copied()
    }

    pub fn col_of(&self, y: &LatticePoint) -> Option<usize> {
        self.col_index.get(y).copied()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&T> {
        self.entries.get(&(i, j))
    }

    /// Entry at row point `x`, column point `y`; `None` for zero entries and
    /// for points outside the index lists.
    pub fn at(&self, x: &LatticePoint, y: &LatticePoint) -> Option<&T> {
        self.get(self.row_of(x)?, self.col_of(y)?)
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.entries.iter().map(|(&(i, j), v)| (i, j, v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> QMatrix<U> {
        QMatrix {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            row_index: self.row_index.clone(),
            col_index: self.col_index.clone(),
            entries: self.entries.iter().map(|(k, v)| (*k, f(v))).collect(),
        }
    }
}

/// Entry types of a [`QMatrix`].
pub trait Scalar {
    fn is_zero(&self) -> bool;
}

impl Scalar for LaurentPoly {
    fn is_zero(&self) -> bool {
        LaurentPoly::is_zero(self)
    }
}

impl Scalar for TruncSeries {
    fn is_zero(&self) -> bool {
        TruncSeries::is_zero(self)
    }
}

impl<T: Scalar> QMatrix<T> {
    /// Stores `v` at `(i, j)`; zero values are not stored.
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        if v.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), v);
        }
    }
}

impl QMatrix<LaurentPoly> {
    /// The entry at `(x, y)`, zero when absent.
    pub fn value(&self, x: &LatticePoint, y: &LatticePoint) -> LaurentPoly {
        self.at(x, y).cloned().unwrap_or_default()
    }
}

struct EntryRef<'a, T>(usize, usize, &'a T);

impl<T: Serialize> Serialize for EntryRef<'_, T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("r", &self.0)?;
        m.serialize_entry("c", &self.1)?;
        m.serialize_entry("poly", self.2)?;
        m.end()
    }
}

impl<T: Serialize> Serialize for QMatrix<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<EntryRef<'_, T>> = self.entries().map(|(i, j, v)| EntryRef(i, j, v)).collect();
        let mut st = s.serialize_struct("QMatrix", 3)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

fn check_window(set: &CubistSet, window: &Window) -> Result<(), QMatrixError> {
    if window.rank() != set.rank() {
        return Err(QMatrixError::WindowRank {
            expected: set.rank(),
            got: window.rank(),
        });
    }
    Ok(())
}

/// Coefficients of a polynomial with exponents in `0..len`.
type Dense = Vec<i64>;

fn dense_to_poly(c: &[i64]) -> LaurentPoly {
    LaurentPoly::from_terms(c.iter().enumerate().map(|(e, &v)| (e as i64, v)))
}

fn dense_is_zero(c: &[i64]) -> bool {
    c.iter().all(|&v| v == 0)
}

/// Sparse rows of `C_U` for a list of row points, columns keyed by point.
struct CuRows {
    points: Vec<LatticePoint>,
    index: HashMap<LatticePoint, usize>,
    rows: Vec<BTreeMap<LatticePoint, Dense>>,
}

impl CuRows {
    fn empty(points: Vec<LatticePoint>) -> Self {
        let rows = vec![BTreeMap::new(); points.len()];
        CuRows {
            index: index_of(&points),
            points,
            rows,
        }
    }

    fn get(&self, x: &LatticePoint, y: &LatticePoint) -> Option<&Dense> {
        self.rows[*self.index.get(x)?].get(y)
    }

    fn into_matrix(self, cols: &[LatticePoint]) -> PolyMatrix {
        let col_ix = index_of(cols);
        let mut m = QMatrix::new(self.points, cols.to_vec());
        for (i, row) in self.rows.iter().enumerate() {
            for (y, c) in row {
                if let Some(&j) = col_ix.get(y) {
                    m.set(i, j, dense_to_poly(c));
                }
            }
        }
        m
    }
}

fn cu_len(r: usize) -> usize {
    2 * r - 1
}

/// Brauer formula: `C_U[x,y] = Σ_{w : x,y ∈ λw} q^{d(w,x)+d(w,y)}`.
/// Facet points lie within one step of the anchor in every coordinate, so
/// the anchors needed for rows in `rows` sit in the box inflated by 1.
fn brauer_rows(set: &CubistSet, rows: Vec<LatticePoint>, rows_box: &Window) -> CuRows {
    let len = cu_len(set.rank());
    let mut out = CuRows::empty(rows);
    for w in set.points_in_window(&rows_box.inflate(1)) {
        let facet = Facet {
            axis: set.lambda_axis(&w),
            anchor: w.clone(),
        };
        let pts = facet.points();
        let dists: Vec<usize> = pts.iter().map(|p| w.distance(p) as usize).collect();
        for (a, da) in pts.iter().zip(&dists) {
            let Some(&ia) = out.index.get(a) else { continue };
            for (b, db) in pts.iter().zip(&dists) {
                let e = out.rows[ia].entry(b.clone()).or_insert_with(|| vec![0; len]);
                e[da + db] += 1;
            }
        }
    }
    for row in &mut out.rows {
        row.retain(|_, c| !dense_is_zero(c));
    }
    out
}

/// Local formula: `C_U[x,y] = Σ_{z ∈ I(x) ∩ I(y)} q^{r-1}[r - d(z,x) - d(z,y)]`.
fn local_rows(set: &CubistSet, rows: Vec<LatticePoint>, rows_box: &Window) -> CuRows {
    let r = set.rank() as i64;
    let len = cu_len(set.rank());
    // q^{r-1}[n] as dense coefficients, for n in -r..=r
    let bracket: HashMap<i64, Dense> = (-r..=r)
        .map(|n| {
            let mut c = vec![0; len];
            for (e, v) in quantum_integer(n).shift(r - 1).terms() {
                c[e as usize] += i64::try_from(v).expect("small coefficient");
            }
            (n, c)
        })
        .collect();
    let mut out = CuRows::empty(rows);
    for z in set.points_in_window(&rows_box.inflate(1)) {
        let below: Vec<LatticePoint> = Window::new(z.shift(-1), z.clone())
            .points()
            .filter(|x| set.has(x))
            .collect();
        let dists: Vec<i64> = below.iter().map(|x| z.distance(x)).collect();
        for (a, da) in below.iter().zip(&dists) {
            let Some(&ia) = out.index.get(a) else { continue };
            for (b, db) in below.iter().zip(&dists) {
                let add = &bracket[&(r - da - db)];
                let e = out.rows[ia].entry(b.clone()).or_insert_with(|| vec![0; len]);
                for (k, v) in add.iter().enumerate() {
                    e[k] += v;
                }
            }
        }
    }
    for row in &mut out.rows {
        row.retain(|_, c| !dense_is_zero(c));
    }
    out
}

/// `D_U[x,y] = q^{d(x,y)}` when `y ∈ λx`.
pub fn d_u(set: &CubistSet, window: &Window) -> Result<PolyMatrix, QMatrixError> {
    check_window(set, window)?;
    let pts = set.points_in_window(window);
    let mut m = QMatrix::new(pts.clone(), pts.clone());
    for (i, x) in pts.iter().enumerate() {
        let facet = set.lambda(x)?;
        for y in facet.points() {
            if let Some(j) = m.col_of(&y) {
                m.set(i, j, LaurentPoly::q_pow(x.distance(&y)));
            }
        }
    }
    Ok(m)
}

/// `D_V[x,y] = q^{d(x,y)}` when `y ∈ μx`.
pub fn d_v(set: &CubistSet, window: &Window) -> Result<PolyMatrix, QMatrixError> {
    check_window(set, window)?;
    let pts = set.points_in_window(window);
    let mut m = QMatrix::new(pts.clone(), pts.clone());
    for (i, x) in pts.iter().enumerate() {
        let axis = set.lambda_axis(x);
        for (j, y) in pts.iter().enumerate() {
            if set.in_mu_unchecked(x, axis, y) {
                m.set(i, j, LaurentPoly::q_pow(x.distance(y)));
            }
        }
    }
    Ok(m)
}

/// `C_U` by the Brauer formula `D_U^T D_U`.
pub fn c_u_brauer(set: &CubistSet, window: &Window) -> Result<PolyMatrix, QMatrixError> {
    check_window(set, window)?;
    let pts = set.points_in_window(window);
    Ok(brauer_rows(set, pts.clone(), window).into_matrix(&pts))
}

/// `C_U` by the Brauer formula on an arbitrary list of points (rows and
/// columns); points outside `X` get zero rows and columns.
pub fn c_u_brauer_points(set: &CubistSet, points: &[LatticePoint]) -> Result<PolyMatrix, QMatrixError> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    let Some(bbox) = Window::bounding(&pts) else {
        return Ok(QMatrix::new(vec![], vec![]));
    };
    check_window(set, &bbox)?;
    Ok(brauer_rows(set, pts.clone(), &bbox).into_matrix(&pts))
}

/// `C_U` by the local formula over `I_X` sets.
pub fn c_u_local(set: &CubistSet, window: &Window) -> Result<PolyMatrix, QMatrixError> {
    check_window(set, window)?;
    let pts = set.points_in_window(window);
    Ok(local_rows(set, pts.clone(), window).into_matrix(&pts))
}

/// `C_V[x,y] = (1-q^2)^{1-r} q^{d(x,y)}` modulo `q^{N+1}`.
pub fn c_v(set: &CubistSet, window: &Window, cutoff: i64) -> Result<SeriesMatrix, QMatrixError> {
    check_window(set, window)?;
    let pts = set.points_in_window(window);
    let g = geometric_power(set.rank(), cutoff).to_poly();
    let mut m = QMatrix::new(pts.clone(), pts.clone());
    for (i, x) in pts.iter().enumerate() {
        for (j, y) in pts.iter().enumerate() {
            let d = x.distance(y);
            if d <= cutoff {
                m.set(i, j, g.shift(d).truncate(cutoff));
            }
        }
    }
    Ok(m)
}

/// One mismatching entry of a check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub x: LatticePoint,
    pub y: LatticePoint,
    /// Which form of the identity failed, for checks tested in several forms.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<&'static str>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Number of (x, y) entries compared.
    pub evaluated: usize,
    pub failure_count: usize,
    /// The first few failures, in lexicographic order.
    pub failures: Vec<Failure>,
}

const MAX_LISTED_FAILURES: usize = 50;

pub(crate) struct Check {
    name: &'static str,
    evaluated: usize,
    failures: Vec<Failure>,
}

impl Check {
    pub(crate) fn new(name: &'static str) -> Self {
        Check {
            name,
            evaluated: 0,
            failures: vec![],
        }
    }

    pub(crate) fn compare<T: PartialEq + std::fmt::Display>(
        &mut self,
        x: &LatticePoint,
        y: &LatticePoint,
        variant: Option<&'static str>,
        lhs: &T,
        rhs: &T,
    ) {
        self.evaluated += 1;
        if lhs != rhs {
            self.failures.push(Failure {
                x: x.clone(),
                y: y.clone(),
                variant,
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            });
        }
    }

    pub(crate) fn finish(mut self) -> CheckResult {
        self.failures.sort_by(|a, b| (&a.x, &a.y, a.variant).cmp(&(&b.x, &b.y, b.variant)));
        let failure_count = self.failures.len();
        self.failures.truncate(MAX_LISTED_FAILURES);
        CheckResult {
            name: self.name,
            passed: failure_count == 0,
            evaluated: self.evaluated,
            failure_count,
            failures: self.failures,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub rank: usize,
    pub window: Window,
    pub cutoff: i64,
    pub points: usize,
    pub checks: Vec<CheckResult>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Check names, in report order. The last one is only run in rank 3.
pub const CHECK_NAMES: [&str; 10] = [
    "du_combinatorial",
    "dv_combinatorial",
    "cu_local_equals_brauer",
    "cv_brauer",
    "cu_symmetric",
    "cv_symmetric",
    "inverse",
    "cartan_inverse",
    "cu_bar_symmetry",
    "hexagon",
];

fn series_from_dense(c: &[i64], cutoff: i64) -> TruncSeries {
    dense_to_poly(c).truncate(cutoff)
}

/// Coefficients of `(1-q^2)^{1-r} q^d` in degrees `0..=cutoff`.
fn cv_dense(g: &[i64], d: usize, cutoff: usize) -> Dense {
    let mut out = vec![0; cutoff + 1];
    for e in d..=cutoff {
        out[e] = g[e - d];
    }
    out
}

/// Evaluates the identities on every pair of points of `X` in `window`.
pub fn verify_identities(set: &CubistSet, window: &Window, cutoff: i64) -> Result<IdentityReport, QMatrixError> {
    check_window(set, window)?;
    let r = set.rank();
    if cutoff < 2 * r as i64 {
        return Err(QMatrixError::CutoffTooSmall {
            cutoff,
            min: 2 * r as i64,
        });
    }
    let n = cutoff as usize;
    let pts = set.points_in_window(window);
    let g_poly = geometric_power(r, cutoff);
    let g: Dense = (0..=cutoff)
        .map(|e| i64::try_from(&g_poly.coeff(e)).expect("binomial fits in i64"))
        .collect();

    let du = d_u(set, window)?;
    let dv = d_v(set, window)?;
    let cub = brauer_rows(set, pts.clone(), window);
    let cul = local_rows(set, pts.clone(), window);
    let cv = c_v(set, window, cutoff)?;
    let mut checks = Vec::new();

    // 1. D_U against a brute search for the facets x + F_i inside X.
    let mut c1 = Check::new(CHECK_NAMES[0]);
    for x in &pts {
        let axes: Vec<usize> = (1..=r)
            .filter(|&i| {
                Facet { anchor: x.clone(), axis: i }
                    .points()
                    .iter()
                    .all(|p| set.has(p))
            })
            .collect();
        if axes.len() != 1 {
            c1.failures.push(Failure {
                x: x.clone(),
                y: x.clone(),
                variant: Some("unique facet"),
                lhs: format!("{axes:?}"),
                rhs: format!("[{}]", set.lambda_axis(x)),
            });
            continue;
        }
        let facet = Facet { anchor: x.clone(), axis: axes[0] };
        for y in &pts {
            let brute = if facet.contains(y) { LaurentPoly::q_pow(x.distance(y)) } else { LaurentPoly::zero() };
            c1.compare(x, y, None, &du.value(x, y), &brute);
        }
    }
    checks.push(c1.finish());

    // 2. D_V against the cone C_i written out coordinatewise.
    let mut c2 = Check::new(CHECK_NAMES[1]);
    for x in &pts {
        let i = set.lambda_axis(x);
        for y in &pts {
            let inside = (0..r).all(|k| {
                let d = y[k] - x[k];
                (k + 1 >= i || d <= 0) && (k + 1 <= i || d >= 0)
            });
            let brute = if inside { LaurentPoly::q_pow(x.distance(y)) } else { LaurentPoly::zero() };
            c2.compare(x, y, None, &dv.value(x, y), &brute);
        }
    }
    checks.push(c2.finish());

    // 3. local = Brauer.
    let mut c3 = Check::new(CHECK_NAMES[2]);
    for x in &pts {
        for y in &pts {
            let a = cul.get(x, y).map(|c| dense_to_poly(c)).unwrap_or_default();
            let b = cub.get(x, y).map(|c| dense_to_poly(c)).unwrap_or_default();
            c3.compare(x, y, None, &a, &b);
        }
    }
    checks.push(c3.finish());

    // 4. C_V = D_V^T D_V, summing over z ∈ X with x, y ∈ μz and d(z,x), d(z,y) <= N.
    let mut c4 = Check::new(CHECK_NAMES[3]);
    {
        let index = index_of(&pts);
        // for each x in the window, the (z, d(z,x)) with x ∈ μz, and for each z the (y, d)
        let mut tops: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut by_x: Vec<Vec<(usize, usize)>> = vec![Vec::new(); pts.len()];
        for z in set.points_in_window(&window.inflate(cutoff)) {
            let axis = set.lambda_axis(&z);
            let cone: Vec<(usize, usize)> = pts
                .iter()
                .filter_map(|x| {
                    let d = z.distance(x) as usize;
                    (d <= n && set.in_mu_unchecked(&z, axis, x)).then(|| (index[x], d))
                })
                .collect();
            if cone.is_empty() {
                continue;
            }
            for &(ix, d) in &cone {
                by_x[ix].push((tops.len(), d));
            }
            tops.push(cone);
        }
        let mut acc = vec![0i64; pts.len() * (n + 1)];
        for (ix, x) in pts.iter().enumerate() {
            acc.iter_mut().for_each(|v| *v = 0);
            for &(zi, dx) in &by_x[ix] {
                for &(iy, dy) in &tops[zi] {
                    if dx + dy <= n {
                        acc[iy * (n + 1) + dx + dy] += 1;
                    }
                }
            }
            for (iy, y) in pts.iter().enumerate() {
                let got = &acc[iy * (n + 1)..(iy + 1) * (n + 1)];
                let d = x.distance(y) as usize;
                let want = if d <= n { cv_dense(&g, d, n) } else { vec![0; n + 1] };
                c4.compare(x, y, None, &series_from_dense(got, cutoff), &series_from_dense(&want, cutoff));
            }
        }
    }
    checks.push(c4.finish());

    // 5, 6. symmetry.
    let mut c5 = Check::new(CHECK_NAMES[4]);
    let mut c6 = Check::new(CHECK_NAMES[5]);
    let cu = cub.into_matrix(&pts);
    let zero_series = TruncSeries::zero(cutoff);
    for x in &pts {
        for y in &pts {
            c5.compare(x, y, None, &cu.value(x, y), &cu.value(y, x));
            let a = cv.at(x, y).unwrap_or(&zero_series);
            let b = cv.at(y, x).unwrap_or(&zero_series);
            c6.compare(x, y, None, a, b);
        }
    }
    checks.push(c5.finish());
    checks.push(c6.finish());

    // 7. D_U(q) D_V(-q)^T = 1 over z ∈ λx, and D_U(q)^T D_V(-q) = 1 over {z : x ∈ λz}.
    let mut c7 = Check::new(CHECK_NAMES[6]);
    {
        let axes: Vec<usize> = pts.iter().map(|y| set.lambda_axis(y)).collect();
        let signed = |dx: i64, dy: i64| LaurentPoly::monomial(if dy % 2 == 0 { 1 } else { -1 }, dx + dy);
        for x in &pts {
            let facet = set.lambda(x)?;
            let fpts = facet.points();
            for (iy, y) in pts.iter().enumerate() {
                let sum: LaurentPoly = fpts
                    .iter()
                    .filter(|z| set.in_mu_unchecked(y, axes[iy], z))
                    .map(|z| signed(x.distance(z), y.distance(z)))
                    .sum();
                let want = if x == y { LaurentPoly::one() } else { LaurentPoly::zero() };
                c7.compare(x, y, Some("D_U(q) D_V(-q)^T"), &sum, &want);
            }
        }
        let index = index_of(&pts);
        let mut sums: HashMap<(usize, usize), LaurentPoly> = HashMap::new();
        for z in set.points_in_window(&window.inflate(1)) {
            let axis = set.lambda_axis(&z);
            let facet = Facet { anchor: z.clone(), axis };
            for x in facet.points() {
                let Some(&ix) = index.get(&x) else { continue };
                for (iy, y) in pts.iter().enumerate() {
                    if set.in_mu_unchecked(&z, axis, y) {
                        *sums.entry((ix, iy)).or_default() += &signed(z.distance(&x), z.distance(y));
                    }
                }
            }
        }
        for (ix, x) in pts.iter().enumerate() {
            for (iy, y) in pts.iter().enumerate() {
                let got = sums.remove(&(ix, iy)).unwrap_or_default();
                let want = if x == y { LaurentPoly::one() } else { LaurentPoly::zero() };
                c7.compare(x, y, Some("D_U(q)^T D_V(-q)"), &got, &want);
            }
        }
    }
    checks.push(c7.finish());

    // C_U rows of every point near the window, for 8 and the hexagon identity.
    let near_box = window.inflate(1);
    let near = set.points_in_window(&near_box);
    let cu_near = brauer_rows(set, near.clone(), &near_box);

    // 8. C_U(q) C_V(-q) = 1 mod q^{N+1}; C_U[x,z] vanishes unless d(x,z) <= 2r-2.
    let mut c8 = Check::new(CHECK_NAMES[7]);
    for x in &pts {
        let row = &cu_near.rows[cu_near.index[x]];
        for y in &pts {
            // Σ_z C_U[x,z](q) (-q)^{d(z,y)}, then times (1-q^2)^{1-r}
            let mut inner = vec![0i64; n + 1];
            for (z, c) in row {
                let d = z.distance(y) as usize;
                let sign = if d % 2 == 0 { 1 } else { -1 };
                for (e, v) in c.iter().enumerate() {
                    if e + d <= n {
                        inner[e + d] += sign * v;
                    }
                }
            }
            let got = mul_trunc(&inner, &g, n);
            let mut want = vec![0i64; n + 1];
            if x == y {
                want[0] = 1;
            }
            c8.compare(x, y, None, &series_from_dense(&got, cutoff), &series_from_dense(&want, cutoff));
        }
    }
    checks.push(c8.finish());

    // 9. C_U(q^{-1}) = q^{2-2r} C_U(q).
    let mut c9 = Check::new(CHECK_NAMES[8]);
    for x in &pts {
        for y in &pts {
            let v = cu.value(x, y);
            c9.compare(x, y, None, &v.substitute_inverse_q(), &v.shift(2 - 2 * r as i64));
        }
    }
    checks.push(c9.finish());

    // Rank 3: Dist(q) Loc(-q) = (1-q^2)^2 mod q^{N+1}, with Loc = C_U.
    if r == 3 {
        let mut ch = Check::new(CHECK_NAMES[9]);
        let mut cols: Vec<Vec<(&LatticePoint, &Dense)>> = vec![Vec::new(); pts.len()];
        let index = index_of(&pts);
        for (iz, z) in near.iter().enumerate() {
            for (y, c) in &cu_near.rows[iz] {
                if let Some(&iy) = index.get(y) {
                    cols[iy].push((z, c));
                }
            }
        }
        for x in &pts {
            for (iy, y) in pts.iter().enumerate() {
                let mut got = vec![0i64; n + 1];
                for &(z, c) in &cols[iy] {
                    let d = x.distance(z) as usize;
                    for (e, v) in c.iter().enumerate() {
                        if d + e <= n {
                            got[d + e] += if e % 2 == 0 { *v } else { -v };
                        }
                    }
                }
                let mut want = vec![0i64; n + 1];
                if x == y {
                    want[0] = 1;
                    want[2] = -2;
                    want[4] = 1;
                }
                ch.compare(x, y, None, &series_from_dense(&got, cutoff), &series_from_dense(&want, cutoff));
            }
        }
        checks.push(ch.finish());
    }

    Ok(IdentityReport {
        rank: r,
        window: window.clone(),
        cutoff,
        points: pts.len(),
        checks,
    })
}

fn mul_trunc(a: &[i64], b: &[i64], n: usize) -> Dense {
    let mut out = vec![0i64; n + 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}
