//! Flips `X → X'` replacing a maximal vertex `z` by `z[-1]`, and the Cartan
//! matrix the flipped set is predicted to have.

use serde::Serialize;
use thiserror::Error;

use crate::cubist::{CubistError, CubistSet, LatticePoint, Window};
use crate::laurent::{quantum_integer, LaurentPoly};
use crate::qmatrix::{c_u_brauer_points, Check, CheckResult, PolyMatrix, QMatrix, QMatrixError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlipError {
    #[error(transparent)]
    Cubist(#[from] CubistError),
    #[error(transparent)]
    Matrix(#[from] QMatrixError),
    #[error("{0} is not flippable")]
    NotFlippable(LatticePoint),
    #[error("{0} is not the last removal, so the flip cannot be undone")]
    NotUndoable(LatticePoint),
}

/// The equivalent flippability conditions, evaluated independently.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlipConditions {
    /// No `z + ε_i` lies in the ideal, i.e. `z` is maximal.
    pub maximal: bool,
    /// Every `x` with `z[-1] < x <= z` lies in `X`.
    pub box_condition: bool,
    /// Exactly `r` facets of `X` contain `z`, all inside the cube
    /// `[z[-1], z]`. Without the cube test a minimal vertex (whose `r` facets
    /// open upwards) would pass, and in rank 2 every vertex would.
    pub simplex: bool,
    pub facet_count: usize,
}

impl FlipConditions {
    /// The box condition decides; the others must agree with it.
    pub fn flippable(&self) -> bool {
        self.box_condition
    }

    pub fn consistent(&self) -> bool {
        self.maximal == self.box_condition && self.simplex == self.box_condition
    }
}

pub fn flip_conditions(set: &CubistSet, z: &LatticePoint) -> Result<FlipConditions, FlipError> {
    if !set.contains(z)? {
        return Err(CubistError::NotInSet(z.clone()).into());
    }
    let r = set.rank();
    let maximal = (1..=r).all(|i| !set.in_ideal(&z.step(i, 1)));
    let box_condition = Window::new(z.shift(-1), z.clone())
        .points()
        .filter(|x| *x != z.shift(-1))
        .all(|x| set.has(&x));
    let facets = set.facets_containing_unchecked(z);
    let below = facets.iter().all(|f| f.points().iter().all(|x| x.le(z)));
    let facet_count = facets.len();
    Ok(FlipConditions {
        maximal,
        box_condition,
        simplex: facet_count == r && below,
        facet_count,
    })
}

/// Whether `z` can be flipped.
///
/// # Panics
/// If the three characterisations of flippability disagree.
pub fn is_flippable(set: &CubistSet, z: &LatticePoint) -> Result<bool, FlipError> {
    let c = flip_conditions(set, z)?;
    assert!(c.consistent(), "flip conditions disagree at {z}: {c:?}");
    Ok(c.flippable())
}

/// All flippable vertices of `X` in a window, in lexicographic order.
pub fn flippable_in_window(set: &CubistSet, window: &Window) -> Vec<LatticePoint> {
    set.points_in_window(window)
        .into_iter()
        .filter(|z| flip_conditions(set, z).map(|c| c.flippable()).unwrap_or(false))
        .collect()
}

/// `X'`: the set with `z` appended to the removals.
pub fn flip(set: &CubistSet, z: &LatticePoint) -> Result<CubistSet, FlipError> {
    if !is_flippable(set, z)? {
        return Err(FlipError::NotFlippable(z.clone()));
    }
    let mut removals = set.removals().to_vec();
    removals.push(z.clone());
    Ok(CubistSet::new(set.rank(), set.base().clone(), removals)?)
}

/// Reverses [`flip`]: drops the last removal, which must be `z`.
pub fn unflip(set: &CubistSet, z: &LatticePoint) -> Result<CubistSet, FlipError> {
    let removals = set.removals();
    if removals.last() != Some(z) {
        return Err(FlipError::NotUndoable(z.clone()));
    }
    Ok(CubistSet::new(set.rank(), set.base().clone(), removals[..removals.len() - 1].to_vec())?)
}

fn in_cube(z: &LatticePoint, x: &LatticePoint) -> bool {
    z.shift(-1).le(x) && x.le(z)
}

/// `q^{r-1}[n]_q`.
fn bracket(r: usize, n: i64) -> LaurentPoly {
    quantum_integer(n).shift(r as i64 - 1)
}

/// Index set of the predicted matrix: `X ∩ window`, plus `z[-1]`.
fn predicted_index(set: &CubistSet, z: &LatticePoint, window: &Window) -> Vec<LatticePoint> {
    let mut pts = set.points_in_window(window);
    pts.push(z.shift(-1));
    pts.sort();
    pts.dedup();
    pts
}

/// Cartan matrix predicted for the flipped set:
/// `C_U[x,y] - q^{r-1}[r - d(z,x) - d(z,y)]` when both `x` and `y` lie in the
/// cube `[z[-1], z]`, and `C_U[x,y]` otherwise. The row and column of `z`
/// (which should vanish) and of `z[-1]` are included.
pub fn predicted_flip_cartan(set: &CubistSet, z: &LatticePoint, window: &Window) -> Result<PolyMatrix, FlipError> {
    if !is_flippable(set, z)? {
        return Err(FlipError::NotFlippable(z.clone()));
    }
    let r = set.rank();
    let pts = predicted_index(set, z, window);
    let cu = c_u_brauer_points(set, &pts)?;
    let mut out = QMatrix::new(pts.clone(), pts.clone());
    for (i, x) in pts.iter().enumerate() {
        for (j, y) in pts.iter().enumerate() {
            let mut v = cu.value(x, y);
            if in_cube(z, x) && in_cube(z, y) {
                v -= &bracket(r, r as i64 - z.distance(x) - z.distance(y));
            }
            out.set(i, j, v);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct FlipReport {
    pub z: LatticePoint,
    /// The vertex `z[-1]` that replaces `z`; the predicted matrix is indexed by
    /// the old set, so its row `z` has no counterpart and its row `z[-1]`
    /// is compared with the flipped set's row `z[-1]`.
    pub replaced_by: LatticePoint,
    pub conditions: FlipConditions,
    pub checks: Vec<CheckResult>,
}

impl FlipReport {
    pub fn all_passed(&self) -> bool {
        self.conditions.consistent() && self.checks.iter().all(|c| c.passed)
    }
}

/// Compares `C_U` of the flipped set with [`predicted_flip_cartan`] on the
/// window, and checks the pre-flip row of `z` against `q^{r-1}[r - d(z,x)]`.
pub fn check_flip_cartan(set: &CubistSet, z: &LatticePoint, window: &Window) -> Result<FlipReport, FlipError> {
    let conditions = flip_conditions(set, z)?;
    if !conditions.flippable() {
        return Err(FlipError::NotFlippable(z.clone()));
    }
    let r = set.rank();
    let zm = z.shift(-1);
    let predicted = predicted_flip_cartan(set, z, window)?;
    let flipped = flip(set, z)?;
    let shared: Vec<LatticePoint> = predicted.rows().iter().filter(|x| *x != z).cloned().collect();
    let actual = c_u_brauer_points(&flipped, &shared)?;

    let mut agree = Check::new("flipped_cartan");
    for x in &shared {
        for y in &shared {
            agree.compare(x, y, None, &actual.value(x, y), &predicted.value(x, y));
        }
    }
    let mut vanish = Check::new("removed_row_vanishes");
    for x in predicted.rows() {
        let zero = LaurentPoly::zero();
        vanish.compare(z, x, Some("row"), &predicted.value(z, x), &zero);
        vanish.compare(x, z, Some("column"), &predicted.value(x, z), &zero);
    }
    let mut basic = Check::new("pre_flip_row");
    let before = c_u_brauer_points(set, predicted.rows())?;
    for x in predicted.rows().iter().filter(|x| set.has(x)) {
        let want = if in_cube(z, x) { bracket(r, r as i64 - z.distance(x)) } else { LaurentPoly::zero() };
        basic.compare(z, x, None, &before.value(z, x), &want);
    }
    debug_assert!(flipped.contains(&zm).unwrap_or(false));
    Ok(FlipReport {
        z: z.clone(),
        replaced_by: zm,
        conditions,
        checks: vec![agree.finish(), vanish.finish(), basic.finish()],
    })
}
