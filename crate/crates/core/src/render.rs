//! SVG drawings of Cubist subsets projected to the plane `Σ x_i = 0`:
//! rhombus tilings for `r = 3`, line diagrams for `r = 2`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cubist::{CubistSet, LatticePoint, Window};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("cannot draw rank {0}; only ranks 2 and 3 are supported")]
    Rank(usize),
}

/// Pixels per unit edge.
const SCALE: f64 = 40.0;
const MARGIN: f64 = 20.0;

/// Marker shapes for highlighted vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Marker {
    /// Image of the pyramid.
    Square,
    Disc,
    /// Flippable vertices.
    Ring,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Highlights {
    pub groups: Vec<(Marker, Vec<LatticePoint>)>,
}

impl Highlights {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn with(mut self, marker: Marker, points: Vec<LatticePoint>) -> Self {
        self.groups.push((marker, points));
        self
    }
}

fn unit(r: usize, axis: usize) -> (f64, f64) {
    match r {
        2 => [(1.0, 0.0), (-1.0, 0.0)][axis],
        _ => {
            let deg = [90.0f64, 210.0, 330.0][axis];
            (deg.to_radians().cos(), deg.to_radians().sin())
        }
    }
}

/// Planar image of `x`; `(1,...,1)` maps to the origin.
pub fn project(x: &LatticePoint) -> Result<(f64, f64), RenderError> {
    let r = x.rank();
    if !(2..=3).contains(&r) {
        return Err(RenderError::Rank(r));
    }
    Ok(x.coords().iter().enumerate().fold((0.0, 0.0), |(a, b), (i, &c)| {
        let (u, v) = unit(r, i);
        (a + c as f64 * u, b + c as f64 * v)
    }))
}

/// The projected facet `λx` for each `x ∈ X` in the window, vertices in
/// cyclic order (two endpoints for rank 2).
pub fn tiling_polygons(set: &CubistSet, window: &Window) -> Result<Vec<Vec<(f64, f64)>>, RenderError> {
    let r = set.rank();
    if !(2..=3).contains(&r) {
        return Err(RenderError::Rank(r));
    }
    let mut out = Vec::new();
    for x in set.points_in_window(window) {
        let f = set.lambda(&x).expect("x lies in X");
        let mut pts = f.points();
        if pts.len() == 4 {
            pts.swap(2, 3);
        }
        out.push(pts.iter().map(|p| project(p)).collect::<Result<_, _>>()?);
    }
    Ok(out)
}

/// Two decimals, never "-0.00".
fn num(v: f64) -> String {
    format!("{:.2}", (v * 100.0).round() / 100.0 + 0.0)
}

/// Screen coordinates: y points down.
fn fmt_xy(p: (f64, f64)) -> String {
    format!("{},{}", num(p.0 * SCALE), num(-p.1 * SCALE))
}

/// A standalone SVG 1.1 document.
pub fn svg_tiling(set: &CubistSet, window: &Window, highlights: &Highlights) -> Result<String, RenderError> {
    let polys = tiling_polygons(set, window)?;
    let marks: Vec<(Marker, (f64, f64))> = highlights
        .groups
        .iter()
        .flat_map(|(m, pts)| pts.iter().map(move |p| (*m, p)))
        .map(|(m, p)| project(p).map(|xy| (m, xy)))
        .collect::<Result<_, _>>()?;

    let all = polys.iter().flatten().chain(marks.iter().map(|(_, xy)| xy));
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for &(x, y) in all {
        x0 = x0.min(x * SCALE);
        x1 = x1.max(x * SCALE);
        y0 = y0.min(-y * SCALE);
        y1 = y1.max(-y * SCALE);
    }
    if x0 > x1 {
        (x0, y0, x1, y1) = (0.0, 0.0, 0.0, 0.0);
    }
    let (vx, vy) = (x0 - MARGIN, y0 - MARGIN);
    let (vw, vh) = (x1 - x0 + 2.0 * MARGIN, y1 - y0 + 2.0 * MARGIN);

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{} {} {} {}\">",
        num(vx),
        num(vy),
        num(vw),
        num(vh)
    );
    s.push_str("<g fill=\"#f4efe1\" stroke=\"#333333\" stroke-width=\"1\" stroke-linejoin=\"round\">\n");
    for poly in &polys {
        let pts: Vec<String> = poly.iter().map(|&p| fmt_xy(p)).collect();
        if poly.len() == 2 {
            let _ = writeln!(s, "<polyline points=\"{}\"/>", pts.join(" "));
        } else {
            let _ = writeln!(s, "<polygon points=\"{}\"/>", pts.join(" "));
        }
    }
    s.push_str("</g>\n");
    if !marks.is_empty() {
        s.push_str("<g stroke=\"#000000\" stroke-width=\"1.5\">\n");
        for (m, xy) in &marks {
            let (x, y) = (xy.0 * SCALE, -xy.1 * SCALE);
            match m {
                Marker::Square => {
                    let _ = writeln!(
                        s,
                        "<rect x=\"{}\" y=\"{}\" width=\"8.00\" height=\"8.00\" fill=\"#000000\"/>",
                        num(x - 4.0),
                        num(y - 4.0)
                    );
                }
                Marker::Disc => {
                    let _ = writeln!(s, "<circle cx=\"{}\" cy=\"{}\" r=\"4.00\" fill=\"#000000\"/>", num(x), num(y));
                }
                Marker::Ring => {
                    let _ = writeln!(s, "<circle cx=\"{}\" cy=\"{}\" r=\"5.00\" fill=\"none\"/>", num(x), num(y));
                }
            }
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    Ok(s)
}
