#![allow(dead_code)]

use std::collections::BTreeSet;

use cubist_core::flips::{flip, flippable_in_window};
use cubist_core::{CubistSet, LatticePoint, Window};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

pub fn pt(c: &[i64]) -> LatticePoint {
    LatticePoint::new(c.to_vec())
}

/// The pyramid of the p = 7 example block.
pub fn example_pyramid() -> BTreeSet<(usize, usize)> {
    [(0, 1), (0, 2), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)].into()
}

/// Applies up to `count` random flips at vertices inside `region`.
pub fn random_flips(set: CubistSet, region: &Window, count: usize, rng: &mut StdRng) -> CubistSet {
    let mut set = set;
    for _ in 0..count {
        let cands = flippable_in_window(&set, region);
        let Some(z) = cands.choose(rng) else { break };
        set = flip(&set, z).expect("candidate is flippable");
    }
    set
}

pub struct Config {
    pub name: String,
    pub set: CubistSet,
    pub window: Window,
}

/// Sets exercised by the identity and flip suites: every rank 1 to 4, flat,
/// corner and weight-2 bases, with 0 to 10 random legal removals.
pub fn configurations() -> Vec<Config> {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut out = Vec::new();
    let mut push = |name: String, set: CubistSet, center: LatticePoint, flips: usize, rng: &mut StdRng| {
        let r = set.rank();
        let radius = if r <= 3 { 4 } else { 3 };
        let window = Window::cube(&center, radius);
        let set = random_flips(set, &Window::cube(&center, radius - 2), flips, rng);
        let name = format!("{name} +{}", set.removals().len());
        out.push(Config { name, set, window });
    };
    let z = |r| LatticePoint::zero(r);
    push("r1 flat".into(), CubistSet::flat(1, 1, 0).unwrap(), z(1), 0, &mut rng);
    push("r1 corner".into(), CubistSet::corner(z(1)).unwrap(), z(1), 3, &mut rng);
    for j in 1..=2 {
        push(format!("r2 flat({j})"), CubistSet::flat(2, j, 0).unwrap(), z(2), 0, &mut rng);
    }
    for n in [0, 4, 10] {
        push("r2 corner".into(), CubistSet::corner(z(2)).unwrap(), z(2), n, &mut rng);
    }
    push("r2 corner(1,-2)".into(), CubistSet::corner(pt(&[1, -2])).unwrap(), pt(&[1, -2]), 2, &mut rng);
    for j in 1..=3 {
        push(format!("r3 flat({j})"), CubistSet::flat(3, j, 0).unwrap(), z(3), 0, &mut rng);
    }
    for n in [0, 5, 10] {
        push("r3 corner".into(), CubistSet::corner(z(3)).unwrap(), z(3), n, &mut rng);
    }
    for n in [0, 3] {
        push("r3 weight2(5, empty)".into(), CubistSet::weight2(5, BTreeSet::new()).unwrap(), pt(&[0, 1, 0]), n, &mut rng);
    }
    for n in [0, 6] {
        push("r3 weight2(7, example)".into(), CubistSet::weight2(7, example_pyramid()).unwrap(), pt(&[-2, 4, 0]), n, &mut rng);
    }
    push("r4 flat(2)".into(), CubistSet::flat(4, 2, 0).unwrap(), z(4), 0, &mut rng);
    push("r4 flat(4)".into(), CubistSet::flat(4, 4, 0).unwrap(), z(4), 0, &mut rng);
    for n in [0, 3] {
        push("r4 corner".into(), CubistSet::corner(z(4)).unwrap(), z(4), n, &mut rng);
    }
    out
}
