#![allow(dead_code)]

use bcr_core::{parse_formula, Bba, Element, Frame, Model, ModelKind, Region, Space};
use rand::seq::SliceRandom;
use rand::Rng;

pub const NAMES: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

pub fn el(space: &Space, formula: &str) -> Element {
    parse_formula(space, formula).unwrap_or_else(|e| panic!("{formula}: {e}"))
}

pub fn bba(space: &Space, entries: &[(&str, f64)]) -> Bba {
    Bba::new(space, entries.iter().map(|(f, m)| (el(space, f), *m))).unwrap()
}

pub fn space(kind: ModelKind, n: usize, constraints: &[&[usize]]) -> Space {
    let frame = Frame::new(NAMES[..n].iter().copied()).unwrap();
    let model = match kind {
        ModelKind::Free => Model::free(n),
        ModelKind::Shafer => Model::shafer(n),
        ModelKind::Hybrid => Model::hybrid(
            n,
            constraints
                .iter()
                .map(|c| Region::from_atoms(c.iter().copied()).unwrap()),
        ),
    }
    .unwrap();
    Space::new(frame, model).unwrap()
}

/// A hybrid model with one to three random intersection constraints.
pub fn random_hybrid<R: Rng>(rng: &mut R, n: usize) -> Space {
    let frame = Frame::new(NAMES[..n].iter().copied()).unwrap();
    let count = rng.gen_range(1..=3);
    let mut constraints = Vec::new();
    while constraints.len() < count {
        let mask: u8 = rng.gen_range(1..(1u8 << n));
        if mask.count_ones() >= 2 {
            constraints.push(Region::new(mask).unwrap());
        }
    }
    Space::new(frame, Model::hybrid(n, constraints).unwrap()).unwrap()
}

/// A space with two to four atoms.
pub fn random_space<R: Rng>(rng: &mut R, kind: ModelKind) -> Space {
    let n = rng.gen_range(2..=4);
    match kind {
        ModelKind::Hybrid => random_hybrid(rng, n),
        other => space(other, n, &[]),
    }
}

/// Up to `max_focal` distinct focal elements drawn from `elements` with random weights.
pub fn random_bba_from<R: Rng>(
    rng: &mut R,
    space: &Space,
    elements: &[Element],
    max_focal: usize,
) -> Bba {
    let k = rng.gen_range(1..=max_focal.min(elements.len()));
    let chosen: Vec<Element> = elements.choose_multiple(rng, k).copied().collect();
    let weights: Vec<f64> = chosen.iter().map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = weights.iter().sum();
    Bba::new(
        space,
        chosen
            .into_iter()
            .zip(weights.into_iter().map(|w| w / total)),
    )
    .unwrap()
}

pub fn random_bba<R: Rng>(rng: &mut R, space: &Space, max_focal: usize) -> Bba {
    random_bba_from(rng, space, &space.enumerate(false), max_focal)
}

pub fn random_bayesian<R: Rng>(rng: &mut R, space: &Space) -> Bba {
    let atoms: Vec<Element> = (0..space.atom_count())
        .map(|i| space.atom(i).unwrap())
        .collect();
    random_bba_from(rng, space, &atoms, atoms.len())
}

pub fn random_event<R: Rng>(rng: &mut R, space: &Space) -> Element {
    *space.enumerate(false).choose(rng).unwrap()
}
