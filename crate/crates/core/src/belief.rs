//! Basic belief assignments and their belief/plausibility functionals.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::{Element, ModelKind, Space};

/// Allowed deviation of a loaded mass total from 1 before it is rejected.
pub const MASS_SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BbaError {
    #[error("focal element belongs to a different frame or model")]
    SpaceMismatch,
    #[error("the empty set cannot carry mass")]
    EmptyFocal,
    #[error("mass {mass} of {element} is negative or not finite")]
    InvalidMass { element: String, mass: f64 },
    #[error("{0} is listed more than once")]
    DuplicateFocal(String),
    #[error("masses sum to {0}, expected 1")]
    BadSum(f64),
}

/// A basic belief assignment `m: D^Θ → [0, 1]`.
///
/// Only focal elements (mass > 0) are stored and `∅` never is. Masses sum to
/// one up to floating-point rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct Bba {
    space: Space,
    masses: BTreeMap<Element, f64>,
}

impl Bba {
    /// Validates the entries and rescales them to sum exactly to one when the
    /// total is within [`MASS_SUM_TOLERANCE`].
    pub fn new<I>(space: &Space, entries: I) -> Result<Self, BbaError>
    where
        I: IntoIterator<Item = (Element, f64)>,
    {
        let mut masses = BTreeMap::new();
        for (x, mass) in entries {
            if !space.owns(&x) {
                return Err(BbaError::SpaceMismatch);
            }
            if !mass.is_finite() || mass < 0.0 {
                return Err(BbaError::InvalidMass {
                    element: space.formula(&x),
                    mass,
                });
            }
            if x.is_empty() {
                if mass == 0.0 {
                    continue;
                }
                return Err(BbaError::EmptyFocal);
            }
            if masses.insert(x, mass).is_some() {
                return Err(BbaError::DuplicateFocal(space.formula(&x)));
            }
        }
        let total: f64 = masses.values().sum();
        if (total - 1.0).abs() > MASS_SUM_TOLERANCE {
            return Err(BbaError::BadSum(total));
        }
        masses.retain(|_, m| *m > 0.0);
        for m in masses.values_mut() {
            *m /= total;
        }
        Ok(Self {
            space: space.clone(),
            masses,
        })
    }

    /// Wraps masses produced by a rule that preserves the total by construction.
    pub(crate) fn from_parts(space: &Space, mut masses: BTreeMap<Element, f64>) -> Self {
        masses.retain(|x, m| *m > 0.0 && !x.is_empty());
        debug_assert!(
            (masses.values().sum::<f64>() - 1.0).abs() < 1e-9,
            "rule output does not sum to one"
        );
        Self {
            space: space.clone(),
            masses,
        }
    }

    /// `m(x) = 1`.
    pub fn categorical(space: &Space, x: Element) -> Result<Self, BbaError> {
        Self::new(space, [(x, 1.0)])
    }

    /// All mass on the total ignorance `θ1 ∪ … ∪ θn`.
    pub fn vacuous(space: &Space) -> Self {
        Self::from_parts(space, BTreeMap::from([(space.total(), 1.0)]))
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn mass_of(&self, x: &Element) -> f64 {
        self.masses.get(x).copied().unwrap_or(0.0)
    }

    /// Focal elements in storage order.
    pub fn focal(&self) -> impl Iterator<Item = (&Element, f64)> {
        self.masses.iter().map(|(x, m)| (x, *m))
    }

    /// Focal elements in canonical order (DSm cardinal, then formula).
    pub fn focal_canonical(&self) -> Vec<(Element, f64)> {
        let mut out: Vec<(Element, f64)> = self.focal().map(|(x, m)| (*x, m)).collect();
        out.sort_by_cached_key(|(x, _)| (x.dsm_cardinal(), self.space.formula(x)));
        out
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.values().sum()
    }

    /// `Bel(x) = Σ_{Y ⊆ x, Y ≠ ∅} m(Y)`.
    pub fn bel(&self, x: &Element) -> f64 {
        self.masses
            .iter()
            .filter(|(y, _)| y.within(x))
            .map(|(_, m)| m)
            .sum()
    }

    /// `Pl(x) = Σ_{Y ∩ x ≠ ∅} m(Y)`.
    pub fn pl(&self, x: &Element) -> f64 {
        self.masses
            .iter()
            .filter(|(y, _)| !y.meet(x).is_empty())
            .map(|(_, m)| m)
            .sum()
    }

    /// True when every focal element is a single atom.
    pub fn is_bayesian(&self) -> bool {
        let atoms: Vec<Element> = (0..self.space.atom_count())
            .filter_map(|i| self.space.atom(i).ok())
            .collect();
        self.masses.keys().all(|x| atoms.contains(x))
    }

    /// Largest absolute mass difference over the union of focal sets.
    pub fn max_abs_diff(&self, other: &Bba) -> f64 {
        self.masses
            .keys()
            .chain(other.masses.keys())
            .map(|x| (self.mass_of(x) - other.mass_of(x)).abs())
            .fold(0.0, f64::max)
    }

    /// `Σ_X |m(X) - m'(X)|`.
    pub fn l1_distance(&self, other: &Bba) -> f64 {
        let mut keys: Vec<&Element> = self.masses.keys().chain(other.masses.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|x| (self.mass_of(x) - other.mass_of(x)).abs())
            .sum()
    }

    pub(crate) fn is_shafer(&self) -> bool {
        self.space.model().kind() == ModelKind::Shafer
    }
}
