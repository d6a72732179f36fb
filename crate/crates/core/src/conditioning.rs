//! Belief conditioning rules BCR1–BCR31.
//!
//! Conditioning on `a` splits `D^Θ ∖ {∅}` into
//!
//! * `D1`: the nonempty parts of `a`,
//! * `D2`: the sub-lattice generated by the atoms outside `s(a)`,
//! * `D3`: everything else.
//!
//! Mass on `D1` stays put. Every rule moves the mass of `D2` and `D3` into
//! `D1`; the rules differ only in how each part is routed (see [`Mode`]) and
//! which parts of a focal element receive its mass (see [`Selector`]).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::algebra::{AlgebraError, Element, Space};
use crate::belief::Bba;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConditionError {
    #[error("cannot condition on the empty set under a closed world")]
    EmptyEvent,
    #[error("unknown conditioning rule {0:?}")]
    UnknownRule(String),
    #[error("selection needs at least one candidate")]
    NoCandidates,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// How the mass of a `D2` or `D3` element reaches `D1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Pooled and shared out in proportion to the prior `D1` masses.
    Undifferentiated,
    /// Sent to the selected `D1` parts of the element itself.
    Particular,
    /// Shared in proportion to the prior masses of the element's `D1` parts
    /// when those are not all zero, otherwise sent to the selected parts.
    Split,
}

impl Mode {
    fn letter(self) -> char {
        match self {
            Mode::Undifferentiated => 'u',
            Mode::Particular => 'p',
            Mode::Split => 's',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Selector {
    Largest,
    Smallest,
    Median,
    Average,
    Uniform,
}

impl Selector {
    pub const ALL: [Selector; 5] = [
        Selector::Largest,
        Selector::Smallest,
        Selector::Median,
        Selector::Average,
        Selector::Uniform,
    ];
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Selector::Largest => "largest",
            Selector::Smallest => "smallest",
            Selector::Median => "median",
            Selector::Average => "average",
            Selector::Uniform => "uniform",
        })
    }
}

/// One of the 31 conditioning rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RuleSpec {
    number: u8,
    d2: Mode,
    d3: Mode,
    selector: Option<Selector>,
}

impl RuleSpec {
    pub const COUNT: u8 = 31;

    pub fn bcr(number: u8) -> Result<Self, ConditionError> {
        use Mode::*;
        let (d2, d3) = match number {
            1 => (Undifferentiated, Undifferentiated),
            2..=6 => (Undifferentiated, Particular),
            7..=11 => (Undifferentiated, Split),
            12..=16 => (Particular, Particular),
            17..=21 => (Split, Split),
            22..=26 => (Particular, Split),
            27..=31 => (Split, Particular),
            _ => return Err(ConditionError::UnknownRule(format!("BCR{number}"))),
        };
        let selector = (number > 1).then(|| Selector::ALL[((number - 2) % 5) as usize]);
        Ok(Self {
            number,
            d2,
            d3,
            selector,
        })
    }

    pub fn all() -> impl Iterator<Item = RuleSpec> {
        (1..=Self::COUNT).map(|n| Self::bcr(n).expect("registry covers 1..=31"))
    }

    pub fn number(&self) -> u8 {
        self.number
    }

    pub fn d2_mode(&self) -> Mode {
        self.d2
    }

    pub fn d3_mode(&self) -> Mode {
        self.d3
    }

    pub fn selector(&self) -> Option<Selector> {
        self.selector
    }

    /// Compact description such as `(p, s, median)`.
    pub fn signature(&self) -> String {
        let selector = self.selector.map_or("none".to_string(), |s| s.to_string());
        format!("({}, {}, {})", self.d2.letter(), self.d3.letter(), selector)
    }

    fn mode_for(&self, part: Part) -> Mode {
        match part {
            Part::D2 => self.d2,
            _ => self.d3,
        }
    }
}

impl fmt::Display for RuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BCR{}", self.number)
    }
}

impl FromStr for RuleSpec {
    type Err = ConditionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || ConditionError::UnknownRule(s.to_string());
        let lower = s.trim().to_ascii_lowercase();
        let digits = lower.strip_prefix("bcr").ok_or_else(unknown)?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(unknown());
        }
        let number: u8 = digits.parse().map_err(|_| unknown())?;
        Self::bcr(number).map_err(|_| unknown())
    }
}

/// Which block of the decomposition an element falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Part {
    D1,
    D2,
    D3,
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Part::D1 => "D1",
            Part::D2 => "D2",
            Part::D3 => "D3",
        })
    }
}

/// Classifies elements against a fixed conditioning event.
#[derive(Debug, Clone)]
pub struct Partition {
    space: Space,
    event: Element,
    outside_atoms: u8,
}

impl Partition {
    pub fn new(space: &Space, event: Element) -> Result<Self, ConditionError> {
        space.check(&event)?;
        if event.is_empty() {
            return Err(ConditionError::EmptyEvent);
        }
        let inside = space.atom_mask_of(&event)?;
        let full = ((1u16 << space.atom_count()) - 1) as u8;
        Ok(Self {
            space: space.clone(),
            event,
            outside_atoms: full & !inside,
        })
    }

    pub fn event(&self) -> Element {
        self.event
    }

    /// Part of a nonempty element.
    pub fn part(&self, x: &Element) -> Part {
        if x.within(&self.event) {
            Part::D1
        } else if self.space.generated_by(x, self.outside_atoms) {
            Part::D2
        } else {
            Part::D3
        }
    }
}

/// `D1`, `D2` and `D3` for one conditioning event, each in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub event: Element,
    pub d1: Vec<Element>,
    pub d2: Vec<Element>,
    pub d3: Vec<Element>,
}

pub fn decompose(space: &Space, event: Element) -> Result<Decomposition, ConditionError> {
    let partition = Partition::new(space, event)?;
    let mut d = Decomposition {
        event,
        d1: Vec::new(),
        d2: Vec::new(),
        d3: Vec::new(),
    };
    for x in space.enumerate(false) {
        match partition.part(&x) {
            Part::D1 => d.d1.push(x),
            Part::D2 => d.d2.push(x),
            Part::D3 => d.d3.push(x),
        }
    }
    Ok(d)
}

/// Picks the recipients of a transfer among `candidates`.
///
/// `Median` sorts by DSm cardinal and returns the equal-cardinal class at the
/// middle position, or the union of the two classes straddling the middle
/// when the count is even. `Average` returns the class whose cardinal is
/// nearest the mean cardinal, preferring the larger one on ties.
pub fn select(
    space: &Space,
    candidates: &[Element],
    selector: Selector,
) -> Result<Vec<Element>, ConditionError> {
    if candidates.is_empty() {
        return Err(ConditionError::NoCandidates);
    }
    let mut chosen: Vec<Element> = match selector {
        Selector::Uniform => candidates.to_vec(),
        Selector::Largest => candidates
            .iter()
            .filter(|x| !candidates.iter().any(|y| y != *x && x.within(y)))
            .copied()
            .collect(),
        Selector::Smallest => candidates
            .iter()
            .filter(|x| !candidates.iter().any(|y| y != *x && y.within(x)))
            .copied()
            .collect(),
        Selector::Median => {
            let mut cards: Vec<usize> = candidates.iter().map(Element::dsm_cardinal).collect();
            cards.sort_unstable();
            let n = cards.len();
            let wanted: Vec<usize> = if n % 2 == 1 {
                vec![cards[n / 2]]
            } else {
                vec![cards[n / 2 - 1], cards[n / 2]]
            };
            candidates
                .iter()
                .filter(|x| wanted.contains(&x.dsm_cardinal()))
                .copied()
                .collect()
        }
        Selector::Average => {
            let n = candidates.len() as i64;
            let total: i64 = candidates.iter().map(|x| x.dsm_cardinal() as i64).sum();
            // |c - total/n| compared as |c·n - total| to stay exact
            let best = candidates
                .iter()
                .map(|x| x.dsm_cardinal() as i64)
                .min_by(|a, b| {
                    (a * n - total)
                        .abs()
                        .cmp(&(b * n - total).abs())
                        .then(b.cmp(a))
                })
                .expect("candidates are nonempty");
            candidates
                .iter()
                .filter(|x| x.dsm_cardinal() as i64 == best)
                .copied()
                .collect()
        }
    };
    space.sort_canonical(&mut chosen);
    chosen.dedup();
    Ok(chosen)
}

/// Conditions `bba` on `event` with one of BCR1–BCR31.
///
/// If the prior puts no mass on `D1` the result is the categorical bba on
/// `event`.
pub fn condition(bba: &Bba, event: Element, rule: RuleSpec) -> Result<Bba, ConditionError> {
    let entries: Vec<(Element, f64)> = bba.focal().map(|(x, m)| (*x, m)).collect();
    let masses = redistribute(bba.space(), &entries, event, rule)?;
    Ok(Bba::from_parts(bba.space(), masses))
}

pub(crate) fn redistribute(
    space: &Space,
    prior: &[(Element, f64)],
    event: Element,
    rule: RuleSpec,
) -> Result<BTreeMap<Element, f64>, ConditionError> {
    let partition = Partition::new(space, event)?;

    let inside: Vec<(Element, f64)> = prior
        .iter()
        .filter(|(x, _)| x.within(&event))
        .copied()
        .collect();
    let inside_total: f64 = inside.iter().map(|(_, m)| m).sum();
    if inside_total <= 0.0 {
        return Ok(BTreeMap::from([(event, 1.0)]));
    }

    let mut result: BTreeMap<Element, f64> = inside.iter().copied().collect();
    let mut pot = 0.0;
    let selector = rule.selector.unwrap_or(Selector::Uniform);

    for &(w, mass) in prior {
        if mass <= 0.0 || w.within(&event) {
            continue;
        }
        let bound = w.meet(&event);
        match rule.mode_for(partition.part(&w)) {
            Mode::Undifferentiated => pot += mass,
            Mode::Particular => {
                if bound.is_empty() {
                    pot += mass;
                } else {
                    share_selected(space, &bound, selector, mass, &mut result)?;
                }
            }
            Mode::Split => {
                let parts: Vec<(Element, f64)> = inside
                    .iter()
                    .filter(|(x, _)| x.within(&bound))
                    .copied()
                    .collect();
                let weight: f64 = parts.iter().map(|(_, m)| m).sum();
                if weight > 0.0 {
                    for (x, m) in parts {
                        *result.entry(x).or_insert(0.0) += mass * m / weight;
                    }
                } else if !bound.is_empty() {
                    share_selected(space, &bound, selector, mass, &mut result)?;
                } else {
                    pot += mass;
                }
            }
        }
    }

    if pot > 0.0 {
        for &(x, m) in &inside {
            *result.entry(x).or_insert(0.0) += m * pot / inside_total;
        }
    }
    Ok(result)
}

fn share_selected(
    space: &Space,
    bound: &Element,
    selector: Selector,
    mass: f64,
    result: &mut BTreeMap<Element, f64>,
) -> Result<(), ConditionError> {
    let candidates = space.elements_below(bound);
    let chosen = select(space, &candidates, selector)?;
    let share = mass / chosen.len() as f64;
    for x in chosen {
        *result.entry(x).or_insert(0.0) += share;
    }
    Ok(())
}
