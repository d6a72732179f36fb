//! Two-source fusion rules and Shafer's conditioning rule.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::algebra::{AlgebraError, Element, ModelKind};
use crate::belief::Bba;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FusionError {
    #[error("sources are defined on different frames or models")]
    SpaceMismatch,
    #[error("sources are in total conflict; normalization is undefined")]
    TotalConflict,
    #[error("Shafer's conditioning requires Shafer's model, got the {0} model")]
    NotShafer(ModelKind),
    #[error("conditioning event has zero plausibility")]
    ImplausibleEvent,
    #[error("cannot condition on the empty set")]
    EmptyEvent,
    #[error("unknown fusion rule {0:?}")]
    UnknownRule(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FusionRule {
    Dempster,
    /// Conjunctive rule on the hyper-power set.
    Dsmc,
    /// Proportional conflict redistribution, two-source form.
    Pcr5,
    /// Conflicting products go to the union of the pair.
    Dsmh2,
}

impl FusionRule {
    pub const ALL: [FusionRule; 4] = [
        FusionRule::Dempster,
        FusionRule::Dsmc,
        FusionRule::Pcr5,
        FusionRule::Dsmh2,
    ];
}

impl fmt::Display for FusionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FusionRule::Dempster => "dempster",
            FusionRule::Dsmc => "dsmc",
            FusionRule::Pcr5 => "pcr5",
            FusionRule::Dsmh2 => "dsmh2",
        })
    }
}

impl FromStr for FusionRule {
    type Err = FusionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dempster" => Ok(FusionRule::Dempster),
            "dsmc" => Ok(FusionRule::Dsmc),
            "pcr5" => Ok(FusionRule::Pcr5),
            "dsmh2" => Ok(FusionRule::Dsmh2),
            _ => Err(FusionError::UnknownRule(s.to_string())),
        }
    }
}

/// Result of a fusion together with the conjunctive conflict `m(∅)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fused {
    pub bba: Bba,
    pub conflict: f64,
}

/// Unnormalized conjunctive combination.
#[derive(Debug, Clone, PartialEq)]
pub struct Conjunctive {
    /// Mass on nonempty intersections.
    pub masses: BTreeMap<Element, f64>,
    /// Mass that landed on `∅`.
    pub conflict: f64,
}

impl Conjunctive {
    fn supported(&self) -> f64 {
        self.masses.values().sum()
    }
}

fn same_space(m1: &Bba, m2: &Bba) -> Result<(), FusionError> {
    if m1.space() == m2.space() {
        Ok(())
    } else {
        Err(FusionError::SpaceMismatch)
    }
}

/// `m(X) = Σ_{X1 ∩ X2 = X} m1(X1) m2(X2)`.
pub fn conjunctive(m1: &Bba, m2: &Bba) -> Result<Conjunctive, FusionError> {
    same_space(m1, m2)?;
    let mut masses = BTreeMap::new();
    let mut conflict = 0.0;
    for (x1, a) in m1.focal() {
        for (x2, b) in m2.focal() {
            let x = x1.meet(x2);
            if x.is_empty() {
                conflict += a * b;
            } else {
                *masses.entry(x).or_insert(0.0) += a * b;
            }
        }
    }
    Ok(Conjunctive { masses, conflict })
}

fn normalized(m1: &Bba, c: Conjunctive) -> Result<Fused, FusionError> {
    let supported = c.supported();
    if supported <= 0.0 {
        return Err(FusionError::TotalConflict);
    }
    let masses = c
        .masses
        .into_iter()
        .map(|(x, m)| (x, m / supported))
        .collect();
    Ok(Fused {
        bba: Bba::from_parts(m1.space(), masses),
        conflict: c.conflict,
    })
}

/// Combines two sources.
///
/// `dsmc` only has a normalized result when the sources do not conflict
/// (always the case under the free model). When they do, its output is
/// renormalized and the conflict is reported; total conflict is an error for
/// both `dsmc` and `dempster`.
pub fn fuse(m1: &Bba, m2: &Bba, rule: FusionRule) -> Result<Fused, FusionError> {
    let c = conjunctive(m1, m2)?;
    match rule {
        FusionRule::Dempster | FusionRule::Dsmc => normalized(m1, c),
        FusionRule::Pcr5 => {
            let conflict = c.conflict;
            let mut masses = c.masses;
            for (x1, a) in m1.focal() {
                for (x2, b) in m2.focal() {
                    if !x1.meet(x2).is_empty() || a + b <= 0.0 {
                        continue;
                    }
                    *masses.entry(*x1).or_insert(0.0) += a * a * b / (a + b);
                    *masses.entry(*x2).or_insert(0.0) += b * b * a / (a + b);
                }
            }
            Ok(Fused {
                bba: Bba::from_parts(m1.space(), masses),
                conflict,
            })
        }
        FusionRule::Dsmh2 => {
            let conflict = c.conflict;
            let mut masses = c.masses;
            for (x1, a) in m1.focal() {
                for (x2, b) in m2.focal() {
                    if x1.meet(x2).is_empty() {
                        // the union of two nonempty elements is never empty
                        *masses.entry(x1.join(x2)).or_insert(0.0) += a * b;
                    }
                }
            }
            Ok(Fused {
                bba: Bba::from_parts(m1.space(), masses),
                conflict,
            })
        }
    }
}

fn require_shafer(bba: &Bba) -> Result<(), FusionError> {
    if bba.is_shafer() {
        Ok(())
    } else {
        Err(FusionError::NotShafer(bba.space().model().kind()))
    }
}

/// Shafer's conditioning: Dempster's rule with the categorical bba on `event`.
pub fn scr_condition(bba: &Bba, event: Element) -> Result<Bba, FusionError> {
    require_shafer(bba)?;
    bba.space().check(&event)?;
    if event.is_empty() {
        return Err(FusionError::EmptyEvent);
    }
    if bba.pl(&event) <= 0.0 {
        return Err(FusionError::ImplausibleEvent);
    }
    let certain = Bba::from_parts(bba.space(), BTreeMap::from([(event, 1.0)]));
    Ok(fuse(bba, &certain, FusionRule::Dempster)?.bba)
}

/// `(Bel(x | event), Pl(x | event))` from the closed forms
/// `(Bel(x ∪ ē) − Bel(ē)) / (1 − Bel(ē))` and `Pl(x ∩ e) / Pl(e)`.
pub fn conditional_bel_pl(
    bba: &Bba,
    event: Element,
    x: Element,
) -> Result<(f64, f64), FusionError> {
    require_shafer(bba)?;
    let space = bba.space();
    space.check(&event)?;
    space.check(&x)?;
    if event.is_empty() {
        return Err(FusionError::EmptyEvent);
    }
    let outside = space.element_from_bits(space.complement_bits(&event))?;
    let bel_outside = bba.bel(&outside);
    if bel_outside >= 1.0 || bba.pl(&event) <= 0.0 {
        return Err(FusionError::ImplausibleEvent);
    }
    let bel = (bba.bel(&x.join(&outside)) - bel_outside) / (1.0 - bel_outside);
    let pl = bba.pl(&x.meet(&event)) / bba.pl(&event);
    Ok((bel, pl))
}
