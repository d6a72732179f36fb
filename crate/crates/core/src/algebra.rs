//! Hyper-power set elements as upward-closed sets of Venn regions.
//!
//! A frame of `n` atoms splits into `2^n - 1` Venn regions, one per nonempty
//! subset of atoms (the part of the diagram lying inside exactly those atoms).
//! A model deletes the regions that its emptiness constraints rule out. Every
//! member of `D^Θ` is then an upward-closed set of the remaining regions:
//! `θi` is the set of regions containing `i`, and union/intersection become
//! bitwise OR/AND on a 64-bit region mask.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

/// Largest supported frame. Region masks must fit in a `u64`.
pub const MAX_ATOMS: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("a frame needs at least 2 atoms, got {0}")]
    FrameTooSmall(usize),
    #[error("frames are limited to {MAX_ATOMS} atoms, got {0}")]
    FrameTooLarge(usize),
    #[error("invalid atom name {0:?}")]
    InvalidAtomName(String),
    #[error("duplicate atom name {0:?}")]
    DuplicateAtom(String),
    #[error("atom index {index} out of range for a frame of {n} atoms")]
    AtomOutOfRange { index: usize, n: usize },
    #[error("emptiness constraint must intersect at least 2 atoms")]
    TrivialConstraint,
    #[error("constraint references atoms outside the frame")]
    ConstraintOutOfRange,
    #[error("model was built for {model} atoms but the frame has {frame}")]
    ModelFrameMismatch { model: usize, frame: usize },
    #[error("elements belong to different frames or models")]
    SpaceMismatch,
    #[error("region set is not upward closed under the model")]
    NotUpwardClosed,
    #[error("region set references regions the model removes")]
    DisallowedRegion,
    #[error("operation is undefined on the empty element")]
    EmptyElement,
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Ordered, named atoms `θ1..θn`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    atoms: Vec<String>,
}

impl Frame {
    pub fn new<I, S>(atoms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        if atoms.len() < 2 {
            return Err(AlgebraError::FrameTooSmall(atoms.len()));
        }
        if atoms.len() > MAX_ATOMS {
            return Err(AlgebraError::FrameTooLarge(atoms.len()));
        }
        let mut seen = BTreeSet::new();
        for name in &atoms {
            if !is_identifier(name) {
                return Err(AlgebraError::InvalidAtomName(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                return Err(AlgebraError::DuplicateAtom(name.clone()));
            }
        }
        Ok(Self { atoms })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == name)
    }

    pub fn name(&self, index: usize) -> &str {
        &self.atoms[index]
    }

    fn full_mask(&self) -> u8 {
        ((1u16 << self.atoms.len()) - 1) as u8
    }
}

/// A Venn region, identified by the nonempty set of atoms it lies inside.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Region(u8);

impl Region {
    pub fn new(members: u8) -> Option<Self> {
        (members != 0 && (members as usize) < (1 << MAX_ATOMS)).then_some(Self(members))
    }

    pub fn from_atoms<I: IntoIterator<Item = usize>>(atoms: I) -> Option<Self> {
        let mut mask = 0u8;
        for i in atoms {
            if i >= MAX_ATOMS {
                return None;
            }
            mask |= 1 << i;
        }
        Self::new(mask)
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn contains_atom(self, i: usize) -> bool {
        i < MAX_ATOMS && self.0 & (1 << i) != 0
    }

    pub fn is_subset(self, other: Region) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn atoms(self) -> impl Iterator<Item = usize> {
        (0..MAX_ATOMS).filter(move |i| self.0 & (1 << i) != 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Free,
    Shafer,
    Hybrid,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Free => "free",
            ModelKind::Shafer => "shafer",
            ModelKind::Hybrid => "hybrid",
        })
    }
}

/// A DSm model: which atom intersections are declared empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Model {
    kind: ModelKind,
    n: usize,
    constraints: Vec<Region>,
    allowed: u64,
}

impl Model {
    pub fn free(n: usize) -> Result<Self, AlgebraError> {
        Self::build(ModelKind::Free, n, Vec::new())
    }

    pub fn shafer(n: usize) -> Result<Self, AlgebraError> {
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                pairs.push(Region((1 << i) | (1 << j)));
            }
        }
        Self::build(ModelKind::Shafer, n, pairs)
    }

    /// Each constraint `S` declares `∩_{i∈S} θi = ∅`.
    pub fn hybrid<I: IntoIterator<Item = Region>>(
        n: usize,
        constraints: I,
    ) -> Result<Self, AlgebraError> {
        let mut constraints: Vec<Region> = constraints.into_iter().collect();
        constraints.sort();
        constraints.dedup();
        Self::build(ModelKind::Hybrid, n, constraints)
    }

    fn build(kind: ModelKind, n: usize, constraints: Vec<Region>) -> Result<Self, AlgebraError> {
        if n < 2 {
            return Err(AlgebraError::FrameTooSmall(n));
        }
        if n > MAX_ATOMS {
            return Err(AlgebraError::FrameTooLarge(n));
        }
        let full = (1u16 << n) - 1;
        for c in &constraints {
            if c.len() < 2 {
                return Err(AlgebraError::TrivialConstraint);
            }
            if c.0 as u16 & !full != 0 {
                return Err(AlgebraError::ConstraintOutOfRange);
            }
        }
        let mut allowed = 0u64;
        for r in 1..=full as u8 {
            if !constraints.iter().any(|c| c.0 & r == c.0) {
                allowed |= 1 << r;
            }
        }
        Ok(Self {
            kind,
            n,
            constraints,
            allowed,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn atom_count(&self) -> usize {
        self.n
    }

    pub fn constraints(&self) -> &[Region] {
        &self.constraints
    }

    pub fn is_allowed(&self, r: Region) -> bool {
        self.allowed & (1 << r.0) != 0
    }

    pub fn allowed_regions(&self) -> impl Iterator<Item = Region> + '_ {
        (1..64u8)
            .filter(move |r| self.allowed & (1 << r) != 0)
            .map(Region)
    }

    pub fn allowed_mask(&self) -> u64 {
        self.allowed
    }
}

#[derive(Debug)]
struct SpaceInner {
    frame: Frame,
    model: Model,
    id: u64,
    /// `up[s]`: allowed regions that are supersets of atom set `s`.
    up: [u64; 64],
    /// `below[r]`: allowed regions that are proper subsets of `r`.
    below: [u64; 64],
    /// Allowed regions, largest first.
    by_size_desc: Vec<u8>,
}

/// A frame together with a model: the context every [`Element`] lives in.
///
/// Cheap to clone; the precomputed tables are shared.
#[derive(Debug, Clone)]
pub struct Space(Arc<SpaceInner>);

impl PartialEq for Space {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id && self.0.frame == other.0.frame && self.0.model == other.0.model
    }
}

impl Eq for Space {}

impl Space {
    pub fn new(frame: Frame, model: Model) -> Result<Self, AlgebraError> {
        if model.n != frame.len() {
            return Err(AlgebraError::ModelFrameMismatch {
                model: model.n,
                frame: frame.len(),
            });
        }
        let mut hasher = DefaultHasher::new();
        frame.hash(&mut hasher);
        model.allowed.hash(&mut hasher);
        let id = hasher.finish();

        let full = frame.full_mask();
        let mut up = [0u64; 64];
        let mut below = [0u64; 64];
        for s in 1..=full {
            for r in 1..=full {
                if model.allowed & (1 << r) == 0 {
                    continue;
                }
                if r & s == s {
                    up[s as usize] |= 1 << r;
                }
                if r & s == r && r != s {
                    below[s as usize] |= 1 << r;
                }
            }
        }
        let mut by_size_desc: Vec<u8> = (1..=full)
            .filter(|r| model.allowed & (1 << r) != 0)
            .collect();
        by_size_desc.sort_by(|a, b| b.count_ones().cmp(&a.count_ones()).then(a.cmp(b)));

        Ok(Self(Arc::new(SpaceInner {
            frame,
            model,
            id,
            up,
            below,
            by_size_desc,
        })))
    }

    pub fn free(atoms: &[&str]) -> Result<Self, AlgebraError> {
        let frame = Frame::new(atoms.iter().copied())?;
        let model = Model::free(frame.len())?;
        Self::new(frame, model)
    }

    pub fn shafer(atoms: &[&str]) -> Result<Self, AlgebraError> {
        let frame = Frame::new(atoms.iter().copied())?;
        let model = Model::shafer(frame.len())?;
        Self::new(frame, model)
    }

    pub fn frame(&self) -> &Frame {
        &self.0.frame
    }

    pub fn model(&self) -> &Model {
        &self.0.model
    }

    pub fn atom_count(&self) -> usize {
        self.0.frame.len()
    }

    fn wrap(&self, regions: u64) -> Element {
        Element {
            regions,
            space: self.0.id,
        }
    }

    pub(crate) fn owns(&self, x: &Element) -> bool {
        x.space == self.0.id
    }

    pub(crate) fn check(&self, x: &Element) -> Result<(), AlgebraError> {
        if self.owns(x) {
            Ok(())
        } else {
            Err(AlgebraError::SpaceMismatch)
        }
    }

    pub fn empty(&self) -> Element {
        self.wrap(0)
    }

    /// `θ1 ∪ … ∪ θn`, the total ignorance.
    pub fn total(&self) -> Element {
        self.wrap(self.0.model.allowed)
    }

    pub fn atom(&self, index: usize) -> Result<Element, AlgebraError> {
        let n = self.atom_count();
        if index >= n {
            return Err(AlgebraError::AtomOutOfRange { index, n });
        }
        Ok(self.wrap(self.0.up[1 << index]))
    }

    /// `∩_{i∈S} θi` for the atoms of `s` (may be empty under the model).
    pub fn meet_of(&self, s: Region) -> Result<Element, AlgebraError> {
        if s.0 & !self.0.frame.full_mask() != 0 {
            return Err(AlgebraError::ConstraintOutOfRange);
        }
        Ok(self.wrap(self.0.up[s.0 as usize]))
    }

    /// Builds an element from an explicit region set, checking it is allowed
    /// and upward closed.
    pub fn element_from_regions<I: IntoIterator<Item = Region>>(
        &self,
        regions: I,
    ) -> Result<Element, AlgebraError> {
        let mut bits = 0u64;
        for r in regions {
            bits |= 1 << r.0;
        }
        self.element_from_bits(bits)
    }

    pub fn element_from_bits(&self, bits: u64) -> Result<Element, AlgebraError> {
        if bits & !self.0.model.allowed != 0 {
            return Err(AlgebraError::DisallowedRegion);
        }
        if !self.is_upward_closed(bits) {
            return Err(AlgebraError::NotUpwardClosed);
        }
        Ok(self.wrap(bits))
    }

    pub(crate) fn is_upward_closed(&self, bits: u64) -> bool {
        iter_bits(bits).all(|r| self.0.up[r as usize] & !bits == 0)
    }

    pub(crate) fn minimal_regions_bits(&self, bits: u64) -> u64 {
        iter_bits(bits)
            .filter(|&r| self.0.below[r as usize] & bits == 0)
            .fold(0, |acc, r| acc | (1 << r))
    }

    /// Minimal regions of `x` under inclusion: the antichain behind its formula.
    pub fn minimal_regions(&self, x: &Element) -> Vec<Region> {
        iter_bits(self.minimal_regions_bits(x.regions))
            .map(Region)
            .collect()
    }

    /// `s(x)`: the atoms appearing in the canonical formula of `x`.
    pub fn atoms_of(&self, x: &Element) -> Result<BTreeSet<usize>, AlgebraError> {
        self.check(x)?;
        let mask = self.atom_mask_of(x)?;
        Ok(Region(mask).atoms().collect())
    }

    pub(crate) fn atom_mask_of(&self, x: &Element) -> Result<u8, AlgebraError> {
        if x.is_empty() {
            return Err(AlgebraError::EmptyElement);
        }
        Ok(iter_bits(self.minimal_regions_bits(x.regions)).fold(0u8, |acc, r| acc | r))
    }

    /// True when `x` is nonempty and lies in the sub-lattice generated by the
    /// atoms of `atoms` under union and intersection.
    pub(crate) fn generated_by(&self, x: &Element, atoms: u8) -> bool {
        if x.regions == 0 || atoms == 0 {
            return false;
        }
        let mut covered = 0u64;
        let mut s = atoms;
        // walk every nonempty submask of `atoms`
        loop {
            let meet = self.0.up[s as usize];
            if meet != 0 && meet & !x.regions == 0 {
                covered |= meet;
            }
            s = (s - 1) & atoms;
            if s == 0 {
                break;
            }
        }
        covered == x.regions
    }

    /// Serializes `x` as a union of intersections over its minimal regions.
    ///
    /// Atoms follow frame order, terms are sorted by size and then
    /// lexicographically by atom index, and `∅` is written `0`.
    pub fn formula(&self, x: &Element) -> String {
        let mut terms: Vec<u8> = iter_bits(self.minimal_regions_bits(x.regions)).collect();
        if terms.is_empty() {
            return "0".to_string();
        }
        terms.sort_by(|a, b| {
            a.count_ones().cmp(&b.count_ones()).then_with(|| {
                let ia: Vec<usize> = Region(*a).atoms().collect();
                let ib: Vec<usize> = Region(*b).atoms().collect();
                ia.cmp(&ib)
            })
        });
        let several = terms.len() > 1;
        let rendered: Vec<String> = terms
            .iter()
            .map(|&t| {
                let names: Vec<&str> = Region(t).atoms().map(|i| self.0.frame.name(i)).collect();
                if several && names.len() > 1 {
                    format!("({})", names.join(" & "))
                } else {
                    names.join(" & ")
                }
            })
            .collect();
        rendered.join(" | ")
    }

    /// Canonical order: ascending DSm cardinal, then serialized formula.
    pub fn canonical_cmp(&self, a: &Element, b: &Element) -> Ordering {
        a.dsm_cardinal()
            .cmp(&b.dsm_cardinal())
            .then_with(|| self.formula(a).cmp(&self.formula(b)))
    }

    pub fn sort_canonical(&self, elements: &mut [Element]) {
        elements.sort_by_cached_key(|x| (x.dsm_cardinal(), self.formula(x)));
    }

    /// Every element of `D^Θ` under the model, in canonical order.
    pub fn enumerate(&self, include_empty: bool) -> Vec<Element> {
        let mut found = Vec::new();
        self.upsets_within(self.0.model.allowed, &mut found);
        let mut out: Vec<Element> = found
            .into_iter()
            .filter(|&bits| include_empty || bits != 0)
            .map(|bits| self.wrap(bits))
            .collect();
        self.sort_canonical(&mut out);
        out
    }

    /// Nonempty elements contained in `bound`, in no particular order.
    pub(crate) fn elements_below(&self, bound: &Element) -> Vec<Element> {
        let mut found = Vec::new();
        self.upsets_within(bound.regions, &mut found);
        found
            .into_iter()
            .filter(|&bits| bits != 0)
            .map(|bits| self.wrap(bits))
            .collect()
    }

    fn upsets_within(&self, bound: u64, out: &mut Vec<u64>) {
        let order: Vec<u8> = self
            .0
            .by_size_desc
            .iter()
            .copied()
            .filter(|&r| bound & (1 << r) != 0)
            .collect();
        self.collect_upsets(&order, 0, 0, out);
    }

    fn collect_upsets(&self, order: &[u8], idx: usize, current: u64, out: &mut Vec<u64>) {
        if idx == order.len() {
            out.push(current);
            return;
        }
        let r = order[idx];
        self.collect_upsets(order, idx + 1, current, out);
        let strict_up = self.0.up[r as usize] & !(1u64 << r);
        if strict_up & !current == 0 {
            self.collect_upsets(order, idx + 1, current | (1 << r), out);
        }
    }

    /// Complement within the model's regions. Only closed under Shafer's
    /// model, where every region set is upward closed.
    pub(crate) fn complement_bits(&self, x: &Element) -> u64 {
        self.0.model.allowed & !x.regions
    }
}

pub(crate) fn iter_bits(bits: u64) -> impl Iterator<Item = u8> {
    let mut rest = bits;
    std::iter::from_fn(move || {
        if rest == 0 {
            return None;
        }
        let r = rest.trailing_zeros() as u8;
        rest &= rest - 1;
        Some(r)
    })
}

/// A member of `D^Θ`, stored canonically as its set of Venn regions.
///
/// Elements are plain values tagged with the [`Space`] that produced them;
/// combining elements from different spaces is an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    regions: u64,
    space: u64,
}

impl Element {
    pub fn regions(&self) -> impl Iterator<Item = Region> {
        iter_bits(self.regions).map(Region)
    }

    pub fn region_bits(&self) -> u64 {
        self.regions
    }

    pub fn is_empty(&self) -> bool {
        self.regions == 0
    }

    pub fn contains_region(&self, r: Region) -> bool {
        self.regions & (1 << r.0) != 0
    }

    /// Number of Venn regions that make up the element.
    pub fn dsm_cardinal(&self) -> usize {
        self.regions.count_ones() as usize
    }

    fn same_space(&self, other: &Element) -> Result<(), AlgebraError> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(AlgebraError::SpaceMismatch)
        }
    }

    pub fn union(&self, other: &Element) -> Result<Element, AlgebraError> {
        self.same_space(other)?;
        Ok(self.join(other))
    }

    pub fn intersection(&self, other: &Element) -> Result<Element, AlgebraError> {
        self.same_space(other)?;
        Ok(self.meet(other))
    }

    pub fn is_subset(&self, other: &Element) -> Result<bool, AlgebraError> {
        self.same_space(other)?;
        Ok(self.within(other))
    }

    pub(crate) fn join(&self, other: &Element) -> Element {
        debug_assert_eq!(self.space, other.space);
        Element {
            regions: self.regions | other.regions,
            space: self.space,
        }
    }

    pub(crate) fn meet(&self, other: &Element) -> Element {
        debug_assert_eq!(self.space, other.space);
        Element {
            regions: self.regions & other.regions,
            space: self.space,
        }
    }

    pub(crate) fn within(&self, other: &Element) -> bool {
        self.regions & !other.regions == 0
    }
}
