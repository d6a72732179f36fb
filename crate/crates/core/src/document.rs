//! Line-oriented text format for frames, models and bbas.
//!
//! ```text
//! # comment
//! frame: A, B, C
//! model: hybrid
//! empty: A & B
//! A | (B & C) : 0.25
//! C : 0.75
//! ```
//!
//! `model` is one of `free`, `shafer` or `hybrid`; `empty:` lines are only
//! valid for hybrid models and must name a pure intersection of two or more
//! atoms. Every remaining line is `<formula> : <mass>`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::{AlgebraError, Element, Frame, Model, ModelKind, Region, Space};
use crate::belief::{Bba, BbaError, MASS_SUM_TOLERANCE};
use crate::formula::{parse_formula, FormulaError};

/// Significant digits used when writing masses.
pub const MASS_DIGITS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {kind}")]
pub struct DocumentError {
    pub line: usize,
    pub kind: DocumentErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DocumentErrorKind {
    #[error("expected `frame: <atoms>` before anything else")]
    MissingFrame,
    #[error("expected `model: free|shafer|hybrid` after the frame")]
    MissingModel,
    #[error("unknown model {0:?}")]
    UnknownModel(String),
    #[error("`empty:` lines are only allowed for hybrid models")]
    ConstraintOutsideHybrid,
    #[error("emptiness constraint must be an intersection of two or more atoms")]
    GeneralConstraint,
    #[error("malformed line: {0}")]
    Malformed(String),
    #[error("invalid mass {0:?}")]
    InvalidMass(String),
    #[error("{0} is listed twice (after canonicalization)")]
    Duplicate(String),
    #[error("{0:?} denotes the empty set and cannot carry mass")]
    EmptyFocal(String),
    #[error("masses sum to {0}, which is off by more than {MASS_SUM_TOLERANCE}")]
    BadSum(f64),
    #[error("document holds no masses")]
    NoMasses,
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

fn err(line: usize, kind: impl Into<DocumentErrorKind>) -> DocumentError {
    DocumentError {
        line,
        kind: kind.into(),
    }
}

/// A parsed document before mass validation.
#[derive(Debug, Clone)]
pub struct BbaDocument {
    pub frame: Frame,
    pub model: Model,
    /// `(formula, mass)` pairs in file order.
    pub masses: Vec<(String, f64)>,
    lines: Vec<usize>,
}

fn content(raw: &str) -> &str {
    match raw.find('#') {
        Some(i) => raw[..i].trim(),
        None => raw.trim(),
    }
}

fn keyed<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    let (head, rest) = line.split_once(':')?;
    (head.trim() == key).then(|| rest.trim())
}

impl BbaDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, raw)| (i + 1, content(raw)))
            .filter(|(_, l)| !l.is_empty());

        let (frame_line, line) = lines
            .next()
            .ok_or(err(1, DocumentErrorKind::MissingFrame))?;
        let atoms = keyed(line, "frame").ok_or(err(frame_line, DocumentErrorKind::MissingFrame))?;
        let frame = Frame::new(atoms.split(',').map(|a| a.trim().to_string()))
            .map_err(|e| err(frame_line, e))?;

        let (model_line, line) = lines
            .next()
            .ok_or(err(frame_line, DocumentErrorKind::MissingModel))?;
        let kind = keyed(line, "model").ok_or(err(model_line, DocumentErrorKind::MissingModel))?;
        let kind = match kind {
            "free" => ModelKind::Free,
            "shafer" => ModelKind::Shafer,
            "hybrid" => ModelKind::Hybrid,
            other => {
                return Err(err(
                    model_line,
                    DocumentErrorKind::UnknownModel(other.into()),
                ))
            }
        };

        let free = Space::new(
            frame.clone(),
            Model::free(frame.len()).map_err(|e| err(model_line, e))?,
        )
        .map_err(|e| err(model_line, e))?;
        let mut constraints = Vec::new();
        let mut masses = Vec::new();
        let mut mass_lines = Vec::new();
        for (number, line) in lines {
            if let Some(spec) = keyed(line, "empty") {
                if kind != ModelKind::Hybrid {
                    return Err(err(number, DocumentErrorKind::ConstraintOutsideHybrid));
                }
                constraints.push(parse_constraint(&free, spec).map_err(|k| err(number, k))?);
                continue;
            }
            let (formula, mass) = line
                .rsplit_once(':')
                .ok_or_else(|| err(number, DocumentErrorKind::Malformed(line.to_string())))?;
            let formula = formula.trim();
            if formula.is_empty() {
                return Err(err(number, DocumentErrorKind::Malformed(line.to_string())));
            }
            let mass_text = mass.trim();
            let mass: f64 = mass_text
                .parse()
                .ok()
                .filter(|m: &f64| m.is_finite() && *m >= 0.0)
                .ok_or_else(|| err(number, DocumentErrorKind::InvalidMass(mass_text.into())))?;
            masses.push((formula.to_string(), mass));
            mass_lines.push(number);
        }

        let n = frame.len();
        let model = match kind {
            ModelKind::Free => Model::free(n),
            ModelKind::Shafer => Model::shafer(n),
            ModelKind::Hybrid => Model::hybrid(n, constraints),
        }
        .map_err(|e| err(model_line, e))?;

        Ok(Self {
            frame,
            model,
            masses,
            lines: mass_lines,
        })
    }

    /// Resolves every formula under the model and validates the masses.
    pub fn to_bba(&self) -> Result<Bba, DocumentError> {
        let space = Space::new(self.frame.clone(), self.model.clone()).map_err(|e| err(1, e))?;
        let last_line = self.lines.last().copied().unwrap_or(1);
        if self.masses.is_empty() {
            return Err(err(last_line, DocumentErrorKind::NoMasses));
        }
        let mut seen: BTreeMap<Element, usize> = BTreeMap::new();
        let mut entries = Vec::with_capacity(self.masses.len());
        for ((formula, mass), &line) in self.masses.iter().zip(&self.lines) {
            let x = parse_formula(&space, formula).map_err(|e| err(line, e))?;
            if x.is_empty() {
                if *mass == 0.0 {
                    continue;
                }
                return Err(err(line, DocumentErrorKind::EmptyFocal(formula.clone())));
            }
            if seen.insert(x, line).is_some() {
                return Err(err(line, DocumentErrorKind::Duplicate(space.formula(&x))));
            }
            entries.push((x, *mass));
        }
        Bba::new(&space, entries).map_err(|e| match e {
            BbaError::BadSum(total) => err(last_line, DocumentErrorKind::BadSum(total)),
            other => err(last_line, DocumentErrorKind::Malformed(other.to_string())),
        })
    }
}

fn parse_constraint(free: &Space, spec: &str) -> Result<Region, DocumentErrorKind> {
    let x = parse_formula(free, spec)?;
    match free.minimal_regions(&x).as_slice() {
        [r] if r.len() >= 2 => Ok(*r),
        _ => Err(DocumentErrorKind::GeneralConstraint),
    }
}

/// Parses and validates a document in one step.
pub fn load_bba(text: &str) -> Result<Bba, DocumentError> {
    BbaDocument::parse(text)?.to_bba()
}

/// Formats `x` with `digits` significant digits, without exponent or
/// trailing zeros.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() {
            "0".into()
        } else {
            x.to_string()
        };
    }
    let sci = format!("{:.*e}", digits.saturating_sub(1), x);
    let exponent: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .unwrap_or(0);
    let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

struct Dump<'a>(&'a Bba);

impl fmt::Display for Dump<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let space = self.0.space();
        writeln!(f, "frame: {}", space.frame().atoms().join(", "))?;
        writeln!(f, "model: {}", space.model().kind())?;
        if space.model().kind() == ModelKind::Hybrid {
            for c in space.model().constraints() {
                let names: Vec<&str> = c.atoms().map(|i| space.frame().name(i)).collect();
                writeln!(f, "empty: {}", names.join(" & "))?;
            }
        }
        for (x, m) in self.0.focal_canonical() {
            writeln!(
                f,
                "{} : {}",
                space.formula(&x),
                format_significant(m, MASS_DIGITS)
            )?;
        }
        Ok(())
    }
}

/// Writes `bba` in canonical element order.
pub fn dump_bba(bba: &Bba) -> String {
    Dump(bba).to_string()
}
