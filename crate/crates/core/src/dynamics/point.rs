use std::fmt;

use serde_json::Value as Json;

use super::system::{SystemDescriptor, SystemKind};
use super::words::{self, Symbol, Word};
use crate::error::{Error, Result};
use crate::numeric::{format_rational, parse_rational, Rational};

/// An exact point of one of the supported spaces.
///
/// Shift points are periodic sequences `w^∞` stored by their primitive root
/// `w` in the phase they are observed at, so distinct rotations are distinct
/// points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Circle(Rational),
    Word(Word),
    Torus(Rational, Rational),
}

impl Point {
    pub fn word(&self) -> Option<&[Symbol]> {
        match self {
            Point::Word(w) => Some(w),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Json {
        match self {
            Point::Circle(x) => Json::String(format_rational(x)),
            Point::Word(w) => Json::String(words::word_to_string(w)),
            Point::Torus(x, y) => Json::Array(vec![
                Json::String(format_rational(x)),
                Json::String(format_rational(y)),
            ]),
        }
    }

    /// Parses a point in the syntax of `system`: `"p/q"` on the circle,
    /// a digit string on shifts, `["p/q", "p/q"]` on the torus.
    pub fn from_json(v: &Json, system: &SystemDescriptor) -> Result<Point> {
        let scalar = |v: &Json| -> Result<Rational> {
            match v {
                Json::String(s) => parse_rational(s),
                Json::Number(n) => parse_rational(&n.to_string()),
                _ => Err(Error::Parse(format!("expected a number, got {v}"))),
            }
        };
        match &system.kind {
            SystemKind::CircleExpanding { .. } => system.circle_point(scalar(v)?),
            SystemKind::TorusCat { .. } => match v.as_array().map(|a| a.as_slice()) {
                Some([x, y]) => system.torus_point(scalar(x)?, scalar(y)?),
                _ => Err(Error::Parse(format!("expected a coordinate pair, got {v}"))),
            },
            SystemKind::FullShift { .. } | SystemKind::Sft { .. } => {
                let w = v
                    .as_str()
                    .and_then(words::parse_word)
                    .ok_or_else(|| Error::Parse(format!("expected a word, got {v}")))?;
                system.word_point(&w)
            }
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Circle(x) => write!(f, "{}", format_rational(x)),
            Point::Word(w) => write!(f, "({})", words::word_to_string(w)),
            Point::Torus(x, y) => {
                write!(f, "({}, {})", format_rational(x), format_rational(y))
            }
        }
    }
}

/// A cyclic sequence with `d(T x_i, x_{i+1 mod n}) <= eta` for every `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoOrbit {
    pub points: Vec<Point>,
    pub eta: Rational,
    /// Largest jump actually observed, `<= eta`.
    pub max_jump: Rational,
}

impl PseudoOrbit {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// The jumps `d(T x_i, x_{i+1 mod n})`.
pub fn pseudo_orbit_jumps(system: &SystemDescriptor, points: &[Point]) -> Result<Vec<Rational>> {
    let n = points.len();
    (0..n)
        .map(|i| system.distance(&system.apply(&points[i])?, &points[(i + 1) % n]))
        .collect()
}

pub fn validate_pseudo_orbit(
    system: &SystemDescriptor,
    points: Vec<Point>,
    eta: Rational,
) -> Result<PseudoOrbit> {
    if points.is_empty() {
        return Err(Error::InvalidPoint("pseudo-orbit must be nonempty".into()));
    }
    for p in &points {
        system.check_point(p)?;
    }
    let jumps = pseudo_orbit_jumps(system, &points)?;
    if let Some((index, jump)) = jumps.iter().enumerate().find(|(_, j)| **j > eta) {
        return Err(Error::PseudoOrbitViolation {
            index,
            jump: format_rational(jump),
            eta: format_rational(&eta),
        });
    }
    let max_jump = jumps.into_iter().max().expect("nonempty");
    Ok(PseudoOrbit {
        points,
        eta,
        max_jump,
    })
}
