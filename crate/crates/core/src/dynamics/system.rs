use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};

use super::linalg::{HyperbolicSplitting, Mat2};
use super::point::Point;
use super::words::{self, Symbol, Word};
use crate::error::{Error, Result};
use crate::numeric::{
    circle_dist, format_rational, frac, int, inv_pow, rat, rational_upper, to_f64, Rational, Value,
};

/// Which map `T` acts on which space `X`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemKind {
    /// `x ↦ k·x mod 1` on the circle.
    #[serde(rename = "circle")]
    CircleExpanding { k: u32 },
    /// One-sided full shift on `m` symbols.
    FullShift { m: u8 },
    /// One-step subshift of finite type; `transitions[a][b]` allows `ab`.
    Sft { m: u8, transitions: Vec<Vec<u8>> },
    /// Hyperbolic toral automorphism.
    TorusCat { matrix: [[i64; 2]; 2] },
}

/// Hyperbolicity constants `(λ, δ, C, L)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AspConstants {
    pub lambda: f64,
    /// `e^λ` when it is an integer, which makes `e^{-λm}` exact.
    pub expansion: Option<u64>,
    pub delta: Rational,
    pub c: Rational,
    pub l: Rational,
}

impl AspConstants {
    /// `e^{-λ m}`, exact when the expansion rate is an integer.
    pub fn decay(&self, m: u32) -> Value {
        match self.expansion {
            Some(b) => Value::Exact(inv_pow(b, m)),
            None => Value::Approx((-self.lambda * m as f64).exp()),
        }
    }

    /// `e^{-λ α}` as a float.
    pub fn decay_alpha(&self, alpha: f64) -> f64 {
        (-self.lambda * alpha).exp()
    }

    pub fn to_json(&self) -> Json {
        json!({
            "lambda": self.lambda,
            "delta": format_rational(&self.delta),
            "c": format_rational(&self.c),
            "l": format_rational(&self.l),
        })
    }
}

/// A concrete system together with its certified constants.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemDescriptor {
    pub kind: SystemKind,
    pub asp: AspConstants,
    /// `Lip_T = max{1, sup d(Tx,Ty)/d(x,y)}`.
    pub lip: Rational,
}

impl SystemDescriptor {
    pub fn new(kind: SystemKind) -> Result<Self> {
        match &kind {
            SystemKind::CircleExpanding { k } => {
                if *k < 2 {
                    return Err(Error::InvalidSystem(format!("circle map needs k >= 2, got {k}")));
                }
                let k = *k as i64;
                Ok(SystemDescriptor {
                    asp: AspConstants {
                        lambda: (k as f64).ln(),
                        expansion: Some(k as u64),
                        delta: rat(1, 2 * k),
                        c: int(1),
                        l: int(2),
                    },
                    lip: int(k),
                    kind,
                })
            }
            SystemKind::FullShift { m } => {
                if *m < 2 {
                    return Err(Error::InvalidSystem(format!("full shift needs m >= 2, got {m}")));
                }
                Ok(Self::shift_descriptor(kind))
            }
            SystemKind::Sft { m, transitions } => {
                validate_transitions(*m, transitions)?;
                Ok(Self::shift_descriptor(kind))
            }
            SystemKind::TorusCat { matrix } => {
                let a = Mat2(*matrix);
                if a.det().abs() != 1 {
                    return Err(Error::InvalidSystem(format!(
                        "torus matrix must have determinant ±1, got {}",
                        a.det()
                    )));
                }
                if a.trace().abs() <= 2 {
                    return Err(Error::InvalidSystem(format!(
                        "torus matrix must be hyperbolic (|trace| > 2), got trace {}",
                        a.trace()
                    )));
                }
                let split = HyperbolicSplitting::of(&a);
                let lambda = split.expanding.ln();
                let c = rational_upper(split.condition);
                let l = rational_upper(2.0 * to_f64(&c) / (1.0 - (-lambda).exp()));
                let norm = a.inf_norm();
                Ok(SystemDescriptor {
                    asp: AspConstants {
                        lambda,
                        expansion: None,
                        delta: rat(1, 2 * norm),
                        c,
                        l,
                    },
                    lip: int(norm.max(1)),
                    kind,
                })
            }
        }
    }

    fn shift_descriptor(kind: SystemKind) -> Self {
        SystemDescriptor {
            asp: AspConstants {
                lambda: 2f64.ln(),
                expansion: Some(2),
                delta: rat(1, 2),
                c: int(1),
                l: int(1),
            },
            lip: int(2),
            kind,
        }
    }

    pub fn circle(k: u32) -> Self {
        Self::new(SystemKind::CircleExpanding { k }).expect("valid circle map")
    }

    pub fn full_shift(m: u8) -> Self {
        Self::new(SystemKind::FullShift { m }).expect("valid full shift")
    }

    pub fn sft(transitions: Vec<Vec<u8>>) -> Result<Self> {
        let m = transitions.len() as u8;
        Self::new(SystemKind::Sft { m, transitions })
    }

    pub fn torus_cat(matrix: [[i64; 2]; 2]) -> Result<Self> {
        Self::new(SystemKind::TorusCat { matrix })
    }

    pub fn name(&self) -> String {
        match &self.kind {
            SystemKind::CircleExpanding { k } => format!("circle(k={k})"),
            SystemKind::FullShift { m } => format!("full_shift(m={m})"),
            SystemKind::Sft { m, .. } => format!("sft(m={m})"),
            SystemKind::TorusCat { matrix } => format!("torus_cat({matrix:?})"),
        }
    }

    pub fn is_shift(&self) -> bool {
        matches!(self.kind, SystemKind::FullShift { .. } | SystemKind::Sft { .. })
    }

    /// Alphabet size for shifts; digit count `k` for the circle map.
    pub fn alphabet(&self) -> Option<usize> {
        match &self.kind {
            SystemKind::CircleExpanding { k } => Some(*k as usize),
            SystemKind::FullShift { m } | SystemKind::Sft { m, .. } => Some(*m as usize),
            SystemKind::TorusCat { .. } => None,
        }
    }

    pub fn allows(&self, a: Symbol, b: Symbol) -> bool {
        match &self.kind {
            SystemKind::FullShift { m } => a < *m && b < *m,
            SystemKind::Sft { m, transitions } => {
                a < *m && b < *m && transitions[a as usize][b as usize] != 0
            }
            _ => false,
        }
    }

    /// Transition matrix of a shift (all ones for the full shift).
    pub fn transition_matrix(&self) -> Option<Vec<Vec<u8>>> {
        match &self.kind {
            SystemKind::FullShift { m } => Some(vec![vec![1; *m as usize]; *m as usize]),
            SystemKind::Sft { transitions, .. } => Some(transitions.clone()),
            _ => None,
        }
    }

    pub fn is_admissible(&self, w: &[Symbol]) -> bool {
        let m = self.alphabet().unwrap_or(0);
        w.iter().all(|&s| (s as usize) < m) && w.windows(2).all(|p| self.allows(p[0], p[1]))
    }

    pub fn is_cyclically_admissible(&self, w: &[Symbol]) -> bool {
        !w.is_empty() && self.is_admissible(w) && self.allows(w[w.len() - 1], w[0])
    }

    /// Admissible words of length `len`, in lexicographic order.
    pub fn admissible_words(&self, len: usize) -> Vec<Word> {
        let m = self.alphabet().unwrap_or(0) as Symbol;
        let mut out: Vec<Word> = vec![Vec::new()];
        for _ in 0..len {
            let mut next = Vec::new();
            for w in &out {
                for s in 0..m {
                    if w.last().is_none_or(|&l| self.allows(l, s)) {
                        let mut e = w.clone();
                        e.push(s);
                        next.push(e);
                    }
                }
            }
            out = next;
        }
        out
    }

    /// Shift point `w^∞` (reduced to its primitive root), checking admissibility.
    pub fn word_point(&self, w: &[Symbol]) -> Result<Point> {
        if !self.is_shift() {
            return Err(self.mismatch());
        }
        if !self.is_cyclically_admissible(w) {
            return Err(Error::InadmissibleWord {
                word: words::word_to_string(w),
            });
        }
        Ok(Point::Word(words::primitive_root(w)))
    }

    pub fn circle_point(&self, x: Rational) -> Result<Point> {
        if !matches!(self.kind, SystemKind::CircleExpanding { .. }) {
            return Err(self.mismatch());
        }
        Ok(Point::Circle(frac(&x)))
    }

    pub fn torus_point(&self, x: Rational, y: Rational) -> Result<Point> {
        if !matches!(self.kind, SystemKind::TorusCat { .. }) {
            return Err(self.mismatch());
        }
        Ok(Point::Torus(frac(&x), frac(&y)))
    }

    pub(crate) fn mismatch(&self) -> Error {
        Error::KindMismatch { system: self.name() }
    }

    /// Checks that `p` is a canonical point of this system.
    pub fn check_point(&self, p: &Point) -> Result<()> {
        let unit = |r: &Rational| !r.is_negative_or_ge_one();
        match (&self.kind, p) {
            (SystemKind::CircleExpanding { .. }, Point::Circle(x)) if unit(x) => Ok(()),
            (SystemKind::TorusCat { .. }, Point::Torus(x, y)) if unit(x) && unit(y) => Ok(()),
            (SystemKind::FullShift { .. } | SystemKind::Sft { .. }, Point::Word(w)) => {
                if !self.is_cyclically_admissible(w) {
                    Err(Error::InadmissibleWord {
                        word: words::word_to_string(w),
                    })
                } else if !words::is_primitive(w) {
                    Err(Error::InvalidPoint(format!(
                        "word {} is not primitive",
                        words::word_to_string(w)
                    )))
                } else {
                    Ok(())
                }
            }
            (SystemKind::CircleExpanding { .. }, Point::Circle(_))
            | (SystemKind::TorusCat { .. }, Point::Torus(..)) => Err(Error::InvalidPoint(
                "coordinates must lie in [0, 1)".into(),
            )),
            _ => Err(self.mismatch()),
        }
    }

    /// `T(x)`, exactly.
    pub fn apply(&self, p: &Point) -> Result<Point> {
        match (&self.kind, p) {
            (SystemKind::CircleExpanding { k }, Point::Circle(x)) => {
                Ok(Point::Circle(frac(&(x * int(*k as i64)))))
            }
            (SystemKind::FullShift { .. } | SystemKind::Sft { .. }, Point::Word(w)) => {
                Ok(Point::Word(words::rotate(w, 1)))
            }
            (SystemKind::TorusCat { matrix }, Point::Torus(x, y)) => {
                let [[a, b], [c, d]] = *matrix;
                let nx = x * int(a) + y * int(b);
                let ny = x * int(c) + y * int(d);
                Ok(Point::Torus(frac(&nx), frac(&ny)))
            }
            _ => Err(self.mismatch()),
        }
    }

    pub fn iterate(&self, p: &Point, n: usize) -> Result<Point> {
        if let (SystemKind::CircleExpanding { k }, Point::Circle(x)) = (&self.kind, p) {
            let factor = num_traits::pow(BigInt::from(*k), n);
            return Ok(Point::Circle(frac(&(x * Rational::from_integer(factor)))));
        }
        if let Point::Word(w) = p {
            if self.is_shift() {
                return Ok(Point::Word(words::rotate(w, n % w.len().max(1))));
            }
        }
        let mut q = p.clone();
        for _ in 0..n {
            q = self.apply(&q)?;
        }
        Ok(q)
    }

    /// The metric `d`, exact.
    pub fn distance(&self, p: &Point, q: &Point) -> Result<Rational> {
        match (&self.kind, p, q) {
            (SystemKind::CircleExpanding { .. }, Point::Circle(x), Point::Circle(y)) => {
                Ok(circle_dist(x, y))
            }
            (SystemKind::TorusCat { .. }, Point::Torus(x1, y1), Point::Torus(x2, y2)) => {
                Ok(circle_dist(x1, x2).max(circle_dist(y1, y2)))
            }
            (SystemKind::FullShift { .. } | SystemKind::Sft { .. }, Point::Word(u), Point::Word(v)) => {
                Ok(match common_prefix_len(u, v) {
                    None => Rational::zero(),
                    Some(s) => inv_pow(2, s as u32),
                })
            }
            _ => Err(self.mismatch()),
        }
    }

    /// `D(x, y) = min(d(x, y), δ)`.
    pub fn truncated_distance(&self, p: &Point, q: &Point) -> Result<Rational> {
        let d = self.distance(p, q)?;
        Ok(if d >= self.asp.delta {
            self.asp.delta.clone()
        } else {
            d
        })
    }

    /// `d(x, Z)` for a finite set `Z`.
    pub fn distance_to_set(&self, p: &Point, set: &[Point]) -> Result<Rational> {
        let mut best: Option<Rational> = None;
        for z in set {
            let d = self.distance(p, z)?;
            if d.is_zero() {
                return Ok(d);
            }
            if best.as_ref().is_none_or(|b| &d < b) {
                best = Some(d);
            }
        }
        best.ok_or(Error::EmptySet)
    }

    /// Largest possible distance between two points.
    pub fn diameter(&self) -> Rational {
        if self.is_shift() {
            Rational::one()
        } else {
            rat(1, 2)
        }
    }

    pub fn to_json(&self) -> Json {
        let mut v = serde_json::to_value(&self.kind).expect("system kind serializes");
        let obj = v.as_object_mut().expect("tagged enum is an object");
        obj.insert("asp".into(), self.asp.to_json());
        obj.insert("lip".into(), Json::String(format_rational(&self.lip)));
        v
    }

    /// Reads `{"kind": ..}`; any `asp`/`lip` fields are recomputed, not trusted.
    pub fn from_json(v: &Json) -> Result<Self> {
        let mut v = v.clone();
        if let Some(obj) = v.as_object_mut() {
            obj.remove("asp");
            obj.remove("lip");
        }
        let kind: SystemKind =
            serde_json::from_value(v).map_err(|e| Error::Parse(format!("system: {e}")))?;
        Self::new(kind)
    }
}

trait UnitInterval {
    fn is_negative_or_ge_one(&self) -> bool;
}

impl UnitInterval for Rational {
    fn is_negative_or_ge_one(&self) -> bool {
        self < &Rational::zero() || self >= &Rational::one()
    }
}

fn validate_transitions(m: u8, t: &[Vec<u8>]) -> Result<()> {
    let m = m as usize;
    if m < 1 || t.len() != m || t.iter().any(|r| r.len() != m) {
        return Err(Error::InvalidSystem("transition matrix must be m x m".into()));
    }
    if t.iter().flatten().any(|&x| x > 1) {
        return Err(Error::InvalidSystem("transition matrix must be 0/1".into()));
    }
    for i in 0..m {
        if t[i].iter().all(|&x| x == 0) {
            return Err(Error::InvalidSystem(format!("symbol {i} has no successor")));
        }
        if (0..m).all(|r| t[r][i] == 0) {
            return Err(Error::InvalidSystem(format!("symbol {i} has no predecessor")));
        }
    }
    Ok(())
}

/// Length of the longest common prefix of `u^∞` and `v^∞`; `None` if equal.
pub fn common_prefix_len(u: &[Symbol], v: &[Symbol]) -> Option<usize> {
    // Fine–Wilf: agreement on |u| + |v| symbols forces equality.
    let bound = u.len() + v.len();
    (0..bound).find(|&i| u[i % u.len()] != v[i % v.len()])
}
