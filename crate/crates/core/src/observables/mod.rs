//! Hölder observables and positive weights with certified norm bounds.

mod expr;
mod random;

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde_json::{json, Map, Value as Json};

pub use expr::Expr;
pub use random::random_perturbation;

use crate::dynamics::words::{self, Word};
use crate::dynamics::{Point, SystemDescriptor, SystemKind};
use crate::error::{Error, Result};
use crate::numeric::{format_rational, int, parse_rational, rat, to_f64, Rational, Value};

/// Grid resolution used to certify closed-form observables on the circle.
pub const CIRCLE_GRID_LOG2: u32 = 16;
/// Grid resolution per axis on the torus.
pub const TORUS_GRID_LOG2: u32 = 8;

/// A function of the first `depth` symbols of a shift point.
#[derive(Clone, Debug, PartialEq)]
pub struct LocallyConstant {
    pub depth: usize,
    pub table: BTreeMap<Word, Rational>,
}

impl LocallyConstant {
    /// Checks that `table` covers exactly the admissible words of length `depth`.
    pub fn new(system: &SystemDescriptor, depth: usize, table: BTreeMap<Word, Rational>) -> Result<Self> {
        if !system.is_shift() {
            return Err(Error::IncompatibleObservable(format!(
                "locally constant observable on {}",
                system.name()
            )));
        }
        if depth == 0 {
            return Err(Error::IncompatibleObservable("depth must be at least 1".into()));
        }
        let words = system.admissible_words(depth);
        if let Some(w) = words.iter().find(|w| !table.contains_key(*w)) {
            return Err(Error::IncompatibleObservable(format!(
                "table misses admissible word {}",
                words::word_to_string(w)
            )));
        }
        if table.len() != words.len() {
            let extra = table
                .keys()
                .find(|w| w.len() != depth || !system.is_admissible(w))
                .map(|w| words::word_to_string(w))
                .unwrap_or_default();
            return Err(Error::InadmissibleWord { word: extra });
        }
        Ok(LocallyConstant { depth, table })
    }

    pub fn from_fn(system: &SystemDescriptor, depth: usize, mut f: impl FnMut(&[u8]) -> Rational) -> Self {
        let table = system
            .admissible_words(depth)
            .into_iter()
            .map(|w| {
                let v = f(&w);
                (w, v)
            })
            .collect();
        LocallyConstant { depth, table }
    }

    pub fn constant(system: &SystemDescriptor, c: Rational) -> Self {
        Self::from_fn(system, 1, |_| c.clone())
    }

    /// Value at the periodic point `w^∞` shifted by `offset`.
    pub fn at_cyclic(&self, w: &[u8], offset: usize) -> Result<&Rational> {
        let n = w.len();
        let key: Word = (0..self.depth).map(|j| w[(offset + j) % n]).collect();
        self.table.get(&key).ok_or_else(|| Error::InadmissibleWord {
            word: words::word_to_string(&key),
        })
    }

    /// Sum over the orbit of `w^∞`, i.e. over all cyclic windows of `w`.
    pub fn cyclic_sum(&self, w: &[u8]) -> Result<Rational> {
        let mut s = Rational::zero();
        for i in 0..w.len() {
            s += self.at_cyclic(w, i)?;
        }
        Ok(s)
    }

    /// The same function tabulated on longer words.
    pub fn extend(&self, system: &SystemDescriptor, depth: usize) -> LocallyConstant {
        assert!(depth >= self.depth);
        Self::from_fn(system, depth, |w| self.table[&w[..self.depth]].clone())
    }

    /// `(1/K) Σ_{i<K} u∘T^i`, tabulated on words of length `depth + K - 1`.
    pub fn birkhoff(&self, system: &SystemDescriptor, k: usize) -> LocallyConstant {
        assert!(k >= 1);
        if k == 1 {
            return self.clone();
        }
        let r = self.depth;
        let scale = rat(1, k as i64);
        Self::from_fn(system, r + k - 1, |w| {
            let s: Rational = (0..k).map(|i| self.table[&w[i..i + r]].clone()).sum();
            s * &scale
        })
    }

    fn combine(&self, other: &Self, system: &SystemDescriptor, f: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        let d = self.depth.max(other.depth);
        let (a, b) = (self.extend(system, d), other.extend(system, d));
        Self::from_fn(system, d, |w| f(&a.table[w], &b.table[w]))
    }

    fn scaled(&self, c: &Rational) -> Self {
        LocallyConstant {
            depth: self.depth,
            table: self.table.iter().map(|(w, v)| (w.clone(), v * c)).collect(),
        }
    }

    pub fn min(&self) -> &Rational {
        self.table.values().min().expect("nonempty table")
    }

    pub fn max(&self) -> &Rational {
        self.table.values().max().expect("nonempty table")
    }
}

/// A real-valued function on the phase space.
#[derive(Clone, Debug, PartialEq)]
pub enum Observable {
    LocallyConstant(LocallyConstant),
    ClosedForm(Expr),
    /// `epsilon · d(·, orbit)^alpha`.
    DistToOrbitPow {
        orbit: Vec<Point>,
        alpha: f64,
        epsilon: Rational,
    },
    Sum(Vec<Observable>),
    Scale(Rational, Box<Observable>),
    /// `(1/k) Σ_{i<k} inner∘T^i`.
    Birkhoff { inner: Box<Observable>, k: usize },
}

/// Upper bounds for `‖u‖₀` and `[u]_α`, plus the range they come from.
#[derive(Clone, Debug, PartialEq)]
pub struct HolderCertificate {
    pub alpha: f64,
    pub lower: Value,
    pub upper: Value,
    pub sup_norm: Value,
    pub seminorm: Value,
    /// True when the bounds are exact rationals derived without sampling.
    pub exact: bool,
}

impl HolderCertificate {
    /// `‖u‖_α = ‖u‖₀ + [u]_α`.
    pub fn norm(&self) -> Value {
        &self.sup_norm + &self.seminorm
    }

    pub fn to_json(&self) -> Json {
        json!({
            "alpha": self.alpha,
            "lower": self.lower.render(),
            "upper": self.upper.render(),
            "sup_norm": self.sup_norm.render(),
            "seminorm": self.seminorm.render(),
            "exact": self.exact,
        })
    }
}

/// A strictly positive weight `ψ` with a certified lower bound.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    pub psi: Observable,
    pub psi_min: Value,
    pub cert: HolderCertificate,
}

impl Weight {
    pub fn new(psi: Observable, system: &SystemDescriptor, alpha: f64) -> Result<Self> {
        let cert = psi.certificate(system, alpha)?;
        if cert.lower <= Value::zero() {
            return Err(Error::NonPositiveWeight(cert.lower.render()));
        }
        Ok(Weight {
            psi,
            psi_min: cert.lower.clone(),
            cert,
        })
    }

    /// `ψ ≡ 1`.
    pub fn unit(system: &SystemDescriptor) -> Self {
        Self::new(Observable::constant(int(1)), system, 1.0).expect("constant weight")
    }
}

struct Bounds {
    lower: Value,
    upper: Value,
    semi: Value,
    sampled: bool,
}

fn infinite() -> Value {
    Value::Approx(f64::INFINITY)
}

impl Observable {
    pub fn constant(c: Rational) -> Self {
        Observable::ClosedForm(Expr::Const(c))
    }

    pub fn zero() -> Self {
        Self::constant(Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Observable::ClosedForm(Expr::Const(c)) => c.is_zero(),
            Observable::LocallyConstant(lc) => lc.table.values().all(Zero::is_zero),
            Observable::DistToOrbitPow { epsilon, .. } => epsilon.is_zero(),
            Observable::Sum(terms) => terms.iter().all(Observable::is_zero),
            Observable::Scale(c, inner) => c.is_zero() || inner.is_zero(),
            Observable::Birkhoff { inner, .. } => inner.is_zero(),
            Observable::ClosedForm(_) => false,
        }
    }

    pub fn dist_to_orbit(orbit: Vec<Point>, alpha: f64, epsilon: Rational) -> Self {
        Observable::DistToOrbitPow {
            orbit,
            alpha,
            epsilon,
        }
    }

    pub fn evaluate(&self, system: &SystemDescriptor, p: &Point) -> Result<Value> {
        match self {
            Observable::LocallyConstant(lc) => match p {
                Point::Word(w) if system.is_shift() => Ok(Value::Exact(lc.at_cyclic(w, 0)?.clone())),
                _ => Err(incompatible(system, "locally constant")),
            },
            Observable::ClosedForm(e) => match (e.max_var(), p) {
                (None, _) => Ok(e.eval(&[])),
                (Some(0), Point::Circle(x)) => Ok(e.eval(std::slice::from_ref(x))),
                (Some(v), Point::Torus(x, y)) if v <= 1 => Ok(e.eval(&[x.clone(), y.clone()])),
                _ => Err(incompatible(system, "closed-form")),
            },
            Observable::DistToOrbitPow {
                orbit,
                alpha,
                epsilon,
            } => {
                if epsilon.is_zero() {
                    return Ok(Value::zero());
                }
                let d = system.distance_to_set(p, orbit)?;
                Ok(Value::Exact(epsilon.clone()) * Value::Exact(d).pow_alpha(*alpha))
            }
            Observable::Sum(terms) => {
                let mut acc = Value::zero();
                for t in terms {
                    acc = acc + t.evaluate(system, p)?;
                }
                Ok(acc)
            }
            Observable::Scale(c, inner) => Ok(Value::Exact(c.clone()) * inner.evaluate(system, p)?),
            Observable::Birkhoff { inner, k } => {
                let mut acc = Value::zero();
                let mut q = p.clone();
                for i in 0..*k {
                    if i > 0 {
                        q = system.apply(&q)?;
                    }
                    acc = acc + inner.evaluate(system, &q)?;
                }
                Ok(acc * Value::Exact(rat(1, *k as i64)))
            }
        }
    }

    /// Float evaluation at circle or torus coordinates, for grid methods.
    pub fn evaluate_f64(&self, system: &SystemDescriptor, coords: &[f64]) -> Result<f64> {
        let dim = match system.kind {
            SystemKind::CircleExpanding { .. } => 1,
            SystemKind::TorusCat { .. } => 2,
            _ => return Err(incompatible(system, "float-evaluated")),
        };
        match self {
            Observable::LocallyConstant(_) => Err(incompatible(system, "locally constant")),
            Observable::ClosedForm(e) => match e.max_var() {
                Some(v) if v >= dim => Err(incompatible(system, "closed-form")),
                _ => Ok(e.eval_f64(coords)),
            },
            Observable::DistToOrbitPow {
                orbit,
                alpha,
                epsilon,
            } => {
                let circ = |a: f64, b: f64| {
                    let d = (a - b).rem_euclid(1.0);
                    d.min(1.0 - d)
                };
                let d = orbit
                    .iter()
                    .map(|p| match p {
                        Point::Circle(x) => circ(coords[0], to_f64(x)),
                        Point::Torus(x, y) => circ(coords[0], to_f64(x)).max(circ(coords[1], to_f64(y))),
                        Point::Word(_) => f64::NAN,
                    })
                    .fold(f64::INFINITY, f64::min);
                Ok(to_f64(epsilon) * d.powf(*alpha))
            }
            Observable::Sum(terms) => terms.iter().map(|t| t.evaluate_f64(system, coords)).sum(),
            Observable::Scale(c, inner) => Ok(to_f64(c) * inner.evaluate_f64(system, coords)?),
            Observable::Birkhoff { inner, k } => {
                let mut x = coords.to_vec();
                let mut acc = 0.0;
                for i in 0..*k {
                    if i > 0 {
                        x = apply_f64(system, &x);
                    }
                    acc += inner.evaluate_f64(system, &x)?;
                }
                Ok(acc / *k as f64)
            }
        }
    }

    /// Sum of the observable over the listed points.
    pub fn sum_over(&self, system: &SystemDescriptor, points: &[Point]) -> Result<Value> {
        if let (Observable::LocallyConstant(lc), Some(Point::Word(w))) = (self, points.first()) {
            if points.len() == w.len() {
                // Orbit of a primitive word: all cyclic windows.
                return Ok(Value::Exact(lc.cyclic_sum(w)?));
            }
        }
        let mut acc = Value::zero();
        for p in points {
            acc = acc + self.evaluate(system, p)?;
        }
        Ok(acc)
    }

    /// Exact locally constant form on a shift, when one exists.
    pub fn as_locally_constant(&self, system: &SystemDescriptor) -> Option<LocallyConstant> {
        if !system.is_shift() {
            return None;
        }
        match self {
            Observable::LocallyConstant(lc) => Some(lc.clone()),
            Observable::ClosedForm(Expr::Const(c)) => Some(LocallyConstant::constant(system, c.clone())),
            Observable::ClosedForm(_) | Observable::DistToOrbitPow { .. } => None,
            Observable::Sum(terms) => {
                let mut acc = LocallyConstant::constant(system, Rational::zero());
                for t in terms {
                    let lc = t.as_locally_constant(system)?;
                    acc = acc.combine(&lc, system, |a, b| a + b);
                }
                Some(acc)
            }
            Observable::Scale(c, inner) => Some(inner.as_locally_constant(system)?.scaled(c)),
            Observable::Birkhoff { inner, k } => Some(inner.as_locally_constant(system)?.birkhoff(system, *k)),
        }
    }

    /// `u_K = (1/K) Σ_{i<K} u∘T^i`; tabulated exactly for locally constant data.
    pub fn birkhoff_average_k(&self, system: &SystemDescriptor, k: usize) -> Observable {
        assert!(k >= 1, "K must be positive");
        if k == 1 {
            return self.clone();
        }
        match self.as_locally_constant(system) {
            Some(lc) => Observable::LocallyConstant(lc.birkhoff(system, k)),
            None => Observable::Birkhoff {
                inner: Box::new(self.clone()),
                k,
            },
        }
    }

    pub fn certificate(&self, system: &SystemDescriptor, alpha: f64) -> Result<HolderCertificate> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::IncompatibleObservable(format!("alpha = {alpha} outside (0, 1]")));
        }
        let b = self.bounds(system, alpha)?;
        let sup_norm = b.lower.abs().max(b.upper.abs());
        let exact = !b.sampled && sup_norm.is_exact() && b.semi.is_exact();
        Ok(HolderCertificate {
            alpha,
            lower: b.lower,
            upper: b.upper,
            sup_norm,
            seminorm: b.semi,
            exact,
        })
    }

    fn bounds(&self, system: &SystemDescriptor, alpha: f64) -> Result<Bounds> {
        match self {
            Observable::LocallyConstant(lc) => {
                if !system.is_shift() {
                    return Err(incompatible(system, "locally constant"));
                }
                let spread = Value::Exact(lc.max() - lc.min());
                // Points with different depth-r prefixes are at distance >= 2^{1-r}.
                let scale = Value::Exact(int(2).pow(lc.depth as i32)).pow_alpha(alpha);
                Ok(Bounds {
                    lower: Value::Exact(lc.min().clone()),
                    upper: Value::Exact(lc.max().clone()),
                    semi: spread * scale,
                    sampled: false,
                })
            }
            Observable::ClosedForm(e) => closed_form_bounds(e, system, alpha),
            Observable::DistToOrbitPow {
                alpha: own,
                epsilon,
                orbit,
            } => {
                if orbit.is_empty() {
                    return Err(Error::EmptySet);
                }
                let eps = Value::Exact(epsilon.abs());
                let diam = Value::Exact(system.diameter());
                let semi = if *own >= alpha {
                    // |d^a(x,O) - d^a(y,O)| <= d(x,y)^a <= diam^{a-α} d(x,y)^α.
                    if *own == alpha {
                        eps.clone()
                    } else {
                        eps.clone() * Value::Approx(diam.to_f64().powf(own - alpha))
                    }
                } else {
                    infinite()
                };
                let top = eps.clone() * diam.pow_alpha(*own);
                let (lower, upper) = if epsilon.is_negative() {
                    (-top, Value::zero())
                } else {
                    (Value::zero(), top)
                };
                Ok(Bounds {
                    lower,
                    upper,
                    semi,
                    sampled: false,
                })
            }
            Observable::Sum(terms) => {
                let mut acc = Bounds {
                    lower: Value::zero(),
                    upper: Value::zero(),
                    semi: Value::zero(),
                    sampled: false,
                };
                for t in terms {
                    let b = t.bounds(system, alpha)?;
                    acc.lower = acc.lower + b.lower;
                    acc.upper = acc.upper + b.upper;
                    acc.semi = acc.semi + b.semi;
                    acc.sampled |= b.sampled;
                }
                Ok(acc)
            }
            Observable::Scale(c, inner) => {
                let b = inner.bounds(system, alpha)?;
                let cv = Value::Exact(c.clone());
                let (lower, upper) = if c.is_negative() {
                    (&cv * &b.upper, &cv * &b.lower)
                } else {
                    (&cv * &b.lower, &cv * &b.upper)
                };
                Ok(Bounds {
                    lower,
                    upper,
                    semi: cv.abs() * b.semi,
                    sampled: b.sampled,
                })
            }
            Observable::Birkhoff { inner, k } => {
                let b = inner.bounds(system, alpha)?;
                // [u∘T^i]_α <= Lip^{iα} [u]_α.
                let lip = Value::Exact(system.lip.clone()).pow_alpha(alpha);
                let mut factor = Value::zero();
                let mut p = Value::one();
                for _ in 0..*k {
                    factor = factor + p.clone();
                    p = p * lip.clone();
                }
                Ok(Bounds {
                    lower: b.lower,
                    upper: b.upper,
                    semi: b.semi * factor / Value::Exact(int(*k as i64)),
                    sampled: b.sampled,
                })
            }
        }
    }

    pub fn to_json(&self) -> Json {
        match self {
            Observable::LocallyConstant(lc) => {
                let table: Map<String, Json> = lc
                    .table
                    .iter()
                    .map(|(w, v)| (words::word_to_string(w), Json::String(format_rational(v))))
                    .collect();
                json!({"type": "locally_constant", "depth": lc.depth, "table": table})
            }
            Observable::ClosedForm(Expr::Const(c)) => {
                json!({"type": "constant", "value": format_rational(c)})
            }
            Observable::ClosedForm(e) => json!({"type": "closed_form", "expr": e.to_string()}),
            Observable::DistToOrbitPow {
                orbit,
                alpha,
                epsilon,
            } => json!({
                "type": "dist_to_orbit_pow",
                "orbit": orbit.iter().map(Point::to_json).collect::<Vec<_>>(),
                "alpha": alpha,
                "epsilon": format_rational(epsilon),
            }),
            Observable::Sum(terms) => json!({
                "type": "sum",
                "terms": terms.iter().map(Observable::to_json).collect::<Vec<_>>(),
            }),
            Observable::Scale(c, inner) => json!({
                "type": "scale",
                "factor": format_rational(c),
                "inner": inner.to_json(),
            }),
            Observable::Birkhoff { inner, k } => json!({
                "type": "birkhoff",
                "k": k,
                "inner": inner.to_json(),
            }),
        }
    }

    pub fn from_json(v: &Json, system: &SystemDescriptor) -> Result<Observable> {
        let field = |name: &str| {
            v.get(name)
                .ok_or_else(|| Error::Parse(format!("observable: missing field {name:?}")))
        };
        let rational = |j: &Json| -> Result<Rational> {
            match j {
                Json::String(s) => parse_rational(s),
                Json::Number(n) => parse_rational(&n.to_string()),
                _ => Err(Error::Parse(format!("expected a rational, got {j}"))),
            }
        };
        let ty = field("type")?
            .as_str()
            .ok_or_else(|| Error::Parse("observable: \"type\" must be a string".into()))?;
        match ty {
            "locally_constant" => {
                let depth = field("depth")?
                    .as_u64()
                    .ok_or_else(|| Error::Parse("observable: depth must be an integer".into()))?
                    as usize;
                let obj = field("table")?
                    .as_object()
                    .ok_or_else(|| Error::Parse("observable: table must be an object".into()))?;
                let mut table = BTreeMap::new();
                for (k, val) in obj {
                    let w = words::parse_word(k)
                        .ok_or_else(|| Error::Parse(format!("observable: bad table key {k:?}")))?;
                    if w.len() != depth {
                        return Err(Error::Parse(format!("observable: key {k:?} has length != depth {depth}")));
                    }
                    table.insert(w, rational(val)?);
                }
                Ok(Observable::LocallyConstant(LocallyConstant::new(system, depth, table)?))
            }
            "constant" => Ok(Observable::constant(rational(field("value")?)?)),
            "closed_form" => {
                let s = field("expr")?
                    .as_str()
                    .ok_or_else(|| Error::Parse("observable: expr must be a string".into()))?;
                Ok(Observable::ClosedForm(Expr::parse(s)?))
            }
            "dist_to_orbit_pow" => {
                let orbit = field("orbit")?
                    .as_array()
                    .ok_or_else(|| Error::Parse("observable: orbit must be an array".into()))?
                    .iter()
                    .map(|p| Point::from_json(p, system))
                    .collect::<Result<Vec<_>>>()?;
                let alpha = field("alpha")?
                    .as_f64()
                    .ok_or_else(|| Error::Parse("observable: alpha must be a number".into()))?;
                Ok(Observable::dist_to_orbit(orbit, alpha, rational(field("epsilon")?)?))
            }
            "sum" => Ok(Observable::Sum(
                field("terms")?
                    .as_array()
                    .ok_or_else(|| Error::Parse("observable: terms must be an array".into()))?
                    .iter()
                    .map(|t| Observable::from_json(t, system))
                    .collect::<Result<Vec<_>>>()?,
            )),
            "scale" => Ok(Observable::Scale(
                rational(field("factor")?)?,
                Box::new(Observable::from_json(field("inner")?, system)?),
            )),
            "birkhoff" => Ok(Observable::Birkhoff {
                inner: Box::new(Observable::from_json(field("inner")?, system)?),
                k: field("k")?
                    .as_u64()
                    .filter(|&k| k >= 1)
                    .ok_or_else(|| Error::Parse("observable: k must be a positive integer".into()))?
                    as usize,
            }),
            other => Err(Error::Parse(format!("observable: unknown type {other:?}"))),
        }
    }
}

/// `T` in floating point on the circle or torus.
pub fn apply_f64(system: &SystemDescriptor, x: &[f64]) -> Vec<f64> {
    match &system.kind {
        SystemKind::CircleExpanding { k } => vec![(x[0] * *k as f64).rem_euclid(1.0)],
        SystemKind::TorusCat { matrix: [[a, b], [c, d]] } => vec![
            (*a as f64 * x[0] + *b as f64 * x[1]).rem_euclid(1.0),
            (*c as f64 * x[0] + *d as f64 * x[1]).rem_euclid(1.0),
        ],
        _ => x.to_vec(),
    }
}

fn incompatible(system: &SystemDescriptor, what: &str) -> Error {
    Error::IncompatibleObservable(format!("{what} observable on {}", system.name()))
}

fn closed_form_bounds(e: &Expr, system: &SystemDescriptor, alpha: f64) -> Result<Bounds> {
    let (sym_bound, lip) = e.symbolic_bounds();
    let dims = match (&system.kind, e.max_var()) {
        (_, None) => {
            let c = e.eval(&[]);
            return Ok(Bounds {
                lower: c.clone(),
                upper: c,
                semi: Value::zero(),
                sampled: false,
            });
        }
        (SystemKind::CircleExpanding { .. }, Some(0)) => 1,
        (SystemKind::TorusCat { .. }, Some(v)) if v <= 1 => 2,
        _ => return Err(incompatible(system, "closed-form")),
    };
    let log2 = if dims == 1 { CIRCLE_GRID_LOG2 } else { TORUS_GRID_LOG2 };
    let n = 1usize << log2;
    let step = 1.0 / n as f64;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut visit = |v: f64| {
        lo = lo.min(v);
        hi = hi.max(v);
    };
    if dims == 1 {
        for i in 0..n {
            visit(e.eval_f64(&[i as f64 * step]));
        }
    } else {
        for i in 0..n {
            for j in 0..n {
                visit(e.eval_f64(&[i as f64 * step, j as f64 * step]));
            }
        }
    }
    // Every point is within step/2 of a grid node in the max metric; 1e-15 per evaluation.
    let slack = lip * step / 2.0 + 1e-12;
    let lower = (lo - slack).max(-sym_bound);
    let upper = (hi + slack).min(sym_bound);
    let semi = if wraps_continuously(e, dims) {
        // Lipschitz along the shorter arc, so [f]_α <= lip · diam^{1-α}.
        Value::Approx(lip * 0.5f64.powf(1.0 - alpha))
    } else {
        infinite()
    };
    Ok(Bounds {
        lower: Value::Approx(lower),
        upper: Value::Approx(upper),
        semi,
        sampled: true,
    })
}

/// Whether `e` agrees on opposite faces of the unit square, i.e. descends to
/// a continuous function on the circle or torus.
fn wraps_continuously(e: &Expr, dims: usize) -> bool {
    let (zero, one) = (Rational::zero(), int(1));
    let samples: Vec<Rational> = (0..=64).map(|i| rat(i, 64)).collect();
    let agree = |a: Value, b: Value| a.ties_with(&b);
    if dims == 1 {
        return agree(e.eval(std::slice::from_ref(&zero)), e.eval(std::slice::from_ref(&one)));
    }
    samples.iter().all(|s| {
        agree(e.eval(&[zero.clone(), s.clone()]), e.eval(&[one.clone(), s.clone()]))
            && agree(e.eval(&[s.clone(), zero.clone()]), e.eval(&[s.clone(), one.clone()]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn table(entries: &[(&str, Rational)]) -> BTreeMap<Word, Rational> {
        entries
            .iter()
            .map(|(w, v)| (words::parse_word(w).unwrap(), v.clone()))
            .collect()
    }

    fn sample_u(s: &SystemDescriptor) -> Observable {
        let t = table(&[("00", int(3)), ("01", int(1)), ("10", int(1)), ("11", int(3))]);
        Observable::LocallyConstant(LocallyConstant::new(s, 2, t).unwrap())
    }

    #[test]
    fn evaluate_examples() {
        let s = SystemDescriptor::full_shift(2);
        let u = sample_u(&s);
        assert_eq!(u.evaluate(&s, &Point::Word(vec![0, 1])).unwrap(), Value::Exact(int(1)));
        let c = SystemDescriptor::circle(2);
        let d = Observable::dist_to_orbit(vec![Point::Circle(int(0))], 1.0, int(1));
        assert_eq!(d.evaluate(&c, &Point::Circle(rat(1, 3))).unwrap(), Value::Exact(rat(1, 3)));
        let neg_cos = Observable::ClosedForm(Expr::neg_cos());
        assert_eq!(neg_cos.evaluate(&c, &Point::Circle(int(0))).unwrap(), Value::Exact(int(-1)));
        assert!(neg_cos.evaluate(&s, &Point::Word(vec![0])).is_err());
        assert!(u.evaluate(&c, &Point::Circle(int(0))).is_err());
    }

    #[test]
    fn table_must_cover_admissible_words() {
        let golden = SystemDescriptor::sft(vec![vec![1, 1], vec![1, 0]]).unwrap();
        let t = table(&[("00", int(1)), ("01", int(1)), ("10", int(1))]);
        assert!(LocallyConstant::new(&golden, 2, t.clone()).is_ok());
        let mut extra = t.clone();
        extra.insert(vec![1, 1], int(0));
        assert!(LocallyConstant::new(&golden, 2, extra).is_err());
        let mut missing = t;
        missing.remove(&vec![0, 0]);
        assert!(LocallyConstant::new(&golden, 2, missing).is_err());
    }

    #[test]
    fn birkhoff_expansion_example() {
        let s = SystemDescriptor::full_shift(2);
        let u = Observable::LocallyConstant(LocallyConstant::from_fn(&s, 1, |w| int(w[0] as i64)));
        assert_eq!(u.birkhoff_average_k(&s, 1), u);
        let Observable::LocallyConstant(u2) = u.birkhoff_average_k(&s, 2) else {
            panic!("expected a table");
        };
        assert_eq!(
            u2.table,
            table(&[("00", int(0)), ("01", rat(1, 2)), ("10", rat(1, 2)), ("11", int(1))])
        );
    }

    #[test]
    fn birkhoff_preserves_orbit_sums() {
        let s = SystemDescriptor::full_shift(3);
        let u = Observable::LocallyConstant(LocallyConstant::from_fn(&s, 2, |w| {
            rat(w[0] as i64 * 7 - w[1] as i64 * 3, 5)
        }));
        for k in 1..5 {
            let uk = u.birkhoff_average_k(&s, k);
            for w in crate::dynamics::words::lyndon_words(3, 6) {
                let orbit: Vec<Point> = (0..w.len())
                    .map(|i| Point::Word(crate::dynamics::words::rotate(&w, i)))
                    .collect();
                assert_eq!(u.sum_over(&s, &orbit).unwrap(), uk.sum_over(&s, &orbit).unwrap());
            }
        }
    }

    #[test]
    fn generic_birkhoff_matches_tabulated() {
        let c = SystemDescriptor::circle(3);
        let u = Observable::dist_to_orbit(vec![Point::Circle(int(0))], 1.0, int(1));
        let u3 = u.birkhoff_average_k(&c, 3);
        let x = Point::Circle(rat(2, 13));
        let direct: Value = (0..3)
            .map(|i| u.evaluate(&c, &c.iterate(&x, i).unwrap()).unwrap())
            .sum::<Value>()
            / Value::Exact(int(3));
        assert_eq!(u3.evaluate(&c, &x).unwrap(), direct);
    }

    #[test]
    fn certificates() {
        let s = SystemDescriptor::full_shift(2);
        let cert = sample_u(&s).certificate(&s, 1.0).unwrap();
        assert!(cert.exact);
        assert_eq!(cert.sup_norm, Value::Exact(int(3)));
        assert_eq!(cert.seminorm, Value::Exact(int(8)));

        let c = SystemDescriptor::circle(2);
        let cert = Observable::ClosedForm(Expr::neg_cos()).certificate(&c, 1.0).unwrap();
        assert!(!cert.exact);
        assert!(cert.sup_norm.to_f64() >= 1.0 && cert.sup_norm.to_f64() <= 1.0 + 1e-3);
        assert!((cert.seminorm.to_f64() - std::f64::consts::TAU).abs() < 1e-12);

        let x = Observable::ClosedForm(Expr::Var(0));
        assert_eq!(x.certificate(&c, 1.0).unwrap().seminorm.to_f64(), f64::INFINITY);
    }

    #[test]
    fn weights_must_be_positive() {
        let c = SystemDescriptor::circle(2);
        let w = Weight::new(Observable::ClosedForm(Expr::parse("2 + cos2pi(x)").unwrap()), &c, 1.0).unwrap();
        assert!(w.psi_min.to_f64() > 0.99 && w.psi_min.to_f64() <= 1.0);
        assert!(Weight::new(Observable::ClosedForm(Expr::neg_cos()), &c, 1.0).is_err());
        assert_eq!(Weight::unit(&c).psi_min, Value::Exact(int(1)));
    }

    #[test]
    fn json_round_trip() {
        let s = SystemDescriptor::full_shift(2);
        let u = sample_u(&s);
        let j = u.to_json();
        assert_eq!(j["table"]["01"], "1");
        assert_eq!(Observable::from_json(&j, &s).unwrap(), u);
        let c = SystemDescriptor::circle(2);
        let v = Observable::Sum(vec![
            Observable::ClosedForm(Expr::neg_cos()),
            Observable::dist_to_orbit(vec![Point::Circle(int(0))], 1.0, rat(1, 10)),
            Observable::Scale(rat(-1, 2), Box::new(Observable::constant(int(3)))),
        ]);
        assert_eq!(Observable::from_json(&v.to_json(), &c).unwrap(), v);
        assert!(Observable::from_json(&json!({"type": "mystery"}), &c).is_err());
    }
}
