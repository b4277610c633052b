//! Periodic pseudo-orbits shadowed by true periodic orbits, with the tracking
//! error checked exactly against the stored constant `L`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use serde_json::{json, Value as Json};

use crate::dynamics::words::{self, Symbol, Word};
use crate::dynamics::{validate_pseudo_orbit, Point, PseudoOrbit, SystemDescriptor, SystemKind};
use crate::enumeration::PeriodicOrbit;
use crate::error::{Error, Result};
use crate::numeric::{format_rational, frac, int, signed_mod1, Rational, Value};
use crate::par::Exec;

/// A true periodic orbit tracking a pseudo-orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct Shadowing {
    pub orbit: PeriodicOrbit,
    /// The point `x` with `d(x_i, T^i x)` small; `T^n x = x`.
    pub start: Point,
    /// `d(x_i, T^i x)` for each index of the pseudo-orbit.
    pub errors: Vec<Rational>,
    pub max_error: Rational,
    /// `L·η`; `max_error <= bound` always holds on success.
    pub bound: Rational,
    /// Length of the pseudo-orbit; the orbit's period divides it.
    pub pseudo_len: usize,
}

impl Shadowing {
    pub fn to_json(&self) -> Json {
        json!({
            "orbit": self.orbit.to_json(),
            "start": self.start.to_json(),
            "period": self.orbit.period,
            "pseudo_len": self.pseudo_len,
            "errors": self.errors.iter().map(format_rational).collect::<Vec<_>>(),
            "max_error": format_rational(&self.max_error),
            "bound": format_rational(&self.bound),
        })
    }
}

type Vec2 = [Rational; 2];
type Mat = [[Rational; 2]; 2];

fn mat_of(m: &[[i64; 2]; 2]) -> Mat {
    m.map(|r| r.map(int))
}

fn mat_vec(a: &Mat, v: &Vec2) -> Vec2 {
    [
        &a[0][0] * &v[0] + &a[0][1] * &v[1],
        &a[1][0] * &v[0] + &a[1][1] * &v[1],
    ]
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn mat_pow(a: &Mat, n: usize) -> Mat {
    let mut out = [[int(1), int(0)], [int(0), int(1)]];
    for _ in 0..n {
        out = mat_mul(&out, a);
    }
    out
}

/// `a⁻¹ v` by Cramer's rule; `None` for singular `a`.
fn solve(a: &Mat, v: &Vec2) -> Option<Vec2> {
    let det = &a[0][0] * &a[1][1] - &a[0][1] * &a[1][0];
    if det.is_zero() {
        return None;
    }
    Some([
        (&a[1][1] * &v[0] - &a[0][1] * &v[1]) / &det,
        (&a[0][0] * &v[1] - &a[1][0] * &v[0]) / &det,
    ])
}

/// Shadows a periodic pseudo-orbit.
///
/// Circle and torus: writing `x_{i+1} = T x_i + j_i (mod 1)` with signed jumps
/// `j_i`, the correction `e_i` with `T(x_i + e_i) = x_{i+1} + e_{i+1}` obeys
/// `e_{i+1} = A e_i − j_i`, so `(A^n − I) e_0 = Σ A^{n−1−i} j_i`. On the circle
/// this is the fixed point of the composed inverse branches picked out by the
/// pseudo-orbit. Shifts: the orbit of the word of leading symbols.
pub fn shadow(system: &SystemDescriptor, pseudo: &PseudoOrbit) -> Result<Shadowing> {
    if pseudo.eta > system.asp.delta {
        return Err(Error::EtaTooLarge {
            eta: format_rational(&pseudo.eta),
            delta: format_rational(&system.asp.delta),
        });
    }
    let n = pseudo.len();
    if n == 0 {
        return Err(Error::InvalidPoint("pseudo-orbit must be nonempty".into()));
    }
    let start = match &system.kind {
        SystemKind::CircleExpanding { k } => {
            let k = int(*k as i64);
            let mut acc = Rational::zero();
            for i in 0..n {
                let (Point::Circle(x), Point::Circle(y)) = (&pseudo.points[i], &pseudo.points[(i + 1) % n]) else {
                    return Err(system.mismatch());
                };
                acc = &acc * &k + signed_mod1(&(y - &k * x));
            }
            let denom = num_traits::pow(k, n) - Rational::one();
            let Point::Circle(x0) = &pseudo.points[0] else { unreachable!() };
            Point::Circle(frac(&(x0 + acc / denom)))
        }
        SystemKind::TorusCat { matrix } => {
            let a = mat_of(matrix);
            let mut acc: Vec2 = [Rational::zero(), Rational::zero()];
            for i in 0..n {
                let (Point::Torus(x1, x2), Point::Torus(y1, y2)) = (&pseudo.points[i], &pseudo.points[(i + 1) % n])
                else {
                    return Err(system.mismatch());
                };
                let image = mat_vec(&a, &[x1.clone(), x2.clone()]);
                let jump = [signed_mod1(&(y1 - &image[0])), signed_mod1(&(y2 - &image[1]))];
                let grown = mat_vec(&a, &acc);
                acc = [&grown[0] + &jump[0], &grown[1] + &jump[1]];
            }
            let mut lhs = mat_pow(&a, n);
            lhs[0][0] -= int(1);
            lhs[1][1] -= int(1);
            let e0 = solve(&lhs, &acc)
                .ok_or_else(|| Error::ShadowingFailed("A^n − I is singular".into()))?;
            let Point::Torus(x1, x2) = &pseudo.points[0] else { unreachable!() };
            Point::Torus(frac(&(x1 + &e0[0])), frac(&(x2 + &e0[1])))
        }
        SystemKind::FullShift { .. } | SystemKind::Sft { .. } => {
            let lead = pseudo
                .points
                .iter()
                .map(|p| p.word().map(|w| w[0]).ok_or_else(|| system.mismatch()))
                .collect::<Result<Word>>()?;
            system.word_point(&repair(system, lead)?)?
        }
    };

    let mut errors = Vec::with_capacity(n);
    let mut image = start.clone();
    for p in &pseudo.points {
        errors.push(system.distance(p, &image)?);
        image = system.apply(&image)?;
    }
    let max_error = errors.iter().max().cloned().expect("nonempty");
    let bound = &system.asp.l * &pseudo.eta;
    if max_error > bound {
        return Err(Error::TrackingConstantViolated {
            error: format_rational(&max_error),
            bound: format_rational(&bound),
        });
    }
    let orbit = PeriodicOrbit::from_point(system, &start)?;
    if !n.is_multiple_of(orbit.period) {
        return Err(Error::ShadowingFailed(format!(
            "period {} does not divide {n}",
            orbit.period
        )));
    }
    Ok(Shadowing {
        orbit,
        start,
        errors,
        max_error,
        bound,
        pseudo_len: n,
    })
}

/// Replaces symbols that follow an inadmissible transition by the least
/// successor that also admits the next symbol.
fn repair(system: &SystemDescriptor, mut w: Word) -> Result<Word> {
    let n = w.len();
    let m = system.alphabet().expect("shift") as Symbol;
    for i in 0..n {
        let (a, b) = (w[i], w[(i + 1) % n]);
        if system.allows(a, b) {
            continue;
        }
        let after = w[(i + 2) % n];
        let fix = (0..m)
            .find(|&c| system.allows(a, c) && (n == 1 || system.allows(c, after)))
            .ok_or_else(|| {
                Error::ShadowingFailed(format!("no admissible repair after symbol {a} at index {i}"))
            })?;
        w[(i + 1) % n] = fix;
    }
    if !system.is_cyclically_admissible(&w) {
        return Err(Error::InadmissibleWord {
            word: words::word_to_string(&w),
        });
    }
    Ok(w)
}

/// Shadows many pseudo-orbits independently.
pub fn shadow_batch(system: &SystemDescriptor, pseudo: &[PseudoOrbit], exec: Exec) -> Vec<Result<Shadowing>> {
    exec.map(pseudo, |p| shadow(system, p))
}

/// Per-step comparison of the two-sided contraction estimate with the actual
/// distances along two orbit segments.
#[derive(Clone, Debug, PartialEq)]
pub struct Asp1Report {
    pub n: usize,
    /// `d(T^k x, T^k y)` for `0 <= k <= n`.
    pub actual: Vec<Rational>,
    /// `C e^{−λ min(k, n−k)} (d(x, y) + d(T^n x, T^n y))`.
    pub bound: Vec<Value>,
    /// `bound − actual`, nonnegative when the estimate holds.
    pub slack: Vec<Value>,
    pub min_slack: Value,
}

impl Asp1Report {
    pub fn holds(&self) -> bool {
        self.slack.iter().all(|s| s.to_f64() >= 0.0 && !matches!(s, Value::Exact(r) if r < &Rational::zero()))
    }

    pub fn to_json(&self) -> Json {
        json!({
            "n": self.n,
            "actual": self.actual.iter().map(format_rational).collect::<Vec<_>>(),
            "bound": self.bound.iter().map(Value::render).collect::<Vec<_>>(),
            "slack": self.slack.iter().map(Value::render).collect::<Vec<_>>(),
            "min_slack": self.min_slack.render(),
        })
    }
}

/// Checks `d(T^k x, T^k y) <= C e^{−λ min(k, n−k)} (d(x, y) + d(T^n x, T^n y))`
/// for every `0 <= k <= n`, after verifying the orbits stay `δ`-close.
pub fn certify_asp1(system: &SystemDescriptor, x: &Point, y: &Point, n: usize) -> Result<Asp1Report> {
    system.check_point(x)?;
    system.check_point(y)?;
    let mut actual = Vec::with_capacity(n + 1);
    let (mut p, mut q) = (x.clone(), y.clone());
    for step in 0..=n {
        let d = system.distance(&p, &q)?;
        if d > system.asp.delta {
            return Err(Error::AspPrecondition {
                step,
                distance: format_rational(&d),
            });
        }
        actual.push(d);
        p = system.apply(&p)?;
        q = system.apply(&q)?;
    }
    let ends = Value::Exact(&system.asp.c * (&actual[0] + &actual[n]));
    let bound: Vec<Value> = (0..=n)
        .map(|k| ends.clone() * system.asp.decay(k.min(n - k) as u32))
        .collect();
    let slack: Vec<Value> = bound
        .iter()
        .zip(&actual)
        .map(|(b, a)| b.clone() - Value::Exact(a.clone()))
        .collect();
    let min_slack = slack.iter().cloned().reduce(Value::min).expect("n + 1 entries");
    Ok(Asp1Report {
        n,
        actual,
        bound,
        slack,
        min_slack,
    })
}

fn random_closed_walk<R: Rng + ?Sized>(
    system: &SystemDescriptor,
    start: Option<Symbol>,
    len: usize,
    rng: &mut R,
) -> Option<Word> {
    let m = system.alphabet()? as Symbol;
    for _ in 0..1000 {
        let mut w = Vec::with_capacity(len);
        w.push(start.unwrap_or_else(|| rng.gen_range(0..m)));
        while w.len() < len {
            let last = *w.last().expect("nonempty");
            let next: Vec<Symbol> = (0..m).filter(|&c| system.allows(last, c)).collect();
            w.push(next[rng.gen_range(0..next.len())]);
        }
        if system.allows(*w.last().expect("nonempty"), w[0]) {
            return Some(w);
        }
    }
    None
}

/// A random periodic point whose period divides `n`.
pub fn random_periodic_point<R: Rng + ?Sized>(system: &SystemDescriptor, n: usize, rng: &mut R) -> Result<Point> {
    match &system.kind {
        SystemKind::CircleExpanding { k } => {
            let k = *k as i64;
            let mut num = BigInt::zero();
            for _ in 0..n {
                num = num * k + rng.gen_range(0..k);
            }
            let denom = num_traits::pow(BigInt::from(k), n) - 1;
            system.circle_point(Rational::new(num, denom))
        }
        SystemKind::TorusCat { matrix } => {
            let mut lhs = mat_pow(&mat_of(matrix), n);
            lhs[0][0] -= int(1);
            lhs[1][1] -= int(1);
            let m = [int(rng.gen_range(0..1000)), int(rng.gen_range(0..1000))];
            let x = solve(&lhs, &m).ok_or_else(|| Error::ShadowingFailed("A^n − I is singular".into()))?;
            system.torus_point(x[0].clone(), x[1].clone())
        }
        SystemKind::FullShift { .. } | SystemKind::Sft { .. } => {
            let w = random_closed_walk(system, None, n, rng).ok_or(Error::NoCycle)?;
            system.word_point(&w)
        }
    }
}

/// A random periodic `η`-pseudo-orbit of length `n`, built by perturbing a
/// random true orbit of period dividing `n`. On shifts `η` is rounded down to
/// a power of two, at most `1/4`.
pub fn random_pseudo_orbit<R: Rng + ?Sized>(
    system: &SystemDescriptor,
    n: usize,
    eta: &Rational,
    rng: &mut R,
) -> Result<PseudoOrbit> {
    let x = random_periodic_point(system, n, rng)?;
    let mut orbit = Vec::with_capacity(n);
    let mut p = x.clone();
    for _ in 0..n {
        orbit.push(p.clone());
        p = system.apply(&p)?;
    }
    match &system.kind {
        SystemKind::CircleExpanding { .. } | SystemKind::TorusCat { .. } => {
            // Moving each point by at most η/(Lip_T + 1) keeps every jump below η.
            let radius = eta / (&system.lip + int(1));
            let mut nudge = || &radius * Rational::new(BigInt::from(rng.gen_range(-1000i64..=1000)), BigInt::from(1000));
            let points = orbit
                .into_iter()
                .map(|p| match p {
                    Point::Circle(x) => Point::Circle(frac(&(x + nudge()))),
                    Point::Torus(x, y) => Point::Torus(frac(&(x + nudge())), frac(&(y + nudge()))),
                    Point::Word(_) => unreachable!(),
                })
                .collect();
            validate_pseudo_orbit(system, points, eta.clone())
        }
        SystemKind::FullShift { .. } | SystemKind::Sft { .. } => {
            // η = 2^{-s}: each point follows its orbit point for `reps·n >= s + 1`
            // symbols and then takes a random closed detour.
            let mut s = 2u32;
            while crate::numeric::inv_pow(2, s) > *eta {
                s += 1;
            }
            let Point::Word(root) = &x else { unreachable!() };
            let cycle: Word = root.iter().cycle().take(n).copied().collect();
            let reps = (s as usize + 1).div_ceil(n).max(1);
            let mut points = Vec::with_capacity(n);
            for i in 0..n {
                let head = words::rotate(&cycle, i);
                let mut w: Word = head.iter().cycle().take(reps * n).copied().collect();
                if let Some(tail) = random_closed_walk(system, Some(head[0]), rng.gen_range(1..=4), rng) {
                    w.extend(tail);
                }
                points.push(system.word_point(&w)?);
            }
            validate_pseudo_orbit(system, points, crate::numeric::inv_pow(2, s))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn circle_pseudo(points: &[Rational], eta: Rational) -> (SystemDescriptor, PseudoOrbit) {
        let c = SystemDescriptor::circle(2);
        let pts = points.iter().map(|x| Point::Circle(x.clone())).collect();
        let p = validate_pseudo_orbit(&c, pts, eta).unwrap();
        (c, p)
    }

    #[test]
    fn true_orbit_shadows_itself() {
        let (c, p) = circle_pseudo(&[rat(1, 7), rat(2, 7), rat(4, 7)], int(0));
        let s = shadow(&c, &p).unwrap();
        assert_eq!(s.start, Point::Circle(rat(1, 7)));
        assert!(s.max_error.is_zero());
        assert_eq!(s.orbit.period, 3);
    }

    #[test]
    fn perturbed_two_cycle_on_circle() {
        let eta = rat(1, 100);
        let (c, p) = circle_pseudo(&[rat(1, 3) + &eta, rat(2, 3) + &eta], eta.clone());
        let s = shadow(&c, &p).unwrap();
        assert_eq!(s.start, Point::Circle(rat(1, 3)));
        assert_eq!(s.max_error, eta);
        assert!(s.max_error <= &eta * int(2));
    }

    #[test]
    fn shift_leading_symbols() {
        let s = SystemDescriptor::full_shift(2);
        let pts = vec![
            s.word_point(&[0, 1, 0, 1, 0, 0]).unwrap(),
            s.word_point(&[1, 0, 1, 0, 1, 1]).unwrap(),
        ];
        let p = validate_pseudo_orbit(&s, pts, rat(1, 16)).unwrap();
        let sh = shadow(&s, &p).unwrap();
        assert_eq!(sh.orbit, PeriodicOrbit::of_word(&[0, 1]));
        assert!(sh.max_error <= rat(1, 16));
    }

    #[test]
    fn eta_above_delta_is_rejected() {
        let (c, p) = circle_pseudo(&[rat(0, 1)], rat(1, 2));
        assert!(matches!(shadow(&c, &p), Err(Error::EtaTooLarge { .. })));
    }

    #[test]
    fn random_instances_respect_the_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let systems = [
            SystemDescriptor::circle(2),
            SystemDescriptor::circle(3),
            SystemDescriptor::full_shift(2),
            SystemDescriptor::sft(vec![vec![1, 1], vec![1, 0]]).unwrap(),
            SystemDescriptor::torus_cat([[2, 1], [1, 1]]).unwrap(),
        ];
        for sys in &systems {
            let eta = &sys.asp.delta / int(4);
            for n in 1..=8 {
                let p = random_pseudo_orbit(sys, n, &eta, &mut rng).unwrap();
                let s = shadow(sys, &p).unwrap();
                assert_eq!(n % s.orbit.period, 0);
                // Shadowing the result again reproduces it.
                let again = validate_pseudo_orbit(sys, s.orbit.points.clone(), int(0)).unwrap();
                assert_eq!(shadow(sys, &again).unwrap().orbit, s.orbit);
            }
        }
    }

    #[test]
    fn asp1_on_the_doubling_map() {
        let c = SystemDescriptor::circle(2);
        for n in 1..10 {
            let y = Point::Circle(crate::numeric::inv_pow(2, n as u32 + 2));
            let r = certify_asp1(&c, &Point::Circle(int(0)), &y, n).unwrap();
            assert!(r.holds());
            // At the far end the bound exceeds the actual distance by exactly d(x, y).
            assert_eq!(r.slack[n], Value::Exact(r.actual[0].clone()));
        }
        let r = certify_asp1(&c, &Point::Circle(rat(1, 5)), &Point::Circle(rat(1, 5)), 4).unwrap();
        assert!(r.actual.iter().all(Zero::is_zero));
        assert!(matches!(
            certify_asp1(&c, &Point::Circle(int(0)), &Point::Circle(rat(1, 8)), 3),
            Err(Error::AspPrecondition { step: 2, .. })
        ));
    }
}
