//! Periodic orbits, orbit averages, and the brute-force minimum ratio.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value as Json};

use crate::dynamics::words::{self, Word};
use crate::dynamics::{Point, SystemDescriptor, SystemKind};
use crate::error::{Error, Result};
use crate::numeric::{format_rational, Rational, Value};
use crate::observables::{Observable, Weight};
use crate::par::Exec;
use crate::subaction::WordGraph;

/// A periodic orbit listed from its canonical (least) point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeriodicOrbit {
    pub period: usize,
    pub representative: Point,
    /// `x, Tx, ..., T^{period-1} x` with `x` the representative.
    pub points: Vec<Point>,
}

impl PeriodicOrbit {
    /// The orbit of a periodic point; fails on preperiodic points.
    pub fn from_point(system: &SystemDescriptor, p: &Point) -> Result<Self> {
        system.check_point(p)?;
        if let Point::Word(w) = p {
            return Ok(Self::of_word(w));
        }
        let mut seen = HashSet::new();
        let mut trail = vec![p.clone()];
        seen.insert(p.clone());
        loop {
            let q = system.apply(trail.last().expect("nonempty"))?;
            if &q == p {
                break;
            }
            if !seen.insert(q.clone()) {
                return Err(Error::InvalidPoint(format!("{p} is not periodic")));
            }
            trail.push(q);
        }
        Ok(Self::from_cycle(trail))
    }

    /// Orbit of `w^∞` for a primitive cyclically admissible word.
    pub fn of_word(w: &[u8]) -> Self {
        let root = words::primitive_root(w);
        let start = words::least_rotation_index(&root);
        let n = root.len();
        let points = (0..n).map(|i| Point::Word(words::rotate(&root, start + i))).collect::<Vec<_>>();
        PeriodicOrbit {
            period: n,
            representative: points[0].clone(),
            points,
        }
    }

    /// Canonicalizes a list `x, Tx, ...` that closes up on itself.
    fn from_cycle(points: Vec<Point>) -> Self {
        let start = (0..points.len())
            .min_by(|&a, &b| points[a].cmp(&points[b]))
            .expect("nonempty orbit");
        let mut points = points;
        points.rotate_left(start);
        PeriodicOrbit {
            period: points.len(),
            representative: points[0].clone(),
            points,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.contains(p)
    }

    pub fn word(&self) -> Option<&[u8]> {
        self.representative.word()
    }

    pub fn to_json(&self) -> Json {
        json!({
            "period": self.period,
            "representative": self.representative.to_json(),
            "points": self.points.iter().map(Point::to_json).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for PeriodicOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.representative {
            Point::Word(_) => write!(f, "{}", self.representative),
            _ => {
                let pts: Vec<String> = self.points.iter().map(|p| p.to_string()).collect();
                write!(f, "{{{}}}", pts.join(", "))
            }
        }
    }
}

/// Largest enumeration depth accepted for a system.
pub fn enumeration_cap(system: &SystemDescriptor) -> usize {
    match (&system.kind, system.alphabet()) {
        (SystemKind::TorusCat { .. }, _) => 12,
        (_, Some(2)) => 20,
        (_, Some(3)) => 12,
        (_, Some(4)) => 10,
        (_, Some(5)) => 8,
        (_, Some(6)) => 7,
        _ => 6,
    }
}

/// All periodic orbits of period `<= n`, sorted by `(period, representative)`.
pub fn enumerate_orbits(system: &SystemDescriptor, n: usize) -> Result<Vec<PeriodicOrbit>> {
    enumerate_orbits_with(system, n, Exec::default())
}

pub fn enumerate_orbits_with(system: &SystemDescriptor, n: usize, exec: Exec) -> Result<Vec<PeriodicOrbit>> {
    let cap = enumeration_cap(system);
    if n == 0 || n > cap {
        return Err(Error::CapExceeded { requested: n, cap });
    }
    let mut orbits = match &system.kind {
        SystemKind::CircleExpanding { k } => {
            let k = *k as usize;
            let lyndon: Vec<Word> = words::lyndon_words(k, n)
                .into_iter()
                .filter(|w| !(w.len() == 1 && w[0] as usize == k - 1))
                .collect();
            exec.map(&lyndon, |w| circle_orbit(k, w))
        }
        SystemKind::FullShift { m } | SystemKind::Sft { m, .. } => {
            let lyndon: Vec<Word> = words::lyndon_words(*m as usize, n)
                .into_iter()
                .filter(|w| system.is_cyclically_admissible(w))
                .collect();
            exec.map(&lyndon, |w| PeriodicOrbit::of_word(w))
        }
        SystemKind::TorusCat { matrix } => {
            let per_period = exec.map_range(n, |i| torus_orbits_of_period(*matrix, i + 1));
            per_period.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect()
        }
    };
    orbits.sort();
    Ok(orbits)
}

/// Orbit of `0.(w)^∞` in base `k`; its points are `val(rot_i w) / (k^n - 1)`.
fn circle_orbit(k: usize, w: &[u8]) -> PeriodicOrbit {
    let n = w.len();
    let base = BigInt::from(k);
    let denom = num_traits::pow(base.clone(), n) - BigInt::one();
    let value = |v: &[u8]| v.iter().fold(BigInt::zero(), |acc, &d| acc * &base + BigInt::from(d));
    let points: Vec<Point> = (0..n)
        .map(|i| Point::Circle(Rational::new(value(&words::rotate(w, i)), denom.clone())))
        .collect();
    PeriodicOrbit::from_cycle(points)
}

/// Orbits of minimal period `n` of `x ↦ Ax mod 1`.
///
/// Solutions of `(A^n - I)x ≡ 0` form the subgroup of `(Z/D)^2 / D`, `D = |det(A^n - I)|`,
/// generated by the columns of `adj(A^n - I)`.
fn torus_orbits_of_period(matrix: [[i64; 2]; 2], n: usize) -> Result<Vec<PeriodicOrbit>> {
    let overflow = || Error::Unsupported(format!("period {n} overflows 128-bit torus arithmetic"));
    let a: [[i128; 2]; 2] = [
        [matrix[0][0] as i128, matrix[0][1] as i128],
        [matrix[1][0] as i128, matrix[1][1] as i128],
    ];
    let mut p = [[1i128, 0], [0, 1]];
    for _ in 0..n {
        let mut q = [[0i128; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                q[i][j] = p[i][0]
                    .checked_mul(a[0][j])
                    .and_then(|x| p[i][1].checked_mul(a[1][j]).and_then(|y| x.checked_add(y)))
                    .ok_or_else(overflow)?;
            }
        }
        p = q;
    }
    let m = [[p[0][0] - 1, p[0][1]], [p[1][0], p[1][1] - 1]];
    let det = m[0][0]
        .checked_mul(m[1][1])
        .and_then(|x| m[0][1].checked_mul(m[1][0]).and_then(|y| x.checked_sub(y)))
        .ok_or_else(overflow)?;
    let d = det.abs();
    let md = |x: i128| x.rem_euclid(d);
    let gens = [(md(m[1][1]), md(-m[1][0])), (md(-m[0][1]), md(m[0][0]))];
    let mut group = HashSet::new();
    let mut queue = VecDeque::from([(0i128, 0i128)]);
    group.insert((0, 0));
    while let Some((x, y)) = queue.pop_front() {
        for (gx, gy) in gens {
            let nxt = (md(x + gx), md(y + gy));
            if group.insert(nxt) {
                queue.push_back(nxt);
            }
        }
    }
    let mut elems: Vec<(i128, i128)> = group.iter().copied().collect();
    elems.sort_unstable();
    let mut visited = HashSet::new();
    let mut out = Vec::new();
    let denom = BigInt::from(d);
    for start in elems {
        if visited.contains(&start) {
            continue;
        }
        let mut cycle = vec![start];
        let mut cur = start;
        loop {
            cur = (md(a[0][0] * cur.0 + a[0][1] * cur.1), md(a[1][0] * cur.0 + a[1][1] * cur.1));
            if cur == start {
                break;
            }
            cycle.push(cur);
        }
        visited.extend(cycle.iter().copied());
        if cycle.len() == n {
            let points = cycle
                .into_iter()
                .map(|(x, y)| {
                    Point::Torus(
                        Rational::new(BigInt::from(x), denom.clone()),
                        Rational::new(BigInt::from(y), denom.clone()),
                    )
                })
                .collect();
            out.push(PeriodicOrbit::from_cycle(points));
        }
    }
    Ok(out)
}

/// `Σ_O u / Σ_O ψ`.
pub fn orbit_ratio_average(
    system: &SystemDescriptor,
    u: &Observable,
    weight: &Weight,
    orbit: &PeriodicOrbit,
) -> Result<Value> {
    let us = u.sum_over(system, &orbit.points)?;
    let ps = weight.psi.sum_over(system, &orbit.points)?;
    Ok(us / ps)
}

/// How a brute-force minimum was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BruteForceMethod {
    /// Every orbit of period `<= n` was evaluated.
    OrbitEnumeration,
    /// Locally constant data beyond the enumeration cap: every simple cycle of
    /// the word graph was evaluated. Closed walks of length `<= n` split into
    /// simple cycles, and ratios of such splits are mediants, so the minimum
    /// is the same; only minimizers that are simple cycles are listed.
    SimpleCycles,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BetaEstimate {
    pub beta: Value,
    /// All minimizers, sorted by `(period, representative)`.
    pub argmin: Vec<PeriodicOrbit>,
    pub depth: usize,
    pub method: BruteForceMethod,
    pub orbits_examined: usize,
}

impl BetaEstimate {
    pub fn to_json(&self) -> Json {
        json!({
            "beta": self.beta.render(),
            "depth": self.depth,
            "method": self.method,
            "orbits_examined": self.orbits_examined,
            "argmin": self.argmin.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Minimum of the orbit ratio average over orbits of period `<= n`.
pub fn beta_bruteforce(
    system: &SystemDescriptor,
    u: &Observable,
    weight: &Weight,
    n: usize,
    exec: Exec,
) -> Result<BetaEstimate> {
    let cap = enumeration_cap(system);
    if n > cap {
        if let (Some(ul), Some(pl)) = (u.as_locally_constant(system), weight.psi.as_locally_constant(system)) {
            return beta_by_simple_cycles(system, &WordGraph::new(system, &ul, &pl)?, n);
        }
    }
    let orbits = enumerate_orbits_with(system, n, exec)?;
    let ratios = exec.try_map(&orbits, |o| orbit_ratio_average(system, u, weight, o))?;
    let examined = orbits.len();
    let (beta, argmin) = select_minimizers(orbits.into_iter().zip(ratios));
    Ok(BetaEstimate {
        beta,
        argmin,
        depth: n,
        method: BruteForceMethod::OrbitEnumeration,
        orbits_examined: examined,
    })
}

fn beta_by_simple_cycles(system: &SystemDescriptor, graph: &WordGraph, n: usize) -> Result<BetaEstimate> {
    let cycles = graph.simple_cycles(n);
    if cycles.is_empty() {
        return Err(Error::NoCycle);
    }
    let examined = cycles.len();
    let scored = cycles.into_iter().map(|c| {
        let (us, ps) = c.iter().fold((Rational::zero(), Rational::zero()), |(a, b), &e| {
            (a + &graph.edges[e].u, b + &graph.edges[e].psi)
        });
        (PeriodicOrbit::of_word(&graph.cycle_word(&c)), Value::Exact(us / ps))
    });
    let (beta, argmin) = select_minimizers(scored);
    debug_assert!(argmin.iter().all(|o| system.check_point(&o.representative).is_ok()));
    Ok(BetaEstimate {
        beta,
        argmin,
        depth: n,
        method: BruteForceMethod::SimpleCycles,
        orbits_examined: examined,
    })
}

/// Minimum and all tied minimizers, canonically sorted; the result does not
/// depend on the input order.
fn select_minimizers(scored: impl Iterator<Item = (PeriodicOrbit, Value)>) -> (Value, Vec<PeriodicOrbit>) {
    let scored: Vec<(PeriodicOrbit, Value)> = scored.collect();
    let best = scored
        .iter()
        .map(|(_, v)| v.clone())
        .reduce(Value::min)
        .expect("at least one orbit");
    let mut argmin: Vec<PeriodicOrbit> = scored
        .into_iter()
        .filter(|(_, v)| v.ties_with(&best))
        .map(|(o, _)| o)
        .collect();
    argmin.sort();
    argmin.dedup();
    (best, argmin)
}

/// The gap `D(O)`: `δ` for fixed points, else the least truncated distance
/// between distinct points of the orbit.
pub fn gap(system: &SystemDescriptor, orbit: &PeriodicOrbit) -> Result<Rational> {
    if orbit.period == 1 {
        return Ok(system.asp.delta.clone());
    }
    let mut best = system.asp.delta.clone();
    for i in 0..orbit.points.len() {
        for j in i + 1..orbit.points.len() {
            let d = system.truncated_distance(&orbit.points[i], &orbit.points[j])?;
            if d < best {
                best = d;
            }
        }
    }
    Ok(best)
}

/// `Σ_{x∈O} d(x, Z)^α`.
pub fn deviation(system: &SystemDescriptor, points: &[Point], z: &[Point], alpha: f64) -> Result<Value> {
    if z.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut total = Value::zero();
    for p in points {
        total = total + Value::Exact(system.distance_to_set(p, z)?).pow_alpha(alpha);
    }
    Ok(total)
}

/// `D(O)^α / d_{α,Z}(O)`, `+∞` when the deviation vanishes.
pub fn gap_deviation_ratio(system: &SystemDescriptor, orbit: &PeriodicOrbit, z: &[Point], alpha: f64) -> Result<Value> {
    let dev = deviation(system, &orbit.points, z, alpha)?;
    if dev.is_zero() {
        return Ok(Value::Approx(f64::INFINITY));
    }
    Ok(Value::Exact(gap(system, orbit)?).pow_alpha(alpha) / dev)
}

/// Topological entropy of a shift: the log of the Perron root of its
/// transition matrix.
///
/// The root is the largest over strongly connected components; on each
/// component `A + I` is primitive, and the Collatz–Wielandt bounds of power
/// iteration bracket its root to relative width `1e-13`.
pub fn sft_entropy(system: &SystemDescriptor) -> Result<f64> {
    let t = system
        .transition_matrix()
        .ok_or_else(|| Error::KindMismatch { system: system.name() })?;
    Ok(perron_root(&t).ln())
}

pub fn perron_root(t: &[Vec<u8>]) -> f64 {
    let mut best = 0.0f64;
    for comp in strongly_connected_components(t) {
        let has_edge = comp.iter().any(|&i| comp.iter().any(|&j| t[i][j] != 0));
        if !has_edge {
            continue;
        }
        let mut x: Vec<f64> = vec![1.0; comp.len()];
        let mut rho = 1.0;
        for _ in 0..1_000_000 {
            let y: Vec<f64> = comp
                .iter()
                .enumerate()
                .map(|(a, &i)| x[a] + comp.iter().enumerate().map(|(b, &j)| t[i][j] as f64 * x[b]).sum::<f64>())
                .collect();
            let ratios = y.iter().zip(&x).map(|(a, b)| a / b);
            let (lo, hi) = ratios.fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
            rho = (lo + hi) / 2.0;
            let norm = y.iter().cloned().fold(0.0, f64::max);
            x = y.into_iter().map(|v| v / norm).collect();
            if hi - lo <= 1e-13 * hi {
                break;
            }
        }
        best = best.max(rho - 1.0);
    }
    best
}

fn strongly_connected_components(t: &[Vec<u8>]) -> Vec<Vec<usize>> {
    let m = t.len();
    let reach = |from: usize, forward: bool| {
        let mut seen = vec![false; m];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(i) = stack.pop() {
            for j in 0..m {
                let edge = if forward { t[i][j] } else { t[j][i] };
                if edge != 0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen
    };
    let mut assigned = vec![false; m];
    let mut comps = Vec::new();
    for i in 0..m {
        if assigned[i] {
            continue;
        }
        let (f, b) = (reach(i, true), reach(i, false));
        let comp: Vec<usize> = (0..m).filter(|&j| f[j] && b[j]).collect();
        for &j in &comp {
            assigned[j] = true;
        }
        comps.push(comp);
    }
    comps
}

/// Length of the shortest directed cycle of a 0/1 transition matrix.
pub fn shortest_cycle_length(t: &[Vec<u8>]) -> Option<usize> {
    let m = t.len();
    let mut best: Option<usize> = None;
    for s in 0..m {
        let mut dist = vec![usize::MAX; m];
        let mut queue = VecDeque::new();
        dist[s] = 0;
        queue.push_back(s);
        while let Some(i) = queue.pop_front() {
            for j in 0..m {
                if t[i][j] == 0 {
                    continue;
                }
                if j == s {
                    let len = dist[i] + 1;
                    best = Some(best.map_or(len, |b| b.min(len)));
                } else if dist[j] == usize::MAX {
                    dist[j] = dist[i] + 1;
                    queue.push_back(j);
                }
            }
        }
    }
    best
}

/// Per-orbit summary used for reports and tables.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitStatistics {
    pub u_sum: Value,
    pub psi_sum: Value,
    pub ratio_average: Value,
    pub gap: Rational,
    pub deviation: Option<Value>,
}

pub fn orbit_statistics(
    system: &SystemDescriptor,
    u: &Observable,
    weight: &Weight,
    orbit: &PeriodicOrbit,
    z: Option<&[Point]>,
    alpha: f64,
) -> Result<OrbitStatistics> {
    let u_sum = u.sum_over(system, &orbit.points)?;
    let psi_sum = weight.psi.sum_over(system, &orbit.points)?;
    Ok(OrbitStatistics {
        ratio_average: &u_sum / &psi_sum,
        u_sum,
        psi_sum,
        gap: gap(system, orbit)?,
        deviation: z.map(|z| deviation(system, &orbit.points, z, alpha)).transpose()?,
    })
}

/// One CSV row per orbit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitRow {
    pub period: usize,
    pub representative: String,
    pub u_sum: String,
    pub psi_sum: String,
    pub ratio: String,
    pub gap: String,
    pub deviation: String,
}

impl OrbitRow {
    pub fn new(orbit: &PeriodicOrbit, stats: &OrbitStatistics) -> Self {
        OrbitRow {
            period: orbit.period,
            representative: orbit.representative.to_string(),
            u_sum: stats.u_sum.render(),
            psi_sum: stats.psi_sum.render(),
            ratio: stats.ratio_average.render(),
            gap: format_rational(&stats.gap),
            deviation: stats.deviation.as_ref().map(Value::render).unwrap_or_default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, rat};
    use crate::observables::{Expr, LocallyConstant};
    use std::collections::BTreeMap;

    fn circle_points(o: &PeriodicOrbit) -> Vec<Rational> {
        o.points
            .iter()
            .map(|p| match p {
                Point::Circle(x) => x.clone(),
                _ => unreachable!(),
            })
            .collect()
    }

    #[test]
    fn circle_orbits_up_to_three() {
        let c = SystemDescriptor::circle(2);
        let orbits = enumerate_orbits(&c, 3).unwrap();
        let got: Vec<Vec<Rational>> = orbits.iter().map(circle_points).collect();
        assert_eq!(
            got,
            vec![
                vec![int(0)],
                vec![rat(1, 3), rat(2, 3)],
                vec![rat(1, 7), rat(2, 7), rat(4, 7)],
                vec![rat(3, 7), rat(6, 7), rat(5, 7)],
            ]
        );
    }

    #[test]
    fn shift_orbits() {
        let s = SystemDescriptor::full_shift(2);
        let names: Vec<String> = enumerate_orbits(&s, 3).unwrap().iter().map(|o| o.to_string()).collect();
        assert_eq!(names, ["(0)", "(1)", "(01)", "(001)", "(011)"]);
        let golden = SystemDescriptor::sft(vec![vec![1, 1], vec![1, 0]]).unwrap();
        let names: Vec<String> = enumerate_orbits(&golden, 2).unwrap().iter().map(|o| o.to_string()).collect();
        assert_eq!(names, ["(0)", "(01)"]);
    }

    #[test]
    fn torus_orbit_counts_match_fixed_point_counts() {
        // |det(A^n - I)| = Σ_{d | n} d · (orbits of minimal period d).
        let t = SystemDescriptor::torus_cat([[2, 1], [1, 1]]).unwrap();
        let orbits = enumerate_orbits(&t, 8).unwrap();
        let lucas = [3i64, 7, 18, 47, 123, 322, 843, 2207];
        for n in 1..=8usize {
            let fixed = lucas[n - 1] - 2;
            let counted: usize = orbits.iter().filter(|o| n % o.period == 0).map(|o| o.period).sum();
            assert_eq!(counted as i64, fixed, "n = {n}");
        }
        for o in &orbits {
            assert_eq!(&t.iterate(&o.representative, o.period).unwrap(), &o.representative);
        }
    }

    #[test]
    fn ratio_average_examples() {
        let c = SystemDescriptor::circle(2);
        let o = PeriodicOrbit::from_point(&c, &Point::Circle(rat(1, 3))).unwrap();
        let x = Observable::ClosedForm(Expr::Var(0));
        let unit = Weight::unit(&c);
        assert_eq!(orbit_ratio_average(&c, &x, &unit, &o).unwrap(), Value::Exact(rat(1, 2)));
        let psi = Weight::new(Observable::ClosedForm(Expr::parse("1 + x").unwrap()), &c, 1.0);
        // 1 + x is not continuous on the circle, but its orbit sums are still defined.
        assert!(psi.is_ok());
        let psi = psi.unwrap();
        assert_eq!(orbit_ratio_average(&c, &x, &psi, &o).unwrap(), Value::Exact(rat(1, 3)));
        assert!(PeriodicOrbit::from_point(&c, &Point::Circle(rat(1, 2))).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let c = SystemDescriptor::circle(2);
        let b = beta_bruteforce(&c, &Observable::ClosedForm(Expr::neg_cos()), &Weight::unit(&c), 10, Exec::default())
            .unwrap();
        assert_eq!(b.beta, Value::Exact(int(-1)));
        assert_eq!(b.argmin.len(), 1);
        assert_eq!(b.argmin[0].representative, Point::Circle(int(0)));

        let s = SystemDescriptor::full_shift(2);
        let t: BTreeMap<Word, Rational> = [("00", 3), ("01", 1), ("10", 1), ("11", 3)]
            .iter()
            .map(|(w, v)| (words::parse_word(w).unwrap(), int(*v)))
            .collect();
        let u = Observable::LocallyConstant(LocallyConstant::new(&s, 2, t).unwrap());
        let b = beta_bruteforce(&s, &u, &Weight::unit(&s), 8, Exec::default()).unwrap();
        assert_eq!(b.beta, Value::Exact(int(1)));
        assert_eq!(b.argmin[0].to_string(), "(01)");
        let psi = Observable::LocallyConstant(LocallyConstant::from_fn(&s, 1, |w| int(w[0] as i64 + 1)));
        let w = Weight::new(psi, &s, 1.0).unwrap();
        let b = beta_bruteforce(&s, &u, &w, 8, Exec::default()).unwrap();
        assert_eq!(b.beta, Value::Exact(rat(2, 3)));
        assert_eq!(b.argmin.len(), 1);
        assert_eq!(b.argmin[0].to_string(), "(01)");
        // Beyond the cap the simple-cycle route gives the same minimum.
        let deep = beta_bruteforce(&s, &u, &w, 40, Exec::default()).unwrap();
        assert_eq!(deep.method, BruteForceMethod::SimpleCycles);
        assert_eq!(deep.beta, b.beta);
        assert_eq!(deep.argmin, b.argmin);
    }

    #[test]
    fn gap_and_deviation_examples() {
        let c = SystemDescriptor::circle(2); // δ = 1/4
        let orbit = |x| PeriodicOrbit::from_point(&c, &Point::Circle(x)).unwrap();
        assert_eq!(gap(&c, &orbit(int(0))).unwrap(), rat(1, 4));
        assert_eq!(gap(&c, &orbit(rat(1, 3))).unwrap(), rat(1, 4));
        assert_eq!(gap(&c, &orbit(rat(1, 7))).unwrap(), rat(1, 7));
        let z = [Point::Circle(int(0))];
        assert_eq!(deviation(&c, &orbit(rat(1, 3)).points, &z, 1.0).unwrap(), Value::Exact(rat(2, 3)));
        assert_eq!(deviation(&c, &orbit(int(0)).points, &z, 1.0).unwrap(), Value::zero());
        let half = [Point::Circle(rat(1, 2))];
        assert_eq!(deviation(&c, &orbit(int(0)).points, &half, 1.0).unwrap(), Value::Exact(rat(1, 2)));
        assert_eq!(deviation(&c, &orbit(int(0)).points, &[], 1.0), Err(Error::EmptySet));
    }

    #[test]
    fn entropy_examples() {
        let ln = |x: f64| x.ln();
        assert!((sft_entropy(&SystemDescriptor::full_shift(2)).unwrap() - ln(2.0)).abs() < 1e-9);
        assert!((sft_entropy(&SystemDescriptor::full_shift(3)).unwrap() - ln(3.0)).abs() < 1e-9);
        let golden = SystemDescriptor::sft(vec![vec![1, 1], vec![1, 0]]).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((sft_entropy(&golden).unwrap() - ln(phi)).abs() < 1e-9);
        // Reducible: a loop feeding a 2-cycle, root 1.
        let cyc = SystemDescriptor::sft(vec![vec![1, 1, 0], vec![0, 0, 1], vec![0, 1, 0]]).unwrap();
        assert!(sft_entropy(&cyc).unwrap().abs() < 1e-9);
        assert!(sft_entropy(&SystemDescriptor::circle(2)).is_err());
        assert_eq!(shortest_cycle_length(&[vec![0, 1], vec![1, 0]]), Some(2));
    }
}
