//! Periodic orbits whose gap dominates their deviation from a reference set:
//! a short-cycle seed in the coded language of the set, then repeated
//! splitting at closest returns followed by shadowing.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};

use crate::dynamics::{validate_pseudo_orbit, Point, PseudoOrbit, SystemDescriptor, SystemKind};
use crate::enumeration::{
    deviation, enumerate_orbits_with, enumeration_cap, gap, gap_deviation_ratio, perron_root, PeriodicOrbit,
};
use crate::error::{Error, Result};
use crate::numeric::{format_rational, int, to_f64, Rational, Value};
use crate::par::Exec;
use crate::shadowing::{shadow, Shadowing};

/// The forward closure `Z ∪ T(Z) ∪ ...` of a finite set, sorted.
pub fn forward_closure(system: &SystemDescriptor, z: &[Point]) -> Result<Vec<Point>> {
    if z.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut seen: BTreeSet<Point> = BTreeSet::new();
    for p in z {
        system.check_point(p)?;
        let mut q = p.clone();
        while seen.insert(q.clone()) {
            q = system.apply(&q)?;
        }
    }
    Ok(seen.into_iter().collect())
}

/// Cell of a finite partition with cells of diameter at most `δ`: leading
/// symbols on shifts, base-`k²` digits on the circle, a square grid of side
/// `1/⌈1/δ⌉` on the torus.
fn cell(system: &SystemDescriptor, p: &Point) -> Result<u64> {
    let floor_scaled = |x: &Rational, q: i64| -> u64 {
        (x * int(q)).floor().to_integer().try_into().expect("cell index fits")
    };
    match (&system.kind, p) {
        (SystemKind::FullShift { .. } | SystemKind::Sft { .. }, Point::Word(w)) => Ok(w[0] as u64),
        (SystemKind::CircleExpanding { k }, Point::Circle(x)) => Ok(floor_scaled(x, (*k as i64).pow(2))),
        (SystemKind::TorusCat { .. }, Point::Torus(x, y)) => {
            let q = (Rational::from_integer(1.into()) / &system.asp.delta).ceil().to_integer();
            let q: i64 = q.try_into().expect("grid size fits");
            Ok(floor_scaled(x, q) * q as u64 + floor_scaled(y, q))
        }
        _ => Err(Error::KindMismatch { system: system.name() }),
    }
}

fn coding(system: &SystemDescriptor, p: &Point, len: usize) -> Result<Vec<u64>> {
    let mut out = Vec::with_capacity(len);
    let mut q = p.clone();
    for _ in 0..len {
        out.push(cell(system, &q)?);
        q = system.apply(&q)?;
    }
    Ok(out)
}

/// Seed orbit built from a shortest cycle of the block graph of `Z`'s coding.
#[derive(Clone, Debug, PartialEq)]
pub struct BqSeed {
    pub n: usize,
    /// Number of length-`n` code blocks seen in `Z` (the alphabet of the block graph).
    pub block_count: usize,
    /// Length of the shortest cycle of the block graph.
    pub cycle_len: usize,
    /// Entropy of the block graph.
    pub block_entropy: f64,
    /// `1 + M e^{1 − h}` for the block graph.
    pub cycle_len_bound: f64,
    pub pseudo: PseudoOrbit,
    /// `2δ C e^{−λ(⌊n/2⌋ − 1)}`, the a priori bound on the pseudo-orbit's jumps.
    pub jump_bound: Value,
    pub shadowing: Shadowing,
    pub deviation: Value,
    /// `d_{α,Z}(pseudo) + n p (L η)^α` with the observed jump `η`.
    pub deviation_bound: Value,
    /// `n p (2δCL)^α e^{−λα(⌊n/2⌋ − 1)}`.
    pub a_priori_bound: Value,
}

impl BqSeed {
    pub fn orbit(&self) -> &PeriodicOrbit {
        &self.shadowing.orbit
    }

    pub fn to_json(&self) -> Json {
        json!({
            "n": self.n,
            "block_count": self.block_count,
            "cycle_len": self.cycle_len,
            "block_entropy": self.block_entropy,
            "cycle_len_bound": self.cycle_len_bound,
            "pseudo_len": self.pseudo.len(),
            "eta": format_rational(&self.pseudo.eta),
            "jump_bound": self.jump_bound.render(),
            "orbit": self.shadowing.orbit.to_json(),
            "deviation": self.deviation.render(),
            "deviation_bound": self.deviation_bound.render(),
            "a_priori_bound": self.a_priori_bound.render(),
        })
    }
}

/// Shortest cycle of a graph on `0..m`, returned as its node sequence,
/// starting from the least node that lies on a shortest cycle.
fn shortest_cycle(out: &[Vec<usize>]) -> Option<Vec<usize>> {
    let m = out.len();
    let mut best: Option<Vec<usize>> = None;
    for s in 0..m {
        let mut parent = vec![usize::MAX; m];
        let mut dist = vec![usize::MAX; m];
        let mut queue = VecDeque::from([s]);
        dist[s] = 0;
        let mut closing = None;
        'bfs: while let Some(i) = queue.pop_front() {
            for &j in &out[i] {
                if j == s {
                    closing = Some(i);
                    break 'bfs;
                }
                if dist[j] == usize::MAX {
                    dist[j] = dist[i] + 1;
                    parent[j] = i;
                    queue.push_back(j);
                }
            }
        }
        if let Some(mut i) = closing {
            let mut cycle = vec![i];
            while i != s {
                i = parent[i];
                cycle.push(i);
            }
            cycle.reverse();
            if best.as_ref().is_none_or(|b| cycle.len() < b.len()) {
                best = Some(cycle);
            }
        }
    }
    best
}

/// Builds the block graph of `Z` at length `n`, lifts its shortest cycle to a
/// periodic pseudo-orbit inside `Z`, and shadows it.
pub fn bq_seed(system: &SystemDescriptor, z: &[Point], n: usize, alpha: f64) -> Result<BqSeed> {
    if n < 2 {
        return Err(Error::InvalidPoint(format!("block length must be at least 2, got {n}")));
    }
    let z = forward_closure(system, z)?;
    // Each point's first 2n codes; the first point (in sorted order) carrying a
    // given 2n-block is its representative.
    let mut pairs: BTreeMap<Vec<u64>, &Point> = BTreeMap::new();
    for p in &z {
        pairs.entry(coding(system, p, 2 * n)?).or_insert(p);
    }
    let blocks: Vec<Vec<u64>> = pairs
        .keys()
        .map(|c| c[..n].to_vec())
        .chain(pairs.keys().map(|c| c[n..].to_vec()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: BTreeMap<&[u64], usize> = blocks.iter().enumerate().map(|(i, b)| (b.as_slice(), i)).collect();
    let m = blocks.len();
    let mut out = vec![Vec::new(); m];
    let mut matrix = vec![vec![0u8; m]; m];
    for c in pairs.keys() {
        let (a, b) = (index[&c[..n]], index[&c[n..]]);
        if matrix[a][b] == 0 {
            matrix[a][b] = 1;
            out[a].push(b);
        }
    }
    let cycle = shortest_cycle(&out).ok_or(Error::NoCycle)?;
    let p = cycle.len();
    let entropy = perron_root(&matrix).max(f64::MIN_POSITIVE).ln();

    let half = n / 2;
    let mut points = Vec::with_capacity(n * p);
    for i in 0..p {
        let key: Vec<u64> = [blocks[cycle[i]].clone(), blocks[cycle[(i + 1) % p]].clone()].concat();
        let x = pairs[&key];
        let mut q = system.iterate(x, half)?;
        for _ in 0..n {
            points.push(q.clone());
            q = system.apply(&q)?;
        }
    }
    let jumps = crate::dynamics::pseudo_orbit_jumps(system, &points)?;
    let eta = jumps.into_iter().max().expect("nonempty");
    let pseudo = validate_pseudo_orbit(system, points, eta.clone())?;
    let shadowing = shadow(system, &pseudo)?;

    let asp = &system.asp;
    let decay = asp.decay(half.saturating_sub(1) as u32);
    let jump_bound = Value::Exact(int(2) * &asp.delta * &asp.c) * decay.clone();
    let np = int((n * p) as i64);
    let deviation_bound = deviation(system, &pseudo.points, &z, alpha)?
        + Value::Exact(np.clone()) * Value::Exact(&asp.l * &eta).pow_alpha(alpha);
    let a_priori_bound = Value::Exact(np)
        * Value::Exact(int(2) * &asp.delta * &asp.c * &asp.l).pow_alpha(alpha)
        * decay.pow_alpha(alpha);
    Ok(BqSeed {
        n,
        block_count: m,
        cycle_len: p,
        block_entropy: entropy,
        cycle_len_bound: 1.0 + m as f64 * (1.0 - entropy).exp(),
        deviation: deviation(system, &shadowing.orbit.points, &z, alpha)?,
        pseudo,
        jump_bound,
        shadowing,
        deviation_bound,
        a_priori_bound,
    })
}

/// Shortest cycle of a 0/1 transition matrix against `1 + M e^{1 − h}`.
pub fn short_cycle_bound(transitions: &[Vec<u8>]) -> Option<(usize, f64)> {
    let len = crate::enumeration::shortest_cycle_length(transitions)?;
    let h = perron_root(transitions).ln();
    Some((len, 1.0 + transitions.len() as f64 * (1.0 - h).exp()))
}

/// The displayed sufficient conditions for the splitting loop to stay within
/// the shadowing radius, evaluated in log space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Feasibility {
    pub n: usize,
    pub k: u32,
    /// `1 + 2(2CL)^α/(1 − e^{−λα}) · L̂`, the per-split growth factor.
    pub growth: f64,
    /// `ln` of `L̂ L̃₁ n^{−k + log₂ L̃₁}`, `L^α L̂ L̃₁ n^{−k + log₂ L̃₁}` and
    /// `L̃₁ n^{−k + log₂ L̃₁ + 1}`, each required below `α ln δ`.
    pub log_lhs: [f64; 3],
    pub log_rhs: f64,
    /// Seed deviation `< n^{−k}`, when a seed is known.
    pub seed_ok: Option<bool>,
    pub passed: bool,
}

pub fn feasibility(system: &SystemDescriptor, alpha: f64, l_hat: f64, n: usize, k: u32) -> Feasibility {
    let asp = &system.asp;
    let cl = 2.0 * to_f64(&asp.c) * to_f64(&asp.l);
    let growth = 1.0 + 2.0 * cl.powf(alpha) / (1.0 - asp.decay_alpha(alpha)) * l_hat;
    let ln_n = (n as f64).ln();
    let power = (-(k as f64) + growth.log2()) * ln_n;
    let log_lhs = [
        l_hat.ln() + growth.ln() + power,
        alpha * to_f64(&asp.l).ln() + l_hat.ln() + growth.ln() + power,
        growth.ln() + power + ln_n,
    ];
    let log_rhs = alpha * to_f64(&asp.delta).ln();
    Feasibility {
        n,
        k,
        growth,
        passed: log_lhs.iter().all(|&x| x < log_rhs),
        log_lhs,
        log_rhs,
        seed_ok: None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageAction {
    /// The seed, not yet good enough.
    Seed,
    /// Produced by splitting the previous orbit and shadowing a segment.
    #[serde(rename = "split+shadow")]
    SplitShadow,
    /// Ratio above target or deviation zero.
    Accept,
    /// A fixed point below target; nothing left to split.
    Exhausted,
}

/// Where an orbit was cut and what the shadowing step promised.
#[derive(Clone, Debug, PartialEq)]
pub struct Split {
    pub y: Point,
    pub lag: usize,
    pub distance: Rational,
    pub segment_len: usize,
    /// `d(prev) + 2(2CL)^α/(1 − e^{−λα}) · distance^α`.
    pub growth_bound: f64,
    /// Whether `L · distance <= δ`, the regime in which the growth bound is proved.
    pub in_regime: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stage {
    pub orbit: PeriodicOrbit,
    pub gap: Rational,
    pub deviation: Value,
    pub ratio: Value,
    pub action: StageAction,
    /// The split that produced this stage, if any.
    pub split: Option<Split>,
}

impl Stage {
    fn to_json(&self) -> Json {
        json!({
            "orbit": self.orbit.to_string(),
            "period": self.orbit.period,
            "gap": format_rational(&self.gap),
            "deviation": self.deviation.render(),
            "ratio": self.ratio.render(),
            "action": self.action,
            "split": self.split.as_ref().map(|s| json!({
                "y": s.y.to_json(),
                "lag": s.lag,
                "distance": format_rational(&s.distance),
                "segment_len": s.segment_len,
                "growth_bound": s.growth_bound,
                "in_regime": s.in_regime,
            })),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionTrace {
    pub stages: Vec<Stage>,
    pub l_hat: f64,
    pub alpha: f64,
    pub feasibility: Feasibility,
    pub seed: Option<BqSeed>,
    pub achieved: bool,
    /// `D^α/d_{α,Z}` of the final orbit, recomputed from scratch.
    pub recomputed_ratio: Value,
}

impl ConstructionTrace {
    pub fn final_orbit(&self) -> &PeriodicOrbit {
        &self.stages.last().expect("at least the seed").orbit
    }

    pub fn achieved_ratio(&self) -> &Value {
        &self.stages.last().expect("at least the seed").ratio
    }

    /// `⌊log₂ n₀⌋ + 1` for the seed period `n₀`.
    pub fn stage_limit(&self) -> usize {
        self.stages[0].orbit.period.ilog2() as usize + 1
    }

    pub fn to_json(&self) -> Json {
        json!({
            "l_hat": self.l_hat,
            "alpha": self.alpha,
            "feasibility": self.feasibility,
            "seed": self.seed.as_ref().map(BqSeed::to_json),
            "stages": self.stages.iter().map(Stage::to_json).collect::<Vec<_>>(),
            "final": self.final_orbit().to_json(),
            "achieved": self.achieved,
            "achieved_ratio": self.achieved_ratio().render(),
            "recomputed_ratio": self.recomputed_ratio.render(),
            "stage_limit": self.stage_limit(),
        })
    }

    /// Fixed-width table of the stages.
    pub fn table(&self) -> String {
        let mut s = format!("{:>5}  {:>6}  {:>14}  {:>14}  {:>14}  {}\n", "stage", "period", "gap", "deviation", "ratio", "action");
        for (i, st) in self.stages.iter().enumerate() {
            let action = serde_json::to_value(st.action).expect("serializes");
            s += &format!(
                "{:>5}  {:>6}  {:>14.6e}  {:>14.6e}  {:>14.6e}  {}\n",
                i,
                st.orbit.period,
                to_f64(&st.gap),
                st.deviation.to_f64(),
                st.ratio.to_f64(),
                action.as_str().unwrap_or_default()
            );
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionOptions {
    pub seed_k: u32,
    /// Abort when the feasibility precheck fails instead of recording it.
    pub strict: bool,
}

impl Default for ConstructionOptions {
    fn default() -> Self {
        ConstructionOptions { seed_k: 3, strict: false }
    }
}

/// Minimal `d(y, T^lag y)` over the orbit; ties go to the least `y`, then the least lag.
fn closest_return(system: &SystemDescriptor, orbit: &PeriodicOrbit) -> Result<(usize, usize, Rational)> {
    let n = orbit.period;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| orbit.points[a].cmp(&orbit.points[b]));
    let mut best: Option<(usize, usize, Rational)> = None;
    for &a in &order {
        for lag in 1..n {
            let d = system.distance(&orbit.points[a], &orbit.points[(a + lag) % n])?;
            if best.as_ref().is_none_or(|(_, _, b)| &d < b) {
                best = Some((a, lag, d));
            }
        }
    }
    best.ok_or_else(|| Error::ConstructionStalled("fixed points cannot be split".into()))
}

fn stage(system: &SystemDescriptor, orbit: PeriodicOrbit, z: &[Point], alpha: f64, action: StageAction) -> Result<Stage> {
    Ok(Stage {
        gap: gap(system, &orbit)?,
        deviation: deviation(system, &orbit.points, z, alpha)?,
        ratio: gap_deviation_ratio(system, &orbit, z, alpha)?,
        orbit,
        action,
        split: None,
    })
}

/// Splits `seed` at closest returns until `D^α/d_{α,Z} > L̂`, the deviation
/// vanishes, or a fixed point is reached.
pub fn construct_good_orbit(
    system: &SystemDescriptor,
    z: &[Point],
    alpha: f64,
    l_hat: f64,
    seed: &PeriodicOrbit,
    opts: &ConstructionOptions,
) -> Result<ConstructionTrace> {
    if !(l_hat > 0.0) {
        return Err(Error::InvalidPoint(format!("target ratio must be positive, got {l_hat}")));
    }
    let z = forward_closure(system, z)?;
    let mut feas = feasibility(system, alpha, l_hat, seed.period.max(2), opts.seed_k);
    let first = stage(system, seed.clone(), &z, alpha, StageAction::Seed)?;
    feas.seed_ok = Some(first.deviation.to_f64() < (seed.period as f64).powi(-(opts.seed_k as i32)));
    feas.passed &= feas.seed_ok == Some(true);
    if opts.strict && !feas.passed {
        return Err(Error::Infeasible(format!(
            "seed too small: n = {}, k = {} fail the splitting conditions",
            feas.n, feas.k
        )));
    }
    let asp = &system.asp;
    let spread = 2.0 * (2.0 * to_f64(&asp.c) * to_f64(&asp.l)).powf(alpha) / (1.0 - asp.decay_alpha(alpha));
    let mut stages = vec![first];
    loop {
        let cur = stages.last_mut().expect("nonempty");
        let good = cur.deviation.is_zero() || cur.ratio.to_f64() > l_hat;
        if good {
            cur.action = StageAction::Accept;
            break;
        }
        if cur.orbit.period == 1 {
            cur.action = StageAction::Exhausted;
            break;
        }
        let (a, lag, distance) = closest_return(system, &cur.orbit)?;
        // No return within the shadowing radius: nothing left to split.
        if distance > asp.delta {
            cur.action = StageAction::Exhausted;
            break;
        }
        let n = cur.orbit.period;
        let (start, len) = if lag <= n - lag { (a, lag) } else { ((a + lag) % n, n - lag) };
        let segment: Vec<Point> = (0..len).map(|i| cur.orbit.points[(start + i) % n].clone()).collect();
        let pseudo = validate_pseudo_orbit(system, segment, distance.clone())?;
        let shadowed = shadow(system, &pseudo)?;
        let split = Split {
            y: cur.orbit.points[a].clone(),
            lag,
            segment_len: len,
            growth_bound: cur.deviation.to_f64() + spread * to_f64(&distance).powf(alpha),
            in_regime: &asp.l * &distance <= asp.delta,
            distance,
        };
        let mut next = stage(system, shadowed.orbit, &z, alpha, StageAction::SplitShadow)?;
        next.split = Some(split);
        stages.push(next);
    }
    let last = stages.last().expect("nonempty");
    let recomputed_ratio = gap_deviation_ratio(system, &last.orbit, &z, alpha)?;
    Ok(ConstructionTrace {
        achieved: last.action == StageAction::Accept,
        stages,
        l_hat,
        alpha,
        feasibility: feas,
        seed: None,
        recomputed_ratio,
    })
}

/// Seeds from [`bq_seed`] at `seed_n`, doubling `n` while the feasibility
/// precheck fails and `n` stays within the enumeration cap, then runs the
/// splitting loop from the last seed tried.
pub fn construct_with_bq_seed(
    system: &SystemDescriptor,
    z: &[Point],
    alpha: f64,
    l_hat: f64,
    seed_n: usize,
    opts: &ConstructionOptions,
) -> Result<ConstructionTrace> {
    let cap = enumeration_cap(system).max(seed_n);
    let mut n = seed_n;
    loop {
        let seed = bq_seed(system, z, n, alpha)?;
        let relaxed = ConstructionOptions { strict: false, ..opts.clone() };
        let mut trace = construct_good_orbit(system, z, alpha, l_hat, seed.orbit(), &relaxed)?;
        trace.seed = Some(seed);
        if trace.feasibility.passed || 2 * n > cap {
            if opts.strict && !trace.feasibility.passed {
                return Err(Error::Infeasible(format!(
                    "seed too small: no n in [{seed_n}, {n}] with k = {} passes the splitting conditions",
                    opts.seed_k
                )));
            }
            return Ok(trace);
        }
        n *= 2;
    }
}

/// One row of the decay scan: `a_n = n^k min_{O ∈ O^n} d_{α,Z}(O)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub n: usize,
    pub min_deviation: String,
    pub a_n: String,
    pub argmin: String,
    /// The same minimum over orbits not contained in `Z`.
    pub min_deviation_outside: String,
    pub a_n_outside: String,
    pub argmin_outside: String,
}

/// `a_n` for `n` in `range`, with a companion column that ignores orbits inside `Z`.
pub fn bq_scan(
    system: &SystemDescriptor,
    z: &[Point],
    alpha: f64,
    k: u32,
    range: std::ops::RangeInclusive<usize>,
    exec: Exec,
) -> Result<Vec<ScanRow>> {
    let z = forward_closure(system, z)?;
    let in_z: HashSet<&Point> = z.iter().collect();
    let top = *range.end();
    let orbits = enumerate_orbits_with(system, top, exec)?;
    let devs = exec.try_map(&orbits, |o| deviation(system, &o.points, &z, alpha))?;
    let mut rows = Vec::new();
    for n in range {
        let scale = Value::Exact(int((n as i64).pow(k)));
        let pick = |outside: bool| {
            orbits
                .iter()
                .zip(&devs)
                .filter(|(o, _)| o.period <= n && !(outside && o.points.iter().all(|p| in_z.contains(p))))
                .min_by(|a, b| a.1.partial_cmp(b.1).expect("comparable").then(a.0.cmp(b.0)))
        };
        let render = |m: Option<(&PeriodicOrbit, &Value)>| match m {
            Some((o, d)) => (d.render(), (scale.clone() * d.clone()).render(), o.to_string()),
            None => (String::new(), String::new(), String::new()),
        };
        let (min_deviation, a_n, argmin) = render(pick(false));
        let (min_deviation_outside, a_n_outside, argmin_outside) = render(pick(true));
        rows.push(ScanRow {
            n,
            min_deviation,
            a_n,
            argmin,
            min_deviation_outside,
            a_n_outside,
            argmin_outside,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    #[test]
    fn periodic_reference_set_reproduces_itself() {
        let s = SystemDescriptor::full_shift(2);
        let z = PeriodicOrbit::of_word(&[0, 0, 1]).points;
        for n in 3..8 {
            let seed = bq_seed(&s, &z, n, 1.0).unwrap();
            assert_eq!(seed.orbit(), &PeriodicOrbit::of_word(&[0, 0, 1]));
            assert!(seed.deviation.is_zero());
        }
        let c = SystemDescriptor::circle(2);
        let seed = bq_seed(&c, &[Point::Circle(rat(1, 3))], 4, 1.0).unwrap();
        assert_eq!(seed.orbit().points, vec![Point::Circle(rat(1, 3)), Point::Circle(rat(2, 3))]);
    }

    #[test]
    fn two_fixed_points_and_a_connection() {
        // Periodic stand-ins for heteroclinic words: 0^a 1^b cycles.
        let s = SystemDescriptor::full_shift(2);
        let mut z = vec![Point::Word(vec![0]), Point::Word(vec![1])];
        z.extend(PeriodicOrbit::of_word(&[0, 0, 0, 0, 0, 1, 1, 1, 1, 1]).points);
        let seed = bq_seed(&s, &z, 4, 1.0).unwrap();
        assert!(seed.deviation <= seed.deviation_bound);
        assert!(Value::Exact(seed.pseudo.eta.clone()) <= seed.jump_bound);
        assert!((seed.cycle_len as f64) <= seed.cycle_len_bound + 1e-9);
    }

    #[test]
    fn fixed_point_seed_is_accepted_at_once() {
        let c = SystemDescriptor::circle(2);
        let zero = Point::Circle(rat(0, 1));
        let seed = PeriodicOrbit::from_point(&c, &zero).unwrap();
        let trace = construct_good_orbit(&c, &[zero], 1.0, 1000.0, &seed, &Default::default()).unwrap();
        assert_eq!(trace.stages.len(), 1);
        assert!(trace.achieved);
        assert_eq!(trace.achieved_ratio().to_f64(), f64::INFINITY);
    }

    #[test]
    fn circle_orbit_collapses_onto_zero() {
        let c = SystemDescriptor::circle(2);
        let zero = Point::Circle(rat(0, 1));
        let seed = PeriodicOrbit::from_point(&c, &Point::Circle(rat(1, 1023))).unwrap();
        let trace = construct_good_orbit(&c, std::slice::from_ref(&zero), 1.0, 1000.0, &seed, &Default::default()).unwrap();
        assert!(trace.achieved);
        assert!(trace.stages.len() <= trace.stage_limit());
        for w in trace.stages.windows(2) {
            assert!(2 * w[1].orbit.period <= w[0].orbit.period);
        }
        assert_eq!(trace.final_orbit().representative, zero);
    }

    #[test]
    fn shift_seed_splits_to_a_fixed_point() {
        let s = SystemDescriptor::full_shift(2);
        let z = PeriodicOrbit::of_word(&[0, 1]).points;
        let seed = PeriodicOrbit::of_word(&[0, 0, 1, 1]);
        let trace = construct_good_orbit(&s, &z, 1.0, 100.0, &seed, &Default::default()).unwrap();
        let split = trace.stages[1].split.as_ref().unwrap();
        assert_eq!((split.lag, split.distance.clone()), (1, rat(1, 2)));
        assert_eq!(trace.final_orbit(), &PeriodicOrbit::of_word(&[0]));
        assert_eq!(trace.stages.last().unwrap().action, StageAction::Exhausted);
        assert!(!trace.achieved);
    }

    #[test]
    fn feasibility_fails_at_desk_scale_and_passes_eventually() {
        let c = SystemDescriptor::circle(2);
        assert!(!feasibility(&c, 1.0, 10.0, 20, 3).passed);
        assert!(feasibility(&c, 1.0, 10.0, 1 << 20, 40).passed);
    }

    #[test]
    fn scan_literal_and_outside_columns() {
        let s = SystemDescriptor::full_shift(2);
        let z = PeriodicOrbit::of_word(&[0, 1]).points;
        let rows = bq_scan(&s, &z, 1.0, 2, 2..=6, Exec::Sequential).unwrap();
        assert_eq!(rows[0].a_n, "0");
        assert!(rows.iter().all(|r| r.argmin_outside != "(01)"));
        assert_eq!(rows[0].min_deviation_outside, "1/2");
    }
}
