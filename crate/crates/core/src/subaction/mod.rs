//! Sub-actions: `v` with `ū = u_K − v∘T^K + v − β ψ_K ≥ 0`.
//!
//! Locally constant data on shifts is handled exactly on the word graph; the
//! circle map uses a min-plus fixed-point iteration on a grid.

mod graph;
mod lax_oleinik;

use num_traits::{Signed, Zero};
use serde_json::{json, Value as Json};

pub use graph::{Edge, WordGraph};
pub use lax_oleinik::{lax_oleinik_subaction, subaction_with_ladder, GridFunction, LaxOleinikOptions};

use crate::dynamics::words::{self, Word};
use crate::dynamics::{Point, SystemDescriptor, SystemKind};
use crate::enumeration::{beta_bruteforce, PeriodicOrbit};
use crate::error::{Error, Result};
use crate::numeric::{format_rational, Rational, Value};
use crate::observables::{HolderCertificate, LocallyConstant, Observable, Weight};
use crate::par::Exec;

#[derive(Clone, Debug, PartialEq)]
pub struct MinCycleRatio {
    pub beta: Rational,
    pub witness: PeriodicOrbit,
    /// Parametric rounds until no cycle beat the current ratio.
    pub rounds: usize,
}

/// Exact minimum of `Σu / Σψ` over cycles of the word graph.
///
/// Each round runs Bellman–Ford on `u − tψ`; a negative cycle has ratio
/// strictly below `t` and becomes the next `t`. There are finitely many
/// simple cycles, so the ratio strictly decreases to the minimum.
pub fn min_cycle_ratio(system: &SystemDescriptor, u: &Observable, weight: &Weight) -> Result<MinCycleRatio> {
    let (ul, pl) = locally_constant_pair(system, u, &weight.psi)?;
    let g = WordGraph::new(system, &ul, &pl)?;
    let (beta, cycle, rounds) = min_cycle_ratio_graph(&g)?;
    Ok(MinCycleRatio {
        beta,
        witness: PeriodicOrbit::of_word(&g.cycle_word(&cycle)),
        rounds,
    })
}

fn locally_constant_pair(
    system: &SystemDescriptor,
    u: &Observable,
    psi: &Observable,
) -> Result<(LocallyConstant, LocallyConstant)> {
    match (u.as_locally_constant(system), psi.as_locally_constant(system)) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::Unsupported(format!(
            "exact sub-actions need locally constant u and psi on a shift, got {}",
            system.name()
        ))),
    }
}

fn cycle_ratio(g: &WordGraph, cycle: &[usize]) -> Rational {
    let (us, ps) = cycle.iter().fold((Rational::zero(), Rational::zero()), |(a, b), &e| {
        (a + &g.edges[e].u, b + &g.edges[e].psi)
    });
    us / ps
}

pub fn min_cycle_ratio_graph(g: &WordGraph) -> Result<(Rational, Vec<usize>, usize)> {
    let mut cycle = any_cycle(g).ok_or(Error::NoCycle)?;
    let mut t = cycle_ratio(g, &cycle);
    let mut rounds = 0;
    loop {
        rounds += 1;
        let costs: Vec<Rational> = g.edges.iter().map(|e| &e.u - &t * &e.psi).collect();
        match negative_cycle(g, &costs) {
            None => return Ok((t, cycle, rounds)),
            Some(c) => {
                let next = cycle_ratio(g, &c);
                debug_assert!(next < t);
                t = next;
                cycle = c;
            }
        }
    }
}

/// Follows first out-edges until a node repeats.
fn any_cycle(g: &WordGraph) -> Option<Vec<usize>> {
    let mut first_visit = vec![usize::MAX; g.nodes.len()];
    let mut walk = Vec::new();
    let mut at = 0;
    loop {
        if first_visit[at] != usize::MAX {
            return Some(walk[first_visit[at]..].to_vec());
        }
        first_visit[at] = walk.len();
        let &e = g.out[at].first()?;
        walk.push(e);
        at = g.edges[e].tgt;
    }
}

/// Shortest distances from a virtual source joined to every node by a
/// zero-cost edge, or `Err(cycle)` with a negative cycle.
fn bellman_ford(g: &WordGraph, costs: &[Rational]) -> std::result::Result<Vec<Rational>, Vec<usize>> {
    let n = g.nodes.len();
    let mut dist = vec![Rational::zero(); n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut last_relaxed = None;
    for _ in 0..n {
        last_relaxed = None;
        for (ei, e) in g.edges.iter().enumerate() {
            let cand = &dist[e.src] + &costs[ei];
            if cand < dist[e.tgt] {
                dist[e.tgt] = cand;
                pred[e.tgt] = Some(ei);
                last_relaxed = Some(e.tgt);
            }
        }
        if last_relaxed.is_none() {
            return Ok(dist);
        }
    }
    // Still relaxing after n rounds: walking back n predecessors lands on a cycle.
    let mut at = last_relaxed.expect("relaxed in the last round");
    for _ in 0..n {
        at = g.edges[pred[at].expect("relaxed node has a predecessor")].src;
    }
    let start = at;
    let mut cycle = Vec::new();
    loop {
        let e = pred[at].expect("cycle node has a predecessor");
        cycle.push(e);
        at = g.edges[e].src;
        if at == start {
            break;
        }
    }
    cycle.reverse();
    Err(cycle)
}

fn negative_cycle(g: &WordGraph, costs: &[Rational]) -> Option<Vec<usize>> {
    bellman_ford(g, costs).err()
}

/// The sub-action, either tabulated on words or sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub enum SubAction {
    Table(LocallyConstant),
    Grid(GridFunction),
}

/// Where `ū` vanishes.
#[derive(Clone, Debug, PartialEq)]
pub enum ZeroSet {
    /// Cylinders `[w]` on which `ū = 0` exactly.
    Cylinders(Vec<Word>),
    /// Grid points with `ū < tolerance`.
    Grid { points: Vec<Rational>, tolerance: f64 },
}

impl ZeroSet {
    pub fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (ZeroSet::Cylinders(ws), Point::Word(w)) => ws.iter().any(|c| {
                (0..c.len()).all(|i| c[i] == w[i % w.len()])
            }),
            (ZeroSet::Grid { points, .. }, Point::Circle(x)) => points.contains(x),
            _ => false,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ZeroSet::Cylinders(ws) => ws.len(),
            ZeroSet::Grid { points, .. } => points.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubActionCertificate {
    pub beta: Value,
    pub k: usize,
    pub v: SubAction,
    /// `u_K` and `ψ_K` the certificate was computed for.
    pub u_k: Observable,
    pub psi_k: Observable,
    /// `ū` as an exact table (word-graph path only).
    pub ubar: Option<LocallyConstant>,
    pub ubar_min: Value,
    pub zero_set: ZeroSet,
    pub witness: Option<PeriodicOrbit>,
    /// Grid path: `Mv − v` at the fixed point, zero when `β` is exact.
    pub additive_constant: f64,
    pub residual: f64,
    pub iterations: usize,
}

impl SubActionCertificate {
    pub fn is_exact(&self) -> bool {
        matches!(self.v, SubAction::Table(_))
    }

    /// `v(x)`.
    pub fn v_at(&self, p: &Point) -> Result<Value> {
        match (&self.v, p) {
            (SubAction::Table(t), Point::Word(w)) => Ok(Value::Exact(t.at_cyclic(w, 0)?.clone())),
            (SubAction::Grid(g), Point::Circle(x)) => Ok(Value::Approx(g.at(crate::numeric::to_f64(x)))),
            _ => Err(Error::IncompatibleObservable("sub-action evaluated at a foreign point".into())),
        }
    }

    /// `ū(x) = u_K(x) − v(T^K x) + v(x) − β ψ_K(x)`.
    pub fn ubar_at(&self, system: &SystemDescriptor, p: &Point) -> Result<Value> {
        let image = system.iterate(p, self.k)?;
        Ok(self.u_k.evaluate(system, p)? - &self.beta * &self.psi_k.evaluate(system, p)? + self.v_at(p)?
            - self.v_at(&image)?)
    }

    /// Certified bounds for `‖ū‖₀` and `[ū]_α`.
    pub fn ubar_certificate(&self, system: &SystemDescriptor, alpha: f64) -> Result<HolderCertificate> {
        match (&self.ubar, &self.v) {
            (Some(t), _) => Observable::LocallyConstant(t.clone()).certificate(system, alpha),
            (None, SubAction::Grid(g)) => lax_oleinik::grid_ubar_certificate(self, g, system, alpha),
            _ => Err(Error::Unsupported("sub-action without a reduced table".into())),
        }
    }

    pub fn to_json(&self) -> Json {
        let v = match &self.v {
            SubAction::Table(t) => json!({
                "kind": "table",
                "depth": t.depth,
                "values": t.table.iter()
                    .map(|(w, x)| (words::word_to_string(w), Json::String(format_rational(x))))
                    .collect::<serde_json::Map<_, _>>(),
            }),
            SubAction::Grid(g) => json!({
                "kind": "grid",
                "size": g.values.len(),
                "lipschitz": g.lipschitz(),
            }),
        };
        let zero_set = match &self.zero_set {
            ZeroSet::Cylinders(ws) => json!({
                "kind": "cylinders",
                "words": ws.iter().map(|w| words::word_to_string(w)).collect::<Vec<_>>(),
            }),
            ZeroSet::Grid { points, tolerance } => json!({
                "kind": "grid",
                "tolerance": tolerance,
                "points": points.iter().map(format_rational).collect::<Vec<_>>(),
            }),
        };
        json!({
            "beta": self.beta.render(),
            "k": self.k,
            "v": v,
            "ubar": self.ubar.as_ref().map(|t| Observable::LocallyConstant(t.clone()).to_json()),
            "ubar_min": self.ubar_min.render(),
            "zero_set": zero_set,
            "witness": self.witness.as_ref().map(|o| o.to_string()),
            "additive_constant": self.additive_constant,
            "residual": self.residual,
            "iterations": self.iterations,
        })
    }
}

/// Exact sub-action on the word graph (`K = 1`).
///
/// `v` is the shortest-path potential of the reduced costs `u − βψ` from a
/// virtual source, normalized to vanish on the first node of the witness
/// cycle. Then `ū(e) = c(e) + v(src) − v(tgt) ≥ 0` on every edge.
pub fn bellman_subaction(
    system: &SystemDescriptor,
    u: &Observable,
    weight: &Weight,
    beta: &Rational,
) -> Result<SubActionCertificate> {
    let (ul, pl) = locally_constant_pair(system, u, &weight.psi)?;
    let g = WordGraph::new(system, &ul, &pl)?;
    let costs: Vec<Rational> = g.edges.iter().map(|e| &e.u - beta * &e.psi).collect();
    let dist = bellman_ford(&g, &costs).map_err(|_| Error::NegativeReducedCycle {
        beta: format_rational(beta),
    })?;
    // A zero-cost cycle exists iff beta is the minimum; find one among tight edges.
    let tight: Vec<bool> = g
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| &costs[i] + &dist[e.src] - &dist[e.tgt] == Rational::zero())
        .collect();
    let witness_cycle = tight_cycle(&g, &tight).ok_or_else(|| Error::BetaNotAttained {
        beta: format_rational(beta),
    })?;
    let anchor = dist[g.edges[witness_cycle[0]].src].clone();
    let v = LocallyConstant {
        depth: g.span,
        table: g.nodes.iter().cloned().zip(dist.iter().map(|d| d - &anchor)).collect(),
    };
    let ubar = LocallyConstant {
        depth: g.span + 1,
        table: g
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.word.clone(), &costs[i] + &v.table[&g.nodes[e.src]] - &v.table[&g.nodes[e.tgt]]))
            .collect(),
    };
    let zero_set = ZeroSet::Cylinders(
        ubar.table
            .iter()
            .filter(|(_, x)| x.is_zero())
            .map(|(w, _)| w.clone())
            .collect(),
    );
    Ok(SubActionCertificate {
        beta: Value::Exact(beta.clone()),
        k: 1,
        u_k: Observable::LocallyConstant(ul),
        psi_k: Observable::LocallyConstant(pl),
        ubar_min: Value::Exact(ubar.min().clone()),
        ubar: Some(ubar),
        v: SubAction::Table(v),
        zero_set,
        witness: Some(PeriodicOrbit::of_word(&g.cycle_word(&witness_cycle))),
        additive_constant: 0.0,
        residual: 0.0,
        iterations: 0,
    })
}

/// A cycle using only tight edges, if any.
fn tight_cycle(g: &WordGraph, tight: &[bool]) -> Option<Vec<usize>> {
    let n = g.nodes.len();
    // 0 = unvisited, 1 = on stack, 2 = done.
    let mut state = vec![0u8; n];
    let mut via: Vec<Option<usize>> = vec![None; n];
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        state[root] = 1;
        while let Some(&mut (at, ref mut next)) = stack.last_mut() {
            let out = &g.out[at];
            if *next == out.len() {
                state[at] = 2;
                stack.pop();
                continue;
            }
            let e = out[*next];
            *next += 1;
            if !tight[e] {
                continue;
            }
            let t = g.edges[e].tgt;
            match state[t] {
                0 => {
                    state[t] = 1;
                    via[t] = Some(e);
                    stack.push((t, 0));
                }
                1 => {
                    let mut cycle = vec![e];
                    let mut cur = at;
                    while cur != t {
                        let pe = via[cur].expect("stack node has an entry edge");
                        cycle.push(pe);
                        cur = g.edges[pe].src;
                    }
                    cycle.reverse();
                    return Some(cycle);
                }
                _ => {}
            }
        }
    }
    None
}

/// Certificate for any supported system: exact on shifts with locally
/// constant data, grid iteration on the circle with `β` from brute force at
/// depth `n`.
pub fn certify(
    system: &SystemDescriptor,
    u: &Observable,
    weight: &Weight,
    n: usize,
    exec: Exec,
) -> Result<SubActionCertificate> {
    match &system.kind {
        SystemKind::FullShift { .. } | SystemKind::Sft { .. } => {
            let mcr = min_cycle_ratio(system, u, weight)?;
            bellman_subaction(system, u, weight, &mcr.beta)
        }
        SystemKind::CircleExpanding { .. } => {
            let beta = beta_bruteforce(system, u, weight, n, exec)?.beta;
            subaction_with_ladder(system, u, weight, &beta, &LaxOleinikOptions::default())
        }
        SystemKind::TorusCat { .. } => Err(Error::Unsupported(
            "sub-actions are computed for shifts and circle maps".into(),
        )),
    }
}

/// Outcome of re-checking a certificate against brute force.
#[derive(Clone, Debug, PartialEq)]
pub struct CertificateCheck {
    pub nonnegative: bool,
    pub argmin_in_zero_set: bool,
    pub beta_agrees: bool,
    pub ubar_min: Value,
    pub beta_bruteforce: Value,
    pub argmin: Vec<PeriodicOrbit>,
    pub failures: Vec<String>,
}

impl CertificateCheck {
    pub fn passed(&self) -> bool {
        self.nonnegative && self.argmin_in_zero_set && self.beta_agrees
    }

    pub fn to_json(&self) -> Json {
        json!({
            "passed": self.passed(),
            "nonnegative": self.nonnegative,
            "argmin_in_zero_set": self.argmin_in_zero_set,
            "beta_agrees": self.beta_agrees,
            "ubar_min": self.ubar_min.render(),
            "beta_bruteforce": self.beta_bruteforce.render(),
            "argmin": self.argmin.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
            "failures": self.failures,
        })
    }
}

/// Recomputes `ū` from `v` and the supplied `u`, `ψ` (nothing stored in the
/// certificate besides `β`, `K` and `v` is trusted) and checks it against
/// brute force at depth `n`.
pub fn verify_certificate(
    cert: &SubActionCertificate,
    system: &SystemDescriptor,
    u: &Observable,
    weight: &Weight,
    n: usize,
    exec: Exec,
) -> Result<CertificateCheck> {
    let fresh = SubActionCertificate {
        u_k: u.birkhoff_average_k(system, cert.k),
        psi_k: weight.psi.birkhoff_average_k(system, cert.k),
        ..cert.clone()
    };
    let mut failures = Vec::new();
    let (ubar_min, zero_tol) = match &fresh.v {
        SubAction::Table(v) => {
            let (ul, pl) = locally_constant_pair(system, &fresh.u_k, &fresh.psi_k)?;
            let g = WordGraph::new(system, &ul, &pl)?;
            if v.depth != g.span {
                return Err(Error::IncompatibleObservable(format!(
                    "sub-action depth {} does not match graph span {}",
                    v.depth, g.span
                )));
            }
            let beta = fresh.beta.as_exact().cloned().ok_or_else(|| {
                Error::Unsupported("exact certificate with approximate beta".into())
            })?;
            let mut min: Option<Rational> = None;
            for e in &g.edges {
                let val = &e.u - &beta * &e.psi + &v.table[&g.nodes[e.src]] - &v.table[&g.nodes[e.tgt]];
                if val.is_negative() {
                    failures.push(format!("ubar({}) = {} < 0", words::word_to_string(&e.word), format_rational(&val)));
                }
                if min.as_ref().is_none_or(|m| &val < m) {
                    min = Some(val);
                }
            }
            (Value::Exact(min.expect("graph has edges")), 0.0)
        }
        SubAction::Grid(g) => {
            let opts = LaxOleinikOptions::default();
            let m = lax_oleinik::grid_ubar_min(&fresh, g, system)?;
            if m < -opts.nonneg_tol {
                failures.push(format!("min ubar on grid = {m:e} < -{:e}", opts.nonneg_tol));
            }
            (Value::Approx(m), opts.tol_zero)
        }
    };
    let nonnegative = failures.is_empty();

    let bf = beta_bruteforce(system, u, weight, n, exec)?;
    let mut argmin_ok = true;
    for o in &bf.argmin {
        for p in &o.points {
            let val = fresh.ubar_at(system, p)?;
            let zero = match &val {
                Value::Exact(r) => r.is_zero(),
                Value::Approx(x) => x.abs() <= zero_tol,
            };
            if !zero {
                argmin_ok = false;
                failures.push(format!("argmin orbit {o}: ubar({p}) = {} != 0", val.render()));
            }
        }
    }
    let beta_agrees = match (&fresh.beta, &bf.beta) {
        (Value::Exact(a), Value::Exact(b)) if fresh.is_exact() => a == b,
        (a, b) => (a.to_f64() - b.to_f64()).abs() <= LaxOleinikOptions::default().tol_zero,
    };
    if !beta_agrees {
        failures.push(format!(
            "beta {} disagrees with brute force {} at depth {n}",
            fresh.beta.render(),
            bf.beta.render()
        ));
    }
    Ok(CertificateCheck {
        nonnegative,
        argmin_in_zero_set: argmin_ok,
        beta_agrees,
        ubar_min,
        beta_bruteforce: bf.beta,
        argmin: bf.argmin,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, rat};
    use std::collections::BTreeMap;

    fn shift_u(s: &SystemDescriptor) -> Observable {
        let t: BTreeMap<Word, Rational> = [("00", 3), ("01", 1), ("10", 1), ("11", 3)]
            .iter()
            .map(|(w, v)| (words::parse_word(w).unwrap(), int(*v)))
            .collect();
        Observable::LocallyConstant(LocallyConstant::new(s, 2, t).unwrap())
    }

    fn shift_psi(s: &SystemDescriptor) -> Weight {
        Weight::new(
            Observable::LocallyConstant(LocallyConstant::from_fn(s, 1, |w| int(w[0] as i64 + 1))),
            s,
            1.0,
        )
        .unwrap()
    }

    fn table(entries: &[(&str, Rational)]) -> BTreeMap<Word, Rational> {
        entries.iter().map(|(w, v)| (words::parse_word(w).unwrap(), v.clone())).collect()
    }

    #[test]
    fn min_cycle_ratio_examples() {
        let s = SystemDescriptor::full_shift(2);
        let c = Observable::LocallyConstant(LocallyConstant::constant(&s, rat(5, 7)));
        assert_eq!(min_cycle_ratio(&s, &c, &Weight::unit(&s)).unwrap().beta, rat(5, 7));
        // With a varying weight the constant is divided by the largest weight.
        assert_eq!(min_cycle_ratio(&s, &c, &shift_psi(&s)).unwrap().beta, rat(5, 14));
        let r = min_cycle_ratio(&s, &shift_u(&s), &Weight::unit(&s)).unwrap();
        assert_eq!(r.beta, int(1));
        assert_eq!(r.witness.to_string(), "(01)");
        let r = min_cycle_ratio(&s, &shift_u(&s), &shift_psi(&s)).unwrap();
        assert_eq!(r.beta, rat(2, 3));
        assert_eq!(r.witness.to_string(), "(01)");
    }

    #[test]
    fn bellman_examples() {
        let s = SystemDescriptor::full_shift(2);
        let zero = Observable::LocallyConstant(LocallyConstant::constant(&s, int(0)));
        let cert = bellman_subaction(&s, &zero, &Weight::unit(&s), &int(0)).unwrap();
        let SubAction::Table(v) = &cert.v else { panic!() };
        assert!(v.table.values().all(Zero::is_zero));
        assert_eq!(cert.ubar_min, Value::zero());

        let cert = bellman_subaction(&s, &shift_u(&s), &Weight::unit(&s), &int(1)).unwrap();
        let SubAction::Table(v) = &cert.v else { panic!() };
        assert!(v.table.values().all(Zero::is_zero));
        assert_eq!(
            cert.ubar.as_ref().unwrap().table,
            table(&[("00", int(2)), ("01", int(0)), ("10", int(0)), ("11", int(2))])
        );
        assert_eq!(cert.zero_set, ZeroSet::Cylinders(vec![vec![0, 1], vec![1, 0]]));

        let cert = bellman_subaction(&s, &shift_u(&s), &shift_psi(&s), &rat(2, 3)).unwrap();
        let SubAction::Table(v) = &cert.v else { panic!() };
        assert_eq!(v.table, table(&[("0", int(0)), ("1", rat(1, 3))]));
        assert_eq!(
            cert.ubar.as_ref().unwrap().table,
            table(&[("00", rat(7, 3)), ("01", int(0)), ("10", int(0)), ("11", rat(5, 3))])
        );
        // Below the minimum nothing is tight; above it a negative cycle appears.
        assert!(bellman_subaction(&s, &shift_u(&s), &shift_psi(&s), &rat(1, 2)).is_err());
        assert!(matches!(
            bellman_subaction(&s, &shift_u(&s), &shift_psi(&s), &int(1)),
            Err(Error::NegativeReducedCycle { .. })
        ));
    }

    #[test]
    fn verify_examples() {
        let s = SystemDescriptor::full_shift(2);
        let (u, w) = (shift_u(&s), shift_psi(&s));
        let cert = bellman_subaction(&s, &u, &w, &rat(2, 3)).unwrap();
        let check = verify_certificate(&cert, &s, &u, &w, 8, Exec::default()).unwrap();
        assert!(check.passed(), "{:?}", check.failures);

        let bump = |c: &SubActionCertificate, node: &[u8], by: Rational| {
            let mut c = c.clone();
            if let SubAction::Table(v) = &mut c.v {
                for (k, x) in v.table.iter_mut() {
                    if node.is_empty() || k.as_slice() == node {
                        *x += by.clone();
                    }
                }
            }
            c
        };
        let broken = bump(&cert, &[1], int(1));
        let check = verify_certificate(&broken, &s, &u, &w, 8, Exec::default()).unwrap();
        assert!(!check.nonnegative);
        assert!(check.failures.iter().any(|f| f.starts_with("ubar(01)")));

        let shifted = bump(&cert, &[], rat(17, 5));
        assert!(verify_certificate(&shifted, &s, &u, &w, 8, Exec::default()).unwrap().passed());
    }
}
