//! Acceptance harness: each criterion prints one `PASS`/`FAIL` line.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` are evaluated exactly as stated and
//! are expected to report `FAIL`; the process fails if any other criterion
//! fails, or if a known-unattainable one unexpectedly passes.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ergopt::construction::{bq_scan, construct_with_bq_seed, short_cycle_bound, ConstructionOptions};
use ergopt::dynamics::{Point, SystemDescriptor, SystemKind};
use ergopt::enumeration::{
    beta_bruteforce, deviation, enumerate_orbits_with, enumeration_cap, gap, sft_entropy, PeriodicOrbit,
};
use ergopt::numeric::{int, rat, Rational, Value};
use ergopt::observables::{Expr, LocallyConstant, Observable, Weight};
use ergopt::par::Exec;
use ergopt::perturbation::{
    adversarial_probe, approximate_z, build_perturbed, compute_budget, stability_sweep, verify_unique_minimizer,
    SweepOptions, VerifyOptions,
};
use ergopt::shadowing::{certify_asp1, random_periodic_point, random_pseudo_orbit, shadow};
use ergopt::subaction::{certify, min_cycle_ratio};
use ergopt::Error;

/// Criterion 9 asks for `min_{n<=12} a_n < a_3` with the minimum over orbits
/// of period at most `n`; the reference orbit has period 2, so `a_n = 0` for
/// every `n >= 2` and the strict inequality cannot hold.
const KNOWN_UNATTAINABLE: &[usize] = &[9];

struct Outcome {
    pass: bool,
    detail: String,
}

/// Debug form of the first failure, if any, for the report line.
fn first<T: std::fmt::Debug>(items: &[T]) -> String {
    items.first().map(|x| format!("; first failure {x:?}")).unwrap_or_default()
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64, max_den: i64) -> Rational {
    rat(rng.gen_range(lo..=hi), rng.gen_range(1..=max_den))
}

/// A random SFT on `2..=6` symbols, every row and column nonzero.
fn random_sft(rng: &mut ChaCha8Rng, max_m: u8) -> SystemDescriptor {
    loop {
        let m = rng.gen_range(2..=max_m);
        if rng.gen_bool(0.2) {
            return SystemDescriptor::full_shift(m);
        }
        let t: Vec<Vec<u8>> = (0..m)
            .map(|_| (0..m).map(|_| u8::from(rng.gen_bool(0.6))).collect())
            .collect();
        if let Ok(s) = SystemDescriptor::sft(t) {
            return s;
        }
    }
}

fn random_table(
    s: &SystemDescriptor,
    depth: usize,
    rng: &mut ChaCha8Rng,
    value: impl Fn(&mut ChaCha8Rng) -> Rational,
) -> Observable {
    let table: BTreeMap<_, _> = s.admissible_words(depth).into_iter().map(|w| (w, value(rng))).collect();
    Observable::LocallyConstant(LocallyConstant::new(s, depth, table).expect("covers every admissible word"))
}

struct SftInstance {
    system: SystemDescriptor,
    depth: usize,
    u: Observable,
    weight: Weight,
}

fn sft_instances(count: usize, seed: u64) -> Vec<SftInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let system = random_sft(&mut rng, 6);
            let depth = rng.gen_range(1..=2);
            let u = random_table(&system, depth, &mut rng, |r| random_rational(r, -100, 100, 100));
            let psi = random_table(&system, depth, &mut rng, |r| random_rational(r, 1, 100, 100));
            let weight = Weight::new(psi, &system, 1.0).expect("positive weight");
            SftInstance { system, depth, u, weight }
        })
        .collect()
}

fn criterion_1(instances: &[SftInstance]) -> Outcome {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        let m = inst.system.alphabet().expect("shift");
        let n = 3 * m * inst.depth;
        let mcr = min_cycle_ratio(&inst.system, &inst.u, &inst.weight).expect("cycle ratio");
        let bf = beta_bruteforce(&inst.system, &inst.u, &inst.weight, n, Exec::default()).expect("brute force");
        if bf.beta != Value::Exact(mcr.beta.clone()) {
            mismatches.push(format!("#{i}: {} vs {}", Value::Exact(mcr.beta).render(), bf.beta.render()));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches.is_empty() && elapsed < Duration::from_secs(60),
        format!("{} instances, {} mismatches, {:.1?}{}", instances.len(), mismatches.len(), elapsed, first(&mismatches)),
    )
}

fn criterion_2(instances: &[SftInstance]) -> Outcome {
    let mut failures = Vec::new();
    let mut telescoped = 0usize;
    for (i, inst) in instances.iter().enumerate() {
        let s = &inst.system;
        let cert = certify(s, &inst.u, &inst.weight, 0, Exec::default()).expect("certificate");
        let beta = cert.beta.as_exact().expect("exact beta").clone();
        let table = cert.ubar.as_ref().expect("exact reduced table");
        if table.table.values().any(|v| v.is_negative()) {
            failures.push(format!("#{i}: negative reduced cost"));
        }
        let m = s.alphabet().expect("shift");
        let n = 3 * m * inst.depth;
        let bf = beta_bruteforce(s, &inst.u, &inst.weight, n, Exec::default()).expect("brute force");
        for o in &bf.argmin {
            for p in &o.points {
                if !cert.ubar_at(s, p).expect("evaluates").is_zero() {
                    failures.push(format!("#{i}: reduced cost nonzero on argmin {o}"));
                }
            }
        }
        // Every orbit the enumerator can reach at this depth.
        let reach = n.min(enumeration_cap(s));
        let orbits = enumerate_orbits_with(s, reach, Exec::default()).expect("orbits");
        let u = inst.u.as_locally_constant(s).expect("table");
        let psi = inst.weight.psi.as_locally_constant(s).expect("table");
        let holds = Exec::default().map(&orbits, |o| {
            let w = o.word().expect("shift orbit");
            table.cyclic_sum(w).unwrap() == u.cyclic_sum(w).unwrap() - &beta * psi.cyclic_sum(w).unwrap()
        });
        for (o, ok) in orbits.iter().zip(holds) {
            if !ok {
                failures.push(format!("#{i}: telescoping fails on {o}"));
            }
        }
        telescoped += orbits.len();
    }
    outcome(
        failures.is_empty(),
        format!("{} instances, {telescoped} orbit sums telescoped, {} failures{}", instances.len(), failures.len(), first(&failures)),
    )
}

fn test_systems() -> Vec<SystemDescriptor> {
    vec![
        SystemDescriptor::circle(2),
        SystemDescriptor::circle(3),
        SystemDescriptor::full_shift(2),
        SystemDescriptor::full_shift(3),
        SystemDescriptor::sft(vec![vec![1, 1], vec![1, 0]]).expect("golden mean"),
        SystemDescriptor::torus_cat([[2, 1], [1, 1]]).expect("cat map"),
    ]
}

/// `η` uniformly in `(0, δ/2]` on a grid of 1000 steps.
fn random_eta(s: &SystemDescriptor, rng: &mut ChaCha8Rng) -> Rational {
    &s.asp.delta / int(2) * rat(rng.gen_range(1..=1000), 1000)
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = Vec::new();
    let mut total = 0;
    for s in test_systems() {
        for _ in 0..1000 {
            let n = rng.gen_range(1..=16);
            let eta = random_eta(&s, &mut rng);
            let pseudo = random_pseudo_orbit(&s, n, &eta, &mut rng).expect("pseudo-orbit");
            total += 1;
            let sh = match shadow(&s, &pseudo) {
                Ok(sh) => sh,
                Err(e) => {
                    failures.push(format!("{}: {e}", s.name()));
                    continue;
                }
            };
            // Independent re-check of the tracking error along the true orbit.
            let bound = &s.asp.l * &pseudo.eta;
            let mut x = sh.start.clone();
            let mut worst = Rational::zero();
            for p in &pseudo.points {
                worst = worst.max(s.distance(&x, p).unwrap());
                x = s.apply(&x).unwrap();
            }
            if x != sh.start || n % sh.orbit.period != 0 || worst > bound {
                failures.push(format!("{}: n = {n}, period {}, error {worst}", s.name(), sh.orbit.period));
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures.is_empty() && elapsed < Duration::from_secs(30),
        format!("{total} pseudo-orbits, {} failures, {elapsed:.1?}{}", failures.len(), first(&failures)),
    )
}

/// A pair `(x, y)` whose first `n` iterates stay within `δ` of each other.
fn asp1_pair(s: &SystemDescriptor, n: usize, rng: &mut ChaCha8Rng) -> (Point, Point) {
    let delta = s.asp.delta.clone();
    let small = |rng: &mut ChaCha8Rng| -> Rational {
        let scale = &delta / s.lip.clone().pow(n as i32);
        scale * rat(rng.gen_range(-1000..=1000), 1000)
    };
    match &s.kind {
        SystemKind::CircleExpanding { .. } => {
            let x = random_rational(rng, 0, 999_999, 1_000_000);
            let x = ergopt::numeric::frac(&x);
            let y = ergopt::numeric::frac(&(&x + small(rng)));
            (Point::Circle(x), Point::Circle(y))
        }
        SystemKind::TorusCat { .. } => {
            let x0 = ergopt::numeric::frac(&random_rational(rng, 0, 999_999, 1_000_000));
            let x1 = ergopt::numeric::frac(&random_rational(rng, 0, 999_999, 1_000_000));
            let y0 = ergopt::numeric::frac(&(&x0 + small(rng)));
            let y1 = ergopt::numeric::frac(&(&x1 + small(rng)));
            (Point::Torus(x0, x1), Point::Torus(y0, y1))
        }
        SystemKind::FullShift { .. } | SystemKind::Sft { .. } => {
            let len = rng.gen_range(1..=n + 4);
            let x = random_periodic_point(s, len, rng).unwrap();
            let w = x.word().unwrap().to_vec();
            let keep = n + 1 + rng.gen_range(0..3);
            let mut y: Vec<u8> = (0..keep).map(|i| w[i % w.len()]).collect();
            // Random admissible tail that closes back up to the first symbol.
            let m = s.alphabet().unwrap() as u8;
            loop {
                let last = *y.last().unwrap();
                if y.len() > keep && s.allows(last, y[0]) && rng.gen_bool(0.5) {
                    break;
                }
                let next: Vec<u8> = (0..m).filter(|&b| s.allows(last, b)).collect();
                y.push(next[rng.gen_range(0..next.len())]);
            }
            (x, s.word_point(&y).unwrap())
        }
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures = Vec::new();
    let mut total = 0;
    let mut rejected = 0;
    for s in test_systems() {
        let mut done = 0;
        while done < 1000 {
            let n = rng.gen_range(1..=20);
            let (x, y) = asp1_pair(&s, n, &mut rng);
            match certify_asp1(&s, &x, &y, n) {
                Ok(r) => {
                    done += 1;
                    total += 1;
                    if !r.holds() {
                        failures.push(format!("{}: {x} {y} n = {n} slack {}", s.name(), r.min_slack.render()));
                    }
                }
                Err(Error::AspPrecondition { .. }) => rejected += 1,
                Err(e) => {
                    done += 1;
                    failures.push(format!("{}: {e}", s.name()));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{total} triples ({rejected} redrawn), {} failures{}", failures.len(), first(&failures)),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let systems = test_systems();
    let mut failures = Vec::new();
    for i in 0..200 {
        let s = &systems[i % systems.len()];
        let n = rng.gen_range(1..=12);
        let eta = random_eta(s, &mut rng);
        let pseudo = random_pseudo_orbit(s, n, &eta, &mut rng).unwrap();
        let z = random_periodic_point(s, rng.gen_range(1..=4), &mut rng).unwrap();
        let z = PeriodicOrbit::from_point(s, &z).unwrap().points;
        let sh = shadow(s, &pseudo).unwrap();
        let lhs = deviation(s, &sh.orbit.points, &z, 1.0).unwrap();
        let slack = Value::Exact(int(n as i64) * &s.asp.l * &pseudo.eta);
        let rhs = deviation(s, &pseudo.points, &z, 1.0).unwrap() + slack;
        if !(lhs.is_exact() && rhs.is_exact() && lhs <= rhs) {
            failures.push(format!("{}: {} > {}", s.name(), lhs.render(), rhs.render()));
        }
    }
    outcome(failures.is_empty(), format!("200 instances, {} failures{}", failures.len(), first(&failures)))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = Vec::new();
    for _ in 0..50 {
        let s = random_sft(&mut rng, 6);
        let t = s.transition_matrix().unwrap();
        let (len, bound) = short_cycle_bound(&t).unwrap();
        let h = sft_entropy(&s).unwrap();
        let independent = 1.0 + t.len() as f64 * (1.0 - h).exp();
        if (bound - independent).abs() > 1e-6 || len as f64 > independent + 1e-6 {
            failures.push(format!("{}: len {len}, bound {independent}", s.name()));
        }
    }
    outcome(failures.is_empty(), format!("50 SFTs, {} failures{}", failures.len(), first(&failures)))
}

fn criterion_7() -> Outcome {
    let circle = SystemDescriptor::circle(2);
    let shift = SystemDescriptor::full_shift(2);
    let cases = [
        (circle, vec![Point::Circle(int(0))]),
        (shift, PeriodicOrbit::of_word(&[0, 1]).points),
    ];
    let seed_n: usize = 8;
    let limit = seed_n.ilog2() as usize + 1;
    let mut failures = Vec::new();
    let mut lines = Vec::new();
    for (s, z) in &cases {
        for l_hat in [10.0, 100.0, 1000.0] {
            let start = Instant::now();
            let trace = construct_with_bq_seed(s, z, 1.0, l_hat, seed_n, &ConstructionOptions::default()).unwrap();
            let elapsed = start.elapsed();
            let o = trace.final_orbit();
            // Ratio recomputed from the enumeration primitives.
            let g = Value::Exact(gap(s, o).unwrap());
            let d = deviation(s, &o.points, z, 1.0).unwrap();
            let ratio = if d.is_zero() { Value::Approx(f64::INFINITY) } else { g / d };
            let splits = trace.stages.len() - 1;
            let ok = trace.achieved
                && ratio > Value::Approx(l_hat)
                && ratio == *trace.achieved_ratio()
                && splits <= limit
                && elapsed < Duration::from_secs(10);
            lines.push(format!("{} L̂={l_hat}: {} ratio {}", s.name(), o, ratio.render()));
            if !ok {
                failures.push(format!("{} L̂={l_hat}: achieved {} splits {splits} {elapsed:.1?}", s.name(), trace.achieved));
            }
        }
    }
    outcome(failures.is_empty(), format!("{} runs, {} failures{}; {}", lines.len(), failures.len(), first(&failures), lines.join("; ")))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let circle = SystemDescriptor::circle(2);
    let shift = SystemDescriptor::full_shift(2);
    let word_u = LocallyConstant::new(
        &shift,
        2,
        [(vec![0, 0], int(3)), (vec![0, 1], int(1)), (vec![1, 0], int(1)), (vec![1, 1], int(3))].into_iter().collect(),
    )
    .unwrap();
    let cases = [
        (circle, Observable::ClosedForm(Expr::neg_cos()), Point::Circle(int(0))),
        (shift, Observable::LocallyConstant(word_u), Point::Word(vec![0, 1])),
    ];
    let n = 12;
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for (s, u, p) in &cases {
        let w = Weight::unit(s);
        let cert = certify(s, u, &w, n, Exec::default()).unwrap();
        let z = approximate_z(s, u, &w, &cert, n, Exec::default()).unwrap();
        let orbit = PeriodicOrbit::from_point(s, p).unwrap();
        let eps = rat(1, 10);
        let budget = match compute_budget(s, &w, &orbit, &eps, 1.0, &cert, &z) {
            Ok(b) => b,
            Err(e) => {
                failures.push(format!("{}: {e}", s.name()));
                continue;
            }
        };
        let verify = VerifyOptions::new(n);
        let sweep = stability_sweep(
            s,
            u,
            &w,
            &cert,
            &budget,
            &SweepOptions {
                trials: 100,
                inflation: 1.0,
                seed: 8,
                depth: 3,
                verify: verify.clone(),
            },
        )
        .unwrap();
        if !sweep.all_pass || sweep.worst_margin <= Value::zero() {
            failures.push(format!("{}: sweep {} failures, worst margin {}", s.name(), sweep.failures, sweep.worst_margin.render()));
        }
        let base = build_perturbed(s, u, &eps, &orbit, 1.0, &Observable::zero(), Some(&budget)).unwrap();
        let report = verify_unique_minimizer(s, &base, &w, &cert, &verify).unwrap();
        let competitor = report.min_margin_orbit.clone().unwrap();
        let probe = adversarial_probe(s, u, &w, &cert, &budget, &competitor, 100.0, &verify).unwrap();
        if probe.report.pass || !probe.outside_inflated {
            failures.push(format!("{}: adversary at amplitude {} found no failure", s.name(), probe.amplitude));
        }
        notes.push(format!(
            "{}: worst margin {}, adversary fails at {} vs {}",
            s.name(),
            sweep.worst_margin.render(),
            probe.competitor,
            probe.amplitude
        ));
    }
    let elapsed = start.elapsed();
    outcome(
        failures.is_empty() && elapsed < Duration::from_secs(120),
        format!("{elapsed:.1?}; {}{}", notes.join("; "), first(&failures)),
    )
}

fn criterion_9() -> Outcome {
    let s = SystemDescriptor::full_shift(2);
    let z = PeriodicOrbit::of_word(&[0, 1]).points;
    let rows = bq_scan(&s, &z, 1.0, 2, 2..=12, Exec::default()).unwrap();
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join("bq_scan.csv");
    let mut csv = String::from("n,min_deviation,a_n,argmin,min_deviation_outside,a_n_outside,argmin_outside\n");
    for r in &rows {
        csv += &format!(
            "{},{},{},\"{}\",{},{},\"{}\"\n",
            r.n, r.min_deviation, r.a_n, r.argmin, r.min_deviation_outside, r.a_n_outside, r.argmin_outside
        );
    }
    std::fs::write(&path, &csv).unwrap();
    let a: Vec<Rational> = rows.iter().map(|r| ergopt::numeric::parse_rational(&r.a_n).unwrap()).collect();
    let a3 = &a[1];
    let min = a.iter().min().unwrap();
    outcome(min < a3, format!("min a_n = {min}, a_3 = {a3}; csv at {}", path.display()))
}

/// The core pipeline, rendered to a string report.
fn pipeline_report(seed: u64, exec: Exec) -> String {
    let s = SystemDescriptor::circle(2);
    let u = Observable::ClosedForm(Expr::neg_cos());
    let w = Weight::unit(&s);
    let n = 10;
    let bf = beta_bruteforce(&s, &u, &w, n, exec).unwrap();
    let cert = certify(&s, &u, &w, n, exec).unwrap();
    let z = approximate_z(&s, &u, &w, &cert, n, exec).unwrap();
    let trace = construct_with_bq_seed(&s, &z, 1.0, 10.0, 8, &ConstructionOptions::default()).unwrap();
    let budget = compute_budget(&s, &w, trace.final_orbit(), &rat(1, 10), 1.0, &cert, &z).unwrap();
    let mut verify = VerifyOptions::new(n);
    verify.exec = exec;
    verify.seed = seed;
    let sweep = stability_sweep(
        &s,
        &u,
        &w,
        &cert,
        &budget,
        &SweepOptions {
            trials: 8,
            inflation: 1.0,
            seed,
            depth: 2,
            verify,
        },
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pseudo = random_pseudo_orbit(&s, 9, &rat(1, 8), &mut rng).unwrap();
    let sh = shadow(&s, &pseudo).unwrap();
    serde_json::to_string_pretty(&serde_json::json!({
        "beta": bf.to_json(),
        "certificate": cert.to_json(),
        "construction": trace.to_json(),
        "budget": budget.to_json(),
        "sweep": sweep.to_json(),
        "shadow": sh.to_json(),
    }))
    .unwrap()
}

fn criterion_10() -> Outcome {
    let first = pipeline_report(10, Exec::default());
    let second = pipeline_report(10, Exec::default());
    let sequential = pipeline_report(10, Exec::Sequential);
    let other = pipeline_report(11, Exec::default());
    outcome(
        first == second && first == sequential && first != other,
        format!("{} bytes; repeat identical: {}, sequential identical: {}", first.len(), first == second, first == sequential),
    )
}

fn main() {
    let instances = sft_instances(100, 1);
    let criteria: Vec<(usize, &str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (1, "cycle-ratio oracle equals brute force", Box::new(|| criterion_1(&instances))),
        (2, "sub-action certificate", Box::new(|| criterion_2(&instances))),
        (3, "periodic shadowing", Box::new(criterion_3)),
        (4, "two-sided hyperbolic estimate", Box::new(criterion_4)),
        (5, "deviation transfer under shadowing", Box::new(criterion_5)),
        (6, "short cycle bound", Box::new(criterion_6)),
        (7, "good orbit construction", Box::new(criterion_7)),
        (8, "perturbation stability", Box::new(criterion_8)),
        (9, "decay of the best deviation", Box::new(criterion_9)),
        (10, "determinism", Box::new(criterion_10)),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run) in &criteria {
        let t = Instant::now();
        let r = run();
        let tag = if r.pass { "PASS" } else { "FAIL" };
        let known = KNOWN_UNATTAINABLE.contains(id);
        let note = if known { " (known unattainable)" } else { "" };
        println!("criterion {id:>2} {tag}{note}  {name} [{:.1?}]  {}", t.elapsed(), r.detail);
        if r.pass == known {
            unexpected.push(*id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
