//! Perturbations `u + ε d^α(·, O) + h` whose unique minimizing measure is
//! the periodic orbit `O`, with the budget on `h` computed from certified
//! norms and the claim checked by brute force and by sampling.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value as Json};

use crate::dynamics::{Point, SystemDescriptor, SystemKind};
use crate::enumeration::{beta_bruteforce, deviation, enumerate_orbits_with, gap, orbit_ratio_average, PeriodicOrbit};
use crate::error::{Error, Result};
use crate::numeric::{format_rational, int, rat, Rational, Value};
use crate::observables::{random_perturbation, Observable, Weight};
use crate::par::Exec;
use crate::shadowing::random_periodic_point;
use crate::subaction::SubActionCertificate;

/// `v^p` for `v >= 0`, exact when `p == 1`.
fn power(v: &Value, p: f64) -> Value {
    v.pow_alpha(p)
}

/// Norms and system constants the budget formulas consume; every field is an
/// upper bound except `psi_min`, which is a lower bound.
#[derive(Clone, Debug, PartialEq)]
pub struct BudgetInputs {
    pub epsilon: Value,
    pub alpha: f64,
    pub lip: Value,
    pub c: Value,
    /// `e^{−λα}`.
    pub decay: Value,
    pub delta: Value,
    pub ubar_norm: Value,
    pub ubar_sup: Value,
    pub psi_k_norm: Value,
    pub psi_sup: Value,
    pub psi_min: Value,
}

/// Constants of the positivity argument, as functions of [`BudgetInputs`].
#[derive(Clone, Debug, PartialEq)]
pub struct BudgetConstants {
    pub l1: Value,
    pub l2: Value,
    pub l3: Value,
    pub l_hat: Value,
    pub delta_hat: Value,
}

impl BudgetConstants {
    pub fn from_inputs(i: &BudgetInputs) -> Self {
        let a = i.alpha;
        let ten_eps = Value::Exact(int(10)) * &i.epsilon;
        let two_lip_a = power(&(Value::Exact(int(2)) * &i.lip), a);
        let l1 = &i.epsilon / &two_lip_a;
        let inner = &i.ubar_norm + &ten_eps + (&i.ubar_sup + &power(&i.delta, a)) / i.psi_min.clone() * &i.psi_k_norm;
        let first = Value::Exact(int(4)) * power(&i.c, a) * inner
            / ((Value::one() - &i.decay) * &i.psi_min * &i.epsilon);
        let common = first + Value::Exact(int(2)) * &i.psi_sup / i.psi_min.clone();
        let l2 = &common * &i.ubar_norm;
        let l3 = &common * &(Value::one() + &i.psi_min);
        let l_hat = (Value::Exact(int(3)) * &l2 / l1.clone()).max(
            Value::Exact(int(2)) * &two_lip_a * &i.ubar_norm / (&i.epsilon * &i.psi_min),
        );
        let delta_hat = Value::one()
            .min(&l1 / &(Value::Exact(int(3)) * &l3))
            .min(&i.epsilon * &i.psi_min / (Value::Exact(int(2)) * &two_lip_a));
        BudgetConstants {
            l1,
            l2,
            l3,
            l_hat,
            delta_hat,
        }
    }
}

/// Everything needed to size admissible perturbations around `O`.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationBudget {
    pub inputs: BudgetInputs,
    pub constants: BudgetConstants,
    pub orbit: PeriodicOrbit,
    pub gap: Rational,
    pub deviation: Value,
    /// `D^α(O)/d_{α,Z}(O)`.
    pub l_o: Value,
    /// `‖h‖₀` must stay below `(D^α(O)/♯O)·δ̂`.
    pub h_sup_cap: Value,
    /// `‖h‖_α` must stay below `10ε`.
    pub h_norm_cap: Value,
    /// `a_O` for `h = 0`.
    pub a_o: Value,
    /// `((|a_O|‖ψ‖₀ + ‖h‖₀)/ε)^{1/α}` at `h = 0` and at the worst `h` in the ball.
    pub area1_radius: Value,
    pub area1_radius_worst: Value,
    /// `D(O)/(2 Lip_T)`.
    pub area1_limit: Value,
}

impl PerturbationBudget {
    pub fn to_json(&self) -> Json {
        let i = &self.inputs;
        let c = &self.constants;
        json!({
            "orbit": self.orbit.to_string(),
            "epsilon": i.epsilon.render(),
            "alpha": i.alpha,
            "norms": {
                "lip_t": i.lip.render(),
                "c": i.c.render(),
                "decay": i.decay.render(),
                "delta": i.delta.render(),
                "ubar_norm": i.ubar_norm.render(),
                "ubar_sup": i.ubar_sup.render(),
                "psi_k_norm": i.psi_k_norm.render(),
                "psi_sup": i.psi_sup.render(),
                "psi_min": i.psi_min.render(),
            },
            "l1": c.l1.render(),
            "l2": c.l2.render(),
            "l3": c.l3.render(),
            "l_hat": c.l_hat.render(),
            "delta_hat": c.delta_hat.render(),
            "gap": format_rational(&self.gap),
            "deviation": self.deviation.render(),
            "l_o": self.l_o.render(),
            "h_sup_cap": self.h_sup_cap.render(),
            "h_norm_cap": self.h_norm_cap.render(),
            "a_o": self.a_o.render(),
            "area1_radius": self.area1_radius.render(),
            "area1_radius_worst": self.area1_radius_worst.render(),
            "area1_limit": self.area1_limit.render(),
        })
    }
}

/// Stand-in for the support of the minimizing measures: minimizing orbits of
/// period `<= n` together with every such orbit on which `ū` vanishes.
pub fn approximate_z(
    system: &SystemDescriptor,
    u: &Observable,
    weight: &Weight,
    cert: &SubActionCertificate,
    n: usize,
    exec: Exec,
) -> Result<Vec<Point>> {
    let bf = beta_bruteforce(system, u, weight, n, exec)?;
    let tol = match &cert.zero_set {
        crate::subaction::ZeroSet::Grid { tolerance, .. } => *tolerance,
        crate::subaction::ZeroSet::Cylinders(_) => 0.0,
    };
    let vanishes = |o: &PeriodicOrbit| -> Result<bool> {
        for p in &o.points {
            let v = cert.ubar_at(system, p)?;
            let zero = match v {
                Value::Exact(r) => r.is_zero(),
                Value::Approx(x) => x.abs() <= tol,
            };
            if !zero {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let orbits = enumerate_orbits_with(system, n.min(crate::enumeration::enumeration_cap(system)), exec)?;
    let flags = exec.try_map(&orbits, |o| vanishes(o))?;
    let mut z: Vec<Point> = bf.argmin.iter().flat_map(|o| o.points.clone()).collect();
    for (o, keep) in orbits.iter().zip(flags) {
        if keep {
            z.extend(o.points.iter().cloned());
        }
    }
    z.sort();
    z.dedup();
    Ok(z)
}

/// Budget for perturbations around `orbit`, with `z` standing in for the
/// support of the minimizing measures of `(u, ψ)`.
pub fn compute_budget(
    system: &SystemDescriptor,
    weight: &Weight,
    orbit: &PeriodicOrbit,
    epsilon: &Rational,
    alpha: f64,
    cert: &SubActionCertificate,
    z: &[Point],
) -> Result<PerturbationBudget> {
    if !epsilon.is_positive() {
        return Err(Error::BudgetViolation(format!("epsilon must be positive, got {}", format_rational(epsilon))));
    }
    let ubar = cert.ubar_certificate(system, alpha)?;
    let psi_k = cert.psi_k.certificate(system, alpha)?;
    let asp = &system.asp;
    let decay = if alpha == 1.0 { asp.decay(1) } else { Value::Approx(asp.decay_alpha(alpha)) };
    let inputs = BudgetInputs {
        epsilon: Value::Exact(epsilon.clone()),
        alpha,
        lip: Value::Exact(system.lip.clone()),
        c: Value::Exact(asp.c.clone()),
        decay,
        delta: Value::Exact(asp.delta.clone()),
        ubar_norm: ubar.norm(),
        ubar_sup: ubar.sup_norm.clone(),
        psi_k_norm: psi_k.norm(),
        psi_sup: weight.cert.sup_norm.clone(),
        psi_min: weight.psi_min.clone(),
    };
    let constants = BudgetConstants::from_inputs(&inputs);

    let gap = gap(system, orbit)?;
    let gap_a = power(&Value::Exact(gap.clone()), alpha);
    let dev = deviation(system, &orbit.points, z, alpha)?;
    let l_o = if dev.is_zero() { Value::Approx(f64::INFINITY) } else { &gap_a / &dev };
    if l_o <= constants.l_hat {
        return Err(Error::OrbitNotGoodEnough {
            l_o: l_o.to_f64(),
            l_hat: constants.l_hat.to_f64(),
        });
    }
    let size = Value::Exact(int(orbit.period as i64));
    let h_sup_cap = &gap_a / &size * &constants.delta_hat;
    let h_norm_cap = Value::Exact(int(10) * epsilon);

    let mut ubar_sum = Value::zero();
    let mut psi_sum = Value::zero();
    for p in &orbit.points {
        ubar_sum = ubar_sum + cert.ubar_at(system, p)?;
        psi_sum = psi_sum + cert.psi_k.evaluate(system, p)?;
    }
    let a_o = ubar_sum / psi_sum;
    let radius = |a: &Value, h: &Value| power(&((a.abs() * &inputs.psi_sup + h.clone()) / inputs.epsilon.clone()), 1.0 / alpha);
    let area1_radius = radius(&a_o, &Value::zero());
    let a_worst = a_o.abs() + &h_sup_cap / &inputs.psi_min;
    let area1_radius_worst = radius(&a_worst, &h_sup_cap);
    let area1_limit = Value::Exact(gap.clone()) / (Value::Exact(int(2)) * &inputs.lip);
    Ok(PerturbationBudget {
        inputs,
        constants,
        orbit: orbit.clone(),
        gap,
        deviation: dev,
        l_o,
        h_sup_cap,
        h_norm_cap,
        a_o,
        area1_radius,
        area1_radius_worst,
        area1_limit,
    })
}

/// `u + ε d^α(·, O) + h`, keeping the parts for later analysis.
#[derive(Clone, Debug, PartialEq)]
pub struct Perturbed {
    pub base: Observable,
    pub epsilon: Rational,
    pub alpha: f64,
    pub orbit: PeriodicOrbit,
    pub h: Observable,
    pub observable: Observable,
}

/// Builds the perturbed observable; with a budget, `h` must lie strictly
/// inside both caps according to its own certificate.
pub fn build_perturbed(
    system: &SystemDescriptor,
    u: &Observable,
    epsilon: &Rational,
    orbit: &PeriodicOrbit,
    alpha: f64,
    h: &Observable,
    budget: Option<&PerturbationBudget>,
) -> Result<Perturbed> {
    if let Some(b) = budget {
        if !h.is_zero() {
            let cert = h.certificate(system, alpha)?;
            if cert.sup_norm >= b.h_sup_cap {
                return Err(Error::BudgetViolation(format!(
                    "sup norm {} reaches the cap {}",
                    cert.sup_norm.render(),
                    b.h_sup_cap.render()
                )));
            }
            if cert.norm() >= b.h_norm_cap {
                return Err(Error::BudgetViolation(format!(
                    "Hölder norm {} reaches the cap {}",
                    cert.norm().render(),
                    b.h_norm_cap.render()
                )));
            }
        }
    }
    let mut terms = vec![u.clone()];
    if !epsilon.is_zero() {
        terms.push(Observable::dist_to_orbit(orbit.points.clone(), alpha, epsilon.clone()));
    }
    if !h.is_zero() {
        terms.push(h.clone());
    }
    let observable = if terms.len() == 1 { u.clone() } else { Observable::Sum(terms) };
    Ok(Perturbed {
        base: u.clone(),
        epsilon: epsilon.clone(),
        alpha,
        orbit: orbit.clone(),
        h: h.clone(),
        observable,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub n: usize,
    pub samples: usize,
    /// Defaults to `10·N·♯O`.
    pub m_max: Option<usize>,
    pub seed: u64,
    pub exec: Exec,
}

impl VerifyOptions {
    pub fn new(n: usize) -> Self {
        VerifyOptions {
            n,
            samples: 100,
            m_max: None,
            seed: 0,
            exec: Exec::default(),
        }
    }
}

/// A start point and the first time its partial sum of `G` became positive.
#[derive(Clone, Debug, PartialEq)]
pub struct GSample {
    pub z: Point,
    pub m: Option<usize>,
    /// Last partial sum computed.
    pub partial: Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub orbit: PeriodicOrbit,
    /// Ratio average of the perturbed observable on `O`.
    pub beta_at_orbit: Value,
    /// `ratio(O') − ratio(O)` for every other orbit of period `<= N`.
    pub margins: Vec<(PeriodicOrbit, Value)>,
    pub min_margin: Value,
    pub min_margin_orbit: Option<PeriodicOrbit>,
    pub a_o: Value,
    /// `Σ_{x∈O} G(x)`.
    pub g_sum: Value,
    pub samples: Vec<GSample>,
    pub m_max: usize,
    pub failures: Vec<String>,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct MarginRow {
    pub period: usize,
    pub orbit: String,
    pub margin: String,
}

impl VerificationReport {
    pub fn margin_rows(&self) -> Vec<MarginRow> {
        self.margins
            .iter()
            .map(|(o, m)| MarginRow {
                period: o.period,
                orbit: o.to_string(),
                margin: m.render(),
            })
            .collect()
    }

    pub fn to_json(&self) -> Json {
        let positive = self.samples.iter().filter(|s| s.m.is_some()).count();
        json!({
            "orbit": self.orbit.to_string(),
            "beta_at_orbit": self.beta_at_orbit.render(),
            "orbits_compared": self.margins.len(),
            "min_margin": self.min_margin.render(),
            "min_margin_orbit": self.min_margin_orbit.as_ref().map(|o| o.to_string()),
            "a_o": self.a_o.render(),
            "g_sum": self.g_sum.render(),
            "samples": self.samples.len(),
            "samples_positive": positive,
            "m_max": self.m_max,
            "failures": self.failures,
            "pass": self.pass,
            "checked": "strict minimality among periodic orbits of period <= N; positive partial sums of G from sampled non-generic points",
        })
    }
}

fn is_zero_value(v: &Value) -> bool {
    match v {
        Value::Exact(r) => r.is_zero(),
        Value::Approx(x) => x.abs() <= 1e-9,
    }
}

/// Random start points that are not eventually in `O` within `m_max` steps.
fn sample_points(
    system: &SystemDescriptor,
    orbit: &PeriodicOrbit,
    n: usize,
    count: usize,
    m_max: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Point>> {
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < 100 * count.max(1) {
        attempts += 1;
        let periodic = out.len() % 2 == 0;
        let p = if periodic || system.is_shift() {
            let len = if periodic { rng.gen_range(1..=n) } else { rng.gen_range(n..=3 * n) };
            match random_periodic_point(system, len, rng) {
                Ok(p) => p,
                Err(_) => continue,
            }
        } else {
            let q = rng.gen_range(3i64..=1000);
            let mut coord = || Rational::new(BigInt::from(rng.gen_range(0..q)), BigInt::from(q));
            match system.kind {
                SystemKind::CircleExpanding { .. } => Point::Circle(coord()),
                SystemKind::TorusCat { .. } => Point::Torus(coord(), coord()),
                _ => unreachable!(),
            }
        };
        let mut q = p.clone();
        let mut hits = false;
        for _ in 0..=m_max {
            if orbit.contains(&q) {
                hits = true;
                break;
            }
            q = system.apply(&q)?;
        }
        if !hits {
            out.push(p);
        }
    }
    Ok(out)
}

/// Checks that `O` is the unique minimizer of the perturbed observable among
/// periodic orbits of period `<= N`, that `G = ū + ε d^α(·, O) + h − a_O ψ_K`
/// sums to zero on `O`, and that partial sums of `G` along sampled
/// non-generic orbits turn positive within `m_max` steps.
pub fn verify_unique_minimizer(
    system: &SystemDescriptor,
    perturbed: &Perturbed,
    weight: &Weight,
    cert: &SubActionCertificate,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let orbit = &perturbed.orbit;
    let u = &perturbed.observable;
    let mut failures = Vec::new();

    let own = orbit_ratio_average(system, u, weight, orbit)?;
    let orbits = enumerate_orbits_with(system, opts.n, opts.exec)?;
    let others: Vec<PeriodicOrbit> = orbits.into_iter().filter(|o| o != orbit).collect();
    let ratios = opts.exec.try_map(&others, |o| orbit_ratio_average(system, u, weight, o))?;
    let margins: Vec<(PeriodicOrbit, Value)> =
        others.into_iter().zip(ratios).map(|(o, r)| (o, r - own.clone())).collect();
    let mut min_margin = Value::Approx(f64::INFINITY);
    let mut min_margin_orbit = None;
    for (o, m) in &margins {
        if *m < min_margin {
            min_margin = m.clone();
            min_margin_orbit = Some(o.clone());
        }
    }
    if let Some(o) = &min_margin_orbit {
        if min_margin <= Value::zero() {
            failures.push(format!("orbit {o} has ratio margin {} <= 0", min_margin.render()));
        }
    }

    // G(x) = ū(x) + ε d^α(x, O) + h(x) − a_O ψ_K(x).
    let dist = Observable::dist_to_orbit(orbit.points.clone(), perturbed.alpha, perturbed.epsilon.clone());
    let raw = |p: &Point| -> Result<Value> {
        Ok(cert.ubar_at(system, p)? + dist.evaluate(system, p)? + perturbed.h.evaluate(system, p)?)
    };
    let mut num = Value::zero();
    let mut den = Value::zero();
    for p in &orbit.points {
        num = num + raw(p)?;
        den = den + cert.psi_k.evaluate(system, p)?;
    }
    let a_o = num / den;
    let g = |p: &Point| -> Result<Value> { Ok(raw(p)? - &a_o * &cert.psi_k.evaluate(system, p)?) };
    let mut g_sum = Value::zero();
    for p in &orbit.points {
        g_sum = g_sum + g(p)?;
    }
    if !is_zero_value(&g_sum) {
        failures.push(format!("sum of G over the orbit is {} != 0", g_sum.render()));
    }

    let m_max = opts.m_max.unwrap_or(10 * opts.n * orbit.period);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let starts = sample_points(system, orbit, opts.n, opts.samples, m_max, &mut rng)?;
    let samples = opts.exec.try_map(&starts, |z| -> Result<GSample> {
        let mut partial = Value::zero();
        let mut q = z.clone();
        for m in 0..=m_max {
            partial = partial + g(&q)?;
            if partial > Value::zero() {
                return Ok(GSample {
                    z: z.clone(),
                    m: Some(m),
                    partial,
                });
            }
            q = system.apply(&q)?;
        }
        Ok(GSample {
            z: z.clone(),
            m: None,
            partial,
        })
    })?;
    for s in &samples {
        if s.m.is_none() {
            failures.push(format!(
                "partial sums of G from {} stay <= 0 up to m = {m_max} (last {})",
                s.z,
                s.partial.render()
            ));
        }
    }
    let pass = failures.is_empty();
    Ok(VerificationReport {
        orbit: orbit.clone(),
        beta_at_orbit: own,
        margins,
        min_margin,
        min_margin_orbit,
        a_o,
        g_sum,
        samples,
        m_max,
        failures,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub index: usize,
    pub h_sup: Value,
    pub h_norm: Value,
    pub pass: bool,
    pub min_margin: Value,
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    /// Factor applied to both caps; `1` is the theorem's regime.
    pub inflation: f64,
    pub trials: Vec<TrialOutcome>,
    pub worst_margin: Value,
    pub failures: usize,
    pub all_pass: bool,
}

impl SweepReport {
    pub fn to_json(&self) -> Json {
        json!({
            "inflation": self.inflation,
            "trials": self.trials.len(),
            "failures": self.failures,
            "all_pass": self.all_pass,
            "worst_margin": self.worst_margin.render(),
            "outcomes": self.trials.iter().map(|t| json!({
                "index": t.index,
                "h_sup": t.h_sup.render(),
                "h_norm": t.h_norm.render(),
                "pass": t.pass,
                "min_margin": t.min_margin.render(),
                "first_failure": t.first_failure,
            })).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOptions {
    pub trials: usize,
    pub inflation: f64,
    pub seed: u64,
    /// Cylinder depth of random `h` on shifts.
    pub depth: usize,
    pub verify: VerifyOptions,
}

/// Runs [`verify_unique_minimizer`] for random `h` drawn inside the budget
/// ball (scaled by `inflation`). Trial `i` uses its own stream of the seeded
/// generator, so results do not depend on scheduling.
pub fn stability_sweep(
    system: &SystemDescriptor,
    u: &Observable,
    weight: &Weight,
    cert: &SubActionCertificate,
    budget: &PerturbationBudget,
    opts: &SweepOptions,
) -> Result<SweepReport> {
    let eps = budget.inputs.epsilon.as_exact().cloned().expect("epsilon is exact");
    let alpha = budget.inputs.alpha;
    let sup_cap = budget.h_sup_cap.to_f64() * opts.inflation;
    let norm_cap = budget.h_norm_cap.to_f64() * opts.inflation;
    let run = |index: &usize| -> Result<TrialOutcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(*index as u64);
        let h = random_perturbation(system, alpha, sup_cap, norm_cap, opts.depth, &mut rng)?;
        let hc = h.certificate(system, alpha)?;
        let checked = if opts.inflation <= 1.0 { Some(budget) } else { None };
        let p = build_perturbed(system, u, &eps, &budget.orbit, alpha, &h, checked)?;
        let verify = VerifyOptions {
            seed: rng.gen(),
            exec: Exec::Sequential,
            ..opts.verify.clone()
        };
        let r = verify_unique_minimizer(system, &p, weight, cert, &verify)?;
        Ok(TrialOutcome {
            index: *index,
            h_sup: hc.sup_norm.clone(),
            h_norm: hc.norm(),
            pass: r.pass,
            min_margin: r.min_margin,
            first_failure: r.failures.first().cloned(),
        })
    };
    let indices: Vec<usize> = (0..opts.trials).collect();
    let trials = opts.verify.exec.try_map(&indices, run)?;
    let worst_margin = trials
        .iter()
        .map(|t| t.min_margin.clone())
        .reduce(Value::min)
        .unwrap_or(Value::Approx(f64::INFINITY));
    let failures = trials.iter().filter(|t| !t.pass).count();
    Ok(SweepReport {
        inflation: opts.inflation,
        all_pass: failures == 0,
        trials,
        worst_margin,
        failures,
    })
}

/// A deliberately bad perturbation `h = A(d^α(·, O') − d^α(·, O))`, which
/// lowers the competitor `O'` and raises `O`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdversarialProbe {
    pub competitor: PeriodicOrbit,
    pub amplitude: Rational,
    pub h_sup: Value,
    pub h_norm: Value,
    /// Whether `‖h‖₀` exceeds the inflated sup cap.
    pub outside_inflated: bool,
    pub report: VerificationReport,
}

impl AdversarialProbe {
    pub fn to_json(&self) -> Json {
        json!({
            "competitor": self.competitor.to_string(),
            "amplitude": format_rational(&self.amplitude),
            "h_sup": self.h_sup.render(),
            "h_norm": self.h_norm.render(),
            "outside_inflated": self.outside_inflated,
            "pass": self.report.pass,
            "failures": self.report.failures,
        })
    }
}

/// Doubles the amplitude from `ε` until verification fails with `h` outside
/// the `inflation`-scaled sup cap, or the amplitude passes `2^20 ε`.
#[allow(clippy::too_many_arguments)]
pub fn adversarial_probe(
    system: &SystemDescriptor,
    u: &Observable,
    weight: &Weight,
    cert: &SubActionCertificate,
    budget: &PerturbationBudget,
    competitor: &PeriodicOrbit,
    inflation: f64,
    verify: &VerifyOptions,
) -> Result<AdversarialProbe> {
    let eps = budget.inputs.epsilon.as_exact().cloned().expect("epsilon is exact");
    let alpha = budget.inputs.alpha;
    let mut amplitude = eps.clone();
    let limit = &eps * int(1 << 20);
    loop {
        let h = Observable::Sum(vec![
            Observable::dist_to_orbit(competitor.points.clone(), alpha, amplitude.clone()),
            Observable::dist_to_orbit(budget.orbit.points.clone(), alpha, -amplitude.clone()),
        ]);
        let hc = h.certificate(system, alpha)?;
        let p = build_perturbed(system, u, &eps, &budget.orbit, alpha, &h, None)?;
        let report = verify_unique_minimizer(system, &p, weight, cert, verify)?;
        let outside = hc.sup_norm.to_f64() > budget.h_sup_cap.to_f64() * inflation;
        if (!report.pass && outside) || amplitude >= limit {
            return Ok(AdversarialProbe {
                competitor: competitor.clone(),
                amplitude,
                h_sup: hc.sup_norm.clone(),
                h_norm: hc.norm(),
                outside_inflated: outside,
                report,
            });
        }
        amplitude *= int(2);
    }
}

/// `ε = 1/10` as an exact rational, the default perturbation size.
pub fn default_epsilon() -> Rational {
    rat(1, 10)
}
