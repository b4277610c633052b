use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value as Json};

use ergopt::construction::{bq_scan, construct_good_orbit, construct_with_bq_seed, ConstructionOptions, ConstructionTrace};
use ergopt::dynamics::{validate_pseudo_orbit, Point, SystemDescriptor};
use ergopt::enumeration::{beta_bruteforce, enumerate_orbits, orbit_statistics, OrbitRow, PeriodicOrbit};
use ergopt::numeric::{format_rational, int, Rational};
use ergopt::observables::{Observable, Weight};
use ergopt::par::Exec;
use ergopt::perturbation::{
    approximate_z, build_perturbed, compute_budget, stability_sweep, verify_unique_minimizer, PerturbationBudget,
    Perturbed, SweepOptions, VerificationReport, VerifyOptions,
};
use ergopt::shadowing::{random_pseudo_orbit, shadow};
use ergopt::subaction::{certify, min_cycle_ratio, verify_certificate, SubActionCertificate};

use crate::config::ExperimentConfig;
use crate::CliError;

/// What a subcommand produced: a JSON result, CSV tables and a verdict.
pub struct Outcome {
    pub result: Json,
    pub tables: Vec<(String, String)>,
    pub pass: bool,
}

fn csv_table<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

fn depth(cfg: &ExperimentConfig) -> Result<usize, CliError> {
    cfg.usize_or("n", 12)
}

/// `u` and `ψ`, both required.
fn data(cfg: &ExperimentConfig, s: &SystemDescriptor) -> Result<(Observable, Weight), CliError> {
    let u = cfg.observable("u", s)?;
    let w = cfg.weight(s)?;
    Ok((u, w))
}

pub fn enumerate(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let s = cfg.system()?;
    let n = cfg.usize_or("n", 8)?;
    let alpha = cfg.alpha()?;
    let u = cfg.optional_observable("u", &s)?.unwrap_or_else(Observable::zero);
    let w = match cfg.get("psi") {
        Some(_) => cfg.weight(&s)?,
        None => Weight::unit(&s),
    };
    let z = cfg.points("z", &s)?;
    let orbits = enumerate_orbits(&s, n)?;
    let rows = orbits
        .iter()
        .map(|o| Ok(OrbitRow::new(o, &orbit_statistics(&s, &u, &w, o, z.as_deref(), alpha)?)))
        .collect::<Result<Vec<_>, ergopt::Error>>()?;
    let mut per_period = vec![0usize; n + 1];
    for o in &orbits {
        per_period[o.period] += 1;
    }
    Ok(Outcome {
        result: json!({
            "n": n,
            "orbits": orbits.len(),
            "per_period": per_period[1..].to_vec(),
        }),
        tables: vec![("orbits".into(), csv_table(&rows)?)],
        pass: true,
    })
}

pub fn beta(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let s = cfg.system()?;
    let (u, w) = data(cfg, &s)?;
    let n = depth(cfg)?;
    let bf = beta_bruteforce(&s, &u, &w, n, Exec::default())?;
    let exact = if s.is_shift() && u.as_locally_constant(&s).is_some() && w.psi.as_locally_constant(&s).is_some() {
        Some(min_cycle_ratio(&s, &u, &w)?)
    } else {
        None
    };
    let (beta, witness, method) = match &exact {
        Some(m) => (format_rational(&m.beta), m.witness.to_string(), "min_cycle_ratio"),
        None => (bf.beta.render(), bf.argmin.first().map(|o| o.to_string()).unwrap_or_default(), "brute_force"),
    };
    let agrees = exact.as_ref().is_none_or(|m| bf.beta == ergopt::numeric::Value::Exact(m.beta.clone()));
    Ok(Outcome {
        result: json!({
            "beta": beta,
            "witness": witness,
            "method": method,
            "brute_force": bf.to_json(),
            "oracle_agrees": agrees,
        }),
        tables: vec![],
        pass: agrees,
    })
}

fn certificate(cfg: &ExperimentConfig, s: &SystemDescriptor, u: &Observable, w: &Weight) -> Result<SubActionCertificate, CliError> {
    Ok(certify(s, u, w, depth(cfg)?, Exec::default())?)
}

pub fn subaction(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let s = cfg.system()?;
    let (u, w) = data(cfg, &s)?;
    let cert = certificate(cfg, &s, &u, &w)?;
    let check = verify_certificate(&cert, &s, &u, &w, depth(cfg)?, Exec::default())?;
    Ok(Outcome {
        result: json!({ "certificate": cert.to_json(), "check": check.to_json() }),
        tables: vec![],
        pass: check.passed(),
    })
}

#[derive(Serialize)]
struct ShadowRow {
    index: usize,
    length: usize,
    eta: String,
    period: usize,
    start: String,
    max_error: String,
    bound: String,
}

pub fn shadow_cmd(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let s = cfg.system()?;
    let pseudo = match cfg.get("pseudo_orbit") {
        Some(p) => {
            let points = p
                .get("points")
                .and_then(Json::as_array)
                .ok_or_else(|| CliError::config("pseudo_orbit.points", "must be an array of points"))?
                .iter()
                .map(|v| Point::from_json(v, &s).map_err(|e| CliError::config("pseudo_orbit.points", e)))
                .collect::<Result<Vec<_>, _>>()?;
            let eta = match p.get("eta") {
                Some(Json::String(e)) => ergopt::numeric::parse_rational(e).map_err(|e| CliError::config("pseudo_orbit.eta", e))?,
                _ => return Err(CliError::config("pseudo_orbit.eta", "must be a rational string")),
            };
            vec![validate_pseudo_orbit(&s, points, eta)?]
        }
        None => {
            let count = cfg.usize_or("count", 100)?;
            let length = cfg.usize_or("length", 8)?;
            let eta = cfg.rational_or("eta", &format_rational(&(&s.asp.delta / int(2))))?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..count)
                .map(|_| random_pseudo_orbit(&s, length, &eta, &mut rng))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (i, p) in pseudo.iter().enumerate() {
        match shadow(&s, p) {
            Ok(sh) => rows.push(ShadowRow {
                index: i,
                length: p.len(),
                eta: format_rational(&p.eta),
                period: sh.orbit.period,
                start: sh.start.to_string(),
                max_error: format_rational(&sh.max_error),
                bound: format_rational(&sh.bound),
            }),
            Err(e @ ergopt::Error::EtaTooLarge { .. }) => return Err(e.into()),
            Err(e) => failures.push(json!({"index": i, "error": e.to_string()})),
        }
    }
    let single = (pseudo.len() == 1).then(|| shadow(&s, &pseudo[0]).ok().map(|sh| sh.to_json())).flatten();
    Ok(Outcome {
        result: json!({
            "pseudo_orbits": pseudo.len(),
            "shadowed": rows.len(),
            "failures": failures,
            "shadowing": single,
        }),
        tables: vec![("shadowing".into(), csv_table(&rows)?)],
        pass: failures.is_empty(),
    })
}

/// `Z` from the config, or approximated from the certificate of `(u, ψ)`.
fn reference_set(
    cfg: &ExperimentConfig,
    s: &SystemDescriptor,
    certified: Option<(&Observable, &Weight, &SubActionCertificate)>,
) -> Result<Vec<Point>, CliError> {
    if let Some(z) = cfg.points("z", s)? {
        if z.is_empty() {
            return Err(CliError::config("z", "must not be empty"));
        }
        return Ok(z);
    }
    match certified {
        Some((u, w, cert)) => Ok(approximate_z(s, u, w, cert, depth(cfg)?, Exec::default())?),
        None => {
            let (u, w) = data(cfg, s).map_err(|_| CliError::config("z", "missing, and no u/psi to derive it from"))?;
            let cert = certificate(cfg, s, &u, &w)?;
            Ok(approximate_z(s, &u, &w, &cert, depth(cfg)?, Exec::default())?)
        }
    }
}

fn construction(cfg: &ExperimentConfig, s: &SystemDescriptor, z: &[Point]) -> Result<ConstructionTrace, CliError> {
    let opts = ConstructionOptions {
        seed_k: cfg.usize_or("seed_k", 3)? as u32,
        strict: cfg.get("strict").and_then(Json::as_bool).unwrap_or(false),
    };
    let alpha = cfg.alpha()?;
    let l_hat = cfg.f64_or("l_hat", 10.0)?;
    match cfg.point("seed_orbit", s)? {
        Some(p) => {
            let seed = PeriodicOrbit::from_point(s, &p).map_err(|e| CliError::config("seed_orbit", e))?;
            Ok(construct_good_orbit(s, z, alpha, l_hat, &seed, &opts)?)
        }
        None => Ok(construct_with_bq_seed(s, z, alpha, l_hat, cfg.usize_or("seed_n", 8)?, &opts)?),
    }
}

#[derive(Serialize)]
struct StageRow {
    stage: usize,
    period: usize,
    orbit: String,
    gap: String,
    deviation: String,
    ratio: String,
    action: String,
}

fn stage_rows(trace: &ConstructionTrace) -> Vec<StageRow> {
    trace
        .stages
        .iter()
        .enumerate()
        .map(|(i, st)| StageRow {
            stage: i,
            period: st.orbit.period,
            orbit: st.orbit.to_string(),
            gap: format_rational(&st.gap),
            deviation: st.deviation.render(),
            ratio: st.ratio.render(),
            action: serde_json::to_value(st.action).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
        })
        .collect()
}

pub fn construct(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let s = cfg.system()?;
    let z = reference_set(cfg, &s, None)?;
    let trace = construction(cfg, &s, &z)?;
    Ok(Outcome {
        result: json!({
            "z": z.iter().map(Point::to_json).collect::<Vec<_>>(),
            "trace": trace.to_json(),
        }),
        tables: vec![("stages".into(), csv_table(&stage_rows(&trace))?)],
        pass: trace.achieved,
    })
}

/// Everything `perturb` and `verify` share.
struct Setup {
    s: SystemDescriptor,
    u: Observable,
    w: Weight,
    cert: SubActionCertificate,
    z: Vec<Point>,
    orbit: PeriodicOrbit,
    epsilon: Rational,
    alpha: f64,
}

fn setup(cfg: &ExperimentConfig) -> Result<Setup, CliError> {
    let s = cfg.system()?;
    let (u, w) = data(cfg, &s)?;
    let cert = certificate(cfg, &s, &u, &w)?;
    let z = reference_set(cfg, &s, Some((&u, &w, &cert)))?;
    let orbit = match cfg.point("orbit", &s)? {
        Some(p) => PeriodicOrbit::from_point(&s, &p).map_err(|e| CliError::config("orbit", e))?,
        None => PeriodicOrbit::from_point(&s, &z[0])?,
    };
    let epsilon = cfg.rational_or("epsilon", "1/10")?;
    if epsilon <= Rational::from_integer(0.into()) {
        return Err(CliError::config("epsilon", "must be positive"));
    }
    Ok(Setup {
        alpha: cfg.alpha()?,
        s,
        u,
        w,
        cert,
        z,
        orbit,
        epsilon,
    })
}

fn perturbed(cfg: &ExperimentConfig, st: &Setup) -> Result<(PerturbationBudget, Perturbed), CliError> {
    let budget = compute_budget(&st.s, &st.w, &st.orbit, &st.epsilon, st.alpha, &st.cert, &st.z)?;
    let h = cfg.optional_observable("h", &st.s)?.unwrap_or_else(Observable::zero);
    let p = build_perturbed(&st.s, &st.u, &st.epsilon, &st.orbit, st.alpha, &h, Some(&budget))?;
    Ok((budget, p))
}

pub fn perturb(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let st = setup(cfg)?;
    let (budget, p) = perturbed(cfg, &st)?;
    Ok(Outcome {
        result: json!({
            "budget": budget.to_json(),
            "observable": p.observable.to_json(),
        }),
        tables: vec![],
        pass: true,
    })
}

fn verify_options(cfg: &ExperimentConfig) -> Result<VerifyOptions, CliError> {
    Ok(VerifyOptions {
        n: depth(cfg)?,
        samples: cfg.usize_or("samples", 100)?,
        m_max: cfg.get("m_max").map(|_| cfg.usize_or("m_max", 0)).transpose()?,
        seed: cfg.seed,
        exec: Exec::default(),
    })
}

fn verification(cfg: &ExperimentConfig, st: &Setup, p: &Perturbed) -> Result<VerificationReport, CliError> {
    Ok(verify_unique_minimizer(&st.s, p, &st.w, &st.cert, &verify_options(cfg)?)?)
}

pub fn verify(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let st = setup(cfg)?;
    let (budget, p) = perturbed(cfg, &st)?;
    let report = verification(cfg, &st, &p)?;
    Ok(Outcome {
        result: json!({
            "budget": budget.to_json(),
            "verification": report.to_json(),
        }),
        tables: vec![("margins".into(), csv_table(&report.margin_rows())?)],
        pass: report.pass,
    })
}

pub fn bq_scan_cmd(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let s = cfg.system()?;
    let z = cfg.points("z", &s)?.ok_or_else(|| CliError::config("z", "missing required field"))?;
    let k = cfg.usize_or("k", 2)? as u32;
    let from = cfg.usize_or("from", 2)?;
    let to = cfg.usize_or("to", 12)?;
    if from > to {
        return Err(CliError::config("from", "must not exceed \"to\""));
    }
    let rows = bq_scan(&s, &z, cfg.alpha()?, k, from..=to, Exec::default())?;
    Ok(Outcome {
        result: json!({ "k": k, "rows": rows }),
        tables: vec![("bq_scan".into(), csv_table(&rows)?)],
        pass: true,
    })
}

pub fn pipeline(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let st = setup(cfg)?;
    let n = depth(cfg)?;
    let bf = beta_bruteforce(&st.s, &st.u, &st.w, n, Exec::default())?;
    let check = verify_certificate(&st.cert, &st.s, &st.u, &st.w, n, Exec::default())?;
    let trace = construction(cfg, &st.s, &st.z)?;
    let st = Setup {
        orbit: match cfg.point("orbit", &st.s)? {
            Some(_) => st.orbit.clone(),
            None => trace.final_orbit().clone(),
        },
        ..st
    };
    let (budget, p) = perturbed(cfg, &st)?;
    let report = verification(cfg, &st, &p)?;
    let sweep = stability_sweep(
        &st.s,
        &st.u,
        &st.w,
        &st.cert,
        &budget,
        &SweepOptions {
            trials: cfg.usize_or("trials", 20)?,
            inflation: cfg.f64_or("inflation", 1.0)?,
            seed: cfg.seed,
            depth: cfg.usize_or("h_depth", 3)?,
            verify: verify_options(cfg)?,
        },
    )?;
    let pass = check.passed() && trace.achieved && report.pass && sweep.all_pass;
    Ok(Outcome {
        result: json!({
            "beta": bf.to_json(),
            "certificate": st.cert.to_json(),
            "certificate_check": check.to_json(),
            "z": st.z.iter().map(Point::to_json).collect::<Vec<_>>(),
            "construction": trace.to_json(),
            "budget": budget.to_json(),
            "verification": report.to_json(),
            "sweep": sweep.to_json(),
            "unique_minimizer": report.pass.then(|| st.orbit.to_string()),
        }),
        tables: vec![
            ("stages".into(), csv_table(&stage_rows(&trace))?),
            ("margins".into(), csv_table(&report.margin_rows())?),
        ],
        pass,
    })
}
