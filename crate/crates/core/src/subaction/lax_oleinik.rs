use num_bigint::BigInt;

use super::{SubAction, SubActionCertificate, ZeroSet};
use crate::dynamics::{SystemDescriptor, SystemKind};
use crate::error::{Error, Result};
use crate::numeric::{Rational, Value};
use crate::observables::{HolderCertificate, Observable, Weight};

/// Piecewise-linear function on the circle through `values[i]` at `i / n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn at(&self, x: f64) -> f64 {
        let n = self.values.len();
        let t = x.rem_euclid(1.0) * n as f64;
        let i = (t.floor() as usize).min(n - 1);
        let f = t - i as f64;
        self.values[i] * (1.0 - f) + self.values[(i + 1) % n] * f
    }

    /// Largest slope of the interpolant, its Lipschitz constant for the circle metric.
    pub fn lipschitz(&self) -> f64 {
        let n = self.values.len();
        (0..n)
            .map(|i| (self.values[(i + 1) % n] - self.values[i]).abs())
            .fold(0.0, f64::max)
            * n as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LaxOleinikOptions {
    /// Grid of `2^grid_log2` nodes.
    pub grid_log2: u32,
    pub max_iter: usize,
    /// Stop when successive iterates differ by less than this in sup norm.
    pub tol: f64,
    /// Grid nodes with `ū` below this form the zero set.
    pub tol_zero: f64,
    /// `ū >= -nonneg_tol` counts as nonnegative.
    pub nonneg_tol: f64,
    /// Largest `K` tried by the doubling ladder.
    pub max_k: usize,
}

impl Default for LaxOleinikOptions {
    fn default() -> Self {
        LaxOleinikOptions {
            grid_log2: 12,
            max_iter: 20_000,
            tol: 1e-10,
            tol_zero: 1e-6,
            nonneg_tol: 1e-8,
            max_k: 8,
        }
    }
}

fn map_degree(system: &SystemDescriptor) -> Result<usize> {
    match system.kind {
        SystemKind::CircleExpanding { k } => Ok(k as usize),
        _ => Err(Error::Unsupported(format!(
            "grid sub-actions are implemented for circle maps, not {}",
            system.name()
        ))),
    }
}

/// Min-plus fixed point `v = min_{T^K y = x} (v(y) + u_K(y) − β ψ_K(y))`,
/// renormalized to `min v = 0` after each sweep.
pub fn lax_oleinik_subaction(
    system: &SystemDescriptor,
    u: &Observable,
    weight: &Weight,
    beta: &Value,
    k: usize,
    opts: &LaxOleinikOptions,
) -> Result<SubActionCertificate> {
    let degree = map_degree(system)?;
    let fan = degree.checked_pow(k as u32).filter(|f| *f <= 1 << 12).ok_or_else(|| {
        Error::Unsupported(format!("{degree}^{k} inverse branches are too many"))
    })?;
    let n = 1usize << opts.grid_log2;
    let u_k = u.birkhoff_average_k(system, k);
    let psi_k = weight.psi.birkhoff_average_k(system, k);
    let b = beta.to_f64();
    let reduced = |x: f64| -> Result<f64> {
        Ok(u_k.evaluate_f64(system, &[x])? - b * psi_k.evaluate_f64(system, &[x])?)
    };

    // Preimages of node i: (i/n + j) / fan, at fractional grid position (i + j n) / fan.
    let mut cost = Vec::with_capacity(n * fan);
    let mut slot = Vec::with_capacity(n * fan);
    for i in 0..n {
        for j in 0..fan {
            let num = i + j * n;
            let y = num as f64 / (fan * n) as f64;
            cost.push(reduced(y)?);
            slot.push((num / fan, (num % fan) as f64 / fan as f64));
        }
    }

    let mut v = vec![0.0f64; n];
    let mut next = vec![0.0f64; n];
    let mut residual = f64::INFINITY;
    let mut shift = 0.0;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        for i in 0..n {
            let mut best = f64::INFINITY;
            for j in 0..fan {
                let idx = i * fan + j;
                let (p, f) = slot[idx];
                let vy = v[p] * (1.0 - f) + v[(p + 1) % n] * f;
                best = best.min(vy + cost[idx]);
            }
            next[i] = best;
        }
        shift = next.iter().cloned().fold(f64::INFINITY, f64::min);
        residual = 0.0;
        for i in 0..n {
            next[i] -= shift;
            residual = f64::max(residual, (next[i] - v[i]).abs());
        }
        std::mem::swap(&mut v, &mut next);
        if residual < opts.tol {
            break;
        }
    }
    if residual >= opts.tol {
        return Err(Error::NotConverged { residual, iterations });
    }

    let grid = GridFunction { values: v };
    let mut cert = SubActionCertificate {
        beta: beta.clone(),
        k,
        v: SubAction::Grid(grid.clone()),
        u_k,
        psi_k,
        ubar: None,
        ubar_min: Value::zero(),
        zero_set: ZeroSet::Grid {
            points: Vec::new(),
            tolerance: opts.tol_zero,
        },
        witness: None,
        additive_constant: shift,
        residual,
        iterations,
    };
    let ubar = grid_ubar(&cert, &grid, system)?;
    let min = ubar.iter().cloned().fold(f64::INFINITY, f64::min);
    cert.ubar_min = Value::Approx(min);
    cert.zero_set = ZeroSet::Grid {
        points: (0..n)
            .filter(|&i| ubar[i] < opts.tol_zero)
            .map(|i| Rational::new(BigInt::from(i), BigInt::from(n)))
            .collect(),
        tolerance: opts.tol_zero,
    };
    Ok(cert)
}

/// `ū` at the grid nodes; `T^K` maps node `i` to node `k^K i mod n`.
fn grid_ubar(cert: &SubActionCertificate, grid: &GridFunction, system: &SystemDescriptor) -> Result<Vec<f64>> {
    let degree = map_degree(system)?;
    let n = grid.values.len();
    let b = cert.beta.to_f64();
    let fan = degree.pow(cert.k as u32);
    (0..n)
        .map(|i| {
            let x = i as f64 / n as f64;
            let w = cert.u_k.evaluate_f64(system, &[x])? - b * cert.psi_k.evaluate_f64(system, &[x])?;
            Ok(w + grid.values[i] - grid.values[(fan * i) % n])
        })
        .collect()
}

pub(super) fn grid_ubar_min(cert: &SubActionCertificate, grid: &GridFunction, system: &SystemDescriptor) -> Result<f64> {
    Ok(grid_ubar(cert, grid, system)?.into_iter().fold(f64::INFINITY, f64::min))
}

/// Bounds for `ū = w + v − v∘T^K` with `w = u_K − β ψ_K`: the Lipschitz
/// constant adds up as `Lip(w) + (1 + k^K) Lip(v)`, and node values extend to
/// the whole circle within half a grid step of that slope.
pub(super) fn grid_ubar_certificate(
    cert: &SubActionCertificate,
    grid: &GridFunction,
    system: &SystemDescriptor,
    alpha: f64,
) -> Result<HolderCertificate> {
    let degree = map_degree(system)?;
    let fan = degree.pow(cert.k as u32) as f64;
    let lip_u = cert.u_k.certificate(system, 1.0)?.seminorm.to_f64();
    let lip_psi = cert.psi_k.certificate(system, 1.0)?.seminorm.to_f64();
    let lip = lip_u + cert.beta.to_f64().abs() * lip_psi + (1.0 + fan) * grid.lipschitz();
    let nodes = grid_ubar(cert, grid, system)?;
    let slack = lip / (2.0 * nodes.len() as f64);
    let lower = nodes.iter().cloned().fold(f64::INFINITY, f64::min) - slack;
    let upper = nodes.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + slack;
    Ok(HolderCertificate {
        alpha,
        lower: Value::Approx(lower),
        upper: Value::Approx(upper),
        sup_norm: Value::Approx(lower.abs().max(upper.abs())),
        seminorm: Value::Approx(lip * 0.5f64.powf(1.0 - alpha)),
        exact: false,
    })
}

/// Runs the iteration for `K = 1, 2, 4, ...` up to `opts.max_k` and returns
/// the first certificate with `ū >= -nonneg_tol`, or the last attempt.
pub fn subaction_with_ladder(
    system: &SystemDescriptor,
    u: &Observable,
    weight: &Weight,
    beta: &Value,
    opts: &LaxOleinikOptions,
) -> Result<SubActionCertificate> {
    let mut k = 1;
    let mut last = None;
    while k <= opts.max_k {
        match lax_oleinik_subaction(system, u, weight, beta, k, opts) {
            Ok(c) if c.ubar_min.to_f64() >= -opts.nonneg_tol => return Ok(c),
            Ok(c) => last = Some(Ok(c)),
            Err(e @ Error::NotConverged { .. }) => last = Some(Err(e)),
            Err(e) => return Err(e),
        }
        k *= 2;
    }
    last.expect("at least one rung")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::int;
    use crate::observables::Expr;

    #[test]
    fn zero_observable_has_zero_subaction() {
        let c = SystemDescriptor::circle(2);
        let opts = LaxOleinikOptions {
            grid_log2: 8,
            ..Default::default()
        };
        let cert = lax_oleinik_subaction(&c, &Observable::zero(), &Weight::unit(&c), &Value::zero(), 1, &opts).unwrap();
        let SubAction::Grid(g) = &cert.v else { panic!() };
        assert!(g.values.iter().all(|&x| x == 0.0));
        assert_eq!(cert.ubar_min.to_f64(), 0.0);
    }

    #[test]
    fn negative_cosine() {
        let c = SystemDescriptor::circle(2);
        let u = Observable::ClosedForm(Expr::neg_cos());
        let w = Weight::unit(&c);
        let cert = lax_oleinik_subaction(&c, &u, &w, &Value::Exact(int(-1)), 1, &Default::default()).unwrap();
        assert!(cert.ubar_min.to_f64() >= -1e-8, "{}", cert.ubar_min);
        // The fixed point lies in the zero set; so does an optimal preimage of every node.
        assert!(cert.zero_set.contains(&crate::dynamics::Point::Circle(int(0))));
        let ZeroSet::Grid { points, .. } = &cert.zero_set else { panic!() };
        assert!(points.len() >= (1 << 12) / 2);
        // Too large a beta forces a negative region; too small lifts ū above zero.
        let high = lax_oleinik_subaction(&c, &u, &w, &Value::Approx(-0.9), 1, &Default::default()).unwrap();
        assert!(high.ubar_min.to_f64() < -1e-3);
        let low = lax_oleinik_subaction(&c, &u, &w, &Value::Approx(-1.1), 1, &Default::default()).unwrap();
        assert!(low.ubar_min.to_f64() > 1e-3);
    }
}
