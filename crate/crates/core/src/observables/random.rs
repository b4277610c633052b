use num_traits::Zero;
use rand::Rng;

use super::{Expr, LocallyConstant, Observable};
use crate::dynamics::{SystemDescriptor, SystemKind};
use crate::error::Result;
use crate::numeric::{int, rat, rational_lower, Rational};

const COEFF_DENOM: i64 = 1000;
const TRIG_DEGREE: i64 = 3;

fn coeff(rng: &mut impl Rng) -> Rational {
    rat(rng.gen_range(-COEFF_DENOM..=COEFF_DENOM), COEFF_DENOM)
}

/// A random `h` with `‖h‖₀ < sup_cap` and `‖h‖_α < norm_cap` according to
/// its own certificate.
///
/// Shifts get a locally constant table of the given depth; the circle and the
/// torus get a trigonometric polynomial. The raw sample is rescaled by a
/// uniformly drawn fraction of the largest admissible factor, so draws fill
/// the ball rather than its boundary.
pub fn random_perturbation(
    system: &SystemDescriptor,
    alpha: f64,
    sup_cap: f64,
    norm_cap: f64,
    depth: usize,
    rng: &mut impl Rng,
) -> Result<Observable> {
    let raw = match &system.kind {
        SystemKind::FullShift { .. } | SystemKind::Sft { .. } => Observable::LocallyConstant(
            LocallyConstant::from_fn(system, depth.max(1), |_| coeff(rng)),
        ),
        SystemKind::CircleExpanding { .. } => {
            let mut terms = Vec::new();
            for j in 1..=TRIG_DEGREE {
                let arg = Expr::Mul(Box::new(Expr::Const(int(j))), Box::new(Expr::Var(0)));
                terms.push(trig_term(coeff(rng), Expr::Cos2Pi(Box::new(arg.clone()))));
                terms.push(trig_term(coeff(rng), Expr::Sin2Pi(Box::new(arg))));
            }
            Observable::ClosedForm(sum_exprs(terms))
        }
        SystemKind::TorusCat { .. } => {
            let mut terms = Vec::new();
            for (i, j) in [(1, 0), (0, 1), (1, 1), (1, -1)] {
                let arg = Expr::Add(
                    Box::new(Expr::Mul(Box::new(Expr::Const(int(i))), Box::new(Expr::Var(0)))),
                    Box::new(Expr::Mul(Box::new(Expr::Const(int(j))), Box::new(Expr::Var(1)))),
                );
                terms.push(trig_term(coeff(rng), Expr::Cos2Pi(Box::new(arg))));
            }
            Observable::ClosedForm(sum_exprs(terms))
        }
    };
    let cert = raw.certificate(system, alpha)?;
    let (sup, norm) = (cert.sup_norm.to_f64(), cert.norm().to_f64());
    if sup == 0.0 {
        return Ok(Observable::zero());
    }
    let largest = (sup_cap / sup).min(norm_cap / norm);
    // Strictly inside the ball even after rounding the factor down.
    let fraction: f64 = rng.gen_range(0.01..0.99);
    let factor = rational_lower(largest * fraction);
    if factor <= Rational::zero() {
        return Ok(Observable::zero());
    }
    Ok(match raw {
        Observable::LocallyConstant(lc) => Observable::LocallyConstant(LocallyConstant {
            depth: lc.depth,
            table: lc.table.into_iter().map(|(w, v)| (w, v * &factor)).collect(),
        }),
        other => Observable::Scale(factor, Box::new(other)),
    })
}

fn trig_term(c: Rational, f: Expr) -> Expr {
    Expr::Mul(Box::new(Expr::Const(c)), Box::new(f))
}

fn sum_exprs(terms: Vec<Expr>) -> Expr {
    terms
        .into_iter()
        .reduce(|a, b| Expr::Add(Box::new(a), Box::new(b)))
        .expect("at least one term")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_respect_caps() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let systems = [
            SystemDescriptor::circle(2),
            SystemDescriptor::full_shift(2),
            SystemDescriptor::torus_cat([[2, 1], [1, 1]]).unwrap(),
        ];
        for s in &systems {
            for _ in 0..5 {
                let h = random_perturbation(s, 1.0, 0.01, 0.5, 2, &mut rng).unwrap();
                let cert = h.certificate(s, 1.0).unwrap();
                assert!(cert.sup_norm.to_f64() < 0.01, "{}", s.name());
                assert!(cert.norm().to_f64() < 0.5, "{}", s.name());
            }
        }
    }
}
