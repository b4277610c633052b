//! 2x2 integer matrices for toral automorphisms.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mat2(pub [[i64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1, 0], [0, 1]]);

    pub fn det(&self) -> i64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> i64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn mul(&self, other: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &other.0);
        let mut out = [[0i64; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }

    pub fn pow(&self, n: u32) -> Mat2 {
        let mut acc = Mat2::IDENTITY;
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn minus_identity(&self) -> Mat2 {
        let m = self.0;
        Mat2([[m[0][0] - 1, m[0][1]], [m[1][0], m[1][1] - 1]])
    }

    /// Adjugate, so that `self * adj = det * I`.
    pub fn adjugate(&self) -> Mat2 {
        let m = self.0;
        Mat2([[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]])
    }

    /// Max-row-sum operator norm (the norm induced by the max metric).
    pub fn inf_norm(&self) -> i64 {
        self.0
            .iter()
            .map(|r| r[0].abs() + r[1].abs())
            .max()
            .unwrap_or(0)
    }
}

/// Spectral data of a hyperbolic 2x2 matrix with `det = ±1`, in floating point.
#[derive(Clone, Copy, Debug)]
pub struct HyperbolicSplitting {
    /// Expanding eigenvalue modulus, > 1.
    pub expanding: f64,
    /// Condition number `‖E‖∞ ‖E⁻¹‖∞` of the eigenbasis with max-normalized columns.
    pub condition: f64,
}

impl HyperbolicSplitting {
    pub fn of(m: &Mat2) -> Self {
        let tr = m.trace() as f64;
        let det = m.det() as f64;
        let disc = (tr * tr - 4.0 * det).sqrt();
        let (l1, l2) = ((tr + disc) / 2.0, (tr - disc) / 2.0);
        let (lu, ls) = if l1.abs() > l2.abs() { (l1, l2) } else { (l2, l1) };
        let [[a, b], [c, d]] = m.0.map(|r| r.map(|x| x as f64));
        let eigvec = |lam: f64| {
            let v = if b.abs() + (lam - a).abs() > c.abs() + (lam - d).abs() {
                [b, lam - a]
            } else {
                [lam - d, c]
            };
            let s = v[0].abs().max(v[1].abs());
            [v[0] / s, v[1] / s]
        };
        let (vu, vs) = (eigvec(lu), eigvec(ls));
        let e = [[vu[0], vs[0]], [vu[1], vs[1]]];
        let e_det = e[0][0] * e[1][1] - e[0][1] * e[1][0];
        let inv = [
            [e[1][1] / e_det, -e[0][1] / e_det],
            [-e[1][0] / e_det, e[0][0] / e_det],
        ];
        let norm = |x: [[f64; 2]; 2]| {
            x.iter()
                .map(|r| r[0].abs() + r[1].abs())
                .fold(0.0, f64::max)
        };
        HyperbolicSplitting {
            expanding: lu.abs(),
            condition: norm(e) * norm(inv),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cat_map_algebra() {
        let a = Mat2([[2, 1], [1, 1]]);
        assert_eq!(a.det(), 1);
        assert_eq!(a.pow(2), Mat2([[5, 3], [3, 2]]));
        assert_eq!(a.mul(&a.adjugate()), Mat2([[1, 0], [0, 1]]));
        assert_eq!(a.inf_norm(), 3);
        let s = HyperbolicSplitting::of(&a);
        let golden_sq = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((s.expanding - golden_sq).abs() < 1e-12);
        assert!(s.condition >= 1.0);
    }
}
