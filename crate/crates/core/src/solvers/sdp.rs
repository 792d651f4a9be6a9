//! Alternating-direction augmented Lagrangian method for small dense SDPs
//! (Wen, Goldfarb and Yin). Solves `min ⟨C,X⟩ s.t. ⟨A_i,X⟩ = b_i, X ⪰ 0`
//! and its dual `max bᵀy s.t. C − Σ y_i A_i = S ⪰ 0`.

use crate::error::{Error, Result};
use crate::solvers::lp::Sense;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub const SDP_LIMIT: usize = 64;
pub const MAX_ITERATIONS: usize = 50_000;
pub const TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct DenseSdp {
    pub objective: DMatrix<f64>,
    pub constraints: Vec<(DMatrix<f64>, f64)>,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// `⟨C, X⟩` at the returned primal point, in the requested sense.
    pub primal_value: f64,
    /// Dual objective `bᵀy`, in the requested sense.
    pub dual_value: f64,
    pub x: DMatrix<f64>,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

fn inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.component_mul(b).sum()
}

/// Splits a symmetric matrix into its PSD part `V₊`.
fn psd_part(v: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(v.clone());
    let mut lambda = eig.eigenvalues.clone();
    for l in lambda.iter_mut() {
        *l = l.max(0.0);
    }
    let q = &eig.eigenvectors;
    q * DMatrix::from_diagonal(&lambda) * q.transpose()
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

pub fn sdp_solve(p: &DenseSdp, sense: Sense) -> Result<SdpSolution> {
    let n = p.objective.nrows();
    if n > SDP_LIMIT {
        return Err(Error::TooLarge {
            what: "SDP",
            size: n,
            limit: SDP_LIMIT,
        });
    }
    if p.objective.ncols() != n || p.constraints.iter().any(|(a, _)| a.shape() != (n, n)) {
        return Err(Error::DimensionMismatch("SDP matrices must be square of equal size".into()));
    }
    let c = match sense {
        Sense::Min => p.objective.clone(),
        Sense::Max => -p.objective.clone(),
    };
    let m = p.constraints.len();
    let a: Vec<&DMatrix<f64>> = p.constraints.iter().map(|(a, _)| a).collect();
    let b = DVector::from_iterator(m, p.constraints.iter().map(|(_, b)| *b));
    let gram = DMatrix::from_fn(m, m, |i, j| inner(a[i], a[j]));
    let chol = gram
        .clone()
        .cholesky()
        .ok_or_else(|| Error::DimensionMismatch("SDP constraint matrices are dependent".into()))?;
    let op = |x: &DMatrix<f64>| DVector::from_iterator(m, a.iter().map(|ai| inner(ai, x)));
    let adjoint = |y: &DVector<f64>| {
        let mut out = DMatrix::zeros(n, n);
        for (ai, yi) in a.iter().zip(y.iter()) {
            out += *ai * *yi;
        }
        out
    };

    let b_norm = 1.0 + b.norm();
    let c_norm = 1.0 + c.norm();
    let mut x = DMatrix::<f64>::zeros(n, n);
    let mut s = DMatrix::<f64>::zeros(n, n);
    let mut y: DVector<f64>;
    let mut mu = 1.0;
    let (mut pinf, mut dinf) = (f64::INFINITY, f64::INFINITY);
    let (mut primal_heavy, mut dual_heavy) = (0, 0);

    for it in 1..=MAX_ITERATIONS {
        let rhs = (op(&x) - &b) * mu + op(&(&s - &c));
        y = -chol.solve(&rhs);
        let aty = adjoint(&y);
        dinf = (&c - &aty - &s).norm() / c_norm;
        let v = &c - &aty - &x * mu;
        s = psd_part(&v);
        x = (&s - &v) / mu;
        pinf = (op(&x) - &b).norm() / b_norm;

        if pinf < TOLERANCE && dinf < TOLERANCE {
            let primal = inner(&c, &x);
            let dual = b.dot(&y);
            let (primal_value, dual_value) = match sense {
                Sense::Min => (primal, dual),
                Sense::Max => (-primal, -dual),
            };
            return Ok(SdpSolution {
                primal_value,
                dual_value,
                x: (&x + x.transpose()) * 0.5,
                iterations: it,
                primal_residual: pinf,
                dual_residual: dinf,
            });
        }

        // balance the two residuals by adjusting the penalty
        if pinf < 0.5 * dinf {
            primal_heavy += 1;
            dual_heavy = 0;
        } else if pinf > 2.0 * dinf {
            dual_heavy += 1;
            primal_heavy = 0;
        }
        if primal_heavy >= 20 {
            mu = (mu * 0.5).max(1e-4);
            primal_heavy = 0;
        } else if dual_heavy >= 20 {
            mu = (mu * 2.0).min(1e4);
            dual_heavy = 0;
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        residual: pinf.max(dinf),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_on_two_by_two() {
        let p = DenseSdp {
            objective: DMatrix::identity(2, 2),
            constraints: vec![(DMatrix::identity(2, 2), 1.0)],
        };
        let s = sdp_solve(&p, Sense::Max).unwrap();
        assert!((s.primal_value - 1.0).abs() < 1e-6);
        assert!(min_eigenvalue(&s.x) > -1e-9);
    }

    #[test]
    fn largest_eigenvalue() {
        // max ⟨C,X⟩ with Tr X = 1 is λ_max(C)
        let c = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let p = DenseSdp {
            objective: c,
            constraints: vec![(DMatrix::identity(2, 2), 1.0)],
        };
        let s = sdp_solve(&p, Sense::Max).unwrap();
        assert!((s.primal_value - 3.0).abs() < 1e-6);
        assert!((s.dual_value - 3.0).abs() < 1e-6);
        let s = sdp_solve(&p, Sense::Min).unwrap();
        assert!((s.primal_value - 1.0).abs() < 1e-6);
    }
}
