#![allow(dead_code)]

use clusterfuse::densmat::{CMatrix, DensityMatrix};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations on the real
/// embedding `[[A, -B], [B, A]]` of `H = A + iB`. Every eigenvalue of `H`
/// appears twice in the embedding; the result is sorted ascending.
pub fn jacobi_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let n = h.nrows();
    let mut a = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            a[(i, j)] = z.re;
            a[(i + n, j + n)] = z.re;
            a[(i, j + n)] = -z.im;
            a[(i + n, j)] = z.im;
        }
    }
    let size = 2 * n;
    for _sweep in 0..100 {
        let off: f64 = (0..size)
            .flat_map(|i| (0..size).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..size {
            for q in p + 1..size {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..size {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..size {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut diag: Vec<f64> = (0..size).map(|i| a[(i, i)]).collect();
    diag.sort_by(f64::total_cmp);
    diag.into_iter().step_by(2).collect()
}

/// A random mixed state of `qubits` qubits: `G G^dagger / tr` for a random
/// complex `G` with `rank` columns.
pub fn mixed_state(qubits: usize, rank: usize) -> impl Strategy<Value = DensityMatrix> {
    let dim = 1usize << qubits;
    prop::collection::vec(-1.0f64..1.0, 2 * dim * rank).prop_map(move |xs| {
        let g = CMatrix::from_fn(dim, rank, |i, j| {
            let k = 2 * (i * rank + j);
            Complex64::new(xs[k], xs[k + 1])
        });
        let m = &g * g.adjoint();
        let tr = m.trace().re.max(1e-300);
        DensityMatrix::from_matrix(m.unscale(tr)).expect("G G^dagger is Hermitian")
    })
}

pub fn strength() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), Just(1.0), 0.0f64..=1.0]
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
