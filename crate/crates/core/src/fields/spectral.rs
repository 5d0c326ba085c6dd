//! Fast diagonalization of the Dirichlet, Neumann and periodic closures.

use std::f64::consts::PI;

use super::{BoundaryCondition, ScalarField};

/// Orthonormal eigenvectors (as columns, `phi[j * n + k]`) and eigenvalues of
/// the one-dimensional operator `h²(−Δ_h)`.
fn eigenbasis(n: usize, bc: BoundaryCondition) -> (Vec<f64>, Vec<f64>) {
    let mut phi = vec![0.0; n * n];
    let mut eig = vec![0.0; n];
    let nf = n as f64;
    for k in 0..n {
        let (lam, f): (f64, Box<dyn Fn(usize) -> f64>) = match bc {
            BoundaryCondition::Dirichlet => {
                let kk = (k + 1) as f64;
                (2.0 - 2.0 * (PI * kk / nf).cos(), Box::new(move |j| (PI * kk * (j as f64 + 0.5) / nf).sin()))
            }
            BoundaryCondition::Neumann => {
                let kk = k as f64;
                (2.0 - 2.0 * (PI * kk / nf).cos(), Box::new(move |j| (PI * kk * (j as f64 + 0.5) / nf).cos()))
            }
            BoundaryCondition::Periodic => {
                // 0, cos 1, sin 1, cos 2, sin 2, ...
                let m = k.div_ceil(2) as f64;
                let lam = 2.0 - 2.0 * (2.0 * PI * m / nf).cos();
                if k == 0 {
                    (lam, Box::new(|_| 1.0))
                } else if k % 2 == 1 {
                    (lam, Box::new(move |j| (2.0 * PI * m * j as f64 / nf).cos()))
                } else {
                    (lam, Box::new(move |j| (2.0 * PI * m * j as f64 / nf).sin()))
                }
            }
            BoundaryCondition::FreeSpace => unreachable!("free space is not diagonalized"),
        };
        let col: Vec<f64> = (0..n).map(&f).collect();
        let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
        for j in 0..n {
            phi[j * n + k] = col[j] / norm;
        }
        eig[k] = lam;
    }
    (phi, eig)
}

/// Applies `phi` (or its transpose) along one axis of an `n³` array.
fn apply_axis(data: &[f64], n: usize, phi: &[f64], axis: usize, transpose: bool) -> Vec<f64> {
    let mut out = vec![0.0; data.len()];
    let stride = [1, n, n * n][axis];
    let mut line = vec![0.0; n];
    for base in 0..n * n {
        // base enumerates the two other coordinates
        let (p, q) = (base % n, base / n);
        let start = match axis {
            0 => n * (p + n * q),
            1 => p + n * n * q,
            _ => p + n * q,
        };
        for (j, slot) in line.iter_mut().enumerate() {
            *slot = data[start + j * stride];
        }
        for r in 0..n {
            let mut acc = 0.0;
            for (j, x) in line.iter().enumerate() {
                let m = if transpose { phi[j * n + r] } else { phi[r * n + j] };
                acc += m * x;
            }
            out[start + r * stride] = acc;
        }
    }
    out
}

pub(super) fn solve(rhs: &ScalarField, bc: BoundaryCondition) -> ScalarField {
    let n = rhs.n;
    let h = rhs.h();
    let (phi, eig) = eigenbasis(n, bc);
    let mut c = rhs.values.clone();
    for axis in 0..3 {
        c = apply_axis(&c, n, &phi, axis, true);
    }
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let lam = eig[i] + eig[j] + eig[k];
                let slot = &mut c[i + n * (j + n * k)];
                *slot = if lam.abs() < 1e-14 { 0.0 } else { *slot * h * h / lam };
            }
        }
    }
    for axis in 0..3 {
        c = apply_axis(&c, n, &phi, axis, false);
    }
    ScalarField { l: rhs.l, n, pad: 0, values: c }
}
