//! Discrete Poisson problems `−Δ_h v = 1_Ω − ϑ` on `Q_L` under Dirichlet,
//! Neumann, periodic and free-space conditions, with the cell-centered
//! 7-point Laplacian.

mod free_space;
mod io;
mod spectral;

pub use free_space::lattice_green;
pub use io::{read_fld, write_fld};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{volume, VoxelSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
    Periodic,
    FreeSpace,
}

impl BoundaryCondition {
    pub const ALL: [BoundaryCondition; 4] = [
        BoundaryCondition::Dirichlet,
        BoundaryCondition::Neumann,
        BoundaryCondition::Periodic,
        BoundaryCondition::FreeSpace,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BoundaryCondition::Dirichlet => "D",
            BoundaryCondition::Neumann => "N",
            BoundaryCondition::Periodic => "P",
            BoundaryCondition::FreeSpace => "inf",
        }
    }
}

/// Cell-centered samples on a centered cube of side `l` with `n` cells per
/// side. Free-space potentials live on an enlarged grid whose central
/// `n − 2·pad` cells per side cover the original box.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub l: f64,
    pub n: usize,
    pub pad: usize,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(l: f64, n: usize) -> Self {
        ScalarField { l, n, pad: 0, values: vec![0.0; n * n * n] }
    }

    /// Samples `f` at the cell centers.
    pub fn sample<F: Fn([f64; 3]) -> f64>(l: f64, n: usize, f: F) -> Self {
        let h = l / n as f64;
        let mut out = Self::zeros(l, n);
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    let x = [
                        -0.5 * l + (i as f64 + 0.5) * h,
                        -0.5 * l + (j as f64 + 0.5) * h,
                        -0.5 * l + (k as f64 + 0.5) * h,
                    ];
                    out.values[i + n * (j + n * k)] = f(x);
                }
            }
        }
        out
    }

    pub fn h(&self) -> f64 {
        self.l / self.n as f64
    }

    pub fn at(&self, c: [usize; 3]) -> f64 {
        self.values[c[0] + self.n * (c[1] + self.n * c[2])]
    }

    pub fn center(&self, c: [usize; 3]) -> [f64; 3] {
        let h = self.h();
        [
            -0.5 * self.l + (c[0] as f64 + 0.5) * h,
            -0.5 * self.l + (c[1] as f64 + 0.5) * h,
            -0.5 * self.l + (c[2] as f64 + 0.5) * h,
        ]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn check_finite(&self) -> Result<()> {
        if self.values.len() != self.n * self.n * self.n {
            return Err(Error::Precondition("field size does not match its grid".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition("field has non-finite samples".into()));
        }
        Ok(())
    }
}

/// `h²(−Δ_h v)` at every cell, with the ghost closure of `bc` (free space
/// treats cells outside the grid as absent, so only interior rows are
/// meaningful).
fn neg_laplacian_scaled(v: &ScalarField, bc: BoundaryCondition) -> Vec<f64> {
    let n = v.n;
    let mut out = vec![0.0; n * n * n];
    let idx = |i: usize, j: usize, k: usize| i + n * (j + n * k);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let c = [i, j, k];
                let vc = v.values[idx(i, j, k)];
                let mut acc = 0.0;
                for a in 0..3 {
                    for step in [-1i64, 1] {
                        let x = c[a] as i64 + step;
                        let nb = if x < 0 || x >= n as i64 {
                            match bc {
                                BoundaryCondition::Dirichlet => -vc,
                                BoundaryCondition::Neumann => vc,
                                BoundaryCondition::Periodic => {
                                    let mut d = c;
                                    d[a] = x.rem_euclid(n as i64) as usize;
                                    v.values[idx(d[0], d[1], d[2])]
                                }
                                BoundaryCondition::FreeSpace => 0.0,
                            }
                        } else {
                            let mut d = c;
                            d[a] = x as usize;
                            v.values[idx(d[0], d[1], d[2])]
                        };
                        acc += vc - nb;
                    }
                }
                out[idx(i, j, k)] = acc;
            }
        }
    }
    out
}

/// Max-norm residual `‖−Δ_h v − rhs‖` on the cells where the stencil is
/// defined.
pub fn residual(v: &ScalarField, rhs: &ScalarField, bc: BoundaryCondition) -> f64 {
    let h2 = v.h() * v.h();
    let lap = neg_laplacian_scaled(v, bc);
    let n = v.n;
    let mut worst: f64 = 0.0;
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                if bc == BoundaryCondition::FreeSpace
                    && [i, j, k].iter().any(|c| *c == 0 || *c == n - 1)
                {
                    continue;
                }
                let f = if bc == BoundaryCondition::FreeSpace {
                    embedded_rhs(rhs, v.pad, [i, j, k])
                } else {
                    rhs.values[i + n * (j + n * k)]
                };
                worst = worst.max((lap[i + n * (j + n * k)] / h2 - f).abs());
            }
        }
    }
    worst
}

fn embedded_rhs(rhs: &ScalarField, pad: usize, c: [usize; 3]) -> f64 {
    let m = rhs.n;
    if c.iter().all(|x| *x >= pad && *x < pad + m) {
        rhs.at([c[0] - pad, c[1] - pad, c[2] - pad])
    } else {
        0.0
    }
}

/// Solves `−Δ_h v = rhs`. Neumann and periodic solutions have zero mean;
/// free-space solutions are returned on the enlarged grid.
pub fn poisson_solve(rhs: &ScalarField, bc: BoundaryCondition) -> Result<ScalarField> {
    rhs.check_finite()?;
    if rhs.n < 4 {
        return Err(Error::GridTooCoarse(rhs.n));
    }
    let scale = rhs.max_abs();
    if matches!(bc, BoundaryCondition::Neumann | BoundaryCondition::Periodic) {
        let mean = rhs.mean();
        if mean.abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NonzeroMean(mean));
        }
    }
    let v = match bc {
        BoundaryCondition::FreeSpace => free_space::solve(rhs),
        _ => spectral::solve(rhs, bc),
    };
    let res = residual(&v, rhs, bc);
    if res > 1e-10 * scale {
        return Err(Error::NoConvergence(res / scale.max(f64::MIN_POSITIVE)));
    }
    Ok(v)
}

/// Potential of `1_Ω − ϑ` (free space: `1_Ω − ϑ1_{Q_L}`). The background is
/// taken as `|Ω|/L³`, which must lie within one voxel volume of `ϑL³`.
pub fn potential(set: &VoxelSet, theta: f64, bc: BoundaryCondition) -> Result<ScalarField> {
    if set.n() < 4 {
        return Err(Error::GridTooCoarse(set.n()));
    }
    let l = set.l();
    let h = set.h();
    let vol = volume(set);
    let expected = theta * l * l * l;
    if (vol - expected).abs() > h * h * h * (1.0 + 1e-9) {
        return Err(Error::Neutrality { volume: vol, expected });
    }
    let bg = set.count() as f64 / (set.n() * set.n() * set.n()) as f64;
    let rhs = ScalarField {
        l,
        n: set.n(),
        pad: 0,
        values: set.occupancy().iter().map(|b| if *b { 1.0 - bg } else { -bg }).collect(),
    };
    if rhs.max_abs() == 0.0 {
        let mut zero = ScalarField::zeros(l, set.n());
        if bc == BoundaryCondition::FreeSpace {
            zero = free_space::solve(&rhs);
        }
        return Ok(zero);
    }
    poisson_solve(&rhs, bc)
}

/// `½∫|∇v|²` in the discrete sense: `½h Σ_faces (Δv)²` with the closure of
/// `bc`; for free space the exterior beyond the enlarged grid is accounted
/// for exactly by the discrete Green identity of the harmonic exterior.
pub fn gradient_energy(v: &ScalarField, bc: BoundaryCondition) -> f64 {
    let n = v.n;
    let h = v.h();
    let idx = |c: [usize; 3]| c[0] + n * (c[1] + n * c[2]);
    let inner = |c: [usize; 3]| c.iter().all(|x| *x >= 1 && *x + 1 < n);
    let mut sum = 0.0;
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let c = [i, j, k];
                let vc = v.values[idx(c)];
                for a in 0..3 {
                    let mut d = c;
                    if c[a] + 1 < n {
                        d[a] += 1;
                        let vd = v.values[idx(d)];
                        let term = match bc {
                            BoundaryCondition::FreeSpace => match (inner(c), inner(d)) {
                                (true, true) => (vc - vd) * (vc - vd),
                                (true, false) => vc * (vc - vd),
                                (false, true) => vd * (vd - vc),
                                (false, false) => 0.0,
                            },
                            _ => (vc - vd) * (vc - vd),
                        };
                        sum += term;
                    } else {
                        match bc {
                            BoundaryCondition::Dirichlet => {}
                            BoundaryCondition::Periodic => {
                                d[a] = 0;
                                let vd = v.values[idx(d)];
                                sum += (vc - vd) * (vc - vd);
                            }
                            _ => {}
                        }
                    }
                    if bc == BoundaryCondition::Dirichlet {
                        if c[a] == 0 {
                            sum += 2.0 * vc * vc;
                        }
                        if c[a] + 1 == n {
                            sum += 2.0 * vc * vc;
                        }
                    }
                }
            }
        }
    }
    0.5 * h * sum
}
