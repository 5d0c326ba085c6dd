//! Energy functionals on voxel sets and the ball-ansatz reference constants.

mod kernel_table;

pub use kernel_table::CellKernel;

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::fields::{self, BoundaryCondition};
use crate::geometry::{perimeter, VoxelSet};
use crate::linalg::Vec3;

/// Split of the interaction into per-cell, near-pair and far-pair parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parts {
    #[serde(rename = "self")]
    pub self_part: f64,
    pub near: f64,
    pub far: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub perimeter: f64,
    pub interaction: f64,
    pub total: f64,
    pub parts: Option<Parts>,
}

impl EnergyBreakdown {
    pub fn new(perimeter: f64, interaction: f64) -> Self {
        EnergyBreakdown { perimeter, interaction, total: perimeter + interaction, parts: None }
    }

    pub fn with_parts(perimeter: f64, parts: Parts) -> Self {
        let interaction = parts.self_part + parts.near + parts.far;
        EnergyBreakdown { perimeter, interaction, total: perimeter + interaction, parts: Some(parts) }
    }

    /// Perimeter plus the per-cell interaction, i.e. the sum of the energies
    /// of the cells taken in isolation.
    pub fn self_energy(&self) -> Option<f64> {
        self.parts.map(|p| self.perimeter + p.self_part)
    }
}

/// Ball-ansatz optimum of the energy per volume `3/r + (4π/5)r²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceConstants {
    pub r_star: f64,
    pub a_star: f64,
    pub e_star: f64,
}

impl ReferenceConstants {
    pub const LABEL: &'static str = "ball ansatz";

    pub fn ball_ansatz() -> Self {
        let r_star = (15.0 / (8.0 * PI)).cbrt();
        ReferenceConstants { r_star, a_star: 2.5, e_star: 4.5 / r_star }
    }
}

impl Default for ReferenceConstants {
    fn default() -> Self {
        Self::ball_ansatz()
    }
}

pub fn ball_energy_analytic(r: f64) -> Result<EnergyBreakdown> {
    if !(r > 0.0) {
        return Err(Error::OutOfRange(format!("ball radius must be positive, got {r}")));
    }
    Ok(EnergyBreakdown::new(4.0 * PI * r * r, 16.0 * PI * PI / 15.0 * r.powi(5)))
}

/// `E(B_r)/|B_r| = 3/r + (4π/5)r²`.
pub fn ball_energy_per_volume(r: f64) -> f64 {
    3.0 / r + 0.8 * PI * r * r
}

/// `½ Σ_{a,b} ρ_a ρ_b W(a − b)` by direct summation.
pub fn signed_interaction_direct(rho: &[f64], n: usize, kernel: &CellKernel) -> f64 {
    let cells: Vec<(usize, [i64; 3], f64)> = rho
        .iter()
        .enumerate()
        .filter(|(_, r)| **r != 0.0)
        .map(|(i, r)| (i, [(i % n) as i64, ((i / n) % n) as i64, (i / (n * n)) as i64], *r))
        .collect();
    let w0 = kernel.at([0, 0, 0]);
    let rows: Vec<f64> = cells
        .par_iter()
        .enumerate()
        .map(|(ia, (_, ca, ra))| {
            let mut acc = 0.0;
            for (_, cb, rb) in &cells[ia + 1..] {
                acc += rb * kernel.at([cb[0] - ca[0], cb[1] - ca[1], cb[2] - ca[2]]);
            }
            ra * (0.5 * ra * w0 + acc)
        })
        .collect();
    rows.iter().sum()
}

/// Same quantity as [`signed_interaction_direct`] via FFT convolution.
pub fn signed_interaction_convolution(rho: &[f64], n: usize, kernel: &CellKernel) -> f64 {
    let m = 2 * n;
    let fft = Fft3::new([m; 3]);
    let zero = Complex64::new(0.0, 0.0);
    let mut a = vec![zero; m * m * m];
    let mut k = vec![zero; m * m * m];
    for z in 0..n {
        for y in 0..n {
            for x in 0..n {
                a[x + m * (y + m * z)] = Complex64::new(rho[x + n * (y + n * z)], 0.0);
            }
        }
    }
    let wrap = |x: usize| -> Option<i64> {
        if x < n {
            Some(x as i64)
        } else if x > n {
            Some(x as i64 - m as i64)
        } else {
            None
        }
    };
    for z in 0..m {
        for y in 0..m {
            for x in 0..m {
                if let (Some(dx), Some(dy), Some(dz)) = (wrap(x), wrap(y), wrap(z)) {
                    k[x + m * (y + m * z)] = Complex64::new(kernel.at([dx, dy, dz]), 0.0);
                }
            }
        }
    }
    fft.forward(&mut a);
    fft.forward(&mut k);
    for (u, v) in a.iter_mut().zip(&k) {
        *u *= v;
    }
    fft.inverse(&mut a);
    let mut e = 0.0;
    for z in 0..n {
        for y in 0..n {
            for x in 0..n {
                e += rho[x + n * (y + n * z)] * a[x + m * (y + m * z)].re;
            }
        }
    }
    0.5 * e
}

fn signed_density(set: &VoxelSet, theta: f64) -> Vec<f64> {
    set.occupancy().iter().map(|b| if *b { 1.0 - theta } else { -theta }).collect()
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::OutOfRange(format!("theta must lie in [0, 1], got {theta}")));
    }
    Ok(())
}

/// Summation strategy for the cell double sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Path {
    Direct,
    Convolution,
}

impl Path {
    fn default_for(n: usize) -> Self {
        if n <= 16 {
            Path::Direct
        } else {
            Path::Convolution
        }
    }
}

fn interaction(rho: &[f64], n: usize, kernel: &CellKernel, path: Path) -> f64 {
    match path {
        Path::Direct => signed_interaction_direct(rho, n, kernel),
        Path::Convolution => signed_interaction_convolution(rho, n, kernel),
    }
}

/// Whole-space energy `Per(Ω) + ½∬_{Ω×Ω} 1/|x−y|`.
pub fn whole_space_energy(set: &VoxelSet) -> Result<EnergyBreakdown> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let kernel = CellKernel::coulomb(set.n(), set.h(), [1.0; 3]);
    let rho = signed_density(set, 0.0);
    Ok(EnergyBreakdown::new(perimeter(set), signed_interaction_direct(&rho, set.n(), &kernel)))
}

/// Boxed energy `Per(Ω) + ½∬_{Q_L×Q_L} (1_Ω−ϑ)(1_Ω−ϑ)/|x−y|`.
pub fn box_energy(set: &VoxelSet, theta: f64) -> Result<EnergyBreakdown> {
    box_energy_with(set, theta, Path::default_for(set.n()))
}

pub fn box_energy_with(set: &VoxelSet, theta: f64, path: Path) -> Result<EnergyBreakdown> {
    check_theta(theta)?;
    let kernel = CellKernel::coulomb(set.n(), set.h(), [1.0; 3]);
    let rho = signed_density(set, theta);
    Ok(EnergyBreakdown::new(perimeter(set), interaction(&rho, set.n(), &kernel, path)))
}

/// Energy of the stretched set `λΩ` in the cuboid `λQ_L`, with `set`
/// describing `Ω ⊂ Q_L`.
pub fn anisotropic_energy(set: &VoxelSet, theta: f64, lambda: Vec3) -> Result<EnergyBreakdown> {
    check_theta(theta)?;
    let det = lambda[0] * lambda[1] * lambda[2];
    if lambda.iter().any(|l| !(*l > 0.0)) || (det - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!("stretch factors must have unit product, got {lambda:?}")));
    }
    let h = set.h();
    let faces = set.perimeter_faces_by_axis();
    let per: f64 = (0..3).map(|a| faces[a] as f64 * h * h / lambda[a]).sum();
    let kernel = CellKernel::coulomb(set.n(), h, lambda);
    let rho = signed_density(set, theta);
    Ok(EnergyBreakdown::new(per, interaction(&rho, set.n(), &kernel, Path::default_for(set.n()))))
}

/// `Per(Ω) + ½∫|∇v|²` with `v` the potential under the boundary condition.
pub fn bc_energy(set: &VoxelSet, theta: f64, bc: BoundaryCondition) -> Result<EnergyBreakdown> {
    let v = fields::potential(set, theta, bc)?;
    Ok(EnergyBreakdown::new(perimeter(set), fields::gradient_energy(&v, bc)))
}
