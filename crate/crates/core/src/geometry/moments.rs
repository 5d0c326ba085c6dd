use serde::{Deserialize, Serialize};

use super::{CuboidSpec, VoxelSet};
use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};

/// Charge, dipole and traceless quadrupole `Pᵢⱼ = ∫(3xᵢxⱼ − δᵢⱼ|x|²)ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultipoleMoments {
    pub q: f64,
    pub d: Vec3,
    pub p: Mat3,
}

impl MultipoleMoments {
    pub const ZERO: MultipoleMoments = MultipoleMoments { q: 0.0, d: [0.0; 3], p: [[0.0; 3]; 3] };

    /// Moments of a uniform density on a cuboid.
    pub fn cuboid(c: &CuboidSpec, density: f64) -> Self {
        let v = density * c.volume();
        let mut second = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                second[i][j] = v * c.center[i] * c.center[j];
            }
            second[i][i] += v * c.sides[i] * c.sides[i] / 12.0;
        }
        Self::from_raw(v, [v * c.center[0], v * c.center[1], v * c.center[2]], &second)
    }

    /// From `∫ρ`, `∫xρ` and `∫xxᵀρ`.
    pub fn from_raw(q: f64, first: Vec3, second: &Mat3) -> Self {
        let tr = second[0][0] + second[1][1] + second[2][2];
        let mut p = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                p[i][j] = 3.0 * second[i][j] - if i == j { tr } else { 0.0 };
            }
        }
        symmetrize(&mut p);
        let drift = (p[0][0] + p[1][1] + p[2][2]) / 3.0;
        for (i, row) in p.iter_mut().enumerate() {
            row[i] -= drift;
        }
        MultipoleMoments { q, d: first, p }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut p = self.p;
        for i in 0..3 {
            for j in 0..3 {
                p[i][j] += o.p[i][j];
            }
        }
        MultipoleMoments {
            q: self.q + o.q,
            d: [self.d[0] + o.d[0], self.d[1] + o.d[1], self.d[2] + o.d[2]],
            p,
        }
    }

    pub fn scaled(&self, t: f64) -> Self {
        let mut p = self.p;
        p.iter_mut().flatten().for_each(|x| *x *= t);
        MultipoleMoments { q: self.q * t, d: [self.d[0] * t, self.d[1] * t, self.d[2] * t], p }
    }

    pub fn p_max(&self) -> f64 {
        self.p.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn d_max(&self) -> f64 {
        self.d.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn trace(&self) -> f64 {
        self.p[0][0] + self.p[1][1] + self.p[2][2]
    }
}

fn symmetrize(p: &mut Mat3) {
    for i in 0..3 {
        for j in (i + 1)..3 {
            let m = 0.5 * (p[i][j] + p[j][i]);
            p[i][j] = m;
            p[j][i] = m;
        }
    }
}

/// Uniform background `theta·1_cuboid` subtracted from `1_Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Background {
    pub theta: f64,
    pub cuboid: CuboidSpec,
}

/// Moments of `1_Ω − ϑ1_background`, or of `1_Ω` alone when `background` is
/// `None`. Per-voxel integration is exact for all three moments.
pub fn moments(set: &VoxelSet, background: Option<&Background>) -> Result<MultipoleMoments> {
    let h = set.h();
    let h3 = h * h * h;
    let mut q = 0.0;
    let mut first = [0.0; 3];
    let mut second = [[0.0; 3]; 3];
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for c in set.occupied() {
        let x = set.center(c);
        q += h3;
        for i in 0..3 {
            first[i] += h3 * x[i];
            for j in 0..3 {
                second[i][j] += h3 * x[i] * x[j];
            }
            second[i][i] += h3 * h * h / 12.0;
            lo[i] = lo[i].min(x[i] - 0.5 * h);
            hi[i] = hi[i].max(x[i] + 0.5 * h);
        }
    }
    let own = MultipoleMoments::from_raw(q, first, &second);
    match background {
        None => Ok(own),
        Some(bg) => {
            if !(0.0..=1.0).contains(&bg.theta) {
                return Err(Error::OutOfRange(format!("theta must lie in [0, 1], got {}", bg.theta)));
            }
            if q > 0.0 && !bg.cuboid.contains_box(lo, hi, 1e-12 * set.l()) {
                return Err(Error::Precondition("background cuboid does not contain the set".into()));
            }
            Ok(own.add(&MultipoleMoments::cuboid(&bg.cuboid, -bg.theta)))
        }
    }
}
