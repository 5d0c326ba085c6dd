use std::sync::OnceLock;

use crate::kernels::{cell_correlation, Profile};
use crate::linalg::{hadamard, norm, Vec3};

/// Cell–cell interaction `W(d)` for integer displacements on an `n³` grid.
///
/// Displacements with `|d|∞ ≤ 2` use the exact correlation integral; farther
/// pairs use the midpoint value `h⁵ k(h|λ∘d|)`.
#[derive(Debug, Clone)]
pub struct CellKernel {
    n: usize,
    table: Vec<f64>,
}

const NEAR: usize = 3;

fn near_block(lambda: Vec3, profile: Profile) -> [f64; NEAR * NEAR * NEAR] {
    let mut out = [0.0; NEAR * NEAR * NEAR];
    for c in 0..NEAR {
        for b in 0..NEAR {
            for a in 0..NEAR {
                out[a + NEAR * (b + NEAR * c)] = cell_correlation(lambda, [a as i64, b as i64, c as i64], profile);
            }
        }
    }
    out
}

fn isotropic_coulomb_block() -> &'static [f64; NEAR * NEAR * NEAR] {
    static BLOCK: OnceLock<[f64; NEAR * NEAR * NEAR]> = OnceLock::new();
    BLOCK.get_or_init(|| near_block([1.0; 3], Profile::Coulomb))
}

impl CellKernel {
    pub fn coulomb(n: usize, h: f64, lambda: Vec3) -> Self {
        let near = if lambda == [1.0; 3] {
            *isotropic_coulomb_block()
        } else {
            near_block(lambda, Profile::Coulomb)
        };
        Self::build(n, h, lambda, Profile::Coulomb, &near)
    }

    /// Kernel `e^{−ω|x|}/|x|`.
    pub fn yukawa(n: usize, h: f64, omega: f64) -> Self {
        let profile = Profile::Yukawa(omega * h);
        let near = near_block([1.0; 3], profile);
        Self::build(n, h, [1.0; 3], profile, &near)
    }

    fn build(n: usize, h: f64, lambda: Vec3, profile: Profile, near: &[f64; NEAR * NEAR * NEAR]) -> Self {
        let h5 = h.powi(5);
        let mut table = vec![0.0; n * n * n];
        for c in 0..n {
            for b in 0..n {
                for a in 0..n {
                    let v = if a < NEAR && b < NEAR && c < NEAR {
                        near[a + NEAR * (b + NEAR * c)]
                    } else {
                        profile.at(norm(hadamard(lambda, [a as f64, b as f64, c as f64])))
                    };
                    table[a + n * (b + n * c)] = h5 * v;
                }
            }
        }
        CellKernel { n, table }
    }

    #[inline]
    pub fn at(&self, d: [i64; 3]) -> f64 {
        let n = self.n;
        self.table[d[0].unsigned_abs() as usize + n * (d[1].unsigned_abs() as usize + n * d[2].unsigned_abs() as usize)]
    }
}
