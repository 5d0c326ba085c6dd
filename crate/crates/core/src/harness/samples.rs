//! Seeded random inputs shared by the sweeps and the verification suite.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geometry::VoxelSet;
use crate::linalg::{mat_vec, rotation_zyz, transpose, Mat3};
use crate::upperbound::Shape;

/// Independent stream `index` of the generator family `tag` under `seed`.
pub fn sample_rng(seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index);
    rng
}

pub fn random_rotation<R: Rng>(rng: &mut R) -> Mat3 {
    let alpha = rng.gen_range(0.0..2.0 * PI);
    let beta = rng.gen_range(-1.0f64..1.0).acos();
    let gamma = rng.gen_range(0.0..2.0 * PI);
    rotation_zyz(alpha, beta, gamma)
}

/// Rotated, off-center ellipsoid with semi-axes in `[0.8, 1.2]`.
pub fn random_ellipsoid<R: Rng>(rng: &mut R) -> Shape {
    let semi_axes = [rng.gen_range(0.8..1.2), rng.gen_range(0.8..1.2), rng.gen_range(0.8..1.2)];
    let rotation = random_rotation(rng);
    let center = [rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)];
    Shape::Ellipsoid { semi_axes, rotation, center }
}

/// Voxelized random ellipsoid in a box of side 4 with `n` cells per axis.
pub fn random_blob<R: Rng>(rng: &mut R, n: usize) -> Result<Shape> {
    let a = [rng.gen_range(0.9..1.3), rng.gen_range(0.9..1.3), rng.gen_range(0.9..1.3)];
    let rot = random_rotation(rng);
    let rt = transpose(&rot);
    let c = [rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)];
    let set = VoxelSet::voxelize(4.0, n, |x| {
        let u = mat_vec(&rt, [x[0] - c[0], x[1] - c[1], x[2] - c[2]]);
        (u[0] / a[0]).powi(2) + (u[1] / a[1]).powi(2) + (u[2] / a[2]).powi(2) < 1.0
    })?;
    Ok(Shape::Voxels(set))
}
