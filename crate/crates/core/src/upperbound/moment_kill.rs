use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{diameter, moments, volume, CuboidSpec, MultipoleMoments, VoxelSet};
use crate::linalg::{conjugate, jacobi_eigen, mat_mul, mat_vec, norm, orthogonality_defect, sub, Mat3, Vec3, IDENTITY};
use crate::quadrature::gauss;

/// Template shapes accepted by [`moment_kill`].
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Voxels(VoxelSet),
    /// `center + rotation·diag(semi_axes)·B₁`.
    Ellipsoid { semi_axes: Vec3, rotation: Mat3, center: Vec3 },
}

impl Shape {
    pub fn ball(radius: f64) -> Self {
        Shape::Ellipsoid { semi_axes: [radius; 3], rotation: IDENTITY, center: [0.0; 3] }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Shape::Voxels(s) => volume(s),
            Shape::Ellipsoid { semi_axes: a, .. } => 4.0 * PI / 3.0 * a[0] * a[1] * a[2],
        }
    }

    pub fn diameter(&self) -> Result<f64> {
        match self {
            Shape::Voxels(s) => diameter(s),
            Shape::Ellipsoid { semi_axes: a, .. } => Ok(2.0 * a.iter().fold(0.0f64, |m, x| m.max(*x))),
        }
    }

    fn moments(&self) -> Result<MultipoleMoments> {
        match self {
            Shape::Voxels(s) => moments(s, None),
            Shape::Ellipsoid { semi_axes, rotation, center } => {
                let v = self.volume();
                Ok(ellipsoid_moments(v, semi_axes, rotation, *center))
            }
        }
    }

    /// Quadrature cloud with weights summing to the volume.
    fn cloud(&self) -> Vec<(Vec3, f64)> {
        match self {
            Shape::Voxels(s) => {
                let h = s.h();
                let g = gauss(2);
                let mut out = Vec::with_capacity(8 * s.count());
                for c in s.occupied() {
                    let x = s.center(c);
                    for (dz, wz) in g.on(-0.5 * h, 0.5 * h) {
                        for (dy, wy) in g.on(-0.5 * h, 0.5 * h) {
                            for (dx, wx) in g.on(-0.5 * h, 0.5 * h) {
                                out.push(([x[0] + dx, x[1] + dy, x[2] + dz], wx * wy * wz));
                            }
                        }
                    }
                }
                out
            }
            Shape::Ellipsoid { semi_axes: a, rotation, center } => {
                let (gr, gt) = (gauss(6), gauss(8));
                let nphi = 16;
                let mut out = Vec::with_capacity(6 * 8 * nphi);
                for (r, wr) in gr.on(0.0, 1.0) {
                    for (ct, wt) in gt.on(-1.0, 1.0) {
                        let st = (1.0 - ct * ct).sqrt();
                        for k in 0..nphi {
                            let ph = 2.0 * PI * (k as f64 + 0.5) / nphi as f64;
                            let u = [a[0] * r * st * ph.cos(), a[1] * r * st * ph.sin(), a[2] * r * ct];
                            let x = mat_vec(rotation, u);
                            let w = wr * wt * r * r * 2.0 * PI / nphi as f64 * a[0] * a[1] * a[2];
                            out.push(([x[0] + center[0], x[1] + center[1], x[2] + center[2]], w));
                        }
                    }
                }
                out
            }
        }
    }
}

fn ellipsoid_moments(v: f64, a: &Vec3, rotation: &Mat3, center: Vec3) -> MultipoleMoments {
    let d = [[a[0] * a[0] / 5.0, 0.0, 0.0], [0.0, a[1] * a[1] / 5.0, 0.0], [0.0, 0.0, a[2] * a[2] / 5.0]];
    let inner = conjugate(rotation, &d);
    let mut second = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            second[i][j] = v * (inner[i][j] + center[i] * center[j]);
        }
    }
    MultipoleMoments::from_raw(v, center.map(|c| v * c), &second)
}

/// Translation, rotation and cell aspect ratios that cancel charge, dipole
/// and quadrupole of `1_Ω₀ − ϑ1_{Q_𝐥}`, `Ω₀ = U(Ω + y)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentKillResult {
    pub u: Mat3,
    pub y: Vec3,
    pub lambda: Vec3,
    pub eta0: f64,
    pub c1: f64,
    pub c2: f64,
    pub x: f64,
    pub l0: f64,
    pub theta: f64,
    pub label: String,
    /// Quadrature cloud of `Ω₀`.
    #[serde(skip)]
    pub points: Vec<Vec3>,
    #[serde(skip)]
    pub weights: Vec<f64>,
    #[serde(skip)]
    ball: bool,
}

impl MomentKillResult {
    pub fn is_ball(&self) -> bool {
        self.ball
    }

    pub fn cell(&self) -> CuboidSpec {
        CuboidSpec { sides: self.lambda.map(|l| l * self.l0), center: [0.0; 3] }
    }
}

/// `p(X) = X³ − c₁X² − c₂²X − 1 + c₁c₂²`.
fn cubic(c1: f64, c2: f64, x: f64) -> (f64, f64) {
    (x * x * x - c1 * x * x - c2 * c2 * x - 1.0 + c1 * c2 * c2, 3.0 * x * x - 2.0 * c1 * x - c2 * c2)
}

/// The real root of `p` in `[½, 3/2]` by Newton from 1, falling back to
/// bisection whenever a step leaves the bracket.
pub fn cubic_root_near_one(c1: f64, c2: f64) -> Result<f64> {
    if !(c1.abs() <= 0.3 && c2.abs() <= 0.3) {
        return Err(Error::Precondition(format!("reduced constants ({c1}, {c2}) outside |c| <= 0.3")));
    }
    let (mut lo, mut hi) = (0.5, 1.5);
    let (plo, phi) = (cubic(c1, c2, lo).0, cubic(c1, c2, hi).0);
    if plo * phi > 0.0 {
        return Err(Error::NoRoot { c1, c2 });
    }
    let mut x = 1.0;
    for _ in 0..200 {
        let (p, dp) = cubic(c1, c2, x);
        if p == 0.0 {
            return Ok(x);
        }
        if (p < 0.0) == (plo < 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - p / dp;
        let next = if dp != 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= 1e-16 * x.abs() || hi - lo <= 1e-16 {
            x = next;
            break;
        }
        x = next;
    }
    Ok(x)
}

/// Centers `shape` at its center of mass, rotates its quadrupole to diagonal
/// form and picks the cell aspect ratios that cancel it against the
/// background `ϑ` on a cuboid of volume `l0³`.
pub fn moment_kill(shape: &Shape, l0: f64, theta: f64) -> Result<MomentKillResult> {
    let mass = shape.volume();
    if !(mass > 0.0) {
        return Err(Error::EmptySet);
    }
    if (mass - theta * l0.powi(3)).abs() > 1e-6 * mass {
        return Err(Error::Precondition(format!("shape volume {mass} differs from theta*l0^3 = {}", theta * l0.powi(3))));
    }
    let eta0 = l0 / shape.diameter()?;
    if eta0 < 5.0 {
        return Err(Error::OutOfRange(format!("l0/diam = {eta0} below 5")));
    }
    let m = shape.moments()?;
    let com = m.d.map(|d| d / m.q);
    // quadrupole about the center of mass
    let r2 = com.iter().map(|c| c * c).sum::<f64>();
    let mut p = m.p;
    for i in 0..3 {
        for j in 0..3 {
            p[i][j] -= m.q * (3.0 * com[i] * com[j] - if i == j { r2 } else { 0.0 });
        }
    }
    let (values, u) = jacobi_eigen(&p);
    let scale = mass * l0 * l0;
    let c1 = 6.0 * (values[0] + values[1]) / scale;
    let c2 = 2.0 * (values[0] - values[1]) / scale;
    let x = cubic_root_near_one(c1, c2)?;
    if x + c2 <= 0.0 || x - c2 <= 0.0 {
        return Err(Error::Precondition("aspect ratios outside the admissible regime".into()));
    }
    let l1 = (x + c2).sqrt();
    let l2 = (x - c2).sqrt();
    let lambda = [l1, l2, 1.0 / (l1 * l2)];
    let y = com.map(|c| -c);
    let (points, weights): (Vec<Vec3>, Vec<f64>) =
        shape.cloud().into_iter().map(|(pt, w)| (mat_vec(&u, sub(pt, com)), w)).unzip();
    let ball = matches!(shape, Shape::Ellipsoid { semi_axes, .. } if semi_axes[0] == semi_axes[1] && semi_axes[1] == semi_axes[2]);
    let label = match shape {
        Shape::Voxels(_) => "voxels".to_string(),
        Shape::Ellipsoid { .. } => "ellipsoid".to_string(),
    };
    let result = MomentKillResult { u, y, lambda, eta0, c1, c2, x, l0, theta, label, points, weights, ball };
    let half = result.cell().sides.map(|s| 0.5 * s);
    if !within(shape, &result, half)? {
        return Err(Error::Containment("transformed shape does not fit its cell".into()));
    }
    Ok(result)
}

fn within(shape: &Shape, k: &MomentKillResult, half: Vec3) -> Result<bool> {
    Ok(match shape {
        Shape::Ellipsoid { semi_axes: a, rotation, center } => {
            let r = mat_mul(&k.u, rotation);
            let c = mat_vec(&k.u, [center[0] + k.y[0], center[1] + k.y[1], center[2] + k.y[2]]);
            (0..3).all(|i| {
                let reach = (0..3).map(|j| (r[i][j] * a[j]).powi(2)).sum::<f64>().sqrt();
                c[i].abs() + reach <= half[i]
            })
        }
        Shape::Voxels(s) => {
            let h = s.h();
            s.occupied().all(|c| {
                let x = s.center(c);
                (0..8).all(|corner| {
                    let v = [0, 1, 2].map(|i| x[i] + k.y[i] + if corner >> i & 1 == 1 { 0.5 * h } else { -0.5 * h });
                    let w = mat_vec(&k.u, v);
                    (0..3).all(|i| w[i].abs() <= half[i])
                })
            })
        }
    })
}

/// Moments of `1_Ω₀ − ϑ1_{Q_𝐥}` relative to `|Ω|`, `|Ω|l0` and `|Ω|l0²`,
/// computed independently of the cloud: analytically for ellipsoids and
/// with per-voxel Gauss points on the transformed voxels.
pub fn verify_moments(shape: &Shape, k: &MomentKillResult) -> Result<(f64, f64, f64)> {
    let mass = shape.volume();
    let transformed = match shape {
        Shape::Ellipsoid { semi_axes, rotation, center } => {
            let c = mat_vec(&k.u, [center[0] + k.y[0], center[1] + k.y[1], center[2] + k.y[2]]);
            ellipsoid_moments(mass, semi_axes, &mat_mul(&k.u, rotation), c)
        }
        Shape::Voxels(s) => {
            let h = s.h();
            let g = gauss(2);
            let mut q = 0.0;
            let mut first = [0.0; 3];
            let mut second = [[0.0; 3]; 3];
            for c in s.occupied() {
                let x = s.center(c);
                for (dz, wz) in g.on(-0.5 * h, 0.5 * h) {
                    for (dy, wy) in g.on(-0.5 * h, 0.5 * h) {
                        for (dx, wx) in g.on(-0.5 * h, 0.5 * h) {
                            let w = wx * wy * wz;
                            let p = mat_vec(&k.u, [x[0] + dx + k.y[0], x[1] + dy + k.y[1], x[2] + dz + k.y[2]]);
                            q += w;
                            for i in 0..3 {
                                first[i] += w * p[i];
                                for j in 0..3 {
                                    second[i][j] += w * p[i] * p[j];
                                }
                            }
                        }
                    }
                }
            }
            MultipoleMoments::from_raw(q, first, &second)
        }
    };
    let total = transformed.add(&MultipoleMoments::cuboid(&k.cell(), k.theta).scaled(-1.0));
    Ok((
        total.q.abs() / mass,
        norm(total.d) / (mass * k.l0),
        total.p_max() / (mass * k.l0 * k.l0),
    ))
}

/// `|p(X)|` at the returned root.
pub fn cubic_residual(k: &MomentKillResult) -> f64 {
    cubic(k.c1, k.c2, k.x).0.abs()
}

/// `‖UᵀU − I‖_max` of a result.
pub fn orthogonality(k: &MomentKillResult) -> f64 {
    orthogonality_defect(&k.u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rotation_zyz;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trivial_roots() {
        assert_eq!(cubic_root_near_one(0.0, 0.0).unwrap(), 1.0);
        let x = cubic_root_near_one(0.1, 0.0).unwrap();
        // bisection oracle
        let (mut a, mut b) = (0.5f64, 1.5f64);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m * m * m - 0.1 * m * m - 1.0 < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        assert!((x - a).abs() < 1e-15);
        assert!(cubic(0.1, 0.0, x).0.abs() <= 1e-12);
        assert!(cubic_root_near_one(0.5, 0.0).is_err());
    }

    #[test]
    fn root_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..500 {
            let c1 = rng.gen_range(-0.3..0.3);
            let c2 = rng.gen_range(-0.3..0.3);
            let x = cubic_root_near_one(c1, c2).unwrap();
            assert!(cubic(c1, c2, x).0.abs() <= 1e-12);
            assert!((x - 1.0).abs() <= 3.0 * (c1.abs() + c2 * c2));
        }
    }

    #[test]
    fn centered_ball_is_left_alone() {
        let r = 1.0;
        let l0: f64 = 12.0;
        let theta = 4.0 * PI / 3.0 / l0.powi(3);
        let k = moment_kill(&Shape::ball(r), l0, theta).unwrap();
        assert!(k.y.iter().all(|v| v.abs() < 1e-15));
        assert!(k.lambda.iter().all(|l| (l - 1.0).abs() < 1e-12));
        assert!(k.is_ball());
    }

    #[test]
    fn rotated_ellipsoid_example() {
        let a = [1.1, 1.0, 0.9];
        let rot = rotation_zyz(0.3, 1.1, -0.7);
        let shape = Shape::Ellipsoid { semi_axes: a, rotation: rot, center: [0.4, -0.2, 0.3] };
        let l0: f64 = 20.0;
        let theta = shape.volume() / l0.powi(3);
        let k = moment_kill(&shape, l0, theta).unwrap();
        assert!((k.eta0 - 20.0 / 2.2).abs() < 1e-12);
        assert!(orthogonality(&k) <= 1e-12);
        assert!((k.lambda.iter().product::<f64>() - 1.0).abs() < 1e-12);
        for l in k.lambda {
            assert!((l - 1.0).abs() <= 100.0 / (k.eta0 * k.eta0));
        }
        assert!(cubic(k.c1, k.c2, k.x).0.abs() <= 1e-12);
        let (q, d, p) = verify_moments(&shape, &k).unwrap();
        assert!(q <= 1e-6 && d <= 1e-6 && p <= 1e-6, "{q} {d} {p}");
        let w: f64 = k.weights.iter().sum();
        assert!((w - shape.volume()).abs() < 1e-12 * w);
    }

    #[test]
    fn voxel_shape() {
        let s = VoxelSet::voxelize(4.0, 16, |x| {
            (x[0] - 0.3).powi(2) / 1.4 + x[1] * x[1] / 0.8 + (x[2] + 0.1).powi(2) + 0.4 * x[0] * x[1] < 1.0
        })
        .unwrap();
        let shape = Shape::Voxels(s);
        let l0: f64 = 30.0;
        let theta = shape.volume() / l0.powi(3);
        let k = moment_kill(&shape, l0, theta).unwrap();
        let (q, d, p) = verify_moments(&shape, &k).unwrap();
        assert!(q <= 1e-6 && d <= 1e-6 && p <= 1e-6, "{q} {d} {p}");
    }

    #[test]
    fn preconditions() {
        let shape = Shape::ball(1.0);
        assert!(matches!(moment_kill(&shape, 4.0, shape.volume() / 64.0), Err(Error::OutOfRange(_))));
        assert!(matches!(moment_kill(&shape, 20.0, 0.5), Err(Error::Precondition(_))));
    }
}
