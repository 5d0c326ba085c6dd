//! Coulomb and Yukawa kernels, their cube integrals, and the third-order
//! multipole Taylor expansion.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{dot, hadamard, norm, Vec3};
use crate::quadrature::{box_cubature, corner_cubature};

/// Constant in `|taylor − exact| ≤ κ|b|³/|a|⁴` for `|a| ≥ 4|b|`.
pub const TAYLOR_KAPPA: f64 = 20.0;

pub fn coulomb(x: Vec3) -> Result<f64> {
    let r = norm(x);
    if r == 0.0 {
        return Err(Error::Singular);
    }
    Ok(1.0 / r)
}

pub fn yukawa(omega: f64, x: Vec3) -> Result<f64> {
    if omega.is_nan() || omega <= 0.0 {
        return Err(Error::OutOfRange(format!("yukawa rate must be positive, got {omega}")));
    }
    let r = norm(x);
    if r == 0.0 {
        return Err(Error::Singular);
    }
    Ok((-omega * r).exp() / r)
}

/// Expansion of `1/|a − b|` to third order in `b`.
pub fn taylor_third_order(a: Vec3, b: Vec3) -> Result<f64> {
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 {
        return Err(Error::Singular);
    }
    if na < 4.0 * nb {
        return Err(Error::Precondition(format!(
            "taylor expansion needs |a| >= 4|b|, got |a| = {na}, |b| = {nb}"
        )));
    }
    let ab = dot(a, b);
    let a2 = na * na;
    Ok(1.0 / na + ab / (a2 * na) + (3.0 * ab * ab - a2 * nb * nb) / (2.0 * a2 * a2 * na))
}

/// `∫_{ℝ³} e^{−ω|y|}/|y| dy = 4π/ω²`.
pub fn yukawa_space_integral(omega: f64) -> Result<f64> {
    if omega.is_nan() || omega <= 0.0 {
        return Err(Error::OutOfRange(format!("yukawa rate must be positive, got {omega}")));
    }
    Ok(4.0 * PI / (omega * omega))
}

/// `∫ dy/|y|` over the cube of side `l` centered at `l·mu`.
pub fn cube_potential_integral(l: f64, mu: Vec3) -> f64 {
    cuboid_potential_integral([l; 3], [l * mu[0], l * mu[1], l * mu[2]])
}

/// `∫ dy/|y|` over the cuboid with the given side lengths and center.
pub fn cuboid_potential_integral(sides: Vec3, center: Vec3) -> f64 {
    let lo = [
        center[0] - 0.5 * sides[0],
        center[1] - 0.5 * sides[1],
        center[2] - 0.5 * sides[2],
    ];
    let hi = [
        center[0] + 0.5 * sides[0],
        center[1] + 0.5 * sides[1],
        center[2] + 0.5 * sides[2],
    ];
    let mut dist2 = 0.0;
    for i in 0..3 {
        let d = lo[i].max(0.0) + (-hi[i]).max(0.0);
        dist2 += d * d;
    }
    let longest = sides[0].max(sides[1]).max(sides[2]);
    let f = |y: Vec3| 1.0 / norm(y);
    if dist2.sqrt() >= longest {
        return box_cubature(&f, lo, hi, 16, 1);
    }
    // oriented inclusion–exclusion into boxes with a corner at the origin
    let mut total = 0.0;
    for choice in 0..8 {
        let mut e = [0.0; 3];
        let mut sign = 1.0;
        for i in 0..3 {
            if choice >> i & 1 == 0 {
                e[i] = hi[i];
            } else {
                e[i] = lo[i];
                sign = -sign;
            }
            sign *= e[i].signum();
        }
        if e.iter().any(|v| *v == 0.0) {
            continue;
        }
        total += sign * corner_cubature(&f, e, [1.0; 3]);
    }
    total
}

/// `c₀ = ∫_{Q₁} dy/|y|` for the centered unit cube.
pub fn c0() -> f64 {
    static C0: OnceLock<f64> = OnceLock::new();
    *C0.get_or_init(|| cube_potential_integral(1.0, [0.0; 3]))
}

/// `c₁ = ∫_{[−1,1]³} Π(1−|uᵢ|)/|u| du`, so that `∬_{C×C} 1/|x−y| = c₁h⁵`
/// for a cube `C` of side `h`.
pub fn c1() -> f64 {
    static C1: OnceLock<f64> = OnceLock::new();
    *C1.get_or_init(|| cell_correlation([1.0; 3], [0, 0, 0], Profile::Coulomb))
}

/// Radial kernel profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    Coulomb,
    /// Yukawa with the rate expressed in the units of the integration variable.
    Yukawa(f64),
}

impl Profile {
    pub fn at(self, r: f64) -> f64 {
        match self {
            Profile::Coulomb => 1.0 / r,
            Profile::Yukawa(w) => (-w * r).exp() / r,
        }
    }
}

/// `∫_{[−1,1]³} Π(1−|uᵢ|) k(|λ∘(m+u)|) du`.
///
/// Scaled by `h⁵`, this is the interaction of two cells of side `h`
/// (stretched by `lambda`) whose centers differ by `h·m`.
pub fn cell_correlation(lambda: Vec3, m: [i64; 3], profile: Profile) -> f64 {
    let mf = [m[0] as f64, m[1] as f64, m[2] as f64];
    let reach = m.iter().map(|v| v.abs()).max().unwrap_or(0);
    let mut total = 0.0;
    for oct in 0..8 {
        let sigma: [i64; 3] = [
            if oct & 1 == 0 { 1 } else { -1 },
            if oct & 2 == 0 { 1 } else { -1 },
            if oct & 4 == 0 { 1 } else { -1 },
        ];
        let f = |y: Vec3| {
            let w = (1.0 - (y[0] - mf[0]).abs())
                * (1.0 - (y[1] - mf[1]).abs())
                * (1.0 - (y[2] - mf[2]).abs());
            w * profile.at(norm(hadamard(lambda, y)))
        };
        let touches = (0..3).all(|i| m[i] == 0 || m[i] == -sigma[i]);
        if touches {
            let e = [
                if m[0] == 0 { sigma[0] as f64 } else { -sigma[0] as f64 },
                if m[1] == 0 { sigma[1] as f64 } else { -sigma[1] as f64 },
                if m[2] == 0 { sigma[2] as f64 } else { -sigma[2] as f64 },
            ];
            total += corner_cubature(&f, e, lambda);
        } else {
            let mut lo = [0.0; 3];
            let mut hi = [0.0; 3];
            for i in 0..3 {
                let a = mf[i];
                let b = mf[i] + sigma[i] as f64;
                lo[i] = a.min(b);
                hi[i] = a.max(b);
            }
            let split = if reach <= 2 { 2 } else { 1 };
            total += box_cubature(&f, lo, hi, 12, split);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Closed-form `∫ dy/|y|` over a box, from the antiderivative
    /// `yz·ln(x+r) + xz·ln(y+r) + xy·ln(z+r) − ½[x² atan(yz/xr) + y² atan(xz/yr) + z² atan(xy/zr)]`.
    fn box_inverse_distance(lo: Vec3, hi: Vec3) -> f64 {
        fn prim(x: f64, y: f64, z: f64) -> f64 {
            let r = (x * x + y * y + z * z).sqrt();
            let lg = |a: f64, b: f64, c: f64| if a * b == 0.0 { 0.0 } else { a * b * (c + r).ln() };
            let at = |a: f64, b: f64, c: f64| if a == 0.0 { 0.0 } else { a * a * (b * c / (a * r)).atan() };
            lg(y, z, x) + lg(x, z, y) + lg(x, y, z) - 0.5 * (at(x, y, z) + at(y, x, z) + at(z, x, y))
        }
        let mut s = 0.0;
        for c in 0..8 {
            let x = if c & 1 == 0 { hi[0] } else { lo[0] };
            let y = if c & 2 == 0 { hi[1] } else { lo[1] };
            let z = if c & 4 == 0 { hi[2] } else { lo[2] };
            let sign = if (c as u32).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * prim(x, y, z);
        }
        s
    }

    #[test]
    fn coulomb_values() {
        assert!((coulomb([3.0, 4.0, 0.0]).unwrap() - 0.2).abs() < 1e-16);
        assert_eq!(coulomb([1.0, 0.0, 0.0]).unwrap(), 1.0);
        assert!(matches!(coulomb([0.0; 3]), Err(Error::Singular)));
        let x = [0.3, -1.2, 2.0];
        let t = 3.7;
        let lhs = coulomb([t * x[0], t * x[1], t * x[2]]).unwrap();
        assert!((lhs - coulomb(x).unwrap() / t).abs() < 1e-15);
    }

    #[test]
    fn yukawa_values() {
        let v = yukawa(1.0, [1.0, 0.0, 0.0]).unwrap();
        assert!((v - (-1f64).exp()).abs() < 1e-16);
        let x = [0.5, 0.1, -0.2];
        assert!((yukawa(1e-12, x).unwrap() - coulomb(x).unwrap()).abs() < 1e-10);
        assert!(yukawa(0.0, x).is_err());
        assert!(yukawa(-1.0, x).is_err());
        assert!(matches!(yukawa(1.0, [0.0; 3]), Err(Error::Singular)));
    }

    #[test]
    fn fourier_multipliers_are_ordered() {
        // 1/k² − 1/(k² + ω²) = ω²/(k²(k² + ω²)) ≥ 0
        for &k in &[1e-3, 0.1, 1.0, 7.0, 1e3] {
            for &w in &[1e-3, 0.5, 2.0, 50.0] {
                let k2: f64 = k * k;
                let gap = 1.0 / k2 - 1.0 / (k2 + w * w);
                let closed = w * w / (k2 * (k2 + w * w));
                assert!(gap >= 0.0);
                assert!(closed > 0.0);
            }
        }
    }

    #[test]
    fn taylor_examples() {
        let a = [10.0, 0.0, 0.0];
        assert_eq!(taylor_third_order(a, [0.0; 3]).unwrap(), 0.1);
        let t = taylor_third_order(a, [1.0, 0.0, 0.0]).unwrap();
        assert!((t - 0.111).abs() < 1e-15);
        assert!(((1.0 / 9.0 - t) - 1.111111e-4).abs() < 1e-9);
        assert!(taylor_third_order([1.0, 0.0, 0.0], [0.3, 0.0, 0.0]).is_err());
        assert!(taylor_third_order([0.0; 3], [0.0; 3]).is_err());
    }

    #[test]
    fn taylor_remainder_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst: f64 = 0.0;
        for _ in 0..20_000 {
            let a: Vec3 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let b: Vec3 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let (na, nb) = (norm(a), norm(b));
            let ratio = rng.gen_range(4.0..40.0);
            let b = [b[0] / nb * na / ratio, b[1] / nb * na / ratio, b[2] / nb * na / ratio];
            let nb = na / ratio;
            let exact = 1.0 / norm([a[0] - b[0], a[1] - b[1], a[2] - b[2]]);
            let err = (taylor_third_order(a, b).unwrap() - exact).abs();
            worst = worst.max(err * na.powi(4) / nb.powi(3));
        }
        assert!(worst <= TAYLOR_KAPPA, "{worst}");
        assert!(worst <= 4.0 / 3.0 + 1e-9, "{worst}");
    }

    #[test]
    fn yukawa_space_integral_values() {
        assert!((yukawa_space_integral(1.0).unwrap() - 4.0 * PI).abs() < 1e-15);
        assert!((yukawa_space_integral(2.0).unwrap() - PI).abs() < 1e-15);
        for w in [0.1, 0.7, 3.0, 40.0] {
            assert!((yukawa_space_integral(w).unwrap() * w * w - 4.0 * PI).abs() < 1e-12);
        }
        assert!(yukawa_space_integral(0.0).is_err());
    }

    #[test]
    fn centered_cube_constant() {
        let exact = box_inverse_distance([-0.5; 3], [0.5; 3]);
        assert!((exact - 2.380077363979554).abs() < 1e-13, "{exact}");
        assert!((c0() - exact).abs() < 1e-13, "{}", c0());
    }

    #[test]
    fn cube_integral_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let sides = [rng.gen_range(0.05..3.0), rng.gen_range(0.05..3.0), rng.gen_range(0.05..3.0)];
            let c = [rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)];
            let lo = [c[0] - sides[0] / 2.0, c[1] - sides[1] / 2.0, c[2] - sides[2] / 2.0];
            let hi = [c[0] + sides[0] / 2.0, c[1] + sides[1] / 2.0, c[2] + sides[2] / 2.0];
            let exact = box_inverse_distance(lo, hi);
            let got = cuboid_potential_integral(sides, c);
            assert!((got - exact).abs() <= 1e-11 * exact.abs(), "{sides:?} {c:?}: {got} vs {exact}");
        }
    }

    #[test]
    fn cube_integral_scaling_and_far_limit() {
        let mu = [0.3, -0.1, 0.45];
        let t = 2.5;
        let a = cube_potential_integral(t, mu);
        let b = cube_potential_integral(1.0, mu);
        assert!((a - t * t * b).abs() < 1e-12 * a);
        let far = cube_potential_integral(1.0, [5.0, 0.0, 0.0]);
        assert!((far - 0.2).abs() < 0.01 * 0.2);
    }

    #[test]
    fn centered_cube_is_maximal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let top = cube_potential_integral(1.0, [0.0; 3]);
        for _ in 0..100 {
            let mu = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            assert!(cube_potential_integral(1.0, mu) <= top);
        }
    }

    #[test]
    fn self_correlation_constant() {
        assert!((c1() - 1.8823126443870768).abs() < 1e-11, "{}", c1());
    }

    #[test]
    fn neighbour_correlation_against_closed_form_potential() {
        // ∬ over unit cubes at offset m = ∫_{Q(m)} φ with φ the closed-form cube potential
        let rule = crate::quadrature::gauss(24);
        for m in [[1i64, 0, 0], [1, 1, 0], [1, 1, 1], [2, 1, 0], [3, 0, 0]] {
            let mut oracle = 0.0;
            for (x, wx) in rule.on(m[0] as f64 - 0.5, m[0] as f64 + 0.5) {
                for (y, wy) in rule.on(m[1] as f64 - 0.5, m[1] as f64 + 0.5) {
                    for (z, wz) in rule.on(m[2] as f64 - 0.5, m[2] as f64 + 0.5) {
                        oracle += wx * wy * wz * box_inverse_distance([x - 0.5, y - 0.5, z - 0.5], [x + 0.5, y + 0.5, z + 0.5]);
                    }
                }
            }
            let got = cell_correlation([1.0; 3], m, Profile::Coulomb);
            assert!((got - oracle).abs() < 1e-9 * oracle, "{m:?}: {got} vs {oracle}");
        }
    }

    #[test]
    fn anisotropic_correlation_is_rescaled_isotropic_at_distance() {
        // far cells act like point charges in the stretched metric
        let lam = [1.2, 1.0, 1.0 / 1.2];
        let m = [9, 4, -6];
        let got = cell_correlation(lam, m, Profile::Coulomb);
        let d = norm(hadamard(lam, [9.0, 4.0, -6.0]));
        assert!((got - 1.0 / d).abs() < 1e-3 / d);
    }

    #[test]
    fn yukawa_correlation_below_coulomb() {
        for m in [[0i64, 0, 0], [1, 0, 0], [1, 1, 1], [2, 0, 1]] {
            let c = cell_correlation([1.0; 3], m, Profile::Coulomb);
            let y = cell_correlation([1.0; 3], m, Profile::Yukawa(0.5));
            assert!(y < c && y > 0.0);
        }
        let y = cell_correlation([1.0; 3], [0, 0, 0], Profile::Yukawa(1e-9));
        assert!((y - c1()).abs() < 1e-8);
    }
}
