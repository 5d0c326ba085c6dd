use std::sync::OnceLock;

use serde::Serialize;

use crate::quadrature::gauss;

/// Partial sum of `|s|⁻⁴` over `0 < |s|∞ ≤ K` and a rigorous enclosure of
/// the full lattice sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvFourSum {
    pub k: usize,
    pub partial: f64,
    pub lower: f64,
    pub upper: f64,
}

impl InvFourSum {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// `∫_{|x|∞ ≥ 1} |x|⁻⁴ dx = 6∫∫_{[−1,1]²}(1+u²+v²)⁻² du dv`.
fn exterior_constant() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        // inner integral in closed form, outer by Gauss–Legendre
        let mut j = 0.0;
        for (v, w) in gauss(48).on(0.0, 1.0) {
            let a2 = 1.0 + v * v;
            let a = a2.sqrt();
            j += w * (1.0 / (2.0 * a2 * (a2 + 1.0)) + (1.0 / a).atan() / (2.0 * a2 * a));
        }
        6.0 * 4.0 * j
    })
}

/// Shell sums of `|s|⁻⁴` for `|s|∞ = j`, exact in the enumeration.
fn shell(j: i64) -> f64 {
    let mut acc = 0.0;
    for x in -j..=j {
        for y in -j..=j {
            let inner = x.abs().max(y.abs()) < j;
            let zs: Vec<i64> = if inner { vec![-j, j] } else { (-j..=j).collect() };
            for z in zs {
                let r2 = (x * x + y * y + z * z) as f64;
                acc += 1.0 / (r2 * r2);
            }
        }
    }
    acc
}

/// Tail over `|s|∞ > k`: the exterior integral `C/(k + ½)` over the union of
/// unit cells, with the midpoint error `|avg f − f(s)| ≤ ‖D²f‖/8 ≤ (5/2)(|s|−c)⁻⁶`
/// summed against `∫_{|x|≥k+½} (|x| − 2c)⁻⁶`, `c = √3/2`.
fn tail_bracket(k: usize) -> (f64, f64) {
    let a = k as f64 + 0.5;
    let c = 3f64.sqrt() / 2.0;
    let t0 = a - 2.0 * c;
    let center = exterior_constant() / a;
    if t0 <= 0.0 {
        return (0.0, f64::INFINITY);
    }
    let err = 2.5 * 4.0 * std::f64::consts::PI * (1.0 / (3.0 * t0.powi(3)) + c / t0.powi(4) + 4.0 * c * c / (5.0 * t0.powi(5)));
    ((center - err).max(0.0), center + err)
}

/// Σ_{s∈ℤ³∖0} |s|⁻⁴ truncated at `|s|∞ ≤ k`, with the intersection of the
/// enclosures of all truncations `1..=k` (hence nested in `k`).
pub fn lattice_sum_inv4(k: usize) -> InvFourSum {
    let k = k.max(1);
    let mut partial = 0.0;
    let (mut lower, mut upper) = (0.0f64, f64::INFINITY);
    for j in 1..=k {
        partial += shell(j as i64);
        let (tl, tu) = tail_bracket(j);
        lower = lower.max(partial + tl);
        upper = upper.min(partial + tu);
    }
    InvFourSum { k, partial, lower, upper }
}
