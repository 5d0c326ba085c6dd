use std::f64::consts::PI;
use std::fs;

use rand::Rng;
use serde::Serialize;

use super::samples::sample_rng;
use super::{kill_sample, ordering_margins, Fault, Invariant, SweepConfig, ORDERING_TOLERANCE};
use crate::energy::{box_energy, ReferenceConstants};
use crate::error::Result;
use crate::geometry::{
    box_face_area, complement_in_box, localize, moments, offset_to_mu, perimeter, shift_offsets, VoxelSet,
};
use crate::kernels::{cube_potential_integral, taylor_third_order, yukawa_space_integral, TAYLOR_KAPPA};
use crate::linalg::{norm, sub, Vec3};
use crate::lowerbound::{certificate_value, localization_shift, yukawa_interaction_bound};
use crate::quadrature::gauss;
use crate::upperbound::{cubic_root_near_one, lattice_sum_inv4};

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<Invariant>,
    pub passed: bool,
}

fn check(name: &str, passed: bool, margin: f64, detail: impl Into<String>) -> Invariant {
    Invariant::new(name, passed, margin, detail)
}

fn failed(name: &str, e: crate::error::Error) -> Invariant {
    Invariant::error(name, &e)
}

fn moments_additivity(seed: u64) -> Result<Invariant> {
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let mut rng = sample_rng(seed, 10, i);
        let labels: Vec<u8> = (0..512).map(|_| rng.gen_range(0..3)).collect();
        let a = VoxelSet::from_occupancy(4.0, 8, labels.iter().map(|b| *b == 1).collect())?;
        let b = VoxelSet::from_occupancy(4.0, 8, labels.iter().map(|b| *b == 2).collect())?;
        let sum = moments(&a, None)?.add(&moments(&b, None)?);
        let whole = moments(&a.union(&b)?, None)?;
        let scale = whole.q.max(1e-300);
        worst = worst.max((sum.q - whole.q).abs() / scale);
        for k in 0..3 {
            worst = worst.max((sum.d[k] - whole.d[k]).abs() / scale);
            for j in 0..3 {
                worst = worst.max((sum.p[k][j] - whole.p[k][j]).abs() / scale);
            }
        }
    }
    Ok(check("moments.additivity", worst <= 1e-12, 1e-12 - worst, format!("max relative deviation {worst:e}")))
}

/// Worst `|taylor − exact|·|a|⁴/|b|³` over `samples` draws with `|a| ≥ 4|b|`.
pub fn taylor_ratio(seed: u64, samples: u64) -> f64 {
    let mut rng = sample_rng(seed, 11, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let a: Vec3 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let dir: Vec3 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let (na, nd) = (norm(a), norm(dir));
        if na < 1e-3 || nd < 1e-3 {
            continue;
        }
        let nb = na / rng.gen_range(4.0..100.0);
        let b = dir.map(|v| v / nd * nb);
        let exact = 1.0 / norm(sub(a, b));
        let t = taylor_third_order(a, b).expect("admissible by construction");
        worst = worst.max((t - exact).abs() * na.powi(4) / nb.powi(3));
    }
    worst
}

/// `4π∫₀^∞ r e^{−ωr} dr` by Gauss–Legendre on `[0, 60/ω]`, split in panels.
pub fn yukawa_integral_quadrature(omega: f64) -> f64 {
    let end = 60.0 / omega;
    let panels = 60;
    let mut acc = 0.0;
    for p in 0..panels {
        let (a, b) = (end * p as f64 / panels as f64, end * (p + 1) as f64 / panels as f64);
        for (r, w) in gauss(16).on(a, b) {
            acc += w * r * (-omega * r).exp();
        }
    }
    4.0 * PI * acc
}

fn kernel_checks(seed: u64) -> Vec<Invariant> {
    let ratio = taylor_ratio(seed, 100_000);
    let mut out = vec![check(
        "kernels.taylor_remainder",
        ratio <= TAYLOR_KAPPA,
        TAYLOR_KAPPA - ratio,
        format!("worst ratio {ratio:.6} over 1e5 samples"),
    )];
    let mut worst: f64 = 0.0;
    for w in [0.05, 0.3, 1.0, 4.0, 25.0] {
        let exact = yukawa_space_integral(w).expect("positive rate");
        worst = worst.max((exact - yukawa_integral_quadrature(w)).abs() / exact);
    }
    out.push(check("kernels.yukawa_integral", worst <= 1e-12, 1e-12 - worst, format!("relative error {worst:e}")));
    let top = cube_potential_integral(1.0, [0.0; 3]);
    let mut rng = sample_rng(seed, 12, 0);
    let mut best_other = f64::NEG_INFINITY;
    for _ in 0..100 {
        let mu = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        best_other = best_other.max(cube_potential_integral(1.0, mu));
    }
    out.push(check(
        "kernels.centered_cube_maximal",
        best_other <= top,
        top - best_other,
        "centered cube maximizes the potential integral over 100 shifts",
    ));
    out
}

pub fn localization_check(seed: u64, sets: u64) -> Result<Invariant> {
    let mut worst_identity: f64 = 0.0;
    let mut worst_ineq = f64::INFINITY;
    for i in 0..sets {
        let mut rng = sample_rng(seed, 13, i);
        let theta = rng.gen_range(0.05..0.6);
        let s = VoxelSet::random_neutral(8.0, 16, theta, &mut rng)?;
        for k in [2usize, 4, 8] {
            let r = k as f64 * s.h();
            let loc = localization_shift(&s, r)?;
            let k = shift_offsets(&s, r)?;
            // brute force over every shift
            let mut total = 0.0;
            let mut best = f64::INFINITY;
            for o0 in 0..k {
                for o1 in 0..k {
                    for o2 in 0..k {
                        let mu = offset_to_mu([o0, o1, o2], k, s.n());
                        let sum: f64 = localize(&s, r, mu)?.iter().map(perimeter).sum();
                        total += sum;
                        best = best.min(sum);
                    }
                }
            }
            let average = total / (k * k * k) as f64;
            let scale = loc.bound;
            worst_identity = worst_identity
                .max((average - loc.average).abs() / scale)
                .max((best - loc.piece_sum).abs() / scale);
            worst_ineq = worst_ineq.min((loc.bound - loc.average) / scale).min((loc.average - loc.piece_sum) / scale);
        }
    }
    let passed = worst_identity <= 1e-12 && worst_ineq >= -1e-12;
    Ok(check(
        "localization.averaging",
        passed,
        worst_ineq.min(1e-12 - worst_identity),
        format!("identity deviation {worst_identity:e}, inequality slack {worst_ineq:e}"),
    ))
}

/// Perimeter identity and interaction symmetry under `Ω ↦ Q_L ∖ Ω`.
pub fn complement_check(seed: u64, sets: u64, fault: Option<Fault>) -> Result<Invariant> {
    let mut worst_faces: f64 = 0.0;
    let mut worst_inter: f64 = 0.0;
    for i in 0..sets {
        let mut rng = sample_rng(seed, 14, i);
        let n = rng.gen_range(4..10);
        let l = 0.7 * n as f64;
        let count = rng.gen_range(0..=n * n * n);
        let theta = rng.gen_range(0.0..1.0);
        let s = VoxelSet::random_with_count(l, n, count, &mut rng)?;
        let c = complement_in_box(&s);
        let h = s.h();
        let bump = if fault == Some(Fault::Perimeter) { h * h } else { 0.0 };
        let boundary = 6.0 * l * l - 2.0 * box_face_area(&s);
        let faces = (perimeter(&c) - (perimeter(&s) + bump) - boundary).abs() / (h * h);
        worst_faces = worst_faces.max(faces);
        let a = box_energy(&s, theta)?.interaction;
        let b = box_energy(&c, 1.0 - theta)?.interaction;
        worst_inter = worst_inter.max((a - b).abs() / a.abs().max(1e-300));
    }
    Ok(check(
        "complement.identity",
        worst_faces < 1e-6 && worst_inter <= 1e-10,
        (1e-10 - worst_inter).min(-worst_faces),
        format!("face mismatch {worst_faces:.3}, interaction deviation {worst_inter:e}"),
    ))
}

fn cubic_check(seed: u64) -> Result<Invariant> {
    let mut rng = sample_rng(seed, 15, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (c1, c2) = (rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
        let x: f64 = cubic_root_near_one(c1, c2)?;
        let p = x * x * x - c1 * x * x - c2 * c2 * x - 1.0 + c1 * c2 * c2;
        worst = worst.max(p.abs());
    }
    let mut kill_worst: f64 = 0.0;
    for i in 0..8 {
        let s = kill_sample(seed, 16, i, 1e-4, 16)?;
        kill_worst = kill_worst.max(s.cubic_residual);
    }
    let w = worst.max(kill_worst);
    Ok(check("moment_kill.cubic_residual", w <= 1e-12, 1e-12 - w, format!("max residual {w:e}")))
}

fn ordering_check(seed: u64, n: usize) -> Result<Invariant> {
    let mut worst = f64::INFINITY;
    for i in 0..10 {
        let mut rng = sample_rng(seed, 17, i);
        let theta = [0.1, 0.3, 0.5][i as usize % 3];
        let s = VoxelSet::random_neutral(n as f64 * 0.5, n, theta, &mut rng)?;
        for m in ordering_margins(&s, theta)? {
            worst = worst.min(m);
        }
    }
    Ok(check(
        "bc.ordering",
        worst >= -ORDERING_TOLERANCE,
        worst,
        "D<=P, D<=inf, P<=N, inf<=N on 10 random neutral sets",
    ))
}

fn analysis_checks(seed: u64) -> Result<Vec<Invariant>> {
    let mut out = Vec::new();
    let s = lattice_sum_inv4(40);
    out.push(check("lattice_sum.bracket_width", s.width() <= 1e-3, 1e-3 - s.width(), format!("width {:e} at K = 40", s.width())));
    let e = ReferenceConstants::ball_ansatz().e_star;
    let mut mono = f64::INFINITY;
    let mut below = f64::INFINITY;
    let mut prev = f64::INFINITY;
    for t in [1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.1] {
        let c = certificate_value(t, 0.05, 7.0, e)?;
        mono = mono.min(prev - c.value);
        below = below.min(e - c.value);
        prev = c.value;
    }
    out.push(check(
        "certificate.monotone",
        mono > 0.0 && below >= 0.0,
        mono.min(below),
        "value decreases in theta and stays below eStar",
    ));
    let mut worst = f64::INFINITY;
    for i in 0..4 {
        let mut rng = sample_rng(seed, 18, i);
        let set = VoxelSet::random_neutral(4.0, 10, 0.3, &mut rng)?;
        for w in [0.3, 1.0, 3.0] {
            let b = yukawa_interaction_bound(&set, 0.3, w)?;
            worst = worst.min(b.margin() / b.coulomb.abs().max(1e-300));
        }
    }
    out.push(check("yukawa.inequality", worst >= -1e-8, worst, "Coulomb >= Yukawa self minus slack"));
    Ok(out)
}

/// Runs every invariant check and writes `verify.json` into the output
/// directory. Failures are reported, not returned as errors.
pub fn verify_suite(cfg: &SweepConfig) -> Result<VerifyReport> {
    let seed = cfg.seed;
    let mut checks = Vec::new();
    let mut push = |name: &str, r: Result<Invariant>| match r {
        Ok(c) => checks.push(c),
        Err(e) => checks.push(failed(name, e)),
    };
    push("moments.additivity", moments_additivity(seed));
    push("localization.averaging", localization_check(seed, 10));
    push("complement.identity", complement_check(seed, 20, cfg.fault));
    push("moment_kill.cubic_residual", cubic_check(seed));
    push("bc.ordering", ordering_check(seed, cfg.grid_n.min(16)));
    match analysis_checks(seed) {
        Ok(v) => checks.extend(v),
        Err(e) => checks.push(failed("analysis", e)),
    }
    checks.extend(kernel_checks(seed));
    for c in &checks {
        eprintln!("{} {}", if c.passed { "pass" } else { "FAIL" }, c.name);
    }
    let passed = checks.iter().all(|c| c.passed);
    let report = VerifyReport { seed, checks, passed };
    fs::create_dir_all(&cfg.out)?;
    fs::write(cfg.out.join("verify.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_oracle_matches_closed_form() {
        for w in [0.1, 2.0] {
            let q = yukawa_integral_quadrature(w);
            assert!((q - 4.0 * PI / (w * w)).abs() < 1e-12 * q);
        }
    }

    #[test]
    fn complement_fault_is_caught() {
        assert!(complement_check(1, 5, None).unwrap().passed);
        assert!(!complement_check(1, 5, Some(Fault::Perimeter)).unwrap().passed);
    }

    #[test]
    fn taylor_ratio_below_kappa() {
        assert!(taylor_ratio(2, 5_000) <= TAYLOR_KAPPA);
    }
}
