use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::{LatticeConfig, Template};
use crate::energy::{EnergyBreakdown, Parts};
use crate::error::{Error, Result};
use crate::kernels::{cell_correlation, cuboid_potential_integral, Profile};
use crate::linalg::{add, dot, hadamard, norm, scale, sub, Mat3, Vec3};
use crate::quadrature::gauss;

/// `∬ρ_rρ_s/|x−y|` split by the pieces of `ρ = T − ϑ1_cell`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairTerms {
    pub template_template: f64,
    pub template_cell: f64,
    pub cell_cell: f64,
}

impl PairTerms {
    pub fn total(&self, theta: f64) -> f64 {
        self.template_template - theta * self.template_cell + theta * theta * self.cell_cell
    }
}

fn cell_cell(cfg: &LatticeConfig, m: [i64; 3]) -> f64 {
    let m = m.map(|x| x.abs());
    cfg.cell_scale().powi(5) * cell_correlation(cfg.aspect, m, Profile::Coulomb)
}

/// Terms for two cells at lattice displacement `m ≠ 0`, evaluated directly.
pub fn pair_terms(cfg: &LatticeConfig, m: [i64; 3]) -> Result<PairTerms> {
    if m == [0; 3] {
        return Err(Error::Precondition("pair terms need distinct cells".into()));
    }
    let sides = cfg.sides();
    let d = hadamard(sides, m.map(|x| x as f64));
    let cc = cell_cell(cfg, m);
    Ok(match &cfg.template {
        Template::Ball { radius, offset } => {
            let q = 4.0 * PI / 3.0 * radius.powi(3);
            // Newton: outside a ball its potential is that of a point charge
            let tc = q
                * (cuboid_potential_integral(sides, sub(d, *offset))
                    + cuboid_potential_integral(sides, scale(add(d, *offset), -1.0)));
            PairTerms { template_template: q * q / norm(d), template_cell: tc, cell_cell: cc }
        }
        Template::Cloud { points, weights, .. } => {
            let tt: f64 = points
                .par_iter()
                .zip(weights.par_iter())
                .map(|(pi, wi)| {
                    let mut acc = 0.0;
                    for (pj, wj) in points.iter().zip(weights) {
                        acc += wj / norm(add(d, sub(*pj, *pi)));
                    }
                    wi * acc
                })
                .sum();
            let tc: f64 = points
                .par_iter()
                .zip(weights.par_iter())
                .map(|(p, w)| {
                    w * (cuboid_potential_integral(sides, sub(d, *p))
                        + cuboid_potential_integral(sides, scale(add(d, *p), -1.0)))
                })
                .sum();
            PairTerms { template_template: tt, template_cell: tc, cell_cell: cc }
        }
    })
}

/// `1/|a − b| − T₂(a, b)` as the Legendre tail `Σ_{k≥3} |b|ᵏ/|a|ᵏ⁺¹ P_k`.
fn remainder3(a: Vec3, b: Vec3) -> f64 {
    let ra = norm(a);
    let rb = norm(b);
    if rb == 0.0 {
        return 0.0;
    }
    let t = rb / ra;
    let c = dot(a, b) / (ra * rb);
    let (mut p_prev, mut p) = (1.0, c);
    let mut tk = t;
    let mut sum = 0.0;
    for k in 1..400 {
        let p_next = ((2 * k + 1) as f64 * c * p - k as f64 * p_prev) / (k + 1) as f64;
        p_prev = p;
        p = p_next;
        tk *= t;
        if k + 1 >= 3 {
            sum += tk * p;
            if tk < 1e-18 {
                break;
            }
        }
    }
    sum / ra
}

/// Signed point cloud of `T − ϑ1_cell` with Gauss nodes for the cell.
fn signed_cloud(cfg: &LatticeConfig, points: &[Vec3], weights: &[f64]) -> Vec<(Vec3, f64)> {
    let sides = cfg.sides();
    let rule = gauss(8);
    let mut out: Vec<(Vec3, f64)> = points.iter().copied().zip(weights.iter().copied()).collect();
    for (z, wz) in rule.on(-0.5 * sides[2], 0.5 * sides[2]) {
        for (y, wy) in rule.on(-0.5 * sides[1], 0.5 * sides[1]) {
            for (x, wx) in rule.on(-0.5 * sides[0], 0.5 * sides[0]) {
                out.push(([x, y, z], -cfg.theta * wx * wy * wz));
            }
        }
    }
    out
}

/// Far interaction of identical neutral clouds: the second-order part from
/// the moments plus the summed Legendre tails, free of cancellation.
fn far_cloud_interaction(cloud: &[(Vec3, f64)], d: Vec3) -> f64 {
    let m0: f64 = cloud.iter().map(|c| c.1).sum();
    let mut dip = [0.0; 3];
    let mut s: Mat3 = [[0.0; 3]; 3];
    for (p, q) in cloud {
        for i in 0..3 {
            dip[i] += q * p[i];
            for j in 0..3 {
                s[i][j] += q * p[i] * p[j];
            }
        }
    }
    let ra = norm(d);
    let asa: f64 = (0..3).map(|i| (0..3).map(|j| d[i] * s[i][j] * d[j]).sum::<f64>()).sum();
    let tr = s[0][0] + s[1][1] + s[2][2];
    let ad = dot(d, dip);
    let t2 = m0 * m0 / ra
        + (3.0 * (2.0 * m0 * asa - 2.0 * ad * ad) - ra * ra * (2.0 * m0 * tr - 2.0 * dot(dip, dip)))
            / (2.0 * ra.powi(5));
    let r3: f64 = cloud
        .par_iter()
        .map(|(pi, qi)| {
            let mut acc = 0.0;
            for (pj, qj) in cloud {
                acc += qj * remainder3(d, sub(*pi, *pj));
            }
            qi * acc
        })
        .sum();
    t2 + r3
}

fn pair_value(cfg: &LatticeConfig, m: [i64; 3]) -> Result<f64> {
    if let Template::Cloud { points, weights, .. } = &cfg.template {
        let d = hadamard(cfg.sides(), m.map(|x| x as f64));
        let cell_reach = 0.5 * norm(cfg.sides());
        let reach = cfg.template.reach().max(cell_reach);
        if norm(d) >= 8.0 * reach {
            return Ok(far_cloud_interaction(&signed_cloud(cfg, points, weights), d));
        }
    }
    Ok(pair_terms(cfg, m)?.total(cfg.theta))
}

/// `∬_{cell r × cell s} ρ(x)ρ(y)/|x − y|` for the copies in cells `r ≠ s`.
pub fn pair_interaction(cfg: &LatticeConfig, r: [i64; 3], s: [i64; 3]) -> Result<f64> {
    if r == s {
        return Err(Error::Precondition("use the self term for r = s".into()));
    }
    if !cfg.contains(r) || !cfg.contains(s) {
        return Err(Error::OutOfRange(format!("cells {r:?}, {s:?} not in the lattice")));
    }
    pair_value(cfg, [s[0] - r[0], s[1] - r[1], s[2] - r[2]])
}

/// `½∬ρρ/|x − y|` within one cell.
pub fn self_interaction(cfg: &LatticeConfig) -> Result<f64> {
    match &cfg.template {
        Template::Ball { radius, offset } => {
            let r = *radius;
            let q = 4.0 * PI / 3.0 * r.powi(3);
            let bb = 32.0 * PI * PI / 15.0 * r.powi(5);
            let bc = q * cuboid_potential_integral(cfg.sides(), scale(*offset, -1.0)) - 2.0 * PI * q * r * r + bb;
            let cc = cell_cell(cfg, [0; 3]);
            Ok(0.5 * (bb - 2.0 * cfg.theta * bc + cfg.theta * cfg.theta * cc))
        }
        Template::Cloud { label, .. } => Err(Error::TemplateNotSupported(label.clone())),
    }
}

/// Ordered pairs of cells at displacement `m`.
fn pair_count(cfg: &LatticeConfig, m: [i64; 3]) -> usize {
    let n = cfg.per_axis() as i64;
    m.iter().map(|x| (n - x.abs()).max(0) as usize).product()
}

fn canonical(cfg: &LatticeConfig, m: [i64; 3]) -> [i64; 3] {
    let symmetric = match &cfg.template {
        Template::Ball { offset, .. } => *offset == [0.0; 3],
        Template::Cloud { .. } => false,
    };
    if !symmetric {
        return m;
    }
    let mut a = m.map(|x| x.abs());
    if cfg.aspect == [1.0; 3] {
        a.sort_unstable();
    }
    a
}

/// Sum of `count(m)·I(m)` over displacements selected by `keep`, halved.
fn lattice_pair_sum<F: Fn([i64; 3]) -> bool>(cfg: &LatticeConfig, keep: F) -> Result<f64> {
    let n = cfg.per_axis() as i64 - 1;
    let mut classes: BTreeMap<[i64; 3], usize> = BTreeMap::new();
    for z in -n..=n {
        for y in -n..=n {
            for x in -n..=n {
                let m = [x, y, z];
                if m != [0; 3] && keep(m) {
                    *classes.entry(canonical(cfg, m)).or_default() += pair_count(cfg, m);
                }
            }
        }
    }
    let keys: Vec<([i64; 3], usize)> = classes.into_iter().collect();
    let values: Vec<Result<f64>> = keys.par_iter().map(|(m, _)| pair_value(cfg, *m)).collect();
    let mut total = 0.0;
    for ((_, count), v) in keys.iter().zip(values) {
        total += *count as f64 * v?;
    }
    Ok(0.5 * total)
}

fn linf(m: [i64; 3]) -> usize {
    m.iter().map(|x| x.unsigned_abs() as usize).max().unwrap_or(0)
}

/// Perimeter plus interaction, split into per-cell, near (`1 ≤ |m|∞ ≤ M`)
/// and far (`|m|∞ > M`) parts.
pub fn decompose_energy(cfg: &LatticeConfig) -> Result<EnergyBreakdown> {
    let perimeter = match &cfg.template {
        Template::Ball { radius, .. } => cfg.cell_count() as f64 * 4.0 * PI * radius * radius,
        Template::Cloud { label, .. } => return Err(Error::TemplateNotSupported(label.clone())),
    };
    let self_part = cfg.cell_count() as f64 * self_interaction(cfg)?;
    let near = lattice_pair_sum(cfg, |m| linf(m) <= cfg.cutoff)?;
    let far = lattice_pair_sum(cfg, |m| linf(m) > cfg.cutoff)?;
    Ok(EnergyBreakdown::with_parts(perimeter, Parts { self_part, near, far }))
}

/// Explicit bound on the far part next to its computed value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FarField {
    pub bound: f64,
    pub exact: f64,
    /// `16·Q·M₃`, so that `|I(m)| ≤ prefactor/((1 − t)|D|⁴)` with
    /// `t = diam(cell)/|D|`.
    pub prefactor: f64,
}

/// `∫|y|³` over a centered cuboid.
fn cuboid_cubic_moment(sides: Vec3) -> f64 {
    let rule = gauss(12);
    let mut acc = 0.0;
    for oct_z in [(-0.5 * sides[2], 0.0), (0.0, 0.5 * sides[2])] {
        for oct_y in [(-0.5 * sides[1], 0.0), (0.0, 0.5 * sides[1])] {
            for oct_x in [(-0.5 * sides[0], 0.0), (0.0, 0.5 * sides[0])] {
                for (z, wz) in rule.on(oct_z.0, oct_z.1) {
                    for (y, wy) in rule.on(oct_y.0, oct_y.1) {
                        for (x, wx) in rule.on(oct_x.0, oct_x.1) {
                            acc += wx * wy * wz * norm([x, y, z]).powi(3);
                        }
                    }
                }
            }
        }
    }
    acc
}

fn template_cubic_moment(t: &Template) -> f64 {
    match t {
        Template::Ball { radius, offset } => {
            // |y|³ ≤ (|y−c| + |c|)³ integrated exactly over the ball
            let (r, c) = (*radius, norm(*offset));
            4.0 * PI * (r.powi(6) / 6.0 + 3.0 * c * r.powi(5) / 5.0 + 3.0 * c * c * r.powi(4) / 4.0 + c.powi(3) * r.powi(3) / 3.0)
        }
        Template::Cloud { points, weights, .. } => {
            points.iter().zip(weights).map(|(p, w)| w * norm(*p).powi(3)).sum()
        }
    }
}

fn low_moments_vanish(cfg: &LatticeConfig) -> bool {
    match &cfg.template {
        Template::Ball { offset, .. } => *offset == [0.0; 3] && cfg.aspect == [1.0; 3],
        Template::Cloud { points, weights, .. } => {
            let cloud = signed_cloud(cfg, points, weights);
            let q = cfg.template.mass();
            let l = cfg.cell_scale();
            let mut m = crate::geometry::MultipoleMoments::ZERO;
            for (p, w) in &cloud {
                let second = [0, 1, 2].map(|i| [0, 1, 2].map(|j| w * p[i] * p[j]));
                m = m.add(&crate::geometry::MultipoleMoments::from_raw(*w, scale(*p, *w), &second));
            }
            m.q.abs() <= 1e-6 * q && m.d_max() <= 1e-6 * q * l && m.p_max() <= 1e-6 * q * l * l
        }
    }
}

/// Bound `½Σ_{|m|∞>M} count(m)·16QM₃/((1 − t)|D(m)|⁴)`, from the third-order
/// remainder of `1/|D + y − x|`, `|x − y|³ ≤ 4(|x|³ + |y|³)` and `∫|ρ| = 2Q`.
/// Requires vanishing charge, dipole and quadrupole per cell.
pub fn far_field_bound(cfg: &LatticeConfig) -> Result<FarField> {
    if !low_moments_vanish(cfg) {
        return Err(Error::Precondition("far bound needs vanishing moments up to second order".into()));
    }
    let q = cfg.template.mass();
    let sides = cfg.sides();
    let diam = norm(sides);
    let m3 = template_cubic_moment(&cfg.template) + cfg.theta * cuboid_cubic_moment(sides);
    let prefactor = 16.0 * q * m3;
    let n = cfg.per_axis() as i64 - 1;
    let mut bound = 0.0;
    for z in -n..=n {
        for y in -n..=n {
            for x in -n..=n {
                let m = [x, y, z];
                if linf(m) > cfg.cutoff {
                    let d = norm(hadamard(sides, m.map(|v| v as f64)));
                    let t = diam / d;
                    if t >= 1.0 {
                        return Err(Error::Precondition(format!("cutoff {} too small for the bound", cfg.cutoff)));
                    }
                    bound += pair_count(cfg, m) as f64 * prefactor / ((1.0 - t) * d.powi(4));
                }
            }
        }
    }
    let exact = lattice_pair_sum(cfg, |m| linf(m) > cfg.cutoff)?;
    Ok(FarField { bound: 0.5 * bound, exact, prefactor })
}

#[cfg(test)]
mod tests {
    use super::super::build_competitor;
    use super::*;
    use crate::energy::ReferenceConstants;
    use crate::linalg::loglog_slope;

    fn refs() -> ReferenceConstants {
        ReferenceConstants::ball_ansatz()
    }

    #[test]
    fn legendre_tail_matches_direct_difference() {
        let a = [3.0, -1.0, 2.0];
        let b = [0.2, 0.3, -0.1];
        let ra = norm(a);
        let ab = dot(a, b);
        let t2 = 1.0 / ra + ab / ra.powi(3) + (3.0 * ab * ab - ra * ra * dot(b, b)) / (2.0 * ra.powi(5));
        let direct = 1.0 / norm(sub(a, b)) - t2;
        assert!((remainder3(a, b) - direct).abs() < 1e-15);
    }

    #[test]
    fn single_cell_has_no_pairs() {
        let mut c = build_competitor(0.3, 10.0 / 0.3f64.cbrt(), &refs()).unwrap();
        c.half_width = 0;
        c.lambda = (c.theta * c.l.powi(3) / c.mass).cbrt();
        let radius = c.lambda * (3.0 * c.mass / (4.0 * PI)).cbrt();
        c.template = Template::Ball { radius, offset: [0.0; 3] };
        let e = decompose_energy(&c).unwrap();
        let p = e.parts.unwrap();
        assert_eq!((p.near, p.far), (0.0, 0.0));
        assert_eq!(far_field_bound(&c).unwrap().bound, 0.0);
    }

    #[test]
    fn ball_ball_term_against_quadrature() {
        // two unit-density balls, product Gauss rule in spherical coordinates
        let c = build_competitor(0.1, 30.0, &refs()).unwrap();
        let Template::Ball { radius, .. } = c.template else { panic!() };
        let t = pair_terms(&c, [1, 0, 0]).unwrap();
        let d = [c.cell_scale(), 0.0, 0.0];
        let (gr, gt) = (gauss(12), gauss(12));
        let mut nodes = vec![];
        for (r, wr) in gr.on(0.0, radius) {
            for (ct, wt) in gt.on(-1.0, 1.0) {
                for k in 0..24 {
                    let ph = 2.0 * PI * k as f64 / 24.0;
                    let st = (1.0 - ct * ct).sqrt();
                    nodes.push(([r * st * ph.cos(), r * st * ph.sin(), r * ct], wr * wt * r * r * 2.0 * PI / 24.0));
                }
            }
        }
        let mut q = 0.0;
        for (x, wx) in &nodes {
            for (y, wy) in &nodes {
                q += wx * wy / norm(sub(add(d, *y), *x));
            }
        }
        assert!((t.template_template - q).abs() < 1e-9 * q, "{} vs {q}", t.template_template);
    }

    #[test]
    fn pair_symmetry_and_neighbour_decay() {
        let c = build_competitor(0.05, 50.0, &refs()).unwrap();
        let a = pair_interaction(&c, [0, 0, 0], [1, 1, 0]).unwrap();
        let b = pair_interaction(&c, [1, 1, 0], [0, 0, 0]).unwrap();
        assert_eq!(a, b);
        assert!(pair_interaction(&c, [0, 0, 0], [0, 0, 0]).is_err());
        let q = c.template.mass();
        let near: Vec<f64> = (1..4).map(|k| pair_interaction(&c, [0, 0, 0], [k, 0, 0]).unwrap().abs()).collect();
        let scale = q * crate::kernels::cube_potential_integral(c.cell_scale(), [1.0, 0.0, 0.0]);
        assert!(near[0] <= scale, "{near:?}");
        assert!(near[1] < near[0] && near[2] < near[1], "{near:?}");
    }

    #[test]
    fn parts_sum_and_pair_decay_bound() {
        let c = build_competitor(0.3, 16.0, &refs()).unwrap().with_cutoff(3).unwrap();
        let e = decompose_energy(&c).unwrap();
        let p = e.parts.unwrap();
        assert!((p.self_part + p.near + p.far - e.interaction).abs() <= 1e-10 * e.interaction.abs());
        let f = far_field_bound(&c).unwrap();
        assert!(f.bound >= f.exact.abs());
        let lt = c.cell_scale();
        let th = c.theta;
        for m in [[4i64, 0, 0], [4, 3, 1], [5, -2, 3]] {
            let r0 = [-3, if m[1] > 0 { -3 } else { 0 }, -3];
            let v = pair_interaction(&c, r0, [r0[0] + m[0], r0[1] + m[1], r0[2] + m[2]]).unwrap().abs();
            let r = norm(m.map(|x| x as f64));
            let kappa = 100.0 * (1.0 + th * lt.powi(3)) * (1.0 + th * lt.powi(6)) / (lt.powi(4) * r.powi(4));
            assert!(v <= kappa, "{m:?}");
        }
    }

    #[test]
    fn off_center_template_decays_like_a_dipole() {
        let c = build_competitor(0.1, 130.0, &refs()).unwrap();
        let Template::Ball { radius, .. } = c.template else { panic!() };
        let c = LatticeConfig { template: Template::Ball { radius, offset: [0.15 * c.cell_scale(), 0.0, 0.0] }, ..c };
        let ks = [10i64, 14, 20, 28, 40];
        let xs: Vec<f64> = ks.iter().map(|k| *k as f64).collect();
        let ys: Vec<f64> = ks.iter().map(|k| pair_interaction(&c, [-20, 0, 0], [k - 20, 0, 0]).unwrap().abs()).collect();
        let slope = loglog_slope(&xs, &ys);
        assert!(slope >= -3.2, "{slope}");
    }
}
