//! Periodic lattice competitors and their energy decomposition.

mod lattice_sum;
mod moment_kill;
mod pair;

pub use lattice_sum::{lattice_sum_inv4, InvFourSum};
pub use moment_kill::{cubic_residual, cubic_root_near_one, moment_kill, orthogonality, verify_moments, MomentKillResult, Shape};
pub use pair::{
    decompose_energy, far_field_bound, pair_interaction, pair_terms, self_interaction, FarField, PairTerms,
};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::energy::ReferenceConstants;
use crate::error::{Error, Result};
use crate::linalg::{norm, Vec3};

pub const DEFAULT_CUTOFF: usize = 10;

/// Charge template placed in every cell, relative to the cell center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum Template {
    Ball { radius: f64, offset: Vec3 },
    /// Weighted quadrature points of a solid shape; weights sum to its mass.
    Cloud { points: Vec<Vec3>, weights: Vec<f64>, label: String },
}

impl Template {
    pub fn mass(&self) -> f64 {
        match self {
            Template::Ball { radius, .. } => 4.0 * std::f64::consts::PI / 3.0 * radius.powi(3),
            Template::Cloud { weights, .. } => weights.iter().sum(),
        }
    }

    /// Half-widths of the axis-aligned bounding box around the cell center.
    pub fn extent(&self) -> Vec3 {
        match self {
            Template::Ball { radius, offset } => offset.map(|o| o.abs() + radius),
            Template::Cloud { points, .. } => points.iter().fold([0.0; 3], |e, p| {
                [e[0].max(p[0].abs()), e[1].max(p[1].abs()), e[2].max(p[2].abs())]
            }),
        }
    }

    fn reach(&self) -> f64 {
        match self {
            Template::Ball { radius, offset } => norm(*offset) + radius,
            Template::Cloud { points, .. } => points.iter().fold(0.0, |m, p| m.max(norm(*p))),
        }
    }
}

/// Cells `r ∈ [−K, K]³` of sides `λ·aspectᵢ·l0` tiling the box, each holding
/// one copy of the template.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeConfig {
    pub theta: f64,
    pub l: f64,
    pub l0: f64,
    pub mass: f64,
    pub lambda: f64,
    pub aspect: Vec3,
    pub half_width: usize,
    pub template: Template,
    pub cutoff: usize,
}

/// Outcome of one configuration check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
}

impl LatticeConfig {
    pub fn per_axis(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn cell_count(&self) -> usize {
        self.per_axis().pow(3)
    }

    pub fn cells(&self) -> Vec<[i64; 3]> {
        let k = self.half_width as i64;
        let mut out = Vec::with_capacity(self.cell_count());
        for z in -k..=k {
            for y in -k..=k {
                for x in -k..=k {
                    out.push([x, y, z]);
                }
            }
        }
        out
    }

    pub fn contains(&self, r: [i64; 3]) -> bool {
        r.iter().all(|x| x.unsigned_abs() as usize <= self.half_width)
    }

    /// Scaled base length `λ·l0`.
    pub fn cell_scale(&self) -> f64 {
        self.lambda * self.l0
    }

    pub fn sides(&self) -> Vec3 {
        self.aspect.map(|a| a * self.cell_scale())
    }

    pub fn with_cutoff(mut self, m: usize) -> Result<Self> {
        if m < 1 {
            return Err(Error::OutOfRange("cutoff must be at least 1".into()));
        }
        self.cutoff = m;
        Ok(self)
    }

    pub fn with_template(mut self, template: Template) -> Result<Self> {
        let want = self.theta * self.sides().iter().product::<f64>();
        if (template.mass() - want).abs() > 1e-10 * want {
            return Err(Error::Precondition(format!(
                "template mass {} breaks local neutrality {}",
                template.mass(),
                want
            )));
        }
        self.template = template;
        Ok(self)
    }

    /// Lower bound on the distance between points of distinct template
    /// copies.
    pub fn separation(&self) -> f64 {
        let e = self.template.extent();
        let s = self.sides();
        (0..3).map(|i| s[i] - 2.0 * e[i]).fold(f64::INFINITY, f64::min)
    }

    pub fn checks(&self) -> Vec<Check> {
        let lt = self.l / self.l0;
        let n = self.cell_count() as f64;
        let lam3 = self.lambda.powi(3);
        let cell_vol = self.sides().iter().product::<f64>();
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
        vec![
            Check {
                name: "base cell mass",
                passed: rel(self.theta * self.l0.powi(3), self.mass) <= 1e-12,
                value: rel(self.theta * self.l0.powi(3), self.mass),
                limit: 1e-12,
            },
            Check {
                name: "global neutrality",
                passed: rel(lam3 * self.mass * n, self.theta * self.l.powi(3)) <= 1e-12,
                value: rel(lam3 * self.mass * n, self.theta * self.l.powi(3)),
                limit: 1e-12,
            },
            Check {
                name: "local neutrality",
                passed: rel(self.template.mass(), self.theta * cell_vol) <= 1e-12,
                value: rel(self.template.mass(), self.theta * cell_vol),
                limit: 1e-12,
            },
            Check { name: "scaling at least one", passed: lam3 >= 1.0 - 1e-12, value: lam3, limit: 1.0 },
            Check {
                name: "scaling near one",
                passed: lam3 <= 1.0 + 10.0 / lt,
                value: lam3,
                limit: 1.0 + 10.0 / lt,
            },
            Check {
                name: "cell count",
                passed: n <= lt.powi(3) * (1.0 + 1e-12) && n >= lt.powi(3) - 10.0 * lt * lt,
                value: n,
                limit: lt.powi(3) - 10.0 * lt * lt,
            },
            Check {
                name: "disjoint copies",
                passed: self.separation() > 0.0,
                value: self.separation(),
                limit: 0.0,
            },
            Check {
                name: "separation quarter cell",
                passed: self.separation() >= self.cell_scale() / 4.0,
                value: self.separation() / self.cell_scale(),
                limit: 0.25,
            },
        ]
    }

    pub fn to_json(&self) -> Value {
        let lambda = if self.aspect == [1.0; 3] {
            json!(self.lambda)
        } else {
            json!(self.aspect.map(|a| a * self.lambda))
        };
        json!({
            "theta": self.theta,
            "L": self.l,
            "l0": self.l0,
            "lambda": lambda,
            "M": self.cutoff,
            "cells": self.cells(),
            "template": self.template,
        })
    }
}

fn lattice_half_width(l: f64, l0: f64) -> Result<usize> {
    let k = ((l / l0 - 1.0) / 2.0 + 1e-9).floor();
    if k < 0.0 {
        return Err(Error::EmptySet);
    }
    Ok(k as usize)
}

fn check_regime(theta: f64, l: f64) -> Result<()> {
    if !(theta > 0.0 && theta <= 0.5) {
        return Err(Error::OutOfRange(format!("volume fraction {theta} outside (0, 1/2]")));
    }
    if !(theta.cbrt() * l >= 10.0 - 1e-12) {
        return Err(Error::Precondition(format!("box too small: theta^(1/3) L = {}", theta.cbrt() * l)));
    }
    Ok(())
}

/// Centered balls of mass `λ³A*` on the largest centered lattice of cells of
/// side `l0 = (A*/ϑ)^{1/3}` fitting in `Q_L`, rescaled by `λ` to tile it.
pub fn build_competitor(theta: f64, l: f64, refs: &ReferenceConstants) -> Result<LatticeConfig> {
    check_regime(theta, l)?;
    let mass = refs.a_star;
    let l0 = (mass / theta).cbrt();
    let k = lattice_half_width(l, l0)?;
    let n = ((2 * k + 1) as f64).powi(3);
    let lambda = (theta * l.powi(3) / (mass * n)).cbrt();
    let radius = lambda * (3.0 * mass / (4.0 * std::f64::consts::PI)).cbrt();
    if 2.0 * radius >= lambda * l0 {
        return Err(Error::Invariant("ball copies overlap".into()));
    }
    Ok(LatticeConfig {
        theta,
        l,
        l0,
        mass,
        lambda,
        aspect: [1.0; 3],
        half_width: k,
        template: Template::Ball { radius, offset: [0.0; 3] },
        cutoff: DEFAULT_CUTOFF,
    })
}

/// Lattice of cuboids `λ·(λ₁,λ₂,λ₃)·l0` carrying the transformed template of
/// a moment-killing result.
pub fn build_cuboid_competitor(theta: f64, l: f64, kill: &MomentKillResult) -> Result<LatticeConfig> {
    check_regime(theta, l)?;
    let l0 = kill.l0;
    let mass = theta * l0.powi(3);
    let k = lattice_half_width(l, l0)?;
    let n = ((2 * k + 1) as f64).powi(3);
    let lambda = (theta * l.powi(3) / (mass * n)).cbrt();
    let template = if kill.lambda == [1.0; 3] && kill.is_ball() {
        Template::Ball { radius: lambda * (3.0 * mass / (4.0 * std::f64::consts::PI)).cbrt(), offset: [0.0; 3] }
    } else {
        let w_total: f64 = kill.weights.iter().sum();
        let target = lambda.powi(3) * mass;
        Template::Cloud {
            points: kill.points.iter().map(|p| p.map(|x| x * lambda)).collect(),
            weights: kill.weights.iter().map(|w| w * target / w_total).collect(),
            label: kill.label.clone(),
        }
    };
    let cfg = LatticeConfig {
        theta,
        l,
        l0,
        mass,
        lambda,
        aspect: kill.lambda,
        half_width: k,
        template,
        cutoff: DEFAULT_CUTOFF,
    };
    if cfg.separation() <= 0.0 {
        return Err(Error::Containment("transformed template leaves its cell".into()));
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn refs() -> ReferenceConstants {
        ReferenceConstants::ball_ansatz()
    }

    #[test]
    fn worked_example() {
        let c = build_competitor(0.02, 50.0, &refs()).unwrap();
        assert!((c.l0 - 5.0).abs() < 1e-12);
        assert_eq!(c.half_width, 4);
        assert_eq!(c.cell_count(), 729);
        assert!((c.lambda - 10.0 / 9.0).abs() < 1e-12);
        assert!((c.lambda.powi(3) - 1000.0 / 729.0).abs() < 1e-12);
        assert!(c.cells().iter().all(|r| r.iter().all(|x| x.abs() <= 4)));
        for chk in c.checks() {
            if chk.name != "scaling near one" {
                assert!(chk.passed, "{chk:?}");
            }
        }
    }

    #[test]
    fn perfect_tiling_has_unit_scaling() {
        let theta = 0.1;
        let l0 = (2.5f64 / theta).cbrt();
        let c = build_competitor(theta, 11.0 * l0, &refs()).unwrap();
        assert_eq!(c.per_axis(), 11);
        assert!((c.lambda - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_filling_keeps_balls_disjoint() {
        let c = build_competitor(0.5, 40.0, &refs()).unwrap();
        let Template::Ball { radius, .. } = c.template else { panic!() };
        assert!(2.0 * radius < c.cell_scale());
        assert!(c.separation() > 0.0);
    }

    #[test]
    fn preconditions() {
        assert!(matches!(build_competitor(0.6, 50.0, &refs()), Err(Error::OutOfRange(_))));
        assert!(matches!(build_competitor(0.0, 50.0, &refs()), Err(Error::OutOfRange(_))));
        assert!(matches!(build_competitor(0.001, 50.0, &refs()), Err(Error::Precondition(_))));
    }

    #[test]
    fn json_shape() {
        let c = build_competitor(0.02, 50.0, &refs()).unwrap();
        let v = c.to_json();
        assert_eq!(v["M"], 10);
        assert_eq!(v["cells"].as_array().unwrap().len(), 729);
        assert_eq!(v["template"]["kind"], "ball");
        assert!(v["lambda"].is_number());
    }
}
