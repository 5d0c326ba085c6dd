//! Parameter sweeps, result files and the invariant suite behind the CLI.

mod config;
pub mod samples;
mod verify;

pub use config::{parse_pairs, Fault, LRule, Mode, SweepConfig};
pub use verify::{
    complement_check, localization_check, taylor_ratio, verify_suite, yukawa_integral_quadrature, VerifyReport,
};

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::energy::{bc_energy, ReferenceConstants};
use crate::error::{Error, Result};
use crate::fields::BoundaryCondition;
use crate::geometry::VoxelSet;
use crate::linalg::loglog_slope;
use crate::lowerbound::{lower_bound_check, optimize_certificate, Certificate};
use crate::upperbound::{
    build_competitor, cubic_residual, decompose_energy, far_field_bound, moment_kill, orthogonality, verify_moments,
};
use samples::{random_blob, random_ellipsoid, sample_rng};

pub const CSV_HEADER: &str = "mode,theta,L,n,value,reference,gap,rate_fit_slope,runtime_ms";

/// Relative slack allowed in the boundary-condition orderings.
pub const ORDERING_TOLERANCE: f64 = 1e-8;

/// One line of `results.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub mode: String,
    pub theta: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub n: usize,
    pub value: f64,
    pub reference: f64,
    pub gap: f64,
    pub rate_fit_slope: Option<f64>,
    pub runtime_ms: u64,
}

impl Row {
    pub fn csv_line(&self) -> String {
        let slope = self.rate_fit_slope.map(|s| format!("{s:?}")).unwrap_or_default();
        format!(
            "{},{:?},{:?},{},{:?},{:?},{:?},{},{}",
            self.mode, self.theta, self.l, self.n, self.value, self.reference, self.gap, slope, self.runtime_ms
        )
    }
}

pub fn rows_to_csv(rows: &[Row]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv_line());
        s.push('\n');
    }
    s
}

/// A named assertion with its measured margin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Invariant {
    pub name: String,
    pub passed: bool,
    pub margin: f64,
    pub detail: String,
}

impl Invariant {
    fn new(name: impl Into<String>, passed: bool, margin: f64, detail: impl Into<String>) -> Self {
        Invariant { name: name.into(), passed, margin, detail: detail.into() }
    }

    fn error(name: impl Into<String>, e: &Error) -> Self {
        Invariant::new(name, false, f64::NAN, e.to_string())
    }
}

#[derive(Debug, Clone, Default)]
struct Part {
    rows: Vec<Row>,
    detail: Vec<Value>,
    invariants: Vec<Invariant>,
}

/// Sweep outcome; written to `results.csv` and `report.json`.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<Row>,
    pub invariants: Vec<Invariant>,
    pub report: Value,
}

impl SweepOutcome {
    pub fn passed(&self) -> bool {
        self.invariants.iter().all(|i| i.passed)
    }
}

fn elapsed_ms(cfg: &SweepConfig, t: Instant) -> u64 {
    if cfg.timing {
        t.elapsed().as_millis() as u64
    } else {
        0
    }
}

/// Slope of `log y` against `log x` when every `y` is positive.
fn rate_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || y.iter().any(|v| !(*v > 0.0)) {
        return None;
    }
    Some(loglog_slope(x, y))
}

fn trend(thetas: &[f64], gaps: &[f64], range: (f64, f64)) -> Value {
    // sorted by decreasing ϑ, the gap should decrease
    let mut idx: Vec<usize> = (0..thetas.len()).collect();
    idx.sort_by(|a, b| thetas[*b].total_cmp(&thetas[*a]));
    let decreasing = idx.windows(2).all(|w| gaps[w[1]] < gaps[w[0]]);
    let slope = rate_slope(thetas, gaps);
    let magnitudes: Vec<f64> = gaps.iter().map(|g| g.abs()).collect();
    json!({
        "abs_slope": rate_slope(thetas, &magnitudes),
        "positive": gaps.iter().all(|g| *g > 0.0),
        "decreasing": decreasing,
        "slope": slope,
        "slope_range": [range.0, range.1],
        "slope_in_range": slope.is_some_and(|s| s >= range.0 && s <= range.1),
    })
}

struct UpperPoint {
    theta: f64,
    l: f64,
    per_axis: usize,
    value: f64,
    runtime_ms: u64,
    detail: Value,
    invariants: Vec<Invariant>,
}

fn upper_point(cfg: &SweepConfig, theta: f64, refs: &ReferenceConstants) -> Result<UpperPoint> {
    let t0 = Instant::now();
    let l = cfg.l_rule.side(theta);
    let lattice = build_competitor(theta, l, refs)?;
    let energy = decompose_energy(&lattice)?;
    let far = far_field_bound(&lattice)?;
    let value = energy.total / (theta * l * l * l);
    let checks = lattice.checks();
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    let inv = Invariant::new(
        format!("upper.lattice theta={theta:?}"),
        failed.is_empty(),
        failed.len() as f64,
        if failed.is_empty() { "all configuration checks hold".to_string() } else { format!("failed: {}", failed.join(", ")) },
    );
    let far_inv = Invariant::new(
        format!("upper.far_field theta={theta:?}"),
        far.exact.abs() <= far.bound,
        far.bound - far.exact.abs(),
        "computed far part within its explicit bound",
    );
    let runtime_ms = elapsed_ms(cfg, t0);
    Ok(UpperPoint {
        theta,
        l,
        per_axis: lattice.per_axis(),
        value,
        runtime_ms,
        detail: json!({
            "theta": theta,
            "L": l,
            "value": value,
            "gap": value - refs.e_star,
            "lattice": lattice.to_json(),
            "energy": energy,
            "far_field": far,
            "checks": checks,
        }),
        invariants: vec![inv, far_inv],
    })
}

fn upper_sweep(cfg: &SweepConfig, thetas: &[f64]) -> (Part, Vec<(f64, f64)>, Value) {
    let refs = ReferenceConstants::ball_ansatz();
    let points: Vec<(f64, Result<UpperPoint>)> =
        thetas.par_iter().map(|t| (*t, upper_point(cfg, *t, &refs))).collect();
    let mut part = Part::default();
    let mut ok: Vec<UpperPoint> = Vec::new();
    for (t, p) in points {
        match p {
            Ok(p) => {
                eprintln!("upper theta={t:?} value={:?}", p.value);
                ok.push(p);
            }
            Err(e) => part.invariants.push(Invariant::error(format!("upper.build theta={t:?}"), &e)),
        }
    }
    let xs: Vec<f64> = ok.iter().map(|p| p.theta).collect();
    let gaps: Vec<f64> = ok.iter().map(|p| p.value - refs.e_star).collect();
    let slope = rate_slope(&xs, &gaps);
    let rate = trend(&xs, &gaps, (0.25, 0.45));
    let mut values = Vec::new();
    for p in ok {
        part.rows.push(Row {
            mode: Mode::Upper.name().into(),
            theta: p.theta,
            l: p.l,
            n: p.per_axis,
            value: p.value,
            reference: refs.e_star,
            gap: p.value - refs.e_star,
            rate_fit_slope: slope,
            runtime_ms: p.runtime_ms,
        });
        values.push((p.theta, p.value));
        part.detail.push(p.detail);
        part.invariants.extend(p.invariants);
    }
    (part, values, rate)
}

#[derive(Debug, Clone, Serialize)]
struct RandomSets {
    checked: usize,
    failures: usize,
    min_margin: Option<f64>,
}

fn random_set_margins(cfg: &SweepConfig, theta: f64, cert: &Certificate) -> Result<RandomSets> {
    let n = cfg.grid_n;
    let l = cfg.l_rule.side(theta);
    if (theta * (n * n * n) as f64).round() < 1.0 {
        return Ok(RandomSets { checked: 0, failures: 0, min_margin: None });
    }
    let margins: Vec<f64> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(cfg.seed, 2, i);
            let set = VoxelSet::random_neutral(l, n, theta, &mut rng)?;
            Ok(lower_bound_check(&set, theta, cert)?.margin)
        })
        .collect::<Result<_>>()?;
    Ok(RandomSets {
        checked: margins.len(),
        failures: margins.iter().filter(|m| !(**m > 0.0)).count(),
        min_margin: margins.iter().copied().reduce(f64::min),
    })
}

fn lower_sweep(cfg: &SweepConfig, thetas: &[f64]) -> (Part, Vec<(f64, Certificate)>, Value) {
    let e_star = ReferenceConstants::ball_ansatz().e_star;
    let points: Vec<(f64, Result<(Certificate, RandomSets, u64)>)> = thetas
        .par_iter()
        .map(|t| {
            let t0 = Instant::now();
            let r = optimize_certificate(*t, e_star).and_then(|c| {
                let sets = random_set_margins(cfg, *t, &c)?;
                Ok((c, sets, elapsed_ms(cfg, t0)))
            });
            (*t, r)
        })
        .collect();
    let mut part = Part::default();
    let mut certs = Vec::new();
    let mut timings = Vec::new();
    for (t, p) in points {
        match p {
            Ok((c, sets, ms)) => {
                eprintln!("lower theta={t:?} value={:?}", c.value);
                let schedule = c.schedule.map(|s| s.value0).unwrap_or(f64::NEG_INFINITY);
                part.invariants.push(Invariant::new(
                    format!("lower.certificate theta={t:?}"),
                    c.value <= c.e_star && c.value >= schedule,
                    (c.e_star - c.value).min(c.value - schedule),
                    "schedule value <= refined value <= eStar",
                ));
                part.invariants.push(Invariant::new(
                    format!("lower.random_sets theta={t:?}"),
                    sets.failures == 0,
                    sets.min_margin.unwrap_or(f64::INFINITY),
                    format!("{} of {} random neutral sets above the certificate", sets.checked - sets.failures, sets.checked),
                ));
                part.detail.push(json!({ "certificate": c, "random_sets": sets }));
                certs.push((t, c));
                timings.push(ms);
            }
            Err(e) => part.invariants.push(Invariant::error(format!("lower.certificate theta={t:?}"), &e)),
        }
    }
    let xs: Vec<f64> = certs.iter().map(|(t, _)| *t).collect();
    let deficits: Vec<f64> = certs.iter().map(|(_, c)| c.e_star - c.value).collect();
    let slope = rate_slope(&xs, &deficits);
    let mut rate = trend(&xs, &deficits, (0.19, f64::INFINITY));
    let schedule_close = certs.iter().all(|(_, c)| {
        c.schedule.is_some_and(|s| (c.value - s.value0).abs() <= 0.05 * c.value.abs())
    });
    rate["schedule_within_5_percent"] = json!(schedule_close);
    for ((t, c), ms) in certs.iter().zip(timings) {
        part.rows.push(Row {
            mode: Mode::Lower.name().into(),
            theta: *t,
            l: cfg.l_rule.side(*t),
            n: cfg.grid_n,
            value: c.value,
            reference: c.e_star,
            gap: c.e_star - c.value,
            rate_fit_slope: slope,
            runtime_ms: ms,
        });
    }
    (part, certs, rate)
}

/// Ordered pairs `(lower, upper)` of boundary conditions.
pub const ORDERINGS: [(BoundaryCondition, BoundaryCondition); 4] = [
    (BoundaryCondition::Dirichlet, BoundaryCondition::Periodic),
    (BoundaryCondition::Dirichlet, BoundaryCondition::FreeSpace),
    (BoundaryCondition::Periodic, BoundaryCondition::Neumann),
    (BoundaryCondition::FreeSpace, BoundaryCondition::Neumann),
];

/// `(E_hi − E_lo)/max(|E_lo|, |E_hi|)` for each pair in [`ORDERINGS`].
pub fn ordering_margins(set: &VoxelSet, theta: f64) -> Result<[f64; 4]> {
    let mut e = [0.0; 4];
    for (i, bc) in BoundaryCondition::ALL.iter().enumerate() {
        e[i] = bc_energy(set, theta, *bc)?.total;
    }
    let at = |bc: BoundaryCondition| e[BoundaryCondition::ALL.iter().position(|b| *b == bc).expect("listed")];
    let mut out = [0.0; 4];
    for (k, (lo, hi)) in ORDERINGS.iter().enumerate() {
        let (a, b) = (at(*lo), at(*hi));
        out[k] = (b - a) / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    }
    Ok(out)
}

fn bc_sweep(cfg: &SweepConfig, thetas: &[f64]) -> Part {
    let mut part = Part::default();
    for (ti, t) in thetas.iter().enumerate() {
        let t0 = Instant::now();
        let l = cfg.l_rule.side(*t);
        let margins: Result<Vec<[f64; 4]>> = (0..cfg.samples as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = sample_rng(cfg.seed, 3 + ((ti as u64) << 8), i);
                let set = VoxelSet::random_neutral(l, cfg.grid_n, *t, &mut rng)?;
                ordering_margins(&set, *t)
            })
            .collect();
        let margins = match margins {
            Ok(m) => m,
            Err(e) => {
                part.invariants.push(Invariant::error(format!("bc.ordering theta={t:?}"), &e));
                continue;
            }
        };
        let mut worst = [f64::INFINITY; 4];
        let mut violations = 0usize;
        for m in &margins {
            for k in 0..4 {
                worst[k] = worst[k].min(m[k]);
                if m[k] < -ORDERING_TOLERANCE {
                    violations += 1;
                }
            }
        }
        let min = worst.iter().copied().fold(f64::INFINITY, f64::min);
        eprintln!("bc-ordering theta={t:?} violations={violations}");
        let names: Vec<String> = ORDERINGS.iter().map(|(a, b)| format!("{}<={}", a.symbol(), b.symbol())).collect();
        part.detail.push(json!({
            "theta": t,
            "L": l,
            "n": cfg.grid_n,
            "samples": margins.len(),
            "violations": violations,
            "orderings": names,
            "worst_relative_margin": worst,
        }));
        part.invariants.push(Invariant::new(
            format!("bc.ordering theta={t:?}"),
            violations == 0,
            min,
            format!("{violations} violations over {} sets", margins.len()),
        ));
        part.rows.push(Row {
            mode: Mode::BcOrdering.name().into(),
            theta: *t,
            l,
            n: cfg.grid_n,
            value: violations as f64,
            reference: 0.0,
            gap: min,
            rate_fit_slope: None,
            runtime_ms: elapsed_ms(cfg, t0),
        });
    }
    part
}

/// Measured quantities of one moment-kill sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KillSample {
    pub eta0: f64,
    pub det_error: f64,
    /// `max|λᵢ − 1|·η₀²`.
    pub aspect_scaled: f64,
    pub cubic_residual: f64,
    pub orthogonality: f64,
    pub monopole: f64,
    pub dipole: f64,
    pub quadrupole: f64,
}

impl KillSample {
    pub fn passed(&self) -> bool {
        self.det_error <= 1e-12
            && self.aspect_scaled <= 100.0
            && self.cubic_residual <= 1e-12
            && self.orthogonality <= 1e-12
            && self.monopole.max(self.dipole).max(self.quadrupole) <= 1e-6
    }
}

pub fn kill_sample(seed: u64, tag: u64, index: u64, theta: f64, blob_n: usize) -> Result<KillSample> {
    let mut rng = sample_rng(seed, tag, index);
    let shape = if index % 4 == 3 { random_blob(&mut rng, blob_n)? } else { random_ellipsoid(&mut rng) };
    let l0 = (shape.volume() / theta).cbrt();
    let k = moment_kill(&shape, l0, theta)?;
    let (q, d, p) = verify_moments(&shape, &k)?;
    Ok(KillSample {
        eta0: k.eta0,
        det_error: (k.lambda.iter().product::<f64>() - 1.0).abs(),
        aspect_scaled: k.lambda.iter().map(|l| (l - 1.0).abs()).fold(0.0, f64::max) * k.eta0 * k.eta0,
        cubic_residual: cubic_residual(&k),
        orthogonality: orthogonality(&k),
        monopole: q,
        dipole: d,
        quadrupole: p,
    })
}

fn kill_sweep(cfg: &SweepConfig, thetas: &[f64]) -> Part {
    let mut part = Part::default();
    for (ti, t) in thetas.iter().enumerate() {
        let t0 = Instant::now();
        let results: Vec<Result<KillSample>> = (0..cfg.samples as u64)
            .into_par_iter()
            .map(|i| kill_sample(cfg.seed, 4 + ((ti as u64) << 8), i, *t, cfg.grid_n))
            .collect();
        let mut errors = Vec::new();
        let mut ok = Vec::new();
        for r in results {
            match r {
                Ok(s) => ok.push(s),
                Err(e) => errors.push(e.to_string()),
            }
        }
        let fold = |f: fn(&KillSample) -> f64| ok.iter().map(f).fold(0.0, f64::max);
        let moment = fold(|s| s.monopole.max(s.dipole).max(s.quadrupole));
        let aspect = fold(|s| s.aspect_scaled);
        let failed = ok.iter().filter(|s| !s.passed()).count() + errors.len();
        let eta_min = ok.iter().map(|s| s.eta0).fold(f64::INFINITY, f64::min);
        eprintln!("moment-kill theta={t:?} failures={failed}");
        part.detail.push(json!({
            "theta": t,
            "samples": cfg.samples,
            "failures": failed,
            "errors": errors,
            "eta0_min": eta_min,
            "max_det_error": fold(|s| s.det_error),
            "max_aspect_scaled": aspect,
            "max_cubic_residual": fold(|s| s.cubic_residual),
            "max_orthogonality": fold(|s| s.orthogonality),
            "max_relative_moment": moment,
        }));
        part.invariants.push(Invariant::new(
            format!("moment_kill theta={t:?}"),
            failed == 0,
            1e-6 - moment,
            format!("{failed} of {} samples failed", cfg.samples),
        ));
        part.rows.push(Row {
            mode: Mode::MomentKill.name().into(),
            theta: *t,
            l: 0.0,
            n: cfg.grid_n,
            value: moment,
            reference: 1e-6,
            gap: aspect,
            rate_fit_slope: None,
            runtime_ms: elapsed_ms(cfg, t0),
        });
    }
    part
}

fn sandwich(upper: &[(f64, f64)], certs: &[(f64, Certificate)], e_star: f64) -> (Vec<Value>, Vec<Invariant>) {
    let mut detail = Vec::new();
    let mut inv = Vec::new();
    for (t, construction) in upper {
        let Some((_, c)) = certs.iter().find(|(tc, _)| tc == t) else { continue };
        detail.push(json!({
            "theta": t,
            "certificate": c.value,
            "eStar": e_star,
            "construction": construction,
            "certificate_below_eStar": c.value <= e_star,
            "eStar_below_construction": e_star <= *construction,
        }));
        inv.push(Invariant::new(
            format!("sandwich theta={t:?}"),
            c.value <= e_star && e_star <= *construction,
            (e_star - c.value).min(construction - e_star),
            "certificate <= eStar <= construction",
        ));
        inv.push(Invariant::new(
            format!("certificate_below_construction theta={t:?}"),
            c.value <= *construction,
            construction - c.value,
            "certificate <= construction",
        ));
    }
    (detail, inv)
}

fn run(cfg: &SweepConfig) -> SweepOutcome {
    let e_star = ReferenceConstants::ball_ansatz().e_star;
    let mut rows = Vec::new();
    let mut invariants = Vec::new();
    let mut report = json!({ "config": cfg, "eStar": e_star });
    let full = cfg.mode == Mode::Full;
    let mut upper_values = Vec::new();
    let mut certs = Vec::new();
    if full || cfg.mode == Mode::Upper {
        let (part, values, rate) = upper_sweep(cfg, &cfg.thetas_for(Mode::Upper));
        rows.extend(part.rows);
        invariants.extend(part.invariants);
        report["upper"] = json!(part.detail);
        report["upper_rate"] = rate;
        upper_values = values;
    }
    if full || cfg.mode == Mode::Lower {
        let mut thetas = cfg.thetas_for(Mode::Lower);
        if full {
            for (t, _) in &upper_values {
                if !thetas.contains(t) {
                    thetas.push(*t);
                }
            }
        }
        let (part, c, rate) = lower_sweep(cfg, &thetas);
        rows.extend(part.rows);
        invariants.extend(part.invariants);
        report["lower"] = json!(part.detail);
        report["lower_rate"] = rate;
        certs = c;
    }
    if full || cfg.mode == Mode::BcOrdering {
        let part = bc_sweep(cfg, &cfg.thetas_for(Mode::BcOrdering));
        rows.extend(part.rows);
        invariants.extend(part.invariants);
        report["bc_ordering"] = json!(part.detail);
    }
    if full || cfg.mode == Mode::MomentKill {
        let part = kill_sweep(cfg, &cfg.thetas_for(Mode::MomentKill));
        rows.extend(part.rows);
        invariants.extend(part.invariants);
        report["moment_kill"] = json!(part.detail);
    }
    if full {
        let (detail, inv) = sandwich(&upper_values, &certs, e_star);
        report["sandwich"] = json!(detail);
        invariants.extend(inv);
    }
    report["rows"] = json!(rows);
    report["invariants"] = json!(invariants);
    let passed = invariants.iter().all(|i| i.passed);
    report["passed"] = json!(passed);
    SweepOutcome { rows, invariants, report }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(contents.as_bytes())?;
    Ok(())
}

/// Runs the configured sweep and writes `results.csv` and `report.json`
/// into the output directory.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    cfg.validate()?;
    let outcome = run(cfg);
    fs::create_dir_all(&cfg.out)?;
    write_file(&cfg.out.join("results.csv"), &rows_to_csv(&outcome.rows))?;
    write_file(&cfg.out.join("report.json"), &(serde_json::to_string_pretty(&outcome.report)? + "\n"))?;
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_formatting_round_trips() {
        let r = Row {
            mode: "upper".into(),
            theta: 0.1,
            l: 1.0 / 3.0,
            n: 9,
            value: 5.344766,
            reference: 1e-6,
            gap: -0.0,
            rate_fit_slope: None,
            runtime_ms: 0,
        };
        let line = r.csv_line();
        assert_eq!(line, "upper,0.1,0.3333333333333333,9,5.344766,1e-6,-0.0,,0");
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[2].parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn rate_slope_needs_positive_gaps() {
        assert_eq!(rate_slope(&[1.0, 2.0], &[1.0, -1.0]), None);
        let s = rate_slope(&[1.0, 8.0], &[1.0, 2.0]).unwrap();
        assert!((s - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn ordering_margins_on_a_small_set() {
        let mut rng = sample_rng(3, 0, 0);
        let s = VoxelSet::random_neutral(4.0, 8, 0.3, &mut rng).unwrap();
        let m = ordering_margins(&s, 0.3).unwrap();
        assert!(m.iter().all(|v| *v >= -ORDERING_TOLERANCE), "{m:?}");
    }

    #[test]
    fn kill_samples_pass() {
        for i in 0..4 {
            let s = kill_sample(1, 0, i, 1e-4, 16).unwrap();
            assert!(s.passed(), "{s:?}");
        }
    }

    #[test]
    fn empty_grid_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("o");
        let r = SweepConfig::from_pairs([("theta_grid", " "), ("out", out.to_str().unwrap())]);
        assert!(matches!(r, Err(Error::Config(_))));
        let cfg = SweepConfig { theta_grid: vec![], out: out.clone(), ..SweepConfig::default() };
        assert!(run_sweep(&cfg).is_err());
        assert!(!out.exists());
    }
}
