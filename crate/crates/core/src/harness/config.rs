use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Upper,
    Lower,
    BcOrdering,
    MomentKill,
    Full,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Upper => "upper",
            Mode::Lower => "lower",
            Mode::BcOrdering => "bc-ordering",
            Mode::MomentKill => "moment-kill",
            Mode::Full => "full",
        }
    }

    /// Grid used when `theta_grid` is not given.
    pub fn default_thetas(self) -> Vec<f64> {
        match self {
            Mode::Upper | Mode::Full => vec![2e-2, 5e-3, 1.25e-3, 3e-4],
            Mode::Lower => vec![1e-6, 1e-5, 1e-4, 1e-3, 1e-2],
            Mode::BcOrdering => vec![0.1, 0.3, 0.5],
            Mode::MomentKill => vec![1e-4, 3e-5, 1e-5],
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "upper" => Mode::Upper,
            "lower" => Mode::Lower,
            "bc-ordering" => Mode::BcOrdering,
            "moment-kill" => Mode::MomentKill,
            "full" => Mode::Full,
            _ => return Err(Error::Config(format!("unknown mode '{s}'"))),
        })
    }
}

/// How the box side follows ϑ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum LRule {
    Fixed(f64),
    /// `ϑ^{1/3}L` held constant.
    Product(f64),
}

impl LRule {
    pub fn side(self, theta: f64) -> f64 {
        match self {
            LRule::Fixed(l) => l,
            LRule::Product(p) => p / theta.cbrt(),
        }
    }
}

impl fmt::Display for LRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LRule::Fixed(l) => write!(f, "fixed:{l:?}"),
            LRule::Product(p) => write!(f, "product:{p:?}"),
        }
    }
}

impl FromStr for LRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, v) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("l_rule must be 'fixed:<L>' or 'product:<c>', got '{s}'")))?;
        let v = parse_f64("l_rule", v)?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Config(format!("l_rule value must be positive, got {v}")));
        }
        match kind.trim() {
            "fixed" => Ok(LRule::Fixed(v)),
            "product" => Ok(LRule::Product(v)),
            other => Err(Error::Config(format!("unknown l_rule kind '{other}'"))),
        }
    }
}

/// Deliberate defects for exercising the verification suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Adds one face to every perimeter evaluated by the complement check.
    Perimeter,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub mode: Mode,
    pub theta_grid: Vec<f64>,
    /// True when `theta_grid` came from the defaults of the mode.
    #[serde(skip)]
    pub default_grid: bool,
    pub l_rule: LRule,
    pub grid_n: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub samples: usize,
    /// Record wall-clock times; off keeps the CSV byte-reproducible.
    pub timing: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            mode: Mode::Full,
            theta_grid: Mode::Full.default_thetas(),
            default_grid: true,
            l_rule: LRule::Product(13.6),
            grid_n: 16,
            seed: 1,
            out: PathBuf::from("out"),
            samples: 100,
            timing: false,
            fault: None,
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim().parse::<f64>().map_err(|_| Error::Config(format!("{key}: cannot parse '{}' as a number", v.trim())))
}

fn parse_int<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse::<T>().map_err(|_| Error::Config(format!("{key}: cannot parse '{}' as an integer", v.trim())))
}

fn canonical_key(key: &str) -> Option<&'static str> {
    Some(match key {
        "mode" => "mode",
        "theta_grid" | "thetaGrid" => "theta_grid",
        "l_rule" | "LRule" => "l_rule",
        "grid_n" | "gridN" => "grid_n",
        "seed" => "seed",
        "out" | "outPath" => "out",
        "samples" => "samples",
        "timing" => "timing",
        "inject_fault" => "inject_fault",
        _ => return None,
    })
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value', got '{line}'", i + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

impl SweepConfig {
    /// Later pairs override earlier ones.
    pub fn from_pairs<'a, I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut map: BTreeMap<&'static str, String> = BTreeMap::new();
        for (k, v) in pairs {
            let key = canonical_key(k).ok_or_else(|| Error::Config(format!("unknown key '{k}'")))?;
            map.insert(key, v.to_string());
        }
        let mut c = SweepConfig::default();
        if let Some(v) = map.get("mode") {
            c.mode = v.trim().parse()?;
            c.theta_grid = c.mode.default_thetas();
        }
        if let Some(v) = map.get("theta_grid") {
            c.theta_grid = v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| parse_f64("theta_grid", s))
                .collect::<Result<_>>()?;
            c.default_grid = false;
        }
        if let Some(v) = map.get("l_rule") {
            c.l_rule = v.parse()?;
        }
        if let Some(v) = map.get("grid_n") {
            c.grid_n = parse_int("grid_n", v)?;
        }
        if let Some(v) = map.get("seed") {
            c.seed = parse_int("seed", v)?;
        }
        if let Some(v) = map.get("out") {
            c.out = PathBuf::from(v.trim());
        }
        if let Some(v) = map.get("samples") {
            c.samples = parse_int("samples", v)?;
        }
        if let Some(v) = map.get("timing") {
            c.timing = match v.trim() {
                "true" | "on" | "1" => true,
                "false" | "off" | "0" => false,
                other => return Err(Error::Config(format!("timing: expected on/off, got '{other}'"))),
            };
        }
        if let Some(v) = map.get("inject_fault") {
            c.fault = match v.trim() {
                "none" | "" => None,
                "perimeter" => Some(Fault::Perimeter),
                other => return Err(Error::Config(format!("unknown fault '{other}'"))),
            };
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> Result<Self> {
        let mut pairs = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
                parse_pairs(&text)?
            }
            None => Vec::new(),
        };
        pairs.extend(overrides.iter().cloned());
        Self::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta_grid.is_empty() {
            return Err(Error::Config("theta_grid is empty".into()));
        }
        if let Some(t) = self.theta_grid.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
            return Err(Error::Config(format!("theta_grid entries must lie in (0, 1], got {t}")));
        }
        if !(8..=64).contains(&self.grid_n) {
            return Err(Error::Config(format!("grid_n must lie in [8, 64], got {}", self.grid_n)));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        Ok(())
    }

    /// Grid for a sub-sweep of a full run: the given grid drives the upper and
    /// lower sweeps, the others keep their own defaults.
    pub fn thetas_for(&self, mode: Mode) -> Vec<f64> {
        if self.mode == Mode::Full && (self.default_grid || matches!(mode, Mode::BcOrdering | Mode::MomentKill)) {
            mode.default_thetas()
        } else {
            self.theta_grid.clone()
        }
    }
}
