//! Experiment configuration files (TOML). Every field except `experiment` is
//! optional; [`ExperimentConfig::resolve`] fills per-experiment defaults and
//! validates everything before any computation starts.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use spinbath_core::darwinism::FragmentStrategy;

use crate::error::{CliError, Result};

/// Largest bath handled on the full `2^(N+1)` register.
pub const MAX_FULL_SPACE_BATH: usize = 18;
/// Largest bath for the oracle cross-checks.
pub const MAX_ORACLE_BATH: usize = 10;
pub const DEFAULT_ORACLE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Custom,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [Self::Fig1, Self::Fig2, Self::Fig3, Self::Fig4, Self::Custom];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Fig1 => "fig1",
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
            Self::Fig4 => "fig4",
            Self::Custom => "custom",
        }
    }

    pub fn summary(&self) -> &'static str {
        match self {
            Self::Fig1 => "I(S:F) vs fragment size at d*t = pi/4 for every ground sector (N = 14, lambda = 0)",
            Self::Fig2 => "I(S:F) over time and fragment size for several lambda (N = 12, d = h = 1)",
            Self::Fig3 => "BLP measure vs field h (N = 12, window [0, pi/4])",
            Self::Fig4 => "BLP measure just below the critical field vs bath size",
            Self::Custom => "I(S:F) surface and trace distance for a user-defined evolution",
        }
    }

    pub fn columns(&self) -> &'static [&'static str] {
        match self {
            Self::Fig1 => &["h", "n", "F", "I_bits", "I_over_HS"],
            Self::Fig2 => &["lambda", "t", "F", "I_bits", "delta"],
            Self::Fig3 => &["h", "n", "N_blp"],
            Self::Fig4 => &["N", "N_blp_at_hc_minus"],
            Self::Custom => &["lambda", "t", "F", "I_bits", "I_over_HS", "D"],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A real number written either as a plain float or as a multiple of pi,
/// e.g. `"pi/4"`, `"0.5*pi"`, `"3pi/2"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RealRepr", into = "f64")]
pub struct Real(pub f64);

#[derive(Deserialize)]
#[serde(untagged)]
enum RealRepr {
    Number(f64),
    Int(i64),
    Text(String),
}

impl TryFrom<RealRepr> for Real {
    type Error = String;

    fn try_from(r: RealRepr) -> std::result::Result<Self, String> {
        match r {
            RealRepr::Number(x) => Ok(Real(x)),
            RealRepr::Int(x) => Ok(Real(x as f64)),
            RealRepr::Text(s) => s.parse(),
        }
    }
}

impl From<Real> for f64 {
    fn from(r: Real) -> f64 {
        r.0
    }
}

impl FromStr for Real {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bad = || format!("cannot read {s:?} as a number or multiple of pi");
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Ok(x) = t.parse::<f64>() {
            return Ok(Real(x));
        }
        let (num, den) = match t.split_once('/') {
            Some((a, b)) => (a, b.parse::<f64>().map_err(|_| bad())?),
            None => (t.as_str(), 1.0),
        };
        let (sign, num) = match num.strip_prefix('-') {
            Some(rest) => (-1.0, rest),
            None => (1.0, num),
        };
        let coeff = match num.strip_suffix("pi") {
            Some("") => 1.0,
            Some(c) => c.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
            None => return Err(bad()),
        };
        Ok(Real(sign * coeff * PI / den))
    }
}

/// Which bath state starts the evolution in a custom experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SectorChoice {
    Named(GroundKeyword),
    Index(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroundKeyword {
    Ground,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Largest accepted deviation from the dense oracles.
    pub oracle: Option<f64>,
}

/// Raw configuration as written in the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Output file stem; defaults to the experiment name.
    pub name: Option<String>,
    pub n_bath: Option<usize>,
    /// Bath sizes (fig4).
    pub sizes: Option<Vec<usize>>,
    pub h: Option<Real>,
    /// Field grid (fig1, fig3); fig1 defaults to one field per ground sector.
    pub fields: Option<Vec<Real>>,
    pub lambdas: Option<Vec<Real>>,
    pub d: Option<Real>,
    /// Evaluation time (fig1); `d·t = π/4` at the defaults.
    pub t: Option<Real>,
    /// Uniform time grid `[0, t_max]` with `time_points` points (fig2, custom).
    pub t_max: Option<Real>,
    pub time_points: Option<usize>,
    /// BLP integration window `[0, window]` (fig3, fig4).
    pub window: Option<Real>,
    pub strategy: Option<String>,
    pub sector: Option<SectorChoice>,
    /// Cross-check every quantity against dense brute force (custom, N ≤ 10).
    pub oracle: Option<bool>,
    pub strict: Option<bool>,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// Fully specified experiment with every default applied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedConfig {
    pub experiment: Experiment,
    pub name: String,
    pub plan: Plan,
    pub strict: bool,
    pub oracle_tolerance: f64,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Plan {
    Profiles {
        n_bath: usize,
        d: f64,
        t: f64,
        /// Empty: one representative field per ground sector.
        fields: Vec<f64>,
        strategy: String,
    },
    Surface {
        n_bath: usize,
        d: f64,
        h: f64,
        lambdas: Vec<f64>,
        t_max: f64,
        time_points: usize,
        strategy: String,
        /// `None`: global ground state at `h`.
        sector: Option<usize>,
        oracle: bool,
    },
    FieldScan {
        n_bath: usize,
        fields: Vec<f64>,
        window: f64,
    },
    SizeScan {
        sizes: Vec<usize>,
        window: f64,
    },
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Validation(msg.into()))
}

fn finite(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        invalid(format!("{name} must be finite"))
    }
}

fn reals(name: &str, v: &[Real]) -> Result<Vec<f64>> {
    if v.is_empty() {
        return invalid(format!("{name} must not be empty"));
    }
    v.iter().map(|r| finite(name, r.0)).collect()
}

fn bath_size(n: usize, max: usize) -> Result<usize> {
    if !(3..=max).contains(&n) {
        return invalid(format!("n_bath = {n} outside 3..={max}"));
    }
    Ok(n)
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Default configuration of a named experiment.
    pub fn preset(experiment: Experiment) -> Self {
        Self {
            experiment,
            name: None,
            n_bath: None,
            sizes: None,
            h: None,
            fields: None,
            lambdas: None,
            d: None,
            t: None,
            t_max: None,
            time_points: None,
            window: None,
            strategy: None,
            sector: None,
            oracle: None,
            strict: None,
            output_dir: None,
            tolerances: Tolerances::default(),
        }
    }

    fn reject(&self, keys: &[(&str, bool)]) -> Result<()> {
        for (key, present) in keys {
            if *present {
                return invalid(format!("`{key}` is not used by {}", self.experiment));
            }
        }
        Ok(())
    }

    pub fn resolve(&self) -> Result<ResolvedConfig> {
        use Experiment::*;
        let d = finite("d", self.d.map_or(1.0, |r| r.0))?;
        if d <= 0.0 {
            return invalid("d must be positive");
        }
        let strategy = match &self.strategy {
            Some(s) => {
                FragmentStrategy::parse(s).ok_or_else(|| CliError::Validation(format!("unknown strategy {s:?}")))?;
                s.clone()
            }
            None => FragmentStrategy::Contiguous.name().to_string(),
        };
        let window = finite("window", self.window.map_or(FRAC_PI_4, |r| r.0))?;
        if window <= 0.0 {
            return invalid("window must be positive");
        }
        let oracle = self.oracle.unwrap_or(false);
        if oracle && self.experiment != Custom {
            return invalid("oracle mode is only available for custom experiments");
        }
        let plan = match self.experiment {
            Fig1 => {
                self.reject(&[
                    ("sizes", self.sizes.is_some()),
                    ("h", self.h.is_some()),
                    ("lambdas", self.lambdas.is_some()),
                    ("t_max", self.t_max.is_some()),
                    ("time_points", self.time_points.is_some()),
                    ("window", self.window.is_some()),
                    ("sector", self.sector.is_some()),
                ])?;
                let fields = match &self.fields {
                    Some(f) => reals("fields", f)?,
                    None => Vec::new(),
                };
                let n_bath = bath_size(self.n_bath.unwrap_or(14), MAX_FULL_SPACE_BATH)?;
                if fields.iter().any(|&h| h < 0.0) {
                    return invalid("fields must be >= 0");
                }
                if strategy == FragmentStrategy::SymmetricClosedForm.name() {
                    return invalid("the symmetric closed form only covers sectors 0 and 1; use it in custom runs");
                }
                if strategy == FragmentStrategy::SubsetAverage.name()
                    && n_bath > spinbath_core::darwinism::MAX_SUBSET_AVERAGE
                {
                    return invalid("subset averaging needs n_bath <= 12");
                }
                Plan::Profiles {
                    n_bath,
                    d,
                    t: finite("t", self.t.map_or(FRAC_PI_4, |r| r.0))?,
                    fields,
                    strategy,
                }
            }
            Fig2 | Custom => {
                self.reject(&[
                    ("sizes", self.sizes.is_some()),
                    ("fields", self.fields.is_some()),
                    ("t", self.t.is_some()),
                    ("window", self.window.is_some()),
                ])?;
                if self.experiment == Fig2 && self.sector.is_some() {
                    return invalid("`sector` is not used by fig2");
                }
                let default_n = if self.experiment == Fig2 { 12 } else { 6 };
                let max_n = if oracle { MAX_ORACLE_BATH } else { MAX_FULL_SPACE_BATH };
                let n_bath = bath_size(self.n_bath.unwrap_or(default_n), max_n)?;
                let lambdas = match &self.lambdas {
                    Some(l) => reals("lambdas", l)?,
                    None if self.experiment == Fig2 => vec![0.0, 0.25, 0.5, 1.0],
                    None => vec![0.0],
                };
                if lambdas.iter().any(|&l| l < 0.0) {
                    return invalid("lambdas must be >= 0");
                }
                let t_max = finite("t_max", self.t_max.map_or(FRAC_PI_2, |r| r.0))?;
                let time_points = self.time_points.unwrap_or(33);
                if time_points == 0 || (time_points > 1 && t_max <= 0.0) || t_max < 0.0 {
                    return invalid("time grid needs time_points >= 1 and t_max > 0");
                }
                let sector = match self.sector {
                    None | Some(SectorChoice::Named(GroundKeyword::Ground)) => None,
                    Some(SectorChoice::Index(n)) if n <= n_bath => Some(n),
                    Some(SectorChoice::Index(n)) => return invalid(format!("sector {n} exceeds n_bath")),
                };
                match FragmentStrategy::parse(&strategy) {
                    Some(FragmentStrategy::SymmetricClosedForm) => {
                        if lambdas.iter().any(|&l| l != 0.0) || !matches!(sector, Some(0 | 1)) {
                            return invalid("the symmetric closed form needs lambda = 0 and sector 0 or 1");
                        }
                    }
                    Some(FragmentStrategy::SubsetAverage) if n_bath > spinbath_core::darwinism::MAX_SUBSET_AVERAGE => {
                        return invalid("subset averaging needs n_bath <= 12");
                    }
                    _ => {}
                }
                Plan::Surface {
                    n_bath,
                    d,
                    h: finite("h", self.h.map_or(1.0, |r| r.0))?,
                    lambdas,
                    t_max,
                    time_points,
                    strategy,
                    sector,
                    oracle,
                }
            }
            Fig3 => {
                self.reject(&[
                    ("sizes", self.sizes.is_some()),
                    ("h", self.h.is_some()),
                    ("lambdas", self.lambdas.is_some()),
                    ("d", self.d.is_some()),
                    ("t", self.t.is_some()),
                    ("t_max", self.t_max.is_some()),
                    ("time_points", self.time_points.is_some()),
                    ("strategy", self.strategy.is_some()),
                    ("sector", self.sector.is_some()),
                ])?;
                let fields = match &self.fields {
                    Some(f) => reals("fields", f)?,
                    None => (0..=150).map(|i| i as f64 / 100.0).collect(),
                };
                if fields.iter().any(|&h| h < 0.0) {
                    return invalid("fields must be >= 0");
                }
                Plan::FieldScan {
                    n_bath: bath_size(self.n_bath.unwrap_or(12), MAX_FULL_SPACE_BATH)?,
                    fields,
                    window,
                }
            }
            Fig4 => {
                self.reject(&[
                    ("n_bath", self.n_bath.is_some()),
                    ("h", self.h.is_some()),
                    ("fields", self.fields.is_some()),
                    ("lambdas", self.lambdas.is_some()),
                    ("d", self.d.is_some()),
                    ("t", self.t.is_some()),
                    ("t_max", self.t_max.is_some()),
                    ("time_points", self.time_points.is_some()),
                    ("strategy", self.strategy.is_some()),
                    ("sector", self.sector.is_some()),
                ])?;
                let sizes = self.sizes.clone().unwrap_or_else(|| {
                    let mut s: Vec<usize> = (4..=30).step_by(2).collect();
                    s.extend([40, 50, 60, 70, 80, 90, 100]);
                    s
                });
                if sizes.is_empty() || sizes.iter().any(|&n| !(2..=5000).contains(&n)) {
                    return invalid("sizes must be non-empty, each within 2..=5000");
                }
                Plan::SizeScan { sizes, window }
            }
        };
        let oracle_tolerance = self.tolerances.oracle.unwrap_or(DEFAULT_ORACLE_TOLERANCE);
        if !(oracle_tolerance > 0.0 && oracle_tolerance.is_finite()) {
            return invalid("tolerances.oracle must be positive");
        }
        let name = self.name.clone().unwrap_or_else(|| self.experiment.name().to_string());
        if name.is_empty() || name.contains(['/', '\\']) {
            return invalid("name must be a plain file stem");
        }
        Ok(ResolvedConfig {
            experiment: self.experiment,
            name,
            plan,
            strict: self.strict.unwrap_or(false),
            oracle_tolerance,
            output_dir: self.output_dir.clone(),
        })
    }
}
