//! Campaign configuration: a TOML document with sections `[problem]`,
//! `[grid]`, `[hypothesis]`, `[campaign]` and `[output]`. Unknown keys are
//! rejected and every default that gets filled in is recorded.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::lab::Grid1D;
use crate::problem::{Hypothesis, Potential, ProblemSpec};

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// The document is not valid TOML or has unknown/mistyped keys.
    Parse(String),
    /// The document parsed but violates an invariant.
    Invalid { key: String, reason: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse(msg) => write!(f, "config parse error: {msg}"),
            ConfigError::Invalid { key, reason } => write!(f, "invalid config value `{key}`: {reason}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn invalid(key: &str, reason: impl fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        reason: reason.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaKeyword {
    Optimize,
}

/// `alpha = "optimize"` or a fixed value in (0, 1/2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaPolicy {
    Fixed(f64),
    Keyword(AlphaKeyword),
}

impl AlphaPolicy {
    pub fn fixed(&self) -> Option<f64> {
        match self {
            AlphaPolicy::Fixed(a) => Some(*a),
            AlphaPolicy::Keyword(AlphaKeyword::Optimize) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Plots,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    #[serde(rename = "N")]
    dim: Option<u32>,
    m: Option<u32>,
    c1: Option<f64>,
    c2: Option<f64>,
    gamma: Option<f64>,
    potential: Option<Potential>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    #[serde(rename = "L")]
    half_width: Option<f64>,
    n: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHypothesis {
    sigma: Option<f64>,
    mu: Option<f64>,
    lambda: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCampaign {
    t: Option<Vec<f64>>,
    x: Option<Vec<f64>>,
    alpha: Option<AlphaPolicy>,
    lambda_max: Option<f64>,
    boundary_check: Option<bool>,
    boundary_tolerance: Option<f64>,
    interpolation_grid: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    directory: Option<String>,
    formats: Option<Vec<Format>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    problem: RawProblem,
    #[serde(default)]
    grid: RawGrid,
    hypothesis: Option<RawHypothesis>,
    #[serde(default)]
    campaign: RawCampaign,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSection {
    #[serde(rename = "N")]
    pub dim: u32,
    pub m: u32,
    pub c1: f64,
    pub c2: f64,
    pub gamma: f64,
    pub potential: Potential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSection {
    #[serde(rename = "L")]
    pub half_width: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSection {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub alpha: AlphaPolicy,
    /// Upper clip for the fitted λ.
    pub lambda_max: f64,
    pub boundary_check: bool,
    /// Relative kernel change under L-doubling above which rows are flagged.
    pub boundary_tolerance: f64,
    /// Side of the (α, s) grid for the interpolation checks.
    pub interpolation_grid: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSection {
    pub directory: String,
    pub formats: Vec<Format>,
}

/// A fully resolved configuration. Serializing it writes every key, so the
/// output reparses to an equal value with no defaults applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub problem: ProblemSection,
    pub grid: GridSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<Hypothesis>,
    pub campaign: CampaignSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedConfig {
    pub config: Config,
    /// `section.key = value` for every key that was filled in.
    pub defaults_applied: Vec<String>,
}

/// Sixteen log-spaced times on [0.05, 1].
pub fn default_times() -> Vec<f64> {
    let (lo, hi) = (0.05f64.ln(), 0.0f64);
    (0..16)
        .map(|i| {
            if i == 15 {
                1.0
            } else if i == 0 {
                0.05
            } else {
                (lo + (hi - lo) * i as f64 / 15.0).exp()
            }
        })
        .collect()
}

pub fn default_positions() -> Vec<f64> {
    vec![-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0]
}

struct Defaults<'a>(&'a mut Vec<String>);

impl Defaults<'_> {
    fn take<T: fmt::Debug>(&mut self, key: &str, value: Option<T>, default: T) -> T {
        match value {
            Some(v) => v,
            None => {
                self.0.push(format!("{key} = {default:?}"));
                default
            }
        }
    }
}

pub fn parse_config(text: &str) -> Result<ParsedConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    let mut applied = Vec::new();
    let mut d = Defaults(&mut applied);

    let p = raw.problem;
    let problem = ProblemSection {
        dim: d.take("problem.N", p.dim, 1),
        m: d.take("problem.m", p.m, 2),
        c1: d.take("problem.c1", p.c1, 1.0),
        c2: d.take("problem.c2", p.c2, 1.0),
        gamma: d.take("problem.gamma", p.gamma, 2.0),
        potential: d.take("problem.potential", p.potential, Potential::Canonical),
    };
    let grid = GridSection {
        half_width: d.take("grid.L", raw.grid.half_width, 40.0),
        n: d.take("grid.n", raw.grid.n, 2048),
    };
    let hypothesis = match raw.hypothesis {
        None => None,
        Some(RawHypothesis {
            sigma: Some(sigma),
            mu: Some(mu),
            lambda: Some(lambda),
        }) => Some(Hypothesis { sigma, mu, lambda }),
        Some(_) => {
            return Err(invalid("hypothesis", "give all of sigma, mu and lambda, or omit the section"));
        }
    };
    let c = raw.campaign;
    // λ cap: the scaling exponent N/2m unless overridden.
    let default_lambda_max = if problem.m > 0 {
        problem.dim as f64 / (2.0 * problem.m as f64)
    } else {
        f64::NAN
    };
    let campaign = CampaignSection {
        t: d.take("campaign.t", c.t, default_times()),
        x: d.take("campaign.x", c.x, default_positions()),
        alpha: d.take("campaign.alpha", c.alpha, AlphaPolicy::Keyword(AlphaKeyword::Optimize)),
        lambda_max: d.take("campaign.lambda_max", c.lambda_max, default_lambda_max),
        boundary_check: d.take("campaign.boundary_check", c.boundary_check, true),
        boundary_tolerance: d.take("campaign.boundary_tolerance", c.boundary_tolerance, 1e-3),
        interpolation_grid: d.take("campaign.interpolation_grid", c.interpolation_grid, 20),
    };
    let output = OutputSection {
        directory: d.take("output.directory", raw.output.directory, "heatbound-out".to_string()),
        formats: d.take(
            "output.formats",
            raw.output.formats,
            vec![Format::Csv, Format::Json, Format::Plots],
        ),
    };
    let config = Config {
        problem,
        grid,
        hypothesis,
        campaign,
        output,
    };
    config.validate()?;
    Ok(ParsedConfig {
        config,
        defaults_applied: applied,
    })
}

fn describe(e: Error) -> String {
    e.to_string()
}

impl Config {
    pub fn spec(&self) -> Result<ProblemSpec, ConfigError> {
        let p = &self.problem;
        ProblemSpec::new(p.dim, p.m, p.c1, p.c2, p.gamma, p.potential).map_err(|e| match e {
            Error::OrderTooLow { .. } => invalid("problem.m", describe(e)),
            Error::InvalidParameter { name, reason } => invalid(&format!("problem.{name}"), reason),
            other => invalid("problem", describe(other)),
        })
    }

    pub fn grid(&self) -> Result<Grid1D, ConfigError> {
        Grid1D::new(self.grid.half_width, self.grid.n).map_err(|e| match e {
            Error::InvalidParameter { name, reason } => invalid(&format!("grid.{name}"), reason),
            other => invalid("grid", describe(other)),
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.spec()?;
        self.grid()?;
        if let Some(h) = &self.hypothesis {
            h.validate().map_err(|e| match e {
                Error::InvalidParameter { name, reason } => invalid(&format!("hypothesis.{name}"), reason),
                other => invalid("hypothesis", describe(other)),
            })?;
        }
        let c = &self.campaign;
        if c.t.is_empty() || c.t.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(invalid("campaign.t", "need a non-empty list of finite times > 0"));
        }
        if c.x.is_empty() || c.x.iter().any(|x| !x.is_finite()) {
            return Err(invalid("campaign.x", "need a non-empty list of finite positions"));
        }
        if let Some(a) = c.alpha.fixed() {
            if !(a > 0.0 && a < 0.5) {
                return Err(invalid("campaign.alpha", format!("must lie in (0, 1/2) or be \"optimize\", got {a}")));
            }
        }
        if !(c.lambda_max > 1e-6 && c.lambda_max < 1.0) {
            return Err(invalid("campaign.lambda_max", format!("must lie in (1e-6, 1), got {}", c.lambda_max)));
        }
        if !(c.boundary_tolerance > 0.0) {
            return Err(invalid("campaign.boundary_tolerance", "must be positive"));
        }
        if c.interpolation_grid == 0 {
            return Err(invalid("campaign.interpolation_grid", "must be at least 1"));
        }
        if self.output.directory.is_empty() {
            return Err(invalid("output.directory", "must not be empty"));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
