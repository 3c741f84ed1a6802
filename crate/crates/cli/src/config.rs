use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qkz_core::text::parse_hseries;
use qkz_core::{ComoduleWord, FamilyDescriptor, FamilyKind, HSeries, Mode, Point};

use crate::CliError;

pub const DEFAULT_D: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Qybe,
    Crossing,
    Normalize,
    Reps,
    Qkz,
    All,
}

impl Suite {
    pub fn includes(self, s: Suite) -> bool {
        self == Suite::All || self == s
    }

    /// Whether the suite needs the normalized family.
    pub fn needs_normalization(self) -> bool {
        [Suite::Normalize, Suite::Reps, Suite::Qkz].into_iter().any(|s| self.includes(s))
    }
}

/// Deliberate defects for control runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Adds `h` to one entry of `R`.
    PerturbR,
    /// Drops the `κh` shift in one factor of the last qKZ operator.
    DropKappaShift,
    /// Reverses the argument of that same factor.
    ReversedArgument,
}

impl Fault {
    pub fn name(self) -> &'static str {
        match self {
            Fault::PerturbR => "perturb-r",
            Fault::DropKappaShift => "drop-kappa-shift",
            Fault::ReversedArgument => "reversed-argument",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordConfig {
    pub factors: Vec<String>,
}

/// Base points, words and central charge; the family comes from the run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub points: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub words: Option<Vec<WordConfig>>,
    #[serde(rename = "K")]
    pub k: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub family: FamilyKind,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "D", default = "default_d")]
    pub d: usize,
    #[serde(default = "default_suite")]
    pub suite: Suite,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub instances: Vec<InstanceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

fn default_d() -> usize {
    DEFAULT_D
}

fn default_suite() -> Suite {
    Suite::All
}

/// A qKZ instance with everything parsed except `R̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedInstance {
    pub points: Vec<Point>,
    pub words: Vec<ComoduleWord>,
    pub k: HSeries,
}

impl RunConfig {
    pub fn from_json(s: &str) -> Result<Self, CliError> {
        serde_json::from_str(s).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn descriptor(&self) -> FamilyDescriptor {
        FamilyDescriptor::new(self.family, self.n, self.d)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.descriptor().validate().map_err(|e| CliError::Config(e.to_string()))?;
        if self.d == 0 {
            return Err(CliError::Config("D must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(CliError::Config("jobs must be at least 1".into()));
        }
        Ok(())
    }

    /// Parses the configured instances, or the default pair (two and three
    /// points, basic words, `K = 1`) when none are given.
    pub fn parsed_instances(&self) -> Result<Vec<ParsedInstance>, CliError> {
        let mode = self.descriptor().mode();
        if self.instances.is_empty() {
            let base: [&str; 3] = match mode {
                Mode::Additive => ["0", "1", "5/2"],
                Mode::Multiplicative => ["1", "2", "7/2"],
            };
            return [2, 3]
                .into_iter()
                .map(|n| {
                    let cfg = InstanceConfig { points: base[..n].iter().map(|s| s.to_string()).collect(), words: None, k: "1".into() };
                    parse_instance(&cfg, mode, self.d)
                })
                .collect();
        }
        self.instances.iter().map(|c| parse_instance(c, mode, self.d)).collect()
    }
}

fn parse_instance(c: &InstanceConfig, mode: Mode, d: usize) -> Result<ParsedInstance, CliError> {
    let bad = |e: qkz_core::Error| CliError::Config(format!("invalid instance: {e}"));
    let points = c
        .points
        .iter()
        .map(|s| Point::new(parse_hseries(s, d)?, mode))
        .collect::<qkz_core::Result<Vec<_>>>()
        .map_err(bad)?;
    let words = match &c.words {
        None => vec![ComoduleWord::basic(d); points.len()],
        Some(ws) => ws
            .iter()
            .map(|w| ComoduleWord::new(w.factors.iter().map(|s| parse_hseries(s, d)).collect::<qkz_core::Result<_>>()?))
            .collect::<qkz_core::Result<Vec<_>>>()
            .map_err(bad)?,
    };
    let k = parse_hseries(&c.k, d).map_err(bad)?;
    Ok(ParsedInstance { points, words, k })
}
