//! Experiment configuration document.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use swleak::cipher::{CipherCase, KeyVariant, RatePoint};
use swleak::leakage::{BoundCase, Tolerance};
use swleak::netsim::{Link, TermShare};
use swleak::probcore::JointPmf;
use swleak::swcodec::{Portion, PortionLayout};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Where the joint distribution comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PmfSpec {
    /// Doubly symmetric binary source with crossover `p`.
    Dsbs(f64),
    /// Binary Markov chain with the given crossovers.
    Chain(Vec<f64>),
    Uniform(Vec<usize>),
    Inline {
        alphabet_sizes: Vec<usize>,
        probs: Vec<f64>,
    },
    /// A pmf document, relative paths resolved against the config file.
    File(PathBuf),
}

impl PmfSpec {
    pub fn load(&self, base: &Path) -> Result<JointPmf, CliError> {
        Ok(match self {
            PmfSpec::Dsbs(p) => JointPmf::dsbs(*p)?,
            PmfSpec::Chain(c) => JointPmf::binary_chain(c)?,
            PmfSpec::Uniform(s) => JointPmf::uniform(s.clone())?,
            PmfSpec::Inline { alphabet_sizes, probs } => JointPmf::new(alphabet_sizes.clone(), probs.clone())?,
            PmfSpec::File(path) => {
                let path = base.join(path);
                let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
                JointPmf::from_json(&text)?
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Entropy,
    Decompose,
    Leakage,
    Cipher,
    Region,
    Netsim,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Entropy => "entropy",
            Task::Decompose => "decompose",
            Task::Leakage => "leakage",
            Task::Cipher => "cipher",
            Task::Region => "region",
            Task::Netsim => "netsim",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CipherSettings {
    #[serde(default = "default_case")]
    pub case: u8,
    #[serde(default = "default_variant")]
    pub variant: String,
    /// Security target in bits per symbol.
    #[serde(default)]
    pub target: f64,
    #[serde(default)]
    pub independent_keys: bool,
    /// `v_cx` or `v_cy`; the case's default when absent.
    #[serde(default)]
    pub key_role: Option<String>,
    #[serde(default = "default_cipher_k")]
    pub k: usize,
    #[serde(default)]
    pub layout: Option<String>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_case() -> u8 {
    1
}
fn default_variant() -> String {
    "long".into()
}
fn default_cipher_k() -> usize {
    3
}
fn default_alpha() -> f64 {
    0.5
}

impl Default for CipherSettings {
    fn default() -> Self {
        Self {
            case: default_case(),
            variant: default_variant(),
            target: 0.0,
            independent_keys: false,
            key_role: None,
            k: default_cipher_k(),
            layout: None,
            alpha: default_alpha(),
        }
    }
}

impl CipherSettings {
    pub fn case(&self) -> Result<CipherCase, CliError> {
        Ok(CipherCase::try_from(self.case)?)
    }

    pub fn variant(&self) -> Result<KeyVariant, CliError> {
        if self.independent_keys {
            return Ok(KeyVariant::Independent);
        }
        Ok(self.variant.parse()?)
    }

    pub fn key_role(&self) -> Result<Option<Portion>, CliError> {
        self.key_role.as_deref().map(str::parse).transpose().map_err(Into::into)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSettings {
    /// Case ids; every case when empty.
    #[serde(default)]
    pub cases: Vec<u8>,
    /// Points to test; the Slepian-Wolf corner with zero keys when empty.
    #[serde(default)]
    pub points: Vec<RatePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetsimSettings {
    /// Overrides the experiment pmf.
    #[serde(default)]
    pub pmf: Option<PmfSpec>,
    #[serde(default = "default_net_k")]
    pub k: usize,
    #[serde(default)]
    pub allocations: Vec<TermShare>,
    #[serde(default)]
    pub links: Vec<Link>,
    #[serde(default)]
    pub adversaries: Vec<Vec<usize>>,
    #[serde(default)]
    pub combination_masks: bool,
}

fn default_net_k() -> usize {
    3
}

impl Default for NetsimSettings {
    fn default() -> Self {
        Self {
            pmf: None,
            k: default_net_k(),
            allocations: Vec::new(),
            links: Vec::new(),
            adversaries: Vec::new(),
            combination_masks: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub pmf: PmfSpec,
    #[serde(default)]
    pub k: Vec<usize>,
    #[serde(default = "default_alphas")]
    pub alpha: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tasks: Vec<Task>,
    /// Scenario tags (`vx_vy`, `vcx_vcy`, `vcx_vcy_vy`, `vy_vcy`) or
    /// `+`-joined portion lists; the four bounded cases when empty.
    #[serde(default)]
    pub scenarios: Vec<String>,
    #[serde(default = "Tolerance::zero")]
    pub tolerance: Tolerance,
    /// `K:m_vx,m_cx,m_cy,m_vy`, replacing the computed layout at that K.
    #[serde(default)]
    pub layout: Option<String>,
    #[serde(default)]
    pub cipher: CipherSettings,
    #[serde(default)]
    pub region: RegionSettings,
    #[serde(default)]
    pub netsim: NetsimSettings,
}

fn default_alphas() -> Vec<f64> {
    vec![0.5]
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("line {}, column {}: {e}", e.line(), e.column())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Lowercase hex SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn layout_override(&self) -> Result<Option<PortionLayout>, CliError> {
        Ok(self.layout.as_deref().map(str::parse).transpose()?)
    }

    /// Block lengths, falling back to the override layout's K.
    pub fn block_lengths(&self) -> Result<Vec<usize>, CliError> {
        if !self.k.is_empty() {
            return Ok(self.k.clone());
        }
        Ok(self.layout_override()?.map(|l| vec![l.k]).unwrap_or_default())
    }

    pub fn scenario_list(&self) -> Result<Vec<(String, Vec<Portion>)>, CliError> {
        if self.scenarios.is_empty() {
            return Ok(BoundCase::ALL
                .iter()
                .map(|c| (c.tag().to_string(), c.portions().to_vec()))
                .collect());
        }
        self.scenarios
            .iter()
            .map(|s| Ok((s.clone(), parse_scenario(s)?)))
            .collect()
    }
}

/// A bound-case tag or a `+`-joined list of portion names.
pub fn parse_scenario(text: &str) -> Result<Vec<Portion>, CliError> {
    if let Some(c) = BoundCase::from_tag(text) {
        return Ok(c.portions().to_vec());
    }
    if text == "none" {
        return Ok(Vec::new());
    }
    text.split('+')
        .map(|p| p.parse::<Portion>().map_err(Into::into))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_and_defaults() {
        let c = ExperimentConfig::from_json(r#"{"pmf": {"dsbs": 0.1}, "k": [4]}"#).unwrap();
        assert_eq!(c.alpha, vec![0.5]);
        assert!(c.tasks.is_empty());
        assert_eq!(c.scenario_list().unwrap().len(), 4);
        assert_eq!(c.hash().len(), 64);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = ExperimentConfig::from_json("{\n  \"pmf\": {\"dsbs\": 0.1},\n  \"bogus\": 1\n}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn scenario_strings() {
        assert_eq!(parse_scenario("vy_vcy").unwrap(), vec![Portion::Vcy, Portion::Vy]);
        assert_eq!(parse_scenario("v_x+v_cy").unwrap(), vec![Portion::Vx, Portion::Vcy]);
        assert!(parse_scenario("v_q").is_err());
    }

    #[test]
    fn hash_tracks_seed() {
        let a = ExperimentConfig::from_json(r#"{"pmf": {"dsbs": 0.1}, "seed": 1}"#).unwrap();
        let b = ExperimentConfig::from_json(r#"{"pmf": {"dsbs": 0.1}, "seed": 2}"#).unwrap();
        assert_ne!(a.hash(), b.hash());
    }
}
