//! Experiment configuration: a single JSON document wrapping the protocol
//! parameters plus harness plumbing (experiment kind, trial count, output
//! target). All distances are meters, times seconds, angles radians.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qloc_core::adversary::AttackSpec;
use qloc_core::masking::MaskKind;
use qloc_core::protocol::ProtocolConfig;

/// What a configuration file asks the harness to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Verify,
    CloneAttack,
    RelayAttack,
    MaskStats,
    Sweep,
}

impl ExperimentKind {
    pub fn label(self) -> &'static str {
        match self {
            ExperimentKind::Verify => "verify",
            ExperimentKind::CloneAttack => "clone_attack",
            ExperimentKind::RelayAttack => "relay_attack",
            ExperimentKind::MaskStats => "mask_stats",
            ExperimentKind::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    /// One nested report document.
    #[default]
    Json,
    /// One flat row per trial.
    Csv,
}

fn default_trials() -> usize {
    1
}

/// One experiment: the session parameters plus how often to run it and
/// where the results go. Unknown fields are rejected so typos fail loudly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub protocol: ProtocolConfig,
    /// Adversary description; required for attack experiments, forbidden
    /// for honest ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attack: Option<AttackSpec>,
    /// Number of independent sessions (or, for mask statistics, samples).
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub format: OutputFormat,
    /// Output file; stdout when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.trials == 0 {
            return Err("trials must be at least 1".into());
        }
        self.protocol.validate().map_err(|e| e.to_string())?;
        if let Some(attack) = &self.attack {
            attack
                .validate(&self.protocol.claimed_location)
                .map_err(|e| e.to_string())?;
        }
        match (self.experiment, &self.attack) {
            (ExperimentKind::Verify | ExperimentKind::MaskStats, Some(_)) => Err(format!(
                "a {} experiment takes no attack section",
                self.experiment.label()
            )),
            (ExperimentKind::CloneAttack, Some(AttackSpec::Cloner { .. })) => Ok(()),
            (ExperimentKind::CloneAttack, _) => {
                Err("clone_attack needs an attack section with kind \"cloner\"".into())
            }
            (ExperimentKind::RelayAttack, Some(AttackSpec::Relay { .. })) => Ok(()),
            (ExperimentKind::RelayAttack, _) => {
                Err("relay_attack needs an attack section with kind \"relay\"".into())
            }
            // A sweep replays either an honest session or whatever attack
            // is configured, so any shape is fine here.
            _ => Ok(()),
        }
    }
}

/// Parse a configuration file, reporting parse problems verbatim.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("cannot parse config {}: {e}", path.display()))
}

/// Seed for trial `t` under master seed `master`.
///
/// A plain wrapping counter: trial `t` always sees the same seed no matter
/// how many trials run, so any emitted row replays in isolation, and
/// distinct seeds give unrelated generator streams.
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    master.wrapping_add(trial as u64)
}

/// Compact mask-kind label for flat rows.
pub fn mask_kind_label(kind: MaskKind) -> String {
    match kind {
        MaskKind::Euler => "euler".into(),
        MaskKind::Ht { length } => format!("ht({length})"),
    }
}
