//! Run manifests: resolved config, derived quantities, validity annotations
//! and content hashes of every emitted file.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::commands::Command;
use super::config::RunConfig;
use crate::design::{n_sql_ratio, sigma_star, suppression_factor};
use crate::device::{validity_report, DeviceParams};
use crate::error::{Error, Result};

pub const MANIFEST_VERSION: &str = concat!("optomech-squeeze/", env!("CARGO_PKG_VERSION"));

/// Hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Non-finite numbers are stored as `null`.
fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Derived {
    pub c_thr: Option<f64>,
    pub n_p_thr: Option<f64>,
    pub n_s: Option<f64>,
    pub n_p: Option<f64>,
    pub kappa_loss: Option<f64>,
    pub sigma_star: Option<f64>,
    /// `n̄*/n̄_p^(thr)`.
    pub n_star: Option<f64>,
    pub suppression: Option<f64>,
}

impl Derived {
    pub fn compute(p: &DeviceParams) -> Self {
        let c = p.threshold_cooperativity();
        let (s_star, n_star, supp) = if c > 0.0 {
            let s = sigma_star(c);
            (s, n_sql_ratio(s, c, p.omega_m), suppression_factor(c, p.omega_m))
        } else {
            (f64::NAN, f64::NAN, f64::NAN)
        };
        Derived {
            c_thr: finite(c),
            n_p_thr: finite(p.pump_threshold()),
            n_s: finite(p.n_signal()),
            n_p: finite(p.n_pump()),
            kappa_loss: finite(p.loss_rate()),
            sigma_star: finite(s_star),
            n_star: finite(n_star),
            suppression: finite(supp),
        }
    }

    /// Field names whose values differ beyond a relative `1e-12`.
    pub fn mismatches(&self, other: &Derived) -> Vec<&'static str> {
        let pairs = [
            ("c_thr", self.c_thr, other.c_thr),
            ("n_p_thr", self.n_p_thr, other.n_p_thr),
            ("n_s", self.n_s, other.n_s),
            ("n_p", self.n_p, other.n_p),
            ("kappa_loss", self.kappa_loss, other.kappa_loss),
            ("sigma_star", self.sigma_star, other.sigma_star),
            ("n_star", self.n_star, other.n_star),
            ("suppression", self.suppression, other.suppression),
        ];
        pairs
            .into_iter()
            .filter(|(_, a, b)| match (a, b) {
                (Some(a), Some(b)) => (a - b).abs() > 1e-12 * a.abs().max(b.abs()),
                (None, None) => false,
                _ => true,
            })
            .map(|(name, _, _)| name)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidityEntry {
    pub name: String,
    pub ratio: Option<f64>,
    pub threshold: f64,
    pub passed: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileHash {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub version: String,
    pub command: Command,
    pub config: RunConfig,
    pub derived: Derived,
    pub validity: Vec<ValidityEntry>,
    pub files: Vec<FileHash>,
}

impl RunManifest {
    pub fn new(command: Command, config: &RunConfig, files: Vec<FileHash>) -> Result<Self> {
        let params = config.params()?;
        let validity = validity_report(&params)
            .into_iter()
            .map(|c| ValidityEntry {
                name: c.name.to_string(),
                ratio: finite(c.ratio),
                threshold: c.threshold,
                passed: c.passed,
                note: c.note,
            })
            .collect();
        Ok(RunManifest {
            version: MANIFEST_VERSION.to_string(),
            command,
            config: config.clone(),
            derived: Derived::compute(&params),
            validity,
            files,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s.into_bytes()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| Error::config(e.path().to_string(), e.inner().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Recompute derived quantities from the echoed config and re-hash the
    /// files in `dir`. Returns a list of problems, empty when consistent.
    pub fn verify(&self, dir: &Path) -> Result<Vec<String>> {
        let mut problems = Vec::new();
        let fresh = Derived::compute(&self.config.params()?);
        for name in self.derived.mismatches(&fresh) {
            problems.push(format!("derived quantity `{name}` does not match its recomputed value"));
        }
        for f in &self.files {
            match std::fs::read(dir.join(&f.name)) {
                Ok(bytes) if sha256_hex(&bytes) == f.sha256 => {}
                Ok(_) => problems.push(format!("hash mismatch for `{}`", f.name)),
                Err(e) => problems.push(format!("cannot read `{}`: {e}", f.name)),
            }
        }
        Ok(problems)
    }
}
