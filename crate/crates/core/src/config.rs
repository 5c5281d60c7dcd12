//! Line-oriented `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Unknown keys and
//! repeated keys are errors. List values are comma-separated.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::filling::{default_checkpoints, ExperimentMode, ExperimentPlan, DEFAULT_ITERATIONS};
use crate::io::SampleFormat;
use crate::samplers::SamplerKind;

/// Every recognized key.
pub const KEYS: &[&str] = &[
    "m",
    "n",
    "sampler",
    "mode",
    "iterations",
    "n_max",
    "checkpoints",
    "radius",
    "seed",
    "collision_free",
    "threshold",
    "radii",
    "samplers",
    "reference",
    "unitary_in",
    "unitary_out",
    "samples_in",
    "samples_format",
    "samples_out",
    "curve_in",
    "curve_out",
    "aggregate_out",
    "fingerprint_out",
    "verdict_out",
    "edges_out",
    "scan_out",
    "blackbox",
    "hypotheses",
    "out_dir",
];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub modes: Option<usize>,
    pub photons: Option<u32>,
    pub sampler: Option<SamplerKind>,
    pub mode: Option<ExperimentMode>,
    pub iterations: Option<usize>,
    pub n_max: Option<usize>,
    pub checkpoints: Option<Vec<usize>>,
    pub radius: Option<u32>,
    pub seed: Option<u64>,
    pub collision_free: Option<bool>,
    pub threshold: Option<f64>,
    pub radii: Option<Vec<u32>>,
    pub samplers: Option<Vec<SamplerKind>>,
    /// Hypothesis whose rejection is reported as an anomaly.
    pub reference: Option<String>,
    pub unitary_in: Option<PathBuf>,
    pub unitary_out: Option<PathBuf>,
    pub samples_in: Option<PathBuf>,
    pub samples_format: Option<SampleFormat>,
    pub samples_out: Option<PathBuf>,
    pub curve_in: Option<PathBuf>,
    pub curve_out: Option<PathBuf>,
    pub aggregate_out: Option<PathBuf>,
    pub fingerprint_out: Option<PathBuf>,
    pub verdict_out: Option<PathBuf>,
    pub edges_out: Option<PathBuf>,
    pub scan_out: Option<PathBuf>,
    pub blackbox: Option<PathBuf>,
    pub hypotheses: Option<Vec<PathBuf>>,
    pub out_dir: Option<PathBuf>,
    raw: BTreeMap<String, String>,
}

fn scalar<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::config(key, format!("cannot parse `{value}`")))
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    let items: Vec<T> = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| scalar(key, s))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::config(key, "empty list"));
    }
    Ok(items)
}

fn boolean(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::config(key, format!("expected a boolean, got `{value}`"))),
    }
}

fn tagged<T: FromStr<Err = Error>>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|e: Error| Error::config(key, e.to_string()))
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(path, &text)
    }

    pub fn parse(path: &Path, text: &str) -> Result<Self> {
        let mut config = RunConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| Error::parse(path, i + 1, "expected `key = value`"))?;
            let key = key.trim();
            if config.raw.contains_key(key) {
                return Err(Error::parse(path, i + 1, format!("key `{key}` given twice")));
            }
            config.set(key, value.trim()).map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        }
        Ok(config)
    }

    /// Sets one key, replacing any earlier value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value;
        if v.is_empty() {
            return Err(Error::config(key, "empty value"));
        }
        match key {
            "m" => self.modes = Some(scalar(key, v)?),
            "n" => self.photons = Some(scalar(key, v)?),
            "sampler" => self.sampler = Some(tagged(key, v)?),
            "mode" => self.mode = Some(tagged(key, v)?),
            "iterations" => self.iterations = Some(scalar(key, v)?),
            "n_max" => self.n_max = Some(scalar(key, v)?),
            "checkpoints" => self.checkpoints = Some(list(key, v)?),
            "radius" => self.radius = Some(scalar(key, v)?),
            "seed" => self.seed = Some(scalar(key, v)?),
            "collision_free" => self.collision_free = Some(boolean(key, v)?),
            "threshold" => self.threshold = Some(scalar(key, v)?),
            "radii" => self.radii = Some(list(key, v)?),
            "samplers" => {
                self.samplers = Some(
                    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| tagged(key, s)).collect::<Result<_>>()?,
                )
            }
            "reference" => self.reference = Some(v.to_string()),
            "unitary_in" => self.unitary_in = Some(v.into()),
            "unitary_out" => self.unitary_out = Some(v.into()),
            "samples_in" => self.samples_in = Some(v.into()),
            "samples_format" => self.samples_format = Some(tagged(key, v)?),
            "samples_out" => self.samples_out = Some(v.into()),
            "curve_in" => self.curve_in = Some(v.into()),
            "curve_out" => self.curve_out = Some(v.into()),
            "aggregate_out" => self.aggregate_out = Some(v.into()),
            "fingerprint_out" => self.fingerprint_out = Some(v.into()),
            "verdict_out" => self.verdict_out = Some(v.into()),
            "edges_out" => self.edges_out = Some(v.into()),
            "scan_out" => self.scan_out = Some(v.into()),
            "blackbox" => self.blackbox = Some(v.into()),
            "hypotheses" => self.hypotheses = Some(list(key, v)?),
            "out_dir" => self.out_dir = Some(v.into()),
            _ => return Err(Error::config(key, "unknown key")),
        }
        self.raw.insert(key.to_string(), v.to_string());
        Ok(())
    }

    pub fn get_raw(&self, key: &str) -> Option<&str> {
        self.raw.get(key).map(String::as_str)
    }

    /// Canonical `key = value` text: sorted keys, normalized spacing.
    pub fn canonical(&self) -> String {
        self.raw.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// First 16 hex digits of the SHA-256 of [`RunConfig::canonical`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn require<'a, T>(&self, key: &str, value: &'a Option<T>) -> Result<&'a T> {
        value.as_ref().ok_or_else(|| Error::config(key, "required but not set"))
    }

    /// Experiment plan from the scalar keys. `m`, `n`, `n_max` and `radius`
    /// are required; the sampler defaults to boson.
    pub fn plan(&self) -> Result<ExperimentPlan> {
        let modes = *self.require("m", &self.modes)?;
        let photons = *self.require("n", &self.photons)?;
        let n_max = *self.require("n_max", &self.n_max)?;
        let radius = *self.require("radius", &self.radius)?;
        let plan = ExperimentPlan {
            modes,
            photons,
            sampler: self.sampler.unwrap_or(SamplerKind::Boson),
            mode: self.mode.unwrap_or(ExperimentMode::FixedU),
            iterations: self.iterations.unwrap_or(DEFAULT_ITERATIONS),
            n_max,
            checkpoints: self.checkpoints.clone().unwrap_or_else(|| default_checkpoints(n_max)),
            radius,
            master_seed: self.seed.unwrap_or(0),
            collision_free: self.collision_free.unwrap_or(false),
        };
        plan.validate().map_err(|e| Error::config("plan", e.to_string()))?;
        Ok(plan)
    }

    /// `config_hash` and `seed` header entries.
    pub fn provenance(&self) -> Vec<(String, String)> {
        let mut out = vec![("config_hash".to_string(), self.hash())];
        if let Some(seed) = self.seed {
            out.push(("seed".to_string(), seed.to_string()));
        }
        out
    }
}
