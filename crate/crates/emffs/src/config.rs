//! Run configuration. Every run writes its resolved configuration as
//! `config.json`; reading that file back reproduces the run.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use emffs_core::ensemble::split_size;
use emffs_core::filters::ReliefFParams;
use emffs_core::{EnsembleConfig, FilterMethod, TreeParams};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum DataFormat {
    Csv,
    Arff,
}

impl DataFormat {
    /// `.arff` files are ARFF; anything else is CSV.
    pub fn infer(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("arff") => DataFormat::Arff,
            _ => DataFormat::Csv,
        }
    }
}

/// Supervised discretization used before the entropy and chi-squared
/// rankers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discretizer {
    #[default]
    Mdl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub data: Option<PathBuf>,
    pub format: Option<DataFormat>,
    /// Stratified subsample drawn before anything else; `None` keeps every
    /// row.
    pub sample_fraction: Option<f64>,
    /// Drives sampling, ReliefF sampling and fold assignment.
    pub seed: u64,
    pub discretizer: Discretizer,
    pub filters: Vec<FilterMethod>,
    pub relieff_k: usize,
    /// ReliefF sample count; `None` uses every instance.
    pub relieff_m: Option<usize>,
    /// Vote threshold; `None` means `min(3, number of filters)`.
    pub threshold: Option<usize>,
    pub split_fraction: f64,
    pub tree: TreeParams,
    pub folds: usize,
    /// Also evaluate the full feature set in the pipeline summary.
    pub full_set: bool,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            data: None,
            format: None,
            sample_fraction: None,
            seed: 1,
            discretizer: Discretizer::Mdl,
            filters: FilterMethod::ALL.to_vec(),
            relieff_k: 10,
            relieff_m: None,
            threshold: None,
            split_fraction: 1.0 / 3.0,
            tree: TreeParams::default(),
            folds: 10,
            full_set: false,
            out: PathBuf::from("emffs-out"),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    /// Fills in inferred values so the echoed file is self-contained.
    pub fn resolved(mut self) -> Self {
        if self.format.is_none() {
            self.format = self.data.as_deref().map(DataFormat::infer);
        }
        if self.threshold.is_none() && !self.filters.is_empty() {
            self.threshold = Some(self.filters.len().min(3));
        }
        self
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if let Some(fr) = self.sample_fraction {
            if !(fr > 0.0 && fr <= 1.0) {
                bail!("sample fraction {fr} outside (0, 1]");
            }
        }
        if self.filters.is_empty() {
            bail!("at least one filter is required");
        }
        let mut seen = self.filters.clone();
        seen.sort_by_key(|m| m.name());
        seen.dedup();
        if seen.len() != self.filters.len() {
            bail!("a filter is listed twice");
        }
        if self.relieff_k == 0 {
            bail!("relieff k must be at least 1");
        }
        if self.relieff_m == Some(0) {
            bail!("relieff m must be at least 1");
        }
        self.ensemble().validate(self.filters.len())?;
        self.tree.validate()?;
        if self.folds < 2 {
            bail!("at least 2 folds are required");
        }
        Ok(())
    }

    pub fn data_path(&self) -> anyhow::Result<&Path> {
        self.data.as_deref().context("no dataset given (use --data)")
    }

    pub fn ensemble(&self) -> EnsembleConfig {
        EnsembleConfig {
            threshold: self.threshold.unwrap_or_else(|| self.filters.len().clamp(1, 3)),
            split_fraction: self.split_fraction,
        }
    }

    pub fn relieff(&self) -> ReliefFParams {
        ReliefFParams {
            k_neighbors: self.relieff_k,
            m_samples: self.relieff_m,
            seed: self.seed,
        }
    }

    /// Features kept from each ranking before voting.
    pub fn split_size(&self, n_features: usize) -> usize {
        split_size(n_features, self.split_fraction)
    }
}
