//! Experiment configuration: a structured config file plus flag overrides.
//!
//! Every knob can come from a JSON config file (`--config`), from a command
//! line flag (which wins), or fall back to the standard defaults. The
//! overlay comes from exactly one of explicit parameters or a topology file.

use std::path::PathBuf;

use anyhow::{bail, Context};
use serde::Deserialize;

use swapsim_core::{F1Variant, Overlay, OverlayParams, PricingMode, WorkloadParams};

/// Where the overlay comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OverlaySource {
    Params(OverlayParams),
    TopologyFile(PathBuf),
}

impl OverlaySource {
    pub fn label(&self) -> &'static str {
        match self {
            OverlaySource::Params(_) => "params",
            OverlaySource::TopologyFile(_) => "topology-file",
        }
    }

    pub fn realize(&self) -> anyhow::Result<Overlay> {
        match self {
            OverlaySource::Params(params) => {
                swapsim_core::build_overlay(*params).context("building overlay")
            }
            OverlaySource::TopologyFile(path) => swapsim_core::load_topology(path)
                .with_context(|| format!("loading topology {}", path.display())),
        }
    }
}

/// A fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub overlay: OverlaySource,
    pub workload: WorkloadParams,
    pub pricing: PricingMode,
    pub f1_variant: F1Variant,
    pub out: PathBuf,
    pub shard: Option<(u64, u64)>,
}

/// The config file mirrors the command line flags, all optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    pub nodes: Option<usize>,
    pub bits: Option<u32>,
    pub bucket_size: Option<usize>,
    pub seed: Option<u64>,
    pub topology: Option<PathBuf>,
    pub files: Option<u64>,
    pub chunks_min: Option<u32>,
    pub chunks_max: Option<u32>,
    pub originator_fraction: Option<f64>,
    pub workload_seed: Option<u64>,
    pub pricing: Option<String>,
    pub f1_variant: Option<String>,
    pub out: Option<PathBuf>,
    pub shard: Option<String>,
}

impl ConfigFile {
    pub fn load(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Raw option layer: command line flags merged over a config file.
#[derive(Debug, Clone, Default)]
pub struct ConfigLayers {
    pub flags: ConfigFile,
    pub file: ConfigFile,
}

impl ConfigLayers {
    fn pick<T: Clone>(&self, get: impl Fn(&ConfigFile) -> Option<T>) -> Option<T> {
        get(&self.flags).or_else(|| get(&self.file))
    }

    /// Overlay source under the "exactly one of params or topology" rule.
    pub fn overlay_source(&self) -> anyhow::Result<OverlaySource> {
        let topology = self.pick(|c| c.topology.clone());
        let any_param = self.pick(|c| c.nodes).is_some()
            || self.pick(|c| c.bits).is_some()
            || self.pick(|c| c.bucket_size).is_some()
            || self.pick(|c| c.seed).is_some();
        match topology {
            Some(path) => {
                if any_param {
                    bail!(
                        "--topology conflicts with --nodes/--bits/--bucket-size/--seed: \
                         the overlay comes from exactly one of them"
                    );
                }
                Ok(OverlaySource::TopologyFile(path))
            }
            None => {
                let defaults = OverlayParams::default();
                Ok(OverlaySource::Params(OverlayParams {
                    n: self.pick(|c| c.nodes).unwrap_or(defaults.n),
                    bits: self.pick(|c| c.bits).unwrap_or(defaults.bits),
                    k: self.pick(|c| c.bucket_size).unwrap_or(defaults.k),
                    seed: self.pick(|c| c.seed).unwrap_or(defaults.seed),
                }))
            }
        }
    }

    pub fn workload(&self) -> WorkloadParams {
        let defaults = WorkloadParams::default();
        WorkloadParams {
            files: self.pick(|c| c.files).unwrap_or(defaults.files),
            chunks_min: self.pick(|c| c.chunks_min).unwrap_or(defaults.chunks_min),
            chunks_max: self.pick(|c| c.chunks_max).unwrap_or(defaults.chunks_max),
            originator_fraction: self
                .pick(|c| c.originator_fraction)
                .unwrap_or(defaults.originator_fraction),
            workload_seed: self
                .pick(|c| c.workload_seed)
                .unwrap_or(defaults.workload_seed),
        }
    }

    pub fn pricing(&self) -> anyhow::Result<PricingMode> {
        match self.pick(|c| c.pricing.clone()) {
            None => Ok(PricingMode::default()),
            Some(text) => Ok(text.parse()?),
        }
    }

    pub fn f1_variant(&self) -> anyhow::Result<F1Variant> {
        match self.pick(|c| c.f1_variant.clone()) {
            None => Ok(F1Variant::default()),
            Some(text) => Ok(text.parse()?),
        }
    }

    pub fn out(&self) -> PathBuf {
        self.pick(|c| c.out.clone()).unwrap_or_else(|| ".".into())
    }

    pub fn shard(&self) -> anyhow::Result<Option<(u64, u64)>> {
        match self.pick(|c| c.shard.clone()) {
            None => Ok(None),
            Some(text) => Ok(Some(parse_shard(&text)?)),
        }
    }

    pub fn resolve(&self) -> anyhow::Result<ExperimentConfig> {
        Ok(ExperimentConfig {
            overlay: self.overlay_source()?,
            workload: self.workload(),
            pricing: self.pricing()?,
            f1_variant: self.f1_variant()?,
            out: self.out(),
            shard: self.shard()?,
        })
    }
}

/// Parses a `start:end` step range.
pub fn parse_shard(text: &str) -> anyhow::Result<(u64, u64)> {
    let (start, end) = text
        .split_once(':')
        .with_context(|| format!("shard {text:?} must look like start:end"))?;
    let start: u64 = start
        .trim()
        .parse()
        .with_context(|| format!("bad shard start in {text:?}"))?;
    let end: u64 = end
        .trim()
        .parse()
        .with_context(|| format!("bad shard end in {text:?}"))?;
    if start >= end {
        bail!("shard {text:?} is empty (start must be < end)");
    }
    Ok((start, end))
}
