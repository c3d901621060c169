use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use tsp_core::swarm::{Optimizer, SwarmConfig};

/// Default share of the knowledge base used for training (2200 of 3300).
pub const DEFAULT_TRAIN_FRACTION: f64 = 2.0 / 3.0;

/// Run configuration file. Relative paths are taken relative to the file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    model: Option<PathBuf>,
    grid: Option<PathBuf>,
    kb: Option<PathBuf>,
    out: Option<PathBuf>,
    model_file: Option<PathBuf>,
    optimizer: Option<String>,
    train_fraction: Option<f64>,
    seed: Option<u64>,
    repeats: Option<usize>,
    #[serde(default)]
    swarm: Option<SwarmConfig>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: Option<PathBuf>,
    pub grid: Option<PathBuf>,
    pub kb: Option<PathBuf>,
    pub out: PathBuf,
    pub model_file: Option<PathBuf>,
    pub optimizer: Optimizer,
    pub train_fraction: f64,
    pub seed: u64,
    pub repeats: usize,
    pub swarm: SwarmConfig,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub model: Option<PathBuf>,
    pub grid: Option<PathBuf>,
    pub kb: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub model_file: Option<PathBuf>,
    pub optimizer: Option<String>,
    pub seed: Option<u64>,
    pub repeats: Option<usize>,
}

fn resolve(base: &Path, p: Option<PathBuf>) -> Option<PathBuf> {
    p.map(|p| if p.is_absolute() { p } else { base.join(p) })
}

impl RunConfig {
    pub fn load(file: Option<&Path>, cli: Overrides) -> Result<Self> {
        let (fc, base) = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
                let fc: FileConfig = toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
                (fc, path.parent().unwrap_or(Path::new("")).to_path_buf())
            }
            None => (FileConfig::default(), PathBuf::new()),
        };
        let optimizer = match cli.optimizer.or(fc.optimizer) {
            Some(name) => name.parse::<Optimizer>()?,
            None => Optimizer::Ipso,
        };
        let seed = cli.seed.or(fc.seed).unwrap_or(0);
        let mut swarm = fc.swarm.unwrap_or_default();
        swarm.seed = seed;
        swarm.validate()?;
        let cfg = Self {
            model: cli.model.or(resolve(&base, fc.model)),
            grid: cli.grid.or(resolve(&base, fc.grid)),
            kb: cli.kb.or(resolve(&base, fc.kb)),
            out: cli.out.or(resolve(&base, fc.out)).unwrap_or_else(|| PathBuf::from(".")),
            model_file: cli.model_file.or(resolve(&base, fc.model_file)),
            optimizer,
            train_fraction: fc.train_fraction.unwrap_or(DEFAULT_TRAIN_FRACTION),
            seed,
            repeats: cli.repeats.or(fc.repeats).unwrap_or(1),
            swarm,
        };
        if cfg.repeats == 0 {
            bail!("repeats must be at least 1");
        }
        if !(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0) {
            bail!("train_fraction must be in (0, 1), got {}", cfg.train_fraction);
        }
        Ok(cfg)
    }

    pub fn kb_path(&self) -> PathBuf {
        self.kb.clone().unwrap_or_else(|| self.out.join("kb.csv"))
    }

    pub fn model_path(&self) -> PathBuf {
        self.model_file.clone().unwrap_or_else(|| self.out.join("model.json"))
    }
}
