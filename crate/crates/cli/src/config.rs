//! Flat `key = value` configuration files and flag overrides.
//!
//! Resolution order is built-in defaults, then the config file, then
//! command-line flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{Context, Result};
use arn_core::{GaConfig, InitialConcentration, SimulationConfig};
use clap::Args;

pub const SIM_KEYS: [&str; 9] = [
    "seed",
    "grid_size",
    "step",
    "threshold",
    "beta",
    "delta",
    "tf_per_gene",
    "cycles",
    "initial_concentration",
];

pub const GA_KEYS: [&str; 6] = [
    "population",
    "generations",
    "mutation_rate",
    "tournament_k",
    "elitism",
    "genome_length",
];

/// Malformed config file or value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Default, Clone, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<ConfigFile> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected `key = value`", n + 1)))?;
            let key = key.trim();
            if !SIM_KEYS.contains(&key) && !GA_KEYS.contains(&key) {
                return Err(ConfigError(format!("line {}: unknown key {key:?}", n + 1)).into());
            }
            entries.insert(key.to_string(), value.trim().to_string());
        }
        Ok(ConfigFile { entries })
    }

    pub fn load(path: &Path) -> Result<ConfigFile> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        ConfigFile::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| ConfigError(format!("config key {key}: {e}")).into())
            })
            .transpose()
    }
}

fn set<T: FromStr>(target: &mut T, file: &ConfigFile, key: &str, flag: Option<T>) -> Result<()>
where
    T::Err: std::fmt::Display,
{
    if let Some(v) = file.get::<T>(key)? {
        *target = v;
    }
    if let Some(v) = flag {
        *target = v;
    }
    Ok(())
}

/// Simulation flags shared by every command that runs the engine.
#[derive(Debug, Clone, Default, Args)]
pub struct SimArgs {
    /// Flat `key = value` config file; flags override its values.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    /// Seed for site placement and factor movement.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid side length in cells.
    #[arg(long)]
    pub grid_size: Option<u32>,
    /// Per-axis bound of one random-walk move.
    #[arg(long)]
    pub step: Option<u32>,
    /// Binding distance (strict).
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Transcription factors created per gene at start.
    #[arg(long)]
    pub tf_per_gene: Option<usize>,
    /// Number of regulatory cycles.
    #[arg(long)]
    pub cycles: Option<usize>,
    /// uniform | random | constant:<c> | explicit:<c0>,<c1>,...
    #[arg(long)]
    pub initial_concentration: Option<InitialConcentration>,
}

impl SimArgs {
    pub fn file(&self) -> Result<ConfigFile> {
        match &self.config {
            Some(p) => ConfigFile::load(p),
            None => Ok(ConfigFile::default()),
        }
    }

    pub fn resolve(&self) -> Result<SimulationConfig> {
        self.resolve_with(&self.file()?)
    }

    pub fn resolve_with(&self, file: &ConfigFile) -> Result<SimulationConfig> {
        let mut c = SimulationConfig::default();
        set(&mut c.seed, file, "seed", self.seed)?;
        set(&mut c.grid.size, file, "grid_size", self.grid_size)?;
        set(&mut c.grid.step, file, "step", self.step)?;
        set(&mut c.grid.threshold, file, "threshold", self.threshold)?;
        set(&mut c.beta, file, "beta", self.beta)?;
        set(&mut c.delta, file, "delta", self.delta)?;
        set(&mut c.tf_per_gene, file, "tf_per_gene", self.tf_per_gene)?;
        set(&mut c.cycles, file, "cycles", self.cycles)?;
        set(
            &mut c.initial_concentration,
            file,
            "initial_concentration",
            self.initial_concentration.clone(),
        )?;
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct GaArgs {
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    /// Probability that an offspring receives one point mutation.
    #[arg(long)]
    pub mutation_rate: Option<f64>,
    #[arg(long)]
    pub tournament_k: Option<usize>,
    #[arg(long)]
    pub elitism: Option<usize>,
    #[arg(long)]
    pub genome_length: Option<usize>,
}

impl GaArgs {
    pub fn resolve(&self, sim: &SimArgs) -> Result<GaConfig> {
        let file = sim.file()?;
        let mut c = GaConfig {
            sim: sim.resolve_with(&file)?,
            ..GaConfig::default()
        };
        set(&mut c.population, &file, "population", self.population)?;
        set(&mut c.generations, &file, "generations", self.generations)?;
        set(
            &mut c.mutation_rate,
            &file,
            "mutation_rate",
            self.mutation_rate,
        )?;
        set(
            &mut c.tournament_k,
            &file,
            "tournament_k",
            self.tournament_k,
        )?;
        set(&mut c.elitism, &file, "elitism", self.elitism)?;
        set(
            &mut c.genome_length,
            &file,
            "genome_length",
            self.genome_length,
        )?;
        c.validate()?;
        Ok(c)
    }
}
