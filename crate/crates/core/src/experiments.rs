//! Scripted studies: gene-count statistics, single-parameter sweeps,
//! regulatory-site perturbation and mutation impact.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{
    EngineError, InitialConcentration, Simulation, SimulationConfig, SiteKind, Trace,
};
use crate::evolve::substitute;
use crate::genome::{random_genome, regulatory_loci, scan_genes, Base, DnaSequence};
use crate::mix_seed;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error("unknown sweep parameter {0:?}")]
    UnknownParameter(String),
    #[error("invalid value {value:?} for {param}: {reason}")]
    InvalidValue {
        param: &'static str,
        value: String,
        reason: String,
    },
    #[error("only {available} regulatory positions available for {requested} mutations")]
    NotEnoughLoci { available: usize, requested: usize },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneCountRow {
    pub length: usize,
    pub trials: usize,
    pub mean: f64,
    pub rounded: u64,
}

/// Mean number of genes found in `trials` random genomes of each length.
pub fn gene_count_table(lengths: &[usize], trials: usize, master_seed: u64) -> Vec<GeneCountRow> {
    lengths
        .par_iter()
        .map(|&length| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(master_seed, length as u64));
            let total: usize = (0..trials)
                .map(|_| scan_genes(&random_genome(length, &mut rng)).len())
                .sum();
            let mean = if trials == 0 {
                0.0
            } else {
                total as f64 / trials as f64
            };
            GeneCountRow {
                length,
                trials,
                mean,
                rounded: mean.round() as u64,
            }
        })
        .collect()
}

/// One varied parameter and the values it takes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "param", content = "values", rename_all = "snake_case")]
pub enum Sweep {
    Beta(Vec<f64>),
    Delta(Vec<f64>),
    TfPerGene(Vec<usize>),
    GridSize(Vec<u32>),
    InitialConcentration(Vec<InitialConcentration>),
}

impl Sweep {
    pub const PARAMETERS: [&'static str; 5] = [
        "beta",
        "delta",
        "tf_per_gene",
        "grid_size",
        "initial_concentration_mode",
    ];

    /// Builds a sweep from a parameter name and comma-separated values.
    /// Initial-concentration values may be numbers (uniform constants),
    /// `uniform` or `random`.
    pub fn parse(param: &str, values: &str) -> Result<Sweep, ExperimentError> {
        fn list<T: std::str::FromStr>(
            param: &'static str,
            values: &str,
        ) -> Result<Vec<T>, ExperimentError>
        where
            T::Err: fmt::Display,
        {
            values
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<T>()
                        .map_err(|e| ExperimentError::InvalidValue {
                            param,
                            value: v.trim().to_string(),
                            reason: e.to_string(),
                        })
                })
                .collect()
        }
        Ok(match param {
            "beta" => Sweep::Beta(list("beta", values)?),
            "delta" => Sweep::Delta(list("delta", values)?),
            "tf_per_gene" => Sweep::TfPerGene(list("tf_per_gene", values)?),
            "grid_size" => Sweep::GridSize(list("grid_size", values)?),
            "initial_concentration" | "initial_concentration_mode" => {
                Sweep::InitialConcentration(list("initial_concentration_mode", values)?)
            }
            other => return Err(ExperimentError::UnknownParameter(other.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Sweep::Beta(_) => "beta",
            Sweep::Delta(_) => "delta",
            Sweep::TfPerGene(_) => "tf_per_gene",
            Sweep::GridSize(_) => "grid_size",
            Sweep::InitialConcentration(_) => "initial_concentration_mode",
        }
    }

    /// Value labels, in run order.
    pub fn labels(&self) -> Vec<String> {
        fn strs<T: ToString>(v: &[T]) -> Vec<String> {
            v.iter().map(T::to_string).collect()
        }
        match self {
            Sweep::Beta(v) | Sweep::Delta(v) => strs(v),
            Sweep::TfPerGene(v) => strs(v),
            Sweep::GridSize(v) => strs(v),
            Sweep::InitialConcentration(v) => strs(v),
        }
    }

    /// One configuration per value; everything else is copied from `base`.
    pub fn configs(&self, base: &SimulationConfig) -> Vec<SimulationConfig> {
        let with = |f: &dyn Fn(&mut SimulationConfig)| {
            let mut c = base.clone();
            f(&mut c);
            c
        };
        match self {
            Sweep::Beta(v) => v.iter().map(|&x| with(&|c| c.beta = x)).collect(),
            Sweep::Delta(v) => v.iter().map(|&x| with(&|c| c.delta = x)).collect(),
            Sweep::TfPerGene(v) => v.iter().map(|&x| with(&|c| c.tf_per_gene = x)).collect(),
            Sweep::GridSize(v) => v.iter().map(|&x| with(&|c| c.grid.size = x)).collect(),
            Sweep::InitialConcentration(v) => v
                .iter()
                .map(|x| with(&|c| c.initial_concentration = x.clone()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRun {
    pub label: String,
    pub trace: Trace,
}

/// Runs `genome` once per swept value, all with the same seed.
pub fn sweep(
    genome: &DnaSequence,
    base: &SimulationConfig,
    spec: &Sweep,
) -> Result<Vec<SweepRun>, ExperimentError> {
    let genes = scan_genes(genome);
    spec.configs(base)
        .into_par_iter()
        .zip(spec.labels())
        .map(|(config, label)| {
            let trace = Simulation::new(genes.clone(), genome.len(), config)?.run();
            Ok(SweepRun { label, trace })
        })
        .collect()
}

/// Baseline run and a run with one regulatory site moved by `(dx, dy)`.
pub fn perturb_site(
    genome: &DnaSequence,
    config: &SimulationConfig,
    gene: usize,
    site: SiteKind,
    offset: (i64, i64),
) -> Result<(Trace, Trace), ExperimentError> {
    let mut baseline = Simulation::from_genome(genome, config.clone())?;
    let mut perturbed = Simulation::from_genome(genome, config.clone())?;
    perturbed.shift_site(gene, site, offset.0, offset.1)?;
    Ok((baseline.run(), perturbed.run()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointMutation {
    pub position: usize,
    pub from: Base,
    pub to: Base,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutationRun {
    pub k: usize,
    pub mutations: Vec<PointMutation>,
    pub genome: DnaSequence,
    pub trace: Trace,
}

/// Sorted DNA positions covered by any gene's locator, enhancer or inhibitor.
pub fn regulatory_positions(genome: &DnaSequence) -> Vec<usize> {
    let loci: BTreeSet<usize> = scan_genes(genome)
        .iter()
        .flat_map(|g| regulatory_loci(g, genome.len()))
        .collect();
    loci.into_iter().collect()
}

/// Applies 0..=`max_k` point substitutions at distinct regulatory positions.
///
/// Mutations are cumulative: run `k` carries the first `k` substitutions of
/// one drawn list. Every mutant is re-parsed and simulated under `config`.
pub fn mutation_impact<R: Rng + ?Sized>(
    genome: &DnaSequence,
    config: &SimulationConfig,
    max_k: usize,
    rng: &mut R,
) -> Result<Vec<MutationRun>, ExperimentError> {
    let positions = regulatory_positions(genome);
    if positions.is_empty() {
        return Err(EngineError::NoGenes.into());
    }
    if positions.len() < max_k {
        return Err(ExperimentError::NotEnoughLoci {
            available: positions.len(),
            requested: max_k,
        });
    }
    let chosen = rand::seq::index::sample(rng, positions.len(), max_k);
    let mutations: Vec<PointMutation> = chosen
        .iter()
        .map(|i| {
            let position = positions[i];
            let from = genome.bases()[position];
            PointMutation {
                position,
                from,
                to: substitute(from, rng),
            }
        })
        .collect();

    (0..=max_k)
        .into_par_iter()
        .map(|k| {
            let mut bases = genome.bases().to_vec();
            for m in &mutations[..k] {
                bases[m.position] = m.to;
            }
            let mutant = DnaSequence::new(bases);
            let trace = Simulation::from_genome(&mutant, config.clone())?.run();
            Ok(MutationRun {
                k,
                mutations: mutations[..k].to_vec(),
                genome: mutant,
                trace,
            })
        })
        .collect()
}
