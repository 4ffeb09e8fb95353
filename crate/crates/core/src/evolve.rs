//! Genetic algorithm over genomes.
//!
//! Generational GA with elitism, tournament selection, one-point crossover
//! and a per-offspring single point mutation. Every individual is evaluated
//! by simulating its genome under the same simulation seed, so fitness
//! differences come from the genomes alone.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{self, EngineError, SimulationConfig, Trace};
use crate::genome::{random_genome, Base, DnaSequence};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolveError {
    #[error("parents differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("invalid GA configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown problem {0} (expected 1 or 2)")]
    UnknownProblem(u32),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Minimize,
    Maximize,
}

impl Direction {
    /// Orders fitness values best-first.
    pub fn compare(self, a: f64, b: f64) -> Ordering {
        match self {
            Direction::Minimize => a.total_cmp(&b),
            Direction::Maximize => b.total_cmp(&a),
        }
    }

    pub fn is_better(self, a: f64, b: f64) -> bool {
        self.compare(a, b) == Ordering::Less
    }
}

pub const TARGET_CONCENTRATION: f64 = 0.085;
pub const TARGET_CYCLE: usize = 100;
pub const ALTERNATION_PERIOD: usize = 50;
pub const ALTERNATION_PERIODS: usize = 10;

/// Target behaviours a genome can be evolved towards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    /// Protein 1 should sit at concentration 0.085 at cycle 100 (error, minimized).
    TargetConcentration,
    /// Proteins 1 and 2 should swap the lead every 50 cycles (reward 0..=10, maximized).
    Alternation,
}

impl Problem {
    pub fn from_id(id: u32) -> Result<Problem, EvolveError> {
        match id {
            1 => Ok(Problem::TargetConcentration),
            2 => Ok(Problem::Alternation),
            other => Err(EvolveError::UnknownProblem(other)),
        }
    }

    pub fn id(self) -> u32 {
        match self {
            Problem::TargetConcentration => 1,
            Problem::Alternation => 2,
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            Problem::TargetConcentration => Direction::Minimize,
            Problem::Alternation => Direction::Maximize,
        }
    }

    /// Last cycle the fitness reads; simulating further cannot change the score.
    pub fn horizon(self) -> usize {
        match self {
            Problem::TargetConcentration => TARGET_CYCLE,
            Problem::Alternation => ALTERNATION_PERIOD * ALTERNATION_PERIODS,
        }
    }

    /// Score given to genomes that yield no usable network.
    pub fn penalty(self) -> f64 {
        match self {
            Problem::TargetConcentration => 1.0,
            Problem::Alternation => 0.0,
        }
    }

    pub fn score(self, trace: &Trace) -> f64 {
        match self {
            Problem::TargetConcentration => fitness_problem1(trace),
            Problem::Alternation => fitness_problem2(trace),
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// Absolute deviation of protein 1 from 0.085 at cycle 100.
pub fn fitness_problem1(trace: &Trace) -> f64 {
    match trace
        .concentrations
        .get(TARGET_CYCLE)
        .and_then(|row| row.first())
    {
        Some(c) => (c - TARGET_CONCENTRATION).abs(),
        None => Problem::TargetConcentration.penalty(),
    }
}

/// Alternation reward.
///
/// Period `k` covers cycles `(50k, 50(k+1)]` and is checked at its final
/// cycle: protein 1 must lead in even periods, protein 2 in odd ones. One
/// point per period, counted from the first period until the pattern first
/// breaks.
pub fn fitness_problem2(trace: &Trace) -> f64 {
    if trace.gene_count() < 2 {
        return 0.0;
    }
    let mut reward = 0;
    for k in 0..ALTERNATION_PERIODS {
        let Some(row) = trace.concentrations.get(ALTERNATION_PERIOD * (k + 1)) else {
            break;
        };
        let (first, second) = (row[0], row[1]);
        let ok = if k % 2 == 0 {
            first > second
        } else {
            second > first
        };
        if !ok {
            break;
        }
        reward += 1;
    }
    f64::from(reward)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub mutation_rate: f64,
    pub tournament_k: usize,
    pub elitism: usize,
    pub genome_length: usize,
    pub sim: SimulationConfig,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population: 25,
            generations: 50,
            mutation_rate: 0.10,
            tournament_k: 3,
            elitism: 1,
            genome_length: 3000,
            sim: SimulationConfig::default(),
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), EvolveError> {
        let bad = |m: String| Err(EvolveError::InvalidConfig(m));
        if self.population < 2 {
            return bad(format!("population {} must be at least 2", self.population));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return bad(format!(
                "mutation rate {} outside [0, 1]",
                self.mutation_rate
            ));
        }
        if self.tournament_k == 0 || self.tournament_k > self.population {
            return bad(format!(
                "tournament size {} must be in 1..={}",
                self.tournament_k, self.population
            ));
        }
        if self.elitism > self.population {
            return bad(format!("elitism {} exceeds population", self.elitism));
        }
        self.sim.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genome: DnaSequence,
    pub fitness: f64,
    /// Genes found in the genome at evaluation time.
    pub gene_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best: f64,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evolution {
    pub problem: Problem,
    pub master_seed: u64,
    pub best: Individual,
    pub history: Vec<GenerationStats>,
}

/// Cut uniform in `[1, len-1]`; children exchange suffixes.
pub fn one_point_crossover<R: Rng + ?Sized>(
    a: &DnaSequence,
    b: &DnaSequence,
    rng: &mut R,
) -> Result<(DnaSequence, DnaSequence), EvolveError> {
    if a.len() != b.len() {
        return Err(EvolveError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Ok((a.clone(), b.clone()));
    }
    let cut = rng.random_range(1..a.len());
    Ok(crossover_at(a, b, cut))
}

pub fn crossover_at(a: &DnaSequence, b: &DnaSequence, cut: usize) -> (DnaSequence, DnaSequence) {
    let (a, b) = (a.bases(), b.bases());
    let c1 = a[..cut].iter().chain(&b[cut..]).copied().collect();
    let c2 = b[..cut].iter().chain(&a[cut..]).copied().collect();
    (c1, c2)
}

/// With probability `rate`, substitutes one uniformly chosen base by one of the other three.
pub fn point_mutate<R: Rng + ?Sized>(genome: &DnaSequence, rate: f64, rng: &mut R) -> DnaSequence {
    if genome.is_empty() || !rng.random_bool(rate) {
        return genome.clone();
    }
    let mut bases = genome.bases().to_vec();
    let pos = rng.random_range(0..bases.len());
    bases[pos] = substitute(bases[pos], rng);
    DnaSequence::new(bases)
}

/// A base drawn uniformly from the three symbols other than `b`.
pub fn substitute<R: Rng + ?Sized>(b: Base, rng: &mut R) -> Base {
    let others: Vec<Base> = Base::ALL.into_iter().filter(|&x| x != b).collect();
    others[rng.random_range(0..3)]
}

/// Index of the winner of a size-`k` tournament drawn with replacement.
pub fn tournament_select<R: Rng + ?Sized>(
    population: &[Individual],
    k: usize,
    direction: Direction,
    rng: &mut R,
) -> usize {
    let mut best = rng.random_range(0..population.len());
    for _ in 1..k {
        let c = rng.random_range(0..population.len());
        let ord = direction.compare(population[c].fitness, population[best].fitness);
        if ord == Ordering::Less || (ord == Ordering::Equal && c < best) {
            best = c;
        }
    }
    best
}

/// Linear-interpolation quantile of ascending `sorted`.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Best, median and quartiles of one generation's fitness values.
pub fn summarize(generation: usize, fitness: &[f64], direction: Direction) -> GenerationStats {
    let mut sorted = fitness.to_vec();
    sorted.sort_by(f64::total_cmp);
    let best = match direction {
        Direction::Minimize => sorted[0],
        Direction::Maximize => sorted[sorted.len() - 1],
    };
    GenerationStats {
        generation,
        best,
        median: quantile(&sorted, 0.5),
        q25: quantile(&sorted, 0.25),
        q75: quantile(&sorted, 0.75),
    }
}

/// Simulates `genome` to the problem's horizon and scores it.
pub fn evaluate(genome: &DnaSequence, problem: Problem, sim: &SimulationConfig) -> Individual {
    let config = SimulationConfig {
        cycles: problem.horizon(),
        ..sim.clone()
    };
    match engine::Simulation::from_genome(genome, config) {
        Ok(mut s) => {
            let gene_count = s.genes().len();
            let trace = s.run();
            Individual {
                genome: genome.clone(),
                fitness: problem.score(&trace),
                gene_count,
            }
        }
        Err(_) => Individual {
            genome: genome.clone(),
            fitness: problem.penalty(),
            gene_count: 0,
        },
    }
}

fn evaluate_all(
    genomes: Vec<DnaSequence>,
    problem: Problem,
    sim: &SimulationConfig,
) -> Vec<Individual> {
    // par_iter preserves input order, so results do not depend on scheduling
    genomes
        .par_iter()
        .map(|g| evaluate(g, problem, sim))
        .collect()
}

/// Population indices ordered best-first, ties by index.
fn ranking(population: &[Individual], direction: Direction) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..population.len()).collect();
    idx.sort_by(|&a, &b| {
        direction
            .compare(population[a].fitness, population[b].fitness)
            .then(a.cmp(&b))
    });
    idx
}

pub fn evolve(
    config: &GaConfig,
    problem: Problem,
    master_seed: u64,
) -> Result<Evolution, EvolveError> {
    config.validate()?;
    let direction = problem.direction();
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);

    let initial: Vec<DnaSequence> = (0..config.population)
        .map(|_| random_genome(config.genome_length, &mut rng))
        .collect();
    let mut population = evaluate_all(initial, problem, &config.sim);
    let fitness: Vec<f64> = population.iter().map(|i| i.fitness).collect();
    let mut history = vec![summarize(0, &fitness, direction)];
    let mut best = population[ranking(&population, direction)[0]].clone();

    for generation in 1..=config.generations {
        let order = ranking(&population, direction);
        let mut next: Vec<Individual> = order[..config.elitism]
            .iter()
            .map(|&i| population[i].clone())
            .collect();

        let mut children = Vec::with_capacity(config.population - next.len());
        while next.len() + children.len() < config.population {
            let a = tournament_select(&population, config.tournament_k, direction, &mut rng);
            let b = tournament_select(&population, config.tournament_k, direction, &mut rng);
            let (c1, c2) =
                one_point_crossover(&population[a].genome, &population[b].genome, &mut rng)?;
            children.push(point_mutate(&c1, config.mutation_rate, &mut rng));
            if next.len() + children.len() < config.population {
                children.push(point_mutate(&c2, config.mutation_rate, &mut rng));
            }
        }
        next.extend(evaluate_all(children, problem, &config.sim));
        population = next;

        let fitness: Vec<f64> = population.iter().map(|i| i.fitness).collect();
        history.push(summarize(generation, &fitness, direction));
        let leader = &population[ranking(&population, direction)[0]];
        if direction.is_better(leader.fitness, best.fitness) {
            best = leader.clone();
        }
    }

    Ok(Evolution {
        problem,
        master_seed,
        best,
        history,
    })
}
