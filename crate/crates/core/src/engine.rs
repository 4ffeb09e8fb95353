//! Regulatory-cycle simulation.
//!
//! Each cycle runs five phases in a fixed order:
//!
//! 1. **rate**: every gene's transcription rate is updated from the bindings
//!    active at the start of the cycle, then binding counters tick down and
//!    expired transcription factors are removed;
//! 2. **movement**: unbound factors random-walk on the torus;
//! 3. **binding**: unbound factors attach to the nearest non-parent site in
//!    range with a nonzero binding strength;
//! 4. **production**: concentrations grow by `delta * C * R`, are clamped at
//!    zero and renormalized to sum to one;
//! 5. **respawn**: each expired factor is replaced by a fresh one from the gene
//!    with the highest concentration, placed at the grid origin.
//!
//! A [`Trace`] records concentrations and rates for the initial state and
//! after every cycle.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chemistry::binding_strength;
use crate::genome::{scan_genes, DnaSequence, Gene};
use crate::space::{central_placement, random_step, toroidal_distance, GridSpec, Position};

/// Sums below this are treated as a collapsed concentration vector.
const COLLAPSE_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("genome contains no genes")]
    NoGenes,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("gene {0} does not exist")]
    UnknownGene(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "snake_case")]
pub enum InitialConcentration {
    /// `1/N` for every gene.
    Uniform,
    /// The same value for every gene (normalized afterwards).
    Constant(f64),
    /// Independent uniform draws from `[0, 1)`.
    Random,
    /// One value per gene, in gene order.
    Explicit(Vec<f64>),
}

impl fmt::Display for InitialConcentration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialConcentration::Uniform => f.write_str("uniform"),
            InitialConcentration::Random => f.write_str("random"),
            InitialConcentration::Constant(c) => write!(f, "constant:{c}"),
            InitialConcentration::Explicit(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "explicit:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for InitialConcentration {
    type Err = String;

    /// Accepts `uniform`, `random`, `constant:<c>`, `explicit:<c0>,<c1>,...`,
    /// or a bare number as shorthand for `constant:<c>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| format!("invalid concentration value {v:?}"))
        };
        match s {
            "uniform" => Ok(InitialConcentration::Uniform),
            "random" => Ok(InitialConcentration::Random),
            _ => {
                if let Some(v) = s.strip_prefix("constant:") {
                    Ok(InitialConcentration::Constant(num(v)?))
                } else if let Some(v) = s.strip_prefix("explicit:") {
                    v.split(',')
                        .map(num)
                        .collect::<Result<Vec<_>, _>>()
                        .map(InitialConcentration::Explicit)
                } else {
                    num(s)
                        .map(InitialConcentration::Constant)
                        .map_err(|_| format!("unknown initial concentration mode {s:?}"))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub grid: GridSpec,
    pub beta: f64,
    pub delta: f64,
    pub tf_per_gene: usize,
    pub cycles: usize,
    pub seed: u64,
    pub initial_concentration: InitialConcentration,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            grid: GridSpec::default(),
            beta: 1.0,
            delta: 1.0,
            tf_per_gene: 25,
            cycles: 1000,
            seed: crate::DEFAULT_SEED,
            initial_concentration: InitialConcentration::Uniform,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        self.grid.validate().map_err(EngineError::InvalidConfig)?;
        if !self.beta.is_finite() || !self.delta.is_finite() {
            return Err(EngineError::InvalidConfig(
                "beta and delta must be finite".into(),
            ));
        }
        match &self.initial_concentration {
            InitialConcentration::Constant(c) if !(c.is_finite() && *c >= 0.0) => Err(
                EngineError::InvalidConfig(format!("initial concentration {c} must be >= 0")),
            ),
            InitialConcentration::Explicit(v)
                if v.iter().any(|c| !(c.is_finite() && *c >= 0.0)) =>
            {
                Err(EngineError::InvalidConfig(
                    "explicit initial concentrations must be finite and >= 0".into(),
                ))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SiteKind {
    Enhancer,
    Inhibitor,
}

impl SiteKind {
    pub const BOTH: [SiteKind; 2] = [SiteKind::Enhancer, SiteKind::Inhibitor];

    fn sign(self) -> f64 {
        match self {
            SiteKind::Enhancer => 1.0,
            SiteKind::Inhibitor => -1.0,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for SiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SiteKind::Enhancer => "enhancer",
            SiteKind::Inhibitor => "inhibitor",
        })
    }
}

impl FromStr for SiteKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "enhancer" => Ok(SiteKind::Enhancer),
            "inhibitor" => Ok(SiteKind::Inhibitor),
            _ => Err(format!(
                "unknown site {s:?} (expected enhancer or inhibitor)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Binding {
    pub gene: usize,
    pub site: SiteKind,
    /// Strength at bind time; also the binding's lifetime in cycles.
    pub strength: u32,
    pub remaining: u32,
    /// Rate phases this binding has contributed to so far.
    pub applied: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptionFactor {
    pub id: u64,
    pub parent: usize,
    pub protein: DnaSequence,
    pub pos: Position,
    pub binding: Option<Binding>,
}

impl TranscriptionFactor {
    pub fn is_bound(&self) -> bool {
        self.binding.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneState {
    pub gene: Gene,
    pub enhancer_pos: Position,
    pub inhibitor_pos: Position,
    pub rate: f64,
    pub concentration: f64,
}

impl GeneState {
    pub fn site_pos(&self, site: SiteKind) -> Position {
        match site {
            SiteKind::Enhancer => self.enhancer_pos,
            SiteKind::Inhibitor => self.inhibitor_pos,
        }
    }

    fn site_pos_mut(&mut self, site: SiteKind) -> &mut Position {
        match site {
            SiteKind::Enhancer => &mut self.enhancer_pos,
            SiteKind::Inhibitor => &mut self.inhibitor_pos,
        }
    }
}

/// A completed binding, logged when its transcription factor expires.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BindingRecord {
    pub tf_id: u64,
    pub gene: usize,
    pub site: SiteKind,
    pub strength: u32,
    pub rate_phases: u32,
}

/// Per-gene summary written into run metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneRecord {
    pub id: usize,
    pub promoter_start: usize,
    pub internal_len: usize,
    pub site_size: usize,
    pub locator_offset: i64,
    pub locator: DnaSequence,
    pub enhancer: DnaSequence,
    pub inhibitor: DnaSequence,
    pub protein: DnaSequence,
    pub enhancer_pos: Position,
    pub inhibitor_pos: Position,
}

impl From<&GeneState> for GeneRecord {
    fn from(g: &GeneState) -> Self {
        GeneRecord {
            id: g.gene.id,
            promoter_start: g.gene.promoter_start,
            internal_len: g.gene.internal_len,
            site_size: g.gene.site_size,
            locator_offset: g.gene.locator_offset,
            locator: g.gene.locator.clone(),
            enhancer: g.gene.enhancer.clone(),
            inhibitor: g.gene.inhibitor.clone(),
            protein: g.gene.protein.clone(),
            enhancer_pos: g.enhancer_pos,
            inhibitor_pos: g.inhibitor_pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub seed: u64,
    pub genome_length: usize,
    pub config: SimulationConfig,
    pub genes: Vec<GeneRecord>,
}

/// Concentrations and rates over time; row `t` is the state after cycle `t`,
/// row 0 the initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub metadata: RunMetadata,
    pub concentrations: Vec<Vec<f64>>,
    pub rates: Vec<Vec<f64>>,
}

impl Trace {
    pub fn gene_count(&self) -> usize {
        self.metadata.genes.len()
    }

    pub fn rows(&self) -> usize {
        self.concentrations.len()
    }

    /// Concentration of one gene across all recorded cycles.
    pub fn series(&self, gene: usize) -> Vec<f64> {
        self.concentrations.iter().map(|row| row[gene]).collect()
    }
}

pub struct Simulation {
    config: SimulationConfig,
    genome_length: usize,
    genes: Vec<GeneState>,
    tfs: Vec<TranscriptionFactor>,
    next_tf_id: u64,
    rng: ChaCha8Rng,
    /// `strengths[parent * n + target][site]`
    strengths: Vec<[u32; 2]>,
    expired: usize,
    cycle: usize,
    audit: Option<Vec<BindingRecord>>,
}

impl Simulation {
    pub fn from_genome(
        genome: &DnaSequence,
        config: SimulationConfig,
    ) -> Result<Self, EngineError> {
        Simulation::new(scan_genes(genome), genome.len(), config)
    }

    /// Places sites, spawns factors at the origin and sets initial concentrations.
    pub fn new(
        genes: Vec<Gene>,
        genome_length: usize,
        config: SimulationConfig,
    ) -> Result<Self, EngineError> {
        config.validate()?;
        if genes.is_empty() {
            return Err(EngineError::NoGenes);
        }
        let n = genes.len();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

        let mut states: Vec<GeneState> = genes
            .into_iter()
            .map(|gene| {
                let enhancer_pos = central_placement(&config.grid, &mut rng);
                let inhibitor_pos = central_placement(&config.grid, &mut rng);
                GeneState {
                    gene,
                    enhancer_pos,
                    inhibitor_pos,
                    rate: 0.0,
                    concentration: 0.0,
                }
            })
            .collect();

        let mut strengths = vec![[0u32; 2]; n * n];
        for (p, parent) in states.iter().enumerate() {
            for (t, target) in states.iter().enumerate() {
                let protein = parent.gene.protein.bases();
                strengths[p * n + t] = [
                    binding_strength(protein, target.gene.enhancer.bases()),
                    binding_strength(protein, target.gene.inhibitor.bases()),
                ];
            }
        }

        let initial: Vec<f64> = match &config.initial_concentration {
            InitialConcentration::Uniform => vec![1.0 / n as f64; n],
            InitialConcentration::Constant(c) => vec![*c; n],
            InitialConcentration::Random => (0..n).map(|_| rng.random::<f64>()).collect(),
            InitialConcentration::Explicit(v) => {
                if v.len() != n {
                    return Err(EngineError::InvalidConfig(format!(
                        "{} explicit concentrations given for {n} genes",
                        v.len()
                    )));
                }
                v.clone()
            }
        };
        for (state, c) in states.iter_mut().zip(normalized(initial)) {
            state.concentration = c;
        }

        let mut sim = Simulation {
            genome_length,
            genes: states,
            tfs: Vec::with_capacity(n * config.tf_per_gene),
            next_tf_id: 0,
            rng,
            strengths,
            expired: 0,
            cycle: 0,
            audit: None,
            config,
        };
        for parent in 0..n {
            for _ in 0..sim.config.tf_per_gene {
                sim.spawn_tf(parent);
            }
        }
        Ok(sim)
    }

    /// Starts logging every completed binding.
    pub fn with_audit(mut self) -> Self {
        self.audit = Some(Vec::new());
        self
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn genes(&self) -> &[GeneState] {
        &self.genes
    }

    pub fn tfs(&self) -> &[TranscriptionFactor] {
        &self.tfs
    }

    pub fn cycle(&self) -> usize {
        self.cycle
    }

    pub fn rng(&self) -> &ChaCha8Rng {
        &self.rng
    }

    pub fn audit_log(&self) -> Option<&[BindingRecord]> {
        self.audit.as_deref()
    }

    pub fn concentrations(&self) -> Vec<f64> {
        self.genes.iter().map(|g| g.concentration).collect()
    }

    pub fn rates(&self) -> Vec<f64> {
        self.genes.iter().map(|g| g.rate).collect()
    }

    /// Number of factors removed in the current cycle and awaiting respawn.
    pub fn pending_respawns(&self) -> usize {
        self.expired
    }

    /// Moves one regulatory site by `(dx, dy)` cells, wrapping around the grid.
    pub fn shift_site(
        &mut self,
        gene: usize,
        site: SiteKind,
        dx: i64,
        dy: i64,
    ) -> Result<(), EngineError> {
        let side = self.config.grid.size;
        let state = self
            .genes
            .get_mut(gene)
            .ok_or(EngineError::UnknownGene(gene))?;
        let pos = state.site_pos_mut(site);
        *pos = pos.shifted(dx, dy, side);
        Ok(())
    }

    pub fn metadata(&self) -> RunMetadata {
        RunMetadata {
            seed: self.config.seed,
            genome_length: self.genome_length,
            config: self.config.clone(),
            genes: self.genes.iter().map(GeneRecord::from).collect(),
        }
    }

    fn spawn_tf(&mut self, parent: usize) {
        self.tfs.push(TranscriptionFactor {
            id: self.next_tf_id,
            parent,
            protein: self.genes[parent].gene.protein.clone(),
            pos: Position::ORIGIN,
            binding: None,
        });
        self.next_tf_id += 1;
    }

    fn strength(&self, parent: usize, target: usize, site: SiteKind) -> u32 {
        self.strengths[parent * self.genes.len() + target][site.index()]
    }

    pub fn rate_phase(&mut self) {
        let s_total = self
            .tfs
            .iter()
            .filter_map(|tf| tf.binding.as_ref().map(|b| b.strength))
            .max()
            .unwrap_or(0);
        let beta = self.config.beta;
        let n = self.genes.len();
        let mut sums = vec![0.0f64; n];
        let mut counts = vec![0usize; n];
        for b in self.tfs.iter().filter_map(|tf| tf.binding.as_ref()) {
            let excess = f64::from(b.strength) - f64::from(s_total) - 1.0;
            sums[b.gene] += b.site.sign() * (beta * excess).exp();
            counts[b.gene] += 1;
        }
        for (state, (sum, count)) in self.genes.iter_mut().zip(sums.into_iter().zip(counts)) {
            state.rate = if count == 0 {
                0.0
            } else {
                state.rate + sum / count as f64
            };
        }

        let mut expired = 0;
        let audit = &mut self.audit;
        self.tfs.retain_mut(|tf| {
            let Some(b) = tf.binding.as_mut() else {
                return true;
            };
            b.applied += 1;
            b.remaining -= 1;
            if b.remaining > 0 {
                return true;
            }
            if let Some(log) = audit.as_mut() {
                log.push(BindingRecord {
                    tf_id: tf.id,
                    gene: b.gene,
                    site: b.site,
                    strength: b.strength,
                    rate_phases: b.applied,
                });
            }
            expired += 1;
            false
        });
        self.expired += expired;
    }

    pub fn movement_phase(&mut self) {
        let grid = self.config.grid;
        for tf in self.tfs.iter_mut().filter(|tf| !tf.is_bound()) {
            tf.pos = random_step(tf.pos, &grid, &mut self.rng);
        }
    }

    pub fn binding_phase(&mut self) {
        let side = self.config.grid.size;
        let threshold = self.config.grid.threshold;
        for i in 0..self.tfs.len() {
            let tf = &self.tfs[i];
            if tf.is_bound() {
                continue;
            }
            let mut best: Option<(f64, usize, SiteKind, u32)> = None;
            for (g, state) in self.genes.iter().enumerate() {
                if g == tf.parent {
                    continue;
                }
                for site in SiteKind::BOTH {
                    let dist = toroidal_distance(tf.pos, state.site_pos(site), side);
                    if dist >= threshold {
                        continue;
                    }
                    let strength = self.strength(tf.parent, g, site);
                    if strength == 0 {
                        continue;
                    }
                    // candidates arrive in (gene, site) order, so strict < keeps the tie rule
                    if best.is_none_or(|(d, ..)| dist < d) {
                        best = Some((dist, g, site, strength));
                    }
                }
            }
            if let Some((_, gene, site, strength)) = best {
                self.tfs[i].binding = Some(Binding {
                    gene,
                    site,
                    strength,
                    remaining: strength,
                    applied: 0,
                });
            }
        }
    }

    pub fn production_phase(&mut self) {
        let delta = self.config.delta;
        let raw: Vec<f64> = self
            .genes
            .iter()
            .map(|g| (g.concentration + delta * g.concentration * g.rate).max(0.0))
            .collect();
        for (state, c) in self.genes.iter_mut().zip(normalized(raw)) {
            state.concentration = c;
        }
    }

    pub fn respawn_phase(&mut self) {
        if self.expired == 0 {
            return;
        }
        let parent = argmax(&self.concentrations());
        for _ in 0..std::mem::take(&mut self.expired) {
            self.spawn_tf(parent);
        }
    }

    /// Runs one full cycle.
    pub fn step(&mut self) {
        self.rate_phase();
        self.movement_phase();
        self.binding_phase();
        self.production_phase();
        self.respawn_phase();
        self.cycle += 1;
    }

    /// Runs `config.cycles` cycles and returns the recorded trace.
    pub fn run(&mut self) -> Trace {
        let cycles = self.config.cycles;
        let mut concentrations = Vec::with_capacity(cycles + 1);
        let mut rates = Vec::with_capacity(cycles + 1);
        concentrations.push(self.concentrations());
        rates.push(self.rates());
        for _ in 0..cycles {
            self.step();
            concentrations.push(self.concentrations());
            rates.push(self.rates());
        }
        Trace {
            metadata: self.metadata(),
            concentrations,
            rates,
        }
    }
}

/// Parses `genome` and simulates it under `config`.
pub fn run(genome: &DnaSequence, config: &SimulationConfig) -> Result<Trace, EngineError> {
    Ok(Simulation::from_genome(genome, config.clone())?.run())
}

/// Divides by the total; a collapsed vector becomes uniform.
fn normalized(mut values: Vec<f64>) -> Vec<f64> {
    let total: f64 = values.iter().sum();
    let n = values.len() as f64;
    if total < COLLAPSE_EPS {
        values.iter_mut().for_each(|v| *v = 1.0 / n);
    } else {
        values.iter_mut().for_each(|v| *v /= total);
    }
    values
}

/// Index of the largest value; the lowest index wins ties.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}
