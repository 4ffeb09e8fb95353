//! Spatial artificial gene regulatory network.
//!
//! Genomes are scanned for genes ([`genome`]), each gene's regulatory sites
//! are placed on a toroidal grid ([`space`]) where transcription factors
//! random-walk and bind by base complementarity ([`chemistry`]). The
//! [`engine`] turns bindings into transcription rates and normalized protein
//! concentrations, cycle by cycle. [`evolve`] searches genomes for target
//! dynamics and [`experiments`] scripts the parameter studies; [`report`]
//! writes traces as CSV and SVG.

pub mod chemistry;
pub mod engine;
pub mod evolve;
pub mod experiments;
pub mod genome;
pub mod report;
pub mod space;

pub use chemistry::{binding_strength, complements};
pub use engine::{
    run, EngineError, InitialConcentration, Simulation, SimulationConfig, SiteKind, Trace,
};
pub use evolve::{evolve, Evolution, EvolveError, GaConfig, Individual, Problem};
pub use experiments::{ExperimentError, Sweep};
pub use genome::{random_genome, scan_genes, Base, DnaSequence, Gene, GenomeError};
pub use space::{GridSpec, Position};

/// Seed used whenever the caller does not supply one.
pub const DEFAULT_SEED: u64 = 20_220_707;

/// SplitMix64 finalizer; derives independent seeds from structured keys.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
