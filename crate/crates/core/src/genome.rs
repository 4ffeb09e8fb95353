//! DNA representation and gene identification.
//!
//! A genome is a single strand of bases. Genes are delimited by the promoter
//! `AGCT` and the terminator `TCGA`; the bases strictly between them (the
//! internal region, length `L`) hold a locator prefix of `S = floor(sqrt(L))`
//! bases followed by the protein-coding region. The locator's mapped sum
//! places the enhancer and inhibitor sites on the (circular) DNA.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const PROMOTER: [Base; 4] = [Base::A, Base::G, Base::C, Base::T];
pub const TERMINATOR: [Base; 4] = [Base::T, Base::C, Base::G, Base::A];

/// Shortest internal region that still yields a nonempty locator and coding region.
pub const MIN_INTERNAL_LEN: usize = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenomeError {
    #[error("invalid base {found:?} at offset {offset}")]
    InvalidBase { offset: usize, found: char },
    #[error("malformed gene: {0}")]
    MalformedGene(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Base {
    A,
    C,
    G,
    T,
}

impl Base {
    pub const ALL: [Base; 4] = [Base::A, Base::C, Base::G, Base::T];

    pub fn complement(self) -> Base {
        match self {
            Base::A => Base::T,
            Base::T => Base::A,
            Base::G => Base::C,
            Base::C => Base::G,
        }
    }

    /// Integer weight used when summing a locator: T=-1, G=-2, C=1, A=2.
    pub fn locator_value(self) -> i64 {
        match self {
            Base::T => -1,
            Base::G => -2,
            Base::C => 1,
            Base::A => 2,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Base::A => 'A',
            Base::C => 'C',
            Base::G => 'G',
            Base::T => 'T',
        }
    }

    pub fn from_symbol(c: char) -> Option<Base> {
        match c {
            'A' => Some(Base::A),
            'C' => Some(Base::C),
            'G' => Some(Base::G),
            'T' => Some(Base::T),
            _ => None,
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// An ordered, immutable run of bases.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct DnaSequence(Vec<Base>);

impl DnaSequence {
    pub fn new(bases: Vec<Base>) -> Self {
        DnaSequence(bases)
    }

    pub fn empty() -> Self {
        DnaSequence(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bases(&self) -> &[Base] {
        &self.0
    }

    pub fn into_bases(self) -> Vec<Base> {
        self.0
    }

    /// Reads `len` bases starting at `start`, wrapping around the sequence end.
    /// `start` may be negative. Panics on an empty sequence when `len > 0`.
    pub fn circular_slice(&self, start: i64, len: usize) -> DnaSequence {
        if len == 0 {
            return DnaSequence::empty();
        }
        let n = self.0.len() as i64;
        assert!(n > 0, "circular slice of an empty sequence");
        (0..len as i64)
            .map(|k| self.0[(start + k).rem_euclid(n) as usize])
            .collect()
    }

    /// Index of the first occurrence of `pattern` at or after `from`.
    pub fn find(&self, pattern: &[Base], from: usize) -> Option<usize> {
        if pattern.is_empty() || from >= self.0.len() {
            return None;
        }
        self.0[from..]
            .windows(pattern.len())
            .position(|w| w == pattern)
            .map(|p| p + from)
    }

    /// Parses genome file text: A/C/G/T only, optionally followed by one newline.
    pub fn parse_genome_text(text: &str) -> Result<DnaSequence, GenomeError> {
        let body = text
            .strip_suffix("\r\n")
            .or_else(|| text.strip_suffix('\n'))
            .unwrap_or(text);
        body.char_indices()
            .map(|(offset, c)| {
                Base::from_symbol(c).ok_or(GenomeError::InvalidBase { offset, found: c })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(DnaSequence)
    }
}

impl FromIterator<Base> for DnaSequence {
    fn from_iter<I: IntoIterator<Item = Base>>(iter: I) -> Self {
        DnaSequence(iter.into_iter().collect())
    }
}

impl From<Vec<Base>> for DnaSequence {
    fn from(v: Vec<Base>) -> Self {
        DnaSequence(v)
    }
}

impl FromStr for DnaSequence {
    type Err = GenomeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DnaSequence::parse_genome_text(s)
    }
}

impl fmt::Display for DnaSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|b| b.symbol()).collect();
        f.write_str(&s)
    }
}

impl Serialize for DnaSequence {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DnaSequence {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A gene located on the genome, with its derived regulatory sites and protein.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gene {
    pub id: usize,
    pub promoter_start: usize,
    /// Half-open internal region `[internal_start, internal_end)`.
    pub internal_start: usize,
    pub internal_end: usize,
    pub internal_len: usize,
    pub site_size: usize,
    pub locator: DnaSequence,
    pub locator_offset: i64,
    /// Start index of the enhancer, already reduced modulo the genome length.
    pub enhancer_start: usize,
    pub inhibitor_start: usize,
    pub enhancer: DnaSequence,
    pub inhibitor: DnaSequence,
    pub protein: DnaSequence,
}

impl Gene {
    /// Index one past the terminator's last base.
    pub fn terminator_end(&self) -> usize {
        self.internal_end + TERMINATOR.len()
    }

    pub fn coding_len(&self) -> usize {
        self.internal_len - self.site_size
    }
}

pub fn random_genome<R: Rng + ?Sized>(length: usize, rng: &mut R) -> DnaSequence {
    (0..length)
        .map(|_| Base::ALL[rng.random_range(0..4)])
        .collect()
}

/// Integer square root: the largest `s` with `s * s <= l`.
pub fn site_size(internal_len: usize) -> Result<usize, GenomeError> {
    if internal_len < MIN_INTERNAL_LEN {
        return Err(GenomeError::MalformedGene(format!(
            "internal length {internal_len} is below {MIN_INTERNAL_LEN}"
        )));
    }
    Ok(internal_len.isqrt())
}

pub fn locator_offset(locator: &[Base]) -> i64 {
    locator.iter().map(|b| b.locator_value()).sum()
}

/// Signed DNA index where the enhancer begins.
///
/// Non-negative offsets count from just past the promoter; negative offsets
/// place the enhancer upstream so that it ends `|d|` bases before the promoter.
pub fn enhancer_origin(promoter_start: usize, locator_offset: i64, site_size: usize) -> i64 {
    let p_start = promoter_start as i64;
    if locator_offset >= 0 {
        p_start + PROMOTER.len() as i64 + locator_offset
    } else {
        p_start + locator_offset - site_size as i64
    }
}

/// Extracts `(enhancer, inhibitor)` sequences for a gene with circular indexing.
pub fn resolve_sites(
    dna: &DnaSequence,
    promoter_start: usize,
    locator_offset: i64,
    site_size: usize,
) -> (DnaSequence, DnaSequence) {
    let origin = enhancer_origin(promoter_start, locator_offset, site_size);
    let enhancer = dna.circular_slice(origin, site_size);
    let inhibitor = dna.circular_slice(origin + site_size as i64, site_size);
    (enhancer, inhibitor)
}

/// Majority-rule protein from the coding region.
///
/// The region is cut into `site_size` consecutive chunks of width
/// `ceil(len / site_size)`, the last chunk possibly shorter. Each chunk
/// contributes its most frequent base; ties go to the base seen first.
pub fn derive_protein(coding: &[Base], site_size: usize) -> Result<DnaSequence, GenomeError> {
    if site_size == 0 || coding.len() < site_size {
        return Err(GenomeError::MalformedGene(format!(
            "coding length {} is shorter than site size {site_size}",
            coding.len()
        )));
    }
    let width = coding.len().div_ceil(site_size);
    let protein: DnaSequence = coding.chunks(width).map(majority_base).collect();
    if protein.len() != site_size {
        return Err(GenomeError::MalformedGene(format!(
            "coding length {} splits into {} chunks, expected {site_size}",
            coding.len(),
            protein.len()
        )));
    }
    Ok(protein)
}

fn majority_base(chunk: &[Base]) -> Base {
    let mut counts = [0usize; 4];
    for &b in chunk {
        counts[b as usize] += 1;
    }
    let best = chunk.iter().map(|&b| counts[b as usize]).max().unwrap_or(0);
    // first base in chunk order that reaches the maximum count
    chunk
        .iter()
        .copied()
        .find(|&b| counts[b as usize] == best)
        .expect("chunks are never empty")
}

/// Builds a gene from its promoter position and terminator position.
///
/// Returns `Ok(None)` when the internal region is too short to host a gene.
pub fn build_gene(
    dna: &DnaSequence,
    id: usize,
    promoter_start: usize,
    terminator_start: usize,
) -> Result<Option<Gene>, GenomeError> {
    let internal_start = promoter_start + PROMOTER.len();
    let internal_len = terminator_start.saturating_sub(internal_start);
    if internal_len < MIN_INTERNAL_LEN {
        return Ok(None);
    }
    let s = site_size(internal_len)?;
    let internal = &dna.bases()[internal_start..terminator_start];
    let (locator, coding) = internal.split_at(s);
    let d = locator_offset(locator);
    let protein = derive_protein(coding, s)?;
    let (enhancer, inhibitor) = resolve_sites(dna, promoter_start, d, s);
    let n = dna.len() as i64;
    let origin = enhancer_origin(promoter_start, d, s);
    Ok(Some(Gene {
        id,
        promoter_start,
        internal_start,
        internal_end: terminator_start,
        internal_len,
        site_size: s,
        locator: locator.iter().copied().collect(),
        locator_offset: d,
        enhancer_start: origin.rem_euclid(n) as usize,
        inhibitor_start: (origin + s as i64).rem_euclid(n) as usize,
        enhancer,
        inhibitor,
        protein,
    }))
}

/// Left-to-right, non-overlapping gene scan.
///
/// Each promoter pairs with the nearest following terminator; scanning
/// resumes after that terminator. Degenerate internal regions are skipped
/// without consuming an id.
pub fn scan_genes(dna: &DnaSequence) -> Vec<Gene> {
    let mut genes = Vec::new();
    let mut cursor = 0;
    while let Some(p) = dna.find(&PROMOTER, cursor) {
        let Some(t) = dna.find(&TERMINATOR, p + PROMOTER.len()) else {
            break;
        };
        // build_gene only fails on internal lengths it already filters out
        if let Ok(Some(gene)) = build_gene(dna, genes.len(), p, t) {
            genes.push(gene);
        }
        cursor = t + TERMINATOR.len();
    }
    genes
}

/// DNA indices covered by a gene's locator, enhancer and inhibitor.
pub fn regulatory_loci(gene: &Gene, genome_len: usize) -> Vec<usize> {
    let mut loci: Vec<usize> =
        (gene.internal_start..gene.internal_start + gene.site_size).collect();
    for start in [gene.enhancer_start, gene.inhibitor_start] {
        loci.extend((0..gene.site_size).map(|k| (start + k) % genome_len));
    }
    loci
}
