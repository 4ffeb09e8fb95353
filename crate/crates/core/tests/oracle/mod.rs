//! Reference gene scanner working on plain strings, written without any of
//! the library's scanning or derivation code.

#![allow(dead_code)]

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefGene {
    pub promoter_start: usize,
    pub terminator_start: usize,
    pub internal_len: usize,
    pub site_size: usize,
    pub locator: String,
    pub offset: i64,
    pub enhancer: String,
    pub inhibitor: String,
    pub protein: String,
}

fn matches_at(dna: &[u8], at: usize, pattern: &[u8]) -> bool {
    at + pattern.len() <= dna.len() && (0..pattern.len()).all(|k| dna[at + k] == pattern[k])
}

fn isqrt_by_search(l: usize) -> usize {
    let mut s = 0;
    while (s + 1) * (s + 1) <= l {
        s += 1;
    }
    s
}

fn weight(c: char) -> i64 {
    match c {
        'T' => -1,
        'G' => -2,
        'C' => 1,
        'A' => 2,
        _ => unreachable!(),
    }
}

fn circular(dna: &str, start: i64, len: usize) -> String {
    let n = dna.len() as i64;
    let chars: Vec<char> = dna.chars().collect();
    (0..len as i64)
        .map(|k| chars[(((start + k) % n) + n) as usize % n as usize])
        .collect()
}

fn majority(chunk: &str) -> char {
    let mut best = chunk.chars().next().unwrap();
    let mut best_count = 0;
    for c in chunk.chars() {
        let count = chunk.matches(c).count();
        // strictly greater keeps the earliest base on ties
        if count > best_count {
            best = c;
            best_count = count;
        }
    }
    best
}

pub fn scan(dna: &str) -> Vec<RefGene> {
    let b = dna.as_bytes();
    let mut genes = Vec::new();
    let mut i = 0;
    while let Some(p) = (i..b.len()).find(|&j| matches_at(b, j, b"AGCT")) {
        let Some(t) = (p + 4..b.len()).find(|&j| matches_at(b, j, b"TCGA")) else {
            break;
        };
        i = t + 4;
        let l = t - (p + 4);
        if l < 2 {
            continue;
        }
        let s = isqrt_by_search(l);
        let internal = &dna[p + 4..t];
        let locator = internal[..s].to_string();
        let offset: i64 = locator.chars().map(weight).sum();
        let coding = &internal[s..];
        let width = coding.len().div_ceil(s);
        let protein: String = (0..s)
            .map(|k| {
                let lo = k * width;
                let hi = ((k + 1) * width).min(coding.len());
                majority(&coding[lo..hi])
            })
            .collect();
        let origin = if offset >= 0 {
            (p + 4) as i64 + offset
        } else {
            p as i64 + offset - s as i64
        };
        genes.push(RefGene {
            promoter_start: p,
            terminator_start: t,
            internal_len: l,
            site_size: s,
            enhancer: circular(dna, origin, s),
            inhibitor: circular(dna, origin + s as i64, s),
            locator,
            offset,
            protein,
        });
    }
    genes
}
