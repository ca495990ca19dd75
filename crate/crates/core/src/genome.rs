//! Binary genomes and the gene/protein encoding read from them.
//!
//! A gene is located by a 32-bit promoter window whose last byte is
//! `00000000` (TF gene) or `11111111` (P gene). The two 32-bit words
//! upstream of the promoter are the enhancer and inhibitor sites, and the
//! 160 bits downstream are the gene body, folded into a 32-bit protein by a
//! per-bit majority vote over its five words.

use std::fmt;

use rand::Rng;

use crate::error::{invalid, GrnError, Result};

/// Width of every protein and regulatory-site signature.
pub const WORD_BITS: usize = 32;
/// Length of a gene body (five words).
pub const GENE_BODY_BITS: usize = 5 * WORD_BITS;
/// Bits needed upstream of a promoter for the enhancer and inhibitor sites.
pub const UPSTREAM_BITS: usize = 2 * WORD_BITS;
/// Smallest genome accepted by [`BitGenome::random`].
pub const MIN_RANDOM_LENGTH: usize = 256;
/// Random genomes default to the size of a 7-event DM genome.
pub const DEFAULT_RANDOM_LENGTH: usize = 4096;

const PROMOTER_SUFFIX_BITS: usize = 8;
const MAX_DUPLICATIONS: u32 = 24;

/// A 32-bit signature. The first bit read from the genome is the most
/// significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word32(pub u32);

impl Word32 {
    /// Number of complementary bits between two signatures.
    pub fn match_degree(self, other: Word32) -> u32 {
        (self.0 ^ other.0).count_ones()
    }

    pub fn complement(self) -> Word32 {
        Word32(!self.0)
    }
}

impl fmt::Display for Word32 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:032b}", self.0)
    }
}

/// Popcount of `a XOR b`.
pub fn match_degree(a: Word32, b: Word32) -> u32 {
    a.match_degree(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneKind {
    /// Produces a transcription factor that regulates every gene.
    Tf,
    /// Produces a product protein that is regulated but regulates nothing.
    P,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gene {
    pub kind: GeneKind,
    /// Bit index of the promoter window.
    pub promoter_start: usize,
    pub enhancer_sig: Word32,
    pub inhibitor_sig: Word32,
    pub protein_sig: Word32,
}

/// Variable-length binary string.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitGenome {
    bits: Vec<bool>,
}

impl BitGenome {
    pub fn from_bits(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(invalid("genome must contain at least one bit"));
        }
        Ok(BitGenome { bits })
    }

    /// Builds a genome from whole words, most significant bit first.
    pub fn from_words(words: &[Word32]) -> Result<Self> {
        let bits = words
            .iter()
            .flat_map(|w| (0..WORD_BITS).map(move |k| (w.0 >> (31 - k)) & 1 == 1))
            .collect();
        Self::from_bits(bits)
    }

    /// Uniform random genome of `length_bits` bits.
    pub fn random<R: Rng + ?Sized>(length_bits: usize, rng: &mut R) -> Result<Self> {
        if length_bits < MIN_RANDOM_LENGTH {
            return Err(invalid(format!(
                "random genome length {length_bits} is below the minimum of {MIN_RANDOM_LENGTH}"
            )));
        }
        let bits = (0..length_bits).map(|_| rng.gen::<bool>()).collect();
        Ok(BitGenome { bits })
    }

    /// Duplication-and-mutation genome: a random 32-bit seed word doubled
    /// `duplication_events` times, each appended copy mutated at `mutation_rate`.
    pub fn duplication_mutation<R: Rng + ?Sized>(
        duplication_events: u32,
        mutation_rate: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if duplication_events == 0 || duplication_events > MAX_DUPLICATIONS {
            return Err(invalid(format!(
                "duplication events must be in 1..={MAX_DUPLICATIONS}, got {duplication_events}"
            )));
        }
        check_rate(mutation_rate)?;
        let mut bits: Vec<bool> = (0..WORD_BITS).map(|_| rng.gen::<bool>()).collect();
        for _ in 0..duplication_events {
            let n = bits.len();
            bits.reserve(n);
            for i in 0..n {
                let b = bits[i];
                bits.push(b ^ rng.gen_bool(mutation_rate));
            }
        }
        Ok(BitGenome { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// The 32-bit word starting at bit `pos`.
    ///
    /// # Panics
    /// If `pos + 32` exceeds the genome length.
    pub fn word_at(&self, pos: usize) -> Word32 {
        Word32(
            self.bits[pos..pos + WORD_BITS]
                .iter()
                .fold(0u32, |acc, &b| (acc << 1) | b as u32),
        )
    }

    /// Flips each bit independently with probability `rate`. Returns the
    /// mutant and the number of flipped bits.
    pub fn mutate<R: Rng + ?Sized>(&self, rate: f64, rng: &mut R) -> Result<(BitGenome, usize)> {
        check_rate(rate)?;
        let mut flips = 0;
        let bits = self
            .bits
            .iter()
            .map(|&b| {
                let flip = rng.gen_bool(rate);
                flips += flip as usize;
                b ^ flip
            })
            .collect();
        Ok((BitGenome { bits }, flips))
    }

    /// Gene kind of the promoter window at `pos`, if its last byte is uniform.
    fn promoter_kind(&self, pos: usize) -> Option<GeneKind> {
        let suffix = &self.bits[pos + WORD_BITS - PROMOTER_SUFFIX_BITS..pos + WORD_BITS];
        if suffix.iter().all(|&b| !b) {
            Some(GeneKind::Tf)
        } else if suffix.iter().all(|&b| b) {
            Some(GeneKind::P)
        } else {
            None
        }
    }

    /// Scans left to right at single-bit granularity. Gene bodies never
    /// overlap; upstream sites may overlap the previous gene's body.
    pub fn scan_genes(&self) -> Vec<Gene> {
        let mut genes = Vec::new();
        let span = WORD_BITS + GENE_BODY_BITS;
        if self.len() < UPSTREAM_BITS + span {
            return genes;
        }
        let last_start = self.len() - span;
        let mut pos = UPSTREAM_BITS;
        while pos <= last_start {
            match self.promoter_kind(pos) {
                Some(kind) => {
                    let body_start = pos + WORD_BITS;
                    let protein_sig = synthesize_protein(&self.bits[body_start..body_start + GENE_BODY_BITS])
                        .expect("gene body slice has the exact length");
                    genes.push(Gene {
                        kind,
                        promoter_start: pos,
                        enhancer_sig: self.word_at(pos - UPSTREAM_BITS),
                        inhibitor_sig: self.word_at(pos - WORD_BITS),
                        protein_sig,
                    });
                    pos += span;
                }
                None => pos += 1,
            }
        }
        genes
    }

    /// Text form: `grn-genome v1 <length_bits>` then lowercase hex, MSB first.
    pub fn to_text(&self) -> String {
        let mut hex = String::with_capacity(self.len() / 4 + 1);
        for chunk in self.bits.chunks(4) {
            let nibble = (0..4).fold(0u32, |acc, k| {
                (acc << 1) | chunk.get(k).copied().unwrap_or(false) as u32
            });
            hex.push(char::from_digit(nibble, 16).expect("nibble < 16"));
        }
        format!("grn-genome v1 {}\n{}\n", self.len(), hex)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| GrnError::Parse("empty input".into()))?;
        let length: usize = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["grn-genome", "v1", n] => n
                .parse()
                .map_err(|_| GrnError::Parse(format!("bad length field {n:?}")))?,
            _ => return Err(GrnError::Parse(format!("bad header {header:?}"))),
        };
        if length == 0 {
            return Err(GrnError::Parse("length must be positive".into()));
        }
        let hex = lines.next().unwrap_or("").trim();
        if hex.len() != length.div_ceil(4) {
            return Err(GrnError::Parse(format!(
                "expected {} hex digits for {} bits, found {}",
                length.div_ceil(4),
                length,
                hex.len()
            )));
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(GrnError::Parse("trailing content after genome".into()));
        }
        let mut bits = Vec::with_capacity(length);
        for c in hex.chars() {
            if c.is_ascii_uppercase() {
                return Err(GrnError::Parse(format!("uppercase hex digit {c:?}")));
            }
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| GrnError::Parse(format!("invalid hex digit {c:?}")))?;
            bits.extend((0..4).rev().map(|k| (nibble >> k) & 1 == 1));
        }
        bits.truncate(length);
        Ok(BitGenome { bits })
    }
}

fn check_rate(rate: f64) -> Result<()> {
    if (0.0..=1.0).contains(&rate) {
        Ok(())
    } else {
        Err(invalid(format!("mutation rate must be in [0, 1], got {rate}")))
    }
}

/// Folds a 160-bit gene body into a protein: bit `k` is the majority of
/// bits `k, k+32, k+64, k+96, k+128`.
pub fn synthesize_protein(body: &[bool]) -> Result<Word32> {
    if body.len() != GENE_BODY_BITS {
        return Err(invalid(format!(
            "gene body must be {GENE_BODY_BITS} bits, got {}",
            body.len()
        )));
    }
    let mut word = 0u32;
    for k in 0..WORD_BITS {
        let votes = (0..5).filter(|&w| body[w * WORD_BITS + k]).count();
        word = (word << 1) | (votes >= 3) as u32;
    }
    Ok(Word32(word))
}
