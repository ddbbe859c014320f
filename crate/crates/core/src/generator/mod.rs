//! Seed-efficient block generator: block `i` is the `i`-th vertex of an
//! expander walk XORed with an independent offset family, plus the search
//! predicates built on top of it (all-blocks-verified and
//! threshold-verified), membership counting, concentration experiments, and
//! the subset-augmented guessing procedure.

mod toylang;

pub use toylang::{RelationKind, ToyLanguage, WitnessRelation};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bits::Bits;
use crate::circuits::{Circuit, CircuitBuilder, Wire};
use crate::error::{Error, Result};
use crate::expander::{derive_seed, margulis, walk_from_bits, MargulisGraph, Walk};
use crate::hamming::{sphere_volume, BallSampler};
use crate::Rational;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// Minimal-weight irreducible polynomials over GF(2), degrees 1..=12, with
/// the leading term included (index = degree).
const GF2_IRREDUCIBLE: [u32; 13] = [
    0, 0x3, 0x7, 0xb, 0x13, 0x25, 0x43, 0x83, 0x11d, 0x211, 0x409, 0x805, 0x1053,
];

/// Carryless multiply in GF(2^width).
pub fn gf2_mul(a: u32, b: u32, width: usize) -> u32 {
    assert!((1..=12).contains(&width));
    let poly = GF2_IRREDUCIBLE[width];
    let top = 1u32 << width;
    let mask = top - 1;
    let mut acc = 0u32;
    let mut a = a & mask;
    let mut b = b & mask;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        a <<= 1;
        if a & top != 0 {
            a ^= poly;
        }
        b >>= 1;
    }
    acc & mask
}

/// The offset family XORed onto walk vertices. All three families are
/// GF(2)-affine in the offset seed, so they compile to plain wire XORs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KPrimeFamily {
    /// No offset: blocks are exactly the walk vertices.
    Zero,
    /// Block `i` is offset by the seed rotated left by `i` positions.
    Rotate,
    /// Pairwise-independent affine offsets `a * elem(i) + b` over
    /// GF(2^block_len); the seed is `(a, b)`.
    Affine,
}

impl KPrimeFamily {
    pub fn from_id(id: &str) -> Result<KPrimeFamily> {
        match id {
            "zero" => Ok(KPrimeFamily::Zero),
            "rotate" => Ok(KPrimeFamily::Rotate),
            "affine" => Ok(KPrimeFamily::Affine),
            other => Err(Error::UnknownBackend(format!("offset family {other}"))),
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            KPrimeFamily::Zero => "zero",
            KPrimeFamily::Rotate => "rotate",
            KPrimeFamily::Affine => "affine",
        }
    }

    pub fn all() -> [KPrimeFamily; 3] {
        [KPrimeFamily::Zero, KPrimeFamily::Rotate, KPrimeFamily::Affine]
    }

    pub fn seed_len(self, block_len: usize) -> usize {
        match self {
            KPrimeFamily::Zero => 0,
            KPrimeFamily::Rotate => block_len,
            KPrimeFamily::Affine => 2 * block_len,
        }
    }

    /// Row masks of the affine map for block `i`: output value-bit `q` is
    /// the parity of (offset-seed value) & row_masks[q].
    fn row_masks(self, i: usize, block_len: usize) -> Vec<u64> {
        match self {
            KPrimeFamily::Zero => vec![0; block_len],
            KPrimeFamily::Rotate => {
                let s = i % block_len;
                (0..block_len)
                    .map(|q| 1u64 << ((q + block_len - s) % block_len))
                    .collect()
            }
            KPrimeFamily::Affine => {
                // the packed seed value is a * 2^block_len + b
                let elem = (i as u32) & ((1u32 << block_len) - 1);
                (0..block_len)
                    .map(|q| {
                        // contribution of each bit of `a`, plus bit q of `b`
                        let mut mask = 0u64;
                        for p in 0..block_len {
                            if (gf2_mul(elem, 1 << p, block_len) >> q) & 1 == 1 {
                                mask |= 1u64 << (block_len + p);
                            }
                        }
                        mask | (1u64 << q)
                    })
                    .collect()
            }
        }
    }

    /// Offset of block `i` for a given offset-seed value.
    pub fn offset(self, i: usize, block_len: usize, seed_value: u64) -> u32 {
        self.row_masks(i, block_len)
            .iter()
            .enumerate()
            .fold(0u32, |acc, (q, &mask)| {
                acc | ((((seed_value & mask).count_ones() % 2) as u32) << q)
            })
    }
}

/// Block generator: walk on a Margulis graph over `{0,1}^block_len` XOR an
/// offset family. The seed splits into the walk part (start vertex plus one
/// port per step) and the offset part.
#[derive(Clone, Debug)]
pub struct BlockGenerator {
    block_len: usize,
    blocks: usize,
    graph: MargulisGraph,
    family: KPrimeFamily,
}

impl BlockGenerator {
    pub fn new(block_len: usize, blocks: usize, family: KPrimeFamily) -> Result<BlockGenerator> {
        if block_len == 0 || block_len % 2 != 0 || block_len > 16 {
            return Err(Error::OutOfRange {
                what: "generator block length",
                detail: format!("{block_len} must be even and in 2..=16"),
            });
        }
        if blocks == 0 {
            return Err(Error::OutOfRange {
                what: "generator block count",
                detail: "must be at least 1".into(),
            });
        }
        if family == KPrimeFamily::Affine && block_len > 12 {
            return Err(Error::OutOfRange {
                what: "affine offset width",
                detail: format!("{block_len} exceeds the supported 12"),
            });
        }
        let graph = margulis(1usize << (block_len / 2))?;
        Ok(BlockGenerator {
            block_len,
            blocks,
            graph,
            family,
        })
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn family(&self) -> KPrimeFamily {
        self.family
    }

    pub fn graph(&self) -> &MargulisGraph {
        &self.graph
    }

    pub fn walk_seed_len(&self) -> usize {
        Walk::seed_bits(&self.graph, self.blocks)
    }

    pub fn offset_seed_len(&self) -> usize {
        self.family.seed_len(self.block_len)
    }

    pub fn seed_len(&self) -> usize {
        self.walk_seed_len() + self.offset_seed_len()
    }

    /// The generator map: one block value per index.
    pub fn generate(&self, seed: &Bits) -> Result<Vec<u32>> {
        if seed.len() != self.seed_len() {
            return Err(Error::LengthMismatch {
                context: "generator seed",
                left: seed.len(),
                right: self.seed_len(),
            });
        }
        let walk_bits = seed.slice(0..self.walk_seed_len());
        let offset_value = seed.slice(self.walk_seed_len()..seed.len()).to_uint_be();
        let vertices = walk_from_bits(&self.graph, self.blocks, &walk_bits)?;
        Ok(vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| v ^ self.family.offset(i, self.block_len, offset_value))
            .collect())
    }

    /// Membership word: bit `i` is the language membership of block `i`.
    pub fn member_word(&self, lang: &ToyLanguage, seed: &Bits) -> Result<Bits> {
        self.check_lang(lang)?;
        Ok(self.generate(seed)?.iter().map(|&v| lang.member(v)).collect())
    }

    /// Number of blocks in the language.
    pub fn member_count(&self, lang: &ToyLanguage, seed: &Bits) -> Result<usize> {
        Ok(self.member_word(lang, seed)?.weight())
    }

    /// Number of blocks whose supplied witnesses the relation accepts.
    pub fn verified_count(
        &self,
        lang: &ToyLanguage,
        seed: &Bits,
        witnesses: &[Bits],
    ) -> Result<usize> {
        let rel = self.require_relation(lang, None)?;
        if witnesses.len() != self.blocks {
            return Err(Error::LengthMismatch {
                context: "witness tuple",
                left: witnesses.len(),
                right: self.blocks,
            });
        }
        let blocks = self.generate(seed)?;
        Ok(blocks
            .iter()
            .zip(witnesses)
            .filter(|(&v, w)| rel.accepts(lang, v, w))
            .count())
    }

    fn check_lang(&self, lang: &ToyLanguage) -> Result<()> {
        if lang.block_len() != self.block_len {
            return Err(Error::LengthMismatch {
                context: "language block length",
                left: lang.block_len(),
                right: self.block_len,
            });
        }
        Ok(())
    }

    fn require_relation<'l>(
        &self,
        lang: &'l ToyLanguage,
        kind: Option<RelationKind>,
    ) -> Result<&'l WitnessRelation> {
        self.check_lang(lang)?;
        let rel = lang
            .witness
            .as_ref()
            .ok_or_else(|| Error::Precondition("language carries no witness relation".into()))?;
        if let Some(k) = kind {
            if rel.kind() != k {
                return Err(Error::Precondition(format!(
                    "witness relation {} has kind {:?}, need {k:?}",
                    rel.id(),
                    rel.kind()
                )));
            }
        }
        Ok(rel)
    }

    /// Compile the generator into wires: one LSB-first block word per index,
    /// reading the seed from the challenge block of `b`.
    fn compile_blocks(&self, b: &mut CircuitBuilder) -> Result<Vec<Vec<Wire>>> {
        let half = self.block_len / 2;
        let walk_bits = self.walk_seed_len();
        // vertex value v = (x << half) | y, seed bits big-endian
        let mut x: Vec<Wire> = (0..half).map(|q| b.challenge(half - 1 - q)).collect();
        let mut y: Vec<Wire> = (0..half).map(|q| b.challenge(2 * half - 1 - q)).collect();
        let rb_wire = |p: usize| -> Wire {
            Wire::Challenge((walk_bits + self.offset_seed_len() - 1 - p) as u32)
        };
        let mut words = Vec::with_capacity(self.blocks);
        for i in 0..self.blocks {
            if i > 0 {
                let from = 2 * half + 3 * (i - 1);
                let port = [
                    b.challenge(from + 2),
                    b.challenge(from + 1),
                    b.challenge(from),
                ];
                let (nx, ny) = self.graph.compile_step(b, &x, &y, port)?;
                x = nx;
                y = ny;
            }
            let masks = self.family.row_masks(i, self.block_len);
            let mut word: Vec<Wire> = Vec::with_capacity(self.block_len);
            for q in 0..self.block_len {
                let vertex_bit = if q < half { y[q] } else { x[q - half] };
                let terms: Vec<Wire> = (0..self.offset_seed_len())
                    .filter(|&p| (masks[q] >> p) & 1 == 1)
                    .map(rb_wire)
                    .collect();
                word.push(if terms.is_empty() {
                    vertex_bit
                } else {
                    let offset_bit = b.xor_all(&terms);
                    b.xor(vertex_bit, offset_bit)
                });
            }
            words.push(word);
        }
        Ok(words)
    }

    /// Circuit accepting iff every block's witness is accepted by the
    /// language's total relation. Challenge = generator seed, witness = the
    /// concatenated per-block witnesses.
    pub fn build_conjunctive_verifier(&self, lang: &ToyLanguage) -> Result<Circuit> {
        let rel = self
            .require_relation(lang, Some(RelationKind::Total))?
            .clone();
        let t = rel.witness_len(self.block_len);
        let mut b = CircuitBuilder::new(self.seed_len(), self.blocks * t);
        let words = self.compile_blocks(&mut b)?;
        let accepts: Vec<Wire> = words
            .iter()
            .enumerate()
            .map(|(i, word)| {
                let wits: Vec<Wire> = (0..t).map(|j| b.witness(i * t + j)).collect();
                rel.compile(lang, &mut b, word, &wits)
            })
            .collect();
        let out = b.and_all(&accepts);
        b.finish(out)
    }

    /// Circuit accepting iff at least a `threshold` fraction of blocks carry
    /// accepted witnesses under the language's sound relation.
    pub fn build_threshold_verifier(
        &self,
        lang: &ToyLanguage,
        threshold: Rational,
    ) -> Result<Circuit> {
        if threshold <= Rational::zero() || threshold >= Rational::from_integer(1) {
            return Err(Error::OutOfRange {
                what: "threshold",
                detail: format!("{threshold} not in (0,1)"),
            });
        }
        let rel = self
            .require_relation(lang, Some(RelationKind::Sound))?
            .clone();
        let t = rel.witness_len(self.block_len);
        let needed = (threshold * Rational::from_integer(self.blocks as i64))
            .ceil()
            .to_integer() as u64;
        let mut b = CircuitBuilder::new(self.seed_len(), self.blocks * t);
        let words = self.compile_blocks(&mut b)?;
        let accepts: Vec<Wire> = words
            .iter()
            .enumerate()
            .map(|(i, word)| {
                let wits: Vec<Wire> = (0..t).map(|j| b.witness(i * t + j)).collect();
                rel.compile(lang, &mut b, word, &wits)
            })
            .collect();
        let count = b.popcount(&accepts);
        let out = b.geq_const(&count, needed);
        b.finish(out)
    }

    /// Honest witness tuple for a seed: per-block honest witnesses, with
    /// all-zero filler where the (sound) relation has none.
    pub fn honest_witnesses(&self, lang: &ToyLanguage, seed: &Bits) -> Result<Vec<Bits>> {
        let rel = self.require_relation(lang, None)?;
        let t = rel.witness_len(self.block_len);
        Ok(self
            .generate(seed)?
            .iter()
            .map(|&v| rel.honest(lang, v).unwrap_or_else(|| Bits::zeros(t)))
            .collect())
    }

    /// Concatenate a witness tuple into the verifiers' witness block.
    pub fn pack_witnesses(&self, witnesses: &[Bits]) -> Bits {
        let mut out = Vec::new();
        for w in witnesses {
            out.extend(w.iter());
        }
        Bits::new(out)
    }
}

/// Claim bits of a witness tuple: the first bit of each per-block witness.
pub fn claim_bits(witnesses: &[Bits]) -> Result<Bits> {
    if witnesses.iter().any(|w| w.is_empty()) {
        return Err(Error::OutOfRange {
            what: "witness tuple",
            detail: "every witness needs a claim bit".into(),
        });
    }
    Ok(witnesses.iter().map(|w| w.get(0)).collect())
}

#[derive(Clone, Debug)]
pub struct ConcentrationConfig {
    pub delta: Rational,
    pub trials: usize,
    pub seed: u64,
    /// Offset-seed values sampled for the conditional check.
    pub rb_samples: usize,
    pub trials_per_rb: usize,
}

#[derive(Clone, Debug)]
pub struct ConditionalRecord {
    pub rb: Bits,
    pub trials: usize,
    pub frequency: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug)]
pub struct ConcentrationReport {
    pub trials: usize,
    /// Frequency of |member_count - density * blocks| >= delta * blocks.
    pub frequency: f64,
    pub std_error: f64,
    pub conditional: Vec<ConditionalRecord>,
}

const TRIAL_SHARD: usize = 4096;

/// Deviation frequency of the membership count from its mean over uniform
/// seeds, plus the same measurement conditioned on sampled offset seeds
/// (uniform walk seed only). Counting is exact rational; only frequencies
/// are floating point.
pub fn concentration_experiment(
    gen: &BlockGenerator,
    lang: &ToyLanguage,
    config: &ConcentrationConfig,
) -> Result<ConcentrationReport> {
    gen.check_lang(lang)?;
    if config.trials == 0 {
        return Err(Error::OutOfRange {
            what: "trials",
            detail: "must be at least 1".into(),
        });
    }
    let k = gen.blocks();
    let expected = lang.density() * Rational::from_integer(k as i64);
    let margin = config.delta * Rational::from_integer(k as i64);
    let deviates = move |count: usize| -> bool {
        let diff = Rational::from_integer(count as i64) - expected;
        let abs = if diff < Rational::zero() { -diff } else { diff };
        abs >= margin
    };

    let total_len = gen.seed_len();
    let shards: Vec<(usize, usize)> = (0..config.trials)
        .step_by(TRIAL_SHARD)
        .map(|start| (start / TRIAL_SHARD, (config.trials - start).min(TRIAL_SHARD)))
        .collect();
    let hits: usize = shards
        .par_iter()
        .map(|&(idx, count)| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, idx as u64));
            let mut local = 0usize;
            for _ in 0..count {
                let seed: Bits = (0..total_len).map(|_| rng.gen()).collect();
                let c = gen.member_count(lang, &seed).expect("shapes fixed");
                if deviates(c) {
                    local += 1;
                }
            }
            local
        })
        .sum();
    let frequency = hits as f64 / config.trials as f64;
    let std_error = (frequency * (1.0 - frequency) / config.trials as f64).sqrt();

    // conditional form: fix the offset seed, vary only the walk seed
    let rb_len = gen.offset_seed_len();
    let rb_count = if rb_len == 0 { 1 } else { config.rb_samples.max(1) };
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, u64::MAX));
    let mut conditional = Vec::with_capacity(rb_count);
    for _ in 0..rb_count {
        let rb: Bits = (0..rb_len).map(|_| rng.gen()).collect();
        let mut hits = 0usize;
        for _ in 0..config.trials_per_rb {
            let walk: Bits = (0..gen.walk_seed_len()).map(|_| rng.gen()).collect();
            let seed = walk.concat(&rb);
            if deviates(gen.member_count(lang, &seed)?) {
                hits += 1;
            }
        }
        let f = hits as f64 / config.trials_per_rb.max(1) as f64;
        conditional.push(ConditionalRecord {
            rb,
            trials: config.trials_per_rb,
            frequency: f,
            std_error: (f * (1.0 - f) / config.trials_per_rb.max(1) as f64).sqrt(),
        });
    }
    Ok(ConcentrationReport {
        trials: config.trials,
        frequency,
        std_error,
        conditional,
    })
}

/// Uniform guesser over index subsets of size strictly below `alpha * k`,
/// union-ed onto an accepted index set.
pub struct SubsetGuesser {
    k: usize,
    sampler: BallSampler,
    admissible: BigUint,
}

impl SubsetGuesser {
    pub fn new(k: usize, alpha: Rational, seed: u64) -> Result<SubsetGuesser> {
        if alpha <= Rational::zero() {
            return Err(Error::OutOfRange {
                what: "alpha",
                detail: format!("{alpha} must be positive"),
            });
        }
        let alpha_k = alpha * Rational::from_integer(k as i64);
        let max_size = if alpha_k.is_integer() {
            (alpha_k.to_integer() - 1).max(0) as usize
        } else {
            alpha_k.floor().to_integer().max(0) as usize
        };
        let max_size = max_size.min(k);
        let sampler = BallSampler::new(k, max_size, seed)?;
        let admissible = sphere_volume(k, max_size)?;
        Ok(SubsetGuesser {
            k,
            sampler,
            admissible,
        })
    }

    /// Largest admissible subset size (strictly below alpha * k).
    pub fn max_size(&self) -> usize {
        self.sampler.radius()
    }

    /// Number of admissible subsets.
    pub fn admissible(&self) -> &BigUint {
        &self.admissible
    }

    /// Characteristic vector of `accepted` union a uniform admissible subset.
    pub fn guess(&mut self, accepted: &Bits) -> Result<Bits> {
        if accepted.len() != self.k {
            return Err(Error::LengthMismatch {
                context: "accepted index set",
                left: accepted.len(),
                right: self.k,
            });
        }
        let j = self.sampler.sample();
        Ok(accepted.iter().zip(j.iter()).map(|(a, b)| a | b).collect())
    }

    /// Exact success probability of hitting `target` from `accepted`, by
    /// enumerating admissible subsets. Zero whenever `target` does not
    /// contain `accepted`.
    pub fn exact_success(&self, accepted: &Bits, target: &Bits) -> Result<Rational> {
        if accepted.len() != self.k || target.len() != self.k {
            return Err(Error::LengthMismatch {
                context: "index sets",
                left: accepted.len().max(target.len()),
                right: self.k,
            });
        }
        let mut hits = 0u64;
        for v in 0..(1u64 << self.k) {
            let j = Bits::from_uint_be(v, self.k);
            if j.weight() > self.max_size() {
                continue;
            }
            let union: Bits = accepted.iter().zip(j.iter()).map(|(a, b)| a | b).collect();
            if union == *target {
                hits += 1;
            }
        }
        let total = self.admissible.to_i64().ok_or_else(|| Error::OutOfRange {
            what: "admissible count",
            detail: "too large for exact ratio".into(),
        })?;
        Ok(Rational::new(hits as i64, total))
    }
}
