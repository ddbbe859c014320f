//! Toy languages over fixed-width blocks, with optional witness relations.
//!
//! Genuine hardness is not instantiable at desk scale; these stand-ins make
//! the surrounding constructions testable. A language is an explicit
//! membership table over `{0,1}^block_len`. Witness relations follow the
//! claim-bit convention: the first witness bit asserts the membership value
//! the witness certifies.

use crate::bits::Bits;
use crate::circuits::{CircuitBuilder, Wire};
use crate::error::{Error, Result};
use crate::expander::random_density_subset;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToyLanguage {
    block_len: usize,
    members: Vec<bool>,
    pub witness: Option<WitnessRelation>,
}

impl ToyLanguage {
    pub fn from_members(block_len: usize, members: Vec<bool>) -> Result<ToyLanguage> {
        if block_len == 0 || block_len > 20 {
            return Err(Error::OutOfRange {
                what: "block length",
                detail: format!("{block_len} not in 1..=20"),
            });
        }
        if members.len() != 1 << block_len {
            return Err(Error::LengthMismatch {
                context: "membership table",
                left: members.len(),
                right: 1 << block_len,
            });
        }
        Ok(ToyLanguage {
            block_len,
            members,
            witness: None,
        })
    }

    pub fn everything(block_len: usize) -> Result<ToyLanguage> {
        ToyLanguage::from_members(block_len, vec![true; 1 << block_len])
    }

    pub fn empty(block_len: usize) -> Result<ToyLanguage> {
        ToyLanguage::from_members(block_len, vec![false; 1 << block_len])
    }

    /// Membership = odd parity of the block.
    pub fn parity(block_len: usize) -> Result<ToyLanguage> {
        let members = (0..(1usize << block_len))
            .map(|v| v.count_ones() % 2 == 1)
            .collect();
        ToyLanguage::from_members(block_len, members)
    }

    /// Membership = at least half the bits set.
    pub fn majority(block_len: usize) -> Result<ToyLanguage> {
        let members = (0..(1usize << block_len))
            .map(|v| 2 * v.count_ones() as usize >= block_len)
            .collect();
        ToyLanguage::from_members(block_len, members)
    }

    /// Random language of exactly `floor(density * 2^block_len)` members.
    pub fn random(block_len: usize, density: Rational, seed: u64) -> Result<ToyLanguage> {
        let n = 1usize << block_len;
        let subset = random_density_subset(n, density, seed)?;
        let mut members = vec![false; n];
        for m in subset {
            members[m] = true;
        }
        ToyLanguage::from_members(block_len, members)
    }

    pub fn with_witness(mut self, relation: WitnessRelation) -> ToyLanguage {
        self.witness = Some(relation);
        self
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn member(&self, x: u32) -> bool {
        self.members[x as usize]
    }

    pub fn members(&self) -> &[bool] {
        &self.members
    }

    pub fn member_count(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    /// Exact member fraction.
    pub fn density(&self) -> Rational {
        Rational::new(self.member_count() as i64, self.members.len() as i64)
    }

    /// Membership as a circuit over an LSB-first block word: disjunction of
    /// member minterms.
    pub fn compile_membership(&self, b: &mut CircuitBuilder, block: &[Wire]) -> Wire {
        assert_eq!(block.len(), self.block_len);
        let mut minterms = Vec::new();
        for (v, &is_member) in self.members.iter().enumerate() {
            if !is_member {
                continue;
            }
            let lits: Vec<Wire> = (0..self.block_len)
                .map(|q| {
                    if (v >> q) & 1 == 1 {
                        block[q]
                    } else {
                        b.not(block[q])
                    }
                })
                .collect();
            minterms.push(b.and_all(&lits));
        }
        b.or_all(&minterms)
    }
}

/// Which guarantee a witness relation provides.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelationKind {
    /// Every block has an accepted witness certifying its true membership
    /// value (claim bit equals membership).
    Total,
    /// Acceptance implies membership; every member has a witness.
    Sound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessRelation {
    /// Total: the witness is the single claim bit, accepted iff it equals
    /// the membership value.
    ClaimBit,
    /// Sound: the witness is claim bit 1 followed by a copy of the block,
    /// accepted iff the block is a member. Rejects the all-zero witness.
    MemberMirror,
}

impl WitnessRelation {
    pub fn from_id(id: &str) -> Result<WitnessRelation> {
        match id {
            "claim-bit" => Ok(WitnessRelation::ClaimBit),
            "member-mirror" => Ok(WitnessRelation::MemberMirror),
            other => Err(Error::UnknownBackend(format!("witness relation {other}"))),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            WitnessRelation::ClaimBit => "claim-bit",
            WitnessRelation::MemberMirror => "member-mirror",
        }
    }

    pub fn kind(&self) -> RelationKind {
        match self {
            WitnessRelation::ClaimBit => RelationKind::Total,
            WitnessRelation::MemberMirror => RelationKind::Sound,
        }
    }

    pub fn witness_len(&self, block_len: usize) -> usize {
        match self {
            WitnessRelation::ClaimBit => 1,
            WitnessRelation::MemberMirror => 1 + block_len,
        }
    }

    pub fn accepts(&self, lang: &ToyLanguage, x: u32, w: &Bits) -> bool {
        if w.len() != self.witness_len(lang.block_len()) {
            return false;
        }
        match self {
            WitnessRelation::ClaimBit => w.get(0) == lang.member(x),
            WitnessRelation::MemberMirror => {
                w.get(0)
                    && lang.member(x)
                    && w.slice(1..w.len()) == Bits::from_uint_be(x as u64, lang.block_len())
            }
        }
    }

    /// Honest witness; `None` when the relation is sound and the block is
    /// not a member.
    pub fn honest(&self, lang: &ToyLanguage, x: u32) -> Option<Bits> {
        match self {
            WitnessRelation::ClaimBit => {
                let mut w = Bits::zeros(1);
                w.set(0, lang.member(x));
                Some(w)
            }
            WitnessRelation::MemberMirror => {
                if !lang.member(x) {
                    return None;
                }
                let mut w = Bits::zeros(1 + lang.block_len());
                w.set(0, true);
                let mirror = Bits::from_uint_be(x as u64, lang.block_len());
                for j in 0..lang.block_len() {
                    w.set(1 + j, mirror.get(j));
                }
                Some(w)
            }
        }
    }

    /// Acceptance as a circuit over (LSB-first block word, witness wires).
    pub fn compile(
        &self,
        lang: &ToyLanguage,
        b: &mut CircuitBuilder,
        block: &[Wire],
        witness: &[Wire],
    ) -> Wire {
        assert_eq!(witness.len(), self.witness_len(lang.block_len()));
        let membership = lang.compile_membership(b, block);
        match self {
            WitnessRelation::ClaimBit => b.xnor(witness[0], membership),
            WitnessRelation::MemberMirror => {
                let bl = lang.block_len();
                // witness[1..] is the block written big-endian
                let mut parts = vec![witness[0], membership];
                for j in 0..bl {
                    let eq = b.xnor(witness[1 + j], block[bl - 1 - j]);
                    parts.push(eq);
                }
                b.and_all(&parts)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    #[test]
    fn densities_are_exact() {
        let p = ToyLanguage::parity(4).unwrap();
        assert_eq!(p.density(), ratio(1, 2));
        let r = ToyLanguage::random(6, ratio(1, 2), 7).unwrap();
        assert_eq!(r.member_count(), 32);
        assert_eq!(ToyLanguage::everything(3).unwrap().density(), ratio(1, 1));
        assert_eq!(ToyLanguage::empty(3).unwrap().density(), ratio(0, 1));
    }

    #[test]
    fn claim_bit_relation_is_total() {
        let lang = ToyLanguage::parity(3).unwrap();
        let rel = WitnessRelation::ClaimBit;
        for x in 0..8u32 {
            let w = rel.honest(&lang, x).unwrap();
            assert!(rel.accepts(&lang, x, &w));
            assert_eq!(w.get(0), lang.member(x));
            assert!(!rel.accepts(&lang, x, &w.flipped(0)));
        }
    }

    #[test]
    fn member_mirror_relation_is_sound() {
        let lang = ToyLanguage::majority(3).unwrap();
        let rel = WitnessRelation::MemberMirror;
        for x in 0..8u32 {
            match rel.honest(&lang, x) {
                Some(w) => {
                    assert!(lang.member(x));
                    assert!(rel.accepts(&lang, x, &w));
                }
                None => assert!(!lang.member(x)),
            }
            // all-zero witness always rejected
            assert!(!rel.accepts(&lang, x, &Bits::zeros(4)));
            // soundness: acceptance implies membership, over all witnesses
            for wv in 0..16u64 {
                let w = Bits::from_uint_be(wv, 4);
                if rel.accepts(&lang, x, &w) {
                    assert!(lang.member(x));
                }
            }
        }
    }

    #[test]
    fn compiled_relations_match_runtime() {
        for lang in [
            ToyLanguage::parity(3).unwrap(),
            ToyLanguage::majority(3).unwrap(),
            ToyLanguage::random(3, ratio(1, 4), 9).unwrap(),
        ] {
            for rel in [WitnessRelation::ClaimBit, WitnessRelation::MemberMirror] {
                let bl = lang.block_len();
                let t = rel.witness_len(bl);
                // challenge = block value bits (LSB-first on wires), witness = w
                let mut b = CircuitBuilder::new(bl, t);
                let block: Vec<Wire> = (0..bl).map(|q| b.challenge(q)).collect();
                let wits: Vec<Wire> = (0..t).map(|j| b.witness(j)).collect();
                let out = rel.compile(&lang, &mut b, &block, &wits);
                let c = b.finish(out).unwrap();
                for x in 0..(1u32 << bl) {
                    // challenge wire q carries value bit q
                    let rbits: Bits = (0..bl).map(|q| (x >> q) & 1 == 1).collect();
                    for wv in 0..(1u64 << t) {
                        let w = Bits::from_uint_be(wv, t);
                        assert_eq!(
                            c.eval(&rbits, &w).unwrap(),
                            rel.accepts(&lang, x, &w),
                            "{} x={x} w={w}",
                            rel.id()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn registry_ids() {
        assert_eq!(
            WitnessRelation::from_id("claim-bit").unwrap().kind(),
            RelationKind::Total
        );
        assert_eq!(
            WitnessRelation::from_id("member-mirror").unwrap().kind(),
            RelationKind::Sound
        );
        assert!(WitnessRelation::from_id("bogus").is_err());
    }
}
