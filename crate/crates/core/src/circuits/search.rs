//! Brute-force witness search and exhaustive satisfiability profiles.

use rayon::prelude::*;

use super::{Circuit, Limits};
use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::hamming::{self, SetDistance};
use crate::Rational;

/// Lexicographically first witness `w` with `c(r, w) = 1`, or `None`.
pub fn find_witness(c: &Circuit, r: &Bits, limits: &Limits) -> Result<Option<Bits>> {
    let n = c.witness_len();
    if n > limits.max_witness_bits {
        return Err(Error::LimitExceeded {
            what: "witness search bits",
            needed: n as u64,
            limit: limits.max_witness_bits as u64,
        });
    }
    for m in 0..(1u64 << n) {
        let w = Bits::from_uint_be(m, n);
        if c.eval(r, &w)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Exhaustive record of which challenges admit a witness, with one verified
/// witness per satisfiable challenge.
#[derive(Clone, Debug)]
pub struct SatProfile {
    challenge_len: usize,
    /// Indexed by challenge value (big-endian); `Some(w)` is the
    /// lexicographically first witness.
    entries: Vec<Option<Bits>>,
}

impl SatProfile {
    pub fn challenge_len(&self) -> usize {
        self.challenge_len
    }

    pub fn witness_for(&self, r: &Bits) -> Option<&Bits> {
        self.entries[r.to_uint_be() as usize].as_ref()
    }

    pub fn is_satisfiable(&self, r: &Bits) -> bool {
        self.entries[r.to_uint_be() as usize].is_some()
    }

    /// All satisfiable challenge strings, in lexicographic order.
    pub fn satisfiable_set(&self) -> Vec<Bits> {
        self.entries
            .iter()
            .enumerate()
            .filter_map(|(i, e)| {
                e.as_ref()
                    .map(|_| Bits::from_uint_be(i as u64, self.challenge_len))
            })
            .collect()
    }

    pub fn satisfiable_count(&self) -> usize {
        self.entries.iter().filter(|e| e.is_some()).count()
    }

    /// Fraction of challenges admitting a witness.
    pub fn satisfiable_fraction(&self) -> Rational {
        Rational::new(self.satisfiable_count() as i64, self.entries.len() as i64)
    }

    /// Distance from `r` to the satisfiable set.
    pub fn distance_to_satisfiable(&self, r: &Bits) -> Result<SetDistance> {
        let set = self.satisfiable_set();
        hamming::distance_to_set(r, &set)
    }
}

/// Exhaustive satisfiability profile over all `2^l` challenges, each checked
/// by brute-force witness search. Shards the challenge space across workers;
/// the merge is by index, so the result is deterministic.
pub fn sat_profile(c: &Circuit, limits: &Limits) -> Result<SatProfile> {
    let l = c.challenge_len();
    if l > limits.max_challenge_bits {
        return Err(Error::LimitExceeded {
            what: "challenge sweep bits",
            needed: l as u64,
            limit: limits.max_challenge_bits as u64,
        });
    }
    if c.witness_len() > limits.max_witness_bits {
        return Err(Error::LimitExceeded {
            what: "witness search bits",
            needed: c.witness_len() as u64,
            limit: limits.max_witness_bits as u64,
        });
    }
    let entries: Vec<Option<Bits>> = (0u64..(1u64 << l))
        .into_par_iter()
        .map(|v| {
            let r = Bits::from_uint_be(v, l);
            find_witness(c, &r, limits).expect("limits already checked")
        })
        .collect();
    Ok(SatProfile {
        challenge_len: l,
        entries,
    })
}
