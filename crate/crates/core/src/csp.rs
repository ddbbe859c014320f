//! k-CSPs over mixed alphabets: Boolean Arthur variables set at random,
//! Merlin variables over per-variable alphabets set adversarially.
//!
//! Values are exact rationals. Maximization over Merlin variables is
//! brute-force by default; CSPs produced by the reduction carry a pivot tag
//! enabling an exact polynomial fast path (every constraint touches at most
//! one non-pivot Merlin variable, so for each pivot symbol the rest
//! decouple).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bits::Bits;
use crate::circuits::Limits;
use crate::error::{Error, Result};
use crate::Rational;

use num_traits::One;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarId {
    /// Boolean Arthur variable (challenge bit).
    Arthur(u32),
    /// Merlin variable with its own alphabet.
    Merlin(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MerlinVar {
    pub name: String,
    pub alphabet: usize,
}

/// One constraint: a scope of at most `arity` variables and an explicit
/// truth table over the scope's alphabet product, row-major with the first
/// scope variable most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub scope: Vec<VarId>,
    pub table: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Csp {
    arthur_len: usize,
    merlin: Vec<MerlinVar>,
    constraints: Vec<Constraint>,
    arity: usize,
    /// Pivot Merlin variable for the fast maximization path, if the
    /// producing construction guarantees the pivot-star structure.
    pub fast_pivot: Option<usize>,
}

/// A full assignment: challenge bits plus one symbol per Merlin variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub challenge: Bits,
    pub merlin: Vec<usize>,
}

impl Csp {
    pub fn new(
        arthur_len: usize,
        merlin: Vec<MerlinVar>,
        constraints: Vec<Constraint>,
        arity: usize,
    ) -> Result<Csp> {
        if constraints.is_empty() {
            return Err(Error::InvalidCsp("no constraints".into()));
        }
        for var in &merlin {
            if var.alphabet == 0 {
                return Err(Error::InvalidCsp(format!("empty alphabet for {}", var.name)));
            }
        }
        for (i, c) in constraints.iter().enumerate() {
            if c.scope.is_empty() || c.scope.len() > arity {
                return Err(Error::InvalidCsp(format!(
                    "constraint {i} scope size {} vs arity {arity}",
                    c.scope.len()
                )));
            }
            let mut product = 1usize;
            for &v in &c.scope {
                let size = match v {
                    VarId::Arthur(a) => {
                        if a as usize >= arthur_len {
                            return Err(Error::InvalidCsp(format!(
                                "constraint {i} references arthur var {a} out of {arthur_len}"
                            )));
                        }
                        2
                    }
                    VarId::Merlin(m) => {
                        let m = m as usize;
                        if m >= merlin.len() {
                            return Err(Error::InvalidCsp(format!(
                                "constraint {i} references merlin var {m} out of {}",
                                merlin.len()
                            )));
                        }
                        merlin[m].alphabet
                    }
                };
                product = product.checked_mul(size).ok_or_else(|| {
                    Error::InvalidCsp(format!("constraint {i} table size overflow"))
                })?;
            }
            if c.table.len() != product {
                return Err(Error::InvalidCsp(format!(
                    "constraint {i} table has {} entries, expected {product}",
                    c.table.len()
                )));
            }
        }
        Ok(Csp {
            arthur_len,
            merlin,
            constraints,
            arity,
            fast_pivot: None,
        })
    }

    pub fn arthur_len(&self) -> usize {
        self.arthur_len
    }

    pub fn merlin_vars(&self) -> &[MerlinVar] {
        &self.merlin
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    fn check_assignment(&self, a: &Assignment) -> Result<()> {
        if a.challenge.len() != self.arthur_len {
            return Err(Error::LengthMismatch {
                context: "assignment challenge",
                left: a.challenge.len(),
                right: self.arthur_len,
            });
        }
        if a.merlin.len() != self.merlin.len() {
            return Err(Error::LengthMismatch {
                context: "assignment merlin vars",
                left: a.merlin.len(),
                right: self.merlin.len(),
            });
        }
        for (i, (&sym, var)) in a.merlin.iter().zip(&self.merlin).enumerate() {
            if sym >= var.alphabet {
                return Err(Error::OutOfRange {
                    what: "merlin symbol",
                    detail: format!("var {i} symbol {sym} not below {}", var.alphabet),
                });
            }
        }
        Ok(())
    }

    fn constraint_satisfied(&self, c: &Constraint, challenge: &Bits, merlin: &[usize]) -> bool {
        let mut index = 0usize;
        for &v in &c.scope {
            let (sym, size) = match v {
                VarId::Arthur(a) => (challenge.get(a as usize) as usize, 2),
                VarId::Merlin(m) => (merlin[m as usize], self.merlin[m as usize].alphabet),
            };
            index = index * size + sym;
        }
        c.table[index]
    }

    /// Fraction of satisfied constraints, exact.
    pub fn value(&self, a: &Assignment) -> Result<Rational> {
        self.check_assignment(a)?;
        let sat = self
            .constraints
            .iter()
            .filter(|c| self.constraint_satisfied(c, &a.challenge, &a.merlin))
            .count();
        Ok(Rational::new(sat as i64, self.constraints.len() as i64))
    }

    fn count_satisfied(&self, challenge: &Bits, merlin: &[usize]) -> usize {
        self.constraints
            .iter()
            .filter(|c| self.constraint_satisfied(c, challenge, merlin))
            .count()
    }

    /// Exact maximum of the value over all Merlin assignments, with the
    /// lexicographically smallest maximizer. Uses the pivot fast path when
    /// tagged (and validates the structure), brute force otherwise.
    pub fn max_value_over_merlin(
        &self,
        challenge: &Bits,
        limits: &Limits,
    ) -> Result<(Rational, Vec<usize>)> {
        if challenge.len() != self.arthur_len {
            return Err(Error::LengthMismatch {
                context: "challenge",
                left: challenge.len(),
                right: self.arthur_len,
            });
        }
        if self.merlin.is_empty() {
            let v = self.value(&Assignment {
                challenge: challenge.clone(),
                merlin: vec![],
            })?;
            return Ok((v, vec![]));
        }
        if let Some(pivot) = self.fast_pivot {
            return self.max_value_fast(challenge, pivot);
        }
        self.max_value_brute(challenge, limits)
    }

    /// Brute-force reference path: enumerates the full Merlin product space
    /// in lexicographic order. Kept independent of the fast path so the two
    /// can check each other.
    pub fn max_value_brute(
        &self,
        challenge: &Bits,
        limits: &Limits,
    ) -> Result<(Rational, Vec<usize>)> {
        let mut space = 1u64;
        for var in &self.merlin {
            space = space.saturating_mul(var.alphabet as u64);
            if space > limits.max_merlin_space {
                return Err(Error::LimitExceeded {
                    what: "merlin assignment space",
                    needed: space,
                    limit: limits.max_merlin_space,
                });
            }
        }
        let mut best_count = 0usize;
        let mut best: Option<Vec<usize>> = None;
        let mut current = vec![0usize; self.merlin.len()];
        loop {
            let count = self.count_satisfied(challenge, &current);
            if best.is_none() || count > best_count {
                best_count = count;
                best = Some(current.clone());
            }
            // odometer increment, last variable fastest (lexicographic order)
            let mut pos = self.merlin.len();
            loop {
                if pos == 0 {
                    let best = best.unwrap();
                    let value =
                        Rational::new(best_count as i64, self.constraints.len() as i64);
                    return Ok((value, best));
                }
                pos -= 1;
                current[pos] += 1;
                if current[pos] < self.merlin[pos].alphabet {
                    break;
                }
                current[pos] = 0;
            }
        }
    }

    /// Pivot-star fast path: for each pivot symbol, constraints without a
    /// second Merlin variable are counted directly and each remaining Merlin
    /// variable is optimized independently over the constraints touching it.
    fn max_value_fast(&self, challenge: &Bits, pivot: usize) -> Result<(Rational, Vec<usize>)> {
        if pivot >= self.merlin.len() {
            return Err(Error::FastPath(format!("pivot {pivot} out of range")));
        }
        // group constraints: those whose only merlin var (if any) is the
        // pivot, and those touching exactly one non-pivot merlin var
        let mut pivot_only: Vec<usize> = Vec::new();
        let mut by_var: Vec<Vec<usize>> = vec![Vec::new(); self.merlin.len()];
        for (ci, c) in self.constraints.iter().enumerate() {
            let others: Vec<usize> = c
                .scope
                .iter()
                .filter_map(|&v| match v {
                    VarId::Merlin(m) if m as usize != pivot => Some(m as usize),
                    _ => None,
                })
                .collect();
            match others.len() {
                0 => pivot_only.push(ci),
                1 => by_var[others[0]].push(ci),
                _ => {
                    return Err(Error::FastPath(format!(
                        "constraint {ci} touches two non-pivot merlin variables"
                    )))
                }
            }
        }
        let pivot_alphabet = self.merlin[pivot].alphabet;
        let mut best_count = 0usize;
        let mut best: Option<Vec<usize>> = None;
        let mut scratch = vec![0usize; self.merlin.len()];
        for zeta in 0..pivot_alphabet {
            scratch[pivot] = zeta;
            let mut assignment = vec![0usize; self.merlin.len()];
            assignment[pivot] = zeta;
            let mut count = 0usize;
            for &ci in &pivot_only {
                if self.constraint_satisfied(&self.constraints[ci], challenge, &scratch) {
                    count += 1;
                }
            }
            for (v, touching) in by_var.iter().enumerate() {
                if v == pivot || touching.is_empty() {
                    continue;
                }
                let mut var_best = 0usize;
                let mut var_sym = 0usize;
                for sym in 0..self.merlin[v].alphabet {
                    scratch[v] = sym;
                    let sat = touching
                        .iter()
                        .filter(|&&ci| {
                            self.constraint_satisfied(&self.constraints[ci], challenge, &scratch)
                        })
                        .count();
                    if sat > var_best {
                        var_best = sat;
                        var_sym = sym;
                    }
                }
                scratch[v] = 0;
                assignment[v] = var_sym;
                count += var_best;
            }
            if best.is_none() || count > best_count {
                best_count = count;
                best = Some(assignment);
            }
        }
        let best = best.expect("pivot alphabet nonempty");
        let value = Rational::new(best_count as i64, self.constraints.len() as i64);
        Ok((value, best))
    }
}

/// How a gap profile sweeps the challenge space.
#[derive(Clone, Debug)]
pub enum ProfileMode {
    Exhaustive,
    Sampled { trials: usize, seed: u64 },
}

/// Per-challenge maxima of the CSP value, either exhaustive or sampled.
#[derive(Clone, Debug)]
pub struct GapProfile {
    pub records: Vec<(Bits, Rational)>,
    pub exhaustive: bool,
    pub arthur_len: usize,
}

impl GapProfile {
    pub fn fraction_fully_satisfied(&self) -> Rational {
        let sat = self
            .records
            .iter()
            .filter(|(_, v)| v.is_one())
            .count();
        Rational::new(sat as i64, self.records.len() as i64)
    }

    /// Fraction of records with max value strictly above `threshold`.
    pub fn fraction_above(&self, threshold: Rational) -> Rational {
        let n = self
            .records
            .iter()
            .filter(|(_, v)| *v > threshold)
            .count();
        Rational::new(n as i64, self.records.len() as i64)
    }

    /// Binomial standard error of [`GapProfile::fraction_above`]; zero for
    /// exhaustive profiles.
    pub fn std_error_above(&self, threshold: Rational) -> f64 {
        if self.exhaustive {
            return 0.0;
        }
        let p = ratio_to_f64(self.fraction_above(threshold));
        (p * (1.0 - p) / self.records.len() as f64).sqrt()
    }
}

pub fn ratio_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Compute a gap profile of `csp` under the given mode.
pub fn gap_profile(csp: &Csp, mode: ProfileMode, limits: &Limits) -> Result<GapProfile> {
    let l = csp.arthur_len();
    match mode {
        ProfileMode::Exhaustive => {
            if l > limits.max_challenge_bits {
                return Err(Error::LimitExceeded {
                    what: "gap profile challenge bits",
                    needed: l as u64,
                    limit: limits.max_challenge_bits as u64,
                });
            }
            let records: Vec<(Bits, Rational)> = (0u64..(1u64 << l))
                .into_par_iter()
                .map(|v| {
                    let r = Bits::from_uint_be(v, l);
                    let (value, _) = csp
                        .max_value_over_merlin(&r, limits)
                        .expect("limits verified by caller");
                    (r, value)
                })
                .collect();
            Ok(GapProfile {
                records,
                exhaustive: true,
                arthur_len: l,
            })
        }
        ProfileMode::Sampled { trials, seed } => {
            if trials == 0 {
                return Err(Error::OutOfRange {
                    what: "profile trials",
                    detail: "must be at least 1".into(),
                });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut records = Vec::with_capacity(trials);
            for _ in 0..trials {
                let r: Bits = (0..l).map(|_| rng.gen()).collect();
                let (value, _) = csp.max_value_over_merlin(&r, limits)?;
                records.push((r, value));
            }
            Ok(GapProfile {
                records,
                exhaustive: false,
                arthur_len: l,
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PromiseVerdict {
    Yes,
    No,
    Neither,
}

/// Classify a profile against the gap promise: `Yes` when every recorded
/// challenge is fully satisfiable, `No` when the fraction with max value
/// above `1 - epsilon` is at most `s`.
pub fn classify_promise(
    profile: &GapProfile,
    epsilon: Rational,
    s: Rational,
) -> Result<PromiseVerdict> {
    let zero = Rational::new(0, 1);
    let one = Rational::one();
    if epsilon <= zero || epsilon > one {
        return Err(Error::OutOfRange {
            what: "promise epsilon",
            detail: format!("{epsilon} not in (0,1]"),
        });
    }
    if s < zero || s >= one {
        return Err(Error::OutOfRange {
            what: "promise soundness",
            detail: format!("{s} not in [0,1)"),
        });
    }
    if profile.fraction_fully_satisfied().is_one() {
        return Ok(PromiseVerdict::Yes);
    }
    if profile.fraction_above(one - epsilon) <= s {
        return Ok(PromiseVerdict::No);
    }
    Ok(PromiseVerdict::Neither)
}
