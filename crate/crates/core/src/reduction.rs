//! Reduction from a verifier circuit `C(r, w)` to a stochastic 2-CSP
//! `psi(r, (Z, u))`: replicate the challenge across blocks, encode the
//! witness, run a proximity-proof backend on the replicated predicate, then
//! substitute the challenge variables and extend the codeword variables'
//! alphabet with rejecting non-Boolean symbols.
//!
//! The module also carries the two provers the construction supports: the
//! decoding prover, which Booleanizes and decodes the codeword part of a
//! near-satisfying assignment back to a witness, and the smoothed prover,
//! which perturbs the challenge by a bounded-weight vector before invoking
//! an oracle prover, trading success probability for robustness to
//! nearby-challenge witnesses.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bits::Bits;
use crate::circuits::{build_replicated_circuit, Circuit, Limits};
use crate::codes::CodeSpec;
use crate::csp::{Constraint, Csp, MerlinVar, VarId};
use crate::error::{Error, Result};
use crate::hamming::{binary_entropy_ratio, BallSampler};
use crate::pcpp::{PcppBackend, PcppInstance};
use crate::{ratio, Rational};

use num_traits::{ToPrimitive, Zero};

/// Symbols 0 and 1 of a codeword variable are Boolean; everything above is a
/// rejecting filler symbol.
pub const U_ALPHABET: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionParams {
    /// Target exponent-loss parameter.
    pub epsilon: Rational,
    /// Smoothing radius fraction, chosen so the entropy of `gamma` stays
    /// below `epsilon`.
    pub gamma: Rational,
    /// Violation threshold `nu = eta * beta * gamma / 4`, exact.
    pub nu: Rational,
    /// Backend security used (beta).
    pub security: Rational,
    /// Code decoding radius used (eta).
    pub decode_radius: Rational,
    /// Challenge replication count, filled in at build time.
    pub replication: Option<usize>,
    /// Alphabet size of each codeword variable after extension.
    pub u_alphabet: usize,
}

impl ReductionParams {
    pub fn validate(&self) -> Result<()> {
        let expect = self.decode_radius * self.security * self.gamma / ratio(4, 1);
        if self.nu != expect {
            return Err(Error::OutOfRange {
                what: "nu",
                detail: format!("{} != eta*beta*gamma/4 = {}", self.nu, expect),
            });
        }
        let h = binary_entropy_ratio(self.gamma)?;
        let eps = self.epsilon.to_f64().unwrap();
        if h > eps {
            return Err(Error::OutOfRange {
                what: "gamma",
                detail: format!("H(gamma) = {h} exceeds epsilon = {eps}"),
            });
        }
        Ok(())
    }
}

fn in_unit_interval(what: &'static str, v: Rational) -> Result<()> {
    if v <= Rational::zero() || v > Rational::from_integer(1) {
        return Err(Error::OutOfRange {
            what,
            detail: format!("{v} not in (0,1]"),
        });
    }
    Ok(())
}

/// Pick the largest grid value `gamma` with `H(gamma) <= epsilon`, scanning
/// the 1/64 grid first and the 1/1024 refinement if nothing qualifies, and
/// derive the violation threshold.
pub fn choose_parameters(
    epsilon: Rational,
    decode_radius: Rational,
    security: Rational,
) -> Result<ReductionParams> {
    in_unit_interval("epsilon", epsilon)?;
    in_unit_interval("decode radius", decode_radius)?;
    in_unit_interval("backend security", security)?;
    let eps = epsilon.to_f64().unwrap();
    for den in [64i64, 1024] {
        for num in (1..=den / 2).rev() {
            let gamma = Rational::new(num, den);
            if binary_entropy_ratio(gamma)? <= eps {
                let nu = decode_radius * security * gamma / ratio(4, 1);
                return Ok(ReductionParams {
                    epsilon,
                    gamma,
                    nu,
                    security,
                    decode_radius,
                    replication: None,
                    u_alphabet: U_ALPHABET,
                });
            }
        }
    }
    Err(Error::OutOfRange {
        what: "epsilon",
        detail: format!("no grid gamma with H(gamma) <= {epsilon} down to 1/1024"),
    })
}

/// Output of the reduction: the stochastic CSP plus everything needed to run
/// and audit its guarantees.
#[derive(Clone, Debug)]
pub struct ReducedInstance {
    /// The 2-CSP over challenge bits (Arthur) and Merlin variables
    /// `[Z, u_0, ..., u_{N'-1}]`, pivot-tagged for fast maximization.
    pub psi: Csp,
    pub params: ReductionParams,
    /// Verifier after witness padding; provers and success checks use this.
    pub circuit: Circuit,
    pub code: CodeSpec,
    pub backend: String,
    /// Proximity-proof instance for the replicated predicate.
    pub pcpp: PcppInstance,
    /// Witness length of the original, pre-padding circuit.
    pub original_witness_len: usize,
    pub replication: usize,
}

impl ReducedInstance {
    pub fn challenge_len(&self) -> usize {
        self.circuit.challenge_len()
    }

    pub fn codeword_len(&self) -> usize {
        self.code.codeword_len()
    }

    /// Smoothing ball radius `floor(gamma * l)`.
    pub fn smoothing_radius(&self) -> usize {
        let l = Rational::from_integer(self.challenge_len() as i64);
        (self.params.gamma * l).floor().to_integer() as usize
    }

    /// Honest Merlin assignment for a satisfying `(r, w)` pair: the encoded
    /// witness plus the backend's honest proof. `w` may be given at the
    /// original witness length; padding bits are zero.
    pub fn honest_proof(&self, r: &Bits, w: &Bits) -> Result<Vec<usize>> {
        if w.len() != self.original_witness_len && w.len() != self.circuit.witness_len() {
            return Err(Error::LengthMismatch {
                context: "honest proof witness",
                left: w.len(),
                right: self.original_witness_len,
            });
        }
        let w = w.pad_to(self.circuit.witness_len());
        if !self.circuit.eval(r, &w)? {
            return Err(Error::Precondition(format!(
                "honest_proof needs an accepting pair, got r={r} w={w}"
            )));
        }
        let u = self.code.encode(&w)?;
        let x = r.repeat(self.replication).concat(&u);
        let proof = self.pcpp.honest_proof(&x)?;
        let mut z = Vec::with_capacity(1 + u.len());
        z.push(proof[0]);
        z.extend(u.iter().map(usize::from));
        Ok(z)
    }

    /// Decoding prover: Booleanize the codeword variables (filler symbols
    /// map to 0), decode, and return the message. Decode failure returns the
    /// all-zero witness, which is in-contract garbage.
    pub fn recover_witness(&self, z: &[usize]) -> Result<Bits> {
        let nprime = self.codeword_len();
        if z.len() != 1 + nprime {
            return Err(Error::LengthMismatch {
                context: "merlin assignment",
                left: z.len(),
                right: 1 + nprime,
            });
        }
        let u: Bits = z[1..].iter().map(|&s| s == 1).collect();
        Ok(match self.code.decode(&u)? {
            Some(w) => w,
            None => Bits::zeros(self.circuit.witness_len()),
        })
    }

    /// Exact maximum proof value for a challenge, via the pivot fast path.
    pub fn max_value(&self, r: &Bits, limits: &Limits) -> Result<Rational> {
        Ok(self.psi.max_value_over_merlin(r, limits)?.0)
    }
}

/// Run the reduction. The witness block is padded so it is at least as long
/// as the challenge, and the code must match the padded length (see
/// [`padded_witness_len`]).
pub fn build(
    c: &Circuit,
    code: &CodeSpec,
    backend: PcppBackend,
    epsilon: Rational,
    limits: &Limits,
) -> Result<ReducedInstance> {
    let l = c.challenge_len();
    if l == 0 {
        return Err(Error::InvalidCircuit(
            "reduction needs at least one challenge bit".into(),
        ));
    }
    if l > limits.max_challenge_bits {
        return Err(Error::LimitExceeded {
            what: "reduction challenge bits",
            needed: l as u64,
            limit: limits.max_challenge_bits as u64,
        });
    }
    let n_target = padded_witness_len(c);
    if n_target > limits.max_witness_bits {
        return Err(Error::LimitExceeded {
            what: "reduction witness bits",
            needed: n_target as u64,
            limit: limits.max_witness_bits as u64,
        });
    }
    if code.message_len() != n_target {
        return Err(Error::LengthMismatch {
            context: "code message length vs padded witness length",
            left: code.message_len(),
            right: n_target,
        });
    }
    let mut params = choose_parameters(epsilon, code.decode_radius(), backend.claimed_security())?;
    let padded = c.pad_witness(n_target)?;
    let rep = build_replicated_circuit(&padded, code)?;

    // structural enumeration of the replicated predicate's accepting set:
    // (r, ..., r, E(w)) for every accepting (r, w)
    let mut accepting = Vec::new();
    for rv in 0..(1u64 << l) {
        let r = Bits::from_uint_be(rv, l);
        for wv in 0..(1u64 << n_target) {
            let w = Bits::from_uint_be(wv, n_target);
            if padded.eval(&r, &w)? {
                let u = code.encode(&w)?;
                accepting.push(rep.assemble_input(&r, &u)?);
            }
        }
    }
    let pcpp = crate::pcpp::from_accepting_set(rep.input_len(), accepting)?;
    let psi = substitute(&pcpp.csp, rep.replication, l, rep.codeword_len)?;
    params.replication = Some(rep.replication);
    Ok(ReducedInstance {
        psi,
        params,
        circuit: padded,
        code: code.clone(),
        backend: backend.id().into(),
        pcpp,
        original_witness_len: c.witness_len(),
        replication: rep.replication,
    })
}

/// Witness length after padding: at least the challenge length and at least
/// one bit.
pub fn padded_witness_len(c: &Circuit) -> usize {
    c.witness_len().max(c.challenge_len()).max(1)
}

/// Substitute the replicated challenge blocks by the challenge variables and
/// re-home the codeword positions as Merlin variables with the extended,
/// rejecting alphabet. `Z` becomes Merlin variable 0 so that fast-path and
/// brute-force tie-breaking agree.
fn substitute(pcpp_csp: &Csp, replication: usize, l: usize, codeword_len: usize) -> Result<Csp> {
    #[derive(Clone, Copy)]
    enum NewVar {
        Pivot,
        Challenge(usize),
        Codeword(usize),
    }
    let map_var = |v: VarId| -> Result<NewVar> {
        Ok(match v {
            VarId::Merlin(0) => NewVar::Pivot,
            VarId::Merlin(m) => {
                return Err(Error::InvalidCsp(format!(
                    "unexpected proof variable {m} in backend output"
                )))
            }
            VarId::Arthur(i) => {
                let i = i as usize;
                if i < replication * l {
                    NewVar::Challenge(i % l)
                } else {
                    NewVar::Codeword(i - replication * l)
                }
            }
        })
    };
    let pivot_alphabet = pcpp_csp.merlin_vars()[0].alphabet;
    let alphabet_of = |v: NewVar| -> usize {
        match v {
            NewVar::Pivot => pivot_alphabet,
            NewVar::Challenge(_) => 2,
            NewVar::Codeword(_) => U_ALPHABET,
        }
    };
    let var_id = |v: NewVar| -> VarId {
        match v {
            NewVar::Pivot => VarId::Merlin(0),
            NewVar::Challenge(j) => VarId::Arthur(j as u32),
            NewVar::Codeword(j) => VarId::Merlin(1 + j as u32),
        }
    };
    // symbol of the new variable -> symbol of the old variable, or None when
    // the constraint must reject (non-Boolean filler on a codeword variable)
    let back_map = |v: NewVar, sym: usize| -> Option<usize> {
        match v {
            NewVar::Codeword(_) if sym >= 2 => None,
            _ => Some(sym),
        }
    };

    let mut constraints = Vec::with_capacity(pcpp_csp.constraint_count());
    for c in pcpp_csp.constraints() {
        let mapped: Vec<NewVar> = c.scope.iter().map(|&v| map_var(v)).collect::<Result<_>>()?;
        let old_sizes: Vec<usize> = c
            .scope
            .iter()
            .map(|&v| match v {
                VarId::Arthur(_) => 2,
                VarId::Merlin(_) => pivot_alphabet,
            })
            .collect();
        let old_index = |old_syms: &[usize]| -> usize {
            old_syms
                .iter()
                .zip(&old_sizes)
                .fold(0usize, |acc, (&s, &size)| acc * size + s)
        };
        // collapse duplicate new variables (possible when two replicated
        // positions of the same challenge bit share a scope)
        let mut new_scope: Vec<NewVar> = Vec::new();
        let mut position_of: Vec<usize> = Vec::new();
        for &nv in &mapped {
            let key = var_id(nv);
            if let Some(pos) = new_scope.iter().position(|&e| var_id(e) == key) {
                position_of.push(pos);
            } else {
                new_scope.push(nv);
                position_of.push(new_scope.len() - 1);
            }
        }
        let sizes: Vec<usize> = new_scope.iter().map(|&v| alphabet_of(v)).collect();
        let table_len: usize = sizes.iter().product();
        let mut table = Vec::with_capacity(table_len);
        for idx in 0..table_len {
            // decode row-major index into new symbols
            let mut rem = idx;
            let mut new_syms = vec![0usize; sizes.len()];
            for pos in (0..sizes.len()).rev() {
                new_syms[pos] = rem % sizes[pos];
                rem /= sizes[pos];
            }
            let mut old_syms = Vec::with_capacity(mapped.len());
            let mut reject = false;
            for (slot, &nv) in mapped.iter().enumerate() {
                match back_map(nv, new_syms[position_of[slot]]) {
                    Some(s) => old_syms.push(s),
                    None => {
                        reject = true;
                        break;
                    }
                }
            }
            table.push(if reject { false } else { c.table[old_index(&old_syms)] });
        }
        constraints.push(Constraint {
            scope: new_scope.iter().map(|&v| var_id(v)).collect(),
            table,
        });
    }

    let mut merlin = Vec::with_capacity(1 + codeword_len);
    merlin.push(MerlinVar {
        name: "Z".into(),
        alphabet: pivot_alphabet,
    });
    for j in 0..codeword_len {
        merlin.push(MerlinVar {
            name: format!("u{j}"),
            alphabet: U_ALPHABET,
        });
    }
    let mut csp = Csp::new(l, merlin, constraints, 2)?;
    csp.fast_pivot = Some(0);
    Ok(csp)
}

/// The smoothed prover: perturb the challenge by a uniform vector of weight
/// at most the smoothing radius, invoke the oracle prover there, and decode.
pub struct SmoothedProver<'a, P: FnMut(&Bits) -> Vec<usize>> {
    instance: &'a ReducedInstance,
    oracle: P,
    sampler: BallSampler,
}

impl<'a, P: FnMut(&Bits) -> Vec<usize>> SmoothedProver<'a, P> {
    pub fn new(instance: &'a ReducedInstance, oracle: P, seed: u64) -> Result<Self> {
        let sampler = BallSampler::new(
            instance.challenge_len(),
            instance.smoothing_radius(),
            seed,
        )?;
        Ok(SmoothedProver {
            instance,
            oracle,
            sampler,
        })
    }

    /// One invocation: returns the candidate witness for `r`.
    pub fn run(&mut self, r: &Bits) -> Result<Bits> {
        let v = self.sampler.sample();
        let shifted = r.xor(&v)?;
        let z = (self.oracle)(&shifted);
        self.instance.recover_witness(&z)
    }
}

#[derive(Clone, Debug)]
pub struct SmoothedReport {
    pub trials: usize,
    pub success_rate: f64,
    pub std_error: f64,
    /// Success rate of the best fixed perturbation vector, when the
    /// (challenge x ball) space was small enough to enumerate.
    pub best_fixed_rate: Option<f64>,
}

/// Monte Carlo success measurement of the smoothed prover against an oracle,
/// plus the exhaustive best-fixed-vector rate when affordable. Success means
/// the padded verifier accepts `(r, recovered witness)`.
pub fn smoothed_success<P: FnMut(&Bits) -> Vec<usize>>(
    instance: &ReducedInstance,
    mut oracle: P,
    trials: usize,
    seed: u64,
) -> Result<SmoothedReport> {
    if trials == 0 {
        return Err(Error::OutOfRange {
            what: "trials",
            detail: "must be at least 1".into(),
        });
    }
    let l = instance.challenge_len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prover = SmoothedProver::new(instance, &mut oracle, seed ^ 0x5eed_0ba1)?;
    let mut successes = 0usize;
    for _ in 0..trials {
        let r: Bits = (0..l).map(|_| rng.gen()).collect();
        let w = prover.run(&r)?;
        if instance.circuit.eval(&r, &w)? {
            successes += 1;
        }
    }
    drop(prover);
    let rate = successes as f64 / trials as f64;
    let std_error = (rate * (1.0 - rate) / trials as f64).sqrt();

    // exhaustive best fixed perturbation: only at small scale
    let radius = instance.smoothing_radius();
    let best_fixed_rate = if l <= 12 {
        let mut best = 0usize;
        for vv in 0..(1u64 << l) {
            let v = Bits::from_uint_be(vv, l);
            if v.weight() > radius {
                continue;
            }
            let mut wins = 0usize;
            for rv in 0..(1u64 << l) {
                let r = Bits::from_uint_be(rv, l);
                let shifted = r.xor(&v)?;
                let w = instance.recover_witness(&oracle(&shifted))?;
                if instance.circuit.eval(&r, &w)? {
                    wins += 1;
                }
            }
            best = best.max(wins);
        }
        Some(best as f64 / (1u64 << l) as f64)
    } else {
        None
    };
    Ok(SmoothedReport {
        trials,
        success_rate: rate,
        std_error,
        best_fixed_rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::CircuitBuilder;
    use crate::csp::Assignment;
    use crate::hamming;
    use num_traits::One;

    /// Verifier accepting iff the witness equals the challenge.
    fn equality_circuit(n: usize) -> Circuit {
        let mut b = CircuitBuilder::new(n, n);
        let eqs: Vec<_> = (0..n)
            .map(|i| {
                let r = b.challenge(i);
                let w = b.witness(i);
                b.xnor(r, w)
            })
            .collect();
        let out = b.and_all(&eqs);
        b.finish(out).unwrap()
    }

    fn build_equality(n: usize) -> ReducedInstance {
        let c = equality_circuit(n);
        let code = CodeSpec::reed_solomon(padded_witness_len(&c)).unwrap();
        build(&c, &code, PcppBackend::Enumerative, Rational::one(), &Limits::default()).unwrap()
    }

    #[test]
    fn parameter_grid_examples() {
        let p = choose_parameters(Rational::one(), Rational::one(), Rational::one()).unwrap();
        assert_eq!(p.gamma, ratio(1, 2));
        assert_eq!(p.nu, ratio(1, 8));
        p.validate().unwrap();

        let p = choose_parameters(ratio(1, 2), Rational::one(), Rational::one()).unwrap();
        assert_eq!(p.gamma, ratio(7, 64));

        // linear scaling of nu in each factor
        let p1 = choose_parameters(Rational::one(), ratio(1, 2), Rational::one()).unwrap();
        assert_eq!(p1.nu, ratio(1, 16));
        let p2 = choose_parameters(Rational::one(), ratio(1, 2), ratio(1, 2)).unwrap();
        assert_eq!(p2.nu, ratio(1, 32));

        // tiny epsilon falls through to the refined grid
        let p = choose_parameters(ratio(1, 80), Rational::one(), Rational::one()).unwrap();
        assert_eq!(*p.gamma.denom(), 1024);
        p.validate().unwrap();

        assert!(choose_parameters(ratio(1, 100_000), Rational::one(), Rational::one()).is_err());
        assert!(choose_parameters(ratio(0, 1), Rational::one(), Rational::one()).is_err());
        assert!(choose_parameters(Rational::one(), ratio(0, 1), Rational::one()).is_err());
    }

    #[test]
    fn completeness_on_equality_toy() {
        let limits = Limits::default();
        let inst = build_equality(2);
        for rv in 0..4u64 {
            let r = Bits::from_uint_be(rv, 2);
            let z = inst.honest_proof(&r, &r).unwrap();
            let v = inst
                .psi
                .value(&Assignment {
                    challenge: r.clone(),
                    merlin: z.clone(),
                })
                .unwrap();
            assert!(v.is_one(), "r={r}: honest value {v}");
            // determinism
            assert_eq!(z, inst.honest_proof(&r, &r).unwrap());
            // systematic positions of u carry w
            for (i, &p) in inst.code.systematic_positions().iter().enumerate() {
                assert_eq!(z[1 + p] == 1, r.get(i));
            }
            // max value also reaches 1
            assert!(inst.max_value(&r, &limits).unwrap().is_one());
        }
        assert!(inst
            .honest_proof(&Bits::zeros(2), &Bits::ones(2))
            .is_err());
    }

    #[test]
    fn fast_path_matches_brute_force_on_tiny_instance() {
        // the 5-bit repetition code keeps the merlin space brute-forceable
        // (3^5 codeword assignments times the proof alphabet)
        let limits = Limits::default();
        let c = {
            let mut b = CircuitBuilder::new(1, 1);
            let r = b.challenge(0);
            let w = b.witness(0);
            let out = b.or(r, w);
            b.finish(out).unwrap()
        };
        let code = CodeSpec::repetition5(1).unwrap();
        let inst = build(&c, &code, PcppBackend::Enumerative, Rational::one(), &limits).unwrap();
        assert_eq!(inst.codeword_len(), 5);
        for rv in 0..2u64 {
            let r = Bits::from_uint_be(rv, 1);
            let fast = inst.psi.max_value_over_merlin(&r, &limits).unwrap();
            let brute = inst.psi.max_value_brute(&r, &limits).unwrap();
            assert_eq!(fast.0, brute.0);
            assert_eq!(fast.1, brute.1);
        }
    }

    #[test]
    fn soundness_deficit_scales_with_distance() {
        let limits = Limits::default();
        // verifier accepting only r = 11, w = anything-equal case: use
        // equality circuit restricted by fixing the challenge via constraints
        let mut b = CircuitBuilder::new(2, 2);
        let r0 = b.challenge(0);
        let r1 = b.challenge(1);
        let both = b.and(r0, r1);
        let w0 = b.witness(0);
        let out = b.and(both, w0);
        let c = b.finish(out).unwrap();
        let code = CodeSpec::reed_solomon(2).unwrap();
        let inst = build(&c, &code, PcppBackend::Enumerative, Rational::one(), &limits).unwrap();
        let sat: Vec<Bits> = vec!["11".parse().unwrap()];
        let mut last = Rational::one();
        for (rv, expect_d) in [(3u64, 0usize), (1, 1), (0, 2)] {
            let r = Bits::from_uint_be(rv, 2);
            let d = hamming::distance_to_set(&r, &sat).unwrap().finite().unwrap();
            assert_eq!(d, expect_d);
            let max = inst.max_value(&r, &limits).unwrap();
            if d == 0 {
                assert!(max.is_one());
            } else {
                assert!(max < last, "deficit must grow with distance");
            }
            last = max;
        }
    }

    #[test]
    fn unsatisfiable_circuit_bounded_away_from_one() {
        let limits = Limits::default();
        let mut b = CircuitBuilder::new(2, 2);
        let out = b.const0();
        let c = b.finish(out).unwrap();
        let code = CodeSpec::reed_solomon(2).unwrap();
        let inst = build(&c, &code, PcppBackend::Enumerative, Rational::one(), &limits).unwrap();
        for rv in 0..4u64 {
            let r = Bits::from_uint_be(rv, 2);
            let v = inst.max_value(&r, &limits).unwrap();
            assert!(v.is_zero(), "empty accepting set forces value 0");
        }
    }

    /// Assignments using the filler symbol never beat their Booleanization
    /// (filler maps to 0): every constraint touching a filler rejects.
    #[test]
    fn boolean_domination_under_filler_symbols() {
        use rand::prelude::*;
        let inst = build_equality(2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let alphabet = inst.pcpp.proof_alphabet();
        for _ in 0..300 {
            let r = Bits::from_uint_be(rng.gen_range(0..4), 2);
            let mut z = vec![rng.gen_range(0..alphabet)];
            for _ in 0..inst.codeword_len() {
                z.push(rng.gen_range(0..U_ALPHABET));
            }
            let boolean: Vec<usize> = z
                .iter()
                .enumerate()
                .map(|(i, &s)| if i > 0 && s >= 2 { 0 } else { s })
                .collect();
            let with_filler = inst
                .psi
                .value(&Assignment {
                    challenge: r.clone(),
                    merlin: z,
                })
                .unwrap();
            let booleanized = inst
                .psi
                .value(&Assignment {
                    challenge: r,
                    merlin: boolean,
                })
                .unwrap();
            assert!(with_filler <= booleanized);
        }
    }

    #[test]
    fn recover_witness_round_trips_and_tolerates_errors() {
        let inst = build_equality(3);
        let r: Bits = "101".parse().unwrap();
        let z = inst.honest_proof(&r, &r).unwrap();
        assert_eq!(inst.recover_witness(&z).unwrap(), r);
        // corrupt up to the correctable number of codeword symbols
        let flips = inst.code.correctable_bits();
        assert!(flips >= 1);
        let mut corrupted = z.clone();
        for j in 0..flips {
            corrupted[1 + j] = if corrupted[1 + j] == 1 { 0 } else { 1 };
        }
        assert_eq!(inst.recover_witness(&corrupted).unwrap(), r);
        // filler symbols Booleanize to 0 before decoding
        let mut filler = z.clone();
        for j in 0..flips {
            // flip a zero position to the filler symbol: Booleanization keeps it 0
            if filler[1 + j] == 0 {
                filler[1 + j] = 2;
            }
        }
        assert_eq!(inst.recover_witness(&filler).unwrap(), r);
    }

    /// Every high-value fast-path assignment decodes to a witness valid for
    /// some nearby challenge: the full chain, exhaustively.
    #[test]
    fn high_value_assignments_decode_to_nearby_witnesses() {
        let limits = Limits::default();
        let inst = build_equality(3);
        let nu = inst.params.nu;
        let gamma_l =
            inst.params.gamma * Rational::from_integer(inst.challenge_len() as i64);
        let one = Rational::one();
        let mut checked = 0usize;
        for rv in 0..8u64 {
            let r = Bits::from_uint_be(rv, 3);
            for zeta in 0..inst.pcpp.proof_alphabet() {
                // fast-path assignment: pivot symbol plus its matching codeword
                let target = &inst.pcpp.sat_assignments[zeta];
                let base = inst.replication * inst.challenge_len();
                let mut z = vec![zeta];
                for j in 0..inst.codeword_len() {
                    z.push(target.get(base + j) as usize);
                }
                let v = inst
                    .psi
                    .value(&Assignment {
                        challenge: r.clone(),
                        merlin: z.clone(),
                    })
                    .unwrap();
                if v > one - nu {
                    let w = inst.recover_witness(&z).unwrap();
                    // some challenge within the smoothing ball accepts w
                    let ok = (0..8u64).any(|sv| {
                        let s = Bits::from_uint_be(sv, 3);
                        let d = hamming::distance(&r, &s).unwrap();
                        Rational::from_integer(d as i64) < gamma_l
                            && inst.circuit.eval(&s, &w).unwrap()
                    });
                    assert!(ok, "r={r} zeta={zeta}");
                    checked += 1;
                }
            }
        }
        assert!(checked > 0, "sweep must exercise the high-value case");
        let _ = limits;
    }

    #[test]
    fn smoothed_prover_degenerate_radius_is_identity_composition() {
        // epsilon small enough that gamma * l < 1: ball radius 0
        let c = equality_circuit(2);
        let code = CodeSpec::reed_solomon(2).unwrap();
        let inst = build(
            &c,
            &code,
            PcppBackend::Enumerative,
            ratio(1, 4),
            &Limits::default(),
        )
        .unwrap();
        assert_eq!(inst.smoothing_radius(), 0);
        let oracle = |r: &Bits| inst.honest_proof(r, r).unwrap();
        let mut prover = SmoothedProver::new(&inst, oracle, 3).unwrap();
        for rv in 0..4u64 {
            let r = Bits::from_uint_be(rv, 2);
            assert_eq!(prover.run(&r).unwrap(), r);
        }
    }

    #[test]
    fn smoothed_prover_never_succeeds_without_oracle_success() {
        let inst = build_equality(2);
        // oracle that always returns a rejecting assignment for a witness
        // that satisfies nothing reachable: filler everywhere
        let nprime = inst.codeword_len();
        let oracle = move |_: &Bits| {
            let mut z = vec![0usize];
            z.extend(std::iter::repeat(2usize).take(nprime));
            z
        };
        let report = smoothed_success(&inst, oracle, 500, 11).unwrap();
        // filler decodes to the zero witness, which only challenge 00 accepts
        assert!(report.success_rate <= 0.40);
        // a truly nowhere-successful oracle on a circuit with no zero witness:
        let mut b = CircuitBuilder::new(2, 2);
        let w0 = b.witness(0);
        let r0 = b.challenge(0);
        let nr0 = b.not(r0);
        let both = b.and(w0, nr0);
        let r1 = b.challenge(1);
        let out = b.and(both, r1);
        let c = b.finish(out).unwrap();
        let code = CodeSpec::reed_solomon(2).unwrap();
        let inst2 = build(&c, &code, PcppBackend::Enumerative, Rational::one(), &Limits::default())
            .unwrap();
        let nprime2 = inst2.codeword_len();
        let zeros = move |_: &Bits| {
            let mut z = vec![0usize];
            z.extend(std::iter::repeat(0usize).take(nprime2));
            z
        };
        let report = smoothed_success(&inst2, zeros, 400, 13).unwrap();
        assert_eq!(report.success_rate, 0.0);
    }

    /// Monte Carlo success of the smoothed prover against a planted oracle
    /// matches the exhaustively computed exact probability within 3 sigma,
    /// and clears the entropy-volume lower bound.
    #[test]
    fn smoothed_prover_planted_success_rate() {
        let inst = build_equality(4);
        assert!(inst.smoothing_radius() >= 1);
        let l = inst.challenge_len();
        // planted oracle: honest on challenges with leading bit 0 (p = 1/2),
        // filler garbage elsewhere
        let nprime = inst.codeword_len();
        let inst_ref = &inst;
        let oracle = move |r: &Bits| {
            if !r.get(0) {
                inst_ref.honest_proof(r, r).unwrap()
            } else {
                let mut z = vec![0usize];
                z.extend(std::iter::repeat(2usize).take(nprime));
                z
            }
        };
        // exact success probability: average over (r, v) pairs
        let radius = inst.smoothing_radius();
        let mut numer = 0u64;
        let mut denom = 0u64;
        for rv in 0..(1u64 << l) {
            let r = Bits::from_uint_be(rv, l);
            for vv in 0..(1u64 << l) {
                let v = Bits::from_uint_be(vv, l);
                if v.weight() > radius {
                    continue;
                }
                denom += 1;
                let shifted = r.xor(&v).unwrap();
                let w = inst.recover_witness(&oracle(&shifted)).unwrap();
                if inst.circuit.eval(&r, &w).unwrap() {
                    numer += 1;
                }
            }
        }
        let exact = numer as f64 / denom as f64;
        let report = smoothed_success(&inst, oracle, 10_000, 77).unwrap();
        assert!(
            (report.success_rate - exact).abs() <= 3.0 * report.std_error.max(1e-4),
            "measured {} vs exact {exact}",
            report.success_rate
        );
        // entropy lower bound p * 2^(-H(gamma) * l)
        let h = binary_entropy_ratio(inst.params.gamma).unwrap();
        let bound = 0.5 * (-(h * l as f64)).exp2();
        assert!(report.success_rate >= bound - 3.0 * report.std_error);
        // the best fixed vector does at least as well as the average
        let best = report.best_fixed_rate.unwrap();
        assert!(best + 1e-9 >= exact);
    }
}
