//! Proximity-proof backends: 2-CSPs that test an input against a circuit's
//! accepting set, with completeness 1 and soundness degrading linearly in
//! the input's Hamming distance from that set.
//!
//! The reference backend is enumerative: one proof variable indexing the
//! accepting set, and one constraint per input bit checking agreement with
//! the indexed assignment. Its certified security is exactly 1, at the cost
//! of a proof alphabet that grows with the accepting set (recorded in the
//! instance metadata and surfaced by the CLI).

use crate::bits::Bits;
use crate::circuits::{Circuit, Limits};
use crate::csp::{Constraint, Csp, MerlinVar, VarId};
use crate::error::{Error, Result};
use crate::hamming::{self, SetDistance};
use crate::Rational;

use num_traits::One;

/// A proximity-proof instance for some circuit: the testing 2-CSP plus the
/// data needed to produce honest proofs and to audit the construction.
#[derive(Clone, Debug)]
pub struct PcppInstance {
    pub csp: Csp,
    pub claimed_security: Rational,
    pub backend: String,
    /// Number of tested input bits (the CSP's Arthur variables).
    pub input_len: usize,
    /// Number of proof variables (the CSP's Merlin variables).
    pub proof_len: usize,
    /// False when the proof alphabet scales with the instance, as for the
    /// enumerative backend.
    pub constant_alphabet: bool,
    /// Accepting assignments of the tested circuit, sorted lexicographically;
    /// proof symbol `z` points at `sat_assignments[z]`.
    pub sat_assignments: Vec<Bits>,
}

impl PcppInstance {
    /// Proof alphabet size of the single enumerative proof variable.
    pub fn proof_alphabet(&self) -> usize {
        self.csp.merlin_vars()[0].alphabet
    }

    /// Honest proof for an accepting input.
    pub fn honest_proof(&self, x: &Bits) -> Result<Vec<usize>> {
        if x.len() != self.input_len {
            return Err(Error::LengthMismatch {
                context: "honest proof input",
                left: x.len(),
                right: self.input_len,
            });
        }
        match self.sat_assignments.binary_search(x) {
            Ok(idx) => Ok(vec![idx]),
            Err(_) => Err(Error::Precondition(format!(
                "input {x} is not accepted by the tested circuit"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PcppBackend {
    Enumerative,
}

impl PcppBackend {
    pub fn from_id(id: &str) -> Result<PcppBackend> {
        match id {
            "enumerative" => Ok(PcppBackend::Enumerative),
            other => Err(Error::UnknownBackend(other.into())),
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            PcppBackend::Enumerative => "enumerative",
        }
    }

    /// Security the backend promises before certification.
    pub fn claimed_security(self) -> Rational {
        match self {
            PcppBackend::Enumerative => Rational::one(),
        }
    }

    pub fn build(self, c: &Circuit, limits: &Limits) -> Result<PcppInstance> {
        match self {
            PcppBackend::Enumerative => build_enumerative(c, limits),
        }
    }
}

/// Enumerative backend: brute-force the circuit's accepting set and emit the
/// indexing CSP. The input space must be enumerable.
pub fn build_enumerative(c: &Circuit, limits: &Limits) -> Result<PcppInstance> {
    let n = c.input_len();
    let cap = limits.max_challenge_bits + limits.max_witness_bits;
    if n > cap {
        return Err(Error::LimitExceeded {
            what: "pcpp input enumeration bits",
            needed: n as u64,
            limit: cap as u64,
        });
    }
    let mut accepting = Vec::new();
    for v in 0..(1u64 << n) {
        let x = Bits::from_uint_be(v, n);
        if c.eval_full(&x)? {
            accepting.push(x);
        }
    }
    // enumeration order is already lexicographic
    from_accepting_set(n, accepting)
}

/// Build the enumerative instance directly from a known accepting set
/// (callers that can enumerate it structurally avoid the 2^n sweep).
pub fn from_accepting_set(input_len: usize, mut accepting: Vec<Bits>) -> Result<PcppInstance> {
    for a in &accepting {
        if a.len() != input_len {
            return Err(Error::LengthMismatch {
                context: "accepting assignment",
                left: a.len(),
                right: input_len,
            });
        }
    }
    accepting.sort();
    accepting.dedup();

    let csp = if accepting.is_empty() {
        // single always-false constraint on the proof variable
        Csp::new(
            input_len,
            vec![MerlinVar {
                name: "z0".into(),
                alphabet: 1,
            }],
            vec![Constraint {
                scope: vec![VarId::Merlin(0)],
                table: vec![false],
            }],
            2,
        )?
    } else {
        let alphabet = accepting.len();
        let mut constraints = Vec::with_capacity(input_len);
        for i in 0..input_len {
            // row-major over (z, x_i): satisfied iff x_i equals bit i of the
            // z-th accepting assignment
            let mut table = Vec::with_capacity(alphabet * 2);
            for a in &accepting {
                let bit = a.get(i);
                table.push(!bit);
                table.push(bit);
            }
            constraints.push(Constraint {
                scope: vec![VarId::Merlin(0), VarId::Arthur(i as u32)],
                table,
            });
        }
        Csp::new(
            input_len,
            vec![MerlinVar {
                name: "z0".into(),
                alphabet,
            }],
            constraints,
            2,
        )?
    };
    let mut csp = csp;
    csp.fast_pivot = Some(0);
    Ok(PcppInstance {
        csp,
        claimed_security: Rational::one(),
        backend: "enumerative".into(),
        input_len,
        proof_len: 1,
        constant_alphabet: false,
        sat_assignments: accepting,
    })
}

/// Measured security of an instance against its circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SecurityBound {
    /// Minimum over inputs at finite positive distance of
    /// `n * (1 - max value) / distance`.
    Measured(Rational),
    /// No input lies at finite positive distance (circuit constant).
    Vacuous,
}

impl SecurityBound {
    pub fn at_least(self, threshold: Rational) -> bool {
        match self {
            SecurityBound::Measured(b) => b >= threshold,
            SecurityBound::Vacuous => true,
        }
    }
}

/// Brute-force security certification, independent of the backend: the
/// accepting set is recomputed by direct evaluation and the max proof value
/// comes from the brute-force enumerator, not the fast path.
pub fn certify_security(c: &Circuit, inst: &PcppInstance, limits: &Limits) -> Result<SecurityBound> {
    let n = c.input_len();
    if n != inst.input_len {
        return Err(Error::LengthMismatch {
            context: "certify input length",
            left: n,
            right: inst.input_len,
        });
    }
    let cap = limits.max_challenge_bits + limits.max_witness_bits;
    if n > cap {
        return Err(Error::LimitExceeded {
            what: "certification input bits",
            needed: n as u64,
            limit: cap as u64,
        });
    }
    let mut accepting = Vec::new();
    for v in 0..(1u64 << n) {
        let x = Bits::from_uint_be(v, n);
        if c.eval_full(&x)? {
            accepting.push(x);
        }
    }
    let mut best: Option<Rational> = None;
    for v in 0..(1u64 << n) {
        let x = Bits::from_uint_be(v, n);
        let d = match hamming::distance_to_set(&x, &accepting)? {
            SetDistance::Finite(0) | SetDistance::Infinite => continue,
            SetDistance::Finite(d) => d,
        };
        let (max_val, _) = inst.csp.max_value_brute(&x, limits)?;
        let bound = Rational::from_integer(n as i64) * (Rational::one() - max_val)
            / Rational::from_integer(d as i64);
        best = Some(best.map_or(bound, |b: Rational| b.min(bound)));
    }
    Ok(best.map_or(SecurityBound::Vacuous, SecurityBound::Measured))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{random_circuit, Gate, GateOp, Wire};
    use crate::csp::Assignment;
    use crate::ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn and_xx() -> Circuit {
        // AND of two inputs, both in the challenge block
        Circuit::new(
            2,
            0,
            vec![Gate {
                op: GateOp::And,
                a: Some(Wire::Challenge(0)),
                b: Some(Wire::Challenge(1)),
            }],
            Wire::Gate(0),
        )
        .unwrap()
    }

    fn const_circuit(n: usize, v: bool) -> Circuit {
        Circuit::new(
            n,
            0,
            vec![Gate {
                op: if v { GateOp::Const1 } else { GateOp::Const0 },
                a: None,
                b: None,
            }],
            Wire::Gate(0),
        )
        .unwrap()
    }

    #[test]
    fn and_circuit_completeness_and_half_value() {
        let limits = Limits::default();
        let c = and_xx();
        let inst = build_enumerative(&c, &limits).unwrap();
        assert_eq!(inst.proof_alphabet(), 1);
        // honest proof on x=11 reaches value 1
        let x: Bits = "11".parse().unwrap();
        let z = inst.honest_proof(&x).unwrap();
        let v = inst
            .csp
            .value(&Assignment {
                challenge: x,
                merlin: z,
            })
            .unwrap();
        assert_eq!(v, Rational::one());
        // x=01 is at distance 1 from {11}: max value is 1/2
        let x: Bits = "01".parse().unwrap();
        let (max, _) = inst.csp.max_value_brute(&x, &limits).unwrap();
        assert_eq!(max, ratio(1, 2));
        // and the certified security is 1
        assert_eq!(
            certify_security(&c, &inst, &limits).unwrap(),
            SecurityBound::Measured(Rational::one())
        );
    }

    #[test]
    fn unsatisfiable_circuit_rejects_everything() {
        let limits = Limits::default();
        let c = const_circuit(3, false);
        let inst = build_enumerative(&c, &limits).unwrap();
        assert_eq!(inst.proof_alphabet(), 1);
        for v in 0..8u64 {
            let x = Bits::from_uint_be(v, 3);
            let (max, _) = inst.csp.max_value_brute(&x, &limits).unwrap();
            assert_eq!(max, ratio(0, 1));
        }
        assert!(inst.honest_proof(&Bits::zeros(3)).is_err());
        assert_eq!(
            certify_security(&c, &inst, &limits).unwrap(),
            SecurityBound::Vacuous
        );
    }

    #[test]
    fn tautology_is_vacuous() {
        let limits = Limits::default();
        let c = const_circuit(2, true);
        let inst = build_enumerative(&c, &limits).unwrap();
        assert_eq!(inst.proof_alphabet(), 4);
        assert_eq!(
            certify_security(&c, &inst, &limits).unwrap(),
            SecurityBound::Vacuous
        );
    }

    #[test]
    fn backend_registry_dispatch() {
        let limits = Limits::default();
        let backend = PcppBackend::from_id("enumerative").unwrap();
        assert!(PcppBackend::from_id("dinur").is_err());
        let c = and_xx();
        let inst = backend.build(&c, &limits).unwrap();
        assert_eq!(inst.backend, "enumerative");
        assert_eq!(inst.csp.arity(), 2);
        assert!(!inst.constant_alphabet);
    }

    /// Completeness and the linear soundness bound on random circuits, with
    /// exact rationals throughout.
    #[test]
    fn soundness_bound_on_random_circuits() {
        let limits = Limits::default();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for trial in 0..25 {
            let n = 2 + trial % 4;
            let c = random_circuit(&mut rng, n, 0, 1 + trial % 6);
            let inst = build_enumerative(&c, &limits).unwrap();
            let accepting = inst.sat_assignments.clone();
            for v in 0..(1u64 << n) {
                let x = Bits::from_uint_be(v, n);
                let (max, _) = inst.csp.max_value_brute(&x, &limits).unwrap();
                if c.eval_full(&x).unwrap() {
                    let z = inst.honest_proof(&x).unwrap();
                    let val = inst
                        .csp
                        .value(&Assignment {
                            challenge: x,
                            merlin: z,
                        })
                        .unwrap();
                    assert_eq!(val, Rational::one());
                } else {
                    match hamming::distance_to_set(&x, &accepting).unwrap() {
                        SetDistance::Finite(d) => {
                            let bound = Rational::one()
                                - inst.claimed_security * ratio(d as i64, n as i64);
                            assert!(max <= bound, "x={x} max={max} bound={bound}");
                        }
                        SetDistance::Infinite => {
                            assert_eq!(max, ratio(0, 1));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn structural_set_agrees_with_enumeration() {
        let limits = Limits::default();
        let c = and_xx();
        let by_enum = build_enumerative(&c, &limits).unwrap();
        let by_set = from_accepting_set(2, vec!["11".parse().unwrap()]).unwrap();
        assert_eq!(by_enum.sat_assignments, by_set.sat_assignments);
        assert_eq!(by_enum.csp, by_set.csp);
    }
}
