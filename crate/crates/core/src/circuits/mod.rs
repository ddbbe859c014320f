//! Boolean circuit IR with a designated (challenge, witness) input split,
//! gate-by-gate evaluation, and exhaustive search helpers.
//!
//! Circuits are acyclic by construction: every gate may only reference inputs
//! or strictly earlier gates, which `Circuit::new` verifies.

mod builder;
mod replicate;
mod search;

pub use builder::CircuitBuilder;
pub use replicate::{build_replicated_circuit, ReplicatedCircuit};
pub use search::{find_witness, sat_profile, SatProfile};

use rand::Rng;

use crate::bits::Bits;
use crate::error::{Error, Result};

/// Bounds on every exhaustive enumeration in the crate. Refusing a search is
/// a distinct error ([`Error::LimitExceeded`]), surfaced by the CLI as exit
/// code 3.
#[derive(Clone, Debug)]
pub struct Limits {
    /// Max witness bits for brute-force witness search (2^N evaluations).
    pub max_witness_bits: usize,
    /// Max challenge bits for exhaustive sweeps over the challenge space.
    pub max_challenge_bits: usize,
    /// Max product of Merlin alphabet sizes for brute-force maximization.
    pub max_merlin_space: u64,
    /// Max vertex count for spectral measurement.
    pub max_spectral_dim: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_witness_bits: 24,
            max_challenge_bits: 20,
            max_merlin_space: 1 << 20,
            max_spectral_dim: 1 << 14,
        }
    }
}

impl Limits {
    /// Cap both bit-width knobs at `bits` (CLI `--limit-exhaustive`).
    pub fn with_exhaustive_cap(mut self, bits: usize) -> Self {
        self.max_witness_bits = bits;
        self.max_challenge_bits = bits;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Wire {
    /// Bit of the challenge (r) block.
    Challenge(u32),
    /// Bit of the witness (w) block.
    Witness(u32),
    /// Output of an earlier gate.
    Gate(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateOp {
    And,
    Or,
    Xor,
    Not,
    Const0,
    Const1,
}

impl GateOp {
    pub fn arity(self) -> usize {
        match self {
            GateOp::And | GateOp::Or | GateOp::Xor => 2,
            GateOp::Not => 1,
            GateOp::Const0 | GateOp::Const1 => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateOp::And => "AND",
            GateOp::Or => "OR",
            GateOp::Xor => "XOR",
            GateOp::Not => "NOT",
            GateOp::Const0 => "CONST0",
            GateOp::Const1 => "CONST1",
        }
    }

    pub fn from_name(s: &str) -> Option<GateOp> {
        Some(match s {
            "AND" => GateOp::And,
            "OR" => GateOp::Or,
            "XOR" => GateOp::Xor,
            "NOT" => GateOp::Not,
            "CONST0" => GateOp::Const0,
            "CONST1" => GateOp::Const1,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gate {
    pub op: GateOp,
    pub a: Option<Wire>,
    pub b: Option<Wire>,
}

/// Fan-in-two Boolean circuit over a challenge block of `challenge_len` bits
/// and a witness block of `witness_len` bits, with a single output wire.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    challenge_len: usize,
    witness_len: usize,
    gates: Vec<Gate>,
    output: Wire,
}

impl Circuit {
    pub fn new(
        challenge_len: usize,
        witness_len: usize,
        gates: Vec<Gate>,
        output: Wire,
    ) -> Result<Self> {
        for (idx, gate) in gates.iter().enumerate() {
            let provided = gate.a.is_some() as usize + gate.b.is_some() as usize;
            if provided != gate.op.arity() {
                return Err(Error::InvalidCircuit(format!(
                    "gate {idx} ({}) takes {} operand(s), got {provided}",
                    gate.op.name(),
                    gate.op.arity()
                )));
            }
            for w in [gate.a, gate.b].into_iter().flatten() {
                Self::check_ref(challenge_len, witness_len, idx, w)?;
            }
        }
        Self::check_ref(challenge_len, witness_len, gates.len(), output)?;
        Ok(Circuit {
            challenge_len,
            witness_len,
            gates,
            output,
        })
    }

    fn check_ref(l: usize, n: usize, gate_idx: usize, w: Wire) -> Result<()> {
        let ok = match w {
            Wire::Challenge(i) => (i as usize) < l,
            Wire::Witness(i) => (i as usize) < n,
            Wire::Gate(i) => (i as usize) < gate_idx,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidCircuit(format!(
                "wire {w:?} not available at gate {gate_idx}"
            )))
        }
    }

    pub fn challenge_len(&self) -> usize {
        self.challenge_len
    }

    pub fn witness_len(&self) -> usize {
        self.witness_len
    }

    pub fn input_len(&self) -> usize {
        self.challenge_len + self.witness_len
    }

    /// Gate count.
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> Wire {
        self.output
    }

    pub fn eval(&self, challenge: &Bits, witness: &Bits) -> Result<bool> {
        if challenge.len() != self.challenge_len {
            return Err(Error::LengthMismatch {
                context: "circuit challenge",
                left: challenge.len(),
                right: self.challenge_len,
            });
        }
        if witness.len() != self.witness_len {
            return Err(Error::LengthMismatch {
                context: "circuit witness",
                left: witness.len(),
                right: self.witness_len,
            });
        }
        let mut values = vec![false; self.gates.len()];
        let read = |values: &[bool], w: Wire| match w {
            Wire::Challenge(i) => challenge.get(i as usize),
            Wire::Witness(i) => witness.get(i as usize),
            Wire::Gate(i) => values[i as usize],
        };
        for (idx, gate) in self.gates.iter().enumerate() {
            let a = gate.a.map(|w| read(&values, w));
            let b = gate.b.map(|w| read(&values, w));
            values[idx] = match gate.op {
                GateOp::And => a.unwrap() & b.unwrap(),
                GateOp::Or => a.unwrap() | b.unwrap(),
                GateOp::Xor => a.unwrap() ^ b.unwrap(),
                GateOp::Not => !a.unwrap(),
                GateOp::Const0 => false,
                GateOp::Const1 => true,
            };
        }
        Ok(read(&values, self.output))
    }

    /// Evaluate on a single concatenated input (challenge bits then witness
    /// bits), the view proximity-proof constructions take.
    pub fn eval_full(&self, x: &Bits) -> Result<bool> {
        if x.len() != self.input_len() {
            return Err(Error::LengthMismatch {
                context: "circuit full input",
                left: x.len(),
                right: self.input_len(),
            });
        }
        let r = x.slice(0..self.challenge_len);
        let w = x.slice(self.challenge_len..x.len());
        self.eval(&r, &w)
    }

    /// Same circuit with the witness block widened to `witness_len`; the
    /// extra bits are simply never referenced.
    pub fn pad_witness(&self, witness_len: usize) -> Result<Circuit> {
        if witness_len < self.witness_len {
            return Err(Error::OutOfRange {
                what: "witness padding",
                detail: format!("{witness_len} below current {}", self.witness_len),
            });
        }
        let mut c = self.clone();
        c.witness_len = witness_len;
        Ok(c)
    }

    /// Same circuit with the challenge block widened; extra challenge bits
    /// are ignored by the gates.
    pub fn pad_challenge(&self, challenge_len: usize) -> Result<Circuit> {
        if challenge_len < self.challenge_len {
            return Err(Error::OutOfRange {
                what: "challenge padding",
                detail: format!("{challenge_len} below current {}", self.challenge_len),
            });
        }
        let mut c = self.clone();
        c.challenge_len = challenge_len;
        Ok(c)
    }
}

/// Full truth table of the circuit over all `2^(l+N)` inputs, computed
/// bit-parallel per wire. This is an evaluation route independent of
/// [`Circuit::eval`], used as an oracle in tests.
pub fn truth_table(c: &Circuit, limits: &Limits) -> Result<Vec<bool>> {
    let n = c.input_len();
    if n > limits.max_challenge_bits + limits.max_witness_bits {
        return Err(Error::LimitExceeded {
            what: "truth table inputs",
            needed: n as u64,
            limit: (limits.max_challenge_bits + limits.max_witness_bits) as u64,
        });
    }
    let rows = 1usize << n;
    // column i = truth table of input i over all rows (input bits taken
    // big-endian, matching Bits::from_uint_be enumeration)
    let input_col = |i: usize| -> Vec<bool> {
        (0..rows)
            .map(|row| (row >> (n - 1 - i)) & 1 == 1)
            .collect()
    };
    let mut cols: Vec<Vec<bool>> = Vec::with_capacity(c.gates.len());
    let read = |cols: &Vec<Vec<bool>>, w: Wire| -> Vec<bool> {
        match w {
            Wire::Challenge(i) => input_col(i as usize),
            Wire::Witness(i) => input_col(c.challenge_len + i as usize),
            Wire::Gate(i) => cols[i as usize].clone(),
        }
    };
    for gate in &c.gates {
        let a = gate.a.map(|w| read(&cols, w));
        let b = gate.b.map(|w| read(&cols, w));
        let col = match gate.op {
            GateOp::And => zip_with(a.unwrap(), b.unwrap(), |x, y| x & y),
            GateOp::Or => zip_with(a.unwrap(), b.unwrap(), |x, y| x | y),
            GateOp::Xor => zip_with(a.unwrap(), b.unwrap(), |x, y| x ^ y),
            GateOp::Not => a.unwrap().into_iter().map(|x| !x).collect(),
            GateOp::Const0 => vec![false; rows],
            GateOp::Const1 => vec![true; rows],
        };
        cols.push(col);
    }
    Ok(read(&cols, c.output))
}

fn zip_with(a: Vec<bool>, b: Vec<bool>, f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

/// Random circuit with the given shape: each gate draws a uniform operation
/// and uniform earlier wires, output is the last gate.
pub fn random_circuit<R: Rng>(
    rng: &mut R,
    challenge_len: usize,
    witness_len: usize,
    gate_count: usize,
) -> Circuit {
    assert!(gate_count >= 1);
    let mut gates = Vec::with_capacity(gate_count);
    for idx in 0..gate_count {
        let available = challenge_len + witness_len + idx;
        let pick = |rng: &mut R| -> Wire {
            let i = rng.gen_range(0..available);
            if i < challenge_len {
                Wire::Challenge(i as u32)
            } else if i < challenge_len + witness_len {
                Wire::Witness((i - challenge_len) as u32)
            } else {
                Wire::Gate((i - challenge_len - witness_len) as u32)
            }
        };
        // bias towards binary ops so random circuits stay input-dependent
        let op = match rng.gen_range(0..8u8) {
            0 | 1 => GateOp::And,
            2 | 3 => GateOp::Or,
            4 | 5 => GateOp::Xor,
            6 => GateOp::Not,
            _ => {
                if rng.gen() {
                    GateOp::Const0
                } else {
                    GateOp::Const1
                }
            }
        };
        let (a, b) = match op.arity() {
            2 => (Some(pick(rng)), Some(pick(rng))),
            1 => (Some(pick(rng)), None),
            _ => (None, None),
        };
        gates.push(Gate { op, a, b });
    }
    let output = Wire::Gate(gate_count as u32 - 1);
    Circuit::new(challenge_len, witness_len, gates, output).expect("generated circuit is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn and_rw() -> Circuit {
        // single AND of r0 and w0
        Circuit::new(
            1,
            1,
            vec![Gate {
                op: GateOp::And,
                a: Some(Wire::Challenge(0)),
                b: Some(Wire::Witness(0)),
            }],
            Wire::Gate(0),
        )
        .unwrap()
    }

    #[test]
    fn eval_and_gate() {
        let c = and_rw();
        let one = Bits::ones(1);
        let zero = Bits::zeros(1);
        assert!(c.eval(&one, &one).unwrap());
        assert!(!c.eval(&one, &zero).unwrap());
        assert!(!c.eval(&zero, &one).unwrap());
        assert!(c.eval(&Bits::zeros(2), &one).is_err());
    }

    #[test]
    fn eval_xor_chain() {
        // parity of three challenge bits
        let c = Circuit::new(
            3,
            0,
            vec![
                Gate {
                    op: GateOp::Xor,
                    a: Some(Wire::Challenge(0)),
                    b: Some(Wire::Challenge(1)),
                },
                Gate {
                    op: GateOp::Xor,
                    a: Some(Wire::Gate(0)),
                    b: Some(Wire::Challenge(2)),
                },
            ],
            Wire::Gate(1),
        )
        .unwrap();
        assert!(c.eval(&Bits::ones(3), &Bits::zeros(0)).unwrap());
        assert!(!c.eval(&"110".parse().unwrap(), &Bits::zeros(0)).is_err());
        assert!(!c.eval(&"110".parse().unwrap(), &Bits::zeros(0)).unwrap());
    }

    #[test]
    fn rejects_forward_references() {
        let bad = Circuit::new(
            1,
            0,
            vec![Gate {
                op: GateOp::Not,
                a: Some(Wire::Gate(0)),
                b: None,
            }],
            Wire::Gate(0),
        );
        assert!(bad.is_err());
        let bad_arity = Circuit::new(
            1,
            0,
            vec![Gate {
                op: GateOp::And,
                a: Some(Wire::Challenge(0)),
                b: None,
            }],
            Wire::Gate(0),
        );
        assert!(bad_arity.is_err());
    }

    #[test]
    fn eval_matches_truth_table_oracle() {
        let limits = Limits::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..40 {
            let l = 1 + (trial % 4);
            let n = trial % 3;
            let c = random_circuit(&mut rng, l, n, 1 + (trial % 9));
            let table = truth_table(&c, &limits).unwrap();
            let total = l + n;
            for row in 0..(1usize << total) {
                let x = Bits::from_uint_be(row as u64, total);
                assert_eq!(c.eval_full(&x).unwrap(), table[row]);
            }
        }
    }

    #[test]
    fn padding_ignores_new_bits() {
        let c = and_rw().pad_witness(3).unwrap();
        assert_eq!(c.witness_len(), 3);
        assert!(c.eval(&Bits::ones(1), &"100".parse().unwrap()).unwrap());
        assert!(!c.eval(&Bits::ones(1), &"011".parse().unwrap()).unwrap());
    }
}
