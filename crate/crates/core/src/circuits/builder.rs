//! Structural combinators for assembling circuits: word arithmetic,
//! multiplexers, comparators, and whole-circuit embedding.

use super::{Circuit, Gate, GateOp, Wire};
use crate::error::Result;

pub struct CircuitBuilder {
    challenge_len: usize,
    witness_len: usize,
    gates: Vec<Gate>,
    const0: Option<Wire>,
    const1: Option<Wire>,
}

impl CircuitBuilder {
    pub fn new(challenge_len: usize, witness_len: usize) -> Self {
        CircuitBuilder {
            challenge_len,
            witness_len,
            gates: Vec::new(),
            const0: None,
            const1: None,
        }
    }

    pub fn challenge(&self, i: usize) -> Wire {
        debug_assert!(i < self.challenge_len);
        Wire::Challenge(i as u32)
    }

    pub fn witness(&self, i: usize) -> Wire {
        debug_assert!(i < self.witness_len);
        Wire::Witness(i as u32)
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    fn push(&mut self, op: GateOp, a: Option<Wire>, b: Option<Wire>) -> Wire {
        self.gates.push(Gate { op, a, b });
        Wire::Gate((self.gates.len() - 1) as u32)
    }

    pub fn const0(&mut self) -> Wire {
        if let Some(w) = self.const0 {
            return w;
        }
        let w = self.push(GateOp::Const0, None, None);
        self.const0 = Some(w);
        w
    }

    pub fn const1(&mut self) -> Wire {
        if let Some(w) = self.const1 {
            return w;
        }
        let w = self.push(GateOp::Const1, None, None);
        self.const1 = Some(w);
        w
    }

    pub fn constant(&mut self, v: bool) -> Wire {
        if v {
            self.const1()
        } else {
            self.const0()
        }
    }

    pub fn not(&mut self, a: Wire) -> Wire {
        self.push(GateOp::Not, Some(a), None)
    }

    pub fn and(&mut self, a: Wire, b: Wire) -> Wire {
        self.push(GateOp::And, Some(a), Some(b))
    }

    pub fn or(&mut self, a: Wire, b: Wire) -> Wire {
        self.push(GateOp::Or, Some(a), Some(b))
    }

    pub fn xor(&mut self, a: Wire, b: Wire) -> Wire {
        self.push(GateOp::Xor, Some(a), Some(b))
    }

    pub fn xnor(&mut self, a: Wire, b: Wire) -> Wire {
        let x = self.xor(a, b);
        self.not(x)
    }

    pub fn and_all(&mut self, wires: &[Wire]) -> Wire {
        self.fold_tree(wires, GateOp::And, true)
    }

    pub fn or_all(&mut self, wires: &[Wire]) -> Wire {
        self.fold_tree(wires, GateOp::Or, false)
    }

    pub fn xor_all(&mut self, wires: &[Wire]) -> Wire {
        self.fold_tree(wires, GateOp::Xor, false)
    }

    fn fold_tree(&mut self, wires: &[Wire], op: GateOp, empty: bool) -> Wire {
        match wires.len() {
            0 => self.constant(empty),
            1 => wires[0],
            _ => {
                let mut layer = wires.to_vec();
                while layer.len() > 1 {
                    let mut next = Vec::with_capacity(layer.len().div_ceil(2));
                    for pair in layer.chunks(2) {
                        next.push(if pair.len() == 2 {
                            self.push(op, Some(pair[0]), Some(pair[1]))
                        } else {
                            pair[0]
                        });
                    }
                    layer = next;
                }
                layer[0]
            }
        }
    }

    /// `sel ? if1 : if0`
    pub fn mux(&mut self, sel: Wire, if0: Wire, if1: Wire) -> Wire {
        let nsel = self.not(sel);
        let a = self.and(nsel, if0);
        let b = self.and(sel, if1);
        self.or(a, b)
    }

    pub fn mux_word(&mut self, sel: Wire, if0: &[Wire], if1: &[Wire]) -> Vec<Wire> {
        assert_eq!(if0.len(), if1.len());
        if0.iter()
            .zip(if1)
            .map(|(&a, &b)| self.mux(sel, a, b))
            .collect()
    }

    /// Select among 8 equal-width words by three selector bits
    /// (`sel[0]` = least significant).
    pub fn mux8(&mut self, sel: [Wire; 3], words: [&[Wire]; 8]) -> Vec<Wire> {
        let mut level: Vec<Vec<Wire>> = (0..4)
            .map(|i| self.mux_word(sel[0], words[2 * i], words[2 * i + 1]))
            .collect();
        level = (0..2)
            .map(|i| {
                let (w0, w1) = (level[2 * i].clone(), level[2 * i + 1].clone());
                self.mux_word(sel[1], &w0, &w1)
            })
            .collect();
        let (w0, w1) = (level[0].clone(), level[1].clone());
        self.mux_word(sel[2], &w0, &w1)
    }

    /// Ripple add of two equal-width words, least-significant wire first,
    /// dropping the final carry (arithmetic mod 2^width).
    pub fn add_mod(&mut self, a: &[Wire], b: &[Wire], carry_in: bool) -> Vec<Wire> {
        assert_eq!(a.len(), b.len());
        let mut carry = self.constant(carry_in);
        let mut out = Vec::with_capacity(a.len());
        for (&x, &y) in a.iter().zip(b) {
            let xy = self.xor(x, y);
            out.push(self.xor(xy, carry));
            let gen = self.and(x, y);
            let prop = self.and(carry, xy);
            carry = self.or(gen, prop);
        }
        out
    }

    /// Full-width sum of two words (possibly different widths), keeping the
    /// carry: output is one wire wider than the longer input.
    pub fn add_full(&mut self, a: &[Wire], b: &[Wire]) -> Vec<Wire> {
        let width = a.len().max(b.len());
        let zero = self.const0();
        let pad = |w: &[Wire]| -> Vec<Wire> {
            let mut v = w.to_vec();
            v.resize(width, zero);
            v
        };
        let (a, b) = (pad(a), pad(b));
        let mut carry = self.const0();
        let mut out = Vec::with_capacity(width + 1);
        for (&x, &y) in a.iter().zip(&b) {
            let xy = self.xor(x, y);
            out.push(self.xor(xy, carry));
            let gen = self.and(x, y);
            let prop = self.and(carry, xy);
            carry = self.or(gen, prop);
        }
        out.push(carry);
        out
    }

    /// Subtract with borrow dropped: `a - b` mod 2^width.
    pub fn sub_mod(&mut self, a: &[Wire], b: &[Wire]) -> Vec<Wire> {
        let nb: Vec<Wire> = b.iter().map(|&w| self.not(w)).collect();
        self.add_mod(a, &nb, true)
    }

    /// Population count of the given bits as a binary word (LSB first).
    pub fn popcount(&mut self, bits: &[Wire]) -> Vec<Wire> {
        if bits.is_empty() {
            return vec![self.const0()];
        }
        let mut words: Vec<Vec<Wire>> = bits.iter().map(|&b| vec![b]).collect();
        while words.len() > 1 {
            let mut next = Vec::with_capacity(words.len().div_ceil(2));
            let mut iter = words.chunks(2);
            for pair in &mut iter {
                next.push(if pair.len() == 2 {
                    self.add_full(&pair[0], &pair[1])
                } else {
                    pair[0].clone()
                });
            }
            words = next;
        }
        words.pop().unwrap()
    }

    /// `value >= t` for an unsigned word (LSB first) and a constant.
    pub fn geq_const(&mut self, value: &[Wire], t: u64) -> Wire {
        if t == 0 {
            return self.const1();
        }
        if t >= 1u64 << value.len() {
            return self.const0();
        }
        // borrow chain of value - t; no final borrow means value >= t
        let mut borrow = self.const0();
        for (j, &x) in value.iter().enumerate() {
            let nx = self.not(x);
            borrow = if (t >> j) & 1 == 1 {
                self.or(nx, borrow)
            } else {
                self.and(nx, borrow)
            };
        }
        self.not(borrow)
    }

    /// Conjunction of bitwise equality between two equal-width words.
    pub fn eq_words(&mut self, a: &[Wire], b: &[Wire]) -> Wire {
        assert_eq!(a.len(), b.len());
        let eqs: Vec<Wire> = a.iter().zip(b).map(|(&x, &y)| self.xnor(x, y)).collect();
        self.and_all(&eqs)
    }

    /// Splice another circuit in, rewiring its inputs to the given wires.
    /// Returns the wire carrying the embedded circuit's output.
    pub fn embed(
        &mut self,
        c: &Circuit,
        challenge_wires: &[Wire],
        witness_wires: &[Wire],
    ) -> Wire {
        assert_eq!(challenge_wires.len(), c.challenge_len());
        assert_eq!(witness_wires.len(), c.witness_len());
        let base = self.gates.len() as u32;
        let map = |w: Wire| -> Wire {
            match w {
                Wire::Challenge(i) => challenge_wires[i as usize],
                Wire::Witness(i) => witness_wires[i as usize],
                Wire::Gate(i) => Wire::Gate(base + i),
            }
        };
        for gate in c.gates() {
            self.gates.push(Gate {
                op: gate.op,
                a: gate.a.map(map),
                b: gate.b.map(map),
            });
        }
        map(c.output())
    }

    pub fn finish(self, output: Wire) -> Result<Circuit> {
        Circuit::new(self.challenge_len, self.witness_len, self.gates, output)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::Bits;

    impl CircuitBuilder {
        /// Snapshot the builder as a circuit with the given output wire.
        fn snapshot(&self, output: Wire) -> Circuit {
            Circuit::new(
                self.challenge_len,
                self.witness_len,
                self.gates.clone(),
                output,
            )
            .unwrap()
        }
    }

    /// Challenge bits where wire `i` carries bit `i` (LSB first) of `value`.
    fn lsb_challenge(value: u64, len: usize) -> Bits {
        Bits::new((0..len).map(|i| (value >> i) & 1 == 1).collect())
    }

    fn eval_word(b: &CircuitBuilder, word: &[Wire], r: &Bits) -> u64 {
        let mut got = 0u64;
        for (j, &bit) in word.iter().enumerate() {
            if b.snapshot(bit).eval(r, &Bits::zeros(0)).unwrap() {
                got |= 1 << j;
            }
        }
        got
    }

    #[test]
    fn adders_match_integers() {
        let mut b = CircuitBuilder::new(6, 0);
        let aw: Vec<Wire> = (0..3).map(|i| b.challenge(i)).collect();
        let bw: Vec<Wire> = (0..3).map(|i| b.challenge(3 + i)).collect();
        let sum = b.add_mod(&aw, &bw, false);
        let inc = b.add_mod(&aw, &bw, true);
        let diff = b.sub_mod(&aw, &bw);
        let full = b.add_full(&aw, &bw);
        for x in 0..8u64 {
            for y in 0..8u64 {
                let r = lsb_challenge(x | (y << 3), 6);
                assert_eq!(eval_word(&b, &sum, &r), (x + y) % 8);
                assert_eq!(eval_word(&b, &inc, &r), (x + y + 1) % 8);
                assert_eq!(eval_word(&b, &diff, &r), (x + 8 - y) % 8);
                assert_eq!(eval_word(&b, &full, &r), x + y);
            }
        }
    }

    #[test]
    fn popcount_and_threshold() {
        let mut b = CircuitBuilder::new(5, 0);
        let bits: Vec<Wire> = (0..5).map(|i| b.challenge(i)).collect();
        let count = b.popcount(&bits);
        let flags: Vec<Wire> = (0..=6).map(|t| b.geq_const(&count, t)).collect();
        for value in 0..32u64 {
            let r = lsb_challenge(value, 5);
            assert_eq!(eval_word(&b, &count, &r), u64::from(value.count_ones()));
            for (t, &flag) in flags.iter().enumerate() {
                let got = b.snapshot(flag).eval(&r, &Bits::zeros(0)).unwrap();
                assert_eq!(got, u64::from(value.count_ones()) >= t as u64);
            }
        }
    }

    #[test]
    fn mux8_selects() {
        let mut b = CircuitBuilder::new(3, 0);
        let s = [b.challenge(0), b.challenge(1), b.challenge(2)];
        // word i encodes the constant i in 3 bits
        let words: Vec<Vec<Wire>> = (0..8u64)
            .map(|i| (0..3).map(|j| b.constant((i >> j) & 1 == 1)).collect())
            .collect();
        let refs: [&[Wire]; 8] = std::array::from_fn(|i| words[i].as_slice());
        let out = b.mux8(s, refs);
        for q in 0..8u64 {
            let r = lsb_challenge(q, 3);
            assert_eq!(eval_word(&b, &out, &r), q);
        }
    }

    #[test]
    fn embed_preserves_semantics() {
        let inner = {
            let mut b = CircuitBuilder::new(2, 1);
            let x = b.challenge(0);
            let y = b.challenge(1);
            let w = b.witness(0);
            let xy = b.xor(x, y);
            let out = b.and(xy, w);
            b.finish(out).unwrap()
        };
        // outer: swap the inner challenge inputs, fix witness to const1
        let mut b = CircuitBuilder::new(2, 0);
        let c0 = b.challenge(0);
        let c1 = b.challenge(1);
        let one = b.const1();
        let out = b.embed(&inner, &[c1, c0], &[one]);
        let outer = b.finish(out).unwrap();
        for v in 0..4u64 {
            let r = Bits::from_uint_be(v, 2);
            let expect = inner
                .eval(&Bits::new(vec![r.get(1), r.get(0)]), &Bits::ones(1))
                .unwrap();
            assert_eq!(outer.eval(&r, &Bits::zeros(0)).unwrap(), expect);
        }
    }
}
