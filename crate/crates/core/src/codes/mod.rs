//! Binary error-correcting codes with certified decoding radius.
//!
//! The default backend serializes a systematic Reed-Solomon code over
//! GF(2^8) to bits. With `k` message symbols and `n = 3k` codeword symbols,
//! `e = k` symbol errors are correctable, and since any `e` bit errors
//! corrupt at most `e` symbols, the certified bit-level decoding radius is
//! `eta = e / (8n) = 1/24` of the codeword length. The serialized map is
//! GF(2)-linear and systematic, which downstream circuit constructions rely
//! on.

pub mod gf256;
mod rs;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::Rational;

pub use rs::RsParams;

/// Largest supported message length in bits for the Reed-Solomon backend
/// (3 * ceil(N/8) evaluation points must fit in GF(256)).
pub const MAX_RS_MESSAGE_BITS: usize = 85 * 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodeBackend {
    /// Systematic Reed-Solomon over GF(2^8), serialized to bits.
    ReedSolomon(RsParams),
    /// Every bit repeated five times; interface-exercise backend only.
    Repetition5,
    /// The identity map; zero decoding radius.
    Identity,
}

impl CodeBackend {
    pub fn id(&self) -> &'static str {
        match self {
            CodeBackend::ReedSolomon(_) => "rs",
            CodeBackend::Repetition5 => "rep5",
            CodeBackend::Identity => "identity",
        }
    }
}

/// A concrete code instance: injective, systematic, GF(2)-linear, with a
/// certified `decode_radius` fraction of correctable bit errors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeSpec {
    message_len: usize,
    codeword_len: usize,
    decode_radius: Rational,
    min_distance: usize,
    systematic_positions: Vec<usize>,
    backend: CodeBackend,
}

impl CodeSpec {
    /// Default code for `message_len` bits: the Reed-Solomon backend.
    pub fn default_for(message_len: usize) -> Result<CodeSpec> {
        CodeSpec::reed_solomon(message_len)
    }

    pub fn reed_solomon(message_len: usize) -> Result<CodeSpec> {
        if message_len == 0 {
            return Err(Error::InvalidCode("message length must be positive".into()));
        }
        if message_len > MAX_RS_MESSAGE_BITS {
            return Err(Error::LimitExceeded {
                what: "reed-solomon message bits",
                needed: message_len as u64,
                limit: MAX_RS_MESSAGE_BITS as u64,
            });
        }
        let k = message_len.div_ceil(8);
        let params = RsParams { k, n: 3 * k };
        Ok(CodeSpec {
            message_len,
            codeword_len: 8 * params.n,
            // e = k correctable symbol errors out of 8n bits: exactly 1/24
            decode_radius: Rational::new(params.correctable_symbols() as i64, (8 * params.n) as i64),
            // distinct messages differ in >= n - k + 1 symbols, so >= that many bits
            min_distance: params.n - params.k + 1,
            systematic_positions: (0..message_len).collect(),
            backend: CodeBackend::ReedSolomon(params),
        })
    }

    pub fn repetition5(message_len: usize) -> Result<CodeSpec> {
        if message_len == 0 {
            return Err(Error::InvalidCode("message length must be positive".into()));
        }
        Ok(CodeSpec {
            message_len,
            codeword_len: 5 * message_len,
            // bounded-distance contract is global: 2 errors anywhere
            decode_radius: Rational::new(2, 5 * message_len as i64),
            min_distance: 5,
            systematic_positions: (0..message_len).map(|i| 5 * i).collect(),
            backend: CodeBackend::Repetition5,
        })
    }

    pub fn identity(message_len: usize) -> Result<CodeSpec> {
        if message_len == 0 {
            return Err(Error::InvalidCode("message length must be positive".into()));
        }
        Ok(CodeSpec {
            message_len,
            codeword_len: message_len,
            decode_radius: Rational::new(0, 1),
            min_distance: 1,
            systematic_positions: (0..message_len).collect(),
            backend: CodeBackend::Identity,
        })
    }

    /// Look up a code family by its CLI id.
    pub fn by_id(id: &str, message_len: usize) -> Result<CodeSpec> {
        match id {
            "rs" => CodeSpec::reed_solomon(message_len),
            "rep5" => CodeSpec::repetition5(message_len),
            "identity" => CodeSpec::identity(message_len),
            other => Err(Error::UnknownBackend(format!("code family {other}"))),
        }
    }

    pub fn message_len(&self) -> usize {
        self.message_len
    }

    pub fn codeword_len(&self) -> usize {
        self.codeword_len
    }

    /// Certified fraction of codeword bits whose corruption still decodes.
    pub fn decode_radius(&self) -> Rational {
        self.decode_radius
    }

    /// `floor(decode_radius * codeword_len)`: correctable bit errors.
    pub fn correctable_bits(&self) -> usize {
        let r = self.decode_radius * Rational::from_integer(self.codeword_len as i64);
        r.floor().to_integer() as usize
    }

    /// Certified lower bound on the minimum distance (exact for the toy
    /// backends, the symbol-level design bound for Reed-Solomon).
    pub fn min_distance(&self) -> usize {
        self.min_distance
    }

    /// Codeword positions carrying the message verbatim, in message order.
    pub fn systematic_positions(&self) -> &[usize] {
        &self.systematic_positions
    }

    pub fn backend(&self) -> &CodeBackend {
        &self.backend
    }

    pub fn encode(&self, message: &Bits) -> Result<Bits> {
        if message.len() != self.message_len {
            return Err(Error::LengthMismatch {
                context: "encode message",
                left: message.len(),
                right: self.message_len,
            });
        }
        Ok(match &self.backend {
            CodeBackend::ReedSolomon(params) => {
                let symbols = rs::encode(*params, &bits_to_symbols(message, params.k));
                symbols_to_bits(&symbols)
            }
            CodeBackend::Repetition5 => {
                message.iter().flat_map(|b| std::iter::repeat(b).take(5)).collect()
            }
            CodeBackend::Identity => message.clone(),
        })
    }

    /// Bounded-distance decoding: `Some(message)` whenever the received word
    /// is within [`CodeSpec::correctable_bits`] of a codeword; outside the
    /// radius the result may be `None` or an arbitrary message.
    pub fn decode(&self, received: &Bits) -> Result<Option<Bits>> {
        if received.len() != self.codeword_len {
            return Err(Error::LengthMismatch {
                context: "decode word",
                left: received.len(),
                right: self.codeword_len,
            });
        }
        Ok(match &self.backend {
            CodeBackend::ReedSolomon(params) => {
                let symbols = bits_to_symbols(received, params.n);
                rs::decode(*params, &symbols).map(|msg| {
                    let all = symbols_to_bits(&msg);
                    all.slice(0..self.message_len)
                })
            }
            CodeBackend::Repetition5 => {
                let mut out = Bits::zeros(self.message_len);
                for i in 0..self.message_len {
                    let ones = (0..5).filter(|&j| received.get(5 * i + j)).count();
                    out.set(i, ones >= 3);
                }
                Some(out)
            }
            CodeBackend::Identity => Some(received.clone()),
        })
    }
}

/// Pack bits into `count` symbols, LSB-first within each symbol, zero-padded.
fn bits_to_symbols(bits: &Bits, count: usize) -> Vec<u8> {
    let mut symbols = vec![0u8; count];
    for i in 0..bits.len() {
        if bits.get(i) {
            symbols[i / 8] |= 1 << (i % 8);
        }
    }
    symbols
}

fn symbols_to_bits(symbols: &[u8]) -> Bits {
    (0..symbols.len() * 8)
        .map(|i| (symbols[i / 8] >> (i % 8)) & 1 == 1)
        .collect()
}
