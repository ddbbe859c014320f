//! GF(2^8) arithmetic over the polynomial x^8 + x^4 + x^3 + x^2 + 1 (0x11d).
//!
//! Throughput is irrelevant at desk scale, so multiplication is carryless
//! shift-and-reduce and inversion is Fermat exponentiation; no tables.

pub const POLY: u16 = 0x11d;

pub fn add(a: u8, b: u8) -> u8 {
    a ^ b
}

pub fn mul(a: u8, b: u8) -> u8 {
    let mut acc: u16 = 0;
    let mut a16 = a as u16;
    let mut b16 = b as u16;
    while b16 != 0 {
        if b16 & 1 == 1 {
            acc ^= a16;
        }
        a16 <<= 1;
        if a16 & 0x100 != 0 {
            a16 ^= POLY;
        }
        b16 >>= 1;
    }
    acc as u8
}

pub fn pow(mut base: u8, mut exp: u32) -> u8 {
    let mut out = 1u8;
    while exp > 0 {
        if exp & 1 == 1 {
            out = mul(out, base);
        }
        base = mul(base, base);
        exp >>= 1;
    }
    out
}

/// Multiplicative inverse; `a` must be nonzero.
pub fn inv(a: u8) -> u8 {
    debug_assert!(a != 0, "inverse of zero");
    pow(a, 254)
}
