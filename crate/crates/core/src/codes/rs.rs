//! Systematic Reed-Solomon over GF(2^8) in the evaluation view, decoded by
//! Berlekamp-Welch.
//!
//! A message of `k` symbols is interpreted as the values of a degree-< k
//! polynomial at evaluation points 0..k; the codeword is its evaluation at
//! points 0..n. The first `k` codeword symbols therefore equal the message
//! (systematic), and the map is GF(2)-linear on the serialized bits.

use super::gf256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RsParams {
    /// Message symbols.
    pub k: usize,
    /// Codeword symbols; `n - k` is even and `(n - k) / 2` symbol errors are
    /// correctable.
    pub n: usize,
}

impl RsParams {
    pub fn correctable_symbols(&self) -> usize {
        (self.n - self.k) / 2
    }
}

fn point(i: usize) -> u8 {
    i as u8
}

/// Evaluate a polynomial (coefficients low-to-high) at `x`.
fn eval_poly(coeffs: &[u8], x: u8) -> u8 {
    let mut acc = 0u8;
    for &c in coeffs.iter().rev() {
        acc = gf256::add(gf256::mul(acc, x), c);
    }
    acc
}

/// Lagrange interpolation through `(point(i), values[i])` for i < k,
/// returning the coefficient vector of the degree-< k polynomial.
fn interpolate(values: &[u8]) -> Vec<u8> {
    let k = values.len();
    let mut coeffs = vec![0u8; k];
    for i in 0..k {
        if values[i] == 0 {
            continue;
        }
        // basis polynomial for point i, expanded coefficient by coefficient
        let mut basis = vec![0u8; k];
        basis[0] = 1;
        let mut degree = 0usize;
        let mut denom = 1u8;
        for j in 0..k {
            if j == i {
                continue;
            }
            // basis *= (x - point(j)); subtraction is xor
            let pj = point(j);
            let mut next = vec![0u8; k];
            for (d, &c) in basis.iter().enumerate().take(degree + 1) {
                if c == 0 {
                    continue;
                }
                next[d + 1] ^= c;
                next[d] ^= gf256::mul(c, pj);
            }
            basis = next;
            degree += 1;
            denom = gf256::mul(denom, gf256::add(point(i), pj));
        }
        let scale = gf256::mul(values[i], gf256::inv(denom));
        for d in 0..k {
            coeffs[d] ^= gf256::mul(basis[d], scale);
        }
    }
    coeffs
}

pub fn encode(params: RsParams, message: &[u8]) -> Vec<u8> {
    assert_eq!(message.len(), params.k);
    let coeffs = interpolate(message);
    (0..params.n).map(|i| eval_poly(&coeffs, point(i))).collect()
}

/// Berlekamp-Welch decoding: returns the message symbols when the received
/// word is within the correctable radius, `None` otherwise.
///
/// Solves, over GF(256), for an error-locator E (degree <= e) and a product
/// polynomial F (degree <= e + k - 1) with F(x_i) = y_i * E(x_i) at every
/// point; any nonzero solution yields the message as F / E. The recovered
/// codeword is verified against the received word before accepting.
pub fn decode(params: RsParams, received: &[u8]) -> Option<Vec<u8>> {
    assert_eq!(received.len(), params.n);
    let (n, k) = (params.n, params.k);
    let e = params.correctable_symbols();
    if e == 0 {
        // no redundancy: accept as-is
        return Some(received[..k].to_vec());
    }
    // unknowns: E coefficients (e + 1), F coefficients (e + k)
    let cols = (e + 1) + (e + k);
    let mut m = vec![vec![0u8; cols + 1]; n];
    for (i, row) in m.iter_mut().enumerate() {
        let x = point(i);
        let y = received[i];
        let mut xp = 1u8;
        for j in 0..=e {
            row[j] = gf256::mul(y, xp);
            xp = gf256::mul(xp, x);
        }
        let mut xp = 1u8;
        for j in 0..(e + k) {
            row[e + 1 + j] = xp;
            xp = gf256::mul(xp, x);
        }
    }
    let solution = kernel_vector(&mut m, n, cols)?;
    let e_coeffs = &solution[..=e];
    let f_coeffs = &solution[e + 1..];
    if e_coeffs.iter().all(|&c| c == 0) {
        return None;
    }
    let quotient = poly_div_exact(f_coeffs, e_coeffs)?;
    if quotient.len() > k {
        return None;
    }
    let mut coeffs = quotient;
    coeffs.resize(k, 0);
    // verify: the corrected codeword must be within e symbols of received
    let mut mismatches = 0usize;
    let mut codeword = Vec::with_capacity(n);
    for (i, &r) in received.iter().enumerate() {
        let v = eval_poly(&coeffs, point(i));
        if v != r {
            mismatches += 1;
        }
        codeword.push(v);
    }
    if mismatches > e {
        return None;
    }
    Some(codeword[..k].to_vec())
}

/// Gaussian elimination for one nonzero kernel vector of the homogeneous
/// system `m * v = 0` (the trailing column of `m` is scratch space and stays
/// zero). Returns `None` only if the kernel is trivial, which cannot happen
/// when cols > rank.
fn kernel_vector(m: &mut [Vec<u8>], rows: usize, cols: usize) -> Option<Vec<u8>> {
    let mut pivot_of_col = vec![usize::MAX; cols];
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, p);
        let inv = gf256::inv(m[rank][col]);
        for c in col..cols {
            m[rank][c] = gf256::mul(m[rank][c], inv);
        }
        for r in 0..rows {
            if r != rank && m[r][col] != 0 {
                let factor = m[r][col];
                for c in col..cols {
                    m[r][c] ^= gf256::mul(factor, m[rank][c]);
                }
            }
        }
        pivot_of_col[col] = rank;
        rank += 1;
        if rank == rows {
            break;
        }
    }
    let free_col = (0..cols).rev().find(|&c| pivot_of_col[c] == usize::MAX)?;
    let mut v = vec![0u8; cols];
    v[free_col] = 1;
    for col in 0..cols {
        let p = pivot_of_col[col];
        if p != usize::MAX {
            v[col] = m[p][free_col];
        }
    }
    Some(v)
}

/// Exact polynomial division; `None` if the remainder is nonzero.
fn poly_div_exact(num: &[u8], den: &[u8]) -> Option<Vec<u8>> {
    let dd = den.iter().rposition(|&c| c != 0)?;
    let mut rem: Vec<u8> = num.to_vec();
    let nd = match rem.iter().rposition(|&c| c != 0) {
        Some(d) => d,
        None => return Some(vec![0]),
    };
    if nd < dd {
        return None;
    }
    let lead_inv = gf256::inv(den[dd]);
    let mut quot = vec![0u8; nd - dd + 1];
    for d in (dd..=nd).rev() {
        let c = rem[d];
        if c == 0 {
            continue;
        }
        let q = gf256::mul(c, lead_inv);
        quot[d - dd] = q;
        for (j, &dc) in den.iter().enumerate().take(dd + 1) {
            rem[d - dd + j] ^= gf256::mul(q, dc);
        }
    }
    if rem.iter().any(|&c| c != 0) {
        return None;
    }
    Some(quot)
}
