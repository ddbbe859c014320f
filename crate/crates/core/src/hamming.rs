//! Exact combinatorial primitives: Hamming distance, binary entropy, sphere
//! volumes, and uniform sampling from Hamming balls.
//!
//! Volumes are exact big integers because downstream tests assert against
//! them directly; entropy is `f64` with a documented 1e-12 tolerance since it
//! only drives parameter selection.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::Rational;

/// Distance from a string to a set; `Infinite` is the empty-set convention
/// and compares greater than every finite distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SetDistance {
    Finite(usize),
    Infinite,
}

impl SetDistance {
    pub fn is_finite(self) -> bool {
        matches!(self, SetDistance::Finite(_))
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            SetDistance::Finite(d) => Some(d),
            SetDistance::Infinite => None,
        }
    }
}

/// Number of positions where `x` and `y` disagree.
pub fn distance(x: &Bits, y: &Bits) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            context: "hamming distance",
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(x.iter().zip(y.iter()).filter(|(a, b)| a != b).count())
}

/// Minimum distance from `x` to any member of `set`; `Infinite` on an empty
/// set.
pub fn distance_to_set<'a, I>(x: &Bits, set: I) -> Result<SetDistance>
where
    I: IntoIterator<Item = &'a Bits>,
{
    let mut best: Option<usize> = None;
    for s in set {
        let d = distance(x, s)?;
        best = Some(best.map_or(d, |b| b.min(d)));
        if best == Some(0) {
            break;
        }
    }
    Ok(best.map_or(SetDistance::Infinite, SetDistance::Finite))
}

/// Binary entropy in bits, with the endpoint convention `H(0) = H(1) = 0`.
pub fn binary_entropy(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange {
            what: "entropy argument",
            detail: format!("{t} not in [0,1]"),
        });
    }
    if t == 0.0 || t == 1.0 {
        return Ok(0.0);
    }
    Ok(-(t * t.log2() + (1.0 - t) * (1.0 - t).log2()))
}

/// Entropy of an exact rational argument.
pub fn binary_entropy_ratio(t: Rational) -> Result<f64> {
    let v = (*t.numer() as f64) / (*t.denom() as f64);
    binary_entropy(v)
}

/// Binomial coefficient, exact.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut c = BigUint::one();
    for i in 0..k.min(n - k) {
        c = c * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    c
}

/// Volume of the radius-`k` Hamming ball in `{0,1}^n`: the partial binomial
/// sum up to `k`, exact.
pub fn sphere_volume(n: usize, k: usize) -> Result<BigUint> {
    if k > n {
        return Err(Error::OutOfRange {
            what: "sphere radius",
            detail: format!("k={k} exceeds n={n}"),
        });
    }
    let mut total = BigUint::zero();
    for i in 0..=k {
        total += binomial(n, i);
    }
    Ok(total)
}

/// `ceil(2^(H(k/n) * n))` as an exact integer, the entropy upper bound for
/// [`sphere_volume`] rounded up so comparisons stay conservative.
pub fn entropy_volume_bound(n: usize, k: usize) -> Result<BigUint> {
    let h = binary_entropy(k as f64 / n as f64)?;
    let value = (h * n as f64).exp2().ceil();
    if !value.is_finite() {
        return Err(Error::OutOfRange {
            what: "entropy bound",
            detail: "overflow in 2^(H*n)".into(),
        });
    }
    Ok(BigUint::from(value as u128))
}

/// Exactly uniform sampler over `{x in {0,1}^len : weight(x) <= radius}`.
///
/// Draws the weight class with probability `C(len,j) / V` using exact integer
/// arithmetic, then a uniform subset of that size, so there is no rejection
/// loop and no bias.
pub struct BallSampler {
    len: usize,
    radius: usize,
    cumulative: Vec<BigUint>,
    total: BigUint,
    rng: ChaCha8Rng,
}

impl BallSampler {
    pub fn new(len: usize, radius: usize, seed: u64) -> Result<Self> {
        if radius > len {
            return Err(Error::OutOfRange {
                what: "ball radius",
                detail: format!("radius={radius} exceeds len={len}"),
            });
        }
        let mut cumulative = Vec::with_capacity(radius + 1);
        let mut total = BigUint::zero();
        for j in 0..=radius {
            total += binomial(len, j);
            cumulative.push(total.clone());
        }
        Ok(BallSampler {
            len,
            radius,
            cumulative,
            total,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Exact ball volume `V_{len,radius}`.
    pub fn volume(&self) -> &BigUint {
        &self.total
    }

    pub fn sample(&mut self) -> Bits {
        let draw = self.rng.gen_biguint_below(&self.total);
        let weight = self
            .cumulative
            .iter()
            .position(|c| draw < *c)
            .expect("draw below total");
        self.uniform_weight(weight)
    }

    /// Uniform vector of exact weight `j`, via Floyd's subset sampling.
    fn uniform_weight(&mut self, j: usize) -> Bits {
        let mut out = Bits::zeros(self.len);
        for i in (self.len - j)..self.len {
            let pos = self.rng.gen_range(0..=i);
            if out.get(pos) {
                out.set(i, true);
            } else {
                out.set(pos, true);
            }
        }
        out
    }
}
