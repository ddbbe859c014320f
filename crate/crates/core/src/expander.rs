//! Explicit regular graphs, spectral gap measurement, random walks, and the
//! walk-Chernoff deviation experiment.
//!
//! The workhorse family is the 8-regular Margulis-Gabber-Galil graph on
//! Z_m x Z_m, built from four affine maps and their inverses (ports p and
//! p+4 are mutually inverse). The normalized second eigenvalue is always
//! measured numerically, never assumed from literature constants.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::sync::OnceLock;

use crate::circuits::{CircuitBuilder, Wire};
use crate::error::{Error, Result};
use crate::Limits;

#[derive(Debug)]
pub struct ExpanderGraph {
    n: usize,
    degree: usize,
    /// Flattened neighbor table: entry `v * degree + port`.
    table: Vec<u32>,
    lambda: OnceLock<f64>,
}

impl Clone for ExpanderGraph {
    fn clone(&self) -> Self {
        let lambda = OnceLock::new();
        if let Some(&l) = self.lambda.get() {
            let _ = lambda.set(l);
        }
        ExpanderGraph {
            n: self.n,
            degree: self.degree,
            table: self.table.clone(),
            lambda,
        }
    }
}

impl ExpanderGraph {
    /// Build from an explicit neighbor table; every vertex must list exactly
    /// `degree` ports and the multigraph must be symmetric (each edge seen
    /// from both endpoints), which keeps the transition matrix symmetric.
    pub fn from_neighbor_table(neighbors: Vec<Vec<usize>>) -> Result<ExpanderGraph> {
        let n = neighbors.len();
        if n < 2 {
            return Err(Error::OutOfRange {
                what: "graph size",
                detail: "need at least 2 vertices".into(),
            });
        }
        let degree = neighbors[0].len();
        if degree == 0 {
            return Err(Error::OutOfRange {
                what: "graph degree",
                detail: "need at least one port".into(),
            });
        }
        let mut table = Vec::with_capacity(n * degree);
        for (v, ports) in neighbors.iter().enumerate() {
            if ports.len() != degree {
                return Err(Error::OutOfRange {
                    what: "graph regularity",
                    detail: format!("vertex {v} has {} ports, expected {degree}", ports.len()),
                });
            }
            for &u in ports {
                if u >= n {
                    return Err(Error::OutOfRange {
                        what: "neighbor index",
                        detail: format!("vertex {v} lists neighbor {u} out of {n}"),
                    });
                }
                table.push(u as u32);
            }
        }
        // symmetry of the edge multiset
        let mut fwd: Vec<(u32, u32)> = Vec::with_capacity(n * degree);
        for v in 0..n {
            for p in 0..degree {
                fwd.push((v as u32, table[v * degree + p]));
            }
        }
        let mut rev: Vec<(u32, u32)> = fwd.iter().map(|&(a, b)| (b, a)).collect();
        fwd.sort_unstable();
        rev.sort_unstable();
        if fwd != rev {
            return Err(Error::OutOfRange {
                what: "graph symmetry",
                detail: "neighbor table is not symmetric as a multigraph".into(),
            });
        }
        Ok(ExpanderGraph {
            n,
            degree,
            table,
            lambda: OnceLock::new(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn neighbor(&self, v: usize, port: usize) -> usize {
        self.table[v * self.degree + port] as usize
    }

    /// Normalized second-largest absolute eigenvalue of the transition
    /// matrix, by power iteration on its square with the uniform vector
    /// deflated. Cached after the first call; tolerance 1e-6.
    pub fn second_eigenvalue(&self, limits: &Limits) -> Result<f64> {
        if self.n > limits.max_spectral_dim {
            return Err(Error::LimitExceeded {
                what: "spectral dimension",
                needed: self.n as u64,
                limit: limits.max_spectral_dim as u64,
            });
        }
        if let Some(&l) = self.lambda.get() {
            return Ok(l);
        }
        let l = self.power_iteration();
        let _ = self.lambda.set(l);
        Ok(l)
    }

    fn apply_transition(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for v in 0..self.n {
            let mut acc = 0.0;
            for p in 0..self.degree {
                acc += x[self.neighbor(v, p)];
            }
            out[v] = acc / self.degree as f64;
        }
        out
    }

    fn power_iteration(&self) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5bec_7a11);
        let n = self.n;
        let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let project = |x: &mut Vec<f64>| {
            let mean = x.iter().sum::<f64>() / n as f64;
            for v in x.iter_mut() {
                *v -= mean;
            }
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                for v in x.iter_mut() {
                    *v /= norm;
                }
            }
        };
        project(&mut x);
        let mut estimate = 0.0f64;
        for _ in 0..200_000 {
            // one application of P^2
            let y = self.apply_transition(&x);
            let mut y = self.apply_transition(&y);
            project(&mut y);
            let z = self.apply_transition(&y);
            let z = self.apply_transition(&z);
            let rayleigh: f64 = y.iter().zip(&z).map(|(a, b)| a * b).sum();
            let next = rayleigh.max(0.0).sqrt();
            let done = (next - estimate).abs() < 1e-9;
            estimate = next;
            x = y;
            if done {
                break;
            }
        }
        estimate.min(1.0)
    }
}

/// Margulis-Gabber-Galil graph on Z_side x Z_side with its port structure
/// retained so steps can also be compiled into circuits (power-of-two sides).
#[derive(Clone, Debug)]
pub struct MargulisGraph {
    pub side: usize,
    graph: ExpanderGraph,
}

/// Port semantics: 0..3 are the maps (x+y, y), (x+y+1, y), (x, y+x),
/// (x, y+x+1); ports 4..7 are their inverses.
fn margulis_step(side: usize, v: usize, port: usize) -> usize {
    let (x, y) = (v / side, v % side);
    let add = |a: usize, b: usize| (a + b) % side;
    let sub = |a: usize, b: usize| (a + side - b % side) % side;
    let (nx, ny) = match port {
        0 => (add(x, y), y),
        1 => (add(add(x, y), 1), y),
        2 => (x, add(y, x)),
        3 => (x, add(add(y, x), 1)),
        4 => (sub(x, y), y),
        5 => (sub(sub(x, y), 1), y),
        6 => (x, sub(y, x)),
        7 => (x, sub(sub(y, x), 1)),
        _ => unreachable!("degree is 8"),
    };
    nx * side + ny
}

pub fn margulis(side: usize) -> Result<MargulisGraph> {
    if side < 2 {
        return Err(Error::OutOfRange {
            what: "margulis side",
            detail: format!("side {side} below 2"),
        });
    }
    let n = side * side;
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|v| (0..8).map(|p| margulis_step(side, v, p)).collect())
        .collect();
    Ok(MargulisGraph {
        side,
        graph: ExpanderGraph::from_neighbor_table(neighbors)?,
    })
}

impl std::ops::Deref for MargulisGraph {
    type Target = ExpanderGraph;

    fn deref(&self) -> &ExpanderGraph {
        &self.graph
    }
}

impl MargulisGraph {
    pub fn graph(&self) -> &ExpanderGraph {
        &self.graph
    }

    /// Compile one walk step into gates: given the current vertex as
    /// (x, y) coordinate words (LSB-first, width log2(side)) and three port
    /// wires, produce the next coordinate words. Requires a power-of-two
    /// side.
    pub fn compile_step(
        &self,
        b: &mut CircuitBuilder,
        x: &[Wire],
        y: &[Wire],
        port: [Wire; 3],
    ) -> Result<(Vec<Wire>, Vec<Wire>)> {
        if !self.side.is_power_of_two() {
            return Err(Error::OutOfRange {
                what: "compiled walk side",
                detail: format!("side {} is not a power of two", self.side),
            });
        }
        let xy0 = b.add_mod(x, y, false); // x+y
        let xy1 = b.add_mod(x, y, true); // x+y+1
        let xs0 = b.sub_mod(x, y); // x-y
        let xs1 = {
            let ny: Vec<Wire> = y.iter().map(|&w| b.not(w)).collect();
            b.add_mod(x, &ny, false) // x-y-1
        };
        let yx0 = b.add_mod(y, x, false); // y+x
        let yx1 = b.add_mod(y, x, true); // y+x+1
        let ys0 = b.sub_mod(y, x); // y-x
        let ys1 = {
            let nx: Vec<Wire> = x.iter().map(|&w| b.not(w)).collect();
            b.add_mod(y, &nx, false) // y-x-1
        };
        let nx = b.mux8(port, [&xy0, &xy1, x, x, &xs0, &xs1, x, x]);
        let ny = b.mux8(port, [y, y, &yx0, &yx1, y, y, &ys0, &ys1]);
        Ok((nx, ny))
    }
}

/// Complete graph K_n as an (n-1)-regular expander (port p of v is the p-th
/// other vertex).
pub fn complete(n: usize) -> Result<ExpanderGraph> {
    if n < 2 {
        return Err(Error::OutOfRange {
            what: "complete graph size",
            detail: format!("n {n} below 2"),
        });
    }
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|v| (0..n).filter(|&u| u != v).collect())
        .collect();
    ExpanderGraph::from_neighbor_table(neighbors)
}

pub fn cycle(n: usize) -> Result<ExpanderGraph> {
    if n < 3 {
        return Err(Error::OutOfRange {
            what: "cycle size",
            detail: format!("n {n} below 3"),
        });
    }
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|v| vec![(v + 1) % n, (v + n - 1) % n])
        .collect();
    ExpanderGraph::from_neighbor_table(neighbors)
}

/// Disjoint union (for spectral tests: disconnection gives lambda = 1).
pub fn disjoint_union(a: &ExpanderGraph, b: &ExpanderGraph) -> Result<ExpanderGraph> {
    if a.degree() != b.degree() {
        return Err(Error::OutOfRange {
            what: "union degree",
            detail: format!("{} vs {}", a.degree(), b.degree()),
        });
    }
    let offset = a.vertex_count();
    let mut neighbors: Vec<Vec<usize>> = (0..a.vertex_count())
        .map(|v| (0..a.degree()).map(|p| a.neighbor(v, p)).collect())
        .collect();
    neighbors.extend(
        (0..b.vertex_count())
            .map(|v| (0..b.degree()).map(|p| b.neighbor(v, p) + offset).collect::<Vec<_>>()),
    );
    ExpanderGraph::from_neighbor_table(neighbors)
}

/// A sampled walk: `vertices[0]` is uniform, each later vertex follows a
/// uniform port.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    pub vertices: Vec<u32>,
    pub seed: u64,
}

impl Walk {
    /// Seed-bit accounting for this walk shape: start vertex plus one port
    /// per step.
    pub fn seed_bits(graph: &ExpanderGraph, len: usize) -> usize {
        let vbits = (graph.vertex_count() as f64).log2().ceil() as usize;
        let pbits = (graph.degree() as f64).log2().ceil() as usize;
        vbits + (len - 1) * pbits
    }
}

/// Uniform random walk of `len` vertices (counting the start).
pub fn sample_walk(graph: &ExpanderGraph, len: usize, seed: u64) -> Result<Walk> {
    if len == 0 {
        return Err(Error::OutOfRange {
            what: "walk length",
            detail: "must be at least 1".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vertices = Vec::with_capacity(len);
    let mut v = rng.gen_range(0..graph.vertex_count());
    vertices.push(v as u32);
    for _ in 1..len {
        v = graph.neighbor(v, rng.gen_range(0..graph.degree()));
        vertices.push(v as u32);
    }
    Ok(Walk { vertices, seed })
}

/// Deterministic walk from an explicit bit string: the start vertex and each
/// port are read big-endian. Exactly uniform when both the vertex count and
/// the degree are powers of two, which is what the block generator needs.
pub fn walk_from_bits(graph: &ExpanderGraph, len: usize, bits: &crate::bits::Bits) -> Result<Vec<u32>> {
    let n = graph.vertex_count();
    let d = graph.degree();
    if !n.is_power_of_two() || !d.is_power_of_two() {
        return Err(Error::OutOfRange {
            what: "bit-seeded walk",
            detail: "vertex count and degree must be powers of two".into(),
        });
    }
    let needed = Walk::seed_bits(graph, len);
    if bits.len() != needed {
        return Err(Error::LengthMismatch {
            context: "walk seed bits",
            left: bits.len(),
            right: needed,
        });
    }
    let vbits = n.trailing_zeros() as usize;
    let pbits = d.trailing_zeros() as usize;
    let read = |from: usize, count: usize| -> usize {
        (0..count).fold(0usize, |acc, i| (acc << 1) | bits.get(from + i) as usize)
    };
    let mut vertices = Vec::with_capacity(len);
    let mut v = read(0, vbits);
    vertices.push(v as u32);
    for step in 1..len {
        let port = read(vbits + (step - 1) * pbits, pbits);
        v = graph.neighbor(v, port);
        vertices.push(v as u32);
    }
    Ok(vertices)
}

/// The closed-form walk deviation bound `2 exp(-eps^2 (1-lambda) m / 4)`.
pub fn walk_chernoff_bound(eps: f64, lambda: f64, len: usize) -> f64 {
    assert!(eps >= 0.0, "eps must be nonnegative");
    assert!((0.0..=1.0).contains(&lambda), "lambda must be in [0,1]");
    assert!(len >= 1);
    2.0 * (-(eps * eps * (1.0 - lambda) * len as f64) / 4.0).exp()
}

/// A [0,1]-valued vertex function with its exact mean.
#[derive(Clone, Debug)]
pub struct VertexFunction {
    values: Vec<f64>,
    mean: f64,
}

impl VertexFunction {
    pub fn new(values: Vec<f64>) -> Result<VertexFunction> {
        for &v in &values {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange {
                    what: "vertex function value",
                    detail: format!("{v} not in [0,1]"),
                });
            }
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        Ok(VertexFunction { values, mean })
    }

    /// Declared-mean constructor; rejects a declaration that disagrees with
    /// the enumerated mean beyond 1e-12.
    pub fn with_mean(values: Vec<f64>, mean: f64) -> Result<VertexFunction> {
        let f = VertexFunction::new(values)?;
        if (f.mean - mean).abs() > 1e-12 {
            return Err(Error::OutOfRange {
                what: "declared mean",
                detail: format!("declared {mean}, exact {}", f.mean),
            });
        }
        Ok(f)
    }

    pub fn indicator(n: usize, members: &[usize]) -> Result<VertexFunction> {
        let mut values = vec![0.0; n];
        for &m in members {
            if m >= n {
                return Err(Error::OutOfRange {
                    what: "indicator member",
                    detail: format!("{m} out of {n}"),
                });
            }
            values[m] = 1.0;
        }
        VertexFunction::new(values)
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn eval(&self, v: usize) -> f64 {
        self.values[v]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A subset of exactly `floor(density * n)` vertices, seeded.
pub fn random_density_subset(n: usize, density: crate::Rational, seed: u64) -> Result<Vec<usize>> {
    let size = (density * crate::Rational::from_integer(n as i64))
        .floor()
        .to_integer();
    if size < 0 || size > n as i64 {
        return Err(Error::OutOfRange {
            what: "subset density",
            detail: format!("density {density} gives size {size} out of {n}"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    // Fisher-Yates prefix
    for i in 0..(size as usize) {
        let j = rng.gen_range(i..n);
        order.swap(i, j);
    }
    let mut subset = order[..size as usize].to_vec();
    subset.sort_unstable();
    Ok(subset)
}

#[derive(Clone, Debug)]
pub struct DeviationEstimate {
    pub trials: usize,
    /// Fraction of walks with |sum f_i(v_i) - sum mu_i| >= eps * m.
    pub frequency: f64,
    pub std_error: f64,
    pub eps: f64,
    pub walk_len: usize,
}

const TRIAL_SHARD: usize = 4096;

/// Measure the walk deviation frequency over `trials` independent walks.
/// Trials are sharded with derived seeds and merged by summation, so the
/// result does not depend on worker count.
pub fn deviation_experiment(
    graph: &ExpanderGraph,
    fs: &[VertexFunction],
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<DeviationEstimate> {
    if fs.is_empty() {
        return Err(Error::OutOfRange {
            what: "function list",
            detail: "need at least one function".into(),
        });
    }
    if trials == 0 {
        return Err(Error::OutOfRange {
            what: "trials",
            detail: "must be at least 1".into(),
        });
    }
    for (i, f) in fs.iter().enumerate() {
        if f.len() != graph.vertex_count() {
            return Err(Error::LengthMismatch {
                context: "vertex function domain",
                left: f.len(),
                right: graph.vertex_count(),
            });
        }
        let _ = i;
    }
    let m = fs.len();
    let mu_total: f64 = fs.iter().map(|f| f.mean()).sum();
    let threshold = eps * m as f64;
    let shards: Vec<(usize, usize)> = (0..trials)
        .step_by(TRIAL_SHARD)
        .map(|start| (start / TRIAL_SHARD, (trials - start).min(TRIAL_SHARD)))
        .collect();
    let hits: usize = shards
        .par_iter()
        .map(|&(shard_idx, count)| {
            let shard_seed = derive_seed(seed, shard_idx as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(shard_seed);
            let mut local = 0usize;
            for _ in 0..count {
                let mut v = rng.gen_range(0..graph.vertex_count());
                let mut sum = fs[0].eval(v);
                for f in &fs[1..] {
                    v = graph.neighbor(v, rng.gen_range(0..graph.degree()));
                    sum += f.eval(v);
                }
                if (sum - mu_total).abs() >= threshold {
                    local += 1;
                }
            }
            local
        })
        .sum();
    let frequency = hits as f64 / trials as f64;
    Ok(DeviationEstimate {
        trials,
        frequency,
        std_error: (frequency * (1.0 - frequency) / trials as f64).sqrt(),
        eps,
        walk_len: m,
    })
}

/// SplitMix64 step, used to derive independent shard seeds.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
