//! The oriented line graph: vertices are oriented edges, with an arc e -> f
//! whenever f leaves the vertex where e ends and f is not the reversal of e.
//! Its 0/1 adjacency matrix T drives the walk counts behind the zeta
//! function.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::DirectedEdgeSet;

#[derive(Debug, Clone)]
pub struct OrientedLineGraph {
    edges: DirectedEdgeSet,
    successors: Vec<Vec<usize>>,
}

impl OrientedLineGraph {
    pub fn build(edges: DirectedEdgeSet) -> Self {
        let successors = (0..edges.len())
            .map(|e| {
                (0..edges.len())
                    .filter(|&f| edges.terminal(e) == edges.initial(f) && edges.initial(e) != edges.terminal(f))
                    .collect()
            })
            .collect();
        Self { edges, successors }
    }

    /// Number of vertices, 2m.
    pub fn dimension(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_set(&self) -> &DirectedEdgeSet {
        &self.edges
    }

    pub fn successors(&self, e: usize) -> &[usize] {
        &self.successors[e]
    }

    pub fn has_arc(&self, e: usize, f: usize) -> bool {
        self.successors[e].binary_search(&f).is_ok()
    }

    pub fn arc_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    /// Dense copy of T, row-major.
    pub fn matrix(&self) -> Vec<Vec<u8>> {
        let d = self.dimension();
        let mut rows = vec![vec![0u8; d]; d];
        for (e, row) in rows.iter_mut().enumerate() {
            for &f in &self.successors[e] {
                row[f] = 1;
            }
        }
        rows
    }

    /// y = T x
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (yi, succ) in y.iter_mut().zip(&self.successors) {
            *yi = succ.iter().map(|&f| x[f]).sum();
        }
    }

    /// Exact traces of T^1..T^max_power.
    ///
    /// For every basis vector the walk-count vector is pushed forward one
    /// step at a time in big-integer arithmetic; the diagonal entry after k
    /// steps is the number of closed walks of length k at that vertex.
    pub fn traces(&self, max_power: usize) -> TraceVector {
        let d = self.dimension();
        let mut totals = vec![BigUint::zero(); max_power];
        let mut current = vec![BigUint::zero(); d];
        let mut next = vec![BigUint::zero(); d];
        for start in 0..d {
            current.iter_mut().for_each(|c| c.set_zero());
            current[start] = BigUint::from(1u32);
            for total in totals.iter_mut() {
                next.iter_mut().for_each(|c| c.set_zero());
                for (e, count) in current.iter().enumerate() {
                    if count.is_zero() {
                        continue;
                    }
                    for &f in &self.successors[e] {
                        next[f] += count;
                    }
                }
                std::mem::swap(&mut current, &mut next);
                *total += &current[start];
            }
        }
        TraceVector { values: totals }
    }

    pub fn spectral_radius(&self, config: &PowerIteration) -> Result<SpectralRadius> {
        config.run(self)
    }
}

/// trace(T^k) for k = 1..=K.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceVector {
    values: Vec<BigUint>,
}

impl TraceVector {
    pub fn from_values(values: Vec<BigUint>) -> Self {
        Self { values }
    }

    /// Largest power available.
    pub fn max_power(&self) -> usize {
        self.values.len()
    }

    /// trace(T^k), 1-based.
    pub fn get(&self, k: usize) -> &BigUint {
        &self.values[k - 1]
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }
}

/// Power-iteration settings for the Perron root of T.
#[derive(Debug, Clone, Copy)]
pub struct PowerIteration {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for PowerIteration {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iterations: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralRadius {
    pub lambda: f64,
    /// ||T v - lambda v|| / ||v|| at the returned vector.
    pub residual: f64,
    pub tolerance: f64,
    pub iterations: usize,
}

impl SpectralRadius {
    /// Upper end of the interval in which zeta may be evaluated, shrunk by
    /// twice the residual so borderline arguments are refused.
    pub fn domain_limit(&self) -> f64 {
        1.0 / (self.lambda + 2.0 * self.residual)
    }
}

impl PowerIteration {
    /// Iterates with T + I rather than T: for a bipartite graph T also has
    /// the eigenvalue -lambda, and the unit shift separates the Perron root
    /// from every other eigenvalue of the same modulus.
    fn run(&self, olg: &OrientedLineGraph) -> Result<SpectralRadius> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParams(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        let d = olg.dimension();
        let mut v = vec![1.0 / (d as f64).sqrt(); d];
        let mut tv = vec![0.0; d];
        let mut residual = f64::INFINITY;
        for it in 1..=self.max_iterations {
            olg.apply(&v, &mut tv);
            let vv: f64 = v.iter().map(|x| x * x).sum();
            let lambda = v.iter().zip(&tv).map(|(a, b)| a * b).sum::<f64>() / vv;
            residual = v
                .iter()
                .zip(&tv)
                .map(|(a, b)| (b - lambda * a).powi(2))
                .sum::<f64>()
                .sqrt()
                / vv.sqrt();
            if residual <= self.tol * lambda.abs().max(1.0) {
                return Ok(SpectralRadius {
                    lambda,
                    residual,
                    tolerance: self.tol,
                    iterations: it,
                });
            }
            let norm = v.iter().zip(&tv).map(|(a, b)| (a + b).powi(2)).sum::<f64>().sqrt();
            for (a, b) in v.iter_mut().zip(&tv) {
                *a = (*a + b) / norm;
            }
        }
        Err(Error::NoConvergence {
            iterations: self.max_iterations,
            residual,
        })
    }
}

/// (trace(T^k1) / trace(T^k0))^(1 / (k1 - k0)) for the two largest powers
/// with nonzero trace; tends to the Perron root. Using the last two nonzero
/// traces rather than consecutive ones handles periodic T (bipartite
/// graphs, graphs whose cycle lengths share a common factor).
pub fn trace_ratio_estimate(traces: &TraceVector) -> Option<f64> {
    let mut nonzero = (1..=traces.max_power()).rev().filter(|&k| !traces.get(k).is_zero());
    let k1 = nonzero.next()?;
    let k0 = nonzero.next()?;
    let hi = traces.get(k1).to_f64()?;
    let lo = traces.get(k0).to_f64()?;
    Some((hi / lo).powf(1.0 / (k1 - k0) as f64))
}

/// max over k of (trace(T^k) / 2m)^(1/k). Since every eigenvalue has modulus
/// at most lambda, trace(T^k) <= 2m lambda^k and this never exceeds lambda.
pub fn trace_lower_bound(traces: &TraceVector, dimension: usize) -> f64 {
    (1..=traces.max_power())
        .filter_map(|k| {
            let t = traces.get(k).to_f64()?;
            (t > 0.0).then(|| (t / dimension as f64).powf(1.0 / k as f64))
        })
        .fold(0.0, f64::max)
}
