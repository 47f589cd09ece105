//! Prime cycles by exhaustive search, and the Euler product they generate.
//!
//! A prime is a rotation class of closed walks in the oriented line graph
//! that never backtrack (not even across the seam from last edge to first)
//! and are not a power of a shorter walk. These searches are exponential
//! and meant for small graphs; they serve as oracles for the trace-based
//! machinery.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::line_graph::OrientedLineGraph;
use crate::series::{Rational, TruncatedPowerSeries};

pub const DEFAULT_DFS_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PrimeCycle {
    /// Oriented-edge indices in canonical (lexicographically least) rotation.
    edges: Vec<usize>,
}

impl PrimeCycle {
    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// All primes up to a length bound. `max_length` records the bound so that
/// callers can tell whether the list is complete for a given order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeList {
    pub max_length: usize,
    pub cycles: Vec<PrimeCycle>,
}

impl PrimeList {
    /// Number of primes of each length.
    pub fn histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for p in &self.cycles {
            *h.entry(p.len()).or_insert(0) += 1;
        }
        h
    }
}

struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    fn new(limit: u64) -> Self {
        Self { limit, used: 0 }
    }

    fn step(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            return Err(Error::BudgetExceeded { budget: self.limit });
        }
        Ok(())
    }
}

/// True when `w` is its own least rotation and is not a proper power.
fn is_canonical_primitive(w: &[usize]) -> bool {
    let n = w.len();
    for r in 1..n {
        let rotated = w[r..].iter().chain(&w[..r]);
        match rotated.cmp(w.iter()) {
            std::cmp::Ordering::Less => return false,
            // equal to a nontrivial rotation: w is periodic, hence a power
            std::cmp::Ordering::Equal => return false,
            std::cmp::Ordering::Greater => {}
        }
    }
    true
}

/// Enumerates all primes of length at most `max_length`.
///
/// Each class is found once, from its canonical rotation: the walk starts
/// at its smallest edge and only visits edges not below it.
pub fn enumerate_primes(olg: &OrientedLineGraph, max_length: usize, budget: u64) -> Result<PrimeList> {
    let mut budget = Budget::new(budget);
    let mut cycles = Vec::new();
    let mut path = Vec::with_capacity(max_length);
    for start in 0..olg.dimension() {
        path.clear();
        path.push(start);
        extend(olg, start, max_length, &mut path, &mut cycles, &mut budget)?;
    }
    cycles.sort_by(|a: &PrimeCycle, b| a.len().cmp(&b.len()).then_with(|| a.edges.cmp(&b.edges)));
    Ok(PrimeList { max_length, cycles })
}

fn extend(
    olg: &OrientedLineGraph,
    start: usize,
    max_length: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<PrimeCycle>,
    budget: &mut Budget,
) -> Result<()> {
    budget.step()?;
    let last = *path.last().expect("path is never empty");
    // closing arc last -> start also excludes a backtrack across the seam
    if olg.has_arc(last, start) && is_canonical_primitive(path) {
        out.push(PrimeCycle { edges: path.clone() });
    }
    if path.len() == max_length {
        return Ok(());
    }
    for &next in olg.successors(last) {
        if next < start {
            continue;
        }
        path.push(next);
        let r = extend(olg, start, max_length, path, out, budget);
        path.pop();
        r?;
    }
    Ok(())
}

/// Counts closed walks of length `k` in the oriented line graph by
/// exhaustive depth-first search from every start vertex.
pub fn count_closed_walks_bruteforce(olg: &OrientedLineGraph, k: usize, budget: u64) -> Result<BigUint> {
    fn walk(olg: &OrientedLineGraph, start: usize, at: usize, remaining: usize, budget: &mut Budget) -> Result<u64> {
        budget.step()?;
        if remaining == 0 {
            return Ok(u64::from(at == start));
        }
        let mut total = 0;
        for &next in olg.successors(at) {
            total += walk(olg, start, next, remaining - 1, budget)?;
        }
        Ok(total)
    }

    let mut budget = Budget::new(budget);
    let mut total = BigUint::zero();
    for start in 0..olg.dimension() {
        total += walk(olg, start, start, k, &mut budget)?;
    }
    Ok(total)
}

/// prod_P (1 - x^len(P))^(-1) truncated at `order`.
pub fn euler_product_series(primes: &PrimeList, order: usize) -> Result<TruncatedPowerSeries<Rational>> {
    if primes.max_length < order {
        return Err(Error::IncompletePrimeList {
            max_length: primes.max_length,
            order,
        });
    }
    let mut coeffs = vec![BigUint::zero(); order + 1];
    coeffs[0] = BigUint::from(1u32);
    for p in &primes.cycles {
        let len = p.len();
        if len == 0 || len > order {
            continue;
        }
        // multiply by 1 / (1 - x^len) in place
        for k in len..=order {
            let add = coeffs[k - len].clone();
            coeffs[k] += add;
        }
    }
    Ok(TruncatedPowerSeries::new(
        coeffs.into_iter().map(|c| Rational::from_integer(c.into())).collect(),
        order,
    ))
}
