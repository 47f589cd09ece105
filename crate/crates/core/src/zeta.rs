//! The Ihara zeta function zeta(x) = exp(sum_k trace(T^k) x^k / k).
//!
//! Three views are kept side by side:
//!
//! * the truncated series with exact rational coefficients c_0..c_N;
//! * the characteristic polynomial D(x) = det(I - xT), recovered exactly
//!   from the traces, so that zeta = 1/D as rational functions;
//! * direct floating-point evaluation of 1/det(I - xT) by LU factorisation,
//!   which involves no truncation and serves as the evaluation oracle.
//!
//! Arguments are restricted to [0, 1/lambda), inside the disc of
//! convergence.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{orientations, Graph};
use crate::line_graph::{OrientedLineGraph, PowerIteration, SpectralRadius, TraceVector};
use crate::registry::Registry;
use crate::series::{rationalize, Rational, TruncatedPowerSeries};

pub const DEFAULT_ORDER: usize = 32;

/// Relative allowance added to every reported error bound for floating
/// point rounding in the evaluators.
const ROUNDING_ALLOWANCE: f64 = 1e-12;

/// The truncated zeta series together with what is needed to bound its
/// tail: the Perron root and the exact characteristic polynomial.
#[derive(Debug, Clone)]
pub struct ZetaSeries {
    coeffs: TruncatedPowerSeries<Rational>,
    coeffs_f64: TruncatedPowerSeries<f64>,
    radius: SpectralRadius,
    char_poly: Vec<BigInt>,
}

/// log zeta = sum_k trace(T^k) x^k / k, truncated at `order`.
fn log_series(traces: &TraceVector, order: usize) -> TruncatedPowerSeries<Rational> {
    let coeffs = std::iter::once(Rational::zero())
        .chain((1..=order).map(|k| Rational::new(BigInt::from(traces.get(k).clone()), BigInt::from(k))))
        .collect();
    TruncatedPowerSeries::new(coeffs, order)
}

/// c_0..c_N of zeta as exact rationals.
pub fn zeta_coefficients(traces: &TraceVector, order: usize) -> Result<TruncatedPowerSeries<Rational>> {
    if traces.max_power() < order {
        return Err(Error::InsufficientTraces {
            available: traces.max_power(),
            order,
        });
    }
    log_series(traces, order).exp()
}

/// det(I - xT) as integer coefficients d_0..d_dim, from
/// log det(I - xT) = -sum_k trace(T^k) x^k / k. The determinant has degree
/// at most `dim`, so the exponential series terminates there.
pub fn characteristic_polynomial(traces: &TraceVector, dim: usize) -> Result<Vec<BigInt>> {
    if traces.max_power() < dim {
        return Err(Error::InsufficientTraces {
            available: traces.max_power(),
            order: dim,
        });
    }
    let d = log_series(traces, dim).neg().exp()?;
    d.into_coeffs()
        .into_iter()
        .map(|c| {
            if c.is_integer() {
                Ok(c.to_integer())
            } else {
                Err(Error::InvalidParams(format!(
                    "non-integral determinant coefficient {c}"
                )))
            }
        })
        .collect()
}

impl ZetaSeries {
    /// Assembles the series from traces covering both the order and the
    /// matrix dimension.
    pub fn new(traces: &TraceVector, order: usize, dim: usize, radius: SpectralRadius) -> Result<Self> {
        let coeffs = zeta_coefficients(traces, order)?;
        let char_poly = characteristic_polynomial(traces, dim)?;
        Ok(Self {
            coeffs_f64: coeffs.to_f64(),
            coeffs,
            radius,
            char_poly,
        })
    }

    pub fn order(&self) -> usize {
        self.coeffs.order()
    }

    pub fn coefficients(&self) -> &TruncatedPowerSeries<Rational> {
        &self.coeffs
    }

    pub fn radius(&self) -> &SpectralRadius {
        &self.radius
    }

    pub fn lambda(&self) -> f64 {
        self.radius.lambda
    }

    /// d_0..d_dim with det(I - xT) = sum d_k x^k.
    pub fn char_poly(&self) -> &[BigInt] {
        &self.char_poly
    }

    pub fn domain_limit(&self) -> f64 {
        self.radius.domain_limit()
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        check_domain(x, self.domain_limit())
    }

    /// det(I - rT) evaluated exactly at a rational point.
    pub fn char_poly_at(&self, r: &Rational) -> Rational {
        self.char_poly
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, d| acc * r + Rational::from_integer(d.clone()))
    }

    /// Horner evaluation of the truncated series plus a bound on the
    /// neglected tail.
    pub fn eval(&self, x: f64) -> Result<SeriesValue> {
        self.check_domain(x)?;
        let value = self.coeffs_f64.eval(&x);
        let truncation = self.tail_bound(x);
        Ok(SeriesValue {
            value,
            truncation_bound: truncation,
            error_bound: truncation + ROUNDING_ALLOWANCE * value.abs(),
        })
    }

    pub fn derivative(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(self.coeffs_f64.derivative().eval(&x))
    }

    /// Bound on sum_{k > N} c_k x^k.
    ///
    /// The coefficients are nonnegative, so by Cauchy's estimate
    /// c_k <= zeta(r) / r^k for every 0 < r < 1/lambda, giving
    /// tail <= zeta(r) q^(N+1) / (1 - q) with q = x / r. zeta(r) = 1/D(r) is
    /// evaluated exactly and r is chosen from a fixed ladder between x and
    /// the domain limit.
    pub fn tail_bound(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let limit = self.domain_limit();
        let n = self.order() as i32;
        const LADDER: [f64; 12] = [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99];
        LADDER
            .iter()
            .filter_map(|f| {
                let r = rationalize(x + f * (limit - x), 1 << 40);
                let d = self.char_poly_at(&r);
                if !d.is_positive() {
                    return None;
                }
                let zeta_r = (Rational::one() / d).to_f64()?;
                let q = x / r.to_f64()?;
                (q < 1.0).then(|| zeta_r * q.powi(n + 1) / (1.0 - q))
            })
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Bound on the omitted terms beyond the truncation order.
    pub truncation_bound: f64,
    /// Truncation bound plus a floating-point rounding allowance.
    pub error_bound: f64,
}

fn check_domain(x: f64, limit: f64) -> Result<()> {
    if !(x >= 0.0 && x < limit) {
        return Err(Error::OutOfDomain { x, limit });
    }
    Ok(())
}

/// LU factorisation with partial pivoting of I - xT.
struct Lu {
    n: usize,
    a: Vec<f64>,
    perm: Vec<usize>,
    det: f64,
}

impl Lu {
    fn factor(olg: &OrientedLineGraph, x: f64) -> Result<Self> {
        let n = olg.dimension();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 1.0;
            for &j in olg.successors(i) {
                a[i * n + j] -= x;
            }
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let mut det = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
                .expect("nonempty pivot range");
            let pivot = a[p * n + k];
            if pivot.abs() < 1e-300 {
                return Err(Error::SingularMatrix);
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
                det = -det;
            }
            det *= pivot;
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                a[i * n + k] = f;
                if f != 0.0 {
                    for c in k + 1..n {
                        a[i * n + c] -= f * a[k * n + c];
                    }
                }
            }
        }
        Ok(Self { n, a, perm, det })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                y[i] -= self.a[i * n + k] * y[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] -= self.a[i * n + k] * y[k];
            }
            y[i] /= self.a[i * n + i];
        }
        y
    }
}

/// 1 / det(I - xT), with no truncation.
pub fn zeta_eval_exact(olg: &OrientedLineGraph, x: f64, limit: f64) -> Result<f64> {
    check_domain(x, limit)?;
    let lu = Lu::factor(olg, x)?;
    Ok(1.0 / lu.det)
}

/// zeta'(x) = zeta(x) trace((I - xT)^(-1) T), with no truncation.
pub fn zeta_derivative_exact(olg: &OrientedLineGraph, x: f64, limit: f64) -> Result<f64> {
    check_domain(x, limit)?;
    let lu = Lu::factor(olg, x)?;
    let n = olg.dimension();
    let mut column = vec![0.0; n];
    let mut trace = 0.0;
    for j in 0..n {
        column.iter_mut().for_each(|c| *c = 0.0);
        for i in 0..n {
            if olg.has_arc(i, j) {
                column[i] = 1.0;
            }
        }
        trace += lu.solve(&column)[j];
    }
    Ok(trace / lu.det)
}

/// Everything derived from one admissible graph at one truncation order.
#[derive(Debug, Clone)]
pub struct ZetaModel {
    pub graph: Graph,
    pub olg: Arc<OrientedLineGraph>,
    pub traces: TraceVector,
    pub series: Arc<ZetaSeries>,
}

impl ZetaModel {
    pub fn build(graph: &Graph, order: usize, power: &PowerIteration) -> Result<Self> {
        let olg = OrientedLineGraph::build(orientations(graph)?);
        let radius = olg.spectral_radius(power)?;
        let dim = olg.dimension();
        let traces = olg.traces(order.max(dim));
        let series = ZetaSeries::new(&traces, order, dim, radius)?;
        Ok(Self {
            graph: graph.clone(),
            olg: Arc::new(olg),
            traces,
            series: Arc::new(series),
        })
    }

    pub fn lambda(&self) -> f64 {
        self.series.lambda()
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    pub fn domain_limit(&self) -> f64 {
        self.series.domain_limit()
    }

    pub fn eval_exact(&self, x: f64) -> Result<f64> {
        zeta_eval_exact(&self.olg, x, self.domain_limit())
    }

    pub fn derivative_exact(&self, x: f64) -> Result<f64> {
        zeta_derivative_exact(&self.olg, x, self.domain_limit())
    }
}

/// A way of evaluating zeta and zeta' on [0, 1/lambda).
pub trait ZetaEvaluator: Send + Sync {
    fn name(&self) -> &'static str;
    fn value(&self, x: f64) -> Result<f64>;
    fn derivative(&self, x: f64) -> Result<f64>;
}

pub struct SeriesEvaluator {
    series: Arc<ZetaSeries>,
}

impl SeriesEvaluator {
    pub fn new(series: Arc<ZetaSeries>) -> Self {
        Self { series }
    }
}

impl ZetaEvaluator for SeriesEvaluator {
    fn name(&self) -> &'static str {
        "series"
    }

    fn value(&self, x: f64) -> Result<f64> {
        Ok(self.series.eval(x)?.value)
    }

    fn derivative(&self, x: f64) -> Result<f64> {
        self.series.derivative(x)
    }
}

pub struct DeterminantEvaluator {
    olg: Arc<OrientedLineGraph>,
    limit: f64,
}

impl DeterminantEvaluator {
    pub fn new(olg: Arc<OrientedLineGraph>, limit: f64) -> Self {
        Self { olg, limit }
    }
}

impl ZetaEvaluator for DeterminantEvaluator {
    fn name(&self) -> &'static str {
        "determinant"
    }

    fn value(&self, x: f64) -> Result<f64> {
        zeta_eval_exact(&self.olg, x, self.limit)
    }

    fn derivative(&self, x: f64) -> Result<f64> {
        zeta_derivative_exact(&self.olg, x, self.limit)
    }
}

pub const DEFAULT_EVALUATOR: &str = "determinant";

pub fn zeta_evaluators() -> Registry<ZetaModel, dyn ZetaEvaluator> {
    let mut reg: Registry<ZetaModel, dyn ZetaEvaluator> = Registry::new("zeta evaluator");
    reg.register("determinant", "1/det(I - xT) by pivoted LU, no truncation", |m| {
        Ok(Box::new(DeterminantEvaluator::new(m.olg.clone(), m.domain_limit())))
    });
    reg.register("series", "Horner evaluation of the truncated series", |m| {
        Ok(Box::new(SeriesEvaluator::new(m.series.clone())))
    });
    reg
}
