//! The Ihara entropy of a discrete distribution.
//!
//! For a scale 0 < a < 1/lambda the formal group logarithm is
//!
//! ```text
//! G(t) = (zeta(a e^-t) - zeta(a) + e^-t - 1) / -(1 + a zeta'(a))
//! ```
//!
//! which has G(0) = 0 and G'(0) = 1, so it has a compositional inverse F.
//! At t = log(1/p) it becomes
//!
//! ```text
//! G(log 1/p) = (zeta(a) + 1 - zeta(a p) - p) / (1 + a zeta'(a))
//! ```
//!
//! and the entropy is S(P) = sum_i p_i G(log 1/p_i) = sum_i s(p_i).
//! Independent systems compose through the formal group law
//! Phi(s1, s2) = G(F(s1) + F(s2)).

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::bivariate::{lazard_law, BivariateSeries, GroupLawChecks};
use crate::error::{Error, Result};
use crate::registry::Registry;
use crate::series::{exp_neg, horner, rational_to_f64, rationalize, Coeff, Rational, TruncatedPowerSeries};
use crate::zeta::{zeta_evaluators, ZetaEvaluator, ZetaModel, DEFAULT_EVALUATOR};

/// Absolute tolerance on sum p_i = 1.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Largest denominator used when the scale `a` is turned into an exact
/// rational for the formal group computations.
pub const SCALE_MAX_DENOMINATOR: u64 = 1_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityDistribution {
    p: Vec<f64>,
}

impl ProbabilityDistribution {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidDistribution("no events".into()));
        }
        if let Some(bad) = p.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidDistribution(format!(
                "probability {bad} is not in [0, 1]"
            )));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(Self { p })
    }

    pub fn uniform(w: usize) -> Self {
        Self {
            p: vec![1.0 / w as f64; w],
        }
    }

    /// Reads a JSON array (`[0.5, 0.5]`) or whitespace/comma separated
    /// numbers.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        let body = trimmed
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .unwrap_or(trimmed);
        let values = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|tok| !tok.is_empty())
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| Error::InvalidDistribution(format!("'{tok}' is not a number")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// Joint distribution of two independent systems, p_i q_j in row-major
    /// order.
    pub fn product(&self, other: &Self) -> Self {
        Self {
            p: self.p.iter().flat_map(|a| other.p.iter().map(move |b| a * b)).collect(),
        }
    }

    pub fn with_zero_event(&self) -> Self {
        let mut p = self.p.clone();
        p.push(0.0);
        Self { p }
    }
}

/// How the scale `a` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scale {
    Absolute(f64),
    /// a = fraction / lambda.
    Fraction(f64),
}

impl Default for Scale {
    fn default() -> Self {
        Scale::Fraction(0.5)
    }
}

/// A validated scale together with zeta(a) and zeta'(a).
#[derive(Clone)]
pub struct EntropyParams {
    model: Arc<ZetaModel>,
    evaluator: Arc<dyn ZetaEvaluator>,
    a: f64,
    a_exact: Rational,
    zeta_a: f64,
    dzeta_a: f64,
}

impl std::fmt::Debug for EntropyParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EntropyParams")
            .field("a", &self.a)
            .field("order", &self.model.order())
            .field("lambda", &self.model.lambda())
            .field("evaluator", &self.evaluator.name())
            .finish()
    }
}

impl EntropyParams {
    /// Resolves the scale and evaluates zeta(a), zeta'(a) with the
    /// default (determinant) evaluator.
    pub fn new(model: Arc<ZetaModel>, scale: Scale) -> Result<Self> {
        Self::with_evaluator(model, scale, DEFAULT_EVALUATOR)
    }

    pub fn with_evaluator(model: Arc<ZetaModel>, scale: Scale, evaluator: &str) -> Result<Self> {
        let limit = model.domain_limit();
        let requested = match scale {
            Scale::Absolute(a) => a,
            Scale::Fraction(f) => {
                if !(f > 0.0 && f < 1.0) {
                    return Err(Error::InvalidParams(format!("scale fraction {f} not in (0, 1)")));
                }
                f / model.lambda()
            }
        };
        if !(requested > 0.0 && requested < limit) {
            return Err(Error::InvalidParams(format!(
                "scale a = {requested} not in (0, 1/lambda) = (0, {limit})"
            )));
        }
        // the formal group series need a exactly; use a nearby simple rational
        let a_exact = rationalize(requested, SCALE_MAX_DENOMINATOR);
        let a = rational_to_f64(&a_exact);
        if !(a > 0.0 && a < limit) {
            return Err(Error::InvalidParams(format!("scale a = {a} not in (0, {limit})")));
        }
        let evaluator: Arc<dyn ZetaEvaluator> = zeta_evaluators().create(evaluator, &model)?.into();
        let zeta_a = evaluator.value(a)?;
        let dzeta_a = evaluator.derivative(a)?;
        Ok(Self {
            model,
            evaluator,
            a,
            a_exact,
            zeta_a,
            dzeta_a,
        })
    }

    /// Same scale, different zeta evaluator.
    pub fn using(&self, evaluator: &str) -> Result<Self> {
        Self::with_evaluator(self.model.clone(), Scale::Absolute(self.a), evaluator)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn a_exact(&self) -> &Rational {
        &self.a_exact
    }

    pub fn model(&self) -> &Arc<ZetaModel> {
        &self.model
    }

    pub fn lambda(&self) -> f64 {
        self.model.lambda()
    }

    pub fn order(&self) -> usize {
        self.model.order()
    }

    pub fn evaluator_name(&self) -> &'static str {
        self.evaluator.name()
    }

    pub fn zeta_a(&self) -> f64 {
        self.zeta_a
    }

    /// 1 + a zeta'(a), the normalisation making G'(0) = 1.
    pub fn normalizer(&self) -> f64 {
        1.0 + self.a * self.dzeta_a
    }

    fn check_probability(p: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidDistribution(format!("probability {p} is not in [0, 1]")));
        }
        Ok(())
    }

    /// G(log 1/p) in closed form. At p = 0 this is zeta(a) / (1 + a zeta'(a)),
    /// the supremum of G on [0, inf).
    pub fn g_of_log_inv_p(&self, p: f64) -> Result<f64> {
        Self::check_probability(p)?;
        let zeta_ap = self.evaluator.value(self.a * p)?;
        Ok((self.zeta_a - zeta_ap + (1.0 - p)) / self.normalizer())
    }

    /// s(p) = p G(log 1/p), with s(0) = 0.
    pub fn term(&self, p: f64) -> Result<f64> {
        if p == 0.0 {
            return Ok(0.0);
        }
        Ok(p * self.g_of_log_inv_p(p)?)
    }

    /// h(p) = 1 + zeta(a) - 2p - zeta(ap) - a p zeta'(ap); s'(p) is h(p)
    /// divided by the normaliser.
    pub fn h(&self, p: f64) -> Result<f64> {
        Self::check_probability(p)?;
        let ap = self.a * p;
        let zeta_ap = self.evaluator.value(ap)?;
        let dzeta_ap = self.evaluator.derivative(ap)?;
        Ok(1.0 + self.zeta_a - 2.0 * p - zeta_ap - ap * dzeta_ap)
    }

    /// s'(p) in closed form.
    pub fn term_derivative(&self, p: f64) -> Result<f64> {
        Ok(self.h(p)? / self.normalizer())
    }

    /// G(t) in closed form for t >= 0.
    pub fn log_closed(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::InvalidParams(format!("closed-form G needs t >= 0, got {t}")));
        }
        self.g_of_log_inv_p((-t).exp())
    }

    /// F(s) = G^(-1)(s) for s in [0, sup G), by bisection in p = e^-t (G is
    /// increasing in t, decreasing in p). Returns infinity at the supremum.
    pub fn exp_closed(&self, s: f64) -> Result<f64> {
        if s <= 0.0 {
            return Ok(0.0);
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        if self.g_of_log_inv_p(0.0)? <= s {
            return Ok(f64::INFINITY);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.g_of_log_inv_p(mid)? > s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(-(0.5 * (lo + hi)).ln())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub entropy: f64,
    pub terms: Vec<f64>,
    pub a: f64,
    pub order: usize,
    pub lambda: f64,
    pub evaluator: &'static str,
}

pub fn ihara_entropy(dist: &ProbabilityDistribution, params: &EntropyParams) -> Result<EntropyReport> {
    let terms = dist
        .probabilities()
        .iter()
        .map(|&p| params.term(p))
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropyReport {
        entropy: terms.iter().sum(),
        terms,
        a: params.a(),
        order: params.order(),
        lambda: params.lambda(),
        evaluator: params.evaluator_name(),
    })
}

pub const MAXIMIZER_TOL: f64 = 1e-12;
const MAXIMIZER_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Maximizer {
    /// The unique root of h in (0, 1), where s attains its maximum.
    pub c: f64,
    pub h_at_c: f64,
    pub s_at_c: f64,
    pub h_at_0: f64,
    pub h_at_1: f64,
    pub iterations: usize,
}

/// Locates the maximiser of s by bisection on h, which is positive at 0,
/// negative at 1 and strictly decreasing in between.
pub fn maximizer(params: &EntropyParams, tol: f64) -> Result<Maximizer> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParams(format!("tolerance must be positive, got {tol}")));
    }
    let h0 = params.h(0.0)?;
    let h1 = params.h(1.0)?;
    if !(h0 > 0.0 && h1 < 0.0) {
        return Err(Error::InvalidParams(format!(
            "h does not change sign: h(0) = {h0}, h(1) = {h1}"
        )));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut best = (0.5, f64::INFINITY);
    let mut iterations = 0;
    while iterations < MAXIMIZER_ITERATIONS {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let hm = params.h(mid)?;
        if hm.abs() < best.1.abs() {
            best = (mid, hm);
        }
        if hm.abs() <= tol || mid <= lo || mid >= hi {
            break;
        }
        if hm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (c, h_at_c) = best;
    Ok(Maximizer {
        c,
        h_at_c,
        s_at_c: params.term(c)?,
        h_at_0: h0,
        h_at_1: h1,
        iterations,
    })
}

/// The formal group logarithm G as an exact series in t, its compositional
/// inverse F, and the law Phi built from them.
#[derive(Debug, Clone)]
pub struct FormalGroup {
    pub log: TruncatedPowerSeries<Rational>,
    pub exp: TruncatedPowerSeries<Rational>,
}

/// G(t) to order `order` with exact rational coefficients.
///
/// zeta(a e^-t) is expanded as 1 / D(a e^-t), where D(x) = det(I - xT) is
/// the exact characteristic polynomial. D is a polynomial, so substituting
/// the series a e^-t (nonzero constant term) is a finite computation and no
/// truncation of zeta enters the coefficients.
pub fn formal_group_log_series(params: &EntropyParams, order: usize) -> Result<TruncatedPowerSeries<Rational>> {
    let a = params.a_exact().clone();
    let d: Vec<Rational> = params
        .model()
        .series
        .char_poly()
        .iter()
        .map(|c| Rational::from_integer(c.clone()))
        .collect();
    let e = exp_neg::<Rational>(order);
    let zeta_shifted = horner(&d, &e.scale(&a)).reciprocal()?;

    // zeta(a) = 1/D(a), zeta'(a) = -D'(a) / D(a)^2
    let d_at = |x: &Rational, poly: &[Rational]| poly.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c);
    let d_prime: Vec<Rational> = d
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * Rational::from_int(k as i64))
        .collect();
    let da = d_at(&a, &d);
    if da.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let zeta_a = Rational::one() / &da;
    let dzeta_a = -d_at(&a, &d_prime) / (&da * &da);

    let numerator = zeta_shifted
        .sub(&TruncatedPowerSeries::constant(zeta_a, order))?
        .add(&e)?
        .sub(&TruncatedPowerSeries::one(order))?;
    let normalizer = -(Rational::one() + &a * dzeta_a);
    Ok(numerator.scale(&(Rational::one() / normalizer)))
}

impl FormalGroup {
    pub fn new(params: &EntropyParams, order: usize) -> Result<Self> {
        let log = formal_group_log_series(params, order)?;
        let exp = log.inverse_composition()?;
        Ok(Self { log, exp })
    }

    pub fn order(&self) -> usize {
        self.log.order()
    }

    /// Phi to total degree `order` (at most the series order), exact.
    pub fn law(&self, order: usize) -> Result<BivariateSeries<Rational>> {
        lazard_law(&self.log, &self.exp, order, 0.0)
    }

    /// Exact coefficientwise axiom checks of Phi to total degree `order`.
    pub fn check_axioms(&self, order: usize) -> Result<GroupLawChecks> {
        Ok(self.law(order)?.check_group_law(0.0))
    }
}

/// Phi(s1, s2) = G(F(s1) + F(s2)) evaluated pointwise with the closed form
/// of G and its numerical inverse. Defined for s1, s2 in [0, sup G).
pub fn phi_closed(params: &EntropyParams, s1: f64, s2: f64) -> Result<f64> {
    let t = params.exp_closed(s1)? + params.exp_closed(s2)?;
    if t.is_infinite() {
        return params.g_of_log_inv_p(0.0);
    }
    params.log_closed(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointEntropyCheck {
    /// S(P_A P_B) computed on the product distribution.
    pub direct: f64,
    /// sum_ij p_i q_j Phi(G(log 1/p_i), G(log 1/q_j)).
    pub via_phi: f64,
    pub delta: f64,
}

/// Compares the entropy of a product distribution with its composition
/// through the formal group law.
pub fn joint_entropy_check(
    pa: &ProbabilityDistribution,
    pb: &ProbabilityDistribution,
    params: &EntropyParams,
) -> Result<JointEntropyCheck> {
    let direct = ihara_entropy(&pa.product(pb), params)?.entropy;
    let sa = pa
        .probabilities()
        .iter()
        .map(|&p| params.g_of_log_inv_p(p))
        .collect::<Result<Vec<_>>>()?;
    let sb = pb
        .probabilities()
        .iter()
        .map(|&q| params.g_of_log_inv_p(q))
        .collect::<Result<Vec<_>>>()?;
    let mut via_phi = 0.0;
    for (&p, s1) in pa.probabilities().iter().zip(&sa) {
        for (&q, s2) in pb.probabilities().iter().zip(&sb) {
            if p * q == 0.0 {
                continue;
            }
            via_phi += p * q * phi_closed(params, *s1, *s2)?;
        }
    }
    Ok(JointEntropyCheck {
        direct,
        via_phi,
        delta: (direct - via_phi).abs(),
    })
}

pub fn shannon_entropy(dist: &ProbabilityDistribution) -> f64 {
    dist.probabilities()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * (-p.ln()))
        .sum::<f64>()
        + 0.0
}

/// (1 - sum p_i^q) / (q - 1), written as -sum p_i expm1((q-1) ln p_i) / (q-1)
/// so it stays accurate as q approaches 1.
pub fn tsallis_entropy(dist: &ProbabilityDistribution, q: f64) -> Result<f64> {
    if q == 1.0 || !q.is_finite() {
        return Err(Error::InvalidParams(format!(
            "Tsallis index must be finite and != 1, got {q}"
        )));
    }
    let d = q - 1.0;
    let sum: f64 = dist
        .probabilities()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * (d * p.ln()).exp_m1())
        .sum();
    // + 0.0 turns a -0.0 from a point mass into 0.0
    Ok(-sum / d + 0.0)
}

/// An entropy functional selectable by name.
pub trait EntropyMeasure: Send + Sync {
    fn name(&self) -> &'static str;
    fn value(&self, dist: &ProbabilityDistribution) -> Result<f64>;
}

/// Inputs shared by the measure factories.
#[derive(Debug, Clone)]
pub struct MeasureContext {
    pub params: Option<EntropyParams>,
    pub tsallis_q: f64,
}

struct Ihara(EntropyParams);
struct Shannon;
struct Tsallis(f64);

impl EntropyMeasure for Ihara {
    fn name(&self) -> &'static str {
        "ihara"
    }

    fn value(&self, dist: &ProbabilityDistribution) -> Result<f64> {
        Ok(ihara_entropy(dist, &self.0)?.entropy)
    }
}

impl EntropyMeasure for Shannon {
    fn name(&self) -> &'static str {
        "shannon"
    }

    fn value(&self, dist: &ProbabilityDistribution) -> Result<f64> {
        Ok(shannon_entropy(dist))
    }
}

impl EntropyMeasure for Tsallis {
    fn name(&self) -> &'static str {
        "tsallis"
    }

    fn value(&self, dist: &ProbabilityDistribution) -> Result<f64> {
        tsallis_entropy(dist, self.0)
    }
}

pub fn entropy_measures() -> Registry<MeasureContext, dyn EntropyMeasure> {
    let mut reg: Registry<MeasureContext, dyn EntropyMeasure> = Registry::new("entropy measure");
    reg.register(
        "ihara",
        "sum_i p_i G(log 1/p_i) for the graph's formal group logarithm",
        |ctx| {
            let params = ctx
                .params
                .clone()
                .ok_or_else(|| Error::InvalidParams("the ihara measure needs a graph".into()))?;
            Ok(Box::new(Ihara(params)))
        },
    );
    reg.register("shannon", "-sum_i p_i log p_i", |_| Ok(Box::new(Shannon)));
    reg.register("tsallis", "(1 - sum_i p_i^q) / (q - 1)", |ctx| {
        if ctx.tsallis_q == 1.0 {
            return Err(Error::InvalidParams("Tsallis index q must differ from 1".into()));
        }
        Ok(Box::new(Tsallis(ctx.tsallis_q)))
    });
    reg
}
