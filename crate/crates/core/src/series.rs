//! Truncated formal power series a_0 + a_1 x + ... + a_N x^N.
//!
//! Every result is exact modulo x^(N+1): no operation reads or produces
//! coefficients past the order. Coefficients are generic so the same code
//! runs over exact rationals (identity checks) and `f64` (evaluation).

use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Coefficient field of a truncated series.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Num + Neg<Output = Self> {
    fn from_int(n: i64) -> Self;
    /// Absolute value as an `f64`, used by tolerance checks.
    fn magnitude(&self) -> f64;

    /// Exact zero, or (for a positive `tol`) magnitude at most `tol`.
    fn within(&self, tol: f64) -> bool {
        self.is_zero() || (tol > 0.0 && self.magnitude() <= tol)
    }

    /// out[k] = sum_{i+j=k} a_i b_j for k < len.
    fn convolve(a: &[Self], b: &[Self], len: usize) -> Vec<Self> {
        let mut out = vec![Self::zero(); len];
        for (i, x) in a.iter().enumerate().take(len) {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(len - i) {
                if !y.is_zero() {
                    out[i + j] = out[i + j].clone() + x.clone() * y.clone();
                }
            }
        }
        out
    }

    /// Two-variable analogue of `convolve` on triangular arrays: row i holds
    /// the coefficients of s1^i s2^j for j = 0..=n-i.
    fn convolve_triangular(a: &[Vec<Self>], b: &[Vec<Self>], n: usize) -> Vec<Vec<Self>> {
        let mut out: Vec<Vec<Self>> = (0..=n).map(|i| vec![Self::zero(); n - i + 1]).collect();
        for (i1, row_a) in a.iter().enumerate() {
            for (j1, x) in row_a.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (i2, row_b) in b.iter().enumerate().take(n - i1 - j1 + 1) {
                    for (j2, y) in row_b.iter().enumerate().take(n - i1 - j1 - i2 + 1) {
                        if !y.is_zero() {
                            let slot = &mut out[i1 + i2][j1 + j2];
                            *slot = slot.clone() + x.clone() * y.clone();
                        }
                    }
                }
            }
        }
        out
    }
}

impl Coeff for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Coeff for Rational {
    fn from_int(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    // Both products clear denominators once per operand, convolve in
    // integers and reduce each output coefficient once.
    fn convolve(a: &[Self], b: &[Self], len: usize) -> Vec<Self> {
        let (na, da) = integer_form(a.iter());
        let (nb, db) = integer_form(b.iter());
        let den = da * db;
        let mut out = vec![BigInt::zero(); len];
        for (i, x) in na.iter().enumerate().take(len) {
            if x.is_zero() {
                continue;
            }
            for (j, y) in nb.iter().enumerate().take(len - i) {
                if !y.is_zero() {
                    out[i + j] += x * y;
                }
            }
        }
        out.into_iter().map(|c| Rational::new(c, den.clone())).collect()
    }

    fn convolve_triangular(a: &[Vec<Self>], b: &[Vec<Self>], n: usize) -> Vec<Vec<Self>> {
        let (na, da) = integer_form(a.iter().flatten());
        let (nb, db) = integer_form(b.iter().flatten());
        let den = da * db;
        let rows = |flat: Vec<BigInt>, src: &[Vec<Self>]| {
            let mut it = flat.into_iter();
            src.iter()
                .map(|row| it.by_ref().take(row.len()).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        };
        let (ra, rb) = (rows(na, a), rows(nb, b));
        let mut out: Vec<Vec<BigInt>> = (0..=n).map(|i| vec![BigInt::zero(); n - i + 1]).collect();
        for (i1, row_a) in ra.iter().enumerate() {
            for (j1, x) in row_a.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (i2, row_b) in rb.iter().enumerate().take(n - i1 - j1 + 1) {
                    for (j2, y) in row_b.iter().enumerate().take(n - i1 - j1 - i2 + 1) {
                        if !y.is_zero() {
                            out[i1 + i2][j1 + j2] += x * y;
                        }
                    }
                }
            }
        }
        out.into_iter()
            .map(|row| row.into_iter().map(|c| Rational::new(c, den.clone())).collect())
            .collect()
    }
}

/// Integer numerators over the least common denominator.
fn integer_form<'a>(coeffs: impl Iterator<Item = &'a Rational> + Clone) -> (Vec<BigInt>, BigInt) {
    let lcm = coeffs.clone().fold(
        BigInt::one(),
        |acc, c| if c.is_zero() { acc } else { acc.lcm(c.denom()) },
    );
    let numers = coeffs.map(|c| c.numer() * (&lcm / c.denom())).collect();
    (numers, lcm)
}

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Best rational approximation of `x` with denominator at most `max_denom`,
/// by continued fractions.
pub fn rationalize(x: f64, max_denom: u64) -> Rational {
    assert!(x.is_finite(), "cannot rationalize {x}");
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = x;
    let limit = BigInt::from(max_denom);
    for _ in 0..64 {
        let a = rest.floor();
        let ab = BigInt::from(a as i64);
        let k2 = &ab * &k1 + &k0;
        if k2 > limit {
            break;
        }
        let h2 = &ab * &h1 + &h0;
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = rest - a;
        if frac.abs() < 1e-15 {
            break;
        }
        rest = 1.0 / frac;
    }
    Rational::new(h1, k1)
}

#[derive(Clone, PartialEq)]
pub struct TruncatedPowerSeries<C> {
    coeffs: Vec<C>,
}

impl<C: Coeff> fmt::Debug for TruncatedPowerSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TruncatedPowerSeries")
            .field("order", &self.order())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl<C: Coeff> TruncatedPowerSeries<C> {
    /// Series of the given order; missing coefficients are zero and extra
    /// ones are dropped.
    pub fn new(mut coeffs: Vec<C>, order: usize) -> Self {
        coeffs.resize(order + 1, C::zero());
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn constant(c: C, order: usize) -> Self {
        Self::new(vec![c], order)
    }

    pub fn one(order: usize) -> Self {
        Self::constant(C::one(), order)
    }

    /// The indeterminate x.
    pub fn variable(order: usize) -> Self {
        Self::new(vec![C::zero(), C::one()], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs.clone(), order)
    }

    fn same_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| -a.clone()).collect(),
        }
    }

    pub fn scale(&self, r: &C) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a.clone() * r.clone()).collect(),
        }
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        Self {
            coeffs: C::convolve(&self.coeffs, &other.coeffs, self.order() + 1),
        }
    }

    /// Termwise derivative. The result has order N - 1 because the x^N
    /// coefficient of the derivative is unknown.
    pub fn derivative(&self) -> Self {
        let n = self.order();
        if n == 0 {
            return Self::zero(0);
        }
        let coeffs = (1..=n)
            .map(|k| self.coeffs[k].clone() * C::from_int(k as i64))
            .collect();
        Self::new(coeffs, n - 1)
    }

    /// 1 / S, requiring an invertible constant term.
    pub fn reciprocal(&self) -> Result<Self> {
        let a0 = self.coeffs[0].clone();
        if a0.is_zero() {
            return Err(Error::NotInvertible("zero constant term has no reciprocal"));
        }
        let n = self.order();
        let mut out: Vec<C> = Vec::with_capacity(n + 1);
        out.push(C::one() / a0.clone());
        for k in 1..=n {
            let mut acc = C::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc = acc + self.coeffs[j].clone() * out[k - j].clone();
                }
            }
            out.push(-acc / a0.clone());
        }
        Ok(Self { coeffs: out })
    }

    /// exp(S) for S with zero constant term, from (exp S)' = S' exp S:
    /// n e_n = sum_{k=1}^{n} k s_k e_{n-k}.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let n = self.order();
        let mut e: Vec<C> = Vec::with_capacity(n + 1);
        e.push(C::one());
        for m in 1..=n {
            let mut acc = C::zero();
            for k in 1..=m {
                if !self.coeffs[k].is_zero() {
                    acc = acc + C::from_int(k as i64) * self.coeffs[k].clone() * e[m - k].clone();
                }
            }
            e.push(acc / C::from_int(m as i64));
        }
        Ok(Self { coeffs: e })
    }

    /// S(T(x)) by Horner's rule; T must have zero constant term so that the
    /// result is determined by the first N + 1 coefficients of S.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.same_order(inner)?;
        if !inner.coeffs[0].is_zero() {
            return Err(Error::InnerConstantNonzero);
        }
        Ok(horner(&self.coeffs, inner))
    }

    /// Compositional inverse F of T (T(F(x)) = F(T(x)) = x), for t_0 = 0 and
    /// t_1 != 0, by Lagrange inversion: [x^n] F = (1/n) [x^(n-1)] (x/T)^n.
    pub fn inverse_composition(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NotInvertible("nonzero constant term"));
        }
        let n = self.order();
        if n == 0 {
            return Err(Error::NotInvertible("order 0 series carries no linear term"));
        }
        if self.coeffs[1].is_zero() {
            return Err(Error::NotInvertible("zero linear coefficient"));
        }
        // x / T(x) = 1 / (t_1 + t_2 x + ...), needed to order n - 1
        let shifted = Self::new(self.coeffs[1..].to_vec(), n - 1);
        let ratio = shifted.reciprocal()?;
        let mut out = vec![C::zero(); n + 1];
        let mut power = Self::one(n - 1);
        for k in 1..=n {
            power = power.mul_unchecked(&ratio);
            out[k] = power.coeffs[k - 1].clone() / C::from_int(k as i64);
        }
        Ok(Self { coeffs: out })
    }

    /// Evaluates the truncated polynomial at `x`.
    pub fn eval(&self, x: &C) -> C {
        self.coeffs
            .iter()
            .rev()
            .fold(C::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    /// True when the series is x modulo x^(N+1).
    pub fn is_identity(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(k, c)| if k == 1 { c.is_one() } else { c.is_zero() })
    }
}

/// sum_k poly[k] inner^k by Horner's rule, truncated at the order of
/// `inner`. `poly` may be longer than the order (a genuine polynomial), in
/// which case the inner constant term may be nonzero: every term is finite.
pub fn horner<C: Coeff>(poly: &[C], inner: &TruncatedPowerSeries<C>) -> TruncatedPowerSeries<C> {
    let order = inner.order();
    let mut acc = TruncatedPowerSeries::zero(order);
    for c in poly.iter().rev() {
        acc = acc.mul_unchecked(inner);
        acc.coeffs[0] = acc.coeffs[0].clone() + c.clone();
    }
    acc
}

impl TruncatedPowerSeries<Rational> {
    pub fn to_f64(&self) -> TruncatedPowerSeries<f64> {
        TruncatedPowerSeries {
            coeffs: self.coeffs.iter().map(rational_to_f64).collect(),
        }
    }

    /// Coefficients as "p/q" strings (plain "p" for integers).
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(ToString::to_string).collect()
    }
}

/// The series of e^(-t) to the given order.
pub fn exp_neg<C: Coeff>(order: usize) -> TruncatedPowerSeries<C> {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut term = C::one();
    for k in 0..=order {
        if k > 0 {
            term = -term / C::from_int(k as i64);
        }
        coeffs.push(term.clone());
    }
    TruncatedPowerSeries { coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = TruncatedPowerSeries<Rational>;

    fn q(coeffs: &[(i64, i64)], order: usize) -> Q {
        Q::new(coeffs.iter().map(|&(a, b)| rational(a, b)).collect(), order)
    }

    fn ints(coeffs: &[i64], order: usize) -> Q {
        Q::new(coeffs.iter().map(|&a| Rational::from_int(a)).collect(), order)
    }

    #[test]
    fn add_mul_scale() {
        let a = ints(&[1, 1], 2);
        let b = ints(&[1, -1], 2);
        assert_eq!(a.add(&b).unwrap(), ints(&[2], 2));
        assert_eq!(a.mul(&b).unwrap(), ints(&[1, 0, -1], 2));
        assert_eq!(Q::variable(3).scale(&Rational::from_int(3)), ints(&[0, 3], 3));
        assert_eq!(a.sub(&a).unwrap(), Q::zero(2));
    }

    #[test]
    fn order_mismatch() {
        let a = ints(&[1], 2);
        let b = ints(&[1], 3);
        assert!(matches!(a.add(&b), Err(Error::OrderMismatch { left: 2, right: 3 })));
        assert!(matches!(a.mul(&b), Err(Error::OrderMismatch { .. })));
        assert!(matches!(a.compose(&b), Err(Error::OrderMismatch { .. })));
    }

    #[test]
    fn exp_of_zero_and_x() {
        assert_eq!(Q::zero(5).exp().unwrap(), Q::one(5));
        let e = Q::variable(4).exp().unwrap();
        assert_eq!(e, q(&[(1, 1), (1, 1), (1, 2), (1, 6), (1, 24)], 4));
        assert!(matches!(Q::one(3).exp(), Err(Error::NonzeroConstantTerm)));
    }

    #[test]
    fn compose_examples() {
        let s = ints(&[3, 1, 4, 1, 5], 4);
        assert_eq!(s.compose(&Q::variable(4)).unwrap(), s);
        let one_plus_x = ints(&[1, 1], 4);
        let x2 = ints(&[0, 0, 1], 4);
        assert_eq!(one_plus_x.compose(&x2).unwrap(), ints(&[1, 0, 1], 4));
        assert!(matches!(s.compose(&one_plus_x), Err(Error::InnerConstantNonzero)));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Q::variable(6).inverse_composition().unwrap(), Q::variable(6));
        let t = ints(&[0, 1, 1], 3);
        let f = t.inverse_composition().unwrap();
        assert_eq!(f, ints(&[0, 1, -1, 2], 3));
        assert!(t.compose(&f).unwrap().is_identity());
        assert!(f.compose(&t).unwrap().is_identity());
    }

    #[test]
    fn non_invertible() {
        assert!(matches!(
            ints(&[0, 0, 1], 4).inverse_composition(),
            Err(Error::NotInvertible(_))
        ));
        assert!(matches!(
            ints(&[1, 1], 4).inverse_composition(),
            Err(Error::NotInvertible(_))
        ));
    }

    #[test]
    fn inverse_with_non_unit_linear_term() {
        let t = ints(&[0, 3, -2, 7, 1], 6);
        let f = t.inverse_composition().unwrap();
        assert!(t.compose(&f).unwrap().is_identity());
        assert!(f.compose(&t).unwrap().is_identity());
    }

    #[test]
    fn catalan_by_lagrange() {
        // x - x^2 inverts to the Catalan generating function shifted by one
        let f = ints(&[0, 1, -1], 8).inverse_composition().unwrap();
        assert_eq!(f, ints(&[0, 1, 1, 2, 5, 14, 42, 132, 429], 8));
    }

    #[test]
    fn reciprocal_and_derivative() {
        let one_minus_x = ints(&[1, -1], 5);
        assert_eq!(one_minus_x.reciprocal().unwrap(), ints(&[1, 1, 1, 1, 1, 1], 5));
        assert_eq!(ints(&[5, 1, 1, 1], 3).derivative(), ints(&[1, 2, 3], 2));
        assert!(Q::variable(3).reciprocal().is_err());
    }

    #[test]
    fn exp_neg_matches_exp_of_minus_x() {
        let e = Q::variable(10).neg().exp().unwrap();
        assert_eq!(e, exp_neg::<Rational>(10));
    }

    #[test]
    fn horner_with_polynomial_outer_and_shifted_inner() {
        // (1 + y)^2 at y = 1 + x  ==  4 + 4x + x^2
        let poly = [Rational::from_int(1), Rational::from_int(2), Rational::from_int(1)];
        let inner = ints(&[1, 1], 4);
        assert_eq!(horner(&poly, &inner), ints(&[4, 4, 1], 4));
    }

    #[test]
    fn rationalize_recovers_simple_fractions() {
        assert_eq!(rationalize(0.25, 1000), rational(1, 4));
        assert_eq!(rationalize(1.0 / 3.0, 1000), rational(1, 3));
        let r = rationalize(std::f64::consts::PI, 1000);
        assert_eq!(r, rational(355, 113));
    }

    #[test]
    fn float_eval() {
        let s = TruncatedPowerSeries::<f64>::new(vec![1.0, 2.0, 3.0], 2);
        assert_eq!(s.eval(&2.0), 1.0 + 4.0 + 12.0);
    }
}
