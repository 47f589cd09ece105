//! Bivariate truncated series and the formal group law built from a
//! logarithm/exponential pair: Phi(s1, s2) = G(F(s1) + F(s2)).

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{Coeff, Rational, TruncatedPowerSeries};

/// sum c_ij s1^i s2^j over i + j <= N. Row `i` holds j = 0..=N-i.
#[derive(Clone, PartialEq)]
pub struct BivariateSeries<C> {
    order: usize,
    rows: Vec<Vec<C>>,
}

impl<C: Coeff> fmt::Debug for BivariateSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BivariateSeries")
            .field("order", &self.order)
            .field("rows", &self.rows)
            .finish()
    }
}

impl<C: Coeff> BivariateSeries<C> {
    pub fn zero(order: usize) -> Self {
        Self {
            order,
            rows: (0..=order).map(|i| vec![C::zero(); order - i + 1]).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, i: usize, j: usize) -> C {
        if i + j > self.order {
            return C::zero();
        }
        self.rows[i][j].clone()
    }

    fn add_to(&mut self, i: usize, j: usize, v: C) {
        self.rows[i][j] = self.rows[i][j].clone() + v;
    }

    /// Iterates (i, j, c_ij) in row-major order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &C)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, c)| (i, j, c)))
    }

    /// S(s1) viewed as a bivariate series.
    pub fn in_first(s: &TruncatedPowerSeries<C>) -> Self {
        let mut out = Self::zero(s.order());
        for (i, c) in s.coeffs().iter().enumerate() {
            out.rows[i][0] = c.clone();
        }
        out
    }

    /// S(s2) viewed as a bivariate series.
    pub fn in_second(s: &TruncatedPowerSeries<C>) -> Self {
        let mut out = Self::zero(s.order());
        for (j, c) in s.coeffs().iter().enumerate() {
            out.rows[0][j] = c.clone();
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.order, other.order);
        let mut out = self.clone();
        for (i, j, c) in other.terms() {
            out.add_to(i, j, c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.order, other.order);
        Self {
            order: self.order,
            rows: C::convolve_triangular(&self.rows, &other.rows, self.order),
        }
    }

    /// sum_k outer[k] inner^k; `inner` must have zero constant term.
    pub fn compose_into(outer: &TruncatedPowerSeries<C>, inner: &Self) -> Self {
        let mut acc = Self::zero(inner.order);
        for c in outer.coeffs()[..=outer.order().min(inner.order)].iter().rev() {
            acc = acc.mul(inner);
            acc.add_to(0, 0, c.clone());
        }
        acc
    }

    /// Powers inner^0..=inner^order.
    fn powers(&self) -> Vec<Self> {
        let mut out = Vec::with_capacity(self.order + 1);
        let mut unit = Self::zero(self.order);
        unit.rows[0][0] = C::one();
        out.push(unit);
        for k in 1..=self.order {
            let next = out[k - 1].mul(self);
            out.push(next);
        }
        out
    }

    /// Swaps the roles of s1 and s2.
    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.order);
        for (i, j, c) in self.terms() {
            out.rows[j][i] = c.clone();
        }
        out
    }

    pub fn eval(&self, s1: &C, s2: &C) -> C {
        self.rows.iter().rev().fold(C::zero(), |acc, row| {
            let inner = row.iter().rev().fold(C::zero(), |a, c| a * s2.clone() + c.clone());
            acc * s1.clone() + inner
        })
    }

    /// Coefficientwise check of the formal group law axioms to total degree
    /// `self.order`. Differences must vanish exactly for `tol == 0`, or stay
    /// within `tol` in magnitude otherwise.
    pub fn check_group_law(&self, tol: f64) -> GroupLawChecks {
        let n = self.order;
        let leading = self.coeff(0, 0).within(tol)
            && (self.coeff(1, 0) - C::one()).within(tol)
            && (self.coeff(0, 1) - C::one()).within(tol);
        // Phi(s, 0) = s and Phi(0, s) = s
        let unit = (0..=n).all(|k| {
            let target = if k == 1 { C::one() } else { C::zero() };
            (self.coeff(k, 0) - target.clone()).within(tol) && (self.coeff(0, k) - target).within(tol)
        });
        let commutative = self.terms().all(|(i, j, c)| (c.clone() - self.coeff(j, i)).within(tol));
        let associative = self.associativity_defect(tol).is_none();
        GroupLawChecks {
            order: n,
            leading_linear: leading,
            unit,
            commutative,
            associative,
        }
    }

    /// First exponent (a, b, c) at which Phi(Phi(x, y), z) and
    /// Phi(x, Phi(y, z)) differ, if any, to total degree N.
    ///
    /// Phi(x, y) involves no z, so Phi(Phi(x, y), z) = sum_ij phi_ij
    /// Phi(x, y)^i z^j only needs bivariate powers of Phi; likewise on the
    /// other side.
    pub fn associativity_defect(&self, tol: f64) -> Option<(usize, usize, usize)> {
        let n = self.order;
        let powers = self.powers();
        for total in 0..=n {
            for a in 0..=total {
                for b in 0..=total - a {
                    let c = total - a - b;
                    // left: x^a y^b z^c in sum_ij phi_ij W^i z^j, W = Phi(x, y)
                    let mut left = C::zero();
                    for (i, w) in powers.iter().enumerate().take(n - c + 1) {
                        let phi = self.coeff(i, c);
                        if !phi.is_zero() {
                            left = left + phi * w.coeff(a, b);
                        }
                    }
                    // right: x^a y^b z^c in sum_ij phi_ij x^i V^j, V = Phi(y, z)
                    let mut right = C::zero();
                    for (j, v) in powers.iter().enumerate().take(n - a + 1) {
                        let phi = self.coeff(a, j);
                        if !phi.is_zero() {
                            right = right + phi * v.coeff(b, c);
                        }
                    }
                    if !(left - right).within(tol) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }
}

impl BivariateSeries<Rational> {
    pub fn to_f64(&self) -> BivariateSeries<f64> {
        BivariateSeries {
            order: self.order,
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().map(crate::series::rational_to_f64).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GroupLawChecks {
    pub order: usize,
    pub leading_linear: bool,
    pub unit: bool,
    pub commutative: bool,
    pub associative: bool,
}

impl GroupLawChecks {
    pub fn all_pass(&self) -> bool {
        self.leading_linear && self.unit && self.commutative && self.associative
    }
}

/// Phi(s1, s2) = G(F(s1) + F(s2)) to total degree `order`, where F must
/// be the compositional inverse of G.
pub fn lazard_law<C: Coeff>(
    log: &TruncatedPowerSeries<C>,
    exp: &TruncatedPowerSeries<C>,
    order: usize,
    tol: f64,
) -> Result<BivariateSeries<C>> {
    if log.order() < order || exp.order() < order {
        return Err(Error::OrderMismatch {
            left: log.order().min(exp.order()),
            right: order,
        });
    }
    let g = log.truncate(order);
    let f = exp.truncate(order);
    let roundtrip = g.compose(&f)?;
    let ok = roundtrip
        .coeffs()
        .iter()
        .enumerate()
        .all(|(k, c)| (c.clone() - if k == 1 { C::one() } else { C::zero() }).within(tol));
    if !ok {
        return Err(Error::InversePairMismatch { order });
    }
    // (F(s1) + F(s2))^k = sum_i C(k, i) F(s1)^i F(s2)^(k-i) and F^i starts
    // at degree i, so phi_ab = sum_{i<=a, j<=b} g_(i+j) C(i+j, i) [F^i]_a [F^j]_b
    let mut powers = vec![TruncatedPowerSeries::one(order)];
    for k in 1..=order {
        powers.push(powers[k - 1].mul(&f)?);
    }
    let mut binom = vec![vec![C::one()]];
    for k in 1..=order {
        let prev = &binom[k - 1];
        let row = (0..=k)
            .map(|i| match (i, k - i) {
                (0, _) | (_, 0) => C::one(),
                _ => prev[i - 1].clone() + prev[i].clone(),
            })
            .collect();
        binom.push(row);
    }
    let mut out = BivariateSeries::zero(order);
    for a in 0..=order {
        for b in 0..=order - a {
            let mut acc = C::zero();
            for i in 0..=a {
                let fa = powers[i].coeff(a);
                if fa.is_zero() {
                    continue;
                }
                for j in 0..=b.min(order - i) {
                    let gk = g.coeff(i + j);
                    let fb = powers[j].coeff(b);
                    if gk.is_zero() || fb.is_zero() {
                        continue;
                    }
                    acc = acc + gk * binom[i + j][i].clone() * fa.clone() * fb;
                }
            }
            out.rows[a][b] = acc;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rational;

    type Q = TruncatedPowerSeries<Rational>;

    #[test]
    fn additive_law() {
        let x = Q::variable(6);
        let phi = lazard_law(&x, &x, 6, 0.0).unwrap();
        for (i, j, c) in phi.terms() {
            let expected = if i + j == 1 { 1 } else { 0 };
            assert_eq!(*c, rational(expected, 1), "({i},{j})");
        }
        assert!(phi.check_group_law(0.0).all_pass());
    }

    #[test]
    fn multiplicative_law() {
        // G(t) = e^t - 1, F(s) = log(1 + s): Phi = s1 + s2 + s1 s2
        let n = 8;
        let g = Q::variable(n).exp().unwrap().sub(&Q::one(n)).unwrap();
        let f = g.inverse_composition().unwrap();
        let phi = lazard_law(&g, &f, n, 0.0).unwrap();
        for (i, j, c) in phi.terms() {
            let expected = if (i, j) == (1, 0) || (i, j) == (0, 1) || (i, j) == (1, 1) {
                1
            } else {
                0
            };
            assert_eq!(*c, rational(expected, 1), "({i},{j})");
        }
        let checks = phi.check_group_law(0.0);
        assert!(checks.all_pass(), "{checks:?}");
        assert!((phi.to_f64().eval(&0.5, &0.25) - 0.875).abs() < 1e-15);
    }

    #[test]
    fn binomial_route_matches_direct_composition() {
        let n = 7;
        let g = Q::new((0..=n as i64).map(|k| rational(k * k - 3 * k + 1, k + 1)).collect(), n)
            .sub(&Q::one(n))
            .unwrap()
            .add(&Q::variable(n))
            .unwrap();
        let g = Q::new(
            [rational(0, 1)]
                .into_iter()
                .chain(g.coeffs()[1..].iter().cloned())
                .collect(),
            n,
        );
        let g = g.scale(&(rational(1, 1) / g.coeff(1)));
        let f = g.inverse_composition().unwrap();
        let direct =
            BivariateSeries::compose_into(&g, &BivariateSeries::in_first(&f).add(&BivariateSeries::in_second(&f)));
        assert_eq!(lazard_law(&g, &f, n, 0.0).unwrap(), direct);
    }

    #[test]
    fn mismatched_pair_rejected() {
        let n = 5;
        let g = Q::new(vec![rational(0, 1), rational(1, 1), rational(1, 1)], n);
        assert!(matches!(
            lazard_law(&g, &g, n, 0.0),
            Err(Error::InversePairMismatch { order: 5 })
        ));
    }

    #[test]
    fn detects_non_associative_series() {
        // s1 + s2 + s1^2 s2 is commutative-failing and non-associative
        let mut phi = BivariateSeries::<Rational>::zero(4);
        phi.add_to(1, 0, rational(1, 1));
        phi.add_to(0, 1, rational(1, 1));
        phi.add_to(2, 1, rational(1, 1));
        let checks = phi.check_group_law(0.0);
        assert!(checks.leading_linear && checks.unit);
        assert!(!checks.commutative);
        assert!(!checks.associative);
        assert_ne!(phi.transpose(), phi);
    }
}
