//! Truncated formal power series in a single variable `z`.
//!
//! Photon-number probabilities are the Taylor coefficients of generating
//! functions of the form `p(z)^alpha`, with `p` a low-degree polynomial. They are
//! extracted here with the linear recurrence that follows from
//! `f'(z) p(z) = alpha p'(z) f(z)`, which costs `O(order * deg p)` and carries no
//! quadrature error.

use crate::error::{Error, Result};

/// Coefficients `c_0..=c_M` of a power series truncated at order `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedPowerSeries {
    coeffs: Vec<f64>,
}

impl TruncatedPowerSeries {
    /// Wraps a coefficient vector. Rejects empty input and non-finite entries.
    pub fn from_coeffs(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("a truncated series needs at least one coefficient"));
        }
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { coeffs })
    }

    /// The series `1 + 0 z + ... + 0 z^order`.
    pub fn one(order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = 1.0;
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Coefficient of `z^m`, zero beyond the truncation order.
    pub fn get(&self, m: usize) -> f64 {
        self.coeffs.get(m).copied().unwrap_or(0.0)
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    /// Cauchy product truncated at the smaller of the two orders.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|n| (0..=n).map(|k| self.coeffs[k] * other.coeffs[n - k]).sum())
            .collect();
        Self { coeffs }
    }

    /// Compensated sum of all coefficients, i.e. the truncated series at `z = 1`.
    pub fn total(&self) -> f64 {
        compensated_sum(self.coeffs.iter().copied())
    }
}

/// First `order + 1` Taylor coefficients of `p(z)^alpha` about `z = 0`.
///
/// With `d = deg p`, the coefficients obey
/// `n p_0 f_n = sum_{k=1}^{min(n,d)} ((alpha + 1) k - n) p_k f_{n-k}`, `f_0 = p_0^alpha`.
pub fn poly_power(p: &[f64], alpha: f64, order: usize) -> Result<TruncatedPowerSeries> {
    let Some(&p0) = p.first() else {
        return Err(Error::invalid("polynomial has no coefficients"));
    };
    if !alpha.is_finite() || p.iter().any(|c| !c.is_finite()) {
        return Err(Error::invalid("polynomial and exponent must be finite"));
    }
    if p0 == 0.0 {
        return Err(Error::ZeroConstantTerm);
    }
    if p0 < 0.0 && alpha.fract() != 0.0 {
        return Err(Error::ComplexBranch { constant: p0, alpha });
    }

    if alpha >= 0.0 && alpha.fract() == 0.0 && alpha <= 64.0 {
        return Ok(integer_power(p, alpha as u32, order));
    }

    let degree = p.len() - 1;
    let mut f = Vec::with_capacity(order + 1);
    f.push(p0.powf(alpha));
    for n in 1..=order {
        let nf = n as f64;
        let mut acc = 0.0;
        for k in 1..=n.min(degree) {
            acc += ((alpha + 1.0) * k as f64 - nf) * p[k] * f[n - k];
        }
        let fn_ = acc / (nf * p0);
        if !fn_.is_finite() {
            return Err(Error::NonFinite { index: n });
        }
        f.push(fn_);
    }
    Ok(TruncatedPowerSeries { coeffs: f })
}

// Small nonnegative integer powers are polynomials; repeated products keep them exact.
fn integer_power(p: &[f64], power: u32, order: usize) -> TruncatedPowerSeries {
    let mut base = vec![0.0; order + 1];
    for (b, &c) in base.iter_mut().zip(p) {
        *b = c;
    }
    let base = TruncatedPowerSeries { coeffs: base };
    let mut acc = TruncatedPowerSeries::one(order);
    for _ in 0..power {
        acc = acc.mul(&base);
    }
    acc
}

/// `(a + b z) s(z)`, truncated at the order of `s`.
pub fn mul_by_linear(s: &TruncatedPowerSeries, a: f64, b: f64) -> TruncatedPowerSeries {
    let c = &s.coeffs;
    let coeffs = (0..c.len())
        .map(|m| a * c[m] + if m > 0 { b * c[m - 1] } else { 0.0 })
        .collect();
    TruncatedPowerSeries { coeffs }
}

/// Neumaier-compensated summation.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn geometric_series() {
        let s = poly_power(&[1.0, -1.0], -1.0, 4).unwrap();
        assert_eq!(s.coeffs(), &[1.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(s.order(), 4);
    }

    #[test]
    fn binomial_square() {
        let s = poly_power(&[1.0, 1.0], 2.0, 3).unwrap();
        assert_eq!(s.coeffs(), &[1.0, 2.0, 1.0, 0.0]);
    }

    #[test]
    fn inverse_square_root_matches_binomial_coefficients() {
        // (1 - z)^(-1/2) = sum C(2n, n) / 4^n z^n
        let s = poly_power(&[1.0, -1.0], -0.5, 10).unwrap();
        let mut expected = 1.0;
        for n in 0..=10 {
            assert_abs_diff_eq!(s.get(n), expected, epsilon = 1e-15);
            expected *= (2 * n + 1) as f64 / (2 * n + 2) as f64;
        }
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert_eq!(poly_power(&[0.0, 1.0], 0.5, 3), Err(Error::ZeroConstantTerm));
        assert!(matches!(
            poly_power(&[-1.0, 1.0], -0.5, 3),
            Err(Error::ComplexBranch { .. })
        ));
        // integer powers of a negative constant are fine
        let s = poly_power(&[-2.0, 1.0], 3.0, 4).unwrap();
        assert_eq!(s.coeffs(), &[-8.0, 12.0, -6.0, 1.0, 0.0]);
        assert!(poly_power(&[], 1.0, 2).is_err());
        assert!(TruncatedPowerSeries::from_coeffs(vec![1.0, f64::NAN]).is_err());
        assert!(TruncatedPowerSeries::from_coeffs(vec![]).is_err());
    }

    #[test]
    fn linear_factor_examples() {
        let s = TruncatedPowerSeries::from_coeffs(vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(mul_by_linear(&s, 1.0, 0.0).coeffs(), &[1.0, 1.0, 1.0]);
        let delta = TruncatedPowerSeries::one(2);
        assert_eq!(mul_by_linear(&delta, 0.92, 0.08).coeffs(), &[0.92, 0.08, 0.0]);
    }

    #[test]
    fn photon_generating_function_normalizes() {
        // Y(z) at g = 0.5, eta = 0.5; Y(1) = 1 so (1/2 + z/2) Y^{-3/2} sums to one.
        let (s2, c2) = (0.5_f64.sinh().powi(2), 0.5_f64.cosh().powi(2));
        let eta = 0.5;
        let y = [
            c2 - s2 * (1.0 - eta) * (1.0 - eta),
            -2.0 * eta * (1.0 - eta) * s2,
            -eta * eta * s2,
        ];
        let f = mul_by_linear(&poly_power(&y, -1.5, 400).unwrap(), 0.5, 0.5);
        assert!((1.0 - f.total()).abs() < 1e-12);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let values = std::iter::once(1.0).chain(std::iter::repeat(1e-16).take(10_000));
        assert_abs_diff_eq!(compensated_sum(values), 1.0 + 1e-12, epsilon = 1e-15);
    }

    // c (1 - z/r1)(1 - z/r2) with roots outside the unit disk, the regime the
    // amplifier polynomials live in; degree 0, 1 or 2
    fn poly_strategy() -> impl Strategy<Value = Vec<f64>> {
        let root = (1.25f64..10.0, any::<bool>()).prop_map(|(r, neg)| if neg { -r } else { r });
        (0.2f64..3.0, prop::collection::vec(root, 0..3)).prop_map(|(c, roots)| {
            let mut p = vec![c];
            for r in roots {
                p.push(0.0);
                for k in (1..p.len()).rev() {
                    p[k] -= p[k - 1] / r;
                }
            }
            p
        })
    }

    proptest! {
        #[test]
        fn power_times_inverse_power_is_one(p in poly_strategy(), alpha in -2.0f64..2.0) {
            let order = 24;
            let prod = poly_power(&p, alpha, order).unwrap()
                .mul(&poly_power(&p, -alpha, order).unwrap());
            for (n, c) in prod.coeffs().iter().enumerate() {
                let expected = if n == 0 { 1.0 } else { 0.0 };
                prop_assert!((c - expected).abs() <= 1e-12, "coefficient {} = {}", n, c);
            }
        }

        #[test]
        fn first_power_reproduces_polynomial(p in poly_strategy(), order in 0usize..12) {
            let s = poly_power(&p, 1.0, order).unwrap();
            for n in 0..=order {
                prop_assert_eq!(s.get(n), p.get(n).copied().unwrap_or(0.0));
            }
        }

        #[test]
        fn scaling_the_polynomial_scales_the_power(
            p in poly_strategy(), alpha in -2.0f64..2.0, c in 0.1f64..10.0
        ) {
            let base = poly_power(&p, alpha, 16).unwrap();
            let scaled_p: Vec<f64> = p.iter().map(|x| c * x).collect();
            let scaled = poly_power(&scaled_p, alpha, 16).unwrap();
            let factor = c.powf(alpha);
            // relative to the largest coefficient: mixed-sign roots make single
            // coefficients pass through zero
            let size = base.coeffs().iter().fold(0.0f64, |m, x| m.max(x.abs())) * factor;
            for n in 0..=16 {
                let want = factor * base.get(n);
                prop_assert!((scaled.get(n) - want).abs() <= 1e-12 * size,
                    "n={} got {} want {}", n, scaled.get(n), want);
            }
        }
    }
}
