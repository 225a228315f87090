//! Adjoint eigenfunctions of the rescaled operator: generalized Hermite
//! polynomials ψ*_β = (1/√β!) [y^β + Σ_{j≥1} (−1)^{mj}/j! Δ^{mj} y^β],
//! i.e. e^{−(−Δ)^m} applied to the monomial, kept in exact rational arithmetic.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::numerics::Poly;
use crate::spectral::eigen::MultiIndex;

pub type Rational = Ratio<i128>;

/// Polynomial in N variables with rational coefficients, stored by exponent vector,
/// times an overall factor 1/√β!.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdjointPolynomial {
    pub beta: MultiIndex,
    #[serde(serialize_with = "serialize_terms")]
    pub terms: BTreeMap<Vec<usize>, Rational>,
    pub inv_sqrt_factorial: f64,
}

fn serialize_terms<S: serde::Serializer>(
    terms: &BTreeMap<Vec<usize>, Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(terms.len()))?;
    for (exp, c) in terms {
        seq.serialize_element(&(exp, format!("{c}")))?;
    }
    seq.end()
}

fn laplacian(poly: &BTreeMap<Vec<usize>, Rational>) -> BTreeMap<Vec<usize>, Rational> {
    let mut out: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
    for (exp, c) in poly {
        for i in 0..exp.len() {
            if exp[i] >= 2 {
                let mut e = exp.clone();
                e[i] -= 2;
                let f = Rational::from_integer((exp[i] * (exp[i] - 1)) as i128);
                *out.entry(e).or_insert_with(|| Rational::from_integer(0)) += *c * f;
            }
        }
    }
    out.retain(|_, c| *c != Rational::from_integer(0));
    out
}

/// ψ*_β for the kernel of e^{−|k|^{2m}} (m = 5 for Δ⁵).
pub fn adjoint_polynomial_order(beta: &MultiIndex, m: usize) -> Result<AdjointPolynomial> {
    if beta.order() > 20 {
        return invalid(format!("|β| = {} exceeds 20", beta.order()));
    }
    if m == 0 {
        return invalid("operator order must be positive");
    }
    let mut terms: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
    terms.insert(beta.0.clone(), Rational::from_integer(1));
    let mut current = terms.clone();
    let mut j = 1i128;
    let mut j_factorial = 1i128;
    loop {
        for _ in 0..m {
            current = laplacian(&current);
        }
        if current.is_empty() {
            break;
        }
        j_factorial *= j;
        let sign = if (m as i128 * j) % 2 == 0 { 1 } else { -1 };
        for (e, c) in &current {
            *terms.entry(e.clone()).or_insert_with(|| Rational::from_integer(0)) +=
                *c * Rational::new(sign, j_factorial);
        }
        j += 1;
    }
    terms.retain(|_, c| *c != Rational::from_integer(0));
    Ok(AdjointPolynomial { beta: beta.clone(), terms, inv_sqrt_factorial: 1.0 / beta.sqrt_factorial() })
}

/// ψ*_β for Δ⁵.
pub fn adjoint_polynomial(beta: &MultiIndex, dim: usize) -> Result<AdjointPolynomial> {
    if beta.dim() != dim {
        return invalid(format!("multi-index has {} entries, dimension is {dim}", beta.dim()));
    }
    adjoint_polynomial_order(beta, 5)
}

impl AdjointPolynomial {
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mono: f64 = e.iter().zip(y).map(|(k, v)| v.powi(*k as i32)).product();
                (*c.numer() as f64 / *c.denom() as f64) * mono
            })
            .sum::<f64>()
            * self.inv_sqrt_factorial
    }

    /// One-dimensional polynomial with the normalization folded in.
    pub fn to_poly(&self) -> Result<Poly> {
        if self.beta.dim() != 1 {
            return invalid("only one-dimensional adjoint polynomials convert to Poly");
        }
        let mut c = vec![0.0; self.degree() + 1];
        for (e, v) in &self.terms {
            c[e[0]] = (*v.numer() as f64 / *v.denom() as f64) * self.inv_sqrt_factorial;
        }
        Ok(Poly(c))
    }

    /// Exact coefficient of y^exponent before the 1/√β! factor.
    pub fn coefficient(&self, exponent: &[usize]) -> Rational {
        self.terms.get(exponent).copied().unwrap_or_else(|| Rational::from_integer(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn below_ten_the_correction_is_empty() {
        let p = adjoint_polynomial(&MultiIndex::new(vec![3]), 1).unwrap();
        assert_eq!(p.terms.len(), 1);
        assert!((p.eval(&[2.0]) - 8.0 / 6f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn tenth_degree_has_constant_correction() {
        let p = adjoint_polynomial(&MultiIndex::new(vec![10]), 1).unwrap();
        assert_eq!(p.coefficient(&[10]), Rational::from_integer(1));
        assert_eq!(p.coefficient(&[0]), Rational::from_integer(-3_628_800));
    }

    #[test]
    fn dipole_adjoint_is_coordinate() {
        let p = adjoint_polynomial(&MultiIndex::new(vec![1, 0]), 2).unwrap();
        assert_eq!(p.eval(&[0.7, -3.0]), 0.7);
    }

    #[test]
    fn second_order_kernel_gives_hermite_polynomials() {
        // For e^{−k²} the adjoints are 2^{k/2} He_k(y/√2)/√k!.
        for k in 0..=8usize {
            let p = adjoint_polynomial_order(&MultiIndex::new(vec![k]), 1).unwrap();
            for &y in &[-1.3, 0.4, 2.2] {
                let x = y / 2f64.sqrt();
                let (mut h0, mut h1) = (1.0, x);
                let he = if k == 0 {
                    1.0
                } else {
                    for n in 1..k {
                        let h2 = x * h1 - n as f64 * h0;
                        h0 = h1;
                        h1 = h2;
                    }
                    h1
                };
                let fact: f64 = (1..=k).map(|v| v as f64).product();
                let expect = 2f64.powf(0.5 * k as f64) * he / fact.sqrt();
                assert!((p.eval(&[y]) - expect).abs() < 1e-10 * (1.0 + expect.abs()), "k={k}");
            }
        }
    }
}
