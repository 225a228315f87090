/// Real polynomial with coefficients in increasing degree order.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self(coeffs)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly(self.0.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly((0..n)
            .map(|i| self.0.get(i).copied().unwrap_or(0.0) + other.0.get(i).copied().unwrap_or(0.0))
            .collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly(vec![]);
        }
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    /// Degree after dropping leading coefficients below `rel` times the largest one;
    /// `None` for the zero polynomial.
    pub fn effective_degree(&self, rel: f64) -> Option<usize> {
        let scale = self.max_abs_coeff();
        if scale == 0.0 {
            return None;
        }
        self.0.iter().rposition(|c| c.abs() > rel * scale)
    }

    /// All real roots, in increasing order, with multiple roots reported once.
    ///
    /// Roots of the derivative split the line into monotone pieces; each sign change
    /// is bracketed and bisected, and near-zero values at critical points are kept as
    /// tangential (even-multiplicity) roots.
    pub fn real_roots(&self) -> Vec<f64> {
        let Some(deg) = self.effective_degree(1e-13) else {
            return vec![];
        };
        let p = Poly(self.0[..=deg].to_vec());
        match deg {
            0 => vec![],
            1 => vec![-p.0[0] / p.0[1]],
            _ => {
                let lead = p.0[deg];
                let bound = 1.0 + p.0[..deg].iter().fold(0.0f64, |m, c| m.max((c / lead).abs()));
                let crit = p.derivative().real_roots();
                let mut knots = vec![-bound];
                knots.extend(crit.iter().copied().filter(|c| c.abs() < bound));
                knots.push(bound);
                let mut roots = Vec::new();
                for &c in &crit {
                    if p.eval(c).abs() <= 1e-12 * p.magnitude_at(c) {
                        roots.push(c);
                    }
                }
                for w in knots.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    let (fa, fb) = (p.eval(a), p.eval(b));
                    if fa == 0.0 {
                        roots.push(a);
                    } else if fa * fb < 0.0 {
                        roots.push(p.bisect(a, b, fa));
                    }
                }
                if p.eval(bound) == 0.0 {
                    roots.push(bound);
                }
                roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
                roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-10 * (1.0 + a.abs()));
                roots
            }
        }
    }

    /// Σ|c_i||x|^i, the natural scale for judging |p(x)| ≈ 0.
    pub fn magnitude_at(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x.abs() + c.abs())
    }

    fn bisect(&self, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = self.eval(m);
            if fm == 0.0 {
                return m;
            }
            if fa * fm < 0.0 {
                b = m;
            } else {
                a = m;
                fa = fm;
            }
        }
        0.5 * (a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartic_with_four_roots() {
        let p = Poly::new(vec![1.0, -2.0, -1.0, 2.0])
            .mul(&Poly::new(vec![-3.0, 1.0]));
        let r = p.real_roots();
        let expect = [-1.0, 0.5, 1.0, 3.0];
        assert_eq!(r.len(), 4, "{r:?}");
        for (a, b) in r.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn double_root_counted_once() {
        let p = Poly::new(vec![0.25, -1.0, 1.0]);
        let r = p.real_roots();
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.5).abs() < 1e-8);
    }

    #[test]
    fn no_real_roots() {
        assert!(Poly::new(vec![1.0, 0.0, 1.0]).real_roots().is_empty());
        assert!(Poly::new(vec![1.0, 1.0, 1.0]).real_roots().is_empty());
    }
}
