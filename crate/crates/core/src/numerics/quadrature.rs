//! Composite Gauss–Legendre quadrature on panel layouts, with geometric grading
//! toward integrable endpoint or interior singularities.

use crate::error::{invalid, Error, Result};

/// Gauss–Legendre nodes and weights on the reference interval [-1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..(n + 1) / 2 {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A composite rule: one Gauss–Legendre block per panel between consecutive breaks.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    base: GaussLegendre,
    breaks: Vec<f64>,
}

impl QuadratureRule {
    pub const DEFAULT_ORDER: usize = 16;

    pub fn from_breaks(breaks: Vec<f64>, order: usize) -> Result<Self> {
        if breaks.len() < 2 {
            return invalid("a quadrature rule needs at least one panel");
        }
        if breaks.iter().any(|b| !b.is_finite()) || breaks.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("panel breaks must be finite and strictly increasing");
        }
        Ok(Self { base: GaussLegendre::new(order), breaks })
    }

    /// `panels` equal panels on [a, b].
    pub fn uniform(a: f64, b: f64, panels: usize, order: usize) -> Result<Self> {
        if panels == 0 || !(b > a) {
            return invalid(format!("bad uniform layout: [{a}, {b}] with {panels} panels"));
        }
        let h = (b - a) / panels as f64;
        let mut breaks: Vec<f64> = (0..panels).map(|i| a + i as f64 * h).collect();
        breaks.push(b);
        Self::from_breaks(breaks, order)
    }

    /// Uniform panels on [a, b] refined geometrically (ratio 2, `levels` times) toward
    /// each listed singular point, stopping at panels of width (b − a)·1e−12. Singular
    /// points become panel breaks, so no node ever sits on a singularity.
    pub fn graded(
        a: f64,
        b: f64,
        singular: &[f64],
        base_panels: usize,
        levels: usize,
        order: usize,
    ) -> Result<Self> {
        let coarse = Self::uniform(a, b, base_panels, order)?;
        let mut breaks = coarse.breaks;
        let mut inside: Vec<f64> = singular.iter().copied().filter(|s| *s >= a && *s <= b).collect();
        sort_dedup(&mut inside, (b - a) * 1e-14);
        breaks.extend(inside.iter().copied());
        sort_dedup(&mut breaks, (b - a) * 1e-14);
        let mut extra = Vec::new();
        // Finer panels would resolve rounding noise in the singular point itself.
        let floor = (b - a) * 1e-12;
        for &s in &inside {
            let idx = breaks
                .iter()
                .position(|x| (x - s).abs() <= (b - a) * 1e-14)
                .expect("singular point was inserted");
            if idx > 0 {
                let w = s - breaks[idx - 1];
                extra.extend((1..=levels).map(|l| w / 2f64.powi(l as i32)).filter(|d| *d >= floor).map(|d| s - d));
            }
            if idx + 1 < breaks.len() {
                let w = breaks[idx + 1] - s;
                extra.extend((1..=levels).map(|l| w / 2f64.powi(l as i32)).filter(|d| *d >= floor).map(|d| s + d));
            }
        }
        breaks.extend(extra);
        sort_dedup(&mut breaks, 0.0);
        Self::from_breaks(breaks, order)
    }

    pub fn order(&self) -> usize {
        self.base.nodes.len()
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.breaks[0], *self.breaks.last().unwrap())
    }

    pub fn panel_count(&self) -> usize {
        self.breaks.len() - 1
    }

    /// Every panel split in two.
    pub fn refined(&self) -> Self {
        let mut breaks = Vec::with_capacity(2 * self.breaks.len());
        for w in self.breaks.windows(2) {
            breaks.push(w[0]);
            breaks.push(0.5 * (w[0] + w[1]));
        }
        breaks.push(*self.breaks.last().unwrap());
        Self { base: self.base.clone(), breaks }
    }

    /// Same panel layout affinely mapped onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> Self {
        let (lo, hi) = self.interval();
        let scale = (b - a) / (hi - lo);
        let breaks = self.breaks.iter().map(|x| a + (x - lo) * scale).collect();
        Self { base: self.base.clone(), breaks }
    }

    /// All (node, weight) pairs in increasing node order.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.panel_count() * self.order());
        for w in self.breaks.windows(2) {
            let half = 0.5 * (w[1] - w[0]);
            let mid = 0.5 * (w[1] + w[0]);
            for (x, wt) in self.base.nodes.iter().zip(&self.base.weights) {
                out.push((mid + half * x, half * wt));
            }
        }
        out
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let mut terms = Vec::with_capacity(self.panel_count() * self.order());
        for (x, w) in self.nodes() {
            let v = f(x);
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand { node: x, value: v });
            }
            terms.push(w * v);
        }
        Ok(pairwise_sum(&terms))
    }

    /// Integral on the refined layout together with |refined − coarse| as error estimate.
    pub fn integrate_with_error<F: Fn(f64) -> f64>(&self, f: F) -> Result<(f64, f64)> {
        let coarse = self.integrate(&f)?;
        let fine = self.refined().integrate(&f)?;
        Ok((fine, (fine - coarse).abs()))
    }
}

/// ∫ f over `interval` using the panel layout of `rule` mapped onto it.
pub fn quadrature<F: Fn(f64) -> f64>(f: F, interval: (f64, f64), rule: &QuadratureRule) -> Result<f64> {
    if !(interval.1 > interval.0) {
        return invalid(format!("empty interval [{}, {}]", interval.0, interval.1));
    }
    rule.mapped(interval.0, interval.1).integrate(f)
}

/// Recursive pairwise summation; the reduction order depends only on the length.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 16 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

fn sort_dedup(v: &mut Vec<f64>, tol: f64) {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup_by(|a, b| (*a - *b).abs() <= tol);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 16, 33] {
            let gl = GaussLegendre::new(n);
            let s: f64 = gl.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "order {n}: {s}");
            assert!(gl.weights.iter().all(|w| *w > 0.0));
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let rule = QuadratureRule::uniform(0.0, 1.0, 1, 5).unwrap();
        let v = rule.integrate(|x| x.powi(9)).unwrap();
        assert!((v - 0.1).abs() < 1e-15);
    }

    #[test]
    fn constant_integrand() {
        let rule = QuadratureRule::uniform(0.0, 1.0, 3, 16).unwrap();
        assert!((quadrature(|_| 1.0, (0.0, 1.0), &rule).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn log_singularity_with_grading() {
        let rule = QuadratureRule::graded(0.0, 1.0, &[0.0], 4, 40, 16).unwrap();
        let v = rule.integrate(|y| y.ln()).unwrap();
        assert!((v + 1.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn interior_log_singularity() {
        let rule = QuadratureRule::graded(-1.0, 2.0, &[0.5], 6, 40, 16).unwrap();
        let v = rule.integrate(|y| (y - 0.5f64).abs().ln()).unwrap();
        let exact = 3.0 * (1.5f64.ln() - 1.0);
        assert!((v - exact).abs() < 1e-8, "{v} vs {exact}");
    }

    #[test]
    fn non_finite_node_is_reported() {
        let rule = QuadratureRule::uniform(-1.0, 1.0, 1, 1).unwrap();
        match rule.integrate(|x| 1.0 / x) {
            Err(Error::NonFiniteIntegrand { node, .. }) => assert_eq!(node, 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }
}
