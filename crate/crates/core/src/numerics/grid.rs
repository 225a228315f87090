use crate::error::{invalid, Result};
use crate::numerics::quadrature::{pairwise_sum, QuadratureRule};

#[derive(Clone, Debug, PartialEq)]
pub enum Spacing {
    Uniform { step: f64 },
    /// Gauss–Legendre nodes of a composite rule; carries the matching weights.
    PanelComposite { weights: Vec<f64> },
    Irregular,
}

/// Ordered sample points of the similarity variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    spacing: Spacing,
}

impl Grid {
    /// `n` equally spaced points from `a` to `b` inclusive.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 2 || !(b > a) || !a.is_finite() || !b.is_finite() {
            return invalid(format!("bad uniform grid [{a}, {b}] with {n} points"));
        }
        let step = (b - a) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| a + i as f64 * step).collect();
        points[n - 1] = b;
        Ok(Self { points, spacing: Spacing::Uniform { step } })
    }

    /// Nodes of a composite Gauss–Legendre rule.
    pub fn panel_composite(rule: &QuadratureRule) -> Self {
        let (points, weights) = rule.nodes().into_iter().unzip();
        Self { points, spacing: Spacing::PanelComposite { weights } }
    }

    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return invalid("grid must be nonempty");
        }
        if points.iter().any(|p| !p.is_finite()) {
            return invalid("grid points must be finite");
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("grid points must be strictly increasing");
        }
        Ok(Self { points, spacing: Spacing::Irregular })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn spacing(&self) -> &Spacing {
        &self.spacing
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        *self.points.last().unwrap()
    }

    /// Integral of sampled values over the grid's span: Gauss weights for
    /// panel-composite grids, Simpson (odd count) or trapezoid otherwise.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.points.len(), "sample count must match grid");
        match &self.spacing {
            Spacing::PanelComposite { weights } => {
                let terms: Vec<f64> = weights.iter().zip(values).map(|(w, v)| w * v).collect();
                pairwise_sum(&terms)
            }
            Spacing::Uniform { step } if values.len() % 2 == 1 && values.len() >= 3 => {
                let n = values.len();
                let terms: Vec<f64> = values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let c = if i == 0 || i == n - 1 {
                            1.0
                        } else if i % 2 == 1 {
                            4.0
                        } else {
                            2.0
                        };
                        c * v
                    })
                    .collect();
                pairwise_sum(&terms) * step / 3.0
            }
            _ => {
                let terms: Vec<f64> = self
                    .points
                    .windows(2)
                    .zip(values.windows(2))
                    .map(|(p, v)| 0.5 * (p[1] - p[0]) * (v[0] + v[1]))
                    .collect();
                pairwise_sum(&terms)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_monotone() {
        assert!(Grid::from_points(vec![0.0, 1.0, 1.0]).is_err());
        assert!(Grid::from_points(vec![]).is_err());
        assert!(Grid::from_points(vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn simpson_on_uniform_grid() {
        let g = Grid::uniform(0.0, 1.0, 101).unwrap();
        let v: Vec<f64> = g.points().iter().map(|x| x * x * x).collect();
        assert!((g.integrate(&v) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn panel_grid_uses_gauss_weights() {
        let rule = QuadratureRule::uniform(0.0, 2.0, 4, 8).unwrap();
        let g = Grid::panel_composite(&rule);
        let v: Vec<f64> = g.points().iter().map(|x| x.exp()).collect();
        assert!((g.integrate(&v) - (2f64.exp() - 1.0)).abs() < 1e-13);
    }
}
