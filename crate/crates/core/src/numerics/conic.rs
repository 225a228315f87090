//! Real intersections of two plane conics through the quartic resultant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::poly::Poly;

/// a·x² + b·y² + c·x + d·y + e·xy + f = 0, with (x, y) standing for (c₂, c₃).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl Conic {
    pub fn new(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Self {
        Self { a, b, c, d, e, f }
    }

    pub fn coeffs(&self) -> [f64; 6] {
        [self.a, self.b, self.c, self.d, self.e, self.f]
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.a * x * x + self.b * y * y + self.c * x + self.d * y + self.e * x * y + self.f
    }

    pub fn gradient(&self, x: f64, y: f64) -> (f64, f64) {
        (2.0 * self.a * x + self.c + self.e * y, 2.0 * self.b * y + self.d + self.e * x)
    }

    pub fn scale(&self) -> f64 {
        self.coeffs().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn normalized(&self) -> Self {
        let s = self.scale();
        if s == 0.0 {
            return *self;
        }
        let k = self.coeffs().map(|v| v / s);
        Self::new(k[0], k[1], k[2], k[3], k[4], k[5])
    }

    /// Quadratic part vanishes: a line or nothing.
    pub fn is_degenerate_quadratic(&self) -> bool {
        let s = self.scale();
        s == 0.0 || [self.a, self.b, self.e].iter().all(|v| v.abs() <= 1e-14 * s)
    }

    /// Determinant of the 3×3 symmetric matrix; zero for line pairs and points.
    pub fn full_determinant(&self) -> f64 {
        let (a, b, c, d, e, f) = (self.a, self.b, self.c / 2.0, self.d / 2.0, self.e / 2.0, self.f);
        a * (b * f - d * d) - e * (e * f - d * c) + c * (e * d - b * c)
    }

    fn swapped(&self) -> Self {
        Self::new(self.b, self.a, self.d, self.c, self.e, self.f)
    }

    /// The same curve in coordinates rotated by `phi`: x = cX − sY, y = sX + cY.
    fn rotated(&self, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        let a = self.a * c * c + self.b * s * s + self.e * c * s;
        let b = self.a * s * s + self.b * c * c - self.e * c * s;
        let e = 2.0 * (self.b - self.a) * c * s + self.e * (c * c - s * s);
        let cc = self.c * c + self.d * s;
        let dd = -self.c * s + self.d * c;
        Self::new(a, b, cc, dd, e, self.f)
    }

    /// The conic as b·y² + (e·x + d)·y + (a·x² + c·x + f), a polynomial in y over R[x].
    fn y_coefficients(&self) -> (Poly, Poly, Poly) {
        (
            Poly::new(vec![self.b]),
            Poly::new(vec![self.d, self.e]),
            Poly::new(vec![self.f, self.c, self.a]),
        )
    }
}

/// Resultant of the two conics with respect to y, a polynomial of degree ≤ 4 in x.
///
/// This is the determinant of the 4×4 Sylvester matrix with polynomial entries,
/// (a₁c₂ − a₂c₁)² − (a₁b₂ − a₂b₁)(b₁c₂ − b₂c₁), expanded exactly.
pub fn resultant_in_x(p: &Conic, q: &Conic) -> Poly {
    let (a1, b1, c1) = p.y_coefficients();
    let (a2, b2, c2) = q.y_coefficients();
    let ac = a1.mul(&c2).sub(&a2.mul(&c1));
    let ab = a1.mul(&b2).sub(&a2.mul(&b1));
    let bc = b1.mul(&c2).sub(&b2.mul(&c1));
    ac.mul(&ac).sub(&ab.mul(&bc))
}

/// Numeric Sylvester determinant at a fixed x, by full-pivot elimination.
pub fn sylvester_determinant(p: &Conic, q: &Conic, x: f64) -> f64 {
    let (a1, b1, c1) = p.y_coefficients();
    let (a2, b2, c2) = q.y_coefficients();
    let (a1, b1, c1) = (a1.eval(x), b1.eval(x), c1.eval(x));
    let (a2, b2, c2) = (a2.eval(x), b2.eval(x), c2.eval(x));
    let m = [
        [a1, b1, c1, 0.0],
        [0.0, a1, b1, c1],
        [a2, b2, c2, 0.0],
        [0.0, a2, b2, c2],
    ];
    determinant_full_pivot(m)
}

fn determinant_full_pivot<const N: usize>(mut m: [[f64; N]; N]) -> f64 {
    let mut det = 1.0;
    for k in 0..N {
        let (mut pi, mut pj, mut best) = (k, k, 0.0);
        for i in k..N {
            for j in k..N {
                if m[i][j].abs() > best {
                    best = m[i][j].abs();
                    pi = i;
                    pj = j;
                }
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if pi != k {
            m.swap(pi, k);
            det = -det;
        }
        if pj != k {
            for row in m.iter_mut() {
                row.swap(pj, k);
            }
            det = -det;
        }
        det *= m[k][k];
        for i in k + 1..N {
            let f = m[i][k] / m[k][k];
            for j in k..N {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    det
}

/// All real common points of two conics (at most four).
///
/// Points are polished by Newton's method on the pair and kept only when both
/// normalized residuals are ≤ 1e−9.
pub fn conic_intersections(p: &Conic, q: &Conic) -> Result<Vec<(f64, f64)>> {
    let p = p.normalized();
    let q = q.normalized();
    if p.scale() == 0.0 || q.scale() == 0.0 {
        return Err(Error::InvalidInput("conic with all coefficients zero".into()));
    }
    let diff = p.coeffs().iter().zip(q.coeffs()).fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
    let sum = p.coeffs().iter().zip(q.coeffs()).fold(0.0f64, |m, (u, v)| m.max((u + v).abs()));
    if diff <= 1e-13 || sum <= 1e-13 {
        return Err(Error::IdenticalConics);
    }
    let lead_tol = 1e-10;
    let (p2, q2, transform): (Conic, Conic, Box<dyn Fn(f64, f64) -> (f64, f64)>) =
        if p.b.abs() > lead_tol || q.b.abs() > lead_tol {
            (p, q, Box::new(|x, y| (x, y)))
        } else if p.a.abs() > lead_tol || q.a.abs() > lead_tol {
            (p.swapped(), q.swapped(), Box::new(|x, y| (y, x)))
        } else {
            let phi = 0.377_964_473;
            let (s, c) = f64::sin_cos(phi);
            (p.rotated(phi), q.rotated(phi), Box::new(move |x, y| (c * x - s * y, s * x + c * y)))
        };
    let res = resultant_in_x(&p2, &q2);
    if res.effective_degree(1e-12).is_none() {
        return Err(Error::ResultantVanishes);
    }
    let mut points: Vec<(f64, f64)> = Vec::new();
    for x in res.real_roots() {
        for y in candidate_ys(&p2, &q2, x) {
            let (xp, yp) = polish(&p2, &q2, x, y);
            let (ox, oy) = transform(xp, yp);
            let r = p.eval(ox, oy).abs().max(q.eval(ox, oy).abs());
            if r <= 1e-9 && !points.iter().any(|(u, v)| (u - ox).abs() + (v - oy).abs() < 1e-7) {
                points.push((ox, oy));
            }
        }
    }
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(points)
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return vec![];
    }
    if a.abs() <= 1e-12 * scale {
        return if b != 0.0 { vec![-c / b] } else { vec![] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < -1e-12 * b * b.max(scale * scale) {
        return vec![];
    }
    let sq = disc.max(0.0).sqrt();
    let t = -0.5 * (b + b.signum() * sq);
    if t == 0.0 {
        return vec![0.0];
    }
    vec![t / a, c / t]
}

fn candidate_ys(p: &Conic, q: &Conic, x: f64) -> Vec<f64> {
    let mut ys = quadratic_roots(p.b, p.e * x + p.d, p.a * x * x + p.c * x + p.f);
    ys.extend(quadratic_roots(q.b, q.e * x + q.d, q.a * x * x + q.c * x + q.f));
    ys
}

fn polish(p: &Conic, q: &Conic, mut x: f64, mut y: f64) -> (f64, f64) {
    for _ in 0..30 {
        let (f1, f2) = (p.eval(x, y), q.eval(x, y));
        let (p1x, p1y) = p.gradient(x, y);
        let (p2x, p2y) = q.gradient(x, y);
        let det = p1x * p2y - p1y * p2x;
        if det.abs() < 1e-300 {
            break;
        }
        let dx = (f1 * p2y - f2 * p1y) / det;
        let dy = (p1x * f2 - p2x * f1) / det;
        if !(dx.is_finite() && dy.is_finite()) || dx.abs() + dy.abs() > 1e3 * (1.0 + x.abs() + y.abs()) {
            break;
        }
        x -= dx;
        y -= dy;
        if dx.abs() + dy.abs() < 1e-15 * (1.0 + x.abs() + y.abs()) {
            break;
        }
    }
    (x, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(cx: f64, cy: f64, r: f64) -> Conic {
        Conic::new(1.0, 1.0, -2.0 * cx, -2.0 * cy, 0.0, cx * cx + cy * cy - r * r)
    }

    #[test]
    fn two_unit_circles() {
        let pts = conic_intersections(&circle(0.0, 0.0, 1.0), &circle(1.0, 0.0, 1.0)).unwrap();
        assert_eq!(pts.len(), 2);
        let h = 3f64.sqrt() / 2.0;
        assert!((pts[0].0 - 0.5).abs() < 1e-12 && (pts[0].1 + h).abs() < 1e-12);
        assert!((pts[1].0 - 0.5).abs() < 1e-12 && (pts[1].1 - h).abs() < 1e-12);
    }

    #[test]
    fn concentric_circles_do_not_meet() {
        let pts = conic_intersections(&circle(0.0, 0.0, 1.0), &circle(0.0, 0.0, 2.0)).unwrap();
        assert!(pts.is_empty());
    }

    #[test]
    fn ellipse_and_hyperbola_four_points() {
        let ell = Conic::new(1.0, 4.0, 0.0, 0.0, 0.0, -4.0);
        let hyp = Conic::new(1.0, -1.0, 0.0, 0.0, 0.0, -1.0);
        assert_eq!(conic_intersections(&ell, &hyp).unwrap().len(), 4);
    }

    #[test]
    fn identical_conics_rejected() {
        let c = circle(0.3, 0.1, 2.0);
        let scaled = Conic::new(2.0 * c.a, 2.0 * c.b, 2.0 * c.c, 2.0 * c.d, 2.0 * c.e, 2.0 * c.f);
        assert!(matches!(conic_intersections(&c, &scaled), Err(Error::IdenticalConics)));
    }

    #[test]
    fn hyperbolas_without_squares_use_rotation() {
        let h1 = Conic::new(0.0, 0.0, 0.0, 0.0, 1.0, -1.0);
        let h2 = Conic::new(0.0, 0.0, 1.0, 1.0, 1.0, -4.0);
        let pts = conic_intersections(&h1, &h2).unwrap();
        assert_eq!(pts.len(), 2);
        for (x, y) in pts {
            assert!((x * y - 1.0).abs() < 1e-9 && (x + y - 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn sylvester_matches_expanded_resultant() {
        let p = Conic::new(0.3, -1.2, 0.5, 0.1, 0.7, -0.4);
        let q = Conic::new(-0.8, 0.9, -0.2, 0.6, -0.3, 0.25);
        let r = resultant_in_x(&p, &q);
        for x in [-2.0, -0.3, 0.0, 0.9, 3.1] {
            let s = sylvester_determinant(&p, &q, x);
            assert!((r.eval(x) - s).abs() < 1e-12 * (1.0 + s.abs()), "{x}");
        }
    }
}
