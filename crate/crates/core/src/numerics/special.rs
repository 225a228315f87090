//! Gamma function and Bessel functions of the first kind for the orders the
//! radial Hankel transforms in dimensions 1–3 need.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) via the Lanczos approximation, with reflection for x < 1/2.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).abs().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Order {
    MinusHalf,
    Zero,
    Half,
    One,
    ThreeHalves,
}

impl Order {
    fn parse(nu: f64) -> Result<Self> {
        let twice = 2.0 * nu;
        if twice.fract() != 0.0 {
            return Err(Error::Unsupported(format!("Bessel order {nu}")));
        }
        match twice as i64 {
            -1 => Ok(Self::MinusHalf),
            0 => Ok(Self::Zero),
            1 => Ok(Self::Half),
            2 => Ok(Self::One),
            3 => Ok(Self::ThreeHalves),
            _ => Err(Error::Unsupported(format!("Bessel order {nu}"))),
        }
    }

    fn value(self) -> f64 {
        match self {
            Self::MinusHalf => -0.5,
            Self::Zero => 0.0,
            Self::Half => 0.5,
            Self::One => 1.0,
            Self::ThreeHalves => 1.5,
        }
    }
}

/// J_ν(x) for ν ∈ {−1/2, 0, 1/2, 1, 3/2} and x ≥ 0.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    let order = Order::parse(nu)?;
    if x < 0.0 || !x.is_finite() {
        return Err(Error::InvalidInput(format!("Bessel argument {x}")));
    }
    Ok(match order {
        Order::Zero => j0_j1(x).0,
        Order::One => j0_j1(x).1,
        Order::MinusHalf => (2.0 / (PI * x)).sqrt() * x.cos(),
        _ => (0.5 * x).powf(order.value()) * scaled(order, x),
    })
}

/// (x/2)^(−ν) J_ν(x): entire in x and equal to 1/Γ(ν+1) at the origin.
pub fn bessel_j_scaled(nu: f64, x: f64) -> Result<f64> {
    let order = Order::parse(nu)?;
    if x < 0.0 || !x.is_finite() {
        return Err(Error::InvalidInput(format!("Bessel argument {x}")));
    }
    Ok(scaled(order, x))
}

fn scaled(order: Order, x: f64) -> f64 {
    let sqrt_pi = PI.sqrt();
    match order {
        Order::MinusHalf => x.cos() / sqrt_pi,
        Order::Zero => j0_j1(x).0,
        Order::Half if x > 0.5 => 2.0 * x.sin() / (x * sqrt_pi),
        Order::One if x > 0.5 => 2.0 * j0_j1(x).1 / x,
        Order::ThreeHalves if x > 0.5 => 4.0 * (x.sin() - x * x.cos()) / (x * x * x * sqrt_pi),
        _ => scaled_series(order.value(), x),
    }
}

fn scaled_series(nu: f64, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0 / gamma(nu + 1.0);
    let mut sum = term;
    for m in 1..40 {
        term *= q / (m as f64 * (m as f64 + nu));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn j0_j1(x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (1.0, 0.0);
    }
    if x > 25.0 {
        return (hankel_asymptotic(0.0, x), hankel_asymptotic(1.0, x));
    }
    miller(x)
}

/// Backward recurrence normalised by J0 + 2ΣJ_2k = 1.
fn miller(x: f64) -> (f64, f64) {
    let start = 2 * ((x + 24.0 + 8.0 * x.cbrt()) as usize / 2 + 2);
    let mut above = 0.0;
    let mut current = 1e-30;
    let mut norm = 0.0;
    let mut j1 = 0.0;
    for k in (1..=start).rev() {
        let below = 2.0 * k as f64 / x * current - above;
        above = current;
        current = below;
        let idx = k - 1;
        if current.abs() > 1e250 {
            current *= 1e-250;
            above *= 1e-250;
            norm *= 1e-250;
            j1 *= 1e-250;
        }
        if idx == 1 {
            j1 = current;
        }
        if idx > 0 && idx % 2 == 0 {
            norm += 2.0 * current;
        }
    }
    norm += current;
    (current / norm, j1 / norm)
}

fn hankel_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if a.abs() > prev {
            break;
        }
        prev = a.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * a;
        } else {
            p += sign * a;
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(nu: f64, x: f64) -> f64 {
        (0.5 * x).powf(nu) * scaled_series(nu, x)
    }

    #[test]
    fn gamma_values() {
        assert!((gamma(1.0) - 1.0).abs() < 1e-15);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma(1.1) - 0.951_350_769_866_873_2).abs() < 1e-14);
        assert!((ln_gamma(20.0) - (1..20).map(|k| (k as f64).ln()).sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn integer_orders_match_series_at_moderate_arguments() {
        for &x in &[1e-6, 0.3, 1.0, 2.5, 5.0, 7.9] {
            for nu in [0.0, 1.0] {
                let a = bessel_j(nu, x).unwrap();
                let b = series(nu, x);
                assert!((a - b).abs() < 1e-13, "J{nu}({x}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn miller_and_asymptotic_agree_near_switch() {
        for &x in &[22.0, 25.0, 28.0, 40.0] {
            let (m0, m1) = miller(x);
            assert!((m0 - hankel_asymptotic(0.0, x)).abs() < 1e-14, "J0({x})");
            assert!((m1 - hankel_asymptotic(1.0, x)).abs() < 1e-14, "J1({x})");
        }
    }

    #[test]
    fn half_integer_closed_forms() {
        let x = PI / 2.0;
        let j = bessel_j(0.5, x).unwrap();
        assert!((j - (2.0 / (PI * x)).sqrt()).abs() < 1e-15);
        for &x in &[0.1, 0.49, 0.51, 3.0] {
            assert!((bessel_j(1.5, x).unwrap() - series(1.5, x)).abs() < 1e-14);
            assert!((bessel_j_scaled(1.5, x).unwrap() - scaled_series(1.5, x)).abs() < 1e-13);
        }
    }

    #[test]
    fn unsupported_order_is_an_error() {
        assert!(matches!(bessel_j(2.0, 1.0), Err(Error::Unsupported(_))));
        assert!(matches!(bessel_j(0.25, 1.0), Err(Error::Unsupported(_))));
    }
}
