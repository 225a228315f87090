//! Thin film equation with backward diffusion: exponents, the critical p and the
//! profile at that exponent.

use tfe10::similarity::F0Options;
use tfe10::unstable::{exponents_unstable, p_critical, solve_f0_unstable, unstable_symbol_peak};

fn main() -> tfe10::Result<()> {
    let (n, dim) = (1.0, 1);
    for p in [3.0, 6.0, p_critical(n, dim), 14.0] {
        let e = exponents_unstable(n, p, dim)?;
        println!("p = {p:>5.2}: alpha = {:.6}, beta = {:.6}, identities hold: {}", e.alpha, e.beta, e.identities_ok());
    }
    let (k, peak) = unstable_symbol_peak();
    println!("fastest linear growth k² − k¹⁰ = {peak:.6} at k = {k:.6}");

    let u = unstable_solve(n, dim)?;
    println!("profile: converged = {}, f(0) reached {:.3}, y0 = {:.4}, {} rungs", u.0, u.1, u.2, u.3);
    Ok(())
}

fn unstable_solve(n: f64, dim: usize) -> tfe10::Result<(bool, f64, f64, usize)> {
    let u = solve_f0_unstable(n, dim, p_critical(n, dim), &F0Options::default())?;
    Ok((u.converged, u.reached, u.profile.y0.unwrap_or(f64::NAN), u.ladder.len()))
}
