//! Compactly supported self-similar profile at n = 1 by shooting on the
//! Laplacian chain.

use tfe10::similarity::{solve_f0, F0Options};

fn main() -> tfe10::Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let ef = solve_f0(n, 1, &F0Options::default())?;
    let y0 = ef.y0.unwrap_or(f64::NAN);
    println!("n = {n}: converged = {}, y0 = {y0:.6}", ef.converged);
    println!("interface residual {:.2e}, interior {:.2e}", ef.residual_norm(), ef.interior_residual);
    println!("sign changes in (0, y0): {:?}", ef.sign_changes(0.0, y0));
    Ok(())
}
