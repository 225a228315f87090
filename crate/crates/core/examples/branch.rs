//! Continuation of the f₀ branch from the linear limit n → 0 up to n = 1.

use tfe10::continuation::{trace_branch, ContinuationOptions};

fn main() -> tfe10::Result<()> {
    let branch = trace_branch(1, &ContinuationOptions::default())?;
    println!("{:>8} {:>10} {:>10} {:>12}", "n", "alpha0", "y0", "f''(0)");
    for p in branch.points.iter().step_by(5) {
        println!("{:>8.4} {:>10.6} {:>10.5} {:>12.6}", p.n, p.alpha0, p.y0, p.origin_derivatives[0]);
    }
    println!("{} points, termination: {:?}", branch.points.len(), branch.termination);
    Ok(())
}
