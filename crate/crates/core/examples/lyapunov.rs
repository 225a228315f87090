//! Lyapunov–Schmidt reduction at n = 0. Prints the eigenvalue shift of the simple
//! mode and the dipole branching system in the plane.

use tfe10::branching::branching_analysis;

fn main() -> tfe10::Result<()> {
    let r = branching_analysis(false, 0.0)?;
    for m in &r.mu10 {
        println!("N = {}: mu_1,0 = {:.9} (exact {:.9})", m.dim, m.value, m.exact);
    }
    let s = &r.dipole_solution;
    println!("dipole: mu_1,1 = {:.6}, c = {:?}, rotation family: {}", s.coefficients.mu1, s.coefficients.c, s.family);
    println!("quadratic case: {:?}", r.quadratic.count.case);
    Ok(())
}
