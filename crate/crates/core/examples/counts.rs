//! Root counts of the reduced branching equations: a quadratic on [0, 1] and a
//! pair of conics.

use tfe10::branching::{conic_branch_count, quadratic_branch_count, QuadraticBranchProblem};
use tfe10::numerics::Conic;

fn main() {
    for (a, b, c) in [(1.0, -1.0, 0.2), (1.0, 1.0, 1.0), (2.0, -3.0, 1.0)] {
        let q = quadratic_branch_count(&QuadraticBranchProblem::new(a, b, c));
        println!("{a}c² {b:+}c {c:+}: count {:?}, roots {:?}", q.count, q.roots);
    }

    // Coefficients of x², y², x, y, xy, 1.
    let circle = Conic::new(1.0, 1.0, 0.0, 0.0, 0.0, -1.0);
    let shifted = Conic::new(1.0, 1.0, -2.0, 0.0, 0.0, 0.0);
    let ellipse = Conic::new(0.25, 4.0, 0.0, 0.0, 0.0, -1.0);
    for (name, other) in [("shifted circle", shifted), ("crossing ellipse", ellipse)] {
        let r = conic_branch_count(&circle, &other, [0.0, 0.0]);
        println!("unit circle ∩ {name}: {:?} points {:?}", r.count, r.points);
    }
}
