//! Linear eigenfunctions ψ_k = D^k F / √k! and their polynomial adjoints.

use tfe10::numerics::{Grid, QuadratureRule};
use tfe10::spectral::{biorthogonality_matrix, identity_defect, kernel_1d, linear_eigenpair, MultiIndex};

fn main() -> tfe10::Result<()> {
    let coarse = kernel_1d(&Grid::uniform(-150.0, 150.0, 6001)?)?;
    for k in 0..4 {
        let pair = linear_eigenpair(&MultiIndex::scalar(k), &coarse)?;
        let terms: Vec<String> = pair.psi_star.terms.iter().map(|(e, c)| format!("{c}·y^{}", e[0])).collect();
        println!("k = {k}: λ = {:.1}, ψ* ∝ {}", pair.lambda + 0.0, terms.join(" + "));
    }

    // Pairings need panel quadrature; this takes a few seconds.
    let rule = QuadratureRule::uniform(-300.0, 300.0, 600, 16)?;
    let kernel = kernel_1d(&Grid::panel_composite(&rule))?;
    let m = biorthogonality_matrix(8, &kernel)?;
    println!("max |<ψ_k, ψ*_j> − δ_kj| for k, j ≤ 8: {:.2e}", identity_defect(&m));
    Ok(())
}
