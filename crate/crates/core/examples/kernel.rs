//! Fundamental solution of the tenth-order linear operator on the line: mass,
//! oscillatory tail and the fitted decay constant.

use tfe10::numerics::Grid;
use tfe10::spectral::{decay_rate, kernel_1d};

fn main() -> tfe10::Result<()> {
    let grid = Grid::uniform(0.0, 150.0, 6001)?;
    let kernel = kernel_1d(&grid)?;
    println!("mass           = {:.15}", kernel.mass());
    println!("F(0)           = {:.10}", kernel.values()[0]);

    let fit = decay_rate(&kernel)?;
    println!("decay constant = {:.6} (fitted), {:.6} (asymptotic)", fit.d_fit, fit.d_formula);
    println!("maxima used    = {}", fit.extrema);
    Ok(())
}
