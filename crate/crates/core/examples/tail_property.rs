//! A wave function cut off outside an interval still has a density that is
//! nonzero far outside it.

use kgcur::spectral::SpectralGrid;
use kgcur::verify::tail_check;

fn main() -> kgcur::Result<()> {
    let grid = SpectralGrid::new(256, 16.0)?;
    let r = tail_check(grid, 2.0)?;
    println!("phi cut to [-{0}, {0}], box length {1:.2}", r.half_width, grid.length());
    println!("within {:.2} outside the cut: min rho / max rho = {:.3e}", r.distance, r.min_ratio);
    println!("max |phi|^2 over the same points = {:.1e}", r.max_born_outside);
    Ok(())
}
