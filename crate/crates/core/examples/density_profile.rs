//! Density of a narrow Gaussian packet compared with |φ|² and the Klein-Gordon
//! charge density, which goes negative where the packet is sharply localized.
//!
//!     cargo run --release --example density_profile -- 1000

use kgcur::experiments::density_profile;
use kgcur::spectral::SpectralGrid;

fn main() -> kgcur::Result<()> {
    let sigma: f64 = std::env::args().nth(1).map_or(Ok(1000.0), |s| s.parse()).expect("sigma_p must be a number");
    let grid = SpectralGrid::for_gaussian(sigma, 0.0)?;
    let prof = density_profile(sigma, 0.0, grid)?;
    println!("sigma_p = {sigma}, grid n = {}, p_max = {}", grid.n, grid.p_max);
    println!("min rho      {:+.3e}", prof.min_rho());
    println!("min j0_kg    {:+.3e}", prof.min_j0_kg());
    println!("max|rho - |phi|^2| / max rho = {:.3e}", prof.born_gap());

    let centre = grid.n / 2;
    println!("{:>12} {:>12} {:>12} {:>12}", "x", "rho", "rho_born", "j0_kg");
    for k in (centre - 8..=centre + 8).step_by(2) {
        println!("{:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}", prof.x[k], prof.rho[k], prof.rho_born[k], prof.j0_kg[k]);
    }
    Ok(())
}
