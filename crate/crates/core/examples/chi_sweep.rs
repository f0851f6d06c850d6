//! How far the density departs from |φ|² as the momentum width grows.

use kgcur::experiments::{chi_sweep, log_space};

fn main() -> kgcur::Result<()> {
    let sigmas = log_space(0.01, 1000.0, 11)?;
    let chis = chi_sweep(&sigmas, 0.0, None)?;
    println!("{:>10} {:>12}", "sigma_p", "chi");
    for (s, c) in sigmas.iter().zip(&chis) {
        println!("{s:>10.3e} {c:>12.4e}");
    }
    Ok(())
}
