//! Localizing sequence: densities that shrink towards a point while the
//! spectral factor R_n approaches one.

use kgcur::experiments::{delta_grid, delta_run};

fn main() -> kgcur::Result<()> {
    let ns = [1, 2, 4, 8, 16];
    let grid = delta_grid(&ns)?;
    let results = delta_run(&ns, 0.0, grid)?;
    println!("{:>4} {:>16} {:>10} {:>8} {:>14}", "n", "integral", "FWHM", "ratio", "max|R_n - 1|");
    let mut prev: Option<f64> = None;
    for r in &results {
        let ratio = prev.map_or(String::from("-"), |w| format!("{:.4}", r.width / w));
        println!("{:>4} {:>16.12} {:>10.5} {:>8} {:>14.4e}", r.n, r.integral, r.width, ratio, r.r_deviation(2.0));
        prev = Some(r.width);
    }
    Ok(())
}
