//! Arrival-time momentum distribution of a packet, doubling the flight time
//! until it settles, and its distance from the Born rule |a(p)|².
//!
//!     cargo run --release --example time_of_flight -- 2

use kgcur::dynamics::{time_of_flight_converged, DEFAULT_TOF_TOLERANCE};
use kgcur::experiments::default_t_start;
use kgcur::spectral::SpectralGrid;
use kgcur::state::gaussian_state;

fn main() -> kgcur::Result<()> {
    let sigma: f64 = std::env::args().nth(1).map_or(Ok(2.0), |s| s.parse()).expect("sigma_p must be a number");
    let grid = SpectralGrid::for_gaussian(sigma, 0.0)?;
    let state = gaussian_state(0.0, sigma, 0.0, grid)?;
    let r = time_of_flight_converged(&state, default_t_start(sigma), DEFAULT_TOF_TOLERANCE, 1e8)?;
    println!("t = {:.3e}, converged {} (gap {:.2e})", r.t_final, r.converged, r.convergence_gap);
    println!("integral of g = {:.6}", r.integral());
    println!("L1 distance to Born = {:.4e}", r.born_distance());
    let step = (r.p.len() / 16).max(1);
    println!("{:>10} {:>12} {:>12}", "p", "g", "born_g");
    for i in (0..r.p.len()).step_by(step) {
        println!("{:>10.4} {:>12.5e} {:>12.5e}", r.p[i], r.g[i], r.born_g[i]);
    }
    Ok(())
}
