//! Boosts a packet and checks that the current transforms as a two-vector,
//! while the Born pair (|φ|², Schrödinger-like flux) does not.

use kgcur::covariance::{boost_state, covariance_check, covariance_residual, default_samples, BoostParams, BornPair};
use kgcur::spectral::SpectralGrid;
use kgcur::state::gaussian_state;

fn main() -> kgcur::Result<()> {
    let grid = SpectralGrid::new(4096, 16.0)?;
    let state = gaussian_state(0.0, 1.0, 0.0, grid)?;
    let samples = default_samples();
    println!("{:>6} {:>14} {:>14}", "eta", "residual", "Born residual");
    for eta in [0.1, 0.5, 1.0, 1.5] {
        let bp = BoostParams::new(eta);
        let rep = covariance_check(&state, &bp, &samples)?;
        if !rep.resolved {
            println!("{eta:>6} {:>14} {:>14}", "unresolved", "-");
            continue;
        }
        let boosted = boost_state(&state, &bp)?;
        let born = covariance_residual(&BornPair(&state), &BornPair(&boosted), &bp, &samples);
        println!("{eta:>6} {:>14.3e} {:>14.3e}", rep.residual, born);
    }
    Ok(())
}
