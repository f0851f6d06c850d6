//! The Born pair `ρ_B = |φ|²` and its flux with velocity kernel
//! `u(p,k) = (p + k)/(p⁰ + k⁰)`.
//!
//! The flux is a double integral over mode pairs. Grouping pairs by their
//! momentum difference gives a spectrum on the refined lattice, where the
//! quadratic field is alias-free. Two routes fill that spectrum:
//!
//! * `DirectPairs` sums every pair, O(N²), any branch content.
//! * `SourceIntegral` uses the on-shell identity `(p+k)/(p⁰+k⁰) = (p⁰−k⁰)/(p−k)`:
//!   off the diagonal the flux is the spatial antiderivative of `−∂tρ_B`,
//!   so one product and one transform suffice. Valid for single-branch states.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::CurrentField;
use crate::error::{Error, Result};
use crate::spectral::{self, energy, SpectralGrid};
use crate::state::MomentumState;

/// Largest grid on which the O(N²) pair sum runs by default.
pub const DIRECT_PAIR_LIMIT: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BornPath {
    DirectPairs,
    SourceIntegral,
}

/// Flux spectrum on `state.grid.refined()`:
/// `J_B(x) = Σ_m coeffs[m] e^{i d_m x} Δp/√(2π)`.
#[derive(Debug, Clone)]
pub struct BornSpectrum {
    pub grid: SpectralGrid,
    pub coeffs: Vec<Complex64>,
    pub path: BornPath,
    /// Mixed-branch pairs with equal momentum, where `p⁰ + k⁰ = 0` and the
    /// kernel is singular; these are left out.
    pub skipped_pairs: usize,
}

#[derive(Debug, Clone)]
pub struct BornCurrent {
    /// `ρ_B`, `J_B` scaled so that `Σ ρ_B Δx = 1`.
    pub field: CurrentField,
    pub path: BornPath,
    pub skipped_pairs: usize,
}

struct Mode {
    j: usize,
    q: f64,
    p0: f64,
    amp: Complex64,
    positive: bool,
}

fn modes(state: &MomentumState) -> Vec<Mode> {
    let g = &state.grid;
    let mut out = Vec::new();
    for (branch, amps, sign) in [(true, &state.a, 1.0), (false, &state.b, -1.0)] {
        for (j, &amp) in amps.iter().enumerate() {
            if amp.norm_sqr() > 0.0 {
                let q = g.p(j);
                out.push(Mode { j, q, p0: sign * energy(q), amp, positive: branch });
            }
        }
    }
    out
}

fn direct_pairs(state: &MomentumState) -> BornSpectrum {
    let g = state.grid;
    let fine = g.refined();
    let ms = modes(state);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); fine.n];
    let mut skipped = 0;
    for mu in &ms {
        for nu in &ms {
            let kernel = if mu.positive == nu.positive {
                (mu.q + nu.q) / (mu.p0 + nu.p0)
            } else if mu.j != nu.j {
                (mu.p0 - nu.p0) / (mu.q - nu.q)
            } else {
                skipped += 1;
                continue;
            };
            coeffs[mu.j + g.n - nu.j] += mu.amp * nu.amp.conj() * kernel;
        }
    }
    let scale = g.dp() / (2.0 * PI).sqrt();
    coeffs.iter_mut().for_each(|c| *c *= scale);
    BornSpectrum { grid: fine, coeffs, path: BornPath::DirectPairs, skipped_pairs: skipped }
}

fn source_integral(state: &MomentumState) -> Result<BornSpectrum> {
    if !(state.is_positive_frequency() || state.is_negative_frequency()) {
        return Err(Error::Unsupported(
            "the source-integral Born flux needs a single-branch state".into(),
        ));
    }
    let fine_state = state.zero_padded();
    let fine = fine_state.grid;
    let phi = spectral::inverse_raw(&fine_state.phi_amplitudes(state.t), &fine);
    let dphi = spectral::inverse_raw(&fine_state.phidot_amplitudes(state.t), &fine);
    let source: Vec<Complex64> = phi
        .iter()
        .zip(&dphi)
        .map(|(f, d)| Complex64::new(-2.0 * (f.conj() * d).re, 0.0))
        .collect();
    let mut coeffs = spectral::forward_raw(&source, &fine);
    let centre = fine.n / 2;
    for (m, c) in coeffs.iter_mut().enumerate() {
        if m == 0 {
            *c = Complex64::new(0.0, 0.0);
        } else if m != centre {
            *c /= Complex64::new(0.0, fine.p(m));
        }
    }
    let g = &state.grid;
    let dc: f64 = modes(state).iter().map(|m| m.amp.norm_sqr() * m.q / m.p0).sum();
    coeffs[centre] = Complex64::new(dc * g.dp() / (2.0 * PI).sqrt(), 0.0);
    Ok(BornSpectrum { grid: fine, coeffs, path: BornPath::SourceIntegral, skipped_pairs: 0 })
}

/// Flux spectrum by the requested route (amplitudes taken at the state's reference time).
pub fn born_spectrum(state: &MomentumState, path: BornPath) -> Result<BornSpectrum> {
    match path {
        BornPath::DirectPairs => Ok(direct_pairs(state)),
        BornPath::SourceIntegral => source_integral(state),
    }
}

fn default_path(state: &MomentumState) -> Result<BornPath> {
    if state.grid.n <= DIRECT_PAIR_LIMIT {
        Ok(BornPath::DirectPairs)
    } else if state.is_positive_frequency() || state.is_negative_frequency() {
        Ok(BornPath::SourceIntegral)
    } else {
        Err(Error::Unsupported(format!(
            "Born flux of a two-branch state needs the O(N²) pair sum, limited to N <= {DIRECT_PAIR_LIMIT}"
        )))
    }
}

/// `ρ_B` and `J_B` on the state's lattice, scaled to `Σ ρ_B Δx = 1`.
///
/// Uses the pair sum for `N ≤ 2048` and the source integral above that;
/// the route taken is reported.
pub fn born_density_current(state: &MomentumState) -> Result<BornCurrent> {
    let path = default_path(state)?;
    let spec = born_spectrum(state, path)?;
    let g = state.grid;
    let phi = spectral::inverse_raw(&state.phi_amplitudes(state.t), &g);
    let flux_fine = spectral::inverse_raw(&spec.coeffs, &spec.grid);
    let z = state.born_norm();
    let rho: Vec<f64> = phi.iter().map(|f| f.norm_sqr() / z).collect();
    let j: Vec<f64> = flux_fine.iter().step_by(2).map(|c| c.re / z).collect();
    Ok(BornCurrent {
        field: CurrentField { grid: g, rho, j, t: state.t },
        path: spec.path,
        skipped_pairs: spec.skipped_pairs,
    })
}

/// Unscaled `(ρ_B, J_B)` at arbitrary `x` for one fixed time.
pub struct BornEvaluator {
    grid: SpectralGrid,
    phi: Vec<Complex64>,
    flux: BornSpectrum,
}

impl BornEvaluator {
    pub fn new(state: &MomentumState, t: f64) -> Result<Self> {
        let s = state.advanced(t - state.t);
        let path = default_path(&s)?;
        Ok(Self { grid: s.grid, phi: s.phi_amplitudes(s.t), flux: born_spectrum(&s, path)? })
    }

    pub fn at(&self, x: f64) -> (f64, f64) {
        let rho = spectral::offgrid_sum(&self.phi, &self.grid, x).norm_sqr();
        let j = spectral::offgrid_sum(&self.flux.coeffs, &self.flux.grid, x).re;
        (rho, j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{gaussian_state, reconstruct_phi};

    #[test]
    fn single_mode_velocity() {
        let g = SpectralGrid::new(64, 8.0).unwrap();
        let j = g.n / 2 + 6;
        let mut a = vec![Complex64::new(0.0, 0.0); g.n];
        a[j] = Complex64::new(1.0, 0.0);
        let s = MomentumState::positive(g, a).unwrap();
        let born = born_density_current(&s).unwrap();
        let v = g.p(j) / energy(g.p(j));
        for k in 0..g.n {
            assert!((born.field.j[k] / born.field.rho[k] - v).abs() < 1e-12);
        }
    }

    #[test]
    fn routes_agree_for_single_branch() {
        let g = SpectralGrid::new(256, 8.0).unwrap();
        let s = gaussian_state(0.7, 1.2, 0.5, g).unwrap();
        let a = born_spectrum(&s, BornPath::DirectPairs).unwrap();
        let b = born_spectrum(&s, BornPath::SourceIntegral).unwrap();
        let scale = a.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
            assert!((x - y).norm() < 1e-11 * scale);
        }
    }

    #[test]
    fn two_branch_large_grid_is_refused() {
        let g = SpectralGrid::new(4096, 8.0).unwrap();
        let mut s = gaussian_state(0.0, 1.0, 0.0, g).unwrap();
        s.b[100] = Complex64::new(1e-3, 0.0);
        assert!(matches!(born_density_current(&s), Err(Error::Unsupported(_))));
        assert!(matches!(born_spectrum(&s, BornPath::SourceIntegral), Err(Error::Unsupported(_))));
    }

    #[test]
    fn matches_schrodinger_current_when_slow() {
        let g = SpectralGrid::new(2048, 8.0).unwrap();
        let s = gaussian_state(0.01, 0.01, 0.0, g).unwrap();
        let born = born_density_current(&s).unwrap();
        // Schrödinger flux Im(φ*∂xφ) with the same |φ|² scaling
        let phi = reconstruct_phi(&s, 0.0).values;
        let dphi_amp: Vec<Complex64> = s
            .phi_amplitudes(0.0)
            .iter()
            .enumerate()
            .map(|(j, z)| z * Complex64::new(0.0, g.p(j)))
            .collect();
        let dphi = spectral::inverse_raw(&dphi_amp, &g);
        let z = s.born_norm();
        let scale = born.field.max_rho();
        let mut worst: f64 = 0.0;
        for k in 0..g.n {
            let js = (phi[k].conj() * dphi[k]).im / z;
            worst = worst.max((born.field.j[k] - js).abs());
        }
        assert!(worst / scale < 1e-6, "{}", worst / scale);
    }

    #[test]
    fn born_continuity_second_order() {
        let g = SpectralGrid::new(256, 8.0).unwrap();
        let s = gaussian_state(0.5, 1.0, 0.0, g).unwrap();
        let resid = |dt: f64| {
            let up = born_density_current(&s.advanced(dt)).unwrap().field;
            let dn = born_density_current(&s.advanced(-dt)).unwrap().field;
            let fine = born_spectrum(&s, BornPath::DirectPairs).unwrap();
            // ∂x J_B from the spectrum directly
            let d: Vec<Complex64> = fine
                .coeffs
                .iter()
                .enumerate()
                .map(|(m, c)| c * Complex64::new(0.0, fine.grid.p(m)))
                .collect();
            let djdx = spectral::inverse_raw(&d, &fine.grid);
            let z = s.born_norm();
            (0..g.n)
                .map(|k| ((up.rho[k] - dn.rho[k]) / (2.0 * dt) + djdx[2 * k].re / z).abs())
                .fold(0.0, f64::max)
        };
        let ratio = resid(1e-2) / resid(5e-3);
        assert!((ratio - 4.0).abs() < 0.8, "{ratio}");
    }
}
