//! The relativistic probability current and its comparison quantities.
//!
//! For a state with modes of 2-momentum `(sE, p)` the density and flux are
//! four coherent sums
//!
//! ```text
//! Σ₁ = Σ c⁺ A e^{…}   Σ₂ = Σ (c⁺)* A e^{…}   Σ₃ = Σ c⁻ A e^{…}   Σ₄ = Σ (c⁻)* A e^{…}
//! ρ = |Σ₁|² + |Σ₂|² + |Σ₃|² + |Σ₄|²        J = |Σ₁|² + |Σ₂|² − |Σ₃|² − |Σ₄|²
//! ```
//!
//! with `c^± = √(p^±/4m)` the principal roots of the light-cone components.
//! Negative-frequency coefficients are imaginary, so interference between the
//! branches cancels within each conjugate pair. For `b = 0` this is
//! `ρ = |D⁺φ|² + |D⁻φ|²`, `J = |D⁺φ|² − |D⁻φ|²`. `J` is in units of `c`.

mod born;
mod multipliers;

pub use born::{born_density_current, born_spectrum, BornCurrent, BornEvaluator, BornPath, BornSpectrum};
pub use multipliers::{
    coherent_coefficients, d_multiplier, lightcone_components, BranchMultipliers, MultiplierDefects,
};

use num_complex::Complex64;
use serde::Serialize;

use crate::spectral::{self, energy, ComplexField, SpectralGrid};
use crate::state::{Branch, MomentumState};

/// Sampled density and flux on a position lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentField {
    pub grid: SpectralGrid,
    pub rho: Vec<f64>,
    pub j: Vec<f64>,
    pub t: f64,
}

impl CurrentField {
    /// `Σ ρ Δx`.
    pub fn integral(&self) -> f64 {
        self.rho.iter().sum::<f64>() * self.grid.dx()
    }

    pub fn min_rho(&self) -> f64 {
        self.rho.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_rho(&self) -> f64 {
        self.rho.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max (|J| − ρ)`; non-positive when the flow is subluminal everywhere.
    pub fn max_superluminal_excess(&self) -> f64 {
        self.rho.iter().zip(&self.j).map(|(r, j)| j.abs() - r).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Samples on the even nodes of a refined field, i.e. the parent lattice.
    pub fn coarsened(&self) -> Self {
        Self {
            grid: SpectralGrid { n: self.grid.n / 2, p_max: self.grid.p_max / 2.0 },
            rho: self.rho.iter().step_by(2).cloned().collect(),
            j: self.j.iter().step_by(2).cloned().collect(),
            t: self.t,
        }
    }
}

/// Momentum amplitudes of the four coherent sums at the state's reference time.
pub(crate) fn coherent_spectra(state: &MomentumState) -> [Vec<Complex64>; 4] {
    let g = &state.grid;
    let mut out: [Vec<Complex64>; 4] = std::array::from_fn(|_| Vec::with_capacity(g.n));
    for j in 0..g.n {
        let p = g.p(j);
        let (pa, ma) = coherent_coefficients(Branch::Positive, p);
        let (pb, mb) = coherent_coefficients(Branch::Negative, p);
        let (a, b) = (state.a[j], state.b[j]);
        out[0].push(pa * a + pb * b);
        out[1].push(pa.conj() * a + pb.conj() * b);
        out[2].push(ma * a + mb * b);
        out[3].push(ma.conj() * a + mb.conj() * b);
    }
    out
}

#[inline]
fn assemble(s: [Complex64; 4]) -> (f64, f64) {
    let n: [f64; 4] = s.map(|z| z.norm_sqr());
    (n[0] + n[1] + n[2] + n[3], n[0] + n[1] - n[2] - n[3])
}

fn warn_if_unnormalized(state: &MomentumState) {
    let n = state.norm();
    if (n - 1.0).abs() > 1e-8 {
        log::warn!("current evaluated for a state with norm {n:.6e}; densities are not probabilities");
    }
}

/// `(ρ, J)` on the state's position lattice at its reference time.
pub fn compute_current(state: &MomentumState) -> CurrentField {
    warn_if_unnormalized(state);
    current_on_lattice(state)
}

pub(crate) fn current_on_lattice(state: &MomentumState) -> CurrentField {
    let g = state.grid;
    let sums = coherent_spectra(state).map(|s| spectral::inverse_raw(&s, &g));
    let mut rho = Vec::with_capacity(g.n);
    let mut j = Vec::with_capacity(g.n);
    for k in 0..g.n {
        let (r, f) = assemble([sums[0][k], sums[1][k], sums[2][k], sums[3][k]]);
        rho.push(r);
        j.push(f);
    }
    CurrentField { grid: g, rho, j, t: state.t }
}

/// `(ρ, J)` on the refined lattice (twice the points, same period), where
/// spectral derivatives and quadratures of the quadratic densities are exact.
pub fn compute_current_refined(state: &MomentumState) -> CurrentField {
    current_on_lattice(&state.zero_padded())
}

/// Precomputed coherent spectra for off-lattice evaluation at one time.
pub struct CurrentEvaluator {
    grid: SpectralGrid,
    spectra: [Vec<Complex64>; 4],
}

impl CurrentEvaluator {
    /// Evaluator for absolute time `t`.
    pub fn new(state: &MomentumState, t: f64) -> Self {
        let s = state.advanced(t - state.t);
        Self { grid: s.grid, spectra: coherent_spectra(&s) }
    }

    /// `(ρ, J)` at any real `x` by direct momentum summation.
    pub fn at(&self, x: f64) -> (f64, f64) {
        let g = &self.grid;
        assemble(std::array::from_fn(|i| spectral::offgrid_sum(&self.spectra[i], g, x)))
    }
}

/// `(ρ, J)` at an arbitrary space-time point.
pub fn current_at(state: &MomentumState, t: f64, x: f64) -> (f64, f64) {
    CurrentEvaluator::new(state, t).at(x)
}

/// `D^±` applied to one branch's amplitudes as a purely spatial multiplier,
/// returned in momentum space.
pub fn apply_d_momentum(state: &MomentumState, branch: Branch, operator_sign: i32) -> ComplexField {
    let g = &state.grid;
    ComplexField::momentum(
        state
            .branch(branch)
            .iter()
            .enumerate()
            .map(|(j, &z)| z * d_multiplier(operator_sign, g.p(j)))
            .collect(),
    )
}

/// `D^±` applied to one branch, in position space at the state's reference time.
pub fn apply_d(state: &MomentumState, branch: Branch, operator_sign: i32) -> ComplexField {
    let m = apply_d_momentum(state, branch, operator_sign);
    ComplexField::position(spectral::inverse_raw(&m.values, &state.grid))
}

/// Time component of the Klein-Gordon current, `i(φ*∂tφ − φ∂tφ*)`, on the lattice.
///
/// Scaled to unit integral when non-negative everywhere, otherwise to unit
/// `Σ|J⁰|Δx`.
pub fn kg_zero_component(state: &MomentumState) -> Vec<f64> {
    let g = state.grid;
    let phi = spectral::inverse_raw(&state.phi_amplitudes(state.t), &g);
    let dphi = spectral::inverse_raw(&state.phidot_amplitudes(state.t), &g);
    let raw: Vec<f64> = phi.iter().zip(&dphi).map(|(f, d)| -2.0 * (f.conj() * d).im).collect();
    let positive = raw.iter().all(|&v| v >= 0.0);
    let scale = if positive {
        raw.iter().sum::<f64>() * g.dx()
    } else {
        raw.iter().map(|v| v.abs()).sum::<f64>() * g.dx()
    };
    raw.into_iter().map(|v| v / scale).collect()
}

/// `∫|ρ − |φ|²| dx` with both densities scaled to unit integral; lies in `[0, 2]`.
pub fn chi(state: &MomentumState) -> f64 {
    let fine = state.zero_padded();
    let cur = current_on_lattice(&fine);
    let phi = spectral::inverse_raw(&fine.phi_amplitudes(fine.t), &fine.grid);
    let born: Vec<f64> = phi.iter().map(|z| z.norm_sqr()).collect();
    let dx = fine.grid.dx();
    let zr = cur.rho.iter().sum::<f64>() * dx;
    let zb = born.iter().sum::<f64>() * dx;
    cur.rho.iter().zip(&born).map(|(r, b)| (r / zr - b / zb).abs()).sum::<f64>() * dx
}

/// Result of a centred-difference continuity check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ContinuityReport {
    /// `max_x |(ρ(t+dt) − ρ(t−dt))/2dt + ∂xJ(t)|`
    pub residual: f64,
    pub dt: f64,
    /// Set when `dt` is not small against the populated energy scale, so the
    /// residual is dominated by the time discretization.
    pub dt_too_large: bool,
}

/// Max-norm residual of `∂tρ + ∂xJ` with a centred time difference and a
/// spectral space derivative (evaluated on the refined lattice).
pub fn continuity_residual(state: &MomentumState, dt: f64) -> ContinuityReport {
    let fine = state.zero_padded();
    let later = current_on_lattice(&fine.advanced(dt));
    let earlier = current_on_lattice(&fine.advanced(-dt));
    let now = current_on_lattice(&fine);
    let djdx = spectral::spectral_derivative(&now.j, &fine.grid);
    let residual = (0..fine.grid.n)
        .map(|k| ((later.rho[k] - earlier.rho[k]) / (2.0 * dt) + djdx[k]).abs())
        .fold(0.0, f64::max);
    let omega = energy(state.max_populated_momentum(1e-12));
    ContinuityReport { residual, dt, dt_too_large: dt * omega > 0.1 }
}
