//! Wave-packet states as positive/negative-frequency momentum amplitudes.
//!
//! A state stores `a(p)` and `b(p)` at its reference time `t`, so that
//!
//! ```text
//! φ(x, t') = ∫ [a(p) e^{i(px − E(t'−t))} + b(p) e^{i(px + E(t'−t))}] dp/√(2π)
//! ```
//!
//! Each mode is on shell, so this is an exact solution of the free
//! Klein-Gordon equation on the lattice.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{self, energy, ComplexField, SpectralGrid};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Sign of the time frequency of a mode: `e^{∓iEt}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Positive,
    Negative,
}

impl Branch {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Branch::Positive => 1.0,
            Branch::Negative => -1.0,
        }
    }

    pub fn from_sign(s: i32) -> Result<Self> {
        match s {
            1 => Ok(Branch::Positive),
            -1 => Ok(Branch::Negative),
            _ => Err(Error::Domain(format!("branch sign must be ±1, got {s}"))),
        }
    }
}

/// Momentum amplitudes of both frequency branches at reference time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumState {
    pub grid: SpectralGrid,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub t: f64,
    pub mass: f64,
}

/// Cauchy data `(φ, ∂tφ)` for the Klein-Gordon equation at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub phi: ComplexField,
    pub phidot: ComplexField,
}

impl MomentumState {
    pub fn new(grid: SpectralGrid, a: Vec<Complex64>, b: Vec<Complex64>, t: f64) -> Result<Self> {
        if a.len() != grid.n || b.len() != grid.n {
            return Err(Error::Contract(format!(
                "amplitude lengths ({}, {}) differ from grid size {}",
                a.len(),
                b.len(),
                grid.n
            )));
        }
        Ok(Self { grid, a, b, t, mass: 1.0 })
    }

    pub fn positive(grid: SpectralGrid, a: Vec<Complex64>) -> Result<Self> {
        let n = a.len();
        Self::new(grid, a, vec![ZERO; n], 0.0)
    }

    pub fn branch(&self, branch: Branch) -> &[Complex64] {
        match branch {
            Branch::Positive => &self.a,
            Branch::Negative => &self.b,
        }
    }

    /// `Σ E(p)(|a|² + |b|²) Δp`, which equals `∫ρ dx` for the relativistic density.
    pub fn norm(&self) -> f64 {
        let g = &self.grid;
        (0..g.n)
            .map(|j| energy(g.p(j)) * (self.a[j].norm_sqr() + self.b[j].norm_sqr()))
            .sum::<f64>()
            * g.dp()
    }

    /// `Σ |a + b|² Δp = ∫|φ|² dx` at the reference time.
    pub fn born_norm(&self) -> f64 {
        self.a.iter().zip(&self.b).map(|(a, b)| (a + b).norm_sqr()).sum::<f64>() * self.grid.dp()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Domain(format!("cannot normalize a state with norm {n}")));
        }
        let s = 1.0 / n.sqrt();
        let mut out = self.clone();
        out.a.iter_mut().chain(out.b.iter_mut()).for_each(|z| *z *= s);
        Ok(out)
    }

    pub fn is_positive_frequency(&self) -> bool {
        self.b.iter().all(|z| *z == ZERO)
    }

    pub fn is_negative_frequency(&self) -> bool {
        self.a.iter().all(|z| *z == ZERO)
    }

    /// Amplitudes re-referenced to time `self.t + dt`.
    pub(crate) fn advanced(&self, dt: f64) -> Self {
        let g = &self.grid;
        let mut out = self.clone();
        if dt != 0.0 {
            for j in 0..g.n {
                let rot = Complex64::cis(-energy(g.p(j)) * dt);
                out.a[j] *= rot;
                out.b[j] *= rot.conj();
            }
        }
        out.t = self.t + dt;
        out
    }

    /// Momentum amplitudes of `φ(·, t)` at absolute time `t`.
    pub fn phi_amplitudes(&self, t: f64) -> Vec<Complex64> {
        let s = self.advanced(t - self.t);
        s.a.iter().zip(&s.b).map(|(a, b)| a + b).collect()
    }

    /// Momentum amplitudes of `∂tφ(·, t)`.
    pub fn phidot_amplitudes(&self, t: f64) -> Vec<Complex64> {
        let s = self.advanced(t - self.t);
        let g = &self.grid;
        (0..g.n)
            .map(|j| Complex64::new(0.0, -energy(g.p(j))) * (s.a[j] - s.b[j]))
            .collect()
    }

    /// The same physical state on `grid.refined()` (momentum zero padding).
    pub fn zero_padded(&self) -> Self {
        Self {
            grid: self.grid.refined(),
            a: spectral::zero_pad(&self.a),
            b: spectral::zero_pad(&self.b),
            t: self.t,
            mass: self.mass,
        }
    }

    /// Largest `|p|` among nodes whose density weight `E(|a|²+|b|²)` exceeds
    /// `rel_threshold` times the peak weight.
    pub fn max_populated_momentum(&self, rel_threshold: f64) -> f64 {
        let g = &self.grid;
        let w: Vec<f64> = (0..g.n)
            .map(|j| energy(g.p(j)) * (self.a[j].norm_sqr() + self.b[j].norm_sqr()))
            .collect();
        let peak = w.iter().cloned().fold(0.0, f64::max);
        (0..g.n)
            .filter(|&j| w[j] > rel_threshold * peak)
            .map(|j| g.p(j).abs())
            .fold(0.0, f64::max)
    }
}

/// Positive-frequency Gaussian packet `a(p) ∝ e^{-(p−p̄)²/σ²} e^{-ipx₀}`, normalized
/// so that `∫ρ dx = 1`.
pub fn gaussian_state(pbar: f64, sigma_p: f64, x0: f64, grid: SpectralGrid) -> Result<MomentumState> {
    if !(sigma_p > 0.0) || !sigma_p.is_finite() {
        return Err(Error::Domain(format!("sigma_p must be positive, got {sigma_p}")));
    }
    // |a|² ∝ e^{-2(p−p̄)²/σ²}; bound the E-weighted mass beyond ±p_max by the
    // Gaussian tail bound erfc(z) ≤ e^{-z²} times the energy ratio.
    let gap = grid.p_max - pbar.abs();
    let tail = if gap <= 0.0 {
        1.0
    } else {
        (-2.0 * gap * gap / (sigma_p * sigma_p)).exp() * energy(grid.p_max) / energy(pbar)
    };
    if tail > 1e-10 {
        return Err(Error::Resolution(format!(
            "Gaussian tail beyond p_max={} is {tail:.3e} of the norm; use p_max >= {:.3}",
            grid.p_max,
            pbar.abs() + 8.0 * sigma_p
        )));
    }
    let a: Vec<Complex64> = grid
        .momenta()
        .into_iter()
        .map(|p| {
            let d = (p - pbar) / sigma_p;
            Complex64::from_polar((-d * d).exp(), -p * x0)
        })
        .collect();
    MomentumState::positive(grid, a)?.normalized()
}

/// Splits Cauchy data into frequency branches:
/// `a = ½(φ̃ + i φ̇̃/E)`, `b = ½(φ̃ − i φ̇̃/E)`.
pub fn split_frequency(init: &InitialData, grid: SpectralGrid) -> Result<MomentumState> {
    let phi = spectral::forward_transform(&init.phi, &grid)?;
    let phidot = spectral::forward_transform(&init.phidot, &grid)?;
    let mut a = Vec::with_capacity(grid.n);
    let mut b = Vec::with_capacity(grid.n);
    for j in 0..grid.n {
        let w = Complex64::new(0.0, 1.0) * phidot.values[j] / energy(grid.p(j));
        a.push(0.5 * (phi.values[j] + w));
        b.push(0.5 * (phi.values[j] - w));
    }
    MomentumState::new(grid, a, b, 0.0)
}

/// `φ(x, t)` on the position lattice at absolute time `t`.
pub fn reconstruct_phi(state: &MomentumState, t: f64) -> ComplexField {
    ComplexField::position(spectral::inverse_raw(&state.phi_amplitudes(t), &state.grid))
}

/// `∂tφ(x, t)` on the position lattice.
pub fn reconstruct_phidot(state: &MomentumState, t: f64) -> ComplexField {
    ComplexField::position(spectral::inverse_raw(&state.phidot_amplitudes(t), &state.grid))
}

/// Cauchy data of a state at absolute time `t`.
pub fn initial_data(state: &MomentumState, t: f64) -> InitialData {
    InitialData { phi: reconstruct_phi(state, t), phidot: reconstruct_phidot(state, t) }
}

/// Spectral action of `√(−∂² + 1)` on a position field.
pub fn apply_energy_operator(f: &ComplexField, grid: &SpectralGrid) -> Result<ComplexField> {
    let mut spec = spectral::forward_transform(f, grid)?;
    for (j, v) in spec.values.iter_mut().enumerate() {
        *v *= energy(grid.p(j));
    }
    spectral::inverse_transform(&spec, grid)
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    grid: SpectralGrid,
    t: f64,
    a: Vec<[f64; 2]>,
    b: Vec<[f64; 2]>,
}

impl MomentumState {
    pub fn to_json(&self) -> Result<String> {
        let pairs = |v: &[Complex64]| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>();
        let doc = StateJson { grid: self.grid, t: self.t, a: pairs(&self.a), b: pairs(&self.b) };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: StateJson = serde_json::from_str(text)?;
        let grid = SpectralGrid::new(doc.grid.n, doc.grid.p_max)?;
        let unpack = |v: Vec<[f64; 2]>| v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
        Self::new(grid, unpack(doc.a), unpack(doc.b), doc.t)
    }
}

/// Position-space centroid `Σ x ρ / Σ ρ` of a non-negative density sampled on `grid`.
pub(crate) fn centroid(rho: &[f64], grid: &SpectralGrid) -> f64 {
    let total: f64 = rho.iter().sum();
    rho.iter().enumerate().map(|(k, r)| grid.x(k) * r).sum::<f64>() / total
}
