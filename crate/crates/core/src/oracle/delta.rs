//! Positive-energy states that localize to a point.
//!
//! `a_n(p) = √(1/(nE)) f(p/n) e^{−ipa}` with the unit Gaussian
//! `f(u) = π^{−1/4} e^{−u²/2}`. Its density has unit integral for every `n`,
//! and its Fourier transform is `R_n(k) e^{−ika}/√(2π)` with
//!
//! ```text
//! R_n(k) = (1/n) ∫ f((q−k)/n) f(q/n) Γ(q−k, q) dq,   Γ(p, q) = S₊(p)S₊(q) + S₋(p)S₋(q)
//! ```
//!
//! so `ρ_n → δ(x − a)` exactly when `R_n → 1` pointwise.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::currents::{compute_current, CurrentEvaluator};
use crate::error::{Error, Result};
use crate::spectral::{energy, lightcone, SpectralGrid};
use crate::state::MomentumState;

/// `R_n` is reported on momentum nodes with `|p|` up to this.
pub const R_N_RANGE: f64 = 4.0;

const QUAD_STEP: f64 = 0.01;

#[derive(Debug, Clone, Serialize)]
pub struct DeltaSeqResult {
    pub n: u32,
    pub a: f64,
    pub x: Vec<f64>,
    pub rho_n: Vec<f64>,
    pub integral: f64,
    /// Full width at half maximum.
    pub width: f64,
    pub r_p: Vec<f64>,
    pub r_n: Vec<f64>,
}

impl DeltaSeqResult {
    /// `max |R_n(p) − 1|` over `|p| ≤ p_abs`.
    pub fn r_deviation(&self, p_abs: f64) -> f64 {
        self.r_p
            .iter()
            .zip(&self.r_n)
            .filter(|(p, _)| p.abs() <= p_abs + 1e-12)
            .map(|(_, r)| (r - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Unit Gaussian `π^{−1/4} e^{−u²/2}`.
pub fn f_unit(u: f64) -> f64 {
    std::f64::consts::PI.powf(-0.25) * (-0.5 * u * u).exp()
}

/// `(S₊, S₋) = (√((E+p)/2E), √((E−p)/2E))`.
pub fn s_pm(p: f64) -> (f64, f64) {
    let (ep, em) = lightcone(p);
    let e2 = 2.0 * energy(p);
    ((ep / e2).sqrt(), (em / e2).sqrt())
}

pub fn gamma(p: f64, q: f64) -> f64 {
    let (pp, pm) = s_pm(p);
    let (qp, qm) = s_pm(q);
    pp * qp + pm * qm
}

/// `G₁(p) = √((E+1)/2E)`
pub fn g1(p: f64) -> f64 {
    let e = energy(p);
    ((e + 1.0) / (2.0 * e)).sqrt()
}

/// `G₂(p) = p/√(2E(E+1))`
pub fn g2(p: f64) -> f64 {
    let e = energy(p);
    p / (2.0 * e * (e + 1.0)).sqrt()
}

/// Scaled state of the sequence.
pub fn delta_state(n: u32, a: f64, grid: SpectralGrid) -> Result<MomentumState> {
    if n == 0 {
        return Err(Error::Domain("delta-sequence index must be at least 1".into()));
    }
    let nf = n as f64;
    if grid.p_max < 8.0 * nf {
        return Err(Error::Resolution(format!(
            "delta state n={n} needs p_max >= {}, grid has {}",
            8 * n,
            grid.p_max
        )));
    }
    if a.abs() > 0.25 * grid.length() {
        return Err(Error::Domain(format!("centre a={a} lies outside the inner half of the box")));
    }
    let amps = grid
        .momenta()
        .into_iter()
        .map(|p| Complex64::from_polar((1.0 / (nf * energy(p))).sqrt() * f_unit(p / nf), -p * a))
        .collect();
    MomentumState::positive(grid, amps)
}

/// `R_n(k)` by trapezoidal quadrature.
pub fn r_n(n: u32, k: f64) -> f64 {
    let nf = n as f64;
    let half = 9.0 * nf + 0.5 * k.abs();
    let centre = 0.5 * k;
    let m = (2.0 * half / QUAD_STEP).ceil() as usize;
    let h = 2.0 * half / m as f64;
    let term = |q: f64| f_unit((q - k) / nf) * f_unit(q / nf) * gamma(q - k, q);
    let mut sum = 0.5 * (term(centre - half) + term(centre + half));
    for i in 1..m {
        sum += term(centre - half + i as f64 * h);
    }
    sum * h / nf
}

fn fwhm(eval: &CurrentEvaluator, a: f64, n: u32) -> f64 {
    let peak = eval.at(a).0;
    let half = 0.5 * peak;
    let side = |dir: f64| {
        let step = 0.02 / n as f64;
        let mut lo = 0.0;
        let mut hi = step;
        while eval.at(a + dir * hi).0 > half {
            lo = hi;
            hi += step;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if eval.at(a + dir * mid).0 > half {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    side(1.0) + side(-1.0)
}

/// Density, width and `R_n` for member `n` of the sequence centred at `a`.
pub fn delta_sequence(n: u32, a: f64, grid: SpectralGrid) -> Result<DeltaSeqResult> {
    let state = delta_state(n, a, grid)?;
    let cur = compute_current(&state);
    let eval = CurrentEvaluator::new(&state, 0.0);
    let width = fwhm(&eval, a, n);
    let r_p: Vec<f64> = grid.momenta().into_iter().filter(|p| p.abs() <= R_N_RANGE).collect();
    let r_vals = r_p.par_iter().map(|&p| r_n(n, p)).collect();
    Ok(DeltaSeqResult {
        n,
        a,
        x: grid.positions(),
        integral: cur.integral(),
        rho_n: cur.rho,
        width,
        r_p,
        r_n: r_vals,
    })
}
