//! Uniform momentum/position lattices and the unitary Fourier pair.
//!
//! Everything is in natural units (`m = c = ħ = 1`), so the Compton
//! wavelength is the unit of length. A grid with `n` points and half-width
//! `p_max` carries momentum nodes `p_j = -p_max + j·Δp` with `Δp = 2 p_max / n`
//! and position nodes `x_k = -L/2 + k·Δx` with `L = 2π/Δp`, `Δx = L/n`.
//!
//! The transform pair is
//!
//! ```text
//! f̃(p_j) = Σ_k f(x_k) e^{-i p_j x_k} Δx / √(2π)
//! f(x_k) = Σ_j f̃(p_j) e^{+i p_j x_k} Δp / √(2π)
//! ```
//!
//! which satisfies `Σ|f|²Δx = Σ|f̃|²Δp` exactly. Because the lattices are
//! centred and `n/2` is even, the phase `e^{-i p_j x_k}` factors into a plain
//! DFT twiddle times `(-1)^{j+k}`.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let plan: std::sync::Arc<dyn Fft<f64>> = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        }
    });
    plan.process(buf);
}

/// On-shell energy `E(p) = √(p² + 1)`.
#[inline]
pub fn energy(p: f64) -> f64 {
    p.hypot(1.0)
}

/// Light-cone components `(E + p, E − p)` of the positive-energy shell.
///
/// The small member is computed as the reciprocal of the large one, since
/// `(E + p)(E − p) = 1`; this keeps full relative precision for `|p| ≫ 1`.
#[inline]
pub fn lightcone(p: f64) -> (f64, f64) {
    let e = energy(p);
    if p >= 0.0 {
        let big = e + p;
        (big, 1.0 / big)
    } else {
        let big = e - p;
        (1.0 / big, big)
    }
}

/// Uniform momentum lattice with its paired periodic position lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub n: usize,
    pub p_max: f64,
}

impl SpectralGrid {
    pub fn new(n: usize, p_max: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::Domain(format!(
                "grid size must be a power of two >= 16, got {n}"
            )));
        }
        if !(p_max > 0.0) || !p_max.is_finite() {
            return Err(Error::Domain(format!("p_max must be positive, got {p_max}")));
        }
        Ok(Self { n, p_max })
    }

    /// Grid sized for a Gaussian packet of momentum width `sigma_p` centred at `pbar`.
    ///
    /// `p_max = 8·max(σ_p, |p̄|, 1)` and the box holds at least twenty packet
    /// widths, where the width is `max(1/σ_p, 1)` (the Compton length bounds
    /// the relativistic density's tails from below).
    pub fn for_gaussian(sigma_p: f64, pbar: f64) -> Result<Self> {
        if !(sigma_p > 0.0) {
            return Err(Error::Domain(format!("sigma_p must be positive, got {sigma_p}")));
        }
        let p_max = 8.0 * sigma_p.max(pbar.abs()).max(1.0);
        let width = (1.0 / sigma_p).max(1.0);
        let needed = (20.0 * width * p_max / PI).ceil() as usize;
        let n = needed.max(16).next_power_of_two();
        if n > 1 << 22 {
            return Err(Error::Resolution(format!(
                "packet sigma_p={sigma_p} needs {n} grid points; choose the grid explicitly"
            )));
        }
        Self::new(n, p_max)
    }

    #[inline]
    pub fn dp(&self) -> f64 {
        2.0 * self.p_max / self.n as f64
    }

    /// Period of the position lattice.
    #[inline]
    pub fn length(&self) -> f64 {
        2.0 * PI / self.dp()
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.length() / self.n as f64
    }

    #[inline]
    pub fn p(&self, j: usize) -> f64 {
        -self.p_max + j as f64 * self.dp()
    }

    #[inline]
    pub fn x(&self, k: usize) -> f64 {
        -0.5 * self.length() + k as f64 * self.dx()
    }

    pub fn momenta(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.p(j)).collect()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.x(k)).collect()
    }

    /// Twice as many points over the same period: `Δp` and `L` are kept,
    /// `p_max` doubles and `Δx` halves. Products of two band-limited fields
    /// on `self` are represented without aliasing on the refined grid.
    pub fn refined(&self) -> Self {
        Self { n: 2 * self.n, p_max: 2.0 * self.p_max }
    }

    /// Index of `p` on the lattice if it coincides with a node to within `tol·Δp`.
    pub fn node_index(&self, p: f64, tol: f64) -> Option<usize> {
        let r = (p + self.p_max) / self.dp();
        let j = r.round();
        if (r - j).abs() <= tol && j >= 0.0 && (j as usize) < self.n {
            Some(j as usize)
        } else {
            None
        }
    }
}

/// Which representation a sampled field lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    Position,
    Momentum,
}

/// Complex samples on the nodes of a grid, tagged with their representation.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub values: Vec<Complex64>,
    pub domain: Domain,
}

impl ComplexField {
    pub fn position(values: Vec<Complex64>) -> Self {
        Self { values, domain: Domain::Position }
    }

    pub fn momentum(values: Vec<Complex64>) -> Self {
        Self { values, domain: Domain::Momentum }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `Σ |f|² · w` with `w` the grid weight of the field's domain.
    pub fn norm_sqr(&self, grid: &SpectralGrid) -> f64 {
        let w = match self.domain {
            Domain::Position => grid.dx(),
            Domain::Momentum => grid.dp(),
        };
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * w
    }

    fn check(&self, grid: &SpectralGrid, want: Domain) -> Result<()> {
        if self.values.len() != grid.n {
            return Err(Error::Contract(format!(
                "field has {} samples, grid has {}",
                self.values.len(),
                grid.n
            )));
        }
        if self.domain != want {
            return Err(Error::Contract(format!(
                "expected a {want:?}-space field, got {:?}",
                self.domain
            )));
        }
        Ok(())
    }
}

#[inline]
fn alternate(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Raw transform on slices; the caller guarantees `values.len() == grid.n`.
pub(crate) fn forward_raw(values: &[Complex64], grid: &SpectralGrid) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> =
        values.iter().enumerate().map(|(k, &v)| v * alternate(k)).collect();
    fft_in_place(&mut buf, false);
    let scale = grid.dx() / (2.0 * PI).sqrt();
    for (j, v) in buf.iter_mut().enumerate() {
        *v *= scale * alternate(j);
    }
    buf
}

pub(crate) fn inverse_raw(values: &[Complex64], grid: &SpectralGrid) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> =
        values.iter().enumerate().map(|(j, &v)| v * alternate(j)).collect();
    fft_in_place(&mut buf, true);
    let scale = grid.dp() / (2.0 * PI).sqrt();
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= scale * alternate(k);
    }
    buf
}

/// Position → momentum with the unitary `e^{-ipx}/√(2π)` kernel.
pub fn forward_transform(f: &ComplexField, grid: &SpectralGrid) -> Result<ComplexField> {
    f.check(grid, Domain::Position)?;
    Ok(ComplexField::momentum(forward_raw(&f.values, grid)))
}

/// Momentum → position; exact inverse of [`forward_transform`].
pub fn inverse_transform(f: &ComplexField, grid: &SpectralGrid) -> Result<ComplexField> {
    f.check(grid, Domain::Momentum)?;
    Ok(ComplexField::position(inverse_raw(&f.values, grid)))
}

/// `Σ_j amps_j e^{i p_j x} Δp/√(2π)` at an arbitrary real `x`, by direct summation.
///
/// The phase is advanced by a constant rotation from node to node, with a
/// fresh `cis` every 64 nodes to keep the accumulated drift at round-off level.
pub fn eval_offgrid(amps: &[Complex64], grid: &SpectralGrid, x: f64) -> Result<Complex64> {
    if amps.len() != grid.n {
        return Err(Error::Contract(format!(
            "amplitude array has {} entries, grid has {}",
            amps.len(),
            grid.n
        )));
    }
    Ok(offgrid_sum(amps, grid, x))
}

pub(crate) fn offgrid_sum(amps: &[Complex64], grid: &SpectralGrid, x: f64) -> Complex64 {
    let dp = grid.dp();
    let step = Complex64::cis(dp * x);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut phase = Complex64::new(0.0, 0.0);
    for (j, &a) in amps.iter().enumerate() {
        if j % 64 == 0 {
            phase = Complex64::cis(grid.p(j) * x);
        } else {
            phase *= step;
        }
        acc += a * phase;
    }
    acc * (dp / (2.0 * PI).sqrt())
}

/// Embeds momentum amplitudes of `grid` into the centre of `grid.refined()`.
pub(crate) fn zero_pad(amps: &[Complex64]) -> Vec<Complex64> {
    let n = amps.len();
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * n];
    out[n / 2..n / 2 + n].copy_from_slice(amps);
    out
}

/// Spectral derivative of a real, band-limited sample vector.
pub(crate) fn spectral_derivative(values: &[f64], grid: &SpectralGrid) -> Vec<f64> {
    let field: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut spec = forward_raw(&field, grid);
    for (j, s) in spec.iter_mut().enumerate() {
        // The lowest node is the unpaired Nyquist frequency; drop it.
        *s = if j == 0 { Complex64::new(0.0, 0.0) } else { *s * Complex64::new(0.0, grid.p(j)) };
    }
    inverse_raw(&spec, grid).into_iter().map(|z| z.re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
    }

    #[test]
    fn grid_pair_consistency() {
        let g = SpectralGrid::new(256, 12.5).unwrap();
        assert!((g.dp() * g.dx() * g.n as f64 - 2.0 * PI).abs() < 1e-12);
        assert_eq!(g.p(g.n / 2), 0.0);
        assert!((g.p(0) + g.p_max).abs() < 1e-15);
        assert!((g.x(g.n / 2)).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(SpectralGrid::new(8, 1.0).is_err());
        assert!(SpectralGrid::new(100, 1.0).is_err());
        assert!(SpectralGrid::new(64, 0.0).is_err());
        assert!(SpectralGrid::new(64, -1.0).is_err());
    }

    #[test]
    fn length_mismatch_is_a_contract_error() {
        let g = SpectralGrid::new(32, 4.0).unwrap();
        let f = ComplexField::position(vec![Complex64::new(1.0, 0.0); 16]);
        assert!(matches!(forward_transform(&f, &g), Err(Error::Contract(_))));
        let m = ComplexField::momentum(vec![Complex64::new(1.0, 0.0); 32]);
        assert!(matches!(forward_transform(&m, &g), Err(Error::Contract(_))));
        assert!(eval_offgrid(&[Complex64::new(0.0, 0.0); 3], &g, 0.0).is_err());
    }

    #[test]
    fn constant_field_maps_to_zero_momentum_spike() {
        let g = SpectralGrid::new(64, 8.0).unwrap();
        let c = 1.0 / g.length().sqrt();
        let f = ComplexField::position(vec![Complex64::new(c, 0.0); g.n]);
        let ft = forward_transform(&f, &g).unwrap();
        for (j, v) in ft.values.iter().enumerate() {
            if j == g.n / 2 {
                // height √(L/2π)
                let expect = c * g.length() / (2.0 * PI).sqrt();
                assert!((v.re - expect).abs() < 1e-12 && v.im.abs() < 1e-12);
                assert!((v.norm_sqr() * g.dp() - 1.0).abs() < 1e-12);
            } else {
                assert!(v.norm() < 1e-12, "leak at {j}: {v}");
            }
        }
    }

    #[test]
    fn unit_gaussian_is_self_transform() {
        let g = SpectralGrid::new(256, 10.0).unwrap();
        let norm = PI.powf(-0.25);
        let f = ComplexField::position(
            g.positions().iter().map(|&x| Complex64::new(norm * (-x * x / 2.0).exp(), 0.0)).collect(),
        );
        let ft = forward_transform(&f, &g).unwrap();
        // Oracle: direct quadrature of the continuous transform at each node.
        for j in (0..g.n).step_by(7) {
            let p = g.p(j);
            let h = 1e-3;
            let mut direct = Complex64::new(0.0, 0.0);
            let mut x = -20.0;
            while x <= 20.0 {
                direct += Complex64::cis(-p * x) * norm * (-x * x / 2.0).exp() * h;
                x += h;
            }
            direct /= (2.0 * PI).sqrt();
            let analytic = norm * (-p * p / 2.0).exp();
            assert!((direct.re - analytic).abs() < 1e-12);
            assert!((ft.values[j].re - analytic).abs() < 1e-12, "p={p}");
            assert!(ft.values[j].im.abs() < 1e-12);
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        let g = SpectralGrid::new(512, 6.0).unwrap();
        let f = ComplexField::position(random_field(g.n, 3));
        let ft = forward_transform(&f, &g).unwrap();
        let back = inverse_transform(&ft, &g).unwrap();
        for (a, b) in f.values.iter().zip(&back.values) {
            assert!((a - b).norm() < 1e-13);
        }
        let lhs = f.norm_sqr(&g);
        let rhs = ft.norm_sqr(&g);
        assert!((lhs - rhs).abs() / lhs < 1e-12);
    }

    #[test]
    fn linearity() {
        let g = SpectralGrid::new(128, 3.0).unwrap();
        let f = random_field(g.n, 1);
        let h = random_field(g.n, 2);
        let (al, be) = (Complex64::new(0.3, -1.2), Complex64::new(-2.0, 0.5));
        let mix: Vec<_> = f.iter().zip(&h).map(|(a, b)| al * a + be * b).collect();
        let tf = forward_raw(&f, &g);
        let th = forward_raw(&h, &g);
        let tm = forward_raw(&mix, &g);
        for j in 0..g.n {
            assert!((tm[j] - (al * tf[j] + be * th[j])).norm() < 1e-12);
        }
    }

    #[test]
    fn single_amplitude_at_origin() {
        let g = SpectralGrid::new(64, 4.0).unwrap();
        let mut amps = vec![Complex64::new(0.0, 0.0); g.n];
        amps[20] = Complex64::new(0.7, -0.2);
        let v = eval_offgrid(&amps, &g, 0.0).unwrap();
        let expect = amps[20] * g.dp() / (2.0 * PI).sqrt();
        assert!((v - expect).norm() < 1e-15);
    }

    #[test]
    fn offgrid_matches_inverse_and_is_periodic() {
        let g = SpectralGrid::new(256, 5.0).unwrap();
        let amps = random_field(g.n, 9);
        let lattice = inverse_raw(&amps, &g);
        for k in (0..g.n).step_by(13) {
            let v = eval_offgrid(&amps, &g, g.x(k)).unwrap();
            assert!((v - lattice[k]).norm() < 1e-12);
            let w = eval_offgrid(&amps, &g, g.x(k) + g.length()).unwrap();
            assert!((w - v).norm() < 1e-12);
        }
    }

    #[test]
    fn lightcone_product_is_one() {
        for &p in &[-1e4, -3.0, -1e-3, 0.0, 0.5, 7.0, 1e5] {
            let (a, b) = lightcone(p);
            assert!((a * b - 1.0).abs() < 1e-15);
            assert!((a + b - 2.0 * energy(p)).abs() <= 1e-15 * energy(p) * 4.0);
        }
    }

    #[test]
    fn spectral_derivative_of_sine() {
        let g = SpectralGrid::new(64, 8.0).unwrap();
        let k = g.p(g.n / 2 + 3);
        let v: Vec<f64> = g.positions().iter().map(|&x| (k * x).sin()).collect();
        let d = spectral_derivative(&v, &g);
        for (i, x) in g.positions().iter().enumerate() {
            assert!((d[i] - k * (k * x).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn default_gaussian_grid_obeys_resolution_rules() {
        let g = SpectralGrid::for_gaussian(0.01, 0.0).unwrap();
        assert!(g.p_max >= 8.0);
        assert!(g.length() >= 2000.0);
        let g = SpectralGrid::for_gaussian(100.0, 0.0).unwrap();
        assert!(g.p_max >= 800.0 && g.length() >= 20.0);
    }
}
