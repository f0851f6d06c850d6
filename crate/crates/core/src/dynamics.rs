//! Free evolution and the time-of-flight momentum distribution.
//!
//! The ballistic limit `g(p) = (m²/E³)·t·ρ(pt/E, t)` needs the density far
//! outside the original periodic box, and any lattice sum over momenta is
//! itself periodic in `x` with the box length. The confined initial packet is
//! therefore re-embedded in a box large enough to hold everything it can reach
//! by time `t` (position-space zero padding, i.e. exact band-limited
//! interpolation of the momentum amplitudes), evolved there, and the density
//! is read off at the ballistic points.

use rayon::prelude::*;
use serde::Serialize;

use crate::currents;
use crate::error::{Error, Result};
use crate::interp::periodic_cubic;
use crate::spectral::{self, energy, SpectralGrid};
use crate::state::{centroid, reconstruct_phi, MomentumState};

/// Largest ballistic box, in lattice points, before the limit is abandoned.
pub const MAX_BOX_POINTS: usize = 1 << 23;

/// Default L¹ gap between `g(t)` and `g(t/2)` accepted as converged.
pub const DEFAULT_TOF_TOLERANCE: f64 = 0.01;

/// Gap above which a single-time estimate is flagged as unconverged.
pub const NONCONVERGENCE_GAP: f64 = 0.05;

/// Free Klein-Gordon evolution by `dt`: `a ← a e^{−iEdt}`, `b ← b e^{+iEdt}`.
pub fn evolve(state: &MomentumState, dt: f64) -> MomentumState {
    state.advanced(dt)
}

#[derive(Debug, Clone, Serialize)]
pub struct TofResult {
    pub p: Vec<f64>,
    pub g: Vec<f64>,
    /// `|a(p)|²` scaled to unit integral over the output nodes' grid.
    pub born_g: Vec<f64>,
    pub t_final: f64,
    /// `Σ |g(t_final) − g(t_final/2)| Δp`
    pub convergence_gap: f64,
    pub converged: bool,
    pub dp: f64,
}

impl TofResult {
    pub fn integral(&self) -> f64 {
        self.g.iter().sum::<f64>() * self.dp
    }

    /// `Σ |g − born_g| Δp`
    pub fn born_distance(&self) -> f64 {
        self.g.iter().zip(&self.born_g).map(|(a, b)| (a - b).abs()).sum::<f64>() * self.dp
    }
}

/// Positive-frequency packet re-embedded in a larger periodic box.
struct BallisticBox {
    state: MomentumState,
}

impl BallisticBox {
    fn new(initial: &MomentumState, reach: f64) -> Result<Self> {
        let g = initial.grid;
        let length = g.length();
        let factor = ((2.0 * reach + length) * 1.1 / length).ceil().max(1.0) as usize;
        let factor = factor.next_power_of_two();
        let big_n = factor * g.n;
        if big_n > MAX_BOX_POINTS {
            return Err(Error::NonConvergence(format!(
                "ballistic box needs {big_n} points (limit {MAX_BOX_POINTS})"
            )));
        }
        let big = SpectralGrid::new(big_n, g.p_max)?;
        let phi = reconstruct_phi(initial, 0.0).values;
        let mut padded = vec![num_complex::Complex64::new(0.0, 0.0); big_n];
        let offset = (factor - 1) * g.n / 2;
        padded[offset..offset + g.n].copy_from_slice(&phi);
        let a = spectral::forward_raw(&padded, &big);
        Ok(Self { state: MomentumState::positive(big, a)? })
    }

    /// Relativistic density and Born density on the refined lattice at time `t`.
    fn densities(&self, t: f64) -> (SpectralGrid, Vec<f64>, Vec<f64>) {
        let fine = self.state.advanced(t).zero_padded();
        let cur = currents::current_on_lattice(&fine);
        let phi = spectral::inverse_raw(&fine.phi_amplitudes(fine.t), &fine.grid);
        (fine.grid, cur.rho, phi.iter().map(|z| z.norm_sqr()).collect())
    }
}

fn sample(grid: &SpectralGrid, values: &[f64], x: f64) -> f64 {
    // Past the box edge lies only the aliased image of the packet.
    if x.abs() >= 0.5 * grid.length() - grid.dx() {
        return 0.0;
    }
    periodic_cubic(values, grid.x(0), grid.dx(), x)
}

struct Prepared {
    initial: MomentumState,
    nodes: Vec<usize>,
    vmax: f64,
}

fn prepare(state: &MomentumState, t: f64) -> Result<Prepared> {
    if !state.is_positive_frequency() {
        return Err(Error::Unsupported(
            "time-of-flight is defined for positive-frequency states only".into(),
        ));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("flight time must be positive, got {t}")));
    }
    let initial = state.advanced(-state.t);
    let cur = currents::current_on_lattice(&initial);
    let g = initial.grid;
    let total: f64 = cur.rho.iter().sum();
    let mean = centroid(&cur.rho, &g);
    let var = cur.rho.iter().enumerate().map(|(k, r)| (g.x(k) - mean).powi(2) * r).sum::<f64>() / total;
    if mean.abs() > 1.0 {
        return Err(Error::Precondition(format!(
            "packet centroid at t=0 is {mean:.3}; time-of-flight needs it within 1 of the origin"
        )));
    }
    if var.sqrt() >= t {
        return Err(Error::Precondition(format!(
            "flight time {t} does not exceed the packet width {:.3}",
            var.sqrt()
        )));
    }
    let pmax = initial.max_populated_momentum(1e-16);
    let nodes = (0..g.n).filter(|&j| g.p(j).abs() <= 0.5 * g.p_max).collect();
    Ok(Prepared { initial, nodes, vmax: pmax / energy(pmax) })
}

/// `g(p) = t·ρ(pt/E, t)/E³` on the output nodes, for one flight time.
fn ballistic_g(prep: &Prepared, t: f64) -> Result<Vec<f64>> {
    let boxed = BallisticBox::new(&prep.initial, prep.vmax * t)?;
    let (fine, rho, _) = boxed.densities(t);
    let g = prep.initial.grid;
    Ok(prep
        .nodes
        .par_iter()
        .map(|&j| {
            let p = g.p(j);
            let e = energy(p);
            t * sample(&fine, &rho, p * t / e) / (e * e * e)
        })
        .collect())
}

fn born_reference(prep: &Prepared) -> Vec<f64> {
    let g = prep.initial.grid;
    let w: Vec<f64> = prep.nodes.iter().map(|&j| prep.initial.a[j].norm_sqr()).collect();
    let z = w.iter().sum::<f64>() * g.dp();
    w.into_iter().map(|v| v / z).collect()
}

fn l1(a: &[f64], b: &[f64], dp: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() * dp
}

/// Time-of-flight momentum density at flight time `t`, with the gap to `t/2`.
pub fn time_of_flight(state: &MomentumState, t: f64) -> Result<TofResult> {
    let prep = prepare(state, t)?;
    let g_now = ballistic_g(&prep, t)?;
    let g_half = ballistic_g(&prep, 0.5 * t)?;
    let grid = prep.initial.grid;
    let gap = l1(&g_now, &g_half, grid.dp());
    Ok(TofResult {
        p: prep.nodes.iter().map(|&j| grid.p(j)).collect(),
        born_g: born_reference(&prep),
        g: g_now,
        t_final: t,
        convergence_gap: gap,
        converged: gap <= NONCONVERGENCE_GAP,
        dp: grid.dp(),
    })
}

/// Doubles the flight time from `t_start` until the gap to the previous time
/// falls below `tolerance` or `t_budget` is exceeded.
pub fn time_of_flight_converged(
    state: &MomentumState,
    t_start: f64,
    tolerance: f64,
    t_budget: f64,
) -> Result<TofResult> {
    let prep = prepare(state, t_start)?;
    let grid = prep.initial.grid;
    let mut t = t_start;
    let mut prev = ballistic_g(&prep, t)?;
    let mut gap = f64::INFINITY;
    while 2.0 * t <= t_budget {
        let next = match ballistic_g(&prep, 2.0 * t) {
            Ok(g) => g,
            Err(Error::NonConvergence(msg)) => {
                log::warn!("stopping t-doubling at t={t}: {msg}");
                break;
            }
            Err(e) => return Err(e),
        };
        t *= 2.0;
        gap = l1(&next, &prev, grid.dp());
        prev = next;
        log::debug!("tof t={t:.3e} gap={gap:.3e}");
        if gap < tolerance {
            break;
        }
    }
    Ok(TofResult {
        p: prep.nodes.iter().map(|&j| grid.p(j)).collect(),
        born_g: born_reference(&prep),
        g: prev,
        t_final: t,
        convergence_gap: gap,
        converged: gap < tolerance,
        dp: grid.dp(),
    })
}

/// L¹ distance between the relativistic estimator and the non-relativistic
/// one, `g(p) = t·|φ(pt, t)|²`, at flight time `t`.
pub fn nonrel_tof_check(state: &MomentumState, t: f64) -> Result<f64> {
    let prep = prepare(state, t)?;
    let boxed = BallisticBox::new(&prep.initial, prep.vmax * t * 1.05)?;
    let (fine, rho, born) = boxed.densities(t);
    let g = prep.initial.grid;
    let (rel, nonrel): (Vec<f64>, Vec<f64>) = prep
        .nodes
        .par_iter()
        .map(|&j| {
            let p = g.p(j);
            let e = energy(p);
            (t * sample(&fine, &rho, p * t / e) / (e * e * e), t * sample(&fine, &born, p * t))
        })
        .unzip();
    Ok(l1(&rel, &nonrel, g.dp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::gaussian_state;

    #[test]
    fn evolution_is_unitary_and_composes() {
        let g = SpectralGrid::new(256, 8.0).unwrap();
        let mut s = gaussian_state(1.0, 0.8, 0.0, g).unwrap();
        s.b[40] = num_complex::Complex64::new(0.01, 0.02);
        let s = s.normalized().unwrap();
        assert_eq!(evolve(&s, 0.0), s);
        let long = evolve(&s, 1e6);
        assert!((long.norm() - 1.0).abs() < 1e-14);
        let composed = evolve(&evolve(&s, 2.5), 4.0);
        let direct = evolve(&s, 6.5);
        for j in 0..g.n {
            assert!((composed.a[j] - direct.a[j]).norm() < 1e-15);
            assert!((composed.b[j] - direct.b[j]).norm() < 1e-15);
        }
    }

    #[test]
    fn centroid_moves_at_group_velocity() {
        let g = SpectralGrid::new(2048, 8.0).unwrap();
        let pbar = 1.0;
        let s = gaussian_state(pbar, 0.1, 0.0, g).unwrap();
        let t = 200.0;
        let x0 = centroid(&currents::compute_current(&s).rho, &g);
        let x1 = centroid(&currents::compute_current(&evolve(&s, t)).rho, &g);
        let v = (x1 - x0) / t;
        let vg = pbar / energy(pbar);
        assert!((v / vg - 1.0).abs() < 0.01, "v={v} vg={vg}");
    }

    #[test]
    fn rejects_two_branch_states() {
        let g = SpectralGrid::new(256, 8.0).unwrap();
        let mut s = gaussian_state(0.0, 1.0, 0.0, g).unwrap();
        s.b[3] = num_complex::Complex64::new(1e-6, 0.0);
        assert!(matches!(time_of_flight(&s, 100.0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn rejects_off_centre_packets() {
        let g = SpectralGrid::new(256, 8.0).unwrap();
        let s = gaussian_state(0.0, 1.0, 5.0, g).unwrap();
        assert!(matches!(time_of_flight(&s, 100.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn relativistic_packet_tends_to_energy_weighted_spectrum() {
        let g = SpectralGrid::new(1024, 16.0).unwrap();
        let s = gaussian_state(0.0, 2.0, 0.0, g).unwrap();
        let r = time_of_flight_converged(&s, 50.0, DEFAULT_TOF_TOLERANCE, 1e5).unwrap();
        assert!(r.converged, "gap {}", r.convergence_gap);
        assert!((r.integral() - 1.0).abs() < 1e-3, "{}", r.integral());
        assert!(r.g.iter().all(|&v| v >= -1e-10));
        // stationary phase: g → E|a|² for the E-normalized state
        let expect: Vec<f64> = r
            .p
            .iter()
            .map(|&p| {
                let j = g.node_index(p, 1e-9).unwrap();
                energy(p) * s.a[j].norm_sqr()
            })
            .collect();
        let d = l1(&r.g, &expect, r.dp);
        assert!(d < 2.0 * r.convergence_gap.max(1e-3), "distance {d}");
    }
}
