//! Lorentz boosts of states and numerical checks that `(ρ, J)` is a 2-vector.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::currents::{BornEvaluator, CurrentEvaluator};
use crate::currents::lightcone_components;
use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::oracle::{oracle_current, PlaneWaveSet};
use crate::spectral::{energy, SpectralGrid};
use crate::state::{Branch, MomentumState};

pub const MAX_RAPIDITY: f64 = 2.0;

/// Amplitudes below this fraction of the peak may leave the grid under a boost.
const SIGNIFICANT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoostParams {
    pub eta: f64,
}

impl BoostParams {
    pub fn new(eta: f64) -> Self {
        Self { eta }
    }

    /// `[[cosh η, −sinh η], [−sinh η, cosh η]]`
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        let (c, s) = (self.eta.cosh(), self.eta.sinh());
        [[c, -s], [-s, c]]
    }

    /// Applies `Λ` to a column vector `(v⁰, v¹)`.
    pub fn apply(&self, v: (f64, f64)) -> (f64, f64) {
        let m = self.matrix();
        (m[0][0] * v.0 + m[0][1] * v.1, m[1][0] * v.0 + m[1][1] * v.1)
    }

    pub fn compose(&self, other: &BoostParams) -> BoostParams {
        BoostParams { eta: self.eta + other.eta }
    }
}

/// Spatial momentum of the boosted mode `(sE(q), q)`.
pub fn boosted_momentum(q: f64, branch: Branch, bp: &BoostParams) -> f64 {
    q * bp.eta.cosh() - branch.sign() * energy(q) * bp.eta.sinh()
}

/// The state seen from a frame moving with rapidity `η`, referenced to `t' = 0`.
///
/// Each branch is resampled as `a'(q') = a(q) E(q)/E(q')` with `q` the preimage
/// of the node `q'`, by monotone cubic interpolation of real and imaginary parts.
pub fn boost_state(state: &MomentumState, bp: &BoostParams) -> Result<MomentumState> {
    if !(bp.eta.abs() <= MAX_RAPIDITY) {
        return Err(Error::Domain(format!("rapidity must satisfy |η| <= {MAX_RAPIDITY}, got {}", bp.eta)));
    }
    let s0 = state.advanced(-state.t);
    let g = s0.grid;
    let inverse = BoostParams::new(-bp.eta);
    let peak = s0.a.iter().chain(&s0.b).map(|z| z.norm()).fold(0.0, f64::max);
    let edge = g.p_max - g.dp();
    let mut out = [Vec::new(), Vec::new()];
    for (slot, branch) in [Branch::Positive, Branch::Negative].into_iter().enumerate() {
        let amps = s0.branch(branch);
        for (j, z) in amps.iter().enumerate() {
            if z.norm() > SIGNIFICANT * peak {
                let q2 = boosted_momentum(g.p(j), branch, bp);
                if q2.abs() > edge {
                    return Err(Error::Resolution(format!(
                        "boost by η={} carries p={:.4} to {q2:.4}, beyond p_max={}; enlarge p_max",
                        bp.eta,
                        g.p(j),
                        g.p_max
                    )));
                }
            }
        }
        let re = MonotoneCubic::new(g.p(0), g.dp(), amps.iter().map(|z| z.re).collect());
        let im = MonotoneCubic::new(g.p(0), g.dp(), amps.iter().map(|z| z.im).collect());
        out[slot] = (0..g.n)
            .map(|j| {
                let q2 = g.p(j);
                let q = boosted_momentum(q2, branch, &inverse);
                Complex64::new(re.eval(q), im.eval(q)) * (energy(q) / energy(q2))
            })
            .collect();
    }
    let [a, b] = out;
    let boosted = MomentumState::new(g, a, b, 0.0)?;
    let (n0, n1) = (s0.norm(), boosted.norm());
    let drift = (n1 - n0).abs() / n0;
    if drift > 1e-4 {
        return Err(Error::Interpolation(format!("norm drifted by {drift:.3e} under the boost")));
    }
    if drift > 1e-6 {
        log::warn!("norm drifted by {drift:.3e} under the boost by η={}", bp.eta);
    }
    Ok(boosted)
}

/// A 2-vector field on space-time.
pub trait SpacetimeCurrent: Sync {
    fn current(&self, t: f64, x: f64) -> (f64, f64);
}

impl SpacetimeCurrent for MomentumState {
    fn current(&self, t: f64, x: f64) -> (f64, f64) {
        CurrentEvaluator::new(self, t).at(x)
    }
}

impl SpacetimeCurrent for PlaneWaveSet {
    fn current(&self, t: f64, x: f64) -> (f64, f64) {
        oracle_current(self, x, t)
    }
}

/// The Born pair `(|φ|², J_B)` of a state, unscaled.
pub struct BornPair<'a>(pub &'a MomentumState);

impl SpacetimeCurrent for BornPair<'_> {
    fn current(&self, t: f64, x: f64) -> (f64, f64) {
        BornEvaluator::new(self.0, t).map(|e| e.at(x)).unwrap_or((f64::NAN, f64::NAN))
    }
}

/// `max ‖J'(Λy) − Λ J(y)‖ / max ‖J(y)‖` over sample points `y = (t, x)`.
pub fn covariance_residual<A, B>(original: &A, boosted: &B, bp: &BoostParams, samples: &[(f64, f64)]) -> f64
where
    A: SpacetimeCurrent + ?Sized,
    B: SpacetimeCurrent + ?Sized,
{
    let rows: Vec<(f64, f64)> = samples
        .par_iter()
        .map(|&(t, x)| {
            let j = original.current(t, x);
            let (t2, x2) = bp.apply((t, x));
            let j2 = boosted.current(t2, x2);
            let lj = bp.apply(j);
            ((j2.0 - lj.0).hypot(j2.1 - lj.1), j.0.hypot(j.1))
        })
        .collect();
    let worst = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let scale = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    worst / scale
}

/// Space-time points near the origin used by default.
pub fn default_samples() -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &t in &[-1.0, 0.0, 1.5] {
        for &x in &[-2.0, -1.0, -0.5, 0.0, 0.3, 1.0, 2.5] {
            out.push((t, x));
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct CovarianceReport {
    pub eta: f64,
    /// `null` in JSON when the boost could not be resolved on the grid.
    pub residual: f64,
    pub n_points: usize,
    pub p_max: f64,
    pub resolved: bool,
}

/// Boosts `state` and measures the covariance residual of the current.
pub fn covariance_check(state: &MomentumState, bp: &BoostParams, samples: &[(f64, f64)]) -> Result<CovarianceReport> {
    let report = |residual, resolved| CovarianceReport {
        eta: bp.eta,
        residual,
        n_points: samples.len(),
        p_max: state.grid.p_max,
        resolved,
    };
    match boost_state(state, bp) {
        Ok(b) => Ok(report(covariance_residual(state, &b, bp, samples), true)),
        Err(Error::Resolution(msg)) | Err(Error::Interpolation(msg)) => {
            log::warn!("covariance check unresolved: {msg}");
            Ok(report(f64::NAN, false))
        }
        Err(e) => Err(e),
    }
}

/// On-shell 2-momentum `(sE(q), q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OnShell {
    pub q: f64,
    pub branch: Branch,
}

impl OnShell {
    pub fn new(q: f64, branch: Branch) -> Self {
        Self { q, branch }
    }

    pub fn p0(&self) -> f64 {
        self.branch.sign() * energy(self.q)
    }
}

const LIGHTLIKE_TOL: f64 = 1e-12;

/// `ξ/√((p+k)²)` with `ξ = ½(sgn p⁰ + sgn k⁰)`; `None` for a lightlike sum.
pub fn alpha_invariant(p: OnShell, k: OnShell) -> Option<f64> {
    let xi = 0.5 * (p.branch.sign() + k.branch.sign());
    let (pp, pm) = lightcone_components(p.branch, p.q);
    let (kp, km) = lightcone_components(k.branch, k.q);
    // (p+k)² = (p⁰+k⁰)² − (p¹+k¹)² = (p⁺+k⁺)(p⁻+k⁻), free of cancellation
    let (sp, sm) = (pp + kp, pm + km);
    let square = sp * sm;
    if square.abs() <= LIGHTLIKE_TOL * (sp * sp + sm * sm).max(1.0) {
        return None;
    }
    if xi == 0.0 {
        return Some(0.0);
    }
    Some(xi / square.sqrt())
}

/// Light-cone form `[√p^± (√k^±)* + c.c.] / (2(p^± + k^±))`; `use_plus`
/// selects `p⁺` or `p⁻`. `None` when the denominator vanishes.
pub fn alpha_lightcone(p: OnShell, k: OnShell, use_plus: bool) -> Option<f64> {
    let pick = |m: OnShell| {
        let (plus, minus) = lightcone_components(m.branch, m.q);
        if use_plus {
            plus
        } else {
            minus
        }
    };
    let (lp, lk) = (pick(p), pick(k));
    let den = lp + lk;
    if den.abs() <= LIGHTLIKE_TOL * (lp.abs() + lk.abs()) {
        return None;
    }
    let rp = Complex64::new(lp, 0.0).sqrt();
    let rk = Complex64::new(lk, 0.0).sqrt();
    let num = rp * rk.conj();
    Some((num + num.conj()).re / (2.0 * den))
}

#[derive(Debug, Clone, Serialize)]
pub struct AlphaReport {
    pub pairs: usize,
    /// Pairs left out because `(p+k)² ≈ 0` or `p^± + k^± ≈ 0`.
    pub excluded: usize,
    /// `max |α_inv − α_lc(p⁺)|`
    pub max_discrepancy: f64,
    /// `max |α_lc(p⁺) − α_lc(p⁻)|`
    pub max_form_discrepancy: f64,
}

/// Compares both expressions for `α` over all ordered pairs of `modes`.
pub fn alpha_equivalence(modes: &[OnShell]) -> AlphaReport {
    let mut rep = AlphaReport { pairs: 0, excluded: 0, max_discrepancy: 0.0, max_form_discrepancy: 0.0 };
    for &p in modes {
        for &k in modes {
            match (alpha_invariant(p, k), alpha_lightcone(p, k, true), alpha_lightcone(p, k, false)) {
                (Some(ainv), Some(ap), Some(am)) => {
                    rep.pairs += 1;
                    rep.max_discrepancy = rep.max_discrepancy.max((ainv - ap).abs());
                    rep.max_form_discrepancy = rep.max_form_discrepancy.max((ap - am).abs());
                }
                _ => rep.excluded += 1,
            }
        }
    }
    rep
}

/// Time component of the kernel `u^μ(p,k) = α(p,k)(p+k)^μ` at `k = p`, returned
/// together with `γ = 1/√(1 − v²)` at `v = p/E` for comparison.
pub fn diagonal_kernel_and_gamma(q: f64) -> (f64, f64) {
    let p = OnShell::new(q, Branch::Positive);
    let u0 = alpha_invariant(p, p).unwrap_or(f64::NAN) * 2.0 * p.p0();
    let v = q / energy(q);
    (u0, 1.0 / (1.0 - v * v).sqrt())
}

/// Largest `|E'² − p'² − 1|` over the grid's nodes after boosting by `bp`.
pub fn shell_defect(grid: &SpectralGrid, bp: &BoostParams) -> f64 {
    grid.momenta()
        .into_iter()
        .map(|q| {
            let (e2, q2) = bp.apply((energy(q), q));
            ((e2 - q2) * (e2 + q2) - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::PlaneWave;
    use crate::state::gaussian_state;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lorentz_matrix_properties() {
        let g = SpectralGrid::new(256, 30.0).unwrap();
        for &eta in &[0.0, 0.3, -1.1, 2.0] {
            let bp = BoostParams::new(eta);
            let m = bp.matrix();
            assert!((m[0][0] * m[1][1] - m[0][1] * m[1][0] - 1.0).abs() < 1e-13);
            assert!(shell_defect(&g, &bp) < 1e-13 * energy(30.0).powi(2) * eta.cosh().powi(2));
        }
        let (a, b) = (BoostParams::new(0.4), BoostParams::new(-0.9));
        let v = (2.0, 0.7);
        let (x, y) = (a.apply(b.apply(v)), a.compose(&b).apply(v));
        assert!((x.0 - y.0).abs() < 1e-14 && (x.1 - y.1).abs() < 1e-14);
    }

    #[test]
    fn zero_rapidity_is_identity() {
        let g = SpectralGrid::new(512, 16.0).unwrap();
        let s = gaussian_state(0.3, 1.0, 0.2, g).unwrap();
        let b = boost_state(&s, &BoostParams::new(0.0)).unwrap();
        for j in 0..g.n {
            assert!((b.a[j] - s.a[j]).norm() < 1e-12);
        }
        assert!(covariance_residual(&s, &b, &BoostParams::new(0.0), &default_samples()) < 1e-12);
    }

    #[test]
    fn rest_mode_boost_kinematics() {
        let eta: f64 = 0.65;
        let pw = PlaneWaveSet::new(vec![PlaneWave { amp: Complex64::new(1.0, 0.0), q: 0.0, branch: Branch::Positive }])
            .unwrap();
        let m = pw.boosted(eta).modes()[0];
        assert!((m.q + eta.sinh()).abs() < 1e-15);
        // continuum amplitude ratio E/E'
        assert!((energy(0.0) / energy(m.q) - 1.0 / eta.cosh()).abs() < 1e-15);
        assert!((boosted_momentum(0.0, Branch::Positive, &BoostParams::new(eta)) - m.q).abs() < 1e-15);
    }

    #[test]
    fn plane_waves_are_exactly_covariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = SpectralGrid::new(64, 8.0).unwrap();
        for &eta in &[0.1, 0.5, 1.0, -1.7] {
            let bp = BoostParams::new(eta);
            for _ in 0..5 {
                let pw = PlaneWaveSet::random_on_grid(&mut rng, 1, &g, true).unwrap();
                let r = covariance_residual(&pw, &pw.boosted(eta), &bp, &default_samples());
                assert!(r < 1e-12, "{r}");
            }
            let pw = PlaneWaveSet::random_on_grid(&mut rng, 6, &g, true).unwrap();
            assert!(covariance_residual(&pw, &pw.boosted(eta), &bp, &default_samples()) < 1e-12);
        }
    }

    #[test]
    fn boosted_gaussian_matches_closed_form_amplitudes() {
        let g = SpectralGrid::new(4096, 16.0).unwrap();
        let s = gaussian_state(0.0, 1.0, 0.0, g).unwrap();
        let bp = BoostParams::new(0.5);
        let b = boost_state(&s, &bp).unwrap();
        let c = s.a[g.n / 2].re;
        let inv = BoostParams::new(-0.5);
        let mut worst: f64 = 0.0;
        for j in 0..g.n {
            let q2 = g.p(j);
            let q = boosted_momentum(q2, Branch::Positive, &inv);
            let exact = c * (-q * q).exp() * energy(q) / energy(q2);
            worst = worst.max((b.a[j].re - exact).abs());
        }
        assert!(worst < 1e-5 * c, "{}", worst / c);
        assert!((b.norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn overflowing_boost_is_a_resolution_error() {
        let g = SpectralGrid::new(256, 8.0).unwrap();
        let s = gaussian_state(0.0, 1.0, 0.0, g).unwrap();
        assert!(matches!(boost_state(&s, &BoostParams::new(1.9)), Err(Error::Resolution(_))));
        assert!(matches!(boost_state(&s, &BoostParams::new(2.5)), Err(Error::Domain(_))));
        let rep = covariance_check(&s, &BoostParams::new(1.9), &default_samples()).unwrap();
        assert!(!rep.resolved);
        assert!(serde_json::to_string(&rep).unwrap().contains("\"residual\":null"));
    }

    #[test]
    fn boosts_compose() {
        let g = SpectralGrid::new(4096, 16.0).unwrap();
        let s = gaussian_state(0.0, 1.0, 0.0, g).unwrap();
        let (b1, b2) = (BoostParams::new(0.3), BoostParams::new(0.4));
        let two = boost_state(&boost_state(&s, &b1).unwrap(), &b2).unwrap();
        let one = boost_state(&s, &b1.compose(&b2)).unwrap();
        let c = s.a[g.n / 2].re;
        let err = |eta: f64| {
            let b = boost_state(&s, &BoostParams::new(eta)).unwrap();
            let inv = BoostParams::new(-eta);
            (0..g.n)
                .map(|j| {
                    let q = boosted_momentum(g.p(j), Branch::Positive, &inv);
                    (b.a[j].re - c * (-q * q).exp() * energy(q) / energy(g.p(j))).abs()
                })
                .fold(0.0, f64::max)
        };
        let single_err = err(0.3).max(err(0.4)).max(err(0.7));
        let diff = (0..g.n).map(|j| (two.a[j] - one.a[j]).norm()).fold(0.0, f64::max);
        assert!(diff <= 2.0 * single_err.max(1e-15) + 1e-12, "{diff} vs {single_err}");
    }

    #[test]
    fn alpha_forms_agree() {
        let p = OnShell::new(1.3, Branch::Positive);
        assert!((alpha_invariant(p, p).unwrap() - 0.5).abs() < 1e-13);
        assert!((alpha_lightcone(p, p, true).unwrap() - 0.5).abs() < 1e-13);
        let k = OnShell::new(-0.4, Branch::Negative);
        assert_eq!(alpha_invariant(p, k), Some(0.0));
        assert!(alpha_lightcone(p, k, true).unwrap().abs() < 1e-15);
        assert!(alpha_lightcone(p, k, false).unwrap().abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let modes: Vec<OnShell> =
            (0..100).map(|_| OnShell::new(rng.gen_range(-20.0..20.0), Branch::Positive)).collect();
        let rep = alpha_equivalence(&modes);
        assert_eq!(rep.excluded, 0);
        assert!(rep.max_discrepancy < 1e-12 && rep.max_form_discrepancy < 1e-12, "{rep:?}");
    }

    #[test]
    fn lightlike_mixed_pairs_are_excluded() {
        // opposite branches at opposite momenta sum to the zero vector
        let p = OnShell::new(0.8, Branch::Positive);
        let k = OnShell::new(-0.8, Branch::Negative);
        assert_eq!(alpha_invariant(p, k), None);
        let rep = alpha_equivalence(&[p, k]);
        assert_eq!(rep.excluded, 2);
        assert_eq!(rep.pairs, 2);
    }

    #[test]
    fn diagonal_kernel_is_lorentz_factor() {
        for &q in &[0.0, 0.5, -3.0, 40.0] {
            let (u0, gamma) = diagonal_kernel_and_gamma(q);
            assert!((u0 - energy(q)).abs() < 1e-13 * energy(q));
            assert!((u0 - gamma).abs() < 1e-12 * gamma);
        }
    }
}
