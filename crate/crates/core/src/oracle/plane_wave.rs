use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{energy, SpectralGrid};
use crate::state::{Branch, MomentumState};

pub const MAX_MODES: usize = 64;

/// One on-shell mode `A e^{i(qx − sEt)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneWave {
    pub amp: Complex64,
    pub q: f64,
    pub branch: Branch,
}

impl PlaneWave {
    /// Time component `sE(q)` of the 2-momentum.
    pub fn p0(&self) -> f64 {
        self.branch.sign() * energy(self.q)
    }
}

/// A finite superposition of plane waves.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlaneWaveSet {
    modes: Vec<PlaneWave>,
}

impl PlaneWaveSet {
    pub fn new(modes: Vec<PlaneWave>) -> Result<Self> {
        if modes.is_empty() || modes.len() > MAX_MODES {
            return Err(Error::Contract(format!(
                "a plane-wave set holds 1..={MAX_MODES} modes, got {}",
                modes.len()
            )));
        }
        if modes.iter().any(|m| !m.q.is_finite() || !m.amp.re.is_finite() || !m.amp.im.is_finite()) {
            return Err(Error::Domain("plane-wave modes must be finite".into()));
        }
        Ok(Self { modes })
    }

    pub fn modes(&self) -> &[PlaneWave] {
        &self.modes
    }

    /// `k` modes on nodes of `grid` with `|q| ≤ p_max/2`, random complex
    /// amplitudes and (if `mixed`) random frequency signs.
    pub fn random_on_grid<R: Rng>(rng: &mut R, k: usize, grid: &SpectralGrid, mixed: bool) -> Result<Self> {
        let lo = grid.n / 4;
        let hi = 3 * grid.n / 4;
        let modes = (0..k)
            .map(|_| {
                let j = rng.gen_range(lo..=hi);
                let branch = if mixed && rng.gen_bool(0.5) { Branch::Negative } else { Branch::Positive };
                let amp = Complex64::from_polar(rng.gen_range(0.2..1.0), rng.gen_range(0.0..2.0 * PI));
                PlaneWave { amp, q: grid.p(j), branch }
            })
            .collect();
        Self::new(modes)
    }

    /// The same field seen from a frame boosted by rapidity `eta`: each
    /// 2-momentum is mapped by `Λ`, amplitudes are unchanged (scalar field).
    pub fn boosted(&self, eta: f64) -> Self {
        let (ch, sh) = (eta.cosh(), eta.sinh());
        let modes = self
            .modes
            .iter()
            .map(|m| PlaneWave { amp: m.amp, q: m.q * ch - m.p0() * sh, branch: m.branch })
            .collect();
        Self { modes }
    }

    /// Lattice state with delta amplitudes `√(2π)/Δp · A` at each mode's node.
    pub fn to_state(&self, grid: SpectralGrid) -> Result<MomentumState> {
        let zero = Complex64::new(0.0, 0.0);
        let mut a = vec![zero; grid.n];
        let mut b = vec![zero; grid.n];
        let w = (2.0 * PI).sqrt() / grid.dp();
        for m in &self.modes {
            let j = grid.node_index(m.q, 1e-9 * grid.dp()).ok_or_else(|| {
                Error::Precondition(format!("mode momentum {} is not a node of the grid", m.q))
            })?;
            match m.branch {
                Branch::Positive => a[j] += m.amp * w,
                Branch::Negative => b[j] += m.amp * w,
            }
        }
        MomentumState::new(grid, a, b, 0.0)
    }
}

/// `(ρ, J)` at `(t, x)` from the four squared coherent sums, evaluated term by
/// term with coefficients `√(p±/4)`, `p± = p⁰ ± q`.
pub fn oracle_current(pw: &PlaneWaveSet, x: f64, t: f64) -> (f64, f64) {
    let mut s = [Complex64::new(0.0, 0.0); 4];
    for m in pw.modes() {
        let p0 = m.p0();
        let cp = Complex64::new((p0 + m.q) / 4.0, 0.0).sqrt();
        let cm = Complex64::new((p0 - m.q) / 4.0, 0.0).sqrt();
        let wave = m.amp * Complex64::cis(m.q * x - p0 * t);
        s[0] += cp * wave;
        s[1] += cp.conj() * wave;
        s[2] += cm * wave;
        s[3] += cm.conj() * wave;
    }
    let n = s.map(|z| z.norm_sqr());
    (n[0] + n[1] + n[2] + n[3], n[0] + n[1] - n[2] - n[3])
}

/// Largest discrepancy between the lattice current of the mode set (evolved
/// to `t`) and [`oracle_current`] over all lattice points, relative to the
/// largest oracle density.
pub fn oracle_vs_spectral(pw: &PlaneWaveSet, grid: SpectralGrid, t: f64) -> Result<f64> {
    let state = pw.to_state(grid)?.advanced(t);
    let cur = crate::currents::compute_current(&state);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for k in 0..grid.n {
        let (rho, j) = oracle_current(pw, grid.x(k), t);
        scale = scale.max(rho);
        worst = worst.max((cur.rho[k] - rho).abs()).max((cur.j[k] - j).abs());
    }
    Ok(worst / scale)
}
