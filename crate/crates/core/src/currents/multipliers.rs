use num_complex::Complex64;

use crate::spectral::{energy, lightcone, SpectralGrid};
use crate::state::Branch;

/// Light-cone components `p⁺ = sE + p`, `p⁻ = sE − p` of the on-shell
/// 2-momentum `(sE, p)`, computed without cancellation.
#[inline]
pub fn lightcone_components(branch: Branch, p: f64) -> (f64, f64) {
    let (ep, em) = lightcone(p);
    match branch {
        Branch::Positive => (ep, em),
        Branch::Negative => (-em, -ep),
    }
}

/// Coefficients `(√(p⁺/4m), √(p⁻/4m))` of the coherent sums, principal root.
///
/// For the negative branch both light-cone components are negative and the
/// roots are purely imaginary.
#[inline]
pub fn coherent_coefficients(branch: Branch, p: f64) -> (Complex64, Complex64) {
    let (pp, pm) = lightcone_components(branch, p);
    (Complex64::new(pp / 4.0, 0.0).sqrt(), Complex64::new(pm / 4.0, 0.0).sqrt())
}

/// Spatial Fourier multiplier of `D^±`: `√((E ± p)/2m)`.
#[inline]
pub fn d_multiplier(operator_sign: i32, p: f64) -> f64 {
    let (ep, em) = lightcone(p);
    if operator_sign >= 0 {
        (ep / 2.0).sqrt()
    } else {
        (em / 2.0).sqrt()
    }
}

/// Tabulated `w_plus(s,p) = √((E + s·p)/2m)` and `w_minus(s,p) = √((E − s·p)/2m)`
/// for both branches on every node of a grid.
#[derive(Debug, Clone)]
pub struct BranchMultipliers {
    pub grid: SpectralGrid,
    /// `[positive branch, negative branch]`
    pub w_plus: [Vec<f64>; 2],
    pub w_minus: [Vec<f64>; 2],
}

/// Largest deviations from the algebraic identities the multipliers obey.
#[derive(Debug, Clone, Copy, Default)]
pub struct MultiplierDefects {
    /// `max |w₊² + w₋² − E|`
    pub sum: f64,
    /// `max |w₊ w₋ − ½|`
    pub product: f64,
    /// `max |w₊(+,p)/w₋(+,p) − (E + p)|`
    pub ratio: f64,
}

impl BranchMultipliers {
    pub fn new(grid: SpectralGrid) -> Self {
        let mut w_plus = [Vec::with_capacity(grid.n), Vec::with_capacity(grid.n)];
        let mut w_minus = [Vec::with_capacity(grid.n), Vec::with_capacity(grid.n)];
        for p in grid.momenta() {
            let (ep, em) = lightcone(p);
            let (up, dn) = ((ep / 2.0).sqrt(), (em / 2.0).sqrt());
            w_plus[0].push(up);
            w_minus[0].push(dn);
            // s = −1 swaps the roles of E + p and E − p
            w_plus[1].push(dn);
            w_minus[1].push(up);
        }
        Self { grid, w_plus, w_minus }
    }

    pub fn defects(&self) -> MultiplierDefects {
        let mut d = MultiplierDefects::default();
        for (j, p) in self.grid.momenta().into_iter().enumerate() {
            let e = energy(p);
            for s in 0..2 {
                let (up, dn) = (self.w_plus[s][j], self.w_minus[s][j]);
                d.sum = d.sum.max((up * up + dn * dn - e).abs());
                d.product = d.product.max((up * dn - 0.5).abs());
            }
            let ratio = self.w_plus[0][j] / self.w_minus[0][j];
            let (ep, _) = lightcone(p);
            d.ratio = d.ratio.max((ratio - ep).abs());
        }
        d
    }
}
