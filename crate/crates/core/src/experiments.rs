//! The figure-data runs behind the command-line subcommands.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, DEFAULT_T_BUDGET};
use crate::currents::{chi, compute_current, kg_zero_component};
use crate::dynamics::{time_of_flight_converged, TofResult, DEFAULT_TOF_TOLERANCE};
use crate::error::{Error, Result};
use crate::io::{sidecar_path, write_csv, write_json};
use crate::oracle::{delta_sequence, DeltaSeqResult};
use crate::spectral::{self, SpectralGrid};
use crate::state::gaussian_state;

#[derive(Debug, Clone, Serialize)]
pub struct DensityProfile {
    pub grid: SpectralGrid,
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    /// `|φ|²` scaled to unit integral.
    pub rho_born: Vec<f64>,
    pub j0_kg: Vec<f64>,
}

impl DensityProfile {
    pub fn min_rho(&self) -> f64 {
        self.rho.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn min_j0_kg(&self) -> f64 {
        self.j0_kg.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `max |ρ − ρ_B| / max ρ`
    pub fn born_gap(&self) -> f64 {
        let peak = self.rho.iter().cloned().fold(0.0, f64::max);
        self.rho.iter().zip(&self.rho_born).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / peak
    }
}

/// Densities of the Gaussian packet on the position lattice at `t = 0`.
pub fn density_profile(sigma_p: f64, pbar: f64, grid: SpectralGrid) -> Result<DensityProfile> {
    let s = gaussian_state(pbar, sigma_p, 0.0, grid)?;
    let cur = compute_current(&s);
    let phi = spectral::inverse_raw(&s.phi_amplitudes(s.t), &grid);
    let z = s.born_norm();
    Ok(DensityProfile {
        grid,
        x: grid.positions(),
        rho: cur.rho,
        rho_born: phi.iter().map(|f| f.norm_sqr() / z).collect(),
        j0_kg: kg_zero_component(&s),
    })
}

/// `points` log-spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Usage(format!("need 0 < sigma_min < sigma_max, got {lo} and {hi}")));
    }
    if points < 2 {
        return Err(Error::Usage(format!("a sweep needs at least 2 points, got {points}")));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..points)
        .map(|i| match i {
            0 => lo,
            _ if i == points - 1 => hi,
            _ => (a + (b - a) * i as f64 / (points - 1) as f64).exp(),
        })
        .collect())
}

/// `χ` for each width; each packet gets its own default grid unless `grid` is given.
pub fn chi_sweep(sigmas: &[f64], pbar: f64, grid: Option<SpectralGrid>) -> Result<Vec<f64>> {
    sigmas
        .par_iter()
        .map(|&s| {
            let g = match grid {
                Some(g) => g,
                None => SpectralGrid::for_gaussian(s, pbar)?,
            };
            Ok(chi(&gaussian_state(pbar, s, 0.0, g)?))
        })
        .collect()
}

/// First flight time tried by the doubling search.
pub fn default_t_start(sigma_p: f64) -> f64 {
    (20.0 / sigma_p).max(10.0)
}

pub fn tof_run(sigma_p: f64, pbar: f64, grid: SpectralGrid, cfg: &ExperimentConfig) -> Result<TofResult> {
    let s = gaussian_state(pbar, sigma_p, 0.0, grid)?;
    time_of_flight_converged(
        &s,
        cfg.t_start.unwrap_or_else(|| default_t_start(sigma_p)),
        cfg.tolerance.unwrap_or(DEFAULT_TOF_TOLERANCE),
        cfg.t_budget.unwrap_or(DEFAULT_T_BUDGET),
    )
}

/// Grid wide enough for every member of `n_list`: `p_max = 8·max n`, box length about 100.
pub fn delta_grid(n_list: &[u32]) -> Result<SpectralGrid> {
    let top = n_list.iter().copied().max().unwrap_or(1).max(1) as f64;
    let p_max = 8.0 * top;
    let n = ((100.0 * p_max / std::f64::consts::PI).ceil() as usize).next_power_of_two().max(16);
    SpectralGrid::new(n, p_max)
}

pub fn delta_run(n_list: &[u32], a: f64, grid: SpectralGrid) -> Result<Vec<DeltaSeqResult>> {
    if n_list.is_empty() {
        return Err(Error::Usage("--n-list is empty".into()));
    }
    n_list.par_iter().map(|&n| delta_sequence(n, a, grid)).collect()
}

#[derive(Serialize)]
struct Meta<'a, T: Serialize> {
    command: &'a str,
    version: &'a str,
    config: &'a ExperimentConfig,
    grid: Option<SpectralGrid>,
    summary: T,
}

fn meta<T: Serialize>(path: &Path, command: &str, cfg: &ExperimentConfig, grid: Option<SpectralGrid>, summary: T) -> Result<()> {
    write_json(
        &sidecar_path(path),
        &Meta { command, version: env!("CARGO_PKG_VERSION"), config: cfg, grid, summary },
    )
}

pub fn write_density(path: &Path, prof: &DensityProfile, cfg: &ExperimentConfig) -> Result<()> {
    write_csv(path, &["x", "rho", "rho_born", "j0_kg"], &[&prof.x, &prof.rho, &prof.rho_born, &prof.j0_kg])?;
    #[derive(Serialize)]
    struct S {
        min_rho: f64,
        min_j0_kg: f64,
        max_rho_minus_born_rel: f64,
    }
    let s = S { min_rho: prof.min_rho(), min_j0_kg: prof.min_j0_kg(), max_rho_minus_born_rel: prof.born_gap() };
    meta(path, "density", cfg, Some(prof.grid), s)
}

pub fn write_chi(path: &Path, sigmas: &[f64], chis: &[f64], cfg: &ExperimentConfig) -> Result<()> {
    write_csv(path, &["sigma_p", "chi"], &[sigmas, chis])?;
    let monotone = chis.windows(2).all(|w| w[1] > w[0]);
    meta(path, "chi-sweep", cfg, cfg.explicit_grid()?, serde_json::json!({ "monotone": monotone }))
}

pub fn write_tof(path: &Path, r: &TofResult, grid: SpectralGrid, cfg: &ExperimentConfig) -> Result<()> {
    write_csv(path, &["p", "g", "born_g"], &[&r.p, &r.g, &r.born_g])?;
    let s = serde_json::json!({
        "t_final": r.t_final,
        "convergence_gap": r.convergence_gap,
        "converged": r.converged,
        "integral": r.integral(),
        "l1_to_born": r.born_distance(),
    });
    meta(path, "tof", cfg, Some(grid), s)
}

/// Writes `delta_n{n}.csv` (`x,rho_n`) and `delta_n{n}_R.csv` (`p,R_n`) per member into `dir`.
pub fn write_delta(dir: &Path, results: &[DeltaSeqResult], grid: SpectralGrid, cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for r in results {
        let rho = dir.join(format!("delta_n{}.csv", r.n));
        let rn = dir.join(format!("delta_n{}_R.csv", r.n));
        write_csv(&rho, &["x", "rho_n"], &[&r.x, &r.rho_n])?;
        write_csv(&rn, &["p", "R_n"], &[&r.r_p, &r.r_n])?;
        files.push(rho);
        files.push(rn);
    }
    #[derive(Serialize)]
    struct Row {
        n: u32,
        integral: f64,
        width: f64,
        max_r_deviation_2: f64,
    }
    let rows: Vec<Row> = results
        .iter()
        .map(|r| Row { n: r.n, integral: r.integral, width: r.width, max_r_deviation_2: r.r_deviation(2.0) })
        .collect();
    let summary_path = dir.join("delta_summary.json");
    write_json(
        &summary_path,
        &Meta { command: "delta", version: env!("CARGO_PKG_VERSION"), config: cfg, grid: Some(grid), summary: rows },
    )?;
    files.push(summary_path);
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_space_endpoints_and_errors() {
        let s = log_space(0.01, 100.0, 5).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!((s[0], s[4]), (0.01, 100.0));
        assert!((s[2] - 1.0).abs() < 1e-12);
        assert!(matches!(log_space(1.0, 0.5, 4), Err(Error::Usage(_))));
        assert!(matches!(log_space(0.0, 1.0, 4), Err(Error::Usage(_))));
        assert!(matches!(log_space(0.1, 1.0, 1), Err(Error::Usage(_))));
    }

    #[test]
    fn narrow_packet_density_matches_born() {
        let g = SpectralGrid::for_gaussian(0.01, 0.0).unwrap();
        let prof = density_profile(0.01, 0.0, g).unwrap();
        assert_eq!(prof.x.len(), g.n);
        assert!(prof.born_gap() < 1e-4);
    }

    #[test]
    fn chi_increases_with_width() {
        let chis = chi_sweep(&[0.01, 0.1, 1.0, 10.0], 0.0, None).unwrap();
        assert!(chis.windows(2).all(|w| w[1] > w[0]), "{chis:?}");
        assert!(chis[0] < 1e-4 && chis[1] < 0.01);
    }

    #[test]
    fn delta_grid_covers_largest_member() {
        let g = delta_grid(&[1, 2, 4, 8, 16]).unwrap();
        assert_eq!((g.n, g.p_max), (4096, 128.0));
    }
}
