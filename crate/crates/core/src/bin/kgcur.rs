use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kgcur::config::ExperimentConfig;
use kgcur::experiments::{self, chi_sweep, delta_grid, delta_run, density_profile, log_space, tof_run};
use kgcur::{verify, Error};

const EXIT_USAGE: u8 = 2;
const EXIT_RESOLUTION: u8 = 3;
const EXIT_PROPERTY: u8 = 4;

/// Positive conserved current for free Klein-Gordon particles in 1+1 dimensions.
#[derive(Parser)]
#[command(name = "kgcur", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON config; flags given here take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of lattice points (power of two, at least 16).
    #[arg(long)]
    grid_n: Option<usize>,
    #[arg(long)]
    p_max: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Densities of a Gaussian packet: x,rho,rho_born,j0_kg.
    Density {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sigma_p: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        pbar: Option<f64>,
    },
    /// Deviation from the Born density over log-spaced widths: sigma_p,chi.
    ChiSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sigma_min: Option<f64>,
        #[arg(long)]
        sigma_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        pbar: Option<f64>,
    },
    /// Time-of-flight momentum density: p,g,born_g.
    Tof {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sigma_p: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        pbar: Option<f64>,
        /// Largest flight time tried.
        #[arg(long)]
        t_budget: Option<f64>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Localizing sequence: one x,rho_n and one p,R_n file per n.
    Delta {
        #[command(flatten)]
        common: Common,
        /// Comma-separated scales, e.g. 1,2,4,8,16.
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<u32>>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
    },
    /// Property suite with a JSON report; exit status 4 if any property fails.
    Verify {
        #[command(flatten)]
        common: Common,
    },
}

fn layered(common: &Common, flags: ExperimentConfig) -> kgcur::Result<ExperimentConfig> {
    let flags = ExperimentConfig {
        out: common.out.clone(),
        seed: common.seed,
        grid_n: common.grid_n,
        p_max: common.p_max,
        ..flags
    };
    match &common.config {
        Some(path) => Ok(flags.over(ExperimentConfig::from_file(path)?)),
        None => Ok(flags),
    }
}

/// Fills unset fields with the values actually used, for the sidecar metadata.
fn resolved(cfg: ExperimentConfig, grid: kgcur::spectral::SpectralGrid, defaults: ExperimentConfig) -> ExperimentConfig {
    let with_grid = ExperimentConfig { grid_n: Some(grid.n), p_max: Some(grid.p_max), ..defaults };
    cfg.over(with_grid)
}

fn out_path(cfg: &ExperimentConfig, default: &str) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

fn run(cmd: Command) -> kgcur::Result<u8> {
    match cmd {
        Command::Density { common, sigma_p, pbar } => {
            let cfg = layered(&common, ExperimentConfig { sigma_p, pbar, ..Default::default() })?;
            let (s, p) = (cfg.sigma_p.unwrap_or(1.0), cfg.pbar.unwrap_or(0.0));
            let grid = cfg.gaussian_grid(s, p)?;
            let cfg = resolved(cfg, grid, ExperimentConfig { sigma_p: Some(s), pbar: Some(p), ..Default::default() });
            let prof = density_profile(s, p, grid)?;
            let path = out_path(&cfg, "density.csv");
            experiments::write_density(&path, &prof, &cfg)?;
            println!("wrote {} ({} rows, min rho {:.3e}, min j0_kg {:.3e})", path.display(), prof.x.len(), prof.min_rho(), prof.min_j0_kg());
            Ok(0)
        }
        Command::ChiSweep { common, sigma_min, sigma_max, points, pbar } => {
            let cfg = layered(&common, ExperimentConfig { sigma_min, sigma_max, points, pbar, ..Default::default() })?;
            let cfg = ExperimentConfig {
                sigma_min: Some(cfg.sigma_min.unwrap_or(0.01)),
                sigma_max: Some(cfg.sigma_max.unwrap_or(100.0)),
                points: Some(cfg.points.unwrap_or(17)),
                pbar: Some(cfg.pbar.unwrap_or(0.0)),
                ..cfg
            };
            let sigmas = log_space(cfg.sigma_min.unwrap_or_default(), cfg.sigma_max.unwrap_or_default(), cfg.points.unwrap_or_default())?;
            let chis = chi_sweep(&sigmas, cfg.pbar.unwrap_or(0.0), cfg.explicit_grid()?)?;
            let path = out_path(&cfg, "chi.csv");
            experiments::write_chi(&path, &sigmas, &chis, &cfg)?;
            println!("wrote {} ({} points)", path.display(), sigmas.len());
            Ok(0)
        }
        Command::Tof { common, sigma_p, pbar, t_budget, tolerance } => {
            let cfg = layered(&common, ExperimentConfig { sigma_p, pbar, t_budget, tolerance, ..Default::default() })?;
            let (s, p) = (cfg.sigma_p.unwrap_or(2.0), cfg.pbar.unwrap_or(0.0));
            let grid = cfg.gaussian_grid(s, p)?;
            let defaults = ExperimentConfig {
                sigma_p: Some(s),
                pbar: Some(p),
                t_start: Some(experiments::default_t_start(s)),
                t_budget: Some(kgcur::config::DEFAULT_T_BUDGET),
                tolerance: Some(kgcur::dynamics::DEFAULT_TOF_TOLERANCE),
                ..Default::default()
            };
            let cfg = resolved(cfg, grid, defaults);
            let r = tof_run(s, p, grid, &cfg)?;
            let path = out_path(&cfg, "tof.csv");
            experiments::write_tof(&path, &r, grid, &cfg)?;
            println!(
                "wrote {} (t = {:.3e}, gap {:.3e}, integral {:.6}, L1 to Born {:.4e})",
                path.display(),
                r.t_final,
                r.convergence_gap,
                r.integral(),
                r.born_distance()
            );
            if r.converged {
                Ok(0)
            } else {
                eprintln!("error: time-of-flight did not converge within the budget (gap {:.3e})", r.convergence_gap);
                Ok(EXIT_RESOLUTION)
            }
        }
        Command::Delta { common, n_list, a } => {
            let cfg = layered(&common, ExperimentConfig { n_list, a, ..Default::default() })?;
            let ns = cfg.n_list.clone().unwrap_or_else(|| vec![1, 2, 4, 8, 16]);
            let grid = cfg.grid_or(delta_grid(&ns)?)?;
            let a = cfg.a.unwrap_or(0.0);
            let cfg = resolved(cfg, grid, ExperimentConfig { n_list: Some(ns.clone()), a: Some(a), ..Default::default() });
            let results = delta_run(&ns, a, grid)?;
            let dir = out_path(&cfg, "delta");
            let files = experiments::write_delta(&dir, &results, grid, &cfg)?;
            for r in &results {
                println!("n = {:>3}: integral {:.12}, FWHM {:.6}, max|R_n − 1| on [−2,2] {:.4e}", r.n, r.integral, r.width, r.r_deviation(2.0));
            }
            println!("wrote {} files under {}", files.len(), dir.display());
            Ok(0)
        }
        Command::Verify { common } => {
            let cfg = layered(&common, ExperimentConfig::default())?;
            let report = verify::run_suite(cfg.seed());
            match &cfg.out {
                Some(path) => kgcur::io::write_json(path, &report)?,
                None => println!("{}", serde_json::to_string_pretty(&report)?),
            }
            for p in report.failures() {
                eprintln!("FAILED {}: measured {:.6e}, bound {:?} {:.3e} ({})", p.name, p.measured, p.bound, p.threshold, p.detail);
            }
            Ok(if report.passed { 0 } else { EXIT_PROPERTY })
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Resolution(_) | Error::NonConvergence(_) | Error::Interpolation(_) => EXIT_RESOLUTION,
        Error::Io(_) | Error::Json(_) => 1,
        _ => EXIT_USAGE,
    }
}

fn threads_from_env() -> Result<(), String> {
    let Ok(raw) = std::env::var("KGCUR_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().map_err(|_| format!("KGCUR_THREADS must be a positive integer, got {raw:?}"))?;
    if n == 0 {
        return Err("KGCUR_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(msg) = threads_from_env() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
