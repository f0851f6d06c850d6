//! Closed-form references: plane-wave currents and the localizing sequence.

mod delta;
mod plane_wave;

pub use delta::{delta_sequence, delta_state, f_unit, g1, g2, gamma, r_n, s_pm, DeltaSeqResult, R_N_RANGE};
pub use plane_wave::{oracle_current, oracle_vs_spectral, PlaneWave, PlaneWaveSet, MAX_MODES};
