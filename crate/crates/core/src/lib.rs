pub mod config;
pub mod covariance;
pub mod currents;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod interp;
pub mod io;
pub mod oracle;
pub mod spectral;
pub mod state;
pub mod verify;

pub use error::{Error, Result};
