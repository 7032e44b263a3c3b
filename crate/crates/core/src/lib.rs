//! Coalition-game clustering for vehicular ad-hoc networks.
//!
//! - [`net`]: node placement, mobility, LOS channel and the capacity graph
//! - [`objective`]: coalition values and the normalised global objective
//! - [`game`]: operations, gains, the distributed coalition algorithm
//! - [`baselines`]: lowest-ID bootstrap, unilateral-switch dynamics, merge/split/transfer
//! - [`oracle`]: exhaustive enumeration and independent stability checks
//! - [`bench`]: seeded multi-run experiments and their output files

pub mod baselines;
pub mod bench;
pub mod config;
pub mod error;
pub mod game;
pub mod net;
pub mod objective;
pub mod oracle;

pub use config::{Algorithm, InitMode, SimConfig};
pub use error::{Error, Result};
