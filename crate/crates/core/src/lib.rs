//! Artificial-noise-aided secure SWIPT beamforming for a two-tier
//! heterogeneous network.
//!
//! The crate maximises the secrecy rate of a femtocell information receiver
//! subject to macro-user SINR targets, a total power budget and per-receiver
//! energy-harvesting thresholds, by successive convex approximation over a
//! sequence of second-order cone programs solved with an embedded
//! interior-point method.
//!
//! ```no_run
//! use secure_swipt::channel::generate_channel_set;
//! use secure_swipt::model::{dbm_to_watts, NetworkConfig};
//! use secure_swipt::sca::{run_sca, ScaConfig};
//!
//! let mut cfg = NetworkConfig::default_scenario();
//! cfg.p_th = dbm_to_watts(45.0);
//! let ch = generate_channel_set(&cfg, 3)?;
//! let trace = run_sca(&ch, &cfg, &ScaConfig::default())?;
//! println!("{:?} {:.3} bit/s/Hz", trace.status, trace.secrecy_rate);
//! # Ok::<(), secure_swipt::Error>(())
//! ```

pub mod baselines;
pub mod channel;
pub mod conic;
mod error;
pub mod harness;
mod linalg;
pub mod model;
pub mod sca;

pub use error::{Error, Result};
