//! THz MIMO channel simulation and one-bit channel-estimation benchmarks.
//!
//! The crate is organized along the signal path:
//!
//! * [`propagation`]: absorption and spreading losses, noise psd, link SNR.
//! * [`channel`]: LoS + clustered NLoS ray synthesis of the channel matrix.
//! * [`frontend`]: DFT / Zadoff-Chu pilots, AWGN, one-bit ADC, realification.
//! * [`estimators`]: LR, NN-CE, projected gradient ascent and Frank-Wolfe.
//! * [`metrics`]: scale-compensated NMSE and its aggregation.
//! * [`bench`]: seeded experiment sweeps, datasets, CSV and SVG output.

pub mod bench;
pub mod channel;
pub mod error;
pub mod estimators;
pub mod frontend;
pub mod metrics;
pub mod propagation;
mod serde_util;

pub use error::{Error, Result};
