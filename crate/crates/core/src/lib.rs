//! Decoherence of multi-photon polarization-entangled states (GHZ, W, Bell)
//! sent through fibers with polarization mode dispersion or
//! polarization-dependent loss.
//!
//! The crate assembles output density matrices for one fiber per photon,
//! quantifies what is left of the entanglement (pairwise concurrence and a
//! fidelity witness), and locates sudden-death thresholds and
//! decoherence-free configurations.
//!
//! ```
//! use fiberent::channels::{NetworkConfig, SpectralModel};
//! use fiberent::metrics::witness_closed_form;
//! use fiberent::states::StateKind;
//!
//! let cfg = NetworkConfig::pmd(&[2.0, 2.0, 2.0], SpectralModel::correlated(vec![1.0; 3])).unwrap();
//! let v = witness_closed_form(&cfg, StateKind::Ghz).unwrap();
//! assert!((v + 0.5).abs() < 1e-12);
//! ```

pub mod analysis;
pub mod channels;
pub mod error;
pub mod exec;
pub mod metrics;
pub mod oracle;
pub mod qlinalg;
pub mod states;

pub use error::{Error, Result};
