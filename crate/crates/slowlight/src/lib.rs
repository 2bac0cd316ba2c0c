//! Slow-light polaritons in tripod media.
//!
//! A probe beam propagating through a cold atomic cloud under two control
//! lasers (a tripod level scheme) mixes with the atomic coherences into two
//! dark-state polaritons. Switching the controls off maps the probe onto
//! stationary coherences; switching them back on with different spatial
//! profiles regenerates the light, optionally imprinting or conjugating an
//! optical vortex carried by a control beam.
//!
//! The crate covers that pipeline end to end:
//!
//! * [`grid`] — periodic square grids, complex fields and spectral calculus;
//! * [`beams`] — Gaussian / Laguerre-Gaussian profiles and OAM diagnostics;
//! * [`mixing`] — the bright/dark polariton transformation and its inverse;
//! * [`coupling`] — the vector and scalar potentials coupling the two dark
//!   polaritons, with decoupling and adiabaticity diagnostics;
//! * [`memory`] — the storage → retrieval algebra and its closed forms;
//! * [`propagator`] — exact spectral free-space diffraction and split-step
//!   integration of the in-medium polariton equations;
//! * [`scenario`] — declarative end-to-end experiments.
//!
//! Units are dimensionless throughout: transverse lengths and propagation
//! distances in probe wavelengths λ, frequencies in units of the excited
//! state decay rate γ, time in 1/γ, velocities as fractions of c.

pub mod beams;
pub mod coupling;
pub mod error;
pub mod grid;
pub mod io;
pub mod memory;
pub mod mixing;
pub mod propagator;
pub mod reference;
pub mod scenario;

pub use error::{Error, Result};
