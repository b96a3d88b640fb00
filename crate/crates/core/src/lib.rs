//! Simulation of the quantum SWITCH acting on two depolarizing channels.
//!
//! - [`qmat`]: dense complex matrices, density matrices, partial traces and
//!   von Neumann entropy (bits).
//! - [`channels`]: Kraus channels, the Heisenberg–Weyl basis and the
//!   depolarizing family.
//! - [`switch`]: the SWITCH itself, its closed-form output for depolarizing
//!   inputs and the Fourier-basis readout of the control.
//! - [`capacity`]: closed-form and numerically optimized Holevo information.
//! - [`oracle`]: brute-force Kraus sums and comparison suites.
//! - [`cli`]: sweeps and verification runs used by the `qswitch` binary.
//!
//! ```
//! use qswitch::capacity::holevo_analytic;
//!
//! let chi = holevo_analytic(2, 0.0).unwrap().chi;
//! assert!((chi - 0.048795).abs() < 1e-6);
//! ```

pub mod capacity;
pub mod channels;
pub mod cli;
pub mod error;
pub mod oracle;
pub mod qmat;
pub mod switch;

pub use error::{Error, Result};
