//! Coupled-mode simulation of a two-arm metal-nanoparticle array with one
//! quantum dot at each end.
//!
//! The array is solved in the frequency domain for each joint dot state,
//! coherent inputs are pushed through the resulting scattering amplitudes,
//! and a click at drain 1 heralds an entangled state of the dots.
//!
//! - [`model`]: rates, branch labels and the network graph
//! - [`scattering`]: dynamical matrix, steady-state solve, time-domain oracle
//! - [`dir`]: single-arm reflection spectra and closed forms
//! - [`entangle`]: matching, post-selection, fidelity and efficiency
//! - [`validity`]: weak-coupling and weak-excitation guards

pub mod dir;
pub mod entangle;
pub mod error;
pub mod model;
pub mod scattering;
pub mod validity;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// `steps` evenly spaced points from `start` to `stop`, endpoints included.
/// A single step yields `[start]`.
pub fn linspace(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let h = (stop - start) / (steps - 1) as f64;
            (0..steps)
                .map(|i| if i == steps - 1 { stop } else { start + h * i as f64 })
                .collect()
        }
    }
}
