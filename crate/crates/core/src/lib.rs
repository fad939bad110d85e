//! Spectral toolkit for the Grushin operator `G = −Δ_x − |x|²∂²_t` on ℝ^{n+1}.
//!
//! `G` is diagonalized by the scaled Hermite–Fourier transform: the mode
//! `(α, λ)` carries the eigenvalue `(2|α|+n)|λ|`. On top of that transform
//! the crate provides the heat, Schrödinger and wave propagators, the Mehler
//! heat kernel and the strip-restricted Schrödinger kernel, restriction and
//! extension operators for the associated surfaces, and the discretized mixed
//! Lebesgue norms used to check dispersive and Strichartz-type estimates.

pub mod error;
pub mod exec;
pub mod field;
pub mod grid;
pub mod hermite;
pub mod kernel;
pub mod propagator;
pub mod quadrature;
pub mod restriction;
pub mod special;
pub mod transform;
pub mod window;

pub use error::{Error, Result};
pub use field::{Decay, Field, Field3, Wavepacket};
pub use grid::{Ball, Exponent, LambdaGrid, LambdaLayout, MixedNormSpec, TimeGrid};
pub use num_complex::Complex64 as C64;
pub use propagator::{EvolutionKind, EvolutionRequest, LocalizationWindow, TimeSeries};
pub use restriction::{LocalizedMeasure, Surface, SurfaceDensity};
pub use transform::{SpectralCoefficients, TransformConfig};
pub use window::Psi;
