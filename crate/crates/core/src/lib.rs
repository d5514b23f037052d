//! Meshfree radial-basis-function collocation for the nearly constant-Q
//! decoupled fractional Laplacian wave equation.
//!
//! The crate is split along the solver pipeline:
//!
//! * [`media`]: quality factor, reference frequency and velocity models.
//! * [`geometry`]: domains, collocation clouds and ray exit distances.
//! * [`rbf`]: the multiquadric basis and interpolation.
//! * [`fraclap`]: Grunwald-Letnikov directional fractional Laplacian.
//! * [`stepper`]: system assembly and time marching.
//! * [`reference`]: Fourier pseudospectral solver on periodic boxes.
//! * [`harness`]: manufactured-solution validation and convergence studies.
//! * [`config`] and [`output`]: run files and result writers for the CLI.

pub mod cli;
pub mod config;
pub mod error;
pub mod fraclap;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod media;
pub mod output;
pub mod rbf;
pub mod reference;
pub mod stepper;

pub use error::{Error, Result};
