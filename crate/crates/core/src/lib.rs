//! Time-frequency analysis on periodic grids: short-time Fourier and Wigner
//! transforms, Gabor frames, modulation and Schatten norms, and a catalog of
//! numerical checks for the quasi-Banach estimates built on them.

pub mod error;
pub mod fft;
pub mod gabor;
pub mod grid;
pub mod quantize;
pub mod random;
pub mod signal;
pub mod tfa;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{make_grid, GridSpec};
pub use signal::{
    dilated_gaussian, gaussian_window, hermite_family, hermite_function, l2_inner, l2_norm,
    SampledSignal, SymbolField,
};
