//! Quantized spectral compressed sensing.
//!
//! Spectrally sparse signals `x = Σ c_k v(f_k)` are observed through complex
//! Gaussian random projections whose real and imaginary parts are passed
//! through a scalar quantizer. This crate provides
//!
//! * the signal model and steering vectors ([`spectral_model`]),
//! * Gaussian sensing and noisy measurements ([`sensing`]),
//! * sign and Lloyd-Max quantizers ([`quantization`]),
//! * exact Fisher information and Cramér-Rao bounds for the frequencies,
//!   amplitudes and phases under quantized and unquantized models ([`crb`]),
//! * atomic-norm soft thresholding of the surrogate `Aᴴy/m`, for single and
//!   multiple measurement vectors, solved by ADMM on the semidefinite
//!   characterization of the atomic norm ([`ast`]),
//! * frequency localization from the dual polynomial or by MUSIC, plus the
//!   error metrics used to score recoveries ([`frequency_localization`]).

pub mod ast;
pub mod crb;
pub mod error;
pub mod frequency_localization;
pub mod gaussian;
pub mod linalg;
pub mod quantization;
pub mod rng;
pub mod sensing;
pub mod spectral_model;

pub use error::{Error, Result};
pub use num_complex::Complex64;
