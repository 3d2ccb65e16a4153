//! One-dimensional continuous wavelet transform machinery built around
//! spectral uniqueness: per-side (Tauberian) nontriviality checks, the
//! Calderón admissibility constant, a discrete Calderón dual-wavelet
//! construction with a convolution reproducing formula, and vanishing-moment
//! analysis of polynomial signals.
//!
//! Everything is specialized to `d = 1`, where the unit sphere degenerates to
//! the two sides of the origin, and uses the Fourier convention
//! `F(omega) = integral f(x) exp(-2 pi i omega x) dx`.

// validation guards use `!(x > 0.0)` so NaN is rejected along with the
// out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod admissibility;
pub mod dualframe;
mod error;
pub mod moments;
mod quadrature;
pub mod spectral;
pub mod transform;
pub mod wavelets;

pub use error::{CwtError, Result};

pub use admissibility::{
    admissibility_report, calderon_constant, directional_energy, tauberian_check,
    uniqueness_certificate, AdmissibilityReport, Calderon, ScanConfig, Side, UniquenessCertificate,
};
pub use dualframe::{
    build_dual, find_cover, find_cover_both, make_bump, partition_check, reconstruct, AnnularBump,
    CoverResult, CoverSide, DualWavelet, ReconstructMode, Reconstruction,
};
pub use moments::{
    moment, moment_recovery, moment_vector, polynomial_pairing, vanishing_moment_order,
    MomentRecovery, MomentVector, PolynomialSignal,
};
pub use spectral::{
    forward_ft, inverse_ft, make_test_function, SampledSignal, SpectralGrid, SpectralSignal,
    UniformGrid,
};
pub use transform::{
    cwt, cwt_single, cwt_single_fn, plancherel_energy, signal_energy, GeomBase, ScaleGrid,
    Scalogram,
};
pub use wavelets::{dilate_translate, Decay, DilatedWavelet, WaveletKind, WaveletSpec};
