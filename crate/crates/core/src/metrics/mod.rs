//! Biometric evaluation metrics: Gaussian fits and Fréchet distance,
//! threshold calibration, APCER, and ProdAvg-MMPMR.

pub mod calibration;
pub mod gaussian;
pub mod mmpmr;

pub use calibration::{apcer_at, bpcer_threshold, calibrate_threshold_fmr, ScoreSet};
pub use gaussian::{fit_gaussian, frechet_distance, matrix_sqrt_psd, GaussianStats};
pub use mmpmr::{
    mmpmr_prodavg, mmpmr_prodavg_with, BonaFideImage, EmbeddingTable, EmptyIdentityPolicy,
    MorphEntry,
};
