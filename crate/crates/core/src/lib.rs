//! Diffusion-autoencoder morphing over pluggable noise predictors, plus the
//! biometric evaluation stack used to judge morphing attacks.
//!
//! The crate is organized around five pieces:
//!
//! * [`schedule`]: variance schedules and timing sub-schedules;
//! * [`sampler`]: the DDPM/DDIM step equations, deterministic stochastic
//!   encoding, and generation;
//! * [`predictors`]: concrete noise predictors, centered on the exact
//!   posterior-mean predictor for conditionally Gaussian data;
//! * [`morph`] + [`interp`]: the morphing pipeline with its interpolation
//!   variants;
//! * [`metrics`] + [`rsm`]: Fréchet distance over Gaussian fits, FMR/BPCER
//!   calibration, APCER, ProdAvg-MMPMR, and the relative strength metric.
//!
//! Everything is deterministic: with a zero noise scale all sampling
//! operations are pure functions, and repeated runs are bit-identical.

pub use nalgebra;

pub mod error;
pub mod interp;
pub mod metrics;
pub mod morph;
pub mod predictors;
pub mod rsm;
pub mod sampler;
pub mod schedule;

pub use error::{Error, Result};
pub use interp::{lerp, slerp};
pub use morph::{diffusion_morph, premorph_variant, MorphConfig, PremorphFn, Variant};
pub use predictors::{
    analytic_gaussian_predictor, identity_semantic_encoder, AnalyticGaussianPredictor,
    GaussianWorld, IdentityEncoder, SemanticEncoder,
};
pub use sampler::{
    ddim_reverse_step, ddim_step_general, ddpm_posterior_mean, forward_marginal_sample, generate,
    stochastic_encode, stochastic_encode_step, NoisePredictor, PredictorFn, SemanticCode,
    StateVector,
};
pub use schedule::{
    make_linear_schedule, make_subschedule, SigmaPolicy, Spacing, SubSchedule, VarianceSchedule,
};
