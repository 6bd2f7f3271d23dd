use thiserror::Error;

/// Errors produced by schedule construction, sampling, morphing, and metrics.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("sub-schedule is not strictly increasing after rounding: tau[{index}] = {value} repeats or decreases")]
    SubScheduleNotMonotone { index: usize, value: usize },

    #[error("step index {t} out of range [{min}, {max}]")]
    StepOutOfRange { t: usize, min: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("sigma {sigma} too large: sigma^2 must not exceed 1 - alpha_bar[t_prev] = {bound}")]
    SigmaTooLarge { sigma: f64, bound: f64 },

    #[error("negative sigma {0} is not a valid noise scale")]
    NegativeSigma(f64),

    #[error("this predictor is conditional-only and requires a semantic code")]
    MissingSemanticCode,

    #[error("interpolation factor {0} outside [0, 1]")]
    GammaOutOfRange(f64),

    #[error("slerp requires nonzero-norm inputs")]
    ZeroNormVector,

    #[error("slerp is undefined for antiparallel inputs (cos theta = {0})")]
    AntiparallelVectors(f64),

    #[error("external pre-morph variant selected but no pre-morphed vector was supplied")]
    MissingExternalPremorph,

    #[error("gaussian fit requires at least 2 samples, got {0}")]
    NotEnoughSamples(usize),

    #[error("matrix is not symmetric: max asymmetry {0}")]
    AsymmetricMatrix(f64),

    #[error("matrix is indefinite: eigenvalue {eigenvalue} below tolerance {tolerance}")]
    IndefiniteMatrix { eigenvalue: f64, tolerance: f64 },

    #[error("symmetric eigendecomposition did not converge")]
    EigenSolveFailed,

    #[error("frechet distance computed a negative value {0} beyond the clamping tolerance")]
    NegativeFrechet(f64),

    #[error("score list '{0}' is empty")]
    EmptyScores(&'static str),

    #[error("rate {0} outside (0, 1)")]
    RateOutOfRange(f64),

    #[error("duplicate {kind} key: {key}")]
    DuplicateKey { kind: &'static str, key: String },

    #[error("morph '{morph}' references unknown identity '{identity}'")]
    UnknownIdentity { morph: String, identity: String },

    #[error("morph '{morph}' must reference two distinct identities")]
    DegenerateMorph { morph: String },

    #[error("identity '{identity}' has no bona fide images left for morph '{morph}' after excluding its source images")]
    EmptyIdentity { morph: String, identity: String },

    #[error("decision records cover different pair ids (first difference: '{0}')")]
    PairIdMismatch(String),

    #[error("decision record ({detector} on {attack}) does not match expected roles")]
    RecordRoleMismatch { detector: String, attack: String },

    #[error("undefined metric: {count} count is zero{context}")]
    ZeroCount { count: &'static str, context: String },

    #[error("transferability {0} outside [0, 1]")]
    TransferabilityOutOfRange(f64),

    #[error("missing decision record for detector '{detector}' evaluated on attack '{attack}'")]
    MissingRecord { detector: String, attack: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors that mean "the metric is mathematically undefined on
    /// this input" rather than "the input is malformed".
    pub fn is_undefined_metric(&self) -> bool {
        matches!(self, Error::ZeroCount { .. } | Error::EmptyIdentity { .. })
    }
}
