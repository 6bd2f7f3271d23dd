//! DDPM/DDIM step equations: forward noising, reverse generation, and the
//! deterministic stochastic encoder.
//!
//! All equations are written over `alpha_bar` from the [`VarianceSchedule`].
//! The generalized step is
//!
//! ```text
//! x_prev = sqrt(ab_prev) * x0_hat + sqrt(1 - ab_prev - sigma^2) * eps + sigma * noise
//! x0_hat = (x_t - sqrt(1 - ab_t) * eps) / sqrt(ab_t)
//! ```
//!
//! with `sigma = 0` giving the deterministic sampler, and the stochastic
//! encoder running the same algebra in the opposite direction.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::schedule::{SubSchedule, VarianceSchedule};

/// A point in signal space: houses `x_0`, `x_t`, `x_T`, and noise vectors.
pub type StateVector = DVector<f64>;

/// A semantic latent code `z`.
pub type SemanticCode = DVector<f64>;

/// The abstract noise predictor `eps(x, z, t)`.
///
/// Implementations must be deterministic for fixed inputs and return a
/// vector of the same dimension as `x`. `z` is optional: unconditional
/// predictors ignore it, conditional ones may reject its absence.
/// Predictors are immutable once built and shareable across workers.
pub trait NoisePredictor: Send + Sync {
    fn evaluate(&self, x: &StateVector, z: Option<&SemanticCode>, t: usize) -> Result<StateVector>;
}

/// Adapter turning a plain closure into a [`NoisePredictor`].
pub struct PredictorFn<F>(pub F);

impl<F> NoisePredictor for PredictorFn<F>
where
    F: Fn(&StateVector, Option<&SemanticCode>, usize) -> StateVector + Send + Sync,
{
    fn evaluate(&self, x: &StateVector, z: Option<&SemanticCode>, t: usize) -> Result<StateVector> {
        Ok((self.0)(x, z, t))
    }
}

fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Closed-form forward marginal: `x_t = sqrt(ab_t) * x0 + sqrt(1 - ab_t) * noise`.
///
/// The schedule only fixes the one-step kernel
/// `q(x_t | x_{t-1}) = N(sqrt(1 - beta_t) x_{t-1}, beta_t I)`; composing it
/// gives `q(x_t | x_0) = N(sqrt(ab_t) x_0, (1 - ab_t) I)` since the product
/// of the per-step scalings telescopes to `sqrt(ab_t)` and the independent
/// Gaussian increments sum to variance `1 - ab_t`.
pub fn forward_marginal_sample(
    x0: &StateVector,
    t: usize,
    sched: &VarianceSchedule,
    noise: &StateVector,
) -> Result<StateVector> {
    if t == 0 || t > sched.steps() {
        return Err(Error::StepOutOfRange {
            t,
            min: 1,
            max: sched.steps(),
        });
    }
    check_dims(x0.len(), noise.len())?;
    let ab = sched.alpha_bar(t)?;
    Ok(x0 * ab.sqrt() + noise * (1.0 - ab).sqrt())
}

/// DDPM posterior mean:
/// `mu = (x_t - beta_t / sqrt(1 - ab_t) * eps) / sqrt(alpha_t)` with
/// `alpha_t = 1 - beta_t`.
pub fn ddpm_posterior_mean(
    x_t: &StateVector,
    t: usize,
    sched: &VarianceSchedule,
    predictor: &dyn NoisePredictor,
) -> Result<StateVector> {
    let beta = sched.beta(t)?;
    let ab = sched.alpha_bar(t)?;
    let eps = predictor.evaluate(x_t, None, t)?;
    check_dims(x_t.len(), eps.len())?;
    let alpha = 1.0 - beta;
    Ok((x_t - eps * (beta / (1.0 - ab).sqrt())) / alpha.sqrt())
}

/// Generalized DDIM inference step `t -> t_prev` with noise scale `sigma_t`.
///
/// `noise` is only consumed when `sigma_t != 0`.
#[allow(clippy::too_many_arguments)]
pub fn ddim_step_general(
    x_t: &StateVector,
    z: Option<&SemanticCode>,
    t: usize,
    t_prev: usize,
    sched: &VarianceSchedule,
    predictor: &dyn NoisePredictor,
    sigma_t: f64,
    noise: &StateVector,
) -> Result<StateVector> {
    if t_prev >= t || t > sched.steps() {
        return Err(Error::StepOutOfRange {
            t,
            min: t_prev + 1,
            max: sched.steps(),
        });
    }
    let ab_t = sched.alpha_bar(t)?;
    let ab_prev = sched.alpha_bar(t_prev)?;
    if sigma_t < 0.0 || sigma_t.is_nan() {
        return Err(Error::NegativeSigma(sigma_t));
    }
    let radicand = 1.0 - ab_prev - sigma_t * sigma_t;
    if radicand < 0.0 {
        return Err(Error::SigmaTooLarge {
            sigma: sigma_t,
            bound: 1.0 - ab_prev,
        });
    }
    let eps = predictor.evaluate(x_t, z, t)?;
    check_dims(x_t.len(), eps.len())?;
    let x0_hat = (x_t - &eps * (1.0 - ab_t).sqrt()) / ab_t.sqrt();
    let mut out = x0_hat * ab_prev.sqrt() + &eps * radicand.sqrt();
    if sigma_t != 0.0 {
        check_dims(x_t.len(), noise.len())?;
        out += noise * sigma_t;
    }
    Ok(out)
}

/// Deterministic accelerated reverse step: `tau_i -> tau_{i-1}` for
/// `i` in `1..=N`, conditioned on `z`.
pub fn ddim_reverse_step(
    x: &StateVector,
    z: Option<&SemanticCode>,
    i: usize,
    sub: &SubSchedule,
    sched: &VarianceSchedule,
    predictor: &dyn NoisePredictor,
) -> Result<StateVector> {
    if i == 0 || i > sub.num_steps() {
        return Err(Error::StepOutOfRange {
            t: i,
            min: 1,
            max: sub.num_steps(),
        });
    }
    let t = sub.tau(i)?;
    let t_prev = sub.tau(i - 1)?;
    let ab_t = sched.alpha_bar(t)?;
    let ab_prev = sched.alpha_bar(t_prev)?;
    let eps = predictor.evaluate(x, z, t)?;
    check_dims(x.len(), eps.len())?;
    let x0_hat = (x - &eps * (1.0 - ab_t).sqrt()) / ab_t.sqrt();
    Ok(x0_hat * ab_prev.sqrt() + &eps * (1.0 - ab_prev).sqrt())
}

/// Deterministic forward (encoding) step: `tau_{i-1} -> tau_i` for
/// `i` in `1..=N`. The predictor is evaluated at the source step
/// `tau_{i-1}`, so `z` must already be available.
pub fn stochastic_encode_step(
    x: &StateVector,
    z: Option<&SemanticCode>,
    i: usize,
    sub: &SubSchedule,
    sched: &VarianceSchedule,
    predictor: &dyn NoisePredictor,
) -> Result<StateVector> {
    if i == 0 || i > sub.num_steps() {
        return Err(Error::StepOutOfRange {
            t: i,
            min: 1,
            max: sub.num_steps(),
        });
    }
    let t_src = sub.tau(i - 1)?;
    let t_dst = sub.tau(i)?;
    let ab_src = sched.alpha_bar(t_src)?;
    let ab_dst = sched.alpha_bar(t_dst)?;
    let eps = predictor.evaluate(x, z, t_src)?;
    check_dims(x.len(), eps.len())?;
    let x0_hat = (x - &eps * (1.0 - ab_src).sqrt()) / ab_src.sqrt();
    Ok(x0_hat * ab_dst.sqrt() + &eps * (1.0 - ab_dst).sqrt())
}

/// Deterministic stochastic encoding: fold of [`stochastic_encode_step`]
/// over `i = 1..=N`, mapping `x_0` to the stochastic code `x_T`.
pub fn stochastic_encode(
    x0: &StateVector,
    z: Option<&SemanticCode>,
    sub: &SubSchedule,
    sched: &VarianceSchedule,
    predictor: &dyn NoisePredictor,
) -> Result<StateVector> {
    let mut x = x0.clone();
    for i in 1..=sub.num_steps() {
        x = stochastic_encode_step(&x, z, i, sub, sched, predictor)?;
    }
    Ok(x)
}

/// Deterministic generation: fold of [`ddim_reverse_step`] over
/// `i = N..=1`, mapping `x_T` back to signal space.
pub fn generate(
    x_terminal: &StateVector,
    z: Option<&SemanticCode>,
    sub: &SubSchedule,
    sched: &VarianceSchedule,
    predictor: &dyn NoisePredictor,
) -> Result<StateVector> {
    let mut x = x_terminal.clone();
    for i in (1..=sub.num_steps()).rev() {
        x = ddim_reverse_step(&x, z, i, sub, sched, predictor)?;
    }
    Ok(x)
}
