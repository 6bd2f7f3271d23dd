//! Concrete noise predictors and semantic encoders for desk-scale work.
//!
//! The centerpiece is the analytically optimal predictor for conditionally
//! Gaussian data `q(x0 | z) = N(z, s^2 I)`, which stands in for a trained
//! network: it is the exact posterior mean `E[eps | x_t, z]`, so every
//! sampling identity can be checked against it without any learned weights.

use crate::error::{Error, Result};
use crate::sampler::{NoisePredictor, SemanticCode, StateVector};
use crate::schedule::VarianceSchedule;

/// An abstract semantic encoder `E: X -> Z`. Must be deterministic;
/// immutable once built and shareable across workers.
pub trait SemanticEncoder: Send + Sync {
    fn encode(&self, x: &StateVector) -> SemanticCode;
}

/// Conditionally Gaussian data model: `q(x0 | z) = N(z, s^2 I)` in
/// dimension `dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianWorld {
    s: f64,
    dim: usize,
}

impl GaussianWorld {
    pub fn new(s: f64, dim: usize) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidSchedule(format!(
                "world standard deviation must be positive and finite, got {s}"
            )));
        }
        Ok(Self { s, dim })
    }

    pub fn std_dev(&self) -> f64 {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Exact conditional noise predictor for [`GaussianWorld`] data.
///
/// Derivation: with `x0 = z + s u` and `x_t = sqrt(ab) x0 + sqrt(1 - ab) eps`
/// for independent standard normals `u`, `eps`, each coordinate of
/// `(eps, x_t)` is jointly Gaussian with
///
/// ```text
/// E[x_t]        = sqrt(ab) z
/// Var(x_t)      = ab s^2 + (1 - ab)
/// Cov(eps, x_t) = sqrt(1 - ab)
/// ```
///
/// so the conditional mean is
///
/// ```text
/// E[eps | x_t, z] = (x_t - sqrt(ab) z) * sqrt(1 - ab) / (ab s^2 + (1 - ab))
/// ```
///
/// This is conditional-only: evaluating without `z` is an error.
#[derive(Debug, Clone)]
pub struct AnalyticGaussianPredictor {
    world: GaussianWorld,
    sched: VarianceSchedule,
}

/// Build the optimal predictor for `world` under `sched`.
///
/// The schedule is captured here because `eps(x, z, t)` must translate the
/// step index into `alpha_bar_t`; a trained predictor would have it baked
/// into its weights.
pub fn analytic_gaussian_predictor(
    world: GaussianWorld,
    sched: &VarianceSchedule,
) -> AnalyticGaussianPredictor {
    AnalyticGaussianPredictor {
        world,
        sched: sched.clone(),
    }
}

impl NoisePredictor for AnalyticGaussianPredictor {
    fn evaluate(&self, x: &StateVector, z: Option<&SemanticCode>, t: usize) -> Result<StateVector> {
        let z = z.ok_or(Error::MissingSemanticCode)?;
        if z.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: z.len(),
            });
        }
        let ab = self.sched.alpha_bar(t)?;
        let s2 = self.world.s * self.world.s;
        let coef = (1.0 - ab).sqrt() / (ab * s2 + (1.0 - ab));
        Ok((x - z * ab.sqrt()) * coef)
    }
}

/// The identity encoder: `Z = X`, `E(x) = x`.
///
/// Under this choice the semantic code carries the Gaussian mean, so
/// interpolating codes interpolates identity means.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityEncoder;

pub fn identity_semantic_encoder() -> IdentityEncoder {
    IdentityEncoder
}

impl SemanticEncoder for IdentityEncoder {
    fn encode(&self, x: &StateVector) -> SemanticCode {
        x.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::make_linear_schedule;

    fn sched_with_alpha_bar_half() -> VarianceSchedule {
        // Single step with beta = 0.5 gives alpha_bar(1) = 0.5 exactly.
        make_linear_schedule(1, 0.5, 0.5).unwrap()
    }

    #[test]
    fn zero_at_the_conditional_mean() {
        let sched = sched_with_alpha_bar_half();
        let world = GaussianWorld::new(1.0, 3).unwrap();
        let p = analytic_gaussian_predictor(world, &sched);
        let z = SemanticCode::from_vec(vec![1.0, -2.0, 0.4]);
        let x = &z * 0.5f64.sqrt();
        let eps = p.evaluate(&x, Some(&z), 1).unwrap();
        assert!(eps.norm() < 1e-15);
    }

    #[test]
    fn small_s_limit_recovers_noise_exactly() {
        let sched = sched_with_alpha_bar_half();
        let world = GaussianWorld::new(1e-9, 2).unwrap();
        let p = analytic_gaussian_predictor(world, &sched);
        let z = SemanticCode::from_vec(vec![0.3, 0.7]);
        let x = StateVector::from_vec(vec![1.1, -0.2]);
        let eps = p.evaluate(&x, Some(&z), 1).unwrap();
        let ab: f64 = 0.5;
        let exact = (&x - &z * ab.sqrt()) / (1.0 - ab).sqrt();
        assert!((eps - exact).norm() < 1e-12);
    }

    #[test]
    fn hand_value_d1() {
        // ab = 0.5, s = 1, z = 0, x = 1: sqrt(0.5) / (0.5 + 0.5) = 0.7071...
        let sched = sched_with_alpha_bar_half();
        let world = GaussianWorld::new(1.0, 1).unwrap();
        let p = analytic_gaussian_predictor(world, &sched);
        let z = SemanticCode::from_vec(vec![0.0]);
        let x = StateVector::from_vec(vec![1.0]);
        let eps = p.evaluate(&x, Some(&z), 1).unwrap();
        assert!((eps[0] - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_missing_code() {
        let sched = sched_with_alpha_bar_half();
        let p = analytic_gaussian_predictor(GaussianWorld::new(1.0, 2).unwrap(), &sched);
        let x = StateVector::zeros(2);
        assert!(matches!(
            p.evaluate(&x, None, 1).unwrap_err(),
            Error::MissingSemanticCode
        ));
    }

    #[test]
    fn rejects_invalid_world() {
        assert!(GaussianWorld::new(0.0, 2).is_err());
        assert!(GaussianWorld::new(-1.0, 2).is_err());
        assert!(GaussianWorld::new(f64::NAN, 2).is_err());
    }

    #[test]
    fn identity_encoder_is_identity() {
        let enc = identity_semantic_encoder();
        let zero = StateVector::zeros(4);
        assert_eq!(enc.encode(&zero), zero);
        let e1 = StateVector::from_vec(vec![1.0, 0.0]);
        assert_eq!(enc.encode(&e1), e1);
        let a = StateVector::from_vec(vec![0.1, 0.2]);
        let b = StateVector::from_vec(vec![0.1, 0.3]);
        assert_ne!(enc.encode(&a), enc.encode(&b));
    }
}
