//! Linear and spherical interpolation between latent vectors.
//!
//! Both functions weight the FIRST argument by `gamma`:
//! `lerp(u, v, 1) = u` and `slerp(u, v, 1) = u`.

use crate::error::{Error, Result};
use crate::sampler::StateVector;

/// Cosine threshold beyond which slerp degrades to lerp (near-parallel) or
/// is rejected (near-antiparallel, where the great circle is undefined).
const PARALLEL_COS_TOLERANCE: f64 = 1e-7;

/// `gamma * u + (1 - gamma) * v`.
pub fn lerp(u: &StateVector, v: &StateVector, gamma: f64) -> Result<StateVector> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::GammaOutOfRange(gamma));
    }
    Ok(u * gamma + v * (1.0 - gamma))
}

/// Spherical linear interpolation
/// `sin(gamma * theta) / sin(theta) * u + sin((1 - gamma) * theta) / sin(theta) * v`
/// with `theta = arccos(u . v / (|u| |v|))`.
///
/// Falls back to [`lerp`] when the inputs are nearly parallel; nearly
/// antiparallel inputs are an error.
pub fn slerp(u: &StateVector, v: &StateVector, gamma: f64) -> Result<StateVector> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::GammaOutOfRange(gamma));
    }
    let nu = u.norm();
    let nv = v.norm();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroNormVector);
    }
    let cos_theta = (u.dot(v) / (nu * nv)).clamp(-1.0, 1.0);
    if cos_theta > 1.0 - PARALLEL_COS_TOLERANCE {
        return lerp(u, v, gamma);
    }
    if cos_theta < -1.0 + PARALLEL_COS_TOLERANCE {
        return Err(Error::AntiparallelVectors(cos_theta));
    }
    let theta = cos_theta.acos();
    let sin_theta = theta.sin();
    Ok(u * ((gamma * theta).sin() / sin_theta) + v * (((1.0 - gamma) * theta).sin() / sin_theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(data: &[f64]) -> StateVector {
        StateVector::from_vec(data.to_vec())
    }

    #[test]
    fn lerp_endpoints_and_midpoint() {
        let u = v(&[1.0, 0.0, 0.0]);
        let w = v(&[0.0, 1.0, 0.0]);
        assert_eq!(lerp(&u, &w, 1.0).unwrap(), u);
        assert_eq!(lerp(&u, &w, 0.0).unwrap(), w);
        assert_eq!(lerp(&u, &w, 0.5).unwrap(), v(&[0.5, 0.5, 0.0]));
    }

    #[test]
    fn lerp_rejects_mismatch_and_bad_gamma() {
        let u = v(&[1.0]);
        let w = v(&[0.0, 1.0]);
        assert!(lerp(&u, &w, 0.5).is_err());
        assert!(lerp(&u, &u, 1.5).is_err());
        assert!(lerp(&u, &u, -0.1).is_err());
    }

    #[test]
    fn slerp_endpoints() {
        let u = v(&[0.6, 0.8, 0.0]);
        let w = v(&[0.0, 0.0, 2.0]);
        assert!((slerp(&u, &w, 1.0).unwrap() - &u).norm() < 1e-15);
        assert!((slerp(&u, &w, 0.0).unwrap() - &w).norm() < 1e-15);
    }

    #[test]
    fn slerp_orthogonal_midpoint() {
        let e1 = v(&[1.0, 0.0]);
        let e2 = v(&[0.0, 1.0]);
        let mid = slerp(&e1, &e2, 0.5).unwrap();
        let c = std::f64::consts::FRAC_1_SQRT_2;
        assert!((mid[0] - c).abs() < 1e-12);
        assert!((mid[1] - c).abs() < 1e-12);
    }

    #[test]
    fn slerp_preserves_unit_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..200 {
            let mut a = StateVector::from_fn(5, |_, _| rng.random::<f64>() - 0.5);
            let mut b = StateVector::from_fn(5, |_, _| rng.random::<f64>() - 0.5);
            a /= a.norm();
            b /= b.norm();
            let gamma = rng.random::<f64>();
            let out = slerp(&a, &b, gamma).unwrap();
            assert!((out.norm() - 1.0).abs() < 1e-12, "norm = {}", out.norm());
        }
    }

    #[test]
    fn slerp_midpoint_is_swap_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..100 {
            let a = StateVector::from_fn(4, |_, _| rng.random::<f64>() - 0.5);
            let b = StateVector::from_fn(4, |_, _| rng.random::<f64>() - 0.5);
            let ab = slerp(&a, &b, 0.5).unwrap();
            let ba = slerp(&b, &a, 0.5).unwrap();
            assert!((ab - ba).norm() < 1e-12);
        }
    }

    #[test]
    fn slerp_near_parallel_falls_back_to_lerp() {
        let a = v(&[1.0, 0.0]);
        let b = v(&[2.0, 1e-9]);
        let out = slerp(&a, &b, 0.25).unwrap();
        let expected = lerp(&a, &b, 0.25).unwrap();
        assert_eq!(out, expected);
    }

    #[test]
    fn slerp_rejects_zero_and_antiparallel() {
        let a = v(&[1.0, 0.0]);
        let zero = v(&[0.0, 0.0]);
        assert!(matches!(slerp(&a, &zero, 0.5).unwrap_err(), Error::ZeroNormVector));
        let neg = v(&[-3.0, 0.0]);
        assert!(matches!(
            slerp(&a, &neg, 0.5).unwrap_err(),
            Error::AntiparallelVectors(_)
        ));
    }
}
