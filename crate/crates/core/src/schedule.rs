//! Variance schedules and timing sub-schedules.
//!
//! A schedule fixes `beta_t` for `t = 1..=T` and the cumulative products
//! `alpha_bar_t = prod_{s<=t} (1 - beta_s)` with `alpha_bar_0 = 1`. All
//! sampling equations in this crate are written in terms of `alpha_bar`
//! (the DDIM convention); the per-step `beta_t` and `alpha_t = 1 - beta_t`
//! appear only in schedule construction and the DDPM posterior mean.

use crate::error::{Error, Result};

/// Default training step count when the caller does not specify one.
pub const DEFAULT_STEPS: usize = 1000;
/// Default linear schedule endpoints.
pub const DEFAULT_BETA_START: f64 = 1e-4;
pub const DEFAULT_BETA_END: f64 = 0.02;

/// The `beta_t` / `alpha_bar_t` tables driving all diffusion steps.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceSchedule {
    beta: Vec<f64>,      // beta[t - 1] is beta_t, t in 1..=T
    alpha_bar: Vec<f64>, // alpha_bar[t], t in 0..=T, alpha_bar[0] = 1
}

impl VarianceSchedule {
    /// Build a schedule from explicit per-step betas.
    pub fn from_betas(beta: Vec<f64>) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::InvalidSchedule("empty beta table".into()));
        }
        for (i, &b) in beta.iter().enumerate() {
            if !(b > 0.0 && b < 1.0) {
                return Err(Error::InvalidSchedule(format!(
                    "beta[{}] = {} outside (0, 1)",
                    i + 1,
                    b
                )));
            }
        }
        let mut alpha_bar = Vec::with_capacity(beta.len() + 1);
        alpha_bar.push(1.0);
        let mut prod = 1.0;
        for &b in &beta {
            prod *= 1.0 - b;
            alpha_bar.push(prod);
        }
        Ok(Self { beta, alpha_bar })
    }

    /// Number of diffusion steps `T`.
    pub fn steps(&self) -> usize {
        self.beta.len()
    }

    /// `beta_t` for `t` in `1..=T`.
    pub fn beta(&self, t: usize) -> Result<f64> {
        if t == 0 || t > self.steps() {
            return Err(Error::StepOutOfRange {
                t,
                min: 1,
                max: self.steps(),
            });
        }
        Ok(self.beta[t - 1])
    }

    /// Cumulative product `alpha_bar_t` for `t` in `0..=T`; `alpha_bar_0 = 1`.
    pub fn alpha_bar(&self, t: usize) -> Result<f64> {
        self.alpha_bar.get(t).copied().ok_or(Error::StepOutOfRange {
            t,
            min: 0,
            max: self.steps(),
        })
    }
}

/// Linear beta schedule: `beta_t` evenly spaced from `beta_start` to
/// `beta_end` inclusive.
pub fn make_linear_schedule(steps: usize, beta_start: f64, beta_end: f64) -> Result<VarianceSchedule> {
    if steps == 0 {
        return Err(Error::InvalidSchedule("step count must be >= 1".into()));
    }
    if !(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0) {
        return Err(Error::InvalidSchedule(format!(
            "need 0 < beta_start <= beta_end < 1, got [{beta_start}, {beta_end}]"
        )));
    }
    let beta = if steps == 1 {
        vec![beta_start]
    } else {
        (0..steps)
            .map(|i| beta_start + (beta_end - beta_start) * i as f64 / (steps - 1) as f64)
            .collect()
    };
    VarianceSchedule::from_betas(beta)
}

/// Spacing rule for timing sub-schedules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Quadratic,
}

/// A monotonically increasing timing sub-schedule `tau_0 = 0 < ... < tau_N = T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubSchedule {
    tau: Vec<usize>,
}

impl SubSchedule {
    /// Build from explicit taus; validates the endpoint and monotonicity
    /// invariants against `sched`.
    pub fn from_taus(sched: &VarianceSchedule, tau: Vec<usize>) -> Result<Self> {
        if tau.len() < 2 || tau[0] != 0 || *tau.last().unwrap() != sched.steps() {
            return Err(Error::InvalidSchedule(format!(
                "sub-schedule must run from 0 to {}, got {:?}",
                sched.steps(),
                tau
            )));
        }
        for i in 1..tau.len() {
            if tau[i] <= tau[i - 1] {
                return Err(Error::SubScheduleNotMonotone {
                    index: i,
                    value: tau[i],
                });
            }
        }
        Ok(Self { tau })
    }

    /// Number of sub-steps `N`.
    pub fn num_steps(&self) -> usize {
        self.tau.len() - 1
    }

    /// `tau_i` for `i` in `0..=N`.
    pub fn tau(&self, i: usize) -> Result<usize> {
        self.tau.get(i).copied().ok_or(Error::StepOutOfRange {
            t: i,
            min: 0,
            max: self.num_steps(),
        })
    }

    pub fn taus(&self) -> &[usize] {
        &self.tau
    }
}

/// Build a sub-schedule of `n` steps over `sched`.
///
/// Linear spacing rounds `i * T / n` half-up; quadratic rounds
/// `T * (i / n)^2`. Rounding collisions are rejected rather than merged so
/// the effective step count never silently changes.
pub fn make_subschedule(sched: &VarianceSchedule, n: usize, spacing: Spacing) -> Result<SubSchedule> {
    let t_max = sched.steps();
    if n == 0 || n > t_max {
        return Err(Error::InvalidSchedule(format!(
            "sub-schedule length {n} outside [1, {t_max}]"
        )));
    }
    let tau: Vec<usize> = (0..=n)
        .map(|i| {
            let frac = i as f64 / n as f64;
            let value = match spacing {
                Spacing::Linear => frac * t_max as f64,
                Spacing::Quadratic => frac * frac * t_max as f64,
            };
            value.round() as usize
        })
        .collect();
    SubSchedule::from_taus(sched, tau)
}

/// Noise-scale policy for the generalized DDIM step.
///
/// `Eta(eta)` uses the DDIM convention
/// `sigma_t = eta * sqrt((1 - ab_prev) / (1 - ab_t)) * sqrt(1 - ab_t / ab_prev)`;
/// `eta = 0` reproduces the deterministic sampler. `Explicit` supplies one
/// sigma per step `t = 1..=T`.
#[derive(Debug, Clone, PartialEq)]
pub enum SigmaPolicy {
    Eta(f64),
    Explicit(Vec<f64>),
}

impl Default for SigmaPolicy {
    fn default() -> Self {
        SigmaPolicy::Eta(0.0)
    }
}

impl SigmaPolicy {
    pub fn eta(eta: f64) -> Result<Self> {
        if eta < 0.0 || !eta.is_finite() {
            return Err(Error::NegativeSigma(eta));
        }
        Ok(SigmaPolicy::Eta(eta))
    }

    pub fn explicit(sigma: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = sigma.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return Err(Error::NegativeSigma(bad));
        }
        Ok(SigmaPolicy::Explicit(sigma))
    }

    /// Sigma for the transition `t -> t_prev`.
    pub fn sigma(&self, sched: &VarianceSchedule, t: usize, t_prev: usize) -> Result<f64> {
        match self {
            SigmaPolicy::Eta(eta) => {
                if *eta == 0.0 {
                    return Ok(0.0);
                }
                let ab_t = sched.alpha_bar(t)?;
                let ab_prev = sched.alpha_bar(t_prev)?;
                Ok(eta
                    * ((1.0 - ab_prev) / (1.0 - ab_t)).sqrt()
                    * (1.0 - ab_t / ab_prev).sqrt())
            }
            SigmaPolicy::Explicit(sigma) => {
                if t == 0 || t > sigma.len() {
                    return Err(Error::StepOutOfRange {
                        t,
                        min: 1,
                        max: sigma.len(),
                    });
                }
                Ok(sigma[t - 1])
            }
        }
    }
}
