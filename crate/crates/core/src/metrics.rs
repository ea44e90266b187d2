//! Capture decisions and slot throughput.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Multiplier applied to the bandwidth in the rate expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Prefactor {
    /// `2B`
    #[default]
    #[cfg_attr(feature = "serde", serde(rename = "2B"))]
    TwoB,
    /// `B`
    B,
}

impl Prefactor {
    pub fn factor(self) -> f64 {
        match self {
            Prefactor::TwoB => 2.0,
            Prefactor::B => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputParams {
    /// Capture threshold, linear.
    pub alpha: f64,
    /// Data symbols per coherence block.
    pub tau_d: f64,
    /// Symbols per coherence block.
    pub tau_c: f64,
    /// Hz
    pub bandwidth: f64,
    pub prefactor: Prefactor,
}

impl ThroughputParams {
    pub fn new(alpha: f64, tau_d: f64, tau_c: f64, bandwidth: f64, prefactor: Prefactor) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidParameter("capture threshold must be positive"));
        }
        if !(tau_d > 0.0 && tau_d <= tau_c) || !tau_c.is_finite() {
            return Err(Error::InvalidParameter("need 0 < tau_d <= tau_c"));
        }
        if !bandwidth.is_finite() || bandwidth <= 0.0 {
            return Err(Error::InvalidParameter("bandwidth must be positive"));
        }
        Ok(ThroughputParams {
            alpha,
            tau_d,
            tau_c,
            bandwidth,
            prefactor,
        })
    }

    /// `(τ_d/τ_c)·2B` (or `·B`), bits/s per bit/s/Hz.
    pub fn scale(&self) -> f64 {
        self.tau_d / self.tau_c * self.prefactor.factor() * self.bandwidth
    }

    /// Rate of a single user, zero unless captured.
    pub fn user_rate(&self, sinr: f64) -> f64 {
        if sinr > self.alpha {
            self.scale() * libm::log2(1.0 + sinr)
        } else {
            0.0
        }
    }
}

/// `SINR_k > α`, strictly.
pub fn capture_outcomes(sinrs: &[f64], alpha: f64) -> Vec<bool> {
    sinrs.iter().map(|&s| s > alpha).collect()
}

/// Sum over users of `(τ_d/τ_c)·2B·log2(1 + 1{SINR > α}·SINR)`, bits/s.
pub fn sum_throughput(sinrs: &[f64], params: &ThroughputParams) -> f64 {
    sinrs.iter().map(|&s| params.user_rate(s)).sum()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SlotOutcome {
    pub captured: Vec<bool>,
    /// bits/s per active user
    pub rates: Vec<f64>,
    pub sum_throughput: f64,
}

pub fn slot_outcome(sinrs: &[f64], params: &ThroughputParams) -> SlotOutcome {
    let captured = capture_outcomes(sinrs, params.alpha);
    let rates: Vec<f64> = sinrs.iter().map(|&s| params.user_rate(s)).collect();
    let sum_throughput = rates.iter().sum();
    SlotOutcome {
        captured,
        rates,
        sum_throughput,
    }
}

/// Estimated probability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityEstimate {
    pub probability: f64,
    pub stderr: f64,
    pub samples: u64,
}

fn estimate(successes: u64, attempts: u64) -> Option<ProbabilityEstimate> {
    if attempts == 0 {
        return None;
    }
    let p = successes as f64 / attempts as f64;
    Some(ProbabilityEstimate {
        probability: p,
        stderr: libm::sqrt(p * (1.0 - p) / attempts as f64),
        samples: attempts,
    })
}

/// Running tally of capture outcomes, pooled over users and per user.
#[derive(Debug, Clone, Default)]
pub struct CaptureEstimator {
    attempts: u64,
    successes: u64,
    per_user: Vec<(u64, u64)>,
}

impl CaptureEstimator {
    pub fn new(users: usize) -> Self {
        CaptureEstimator {
            attempts: 0,
            successes: 0,
            per_user: alloc::vec![(0, 0); users],
        }
    }

    /// Records one slot. `captured` is aligned with `active`.
    pub fn record(&mut self, active: &[usize], captured: &[bool]) -> Result<()> {
        if active.len() != captured.len() {
            return Err(Error::ShapeMismatch {
                expected: active.len(),
                actual: captured.len(),
            });
        }
        if let Some(&index) = active.iter().find(|&&k| k >= self.per_user.len()) {
            return Err(Error::UserIndex {
                index,
                users: self.per_user.len(),
            });
        }
        for (&k, &ok) in active.iter().zip(captured) {
            let entry = &mut self.per_user[k];
            entry.0 += 1;
            entry.1 += u64::from(ok);
        }
        self.attempts += active.len() as u64;
        self.successes += captured.iter().filter(|&&c| c).count() as u64;
        Ok(())
    }

    /// Fraction of all transmitted packets that were captured.
    pub fn pooled(&self) -> Option<ProbabilityEstimate> {
        estimate(self.successes, self.attempts)
    }

    /// Fraction of the slots in which `user` was active that ended in capture.
    pub fn user(&self, user: usize) -> Option<ProbabilityEstimate> {
        self.per_user.get(user).and_then(|&(a, s)| estimate(s, a))
    }
}
