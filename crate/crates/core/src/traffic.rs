//! Per-slot user activity: every user transmits independently with
//! probability `π`, so the number of active users is `Binomial(K, π)`.

use alloc::vec::Vec;

use rand::Rng;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SlotActivity {
    active: Vec<usize>,
}

impl SlotActivity {
    /// Active set from explicit user indices (sorted, deduplicated).
    pub fn from_users(mut users: Vec<usize>) -> Self {
        users.sort_unstable();
        users.dedup();
        SlotActivity { active: users }
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    /// Number of active users `K_a`.
    pub fn k_a(&self) -> usize {
        self.active.len()
    }

    pub fn is_active(&self, user: usize) -> bool {
        self.active.binary_search(&user).is_ok()
    }

    /// Position of `user` inside [`active`](Self::active).
    pub fn position(&self, user: usize) -> Option<usize> {
        self.active.binary_search(&user).ok()
    }
}

fn check_probability(pi: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&pi) {
        return Err(Error::Probability(pi));
    }
    Ok(())
}

/// Draws one uniform per user and activates those below `pi`.
pub fn sample_activity<R: Rng + ?Sized>(users: usize, pi: f64, rng: &mut R) -> Result<SlotActivity> {
    check_probability(pi)?;
    let uniforms: Vec<f64> = (0..users).map(|_| rng.random::<f64>()).collect();
    activity_from_uniforms(&uniforms, pi)
}

/// User `k` is active iff `uniforms[k] < pi`. Reusing the same uniforms at a
/// larger `pi` yields a superset.
pub fn activity_from_uniforms(uniforms: &[f64], pi: f64) -> Result<SlotActivity> {
    check_probability(pi)?;
    Ok(SlotActivity {
        active: uniforms
            .iter()
            .enumerate()
            .filter(|(_, &u)| u < pi)
            .map(|(k, _)| k)
            .collect(),
    })
}
