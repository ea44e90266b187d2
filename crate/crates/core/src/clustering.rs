//! Which APs take part in detecting which user.
//!
//! User `k` is served by the AP subset `M_k`. The block-diagonal selection
//! matrix `D_k` keeps the `N` antenna entries of every AP in `M_k` and zeros
//! the rest; it is never materialized, masking works on antenna blocks.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::channel::zeros;
use crate::topology::{LargeScaleMatrix, Layout};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClusterMode {
    /// Every AP serves every user.
    Full,
    /// Each user is served by a subset of nearby APs.
    UserCentric,
    /// Each user is served by exactly one AP.
    SingleAp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterAssignment {
    subsets: Vec<Vec<usize>>,
    aps: usize,
    antennas_per_ap: usize,
    mode: ClusterMode,
}

impl ClusterAssignment {
    /// Validates and wraps per-user AP subsets. Subsets keep the given order.
    pub fn new(
        subsets: Vec<Vec<usize>>,
        aps: usize,
        antennas_per_ap: usize,
        mode: ClusterMode,
    ) -> Result<Self> {
        if aps == 0 || antennas_per_ap == 0 {
            return Err(Error::EmptyLayout);
        }
        for (k, subset) in subsets.iter().enumerate() {
            if subset.is_empty() {
                return Err(Error::EmptyCluster(k));
            }
            if let Some(&index) = subset.iter().find(|&&l| l >= aps) {
                return Err(Error::ApIndex { index, aps });
            }
            if mode == ClusterMode::SingleAp && subset.len() != 1 {
                return Err(Error::InvalidParameter("single-AP clusters must hold one AP"));
            }
        }
        Ok(ClusterAssignment {
            subsets,
            aps,
            antennas_per_ap,
            mode,
        })
    }

    pub fn mode(&self) -> ClusterMode {
        self.mode
    }

    pub fn num_users(&self) -> usize {
        self.subsets.len()
    }

    pub fn num_aps(&self) -> usize {
        self.aps
    }

    pub fn antennas_per_ap(&self) -> usize {
        self.antennas_per_ap
    }

    pub fn subset(&self, user: usize) -> &[usize] {
        &self.subsets[user]
    }

    pub fn contains(&self, user: usize, ap: usize) -> bool {
        self.subsets[user].contains(&ap)
    }

    /// Positions in the stacked `L·N` vector kept by `D_k`, ascending.
    pub fn antenna_indices(&self, user: usize) -> Vec<usize> {
        block_indices(&self.subsets[user], self.antennas_per_ap)
    }
}

pub(crate) fn block_indices(subset: &[usize], antennas: usize) -> Vec<usize> {
    let mut aps: Vec<usize> = subset.to_vec();
    aps.sort_unstable();
    aps.dedup();
    aps.iter()
        .flat_map(|&l| l * antennas..(l + 1) * antennas)
        .collect()
}

/// Every user served by all `L` APs.
pub fn full_clusters(aps: usize, users: usize, antennas_per_ap: usize) -> Result<ClusterAssignment> {
    let all: Vec<usize> = (0..aps).collect();
    ClusterAssignment::new(
        (0..users).map(|_| all.clone()).collect(),
        aps,
        antennas_per_ap,
        ClusterMode::Full,
    )
}

/// The `cluster_size` APs closest to each user (wrap-aware), nearest first.
/// Equal distances go to the lower AP index.
pub fn nearest_ap_clusters(layout: &Layout, cluster_size: usize) -> Result<ClusterAssignment> {
    let aps = layout.num_aps();
    if cluster_size == 0 || cluster_size > aps {
        return Err(Error::ClusterSize {
            size: cluster_size,
            aps,
        });
    }
    let subsets = (0..layout.num_users())
        .map(|k| {
            let distances: Vec<f64> = (0..aps).map(|l| layout.distance(k, l)).collect();
            k_smallest(&distances, cluster_size)
        })
        .collect();
    let mode = if cluster_size == aps {
        ClusterMode::Full
    } else {
        ClusterMode::UserCentric
    };
    ClusterAssignment::new(subsets, aps, layout.antennas_per_ap(), mode)
}

/// Serving AP per user: the one with the largest large-scale gain, lower index on ties.
pub fn strongest_ap_clusters(beta: &LargeScaleMatrix, antennas_per_ap: usize) -> Result<ClusterAssignment> {
    let subsets = (0..beta.users())
        .map(|k| {
            let row = beta.row(k);
            let best = (0..row.len()).fold(0, |best, l| if row[l] > row[best] { l } else { best });
            alloc::vec![best]
        })
        .collect();
    ClusterAssignment::new(subsets, beta.aps(), antennas_per_ap, ClusterMode::SingleAp)
}

fn k_smallest(values: &[f64], count: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    // Stable sort keeps index order among equal distances.
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    idx.truncate(count);
    idx
}

/// `D_k x`.
pub fn apply_mask(assignment: &ClusterAssignment, user: usize, x: &[Complex64]) -> Result<Vec<Complex64>> {
    if user >= assignment.num_users() {
        return Err(Error::UserIndex {
            index: user,
            users: assignment.num_users(),
        });
    }
    mask_blocks(
        assignment.subset(user),
        assignment.aps,
        assignment.antennas_per_ap,
        x,
    )
}

pub(crate) fn mask_blocks(
    subset: &[usize],
    aps: usize,
    antennas: usize,
    x: &[Complex64],
) -> Result<Vec<Complex64>> {
    if x.len() != aps * antennas {
        return Err(Error::ShapeMismatch {
            expected: aps * antennas,
            actual: x.len(),
        });
    }
    let mut out = zeros(x.len());
    for &i in &block_indices(subset, antennas) {
        out[i] = x[i];
    }
    Ok(out)
}

/// Users whose subset contains AP `ap`.
pub fn served_users(assignment: &ClusterAssignment, ap: usize) -> Result<Vec<usize>> {
    if ap >= assignment.aps {
        return Err(Error::ApIndex {
            index: ap,
            aps: assignment.aps,
        });
    }
    Ok((0..assignment.num_users())
        .filter(|&k| assignment.contains(k, ap))
        .collect())
}
