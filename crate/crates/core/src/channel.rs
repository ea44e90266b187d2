//! Block-fading uncorrelated Rayleigh channels.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::topology::LargeScaleMatrix;
use crate::{Error, Result};

/// `K × L × N` complex array, user-major then AP then antenna.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallScaleFading {
    users: usize,
    aps: usize,
    antennas: usize,
    data: Vec<Complex64>,
}

impl SmallScaleFading {
    pub fn from_vec(users: usize, aps: usize, antennas: usize, data: Vec<Complex64>) -> Result<Self> {
        let expected = users * aps * antennas;
        if data.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                actual: data.len(),
            });
        }
        Ok(SmallScaleFading {
            users,
            aps,
            antennas,
            data,
        })
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.users, self.aps, self.antennas)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }
}

/// One `CN(0, 1)` draw: real and imaginary parts each `N(0, 1/2)`.
pub fn sample_cn<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

pub fn sample_small_scale<R: Rng + ?Sized>(
    users: usize,
    aps: usize,
    antennas: usize,
    rng: &mut R,
) -> SmallScaleFading {
    let data = (0..users * aps * antennas).map(|_| sample_cn(rng)).collect();
    SmallScaleFading {
        users,
        aps,
        antennas,
        data,
    }
}

/// Channel vectors of every user towards every AP antenna for one coherence block.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    users: usize,
    aps: usize,
    antennas: usize,
    g: Vec<Complex64>,
    beta: LargeScaleMatrix,
}

/// `g_kl = √β_kl · h_kl`.
pub fn assemble_channel(beta: &LargeScaleMatrix, h: SmallScaleFading) -> Result<ChannelRealization> {
    if beta.users() != h.users {
        return Err(Error::ShapeMismatch {
            expected: beta.users(),
            actual: h.users,
        });
    }
    if beta.aps() != h.aps {
        return Err(Error::ShapeMismatch {
            expected: beta.aps(),
            actual: h.aps,
        });
    }
    let n = h.antennas;
    let mut g = h.data;
    for (idx, block) in g.chunks_mut(n.max(1)).enumerate() {
        let scale = libm::sqrt(beta.get(idx / h.aps, idx % h.aps));
        block.iter_mut().for_each(|v| *v *= scale);
    }
    Ok(ChannelRealization {
        users: h.users,
        aps: h.aps,
        antennas: n,
        g,
        beta: beta.clone(),
    })
}

impl ChannelRealization {
    /// Builds a realization directly from stacked user vectors of length `aps · antennas`.
    /// The large-scale matrix is set to all ones.
    pub fn from_user_vectors(aps: usize, antennas: usize, vectors: &[Vec<Complex64>]) -> Result<Self> {
        let dim = aps * antennas;
        if dim == 0 {
            return Err(Error::EmptyLayout);
        }
        let mut g = Vec::with_capacity(dim * vectors.len());
        for v in vectors {
            if v.len() != dim {
                return Err(Error::ShapeMismatch {
                    expected: dim,
                    actual: v.len(),
                });
            }
            g.extend_from_slice(v);
        }
        Ok(ChannelRealization {
            users: vectors.len(),
            aps,
            antennas,
            g,
            beta: LargeScaleMatrix::filled(vectors.len(), aps, 1.0),
        })
    }

    pub fn num_users(&self) -> usize {
        self.users
    }

    pub fn num_aps(&self) -> usize {
        self.aps
    }

    pub fn antennas_per_ap(&self) -> usize {
        self.antennas
    }

    /// Length of a stacked channel vector, `L·N`.
    pub fn dim(&self) -> usize {
        self.aps * self.antennas
    }

    pub fn beta(&self) -> &LargeScaleMatrix {
        &self.beta
    }

    /// Stacked vector `g_k = [g_k1; …; g_kL]`.
    pub fn user_vector(&self, user: usize) -> &[Complex64] {
        let d = self.dim();
        &self.g[user * d..(user + 1) * d]
    }

    /// `g_kl`, the `N` entries of user `k` at AP `l`.
    pub fn block(&self, user: usize, ap: usize) -> &[Complex64] {
        let start = (user * self.aps + ap) * self.antennas;
        &self.g[start..start + self.antennas]
    }
}

/// Zero vector of the given length.
pub(crate) fn zeros(len: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); len]
}
