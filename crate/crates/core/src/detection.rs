//! Uplink SINR for the four receiver architectures.
//!
//! All of them are MMSE receivers restricted to a set of antennas:
//!
//! * cell-free (full): every antenna of every AP, processed jointly at the CPU;
//! * user-centric: the antennas of the APs in the user's cluster `M_k`;
//! * cellular massive MIMO: all antennas of a single co-located site;
//! * small-cell: the antennas of the user's serving AP only.
//!
//! With `S` the kept antennas and `Q_S = Σ_{i≠k} p_i g_i[S] g_i[S]ᴴ + σ² I`,
//! the SINR is `p_k g_k[S]ᴴ Q_S⁻¹ g_k[S]`. The per-user functions evaluate
//! that form directly; [`SlotDetector`] factors the covariance including the
//! user itself once per antenna set and recovers the same value through
//! `SINR = a / (1 − a)`, `a = p_k g_k[S]ᴴ R_S⁻¹ g_k[S]`.
//!
//! Covariance factors are accumulated from `σ I` by rank-one updates rather
//! than by factoring the summed matrix. Strong users near an AP make `Q_S`
//! badly conditioned, and the summed form loses about twice as many digits.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::channel::{zeros, ChannelRealization};
use crate::clustering::{block_indices, ClusterAssignment, ClusterMode};
use crate::linalg::{inner, norm_sqr, Cholesky};
use crate::traffic::SlotActivity;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ReceiverMode {
    CellFreeFull,
    UserCentric,
    CellularMimo,
    SmallCell,
}

impl ReceiverMode {
    pub const ALL: [ReceiverMode; 4] = [
        ReceiverMode::CellFreeFull,
        ReceiverMode::UserCentric,
        ReceiverMode::CellularMimo,
        ReceiverMode::SmallCell,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReceiverMode::CellFreeFull => "cell-free-full",
            ReceiverMode::UserCentric => "user-centric",
            ReceiverMode::CellularMimo => "cellular-mimo",
            ReceiverMode::SmallCell => "small-cell",
        }
    }
}

impl fmt::Display for ReceiverMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReceiverMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ReceiverMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or(Error::InvalidParameter("unknown receiver mode"))
    }
}

/// How a small-cell user picks its AP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum SmallCellAssociation {
    /// The AP with the largest large-scale gain, fixed by the cluster assignment.
    #[default]
    StrongestPath,
    /// Whichever AP gives the highest SINR in the current slot.
    BestInstantaneous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverConfig {
    pub mode: ReceiverMode,
    /// Noise power per antenna, watts.
    pub noise_power: f64,
    /// Transmit power of each user, watts, indexed by user.
    pub tx_powers: Vec<f64>,
    /// Capture threshold, linear.
    pub capture_threshold: f64,
    pub association: SmallCellAssociation,
}

impl ReceiverConfig {
    pub fn new(
        mode: ReceiverMode,
        noise_power: f64,
        tx_powers: Vec<f64>,
        capture_threshold: f64,
    ) -> Result<Self> {
        if !noise_power.is_finite() || noise_power <= 0.0 {
            return Err(Error::InvalidParameter("noise power must be positive"));
        }
        if tx_powers.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidParameter("transmit powers must be non-negative"));
        }
        if !capture_threshold.is_finite() || capture_threshold <= 0.0 {
            return Err(Error::InvalidParameter("capture threshold must be positive"));
        }
        Ok(ReceiverConfig {
            mode,
            noise_power,
            tx_powers,
            capture_threshold,
            association: SmallCellAssociation::default(),
        })
    }

    /// Same transmit power for `users` users.
    pub fn uniform(
        mode: ReceiverMode,
        noise_power: f64,
        tx_power: f64,
        users: usize,
        capture_threshold: f64,
    ) -> Result<Self> {
        Self::new(mode, noise_power, alloc::vec![tx_power; users], capture_threshold)
    }

    pub fn with_mode(mut self, mode: ReceiverMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_association(mut self, association: SmallCellAssociation) -> Self {
        self.association = association;
        self
    }

    pub fn power(&self, user: usize) -> f64 {
        self.tx_powers[user]
    }
}

/// SINR per active user, in the order of [`SlotActivity::active`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SinrVector {
    users: Vec<usize>,
    values: Vec<f64>,
}

impl SinrVector {
    pub fn new(users: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if users.len() != values.len() {
            return Err(Error::ShapeMismatch {
                expected: users.len(),
                actual: values.len(),
            });
        }
        Ok(SinrVector { users, values })
    }

    pub fn users(&self) -> &[usize] {
        &self.users
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, user: usize) -> Option<f64> {
        self.users.iter().position(|&u| u == user).map(|i| self.values[i])
    }
}

fn check_inputs(ch: &ChannelRealization, act: &SlotActivity, cfg: &ReceiverConfig) -> Result<()> {
    if cfg.tx_powers.len() < ch.num_users() {
        return Err(Error::ShapeMismatch {
            expected: ch.num_users(),
            actual: cfg.tx_powers.len(),
        });
    }
    if let Some(&index) = act.active().iter().find(|&&k| k >= ch.num_users()) {
        return Err(Error::UserIndex {
            index,
            users: ch.num_users(),
        });
    }
    Ok(())
}

fn check_user(ch: &ChannelRealization, act: &SlotActivity, cfg: &ReceiverConfig, user: usize) -> Result<()> {
    check_inputs(ch, act, cfg)?;
    if !act.is_active(user) {
        return Err(Error::InactiveUser(user));
    }
    Ok(())
}

fn check_assignment(ch: &ChannelRealization, assignment: &ClusterAssignment) -> Result<()> {
    if assignment.num_aps() != ch.num_aps() || assignment.antennas_per_ap() != ch.antennas_per_ap() {
        return Err(Error::ShapeMismatch {
            expected: ch.dim(),
            actual: assignment.num_aps() * assignment.antennas_per_ap(),
        });
    }
    if assignment.num_users() < ch.num_users() {
        return Err(Error::ShapeMismatch {
            expected: ch.num_users(),
            actual: assignment.num_users(),
        });
    }
    Ok(())
}

fn gather(v: &[Complex64], coords: &[usize]) -> Vec<Complex64> {
    coords.iter().map(|&i| v[i]).collect()
}

/// Cholesky factor of `Σ p_i g_i[S] g_i[S]ᴴ + σ² I` over active users,
/// optionally skipping one, built by rank-one updates of `σ I`.
fn restricted_factor(
    ch: &ChannelRealization,
    act: &SlotActivity,
    cfg: &ReceiverConfig,
    coords: &[usize],
    skip: Option<usize>,
) -> Result<Cholesky> {
    let mut chol = Cholesky::scaled_identity(coords.len(), cfg.noise_power)?;
    let mut x = zeros(coords.len());
    for &i in act.active().iter().filter(|&&i| Some(i) != skip) {
        let amp = libm::sqrt(cfg.power(i));
        let g = ch.user_vector(i);
        for (xi, &c) in x.iter_mut().zip(coords) {
            *xi = g[c] * amp;
        }
        chol.rank_one_update(&x)?;
    }
    Ok(chol)
}

/// MMSE SINR of `user` when only the antennas in `coords` (ascending stacked
/// indices) take part in detection. An empty set gives zero.
pub fn restricted_mmse_sinr(
    ch: &ChannelRealization,
    act: &SlotActivity,
    cfg: &ReceiverConfig,
    user: usize,
    coords: &[usize],
) -> Result<f64> {
    check_user(ch, act, cfg, user)?;
    if let Some(&bad) = coords.iter().find(|&&c| c >= ch.dim()) {
        return Err(Error::UserIndex {
            index: bad,
            users: ch.dim(),
        });
    }
    if coords.is_empty() {
        return Ok(0.0);
    }
    let chol = restricted_factor(ch, act, cfg, coords, Some(user))?;
    let gk = gather(ch.user_vector(user), coords);
    Ok(cfg.power(user) * chol.inverse_quadratic_form(&gk)?)
}

/// Stacked antenna indices that detect `user` under the configured mode.
pub fn detection_antennas(
    ch: &ChannelRealization,
    act: &SlotActivity,
    assignment: &ClusterAssignment,
    cfg: &ReceiverConfig,
    user: usize,
) -> Result<Vec<usize>> {
    antennas_for(cfg.mode, ch, act, assignment, cfg, user)
}

fn antennas_for(
    mode: ReceiverMode,
    ch: &ChannelRealization,
    act: &SlotActivity,
    assignment: &ClusterAssignment,
    cfg: &ReceiverConfig,
    user: usize,
) -> Result<Vec<usize>> {
    match mode {
        ReceiverMode::CellFreeFull => Ok((0..ch.dim()).collect()),
        ReceiverMode::CellularMimo => {
            if ch.num_aps() != 1 {
                return Err(Error::ModeMismatch(mode));
            }
            Ok((0..ch.dim()).collect())
        }
        ReceiverMode::UserCentric => {
            check_assignment(ch, assignment)?;
            Ok(assignment.antenna_indices(user))
        }
        ReceiverMode::SmallCell => {
            let ap = serving_ap(ch, act, assignment, cfg, user)?;
            Ok(block_indices(&[ap], ch.antennas_per_ap()))
        }
    }
}

/// Serving AP of a small-cell user.
pub fn serving_ap(
    ch: &ChannelRealization,
    act: &SlotActivity,
    assignment: &ClusterAssignment,
    cfg: &ReceiverConfig,
    user: usize,
) -> Result<usize> {
    match cfg.association {
        SmallCellAssociation::StrongestPath => {
            check_assignment(ch, assignment)?;
            if assignment.mode() != ClusterMode::SingleAp {
                return Err(Error::InvalidParameter("small-cell needs a single-AP assignment"));
            }
            Ok(assignment.subset(user)[0])
        }
        SmallCellAssociation::BestInstantaneous => best_instantaneous_ap(ch, act, cfg, user).map(|(l, _)| l),
    }
}

/// AP with the highest local MMSE SINR for `user` (lower index on ties) and that SINR.
pub fn best_instantaneous_ap(
    ch: &ChannelRealization,
    act: &SlotActivity,
    cfg: &ReceiverConfig,
    user: usize,
) -> Result<(usize, f64)> {
    let n = ch.antennas_per_ap();
    let mut best = (0, f64::NEG_INFINITY);
    for ap in 0..ch.num_aps() {
        let s = restricted_mmse_sinr(ch, act, cfg, user, &block_indices(&[ap], n))?;
        if s > best.1 {
            best = (ap, s);
        }
    }
    Ok(best)
}

/// Centralized MMSE SINR with the user's mask; full cell-free mode keeps every antenna.
pub fn mmse_sinr(
    ch: &ChannelRealization,
    act: &SlotActivity,
    assignment: &ClusterAssignment,
    cfg: &ReceiverConfig,
    user: usize,
) -> Result<f64> {
    if !matches!(cfg.mode, ReceiverMode::CellFreeFull | ReceiverMode::UserCentric) {
        return Err(Error::ModeMismatch(cfg.mode));
    }
    let coords = detection_antennas(ch, act, assignment, cfg, user)?;
    restricted_mmse_sinr(ch, act, cfg, user, &coords)
}

/// Co-located massive MIMO: MMSE over all antennas of a single-AP channel.
pub fn cellular_sinr(
    ch: &ChannelRealization,
    act: &SlotActivity,
    cfg: &ReceiverConfig,
    user: usize,
) -> Result<f64> {
    if cfg.mode != ReceiverMode::CellularMimo || ch.num_aps() != 1 {
        return Err(Error::ModeMismatch(cfg.mode));
    }
    let coords: Vec<usize> = (0..ch.dim()).collect();
    restricted_mmse_sinr(ch, act, cfg, user, &coords)
}

/// Small-cell SINR: the serving AP detects alone. With one antenna per AP this
/// is `p_k|g_kl|² / (Σ_{i≠k} p_i|g_il|² + σ²)`; with more it is the AP's local MMSE.
pub fn smallcell_sinr(
    ch: &ChannelRealization,
    act: &SlotActivity,
    assignment: &ClusterAssignment,
    cfg: &ReceiverConfig,
    user: usize,
) -> Result<f64> {
    if cfg.mode != ReceiverMode::SmallCell {
        return Err(Error::ModeMismatch(cfg.mode));
    }
    check_user(ch, act, cfg, user)?;
    let coords = detection_antennas(ch, act, assignment, cfg, user)?;
    restricted_mmse_sinr(ch, act, cfg, user, &coords)
}

/// MMSE combining vector `p_k (Σ_i p_i D g_i g_iᴴ D + σ² I)⁻¹ D g_k` (the sum
/// includes the user itself). Entries outside the detection antennas are zero.
pub fn mmse_combiner(
    ch: &ChannelRealization,
    act: &SlotActivity,
    assignment: &ClusterAssignment,
    cfg: &ReceiverConfig,
    user: usize,
) -> Result<Vec<Complex64>> {
    check_user(ch, act, cfg, user)?;
    let coords = detection_antennas(ch, act, assignment, cfg, user)?;
    let mut v = zeros(ch.dim());
    if coords.is_empty() {
        return Ok(v);
    }
    let x = restricted_factor(ch, act, cfg, &coords, None)?.solve(&gather(ch.user_vector(user), &coords))?;
    let p = cfg.power(user);
    for (&c, xi) in coords.iter().zip(x) {
        v[c] = xi * p;
    }
    Ok(v)
}

fn mask_to(v: &[Complex64], coords: &[usize]) -> Vec<Complex64> {
    let mut out = zeros(v.len());
    for &c in coords {
        out[c] = v[c];
    }
    out
}

/// SINR obtained with an arbitrary combining vector `v`:
/// `p_k|vᴴDg_k|² / (Σ_{i≠k} p_i|vᴴDg_i|² + σ²‖Dv‖²)`.
pub fn sinr_from_combiner(
    v: &[Complex64],
    ch: &ChannelRealization,
    act: &SlotActivity,
    assignment: &ClusterAssignment,
    cfg: &ReceiverConfig,
    user: usize,
) -> Result<f64> {
    check_user(ch, act, cfg, user)?;
    if v.len() != ch.dim() {
        return Err(Error::ShapeMismatch {
            expected: ch.dim(),
            actual: v.len(),
        });
    }
    let coords = detection_antennas(ch, act, assignment, cfg, user)?;
    let u = mask_to(v, &coords);
    let u_norm = norm_sqr(&u);
    if u_norm == 0.0 {
        return Err(Error::ZeroCombiner);
    }
    let mut interference = 0.0;
    for &i in act.active().iter().filter(|&&i| i != user) {
        interference += cfg.power(i) * inner(&u, ch.user_vector(i)).norm_sqr();
    }
    let desired = cfg.power(user) * inner(&u, ch.user_vector(user)).norm_sqr();
    Ok(desired / (interference + cfg.noise_power * u_norm))
}

/// Soft estimate `ŝ_k = v_kᴴ D_k y` split into its three contributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolEstimate {
    pub desired: Complex64,
    pub interference: Complex64,
    pub noise: Complex64,
}

impl SymbolEstimate {
    pub fn total(&self) -> Complex64 {
        self.desired + self.interference + self.noise
    }
}

/// Applies the MMSE combiner of `user` to `y = Σ_i g_i s_i + n`.
/// `symbols` is aligned with [`SlotActivity::active`]; `noise` has length `L·N`.
pub fn symbol_estimate(
    ch: &ChannelRealization,
    act: &SlotActivity,
    assignment: &ClusterAssignment,
    cfg: &ReceiverConfig,
    user: usize,
    symbols: &[Complex64],
    noise: &[Complex64],
) -> Result<SymbolEstimate> {
    if symbols.len() != act.k_a() {
        return Err(Error::ShapeMismatch {
            expected: act.k_a(),
            actual: symbols.len(),
        });
    }
    if noise.len() != ch.dim() {
        return Err(Error::ShapeMismatch {
            expected: ch.dim(),
            actual: noise.len(),
        });
    }
    let v = mmse_combiner(ch, act, assignment, cfg, user)?;
    let coords = detection_antennas(ch, act, assignment, cfg, user)?;
    let u = mask_to(&v, &coords);
    let mut est = SymbolEstimate {
        desired: Complex64::new(0.0, 0.0),
        interference: Complex64::new(0.0, 0.0),
        noise: inner(&u, noise),
    };
    for (&i, s) in act.active().iter().zip(symbols) {
        let term = inner(&u, ch.user_vector(i)) * s;
        if i == user {
            est.desired = term;
        } else {
            est.interference += term;
        }
    }
    Ok(est)
}

/// Below this value of `1 − a` the batch path falls back to the direct form.
const LEMMA_FLOOR: f64 = 1e-6;

/// Slot-level batch detector.
///
/// Factors `R_S = Σ_i p_i g_i[S] g_i[S]ᴴ + σ² I` over all active users once
/// per distinct antenna set `S` and shares it among the users detected on `S`.
pub struct SlotDetector<'a> {
    ch: &'a ChannelRealization,
    act: &'a SlotActivity,
    cfg: &'a ReceiverConfig,
}

impl<'a> SlotDetector<'a> {
    pub fn new(ch: &'a ChannelRealization, act: &'a SlotActivity, cfg: &'a ReceiverConfig) -> Result<Self> {
        check_inputs(ch, act, cfg)?;
        Ok(SlotDetector { ch, act, cfg })
    }

    fn factor_subset(&self, coords: &[usize]) -> Result<Cholesky> {
        restricted_factor(self.ch, self.act, self.cfg, coords, None)
    }

    fn sinr_with(&self, chol: &Cholesky, coords: &[usize], user: usize) -> Result<f64> {
        if coords.is_empty() {
            return Ok(0.0);
        }
        let a = self.cfg.power(user) * chol.inverse_quadratic_form(&gather(self.ch.user_vector(user), coords))?;
        let rest = 1.0 - a;
        if rest > LEMMA_FLOOR && a.is_finite() {
            Ok(a / rest)
        } else {
            restricted_mmse_sinr(self.ch, self.act, self.cfg, user, coords)
        }
    }

    /// SINR of every active user, with `antennas(user)` choosing its detection antennas.
    pub fn sinrs_with<F>(&self, mut antennas: F) -> Result<SinrVector>
    where
        F: FnMut(usize) -> Result<Vec<usize>>,
    {
        let mut cache: BTreeMap<Vec<usize>, Cholesky> = BTreeMap::new();
        let mut values = Vec::with_capacity(self.act.k_a());
        for &k in self.act.active() {
            let coords = antennas(k)?;
            if !cache.contains_key(&coords) {
                let chol = self.factor_subset(&coords)?;
                cache.insert(coords.clone(), chol);
            }
            values.push(self.sinr_with(&cache[&coords], &coords, k)?);
        }
        SinrVector::new(self.act.active().to_vec(), values)
    }

    /// Small-cell SINRs when every user picks its best AP in this slot.
    fn best_instantaneous(&self) -> Result<SinrVector> {
        let n = self.ch.antennas_per_ap();
        let blocks: Vec<Vec<usize>> = (0..self.ch.num_aps()).map(|l| block_indices(&[l], n)).collect();
        let factors = blocks
            .iter()
            .map(|b| self.factor_subset(b))
            .collect::<Result<Vec<_>>>()?;
        let mut values = Vec::with_capacity(self.act.k_a());
        for &k in self.act.active() {
            let mut best = f64::NEG_INFINITY;
            for (chol, coords) in factors.iter().zip(&blocks) {
                best = best.max(self.sinr_with(chol, coords, k)?);
            }
            values.push(best);
        }
        SinrVector::new(self.act.active().to_vec(), values)
    }

    /// SINRs of all active users under the configured receiver mode.
    pub fn detect(&self, assignment: &ClusterAssignment) -> Result<SinrVector> {
        self.detect_mode(self.cfg.mode, assignment)
    }

    /// SINRs under `mode`. The assignment is
    /// ignored by the full cell-free and cellular modes.
    pub fn detect_mode(&self, mode: ReceiverMode, assignment: &ClusterAssignment) -> Result<SinrVector> {
        let (ch, act, cfg) = (self.ch, self.act, self.cfg);
        match mode {
            ReceiverMode::CellFreeFull | ReceiverMode::CellularMimo => {
                if mode == ReceiverMode::CellularMimo && ch.num_aps() != 1 {
                    return Err(Error::ModeMismatch(mode));
                }
                let all: Vec<usize> = (0..ch.dim()).collect();
                self.sinrs_with(|_| Ok(all.clone()))
            }
            ReceiverMode::SmallCell if cfg.association == SmallCellAssociation::BestInstantaneous => {
                self.best_instantaneous()
            }
            ReceiverMode::UserCentric | ReceiverMode::SmallCell => {
                self.sinrs_with(|k| antennas_for(mode, ch, act, assignment, cfg, k))
            }
        }
    }
}

/// One-shot form of [`SlotDetector::detect`].
pub fn detect_slot(
    ch: &ChannelRealization,
    act: &SlotActivity,
    assignment: &ClusterAssignment,
    cfg: &ReceiverConfig,
) -> Result<SinrVector> {
    SlotDetector::new(ch, act, cfg)?.detect(assignment)
}
