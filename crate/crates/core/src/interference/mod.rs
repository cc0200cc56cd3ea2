//! Closed-form coexistence interference at a quantum channel.
//!
//! The total noise collected in the quantum slot at frequency `f_i` after a
//! span of length `L` is, per propagation direction,
//!
//! * forward:  SpRS + FWM + attenuated transmitter leakage,
//! * backward: SpRS + Rayleigh-backscattered transmitter leakage,
//!
//! with the longitudinal weights in [`kernels`]. [`propagate_ode`] integrates
//! the underlying evolution equation numerically as an independent reference
//! for the closed form.

mod combinatorics;
mod kernels;
mod ode;

pub use combinatorics::{fwm_count, fwm_count_brute, fwm_density};
pub use kernels::{
    chi_avg, chi_exact, delta_beta_full, delta_beta_grid, effective_length, omega_sprs,
    peak_length, Mechanism, PhaseMismatch,
};
pub use ode::{propagate_ode, OdeSolution, StepControl};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fiber::FiberProfile;
use crate::units::hz_to_nm;

/// Propagation direction of the quantum channel relative to the classical
/// signals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Co-propagating.
    Forward,
    /// Counter-propagating.
    Backward,
}

impl Direction {
    pub fn label(self) -> &'static str {
        match self {
            Direction::Forward => "fwd",
            Direction::Backward => "bwd",
        }
    }
}

/// Role of a slot in the WDM grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelRole {
    Classical,
    Quantum,
}

/// One WDM grid slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    /// Grid slot index (frequency = anchor + index * spacing).
    pub index: i64,
    /// Carrier frequency, Hz.
    pub frequency_hz: f64,
    /// Launch power summed over both polarizations, W. Quantum channels are
    /// treated as zero-power in every nonlinear sum regardless of this value.
    pub launch_power_w: f64,
    /// Modulation kurtosis entering degenerate FWM terms (2 for Gaussian).
    pub kurtosis: f64,
    pub role: ChannelRole,
}

/// Classical WDM grid plus the leakage floor of the classical transmitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelPlan {
    pub channels: Vec<Channel>,
    /// Frequency of grid slot 0, Hz.
    pub anchor_hz: f64,
    /// Grid spacing, Hz.
    pub spacing_hz: f64,
    /// Slot bandwidth, Hz (noise-collection bandwidth of one slot).
    pub slot_bandwidth_hz: f64,
    /// Leakage floor at the classical transmitter output, W/Hz.
    pub leakage_floor_w_per_hz: f64,
}

impl ChannelPlan {
    /// Evenly filled plan of `count` classical channels starting at slot 0.
    pub fn uniform(
        anchor_hz: f64,
        spacing_hz: f64,
        count: u32,
        launch_power_w: f64,
        kurtosis: f64,
        leakage_floor_w_per_hz: f64,
    ) -> Self {
        let channels = (0..count)
            .map(|i| Channel {
                index: i as i64,
                frequency_hz: anchor_hz + i as f64 * spacing_hz,
                launch_power_w,
                kurtosis,
                role: ChannelRole::Classical,
            })
            .collect();
        ChannelPlan {
            channels,
            anchor_hz,
            spacing_hz,
            slot_bandwidth_hz: spacing_hz,
            leakage_floor_w_per_hz,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.spacing_hz <= 0.0 || self.slot_bandwidth_hz <= 0.0 {
            return Err(Error::Config("grid spacing and slot bandwidth must be positive".into()));
        }
        if self.leakage_floor_w_per_hz < 0.0 {
            return Err(Error::Config("leakage floor must be non-negative".into()));
        }
        let mut quantum = 0;
        // duplicates are checked per role: a quantum marker sharing a
        // classical slot is a collision, reported at evaluation time
        let mut seen = std::collections::HashSet::new();
        for ch in &self.channels {
            if !seen.insert((ch.role, ch.index)) {
                return Err(Error::Config(format!("duplicate grid index {}", ch.index)));
            }
            if ch.launch_power_w < 0.0 {
                return Err(Error::Config(format!("negative launch power at slot {}", ch.index)));
            }
            let expected = self.anchor_hz + ch.index as f64 * self.spacing_hz;
            if (ch.frequency_hz - expected).abs() > 1e-3 {
                return Err(Error::Config(format!(
                    "slot {} frequency {} Hz inconsistent with anchor + index * spacing = {}",
                    ch.index, ch.frequency_hz, expected
                )));
            }
            if ch.role == ChannelRole::Quantum {
                quantum += 1;
            }
        }
        if quantum > 1 {
            return Err(Error::Config("at most one quantum channel per plan".into()));
        }
        Ok(())
    }

    /// Leakage power falling into one slot, W.
    pub fn leakage_power_w(&self) -> f64 {
        self.leakage_floor_w_per_hz * self.slot_bandwidth_hz
    }

    /// Active classical channels.
    pub fn classical(&self) -> impl Iterator<Item = &Channel> {
        self.channels.iter().filter(|c| c.role == ChannelRole::Classical)
    }

    /// The quantum channel, when the plan declares one.
    pub fn quantum(&self) -> Option<&Channel> {
        self.channels.iter().find(|c| c.role == ChannelRole::Quantum)
    }

    /// Nearest grid slot to `f_hz`.
    pub fn nearest_slot(&self, f_hz: f64) -> i64 {
        ((f_hz - self.anchor_hz) / self.spacing_hz).round() as i64
    }

    /// Frequency of grid slot `index`, Hz.
    pub fn slot_frequency_hz(&self, index: i64) -> f64 {
        self.anchor_hz + index as f64 * self.spacing_hz
    }

    /// Index of the active classical channel whose slot contains `f_hz`, if
    /// any.
    pub fn colliding_classical(&self, f_hz: f64) -> Option<i64> {
        let slot = self.nearest_slot(f_hz);
        let in_slot = (f_hz - self.slot_frequency_hz(slot)).abs() <= 0.5 * self.slot_bandwidth_hz;
        if !in_slot {
            return None;
        }
        self.classical().find(|c| c.index == slot).map(|c| c.index)
    }

    /// Copy of the plan with the classical channel at `index` removed
    /// (the deallocation rule for in-band quantum placement).
    pub fn deallocated(&self, index: i64) -> ChannelPlan {
        let mut plan = self.clone();
        plan.channels.retain(|c| !(c.role == ChannelRole::Classical && c.index == index));
        plan
    }
}

/// Per-mechanism interference power collected in the quantum slot, W.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseBreakdown {
    pub sprs_w: f64,
    pub fwm_w: f64,
    pub leakage_w: f64,
    /// Sum of the three mechanisms (set at construction, exact).
    pub total_w: f64,
}

impl NoiseBreakdown {
    pub fn new(sprs_w: f64, fwm_w: f64, leakage_w: f64) -> Self {
        NoiseBreakdown { sprs_w, fwm_w, leakage_w, total_w: sprs_w + fwm_w + leakage_w }
    }
}

/// Which FWM kernel the closed form uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FwmKernel {
    #[default]
    Exact,
    Averaged,
}

/// One SpRS contributor (diagnostics).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SprsContribution {
    pub pump_index: i64,
    pub power_w: f64,
}

/// One FWM contributor (diagnostics).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FwmContribution {
    pub h: i64,
    pub k: i64,
    pub l: i64,
    pub power_w: f64,
}

/// Noise with per-contributor diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseDetail {
    pub breakdown: NoiseBreakdown,
    pub sprs: Vec<SprsContribution>,
    pub fwm: Vec<FwmContribution>,
}

/// Precomputed link-level quantities for one (fiber, plan) pair.
///
/// Construction resolves the per-channel attenuations once; evaluations at
/// different quantum frequencies, lengths and directions are then pure and
/// can run in parallel.
pub struct LinkContext<'a> {
    pub profile: &'a FiberProfile,
    pub plan: &'a ChannelPlan,
    pumps: Vec<Pump>,
}

struct Pump {
    index: i64,
    frequency_hz: f64,
    power_w: f64,
    kurtosis: f64,
    alpha: f64,
}

impl<'a> LinkContext<'a> {
    pub fn new(profile: &'a FiberProfile, plan: &'a ChannelPlan) -> Result<Self> {
        plan.validate()?;
        let mut pumps = Vec::new();
        for ch in plan.classical() {
            let lambda = hz_to_nm(ch.frequency_hz);
            pumps.push(Pump {
                index: ch.index,
                frequency_hz: ch.frequency_hz,
                power_w: ch.launch_power_w,
                kurtosis: ch.kurtosis,
                alpha: profile.alpha(lambda)?,
            });
        }
        Ok(LinkContext { profile, plan, pumps })
    }

    /// Closed-form noise breakdown at quantum frequency `f_i_hz` after
    /// `length_m`. Fails if the quantum slot collides with an active
    /// classical channel; callers wanting the deallocation rule remove the
    /// colliding channel first (see [`ChannelPlan::deallocated`] or
    /// [`Self::total_noise_excluding`]).
    pub fn total_noise(
        &self,
        f_i_hz: f64,
        length_m: f64,
        dir: Direction,
    ) -> Result<NoiseBreakdown> {
        Ok(self.noise_impl(f_i_hz, length_m, dir, FwmKernel::Exact, None, None)?.breakdown)
    }

    /// Noise with the classical channel at `exclude` removed from every sum
    /// (the deallocation rule), without rebuilding the context.
    pub fn total_noise_excluding(
        &self,
        f_i_hz: f64,
        length_m: f64,
        dir: Direction,
        exclude: Option<i64>,
    ) -> Result<NoiseBreakdown> {
        Ok(self.noise_impl(f_i_hz, length_m, dir, FwmKernel::Exact, None, exclude)?.breakdown)
    }

    /// Same as [`Self::total_noise`] with an explicit FWM kernel choice.
    pub fn total_noise_with_kernel(
        &self,
        f_i_hz: f64,
        length_m: f64,
        dir: Direction,
        kernel: FwmKernel,
    ) -> Result<NoiseBreakdown> {
        Ok(self.noise_impl(f_i_hz, length_m, dir, kernel, None, None)?.breakdown)
    }

    /// Per-contributor diagnostics.
    pub fn total_noise_detailed(
        &self,
        f_i_hz: f64,
        length_m: f64,
        dir: Direction,
    ) -> Result<NoiseDetail> {
        self.noise_impl(f_i_hz, length_m, dir, FwmKernel::Exact, Some(()), None)
    }

    fn noise_impl(
        &self,
        f_i_hz: f64,
        length_m: f64,
        dir: Direction,
        kernel: FwmKernel,
        detail: Option<()>,
        exclude: Option<i64>,
    ) -> Result<NoiseDetail> {
        if length_m < 0.0 {
            return Err(Error::domain("length_m", length_m, 0.0, f64::INFINITY));
        }
        if let Some(idx) = self.plan.colliding_classical(f_i_hz) {
            if exclude != Some(idx) {
                return Err(Error::Config(format!(
                    "quantum slot at {:.6} THz collides with active classical channel {idx}",
                    f_i_hz / 1e12
                )));
            }
        }
        let lambda_i = hz_to_nm(f_i_hz);
        let alpha_i = self.profile.alpha(lambda_i)?;
        let b_ch = self.plan.slot_bandwidth_hz;

        let mut sprs = 0.0;
        let mut sprs_list = Vec::new();
        for p in &self.pumps {
            if Some(p.index) == exclude {
                continue;
            }
            let eta = self.profile.sprs_efficiency(f_i_hz, p.frequency_hz, b_ch)?;
            let w = eta * p.power_w * omega_sprs(alpha_i, p.alpha, length_m, dir);
            sprs += w;
            if detail.is_some() {
                sprs_list.push(SprsContribution { pump_index: p.index, power_w: w });
            }
        }

        let mut fwm = 0.0;
        let mut fwm_list = Vec::new();
        if dir == Direction::Forward && !self.pumps.is_empty() {
            let (f, list) =
                self.fwm_sum(f_i_hz, lambda_i, alpha_i, length_m, kernel, detail, exclude)?;
            fwm = f;
            fwm_list = list;
        }

        let p_leak = self.plan.leakage_power_w();
        let leakage = match dir {
            Direction::Forward => p_leak * (-alpha_i * length_m).exp(),
            Direction::Backward => {
                let gamma_r = self.profile.rayleigh_coeff(lambda_i)?;
                gamma_r * p_leak * -(-2.0 * alpha_i * length_m).exp_m1() / (2.0 * alpha_i)
            }
        };

        Ok(NoiseDetail {
            breakdown: NoiseBreakdown::new(sprs, fwm, leakage),
            sprs: sprs_list,
            fwm: fwm_list,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn fwm_sum(
        &self,
        f_i_hz: f64,
        lambda_i: f64,
        alpha_i: f64,
        length_m: f64,
        kernel: FwmKernel,
        detail: Option<()>,
        exclude: Option<i64>,
    ) -> Result<(f64, Vec<FwmContribution>)> {
        let plan = self.plan;
        let i_slot = plan.nearest_slot(f_i_hz);
        let slot_f = plan.slot_frequency_hz(i_slot);
        let on_grid = (f_i_hz - slot_f).abs() < 1e-6 * plan.spacing_hz;

        // quick support check: products only land within one band width of
        // the classical allocation
        let (idx_min, idx_max) = self
            .pumps
            .iter()
            .fold((i64::MAX, i64::MIN), |(lo, hi), p| (lo.min(p.index), hi.max(p.index)));
        let n_band = idx_max - idx_min;
        if i_slot < idx_min - n_band - 1 || i_slot > idx_max + n_band + 1 {
            return Ok((0.0, Vec::new()));
        }

        let beta2_i = self.profile.beta2(lambda_i)?;
        let gamma_eff = self.profile.gamma_eff(lambda_i)?;

        // dense index lookup over the pump span
        let span = (idx_max - idx_min + 1) as usize;
        let mut by_index: Vec<Option<usize>> = vec![None; span];
        for (j, p) in self.pumps.iter().enumerate() {
            if Some(p.index) != exclude {
                by_index[(p.index - idx_min) as usize] = Some(j);
            }
        }
        let lookup = |idx: i64| -> Option<&Pump> {
            if idx < idx_min || idx > idx_max {
                return None;
            }
            by_index[(idx - idx_min) as usize].map(|j| &self.pumps[j])
        };

        let mut total = 0.0;
        let mut list = Vec::new();
        for ph in &self.pumps {
            if Some(ph.index) == exclude {
                continue;
            }
            for pl in &self.pumps {
                if Some(pl.index) == exclude {
                    continue;
                }
                let k = ph.index + pl.index - i_slot;
                if k == i_slot {
                    continue;
                }
                let Some(pk) = lookup(k) else { continue };
                let delta_beta = if on_grid {
                    delta_beta_grid(beta2_i, i_slot, ph.index, k, pl.index, plan.spacing_hz)?
                } else {
                    delta_beta_full(
                        beta2_i,
                        f_i_hz,
                        ph.frequency_hz,
                        pk.frequency_hz,
                        pl.frequency_hz,
                    )
                };
                let mismatch = PhaseMismatch {
                    delta_alpha: alpha_i - ph.alpha - pk.alpha - pl.alpha,
                    delta_beta,
                };
                let degenerate = ph.index == pl.index;
                let chi = match kernel {
                    FwmKernel::Exact => {
                        chi_exact(mismatch, alpha_i, length_m, ph.kurtosis, degenerate)
                    }
                    FwmKernel::Averaged => {
                        chi_avg(mismatch, alpha_i, length_m, ph.kurtosis, degenerate)
                    }
                };
                let w = gamma_eff * gamma_eff * ph.power_w * pk.power_w * pl.power_w * chi;
                total += w;
                if detail.is_some() {
                    list.push(FwmContribution { h: ph.index, k, l: pl.index, power_w: w });
                }
            }
        }
        Ok((total, list))
    }
}

/// Convenience wrapper building a one-shot [`LinkContext`].
pub fn total_noise(
    plan: &ChannelPlan,
    profile: &FiberProfile,
    f_i_hz: f64,
    length_m: f64,
    dir: Direction,
) -> Result<NoiseBreakdown> {
    LinkContext::new(profile, plan)?.total_noise(f_i_hz, length_m, dir)
}
