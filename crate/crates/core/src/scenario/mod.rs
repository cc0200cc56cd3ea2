//! Runnable scenarios: fiber + channel plan + receiver parameters, with
//! wavelength/length sweep execution, band averaging, multi-band loading
//! comparison and quantum-placement optimization.
//!
//! Sweep points are independent work items evaluated in parallel; results
//! are assembled in deterministic axis order (wavelength-major, then
//! length, then direction) regardless of completion order, so identical
//! inputs produce bit-identical outputs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fiber::FiberProfile;
use crate::interference::{ChannelPlan, Direction, LinkContext, NoiseBreakdown};
use crate::qkd::{
    bb84_skr, excess_noise_su, gmcs_skr_raw, noise_psd, qber, ChannelCondition,
    CvReceiverParams, Detection, DvReceiverParams,
};
use crate::units::{hz_to_nm, nm_to_hz};

/// ITU-T conventional transmission bands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Band {
    O,
    E,
    S,
    C,
    L,
    U,
}

impl Band {
    /// Wavelength range (nm), conventional edges.
    pub fn range_nm(self) -> (f64, f64) {
        match self {
            Band::O => (1260.0, 1360.0),
            Band::E => (1360.0, 1460.0),
            Band::S => (1460.0, 1530.0),
            Band::C => (1530.0, 1565.0),
            Band::L => (1565.0, 1625.0),
            Band::U => (1625.0, 1675.0),
        }
    }

    pub fn contains(self, lambda_nm: f64) -> bool {
        let (lo, hi) = self.range_nm();
        (lo..=hi).contains(&lambda_nm)
    }

    pub fn all() -> [Band; 6] {
        [Band::O, Band::E, Band::S, Band::C, Band::L, Band::U]
    }

    /// Band containing the wavelength, if any.
    pub fn of(lambda_nm: f64) -> Option<Band> {
        Band::all().into_iter().find(|b| b.contains(lambda_nm))
    }
}

/// Protocol selector for SKR sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    Bb84,
    GmcsHom,
    GmcsHet,
}

impl Protocol {
    pub fn label(self) -> &'static str {
        match self {
            Protocol::Bb84 => "bb84",
            Protocol::GmcsHom => "gmcs-hom",
            Protocol::GmcsHet => "gmcs-het",
        }
    }

    pub fn detection(self) -> Option<Detection> {
        match self {
            Protocol::Bb84 => None,
            Protocol::GmcsHom => Some(Detection::Homodyne),
            Protocol::GmcsHet => Some(Detection::Heterodyne),
        }
    }
}

/// A bound, runnable configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub fiber: FiberProfile,
    pub plan: ChannelPlan,
    /// Link length, m.
    pub length_m: f64,
    /// Directions evaluated by sweeps.
    pub directions: Vec<Direction>,
    pub dv: DvReceiverParams,
    pub cv: CvReceiverParams,
    /// Flat additional excess noise added to the coexistence-induced value
    /// in every CV evaluation, shot-noise units.
    pub extra_excess_noise_su: f64,
}

impl Scenario {
    pub fn new(fiber: FiberProfile, plan: ChannelPlan, length_m: f64) -> Result<Self> {
        let s = Scenario {
            fiber,
            plan,
            length_m,
            directions: vec![Direction::Forward, Direction::Backward],
            dv: DvReceiverParams::default(),
            cv: CvReceiverParams::ideal(Detection::Heterodyne),
            extra_excess_noise_su: 0.0,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.fiber.validate()?;
        self.plan.validate()?;
        self.dv.validate()?;
        self.cv.validate()?;
        if self.length_m <= 0.0 {
            return Err(Error::Config("link length must be positive".into()));
        }
        if self.extra_excess_noise_su < 0.0 {
            return Err(Error::Config("extra excess noise must be non-negative".into()));
        }
        if self.cv.beta_ec < 1.0 && self.cv.modulation_variance.is_none() {
            return Err(Error::Config(
                "beta_EC < 1 requires a finite modulation variance".into(),
            ));
        }
        if self.directions.is_empty() {
            return Err(Error::Config("at least one direction required".into()));
        }
        for ch in &self.plan.channels {
            let lambda = hz_to_nm(ch.frequency_hz);
            self.fiber.alpha(lambda)?;
        }
        Ok(())
    }

    fn cv_for(&self, detection: Detection) -> CvReceiverParams {
        CvReceiverParams { detection, ..self.cv }
    }
}

/// Protocol-level quantities at one sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolMetric {
    pub protocol: Protocol,
    /// Quantum bit error rate (DV protocols).
    pub qber: Option<f64>,
    /// Total excess noise in shot-noise units (CV protocols).
    pub excess_noise_su: Option<f64>,
    /// Clamped secret-key rate, bits/symbol.
    pub skr: f64,
    /// Clamped rate of the loss-limited reference (noise forced to zero).
    pub skr_loss_limited: f64,
}

/// One evaluated grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub wavelength_nm: f64,
    pub length_km: f64,
    pub direction: Direction,
    pub noise: NoiseBreakdown,
    pub transmittance: f64,
    pub metric: Option<ProtocolMetric>,
    /// Classical channel removed under the deallocation rule, if any.
    pub deallocated: Option<i64>,
}

/// Ordered sweep output (wavelength-major, then length, then direction).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub wavelengths_nm: Vec<f64>,
    pub lengths_km: Vec<f64>,
    pub records: Vec<SweepRecord>,
}

impl SweepResult {
    /// Highest-SKR record matching the direction; ties break toward the
    /// shorter wavelength (records are wavelength-ordered).
    pub fn argmax(&self, dir: Direction) -> Option<&SweepRecord> {
        self.records
            .iter()
            .filter(|r| r.direction == dir && r.metric.is_some())
            .fold(None, |best: Option<&SweepRecord>, r| match best {
                Some(b) if r.metric.unwrap().skr > b.metric.unwrap().skr => Some(r),
                None => Some(r),
                some => some,
            })
    }
}

/// Inclusive wavelength grid from `start_nm` to `stop_nm` in steps of
/// `step_nm`.
pub fn lambda_grid(start_nm: f64, stop_nm: f64, step_nm: f64) -> Vec<f64> {
    if step_nm <= 0.0 || stop_nm < start_nm {
        return Vec::new();
    }
    let n = ((stop_nm - start_nm) / step_nm).round() as usize;
    (0..=n).map(|j| start_nm + j as f64 * step_nm).filter(|&l| l <= stop_nm + 1e-9).collect()
}

struct PointOutcome {
    noise: NoiseBreakdown,
    transmittance: f64,
    deallocated: Option<i64>,
}

fn evaluate_point(
    ctx: &LinkContext<'_>,
    scenario: &Scenario,
    f_i_hz: f64,
    length_m: f64,
    dir: Direction,
) -> Result<PointOutcome> {
    let lambda = hz_to_nm(f_i_hz);
    let alpha = scenario.fiber.alpha(lambda).map_err(|e| point_context(e, lambda))?;
    let deallocated = ctx.plan.colliding_classical(f_i_hz);
    let noise = ctx
        .total_noise_excluding(f_i_hz, length_m, dir, deallocated)
        .map_err(|e| point_context(e, lambda))?;
    Ok(PointOutcome { noise, transmittance: (-alpha * length_m).exp(), deallocated })
}

fn point_context(e: Error, lambda_nm: f64) -> Error {
    match e {
        Error::Config(msg) => Error::Config(format!("at {lambda_nm:.3} nm: {msg}")),
        Error::Domain { quantity, value, min, max } => Error::Config(format!(
            "at {lambda_nm:.3} nm: {quantity} = {value} outside [{min}, {max}]"
        )),
        other => other,
    }
}

fn protocol_metric(
    scenario: &Scenario,
    protocol: Protocol,
    f_i_hz: f64,
    transmittance: f64,
    total_noise_w: f64,
) -> Result<ProtocolMetric> {
    let s_int = noise_psd(total_noise_w, scenario.plan.slot_bandwidth_hz);
    let cond = ChannelCondition {
        transmittance,
        noise_psd_w_per_hz: s_int,
        frequency_hz: f_i_hz,
    };
    match protocol.detection() {
        None => {
            let q = qber(&cond, &scenario.dv)?;
            let skr = bb84_skr(q, transmittance);
            let q0 = qber(
                &ChannelCondition { noise_psd_w_per_hz: 0.0, ..cond },
                &DvReceiverParams { dark_counts: 0.0, ..scenario.dv },
            )?;
            Ok(ProtocolMetric {
                protocol,
                qber: Some(q),
                excess_noise_su: None,
                skr,
                skr_loss_limited: bb84_skr(q0, transmittance),
            })
        }
        Some(detection) => {
            let xi = excess_noise_su(s_int, f_i_hz) + scenario.extra_excess_noise_su;
            let rx = scenario.cv_for(detection);
            let skr = gmcs_skr_raw(transmittance, xi, &rx)?.max(0.0);
            let skr_ll = gmcs_skr_raw(transmittance, 0.0, &rx)?.max(0.0);
            Ok(ProtocolMetric {
                protocol,
                qber: None,
                excess_noise_su: Some(xi),
                skr,
                skr_loss_limited: skr_ll,
            })
        }
    }
}

/// Per-mechanism noise spectrum over the wavelength grid (no protocol
/// conversion). Points falling on active classical slots follow the
/// deallocation rule.
pub fn noise_spectrum(scenario: &Scenario, lambda_grid_nm: &[f64]) -> Result<SweepResult> {
    sweep(scenario, lambda_grid_nm, &[scenario.length_m], None)
}

/// SKR versus wavelength at the scenario length.
pub fn skr_vs_wavelength(
    scenario: &Scenario,
    lambda_grid_nm: &[f64],
    protocol: Protocol,
) -> Result<SweepResult> {
    sweep(scenario, lambda_grid_nm, &[scenario.length_m], Some(protocol))
}

/// Full wavelength x length SKR map.
pub fn skr_map(
    scenario: &Scenario,
    lambda_grid_nm: &[f64],
    lengths_km: &[f64],
    protocol: Protocol,
) -> Result<SweepResult> {
    let lengths_m: Vec<f64> = lengths_km.iter().map(|&l| l * 1e3).collect();
    sweep(scenario, lambda_grid_nm, &lengths_m, Some(protocol))
}

fn sweep(
    scenario: &Scenario,
    lambda_grid_nm: &[f64],
    lengths_m: &[f64],
    protocol: Option<Protocol>,
) -> Result<SweepResult> {
    scenario.validate()?;
    if lengths_m.iter().any(|&l| l <= 0.0) {
        return Err(Error::Config("sweep lengths must be positive".into()));
    }
    let ctx = LinkContext::new(&scenario.fiber, &scenario.plan)?;

    let mut points = Vec::new();
    for &lambda in lambda_grid_nm {
        for &length in lengths_m {
            for &dir in &scenario.directions {
                points.push((lambda, length, dir));
            }
        }
    }

    let records: Result<Vec<SweepRecord>> = points
        .par_iter()
        .map(|&(lambda, length, dir)| {
            let f_i = nm_to_hz(lambda);
            let outcome = evaluate_point(&ctx, scenario, f_i, length, dir)?;
            let metric = match protocol {
                Some(p) => Some(
                    protocol_metric(scenario, p, f_i, outcome.transmittance, outcome.noise.total_w)
                        .map_err(|e| point_context(e, lambda))?,
                ),
                None => None,
            };
            Ok(SweepRecord {
                wavelength_nm: lambda,
                length_km: length / 1e3,
                direction: dir,
                noise: outcome.noise,
                transmittance: outcome.transmittance,
                metric,
                deallocated: outcome.deallocated,
            })
        })
        .collect();

    Ok(SweepResult {
        wavelengths_nm: lambda_grid_nm.to_vec(),
        lengths_km: lengths_m.iter().map(|&l| l / 1e3).collect(),
        records: records?,
    })
}

/// Mean SKR over grid slots inside a dedicated QKD band centered at
/// `center_nm` with width `width_nm`. The QKD band must not overlap the
/// classical allocation. Bands narrower than one slot evaluate the center
/// frequency alone.
pub fn band_average_skr(
    scenario: &Scenario,
    center_nm: f64,
    width_nm: f64,
    protocol: Protocol,
    dir: Direction,
) -> Result<f64> {
    scenario.validate()?;
    if width_nm < 0.0 {
        return Err(Error::Config("band width must be non-negative".into()));
    }
    let f_hi = nm_to_hz(center_nm - 0.5 * width_nm);
    let f_lo = nm_to_hz(center_nm + 0.5 * width_nm);

    // overlap check against the classical allocation
    let plan = &scenario.plan;
    let half_slot = 0.5 * plan.slot_bandwidth_hz;
    for ch in plan.classical() {
        if ch.frequency_hz + half_slot > f_lo && ch.frequency_hz - half_slot < f_hi {
            return Err(Error::Config(format!(
                "QKD band [{:.3}, {:.3}] nm overlaps classical channel {}",
                center_nm - 0.5 * width_nm,
                center_nm + 0.5 * width_nm,
                ch.index
            )));
        }
    }

    let ctx = LinkContext::new(&scenario.fiber, &scenario.plan)?;
    let k_lo = ((f_lo - plan.anchor_hz) / plan.spacing_hz).ceil() as i64;
    let k_hi = ((f_hi - plan.anchor_hz) / plan.spacing_hz).floor() as i64;
    let freqs: Vec<f64> = if k_lo > k_hi {
        vec![nm_to_hz(center_nm)]
    } else {
        (k_lo..=k_hi).map(|k| plan.slot_frequency_hz(k)).collect()
    };

    let rates: Result<Vec<f64>> = freqs
        .par_iter()
        .map(|&f_i| {
            let outcome = evaluate_point(&ctx, scenario, f_i, scenario.length_m, dir)?;
            let metric = protocol_metric(
                scenario,
                protocol,
                f_i,
                outcome.transmittance,
                outcome.noise.total_w,
            )?;
            Ok(metric.skr)
        })
        .collect();
    let rates = rates?;
    Ok(rates.iter().sum::<f64>() / rates.len() as f64)
}

/// Grid argmax of the SKR over the search domain, skipping points that fall
/// on active classical slots. Ties break toward the shorter wavelength.
pub fn optimize_placement(
    scenario: &Scenario,
    lambda_grid_nm: &[f64],
    protocol: Protocol,
    dir: Direction,
) -> Result<(f64, f64)> {
    scenario.validate()?;
    let ctx = LinkContext::new(&scenario.fiber, &scenario.plan)?;
    let evaluated: Result<Vec<Option<(f64, f64)>>> = lambda_grid_nm
        .par_iter()
        .map(|&lambda| {
            let f_i = nm_to_hz(lambda);
            if ctx.plan.colliding_classical(f_i).is_some() {
                return Ok(None);
            }
            let outcome = evaluate_point(&ctx, scenario, f_i, scenario.length_m, dir)?;
            let metric = protocol_metric(
                scenario,
                protocol,
                f_i,
                outcome.transmittance,
                outcome.noise.total_w,
            )?;
            Ok(Some((lambda, metric.skr)))
        })
        .collect();
    let mut best: Option<(f64, f64)> = None;
    for item in evaluated?.into_iter().flatten() {
        best = match best {
            Some((_, skr)) if item.1 > skr => Some(item),
            None => Some(item),
            keep => keep,
        };
    }
    best.ok_or_else(|| Error::Config("search domain contained no evaluable points".into()))
}

/// Run the SKR sweep for each named scenario variant (classical loading in
/// different bands).
pub fn multi_band_compare(
    scenarios: &[(String, Scenario)],
    lambda_grid_nm: &[f64],
    protocol: Protocol,
) -> Result<Vec<(String, SweepResult)>> {
    scenarios
        .iter()
        .map(|(name, s)| Ok((name.clone(), skr_vs_wavelength(s, lambda_grid_nm, protocol)?)))
        .collect()
}

/// Family of SKR curves under additional flat excess noise (CV protocols).
pub fn apply_extra_excess_noise(
    scenario: &Scenario,
    xi_add: &[f64],
    lambda_grid_nm: &[f64],
    protocol: Protocol,
) -> Result<Vec<(f64, SweepResult)>> {
    if protocol.detection().is_none() {
        return Err(Error::Config("extra excess noise applies to GMCS protocols".into()));
    }
    if xi_add.iter().any(|&x| x < 0.0) {
        return Err(Error::Config("extra excess noise must be non-negative".into()));
    }
    xi_add
        .iter()
        .map(|&x| {
            let mut s = scenario.clone();
            s.extra_excess_noise_su = scenario.extra_excess_noise_su + x;
            Ok((x, skr_vs_wavelength(&s, lambda_grid_nm, protocol)?))
        })
        .collect()
}

/// The C-band reference configuration: 88 channels at 50 GHz spacing,
/// -2 dBm per channel, leakage floor -100 dBm/GHz, 16-QAM kurtosis.
pub fn reference_cband_plan() -> ChannelPlan {
    ChannelPlan::uniform(
        191.58e12,
        50e9,
        88,
        crate::units::dbm_to_watt(-2.0),
        1.32,
        crate::units::dbm_per_ghz_to_w_per_hz(-100.0),
    )
}

/// S-band variant: 188 channels.
pub fn reference_sband_plan() -> ChannelPlan {
    ChannelPlan::uniform(
        195.96e12,
        50e9,
        188,
        crate::units::dbm_to_watt(-2.0),
        1.32,
        crate::units::dbm_per_ghz_to_w_per_hz(-100.0),
    )
}

/// L-band variant: 142 channels.
pub fn reference_lband_plan() -> ChannelPlan {
    ChannelPlan::uniform(
        184.51e12,
        50e9,
        142,
        crate::units::dbm_to_watt(-2.0),
        1.32,
        crate::units::dbm_per_ghz_to_w_per_hz(-100.0),
    )
}
