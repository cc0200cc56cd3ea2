//! Scenario configuration document.
//!
//! One TOML file with `fiber`, `plan`, `qkd` and `run` sections. Every key
//! carries its unit in the name; unknown keys are rejected. The Raman table
//! is either `bundled:silica` or a file path resolved against
//! `COEXIST_DATA_DIR` (when set) or the config file's directory.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Deserialize;

use coexist_core::fiber::DispersionModel;
use coexist_core::interference::{Channel, ChannelRole};
use coexist_core::qkd::Detection;
use coexist_core::scenario::Protocol;
use coexist_core::units::{dbm_per_ghz_to_w_per_hz, dbm_to_watt};
use coexist_core::{
    AttenuationModel, ChannelPlan, CvReceiverParams, Direction, DvReceiverParams, FiberProfile,
    OhPeak, RamanGainTable, Scenario, SellmeierCoefficients, StepIndexGeometry,
};

pub const DATA_DIR_ENV: &str = "COEXIST_DATA_DIR";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub fiber: FiberSection,
    pub plan: PlanSection,
    #[serde(default)]
    pub qkd: QkdSection,
    pub run: RunSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSection {
    pub sellmeier_b: [f64; 3],
    pub sellmeier_l_um: [f64; 3],
    pub core_radius_um: f64,
    pub index_contrast: f64,
    pub rayleigh_db_km_um4: f64,
    pub ir_amplitude_db_km: f64,
    pub ir_decay_um: f64,
    #[serde(default)]
    pub oh_peaks: Vec<OhPeakSection>,
    #[serde(default)]
    pub oh_scale: f64,
    pub gamma_ref_per_w_km: f64,
    pub rayleigh_ref_db_km: f64,
    pub reference_wavelength_nm: f64,
    pub raman_table: String,
    #[serde(default)]
    pub dispersion_model: DispersionModel,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OhPeakSection {
    pub center_nm: f64,
    pub width_nm: f64,
    pub height_db_km: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSection {
    pub anchor_thz: f64,
    pub spacing_ghz: f64,
    pub slot_bandwidth_ghz: f64,
    pub leakage_floor_dbm_per_ghz: f64,
    /// Uniform fill: number of classical channels starting at slot 0.
    #[serde(default)]
    pub channel_count: Option<u32>,
    #[serde(default)]
    pub power_dbm: Option<f64>,
    #[serde(default)]
    pub kurtosis: Option<f64>,
    /// Explicit channel list (alternative to the uniform fill).
    #[serde(default)]
    pub channels: Vec<ChannelSection>,
    /// Optional fixed quantum slot.
    #[serde(default)]
    pub quantum_slot: Option<i64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub index: i64,
    pub power_dbm: f64,
    pub kurtosis: f64,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct QkdSection {
    #[serde(default)]
    pub bb84_r_det: Option<f64>,
    #[serde(default)]
    pub bb84_dark_counts: Option<f64>,
    #[serde(default)]
    pub bb84_eta_rx: Option<f64>,
    #[serde(default)]
    pub gmcs_beta_ec: Option<f64>,
    #[serde(default)]
    pub gmcs_eta_rx: Option<f64>,
    #[serde(default)]
    pub gmcs_v_el_snu: Option<f64>,
    #[serde(default)]
    pub gmcs_modulation_variance_snu: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub length_km: f64,
    pub lambda_start_nm: f64,
    pub lambda_stop_nm: f64,
    pub lambda_step_nm: f64,
    /// fwd | bwd | both
    #[serde(default = "default_direction")]
    pub direction: String,
    #[serde(default)]
    pub protocol: Option<Protocol>,
    /// Length axis for skr-map.
    #[serde(default)]
    pub length_start_km: Option<f64>,
    #[serde(default)]
    pub length_stop_km: Option<f64>,
    #[serde(default)]
    pub length_step_km: Option<f64>,
    /// band-average settings
    #[serde(default)]
    pub band_center_start_nm: Option<f64>,
    #[serde(default)]
    pub band_center_stop_nm: Option<f64>,
    #[serde(default)]
    pub band_center_step_nm: Option<f64>,
    #[serde(default)]
    pub band_widths_nm: Vec<f64>,
    /// extra flat excess noise family (shot-noise units)
    #[serde(default)]
    pub extra_excess_noise_snu: Vec<f64>,
    /// multi-band classical loading variants
    #[serde(default)]
    pub multi_band: Vec<BandVariant>,
}

fn default_direction() -> String {
    "both".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandVariant {
    pub name: String,
    pub anchor_thz: f64,
    pub channel_count: u32,
}

impl ConfigDocument {
    pub fn load(path: &Path) -> anyhow::Result<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let doc: ConfigDocument = toml::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Ok((doc, base))
    }

    pub fn fiber_profile(&self, base_dir: &Path, oh_scale_override: Option<f64>) -> anyhow::Result<FiberProfile> {
        let f = &self.fiber;
        let raman = load_raman_table(&f.raman_table, base_dir)?;
        let profile = FiberProfile {
            sellmeier: SellmeierCoefficients { b: f.sellmeier_b, l_um: f.sellmeier_l_um },
            geometry: StepIndexGeometry {
                core_radius_um: f.core_radius_um,
                index_contrast: f.index_contrast,
            },
            attenuation: AttenuationModel {
                rayleigh_db_km_um4: f.rayleigh_db_km_um4,
                ir_amplitude_db_km: f.ir_amplitude_db_km,
                ir_decay_um: f.ir_decay_um,
                oh_peaks: f
                    .oh_peaks
                    .iter()
                    .map(|p| OhPeak {
                        center_nm: p.center_nm,
                        width_nm: p.width_nm,
                        height_db_km: p.height_db_km,
                    })
                    .collect(),
                oh_scale: oh_scale_override.unwrap_or(f.oh_scale),
            },
            raman,
            gamma_ref_per_w_m: f.gamma_ref_per_w_km / 1e3,
            rayleigh_ref_per_m: 10f64.powf(f.rayleigh_ref_db_km / 10.0) / 1e3,
            reference_wavelength_nm: f.reference_wavelength_nm,
            dispersion_model: f.dispersion_model,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn channel_plan(&self) -> anyhow::Result<ChannelPlan> {
        let p = &self.plan;
        self.plan_with(p.anchor_thz, p.channel_count)
    }

    /// Plan with an overridden anchor / count (multi-band variants).
    pub fn plan_with(&self, anchor_thz: f64, channel_count: Option<u32>) -> anyhow::Result<ChannelPlan> {
        let p = &self.plan;
        let anchor_hz = anchor_thz * 1e12;
        let spacing_hz = p.spacing_ghz * 1e9;
        let mut plan = if !p.channels.is_empty() {
            if channel_count.is_some() && p.channel_count.is_none() {
                bail!("channel_count override conflicts with an explicit channel list");
            }
            let channels = p
                .channels
                .iter()
                .map(|c| Channel {
                    index: c.index,
                    frequency_hz: anchor_hz + c.index as f64 * spacing_hz,
                    launch_power_w: dbm_to_watt(c.power_dbm),
                    kurtosis: c.kurtosis,
                    role: ChannelRole::Classical,
                })
                .collect();
            ChannelPlan {
                channels,
                anchor_hz,
                spacing_hz,
                slot_bandwidth_hz: p.slot_bandwidth_ghz * 1e9,
                leakage_floor_w_per_hz: dbm_per_ghz_to_w_per_hz(p.leakage_floor_dbm_per_ghz),
            }
        } else {
            let count = channel_count
                .or(p.channel_count)
                .context("plan needs channel_count or an explicit channel list")?;
            let power = p.power_dbm.context("uniform plan needs power_dbm")?;
            let kurtosis = p.kurtosis.context(
                "uniform plan needs a kurtosis value (modulation-format tables are external)",
            )?;
            let mut plan = ChannelPlan::uniform(
                anchor_hz,
                spacing_hz,
                count,
                dbm_to_watt(power),
                kurtosis,
                dbm_per_ghz_to_w_per_hz(p.leakage_floor_dbm_per_ghz),
            );
            plan.slot_bandwidth_hz = p.slot_bandwidth_ghz * 1e9;
            plan
        };
        if let Some(slot) = p.quantum_slot {
            plan.channels.push(Channel {
                index: slot,
                frequency_hz: plan.slot_frequency_hz(slot),
                launch_power_w: 0.0,
                kurtosis: 2.0,
                role: ChannelRole::Quantum,
            });
        }
        plan.validate()?;
        Ok(plan)
    }

    pub fn scenario(
        &self,
        base_dir: &Path,
        oh_scale_override: Option<f64>,
        direction_override: Option<&str>,
    ) -> anyhow::Result<Scenario> {
        let fiber = self.fiber_profile(base_dir, oh_scale_override)?;
        let plan = self.channel_plan()?;
        self.scenario_with(fiber, plan, direction_override)
    }

    pub fn scenario_with(
        &self,
        fiber: FiberProfile,
        plan: ChannelPlan,
        direction_override: Option<&str>,
    ) -> anyhow::Result<Scenario> {
        let q = &self.qkd;
        let dv = DvReceiverParams {
            r_det: q.bb84_r_det.unwrap_or(1.0),
            dark_counts: q.bb84_dark_counts.unwrap_or(0.0),
            eta_rx: q.bb84_eta_rx.unwrap_or(1.0),
        };
        let cv = CvReceiverParams {
            detection: Detection::Heterodyne,
            beta_ec: q.gmcs_beta_ec.unwrap_or(1.0),
            eta_rx: q.gmcs_eta_rx.unwrap_or(1.0),
            v_el: q.gmcs_v_el_snu.unwrap_or(0.0),
            modulation_variance: q.gmcs_modulation_variance_snu,
        };
        let dir_str = direction_override.unwrap_or(&self.run.direction);
        let directions = parse_directions(dir_str)?;
        let scenario = Scenario {
            fiber,
            plan,
            length_m: self.run.length_km * 1e3,
            directions,
            dv,
            cv,
            extra_excess_noise_su: 0.0,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn lambda_grid(&self) -> Vec<f64> {
        coexist_core::scenario::lambda_grid(
            self.run.lambda_start_nm,
            self.run.lambda_stop_nm,
            self.run.lambda_step_nm,
        )
    }

    pub fn length_grid_km(&self) -> anyhow::Result<Vec<f64>> {
        let (Some(start), Some(stop), Some(step)) = (
            self.run.length_start_km,
            self.run.length_stop_km,
            self.run.length_step_km,
        ) else {
            bail!("run section needs length_start_km/length_stop_km/length_step_km for maps");
        };
        if step <= 0.0 || stop < start || start <= 0.0 {
            bail!("invalid length grid");
        }
        let n = ((stop - start) / step).round() as usize;
        Ok((0..=n).map(|j| start + j as f64 * step).filter(|&l| l <= stop + 1e-9).collect())
    }
}

pub fn parse_directions(s: &str) -> anyhow::Result<Vec<Direction>> {
    match s {
        "fwd" => Ok(vec![Direction::Forward]),
        "bwd" => Ok(vec![Direction::Backward]),
        "both" => Ok(vec![Direction::Forward, Direction::Backward]),
        other => bail!("direction must be fwd, bwd or both (got {other:?})"),
    }
}

pub fn load_raman_table(spec: &str, base_dir: &Path) -> anyhow::Result<RamanGainTable> {
    if spec == "bundled:silica" {
        return Ok(RamanGainTable::default_silica());
    }
    let rel = Path::new(spec);
    let path = if rel.is_absolute() {
        rel.to_path_buf()
    } else if let Ok(dir) = std::env::var(DATA_DIR_ENV) {
        Path::new(&dir).join(rel)
    } else {
        base_dir.join(rel)
    };
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("reading Raman table {}", path.display()))?;
    Ok(RamanGainTable::parse(&text)?)
}
