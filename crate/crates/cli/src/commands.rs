//! Subcommand implementations.

use std::fmt;
use std::path::Path;

use anyhow::bail;

use coexist_core::interference::{
    chi_avg, fwm_count, fwm_count_brute, fwm_density, propagate_ode, PhaseMismatch, StepControl,
};
use coexist_core::qkd::{gmcs_skr_asymptotic_raw, gmcs_skr_finite_raw};
use coexist_core::scenario::{
    apply_extra_excess_noise, band_average_skr, lambda_grid, multi_band_compare, noise_spectrum,
    skr_map, skr_vs_wavelength, Protocol, Scenario, SweepRecord, SweepResult,
};
use coexist_core::units::{db_per_km_to_nat_per_m, nm_to_hz};

use crate::config::ConfigDocument;
use crate::output::{opt_num, Cell, OutputFormat, Table};

/// Marker for failures that must map to the numeric-failure exit code.
#[derive(Debug)]
pub struct NumericFailure(pub String);

impl fmt::Display for NumericFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "numeric failure: {}", self.0)
    }
}

impl std::error::Error for NumericFailure {}

pub struct CommonArgs<'a> {
    pub format: OutputFormat,
    pub output: Option<&'a Path>,
    pub verify: bool,
}

fn emit(table: Table, common: &CommonArgs<'_>) -> anyhow::Result<()> {
    table.write(common.format, common.output)
}

// ---------------------------------------------------------------- fiber

pub fn fiber_profile(
    cfg: &ConfigDocument,
    base: &Path,
    oh_scale: Option<f64>,
    common: &CommonArgs<'_>,
) -> anyhow::Result<()> {
    let profile = cfg.fiber_profile(base, oh_scale)?;
    let grid = cfg.lambda_grid();
    let mut table = Table::new(vec![
        "wavelength_nm",
        "n",
        "mode_radius_um",
        "a_eff_um2",
        "beta2_ps2_km",
        "gamma_per_w_km",
        "gamma_eff_per_w_km",
        "rayleigh_per_km",
        "alpha_db_km",
    ]);
    for &lambda in &grid {
        let (w, a_eff) = profile.mode_field(lambda)?;
        table.push(vec![
            Cell::Axis(lambda),
            Cell::Num(profile.refractive_index(lambda)?),
            Cell::Num(w),
            Cell::Num(a_eff),
            Cell::Num(profile.beta2(lambda)? * 1e27),
            Cell::Num(profile.gamma(lambda)? * 1e3),
            Cell::Num(profile.gamma_eff(lambda)? * 1e3),
            Cell::Num(profile.rayleigh_coeff(lambda)? * 1e3),
            Cell::Num(profile.alpha_db_km(lambda)?),
        ]);
    }
    if common.verify {
        verify_fiber_power_laws(&profile, &grid)?;
        eprintln!("verify: fiber wavelength power laws hold");
    }
    emit(table, common)
}

fn verify_fiber_power_laws(
    profile: &coexist_core::FiberProfile,
    grid: &[f64],
) -> anyhow::Result<()> {
    if grid.len() < 2 {
        return Ok(());
    }
    let pairs = [(0, grid.len() - 1), (0, grid.len() / 2), (grid.len() / 2, grid.len() - 1)];
    for (i, j) in pairs {
        let (l1, l2) = (grid[i], grid[j]);
        if l1 == l2 {
            continue;
        }
        let g_ratio = profile.gamma(l1)? / profile.gamma(l2)?;
        let a1 = profile.effective_area_um2(l1)?;
        let a2 = profile.effective_area_um2(l2)?;
        if (g_ratio - (l2 * a2) / (l1 * a1)).abs() > 1e-9 * g_ratio {
            bail!(NumericFailure(format!("gamma power law violated at ({l1}, {l2}) nm")));
        }
        let r_ratio = profile.rayleigh_coeff(l1)? / profile.rayleigh_coeff(l2)?;
        if (r_ratio - (l2 / l1).powi(4)).abs() > 1e-12 * r_ratio {
            bail!(NumericFailure(format!("Rayleigh quartic law violated at ({l1}, {l2}) nm")));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- sweeps

const SWEEP_COLUMNS: [&str; 15] = [
    "wavelength_nm",
    "length_km",
    "direction",
    "protocol",
    "xi_add_snu",
    "sprs_w",
    "fwm_w",
    "leakage_w",
    "total_w",
    "transmittance",
    "qber",
    "excess_noise_snu",
    "skr_bits_per_symbol",
    "skr_loss_limited_bits_per_symbol",
    "deallocated_slot",
];

fn sweep_rows(table: &mut Table, result: &SweepResult, xi_add: Option<f64>, extra: &[Cell]) {
    for rec in &result.records {
        let mut row = Vec::with_capacity(table.columns.len());
        row.extend_from_slice(extra);
        row.extend(record_cells(rec, xi_add));
        table.push(row);
    }
}

fn record_cells(rec: &SweepRecord, xi_add: Option<f64>) -> Vec<Cell> {
    let metric = rec.metric;
    vec![
        Cell::Axis(rec.wavelength_nm),
        Cell::Axis(rec.length_km),
        Cell::Str(rec.direction.label().into()),
        match metric {
            Some(m) => Cell::Str(m.protocol.label().into()),
            None => Cell::Empty,
        },
        opt_num(xi_add),
        Cell::Num(rec.noise.sprs_w),
        Cell::Num(rec.noise.fwm_w),
        Cell::Num(rec.noise.leakage_w),
        Cell::Num(rec.noise.total_w),
        Cell::Num(rec.transmittance),
        opt_num(metric.and_then(|m| m.qber)),
        opt_num(metric.and_then(|m| m.excess_noise_su)),
        opt_num(metric.map(|m| m.skr)),
        opt_num(metric.map(|m| m.skr_loss_limited)),
        match rec.deallocated {
            Some(i) => Cell::Int(i),
            None => Cell::Empty,
        },
    ]
}

fn sweep_table() -> Table {
    Table::new(SWEEP_COLUMNS.to_vec())
}

pub fn noise_sweep(scenario: &Scenario, grid: &[f64], common: &CommonArgs<'_>) -> anyhow::Result<()> {
    let result = noise_spectrum(scenario, grid)?;
    if common.verify {
        verify_against_ode(scenario, &result)?;
        eprintln!("verify: closed form matches the reference integration");
    }
    let mut table = sweep_table();
    sweep_rows(&mut table, &result, None, &[]);
    emit(table, common)
}

/// Re-integrate a few sample points numerically and compare per mechanism.
fn verify_against_ode(scenario: &Scenario, result: &SweepResult) -> anyhow::Result<()> {
    let candidates: Vec<&SweepRecord> = result
        .records
        .iter()
        .filter(|r| r.noise.sprs_w > 0.0 && r.deallocated.is_none())
        .collect();
    if candidates.is_empty() {
        return Ok(());
    }
    for &rec in [
        candidates[0],
        candidates[candidates.len() / 2],
        candidates[candidates.len() - 1],
    ]
    .iter()
    {
        let f_i = nm_to_hz(rec.wavelength_nm);
        let sol = propagate_ode(
            &scenario.plan,
            &scenario.fiber,
            f_i,
            rec.length_km * 1e3,
            rec.direction,
            StepControl::endpoint(),
        )?;
        let ode = sol.endpoint();
        let check = |name: &str, a: f64, b: f64, tol: f64| -> anyhow::Result<()> {
            let rel = if b == 0.0 { a.abs() } else { (a - b).abs() / b };
            if rel > tol {
                bail!(NumericFailure(format!(
                    "{name} mismatch at {} nm ({} vs {}, rel {rel:.2e})",
                    rec.wavelength_nm, a, b
                )));
            }
            Ok(())
        };
        check("SpRS", ode.sprs_w, rec.noise.sprs_w, 5e-3)?;
        check("leakage", ode.leakage_w, rec.noise.leakage_w, 5e-3)?;
        if rec.noise.fwm_w > 0.0 {
            check("FWM", ode.fwm_w, rec.noise.fwm_w, 5e-3)?;
        }
    }
    Ok(())
}

pub fn skr_sweep(
    scenario: &Scenario,
    grid: &[f64],
    protocol: Protocol,
    xi_add: &[f64],
    common: &CommonArgs<'_>,
) -> anyhow::Result<()> {
    let mut table = sweep_table();
    if xi_add.is_empty() || protocol == Protocol::Bb84 {
        let result = skr_vs_wavelength(scenario, grid, protocol)?;
        if common.verify {
            verify_skr_points(&result, protocol)?;
            eprintln!("verify: SKR conversions consistent");
        }
        sweep_rows(&mut table, &result, None, &[]);
    } else {
        let family = apply_extra_excess_noise(scenario, xi_add, grid, protocol)?;
        if common.verify {
            verify_skr_points(&family[0].1, protocol)?;
            eprintln!("verify: SKR conversions consistent");
        }
        for (xi, result) in &family {
            sweep_rows(&mut table, result, Some(*xi), &[]);
        }
    }
    emit(table, common)
}

/// Spot-check the GMCS closed-form asymptote against the finite-modulation
/// covariance path, and BB84 against its defining expression.
fn verify_skr_points(
    result: &SweepResult,
    protocol: Protocol,
) -> anyhow::Result<()> {
    let sample: Vec<&SweepRecord> = result
        .records
        .iter()
        .filter(|r| r.metric.is_some())
        .step_by((result.records.len() / 3).max(1))
        .collect();
    for rec in sample {
        let m = rec.metric.expect("filtered");
        match protocol.detection() {
            Some(detection) => {
                let xi = m.excess_noise_su.expect("cv metric");
                if rec.transmittance >= 1.0 {
                    continue;
                }
                let asym = gmcs_skr_asymptotic_raw(rec.transmittance, xi, detection)?;
                let finite =
                    gmcs_skr_finite_raw(1e6, rec.transmittance, xi, detection, 1.0, 1.0, 0.0)?;
                if (asym - finite).abs() > 1e-3 {
                    bail!(NumericFailure(format!(
                        "GMCS asymptote vs finite-V_A mismatch at {} nm: {asym} vs {finite}",
                        rec.wavelength_nm
                    )));
                }
            }
            None => {
                let q = m.qber.expect("dv metric");
                let direct = coexist_core::qkd::bb84_skr(q, rec.transmittance);
                if (direct - m.skr).abs() > 1e-12 {
                    bail!(NumericFailure(format!(
                        "BB84 SKR inconsistent at {} nm",
                        rec.wavelength_nm
                    )));
                }
            }
        }
    }
    Ok(())
}

pub fn skr_map_cmd(
    scenario: &Scenario,
    grid: &[f64],
    lengths_km: &[f64],
    protocol: Protocol,
    common: &CommonArgs<'_>,
) -> anyhow::Result<()> {
    let result = skr_map(scenario, grid, lengths_km, protocol)?;
    if common.verify {
        // one map row must reproduce the single-length sweep
        let mut single = scenario.clone();
        single.length_m = lengths_km[lengths_km.len() / 2] * 1e3;
        let line = skr_vs_wavelength(&single, grid, protocol)?;
        let l_km = single.length_m / 1e3;
        let row: Vec<&SweepRecord> =
            result.records.iter().filter(|r| r.length_km == l_km).collect();
        for (a, b) in row.iter().zip(&line.records) {
            let (ma, mb) = (a.metric.expect("map"), b.metric.expect("line"));
            if ma.skr != mb.skr {
                bail!(NumericFailure(format!(
                    "map row at {l_km} km disagrees with the direct sweep at {} nm",
                    a.wavelength_nm
                )));
            }
        }
        eprintln!("verify: map rows consistent with direct sweeps");
    }
    let mut table = sweep_table();
    sweep_rows(&mut table, &result, None, &[]);
    emit(table, common)
}

pub fn band_average(
    cfg: &ConfigDocument,
    scenario: &Scenario,
    protocol: Protocol,
    common: &CommonArgs<'_>,
) -> anyhow::Result<()> {
    let run = &cfg.run;
    let (Some(start), Some(stop), Some(step)) = (
        run.band_center_start_nm,
        run.band_center_stop_nm,
        run.band_center_step_nm,
    ) else {
        bail!("run section needs band_center_start_nm/stop/step for band-average");
    };
    if run.band_widths_nm.is_empty() {
        bail!("run section needs band_widths_nm for band-average");
    }
    let centers = lambda_grid(start, stop, step);
    let mut table = Table::new(vec![
        "band_center_nm",
        "band_width_nm",
        "direction",
        "protocol",
        "skr_avg_bits_per_symbol",
    ]);
    for &width in &run.band_widths_nm {
        for &center in &centers {
            for &dir in &scenario.directions {
                match band_average_skr(scenario, center, width, protocol, dir) {
                    Ok(avg) => table.push(vec![
                        Cell::Axis(center),
                        Cell::Axis(width),
                        Cell::Str(dir.label().into()),
                        Cell::Str(protocol.label().into()),
                        Cell::Num(avg),
                    ]),
                    Err(coexist_core::Error::Config(msg)) => {
                        eprintln!("skipping center {center} nm width {width} nm: {msg}");
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
    }
    if common.verify {
        // a band narrower than one slot equals the single-channel value
        let center = centers[0];
        let dir = scenario.directions[0];
        let narrow = band_average_skr(scenario, center, 0.0, protocol, dir)?;
        let single = skr_vs_wavelength(
            &Scenario { directions: vec![dir], ..scenario.clone() },
            &[center],
            protocol,
        )?;
        let skr = single.records[0].metric.expect("metric").skr;
        if (narrow - skr).abs() > 1e-9 * skr.max(1e-12) {
            bail!(NumericFailure("zero-width band average differs from center SKR".into()));
        }
        eprintln!("verify: band average degenerates to the single-channel value");
    }
    emit(table, common)
}

pub fn multi_band(
    cfg: &ConfigDocument,
    base: &Path,
    oh_scale: Option<f64>,
    direction: Option<&str>,
    protocol: Protocol,
    common: &CommonArgs<'_>,
) -> anyhow::Result<()> {
    if cfg.run.multi_band.is_empty() {
        bail!("run section needs multi_band variants for multi-band");
    }
    let fiber = cfg.fiber_profile(base, oh_scale)?;
    let mut scenarios = Vec::new();
    for variant in &cfg.run.multi_band {
        let plan = cfg.plan_with(variant.anchor_thz, Some(variant.channel_count))?;
        let scenario = cfg.scenario_with(fiber.clone(), plan, direction)?;
        scenarios.push((variant.name.clone(), scenario));
    }
    let grid = cfg.lambda_grid();
    let results = multi_band_compare(&scenarios, &grid, protocol)?;
    if common.verify {
        let again = multi_band_compare(&scenarios, &grid, protocol)?;
        if again != results {
            bail!(NumericFailure("multi-band comparison is not deterministic".into()));
        }
        eprintln!("verify: multi-band results deterministic");
    }
    let mut columns = vec!["variant"];
    columns.extend_from_slice(&SWEEP_COLUMNS);
    let mut table = Table::new(columns);
    for (name, result) in &results {
        sweep_rows(&mut table, result, None, &[Cell::Str(name.clone())]);
    }
    emit(table, common)
}

// ---------------------------------------------------------------- fwm

pub struct FwmToolsArgs {
    pub channels: u32,
    pub quantum_index: Option<i64>,
    pub spacing_sweep: bool,
    pub mismatch: Vec<i64>,
    pub spacing_max_ghz: f64,
    pub spacing_points: usize,
    pub alpha_db_km: f64,
    pub beta2_ps2_km: f64,
    pub length_km: f64,
}

pub fn fwm_tools(args: &FwmToolsArgs, common: &CommonArgs<'_>) -> anyhow::Result<()> {
    if args.spacing_sweep {
        return fwm_spacing_sweep(args, common);
    }
    let n = args.channels;
    if n == 0 {
        bail!("--channels must be at least 1");
    }
    let indices: Vec<i64> = match args.quantum_index {
        Some(i) => vec![i],
        None => (-(n as i64) + 1..=2 * (n as i64) - 2).collect(),
    };
    if common.verify {
        for i in -(n as i64)..=2 * (n as i64) {
            if fwm_count(n, i) != fwm_count_brute(n, i) {
                bail!(NumericFailure(format!(
                    "closed-form FWM count disagrees with enumeration at N={n}, i={i}"
                )));
            }
        }
        eprintln!("verify: FWM count matches exhaustive enumeration for N={n}");
    }
    let mut table = Table::new(vec![
        "channels",
        "quantum_index",
        "count",
        "count_normalized",
        "delta_normalized",
        "density",
    ]);
    let nn = n as f64;
    for i in indices {
        let delta = (i as f64 - (nn - 1.0) / 2.0) / nn;
        table.push(vec![
            Cell::Int(n as i64),
            Cell::Int(i),
            Cell::Int(fwm_count(n, i) as i64),
            Cell::Num(fwm_count(n, i) as f64 / (nn * nn)),
            Cell::Num(delta),
            Cell::Num(fwm_density(delta)),
        ]);
    }
    emit(table, common)
}

/// Normalized averaged FWM kernel versus channel spacing for fixed index
/// mismatches (flat attenuation and dispersion).
fn fwm_spacing_sweep(args: &FwmToolsArgs, common: &CommonArgs<'_>) -> anyhow::Result<()> {
    if args.mismatch.is_empty() {
        bail!("--mismatch list required for --spacing-sweep");
    }
    let alpha = db_per_km_to_nat_per_m(args.alpha_db_km);
    let beta2 = args.beta2_ps2_km * 1e-27;
    let length = args.length_km * 1e3;
    let delta_alpha = -2.0 * alpha;
    let mut table = Table::new(vec!["spacing_ghz", "index_mismatch", "chi_avg_normalized"]);
    let reference = chi_avg(
        PhaseMismatch { delta_alpha, delta_beta: 0.0 },
        alpha,
        length,
        2.0,
        false,
    );
    for &m in &args.mismatch {
        for step in 0..args.spacing_points {
            let df = args.spacing_max_ghz * 1e9 * (step + 1) as f64 / args.spacing_points as f64;
            let db = 2.0 * std::f64::consts::PI.powi(2) * beta2 * m as f64 * df * df;
            let value = chi_avg(
                PhaseMismatch { delta_alpha, delta_beta: db },
                alpha,
                length,
                2.0,
                false,
            );
            table.push(vec![
                Cell::Axis(df / 1e9),
                Cell::Int(m),
                Cell::Num(value / reference),
            ]);
        }
    }
    emit(table, common)
}

// ---------------------------------------------------------------- validate

pub fn validate(
    cfg: &ConfigDocument,
    base: &Path,
    oh_scale: Option<f64>,
    direction: Option<&str>,
) -> anyhow::Result<()> {
    let mut errors = 0u32;
    let report = |class: &str, code: &str, msg: String| {
        println!("{class} {code}: {msg}");
    };

    let fiber = match cfg.fiber_profile(base, oh_scale) {
        Ok(f) => Some(f),
        Err(e) => {
            errors += 1;
            report("ERROR", "E-FIBER", format!("{e:#}"));
            None
        }
    };
    let plan = match cfg.channel_plan() {
        Ok(p) => Some(p),
        Err(e) => {
            errors += 1;
            report("ERROR", "E-PLAN", format!("{e:#}"));
            None
        }
    };

    if let (Some(fiber), Some(plan)) = (fiber.as_ref(), plan.as_ref()) {
        if let Err(e) = cfg.scenario_with(fiber.clone(), plan.clone(), direction) {
            errors += 1;
            report("ERROR", "E-SCENARIO", format!("{e:#}"));
        }
        if let Some(q) = plan.quantum() {
            if plan.classical().any(|c| c.index == q.index) {
                errors += 1;
                report(
                    "ERROR",
                    "E-COLLIDE",
                    format!("quantum slot {} collides with an active classical channel", q.index),
                );
            }
            let min_detuning = plan
                .classical()
                .map(|c| (c.frequency_hz - q.frequency_hz).abs())
                .fold(f64::INFINITY, f64::min);
            if min_detuning.is_finite() && min_detuning > fiber.raman.max_detuning_hz() {
                report(
                    "WARN",
                    "W-RAMAN-SUPPORT",
                    format!(
                        "classical-quantum detuning {:.1} THz beyond the Raman table support \
                         ({:.1} THz); SpRS is treated as zero there",
                        min_detuning / 1e12,
                        fiber.raman.max_detuning_hz() / 1e12
                    ),
                );
            }
        }
        // sweep grid within the attenuation-supported range
        let grid = cfg.lambda_grid();
        if grid.is_empty() {
            errors += 1;
            report("ERROR", "E-GRID", "empty wavelength grid".into());
        }
        for &edge in [grid.first(), grid.last()].iter().flatten() {
            if fiber.alpha(*edge).is_err() {
                errors += 1;
                report(
                    "ERROR",
                    "E-RANGE",
                    format!("sweep wavelength {edge} nm outside the supported fiber range"),
                );
            }
        }
    }

    if errors == 0 {
        println!("OK: configuration valid");
        Ok(())
    } else {
        bail!("validation found {errors} error(s)")
    }
}
