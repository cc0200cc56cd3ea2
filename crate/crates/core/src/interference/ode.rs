//! Numerical integration of the longitudinal interference evolution.
//!
//! This is the reference path for the closed forms: the same sources are
//! integrated along the span with generic machinery that shares no
//! intermediate expressions with the closed-form kernels.
//!
//! The smooth mechanisms (SpRS, leakage) use an adaptive embedded
//! Cash-Karp 4(5) pair. The FWM term superposes per-quadruple quadratures
//! (the evolution is linear, so superposition is exact) with the step count
//! tied to each quadruple's beat period 2 pi / delta_beta; a monolithic
//! adaptive step either collapses onto the fastest beat or aliases it, so
//! the per-quadruple resolution is what keeps the reference honest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fiber::FiberProfile;
use crate::units::hz_to_nm;

use super::kernels::{delta_beta_grid, PhaseMismatch};
use super::{ChannelPlan, Direction, LinkContext, NoiseBreakdown};

/// Integration controls for [`propagate_ode`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    /// Relative tolerance per km of span for the adaptive mechanisms.
    pub rel_tol_per_km: f64,
    /// Number of z samples in the returned profile (>= 2).
    pub output_points: usize,
    /// Sample density per FWM beat period.
    pub fwm_points_per_cycle: f64,
    /// Hard cap on total right-hand-side evaluations.
    pub max_evals: u64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rel_tol_per_km: 1e-8,
            output_points: 65,
            fwm_points_per_cycle: 12.0,
            max_evals: 2_000_000_000,
        }
    }
}

impl StepControl {
    /// Endpoint-only integration (coarse output grid).
    pub fn endpoint() -> Self {
        StepControl { output_points: 9, ..Self::default() }
    }
}

/// z-resolved interference powers from the numerical integration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeSolution {
    /// Sample positions, m. For the backward direction this axis is the
    /// span length seen by the receiver at z = 0.
    pub z_m: Vec<f64>,
    pub sprs_w: Vec<f64>,
    pub fwm_w: Vec<f64>,
    pub leakage_w: Vec<f64>,
}

impl OdeSolution {
    pub fn endpoint(&self) -> NoiseBreakdown {
        let n = self.z_m.len() - 1;
        NoiseBreakdown::new(self.sprs_w[n], self.fwm_w[n], self.leakage_w[n])
    }
}

/// FWM efficiency rho of one quadruple at position z (the degenerate branch
/// uses the kurtosis, otherwise the factor is 4), in m:
///
/// rho = factor Re{(1 - e^{-(da/2 + j db) z}) / (da + 2 j db)}
///       e^{(da - alpha_i) z}.
pub fn rho_fwm(
    mismatch: PhaseMismatch,
    alpha_i: f64,
    z: f64,
    kurtosis: f64,
    degenerate: bool,
) -> f64 {
    let factor = if degenerate { kurtosis } else { 4.0 };
    let da = mismatch.delta_alpha;
    let db = mismatch.delta_beta;
    let den = da * da + 4.0 * db * db;
    let (sin, cos) = (db * z).sin_cos();
    let damp = (-0.5 * da * z).exp();
    let real = if den == 0.0 {
        0.5 * z
    } else {
        (da * (1.0 - damp * cos) + 2.0 * db * damp * sin) / den
    };
    factor * real * ((da - alpha_i) * z).exp()
}

/// Integrate the interference evolution for the quantum channel at `f_i_hz`
/// over a span of `length_m`.
pub fn propagate_ode(
    plan: &ChannelPlan,
    profile: &FiberProfile,
    f_i_hz: f64,
    length_m: f64,
    dir: Direction,
    ctl: StepControl,
) -> Result<OdeSolution> {
    let ctx = LinkContext::new(profile, plan)?;
    propagate_ode_ctx(&ctx, f_i_hz, length_m, dir, ctl)
}

pub(super) fn propagate_ode_ctx(
    ctx: &LinkContext<'_>,
    f_i_hz: f64,
    length_m: f64,
    dir: Direction,
    ctl: StepControl,
) -> Result<OdeSolution> {
    if length_m <= 0.0 {
        return Err(Error::domain("length_m", length_m, f64::MIN_POSITIVE, f64::INFINITY));
    }
    if ctl.output_points < 2 {
        return Err(Error::Config("output_points must be >= 2".into()));
    }
    if let Some(idx) = ctx.plan.colliding_classical(f_i_hz) {
        return Err(Error::Config(format!(
            "quantum slot collides with active classical channel {idx}"
        )));
    }

    let lambda_i = hz_to_nm(f_i_hz);
    let alpha_i = ctx.profile.alpha(lambda_i)?;
    let b_ch = ctx.plan.slot_bandwidth_hz;
    let p_leak = ctx.plan.leakage_power_w();

    // per-pump SpRS source strengths
    let mut sprs_sources: Vec<(f64, f64)> = Vec::new(); // (eta * P, alpha_h)
    for ch in ctx.plan.classical() {
        let lambda_h = hz_to_nm(ch.frequency_hz);
        let eta = ctx.profile.sprs_efficiency(f_i_hz, ch.frequency_hz, b_ch)?;
        sprs_sources.push((eta * ch.launch_power_w, ctx.profile.alpha(lambda_h)?));
    }

    let n_out = ctl.output_points;
    let z_grid: Vec<f64> =
        (0..n_out).map(|j| length_m * j as f64 / (n_out - 1) as f64).collect();

    // state = [sprs, leakage]
    let rhs = |z: f64, y: &[f64; 2], dy: &mut [f64; 2]| match dir {
        Direction::Forward => {
            let mut src = 0.0;
            for &(ep, ah) in &sprs_sources {
                src += ep * (-ah * z).exp();
            }
            dy[0] = -alpha_i * y[0] + src;
            dy[1] = -alpha_i * y[1];
        }
        Direction::Backward => {
            // accumulate versus span length: dP(0; L)/dL = e^{-a_i L} s(L)
            let mut src = 0.0;
            for &(ep, ah) in &sprs_sources {
                src += ep * (-ah * z).exp();
            }
            let gamma_r = ctx
                .profile
                .rayleigh_coeff(lambda_i)
                .expect("alpha already validated the wavelength");
            dy[0] = (-alpha_i * z).exp() * src;
            dy[1] = (-alpha_i * z).exp() * gamma_r * p_leak * (-alpha_i * z).exp();
        }
    };
    let y0 = match dir {
        Direction::Forward => [0.0, p_leak],
        Direction::Backward => [0.0, 0.0],
    };
    let rel_tol = ctl.rel_tol_per_km * (length_m / 1e3).max(1.0);
    let smooth = integrate_adaptive(rhs, y0, &z_grid, rel_tol, ctl.max_evals)?;

    let fwm = match dir {
        Direction::Forward => integrate_fwm(ctx, f_i_hz, lambda_i, alpha_i, &z_grid, &ctl)?,
        Direction::Backward => vec![0.0; n_out],
    };

    Ok(OdeSolution {
        z_m: z_grid,
        sprs_w: smooth.iter().map(|y| y[0]).collect(),
        fwm_w: fwm,
        leakage_w: smooth.iter().map(|y| y[1]).collect(),
    })
}

// Cash-Karp embedded 4(5) coefficients.
const CK_A: [[f64; 5]; 5] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0],
    [3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0, 0.0, 0.0],
    [-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0, 0.0],
    [
        1631.0 / 55296.0,
        175.0 / 512.0,
        575.0 / 13824.0,
        44275.0 / 110592.0,
        253.0 / 4096.0,
    ],
];
const CK_B5: [f64; 6] = [37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0, 512.0 / 1771.0];
const CK_B4: [f64; 6] = [
    2825.0 / 27648.0,
    0.0,
    18575.0 / 48384.0,
    13525.0 / 55296.0,
    277.0 / 14336.0,
    1.0 / 4.0,
];

/// Adaptive Cash-Karp integration of a 2-state system through the given
/// output grid. Returns the state at every grid point.
fn integrate_adaptive(
    rhs: impl Fn(f64, &[f64; 2], &mut [f64; 2]),
    y0: [f64; 2],
    z_grid: &[f64],
    rel_tol: f64,
    max_evals: u64,
) -> Result<Vec<[f64; 2]>> {
    let length = *z_grid.last().expect("non-empty grid");
    let mut y = y0;
    let mut z = z_grid[0];
    let mut h = (length / 128.0).max(f64::MIN_POSITIVE);
    let h_min = length * 1e-12;
    let mut evals: u64 = 0;
    let mut out = Vec::with_capacity(z_grid.len());
    out.push(y);

    let mut k = [[0.0f64; 2]; 6];
    for &z_target in &z_grid[1..] {
        while z < z_target {
            let step = h.min(z_target - z);
            rhs(z, &y, &mut k[0]);
            for s in 1..6 {
                let c: f64 = CK_A[s - 1][..s].iter().sum();
                let mut ys = y;
                for (j, yj) in ys.iter_mut().enumerate() {
                    for (r, kr) in k[..s].iter().enumerate() {
                        *yj += step * CK_A[s - 1][r] * kr[j];
                    }
                }
                rhs(z + c * step, &ys, &mut k[s]);
            }
            evals += 6;
            if evals > max_evals {
                return Err(Error::Integration {
                    reason: "evaluation budget exhausted".into(),
                    z_m: z,
                    step_m: step,
                });
            }

            let mut y5 = y;
            let mut err_norm = 0.0f64;
            for j in 0..2 {
                let mut d5 = 0.0;
                let mut d4 = 0.0;
                for s in 0..6 {
                    d5 += CK_B5[s] * k[s][j];
                    d4 += CK_B4[s] * k[s][j];
                }
                y5[j] += step * d5;
                let scale = y[j].abs().max(y5[j].abs()) * rel_tol + 1e-300;
                err_norm = err_norm.max((step * (d5 - d4)).abs() / scale);
            }

            if err_norm <= 1.0 || step <= h_min {
                z += step;
                y = y5;
                let grow = if err_norm > 0.0 { 0.9 * err_norm.powf(-0.2) } else { 5.0 };
                h = step * grow.clamp(0.2, 5.0);
            } else {
                h = step * (0.9 * err_norm.powf(-0.25)).clamp(0.1, 0.9);
                if h < h_min {
                    return Err(Error::Integration {
                        reason: "step size collapsed".into(),
                        z_m: z,
                        step_m: h,
                    });
                }
            }
        }
        out.push(y);
    }
    Ok(out)
}

/// Sum of per-quadruple FWM quadratures on the output grid.
///
/// Each quadruple q contributes P_q(z) = e^{-a_i z} integral_0^z g_q(s) ds
/// with g_q(s) = amp_q rho_q(s) e^{a_i s}; the integrand is resolved with a
/// composite Simpson rule at `fwm_points_per_cycle` samples per beat period.
fn integrate_fwm(
    ctx: &LinkContext<'_>,
    f_i_hz: f64,
    lambda_i: f64,
    alpha_i: f64,
    z_grid: &[f64],
    ctl: &StepControl,
) -> Result<Vec<f64>> {
    let quads = collect_quadruples(ctx, f_i_hz, lambda_i, alpha_i)?;
    let length = *z_grid.last().expect("non-empty grid");
    let n_seg = z_grid.len() - 1;
    let mut accum = vec![0.0f64; z_grid.len()];
    let mut evals: u64 = 0;

    for q in &quads {
        let cycles = q.mismatch.delta_beta.abs() * length / (2.0 * std::f64::consts::PI);
        let per_segment = (ctl.fwm_points_per_cycle * cycles / n_seg as f64).ceil() as u64;
        let m = per_segment.max(8).next_multiple_of(2);
        evals += m * n_seg as u64;
        if evals > ctl.max_evals {
            return Err(Error::Integration {
                reason: format!(
                    "FWM beat resolution needs more than {} evaluations; \
                     reduce the span or the channel count",
                    ctl.max_evals
                ),
                z_m: 0.0,
                step_m: length / (m * n_seg as u64) as f64,
            });
        }
        let g = |s: f64| {
            q.amp * rho_fwm(q.mismatch, alpha_i, s, q.kurtosis, q.degenerate) * (alpha_i * s).exp()
        };
        let mut integral = 0.0;
        for seg in 0..n_seg {
            let (a, b) = (z_grid[seg], z_grid[seg + 1]);
            let h = (b - a) / m as f64;
            let mut sum = g(a) + g(b);
            for j in 1..m {
                let w = if j % 2 == 1 { 4.0 } else { 2.0 };
                sum += w * g(a + j as f64 * h);
            }
            integral += sum * h / 3.0;
            accum[seg + 1] += integral;
        }
    }

    Ok(z_grid
        .iter()
        .zip(accum)
        .map(|(&z, u)| u * (-alpha_i * z).exp())
        .collect())
}

struct Quadruple {
    amp: f64,
    mismatch: PhaseMismatch,
    kurtosis: f64,
    degenerate: bool,
}

fn collect_quadruples(
    ctx: &LinkContext<'_>,
    f_i_hz: f64,
    lambda_i: f64,
    alpha_i: f64,
) -> Result<Vec<Quadruple>> {
    let plan = ctx.plan;
    let i_slot = plan.nearest_slot(f_i_hz);
    let on_grid =
        (f_i_hz - plan.slot_frequency_hz(i_slot)).abs() < 1e-6 * plan.spacing_hz;
    let beta2_i = ctx.profile.beta2(lambda_i)?;
    let gamma_eff = ctx.profile.gamma_eff(lambda_i)?;
    let gamma2 = gamma_eff * gamma_eff;

    let pumps: Vec<_> = ctx.plan.classical().collect();
    let mut alphas = Vec::with_capacity(pumps.len());
    for p in &pumps {
        alphas.push(ctx.profile.alpha(hz_to_nm(p.frequency_hz))?);
    }
    let by_index: std::collections::HashMap<i64, usize> =
        pumps.iter().enumerate().map(|(j, p)| (p.index, j)).collect();

    let mut quads = Vec::new();
    for (jh, ph) in pumps.iter().enumerate() {
        for (jl, pl) in pumps.iter().enumerate() {
            let k = ph.index + pl.index - i_slot;
            if k == i_slot {
                continue;
            }
            let Some(&jk) = by_index.get(&k) else { continue };
            let pk = pumps[jk];
            let delta_beta = if on_grid {
                delta_beta_grid(beta2_i, i_slot, ph.index, k, pl.index, plan.spacing_hz)?
            } else {
                super::kernels::delta_beta_full(
                    beta2_i,
                    f_i_hz,
                    ph.frequency_hz,
                    pk.frequency_hz,
                    pl.frequency_hz,
                )
            };
            quads.push(Quadruple {
                amp: gamma2 * ph.launch_power_w * pk.launch_power_w * pl.launch_power_w,
                mismatch: PhaseMismatch {
                    delta_alpha: alpha_i - alphas[jh] - alphas[jk] - alphas[jl],
                    delta_beta,
                },
                kurtosis: ph.kurtosis,
                degenerate: ph.index == pl.index,
            });
        }
    }
    Ok(quads)
}
