//! Gaussian-modulated coherent-state protocol: shot-noise conversions,
//! covariance construction through the entangling-cloner channel dilation,
//! and asymptotic/finite-modulation secret-key rates for reverse
//! reconciliation.

use serde::{Deserialize, Serialize};

use crate::constants::PLANCK;
use crate::error::{Error, Result};

use super::gaussian::{h2, holevo_bound, GaussianCm};

/// Homodyne or heterodyne detection (mu quadratures measured).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Detection {
    Homodyne,
    Heterodyne,
}

impl Detection {
    /// Number of measured quadratures.
    pub fn mu(self) -> f64 {
        match self {
            Detection::Homodyne => 1.0,
            Detection::Heterodyne => 2.0,
        }
    }
}

/// Continuous-variable receiver parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvReceiverParams {
    pub detection: Detection,
    /// Reconciliation efficiency, (0, 1].
    pub beta_ec: f64,
    /// Receiver efficiency, (0, 1].
    pub eta_rx: f64,
    /// Electronic noise, shot-noise units.
    pub v_el: f64,
    /// Modulation variance in shot-noise units; `None` selects the
    /// asymptotic V_A -> infinity rates.
    pub modulation_variance: Option<f64>,
}

impl CvReceiverParams {
    pub fn ideal(detection: Detection) -> Self {
        CvReceiverParams {
            detection,
            beta_ec: 1.0,
            eta_rx: 1.0,
            v_el: 0.0,
            modulation_variance: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.beta_ec && self.beta_ec <= 1.0) {
            return Err(Error::Config("beta_EC must lie in (0, 1]".into()));
        }
        if !(0.0 < self.eta_rx && self.eta_rx <= 1.0) {
            return Err(Error::Config("eta_RX must lie in (0, 1]".into()));
        }
        if self.v_el < 0.0 {
            return Err(Error::Config("v_el must be non-negative".into()));
        }
        if let Some(v) = self.modulation_variance {
            if v <= 0.0 {
                return Err(Error::Config("modulation variance must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Coexistence excess noise in shot-noise units: xi = S / (2 h f).
pub fn excess_noise_su(noise_psd_w_per_hz: f64, f_i_hz: f64) -> f64 {
    noise_psd_w_per_hz / (2.0 * PLANCK * f_i_hz)
}

/// Shot-noise variance in volts squared: P_LO B_el R_V^2 h f.
pub fn shot_noise_variance(p_lo_w: f64, b_el_hz: f64, r_v_v_per_w: f64, f_i_hz: f64) -> f64 {
    p_lo_w * b_el_hz * r_v_v_per_w * r_v_v_per_w * PLANCK * f_i_hz
}

/// Coexistence excess noise in volts squared within the electronic
/// bandwidth: P_LO B_el R_V^2 P_int / (2 B_ch).
pub fn excess_noise_volts_sq(
    p_lo_w: f64,
    b_el_hz: f64,
    r_v_v_per_w: f64,
    p_int_w: f64,
    b_ch_hz: f64,
) -> f64 {
    p_lo_w * b_el_hz * r_v_v_per_w * r_v_v_per_w * p_int_w / (2.0 * b_ch_hz)
}

/// Mutual information of the Gaussian channel, bits/symbol:
/// I = (mu/2) log2[1 + eta T V_A / (eta xi + mu + v_el)].
pub fn mutual_information(
    v_a: f64,
    transmittance: f64,
    xi: f64,
    detection: Detection,
    eta_rx: f64,
    v_el: f64,
) -> f64 {
    let mu = detection.mu();
    0.5 * mu * (1.0 + eta_rx * transmittance * v_a / (eta_rx * xi + mu + v_el)).log2()
}

/// Entangling-cloner covariance parameters for channel (T, xi) at
/// modulation variance V_A. Mode 1 is the ancilla Eve keeps, mode 2 the
/// beamsplitter output she extracts.
struct Cloner {
    omega: f64,
    psi1: f64,
    phi1: f64,
    /// Bob's quadrature variance T V + (1 - T) omega.
    v_b: f64,
    /// x_B covariance with Eve's kept mode: sqrt(1-T) sqrt(omega^2 - 1).
    c_kept: f64,
    /// x_B covariance with Eve's output mode: sqrt(T (1-T)) (omega - V).
    c_out: f64,
}

impl Cloner {
    fn new(transmittance: f64, xi: f64, v_a: f64) -> Self {
        let t = transmittance;
        let v = v_a + 1.0;
        let omega = xi / (1.0 - t) + 1.0;
        let psi1 = (t * (omega * omega - 1.0)).sqrt();
        let phi1 = t * omega + (1.0 - t) * v;
        let v_b = t * v + (1.0 - t) * omega;
        let c_kept = ((1.0 - t) * (omega * omega - 1.0)).sqrt();
        let c_out = (t * (1.0 - t)).sqrt() * (omega - v);
        Cloner { omega, psi1, phi1, v_b, c_kept, c_out }
    }

    /// Eve's unconditioned covariance matrix Sigma_E.
    fn sigma_e(&self) -> GaussianCm {
        GaussianCm::symmetric(self.omega, self.psi1, self.phi1)
    }

    /// Eve's covariance conditioned on Bob's measurement Sigma_E|B, from
    /// the Gaussian measurement update. Homodyne projects the x quadrature
    /// (pseudo-inverse update touching only the x entries); heterodyne
    /// divides the full cross covariance by V_B + 1.
    fn sigma_e_given_b(&self, detection: Detection) -> GaussianCm {
        match detection {
            Detection::Homodyne => {
                let d = self.v_b;
                GaussianCm {
                    omega_a: self.omega - self.c_kept * self.c_kept / d,
                    omega_b: self.omega,
                    psi_a: self.psi1 - self.c_kept * self.c_out / d,
                    psi_b: self.psi1,
                    phi_a: self.phi1 - self.c_out * self.c_out / d,
                    phi_b: self.phi1,
                }
            }
            Detection::Heterodyne => {
                let d = self.v_b + 1.0;
                GaussianCm::symmetric(
                    self.omega - self.c_kept * self.c_kept / d,
                    self.psi1 - self.c_kept * self.c_out / d,
                    self.phi1 - self.c_out * self.c_out / d,
                )
            }
        }
    }

    fn holevo(&self, detection: Detection) -> f64 {
        let (lp, lm) = self.sigma_e().symplectic_eigenvalues();
        let (ltp, ltm) = self.sigma_e_given_b(detection).symplectic_eigenvalues();
        holevo_bound(lp, lm, ltp, ltm)
    }
}

/// Eve covariance matrices at finite modulation variance, exposed for
/// validation against generic eigensolvers.
pub fn eve_covariances(
    transmittance: f64,
    xi: f64,
    v_a: f64,
    detection: Detection,
) -> (GaussianCm, GaussianCm) {
    let c = Cloner::new(transmittance, xi, v_a);
    (c.sigma_e(), c.sigma_e_given_b(detection))
}

fn check_channel(transmittance: f64, xi: f64) -> Result<()> {
    if !(transmittance > 0.0 && transmittance < 1.0) {
        return Err(Error::Domain {
            quantity: "transmittance",
            value: transmittance,
            min: f64::MIN_POSITIVE,
            max: 1.0 - f64::EPSILON,
        });
    }
    if xi < 0.0 {
        return Err(Error::Domain { quantity: "xi", value: xi, min: 0.0, max: f64::INFINITY });
    }
    Ok(())
}

/// Asymptotic (beta_EC = 1, V_A -> infinity, ideal receiver) secret-key
/// rate, bits/symbol, unclamped.
///
/// Homodyne: r = (1/2) log2[T phi / ((xi + 1)(1 - T))] - h2(omega) with
/// phi = T omega + (1 - T)(2 omega - 1 + (xi + mu)/T) at mu = 1.
/// Heterodyne: r = log2[T / ((xi + 2)(1 - T))] - h2(omega)
/// + h2((xi + 2 - T)/T) + 1 - log2 e.
///
/// T = 1 is singular (1 - T division); use the finite-V_A path there.
pub fn gmcs_skr_asymptotic_raw(
    transmittance: f64,
    xi: f64,
    detection: Detection,
) -> Result<f64> {
    check_channel(transmittance, xi)?;
    let t = transmittance;
    let omega = xi / (1.0 - t) + 1.0;
    Ok(match detection {
        Detection::Homodyne => {
            let mu = 1.0;
            let phi = t * omega + (1.0 - t) * (2.0 * omega - 1.0 + (xi + mu) / t);
            0.5 * (t * phi / ((xi + 1.0) * (1.0 - t))).log2() - h2(omega)
        }
        Detection::Heterodyne => {
            (t / ((xi + 2.0) * (1.0 - t))).log2() - h2(omega) + h2((xi + 2.0 - t) / t) + 1.0
                - std::f64::consts::E.log2()
        }
    })
}

/// Clamped asymptotic rate.
pub fn gmcs_skr_asymptotic(transmittance: f64, xi: f64, detection: Detection) -> Result<f64> {
    Ok(gmcs_skr_asymptotic_raw(transmittance, xi, detection)?.max(0.0))
}

/// Finite-modulation secret-key rate r = beta_EC I_AB - chi_EB,
/// bits/symbol, unclamped. Receiver imperfections degrade the mutual
/// information only; the Holevo bound keeps the ideal-receiver channel
/// view.
pub fn gmcs_skr_finite_raw(
    v_a: f64,
    transmittance: f64,
    xi: f64,
    detection: Detection,
    beta_ec: f64,
    eta_rx: f64,
    v_el: f64,
) -> Result<f64> {
    check_channel(transmittance, xi)?;
    if v_a <= 0.0 {
        return Err(Error::Domain {
            quantity: "modulation variance",
            value: v_a,
            min: f64::MIN_POSITIVE,
            max: f64::INFINITY,
        });
    }
    let cloner = Cloner::new(transmittance, xi, v_a);
    let i_ab = mutual_information(v_a, transmittance, xi, detection, eta_rx, v_el);
    Ok(beta_ec * i_ab - cloner.holevo(detection))
}

/// Clamped finite-modulation rate.
pub fn gmcs_skr_finite(
    v_a: f64,
    transmittance: f64,
    xi: f64,
    detection: Detection,
    beta_ec: f64,
    eta_rx: f64,
    v_el: f64,
) -> Result<f64> {
    Ok(gmcs_skr_finite_raw(v_a, transmittance, xi, detection, beta_ec, eta_rx, v_el)?.max(0.0))
}

/// Rate through the configured receiver: asymptotic when no modulation
/// variance is set, finite otherwise. Unclamped; receiver imperfections
/// enter through the mutual information.
pub fn gmcs_skr_raw(
    transmittance: f64,
    xi: f64,
    rx: &CvReceiverParams,
) -> Result<f64> {
    match rx.modulation_variance {
        Some(v_a) => gmcs_skr_finite_raw(
            v_a,
            transmittance,
            xi,
            rx.detection,
            rx.beta_ec,
            rx.eta_rx,
            rx.v_el,
        ),
        None => {
            let ideal = gmcs_skr_asymptotic_raw(transmittance, xi, rx.detection)?;
            let penalty = receiver_penalty(transmittance, xi, rx.detection, rx.eta_rx, rx.v_el)?;
            // beta_EC scales I_AB only; in the asymptotic limit the
            // difference (1 - beta) I_AB diverges with V_A, so beta < 1 is
            // only meaningful on the finite-V_A path.
            if rx.beta_ec < 1.0 {
                return Err(Error::Config(
                    "beta_EC < 1 requires a finite modulation variance".into(),
                ));
            }
            Ok(ideal - penalty)
        }
    }
}

/// Asymptotic rate penalty of a non-ideal receiver (electronic noise and
/// sub-unity efficiency degrade the mutual information; the Holevo term is
/// unchanged):
///
/// penalty = (mu/2) log2[(eta xi + mu + v_el) / (eta (xi + mu))] >= 0.
pub fn receiver_penalty(
    transmittance: f64,
    xi: f64,
    detection: Detection,
    eta_rx: f64,
    v_el: f64,
) -> Result<f64> {
    check_channel(transmittance, xi)?;
    if !(0.0 < eta_rx && eta_rx <= 1.0) {
        return Err(Error::Domain { quantity: "eta_RX", value: eta_rx, min: 0.0, max: 1.0 });
    }
    if v_el < 0.0 {
        return Err(Error::Domain { quantity: "v_el", value: v_el, min: 0.0, max: f64::INFINITY });
    }
    let mu = detection.mu();
    Ok(0.5 * mu * ((eta_rx * xi + mu + v_el) / (eta_rx * (xi + mu))).log2())
}
