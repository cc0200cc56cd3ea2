//! Longitudinal interference kernels and characteristic lengths.
//!
//! All arguments are SI: attenuations in 1/m, lengths in m, frequencies in
//! Hz, dispersion in s^2/m. The SpRS kernel has units of m and the FWM
//! kernels of m^2.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::Direction;

/// Attenuation and propagation-constant mismatch of one FWM quadruple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseMismatch {
    /// delta_alpha = alpha_i - alpha_h - alpha_k - alpha_l, 1/m.
    pub delta_alpha: f64,
    /// delta_beta, 1/m.
    pub delta_beta: f64,
}

impl PhaseMismatch {
    pub fn new(alpha_i: f64, alpha_h: f64, alpha_k: f64, alpha_l: f64, delta_beta: f64) -> Self {
        PhaseMismatch { delta_alpha: alpha_i - alpha_h - alpha_k - alpha_l, delta_beta }
    }
}

/// Propagation-constant mismatch from the full channel frequencies (Hz):
/// 2 pi^2 beta2_i (f_i^2 - f_h^2 + f_k^2 - f_l^2), in 1/m.
///
/// The quadratic sum is evaluated through pairwise differences,
/// f_i^2 - f_h^2 + f_k^2 - f_l^2
///   = 2 (f_i - f_h)(f_h - f_k) + r (f_i - f_h + f_k + f_l),
/// with r = f_i - f_h + f_k - f_l, which avoids the catastrophic
/// cancellation of the direct form at optical carrier frequencies and
/// reduces exactly to the indexed form on a uniform grid.
pub fn delta_beta_full(beta2_i: f64, f_i: f64, f_h: f64, f_k: f64, f_l: f64) -> f64 {
    let two_pi2 = 2.0 * std::f64::consts::PI * std::f64::consts::PI;
    let r = f_i - f_h + f_k - f_l;
    let quad = 2.0 * (f_i - f_h) * (f_h - f_k) + r * (f_i - f_h + f_k + f_l);
    two_pi2 * beta2_i * quad
}

/// Indexed form on a uniform grid with spacing `df` (Hz): the integer factor
/// i^2 - h^2 + k^2 - l^2 is evaluated exactly. Requires phase matching
/// i - h + k - l = 0.
pub fn delta_beta_grid(beta2_i: f64, i: i64, h: i64, k: i64, l: i64, df: f64) -> Result<f64> {
    if i - h + k - l != 0 {
        return Err(Error::Contract(format!(
            "FWM phase matching violated: i-h+k-l = {} for (i,h,k,l)=({i},{h},{k},{l})",
            i - h + k - l
        )));
    }
    let factor = i * i - h * h + k * k - l * l;
    let two_pi2 = 2.0 * std::f64::consts::PI * std::f64::consts::PI;
    Ok(two_pi2 * beta2_i * factor as f64 * df * df)
}

/// Longitudinal SpRS weight for the contribution from a pump at alpha_h into
/// the channel at alpha_i, in m.
///
/// Forward: (e^{(a_i-a_h)L} - 1)/(a_i - a_h) e^{-a_i L}, continuous at
/// a_i = a_h with limit L e^{-a L}. Backward: (1 - e^{-(a_i+a_h)L})/(a_i+a_h).
pub fn omega_sprs(alpha_i: f64, alpha_h: f64, length_m: f64, dir: Direction) -> f64 {
    match dir {
        Direction::Forward => {
            let d = alpha_i - alpha_h;
            if d == 0.0 {
                length_m * (-alpha_i * length_m).exp()
            } else {
                (d * length_m).exp_m1() / d * (-alpha_i * length_m).exp()
            }
        }
        Direction::Backward => {
            let s = alpha_i + alpha_h;
            -(-s * length_m).exp_m1() / s
        }
    }
}

/// |e^w - 1|^2 for w = re + j im, evaluated without cancellation for small w.
fn expm1_sq_norm(re: f64, im: f64) -> f64 {
    let er = re.exp_m1();
    let (sin, cos) = im.sin_cos();
    // cos - 1 = -2 sin^2(im/2)
    let cm1 = -2.0 * (0.5 * im).sin().powi(2);
    let real = er * cos + cm1;
    let imag = (er + 1.0) * sin;
    real * real + imag * imag
}

/// Exact FWM kernel, m^2:
///
/// chi = factor (e^{da L} - 2 e^{da L / 2} cos(db L) + 1) / (da^2 + 4 db^2)
///       e^{-a_i L},
///
/// where factor is the kurtosis for degenerate (h = l) quadruples and 4
/// otherwise. The numerator equals |e^{(da/2 + j db)L} - 1|^2, which is how
/// it is evaluated; the da, db -> 0 limit is factor L^2 e^{-a_i L} / 4.
pub fn chi_exact(
    mismatch: PhaseMismatch,
    alpha_i: f64,
    length_m: f64,
    kurtosis: f64,
    degenerate: bool,
) -> f64 {
    let factor = if degenerate { kurtosis } else { 4.0 };
    let da = mismatch.delta_alpha;
    let db = mismatch.delta_beta;
    let den = da * da + 4.0 * db * db;
    let decay = (-alpha_i * length_m).exp();
    if den == 0.0 {
        return factor * length_m * length_m / 4.0 * decay;
    }
    factor * expm1_sq_norm(0.5 * da * length_m, db * length_m) / den * decay
}

/// Linearly averaged FWM kernel, m^2: the oscillating cosine is replaced by
/// its average, chi ~ factor (e^{da L} + 1) / (da^2 + 4 db^2) e^{-a_i L}.
pub fn chi_avg(
    mismatch: PhaseMismatch,
    alpha_i: f64,
    length_m: f64,
    kurtosis: f64,
    degenerate: bool,
) -> f64 {
    let factor = if degenerate { kurtosis } else { 4.0 };
    let da = mismatch.delta_alpha;
    let db = mismatch.delta_beta;
    let den = da * da + 4.0 * db * db;
    factor * ((da * length_m).exp() + 1.0) / den * (-alpha_i * length_m).exp()
}

/// Distance at which the forward SpRS contribution from a pump at alpha_h
/// peaks: ln(a_h / a_i) / (a_h - a_i), with limit 1/a_i, in m.
pub fn peak_length(alpha_i: f64, alpha_h: f64) -> f64 {
    let d = alpha_h - alpha_i;
    // ln(a_h/a_i)/(a_h-a_i) = ln1p(d/a_i)/d, stable through the limit
    if d == 0.0 {
        1.0 / alpha_i
    } else {
        (d / alpha_i).ln_1p() / d
    }
}

/// Interference mechanism selector for [`effective_length`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mechanism {
    Sprs,
    Fwm,
    Linear,
}

/// Loss-weighted interaction length of one co-propagating contribution, m:
/// the integral of the longitudinal contribution over the span, normalized
/// to its peak value.
///
/// For SpRS the peak sits at [`peak_length`]; FWM (averaged kernel) and
/// linear leakage peak at z = 0. The FWM closed form is the sign-corrected
/// variant of the published expression, verified against direct quadrature.
pub fn effective_length(
    mechanism: Mechanism,
    alpha_i: f64,
    alpha_h: f64,
    delta_alpha: f64,
    length_m: f64,
) -> f64 {
    match mechanism {
        Mechanism::Linear => -(-alpha_i * length_m).exp_m1() / alpha_i,
        Mechanism::Fwm => {
            let d = delta_alpha - alpha_i;
            let first = if d == 0.0 { length_m } else { (d * length_m).exp_m1() / d };
            let second = -(-alpha_i * length_m).exp_m1() / alpha_i;
            0.5 * (first + second)
        }
        Mechanism::Sprs => {
            let l_pk = peak_length(alpha_i, alpha_h);
            // integral of (e^{-a_h z} - e^{-a_i z})/(a_i - a_h) over [0, L],
            // divided by the value at the peak
            let d = alpha_i - alpha_h;
            if d.abs() < 1e-9 * alpha_i {
                // degenerate limit: contribution z e^{-a z}, peak e^{-1}/a
                let a = alpha_i;
                let integral = (1.0 - (1.0 + a * length_m) * (-a * length_m).exp()) / (a * a);
                return integral / ((-1.0f64).exp() / a);
            }
            let integral = (-(-alpha_h * length_m).exp_m1() / alpha_h
                + (-alpha_i * length_m).exp_m1() / alpha_i)
                / d;
            let peak = ((-alpha_h * l_pk).exp() - (-alpha_i * l_pk).exp()) / d;
            integral / peak
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::db_per_km_to_nat_per_m;
    use approx::assert_relative_eq;

    const A02: f64 = 4.605_170_185_988_091e-5; // 0.2 dB/km in 1/m

    #[test]
    fn alpha_conversion_matches() {
        assert_relative_eq!(db_per_km_to_nat_per_m(0.2), A02, max_relative = 1e-12);
    }

    #[test]
    fn omega_forward_degenerate_limit() {
        let l = 30e3;
        let direct = omega_sprs(A02, A02, l, Direction::Forward);
        assert_relative_eq!(direct, l * (-A02 * l).exp(), max_relative = 1e-14);
        // continuity across the limit
        let near = omega_sprs(A02, A02 * (1.0 + 1e-9), l, Direction::Forward);
        assert_relative_eq!(direct, near, max_relative = 1e-6);
    }

    #[test]
    fn omega_backward_saturates() {
        let v = omega_sprs(A02, A02, 1e7, Direction::Backward);
        assert_relative_eq!(v, 1.0 / (2.0 * A02), max_relative = 1e-12);
    }

    #[test]
    fn omega_forward_peak_near_21_71_km() {
        // numeric argmax by golden-section search
        let f = |l: f64| omega_sprs(A02, A02, l, Direction::Forward);
        let l_star = golden_max(f, 1e3, 100e3);
        assert!((l_star - 21_714.7).abs() < 100.0, "argmax = {l_star} m");
        assert!((peak_length(A02, A02) - 1.0 / A02).abs() < 1e-9);
    }

    pub(super) fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - phi * (b - a);
            let d = a + phi * (b - a);
            if f(c) > f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn peak_length_values() {
        assert_relative_eq!(peak_length(A02, A02), 21_714.72, max_relative = 1e-4);
        assert_relative_eq!(
            peak_length(A02, 2.0 * A02),
            2f64.ln() / A02,
            max_relative = 1e-12
        );
        assert!((peak_length(A02, 2.0 * A02) - 15_051.5).abs() < 1.0);
    }

    #[test]
    fn chi_zero_at_zero_length() {
        let pm = PhaseMismatch { delta_alpha: -2.0 * A02, delta_beta: 1e-4 };
        assert_eq!(chi_exact(pm, A02, 0.0, 2.0, false), 0.0);
    }

    #[test]
    fn chi_matched_substitution() {
        // delta_beta = 0, delta_alpha = -2 alpha, non-degenerate
        let l = 50e3;
        let pm = PhaseMismatch { delta_alpha: -2.0 * A02, delta_beta: 0.0 };
        let got = chi_exact(pm, A02, l, 2.0, false);
        let e = (-2.0 * A02 * l).exp();
        let e2 = (-A02 * l).exp();
        let expected = 4.0 * (e - 2.0 * e2 + 1.0) * e2 / (4.0 * A02 * A02);
        assert_relative_eq!(got, expected, max_relative = 1e-12);
    }

    #[test]
    fn chi_avg_bounds_exact() {
        // |chi_avg - chi_exact| <= 2 factor e^{da L/2} e^{-a_i L} / (da^2 + 4 db^2)
        let l = 40e3;
        let mut x = 0.71;
        for _ in 0..50 {
            x = (x * 913.0) % 1.0;
            let da = -3.0 * A02 * (0.5 + x);
            let db = 1e-5 * ((x * 577.0) % 1.0 - 0.5);
            let pm = PhaseMismatch { delta_alpha: da, delta_beta: db };
            let ex = chi_exact(pm, A02, l, 2.0, false);
            let av = chi_avg(pm, A02, l, 2.0, false);
            let bound = 4.0 * 2.0 * (0.5 * da * l).exp() * (-A02 * l).exp()
                / (da * da + 4.0 * db * db);
            assert!((av - ex).abs() <= bound * (1.0 + 1e-12) + 1e-12 * (av + ex));
        }
    }

    #[test]
    fn chi_avg_vanishes_at_large_mismatch() {
        let matched = chi_avg(PhaseMismatch { delta_alpha: -2.0 * A02, delta_beta: 0.0 }, A02, 50e3, 2.0, false);
        let mut last = matched;
        for exp in 0..6 {
            let db = 1e-3 * 10f64.powi(exp);
            let v = chi_avg(PhaseMismatch { delta_alpha: -2.0 * A02, delta_beta: db }, A02, 50e3, 2.0, false);
            assert!(v < last);
            last = v;
        }
        assert!(last < 1e-12 * matched);
    }

    #[test]
    fn delta_beta_forms_agree_on_grid() {
        let beta2 = -2.8e-26; // s^2/m
        let df = 50e9;
        let f0 = 191.58e12;
        let mut x = 0.23;
        for _ in 0..100 {
            x = (x * 887.0) % 1.0;
            let h = (x * 64.0) as i64;
            let l = ((x * 313.0) % 1.0 * 64.0) as i64;
            let i = ((x * 119.0) % 1.0 * 64.0) as i64;
            let k = h + l - i;
            let full = delta_beta_full(
                beta2,
                f0 + i as f64 * df,
                f0 + h as f64 * df,
                f0 + k as f64 * df,
                f0 + l as f64 * df,
            );
            let grid = delta_beta_grid(beta2, i, h, k, l, df).unwrap();
            if grid != 0.0 {
                assert_relative_eq!(full, grid, max_relative = 1e-12);
            } else {
                assert!(full.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn delta_beta_example_value() {
        // (i,h,k,l) = (0,1,2,1): index factor 0 - 1 + 4 - 1 = 2
        let beta2 = -2.8e-26;
        let df = 50e9;
        let got = delta_beta_grid(beta2, 0, 1, 2, 1, df).unwrap();
        let expected = 2.0 * std::f64::consts::PI.powi(2) * beta2 * 2.0 * df * df;
        assert_relative_eq!(got, expected, max_relative = 1e-15);
        assert_eq!(delta_beta_grid(beta2, 5, 5, 5, 5, df).unwrap(), 0.0);
        assert!(delta_beta_grid(beta2, 0, 1, 2, 2, df).is_err());
    }

    #[test]
    fn effective_length_linear() {
        assert_relative_eq!(
            effective_length(Mechanism::Linear, A02, A02, 0.0, 1e9),
            1.0 / A02,
            max_relative = 1e-9
        );
        let l = 10.0;
        let got = effective_length(Mechanism::Linear, A02, A02, 0.0, l);
        assert_relative_eq!(got, l, max_relative = 1e-3);
    }

    #[test]
    fn effective_length_matches_quadrature() {
        // trapezoid integration of the longitudinal contribution normalized
        // to its peak, for SpRS and (averaged) FWM
        let l_total = 60e3;
        let ai = A02 * 1.3;
        let ah = A02 * 0.9;
        let n = 400_000;
        let h = l_total / n as f64;

        let sprs = |z: f64| ((-ah * z).exp() - (-ai * z).exp()) / (ai - ah);
        let mut integral = 0.0;
        let mut peak: f64 = 0.0;
        for j in 0..=n {
            let z = j as f64 * h;
            let v = sprs(z);
            peak = peak.max(v);
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            integral += w * v * h;
        }
        let expected = integral / peak;
        let got = effective_length(Mechanism::Sprs, ai, ah, 0.0, l_total);
        assert!((got - expected).abs() / expected < 1e-2, "{got} vs {expected}");

        let da = ai - 3.0 * ah;
        let fwm = |z: f64| ((da - ai) * z).exp() + (-ai * z).exp();
        let mut integral = 0.0;
        let mut peak: f64 = 0.0;
        for j in 0..=n {
            let z = j as f64 * h;
            let v = fwm(z);
            peak = peak.max(v);
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            integral += w * v * h;
        }
        let expected = integral / peak;
        let got = effective_length(Mechanism::Fwm, ai, ah, da, l_total);
        assert!((got - expected).abs() / expected < 1e-2, "{got} vs {expected}");
    }

    #[test]
    fn effective_length_limits() {
        // SpRS degenerate L -> inf: e / alpha
        let got = effective_length(Mechanism::Sprs, A02, A02, 0.0, 1e9);
        assert_relative_eq!(got, 1f64.exp() / A02, max_relative = 1e-6);
        // FWM L -> inf with da = -2 a: (1/(3a) + 1/a)/2 = 2/(3a)
        let got = effective_length(Mechanism::Fwm, A02, A02, -2.0 * A02, 1e9);
        assert_relative_eq!(got, 2.0 / (3.0 * A02), max_relative = 1e-9);
    }
}
