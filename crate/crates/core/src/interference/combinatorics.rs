//! Counting and continuous density of FWM combinations on a uniform grid.
//!
//! For `N` evenly spaced classical channels with indices 0..N-1, the FWM
//! products generated at slot `i` come from pairs (h, l) with k = h + l - i
//! also on the grid and none of h, k, l equal to i.

/// Closed-form count of FWM combinations affecting slot `i` out of `N`
/// classical channels. Zero outside the support i in [-N+1, 2N-2].
pub fn fwm_count(n: u32, i: i64) -> u64 {
    let n = i64::from(n);
    if n < 1 || i < -n + 1 || i > 2 * n - 2 {
        return 0;
    }
    let c2 = if i < 0 {
        n * n + n + 2 * n * i + i + i * i
    } else if i < n {
        n * n - 5 * n + 2 * n * i - 2 * i - 2 * i * i + 4 + 2 * (2 * i - n + 1).abs()
    } else {
        4 * n * n - 2 * n - 4 * n * i + i + i * i
    };
    debug_assert!(c2 >= 0 && c2 % 2 == 0, "count formula gave {c2} for N={n}, i={i}");
    (c2 / 2) as u64
}

/// Exhaustive enumeration of the same count; the reference the closed form
/// is checked against.
pub fn fwm_count_brute(n: u32, i: i64) -> u64 {
    let n = i64::from(n);
    let mut count = 0;
    for h in 0..n {
        if h == i {
            continue;
        }
        for l in 0..n {
            if l == i {
                continue;
            }
            let k = h + l - i;
            if k >= 0 && k < n && k != i {
                count += 1;
            }
        }
    }
    count
}

/// Continuous FWM combination density versus the normalized offset
/// `delta = (f_i - f_center) / B_w` from the center of the classical band.
///
/// Piecewise parabolic, even, supported on (-3/2, 3/2), normalized to unit
/// integral; the value at the band center is 3/4 and at the band edges
/// (delta = +/- 1/2) it is 1/2.
pub fn fwm_density(delta: f64) -> f64 {
    let d = delta.abs();
    if d >= 1.5 {
        0.0
    } else if d > 0.5 {
        0.5 * (d - 1.5) * (d - 1.5)
    } else {
        0.75 - d * d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases_match_enumeration() {
        assert_eq!(fwm_count(3, 0), 1);
        assert_eq!(fwm_count(3, -1), 3);
        assert_eq!(fwm_count(3, 3), 3);
        for n in 1..=20u32 {
            for i in -(n as i64)..=2 * n as i64 {
                assert_eq!(fwm_count(n, i), fwm_count_brute(n, i), "N={n}, i={i}");
            }
        }
    }

    #[test]
    fn outside_support_is_zero() {
        assert_eq!(fwm_count(8, -8), 0);
        assert_eq!(fwm_count(8, 15), 0);
        assert_eq!(fwm_count(1, 0), 0);
    }

    #[test]
    fn density_anchor_values() {
        assert_eq!(fwm_density(0.0), 0.75);
        assert_eq!(fwm_density(0.5), 0.5);
        assert_eq!(fwm_density(-0.5), 0.5);
        assert_eq!(fwm_density(1.5), 0.0);
        assert_eq!(fwm_density(-1.5), 0.0);
        // ~33 % decay at the band edges
        assert!((fwm_density(0.5) / fwm_density(0.0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn density_even_continuous_normalized() {
        let mut x = 0.17;
        for _ in 0..50 {
            x = (x * 771.0) % 1.0;
            let d = 3.0 * (x - 0.5);
            assert_eq!(fwm_density(d), fwm_density(-d));
        }
        // continuity at the breakpoints
        for b in [0.5, 1.5] {
            let eps = 1e-9;
            assert!((fwm_density(b - eps) - fwm_density(b + eps)).abs() < 1e-8);
        }
        // trapezoid integral over the support
        let n = 600_000;
        let h = 3.0 / n as f64;
        let mut integral = 0.0;
        for j in 0..=n {
            let d = -1.5 + j as f64 * h;
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            integral += w * fwm_density(d) * h;
        }
        assert!((integral - 1.0).abs() < 1e-9, "integral = {integral}");
    }

    #[test]
    fn count_converges_to_density() {
        let n = 512u32;
        let nn = n as f64;
        let center = (nn - 1.0) / 2.0;
        let mut worst = 0.0f64;
        for i in -(n as i64) + 1..=2 * (n as i64) - 2 {
            let delta = (i as f64 - center) / nn;
            let dev = (fwm_count(n, i) as f64 / (nn * nn) - fwm_density(delta)).abs();
            worst = worst.max(dev);
        }
        assert!(worst < 0.02, "max deviation {worst}");
    }
}
