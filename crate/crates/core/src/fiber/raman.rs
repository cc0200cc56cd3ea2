//! Raman gain efficiency table with linear interpolation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bundled silica gain table (detuning THz, efficiency 1/(W km) at the
/// reference pump and area; see the file header for the normalization).
pub const BUNDLED_SILICA_TABLE: &str = include_str!("../../data/raman_silica.txt");

/// Tabulated Raman gain efficiency versus pump-signal detuning.
///
/// Rows hold (detuning >= 0, gain efficiency) at a stated reference pump
/// wavelength and effective area; `g(0) = 0` so the spontaneous-scattering
/// product with the thermal phonon number stays finite as the detuning
/// vanishes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamanGainTable {
    /// Detuning grid, Hz (strictly increasing, starts at 0).
    pub detuning_hz: Vec<f64>,
    /// Gain efficiency at each detuning, 1/(W m).
    pub gain_per_w_m: Vec<f64>,
    /// Pump wavelength the table is normalized to, nm.
    pub ref_pump_nm: f64,
    /// Effective area the table is normalized to, um^2.
    pub ref_area_um2: f64,
    /// Waveguide temperature, K.
    pub temperature_k: f64,
}

impl RamanGainTable {
    /// The bundled silica table.
    pub fn default_silica() -> Self {
        Self::parse(BUNDLED_SILICA_TABLE).expect("bundled Raman table parses")
    }

    /// Parse the plain-text table format: `#`-comment lines, with required
    /// `# key = value` headers (`ref_pump_nm`, `ref_area_um2`,
    /// `temperature_k`) followed by two whitespace-separated columns
    /// (detuning THz, gain 1/(W km)).
    pub fn parse(text: &str) -> Result<Self> {
        let mut ref_pump_nm = None;
        let mut ref_area_um2 = None;
        let mut temperature_k = None;
        let mut detuning_hz = Vec::new();
        let mut gain = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((key, value)) = comment.split_once('=') {
                    let v: f64 = value.trim().parse().map_err(|_| {
                        Error::Parse(format!("line {}: bad header value {value:?}", lineno + 1))
                    })?;
                    match key.trim() {
                        "ref_pump_nm" => ref_pump_nm = Some(v),
                        "ref_area_um2" => ref_area_um2 = Some(v),
                        "temperature_k" => temperature_k = Some(v),
                        _ => {}
                    }
                }
                continue;
            }
            let mut cols = line.split_whitespace();
            let (Some(a), Some(b)) = (cols.next(), cols.next()) else {
                return Err(Error::Parse(format!("line {}: expected two columns", lineno + 1)));
            };
            let d: f64 = a
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad detuning {a:?}", lineno + 1)))?;
            let g: f64 = b
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad gain {b:?}", lineno + 1)))?;
            detuning_hz.push(d * 1e12);
            gain.push(g / 1e3);
        }

        let table = RamanGainTable {
            detuning_hz,
            gain_per_w_m: gain,
            ref_pump_nm: ref_pump_nm
                .ok_or_else(|| Error::Parse("missing ref_pump_nm header".into()))?,
            ref_area_um2: ref_area_um2
                .ok_or_else(|| Error::Parse("missing ref_area_um2 header".into()))?,
            temperature_k: temperature_k
                .ok_or_else(|| Error::Parse("missing temperature_k header".into()))?,
        };
        table.validate()?;
        Ok(table)
    }

    pub fn validate(&self) -> Result<()> {
        if self.detuning_hz.len() < 2 || self.detuning_hz.len() != self.gain_per_w_m.len() {
            return Err(Error::Config("Raman table needs >= 2 matching rows".into()));
        }
        if self.detuning_hz[0] != 0.0 || self.gain_per_w_m[0] != 0.0 {
            return Err(Error::Config("Raman table must start at (0, 0)".into()));
        }
        if self.detuning_hz.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("Raman detunings must be strictly increasing".into()));
        }
        if self.gain_per_w_m.iter().any(|&g| g < 0.0) {
            return Err(Error::Config("Raman gains must be non-negative".into()));
        }
        let (imax, _) = self
            .gain_per_w_m
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty");
        let peak_thz = self.detuning_hz[imax] / 1e12;
        if !(12.0..=14.0).contains(&peak_thz) {
            return Err(Error::Config(format!("Raman peak at {peak_thz} THz outside [12, 14]")));
        }
        if self.temperature_k <= 0.0 || self.ref_pump_nm <= 0.0 || self.ref_area_um2 <= 0.0 {
            return Err(Error::Config("Raman reference values must be positive".into()));
        }
        Ok(())
    }

    /// Maximum supported detuning, Hz.
    pub fn max_detuning_hz(&self) -> f64 {
        *self.detuning_hz.last().expect("validated table")
    }

    /// Linearly interpolated gain efficiency at |detuning|; zero beyond the
    /// table support.
    pub fn gain(&self, detuning_hz: f64) -> f64 {
        let x = detuning_hz.abs();
        if x > self.max_detuning_hz() {
            return 0.0;
        }
        let idx = self.detuning_hz.partition_point(|&d| d < x);
        if idx == 0 {
            return self.gain_per_w_m[0];
        }
        let (x0, x1) = (self.detuning_hz[idx - 1], self.detuning_hz[idx]);
        let (y0, y1) = (self.gain_per_w_m[idx - 1], self.gain_per_w_m[idx]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_valid() {
        let t = RamanGainTable::default_silica();
        assert_eq!(t.temperature_k, 300.0);
        assert_eq!(t.ref_pump_nm, 1450.0);
        assert!(t.max_detuning_hz() >= 41.9e12);
        assert_eq!(t.gain(0.0), 0.0);
    }

    #[test]
    fn interpolation_between_rows() {
        let t = RamanGainTable::default_silica();
        let mid = t.gain(0.3e12);
        let lo = t.gain(0.2e12);
        let hi = t.gain(0.4e12);
        assert!((mid - 0.5 * (lo + hi)).abs() < 1e-12 * hi.max(1e-30));
    }

    #[test]
    fn beyond_support_is_zero() {
        let t = RamanGainTable::default_silica();
        assert_eq!(t.gain(60e12), 0.0);
        assert_eq!(t.gain(-60e12), 0.0);
    }

    #[test]
    fn rejects_malformed_tables() {
        assert!(RamanGainTable::parse("# ref_pump_nm = 1450\n0.0 0.0\n").is_err());
        let text = "# ref_pump_nm = 1450\n# ref_area_um2 = 80\n# temperature_k = 300\n0.0 0.1\n1.0 0.2\n";
        assert!(RamanGainTable::parse(text).is_err(), "nonzero gain at zero detuning");
    }
}
