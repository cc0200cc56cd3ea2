//! Unit conversions between SI-internal and I/O-facing quantities.
//!
//! Everything inside the crate works in W, m, s and Hz. Config files and CSV
//! tables use the conventional fiber-optics units (dB/km, dBm, nm, THz, km);
//! these helpers are the only place the two meet.

use crate::constants::SPEED_OF_LIGHT;

const LN10: f64 = std::f64::consts::LN_10;

/// dB/km -> natural power attenuation, 1/m.
pub fn db_per_km_to_nat_per_m(db_km: f64) -> f64 {
    db_km * LN10 / 10.0 / 1e3
}

/// Natural power attenuation 1/m -> dB/km.
pub fn nat_per_m_to_db_per_km(nat_m: f64) -> f64 {
    nat_m * 10.0 / LN10 * 1e3
}

/// dBm -> W.
pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

/// W -> dBm (negative infinity for zero).
pub fn watt_to_dbm(w: f64) -> f64 {
    10.0 * (w / 1e-3).log10()
}

/// dBm/GHz -> W/Hz.
pub fn dbm_per_ghz_to_w_per_hz(dbm_ghz: f64) -> f64 {
    dbm_to_watt(dbm_ghz) / 1e9
}

/// Vacuum wavelength in nm -> frequency in Hz.
pub fn nm_to_hz(nm: f64) -> f64 {
    SPEED_OF_LIGHT / (nm * 1e-9)
}

/// Frequency in Hz -> vacuum wavelength in nm.
pub fn hz_to_nm(hz: f64) -> f64 {
    SPEED_OF_LIGHT / hz * 1e9
}

/// THz -> Hz.
pub fn thz_to_hz(thz: f64) -> f64 {
    thz * 1e12
}

/// GHz -> Hz.
pub fn ghz_to_hz(ghz: f64) -> f64 {
    ghz * 1e9
}

/// km -> m.
pub fn km_to_m(km: f64) -> f64 {
    km * 1e3
}

/// m -> km.
pub fn m_to_km(m: f64) -> f64 {
    m / 1e3
}
