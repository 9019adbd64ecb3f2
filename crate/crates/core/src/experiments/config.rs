//! Flat `key = value` configuration files.
//!
//! Keys are the [`SystemConfig`] field names (`P_max`, `sigma_b2`, `R_star`,
//! ...), matched case-insensitively. Power values take `W`, `dBw` or `dBm`
//! suffixes, ratios take `dB`, distances may carry `m`. Bare numbers are SI.

use crate::error::{Error, Result};
use crate::model::{db_to_linear, dbm_to_watts, SystemConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Unit {
    Power,
    Ratio,
    Distance,
    Plain,
    Count,
}

const KEYS: [(&str, Unit); 19] = [
    ("M", Unit::Count),
    ("N", Unit::Count),
    ("P_max", Unit::Power),
    ("P_j_max", Unit::Power),
    ("sigma_b2", Unit::Power),
    ("sigma_c2", Unit::Power),
    ("sigma_w2", Unit::Power),
    ("phi_sic", Unit::Ratio),
    ("rho0", Unit::Ratio),
    ("alpha", Unit::Plain),
    ("d_ar", Unit::Distance),
    ("d_rb", Unit::Distance),
    ("d_rc", Unit::Distance),
    ("d_rw", Unit::Distance),
    ("epsilon", Unit::Plain),
    ("iota", Unit::Plain),
    ("kappa", Unit::Plain),
    ("R_star", Unit::Plain),
    ("rng_seed", Unit::Count),
];

/// Canonical spelling of a configuration key.
pub fn canonical_key(key: &str) -> Option<&'static str> {
    KEYS.iter().find(|(k, _)| k.eq_ignore_ascii_case(key.trim())).map(|(k, _)| *k)
}

fn split_unit(raw: &str) -> (&str, String) {
    let raw = raw.trim();
    let cut = raw
        .char_indices()
        .find(|&(i, c)| c.is_ascii_alphabetic() && !is_exponent(raw, i))
        .map(|(i, _)| i)
        .unwrap_or(raw.len());
    (raw[..cut].trim(), raw[cut..].trim().to_ascii_lowercase())
}

// `1e-3` is a number, `1dB` is not
fn is_exponent(s: &str, i: usize) -> bool {
    let b = s.as_bytes();
    matches!(b[i], b'e' | b'E')
        && i > 0
        && (b[i - 1].is_ascii_digit() || b[i - 1] == b'.')
        && b.get(i + 1).is_some_and(|c| c.is_ascii_digit() || *c == b'-' || *c == b'+')
}

/// Parses one value of `key` into SI units.
pub fn parse_value(key: &str, raw: &str) -> Result<f64> {
    let canon = canonical_key(key).ok_or_else(|| Error::Config(format!("unknown key `{}`", key.trim())))?;
    let unit = KEYS.iter().find(|(k, _)| *k == canon).map(|(_, u)| *u).unwrap_or(Unit::Plain);
    let (num, suffix) = split_unit(raw);
    let x: f64 = num.parse().map_err(|_| Error::Config(format!("`{canon}`: cannot parse `{raw}`")))?;
    let bad = || Error::Config(format!("`{canon}`: unit `{suffix}` not allowed"));
    let v = match (unit, suffix.as_str()) {
        (_, "") => x,
        (Unit::Power, "w") => x,
        (Unit::Power, "dbw") => db_to_linear(x),
        (Unit::Power, "dbm") => dbm_to_watts(x),
        (Unit::Ratio, "db") => db_to_linear(x),
        (Unit::Distance, "m") => x,
        _ => return Err(bad()),
    };
    if unit == Unit::Count && (v < 0.0 || v.fract() != 0.0) {
        return Err(Error::Config(format!("`{canon}` must be a non-negative integer, got `{raw}`")));
    }
    Ok(v)
}

/// Sets one field of `cfg` from a raw string.
pub fn set_field(cfg: &mut SystemConfig, key: &str, raw: &str) -> Result<()> {
    let v = parse_value(key, raw)?;
    let canon = canonical_key(key).expect("checked by parse_value");
    match canon {
        "M" => cfg.m = v as usize,
        "N" => cfg.n = v as usize,
        "P_max" => cfg.p_max = v,
        "P_j_max" => cfg.p_j_max = v,
        "sigma_b2" => cfg.sigma_b2 = v,
        "sigma_c2" => cfg.sigma_c2 = v,
        "sigma_w2" => cfg.sigma_w2 = v,
        "phi_sic" => cfg.phi_sic = v,
        "rho0" => cfg.rho0 = v,
        "alpha" => cfg.alpha = v,
        "d_ar" => cfg.d_ar = v,
        "d_rb" => cfg.d_rb = v,
        "d_rc" => cfg.d_rc = v,
        "d_rw" => cfg.d_rw = v,
        "epsilon" => cfg.epsilon = v,
        "iota" => cfg.iota = v,
        "kappa" => cfg.kappa = v,
        "R_star" => cfg.r_star = v,
        "rng_seed" => cfg.rng_seed = v as u64,
        _ => unreachable!(),
    }
    Ok(())
}

/// Parses a config file on top of the defaults. `#` starts a comment.
pub fn parse_config(text: &str) -> Result<SystemConfig> {
    let mut cfg = SystemConfig::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        set_field(&mut cfg, k, v).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("line {}: {m}", lineno + 1)),
            e => e,
        })?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<std::path::Path>) -> Result<SystemConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn units() {
        assert_eq!(parse_value("P_max", "2").unwrap(), 2.0);
        assert!((parse_value("p_max", "3 dBw").unwrap() - 10f64.powf(0.3)).abs() < 1e-12);
        assert!((parse_value("sigma_b2", "-140dBm").unwrap() - 1e-17).abs() < 1e-28);
        assert!((parse_value("rho0", "-20 dB").unwrap() - 0.01).abs() < 1e-15);
        assert_eq!(parse_value("phi_sic", "1e-16").unwrap(), 1e-16);
        assert_eq!(parse_value("d_rb", "100 m").unwrap(), 100.0);
        assert!(parse_value("d_rb", "100 dB").is_err());
        assert!(parse_value("N", "2.5").is_err());
        assert!(parse_value("bogus", "1").is_err());
    }
}
