//! Configuration: a TOML file can supply any parameter; explicit
//! command-line flags override file values. Violating a parameter
//! invariant (even primes, zero counts, an unsupported normalization
//! exponent) is a configuration error and exits with code 2 before any
//! output is produced.

use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Deserialize;

use crate::render::Format;

/// File-supplied configuration. Keys are spelled like the corresponding
/// long flags (`check-primes`, `min-prime`).
#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    /// Optional command name; when present it must match the invoked
    /// subcommand.
    pub command: Option<String>,
    pub operator: Option<String>,
    pub family: Option<String>,
    pub dim: Option<usize>,
    pub primes: Option<Vec<u64>>,
    pub check_primes: Option<Vec<u64>>,
    pub min_prime: Option<u64>,
    pub prime: Option<u64>,
    pub precision: Option<u32>,
    pub terms: Option<usize>,
    pub power: Option<u32>,
    pub kappa: Option<KappaValue>,
    pub k: Option<u64>,
    pub window: Option<usize>,
    pub extended: Option<bool>,
    pub suite: Option<String>,
    pub format: Option<String>,
    pub output: Option<String>,
}

/// `kappa` may be written as an integer or as a rational string `"a/b"`.
#[derive(Deserialize, Clone, Debug)]
#[serde(untagged)]
pub enum KappaValue {
    Int(i64),
    Str(String),
}

pub fn load(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config file {}: {}", path.display(), e))?;
    // toml's error display reports the line/column and field of the
    // offending entry.
    toml::from_str(&text).map_err(|e| format!("config file {}: {}", path.display(), e))
}

impl FileConfig {
    pub fn format(&self) -> Result<Option<Format>, String> {
        match self.format.as_deref() {
            None => Ok(None),
            Some("tsv") => Ok(Some(Format::Tsv)),
            Some("json") => Ok(Some(Format::Json)),
            Some(other) => Err(format!(
                "config field `format` must be \"tsv\" or \"json\", got {:?}",
                other
            )),
        }
    }

    pub fn kappa_rational(&self) -> Result<Option<BigRational>, String> {
        match &self.kappa {
            None => Ok(None),
            Some(KappaValue::Int(i)) => Ok(Some(BigRational::from_integer(BigInt::from(*i)))),
            Some(KappaValue::Str(s)) => parse_rational(s).map(Some),
        }
    }
}

/// Parses `"a"` or `"a/b"` with arbitrary-precision integers.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let parse_int = |t: &str| {
        BigInt::from_str(t.trim()).map_err(|_| format!("invalid rational {:?}", s))
    };
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s)?)),
        Some((num, den)) => {
            let d = parse_int(den)?;
            if d.is_zero() {
                return Err(format!("invalid rational {:?}: zero denominator", s));
            }
            Ok(BigRational::new(parse_int(num)?, d))
        }
    }
}

/// Resolves `kappa` from flag (wins) or file, defaulting to 1.
pub fn kappa_from(flag: Option<&str>, file: &FileConfig) -> Result<BigRational, String> {
    match flag {
        Some(s) => parse_rational(s),
        None => Ok(file
            .kappa_rational()?
            .unwrap_or_else(|| BigRational::from_integer(BigInt::from(1)))),
    }
}

fn is_prime_u64(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    while d.checked_mul(d).is_some_and(|sq| sq <= p) {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes in reports must be odd primes.
pub fn ensure_odd_primes(ps: &[u64], what: &str) -> Result<(), String> {
    for &p in ps {
        if p % 2 == 0 || !is_prime_u64(p) {
            return Err(format!("`{}` entries must be odd primes, got {}", what, p));
        }
    }
    Ok(())
}

pub fn ensure_power(s: u32) -> Result<u32, String> {
    if s == 2 || s == 3 {
        Ok(s)
    } else {
        Err(format!("`power` must be 2 or 3, got {}", s))
    }
}

pub fn require<T>(v: Option<T>, what: &str) -> Result<T, String> {
    v.ok_or_else(|| format!("missing required parameter `{}` (flag or config file)", what))
}

pub fn ensure_ge1_usize(v: usize, what: &str) -> Result<usize, String> {
    if v >= 1 {
        Ok(v)
    } else {
        Err(format!("`{}` must be at least 1", what))
    }
}

pub fn ensure_ge1_u32(v: u32, what: &str) -> Result<u32, String> {
    if v >= 1 {
        Ok(v)
    } else {
        Err(format!("`{}` must be at least 1", what))
    }
}
