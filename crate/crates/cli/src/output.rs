use std::fs;
use std::io::{self, Write};
use std::path::Path;

use pauli_geometry::exact::{rational_pair, Rational};
use pauli_geometry::mc::VolumeEstimate;
use pauli_geometry::Error;
use serde::Serialize;
use serde_json::{json, Value};

/// Unsupported method/region combination or a failed computation.
pub const EXIT_UNSUPPORTED: u8 = 1;
/// Malformed input.
pub const EXIT_MALFORMED: u8 = 2;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn malformed(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_MALFORMED,
            message: message.into(),
        }
    }

    pub fn unsupported(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_UNSUPPORTED,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonPolytopal(_)
            | Error::NotChannelRegion(_)
            | Error::EmptyDenominator(_)
            | Error::EmptyRegion(..)
            | Error::NotReachable(_)
            | Error::UnboundedPolytope
            | Error::IntegerOverflow(_) => EXIT_UNSUPPORTED,
            _ => EXIT_MALFORMED,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self::unsupported(format!("i/o: {e}"))
    }
}

/// Machine-readable result envelope shared by all commands.
#[derive(Debug, Serialize)]
pub struct Document {
    pub command: &'static str,
    pub inputs: Value,
    pub results: Value,
    pub version: &'static str,
}

impl Document {
    pub fn new(command: &'static str, inputs: Value, results: Value) -> Self {
        Self {
            command,
            inputs,
            results,
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }
}

pub fn exact_json(r: &Rational) -> Result<Value, CliError> {
    let pair = rational_pair(r)?;
    Ok(json!({
        "method": "exact",
        "value": pair,
        "approx": pair[0] as f64 / pair[1] as f64,
    }))
}

pub fn estimate_json(e: &VolumeEstimate) -> Value {
    json!({
        "method": e.method.tag(),
        "value": e.value,
        "std_error": e.std_error,
        "samples": e.samples,
        "hits": e.hits,
        "seed": e.seed,
    })
}

/// `1/3 (≈0.3333)`; integers print bare.
pub fn rational_text(r: &Rational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        let approx = num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN);
        format!("{r} (≈{approx:.4})")
    }
}

pub fn estimate_text(e: &VolumeEstimate) -> String {
    format!(
        "{:.6} ± {:.6} [{}, {} samples, seed {}]",
        e.value,
        e.std_error,
        e.method.tag(),
        e.samples,
        e.seed.map_or_else(|| "-".to_string(), |s| s.to_string())
    )
}

/// Writes to `path`, or stdout when `None`.
pub fn emit(path: Option<&Path>, body: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, body)?,
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(body.as_bytes())?;
            lock.flush()?;
        }
    }
    Ok(())
}
