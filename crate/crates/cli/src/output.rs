//! Rendering helpers shared by the subcommands: exact fractions in JSON,
//! digests, and the machine/human output switch.

use std::io::Write;

use num::{BigRational, One, ToPrimitive};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Exact fraction as `{"num", "den", "text"}`; numerator and denominator are
/// decimal strings so arbitrarily large terms survive JSON.
pub fn fraction(r: &BigRational) -> Value {
    json!({
        "num": r.numer().to_string(),
        "den": r.denom().to_string(),
        "text": fraction_text(r),
    })
}

pub fn fraction_text(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn approx(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn emit(json_mode: bool, value: &Value, human: &[String]) {
    let mut out = std::io::stdout().lock();
    let result = if json_mode {
        writeln!(out, "{}", serde_json::to_string_pretty(value).expect("report serializes"))
    } else {
        human.iter().try_for_each(|line| writeln!(out, "{line}"))
    };
    if let Err(e) = result {
        // A closed pipe downstream (e.g. `spir ... | head`) is not our error.
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: writing report: {e}");
        std::process::exit(4);
    }
}
