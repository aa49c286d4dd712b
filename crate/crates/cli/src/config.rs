//! Run configuration: a JSON description of the catalog plus optional
//! defaults for scheme, seed, trials, and transport. Priors are exact
//! numerator/denominator pairs; nothing is ever renormalized.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use num::{BigInt, BigRational, Zero};
use serde::Deserialize;
use spir_core::catalog::{validate_catalog, MessageMeta};
use spir_core::{Catalog, SchemeKind};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n_databases: u16,
    pub messages: Vec<MessageSpec>,
    #[serde(default)]
    pub scheme: Option<SchemeKind>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub trials: Option<u64>,
    #[serde(default)]
    pub transport: Option<TransportSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MessageSpec {
    pub id: String,
    pub length_bits: u64,
    pub prior: PriorSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorSpec {
    pub num: IntText,
    pub den: IntText,
}

/// A JSON integer, or a decimal string for values beyond 64 bits.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum IntText {
    Int(i64),
    Text(String),
}

impl IntText {
    fn to_bigint(&self) -> Result<BigInt, String> {
        match self {
            IntText::Int(v) => Ok(BigInt::from(*v)),
            IntText::Text(s) => s
                .trim()
                .parse()
                .map_err(|_| format!("{s:?} is not an integer")),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TransportSpec {
    Inprocess,
    Network { endpoints: Vec<String> },
}

pub fn load(path: &Path) -> Result<(RunConfig, Catalog), String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let config: RunConfig =
        serde_json::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))?;
    let catalog = build_catalog(&config)?;
    Ok((config, catalog))
}

fn build_catalog(config: &RunConfig) -> Result<Catalog, String> {
    let mut seen = BTreeSet::new();
    let mut metas = Vec::with_capacity(config.messages.len());
    for spec in &config.messages {
        if !seen.insert(spec.id.as_str()) {
            return Err(format!("duplicate message id {:?}", spec.id));
        }
        let num = spec.prior.num.to_bigint()?;
        let den = spec.prior.den.to_bigint()?;
        if den.is_zero() {
            return Err(format!("message {:?}: prior denominator is zero", spec.id));
        }
        metas.push(MessageMeta {
            id: spec.id.clone(),
            length_bits: spec.length_bits,
            prior: BigRational::new(num, den),
        });
    }
    validate_catalog(metas, config.n_databases).map_err(|e| e.to_string())
}
