//! JSON topology document.

use serde::{Deserialize, Serialize};

use super::{AmpVariant, DataCenter, NodeKind, SpectrumGrid, Vendor};
use crate::optical::FormatName;

pub const DEFAULT_LOSS_COEFF_DB_PER_KM: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyDocument {
    pub nodes: Vec<NodeDocument>,
    pub spans: Vec<SpanDocument>,
    #[serde(default)]
    pub grid: SpectrumGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDocument {
    pub id: String,
    pub kind: NodeKind,
    #[serde(default)]
    pub amp_variant: AmpVariant,
    /// Defaults to `true`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub has_blocker: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dc: Option<DataCenter>,
    #[serde(default)]
    pub transponders: Vec<TransponderDocument>,
}

/// Only `vendor` is required; the rest default from the vendor profile and are
/// checked against it when given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransponderDocument {
    pub vendor: Vendor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelengths: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formats: Option<Vec<FormatName>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub openconfig_native: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanDocument {
    pub id: String,
    pub a: String,
    pub z: String,
    pub length_km: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss_coeff_db_per_km: Option<f64>,
    /// Defaults to `true`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operational: Option<bool>,
}
