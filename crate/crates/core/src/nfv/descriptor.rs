use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::NfvError;
use crate::topology::{DcTier, NodeId, Topology};

/// Prefix of a link endpoint that anchors it to the cameras of a node.
pub const CAMERA_SOURCE: &str = "CAMERA_SOURCE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VnfKind {
    Csm,
    Css,
    Dm,
    Analytics,
    StorageDb,
    Nat,
    Firewall,
    Accounting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VnfDescriptor {
    pub name: String,
    pub kind: VnfKind,
    pub cpu_cores: u32,
    pub ram_gb: u32,
    pub storage_tb: f64,
    pub allowed_tiers: BTreeSet<DcTier>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pin_node: Option<NodeId>,
}

impl VnfDescriptor {
    pub fn new(name: &str, kind: VnfKind, cpu_cores: u32, ram_gb: u32, storage_tb: f64, tiers: &[DcTier]) -> Self {
        VnfDescriptor {
            name: name.to_string(),
            kind,
            cpu_cores,
            ram_gb,
            storage_tb,
            allowed_tiers: tiers.iter().copied().collect(),
            pin_node: None,
        }
    }

    pub fn pinned(mut self, node: &str) -> Self {
        self.pin_node = Some(NodeId::from(node));
        self
    }
}

/// One end of a virtual link: a VNF of the same descriptor, or the cameras
/// attached at a node (written `CAMERA_SOURCE@node`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum LinkEnd {
    Vnf(String),
    Camera(NodeId),
}

impl From<String> for LinkEnd {
    fn from(s: String) -> Self {
        match s.strip_prefix(CAMERA_SOURCE).and_then(|r| r.strip_prefix('@')) {
            Some(node) => LinkEnd::Camera(NodeId::from(node)),
            None => LinkEnd::Vnf(s),
        }
    }
}

impl From<&str> for LinkEnd {
    fn from(s: &str) -> Self {
        LinkEnd::from(s.to_string())
    }
}

impl From<LinkEnd> for String {
    fn from(e: LinkEnd) -> String {
        e.to_string()
    }
}

impl fmt::Display for LinkEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkEnd::Vnf(name) => f.write_str(name),
            LinkEnd::Camera(node) => write!(f, "{CAMERA_SOURCE}@{node}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VirtualLink {
    pub from_vnf: LinkEnd,
    pub to_vnf: LinkEnd,
    pub bandwidth_gbps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_latency_ms: Option<f64>,
}

impl VirtualLink {
    pub fn new(from: &str, to: &str, bandwidth_gbps: f64) -> Self {
        VirtualLink { from_vnf: from.into(), to_vnf: to.into(), bandwidth_gbps, max_latency_ms: None }
    }

    pub fn bounded(mut self, max_latency_ms: f64) -> Self {
        self.max_latency_ms = Some(max_latency_ms);
        self
    }
}

/// Network service descriptor: VNFs and the virtual links between them.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Nsd {
    pub vnfs: Vec<VnfDescriptor>,
    #[serde(default)]
    pub links: Vec<VirtualLink>,
}

fn invalid(msg: impl Into<String>) -> NfvError {
    NfvError::InvalidNsd(msg.into())
}

impl Nsd {
    pub fn from_json(json: &str) -> Result<Self, NfvError> {
        serde_json::from_str(json).map_err(|e| invalid(e.to_string()))
    }

    pub fn vnf(&self, name: &str) -> Option<&VnfDescriptor> {
        self.vnfs.iter().find(|v| v.name == name)
    }

    /// Structural checks that do not need a topology.
    pub fn validate(&self) -> Result<(), NfvError> {
        let mut names = HashSet::new();
        for v in &self.vnfs {
            if v.name.is_empty() || v.name.starts_with(CAMERA_SOURCE) {
                return Err(invalid(format!("illegal VNF name '{}'", v.name)));
            }
            if !names.insert(v.name.as_str()) {
                return Err(invalid(format!("duplicate VNF name {}", v.name)));
            }
            if v.cpu_cores == 0 || v.ram_gb == 0 {
                return Err(invalid(format!("{}: cpu_cores and ram_gb must be positive", v.name)));
            }
            if !(v.storage_tb >= 0.0 && v.storage_tb.is_finite()) {
                return Err(invalid(format!("{}: storage_tb must be non-negative", v.name)));
            }
            if v.allowed_tiers.is_empty() {
                return Err(invalid(format!("{}: allowed_tiers is empty", v.name)));
            }
        }
        for (i, l) in self.links.iter().enumerate() {
            for end in [&l.from_vnf, &l.to_vnf] {
                if let LinkEnd::Vnf(name) = end {
                    if !names.contains(name.as_str()) {
                        return Err(invalid(format!("link {i}: unknown endpoint {name}")));
                    }
                }
            }
            match (&l.from_vnf, &l.to_vnf) {
                (LinkEnd::Camera(_), LinkEnd::Camera(_)) => {
                    return Err(invalid(format!("link {i}: joins two camera sources")));
                }
                (a, b) if a == b => return Err(invalid(format!("link {i}: endpoints are identical"))),
                _ => {}
            }
            if !(l.bandwidth_gbps > 0.0 && l.bandwidth_gbps.is_finite()) {
                return Err(invalid(format!("link {i}: bandwidth_gbps must be positive")));
            }
            if let Some(m) = l.max_latency_ms {
                if m.is_nan() || m <= 0.0 {
                    return Err(invalid(format!("link {i}: max_latency_ms must be positive")));
                }
            }
        }
        Ok(())
    }

    /// Checks pins and camera anchors against a topology.
    pub fn validate_for(&self, topo: &Topology) -> Result<(), NfvError> {
        self.validate()?;
        for v in &self.vnfs {
            if let Some(pin) = &v.pin_node {
                if topo.node(pin).is_none() {
                    return Err(invalid(format!("{}: pinned to unknown node {pin}", v.name)));
                }
            }
        }
        for (i, l) in self.links.iter().enumerate() {
            for end in [&l.from_vnf, &l.to_vnf] {
                if let LinkEnd::Camera(node) = end {
                    if topo.node(node).is_none() {
                        return Err(invalid(format!("link {i}: camera source at unknown node {node}")));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn camera_token_round_trip() {
        let e = LinkEnd::from("CAMERA_SOURCE@AMEN2");
        assert_eq!(e, LinkEnd::Camera("AMEN2".into()));
        assert_eq!(serde_json::to_string(&e).unwrap(), "\"CAMERA_SOURCE@AMEN2\"");
        assert_eq!(LinkEnd::from("CSM"), LinkEnd::Vnf("CSM".into()));
    }

    #[test]
    fn validation() {
        let base = Nsd {
            vnfs: vec![VnfDescriptor::new("A", VnfKind::Nat, 1, 1, 0.0, &[DcTier::Edc])],
            links: vec![VirtualLink::new("CAMERA_SOURCE@X", "A", 1.0)],
        };
        assert!(base.validate().is_ok());

        let mut dup = base.clone();
        dup.vnfs.push(dup.vnfs[0].clone());
        assert_eq!(dup.validate().unwrap_err().code(), "INVALID_NSD");

        let mut dangling = base.clone();
        dangling.links.push(VirtualLink::new("A", "B", 1.0));
        assert!(dangling.validate().is_err());

        let mut no_tiers = base.clone();
        no_tiers.vnfs[0].allowed_tiers.clear();
        assert!(no_tiers.validate().is_err());

        let mut zero_bw = base.clone();
        zero_bw.links[0].bandwidth_gbps = 0.0;
        assert!(zero_bw.validate().is_err());

        let mut bad_bound = base;
        bad_bound.links[0].max_latency_ms = Some(0.0);
        assert!(bad_bound.validate().is_err());
    }

    #[test]
    fn unknown_fields_rejected() {
        let err = Nsd::from_json(r#"{"vnfs":[],"links":[],"extra":1}"#).unwrap_err();
        assert_eq!(err.code(), "INVALID_NSD");
    }
}
