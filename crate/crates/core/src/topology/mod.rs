//! Metro horseshoe network model.
//!
//! A topology is a simple path of nodes whose two ends are the metro core edge
//! nodes (MCEN); access metro edge nodes (AMEN) sit in between. After loading,
//! nodes and spans are stored in line order: `spans()[i]` joins `nodes()[i]` and
//! `nodes()[i + 1]`.

mod document;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use document::{NodeDocument, SpanDocument, TopologyDocument, TransponderDocument, DEFAULT_LOSS_COEFF_DB_PER_KM};

use crate::optical::FormatName;

/// Span lengths outside this range are accepted with a warning.
pub const TYPICAL_SPAN_KM: (f64, f64) = (20.0, 200.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("malformed topology document: {0}")]
    Parse(String),
    #[error("invalid topology: {0}")]
    Invalid(String),
}

impl TopologyError {
    pub fn code(&self) -> &'static str {
        match self {
            TopologyError::Parse(_) => "PARSE_ERROR",
            TopologyError::Invalid(_) => "INVALID_TOPOLOGY",
        }
    }
}

fn invalid<T>(reason: impl Into<String>) -> Result<T, TopologyError> {
    Err(TopologyError::Invalid(reason.into()))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum NodeKind {
    Amen,
    Mcen,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AmpVariant {
    /// LCoS blocker with an EDFA restoring the launch power.
    #[default]
    Edfa,
    /// Photonic integrated node with SOAs; no net node loss.
    SoaLossless,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum DcTier {
    Edc,
    Rdc,
    Cdc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataCenter {
    pub tier: DcTier,
    pub cpu_cores: u32,
    pub ram_gb: u32,
    pub storage_tb: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Vendor {
    A,
    B,
}

impl Vendor {
    pub fn wavelengths(self) -> u32 {
        match self {
            Vendor::A => 2,
            Vendor::B => 1,
        }
    }

    pub fn formats(self) -> BTreeSet<FormatName> {
        match self {
            Vendor::A => [FormatName::DpQpsk, FormatName::Dp16Qam].into(),
            Vendor::B => FormatName::ALL.into(),
        }
    }

    pub fn openconfig_native(self) -> bool {
        matches!(self, Vendor::A)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransponderType {
    pub vendor: Vendor,
    /// Independently tunable slots on the device.
    pub wavelengths: u32,
    pub formats: BTreeSet<FormatName>,
    pub openconfig_native: bool,
}

impl TransponderType {
    pub fn of_vendor(vendor: Vendor) -> Self {
        TransponderType {
            vendor,
            wavelengths: vendor.wavelengths(),
            formats: vendor.formats(),
            openconfig_native: vendor.openconfig_native(),
        }
    }

    pub fn supports(&self, format: FormatName) -> bool {
        self.formats.contains(&format)
    }

    fn from_document(node: &str, doc: &TransponderDocument) -> Result<Self, TopologyError> {
        let profile = Self::of_vendor(doc.vendor);
        if let Some(w) = doc.wavelengths {
            if w != profile.wavelengths {
                return invalid(format!(
                    "node {node}: vendor {:?} transponder has {} wavelengths, not {w}",
                    doc.vendor, profile.wavelengths
                ));
            }
        }
        if let Some(formats) = &doc.formats {
            let given: BTreeSet<_> = formats.iter().copied().collect();
            if given != profile.formats {
                return invalid(format!(
                    "node {node}: vendor {:?} transponder supports {:?}, not {:?}",
                    doc.vendor, profile.formats, given
                ));
            }
        }
        Ok(TransponderType { openconfig_native: doc.openconfig_native.unwrap_or(profile.openconfig_native), ..profile })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub amp_variant: AmpVariant,
    pub has_blocker: bool,
    pub dc: Option<DataCenter>,
    pub transponders: Vec<TransponderType>,
}

impl Node {
    pub fn supports(&self, format: FormatName) -> bool {
        self.transponders.iter().any(|t| t.supports(format))
    }

    /// Total transponder slots on the node.
    pub fn slot_count(&self) -> usize {
        self.transponders.iter().map(|t| t.wavelengths as usize).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberSpan {
    pub id: String,
    pub a: NodeId,
    pub z: NodeId,
    pub length_km: f64,
    pub loss_coeff_db_per_km: f64,
    pub operational: bool,
}

impl FiberSpan {
    pub fn loss_db(&self) -> f64 {
        self.length_km * self.loss_coeff_db_per_km
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumGrid {
    pub channel_count: usize,
    pub channel_spacing_ghz: f64,
    pub base_frequency_thz: f64,
}

impl Default for SpectrumGrid {
    fn default() -> Self {
        SpectrumGrid { channel_count: 80, channel_spacing_ghz: 50.0, base_frequency_thz: 191.6 }
    }
}

impl SpectrumGrid {
    /// Centre frequency of a channel in THz.
    pub fn frequency_thz(&self, channel: usize) -> f64 {
        self.base_frequency_thz + self.channel_spacing_ghz * channel as f64 / 1000.0
    }
}

/// Maximal run of contiguous spans not separated by a blocker-equipped node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub index: usize,
    pub span_ids: Vec<String>,
}

/// Validated, immutable horseshoe topology.
#[derive(Debug, Clone)]
pub struct Topology {
    nodes: Vec<Node>,
    spans: Vec<FiberSpan>,
    grid: SpectrumGrid,
    warnings: Vec<String>,
    node_pos: HashMap<NodeId, usize>,
    span_pos: HashMap<String, usize>,
    segment_of_span: Vec<usize>,
    segment_count: usize,
    document: TopologyDocument,
}

impl PartialEq for Topology {
    fn eq(&self, other: &Self) -> bool {
        self.document == other.document
    }
}

/// Parses and validates a JSON topology document.
pub fn load_topology(json: &str) -> Result<Topology, TopologyError> {
    let doc: TopologyDocument = serde_json::from_str(json).map_err(|e| TopologyError::Parse(e.to_string()))?;
    Topology::from_document(doc)
}

/// Partition of the spans into filterless broadcast segments, in line order.
pub fn broadcast_segments(topo: &Topology) -> Vec<Segment> {
    let mut segments: Vec<Segment> = Vec::with_capacity(topo.segment_count);
    for (pos, span) in topo.spans.iter().enumerate() {
        let seg = topo.segment_of_span[pos];
        if seg == segments.len() {
            segments.push(Segment { index: seg, span_ids: Vec::new() });
        }
        segments[seg].span_ids.push(span.id.clone());
    }
    segments
}

impl Topology {
    pub fn from_document(doc: TopologyDocument) -> Result<Self, TopologyError> {
        if doc.nodes.is_empty() {
            return invalid("topology has no nodes");
        }
        if doc.grid.channel_count == 0 {
            return invalid("grid.channel_count must be at least 1");
        }
        if !(doc.grid.channel_spacing_ghz > 0.0 && doc.grid.channel_spacing_ghz.is_finite()) {
            return invalid("grid.channel_spacing_ghz must be positive");
        }
        if !(doc.grid.base_frequency_thz > 0.0 && doc.grid.base_frequency_thz.is_finite()) {
            return invalid("grid.base_frequency_thz must be positive");
        }

        let mut by_id: HashMap<&str, usize> = HashMap::new();
        let mut nodes = Vec::with_capacity(doc.nodes.len());
        for (i, n) in doc.nodes.iter().enumerate() {
            if n.id.is_empty() {
                return invalid("empty node id");
            }
            if by_id.insert(n.id.as_str(), i).is_some() {
                return invalid(format!("duplicate node id {}", n.id));
            }
            if let Some(dc) = &n.dc {
                let tier_ok = match dc.tier {
                    DcTier::Edc => n.kind == NodeKind::Amen,
                    DcTier::Rdc | DcTier::Cdc => n.kind == NodeKind::Mcen,
                };
                if !tier_ok {
                    return invalid(format!(
                        "node {}: {} cannot attach to {}",
                        n.id,
                        format!("{:?}", dc.tier).to_uppercase(),
                        format!("{:?}", n.kind).to_uppercase()
                    ));
                }
                if !(dc.storage_tb >= 0.0 && dc.storage_tb.is_finite()) {
                    return invalid(format!("node {}: negative storage capacity", n.id));
                }
                if n.transponders.is_empty() {
                    return invalid(format!("node {} hosts a data center but has no transponder", n.id));
                }
            }
            let transponders = n
                .transponders
                .iter()
                .map(|t| TransponderType::from_document(&n.id, t))
                .collect::<Result<Vec<_>, _>>()?;
            nodes.push(Node {
                id: NodeId::new(n.id.clone()),
                kind: n.kind,
                amp_variant: n.amp_variant,
                has_blocker: n.has_blocker.unwrap_or(true),
                dc: n.dc.clone(),
                transponders,
            });
        }

        let mcens: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i].kind == NodeKind::Mcen).collect();
        if mcens.len() != 2 {
            return invalid(format!("expected exactly 2 MCEN nodes, found {}", mcens.len()));
        }

        let mut warnings = Vec::new();
        let mut span_ids = BTreeSet::new();
        let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nodes.len()];
        let mut spans = Vec::with_capacity(doc.spans.len());
        for (k, s) in doc.spans.iter().enumerate() {
            if s.id.is_empty() {
                return invalid("empty span id");
            }
            if !span_ids.insert(s.id.as_str()) {
                return invalid(format!("duplicate span id {}", s.id));
            }
            let Some(&a) = by_id.get(s.a.as_str()) else {
                return invalid(format!("span {} references unknown node {}", s.id, s.a));
            };
            let Some(&z) = by_id.get(s.z.as_str()) else {
                return invalid(format!("span {} references unknown node {}", s.id, s.z));
            };
            if a == z {
                return invalid(format!("span {} is a self loop", s.id));
            }
            if !(s.length_km > 0.0 && s.length_km.is_finite()) {
                return invalid(format!("span {}: length_km must be positive", s.id));
            }
            let loss = s.loss_coeff_db_per_km.unwrap_or(DEFAULT_LOSS_COEFF_DB_PER_KM);
            if !(loss > 0.0 && loss.is_finite()) {
                return invalid(format!("span {}: loss_coeff_db_per_km must be positive", s.id));
            }
            if s.length_km < TYPICAL_SPAN_KM.0 || s.length_km > TYPICAL_SPAN_KM.1 {
                warnings.push(format!(
                    "span {} length {} km is outside the typical metro range {}-{} km",
                    s.id, s.length_km, TYPICAL_SPAN_KM.0, TYPICAL_SPAN_KM.1
                ));
            }
            adjacency[a].push((z, k));
            adjacency[z].push((a, k));
            spans.push(FiberSpan {
                id: s.id.clone(),
                a: nodes[a].id.clone(),
                z: nodes[z].id.clone(),
                length_km: s.length_km,
                loss_coeff_db_per_km: loss,
                operational: s.operational.unwrap_or(true),
            });
        }

        // Simple path between the two MCENs covering every node.
        if spans.len() + 1 != nodes.len() {
            return invalid(format!(
                "a horseshoe of {} nodes needs {} spans, found {}",
                nodes.len(),
                nodes.len() - 1,
                spans.len()
            ));
        }
        for (i, adj) in adjacency.iter().enumerate() {
            if adj.len() > 2 {
                return invalid(format!("node {} has degree {}; not a path", nodes[i].id, adj.len()));
            }
            if adj.len() < 2 && nodes[i].kind != NodeKind::Mcen {
                return invalid(format!("AMEN {} terminates the line; only MCENs may", nodes[i].id));
            }
            if adj.is_empty() {
                return invalid(format!("node {} is isolated", nodes[i].id));
            }
        }
        let start = mcens[0];
        let mut order = vec![start];
        let mut span_order = Vec::with_capacity(spans.len());
        let mut prev_span = usize::MAX;
        let mut cur = start;
        while let Some(&(next, k)) = adjacency[cur].iter().find(|(_, k)| *k != prev_span) {
            if order.contains(&next) {
                return invalid("span graph contains a cycle");
            }
            order.push(next);
            span_order.push(k);
            prev_span = k;
            cur = next;
        }
        if order.len() != nodes.len() {
            return invalid("span graph is not connected");
        }
        if cur != mcens[1] {
            return invalid("the line does not end at the second MCEN");
        }

        let mut slots: Vec<Option<Node>> = nodes.into_iter().map(Some).collect();
        let nodes: Vec<Node> = order.iter().map(|&i| slots[i].take().expect("visited once")).collect();
        let mut span_slots: Vec<Option<FiberSpan>> = spans.into_iter().map(Some).collect();
        let spans: Vec<FiberSpan> = span_order.iter().map(|&k| span_slots[k].take().expect("visited once")).collect();

        let mut segment_of_span = Vec::with_capacity(spans.len());
        let mut seg = 0;
        for (pos, node) in nodes.iter().enumerate().take(spans.len()) {
            if pos > 0 && node.has_blocker {
                seg += 1;
            }
            segment_of_span.push(seg);
        }
        let segment_count = if spans.is_empty() { 0 } else { seg + 1 };

        Ok(Topology {
            node_pos: nodes.iter().enumerate().map(|(i, n)| (n.id.clone(), i)).collect(),
            span_pos: spans.iter().enumerate().map(|(i, s)| (s.id.clone(), i)).collect(),
            nodes,
            spans,
            grid: doc.grid,
            warnings,
            segment_of_span,
            segment_count,
            document: doc,
        })
    }

    /// Nodes in line order, starting at the first MCEN of the document.
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Spans in line order.
    pub fn spans(&self) -> &[FiberSpan] {
        &self.spans
    }

    pub fn grid(&self) -> &SpectrumGrid {
        &self.grid
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn document(&self) -> &TopologyDocument {
        &self.document
    }

    pub fn node(&self, id: &NodeId) -> Option<&Node> {
        self.node_pos.get(id).map(|&i| &self.nodes[i])
    }

    pub fn position(&self, id: &NodeId) -> Option<usize> {
        self.node_pos.get(id).copied()
    }

    pub fn span(&self, id: &str) -> Option<&FiberSpan> {
        self.span_pos.get(id).map(|&i| &self.spans[i])
    }

    pub fn span_position(&self, id: &str) -> Option<usize> {
        self.span_pos.get(id).copied()
    }

    pub fn segment_count(&self) -> usize {
        self.segment_count
    }

    /// Segment index of the span at line position `pos`.
    pub fn segment_of(&self, pos: usize) -> usize {
        self.segment_of_span[pos]
    }

    /// Nodes hosting a data center, in id order.
    pub fn dc_nodes(&self) -> Vec<&Node> {
        let mut v: Vec<&Node> = self.nodes.iter().filter(|n| n.dc.is_some()).collect();
        v.sort_by(|a, b| a.id.cmp(&b.id));
        v
    }
}

impl Serialize for Topology {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.document.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Topology {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = TopologyDocument::deserialize(d)?;
        Topology::from_document(doc).map_err(serde::de::Error::custom)
    }
}
