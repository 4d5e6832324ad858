use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::OpticalError;
use crate::topology::{NodeId, Topology};

/// Transparent optical tunnel route: hops in traversal order and the spans
/// joining them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpticalPath {
    pub hops: Vec<NodeId>,
    pub spans: Vec<String>,
    pub total_length_km: f64,
}

impl OpticalPath {
    /// Add and drop at the same node; no span is traversed.
    pub fn local(node: NodeId) -> Self {
        OpticalPath { hops: vec![node], spans: Vec::new(), total_length_km: 0.0 }
    }

    pub fn src(&self) -> &NodeId {
        &self.hops[0]
    }

    pub fn dst(&self) -> &NodeId {
        self.hops.last().expect("a path has at least one hop")
    }

    /// Line positions of the spans, in traversal order.
    pub(crate) fn span_positions(&self, topo: &Topology) -> Vec<usize> {
        self.spans.iter().map(|id| topo.span_position(id).expect("path spans belong to the topology")).collect()
    }

    /// Broadcast segments the path touches.
    pub fn segments(&self, topo: &Topology) -> BTreeSet<usize> {
        self.span_positions(topo).into_iter().map(|p| topo.segment_of(p)).collect()
    }

    /// Appends the next span along the line in the current direction, if any.
    pub fn extended(&self, topo: &Topology) -> Option<OpticalPath> {
        let last = topo.position(self.dst())?;
        let next = if self.hops.len() >= 2 {
            let prev = topo.position(&self.hops[self.hops.len() - 2])?;
            if last > prev {
                last.checked_add(1)
            } else {
                last.checked_sub(1)
            }
        } else {
            last.checked_add(1)
        }?;
        let node = topo.nodes().get(next)?;
        let span = &topo.spans()[last.min(next)];
        let mut p = self.clone();
        p.hops.push(node.id.clone());
        p.spans.push(span.id.clone());
        p.total_length_km += span.length_km;
        Some(p)
    }
}

/// The unique simple path between two nodes of the horseshoe.
pub fn route_path(topo: &Topology, src: &NodeId, dst: &NodeId) -> Result<OpticalPath, OpticalError> {
    let a = topo.position(src).ok_or_else(|| OpticalError::UnknownNode(src.clone()))?;
    let b = topo.position(dst).ok_or_else(|| OpticalError::UnknownNode(dst.clone()))?;
    if a == b {
        return Err(OpticalError::SameEndpoint(src.clone()));
    }
    let positions: Vec<usize> = if a < b { (a..=b).collect() } else { (b..=a).rev().collect() };
    let mut path = OpticalPath { hops: Vec::with_capacity(positions.len()), spans: Vec::new(), total_length_km: 0.0 };
    for (i, &p) in positions.iter().enumerate() {
        path.hops.push(topo.nodes()[p].id.clone());
        if i > 0 {
            let span = &topo.spans()[p.min(positions[i - 1])];
            if !span.operational {
                return Err(OpticalError::NoPath { src: src.clone(), dst: dst.clone(), span: span.id.clone() });
            }
            path.spans.push(span.id.clone());
            path.total_length_km += span.length_km;
        }
    }
    Ok(path)
}
