use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::nfv::VnfKind;
use crate::num::Real;
use crate::optical::{route_path, OpticalError};
use crate::topology::{NodeId, Topology};

/// End-to-end latency model: propagation per km, a fixed switching delay at
/// every interior node and per-VNF processing time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatencyParams<R> {
    pub propagation_us_per_km: R,
    pub per_node_switching_us: R,
    pub vnf_processing_ms: BTreeMap<VnfKind, R>,
}

impl<R: Real> Default for LatencyParams<R> {
    fn default() -> Self {
        LatencyParams {
            propagation_us_per_km: R::lit(5.0),
            per_node_switching_us: R::lit(10.0),
            vnf_processing_ms: [(VnfKind::Analytics, R::lit(5.0))].into(),
        }
    }
}

impl<R: Real> LatencyParams<R> {
    pub fn validate(&self) -> Result<(), String> {
        let ok = |v: R| v >= R::zero() && v.is_finite();
        if !ok(self.propagation_us_per_km) || !ok(self.per_node_switching_us) {
            return Err("latency parameters must be non-negative".into());
        }
        if let Some((k, _)) = self.vnf_processing_ms.iter().find(|(_, v)| !ok(**v)) {
            return Err(format!("processing time for {k:?} must be non-negative"));
        }
        Ok(())
    }

    pub fn processing_ms(&self, kind: VnfKind) -> R {
        self.vnf_processing_ms.get(&kind).copied().unwrap_or_else(R::zero)
    }
}

/// Latency in ms along consecutive hops, plus processing at the listed VNFs.
///
/// A path of zero or one node has no propagation or switching component.
pub fn compute_latency<R: Real>(
    topo: &Topology,
    path_nodes: &[NodeId],
    params: &LatencyParams<R>,
    processing: &[VnfKind],
) -> Result<R, OpticalError> {
    let mut propagation = R::zero();
    for w in path_nodes.windows(2) {
        let a = topo.position(&w[0]).ok_or_else(|| OpticalError::UnknownNode(w[0].clone()))?;
        let b = topo.position(&w[1]).ok_or_else(|| OpticalError::UnknownNode(w[1].clone()))?;
        if a.abs_diff(b) != 1 {
            return Err(OpticalError::NoPath { src: w[0].clone(), dst: w[1].clone(), span: "<none>".into() });
        }
        let span = &topo.spans()[a.min(b)];
        if !span.operational {
            return Err(OpticalError::NoPath { src: w[0].clone(), dst: w[1].clone(), span: span.id.clone() });
        }
        propagation = propagation + R::lit(span.length_km) * params.propagation_us_per_km;
    }
    let interior = path_nodes.len().saturating_sub(2);
    let total_us = propagation + R::from_count(interior) * params.per_node_switching_us;
    let processing_ms = processing.iter().fold(R::zero(), |acc, &k| acc + params.processing_ms(k));
    Ok(total_us / R::lit(1000.0) + processing_ms)
}

/// Network latency in ms between two nodes along the horseshoe; zero when
/// they coincide.
pub fn node_latency<R: Real>(
    topo: &Topology,
    a: &NodeId,
    b: &NodeId,
    params: &LatencyParams<R>,
) -> Result<R, OpticalError> {
    if a == b {
        if topo.position(a).is_none() {
            return Err(OpticalError::UnknownNode(a.clone()));
        }
        return Ok(R::zero());
    }
    let path = route_path(topo, a, b)?;
    compute_latency(topo, &path.hops, params, &[])
}
