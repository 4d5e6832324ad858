use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::WorkloadError;
use crate::topology::{NodeId, NodeKind, Topology};

/// Camera count per server outside this range draws a warning.
pub const TYPICAL_CAMERAS_PER_AMEN: (i64, i64) = (100, 250);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CameraKind {
    Fix,
    Thermal,
    Ptz,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Camera {
    pub id: String,
    pub kind: CameraKind,
    pub attached_node: NodeId,
    pub stream_mbps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FlowKind {
    LiveVideo,
    Archive,
    PtzControl,
    AnalyticsFeed,
}

/// Flow endpoints are node ids or VNF names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flow {
    pub id: String,
    pub kind: FlowKind,
    pub src: String,
    pub dst: String,
    pub bandwidth_mbps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_latency_ms: Option<f64>,
}

/// Per-AMEN totals the service descriptor is sized from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmenLoad {
    pub node: NodeId,
    pub cameras: usize,
    pub ptz_cameras: usize,
    pub aggregate_mbps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioParams {
    pub cameras_per_amen: i64,
    pub ptz_fraction: f64,
    /// Share of the non-PTZ cameras that are thermal.
    pub thermal_fraction: f64,
    pub stream_mbps: f64,
    pub archive_streams_per_amen: i64,
    pub archive_mbps: f64,
    pub ptz_control_mbps: f64,
    pub ptz_max_latency_ms: f64,
    pub seed: u64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            cameras_per_amen: 150,
            ptz_fraction: 0.1,
            thermal_fraction: 0.2,
            stream_mbps: 4.0,
            archive_streams_per_amen: 10,
            archive_mbps: 8.0,
            ptz_control_mbps: 0.1,
            ptz_max_latency_ms: 20.0,
            seed: 1,
        }
    }
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<(), WorkloadError> {
        let bad = |m: &str| Err(WorkloadError::InvalidParams(m.to_string()));
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        let pos = |x: f64| x > 0.0 && x.is_finite();
        if self.cameras_per_amen < 0 || self.archive_streams_per_amen < 0 {
            return bad("counts must be non-negative");
        }
        if !unit(self.ptz_fraction) || !unit(self.thermal_fraction) {
            return bad("fractions must lie in [0, 1]");
        }
        if !pos(self.stream_mbps)
            || !pos(self.archive_mbps)
            || !pos(self.ptz_control_mbps)
            || !pos(self.ptz_max_latency_ms)
        {
            return bad("rates and latency bounds must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub seed: u64,
    pub params: ScenarioParams,
    pub cameras: Vec<Camera>,
    pub flows: Vec<Flow>,
    pub amens: Vec<AmenLoad>,
    pub warnings: Vec<String>,
}

impl Scenario {
    /// Sum of live streams from the cameras at `node`, in Mb/s.
    pub fn aggregate_mbps(&self, node: &NodeId) -> f64 {
        self.amens.iter().find(|a| &a.node == node).map_or(0.0, |a| a.aggregate_mbps)
    }
}

/// Recording server name serving the cameras of an AMEN.
pub fn css_name(node: &NodeId) -> String {
    format!("CSS-{node}")
}

/// Builds the camera fleet and its flows. Each AMEN gets the same number of
/// cameras; `round(ptz_fraction × n)` of them are PTZ, chosen at random, and
/// the rest are thermal with probability `thermal_fraction`.
pub fn generate_scenario(topo: &Topology, params: &ScenarioParams) -> Result<Scenario, WorkloadError> {
    params.validate()?;
    let (lo, hi) = TYPICAL_CAMERAS_PER_AMEN;
    let mut warnings = Vec::new();
    if !(lo..=hi).contains(&params.cameras_per_amen) {
        warnings.push(format!(
            "cameras_per_amen = {} is outside the typical {lo}..{hi} per server",
            params.cameras_per_amen
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.cameras_per_amen as usize;
    let ptz = (params.ptz_fraction * n as f64).round() as usize;
    let mut cameras = Vec::new();
    let mut flows = Vec::new();
    let mut amens = Vec::new();
    let mut flow_id = 0usize;
    let mut push = |flows: &mut Vec<Flow>, kind, src: String, dst: String, mbps, bound| {
        flow_id += 1;
        flows.push(Flow { id: format!("flow-{flow_id}"), kind, src, dst, bandwidth_mbps: mbps, max_latency_ms: bound });
    };

    for node in topo.nodes().iter().filter(|n| n.kind == NodeKind::Amen) {
        if n == 0 {
            continue;
        }
        let mut kinds = vec![false; n];
        kinds[..ptz].iter_mut().for_each(|k| *k = true);
        kinds.shuffle(&mut rng);
        let css = css_name(&node.id);
        for (i, is_ptz) in kinds.into_iter().enumerate() {
            let kind = if is_ptz {
                CameraKind::Ptz
            } else if rng.random_bool(params.thermal_fraction) {
                CameraKind::Thermal
            } else {
                CameraKind::Fix
            };
            let id = format!("{}-CAM{:03}", node.id, i + 1);
            push(&mut flows, FlowKind::LiveVideo, node.id.to_string(), css.clone(), params.stream_mbps, None);
            if is_ptz {
                let bound = Some(params.ptz_max_latency_ms);
                push(
                    &mut flows,
                    FlowKind::PtzControl,
                    "ANALYTICS".into(),
                    node.id.to_string(),
                    params.ptz_control_mbps,
                    bound,
                );
            }
            cameras.push(Camera { id, kind, attached_node: node.id.clone(), stream_mbps: params.stream_mbps });
        }
        let aggregate = n as f64 * params.stream_mbps;
        push(&mut flows, FlowKind::AnalyticsFeed, node.id.to_string(), "ANALYTICS".into(), aggregate, None);
        for _ in 0..params.archive_streams_per_amen {
            push(&mut flows, FlowKind::Archive, css.clone(), "FIREWALL".into(), params.archive_mbps, None);
        }
        amens.push(AmenLoad { node: node.id.clone(), cameras: n, ptz_cameras: ptz, aggregate_mbps: aggregate });
    }

    Ok(Scenario { seed: params.seed, params: params.clone(), cameras, flows, amens, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo::demo_topology;

    #[test]
    fn three_by_150() {
        let s = generate_scenario(&demo_topology(), &ScenarioParams::default()).unwrap();
        assert_eq!(s.cameras.len(), 450);
        assert!(s.warnings.is_empty());
        for a in &s.amens {
            assert_eq!(a.aggregate_mbps, 600.0);
            let live: f64 = s
                .flows
                .iter()
                .filter(|f| f.kind == FlowKind::LiveVideo && f.src == a.node.as_str())
                .map(|f| f.bandwidth_mbps)
                .sum();
            assert_eq!(live, 600.0);
            assert_eq!(a.ptz_cameras, 15);
        }
        assert!(s.flows.iter().filter(|f| f.kind == FlowKind::PtzControl).all(|f| f.max_latency_ms == Some(20.0)));
    }

    #[test]
    fn zero_cameras() {
        let p = ScenarioParams { cameras_per_amen: 0, ..Default::default() };
        let s = generate_scenario(&demo_topology(), &p).unwrap();
        assert!(s.cameras.is_empty() && s.flows.is_empty());
        assert_eq!(s.warnings.len(), 1);
    }

    #[test]
    fn deterministic() {
        let p = ScenarioParams { seed: 42, ..Default::default() };
        let a = serde_json::to_string(&generate_scenario(&demo_topology(), &p).unwrap()).unwrap();
        let b = serde_json::to_string(&generate_scenario(&demo_topology(), &p).unwrap()).unwrap();
        assert_eq!(a, b);
        let q = ScenarioParams { seed: 43, ..Default::default() };
        let c = serde_json::to_string(&generate_scenario(&demo_topology(), &q).unwrap()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_params() {
        let topo = demo_topology();
        for p in [
            ScenarioParams { cameras_per_amen: -1, ..Default::default() },
            ScenarioParams { ptz_fraction: 1.5, ..Default::default() },
            ScenarioParams { stream_mbps: 0.0, ..Default::default() },
        ] {
            assert_eq!(generate_scenario(&topo, &p).unwrap_err().code(), "INVALID_PARAMS");
        }
    }

    #[test]
    fn warns_outside_range() {
        let p = ScenarioParams { cameras_per_amen: 300, ..Default::default() };
        assert_eq!(generate_scenario(&demo_topology(), &p).unwrap().warnings.len(), 1);
    }
}
