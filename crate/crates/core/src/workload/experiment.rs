use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::latency::{compute_latency, LatencyParams};
use super::WorkloadError;
use crate::control::{Controller, CreateServiceRequest, Layer};
use crate::topology::NodeKind;

/// How request endpoints are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointModel {
    /// A random AMEN towards a random MCEN, attached at each node's
    /// preferred SIP.
    #[default]
    AmenTrunks,
    /// Two random SIPs on different nodes.
    RandomSipPairs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandClass {
    pub bandwidth_gbps: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentParams {
    pub arrival_rate_per_s: f64,
    pub mean_hold_s: f64,
    /// Stop after this many arrivals...
    pub requests: Option<u64>,
    /// ...or at this simulated time.
    pub duration_s: Option<f64>,
    pub demand: Vec<DemandClass>,
    pub endpoints: EndpointModel,
    pub seed: u64,
    pub buckets_per_ms: u32,
    pub latency: LatencyParams<f64>,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        ExperimentParams {
            arrival_rate_per_s: 1.0,
            mean_hold_s: 5.0,
            requests: Some(10_000),
            duration_s: None,
            demand: vec![DemandClass { bandwidth_gbps: 100.0, weight: 1.0 }],
            endpoints: EndpointModel::AmenTrunks,
            seed: 1,
            buckets_per_ms: 10,
            latency: LatencyParams::default(),
        }
    }
}

impl ExperimentParams {
    pub fn offered_load_erlang(&self) -> f64 {
        self.arrival_rate_per_s * self.mean_hold_s
    }

    pub fn validate(&self) -> Result<(), WorkloadError> {
        let bad = |m: &str| Err(WorkloadError::InvalidParams(m.to_string()));
        let pos = |x: f64| x > 0.0 && x.is_finite();
        if !pos(self.arrival_rate_per_s) || !pos(self.mean_hold_s) {
            return bad("arrival rate and mean holding time must be positive");
        }
        match (self.requests, self.duration_s) {
            (Some(_), None) => {}
            (None, Some(d)) if pos(d) => {}
            (None, Some(_)) => return bad("duration_s must be positive"),
            _ => return bad("give exactly one of requests and duration_s"),
        }
        if self.demand.is_empty()
            || self.demand.iter().any(|d| {
                !(d.bandwidth_gbps >= 0.0 && d.bandwidth_gbps.is_finite()) || !(d.weight > 0.0 && d.weight.is_finite())
            })
        {
            return bad("demand needs at least one class with non-negative bandwidth and positive weight");
        }
        if self.buckets_per_ms == 0 {
            return bad("buckets_per_ms must be positive");
        }
        self.latency.validate().map_err(WorkloadError::InvalidParams)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBucket {
    pub bucket_ms_low: f64,
    pub bucket_ms_high: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub seed: u64,
    pub requests: u64,
    pub accepted: u64,
    pub blocked: u64,
    pub blocked_by_code: BTreeMap<String, u64>,
    pub blocking_probability: f64,
    pub offered_load_erlang: f64,
    pub mean_latency_ms: f64,
    pub p50_latency_ms: f64,
    pub p95_latency_ms: f64,
    pub p99_latency_ms: f64,
    pub latency_histogram: Vec<HistogramBucket>,
    pub spectrum_utilization: f64,
    pub simulated_time_s: f64,
}

impl Metrics {
    /// The latency histogram as CSV.
    pub fn histogram_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for b in &self.latency_histogram {
            w.serialize(b).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8 csv")
    }
}

struct Departure {
    at: f64,
    seq: u64,
    service: String,
}

impl PartialEq for Departure {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Departure {}
impl PartialOrd for Departure {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Departure {
    fn cmp(&self, o: &Self) -> Ordering {
        self.at.total_cmp(&o.at).then(self.seq.cmp(&o.seq))
    }
}

/// Random streams, one per purpose, so that adding draws to one does not
/// shift the others.
struct Streams {
    arrivals: ChaCha8Rng,
    holds: ChaCha8Rng,
    endpoints: ChaCha8Rng,
    demand: ChaCha8Rng,
}

impl Streams {
    fn new(seed: u64) -> Self {
        let stream = |k| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            r.set_stream(k);
            r
        };
        Streams { arrivals: stream(0), holds: stream(1), endpoints: stream(2), demand: stream(3) }
    }
}

/// Drives OPTICAL connectivity requests through `controller` with Poisson
/// arrivals and exponential holding times. Blocked requests are counted by
/// error code and never retried. The controller is consumed; departures are
/// deleted and forgotten so its state stays bounded.
pub fn run_experiment(mut controller: Controller, params: &ExperimentParams) -> Result<Metrics, WorkloadError> {
    params.validate()?;
    let topo = controller.optical().topology().clone();
    let sips: Vec<(String, usize)> = controller
        .domain()
        .sips()
        .iter()
        .map(|s| (s.id.clone(), topo.position(&s.node).expect("sip on a node")))
        .collect();
    let attach = |kind: NodeKind| -> Vec<String> {
        topo.nodes()
            .iter()
            .filter(|n| n.kind == kind)
            .filter_map(|n| controller.domain().attachment(&n.id).map(|s| s.id.clone()))
            .collect()
    };
    let (amens, mcens) = (attach(NodeKind::Amen), attach(NodeKind::Mcen));
    let usable = match params.endpoints {
        EndpointModel::AmenTrunks => !amens.is_empty() && !mcens.is_empty(),
        EndpointModel::RandomSipPairs => sips.iter().any(|s| s.1 != sips[0].1),
    };
    if !usable {
        return Err(WorkloadError::InvalidParams("topology offers no endpoint pair for this model".into()));
    }

    let mut rng = Streams::new(params.seed);
    let inter = Exp::new(params.arrival_rate_per_s).map_err(|e| WorkloadError::InvalidParams(e.to_string()))?;
    let hold = Exp::new(1.0 / params.mean_hold_s).map_err(|e| WorkloadError::InvalidParams(e.to_string()))?;
    let classes = WeightedIndex::new(params.demand.iter().map(|d| d.weight))
        .map_err(|e| WorkloadError::InvalidParams(e.to_string()))?;

    let capacity =
        (controller.optical().spectrum().segment_count() * controller.optical().spectrum().channel_count()) as f64;
    let mut departures: BinaryHeap<Reverse<Departure>> = BinaryHeap::new();
    let mut now = 0.0f64;
    let mut slot_seconds = 0.0f64;
    let mut requests = 0u64;
    let mut blocked_by_code: BTreeMap<String, u64> = BTreeMap::new();
    let mut latencies: Vec<f64> = Vec::new();

    let advance = |to: f64, now: &mut f64, slot_seconds: &mut f64, c: &Controller| {
        *slot_seconds += c.optical().spectrum().occupied_slots() as f64 * (to - *now);
        *now = to;
    };

    loop {
        let next = now + inter.sample(&mut rng.arrivals);
        let done = match (params.requests, params.duration_s) {
            (Some(n), _) => requests >= n,
            (None, Some(d)) => next > d,
            _ => unreachable!("validated"),
        };
        if done {
            break;
        }
        while departures.peek().is_some_and(|Reverse(d)| d.at <= next) {
            let Reverse(d) = departures.pop().expect("peeked");
            advance(d.at, &mut now, &mut slot_seconds, &controller);
            controller.delete_connectivity_service(&d.service).map_err(WorkloadError::Control)?;
            controller.forget_service(&d.service);
        }
        advance(next, &mut now, &mut slot_seconds, &controller);
        requests += 1;

        let (a, z) = match params.endpoints {
            EndpointModel::AmenTrunks => {
                let a = &amens[rng.endpoints.random_range(0..amens.len())];
                let z = &mcens[rng.endpoints.random_range(0..mcens.len())];
                (a.clone(), z.clone())
            }
            EndpointModel::RandomSipPairs => loop {
                let a = &sips[rng.endpoints.random_range(0..sips.len())];
                let z = &sips[rng.endpoints.random_range(0..sips.len())];
                if a.1 != z.1 {
                    break (a.0.clone(), z.0.clone());
                }
            },
        };
        let bandwidth = params.demand[classes.sample(&mut rng.demand)].bandwidth_gbps;
        let holding = hold.sample(&mut rng.holds);

        match controller.create_connectivity_service(&CreateServiceRequest::new(&a, &z, Layer::Optical, bandwidth)) {
            Ok(service) => {
                let channel = service.underlying.as_deref().expect("active service rides a channel");
                let hops = &controller.optical().channel(channel).expect("channel exists").path.hops;
                let ms = compute_latency(&topo, hops, &params.latency, &[]).map_err(WorkloadError::Optical)?;
                latencies.push(ms);
                departures.push(Reverse(Departure { at: now + holding, seq: requests, service: service.id }));
            }
            Err(f) => *blocked_by_code.entry(f.code().to_string()).or_default() += 1,
        }
    }

    let blocked: u64 = blocked_by_code.values().sum();
    let accepted = latencies.len() as u64;
    let horizon = now;
    Ok(Metrics {
        seed: params.seed,
        requests,
        accepted,
        blocked,
        blocked_by_code,
        blocking_probability: if requests == 0 { 0.0 } else { blocked as f64 / requests as f64 },
        offered_load_erlang: params.offered_load_erlang(),
        mean_latency_ms: if latencies.is_empty() {
            0.0
        } else {
            latencies.iter().sum::<f64>() / latencies.len() as f64
        },
        p50_latency_ms: percentile(&latencies, 0.50),
        p95_latency_ms: percentile(&latencies, 0.95),
        p99_latency_ms: percentile(&latencies, 0.99),
        latency_histogram: histogram(&latencies, params.buckets_per_ms),
        spectrum_utilization: if horizon > 0.0 && capacity > 0.0 {
            (slot_seconds / (horizon * capacity)).clamp(0.0, 1.0)
        } else {
            0.0
        },
        simulated_time_s: horizon,
    })
}

/// Nearest-rank percentile; 0 for an empty sample.
fn percentile(sample: &[f64], p: f64) -> f64 {
    if sample.is_empty() {
        return 0.0;
    }
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = ((p * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[rank - 1]
}

/// Contiguous buckets from 0 up to the largest sample.
fn histogram(sample: &[f64], per_ms: u32) -> Vec<HistogramBucket> {
    let per = per_ms as f64;
    let mut counts: Vec<u64> = Vec::new();
    for &x in sample {
        let i = (x * per).floor().max(0.0) as usize;
        if counts.len() <= i {
            counts.resize(i + 1, 0);
        }
        counts[i] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBucket {
            bucket_ms_low: i as f64 / per,
            bucket_ms_high: (i + 1) as f64 / per,
            count,
        })
        .collect()
}
