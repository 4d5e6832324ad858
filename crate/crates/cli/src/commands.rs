use std::fs;
use std::path::Path;

use metrohaul::control::{abstract_domain, ControlConfig, Controller, CreateServiceRequest, Layer};
use metrohaul::demo::{demo_topology, DEMO_TOPOLOGY_JSON};
use metrohaul::nfv::{default_surveillance_nsd, surveillance_nsd, Nsd, Orchestrator};
use metrohaul::optical::{FormatName, OpticalConfig, OpticalNetwork};
use metrohaul::topology::{broadcast_segments, load_topology, Topology};
use metrohaul::workload::{
    generate_scenario, run_experiment, DemandClass, EndpointModel, ExperimentParams, Scenario, ScenarioParams,
};
use metrohaul::LatencyParams;
use serde_json::{json, Value};

use crate::args::{
    Cli, Command, EndpointArg, ExperimentArgs, LayerArg, ProvisionArgs, ReportArgs, ScenarioArgs, SliceCommand,
    StateArgs,
};
use crate::Outcome;

/// A failed command: stable code plus a human-readable message.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: String,
    pub message: String,
}

impl CliError {
    fn new(code: &str, message: impl Into<String>) -> Self {
        CliError { code: code.to_string(), message: message.into() }
    }
}

macro_rules! from_domain {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::new(e.code(), e.to_string())
            }
        }
    )*};
}

from_domain!(
    metrohaul::topology::TopologyError,
    metrohaul::optical::OpticalError,
    metrohaul::control::ControlError,
    metrohaul::control::CreateFailure,
    metrohaul::nfv::NfvError,
    metrohaul::nfv::SliceFailure,
    metrohaul::workload::WorkloadError
);

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::new("IO_ERROR", format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)
        .and_then(|_| fs::rename(&tmp, path))
        .map_err(|e| CliError::new("IO_ERROR", format!("{}: {e}", path.display())))
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn topology(path: Option<&Path>) -> Result<Topology, CliError> {
    match path {
        Some(p) => Ok(load_topology(&read(p)?)?),
        None => Ok(load_topology(DEMO_TOPOLOGY_JSON)?),
    }
}

fn fresh_controller(topo: Topology) -> Result<Controller, CliError> {
    Ok(Controller::new(OpticalNetwork::new(topo, OpticalConfig::default())?, ControlConfig::default()))
}

fn load_state(args: &StateArgs) -> Result<Orchestrator, CliError> {
    if args.state.exists() {
        let text = read(&args.state)?;
        return serde_json::from_str(&text)
            .map_err(|e| CliError::new("STATE_ERROR", format!("{}: {e}", args.state.display())));
    }
    let topo = topology(args.topology.as_deref())?;
    Ok(Orchestrator::new(fresh_controller(topo)?, LatencyParams::default()))
}

fn save_state(args: &StateArgs, o: &Orchestrator) -> Result<(), CliError> {
    write(&args.state, &pretty(o))
}

pub(crate) fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Validate { topology: path } => validate(path),
        Command::Provision(a) => provision(a),
        Command::Delete { state, service } => {
            let mut o = load_state(state)?;
            let s = o.delete_service(service)?;
            save_state(state, &o)?;
            Ok(Outcome { result: json!({ "service": s }), warnings: Vec::new() })
        }
        Command::Slice(s) => slice(s),
        Command::Scenario(a) => scenario(a),
        Command::Experiment(a) => experiment(a),
        Command::Report(a) => report(a),
    }
}

fn summary(topo: &Topology) -> Value {
    json!({
        "nodes": topo.nodes().iter().map(|n| n.id.as_str()).collect::<Vec<_>>(),
        "spans": topo.spans().len(),
        "total_length_km": topo.spans().iter().map(|s| s.length_km).sum::<f64>(),
        "segments": broadcast_segments(topo),
        "data_centers": topo.dc_nodes().iter().map(|n| json!({"node": n.id, "dc": n.dc})).collect::<Vec<_>>(),
        "sips": abstract_domain(topo).sips().iter().map(|s| s.id.as_str()).collect::<Vec<_>>(),
        "channel_count": topo.grid().channel_count,
    })
}

fn validate(path: &Path) -> Result<Outcome, CliError> {
    let topo = load_topology(&read(path)?)?;
    Ok(Outcome { result: summary(&topo), warnings: topo.warnings().to_vec() })
}

fn provision(a: &ProvisionArgs) -> Result<Outcome, CliError> {
    let mut o = load_state(&a.state)?;
    let layer = match a.layer {
        LayerArg::Optical => Layer::Optical,
        LayerArg::L2 => Layer::L2,
        LayerArg::L3 => Layer::L3,
    };
    let mut req = CreateServiceRequest::new(&a.a, &a.z, layer, a.bandwidth);
    if let Some(f) = &a.format {
        let f: FormatName = f.parse().map_err(|e: String| CliError::new("INVALID_REQUEST", e))?;
        req = req.with_format(f);
    }
    let service = o.wim_mut().create_connectivity_service(&req)?;
    let configs = o.wim().render_device_configs(&service.id)?;
    save_state(&a.state, &o)?;
    Ok(Outcome { result: json!({ "service": service, "device_configs": configs }), warnings: Vec::new() })
}

fn slice(cmd: &SliceCommand) -> Result<Outcome, CliError> {
    match cmd {
        SliceCommand::Create { state, id, nsd } => {
            let mut o = load_state(state)?;
            let nsd = match nsd {
                Some(p) => Nsd::from_json(&read(p)?)?,
                None => default_surveillance_nsd(),
            };
            let slice = o.instantiate_slice(id, &nsd)?;
            save_state(state, &o)?;
            Ok(Outcome { result: json!({ "slice": slice }), warnings: Vec::new() })
        }
        SliceCommand::Delete { state, id } => {
            let mut o = load_state(state)?;
            let slice = o.teardown_slice(id)?;
            save_state(state, &o)?;
            Ok(Outcome { result: json!({ "slice": slice }), warnings: Vec::new() })
        }
        SliceCommand::Show { state, id } => {
            let o = load_state(state)?;
            let result = match id {
                Some(id) => json!({ "slice": o.slice(id)? }),
                None => json!({ "slices": o.slices(), "vims": o.vims().values().collect::<Vec<_>>() }),
            };
            Ok(Outcome { result, warnings: Vec::new() })
        }
    }
}

fn scenario_params(seed: u64, cameras_per_amen: i64, ptz_fraction: f64) -> ScenarioParams {
    ScenarioParams { cameras_per_amen, ptz_fraction, seed, ..Default::default() }
}

fn scenario(a: &ScenarioArgs) -> Result<Outcome, CliError> {
    let topo = topology(a.topology.as_deref())?;
    let params =
        ScenarioParams { stream_mbps: a.stream_mbps, ..scenario_params(a.seed, a.cameras_per_amen, a.ptz_fraction) };
    let s = generate_scenario(&topo, &params)?;
    if let Some(p) = &a.out {
        write(p, &pretty(&s))?;
    }
    Ok(Outcome { warnings: s.warnings.clone(), result: to_value(&s) })
}

fn parse_demand(spec: &str) -> Result<Vec<DemandClass>, CliError> {
    spec.split(',')
        .map(|part| {
            let (bw, w) = part.split_once(':').unwrap_or((part, "1"));
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::new("INVALID_PARAMS", format!("bad demand class '{part}'")))
            };
            Ok(DemandClass { bandwidth_gbps: num(bw)?, weight: num(w)? })
        })
        .collect()
}

fn experiment(a: &ExperimentArgs) -> Result<Outcome, CliError> {
    let topo = topology(a.topology.as_deref())?;
    let params = ExperimentParams {
        arrival_rate_per_s: a.arrival_rate,
        mean_hold_s: a.mean_hold,
        requests: if a.duration.is_some() { None } else { Some(a.requests.unwrap_or(10_000)) },
        duration_s: a.duration,
        demand: parse_demand(&a.demand)?,
        endpoints: match a.endpoints {
            EndpointArg::AmenTrunks => EndpointModel::AmenTrunks,
            EndpointArg::RandomSipPairs => EndpointModel::RandomSipPairs,
        },
        seed: a.seed,
        ..Default::default()
    };
    let m = run_experiment(fresh_controller(topo)?, &params)?;
    if let Some(p) = &a.out {
        write(p, &pretty(&m))?;
    }
    if let Some(p) = &a.csv_out {
        write(p, &m.histogram_csv())?;
    }
    Ok(Outcome { result: to_value(&m), warnings: Vec::new() })
}

fn scenario_summary(s: &Scenario) -> Value {
    json!({
        "seed": s.seed,
        "cameras": s.cameras.len(),
        "flows": s.flows.len(),
        "amens": s.amens,
    })
}

/// The end-to-end demo: scenario, surveillance slice, device configs and a
/// blocking experiment on a fresh copy of the network. Returns the report
/// payload (no timestamp), its warnings and the latency histogram CSV.
pub fn demo_report(
    topo: &Topology,
    seed: u64,
    scenario: &ScenarioParams,
    experiment: &ExperimentParams,
) -> Result<(Value, Vec<String>, String), CliError> {
    let s = generate_scenario(topo, &ScenarioParams { seed, ..scenario.clone() })?;
    let mut warnings = topo.warnings().to_vec();
    warnings.extend(s.warnings.iter().cloned());

    let mut o = Orchestrator::new(fresh_controller(topo.clone())?, LatencyParams::default());
    let nsd = surveillance_nsd(&s);
    let slice = o.instantiate_slice("surveillance", &nsd)?;
    let mut services = Vec::new();
    let mut configs = serde_json::Map::new();
    for id in &slice.services {
        services.push(o.wim().get_service(id)?);
        configs.insert(id.clone(), to_value(&o.wim().render_device_configs(id)?));
    }

    let metrics = run_experiment(fresh_controller(topo.clone())?, &ExperimentParams { seed, ..experiment.clone() })?;
    let csv = metrics.histogram_csv();
    let payload = json!({
        "topology": summary(topo),
        "scenario": scenario_summary(&s),
        "nsd": nsd,
        "slice": slice,
        "services": services,
        "device_configs": configs,
        "vims": o.vims().values().collect::<Vec<_>>(),
        "metrics": metrics,
    });
    Ok((payload, warnings, csv))
}

fn report(a: &ReportArgs) -> Result<Outcome, CliError> {
    let topo = match &a.topology {
        Some(p) => load_topology(&read(p)?)?,
        None => demo_topology(),
    };
    let scenario = scenario_params(a.seed, a.cameras_per_amen, a.ptz_fraction);
    let experiment = ExperimentParams {
        arrival_rate_per_s: a.arrival_rate,
        mean_hold_s: a.mean_hold,
        requests: Some(a.requests),
        ..Default::default()
    };
    let (payload, warnings, csv) = demo_report(&topo, a.seed, &scenario, &experiment)?;
    if let Some(p) = &a.out {
        write(p, &pretty(&payload))?;
    }
    if let Some(p) = &a.csv_out {
        write(p, &csv)?;
    }
    Ok(Outcome { result: payload, warnings })
}
