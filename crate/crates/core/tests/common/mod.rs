//! Random instances and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use metrohaul::nfv::{LinkEnd, Nsd, PlacementPlan, VimState, VirtualLink, VnfDescriptor, VnfKind};
use metrohaul::topology::{load_topology, DcTier, NodeKind, Topology};
use metrohaul::LatencyParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub struct Instance {
    pub topo: Topology,
    pub vims: Vec<VimState>,
    pub nsd: Nsd,
}

/// Horseshoe with `nodes` nodes of which `dcs` (chosen at random) host a DC.
pub fn random_topology(rng: &mut ChaCha8Rng, nodes: usize, dcs: usize) -> Topology {
    let mut with_dc: Vec<bool> = (0..nodes).map(|i| i < dcs).collect();
    for i in (1..nodes).rev() {
        with_dc.swap(i, rng.random_range(0..=i));
    }
    let mut ns = Vec::new();
    for (i, &dc) in with_dc.iter().enumerate() {
        let mcen = i == 0 || i == nodes - 1;
        let id = if mcen { format!("M{i}") } else { format!("A{i}") };
        let mut n = json!({"id": id, "kind": if mcen { "MCEN" } else { "AMEN" }, "transponders": [{"vendor": "B"}]});
        if dc {
            let tier = if mcen {
                if rng.random_bool(0.5) {
                    "RDC"
                } else {
                    "CDC"
                }
            } else {
                "EDC"
            };
            n["dc"] = json!({
                "tier": tier,
                "cpu_cores": rng.random_range(8..=48),
                "ram_gb": rng.random_range(8..=96),
                "storage_tb": rng.random_range(8..=60) as f64 * 0.5,
            });
        }
        ns.push(n);
    }
    let spans: Vec<_> = (1..nodes)
        .map(|i| {
            json!({"id": format!("S{i}"), "a": ns[i - 1]["id"], "z": ns[i]["id"],
                   "length_km": rng.random_range(20..=200) as f64 + rng.random_range(0..10) as f64 * 0.1})
        })
        .collect();
    load_topology(&json!({"nodes": ns, "spans": spans}).to_string()).unwrap()
}

const KINDS: [VnfKind; 8] = [
    VnfKind::Csm,
    VnfKind::Css,
    VnfKind::Dm,
    VnfKind::Analytics,
    VnfKind::StorageDb,
    VnfKind::Nat,
    VnfKind::Firewall,
    VnfKind::Accounting,
];

pub fn random_nsd(rng: &mut ChaCha8Rng, topo: &Topology, vnfs: usize, links: usize) -> Nsd {
    let tiers = [DcTier::Edc, DcTier::Rdc, DcTier::Cdc];
    let mut out = Nsd::default();
    for i in 0..vnfs {
        let mut allowed: Vec<DcTier> = tiers.iter().copied().filter(|_| rng.random_bool(0.8)).collect();
        if allowed.is_empty() {
            allowed.push(tiers[rng.random_range(0..3)]);
        }
        let mut v = VnfDescriptor::new(
            &format!("V{}", (b'A' + i as u8) as char),
            KINDS[rng.random_range(0..KINDS.len())],
            rng.random_range(1..=12),
            rng.random_range(1..=24),
            rng.random_range(0..=10) as f64 * 0.5,
            &allowed,
        );
        if rng.random_bool(0.1) {
            let dcs = topo.dc_nodes();
            v.pin_node = Some(dcs[rng.random_range(0..dcs.len())].id.clone());
        }
        out.vnfs.push(v);
    }
    let amens: Vec<_> = topo.nodes().iter().filter(|n| n.kind == NodeKind::Amen).collect();
    for _ in 0..links {
        let a = rng.random_range(0..vnfs);
        let mut b = rng.random_range(0..vnfs);
        let cam = !amens.is_empty() && (vnfs == 1 || rng.random_bool(0.3));
        if !cam && b == a {
            b = (a + 1) % vnfs;
            if b == a {
                continue;
            }
        }
        let from = out.vnfs[a].name.clone();
        let to = if cam {
            format!("CAMERA_SOURCE@{}", amens[rng.random_range(0..amens.len())].id)
        } else {
            out.vnfs[b].name.clone()
        };
        let (from, to) = if rng.random_bool(0.5) { (from, to) } else { (to, from) };
        let mut l = VirtualLink::new(&from, &to, rng.random_range(1..=100) as f64 * 0.1);
        if rng.random_bool(0.25) {
            l.max_latency_ms = Some(rng.random_range(1..=20) as f64 * 0.1);
        }
        out.links.push(l);
    }
    out
}

/// Small instance: at most 6 DCs and 8 VNFs.
pub fn small_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = rng.random_range(3..=7);
    let dcs = rng.random_range(2..=nodes.min(6));
    let topo = random_topology(&mut rng, nodes, dcs);
    let vnfs = rng.random_range(1..=8);
    let links = rng.random_range(0..=10);
    let nsd = random_nsd(&mut rng, &topo, vnfs, links);
    let vims = VimState::from_topology(&topo);
    Instance { topo, vims, nsd }
}

/// Instance past the exact-solver limits.
pub fn large_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = rng.random_range(7..=14);
    let dcs = rng.random_range(7..=nodes);
    let mut topo = random_topology(&mut rng, nodes, dcs);
    let vnfs = rng.random_range(9..=16);
    let links = rng.random_range(5..=24);
    let mut nsd = random_nsd(&mut rng, &topo, vnfs, links);
    // roomier DCs so that a fair share of the instances is feasible
    let mut doc = topo.document().clone();
    for n in doc.nodes.iter_mut() {
        if let Some(dc) = n.dc.as_mut() {
            dc.cpu_cores *= 3;
            dc.ram_gb *= 3;
            dc.storage_tb *= 3.0;
        }
    }
    topo = metrohaul::topology::Topology::from_document(doc).unwrap();
    for v in nsd.vnfs.iter_mut() {
        v.pin_node = None;
    }
    let vims = VimState::from_topology(&topo);
    Instance { topo, vims, nsd }
}

/// Latency between line positions, written out from the model definition.
/// Spans are summed walking from `a` towards `b` so that the rounding matches
/// a path taken in that direction.
pub fn oracle_latency(topo: &Topology, a: usize, b: usize, p: &LatencyParams) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut prop = 0.0;
    if a < b {
        for s in &topo.spans()[a..b] {
            prop += s.length_km * p.propagation_us_per_km;
        }
    } else {
        for s in topo.spans()[b..a].iter().rev() {
            prop += s.length_km * p.propagation_us_per_km;
        }
    }
    let interior = (a.abs_diff(b) - 1) as f64;
    (prop + interior * p.per_node_switching_us) / 1000.0
}

fn end_pos(topo: &Topology, e: &LinkEnd, assign: &BTreeMap<String, usize>) -> usize {
    match e {
        LinkEnd::Vnf(n) => assign[n],
        LinkEnd::Camera(node) => topo.position(node).unwrap(),
    }
}

/// Re-evaluates every constraint of an assignment (VNF name → line
/// position). Returns the objective when all hold.
pub fn evaluate(inst: &Instance, assign: &BTreeMap<String, usize>, p: &LatencyParams) -> Result<f64, String> {
    let topo = &inst.topo;
    let mut used: BTreeMap<usize, (u32, u32, f64)> = BTreeMap::new();
    for v in &inst.nsd.vnfs {
        let pos = *assign.get(&v.name).ok_or(format!("{} unassigned", v.name))?;
        let node = &topo.nodes()[pos];
        let dc = node.dc.as_ref().ok_or(format!("{} on {} without DC", v.name, node.id))?;
        if !v.allowed_tiers.contains(&dc.tier) {
            return Err(format!("{} on disallowed tier", v.name));
        }
        if v.pin_node.as_ref().is_some_and(|p| p != &node.id) {
            return Err(format!("{} off its pin", v.name));
        }
        let u = used.entry(pos).or_default();
        u.0 += v.cpu_cores;
        u.1 += v.ram_gb;
        u.2 += v.storage_tb;
    }
    for (&pos, &(cpu, ram, st)) in &used {
        let vim = inst.vims.iter().find(|v| v.node() == &topo.nodes()[pos].id).ok_or("no VIM")?;
        let free = vim.free();
        if cpu > free.cpu_cores || ram > free.ram_gb || st > free.storage_tb + 1e-9 {
            return Err(format!("capacity exceeded at {}", vim.node()));
        }
    }
    let mut cost = 0.0;
    for l in &inst.nsd.links {
        let (a, b) = (end_pos(topo, &l.from_vnf, assign), end_pos(topo, &l.to_vnf, assign));
        let lat = oracle_latency(topo, a, b, p);
        if l.max_latency_ms.is_some_and(|m| lat > m) {
            return Err("latency bound violated".into());
        }
        cost += if a == b { 0.0 } else { l.bandwidth_gbps * lat };
    }
    Ok(cost)
}

/// Checks a plan returned by a solver; returns its recomputed objective.
pub fn check_plan(inst: &Instance, plan: &PlacementPlan, p: &LatencyParams) -> Result<f64, String> {
    if plan.assignment.len() != inst.nsd.vnfs.len() {
        return Err("assignment does not cover the descriptor".into());
    }
    let assign: BTreeMap<String, usize> =
        plan.assignment.iter().map(|(n, node)| (n.clone(), inst.topo.position(node).expect("known node"))).collect();
    evaluate(inst, &assign, p)
}

/// Minimum objective over every assignment of VNFs to DC nodes.
pub fn exhaustive_min(inst: &Instance, p: &LatencyParams) -> Option<f64> {
    let dcs: Vec<usize> = (0..inst.topo.nodes().len()).filter(|&i| inst.topo.nodes()[i].dc.is_some()).collect();
    let names: Vec<String> = inst.nsd.vnfs.iter().map(|v| v.name.clone()).collect();
    let n = names.len();
    let mut idx = vec![0usize; n];
    let mut best: Option<f64> = None;
    loop {
        let assign: BTreeMap<String, usize> = names.iter().zip(&idx).map(|(nm, &k)| (nm.clone(), dcs[k])).collect();
        if let Ok(c) = evaluate(inst, &assign, p) {
            if best.is_none_or(|b| c < b) {
                best = Some(c);
            }
        }
        let mut k = 0;
        loop {
            if k == n {
                return best;
            }
            idx[k] += 1;
            if idx[k] < dcs.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}
