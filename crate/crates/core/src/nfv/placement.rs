use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::descriptor::{LinkEnd, Nsd};
use super::vim::{Resources, VimState};
use super::NfvError;
use crate::topology::{DcTier, NodeId, Topology};
use crate::workload::{node_latency, LatencyParams};

/// Largest instance handed to the exact solver.
pub const EXACT_MAX_VNFS: usize = 8;
pub const EXACT_MAX_DCS: usize = 6;

/// Slack when comparing a partial cost against the incumbent.
const PRUNE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementMethod {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Solver {
    /// Exact within the size limits, greedy above.
    #[default]
    Auto,
    Exact,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementPlan {
    pub assignment: BTreeMap<String, NodeId>,
    #[serde(with = "crate::num::inf_as_str")]
    pub cost: f64,
    pub feasible: bool,
    pub method: PlacementMethod,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
enum End {
    Vnf(usize),
    Fixed(usize),
}

#[derive(Debug)]
struct Link {
    a: End,
    b: End,
    bandwidth: f64,
    max_latency: Option<f64>,
}

/// The NSD compiled against a topology and the VIMs' free capacity.
/// VNFs are indexed in name order, candidate DCs in node id order; latencies
/// are indexed by line position.
struct Problem {
    names: Vec<String>,
    demand: Vec<Resources>,
    /// Candidate DC indices per VNF.
    domain: Vec<Vec<usize>>,
    dc_nodes: Vec<NodeId>,
    dc_pos: Vec<usize>,
    dc_free: Vec<Resources>,
    links: Vec<Link>,
    /// links[k] completes once VNF closing_at[k] is placed.
    closing: Vec<Vec<usize>>,
    latency: Vec<Vec<Option<f64>>>,
}

impl Problem {
    fn build(nsd: &Nsd, topo: &Topology, vims: &[VimState], params: &LatencyParams<f64>) -> Result<Problem, NfvError> {
        nsd.validate_for(topo)?;
        params.validate().map_err(NfvError::InvalidNsd)?;

        let mut order: Vec<usize> = (0..nsd.vnfs.len()).collect();
        order.sort_by(|&a, &b| nsd.vnfs[a].name.cmp(&nsd.vnfs[b].name));
        let names: Vec<String> = order.iter().map(|&i| nsd.vnfs[i].name.clone()).collect();
        let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();

        let mut dcs: Vec<(&NodeId, DcTier, usize, Resources)> = Vec::new();
        for v in vims {
            let node =
                topo.node(v.node()).ok_or_else(|| NfvError::InvalidNsd(format!("VIM at unknown node {}", v.node())))?;
            let dc =
                node.dc.as_ref().ok_or_else(|| NfvError::InvalidNsd(format!("VIM at {} without a DC", v.node())))?;
            dcs.push((v.node(), dc.tier, topo.position(v.node()).expect("known node"), v.free()));
        }
        dcs.sort_by(|a, b| a.0.cmp(b.0));

        let mut demand = Vec::new();
        let mut domain = Vec::new();
        for &i in &order {
            let v = &nsd.vnfs[i];
            let need = Resources::new(v.cpu_cores, v.ram_gb, v.storage_tb);
            demand.push(need);
            domain.push(
                dcs.iter()
                    .enumerate()
                    .filter(|(_, (node, tier, _, free))| {
                        v.allowed_tiers.contains(tier)
                            && v.pin_node.as_ref().is_none_or(|p| p == *node)
                            && need.fits(*free)
                    })
                    .map(|(k, _)| k)
                    .collect(),
            );
        }

        let n = topo.nodes().len();
        let mut latency = vec![vec![None; n]; n];
        for (a, row) in latency.iter_mut().enumerate() {
            for (b, cell) in row.iter_mut().enumerate() {
                *cell = node_latency(topo, &topo.nodes()[a].id, &topo.nodes()[b].id, params).ok();
            }
        }

        let end = |e: &LinkEnd| match e {
            LinkEnd::Vnf(name) => End::Vnf(index[name.as_str()]),
            LinkEnd::Camera(node) => End::Fixed(topo.position(node).expect("validated")),
        };
        let mut links = Vec::new();
        let mut closing = vec![Vec::new(); names.len()];
        for (k, l) in nsd.links.iter().enumerate() {
            let (a, b) = (end(&l.from_vnf), end(&l.to_vnf));
            let last = [a, b]
                .iter()
                .filter_map(|e| match e {
                    End::Vnf(i) => Some(*i),
                    End::Fixed(_) => None,
                })
                .max()
                .expect("at least one VNF end");
            closing[last].push(k);
            links.push(Link { a, b, bandwidth: l.bandwidth_gbps, max_latency: l.max_latency_ms });
        }

        Ok(Problem {
            names,
            demand,
            domain,
            dc_nodes: dcs.iter().map(|d| d.0.clone()).collect(),
            dc_pos: dcs.iter().map(|d| d.2).collect(),
            dc_free: dcs.iter().map(|d| d.3).collect(),
            links,
            closing,
            latency,
        })
    }

    fn pos(&self, e: End, assign: &[usize]) -> usize {
        match e {
            End::Vnf(i) => self.dc_pos[assign[i]],
            End::Fixed(p) => p,
        }
    }

    /// Cost of one link, `None` when unreachable or over its bound.
    fn link_cost(&self, k: usize, assign: &[usize]) -> Option<f64> {
        let l = &self.links[k];
        let (pa, pb) = (self.pos(l.a, assign), self.pos(l.b, assign));
        if pa == pb {
            return Some(0.0);
        }
        let lat = self.latency[pa][pb]?;
        if l.max_latency.is_some_and(|m| lat > m) {
            return None;
        }
        Some(l.bandwidth * lat)
    }

    /// Objective summed in descriptor link order.
    fn canonical_cost(&self, assign: &[usize]) -> f64 {
        (0..self.links.len()).fold(0.0, |acc, k| acc + self.link_cost(k, assign).expect("feasible assignment"))
    }

    fn plan(&self, assign: &[usize], method: PlacementMethod) -> PlacementPlan {
        PlacementPlan {
            assignment: self.names.iter().zip(assign).map(|(n, &d)| (n.clone(), self.dc_nodes[d].clone())).collect(),
            cost: self.canonical_cost(assign),
            feasible: true,
            method,
            violations: Vec::new(),
        }
    }

    fn infeasible(&self, method: PlacementMethod, mut violations: Vec<String>) -> PlacementPlan {
        let total = self.demand.iter().fold(Resources::default(), |a, r| a.plus(*r));
        let free = self.dc_free.iter().fold(Resources::default(), |a, r| a.plus(*r));
        if total.cpu_cores > free.cpu_cores {
            violations.push(format!("total cpu demand {} exceeds free cpu {}", total.cpu_cores, free.cpu_cores));
        }
        if total.ram_gb > free.ram_gb {
            violations.push(format!("total ram demand {} exceeds free ram {}", total.ram_gb, free.ram_gb));
        }
        if total.storage_tb > free.storage_tb + super::vim::STORAGE_EPS {
            violations
                .push(format!("total storage demand {} exceeds free storage {}", total.storage_tb, free.storage_tb));
        }
        for (i, d) in self.domain.iter().enumerate() {
            if d.is_empty() {
                violations.push(format!("{}: no DC of an allowed tier has room", self.names[i]));
            }
        }
        if violations.is_empty() {
            violations.push("no assignment meets capacity and latency constraints together".into());
        }
        PlacementPlan { assignment: BTreeMap::new(), cost: f64::INFINITY, feasible: false, method, violations }
    }

    fn solve_exact(&self) -> PlacementPlan {
        let mut search = Search {
            p: self,
            assign: vec![0; self.names.len()],
            used: vec![Resources::default(); self.dc_nodes.len()],
            best: None,
        };
        search.descend(0, 0.0);
        match search.best {
            Some((_, assign)) => self.plan(&assign, PlacementMethod::Exact),
            None => self.infeasible(PlacementMethod::Exact, Vec::new()),
        }
    }

    fn solve_greedy(&self) -> PlacementPlan {
        let n = self.names.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            let (x, y) = (self.demand[a], self.demand[b]);
            y.cpu_cores
                .cmp(&x.cpu_cores)
                .then(y.ram_gb.cmp(&x.ram_gb))
                .then(y.storage_tb.total_cmp(&x.storage_tb))
                .then(a.cmp(&b))
        });
        let mut placed = vec![false; n];
        let mut assign = vec![0; n];
        let mut used = vec![Resources::default(); self.dc_nodes.len()];
        for &i in &order {
            placed[i] = true;
            let mut best: Option<(f64, usize)> = None;
            for &d in &self.domain[i] {
                if !used[d].plus(self.demand[i]).fits(self.dc_free[d]) {
                    continue;
                }
                assign[i] = d;
                let mut marginal = 0.0;
                let mut ok = true;
                for (k, l) in self.links.iter().enumerate() {
                    let touches = |e: End| matches!(e, End::Vnf(j) if j == i);
                    let ready = |e: End| match e {
                        End::Vnf(j) => placed[j],
                        End::Fixed(_) => true,
                    };
                    if (touches(l.a) || touches(l.b)) && ready(l.a) && ready(l.b) {
                        match self.link_cost(k, &assign) {
                            Some(c) => marginal += c,
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                }
                if ok && best.is_none_or(|(c, _)| marginal < c) {
                    best = Some((marginal, d));
                }
            }
            match best {
                Some((_, d)) => {
                    assign[i] = d;
                    used[d] = used[d].plus(self.demand[i]);
                }
                None => {
                    let msg = format!("{}: no feasible DC left for greedy placement", self.names[i]);
                    return self.infeasible(PlacementMethod::Greedy, vec![msg]);
                }
            }
        }
        self.plan(&assign, PlacementMethod::Greedy)
    }
}

struct Search<'a> {
    p: &'a Problem,
    assign: Vec<usize>,
    used: Vec<Resources>,
    best: Option<(f64, Vec<usize>)>,
}

impl Search<'_> {
    fn descend(&mut self, i: usize, partial: f64) {
        let p = self.p;
        if i == p.names.len() {
            let cost = p.canonical_cost(&self.assign);
            if self.best.as_ref().is_none_or(|(b, _)| cost < *b) {
                self.best = Some((cost, self.assign.clone()));
            }
            return;
        }
        for &d in &p.domain[i] {
            let after = self.used[d].plus(p.demand[i]);
            if !after.fits(p.dc_free[d]) {
                continue;
            }
            self.assign[i] = d;
            let mut cost = partial;
            let mut ok = true;
            for &k in &p.closing[i] {
                match p.link_cost(k, &self.assign) {
                    Some(c) => cost += c,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            if let Some((b, _)) = &self.best {
                if cost > b + PRUNE_EPS * b.max(1.0) {
                    continue;
                }
            }
            let saved = self.used[d];
            self.used[d] = after;
            self.descend(i + 1, cost);
            self.used[d] = saved;
        }
    }
}

/// Places every VNF of `nsd` on a DC, minimising the sum over links of
/// bandwidth times latency. Ties resolve to the lexicographically smallest
/// node ids, taken in VNF name order.
pub fn place_vnfs(
    nsd: &Nsd,
    topo: &Topology,
    vims: &[VimState],
    params: &LatencyParams<f64>,
) -> Result<PlacementPlan, NfvError> {
    place_vnfs_with(nsd, topo, vims, params, Solver::Auto)
}

pub fn place_vnfs_with(
    nsd: &Nsd,
    topo: &Topology,
    vims: &[VimState],
    params: &LatencyParams<f64>,
    solver: Solver,
) -> Result<PlacementPlan, NfvError> {
    let p = Problem::build(nsd, topo, vims, params)?;
    let exact = match solver {
        Solver::Exact => true,
        Solver::Greedy => false,
        Solver::Auto => p.names.len() <= EXACT_MAX_VNFS && p.dc_nodes.len() <= EXACT_MAX_DCS,
    };
    Ok(if exact { p.solve_exact() } else { p.solve_greedy() })
}
