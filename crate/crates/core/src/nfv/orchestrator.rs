use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::descriptor::{LinkEnd, Nsd};
use super::placement::{place_vnfs, PlacementPlan};
use super::vim::{Resources, VimState};
use super::NfvError;
use crate::control::{ConnectivityService, ControlError, Controller, CreateServiceRequest, Layer, ServiceState};
use crate::topology::NodeId;
use crate::workload::LatencyParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SliceState {
    Active,
    Failed,
    TornDown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceInstance {
    pub id: String,
    pub plan: PlacementPlan,
    pub services: Vec<String>,
    pub state: SliceState,
}

/// An instantiation that did not complete. The orchestrator state is
/// unchanged; `slice` holds the FAILED record when placement was reached.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{error}")]
pub struct SliceFailure {
    pub slice: Option<Box<SliceInstance>>,
    #[source]
    pub error: NfvError,
}

impl SliceFailure {
    pub fn code(&self) -> &'static str {
        self.error.code()
    }
}

impl From<SliceFailure> for NfvError {
    fn from(f: SliceFailure) -> Self {
        f.error
    }
}

/// NFV orchestrator: per-DC VIMs for compute, the parent controller as WIM
/// for connectivity, and the slices built from both.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Orchestrator {
    wim: Controller,
    vims: BTreeMap<NodeId, VimState>,
    latency: LatencyParams<f64>,
    slices: BTreeMap<String, SliceInstance>,
    #[serde(skip)]
    fault: Option<usize>,
}

/// Counts internal steps of an instantiation and trips at the armed one.
struct Steps {
    next: usize,
    fault: Option<usize>,
}

impl Steps {
    fn check(&mut self) -> Result<(), NfvError> {
        let step = self.next;
        self.next += 1;
        if self.fault == Some(step) {
            return Err(NfvError::InjectedFault(step));
        }
        Ok(())
    }
}

impl Orchestrator {
    pub fn new(wim: Controller, latency: LatencyParams<f64>) -> Self {
        let vims =
            VimState::from_topology(wim.optical().topology()).into_iter().map(|v| (v.node().clone(), v)).collect();
        Orchestrator { wim, vims, latency, slices: BTreeMap::new(), fault: None }
    }

    pub fn wim(&self) -> &Controller {
        &self.wim
    }

    /// Direct access to the WIM for services outside any slice.
    pub fn wim_mut(&mut self) -> &mut Controller {
        &mut self.wim
    }

    pub fn vims(&self) -> &BTreeMap<NodeId, VimState> {
        &self.vims
    }

    pub fn latency(&self) -> &LatencyParams<f64> {
        &self.latency
    }

    pub fn slices(&self) -> &BTreeMap<String, SliceInstance> {
        &self.slices
    }

    pub fn slice(&self, id: &str) -> Result<&SliceInstance, NfvError> {
        self.slices.get(id).ok_or_else(|| NfvError::UnknownSlice(id.to_string()))
    }

    /// Arms a failure at the given internal step of the next instantiations
    /// (steps count from 0). `None` disarms.
    pub fn set_fault(&mut self, step: Option<usize>) {
        self.fault = step;
    }

    /// Number of internal steps a successful instantiation of `nsd` would
    /// pass through, measured on a scratch copy.
    pub fn injection_points(&self, id: &str, nsd: &Nsd) -> Result<usize, SliceFailure> {
        let mut scratch = self.clone();
        let mut steps = Steps { next: 0, fault: None };
        scratch.instantiate_steps(id, nsd, &mut steps)?;
        Ok(steps.next)
    }

    pub fn placement(&self, nsd: &Nsd) -> Result<PlacementPlan, NfvError> {
        let vims: Vec<VimState> = self.vims.values().cloned().collect();
        place_vnfs(nsd, self.wim.optical().topology(), &vims, &self.latency)
    }

    /// Places the NSD, reserves VIM resources and joins every pair of VNFs
    /// on different nodes with an L3 service. All or nothing.
    pub fn instantiate_slice(&mut self, id: &str, nsd: &Nsd) -> Result<SliceInstance, SliceFailure> {
        let mut steps = Steps { next: 0, fault: self.fault };
        self.instantiate_steps(id, nsd, &mut steps)
    }

    fn instantiate_steps(&mut self, id: &str, nsd: &Nsd, steps: &mut Steps) -> Result<SliceInstance, SliceFailure> {
        let bare = |error| SliceFailure { slice: None, error };
        if self.slices.contains_key(id) {
            return Err(bare(NfvError::DuplicateSlice(id.to_string())));
        }
        steps.check().map_err(bare)?;
        let plan = self.placement(nsd).map_err(bare)?;
        let mut slice = SliceInstance { id: id.to_string(), plan, services: Vec::new(), state: SliceState::Failed };
        if !slice.plan.feasible {
            let error = NfvError::PlacementInfeasible(slice.plan.violations.clone());
            return Err(SliceFailure { slice: Some(Box::new(slice)), error });
        }

        let saved_wim = self.wim.clone();
        let saved_vims = self.vims.clone();
        match self.build(nsd, &mut slice, steps) {
            Ok(()) => {
                slice.state = SliceState::Active;
                self.slices.insert(id.to_string(), slice.clone());
                Ok(slice)
            }
            Err(error) => {
                self.wim = saved_wim;
                self.vims = saved_vims;
                slice.state = SliceState::Failed;
                Err(SliceFailure { slice: Some(Box::new(slice)), error })
            }
        }
    }

    fn build(&mut self, nsd: &Nsd, slice: &mut SliceInstance, steps: &mut Steps) -> Result<(), NfvError> {
        steps.check()?;
        for (name, node) in &slice.plan.assignment {
            let v = nsd.vnf(name).expect("placed VNFs come from the NSD");
            let vim = self.vims.get_mut(node).expect("placement uses known VIMs");
            vim.reserve(&slice.id, Resources::new(v.cpu_cores, v.ram_gb, v.storage_tb))?;
            steps.check()?;
        }
        for link in &nsd.links {
            let at = |e: &LinkEnd| match e {
                LinkEnd::Vnf(n) => slice.plan.assignment[n].clone(),
                LinkEnd::Camera(node) => node.clone(),
            };
            let (a, z) = (at(&link.from_vnf), at(&link.to_vnf));
            if a == z {
                continue;
            }
            let sip = |node: &NodeId| {
                self.wim
                    .domain()
                    .attachment(node)
                    .map(|s| s.id.clone())
                    .ok_or_else(|| ControlError::UnknownSip(format!("{node}-*")))
            };
            let req = CreateServiceRequest::new(&sip(&a)?, &sip(&z)?, Layer::L3, link.bandwidth_gbps);
            let service = self.wim.create_connectivity_service(&req).map_err(ControlError::from)?;
            slice.services.push(service.id);
            steps.check()?;
        }
        steps.check()
    }

    /// Deletes a connectivity service that no ACTIVE slice depends on.
    pub fn delete_service(&mut self, id: &str) -> Result<ConnectivityService, NfvError> {
        if let Some(s) =
            self.slices.values().find(|s| s.state == SliceState::Active && s.services.iter().any(|x| x == id))
        {
            let msg = format!("service {id} belongs to slice {}; tear the slice down instead", s.id);
            return Err(ControlError::InvalidRequest(msg).into());
        }
        Ok(self.wim.delete_connectivity_service(id)?)
    }

    /// Deletes the slice's services, releases its reservations and marks it
    /// TORN_DOWN.
    pub fn teardown_slice(&mut self, id: &str) -> Result<SliceInstance, NfvError> {
        let slice = self.slice(id)?;
        if slice.state != SliceState::Active {
            return Err(NfvError::InvalidState { id: id.to_string(), state: slice.state });
        }
        let services = slice.services.clone();
        for s in services.iter().rev() {
            let state = self.wim.get_service(s)?.state;
            if state == ServiceState::Active {
                self.wim.delete_connectivity_service(s)?;
            }
        }
        for vim in self.vims.values_mut() {
            vim.release(id);
        }
        let slice = self.slices.get_mut(id).expect("checked above");
        slice.state = SliceState::TornDown;
        Ok(slice.clone())
    }

    /// VIM capacity identity and the ACTIVE slice contract.
    pub fn check_invariants(&self) -> Result<(), String> {
        for vim in self.vims.values() {
            if !vim.reserved().fits(vim.capacity()) {
                return Err(format!("{} is over-reserved", vim.node()));
            }
        }
        for s in self.slices.values() {
            let holds = self.vims.values().any(|v| v.reservations().contains_key(&s.id));
            match s.state {
                SliceState::Active => {
                    if !holds && !s.plan.assignment.is_empty() {
                        return Err(format!("{} holds no reservation", s.id));
                    }
                    for svc in &s.services {
                        match self.wim.services().get(svc) {
                            Some(x) if x.state == ServiceState::Active => {}
                            _ => return Err(format!("{}: service {svc} not ACTIVE", s.id)),
                        }
                    }
                }
                _ if holds => return Err(format!("{} still holds reservations", s.id)),
                _ => {}
            }
        }
        self.wim.check_invariants()
    }
}
