use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::NfvError;
use crate::topology::{DataCenter, NodeId, Topology};

/// Storage comparisons tolerate this much rounding.
pub(crate) const STORAGE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resources {
    pub cpu_cores: u32,
    pub ram_gb: u32,
    pub storage_tb: f64,
}

impl Resources {
    pub fn new(cpu_cores: u32, ram_gb: u32, storage_tb: f64) -> Self {
        Resources { cpu_cores, ram_gb, storage_tb }
    }

    pub fn of_dc(dc: &DataCenter) -> Self {
        Resources::new(dc.cpu_cores, dc.ram_gb, dc.storage_tb)
    }

    pub fn plus(self, o: Resources) -> Resources {
        Resources::new(self.cpu_cores + o.cpu_cores, self.ram_gb + o.ram_gb, self.storage_tb + o.storage_tb)
    }

    /// True when `self` fits inside `avail`.
    pub fn fits(self, avail: Resources) -> bool {
        self.cpu_cores <= avail.cpu_cores
            && self.ram_gb <= avail.ram_gb
            && self.storage_tb <= avail.storage_tb + STORAGE_EPS
    }
}

/// Compute accounting of one data center. Free capacity is always derived
/// from the capacity and the per-slice reservations, so releasing a
/// reservation restores the previous free values exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "VimDocument", try_from = "VimDocument")]
pub struct VimState {
    node: NodeId,
    capacity: Resources,
    reservations: BTreeMap<String, Resources>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VimDocument {
    node: NodeId,
    capacity: Resources,
    free_cpu: u32,
    free_ram: u32,
    free_storage: f64,
    reservations: BTreeMap<String, Resources>,
}

impl From<VimState> for VimDocument {
    fn from(v: VimState) -> Self {
        let free = v.free();
        VimDocument {
            node: v.node,
            capacity: v.capacity,
            free_cpu: free.cpu_cores,
            free_ram: free.ram_gb,
            free_storage: free.storage_tb,
            reservations: v.reservations,
        }
    }
}

impl TryFrom<VimDocument> for VimState {
    type Error = String;

    fn try_from(d: VimDocument) -> Result<Self, String> {
        let v = VimState { node: d.node, capacity: d.capacity, reservations: d.reservations };
        if !v.reserved().fits(v.capacity) {
            return Err(format!("reservations on {} exceed capacity", v.node));
        }
        let free = v.free();
        if free.cpu_cores != d.free_cpu || free.ram_gb != d.free_ram {
            return Err(format!("free values on {} disagree with reservations", v.node));
        }
        Ok(v)
    }
}

impl VimState {
    pub fn new(node: NodeId, capacity: Resources) -> Self {
        VimState { node, capacity, reservations: BTreeMap::new() }
    }

    /// One VIM per data center, in line order.
    pub fn from_topology(topo: &Topology) -> Vec<VimState> {
        topo.dc_nodes()
            .into_iter()
            .map(|n| VimState::new(n.id.clone(), Resources::of_dc(n.dc.as_ref().expect("dc node"))))
            .collect()
    }

    pub fn node(&self) -> &NodeId {
        &self.node
    }

    pub fn capacity(&self) -> Resources {
        self.capacity
    }

    pub fn reservations(&self) -> &BTreeMap<String, Resources> {
        &self.reservations
    }

    pub fn reserved(&self) -> Resources {
        self.reservations.values().fold(Resources::default(), |acc, r| acc.plus(*r))
    }

    pub fn free(&self) -> Resources {
        let used = self.reserved();
        Resources::new(
            self.capacity.cpu_cores - used.cpu_cores,
            self.capacity.ram_gb - used.ram_gb,
            (self.capacity.storage_tb - used.storage_tb).max(0.0),
        )
    }

    /// Adds `demand` to the slice's reservation on this DC.
    pub fn reserve(&mut self, slice: &str, demand: Resources) -> Result<(), NfvError> {
        if !demand.fits(self.free()) {
            return Err(NfvError::InsufficientResources { node: self.node.clone(), slice: slice.to_string() });
        }
        let entry = self.reservations.entry(slice.to_string()).or_default();
        *entry = entry.plus(demand);
        Ok(())
    }

    pub fn release(&mut self, slice: &str) -> Option<Resources> {
        self.reservations.remove(slice)
    }
}
