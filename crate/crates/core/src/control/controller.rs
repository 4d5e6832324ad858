use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{
    abstract_domain, AbstractedDomain, ConnectivityService, ControlError, CreateFailure, CreateServiceRequest, Layer,
    ServiceInterfacePoint, ServiceState, SipKind,
};
use crate::optical::{FormatName, OpticalError, OpticalNetwork};
use crate::topology::NodeId;

/// Slack for bandwidth sums, in Gb/s.
const BW_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControlConfig {
    pub launch_power_dbm: f64,
    /// Inclusive VLAN id range, scoped per media channel.
    pub vlan_range: (u16, u16),
    /// Largest VNI in the global pool (which starts at 1).
    pub vni_max: u32,
}

impl Default for ControlConfig {
    fn default() -> Self {
        ControlConfig { launch_power_dbm: 0.0, vlan_range: (2, 4094), vni_max: (1 << 24) - 1 }
    }
}

/// Controller-side view of a media channel created for services.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Tunnel {
    /// SIP pair, sorted.
    sips: (String, String),
    /// Owned by one OPTICAL service; never shared.
    dedicated: bool,
    riders: BTreeSet<String>,
    vlans: BTreeMap<u16, String>,
}

/// Parent SDN controller: connectivity services over the abstracted optical
/// domain. All mutations go through `&mut self`; a failed create leaves the
/// state exactly as it was.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Controller {
    optical: OpticalNetwork,
    config: ControlConfig,
    domain: AbstractedDomain,
    services: BTreeMap<String, ConnectivityService>,
    tunnels: BTreeMap<String, Tunnel>,
    vnis: BTreeMap<u32, String>,
    next_service: u64,
}

fn sip_pair(a: &str, z: &str) -> (String, String) {
    if a <= z {
        (a.to_string(), z.to_string())
    } else {
        (z.to_string(), a.to_string())
    }
}

/// Outcome of planning a create, computed before any mutation.
enum Carrier {
    Existing { channel: String, vlan: Option<u16> },
    New { format: FormatName },
}

impl Controller {
    pub fn new(optical: OpticalNetwork, config: ControlConfig) -> Self {
        let domain = abstract_domain(optical.topology());
        Controller {
            optical,
            config,
            domain,
            services: BTreeMap::new(),
            tunnels: BTreeMap::new(),
            vnis: BTreeMap::new(),
            next_service: 1,
        }
    }

    pub fn optical(&self) -> &OpticalNetwork {
        &self.optical
    }

    pub fn config(&self) -> &ControlConfig {
        &self.config
    }

    pub fn domain(&self) -> &AbstractedDomain {
        &self.domain
    }

    pub fn services(&self) -> &BTreeMap<String, ConnectivityService> {
        &self.services
    }

    pub fn get_service(&self, id: &str) -> Result<ConnectivityService, ControlError> {
        self.services.get(id).cloned().ok_or_else(|| ControlError::UnknownService(id.to_string()))
    }

    /// VNIs currently allocated, with their owning service.
    pub fn vni_allocations(&self) -> &BTreeMap<u32, String> {
        &self.vnis
    }

    /// Bandwidth carried by the services riding a channel.
    pub fn channel_load_gbps(&self, channel: &str) -> f64 {
        self.tunnels.get(channel).map(|t| t.riders.iter().map(|r| self.services[r].bandwidth_gbps).sum()).unwrap_or(0.0)
    }

    fn sip(&self, id: &str) -> Result<&ServiceInterfacePoint, ControlError> {
        self.domain.sip(id).ok_or_else(|| ControlError::UnknownSip(id.to_string()))
    }

    fn sip_supports(&self, sip: &ServiceInterfacePoint, format: FormatName) -> bool {
        let node = self.optical.topology().node(&sip.node).expect("SIPs belong to the topology");
        match (sip.kind, sip.transponder) {
            (SipKind::TransponderPort, Some(t)) => node.transponders[t].supports(format),
            _ => node.supports(format),
        }
    }

    fn check_format(&self, sips: [&ServiceInterfacePoint; 2], format: FormatName) -> Result<(), ControlError> {
        for s in sips {
            if !self.sip_supports(s, format) {
                return Err(OpticalError::UnsupportedFormat { node: s.node.clone(), format }.into());
            }
        }
        Ok(())
    }

    /// Format for a new channel: the hint, or the highest-rate format both SIPs
    /// support that closes the OSNR budget on the route.
    fn choose_format(
        &self,
        a: &ServiceInterfacePoint,
        z: &ServiceInterfacePoint,
        hint: Option<FormatName>,
    ) -> Result<FormatName, ControlError> {
        if let Some(f) = hint {
            self.check_format([a, z], f)?;
            return Ok(f);
        }
        let launch = self.config.launch_power_dbm;
        let feasible = self.optical.feasible_formats(&a.node, &z.node, launch)?;
        if let Some(f) = feasible.into_iter().find(|&f| self.sip_supports(a, f) && self.sip_supports(z, f)) {
            return Ok(f);
        }
        let supported: Vec<FormatName> =
            FormatName::ALL.into_iter().filter(|&f| self.sip_supports(a, f) && self.sip_supports(z, f)).collect();
        match supported.first() {
            None => Err(OpticalError::UnsupportedFormat { node: a.node.clone(), format: FormatName::DpQpsk }.into()),
            Some(&weakest) => {
                let path = self.optical.route(&a.node, &z.node)?;
                Err(OpticalError::InfeasibleOsnr(Box::new(self.optical.evaluate(&path, weakest, launch))).into())
            }
        }
    }

    fn lowest_free_vni(&self) -> Option<u32> {
        // allocations are dense from 1 in practice; walk the gaps
        let mut candidate = 1u32;
        for &v in self.vnis.keys() {
            if v > candidate {
                break;
            }
            candidate = v + 1;
        }
        (candidate <= self.config.vni_max).then_some(candidate)
    }

    fn lowest_free_vlan(&self, used: Option<&BTreeMap<u16, String>>) -> Option<u16> {
        let (lo, hi) = self.config.vlan_range;
        (lo..=hi).find(|v| used.is_none_or(|u| !u.contains_key(v)))
    }

    fn plan(&self, req: &CreateServiceRequest) -> Result<(Carrier, Option<u32>), ControlError> {
        let a = self.sip(&req.sip_a)?;
        let z = self.sip(&req.sip_z)?;
        if a.node == z.node {
            return Err(OpticalError::SameEndpoint(a.node.clone()).into());
        }
        let vni = match req.layer {
            Layer::L3 => Some(self.lowest_free_vni().ok_or(ControlError::VniPoolExhausted)?),
            _ => None,
        };

        if req.layer != Layer::Optical {
            let pair = sip_pair(&req.sip_a, &req.sip_z);
            let mut best: Option<(&String, f64)> = None;
            for (id, t) in &self.tunnels {
                if t.dedicated || t.sips != pair {
                    continue;
                }
                let channel = self.optical.channel(id).expect("tunnels track live channels");
                if req.format_hint.is_some_and(|f| f != channel.format.name) {
                    continue;
                }
                let free = channel.format.net_rate_gbps - self.channel_load_gbps(id);
                if free + BW_EPS >= req.bandwidth_gbps && best.is_none_or(|(_, f)| free > f) {
                    best = Some((id, free));
                }
            }
            if let Some((id, _)) = best {
                let vlan = match req.layer {
                    Layer::L2 => Some(
                        self.lowest_free_vlan(Some(&self.tunnels[id].vlans))
                            .ok_or_else(|| ControlError::L2PoolExhausted(id.clone()))?,
                    ),
                    _ => None,
                };
                return Ok((Carrier::Existing { channel: id.clone(), vlan }, vni));
            }
            if req.layer == Layer::L2 && self.lowest_free_vlan(None).is_none() {
                return Err(ControlError::L2PoolExhausted("<new>".to_string()));
            }
        }

        let format = self.choose_format(a, z, req.format_hint)?;
        let rate = self.optical.format(format).net_rate_gbps;
        if req.bandwidth_gbps > rate + BW_EPS {
            return Err(ControlError::CapacityExceeded { requested_gbps: req.bandwidth_gbps, available_gbps: rate });
        }
        Ok((Carrier::New { format }, vni))
    }

    pub fn create_connectivity_service(
        &mut self,
        req: &CreateServiceRequest,
    ) -> Result<ConnectivityService, CreateFailure> {
        let bw_ok = req.bandwidth_gbps.is_finite()
            && match req.layer {
                Layer::Optical => req.bandwidth_gbps >= 0.0,
                Layer::L2 | Layer::L3 => req.bandwidth_gbps > 0.0,
            };
        let pre = (|| {
            self.sip(&req.sip_a)?;
            self.sip(&req.sip_z)?;
            if req.sip_a == req.sip_z {
                let node = self.sip(&req.sip_a)?.node.clone();
                return Err(ControlError::from(OpticalError::SameEndpoint(node)));
            }
            if !bw_ok {
                return Err(ControlError::InvalidRequest(format!(
                    "bandwidth_gbps {} out of range",
                    req.bandwidth_gbps
                )));
            }
            Ok(())
        })();
        if let Err(error) = pre {
            return Err(CreateFailure { service: None, error });
        }

        let mut service = ConnectivityService::planned(format!("svc-{}", self.next_service), req);
        service.advance(ServiceState::Provisioning);

        let outcome = self.plan(req).and_then(|(carrier, vni)| match carrier {
            Carrier::Existing { channel, vlan } => Ok((channel, vlan, vni)),
            Carrier::New { format } => {
                let a = self.sip(&req.sip_a)?.node.clone();
                let z = self.sip(&req.sip_z)?.node.clone();
                let launch = self.config.launch_power_dbm;
                let mc = self.optical.provision_media_channel(&a, &z, format, launch)?;
                self.tunnels.insert(
                    mc.id.clone(),
                    Tunnel {
                        sips: sip_pair(&req.sip_a, &req.sip_z),
                        dedicated: req.layer == Layer::Optical,
                        riders: BTreeSet::new(),
                        vlans: BTreeMap::new(),
                    },
                );
                let vlan = (req.layer == Layer::L2).then_some(self.config.vlan_range.0);
                Ok((mc.id, vlan, vni))
            }
        });

        match outcome {
            Ok((channel, vlan, vni)) => {
                service.underlying = Some(channel.clone());
                service.vlan_id = vlan;
                service.vni = vni;
                service.advance(ServiceState::Active);
                let tunnel = self.tunnels.get_mut(&channel).expect("carrier exists");
                tunnel.riders.insert(service.id.clone());
                if let Some(v) = vlan {
                    tunnel.vlans.insert(v, service.id.clone());
                }
                if let Some(v) = vni {
                    self.vnis.insert(v, service.id.clone());
                }
                self.next_service += 1;
                self.services.insert(service.id.clone(), service.clone());
                debug_assert_eq!(self.check_invariants(), Ok(()));
                Ok(service)
            }
            Err(error) => {
                service.advance(ServiceState::Failed);
                Err(CreateFailure { service: Some(Box::new(service)), error })
            }
        }
    }

    pub fn delete_connectivity_service(&mut self, id: &str) -> Result<ConnectivityService, ControlError> {
        let service = self.services.get(id).ok_or_else(|| ControlError::UnknownService(id.to_string()))?;
        if service.state != ServiceState::Active {
            return Err(ControlError::InvalidState { id: id.to_string(), state: service.state });
        }
        let channel = service.underlying.clone().expect("active services ride a channel");
        let (vlan, vni) = (service.vlan_id, service.vni);

        let service = self.services.get_mut(id).expect("checked above");
        service.advance(ServiceState::Deleting);
        let tunnel = self.tunnels.get_mut(&channel).expect("active services ride a tunnel");
        tunnel.riders.remove(id);
        if let Some(v) = vlan {
            tunnel.vlans.remove(&v);
        }
        if let Some(v) = vni {
            self.vnis.remove(&v);
        }
        if tunnel.riders.is_empty() {
            self.tunnels.remove(&channel);
            self.optical.release_media_channel(&channel)?;
        }
        let service = self.services.get_mut(id).expect("checked above");
        service.advance(ServiceState::Deleted);
        let snapshot = service.clone();
        debug_assert_eq!(self.check_invariants(), Ok(()));
        Ok(snapshot)
    }

    /// Drops a DELETED service record and, when it was the last user, the
    /// released channel record beneath it. Long experiments use this to keep
    /// state bounded.
    pub fn forget_service(&mut self, id: &str) -> bool {
        match self.services.get(id) {
            Some(s) if s.state == ServiceState::Deleted => {
                let channel = s.underlying.clone();
                self.services.remove(id);
                if let Some(c) = channel {
                    if !self.tunnels.contains_key(&c) {
                        self.optical.forget_channel(&c);
                    }
                }
                true
            }
            _ => false,
        }
    }

    pub fn endpoint_nodes(&self, service: &ConnectivityService) -> Result<(NodeId, NodeId), ControlError> {
        Ok((self.sip(&service.sip_a)?.node.clone(), self.sip(&service.sip_z)?.node.clone()))
    }

    /// Checks bandwidth conservation, VLAN/VNI uniqueness and that every tunnel
    /// rides an active channel.
    pub fn check_invariants(&self) -> Result<(), String> {
        for (id, t) in &self.tunnels {
            let ch = self.optical.channel(id).ok_or(format!("tunnel {id} has no channel"))?;
            if ch.state != crate::optical::ChannelState::Active {
                return Err(format!("tunnel {id} rides a released channel"));
            }
            let load = self.channel_load_gbps(id);
            if load > ch.format.net_rate_gbps + BW_EPS {
                return Err(format!("channel {id} carries {load} Gb/s over {}", ch.format.net_rate_gbps));
            }
            for (v, s) in &t.vlans {
                if self.services[s].vlan_id != Some(*v) || !t.riders.contains(s) {
                    return Err(format!("vlan {v} on {id} inconsistent"));
                }
            }
        }
        for (v, s) in &self.vnis {
            let svc = &self.services[s];
            if svc.vni != Some(*v) || svc.state != ServiceState::Active {
                return Err(format!("vni {v} inconsistent"));
            }
        }
        Ok(())
    }
}
