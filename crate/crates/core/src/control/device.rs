//! Southbound device configuration documents.
//!
//! Transponders get an OpenConfig-like document (frequency, operational mode,
//! target output power); wavelength blockers get an OpenROADM-like per-channel
//! pass/block table. Field names mirror those models without their YANG trees.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{ControlError, Controller, ServiceState};
use crate::topology::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum DeviceKind {
    Transponder,
    Blocker,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Dialect {
    OpenconfigLike,
    OpenroadmLike,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceConfig {
    pub device: NodeId,
    pub device_kind: DeviceKind,
    pub dialect: Dialect,
    pub payload: serde_json::Value,
}

impl Controller {
    /// Two transponder configs plus one blocker config per blocker rule of the
    /// underlying channel, sorted by node id, device kind, then channel.
    pub fn render_device_configs(&self, service_id: &str) -> Result<Vec<DeviceConfig>, ControlError> {
        let service = self.get_service(service_id)?;
        if service.state != ServiceState::Active {
            return Err(ControlError::InvalidState { id: service.id, state: service.state });
        }
        let channel_id = service.underlying.as_deref().expect("active services ride a channel");
        let channel = self.optical().channel(channel_id).expect("active services ride a live channel");
        let grid = self.optical().topology().grid();
        let frequency = grid.frequency_thz(channel.channel_index);

        let mut configs = Vec::new();
        for sip_id in [&service.sip_a, &service.sip_z] {
            let sip = self.domain().sip(sip_id).expect("service SIPs exist");
            configs.push(DeviceConfig {
                device: sip.node.clone(),
                device_kind: DeviceKind::Transponder,
                dialect: Dialect::OpenconfigLike,
                payload: json!({
                    "sip": sip.id,
                    "media_channel": channel.id,
                    "channel_index": channel.channel_index,
                    "frequency_thz": frequency,
                    "operational_mode": channel.format.name,
                    "target_output_power_dbm": channel.launch_power_dbm,
                }),
            });
        }
        for rule in self.optical().blocker_rules().get(channel_id).into_iter().flatten() {
            configs.push(DeviceConfig {
                device: rule.node.clone(),
                device_kind: DeviceKind::Blocker,
                dialect: Dialect::OpenroadmLike,
                payload: json!({
                    "media_channel": channel.id,
                    "channels": [{
                        "index": rule.channel_index,
                        "frequency_thz": grid.frequency_thz(rule.channel_index),
                        "action": rule.action,
                    }],
                }),
            });
        }
        configs.sort_by(|x, y| {
            (&x.device, x.device_kind, &x.payload["channel_index"].as_u64(), x.payload["sip"].as_str()).cmp(&(
                &y.device,
                y.device_kind,
                &y.payload["channel_index"].as_u64(),
                y.payload["sip"].as_str(),
            ))
        });
        Ok(configs)
    }
}
