use serde::{Deserialize, Serialize};

use crate::optical::FormatName;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Layer {
    Optical,
    L2,
    L3,
}

impl std::str::FromStr for Layer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "optical" => Ok(Layer::Optical),
            "l2" => Ok(Layer::L2),
            "l3" => Ok(Layer::L3),
            _ => Err(format!("unknown layer {s}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ServiceState {
    Planned,
    Provisioning,
    Active,
    Deleting,
    Deleted,
    Failed,
}

impl ServiceState {
    pub fn can_become(self, next: ServiceState) -> bool {
        use ServiceState::*;
        matches!(
            (self, next),
            (Planned, Provisioning)
                | (Provisioning, Active)
                | (Provisioning, Failed)
                | (Active, Deleting)
                | (Deleting, Deleted)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityService {
    pub id: String,
    pub layer: Layer,
    pub sip_a: String,
    pub sip_z: String,
    pub state: ServiceState,
    /// Every state the service has been in, oldest first.
    pub history: Vec<ServiceState>,
    pub underlying: Option<String>,
    pub vlan_id: Option<u16>,
    pub vni: Option<u32>,
    pub bandwidth_gbps: f64,
}

impl ConnectivityService {
    pub(crate) fn planned(id: String, req: &CreateServiceRequest) -> Self {
        ConnectivityService {
            id,
            layer: req.layer,
            sip_a: req.sip_a.clone(),
            sip_z: req.sip_z.clone(),
            state: ServiceState::Planned,
            history: vec![ServiceState::Planned],
            underlying: None,
            vlan_id: None,
            vni: None,
            bandwidth_gbps: req.bandwidth_gbps,
        }
    }

    pub(crate) fn advance(&mut self, next: ServiceState) {
        assert!(self.state.can_become(next), "illegal transition {:?} -> {next:?}", self.state);
        self.state = next;
        self.history.push(next);
    }
}

/// Northbound create-connectivity-service request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateServiceRequest {
    pub sip_a: String,
    pub sip_z: String,
    pub layer: Layer,
    pub bandwidth_gbps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_hint: Option<FormatName>,
}

impl CreateServiceRequest {
    pub fn new(sip_a: &str, sip_z: &str, layer: Layer, bandwidth_gbps: f64) -> Self {
        CreateServiceRequest {
            sip_a: sip_a.to_string(),
            sip_z: sip_z.to_string(),
            layer,
            bandwidth_gbps,
            format_hint: None,
        }
    }

    pub fn with_format(mut self, format: FormatName) -> Self {
        self.format_hint = Some(format);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legal_transitions_only() {
        use ServiceState::*;
        let all = [Planned, Provisioning, Active, Deleting, Deleted, Failed];
        let legal: Vec<_> =
            all.iter().flat_map(|a| all.iter().map(move |b| (*a, *b))).filter(|(a, b)| a.can_become(*b)).collect();
        assert_eq!(
            legal,
            vec![
                (Planned, Provisioning),
                (Provisioning, Active),
                (Provisioning, Failed),
                (Active, Deleting),
                (Deleting, Deleted)
            ]
        );
    }

    #[test]
    fn request_json_shape() {
        let req: CreateServiceRequest = serde_json::from_str(
            r#"{"sip_a":"A","sip_z":"Z","layer":"L2","bandwidth_gbps":10,"format_hint":"DP-16QAM"}"#,
        )
        .unwrap();
        assert_eq!(req, CreateServiceRequest::new("A", "Z", Layer::L2, 10.0).with_format(FormatName::Dp16Qam));
        assert!(serde_json::from_str::<CreateServiceRequest>(
            r#"{"sip_a":"A","sip_z":"Z","layer":"L2","bandwidth_gbps":1,"x":1}"#
        )
        .is_err());
    }
}
