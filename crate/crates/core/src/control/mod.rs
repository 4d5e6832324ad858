//! Hierarchical control: the parent controller exposes OPTICAL, L2 (VLAN) and
//! L3 (VXLAN VNI) connectivity services between service interface points and
//! drives the optical layer underneath.

mod controller;
mod device;
mod northbound;
mod service;
mod sip;

use thiserror::Error;

pub use controller::{ControlConfig, Controller};
pub use device::{DeviceConfig, DeviceKind, Dialect};
pub use northbound::{ErrorBody, NorthboundRequest, NorthboundResponse};
pub use service::{ConnectivityService, CreateServiceRequest, Layer, ServiceState};
pub use sip::{abstract_domain, AbstractedDomain, ServiceInterfacePoint, SipKind};

use crate::optical::OpticalError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControlError {
    #[error("unknown service interface point {0}")]
    UnknownSip(String),
    #[error("unknown service {0}")]
    UnknownService(String),
    #[error("service {id} is {state:?}")]
    InvalidState { id: String, state: ServiceState },
    #[error("{requested_gbps} Gb/s exceeds the {available_gbps} Gb/s a channel can carry")]
    CapacityExceeded { requested_gbps: f64, available_gbps: f64 },
    #[error("no free VLAN id on media channel {0}")]
    L2PoolExhausted(String),
    #[error("VNI pool exhausted")]
    VniPoolExhausted,
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error(transparent)]
    Optical(#[from] OpticalError),
}

impl ControlError {
    pub fn code(&self) -> &'static str {
        match self {
            ControlError::UnknownSip(_) => "UNKNOWN_SIP",
            ControlError::UnknownService(_) => "UNKNOWN_SERVICE",
            ControlError::InvalidState { .. } => "INVALID_STATE",
            ControlError::CapacityExceeded { .. } => "CAPACITY_EXCEEDED",
            ControlError::L2PoolExhausted(_) => "L2_POOL_EXHAUSTED",
            ControlError::VniPoolExhausted => "VNI_POOL_EXHAUSTED",
            ControlError::InvalidRequest(_) => "INVALID_REQUEST",
            ControlError::Optical(e) => e.code(),
        }
    }
}

/// A create that did not complete. `service` holds the FAILED record when the
/// request got as far as provisioning; the controller state is unchanged.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{error}")]
pub struct CreateFailure {
    pub service: Option<Box<ConnectivityService>>,
    #[source]
    pub error: ControlError,
}

impl CreateFailure {
    pub fn code(&self) -> &'static str {
        self.error.code()
    }
}

impl From<CreateFailure> for ControlError {
    fn from(f: CreateFailure) -> Self {
        f.error
    }
}
