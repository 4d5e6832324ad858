//! Surveillance workload: camera fleets and flows, the latency model, and
//! Monte-Carlo blocking experiments over the control stack.

mod erlang;
mod experiment;
mod latency;
mod scenario;

use thiserror::Error;

pub use erlang::erlang_b;
pub use experiment::{run_experiment, DemandClass, EndpointModel, ExperimentParams, HistogramBucket, Metrics};
pub use latency::{compute_latency, node_latency, LatencyParams};
pub use scenario::{
    css_name, generate_scenario, AmenLoad, Camera, CameraKind, Flow, FlowKind, Scenario, ScenarioParams,
    TYPICAL_CAMERAS_PER_AMEN,
};

use crate::control::ControlError;
use crate::optical::OpticalError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WorkloadError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Optical(#[from] OpticalError),
    #[error(transparent)]
    Control(#[from] ControlError),
}

impl WorkloadError {
    pub fn code(&self) -> &'static str {
        match self {
            WorkloadError::InvalidParams(_) => "INVALID_PARAMS",
            WorkloadError::Optical(e) => e.code(),
            WorkloadError::Control(e) => e.code(),
        }
    }
}
