//! NFV orchestration: service descriptors, per-DC VIM accounting, VNF
//! placement and atomic slice instantiation over the WIM.

mod catalog;
mod descriptor;
mod orchestrator;
mod placement;
mod vim;

use thiserror::Error;

pub use catalog::{default_surveillance_nsd, surveillance_nsd, SURVEILLANCE_NSD_JSON};
pub use descriptor::{LinkEnd, Nsd, VirtualLink, VnfDescriptor, VnfKind, CAMERA_SOURCE};
pub use orchestrator::{Orchestrator, SliceFailure, SliceInstance, SliceState};
pub use placement::{
    place_vnfs, place_vnfs_with, PlacementMethod, PlacementPlan, Solver, EXACT_MAX_DCS, EXACT_MAX_VNFS,
};
pub use vim::{Resources, VimState};

use crate::control::ControlError;
use crate::topology::NodeId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NfvError {
    #[error("invalid service descriptor: {0}")]
    InvalidNsd(String),
    #[error("slice {0} already exists")]
    DuplicateSlice(String),
    #[error("no feasible placement: {}", .0.join("; "))]
    PlacementInfeasible(Vec<String>),
    #[error("unknown slice {0}")]
    UnknownSlice(String),
    #[error("slice {id} is {state:?}")]
    InvalidState { id: String, state: SliceState },
    #[error("{node} cannot hold the reservation of slice {slice}")]
    InsufficientResources { node: NodeId, slice: String },
    #[error("injected fault at step {0}")]
    InjectedFault(usize),
    #[error(transparent)]
    Control(#[from] ControlError),
}

impl NfvError {
    pub fn code(&self) -> &'static str {
        match self {
            NfvError::InvalidNsd(_) => "INVALID_NSD",
            NfvError::DuplicateSlice(_) => "DUPLICATE_SLICE",
            NfvError::PlacementInfeasible(_) => "PLACEMENT_INFEASIBLE",
            NfvError::UnknownSlice(_) => "UNKNOWN_SLICE",
            NfvError::InvalidState { .. } => "INVALID_STATE",
            NfvError::InsufficientResources { .. } => "INSUFFICIENT_RESOURCES",
            NfvError::InjectedFault(_) => "INJECTED_FAULT",
            NfvError::Control(e) => e.code(),
        }
    }
}
