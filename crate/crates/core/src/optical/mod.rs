//! Optical layer: routing along the horseshoe, first-fit spectrum assignment on
//! broadcast segments, OSNR feasibility and media-channel lifecycle.

mod blockers;
mod budget;
mod format;
mod network;
mod path;
mod spectrum;

use thiserror::Error;

pub use blockers::{configure_blockers, BlockerAction, BlockerRule};
pub use budget::{combine_osnr_db, evaluate_feasibility, path_stages, FeasibilityReport, ImpairmentParams};
pub use format::{FormatCatalog, FormatName, ModulationFormat};
pub use network::{ChannelState, MediaChannel, OpticalConfig, OpticalNetwork};
pub use path::{route_path, OpticalPath};
pub use spectrum::{assign_channel, SpectrumState};

use crate::topology::NodeId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpticalError {
    #[error("source and destination are both {0}")]
    SameEndpoint(NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("no path from {src} to {dst}: span {span} is not operational")]
    NoPath { src: NodeId, dst: NodeId, span: String },
    #[error("{node} has no transponder supporting {format}")]
    UnsupportedFormat { node: NodeId, format: FormatName },
    #[error("OSNR {:.2} dB below required {:.2} dB", .0.osnr_db, .0.required_osnr_db)]
    InfeasibleOsnr(Box<FeasibilityReport<f64>>),
    #[error("no channel index free on every touched segment")]
    OpticalBlocked,
    #[error("unknown media channel {0}")]
    UnknownChannel(String),
    #[error("media channel {0} already released")]
    AlreadyReleased(String),
    #[error("invalid optical config: {0}")]
    InvalidConfig(String),
}

impl OpticalError {
    pub fn code(&self) -> &'static str {
        match self {
            OpticalError::SameEndpoint(_) => "SAME_ENDPOINT",
            OpticalError::UnknownNode(_) => "UNKNOWN_NODE",
            OpticalError::NoPath { .. } => "NO_PATH",
            OpticalError::UnsupportedFormat { .. } => "UNSUPPORTED_FORMAT",
            OpticalError::InfeasibleOsnr(_) => "INFEASIBLE_OSNR",
            OpticalError::OpticalBlocked => "OPTICAL_BLOCKED",
            OpticalError::UnknownChannel(_) => "UNKNOWN_CHANNEL",
            OpticalError::AlreadyReleased(_) => "ALREADY_RELEASED",
            OpticalError::InvalidConfig(_) => "INVALID_CONFIG",
        }
    }
}
