//! Deterministic simulator of a metro optical horseshoe network with a
//! hierarchical control, orchestration and management stack.
//!
//! Layers, bottom up:
//!
//! * [`topology`]: the horseshoe model and its filterless broadcast segments.
//! * [`optical`]: routing, OSNR budget, first-fit spectrum, media channels.
//! * [`control`]: the parent controller exposing OPTICAL / L2 / L3 connectivity
//!   services over service interface points.
//! * [`nfv`]: VNF placement, VIM accounting and atomic slice instantiation.
//! * [`workload`]: surveillance scenarios, latency model and blocking experiments.
//!
//! The numeric kernels are generic over [`num::Real`]; the aliases below fix
//! them to `f64`, which the stateful layers use throughout.

pub mod control;
pub mod demo;
pub mod nfv;
pub mod num;
pub mod optical;
pub mod topology;
pub mod workload;

pub use num::Real;

pub type ModulationFormat = optical::ModulationFormat<f64>;
pub type FormatCatalog = optical::FormatCatalog<f64>;
pub type ImpairmentParams = optical::ImpairmentParams<f64>;
pub type FeasibilityReport = optical::FeasibilityReport<f64>;
pub type LatencyParams = workload::LatencyParams<f64>;

pub type ImpairmentParamsF32 = optical::ImpairmentParams<f32>;
pub type FeasibilityReportF32 = optical::FeasibilityReport<f32>;
pub type LatencyParamsF32 = workload::LatencyParams<f32>;
