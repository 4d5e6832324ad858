use super::descriptor::{Nsd, VirtualLink, VnfDescriptor, VnfKind, CAMERA_SOURCE};
use crate::topology::DcTier::{Cdc, Edc, Rdc};
use crate::workload::{css_name, Scenario};

/// Descriptor for the demo scenario (three AMENs of 150 cameras, 15 PTZ each).
pub const SURVEILLANCE_NSD_JSON: &str = include_str!("../../data/surveillance_nsd.json");

pub const CSS_TO_CSM_GBPS: f64 = 1.0;
pub const ARCHIVE_GBPS: f64 = 2.0;
pub const CSM_TO_STORAGE_GBPS: f64 = 1.0;
pub const FIREWALL_TO_NAT_GBPS: f64 = 1.0;

pub fn default_surveillance_nsd() -> Nsd {
    Nsd::from_json(SURVEILLANCE_NSD_JSON).expect("bundled descriptor parses")
}

/// Video-surveillance service sized from a scenario. Every AMEN with cameras
/// gets a recording server (CSS, device manager co-packaged) pinned to it;
/// the master, analytics, storage and the firewall/NAT pair are shared.
///
/// Link order: per AMEN, cameras to CSS, cameras to ANALYTICS, PTZ control
/// back to the cameras, CSS to CSM, CSS archive to FIREWALL; then CSM to
/// STORAGE_DB and FIREWALL to NAT.
pub fn surveillance_nsd(scenario: &Scenario) -> Nsd {
    let mut vnfs = vec![
        VnfDescriptor::new("CSM", VnfKind::Csm, 8, 32, 2.0, &[Rdc, Cdc]),
        VnfDescriptor::new("ANALYTICS", VnfKind::Analytics, 16, 32, 0.0, &[Edc, Rdc, Cdc]),
        VnfDescriptor::new("STORAGE_DB", VnfKind::StorageDb, 4, 16, 50.0, &[Rdc, Cdc]),
        VnfDescriptor::new("NAT", VnfKind::Nat, 2, 4, 0.0, &[Edc, Rdc, Cdc]),
        VnfDescriptor::new("FIREWALL", VnfKind::Firewall, 2, 4, 0.0, &[Edc, Rdc, Cdc]),
    ];
    let mut links = Vec::new();
    let p = &scenario.params;
    for amen in scenario.amens.iter().filter(|a| a.cameras > 0) {
        let css = css_name(&amen.node);
        let cams = format!("{CAMERA_SOURCE}@{}", amen.node);
        let aggregate_gbps = amen.aggregate_mbps / 1000.0;
        vnfs.push(VnfDescriptor::new(&css, VnfKind::Css, 8, 16, 10.0, &[Edc, Rdc]).pinned(amen.node.as_str()));
        links.push(VirtualLink::new(&cams, &css, aggregate_gbps));
        links.push(VirtualLink::new(&cams, "ANALYTICS", aggregate_gbps));
        if amen.ptz_cameras > 0 {
            let ptz_gbps = amen.ptz_cameras as f64 * p.ptz_control_mbps / 1000.0;
            links.push(VirtualLink::new("ANALYTICS", &cams, ptz_gbps).bounded(p.ptz_max_latency_ms));
        }
        links.push(VirtualLink::new(&css, "CSM", CSS_TO_CSM_GBPS));
        links.push(VirtualLink::new(&css, "FIREWALL", ARCHIVE_GBPS));
    }
    links.push(VirtualLink::new("CSM", "STORAGE_DB", CSM_TO_STORAGE_GBPS));
    links.push(VirtualLink::new("FIREWALL", "NAT", FIREWALL_TO_NAT_GBPS));
    Nsd { vnfs, links }
}
