//! Bundled demo data: the five-node horseshoe and the surveillance service descriptor.

use crate::topology::{load_topology, Topology};

pub const DEMO_TOPOLOGY_JSON: &str = include_str!("../data/demo5.json");

/// MCEN1 - AMEN1 - AMEN2 - AMEN3 - MCEN2 with 40/80/60/120 km spans, an EDC at
/// every AMEN, an RDC at MCEN1 and a CDC at MCEN2. AMENs carry one vendor A
/// transponder, MCENs one vendor B.
pub fn demo_topology() -> Topology {
    load_topology(DEMO_TOPOLOGY_JSON).expect("bundled topology is valid")
}
