use serde::{Deserialize, Serialize};

use crate::topology::{NodeId, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SipKind {
    TransponderPort,
    DcPort,
}

/// Abstract endpoint exposed northbound by the optical domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServiceInterfacePoint {
    pub id: String,
    pub node: NodeId,
    pub kind: SipKind,
    /// Index into the node's transponder list, for transponder ports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transponder: Option<usize>,
}

/// The optical domain as the parent controller sees it: a set of SIPs and
/// nothing about nodes or spans.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractedDomain {
    sips: Vec<ServiceInterfacePoint>,
}

impl AbstractedDomain {
    pub fn sips(&self) -> &[ServiceInterfacePoint] {
        &self.sips
    }

    pub fn sip(&self, id: &str) -> Option<&ServiceInterfacePoint> {
        self.sips.iter().find(|s| s.id == id)
    }

    /// Preferred attachment point at a node: its DC port, else its first
    /// transponder port.
    pub fn attachment(&self, node: &NodeId) -> Option<&ServiceInterfacePoint> {
        let mut at_node = self.sips.iter().filter(|s| &s.node == node);
        let first = at_node.clone().next();
        at_node.find(|s| s.kind == SipKind::DcPort).or(first)
    }
}

/// One SIP per transponder slot (`<node>-TRX<n>`) and one per data-center port
/// (`<node>-DC`), in line order.
pub fn abstract_domain(topo: &Topology) -> AbstractedDomain {
    let mut sips = Vec::new();
    for node in topo.nodes() {
        let mut slot = 0;
        for (t, trx) in node.transponders.iter().enumerate() {
            for _ in 0..trx.wavelengths {
                slot += 1;
                sips.push(ServiceInterfacePoint {
                    id: format!("{}-TRX{slot}", node.id),
                    node: node.id.clone(),
                    kind: SipKind::TransponderPort,
                    transponder: Some(t),
                });
            }
        }
        if node.dc.is_some() {
            sips.push(ServiceInterfacePoint {
                id: format!("{}-DC", node.id),
                node: node.id.clone(),
                kind: SipKind::DcPort,
                transponder: None,
            });
        }
    }
    AbstractedDomain { sips }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo::demo_topology;
    use crate::topology::{load_topology, TransponderDocument, Vendor};

    fn doc_with(dc_nodes: &[usize], vendor: Option<Vendor>) -> Topology {
        let mut doc = demo_topology().document().clone();
        for (i, n) in doc.nodes.iter_mut().enumerate() {
            if !dc_nodes.contains(&i) {
                n.dc = None;
            }
            n.transponders = match vendor {
                Some(v) => {
                    vec![TransponderDocument { vendor: v, wavelengths: None, formats: None, openconfig_native: None }]
                }
                None => vec![],
            };
        }
        load_topology(&serde_json::to_string(&doc).unwrap()).unwrap()
    }

    #[test]
    fn one_sip_per_slot_and_dc() {
        let topo = doc_with(&[1, 2, 3], Some(Vendor::B));
        let d = abstract_domain(&topo);
        assert_eq!(d.sips().len(), 8);
        assert_eq!(d.sips().iter().filter(|s| s.kind == SipKind::DcPort).count(), 3);
    }

    #[test]
    fn nothing_to_expose() {
        let topo = doc_with(&[], None);
        assert!(abstract_domain(&topo).sips().is_empty());
    }

    #[test]
    fn extra_slot_adds_one_sip() {
        let base = doc_with(&[1, 2, 3], Some(Vendor::B));
        let mut doc = base.document().clone();
        doc.nodes[0].transponders.push(TransponderDocument {
            vendor: Vendor::B,
            wavelengths: None,
            formats: None,
            openconfig_native: None,
        });
        let more = load_topology(&serde_json::to_string(&doc).unwrap()).unwrap();
        assert_eq!(abstract_domain(&more).sips().len(), abstract_domain(&base).sips().len() + 1);
    }

    #[test]
    fn demo_sips() {
        let d = abstract_domain(&demo_topology());
        // 2 vendor B slots + 3 dual-slot vendor A devices + 5 DCs
        assert_eq!(d.sips().len(), 13);
        assert_eq!(d.attachment(&"AMEN2".into()).unwrap().id, "AMEN2-DC");
        assert!(d.sip("AMEN1-TRX2").is_some());
    }
}
