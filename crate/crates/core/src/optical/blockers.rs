use serde::{Deserialize, Serialize};

use super::OpticalPath;
use crate::topology::{NodeId, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BlockerAction {
    Pass,
    Block,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockerRule {
    pub node: NodeId,
    pub channel_index: usize,
    pub action: BlockerAction,
}

/// Blocker settings confining a channel to its path: PASS at every
/// blocker-equipped interior node, BLOCK at the first blocker-equipped node
/// beyond each endpoint. Rules come back in line order.
pub fn configure_blockers(topo: &Topology, path: &OpticalPath, channel_index: usize) -> Vec<BlockerRule> {
    let a = topo.position(path.src()).expect("path endpoints belong to the topology");
    let b = topo.position(path.dst()).expect("path endpoints belong to the topology");
    let (lo, hi) = (a.min(b), a.max(b));
    let nodes = topo.nodes();
    let rule = |pos: usize, action| BlockerRule { node: nodes[pos].id.clone(), channel_index, action };

    let mut rules = Vec::new();
    if let Some(p) = (0..lo).rev().find(|&p| nodes[p].has_blocker) {
        rules.push(rule(p, BlockerAction::Block));
    }
    rules.extend((lo + 1..hi).filter(|&p| nodes[p].has_blocker).map(|p| rule(p, BlockerAction::Pass)));
    if let Some(p) = (hi + 1..nodes.len()).find(|&p| nodes[p].has_blocker) {
        rules.push(rule(p, BlockerAction::Block));
    }
    rules
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo::demo_topology;
    use crate::optical::route_path;
    use crate::topology::load_topology;

    fn r(node: &str, action: BlockerAction) -> BlockerRule {
        BlockerRule { node: node.into(), channel_index: 7, action }
    }

    #[test]
    fn interior_pass_and_outer_block() {
        let topo = demo_topology();
        let path = route_path(&topo, &"AMEN1".into(), &"AMEN3".into()).unwrap();
        assert_eq!(
            configure_blockers(&topo, &path, 7),
            vec![r("MCEN1", BlockerAction::Block), r("AMEN2", BlockerAction::Pass), r("MCEN2", BlockerAction::Block)]
        );
    }

    #[test]
    fn line_end_path() {
        let topo = demo_topology();
        let path = route_path(&topo, &"MCEN1".into(), &"AMEN1".into()).unwrap();
        assert_eq!(configure_blockers(&topo, &path, 7), vec![r("AMEN2", BlockerAction::Block)]);
    }

    #[test]
    fn blocker_free_topology_needs_no_rules() {
        let mut doc = demo_topology().document().clone();
        for n in &mut doc.nodes {
            n.has_blocker = Some(false);
        }
        let topo = load_topology(&serde_json::to_string(&doc).unwrap()).unwrap();
        let path = route_path(&topo, &"AMEN1".into(), &"AMEN3".into()).unwrap();
        assert!(configure_blockers(&topo, &path, 0).is_empty());
    }

    #[test]
    fn skips_nodes_without_blockers() {
        let mut doc = demo_topology().document().clone();
        doc.nodes[3].has_blocker = Some(false); // AMEN3
        let topo = load_topology(&serde_json::to_string(&doc).unwrap()).unwrap();
        let path = route_path(&topo, &"AMEN1".into(), &"AMEN2".into()).unwrap();
        assert_eq!(
            configure_blockers(&topo, &path, 7),
            vec![r("MCEN1", BlockerAction::Block), r("MCEN2", BlockerAction::Block)]
        );
    }
}
