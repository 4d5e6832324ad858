use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{
    assign_channel, configure_blockers, evaluate_feasibility, route_path, BlockerAction, BlockerRule,
    FeasibilityReport, FormatCatalog, FormatName, ImpairmentParams, ModulationFormat, OpticalError, OpticalPath,
    SpectrumState,
};
use crate::topology::{NodeId, Topology};

/// Impairment constants and format table; loadable from a JSON config block.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OpticalConfig {
    pub impairments: ImpairmentParams<f64>,
    pub formats: FormatCatalog<f64>,
}

impl OpticalConfig {
    pub fn from_json(json: &str) -> Result<Self, OpticalError> {
        let cfg: OpticalConfig = serde_json::from_str(json).map_err(|e| OpticalError::InvalidConfig(e.to_string()))?;
        cfg.formats.validate().map_err(OpticalError::InvalidConfig)?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ChannelState {
    Active,
    Released,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediaChannel {
    pub id: String,
    pub path: OpticalPath,
    /// Broadcast segments the channel occupies.
    pub segments: BTreeSet<usize>,
    pub channel_index: usize,
    pub format: ModulationFormat<f64>,
    pub launch_power_dbm: f64,
    pub state: ChannelState,
    pub report: FeasibilityReport<f64>,
}

/// Mutable optical-layer state: spectrum occupancy, media channels and the
/// blocker rules installed for them. Single owner; every mutation either
/// completes or leaves the state untouched.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OpticalNetwork {
    topology: Topology,
    config: OpticalConfig,
    spectrum: SpectrumState,
    channels: BTreeMap<String, MediaChannel>,
    blocker_rules: BTreeMap<String, Vec<BlockerRule>>,
    next_channel: u64,
}

impl OpticalNetwork {
    pub fn new(topology: Topology, config: OpticalConfig) -> Result<Self, OpticalError> {
        config.formats.validate().map_err(OpticalError::InvalidConfig)?;
        let spectrum = SpectrumState::new(topology.segment_count(), topology.grid().channel_count);
        Ok(OpticalNetwork {
            topology,
            config,
            spectrum,
            channels: BTreeMap::new(),
            blocker_rules: BTreeMap::new(),
            next_channel: 1,
        })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn config(&self) -> &OpticalConfig {
        &self.config
    }

    pub fn spectrum(&self) -> &SpectrumState {
        &self.spectrum
    }

    pub fn channels(&self) -> &BTreeMap<String, MediaChannel> {
        &self.channels
    }

    pub fn channel(&self, id: &str) -> Option<&MediaChannel> {
        self.channels.get(id)
    }

    pub fn active_channels(&self) -> impl Iterator<Item = &MediaChannel> {
        self.channels.values().filter(|c| c.state == ChannelState::Active)
    }

    /// Blocker rules per active channel id.
    pub fn blocker_rules(&self) -> &BTreeMap<String, Vec<BlockerRule>> {
        &self.blocker_rules
    }

    /// Effective per-node blocker settings. When channels disagree on a node and
    /// index, PASS wins: the passing channel needs it to reach its receiver.
    pub fn blocker_settings(&self) -> BTreeMap<NodeId, BTreeMap<usize, BlockerAction>> {
        let mut out: BTreeMap<NodeId, BTreeMap<usize, BlockerAction>> = BTreeMap::new();
        for rule in self.blocker_rules.values().flatten() {
            let slot = out.entry(rule.node.clone()).or_default().entry(rule.channel_index).or_insert(rule.action);
            if rule.action == BlockerAction::Pass {
                *slot = BlockerAction::Pass;
            }
        }
        out
    }

    pub fn format(&self, name: FormatName) -> &ModulationFormat<f64> {
        self.config.formats.get(name)
    }

    pub fn route(&self, src: &NodeId, dst: &NodeId) -> Result<OpticalPath, OpticalError> {
        route_path(&self.topology, src, dst)
    }

    pub fn evaluate(&self, path: &OpticalPath, format: FormatName, launch_power_dbm: f64) -> FeasibilityReport<f64> {
        evaluate_feasibility(&self.topology, path, self.format(format), launch_power_dbm, &self.config.impairments)
    }

    fn check_support(&self, node: &NodeId, format: FormatName) -> Result<(), OpticalError> {
        let n = self.topology.node(node).ok_or_else(|| OpticalError::UnknownNode(node.clone()))?;
        if n.supports(format) {
            Ok(())
        } else {
            Err(OpticalError::UnsupportedFormat { node: node.clone(), format })
        }
    }

    /// Formats supported at both ends and feasible on the route, highest rate first.
    pub fn feasible_formats(
        &self,
        src: &NodeId,
        dst: &NodeId,
        launch_power_dbm: f64,
    ) -> Result<Vec<FormatName>, OpticalError> {
        let path = self.route(src, dst)?;
        Ok(self
            .config
            .formats
            .iter()
            .rev()
            .map(|f| f.name)
            .filter(|&f| self.check_support(src, f).is_ok() && self.check_support(dst, f).is_ok())
            .filter(|&f| self.evaluate(&path, f, launch_power_dbm).feasible)
            .collect())
    }

    pub fn provision_media_channel(
        &mut self,
        src: &NodeId,
        dst: &NodeId,
        format: FormatName,
        launch_power_dbm: f64,
    ) -> Result<MediaChannel, OpticalError> {
        for n in [src, dst] {
            if self.topology.node(n).is_none() {
                return Err(OpticalError::UnknownNode(n.clone()));
            }
        }
        if src == dst {
            return Err(OpticalError::SameEndpoint(src.clone()));
        }
        self.check_support(src, format)?;
        self.check_support(dst, format)?;
        let path = self.route(src, dst)?;
        let report = self.evaluate(&path, format, launch_power_dbm);
        if !report.feasible {
            return Err(OpticalError::InfeasibleOsnr(Box::new(report)));
        }
        let segments = path.segments(&self.topology);
        let channel_index = assign_channel(&self.spectrum, &segments)?;
        let rules = configure_blockers(&self.topology, &path, channel_index);

        let id = format!("mc-{}", self.next_channel);
        self.next_channel += 1;
        self.spectrum.occupy(&segments, channel_index);
        self.blocker_rules.insert(id.clone(), rules);
        let channel = MediaChannel {
            id: id.clone(),
            path,
            segments,
            channel_index,
            format: *self.format(format),
            launch_power_dbm,
            state: ChannelState::Active,
            report,
        };
        self.channels.insert(id, channel.clone());
        Ok(channel)
    }

    pub fn release_media_channel(&mut self, id: &str) -> Result<MediaChannel, OpticalError> {
        let channel = self.channels.get_mut(id).ok_or_else(|| OpticalError::UnknownChannel(id.to_string()))?;
        if channel.state == ChannelState::Released {
            return Err(OpticalError::AlreadyReleased(id.to_string()));
        }
        channel.state = ChannelState::Released;
        self.spectrum.release(&channel.segments, channel.channel_index);
        self.blocker_rules.remove(id);
        Ok(channel.clone())
    }

    /// Drops the record of a released channel. Returns whether one was removed.
    pub fn forget_channel(&mut self, id: &str) -> bool {
        match self.channels.get(id) {
            Some(c) if c.state == ChannelState::Released => self.channels.remove(id).is_some(),
            _ => false,
        }
    }
}
