use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::OpticalError;

/// Occupied channel indices per broadcast segment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumState {
    channel_count: usize,
    occupancy: Vec<BTreeSet<usize>>,
}

impl SpectrumState {
    pub fn new(segment_count: usize, channel_count: usize) -> Self {
        SpectrumState { channel_count, occupancy: vec![BTreeSet::new(); segment_count] }
    }

    pub fn channel_count(&self) -> usize {
        self.channel_count
    }

    pub fn segment_count(&self) -> usize {
        self.occupancy.len()
    }

    pub fn occupied(&self, segment: usize) -> &BTreeSet<usize> {
        &self.occupancy[segment]
    }

    pub fn is_free(&self, segment: usize, channel: usize) -> bool {
        !self.occupancy[segment].contains(&channel)
    }

    /// Number of occupied (segment, channel) slots.
    pub fn occupied_slots(&self) -> usize {
        self.occupancy.iter().map(BTreeSet::len).sum()
    }

    pub fn utilization(&self) -> f64 {
        let total = self.segment_count() * self.channel_count;
        if total == 0 {
            0.0
        } else {
            self.occupied_slots() as f64 / total as f64
        }
    }

    /// Marks `channel` busy on every segment. Panics if any is already busy or
    /// the index is off the grid.
    pub fn occupy(&mut self, segments: &BTreeSet<usize>, channel: usize) {
        assert!(channel < self.channel_count, "channel {channel} off the grid");
        for &s in segments {
            assert!(self.occupancy[s].insert(channel), "channel {channel} already busy on segment {s}");
        }
    }

    pub fn release(&mut self, segments: &BTreeSet<usize>, channel: usize) {
        for &s in segments {
            self.occupancy[s].remove(&channel);
        }
    }

    /// Marks a channel busy regardless of prior state; for building test fixtures.
    pub fn set_occupied(&mut self, segment: usize, channel: usize) {
        assert!(channel < self.channel_count, "channel {channel} off the grid");
        self.occupancy[segment].insert(channel);
    }
}

/// First-fit: the lowest index free on every touched segment. Does not mutate.
pub fn assign_channel(state: &SpectrumState, segments_touched: &BTreeSet<usize>) -> Result<usize, OpticalError> {
    (0..state.channel_count)
        .find(|&c| segments_touched.iter().all(|&s| state.is_free(s, c)))
        .ok_or(OpticalError::OpticalBlocked)
}
