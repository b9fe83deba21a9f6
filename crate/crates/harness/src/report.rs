//! Versioned JSON report. Every collection inside is ordered (vectors in
//! group or stream order, maps sorted by key), so identical inputs give
//! byte-identical output.

use qpsi_core::channel::ChannelReport;
use qpsi_core::engine::{GroupReport, OutcomeCounts, ResourceCounters};
use qpsi_core::keygen::KeygenReport;
use serde::Serialize;
use serde_json::Value;

use crate::oracle::OracleCheck;
use crate::resources::EfficiencyReport;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: Value,
    pub result: Value,
    pub counts: Option<OutcomeCounts>,
    /// One entry per group.
    pub keygen_report: Option<Vec<KeygenReport>>,
    pub channel_reports: Option<Vec<GroupChannels>>,
    pub resources: Option<ResourceCounters>,
    pub efficiency: Option<EfficiencyReport>,
    pub oracle: Option<OracleCheck>,
    /// Only filled with `--timing`, since it breaks byte-for-byte reproducibility.
    pub timing_ms: Option<u64>,
}

impl Report {
    pub fn new(config: Value, result: Value) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            config,
            result,
            counts: None,
            keygen_report: None,
            channel_reports: None,
            resources: None,
            efficiency: None,
            oracle: None,
            timing_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Decoy checks on the four quantum links of one group.
#[derive(Debug, Clone, Serialize)]
pub struct GroupChannels {
    pub group: usize,
    pub members: [usize; 2],
    pub tp_to_a: Option<ChannelReport>,
    pub tp_to_b: Option<ChannelReport>,
    pub a_to_tp: ChannelReport,
    pub b_to_tp: ChannelReport,
}

impl GroupChannels {
    pub fn from_group(index: usize, g: &GroupReport) -> Self {
        GroupChannels {
            group: index,
            members: [g.members.0, g.members.1],
            tp_to_a: g.keygen.alice_channel,
            tp_to_b: g.keygen.bob_channel,
            a_to_tp: g.channels[0],
            b_to_tp: g.channels[1],
        }
    }
}
