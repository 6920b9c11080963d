use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ghfilter::GHParams;
use crate::scenario::Channel;
use crate::types::JointName;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGains {
    pub g: f64,
    pub h: f64,
}

/// Filter gains for every channel.
///
/// Defaults: head orientation g=0.5, h=0.02; head, neck, shoulder and elbow
/// joints g=0.9, h=0.2; wrists g=0.5, h=0.02.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "BTreeMap<String, RawGains>", try_from = "BTreeMap<String, RawGains>")]
pub struct ChannelParams {
    head: GHParams,
    joints: [GHParams; 8],
}

impl Default for ChannelParams {
    fn default() -> Self {
        let rigid = GHParams::new(0.9, 0.2).expect("valid");
        let loose = GHParams::new(0.5, 0.02).expect("valid");
        let joints = JointName::ALL.map(|j| match j {
            JointName::LWrist | JointName::RWrist => loose,
            _ => rigid,
        });
        ChannelParams { head: loose, joints }
    }
}

impl ChannelParams {
    /// Same gains on every channel.
    pub fn uniform(params: GHParams) -> Self {
        ChannelParams { head: params, joints: [params; 8] }
    }

    pub fn get(&self, channel: Channel) -> GHParams {
        match channel {
            Channel::Head => self.head,
            Channel::Joint(j) => self.joints[j.index()],
        }
    }

    pub fn set(&mut self, channel: Channel, params: GHParams) {
        match channel {
            Channel::Head => self.head = params,
            Channel::Joint(j) => self.joints[j.index()] = params,
        }
    }
}

impl From<ChannelParams> for BTreeMap<String, RawGains> {
    fn from(p: ChannelParams) -> Self {
        Channel::ALL
            .into_iter()
            .map(|c| {
                let gh = p.get(c);
                (c.to_string(), RawGains { g: gh.g(), h: gh.h() })
            })
            .collect()
    }
}

impl TryFrom<BTreeMap<String, RawGains>> for ChannelParams {
    type Error = Error;

    fn try_from(map: BTreeMap<String, RawGains>) -> Result<Self> {
        let mut p = ChannelParams::default();
        for (name, raw) in map {
            let channel: Channel =
                name.parse().map_err(|_| Error::Config(format!("unknown filter channel `{name}`")))?;
            let gh = GHParams::new(raw.g, raw.h).map_err(|e| Error::Config(format!("channel `{name}`: {e}")))?;
            p.set(channel, gh);
        }
        Ok(p)
    }
}
