use std::fmt;

use serde::{Deserialize, Serialize};

use crate::num::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FormatName {
    #[serde(rename = "DP-QPSK")]
    DpQpsk,
    #[serde(rename = "DP-16QAM")]
    Dp16Qam,
    #[serde(rename = "DP-64QAM")]
    Dp64Qam,
}

impl FormatName {
    /// In increasing order of spectral efficiency.
    pub const ALL: [FormatName; 3] = [FormatName::DpQpsk, FormatName::Dp16Qam, FormatName::Dp64Qam];

    pub fn as_str(self) -> &'static str {
        match self {
            FormatName::DpQpsk => "DP-QPSK",
            FormatName::Dp16Qam => "DP-16QAM",
            FormatName::Dp64Qam => "DP-64QAM",
        }
    }
}

impl fmt::Display for FormatName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FormatName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FormatName::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown modulation format {s}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationFormat<R> {
    pub name: FormatName,
    pub baud_gbaud: R,
    pub net_rate_gbps: R,
    /// Required OSNR in dB at 0.1 nm reference bandwidth.
    pub required_osnr_db: R,
}

/// Rates and OSNR thresholds for the three coherent formats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FormatCatalog<R> {
    formats: Vec<ModulationFormat<R>>,
}

impl<R: Real> Default for FormatCatalog<R> {
    fn default() -> Self {
        let f = |name, rate, osnr| ModulationFormat {
            name,
            baud_gbaud: R::lit(30.0),
            net_rate_gbps: R::lit(rate),
            required_osnr_db: R::lit(osnr),
        };
        FormatCatalog {
            formats: vec![
                f(FormatName::DpQpsk, 100.0, 14.0),
                f(FormatName::Dp16Qam, 200.0, 21.0),
                f(FormatName::Dp64Qam, 300.0, 27.0),
            ],
        }
    }
}

impl<R: Real> FormatCatalog<R> {
    /// Builds a catalog; every format must appear once, with net rate and
    /// required OSNR strictly increasing from QPSK to 64QAM.
    pub fn new(mut formats: Vec<ModulationFormat<R>>) -> Result<Self, String> {
        formats.sort_by_key(|f| f.name);
        let names: Vec<FormatName> = formats.iter().map(|f| f.name).collect();
        if names != FormatName::ALL {
            return Err(format!("catalog must list each format once, got {names:?}"));
        }
        for w in formats.windows(2) {
            let less = |a: R, b: R| a.partial_cmp(&b) == Some(std::cmp::Ordering::Less);
            if !less(w[0].net_rate_gbps, w[1].net_rate_gbps) || !less(w[0].required_osnr_db, w[1].required_osnr_db) {
                return Err(format!("{} must have lower rate and OSNR than {}", w[0].name, w[1].name));
            }
        }
        Ok(FormatCatalog { formats })
    }

    pub fn get(&self, name: FormatName) -> &ModulationFormat<R> {
        self.formats.iter().find(|f| f.name == name).expect("catalog holds every format")
    }

    /// QPSK first.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &ModulationFormat<R>> {
        self.formats.iter()
    }

    pub fn validate(&self) -> Result<(), String> {
        Self::new(self.formats.clone()).map(|_| ())
    }
}
