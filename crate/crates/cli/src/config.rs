//! Experiment configuration: the file format behind `--config`, plus the
//! flag-level parsers for families and dispersions.
//!
//! Configurations round-trip losslessly through JSON; the content hash in
//! the run manifest is computed over the canonical serialisation.

use causalflow::packets::{Dispersion, StateFamily};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: FamilySpec,
    pub dispersion: DispersionSpec,
    /// Explicit grid; omitted = automatic selection.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grid: Option<GridConfig>,
    /// Time scan for sweeps: [t_max, step].
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub time_scan: Option<(f64, f64)>,
    /// Half-width scan: [min, max, points per decade].
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub half_width_scan: Option<(f64, f64, usize)>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x0: f64,
    pub dx: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    Gaussian { width_sq: f64, #[serde(default)] boost: f64 },
    Sech { decay: f64, #[serde(default)] boost: f64 },
    SincSech { decay: f64, #[serde(default)] boost: f64 },
    SincPower { order: u32, momentum_cut: f64, #[serde(default)] boost: f64 },
    Box { half_width: f64, #[serde(default)] boost: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DispersionSpec {
    Relativistic { mass: f64 },
    Massless,
    Nonrelativistic { mass: f64 },
}

impl FamilySpec {
    pub fn build(&self) -> Result<StateFamily, String> {
        let family = match *self {
            FamilySpec::Gaussian { width_sq, boost } => {
                StateFamily::gaussian(width_sq).map(|f| f.with_boost(boost))
            }
            FamilySpec::Sech { decay, boost } => {
                StateFamily::sech(decay).map(|f| f.with_boost(boost))
            }
            FamilySpec::SincSech { decay, boost } => {
                StateFamily::sinc_sech(decay).map(|f| f.with_boost(boost))
            }
            FamilySpec::SincPower {
                order,
                momentum_cut,
                boost,
            } => StateFamily::sinc_power(order, momentum_cut).map(|f| f.with_boost(boost)),
            FamilySpec::Box { half_width, boost } => {
                StateFamily::box_state(half_width).map(|f| f.with_boost(boost))
            }
        };
        family.map_err(|e| e.to_string())
    }

    /// Parses flag syntax: `gaussian:1.0`, `sech:1.5`, `sinc-sech:0.5`,
    /// `sinc-power:2:1.0`, `box:1.0`, with an optional `@boost` suffix.
    pub fn parse(text: &str) -> Result<Self, String> {
        let (body, boost) = match text.split_once('@') {
            Some((b, p)) => (
                b,
                p.parse::<f64>()
                    .map_err(|_| format!("bad boost in family spec '{text}'"))?,
            ),
            None => (text, 0.0),
        };
        let parts: Vec<&str> = body.split(':').collect();
        let num = |s: &str| -> Result<f64, String> {
            s.parse::<f64>()
                .map_err(|_| format!("bad number '{s}' in family spec '{text}'"))
        };
        match parts.as_slice() {
            ["gaussian", d] => Ok(FamilySpec::Gaussian {
                width_sq: num(d)?,
                boost,
            }),
            ["sech", a] => Ok(FamilySpec::Sech {
                decay: num(a)?,
                boost,
            }),
            ["sinc-sech", a] => Ok(FamilySpec::SincSech {
                decay: num(a)?,
                boost,
            }),
            ["sinc-power", n, p] => Ok(FamilySpec::SincPower {
                order: n
                    .parse()
                    .map_err(|_| format!("bad order '{n}' in family spec '{text}'"))?,
                momentum_cut: num(p)?,
                boost,
            }),
            ["box", d] => Ok(FamilySpec::Box {
                half_width: num(d)?,
                boost,
            }),
            _ => Err(format!(
                "unknown family '{text}' (expected gaussian:<d>, sech:<a>, sinc-sech:<a>, sinc-power:<n>:<p>, box:<d>)"
            )),
        }
    }
}

impl DispersionSpec {
    pub fn build(&self) -> Dispersion {
        match *self {
            DispersionSpec::Relativistic { mass } => Dispersion::Relativistic { mass },
            DispersionSpec::Massless => Dispersion::Massless,
            DispersionSpec::Nonrelativistic { mass } => Dispersion::NonRelativistic { mass },
        }
    }

    /// Parses `relativistic:1.0`, `massless`, `nonrelativistic:1.0`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let parts: Vec<&str> = text.split(':').collect();
        match parts.as_slice() {
            ["massless"] => Ok(DispersionSpec::Massless),
            ["relativistic", m] => Ok(DispersionSpec::Relativistic {
                mass: m
                    .parse()
                    .map_err(|_| format!("bad mass in dispersion '{text}'"))?,
            }),
            ["nonrelativistic", m] => Ok(DispersionSpec::Nonrelativistic {
                mass: m
                    .parse()
                    .map_err(|_| format!("bad mass in dispersion '{text}'"))?,
            }),
            _ => Err(format!(
                "unknown dispersion '{text}' (expected relativistic:<m>, massless, nonrelativistic:<m>)"
            )),
        }
    }

}

/// FNV-1a hash of the canonical JSON serialisation.
pub fn config_hash(config: &ExperimentConfig) -> u64 {
    let text = serde_json::to_string(config).expect("config serialises");
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in text.bytes() {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x1_0000_0000_01b3);
    }
    hash
}
