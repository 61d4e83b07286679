//! Parameter schema for every subcommand. The same table drives the clap
//! flags, the strict config-file check and typed value access.

use std::collections::BTreeMap;

use super::CliError;
use crate::numerics::SearchBracket;
use crate::tradeoffs::{Spacing, SweepRange};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Real,
    Count,
    /// `min:max:count` with optional `:log`.
    Range,
    /// `lo:hi`.
    Bracket,
    /// Comma-separated reals.
    List,
    Text,
    Flag,
}

#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub key: &'static str,
    pub kind: ParamKind,
    pub default: Option<&'static str>,
    pub required: bool,
    pub help: &'static str,
}

impl ParamSpec {
    pub fn flag_name(&self) -> String {
        self.key.replace('_', "-")
    }
}

const fn required(key: &'static str, kind: ParamKind, help: &'static str) -> ParamSpec {
    ParamSpec {
        key,
        kind,
        default: None,
        required: true,
        help,
    }
}

const fn defaulted(
    key: &'static str,
    kind: ParamKind,
    default: &'static str,
    help: &'static str,
) -> ParamSpec {
    ParamSpec {
        key,
        kind,
        default: Some(default),
        required: false,
        help,
    }
}

const fn optional(key: &'static str, kind: ParamKind, help: &'static str) -> ParamSpec {
    ParamSpec {
        key,
        kind,
        default: None,
        required: false,
        help,
    }
}

const fn flag(key: &'static str, help: &'static str) -> ParamSpec {
    ParamSpec {
        key,
        kind: ParamKind::Flag,
        default: Some("false"),
        required: false,
        help,
    }
}

use ParamKind::*;

const N0: ParamSpec = defaulted("n0", Real, "1", "noise power spectral density N0 (W/Hz)");
const BANDWIDTH: ParamSpec = defaulted("bandwidth", Real, "1", "signal bandwidth W (Hz)");
const INTERFERENCE: ParamSpec = defaulted(
    "interference",
    Real,
    "0",
    "interference power at the receiver (W)",
);
const IDEAL: ParamSpec = flag(
    "ideal",
    "use the ideal Shannon relation (no amplifier loss, circuit or static power)",
);
const DRAIN: ParamSpec = defaulted(
    "drain_efficiency",
    Real,
    "1",
    "power-amplifier drain efficiency in (0, 1]",
);
const CIRCUIT: ParamSpec = defaulted(
    "circuit_psd",
    Real,
    "0",
    "circuit power per Hz of occupied bandwidth (W/Hz)",
);
const STATIC: ParamSpec = defaulted("static_power", Real, "0", "static power (W)");
const RATE: ParamSpec = defaulted("rate", Real, "1", "transmission rate R (bit/s)");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandId {
    CurveSeEe,
    CurveBwPw,
    CurveDlPw,
    CurveDeEe,
    CurveEeContour,
    PeakSeEe,
    PeakBwPw,
    PeakDlPw,
    Plan,
    Schedule,
}

#[derive(Debug)]
pub struct CommandSpec {
    pub id: CommandId,
    pub command: &'static str,
    pub kind: Option<&'static str>,
    pub about: &'static str,
    pub params: &'static [ParamSpec],
}

impl CommandSpec {
    pub fn label(&self) -> String {
        match self.kind {
            Some(k) => format!("{} {}", self.command, k),
            None => self.command.to_string(),
        }
    }

    pub fn param(&self, key: &str) -> Option<&ParamSpec> {
        self.params.iter().find(|p| p.key == key)
    }
}

pub const COMMANDS: &[CommandSpec] = &[
    CommandSpec {
        id: CommandId::CurveSeEe,
        command: "curve",
        kind: Some("se-ee"),
        about: "energy efficiency versus spectral efficiency",
        params: &[
            required(
                "se",
                Range,
                "spectral-efficiency samples min:max:count[:log] (bit/s/Hz)",
            ),
            N0,
            BANDWIDTH,
            INTERFERENCE,
            IDEAL,
            DRAIN,
            CIRCUIT,
            STATIC,
        ],
    },
    CommandSpec {
        id: CommandId::CurveBwPw,
        command: "curve",
        kind: Some("bw-pw"),
        about: "power versus bandwidth at a fixed rate",
        params: &[
            required("bw", Range, "bandwidth samples min:max:count[:log] (Hz)"),
            RATE,
            N0,
            IDEAL,
            DRAIN,
            CIRCUIT,
            STATIC,
        ],
    },
    CommandSpec {
        id: CommandId::CurveDlPw,
        command: "curve",
        kind: Some("dl-pw"),
        about: "energy per bit versus bit duration",
        params: &[
            required("tb", Range, "bit-duration samples min:max:count[:log] (s)"),
            BANDWIDTH,
            N0,
            IDEAL,
            DRAIN,
            CIRCUIT,
            STATIC,
        ],
    },
    CommandSpec {
        id: CommandId::CurveDeEe,
        command: "curve",
        kind: Some("de-ee"),
        about: "deployment efficiency versus energy efficiency over cell radius",
        params: &[
            required(
                "scenario",
                Text,
                "scenario name (looked up in GR_CONFIG_DIR or built in) or path to a scenario file",
            ),
            defaulted("points", Count, "200", "number of log-spaced radii"),
            flag(
                "continuous_sites",
                "use a fractional site count instead of the ceiling",
            ),
        ],
    },
    CommandSpec {
        id: CommandId::CurveEeContour,
        command: "curve",
        kind: Some("ee-contour"),
        about: "total power versus bandwidth at a fixed energy efficiency",
        params: &[
            required("target_ee", Real, "target energy efficiency (bit/J)"),
            required("bw", Range, "bandwidth samples min:max:count[:log] (Hz)"),
            N0,
            DRAIN,
            CIRCUIT,
            STATIC,
        ],
    },
    CommandSpec {
        id: CommandId::PeakSeEe,
        command: "peak",
        kind: Some("se-ee"),
        about: "spectral efficiency with the highest energy efficiency",
        params: &[
            defaulted(
                "bracket",
                Bracket,
                "1e-6:64",
                "search interval lo:hi (bit/s/Hz)",
            ),
            N0,
            BANDWIDTH,
            INTERFERENCE,
            DRAIN,
            CIRCUIT,
            STATIC,
        ],
    },
    CommandSpec {
        id: CommandId::PeakBwPw,
        command: "peak",
        kind: Some("bw-pw"),
        about: "bandwidth with the lowest total power at a fixed rate",
        params: &[
            optional(
                "bracket",
                Bracket,
                "search interval lo:hi (Hz) [default: rate/64:rate*1e6]",
            ),
            RATE,
            N0,
            DRAIN,
            CIRCUIT,
            STATIC,
        ],
    },
    CommandSpec {
        id: CommandId::PeakDlPw,
        command: "peak",
        kind: Some("dl-pw"),
        about: "bit duration with the lowest energy per bit",
        params: &[
            optional(
                "bracket",
                Bracket,
                "search interval lo:hi (s) [default: 1/(64W):1e6/W]",
            ),
            BANDWIDTH,
            N0,
            DRAIN,
            CIRCUIT,
            STATIC,
        ],
    },
    CommandSpec {
        id: CommandId::Plan,
        command: "plan",
        kind: None,
        about: "most energy-efficient cell radius for a throughput target and annual budget",
        params: &[
            required(
                "scenario",
                Text,
                "scenario name (looked up in GR_CONFIG_DIR or built in) or path to a scenario file",
            ),
            required("throughput", Real, "network throughput target (bit/s)"),
            required("budget", Real, "annual budget (currency/yr)"),
            defaulted(
                "points",
                Count,
                "1000",
                "number of log-spaced radii scanned before refinement",
            ),
            flag(
                "continuous_sites",
                "use a fractional site count instead of the ceiling",
            ),
        ],
    },
    CommandSpec {
        id: CommandId::Schedule,
        command: "schedule",
        kind: None,
        about: "energy-minimal FIFO schedule of a packet batch under a deadline",
        params: &[
            required("bits", List, "packet sizes, comma-separated (bit)"),
            optional(
                "arrivals",
                List,
                "arrival times, comma-separated (s) [default: all 0]",
            ),
            required("deadline", Real, "common deadline (s)"),
            BANDWIDTH,
            N0,
            INTERFERENCE,
            DRAIN,
            CIRCUIT,
            STATIC,
            optional("max_power", Real, "cap on transmit power (W)"),
            flag(
                "always_on_static",
                "charge static power over the whole window, not only while transmitting",
            ),
        ],
    },
];

pub fn find(command: &str, kind: Option<&str>) -> Option<&'static CommandSpec> {
    COMMANDS
        .iter()
        .find(|c| c.command == command && c.kind == kind)
}

/// Resolved parameter values (defaults applied), with typed accessors.
#[derive(Debug, Clone)]
pub struct Params {
    spec: &'static CommandSpec,
    values: BTreeMap<String, String>,
}

impl Params {
    /// Applies defaults, rejects unknown keys and reports missing ones.
    pub fn resolve(
        spec: &'static CommandSpec,
        given: BTreeMap<String, String>,
    ) -> Result<Self, CliError> {
        if let Some(k) = given.keys().find(|k| spec.param(k).is_none()) {
            return Err(CliError::Schema(format!(
                "unknown parameter '{k}' for '{}'",
                spec.label()
            )));
        }
        let mut values = BTreeMap::new();
        for p in spec.params {
            match given.get(p.key).map(String::as_str).or(p.default) {
                Some(v) => {
                    values.insert(p.key.to_string(), v.to_string());
                }
                None if p.required => {
                    return Err(CliError::Schema(format!(
                        "missing required parameter '{}' for '{}'",
                        p.key,
                        spec.label()
                    )))
                }
                None => {}
            }
        }
        let params = Self { spec, values };
        params.check_types()?;
        Ok(params)
    }

    fn check_types(&self) -> Result<(), CliError> {
        for p in self.spec.params {
            if !self.values.contains_key(p.key) {
                continue;
            }
            match p.kind {
                Real => self.real(p.key).map(drop)?,
                Count => self.count(p.key).map(drop)?,
                Range => self.range(p.key).map(drop)?,
                Bracket => self.raw_bracket(p.key).map(drop)?,
                List => self.list(p.key).map(drop)?,
                Flag => self.flag(p.key).map(drop)?,
                Text => {}
            }
        }
        Ok(())
    }

    pub fn values(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    pub fn spec(&self) -> &'static CommandSpec {
        self.spec
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn need(&self, key: &str) -> Result<&str, CliError> {
        self.get(key)
            .ok_or_else(|| CliError::Schema(format!("missing parameter '{key}'")))
    }

    pub fn real(&self, key: &str) -> Result<f64, CliError> {
        parse_real(key, self.need(key)?)
    }

    pub fn opt_real(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.get(key).map(|v| parse_real(key, v)).transpose()
    }

    pub fn count(&self, key: &str) -> Result<usize, CliError> {
        let v = self.need(key)?;
        v.trim().parse().map_err(|_| {
            CliError::Schema(format!("parameter '{key}': expected a count, got '{v}'"))
        })
    }

    pub fn flag(&self, key: &str) -> Result<bool, CliError> {
        match self.get(key) {
            None => Ok(false),
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(v) => Err(CliError::Schema(format!(
                "parameter '{key}': expected true or false, got '{v}'"
            ))),
        }
    }

    pub fn text(&self, key: &str) -> Result<&str, CliError> {
        self.need(key)
    }

    pub fn list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        self.need(key)?
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| parse_real(key, s))
            .collect()
    }

    pub fn opt_list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        match self.get(key) {
            Some(_) => self.list(key).map(Some),
            None => Ok(None),
        }
    }

    pub fn range(&self, key: &str) -> Result<SweepRange, CliError> {
        let v = self.need(key)?;
        let parts: Vec<&str> = v.split(':').map(str::trim).collect();
        let malformed = || {
            CliError::Schema(format!(
                "parameter '{key}': expected min:max:count[:log], got '{v}'"
            ))
        };
        let spacing = match parts.len() {
            3 => Spacing::Linear,
            4 if parts[3] == "log" => Spacing::Log,
            4 if parts[3] == "lin" => Spacing::Linear,
            _ => return Err(malformed()),
        };
        let min = parse_real(key, parts[0])?;
        let max = parse_real(key, parts[1])?;
        let count: usize = parts[2].parse().map_err(|_| malformed())?;
        Ok(SweepRange::new(min, max, count, spacing)?)
    }

    fn raw_bracket(&self, key: &str) -> Result<(f64, f64), CliError> {
        let v = self.need(key)?;
        match v.split(':').map(str::trim).collect::<Vec<_>>()[..] {
            [lo, hi] => Ok((parse_real(key, lo)?, parse_real(key, hi)?)),
            _ => Err(CliError::Schema(format!(
                "parameter '{key}': expected lo:hi, got '{v}'"
            ))),
        }
    }

    pub fn opt_bracket(&self, key: &str) -> Result<Option<SearchBracket>, CliError> {
        if self.get(key).is_none() {
            return Ok(None);
        }
        let (lo, hi) = self.raw_bracket(key)?;
        Ok(Some(SearchBracket::new(lo, hi)?))
    }
}

fn parse_real(key: &str, v: &str) -> Result<f64, CliError> {
    match v.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(CliError::Schema(format!(
            "parameter '{key}': expected a number, got '{v}'"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn given(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn every_command_is_unique() {
        for (i, a) in COMMANDS.iter().enumerate() {
            for b in &COMMANDS[i + 1..] {
                assert!(a.command != b.command || a.kind != b.kind);
            }
        }
    }

    #[test]
    fn defaults_and_unknown_keys() {
        let spec = find("curve", Some("se-ee")).unwrap();
        let p = Params::resolve(spec, given(&[("se", "0.01:10:100")])).unwrap();
        assert_eq!(p.get("n0"), Some("1"));
        assert_eq!(p.get("ideal"), Some("false"));
        assert!(matches!(
            Params::resolve(spec, given(&[("se", "0.01:10:100"), ("bogus", "1")])),
            Err(CliError::Schema(_))
        ));
        assert!(matches!(
            Params::resolve(spec, given(&[])),
            Err(CliError::Schema(_))
        ));
    }

    #[test]
    fn range_syntax() {
        let spec = find("curve", Some("se-ee")).unwrap();
        let p = Params::resolve(spec, given(&[("se", "0.1:10:5:log")])).unwrap();
        let r = p.range("se").unwrap();
        assert_eq!((r.count(), r.spacing()), (5, Spacing::Log));
        assert!(Params::resolve(spec, given(&[("se", "0.1:10")])).is_err());
        assert!(Params::resolve(spec, given(&[("se", "0.1:10:5:sqrt")])).is_err());
        assert!(Params::resolve(spec, given(&[("se", "a:10:5")])).is_err());
    }
}
