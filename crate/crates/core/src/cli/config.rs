//! Run files and scenario files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::CliError;
use crate::deployment::{CellGeometry, CostModel, DeploymentScenario, SiteCounting};
use crate::linkmodel::{LinkParams, PathLossModel, PowerModel};

/// Environment variable naming the directory searched for scenario names.
pub const CONFIG_DIR_ENV: &str = "GR_CONFIG_DIR";

const JOULES_PER_KWH: f64 = 3.6e6;

const BUILTIN_SCENARIOS: &[(&str, &str)] = &[
    (
        "dense_urban",
        include_str!("../../configs/dense_urban.toml"),
    ),
    ("suburb", include_str!("../../configs/suburb.toml")),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Report,
}

/// A complete invocation stored on disk.
///
/// ```toml
/// command = "curve"
/// kind = "se-ee"
/// output = "se_ee.csv"
/// format = "csv"
///
/// [parameters]
/// ideal = true
/// se = "0.01:10:100"
/// ```
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Required by `run`; optional for `--config`, where it must match.
    pub command: Option<String>,
    pub kind: Option<String>,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub gnuplot: bool,
    #[serde(default)]
    pub parameters: toml::Table,
    /// Directory of the file, used to resolve relative paths.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, CliError> {
        let mut cfg: RunConfig = toml::from_str(text)
            .map_err(|e| CliError::Schema(format!("run file: {}", one_line(&e.to_string()))))?;
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = read(path)?;
        Self::parse(&text, path.parent().unwrap_or(Path::new("")))
    }

    /// Parameters as strings, in the same syntax the flags accept.
    pub fn parameter_strings(&self) -> Result<BTreeMap<String, String>, CliError> {
        self.parameters
            .iter()
            .map(|(k, v)| Ok((k.clone(), value_string(k, v)?)))
            .collect()
    }

    pub fn output_path(&self) -> Option<PathBuf> {
        self.output.as_ref().map(|p| self.base_dir.join(p))
    }
}

fn value_string(key: &str, v: &toml::Value) -> Result<String, CliError> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(f.to_string()),
        toml::Value::Boolean(b) => Ok(b.to_string()),
        toml::Value::Array(items) => items
            .iter()
            .map(|item| match item {
                toml::Value::Integer(_) | toml::Value::Float(_) => value_string(key, item),
                _ => Err(CliError::Schema(format!(
                    "parameter '{key}': arrays must hold numbers"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(|parts| parts.join(",")),
        _ => Err(CliError::Schema(format!(
            "parameter '{key}': unsupported value type"
        ))),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    area_m2: f64,
    radius_min_m: f64,
    radius_max_m: f64,
    edge_snr_target: f64,
    cell_geometry: GeometryName,
    traffic_density_bps_per_m2: Option<f64>,
    path_loss: PathLossSection,
    link: LinkSection,
    power: PowerSection,
    cost: CostSection,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum GeometryName {
    Hexagon,
    Circle,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathLossSection {
    exponent: f64,
    reference_loss_db: f64,
    reference_distance_m: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkSection {
    bandwidth_hz: f64,
    noise_psd_w_per_hz: f64,
    #[serde(default)]
    interference_w: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PowerSection {
    drain_efficiency: f64,
    circuit_psd_w_per_hz: f64,
    static_power_w: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CostSection {
    capex_per_site: f64,
    depreciation_years: f64,
    opex_per_site_year: f64,
    energy_price_per_kwh: f64,
}

/// A deployment scenario together with its cost model.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub deployment: DeploymentScenario,
    pub cost: CostModel,
}

impl Scenario {
    pub fn parse(name: &str, text: &str) -> Result<Self, CliError> {
        let f: ScenarioFile = toml::from_str(text).map_err(|e| {
            CliError::Schema(format!("scenario '{name}': {}", one_line(&e.to_string())))
        })?;
        let deployment = DeploymentScenario {
            area_m2: f.area_m2,
            radius_range_m: (f.radius_min_m, f.radius_max_m),
            path_loss: PathLossModel::new(
                f.path_loss.exponent,
                f.path_loss.reference_loss_db,
                f.path_loss.reference_distance_m,
            )?,
            link: LinkParams::with_interference(
                f.link.bandwidth_hz,
                f.link.noise_psd_w_per_hz,
                f.link.interference_w,
            )?,
            power_model: PowerModel::new(
                f.power.drain_efficiency,
                f.power.circuit_psd_w_per_hz,
                f.power.static_power_w,
            )?,
            edge_snr_target: f.edge_snr_target,
            cell_geometry: match f.cell_geometry {
                GeometryName::Hexagon => CellGeometry::Hexagon,
                GeometryName::Circle => CellGeometry::Circle,
            },
            traffic_density_bps_per_m2: f.traffic_density_bps_per_m2,
            site_counting: SiteCounting::Integer,
        };
        deployment.validate()?;
        let cost = CostModel {
            capex_per_site: f.cost.capex_per_site,
            depreciation_years: f.cost.depreciation_years,
            opex_fixed_per_site_year: f.cost.opex_per_site_year,
            energy_price_per_joule: f.cost.energy_price_per_kwh / JOULES_PER_KWH,
        };
        cost.validate()?;
        Ok(Self {
            name: name.to_string(),
            deployment,
            cost,
        })
    }

    /// Resolves `reference`:
    /// - anything that looks like a path (has a separator or ends in
    ///   `.toml`) is read relative to `base_dir`;
    /// - otherwise `<name>.toml` in `config_dir` if it exists;
    /// - otherwise a built-in scenario of that name.
    pub fn resolve(
        reference: &str,
        base_dir: &Path,
        config_dir: Option<&Path>,
    ) -> Result<Self, CliError> {
        let looks_like_path =
            reference.contains('/') || reference.contains('\\') || reference.ends_with(".toml");
        if looks_like_path {
            let path = base_dir.join(reference);
            return Self::parse(reference, &read(&path)?);
        }
        if let Some(dir) = config_dir {
            let path = dir.join(format!("{reference}.toml"));
            if path.is_file() {
                return Self::parse(reference, &read(&path)?);
            }
        }
        match BUILTIN_SCENARIOS.iter().find(|(n, _)| *n == reference) {
            Some((n, text)) => Self::parse(n, text),
            None => Err(CliError::Schema(format!(
                "unknown scenario '{reference}' (built in: {})",
                builtin_scenario_names().join(", ")
            ))),
        }
    }
}

pub fn builtin_scenario_names() -> Vec<&'static str> {
    BUILTIN_SCENARIOS.iter().map(|(n, _)| *n).collect()
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub(crate) fn one_line(msg: &str) -> String {
    msg.split_whitespace().collect::<Vec<_>>().join(" ")
}
