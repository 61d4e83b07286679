//! Maps each command onto the library and builds its output document.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::json;

use super::config::Scenario;
use super::output::{Cell, Document, PlotStyle};
use super::schema::{CommandId, Params};
use super::CliError;
use crate::deployment::{de_ee_sweep, plan_deployment_with, SiteCounting};
use crate::linkmodel::{LinkParams, PowerModel};
use crate::numerics::SearchBracket;
use crate::scheduling::{
    lazy_schedule_with, packet_energy_j, schedule_energy_with, PacketBatch, SchedulerConfig,
    StaticPowerAccounting,
};
use crate::tradeoffs::{
    ee_contour_bw_pw, format_value, optimal_bandwidth, optimal_bit_duration, peak_ee, sweep,
    CurveKind, Spacing, SweepParams,
};

/// Where scenario names and relative scenario paths are looked up.
#[derive(Debug, Clone, Copy)]
pub struct Lookup<'a> {
    pub base_dir: &'a Path,
    pub config_dir: Option<&'a Path>,
}

pub fn execute(params: &Params, lookup: &Lookup) -> Result<Document, CliError> {
    let label = params.spec().label();
    let values = params.values().clone();
    match params.spec().id {
        CommandId::CurveSeEe => {
            curve_tradeoff(params, "se", CurveKind::SeEeIdeal, CurveKind::SeEePractical)
        }
        CommandId::CurveBwPw => {
            curve_tradeoff(params, "bw", CurveKind::BwPwIdeal, CurveKind::BwPwPractical)
        }
        CommandId::CurveDlPw => {
            curve_tradeoff(params, "tb", CurveKind::DlPwIdeal, CurveKind::DlPwPractical)
        }
        CommandId::CurveDeEe => {
            let scenario = scenario(params, lookup)?;
            let curve = de_ee_sweep(
                &scenario.deployment,
                &scenario.cost,
                params.count("points")?,
            )?
            .with_metadata("scenario", scenario.name.as_str());
            let mut doc = Document::from_curve(&label, values, &curve);
            doc.plot = PlotStyle {
                log_x: true,
                log_y: true,
                series_column: None,
            };
            Ok(doc)
        }
        CommandId::CurveEeContour => {
            let range = params.range("bw")?;
            let contour = ee_contour_bw_pw(
                params.real("target_ee")?,
                params.real("n0")?,
                &power_model(params)?,
                &range,
            )?;
            let mut metadata = contour.upper.metadata().clone();
            metadata.remove("branch");
            let mut rows: Vec<(f64, u8, f64)> = contour
                .lower
                .points()
                .iter()
                .map(|&(w, p)| (w, 0, p))
                .chain(contour.upper.points().iter().map(|&(w, p)| (w, 1, p)))
                .collect();
            rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            Ok(Document {
                command: label,
                params: values,
                metadata,
                columns: vec![
                    "bandwidth_hz".into(),
                    "total_power_w".into(),
                    "branch".into(),
                ],
                rows: rows
                    .into_iter()
                    .map(|(w, b, p)| {
                        let branch = if b == 0 { "lower" } else { "upper" };
                        vec![Cell::Num(w), Cell::Num(p), Cell::Text(branch.into())]
                    })
                    .collect(),
                result: serde_json::to_value(&contour).unwrap_or_default(),
                plot: PlotStyle {
                    log_x: range.spacing() == Spacing::Log,
                    log_y: false,
                    series_column: Some(2),
                },
            })
        }
        CommandId::PeakSeEe => {
            let (lo, hi) = crate::tradeoffs::DEFAULT_SE_RANGE;
            let bracket = bracket_or(params, || SearchBracket::new(lo, hi))?;
            let op = peak_ee(&link(params)?, &power_model(params)?, &bracket)?;
            Ok(point_document(
                label,
                values,
                (
                    "spectral_efficiency_bps_per_hz",
                    "energy_efficiency_bit_per_j",
                ),
                op.x,
                op.objective,
                &bracket,
            ))
        }
        CommandId::PeakBwPw => {
            let rate = params.real("rate")?;
            let bracket = bracket_or(params, || SearchBracket::new(rate / 64.0, rate * 1e6))?;
            let op = optimal_bandwidth(rate, params.real("n0")?, &power_model(params)?, &bracket)?;
            let mut doc = point_document(
                label,
                values,
                ("bandwidth_hz", "total_power_w"),
                op.x,
                op.objective,
                &bracket,
            );
            doc.metadata.insert(
                "energy_efficiency_bit_per_j".into(),
                format_value(rate / op.objective),
            );
            Ok(doc)
        }
        CommandId::PeakDlPw => {
            let w = params.real("bandwidth")?;
            let bracket = bracket_or(params, || SearchBracket::new(1.0 / (64.0 * w), 1e6 / w))?;
            let op = optimal_bit_duration(w, params.real("n0")?, &power_model(params)?, &bracket)?;
            Ok(point_document(
                label,
                values,
                ("bit_duration_s", "energy_per_bit_j"),
                op.x,
                op.objective,
                &bracket,
            ))
        }
        CommandId::Plan => plan(params, lookup, label, values),
        CommandId::Schedule => schedule(params, label, values),
    }
}

fn curve_tradeoff(
    params: &Params,
    range_key: &str,
    ideal: CurveKind,
    practical: CurveKind,
) -> Result<Document, CliError> {
    let is_ideal = params.flag("ideal")?;
    let kind = if is_ideal { ideal } else { practical };
    let range = params.range(range_key)?;
    let sweep_params = SweepParams {
        link: link(params)?,
        power: if is_ideal {
            PowerModel::ideal()
        } else {
            power_model(params)?
        },
        rate_bps: params.opt_real("rate")?.unwrap_or(1.0),
    };
    let curve = sweep(kind, &sweep_params, &range)?;
    let mut doc = Document::from_curve(&params.spec().label(), params.values().clone(), &curve);
    doc.plot.log_x = range.spacing() == Spacing::Log;
    Ok(doc)
}

fn point_document(
    command: String,
    params: BTreeMap<String, String>,
    axes: (&str, &str),
    x: f64,
    y: f64,
    bracket: &SearchBracket,
) -> Document {
    let metadata = BTreeMap::from([
        ("bracket_lo".to_string(), format_value(bracket.lo())),
        ("bracket_hi".to_string(), format_value(bracket.hi())),
        ("tolerance".to_string(), format_value(bracket.tolerance())),
        (
            "search_scale".to_string(),
            if bracket.is_log_scale() {
                "log"
            } else {
                "linear"
            }
            .to_string(),
        ),
    ]);
    Document {
        command,
        params,
        metadata,
        columns: vec![axes.0.to_string(), axes.1.to_string()],
        rows: vec![vec![Cell::Num(x), Cell::Num(y)]],
        result: json!({ axes.0: x, axes.1: y }),
        plot: PlotStyle::default(),
    }
}

fn plan(
    params: &Params,
    lookup: &Lookup,
    command: String,
    values: BTreeMap<String, String>,
) -> Result<Document, CliError> {
    let scenario = scenario(params, lookup)?;
    let plan = plan_deployment_with(
        &scenario.deployment,
        &scenario.cost,
        params.real("throughput")?,
        params.real("budget")?,
        params.count("points")?,
    )?;
    let m = &plan.metrics;
    let columns = [
        ("radius_m", m.radius_m),
        ("n_sites", m.n_sites),
        ("tx_power_per_site_w", m.tx_power_per_site_w),
        ("supply_power_per_site_w", m.supply_power_per_site_w),
        ("network_throughput_bps", m.network_throughput_bps),
        ("annual_cost", m.annual_cost),
        ("deployment_efficiency_bit_per_currency", m.de),
        ("energy_efficiency_bit_per_j", m.ee),
        (
            "required_deployment_efficiency_bit_per_currency",
            plan.required_de,
        ),
    ];
    Ok(Document {
        command,
        params: values,
        metadata: BTreeMap::from([("scenario".to_string(), scenario.name.clone())]),
        columns: columns.iter().map(|c| c.0.to_string()).collect(),
        rows: vec![columns.iter().map(|c| Cell::Num(c.1)).collect()],
        result: serde_json::to_value(plan).unwrap_or_default(),
        plot: PlotStyle::default(),
    })
}

fn schedule(
    params: &Params,
    command: String,
    values: BTreeMap<String, String>,
) -> Result<Document, CliError> {
    let bits = params.list("bits")?;
    let deadline = params.real("deadline")?;
    let batch = match params.opt_list("arrivals")? {
        Some(arrivals) => PacketBatch::new(bits, arrivals, deadline)?,
        None => PacketBatch::simultaneous(bits, deadline)?,
    };
    let link = link(params)?;
    let pm = power_model(params)?;
    let config = SchedulerConfig {
        max_tx_power_w: params.opt_real("max_power")?,
        static_power: if params.flag("always_on_static")? {
            StaticPowerAccounting::AlwaysOn
        } else {
            StaticPowerAccounting::ActiveOnly
        },
    };
    let schedule = lazy_schedule_with(&batch, &link, &pm, &config)?;
    let total = schedule_energy_with(&batch, &schedule, &link, &pm, config.static_power)?;

    let mut rows = Vec::with_capacity(batch.len());
    for i in 0..batch.len() {
        let (b, d, s) = (
            batch.packet_bits()[i],
            schedule.durations_s[i],
            schedule.start_s[i],
        );
        rows.push(vec![
            Cell::Int(i as u64),
            Cell::Num(b),
            Cell::Num(batch.arrival_s()[i]),
            Cell::Num(s),
            Cell::Num(d),
            Cell::Num(s + d),
            Cell::Num(b / d),
            Cell::Num(packet_energy_j(b, d, &link, &pm)?),
        ]);
    }
    let metadata = BTreeMap::from([
        ("total_energy_j".to_string(), format_value(total)),
        (
            "finish_s".to_string(),
            format_value(schedule.finish_s().unwrap_or(0.0)),
        ),
        (
            "static_power_accounting".to_string(),
            match config.static_power {
                StaticPowerAccounting::ActiveOnly => "active_only",
                StaticPowerAccounting::AlwaysOn => "always_on",
            }
            .to_string(),
        ),
    ]);
    Ok(Document {
        command,
        params: values,
        metadata,
        columns: [
            "packet",
            "bits",
            "arrival_s",
            "start_s",
            "duration_s",
            "finish_s",
            "rate_bps",
            "energy_j",
        ]
        .map(String::from)
        .to_vec(),
        rows,
        result: json!({ "total_energy_j": total, "schedule": schedule }),
        plot: PlotStyle::default(),
    })
}

fn link(params: &Params) -> Result<LinkParams, CliError> {
    let interference = params.opt_real("interference")?.unwrap_or(0.0);
    Ok(LinkParams::with_interference(
        params.opt_real("bandwidth")?.unwrap_or(1.0),
        params.real("n0")?,
        interference,
    )?)
}

fn power_model(params: &Params) -> Result<PowerModel, CliError> {
    Ok(PowerModel::new(
        params.real("drain_efficiency")?,
        params.real("circuit_psd")?,
        params.real("static_power")?,
    )?)
}

fn bracket_or(
    params: &Params,
    default: impl FnOnce() -> crate::Result<SearchBracket>,
) -> Result<SearchBracket, CliError> {
    match params.opt_bracket("bracket")? {
        Some(b) => Ok(b),
        None => Ok(default()?),
    }
}

fn scenario(params: &Params, lookup: &Lookup) -> Result<Scenario, CliError> {
    let mut s = Scenario::resolve(params.text("scenario")?, lookup.base_dir, lookup.config_dir)?;
    if params.flag("continuous_sites")? {
        s.deployment.site_counting = SiteCounting::Continuous;
    }
    Ok(s)
}
