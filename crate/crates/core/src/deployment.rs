//! Cell-radius sweeps relating deployment efficiency (bits per currency unit)
//! to energy efficiency (bits per Joule), and the planning lookup from a
//! throughput target and budget to a cell size.
//!
//! Conventions:
//! - every cell transmits at the power that meets `edge_snr_target` at the
//!   cell edge and carries `W · log2(1 + γ)`;
//! - an optional offered-traffic density caps the served network throughput;
//! - CapEx is depreciated linearly; a year is [`SECONDS_PER_YEAR`].

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linkmodel::{path_loss_linear, supply_power_w, LinkParams, PathLossModel, PowerModel};
use crate::numerics::{maximize_unimodal, SearchBracket};
use crate::tradeoffs::{format_value, Curve, SweepRange};

pub const SECONDS_PER_YEAR: f64 = 31_536_000.0;

/// Radii evaluated by [`plan_deployment`] before refinement.
pub const DEFAULT_PLAN_POINTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellGeometry {
    Hexagon,
    Circle,
}

/// How the number of sites follows from area and cell size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SiteCounting {
    /// `ceil(area / cell_area)`.
    #[default]
    Integer,
    /// `area / cell_area`, without rounding.
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeploymentScenario {
    pub area_m2: f64,
    pub radius_range_m: (f64, f64),
    pub path_loss: PathLossModel,
    pub link: LinkParams,
    pub power_model: PowerModel,
    /// Linear SNR required at the cell edge.
    pub edge_snr_target: f64,
    pub cell_geometry: CellGeometry,
    /// Offered traffic per unit area; `None` means every cell is fully loaded.
    pub traffic_density_bps_per_m2: Option<f64>,
    pub site_counting: SiteCounting,
}

impl DeploymentScenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.area_m2 > 0.0 && self.area_m2.is_finite()) {
            return Err(invalid(format!(
                "area must be positive, got {}",
                self.area_m2
            )));
        }
        let (lo, hi) = self.radius_range_m;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(invalid(format!(
                "radius range must satisfy 0 < min < max, got {lo}:{hi}"
            )));
        }
        if !(self.edge_snr_target > 0.0 && self.edge_snr_target.is_finite()) {
            return Err(invalid(format!(
                "edge SNR target must be positive, got {}",
                self.edge_snr_target
            )));
        }
        if let Some(d) = self.traffic_density_bps_per_m2 {
            if !(d > 0.0 && d.is_finite()) {
                return Err(invalid(format!(
                    "traffic density must be positive, got {d}"
                )));
            }
        }
        Ok(())
    }

    /// Throughput of one cell under the cell-edge convention.
    pub fn cell_throughput_bps(&self) -> f64 {
        self.link.bandwidth_hz() * self.edge_snr_target.ln_1p() / std::f64::consts::LN_2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostModel {
    pub capex_per_site: f64,
    pub depreciation_years: f64,
    pub opex_fixed_per_site_year: f64,
    pub energy_price_per_joule: f64,
}

impl CostModel {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("capex_per_site", self.capex_per_site),
            ("opex_fixed_per_site_year", self.opex_fixed_per_site_year),
            ("energy_price_per_joule", self.energy_price_per_joule),
        ];
        for (name, v) in fields {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be non-negative, got {v}")));
            }
        }
        if !(self.depreciation_years > 0.0 && self.depreciation_years.is_finite()) {
            return Err(invalid(format!(
                "depreciation_years must be positive, got {}",
                self.depreciation_years
            )));
        }
        Ok(())
    }

    /// Annual cost of one site drawing `supply_power_w` continuously.
    pub fn annual_site_cost(&self, supply_power_w: f64) -> f64 {
        self.capex_per_site / self.depreciation_years
            + self.opex_fixed_per_site_year
            + self.energy_price_per_joule * supply_power_w * SECONDS_PER_YEAR
    }

    /// Same model with every monetary field multiplied by `factor`.
    pub fn rescaled(&self, factor: f64) -> Self {
        Self {
            capex_per_site: self.capex_per_site * factor,
            depreciation_years: self.depreciation_years,
            opex_fixed_per_site_year: self.opex_fixed_per_site_year * factor,
            energy_price_per_joule: self.energy_price_per_joule * factor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeploymentMetrics {
    pub radius_m: f64,
    /// Whole number under [`SiteCounting::Integer`].
    pub n_sites: f64,
    pub tx_power_per_site_w: f64,
    pub supply_power_per_site_w: f64,
    pub network_throughput_bps: f64,
    pub annual_cost: f64,
    /// Bits delivered per currency unit.
    pub de: f64,
    /// Bits per Joule.
    pub ee: f64,
}

pub fn cell_area_m2(radius_m: f64, geometry: CellGeometry) -> f64 {
    match geometry {
        CellGeometry::Hexagon => 1.5 * 3f64.sqrt() * radius_m * radius_m,
        CellGeometry::Circle => std::f64::consts::PI * radius_m * radius_m,
    }
}

/// Number of cells of radius `radius_m` needed to cover `area_m2`.
pub fn sites_for_area(area_m2: f64, radius_m: f64, geometry: CellGeometry) -> Result<u64> {
    if !(area_m2 > 0.0 && area_m2.is_finite()) {
        return Err(invalid(format!("area must be positive, got {area_m2}")));
    }
    if !(radius_m > 0.0 && radius_m.is_finite()) {
        return Err(invalid(format!("radius must be positive, got {radius_m}")));
    }
    Ok((area_m2 / cell_area_m2(radius_m, geometry)).ceil().max(1.0) as u64)
}

/// Transmit power meeting the edge SNR target at `radius_m`:
/// `γ · (W·N0 + I) · L(r)`.
pub fn edge_tx_power_w(radius_m: f64, scenario: &DeploymentScenario) -> Result<f64> {
    Ok(scenario.edge_snr_target
        * scenario.link.noise_floor_w()
        * path_loss_linear(radius_m, &scenario.path_loss)?)
}

pub fn evaluate_deployment(
    radius_m: f64,
    scenario: &DeploymentScenario,
    cost: &CostModel,
) -> Result<DeploymentMetrics> {
    scenario.validate()?;
    cost.validate()?;
    let (lo, hi) = scenario.radius_range_m;
    let slack = 1e-12 * hi;
    if !(radius_m >= lo - slack && radius_m <= hi + slack) {
        return Err(invalid(format!(
            "radius {radius_m} m outside scenario range {lo}:{hi}"
        )));
    }

    let n_sites = match scenario.site_counting {
        SiteCounting::Integer => {
            sites_for_area(scenario.area_m2, radius_m, scenario.cell_geometry)? as f64
        }
        SiteCounting::Continuous => {
            scenario.area_m2 / cell_area_m2(radius_m, scenario.cell_geometry)
        }
    };
    let tx = edge_tx_power_w(radius_m, scenario)?;
    let supply = supply_power_w(tx, scenario.link.bandwidth_hz(), &scenario.power_model)?;
    let capacity = n_sites * scenario.cell_throughput_bps();
    let throughput = match scenario.traffic_density_bps_per_m2 {
        Some(d) => capacity.min(d * scenario.area_m2),
        None => capacity,
    };
    let annual_cost = n_sites * cost.annual_site_cost(supply);
    Ok(DeploymentMetrics {
        radius_m,
        n_sites,
        tx_power_per_site_w: tx,
        supply_power_per_site_w: supply,
        network_throughput_bps: throughput,
        annual_cost,
        de: throughput * SECONDS_PER_YEAR / annual_cost,
        ee: throughput / (n_sites * supply),
    })
}

/// Metrics at `n_points` log-spaced radii across the scenario range.
pub fn sweep_radii(
    scenario: &DeploymentScenario,
    cost: &CostModel,
    n_points: usize,
) -> Result<Vec<DeploymentMetrics>> {
    scenario.validate()?;
    let (lo, hi) = scenario.radius_range_m;
    SweepRange::log(lo, hi, n_points)?
        .samples()
        .into_iter()
        .map(|r| evaluate_deployment(r, scenario, cost))
        .collect()
}

/// DE-EE curve traced by cell radius (ascending).
pub fn de_ee_sweep(
    scenario: &DeploymentScenario,
    cost: &CostModel,
    n_points: usize,
) -> Result<Curve> {
    let metrics = sweep_radii(scenario, cost, n_points)?;
    let samples = metrics.iter().map(|m| (m.radius_m, m.de, m.ee)).collect();
    let mut curve = Curve::parametric(
        "deployment_efficiency_bit_per_currency",
        "energy_efficiency_bit_per_j",
        "radius_m",
        samples,
    )?
    .with_metadata("kind", "de_ee");
    record_scenario(&mut curve, scenario, cost);
    let (lo, hi) = scenario.radius_range_m;
    SweepRange::log(lo, hi, n_points)?.record(&mut curve, "radius");
    Ok(curve)
}

pub(crate) fn record_scenario(curve: &mut Curve, s: &DeploymentScenario, c: &CostModel) {
    let f = format_value;
    let entries = [
        ("area_m2", f(s.area_m2)),
        ("path_loss_exponent", f(s.path_loss.exponent())),
        ("reference_loss_db", f(s.path_loss.reference_loss_db())),
        (
            "reference_distance_m",
            f(s.path_loss.reference_distance_m()),
        ),
        ("bandwidth_hz", f(s.link.bandwidth_hz())),
        ("noise_psd_w_per_hz", f(s.link.noise_psd())),
        ("interference_w", f(s.link.interference_w())),
        ("drain_efficiency", f(s.power_model.drain_efficiency())),
        ("circuit_psd_w_per_hz", f(s.power_model.circuit_psd())),
        ("static_power_w", f(s.power_model.static_power_w())),
        ("edge_snr_target", f(s.edge_snr_target)),
        (
            "cell_geometry",
            match s.cell_geometry {
                CellGeometry::Hexagon => "hexagon".into(),
                CellGeometry::Circle => "circle".into(),
            },
        ),
        (
            "traffic_density_bps_per_m2",
            s.traffic_density_bps_per_m2.map_or("none".into(), f),
        ),
        (
            "site_counting",
            match s.site_counting {
                SiteCounting::Integer => "integer".into(),
                SiteCounting::Continuous => "continuous".into(),
            },
        ),
        ("capex_per_site", f(c.capex_per_site)),
        ("depreciation_years", f(c.depreciation_years)),
        ("opex_fixed_per_site_year", f(c.opex_fixed_per_site_year)),
        ("energy_price_per_joule", f(c.energy_price_per_joule)),
        ("seconds_per_year", f(SECONDS_PER_YEAR)),
        ("capex_annualization", "linear".into()),
        ("de_unit", "bit per currency unit (annualized cost)".into()),
    ];
    for (k, v) in entries {
        curve.insert_metadata(k, v);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeploymentPlan {
    /// `throughput_target · SECONDS_PER_YEAR / annual_budget`.
    pub required_de: f64,
    pub metrics: DeploymentMetrics,
}

/// Most energy-efficient radius whose deployment carries at least
/// `throughput_target_bps` for at most `annual_budget` per year.
pub fn plan_deployment(
    scenario: &DeploymentScenario,
    cost: &CostModel,
    throughput_target_bps: f64,
    annual_budget: f64,
) -> Result<DeploymentPlan> {
    plan_deployment_with(
        scenario,
        cost,
        throughput_target_bps,
        annual_budget,
        DEFAULT_PLAN_POINTS,
    )
}

pub fn plan_deployment_with(
    scenario: &DeploymentScenario,
    cost: &CostModel,
    throughput_target_bps: f64,
    annual_budget: f64,
    n_points: usize,
) -> Result<DeploymentPlan> {
    if !(throughput_target_bps > 0.0 && throughput_target_bps.is_finite()) {
        return Err(invalid(format!(
            "throughput target must be positive, got {throughput_target_bps}"
        )));
    }
    if !(annual_budget > 0.0) {
        return Err(invalid(format!(
            "annual budget must be positive, got {annual_budget}"
        )));
    }
    let required_de = if annual_budget.is_finite() {
        throughput_target_bps * SECONDS_PER_YEAR / annual_budget
    } else {
        0.0
    };
    let feasible = |m: &DeploymentMetrics| {
        m.network_throughput_bps >= throughput_target_bps && m.annual_cost <= annual_budget
    };

    let grid = sweep_radii(scenario, cost, n_points)?;
    let best = grid.iter().enumerate().filter(|(_, m)| feasible(m)).fold(
        None::<(usize, &DeploymentMetrics)>,
        |acc, (i, m)| match acc {
            Some((_, b)) if b.ee >= m.ee => acc,
            _ => Some((i, m)),
        },
    );
    let Some((i, grid_best)) = best else {
        let max_throughput_bps = grid
            .iter()
            .filter(|m| m.annual_cost <= annual_budget)
            .map(|m| m.network_throughput_bps)
            .fold(0.0, f64::max);
        return Err(Error::InfeasiblePlan {
            reason: format!(
                "no radius carries {throughput_target_bps} bit/s within a budget of {annual_budget} per year"
            ),
            max_throughput_bps,
        });
    };

    let mut chosen = *grid_best;
    // refine between the neighbours when the feasible profile peaks locally
    if i > 0 && i + 1 < grid.len() {
        let (left, right) = (&grid[i - 1], &grid[i + 1]);
        let locally_unimodal =
            feasible(left) && feasible(right) && left.ee <= chosen.ee && right.ee <= chosen.ee;
        if locally_unimodal {
            let objective = |r: f64| match evaluate_deployment(r, scenario, cost) {
                Ok(m) if feasible(&m) => m.ee,
                Ok(_) => 0.0,
                Err(_) => f64::NAN,
            };
            let bracket = SearchBracket::new(left.radius_m, right.radius_m)?;
            let e = maximize_unimodal(objective, &bracket)?;
            let refined = evaluate_deployment(e.x, scenario, cost)?;
            if feasible(&refined) && refined.ee > chosen.ee {
                chosen = refined;
            }
        }
    }
    Ok(DeploymentPlan {
        required_de,
        metrics: chosen,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario() -> DeploymentScenario {
        DeploymentScenario {
            area_m2: 1e8,
            radius_range_m: (100.0, 4000.0),
            path_loss: PathLossModel::new(4.0, 100.0, 100.0).unwrap(),
            link: LinkParams::new(1e7, 2e-20).unwrap(),
            power_model: PowerModel::new(0.4, 0.0, 200.0).unwrap(),
            edge_snr_target: 15.0,
            cell_geometry: CellGeometry::Hexagon,
            traffic_density_bps_per_m2: None,
            site_counting: SiteCounting::Integer,
        }
    }

    fn cost() -> CostModel {
        CostModel {
            capex_per_site: 50_000.0,
            depreciation_years: 10.0,
            opex_fixed_per_site_year: 10_000.0,
            energy_price_per_joule: 0.1 / 3.6e6,
        }
    }

    #[test]
    fn site_counts() {
        assert_eq!(
            sites_for_area(1e8, 1000.0, CellGeometry::Hexagon).unwrap(),
            39
        );
        assert_eq!(
            sites_for_area(1e8, 250.0, CellGeometry::Hexagon).unwrap(),
            616
        );
        assert_eq!(
            sites_for_area(10.0, 1000.0, CellGeometry::Circle).unwrap(),
            1
        );
        assert_eq!(
            sites_for_area(1e6, 100.0, CellGeometry::Circle).unwrap(),
            (1e6 / (std::f64::consts::PI * 1e4)).ceil() as u64
        );
        assert!(sites_for_area(0.0, 1.0, CellGeometry::Hexagon).is_err());
        assert!(sites_for_area(1.0, -1.0, CellGeometry::Hexagon).is_err());
    }

    #[test]
    fn edge_power_scaling() {
        let mut s = scenario();
        let ratio = edge_tx_power_w(800.0, &s).unwrap() / edge_tx_power_w(400.0, &s).unwrap();
        assert!((ratio - 16.0).abs() < 1e-9);
        s.path_loss = PathLossModel::new(3.5, 0.0, 100.0).unwrap();
        let ratio = edge_tx_power_w(800.0, &s).unwrap() / edge_tx_power_w(400.0, &s).unwrap();
        assert!((ratio - 2f64.powf(3.5)).abs() < 1e-9);
        let p = edge_tx_power_w(100.0, &s).unwrap();
        assert!((p - 15.0 * 1e7 * 2e-20).abs() < 1e-25);
    }

    #[test]
    fn cell_throughput_edge_convention() {
        assert!((scenario().cell_throughput_bps() - 4e7).abs() < 1e-6);
    }

    #[test]
    fn metrics_match_hand_computation() {
        let s = scenario();
        let c = cost();
        let m = evaluate_deployment(1000.0, &s, &c).unwrap();
        assert_eq!(m.n_sites, 39.0);
        let tx = 15.0 * 1e7 * 2e-20 * 1e10 * 1e4;
        assert!((m.tx_power_per_site_w - tx).abs() < 1e-12 * tx);
        let supply = tx / 0.4 + 200.0;
        assert!((m.supply_power_per_site_w - supply).abs() < 1e-12 * supply);
        let thr = 39.0 * 4e7;
        assert!((m.network_throughput_bps - thr).abs() < 1e-6);
        let annual = 39.0 * (5_000.0 + 10_000.0 + 0.1 / 3.6e6 * supply * SECONDS_PER_YEAR);
        assert!((m.annual_cost - annual).abs() < 1e-9 * annual);
        assert!((m.de - thr * SECONDS_PER_YEAR / annual).abs() < 1e-9 * m.de);
        assert!((m.ee - thr / (39.0 * supply)).abs() < 1e-9 * m.ee);
    }

    #[test]
    fn halving_radius() {
        let s = scenario();
        let a = evaluate_deployment(2000.0, &s, &cost()).unwrap();
        let b = evaluate_deployment(1000.0, &s, &cost()).unwrap();
        assert!((a.tx_power_per_site_w / b.tx_power_per_site_w - 16.0).abs() < 1e-9);
        let ratio = b.n_sites / a.n_sites;
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn currency_rescaling() {
        let s = scenario();
        for r in [150.0, 700.0, 3000.0] {
            let a = evaluate_deployment(r, &s, &cost()).unwrap();
            let b = evaluate_deployment(r, &s, &cost().rescaled(7.5)).unwrap();
            assert_eq!(a.ee, b.ee);
            assert!((a.de / 7.5 - b.de).abs() < 1e-12 * b.de);
        }
    }

    #[test]
    fn ideal_continuous_ee_strictly_decreasing() {
        let mut s = scenario();
        s.power_model = PowerModel::ideal();
        s.site_counting = SiteCounting::Continuous;
        let ms = sweep_radii(&s, &cost(), 200).unwrap();
        assert!(ms.windows(2).all(|w| w[1].ee < w[0].ee));
    }

    #[test]
    fn coverage_holds() {
        let s = scenario();
        for m in sweep_radii(&s, &cost(), 300).unwrap() {
            assert!(m.n_sites * cell_area_m2(m.radius_m, s.cell_geometry) >= s.area_m2);
            assert!(m.n_sites >= 1.0);
        }
    }

    #[test]
    fn single_point_sweep() {
        let mut s = scenario();
        s.radius_range_m = (500.0, 600.0);
        assert_eq!(de_ee_sweep(&s, &cost(), 1).unwrap().len(), 1);
    }

    #[test]
    fn radius_outside_range_rejected() {
        assert!(evaluate_deployment(50.0, &scenario(), &cost()).is_err());
    }

    #[test]
    fn unbounded_budget_picks_global_max_ee() {
        let s = scenario();
        let plan = plan_deployment(&s, &cost(), 1.0, f64::INFINITY).unwrap();
        let best = sweep_radii(&s, &cost(), DEFAULT_PLAN_POINTS)
            .unwrap()
            .into_iter()
            .map(|m| m.ee)
            .fold(0.0, f64::max);
        assert!(plan.metrics.ee >= best);
        assert_eq!(plan.required_de, 0.0);
    }

    #[test]
    fn unreachable_target_is_infeasible() {
        match plan_deployment(&scenario(), &cost(), 1e15, 1e9) {
            Err(Error::InfeasiblePlan {
                max_throughput_bps, ..
            }) => assert!(max_throughput_bps > 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }
}
