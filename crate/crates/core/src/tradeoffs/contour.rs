//! Iso-EE contour over the bandwidth / power plane.
//!
//! At fixed bandwidth `W` the surplus `g(p) = C(p) − τ · P_supply(p)` is
//! concave in the transmit power `p`, so `EE(p) = τ` has at most two roots,
//! one on each side of the maximizer of `g`. Each root is reported as the
//! total supply power on a lower and an upper branch.

use serde::Serialize;

use super::curve::{format_value, Curve, SweepRange};
use super::record_power_model;
use crate::error::{invalid, Error, Result};
use crate::linkmodel::{capacity_bps, supply_power_w, LinkParams, PowerModel};
use crate::numerics::{bisect_root, maximize_unimodal, SearchBracket};

use std::f64::consts::LN_2;

const ROOT_TOLERANCE: f64 = 1e-13;

/// Both branches of an iso-EE contour. Bandwidths where the target is not
/// reachable are absent from both curves.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EeContour {
    pub target_ee: f64,
    pub lower: Curve,
    pub upper: Curve,
}

impl EeContour {
    pub fn is_empty(&self) -> bool {
        self.lower.is_empty() && self.upper.is_empty()
    }
}

pub fn ee_contour_bw_pw(
    target_ee: f64,
    noise_psd: f64,
    pm: &PowerModel,
    w_range: &SweepRange,
) -> Result<EeContour> {
    if !(target_ee > 0.0 && target_ee.is_finite()) {
        return Err(invalid(format!(
            "target EE must be positive, got {target_ee}"
        )));
    }
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for w in w_range.samples() {
        let link = LinkParams::new(w, noise_psd)?;
        let (lo, hi) = roots_at(target_ee, &link, pm)?;
        if let Some(p) = lo {
            lower.push((w, supply_power_w(p, w, pm)?));
        }
        if let Some(p) = hi {
            upper.push((w, supply_power_w(p, w, pm)?));
        }
    }

    if lower.is_empty() && upper.is_empty() {
        let max_achievable = w_range
            .samples()
            .into_iter()
            .map(|w| max_ee_at(&LinkParams::new(w, noise_psd)?, pm))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        return Err(Error::TargetUnachievable {
            target: target_ee,
            max_achievable,
        });
    }

    let annotate = |points, branch: &str| -> Result<Curve> {
        let mut c = Curve::new("bandwidth_hz", "total_power_w", points)?
            .with_metadata("kind", "ee_contour_bw_pw")
            .with_metadata("branch", branch)
            .with_metadata("target_ee_bit_per_j", format_value(target_ee))
            .with_metadata("noise_psd_w_per_hz", format_value(noise_psd));
        record_power_model(&mut c, pm);
        w_range.record(&mut c, "x");
        Ok(c)
    };
    Ok(EeContour {
        target_ee,
        lower: annotate(lower, "lower")?,
        upper: annotate(upper, "upper")?,
    })
}

/// Transmit powers where the link's EE equals `target`, smaller root first.
fn roots_at(target: f64, link: &LinkParams, pm: &PowerModel) -> Result<(Option<f64>, Option<f64>)> {
    let w = link.bandwidth_hz();
    let floor = link.noise_floor_w();
    let eta = pm.drain_efficiency();
    let surplus = |p: f64| {
        capacity_bps(p, link).unwrap_or(f64::NAN)
            - target * supply_power_w(p, w, pm).unwrap_or(f64::NAN)
    };

    // stationary point of the concave surplus: C'(p) = τ / η
    let p_top = (eta * w / (target * LN_2) - floor).max(0.0);
    let top = surplus(p_top);
    if !(top > 0.0) {
        return Ok((None, None));
    }

    let at_zero = surplus(0.0);
    let lower = if at_zero < 0.0 {
        Some(bisect_root(surplus, 0.0, p_top, ROOT_TOLERANCE)?)
    } else {
        // no overhead power: p = 0 is a degenerate root
        None
    };

    let mut p_hi = 2.0 * p_top.max(floor);
    while surplus(p_hi) >= 0.0 {
        p_hi *= 2.0;
        if !p_hi.is_finite() {
            return Err(Error::NonFiniteEvaluation { x: p_hi });
        }
    }
    let upper = bisect_root(surplus, p_top, p_hi, ROOT_TOLERANCE)?;
    Ok((lower, Some(upper)))
}

/// Highest EE reachable at this bandwidth, over all transmit powers.
fn max_ee_at(link: &LinkParams, pm: &PowerModel) -> Result<f64> {
    let w = link.bandwidth_hz();
    let floor = link.noise_floor_w();
    if pm.overhead_w(w) <= 0.0 {
        // sup at p -> 0
        return Ok(pm.drain_efficiency() * w / (floor * LN_2));
    }
    let ee = |p: f64| {
        capacity_bps(p, link).unwrap_or(f64::NAN) / supply_power_w(p, w, pm).unwrap_or(f64::NAN)
    };
    let bracket = SearchBracket::new(floor * 1e-9, floor * 1e12)?;
    Ok(maximize_unimodal(ee, &bracket)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ee_of_supply(w: f64, p_supply: f64, pm: &PowerModel) -> f64 {
        let link = LinkParams::new(w, 1.0).unwrap();
        let p_tx = (p_supply - pm.overhead_w(w)) * pm.drain_efficiency();
        capacity_bps(p_tx, &link).unwrap() / p_supply
    }

    fn max_ee(pm: &PowerModel, w: f64) -> f64 {
        max_ee_at(&LinkParams::new(w, 1.0).unwrap(), pm).unwrap()
    }

    #[test]
    fn contour_points_hit_target() {
        let pm = PowerModel::new(0.8, 1.0, 1.0).unwrap();
        let range = SweepRange::log(0.05, 50.0, 120).unwrap();
        let target = 0.9 * max_ee(&pm, 50.0);
        let c = ee_contour_bw_pw(target, 1.0, &pm, &range).unwrap();
        assert!(!c.lower.is_empty() && !c.upper.is_empty());
        for &(w, p) in c.lower.points().iter().chain(c.upper.points()) {
            let ee = ee_of_supply(w, p, &pm);
            assert!((ee - target).abs() < 1e-9 * target, "w={w} p={p} ee={ee}");
        }
        for (l, u) in c.lower.points().iter().zip(c.upper.points()) {
            assert_eq!(l.0, u.0);
            assert!(l.1 <= u.1);
        }
    }

    #[test]
    fn practical_lower_branch_is_non_monotone() {
        let pm = PowerModel::new(1.0, 1.0, 1.0).unwrap();
        let range = SweepRange::log(0.1, 100.0, 300).unwrap();
        let target = 0.95 * max_ee(&pm, 100.0);
        let c = ee_contour_bw_pw(target, 1.0, &pm, &range).unwrap();
        let ys: Vec<f64> = c.lower.ys().collect();
        let (imin, &pmin) = ys
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        assert!(imin > 0 && imin + 1 < ys.len());
        assert!(ys[0] > pmin && ys[ys.len() - 1] > pmin);
    }

    #[test]
    fn ideal_contour_is_a_single_monotone_branch() {
        let range = SweepRange::log(0.1, 10.0, 50).unwrap();
        let c = ee_contour_bw_pw(0.5 / LN_2, 1.0, &PowerModel::ideal(), &range).unwrap();
        assert!(c.lower.is_empty());
        assert_eq!(c.upper.len(), 50);
        let pts = c.upper.points();
        assert!(pts.windows(2).all(|w| w[1].1 > w[0].1));
        // scale-free: P(W) / W is constant
        let k = pts[0].1 / pts[0].0;
        assert!(pts.iter().all(|(w, p)| ((p / w) - k).abs() < 1e-9 * k));
    }

    #[test]
    fn unreachable_target_reports_max() {
        let pm = PowerModel::new(1.0, 1.0, 0.0).unwrap();
        let range = SweepRange::linear(0.1, 10.0, 20).unwrap();
        match ee_contour_bw_pw(0.6, 1.0, &pm, &range) {
            Err(Error::TargetUnachievable { max_achievable, .. }) => {
                assert!((max_achievable - 0.530_737_845_423_043).abs() < 1e-9)
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
