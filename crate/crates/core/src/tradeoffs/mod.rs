//! The four point-to-point tradeoff relations (SE-EE, BW-PW, DL-PW and the
//! EE contour over the BW-PW plane), their practical variants with circuit
//! and static power, and the operating-point solvers for each.

mod contour;
mod curve;

pub use contour::{ee_contour_bw_pw, EeContour};
pub use curve::{format_value, Curve, CurveParameter, Spacing, SweepRange};

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linkmodel::{supply_power_w, tx_power_for_rate_w, LinkParams, PowerModel};
use crate::numerics::{maximize_unimodal, minimize_unimodal, SearchBracket};

use std::f64::consts::LN_2;

/// Spectral-efficiency span searched by default, bit/s/Hz.
pub const DEFAULT_SE_RANGE: (f64, f64) = (1e-6, 64.0);

/// Solution of one of the peak/valley problems. `x` is the spectral
/// efficiency, bandwidth or bit duration depending on the solver; `objective`
/// is the EE, total power or energy per bit at that point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatingPoint {
    pub x: f64,
    pub objective: f64,
}

/// Ideal SE-EE relation `η_EE = η_SE / ((2^η_SE − 1) · N0)` in bit/J.
pub fn se_ee_ideal(se: f64, noise_psd: f64) -> Result<f64> {
    if !(se > 0.0 && se.is_finite()) {
        return Err(invalid(format!(
            "spectral efficiency must be positive, got {se}"
        )));
    }
    if !(noise_psd > 0.0) {
        return Err(invalid(format!(
            "noise PSD must be positive, got {noise_psd}"
        )));
    }
    Ok(se / ((se * LN_2).exp_m1() * noise_psd))
}

/// SE-EE relation with supply power in the denominator.
pub fn se_ee_practical(se: f64, link: &LinkParams, pm: &PowerModel) -> Result<f64> {
    if !(se > 0.0 && se.is_finite()) {
        return Err(invalid(format!(
            "spectral efficiency must be positive, got {se}"
        )));
    }
    let w = link.bandwidth_hz();
    let rate = w * se;
    let supply = supply_power_w(tx_power_for_rate_w(rate, link)?, w, pm)?;
    Ok(rate / supply)
}

/// Spectral efficiency maximizing [`se_ee_practical`] (top of the bell).
pub fn peak_ee(
    link: &LinkParams,
    pm: &PowerModel,
    se_bracket: &SearchBracket,
) -> Result<OperatingPoint> {
    if pm.overhead_w(link.bandwidth_hz()) <= 0.0 {
        return Err(Error::NoInteriorPeak(
            "without circuit or static power EE decreases monotonically in SE".into(),
        ));
    }
    let e = maximize_unimodal(
        |se| se_ee_practical(se, link, pm).unwrap_or(f64::NAN),
        se_bracket,
    )?;
    Ok(OperatingPoint {
        x: e.x,
        objective: e.value,
    })
}

/// Ideal BW-PW relation `P = W · N0 · (2^(R/W) − 1)`.
pub fn bw_pw_ideal(bandwidth_hz: f64, rate_bps: f64, noise_psd: f64) -> Result<f64> {
    let link = LinkParams::new(bandwidth_hz, noise_psd)?;
    tx_power_for_rate_w(rate_bps, &link)
}

/// Total supply power needed for `rate_bps` over `bandwidth_hz`.
pub fn bw_pw_practical(
    bandwidth_hz: f64,
    rate_bps: f64,
    noise_psd: f64,
    pm: &PowerModel,
) -> Result<f64> {
    let tx = bw_pw_ideal(bandwidth_hz, rate_bps, noise_psd)?;
    supply_power_w(tx, bandwidth_hz, pm)
}

/// Bandwidth minimizing [`bw_pw_practical`] for a fixed rate.
pub fn optimal_bandwidth(
    rate_bps: f64,
    noise_psd: f64,
    pm: &PowerModel,
    w_bracket: &SearchBracket,
) -> Result<OperatingPoint> {
    if pm.circuit_psd() <= 0.0 {
        return Err(Error::NoInteriorMinimum(
            "without bandwidth-proportional circuit power, power decreases monotonically in bandwidth".into(),
        ));
    }
    if !(rate_bps > 0.0) {
        return Err(invalid(format!("rate must be positive, got {rate_bps}")));
    }
    let e = minimize_unimodal(
        |w| bw_pw_practical(w, rate_bps, noise_psd, pm).unwrap_or(f64::NAN),
        w_bracket,
    )?;
    Ok(OperatingPoint {
        x: e.x,
        objective: e.value,
    })
}

/// Energy per bit `W · N0 · t_b · (2^(1/(t_b·W)) − 1)` in J/bit.
pub fn dl_pw_ideal(bit_duration_s: f64, bandwidth_hz: f64, noise_psd: f64) -> Result<f64> {
    if !(bit_duration_s > 0.0 && bit_duration_s.is_finite()) {
        return Err(invalid(format!(
            "bit duration must be positive, got {bit_duration_s}"
        )));
    }
    let link = LinkParams::new(bandwidth_hz, noise_psd)?;
    Ok(link.noise_floor_w() * bit_duration_s * (LN_2 / (bit_duration_s * bandwidth_hz)).exp_m1())
}

/// Energy per bit drawn from the supply when each bit takes `bit_duration_s`.
pub fn dl_pw_practical(
    bit_duration_s: f64,
    bandwidth_hz: f64,
    noise_psd: f64,
    pm: &PowerModel,
) -> Result<f64> {
    if !(bit_duration_s > 0.0 && bit_duration_s.is_finite()) {
        return Err(invalid(format!(
            "bit duration must be positive, got {bit_duration_s}"
        )));
    }
    let link = LinkParams::new(bandwidth_hz, noise_psd)?;
    let tx = tx_power_for_rate_w(1.0 / bit_duration_s, &link)?;
    Ok(bit_duration_s * supply_power_w(tx, bandwidth_hz, pm)?)
}

/// Bit duration minimizing [`dl_pw_practical`] (bottom of the cup).
pub fn optimal_bit_duration(
    bandwidth_hz: f64,
    noise_psd: f64,
    pm: &PowerModel,
    t_bracket: &SearchBracket,
) -> Result<OperatingPoint> {
    if pm.overhead_w(bandwidth_hz) <= 0.0 {
        return Err(Error::NoInteriorMinimum(
            "without circuit or static power energy per bit decreases monotonically in delay"
                .into(),
        ));
    }
    let e = minimize_unimodal(
        |t| dl_pw_practical(t, bandwidth_hz, noise_psd, pm).unwrap_or(f64::NAN),
        t_bracket,
    )?;
    Ok(OperatingPoint {
        x: e.x,
        objective: e.value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    SeEeIdeal,
    SeEePractical,
    BwPwIdeal,
    BwPwPractical,
    DlPwIdeal,
    DlPwPractical,
}

impl CurveKind {
    pub fn name(self) -> &'static str {
        match self {
            CurveKind::SeEeIdeal => "se_ee_ideal",
            CurveKind::SeEePractical => "se_ee_practical",
            CurveKind::BwPwIdeal => "bw_pw_ideal",
            CurveKind::BwPwPractical => "bw_pw_practical",
            CurveKind::DlPwIdeal => "dl_pw_ideal",
            CurveKind::DlPwPractical => "dl_pw_practical",
        }
    }

    pub fn axes(self) -> (&'static str, &'static str) {
        match self {
            CurveKind::SeEeIdeal | CurveKind::SeEePractical => (
                "spectral_efficiency_bps_per_hz",
                "energy_efficiency_bit_per_j",
            ),
            CurveKind::BwPwIdeal => ("bandwidth_hz", "transmit_power_w"),
            CurveKind::BwPwPractical => ("bandwidth_hz", "total_power_w"),
            CurveKind::DlPwIdeal | CurveKind::DlPwPractical => {
                ("bit_duration_s", "energy_per_bit_j")
            }
        }
    }

    fn is_practical(self) -> bool {
        matches!(
            self,
            CurveKind::SeEePractical | CurveKind::BwPwPractical | CurveKind::DlPwPractical
        )
    }
}

/// Inputs shared by all sweep kinds. Each kind reads only what it needs:
/// SE-EE uses the link (and power model), BW-PW the noise PSD and rate,
/// DL-PW the link bandwidth and noise PSD.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepParams {
    pub link: LinkParams,
    pub power: PowerModel,
    pub rate_bps: f64,
}

/// Samples one tradeoff relation over `range`. Fails on the first point
/// that cannot be evaluated.
pub fn sweep(kind: CurveKind, params: &SweepParams, range: &SweepRange) -> Result<Curve> {
    if range.count() < 2 {
        return Err(invalid("a sweep needs at least 2 points"));
    }
    let link = &params.link;
    let pm = &params.power;
    let (w, n0, rate) = (link.bandwidth_hz(), link.noise_psd(), params.rate_bps);
    let eval = |x: f64| -> Result<f64> {
        match kind {
            CurveKind::SeEeIdeal => se_ee_ideal(x, n0),
            CurveKind::SeEePractical => se_ee_practical(x, link, pm),
            CurveKind::BwPwIdeal => bw_pw_ideal(x, rate, n0),
            CurveKind::BwPwPractical => bw_pw_practical(x, rate, n0, pm),
            CurveKind::DlPwIdeal => dl_pw_ideal(x, w, n0),
            CurveKind::DlPwPractical => dl_pw_practical(x, w, n0, pm),
        }
    };
    let points = range
        .samples()
        .into_iter()
        .map(|x| eval(x).map(|y| (x, y)))
        .collect::<Result<Vec<_>>>()?;

    let (xl, yl) = kind.axes();
    let mut curve = Curve::new(xl, yl, points)?.with_metadata("kind", kind.name());
    curve.insert_metadata("noise_psd_w_per_hz", format_value(n0));
    match kind {
        CurveKind::SeEeIdeal => {}
        CurveKind::SeEePractical => {
            curve.insert_metadata("bandwidth_hz", format_value(w));
            curve.insert_metadata("interference_w", format_value(link.interference_w()));
        }
        CurveKind::BwPwIdeal | CurveKind::BwPwPractical => {
            curve.insert_metadata("rate_bps", format_value(rate));
        }
        CurveKind::DlPwIdeal | CurveKind::DlPwPractical => {
            curve.insert_metadata("bandwidth_hz", format_value(w));
        }
    }
    if kind.is_practical() {
        record_power_model(&mut curve, pm);
    }
    range.record(&mut curve, "x");
    Ok(curve)
}

pub(crate) fn record_power_model(curve: &mut Curve, pm: &PowerModel) {
    curve.insert_metadata("drain_efficiency", format_value(pm.drain_efficiency()));
    curve.insert_metadata("circuit_psd_w_per_hz", format_value(pm.circuit_psd()));
    curve.insert_metadata("static_power_w", format_value(pm.static_power_w()));
}
