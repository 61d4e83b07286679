//! Shannon link quantities and the supply-power model.
//!
//! All quantities are linear SI units (W, Hz, W/Hz); dB appears only in
//! [`PathLossModel::reference_loss_db`].

use serde::Serialize;

use crate::error::{invalid, Result};

use std::f64::consts::LN_2;

/// Bandwidth, noise density and interference of a point-to-point link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkParams {
    bandwidth_hz: f64,
    noise_psd: f64,
    interference_w: f64,
}

impl LinkParams {
    pub fn new(bandwidth_hz: f64, noise_psd: f64) -> Result<Self> {
        Self::with_interference(bandwidth_hz, noise_psd, 0.0)
    }

    pub fn with_interference(
        bandwidth_hz: f64,
        noise_psd: f64,
        interference_w: f64,
    ) -> Result<Self> {
        if !(bandwidth_hz > 0.0 && bandwidth_hz.is_finite()) {
            return Err(invalid(format!(
                "bandwidth must be positive, got {bandwidth_hz}"
            )));
        }
        if !(noise_psd > 0.0 && noise_psd.is_finite()) {
            return Err(invalid(format!(
                "noise PSD must be positive, got {noise_psd}"
            )));
        }
        if !(interference_w >= 0.0 && interference_w.is_finite()) {
            return Err(invalid(format!(
                "interference must be non-negative, got {interference_w}"
            )));
        }
        Ok(Self {
            bandwidth_hz,
            noise_psd,
            interference_w,
        })
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz
    }

    pub fn noise_psd(&self) -> f64 {
        self.noise_psd
    }

    pub fn interference_w(&self) -> f64 {
        self.interference_w
    }

    /// Noise plus interference power at the receiver, `W·N0 + I`.
    pub fn noise_floor_w(&self) -> f64 {
        self.bandwidth_hz * self.noise_psd + self.interference_w
    }

    /// Same link at a different bandwidth.
    pub fn with_bandwidth(&self, bandwidth_hz: f64) -> Result<Self> {
        Self::with_interference(bandwidth_hz, self.noise_psd, self.interference_w)
    }
}

/// Maps radiated power to power drawn from the supply:
/// `P / drain_efficiency + circuit_psd · W + static_power_w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerModel {
    drain_efficiency: f64,
    circuit_psd: f64,
    static_power_w: f64,
}

impl PowerModel {
    pub fn new(drain_efficiency: f64, circuit_psd: f64, static_power_w: f64) -> Result<Self> {
        if !(drain_efficiency > 0.0 && drain_efficiency <= 1.0) {
            return Err(invalid(format!(
                "drain efficiency must lie in (0, 1], got {drain_efficiency}"
            )));
        }
        if !(circuit_psd >= 0.0 && circuit_psd.is_finite()) {
            return Err(invalid(format!(
                "circuit PSD must be non-negative, got {circuit_psd}"
            )));
        }
        if !(static_power_w >= 0.0 && static_power_w.is_finite()) {
            return Err(invalid(format!(
                "static power must be non-negative, got {static_power_w}"
            )));
        }
        Ok(Self {
            drain_efficiency,
            circuit_psd,
            static_power_w,
        })
    }

    /// Lossless amplifier, no circuit or static power.
    pub fn ideal() -> Self {
        Self {
            drain_efficiency: 1.0,
            circuit_psd: 0.0,
            static_power_w: 0.0,
        }
    }

    pub fn drain_efficiency(&self) -> f64 {
        self.drain_efficiency
    }

    pub fn circuit_psd(&self) -> f64 {
        self.circuit_psd
    }

    pub fn static_power_w(&self) -> f64 {
        self.static_power_w
    }

    /// Transmit-independent power at bandwidth `W`: `ρ_c·W + P_0`.
    pub fn overhead_w(&self, bandwidth_hz: f64) -> f64 {
        self.circuit_psd * bandwidth_hz + self.static_power_w
    }

    pub fn is_ideal(&self) -> bool {
        *self == Self::ideal()
    }
}

/// Log-distance path loss `L(d) = 10^(L_ref/10) · (d / d_ref)^α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathLossModel {
    exponent: f64,
    reference_loss_db: f64,
    reference_distance_m: f64,
}

impl PathLossModel {
    pub fn new(exponent: f64, reference_loss_db: f64, reference_distance_m: f64) -> Result<Self> {
        if !(exponent >= 2.0 && exponent.is_finite()) {
            return Err(invalid(format!(
                "path-loss exponent must be >= 2, got {exponent}"
            )));
        }
        if !reference_loss_db.is_finite() {
            return Err(invalid("reference loss must be finite"));
        }
        if !(reference_distance_m > 0.0 && reference_distance_m.is_finite()) {
            return Err(invalid(format!(
                "reference distance must be positive, got {reference_distance_m}"
            )));
        }
        Ok(Self {
            exponent,
            reference_loss_db,
            reference_distance_m,
        })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn reference_loss_db(&self) -> f64 {
        self.reference_loss_db
    }

    pub fn reference_distance_m(&self) -> f64 {
        self.reference_distance_m
    }
}

/// Shannon rate `W · log2(1 + P / (W·N0 + I))` in bit/s.
pub fn capacity_bps(tx_power_w: f64, link: &LinkParams) -> Result<f64> {
    if !(tx_power_w >= 0.0) {
        return Err(invalid(format!(
            "transmit power must be non-negative, got {tx_power_w}"
        )));
    }
    Ok(link.bandwidth_hz * (tx_power_w / link.noise_floor_w()).ln_1p() / LN_2)
}

/// Transmit power needed for `rate_bps`: `(W·N0 + I) · (2^(R/W) − 1)`.
pub fn tx_power_for_rate_w(rate_bps: f64, link: &LinkParams) -> Result<f64> {
    if !(rate_bps >= 0.0) {
        return Err(invalid(format!(
            "rate must be non-negative, got {rate_bps}"
        )));
    }
    Ok(link.noise_floor_w() * (rate_bps / link.bandwidth_hz * LN_2).exp_m1())
}

/// Supply power `P / η_PA + ρ_c · W + P_0`.
pub fn supply_power_w(tx_power_w: f64, bandwidth_hz: f64, pm: &PowerModel) -> Result<f64> {
    if !(tx_power_w >= 0.0) {
        return Err(invalid(format!(
            "transmit power must be non-negative, got {tx_power_w}"
        )));
    }
    if !(bandwidth_hz >= 0.0) {
        return Err(invalid(format!(
            "bandwidth must be non-negative, got {bandwidth_hz}"
        )));
    }
    Ok(tx_power_w / pm.drain_efficiency + pm.overhead_w(bandwidth_hz))
}

/// Linear path loss at `distance_m`.
pub fn path_loss_linear(distance_m: f64, plm: &PathLossModel) -> Result<f64> {
    if !(distance_m > 0.0 && distance_m.is_finite()) {
        return Err(invalid(format!(
            "distance must be positive, got {distance_m}"
        )));
    }
    Ok(db_to_linear(plm.reference_loss_db)
        * (distance_m / plm.reference_distance_m).powf(plm.exponent))
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
