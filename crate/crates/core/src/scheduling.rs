//! Offline energy-minimal FIFO scheduling of a known packet batch under a
//! common deadline.
//!
//! Transmission energy of a packet depends on its duration only through its
//! rate, and is convex in duration. The optimal departure curve is therefore
//! the taut string under the cumulative-arrival staircase: a sequence of
//! constant-rate segments, rates non-decreasing in time, each segment ending
//! either at the deadline or exactly when the next packet arrives. With
//! circuit or static power each rate is additionally floored at the
//! per-bit energy minimizer, so durations stop stretching once idle time
//! becomes cheaper than slower transmission.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linkmodel::{capacity_bps, supply_power_w, tx_power_for_rate_w, LinkParams, PowerModel};
use crate::numerics::{minimize_unimodal, SearchBracket};

/// Relative slack allowed on the deadline when validating a schedule.
pub const DEADLINE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PacketBatch {
    packet_bits: Vec<f64>,
    arrival_s: Vec<f64>,
    deadline_s: f64,
}

impl PacketBatch {
    pub fn new(packet_bits: Vec<f64>, arrival_s: Vec<f64>, deadline_s: f64) -> Result<Self> {
        if packet_bits.len() != arrival_s.len() {
            return Err(invalid(format!(
                "{} packet sizes but {} arrival times",
                packet_bits.len(),
                arrival_s.len()
            )));
        }
        if !(deadline_s > 0.0 && deadline_s.is_finite()) {
            return Err(invalid(format!(
                "deadline must be positive, got {deadline_s}"
            )));
        }
        if let Some(b) = packet_bits.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
            return Err(invalid(format!("packet sizes must be positive, got {b}")));
        }
        if let Some(a) = arrival_s.iter().find(|a| !(**a >= 0.0 && **a < deadline_s)) {
            return Err(invalid(format!(
                "arrival times must lie in [0, deadline), got {a} with deadline {deadline_s}"
            )));
        }
        if arrival_s.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("arrival times must be non-decreasing"));
        }
        Ok(Self {
            packet_bits,
            arrival_s,
            deadline_s,
        })
    }

    /// All packets present at time zero.
    pub fn simultaneous(packet_bits: Vec<f64>, deadline_s: f64) -> Result<Self> {
        let arrivals = vec![0.0; packet_bits.len()];
        Self::new(packet_bits, arrivals, deadline_s)
    }

    pub fn packet_bits(&self) -> &[f64] {
        &self.packet_bits
    }

    pub fn arrival_s(&self) -> &[f64] {
        &self.arrival_s
    }

    pub fn deadline_s(&self) -> f64 {
        self.deadline_s
    }

    pub fn len(&self) -> usize {
        self.packet_bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.packet_bits.is_empty()
    }

    pub fn with_deadline(&self, deadline_s: f64) -> Result<Self> {
        Self::new(self.packet_bits.clone(), self.arrival_s.clone(), deadline_s)
    }
}

/// Start times and durations, one per packet in FIFO order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schedule {
    pub start_s: Vec<f64>,
    pub durations_s: Vec<f64>,
}

impl Schedule {
    /// Packets start as soon as they have arrived and the link is free.
    pub fn from_durations(batch: &PacketBatch, durations_s: Vec<f64>) -> Result<Self> {
        if durations_s.len() != batch.len() {
            return Err(Error::InvalidSchedule(format!(
                "{} durations for {} packets",
                durations_s.len(),
                batch.len()
            )));
        }
        let mut start_s = Vec::with_capacity(durations_s.len());
        let mut free_at = 0.0f64;
        for (a, d) in batch.arrival_s.iter().zip(&durations_s) {
            let s = free_at.max(*a);
            start_s.push(s);
            free_at = s + d;
        }
        Ok(Self {
            start_s,
            durations_s,
        })
    }

    pub fn finish_s(&self) -> Option<f64> {
        self.start_s
            .last()
            .zip(self.durations_s.last())
            .map(|(s, d)| s + d)
    }

    /// Checks causality, FIFO non-overlap and the deadline.
    pub fn validate(&self, batch: &PacketBatch) -> Result<()> {
        let n = batch.len();
        if self.start_s.len() != n || self.durations_s.len() != n {
            return Err(Error::InvalidSchedule(format!(
                "schedule has {} starts and {} durations for {} packets",
                self.start_s.len(),
                self.durations_s.len(),
                n
            )));
        }
        let slack = DEADLINE_TOLERANCE * batch.deadline_s;
        for i in 0..n {
            let (s, d) = (self.start_s[i], self.durations_s[i]);
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::InvalidSchedule(format!(
                    "packet {i}: duration {d} is not positive"
                )));
            }
            if !(s >= batch.arrival_s[i]) {
                return Err(Error::InvalidSchedule(format!(
                    "packet {i}: starts at {s} before its arrival at {}",
                    batch.arrival_s[i]
                )));
            }
            if i > 0 {
                let prev_end = self.start_s[i - 1] + self.durations_s[i - 1];
                if s < prev_end - slack {
                    return Err(Error::InvalidSchedule(format!(
                        "packet {i}: starts at {s} before packet {} finishes at {prev_end}",
                        i - 1
                    )));
                }
            }
            if s + d > batch.deadline_s + slack {
                return Err(Error::InvalidSchedule(format!(
                    "packet {i}: finishes at {} after the deadline {}",
                    s + d,
                    batch.deadline_s
                )));
            }
        }
        Ok(())
    }
}

/// Whether static power accrues only while transmitting or over the whole
/// window from the first arrival to the deadline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StaticPowerAccounting {
    #[default]
    ActiveOnly,
    AlwaysOn,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SchedulerConfig {
    /// Cap on radiated power; without it every deadline is feasible.
    pub max_tx_power_w: Option<f64>,
    pub static_power: StaticPowerAccounting,
}

/// Energy drawn from the supply to send `bits` in `duration_s`.
pub fn packet_energy_j(
    bits: f64,
    duration_s: f64,
    link: &LinkParams,
    pm: &PowerModel,
) -> Result<f64> {
    if !(bits > 0.0 && bits.is_finite()) {
        return Err(invalid(format!("packet size must be positive, got {bits}")));
    }
    if !(duration_s > 0.0 && duration_s.is_finite()) {
        return Err(invalid(format!(
            "duration must be positive, got {duration_s}"
        )));
    }
    let tx = tx_power_for_rate_w(bits / duration_s, link)?;
    Ok(duration_s * supply_power_w(tx, link.bandwidth_hz(), pm)?)
}

pub fn lazy_schedule(batch: &PacketBatch, link: &LinkParams, pm: &PowerModel) -> Result<Schedule> {
    lazy_schedule_with(batch, link, pm, &SchedulerConfig::default())
}

pub fn lazy_schedule_with(
    batch: &PacketBatch,
    link: &LinkParams,
    pm: &PowerModel,
    config: &SchedulerConfig,
) -> Result<Schedule> {
    if batch.is_empty() {
        return Ok(Schedule {
            start_s: Vec::new(),
            durations_s: Vec::new(),
        });
    }
    let mut rates = taut_string_rates(batch);

    let max_rate = match config.max_tx_power_w {
        Some(p) => {
            if !(p > 0.0) {
                return Err(invalid(format!(
                    "max transmit power must be positive, got {p}"
                )));
            }
            capacity_bps(p, link)?
        }
        None => f64::INFINITY,
    };
    let needed = rates.iter().copied().fold(0.0, f64::max);
    if needed > max_rate * (1.0 + 1e-12) {
        return Err(Error::InfeasibleSchedule(format!(
            "meeting the deadline needs {needed} bit/s but the power cap allows {max_rate} bit/s"
        )));
    }
    let floor = most_efficient_rate(link, pm, config.static_power)?.min(max_rate);
    for r in &mut rates {
        *r = r.max(floor);
    }

    let durations = batch
        .packet_bits
        .iter()
        .zip(&rates)
        .map(|(b, r)| b / r)
        .collect();
    let schedule = Schedule::from_durations(batch, durations)?;
    schedule.validate(batch)?;
    Ok(schedule)
}

/// Per-packet rates of the minimum-energy FIFO schedule without any rate floor.
fn taut_string_rates(batch: &PacketBatch) -> Vec<f64> {
    let bits = &batch.packet_bits;
    let arrivals = &batch.arrival_s;
    let n = bits.len();
    let mut rates = vec![0.0; n];
    let mut k = 0;
    let mut t = arrivals[0];
    while k < n {
        t = t.max(arrivals[k]);
        let total: f64 = bits[k..].iter().sum();
        let mut rate = total / (batch.deadline_s - t);
        let mut end = n;
        let mut sent = 0.0;
        for j in k + 1..n {
            sent += bits[j - 1];
            if arrivals[j] > t {
                let r = sent / (arrivals[j] - t);
                if r < rate {
                    rate = r;
                    end = j;
                }
            }
        }
        rates[k..end].fill(rate);
        if end < n {
            t = arrivals[end];
        }
        k = end;
    }
    rates
}

/// Rate minimizing supply energy per bit, or 0 when slower is always cheaper.
fn most_efficient_rate(
    link: &LinkParams,
    pm: &PowerModel,
    accounting: StaticPowerAccounting,
) -> Result<f64> {
    let w = link.bandwidth_hz();
    let active_pm = match accounting {
        StaticPowerAccounting::ActiveOnly => *pm,
        StaticPowerAccounting::AlwaysOn => {
            PowerModel::new(pm.drain_efficiency(), pm.circuit_psd(), 0.0)?
        }
    };
    if active_pm.overhead_w(w) <= 0.0 {
        return Ok(0.0);
    }
    let per_bit = |se: f64| {
        let rate = se * w;
        tx_power_for_rate_w(rate, link)
            .and_then(|p| supply_power_w(p, w, &active_pm))
            .map_or(f64::NAN, |s| s / rate)
    };
    let bracket = SearchBracket::new(1e-12, 256.0)?;
    Ok(minimize_unimodal(per_bit, &bracket)?.x * w)
}

pub fn schedule_energy_j(
    batch: &PacketBatch,
    schedule: &Schedule,
    link: &LinkParams,
    pm: &PowerModel,
) -> Result<f64> {
    schedule_energy_with(batch, schedule, link, pm, StaticPowerAccounting::ActiveOnly)
}

pub fn schedule_energy_with(
    batch: &PacketBatch,
    schedule: &Schedule,
    link: &LinkParams,
    pm: &PowerModel,
    accounting: StaticPowerAccounting,
) -> Result<f64> {
    schedule.validate(batch)?;
    let (active_pm, idle_energy) = match accounting {
        StaticPowerAccounting::ActiveOnly => (*pm, 0.0),
        StaticPowerAccounting::AlwaysOn => {
            let window = batch
                .arrival_s
                .first()
                .map_or(0.0, |a| batch.deadline_s - a);
            (
                PowerModel::new(pm.drain_efficiency(), pm.circuit_psd(), 0.0)?,
                pm.static_power_w() * window,
            )
        }
    };
    let mut total = idle_energy;
    for (b, d) in batch.packet_bits.iter().zip(&schedule.durations_s) {
        total += packet_energy_j(*b, *d, link, &active_pm)?;
    }
    Ok(total)
}
