//! Multi-channel sensor traces and the preprocessing that fuses them into
//! the single composite signal fed to the chromatic processors.

use serde::{Deserialize, Serialize};

use crate::chromatic::SampledSignal;
use crate::error::{Error, Result};

/// Uniformly sampled multi-channel recording of one water-heater system.
///
/// All channels share the same sample grid. Flows are in liters/minute,
/// power in watts, temperatures in degrees Celsius.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorTrace {
    pub sample_period: f64,
    pub start_time: f64,
    pub power: Vec<f64>,
    pub hot_flow: Vec<f64>,
    pub cold_flow: Vec<f64>,
    pub t_outlet: Vec<f64>,
    pub t_inlet: Vec<f64>,
}

impl SensorTrace {
    pub fn new(
        sample_period: f64,
        start_time: f64,
        power: Vec<f64>,
        hot_flow: Vec<f64>,
        cold_flow: Vec<f64>,
        t_outlet: Vec<f64>,
        t_inlet: Vec<f64>,
    ) -> Result<Self> {
        if sample_period <= 0.0 {
            return Err(Error::NonPositivePeriod(sample_period));
        }
        let n = power.len();
        for (name, ch) in [
            ("hot_flow", &hot_flow),
            ("cold_flow", &cold_flow),
            ("t_outlet", &t_outlet),
            ("t_inlet", &t_inlet),
        ] {
            if ch.len() != n {
                return Err(Error::InvalidTrace(format!(
                    "channel {name} has {} samples, power has {n}",
                    ch.len()
                )));
            }
        }
        if power.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidTrace("negative power sample".into()));
        }
        if hot_flow.iter().chain(cold_flow.iter()).any(|&v| v < 0.0) {
            return Err(Error::InvalidTrace("negative flow sample".into()));
        }
        if t_outlet
            .iter()
            .chain(t_inlet.iter())
            .any(|&v| !(-10.0..=110.0).contains(&v))
        {
            return Err(Error::InvalidTrace(
                "temperature outside [-10, 110] C".into(),
            ));
        }
        Ok(Self {
            sample_period,
            start_time,
            power,
            hot_flow,
            cold_flow,
            t_outlet,
            t_inlet,
        })
    }

    pub fn len(&self) -> usize {
        self.power.len()
    }

    pub fn is_empty(&self) -> bool {
        self.power.is_empty()
    }

    pub fn channel(&self, name: &str) -> Result<&[f64]> {
        match name {
            "power" => Ok(&self.power),
            "hot_flow" => Ok(&self.hot_flow),
            "cold_flow" => Ok(&self.cold_flow),
            "t_outlet" => Ok(&self.t_outlet),
            "t_inlet" => Ok(&self.t_inlet),
            other => Err(Error::UnknownChannel(other.to_string())),
        }
    }
}

/// Full-scale constants and weights that make the power and flow channels
/// commensurate before fusion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormalizationConfig {
    pub full_scale_power: f64,
    pub full_scale_flow: f64,
    pub w_h: f64,
    pub w_c: f64,
    pub w_p: f64,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        Self {
            full_scale_power: 1200.0,
            full_scale_flow: 12.0,
            w_h: 1.0,
            w_c: 1.0,
            w_p: 1.0,
        }
    }
}

impl NormalizationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.full_scale_power <= 0.0 || self.full_scale_flow <= 0.0 {
            return Err(Error::InvalidTrace(
                "normalization full-scale values must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Sample-index window into a trace; samples `start_index..=end_index`
/// span `(end_index - start_index) * sample_period` seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start_index: usize,
    pub end_index: usize,
}

impl Window {
    pub fn new(start_index: usize, end_index: usize) -> Result<Self> {
        if end_index <= start_index {
            return Err(Error::WindowOutOfBounds {
                start: start_index,
                end: end_index,
                len: 0,
            });
        }
        Ok(Self {
            start_index,
            end_index,
        })
    }

    pub fn duration(&self, sample_period: f64) -> f64 {
        (self.end_index - self.start_index) as f64 * sample_period
    }
}

/// Fuses the flow and power channels into the composite signal
/// P = w_h * hot/F + w_p * power/W - w_c * cold/F.
///
/// Cold flow enters with a negative sign so that cold-dominated windows
/// drive L negative and separate by sign on the x-L map. Temperatures are
/// deliberately not folded in; the detector uses them as gates.
pub fn composite_signal(
    trace: &SensorTrace,
    window: Window,
    cfg: &NormalizationConfig,
) -> Result<SampledSignal> {
    cfg.validate()?;
    if window.end_index >= trace.len() || window.end_index <= window.start_index {
        return Err(Error::WindowOutOfBounds {
            start: window.start_index,
            end: window.end_index,
            len: trace.len(),
        });
    }
    let values = (window.start_index..=window.end_index)
        .map(|i| {
            cfg.w_h * trace.hot_flow[i] / cfg.full_scale_flow
                + cfg.w_p * trace.power[i] / cfg.full_scale_power
                - cfg.w_c * trace.cold_flow[i] / cfg.full_scale_flow
        })
        .collect();
    SampledSignal::new(values, trace.sample_period)
}

/// Linear interpolation of every channel onto a new uniform grid spanning
/// the same total duration. The effective period is rounded so the grid
/// ends exactly at the original endpoint.
pub fn resample(trace: &SensorTrace, new_period: f64) -> Result<SensorTrace> {
    if new_period <= 0.0 {
        return Err(Error::NonPositivePeriod(new_period));
    }
    if (new_period - trace.sample_period).abs() < 1e-12 {
        return Ok(trace.clone());
    }
    let n = trace.len();
    if n < 2 {
        return Err(Error::TooFewSamples { got: n, needed: 2 });
    }
    let duration = (n - 1) as f64 * trace.sample_period;
    let n_new = ((duration / new_period).round() as usize).max(1) + 1;
    let eff_period = duration / (n_new - 1) as f64;

    let interp = |ch: &[f64]| -> Vec<f64> {
        (0..n_new)
            .map(|j| {
                let pos = (j as f64 * eff_period) / trace.sample_period;
                let i0 = (pos.floor() as usize).min(n - 2);
                let frac = (pos - i0 as f64).clamp(0.0, 1.0);
                ch[i0] * (1.0 - frac) + ch[i0 + 1] * frac
            })
            .collect()
    };

    SensorTrace::new(
        eff_period,
        trace.start_time,
        interp(&trace.power),
        interp(&trace.hot_flow),
        interp(&trace.cold_flow),
        interp(&trace.t_outlet),
        interp(&trace.t_inlet),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelStats {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

/// Population statistics of one named channel.
pub fn channel_stats(trace: &SensorTrace, channel: &str) -> Result<ChannelStats> {
    let ch = trace.channel(channel)?;
    if ch.is_empty() {
        return Err(Error::TooFewSamples { got: 0, needed: 1 });
    }
    let n = ch.len() as f64;
    let mean = ch.iter().sum::<f64>() / n;
    let var = ch.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let min = ch.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = ch.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(ChannelStats {
        mean,
        std: var.sqrt(),
        min,
        max,
    })
}
