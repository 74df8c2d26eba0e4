//! Rule-based discomfort/comfort event detection.
//!
//! The detector scans a trace chronologically. Every rising edge of the
//! hot-water flow opens a candidate window of fixed length; the four rules
//! are evaluated in priority order (Case1 first, Comfort last) and at most
//! one event is emitted per non-overlapping window. Each event carries the
//! chromatic signature of its window computed with the modified transform.

use serde::{Deserialize, Serialize};

use crate::chromatic::{processor_outputs, xyz_modified, ChromaticSignature, FilterBank};
use crate::error::{Error, Result};
use crate::signal::{composite_signal, NormalizationConfig, SensorTrace, Window};

/// The four monitored usage patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EventKind {
    /// Hot tap opened on a cold tank, heater switched on shortly after.
    Case1,
    /// Full hot draw while the heater is still heating toward set point.
    Case2,
    /// Hot and cold taps open together with cold dominating.
    Case3,
    /// Substantial hot draw with the heater left off.
    Comfort,
}

impl EventKind {
    pub const ALL: [EventKind; 4] = [
        EventKind::Case1,
        EventKind::Case2,
        EventKind::Case3,
        EventKind::Comfort,
    ];

    pub fn is_discomfort(&self) -> bool {
        !matches!(self, EventKind::Comfort)
    }
}

impl std::fmt::Display for EventKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EventKind::Case1 => "Case1",
            EventKind::Case2 => "Case2",
            EventKind::Case3 => "Case3",
            EventKind::Comfort => "Comfort",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for EventKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Case1" => Ok(EventKind::Case1),
            "Case2" => Ok(EventKind::Case2),
            "Case3" => Ok(EventKind::Case3),
            "Comfort" => Ok(EventKind::Comfort),
            other => Err(Error::Parse {
                line: 0,
                message: format!("unknown event kind `{other}`"),
            }),
        }
    }
}

/// Which signal proves "set point not reached" in the Case2 rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Case2Gate {
    /// Outlet temperature below the cold threshold (default).
    #[default]
    Temperature,
    /// Heater power draw alone; skips the temperature condition.
    Power,
}

/// All detection thresholds. The paper states the rules qualitatively;
/// every numeric value here is a tunable default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    /// Flow-on threshold, lpm.
    pub f_min: f64,
    /// Fully-open flow threshold, lpm.
    pub f_full: f64,
    /// Heater-on power threshold, W.
    pub p_on: f64,
    /// "Water is cold" outlet temperature, C.
    pub t_cold: f64,
    /// Case1: max delay between tap opening and heater switch-on, s.
    pub case1_reaction_window: f64,
    /// Minimum sustained-condition duration, s.
    pub d_min: f64,
    /// Comfort: minimum cumulative hot draw, liters.
    pub v_min: f64,
    /// Event window length T_w, s.
    pub window_length: f64,
    pub case2_gate: Case2Gate,
    /// Degenerate-signature guard forwarded to the transform.
    pub epsilon_l: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            f_min: 0.5,
            f_full: 6.0,
            p_on: 100.0,
            t_cold: 35.0,
            case1_reaction_window: 120.0,
            d_min: 60.0,
            v_min: 10.0,
            window_length: 600.0,
            case2_gate: Case2Gate::default(),
            epsilon_l: crate::chromatic::DEFAULT_EPSILON_L,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.f_min,
            self.f_full,
            self.p_on,
            self.t_cold,
            self.case1_reaction_window,
            self.d_min,
            self.v_min,
            self.window_length,
        ];
        if positive.iter().any(|&v| v <= 0.0) {
            return Err(Error::InvalidTrace(
                "detector thresholds must be positive".into(),
            ));
        }
        if self.f_full <= self.f_min {
            return Err(Error::InvalidTrace("f_full must exceed f_min".into()));
        }
        if self.window_length < self.case1_reaction_window {
            return Err(Error::InvalidTrace(
                "window_length must cover case1_reaction_window".into(),
            ));
        }
        Ok(())
    }
}

/// One detected event with its signature window.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectedEvent {
    pub kind: EventKind,
    pub window: Window,
    pub signature: ChromaticSignature,
    /// Epoch seconds of the triggering sample.
    pub trigger_time: f64,
}

/// A candidate window whose signature could not be computed; reported as a
/// diagnostic instead of aborting the scan.
#[derive(Debug, Clone)]
pub struct DroppedEvent {
    pub kind: EventKind,
    pub trigger_index: usize,
    pub reason: String,
}

/// Scan result: emitted events plus any dropped candidates.
#[derive(Debug, Clone, Default)]
pub struct Detection {
    pub events: Vec<DetectedEvent>,
    pub dropped: Vec<DroppedEvent>,
}

/// Scans a trace and returns all detected events in trigger order.
///
/// The filter bank must span exactly `cfg.window_length`.
pub fn detect(
    trace: &SensorTrace,
    cfg: &DetectorConfig,
    bank: &FilterBank,
    norm: &NormalizationConfig,
) -> Result<Detection> {
    cfg.validate()?;
    norm.validate()?;
    let dt = trace.sample_period;
    let w = (cfg.window_length / dt).round() as usize;
    if w < 2 {
        return Err(Error::NonPositiveWindow(cfg.window_length));
    }
    if (bank.domain_length() - cfg.window_length).abs() > 1e-9 * cfg.window_length {
        return Err(Error::DomainMismatch {
            signal_s: bank.domain_length(),
            bank_s: cfg.window_length,
        });
    }
    if trace.len() <= w {
        return Err(Error::TraceTooShort {
            len: trace.len(),
            needed: w + 1,
        });
    }

    let mut detection = Detection::default();
    let mut i = 0usize;
    let last_trigger = trace.len() - 1 - w;
    while i <= last_trigger {
        if !hot_edge(trace, cfg, i) {
            i += 1;
            continue;
        }
        let window = Window::new(i, i + w).expect("w >= 2");
        match classify_window(trace, cfg, window) {
            Some(kind) => {
                let sig = composite_signal(trace, window, norm)
                    .and_then(|s| processor_outputs(&s, bank))
                    .and_then(|p| xyz_modified(&p, cfg.epsilon_l));
                match sig {
                    Ok(signature) => {
                        detection.events.push(DetectedEvent {
                            kind,
                            window,
                            signature,
                            trigger_time: trace.start_time + i as f64 * dt,
                        });
                        // non-overlapping windows: skip past this one
                        i += w + 1;
                    }
                    Err(err) => {
                        detection.dropped.push(DroppedEvent {
                            kind,
                            trigger_index: i,
                            reason: err.to_string(),
                        });
                        i += w + 1;
                    }
                }
            }
            None => i += 1,
        }
    }
    Ok(detection)
}

fn hot_edge(trace: &SensorTrace, cfg: &DetectorConfig, i: usize) -> bool {
    let now = trace.hot_flow[i] >= cfg.f_min;
    let before = i > 0 && trace.hot_flow[i - 1] >= cfg.f_min;
    now && !before
}

/// Evaluates the four rules over one candidate window, most specific first.
fn classify_window(trace: &SensorTrace, cfg: &DetectorConfig, window: Window) -> Option<EventKind> {
    if is_case1(trace, cfg, window) {
        Some(EventKind::Case1)
    } else if is_case2(trace, cfg, window) {
        Some(EventKind::Case2)
    } else if is_case3(trace, cfg, window) {
        Some(EventKind::Case3)
    } else if is_comfort(trace, cfg, window) {
        Some(EventKind::Comfort)
    } else {
        None
    }
}

/// Hot tap opens on cold water with the heater off, then the heater is
/// switched on within the reaction window.
fn is_case1(trace: &SensorTrace, cfg: &DetectorConfig, window: Window) -> bool {
    let i = window.start_index;
    if trace.power[i] >= cfg.p_on || trace.t_outlet[i] >= cfg.t_cold {
        return false;
    }
    let dt = trace.sample_period;
    let reach = ((cfg.case1_reaction_window / dt).round() as usize).min(window.end_index - i);
    (i + 1..=i + reach).any(|j| trace.power[j] >= cfg.p_on && trace.power[j - 1] < cfg.p_on)
}

/// Full hot draw, no cold, while the heater is drawing power and (by the
/// default gate) the outlet water is still cold.
fn is_case2(trace: &SensorTrace, cfg: &DetectorConfig, window: Window) -> bool {
    let dt = trace.sample_period;
    let need = ((cfg.d_min / dt).round() as usize).max(1);
    let mut run = 0usize;
    for j in window.start_index..=window.end_index {
        let temp_ok = match cfg.case2_gate {
            Case2Gate::Temperature => trace.t_outlet[j] < cfg.t_cold,
            Case2Gate::Power => true,
        };
        let holds = trace.hot_flow[j] >= cfg.f_full
            && trace.cold_flow[j] < cfg.f_min
            && trace.power[j] >= cfg.p_on
            && temp_ok;
        if holds {
            run += 1;
            if run >= need {
                return true;
            }
        } else {
            run = 0;
        }
    }
    false
}

/// Both taps open together with cold dominating, sustained long enough.
fn is_case3(trace: &SensorTrace, cfg: &DetectorConfig, window: Window) -> bool {
    let dt = trace.sample_period;
    let need = ((cfg.d_min / dt).round() as usize).max(1);
    let mut run_start = None;
    for j in window.start_index..=window.end_index {
        let both = trace.hot_flow[j] >= cfg.f_min && trace.cold_flow[j] >= cfg.f_min;
        match (both, run_start) {
            (true, None) => run_start = Some(j),
            (false, Some(s)) => {
                if case3_run_holds(trace, cfg, s, j - 1, need) {
                    return true;
                }
                run_start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = run_start {
        return case3_run_holds(trace, cfg, s, window.end_index, need);
    }
    false
}

fn case3_run_holds(
    trace: &SensorTrace,
    _cfg: &DetectorConfig,
    start: usize,
    end: usize,
    need: usize,
) -> bool {
    if end + 1 - start < need {
        return false;
    }
    let n = (end + 1 - start) as f64;
    let mean_hot = trace.hot_flow[start..=end].iter().sum::<f64>() / n;
    let mean_cold = trace.cold_flow[start..=end].iter().sum::<f64>() / n;
    mean_cold > mean_hot
}

/// Cumulative hot draw reaches the comfort volume while the heater stays
/// off for the whole window.
fn is_comfort(trace: &SensorTrace, cfg: &DetectorConfig, window: Window) -> bool {
    let dt = trace.sample_period;
    let mut volume_l = 0.0;
    for j in window.start_index..=window.end_index {
        if trace.power[j] >= cfg.p_on {
            return false;
        }
        volume_l += trace.hot_flow[j] * dt / 60.0;
    }
    volume_l >= cfg.v_min
}

/// Per-kind event rates extrapolated to events/week.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EventRates {
    pub case1: f64,
    pub case2: f64,
    pub case3: f64,
    pub comfort: f64,
}

impl EventRates {
    /// Combined rate of the three discomfort cases.
    pub fn discomfort(&self) -> f64 {
        self.case1 + self.case2 + self.case3
    }
}

pub const SECONDS_PER_WEEK: f64 = 604_800.0;

/// Scales per-kind counts over `horizon` seconds to events/week.
pub fn event_rate(kinds: impl IntoIterator<Item = EventKind>, horizon: f64) -> Result<EventRates> {
    if horizon <= 0.0 {
        return Err(Error::NonPositiveWindow(horizon));
    }
    let scale = SECONDS_PER_WEEK / horizon;
    let mut rates = EventRates::default();
    for kind in kinds {
        match kind {
            EventKind::Case1 => rates.case1 += scale,
            EventKind::Case2 => rates.case2 += scale,
            EventKind::Case3 => rates.case3 += scale,
            EventKind::Comfort => rates.comfort += scale,
        }
    }
    Ok(rates)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace_from(
        power: Vec<f64>,
        hot: Vec<f64>,
        cold: Vec<f64>,
        t_out: Vec<f64>,
    ) -> SensorTrace {
        let n = power.len();
        SensorTrace::new(1.0, 0.0, power, hot, cold, t_out, vec![18.0; n]).unwrap()
    }

    #[test]
    fn flat_zero_trace_no_events() {
        let n = 1200;
        let trace = trace_from(vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![20.0; n]);
        let cfg = DetectorConfig::default();
        let bank = FilterBank::default_bank(cfg.window_length).unwrap();
        let d = detect(&trace, &cfg, &bank, &NormalizationConfig::default()).unwrap();
        assert!(d.events.is_empty());
        assert!(d.dropped.is_empty());
    }

    #[test]
    fn case3_synthetic_negative_l() {
        let n = 1200;
        let mut hot = vec![0.0; n];
        let mut cold = vec![0.0; n];
        for j in 100..190 {
            hot[j] = 4.0;
            cold[j] = 8.0;
        }
        let trace = trace_from(vec![0.0; n], hot, cold, vec![60.0; n]);
        let cfg = DetectorConfig::default();
        let bank = FilterBank::default_bank(cfg.window_length).unwrap();
        let d = detect(&trace, &cfg, &bank, &NormalizationConfig::default()).unwrap();
        assert_eq!(d.events.len(), 1);
        let ev = &d.events[0];
        assert_eq!(ev.kind, EventKind::Case3);
        assert!(ev.signature.l_index < 0.0, "L = {}", ev.signature.l_index);
        assert_eq!(ev.window.start_index, 100);
    }

    #[test]
    fn trace_too_short() {
        let n = 100;
        let trace = trace_from(vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![20.0; n]);
        let cfg = DetectorConfig::default();
        let bank = FilterBank::default_bank(cfg.window_length).unwrap();
        assert!(matches!(
            detect(&trace, &cfg, &bank, &NormalizationConfig::default()),
            Err(Error::TraceTooShort { .. })
        ));
    }

    #[test]
    fn comfort_requires_volume_and_no_power() {
        let n = 1200;
        let mut hot = vec![0.0; n];
        hot[100..400].fill(5.0); // 25 liters over 300 s
        let trace = trace_from(vec![0.0; n], hot, vec![0.0; n], vec![60.0; n]);
        let cfg = DetectorConfig::default();
        let bank = FilterBank::default_bank(cfg.window_length).unwrap();
        let d = detect(&trace, &cfg, &bank, &NormalizationConfig::default()).unwrap();
        assert_eq!(d.events.len(), 1);
        assert_eq!(d.events[0].kind, EventKind::Comfort);
        assert!(d.events[0].signature.l_index > 0.0);
    }

    #[test]
    fn small_draw_is_not_comfort() {
        let n = 1200;
        let mut hot = vec![0.0; n];
        hot[100..160].fill(5.0); // only 5 liters
        let trace = trace_from(vec![0.0; n], hot, vec![0.0; n], vec![60.0; n]);
        let cfg = DetectorConfig::default();
        let bank = FilterBank::default_bank(cfg.window_length).unwrap();
        let d = detect(&trace, &cfg, &bank, &NormalizationConfig::default()).unwrap();
        assert!(d.events.is_empty());
    }

    #[test]
    fn case2_power_gate_skips_temperature() {
        let n = 1200;
        let mut hot = vec![0.0; n];
        hot[100..300].fill(8.0);
        // outlet already warm: temperature gate rejects, power gate accepts
        let trace = trace_from(vec![453.0; n], hot, vec![0.0; n], vec![50.0; n]);
        let mut cfg = DetectorConfig::default();
        let bank = FilterBank::default_bank(cfg.window_length).unwrap();
        let d = detect(&trace, &cfg, &bank, &NormalizationConfig::default()).unwrap();
        assert!(d.events.is_empty());
        cfg.case2_gate = Case2Gate::Power;
        let d = detect(&trace, &cfg, &bank, &NormalizationConfig::default()).unwrap();
        assert_eq!(d.events.len(), 1);
        assert_eq!(d.events[0].kind, EventKind::Case2);
    }

    #[test]
    fn event_rate_examples() {
        let r = event_rate(
            vec![EventKind::Case1, EventKind::Case1, EventKind::Case1],
            SECONDS_PER_WEEK,
        )
        .unwrap();
        assert!((r.case1 - 3.0).abs() < 1e-12);

        let r = event_rate(vec![], SECONDS_PER_WEEK).unwrap();
        assert_eq!(r, EventRates::default());

        let r = event_rate(vec![EventKind::Case2], 302_400.0).unwrap();
        assert!((r.case2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn config_invariants_enforced() {
        let cfg = DetectorConfig {
            f_full: 0.2,
            ..DetectorConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
