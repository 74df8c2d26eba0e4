//! Deterministic, seeded scenario simulator.
//!
//! A first-order lumped tank model (uniform temperature, hysteresis
//! thermostat) is driven by scripted usage scenarios that reproduce the
//! four monitored cases plus unlabeled background usage. Event timing and
//! draw magnitudes are jittered multiplicatively from the script seed so
//! repeated runs form clusters rather than identical points.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::detector::EventKind;
use crate::error::{Error, Result};
use crate::signal::SensorTrace;

/// Specific heat of water, J/(kg K); tank volume in liters is treated as
/// mass in kg.
const WATER_HEAT_CAPACITY: f64 = 4186.0;

/// Lumped thermostat-controlled tank.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TankModel {
    pub volume_l: f64,
    pub set_point_c: f64,
    pub hysteresis_c: f64,
    pub element_power_w: f64,
    pub standing_loss_w_per_k: f64,
    pub inlet_temp_c: f64,
    pub ambient_temp_c: f64,
}

impl Default for TankModel {
    fn default() -> Self {
        Self {
            volume_l: 50.0,
            set_point_c: 60.0,
            hysteresis_c: 5.0,
            element_power_w: 453.0,
            standing_loss_w_per_k: 1.2,
            inlet_temp_c: 18.0,
            ambient_temp_c: 22.0,
        }
    }
}

impl TankModel {
    pub fn validate(&self) -> Result<()> {
        if self.volume_l <= 0.0 {
            return Err(Error::InvalidScript("tank volume must be positive".into()));
        }
        if self.set_point_c <= self.inlet_temp_c {
            return Err(Error::InvalidScript(
                "set point must exceed inlet temperature".into(),
            ));
        }
        if self.hysteresis_c <= 0.0 || self.element_power_w <= 0.0 {
            return Err(Error::InvalidScript(
                "hysteresis and element power must be positive".into(),
            ));
        }
        Ok(())
    }

    /// One explicit-Euler step of the tank energy balance over `dt` seconds;
    /// returns the new tank temperature.
    pub fn step(&self, temp_c: f64, heater_on: bool, hot_flow_lpm: f64, dt: f64) -> f64 {
        let heat_capacity = self.volume_l * WATER_HEAT_CAPACITY;
        let element = if heater_on { self.element_power_w } else { 0.0 };
        let standing = self.standing_loss_w_per_k * (temp_c - self.ambient_temp_c);
        // drawn hot water is replaced by inlet water
        let draw = hot_flow_lpm / 60.0 * WATER_HEAT_CAPACITY * (temp_c - self.inlet_temp_c);
        temp_c + (element - standing - draw) * dt / heat_capacity
    }
}

/// Heater operation strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatingMode {
    /// Thermostat keeps the tank at set point.
    Continuous,
    /// The user switches the element manually.
    OnDemand,
}

/// Scenario families the simulator can script.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScenarioKind {
    Case1,
    Case2,
    Case3,
    Comfort,
    Background,
}

impl ScenarioKind {
    /// The event family this scenario is expected to produce, if any.
    pub fn event_kind(&self) -> Option<EventKind> {
        match self {
            ScenarioKind::Case1 => Some(EventKind::Case1),
            ScenarioKind::Case2 => Some(EventKind::Case2),
            ScenarioKind::Case3 => Some(EventKind::Case3),
            ScenarioKind::Comfort => Some(EventKind::Comfort),
            ScenarioKind::Background => None,
        }
    }

    /// The operating mode each case naturally occurs under.
    pub fn natural_mode(&self) -> OperatingMode {
        match self {
            ScenarioKind::Case2 | ScenarioKind::Background => OperatingMode::Continuous,
            _ => OperatingMode::OnDemand,
        }
    }
}

/// One scripted simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioScript {
    pub kind: ScenarioKind,
    pub seed: u64,
    pub duration_s: f64,
    /// Fractional timing/magnitude randomization amplitude, in [0, 0.5].
    pub jitter: f64,
    pub operating_mode: OperatingMode,
}

impl ScenarioScript {
    pub fn new(kind: ScenarioKind, seed: u64) -> Self {
        Self {
            kind,
            seed,
            duration_s: 3600.0,
            jitter: 0.15,
            operating_mode: kind.natural_mode(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.duration_s <= 0.0 {
            return Err(Error::InvalidScript(format!(
                "duration must be positive, got {}",
                self.duration_s
            )));
        }
        if !(0.0..=0.5).contains(&self.jitter) {
            return Err(Error::InvalidScript(format!(
                "jitter must lie in [0, 0.5], got {}",
                self.jitter
            )));
        }
        Ok(())
    }
}

/// Ground-truth event label emitted alongside a simulated trace; times are
/// seconds from trace start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub kind: EventKind,
    pub start_s: f64,
    pub end_s: f64,
}

/// A manual heater switch action at a sample index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwitchEvent {
    pub time_index: usize,
    pub on: bool,
}

/// Applies the thermostat (Continuous) or the manual switch log (OnDemand)
/// over a given tank-temperature sequence.
///
/// Continuous: ON when T < set_point - hysteresis, OFF when T >= set_point,
/// holding the previous state in between.
pub fn heater_state_machine(
    model: &TankModel,
    mode: OperatingMode,
    tank_temp: &[f64],
    manual_events: &[SwitchEvent],
) -> Vec<bool> {
    let mut state = Vec::with_capacity(tank_temp.len());
    let mut on = false;
    for (i, &t) in tank_temp.iter().enumerate() {
        match mode {
            OperatingMode::Continuous => {
                if t < model.set_point_c - model.hysteresis_c {
                    on = true;
                } else if t >= model.set_point_c {
                    on = false;
                }
            }
            OperatingMode::OnDemand => {
                for ev in manual_events {
                    if ev.time_index == i {
                        on = ev.on;
                    }
                }
            }
        }
        state.push(on);
    }
    state
}

/// A scheduled tap opening.
#[derive(Debug, Clone, Copy)]
struct Draw {
    start: usize,
    end: usize,
    hot_lpm: f64,
    cold_lpm: f64,
}

struct Plan {
    draws: Vec<Draw>,
    switches: Vec<SwitchEvent>,
    initial_temp: f64,
    labels: Vec<GroundTruth>,
}

fn jittered(rng: &mut ChaCha8Rng, nominal: f64, jitter: f64) -> f64 {
    if jitter == 0.0 {
        return nominal;
    }
    nominal * (1.0 + jitter * rng.gen_range(-1.0..=1.0))
}

fn build_plan(model: &TankModel, script: &ScenarioScript, rng: &mut ChaCha8Rng) -> Plan {
    let j = script.jitter;
    let anchor = jittered(rng, 0.4 * script.duration_s, j).round();
    let t0 = anchor as usize;
    match script.kind {
        ScenarioKind::Case1 => {
            // cold tank, heater off; user opens the hot tap, finds cold
            // water, closes it and switches the heater on while waiting
            let tap_len = jittered(rng, 45.0, j).round().max(5.0) as usize;
            let delay = jittered(rng, 60.0, j).round().max(10.0) as usize;
            let hot = jittered(rng, 6.0, j);
            Plan {
                draws: vec![Draw {
                    start: t0,
                    end: t0 + tap_len,
                    hot_lpm: hot,
                    cold_lpm: 0.0,
                }],
                switches: vec![SwitchEvent {
                    time_index: t0 + delay,
                    on: true,
                }],
                initial_temp: model.inlet_temp_c,
                labels: vec![GroundTruth {
                    kind: EventKind::Case1,
                    start_s: t0 as f64,
                    end_s: (t0 + tap_len.max(delay)) as f64,
                }],
            }
        }
        ScenarioKind::Case2 => {
            // tank heating from cold under the thermostat; user fully opens
            // the hot tap without waiting for the set point
            let tap_len = jittered(rng, 240.0, j).round().max(30.0) as usize;
            let hot = jittered(rng, 10.0, j);
            Plan {
                draws: vec![Draw {
                    start: t0,
                    end: t0 + tap_len,
                    hot_lpm: hot,
                    cold_lpm: 0.0,
                }],
                switches: vec![],
                initial_temp: model.inlet_temp_c,
                labels: vec![GroundTruth {
                    kind: EventKind::Case2,
                    start_s: t0 as f64,
                    end_s: (t0 + tap_len) as f64,
                }],
            }
        }
        ScenarioKind::Case3 => {
            // hot tank; water comes out too hot, user mixes in more cold
            let tap_len = jittered(rng, 120.0, j).round().max(30.0) as usize;
            let hot = jittered(rng, 4.0, j);
            let cold = jittered(rng, 8.0, j);
            Plan {
                draws: vec![Draw {
                    start: t0,
                    end: t0 + tap_len,
                    hot_lpm: hot,
                    cold_lpm: cold,
                }],
                switches: vec![],
                initial_temp: model.set_point_c,
                labels: vec![GroundTruth {
                    kind: EventKind::Case3,
                    start_s: t0 as f64,
                    end_s: (t0 + tap_len) as f64,
                }],
            }
        }
        ScenarioKind::Comfort => {
            // hot tank, heater left off, generous draw
            let tap_len = jittered(rng, 300.0, j).round().max(30.0) as usize;
            let hot = jittered(rng, 5.0, j);
            Plan {
                draws: vec![Draw {
                    start: t0,
                    end: t0 + tap_len,
                    hot_lpm: hot,
                    cold_lpm: 0.0,
                }],
                switches: vec![],
                initial_temp: model.set_point_c,
                labels: vec![GroundTruth {
                    kind: EventKind::Comfort,
                    start_s: t0 as f64,
                    end_s: (t0 + tap_len) as f64,
                }],
            }
        }
        ScenarioKind::Background => {
            // a handful of small draws, thermostat active, nothing labeled
            let count = rng.gen_range(3..=6);
            let mut draws = Vec::new();
            for k in 0..count {
                let center = script.duration_s * (k as f64 + 0.5) / count as f64;
                let start = jittered(rng, center, j).round().max(1.0) as usize;
                let len = jittered(rng, 45.0, j).round().max(10.0) as usize;
                let hot = jittered(rng, 2.0, j);
                draws.push(Draw {
                    start,
                    end: start + len,
                    hot_lpm: hot,
                    cold_lpm: 0.0,
                });
            }
            Plan {
                draws,
                switches: vec![],
                initial_temp: model.set_point_c,
                labels: vec![],
            }
        }
    }
}

/// Runs one scripted scenario and returns the per-second trace together
/// with its ground-truth labels. Identical inputs produce bit-identical
/// output.
pub fn simulate(model: &TankModel, script: &ScenarioScript) -> Result<(SensorTrace, Vec<GroundTruth>)> {
    model.validate()?;
    script.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(script.seed);
    let plan = build_plan(model, script, &mut rng);

    let n = script.duration_s.round() as usize + 1;
    let noise = Normal::new(0.0, 3.0).expect("valid sigma");

    let mut power = Vec::with_capacity(n);
    let mut hot_flow = Vec::with_capacity(n);
    let mut cold_flow = Vec::with_capacity(n);
    let mut t_outlet = Vec::with_capacity(n);
    let t_inlet = vec![model.inlet_temp_c; n];

    let mut temp = plan.initial_temp;
    let mut on = false;
    for i in 0..n {
        let (mut hot, mut cold) = (0.0, 0.0);
        for d in &plan.draws {
            if i >= d.start && i < d.end {
                hot += d.hot_lpm;
                cold += d.cold_lpm;
            }
        }
        match script.operating_mode {
            OperatingMode::Continuous => {
                if temp < model.set_point_c - model.hysteresis_c {
                    on = true;
                } else if temp >= model.set_point_c {
                    on = false;
                }
            }
            OperatingMode::OnDemand => {
                for ev in &plan.switches {
                    if ev.time_index == i {
                        on = ev.on;
                    }
                }
            }
        }
        let p = if on {
            let eps: f64 = noise.sample(&mut rng);
            (model.element_power_w + eps.clamp(-10.0, 10.0)).max(0.0)
        } else {
            0.0
        };
        power.push(p);
        hot_flow.push(hot);
        cold_flow.push(cold);
        t_outlet.push(temp.clamp(-10.0, 110.0));
        temp = model.step(temp, on, hot, 1.0);
    }

    let trace = SensorTrace::new(1.0, 0.0, power, hot_flow, cold_flow, t_outlet, t_inlet)?;
    Ok((trace, plan.labels))
}
