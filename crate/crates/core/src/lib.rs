//! Chromatic monitoring of residential electrical water-heater usage.
//!
//! Multi-sensor windows (power, hot flow, cold flow, temperatures) are
//! fused into one composite signal, weighted by three overlapping
//! triangular processor profiles, and reduced to an (x, y, z, L)
//! signature. Discomfort and comfort events detected by a rule engine
//! separate into clusters on the x-L plane, and per-kind event rates
//! combined with an external efficiency figure yield one of four
//! operating-strategy recommendations. A seeded scenario simulator stands
//! in for physical instrumentation.

pub mod advisor;
pub mod chromatic;
pub mod classifier;
pub mod detector;
pub mod error;
pub mod io;
pub mod signal;
pub mod sim;

pub use advisor::{advise, AdvisorInput, AdvisorThresholds, Recommendation, Verdict};
pub use chromatic::{
    processor_outputs, xyz_modified, xyz_original, ChromaticSignature, FilterBank,
    ProcessorOutputs, SampledSignal, TriangleProfile,
};
pub use classifier::{calibrate, classify, ClusterModel};
pub use detector::{detect, event_rate, DetectedEvent, DetectorConfig, EventKind, EventRates};
pub use error::{Error, Result};
pub use signal::{
    channel_stats, composite_signal, resample, NormalizationConfig, SensorTrace, Window,
};
pub use sim::{simulate, GroundTruth, OperatingMode, ScenarioKind, ScenarioScript, TankModel};
