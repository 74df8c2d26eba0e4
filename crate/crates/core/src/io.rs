//! File formats shared by the CLI commands.
//!
//! - trace CSV: header `t_s,power_w,hot_flow_lpm,cold_flow_lpm,t_outlet_c,t_inlet_c`,
//!   one row per sample, UTF-8, LF line endings
//! - label / event logs: one JSON record per line
//! - cluster model: TOML
//! - x-L map: CSV for external plotting

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classifier::ClusterModel;
use crate::detector::{DetectedEvent, EventKind};
use crate::error::{Error, Result};
use crate::signal::SensorTrace;
use crate::sim::GroundTruth;

pub const TRACE_HEADER: &str = "t_s,power_w,hot_flow_lpm,cold_flow_lpm,t_outlet_c,t_inlet_c";

pub fn write_trace_csv(trace: &SensorTrace, w: &mut (impl Write + ?Sized)) -> Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for i in 0..trace.len() {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            i as f64 * trace.sample_period,
            trace.power[i],
            trace.hot_flow[i],
            trace.cold_flow[i],
            trace.t_outlet[i],
            trace.t_inlet[i],
        )?;
    }
    Ok(())
}

pub fn save_trace_csv(trace: &SensorTrace, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_trace_csv(trace, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_trace_csv(r: impl Read) -> Result<SensorTrace> {
    let reader = BufReader::new(r);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or(Error::Parse {
            line: 1,
            message: "empty file, expected header".into(),
        })??;
    if header.trim_end() != TRACE_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header `{header}`"),
        });
    }
    let mut t = Vec::new();
    let mut power = Vec::new();
    let mut hot = Vec::new();
    let mut cold = Vec::new();
    let mut t_out = Vec::new();
    let mut t_in = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 6 fields, got {}", fields.len()),
            });
        }
        let mut parsed = [0.0f64; 6];
        for (k, f) in fields.iter().enumerate() {
            parsed[k] = f.trim().parse().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("field {}: {e}", k + 1),
            })?;
        }
        t.push(parsed[0]);
        power.push(parsed[1]);
        hot.push(parsed[2]);
        cold.push(parsed[3]);
        t_out.push(parsed[4]);
        t_in.push(parsed[5]);
    }
    if t.len() < 2 {
        return Err(Error::TraceTooShort {
            len: t.len(),
            needed: 2,
        });
    }
    let sample_period = t[1] - t[0];
    if sample_period <= 0.0 {
        return Err(Error::Parse {
            line: 3,
            message: "time column must be strictly increasing".into(),
        });
    }
    SensorTrace::new(sample_period, t[0], power, hot, cold, t_out, t_in)
}

pub fn load_trace_csv(path: &Path) -> Result<SensorTrace> {
    read_trace_csv(File::open(path)?)
}

/// One line of an event log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub kind: EventKind,
    pub start_s: f64,
    pub end_s: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub trigger_time: f64,
}

impl EventRecord {
    pub fn from_event(ev: &DetectedEvent, sample_period: f64) -> Self {
        Self {
            kind: ev.kind,
            start_s: ev.window.start_index as f64 * sample_period,
            end_s: ev.window.end_index as f64 * sample_period,
            x: ev.signature.x,
            y: ev.signature.y,
            z: ev.signature.z,
            l: ev.signature.l_index,
            trigger_time: ev.trigger_time,
        }
    }
}

pub fn write_jsonl<T: Serialize>(records: &[T], w: &mut (impl Write + ?Sized)) -> Result<()> {
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| Error::Parse {
            line: 0,
            message: e.to_string(),
        })?;
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn save_jsonl<T: Serialize>(records: &[T], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_jsonl(records, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_jsonl<T: for<'de> Deserialize<'de>>(r: impl Read) -> Result<Vec<T>> {
    let reader = BufReader::new(r);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: idx + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn load_events(path: &Path) -> Result<Vec<EventRecord>> {
    read_jsonl(File::open(path)?)
}

pub fn load_labels(path: &Path) -> Result<Vec<GroundTruth>> {
    read_jsonl(File::open(path)?)
}

/// Cluster model persisted as TOML.
pub fn save_model(model: &ClusterModel, path: &Path) -> Result<()> {
    let text = toml::to_string_pretty(model).map_err(|e| Error::Parse {
        line: 0,
        message: e.to_string(),
    })?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<ClusterModel> {
    let text = std::fs::read_to_string(path)?;
    let model: ClusterModel = toml::from_str(&text).map_err(|e| Error::Parse {
        line: 0,
        message: e.to_string(),
    })?;
    model.validate()?;
    Ok(model)
}

pub const MAP_HEADER: &str = "event_id,kind_true,kind_predicted,x,y,z,L,margin";

/// One row of the x-L map export.
#[derive(Debug, Clone, PartialEq)]
pub struct MapRow {
    pub event_id: String,
    pub kind_true: EventKind,
    pub kind_predicted: Option<EventKind>,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub l: f64,
    pub margin: Option<f64>,
}

pub fn write_map_csv(rows: &[MapRow], w: &mut (impl Write + ?Sized)) -> Result<()> {
    writeln!(w, "{MAP_HEADER}")?;
    for r in rows {
        let predicted = r
            .kind_predicted
            .map(|k| k.to_string())
            .unwrap_or_default();
        let margin = r.margin.map(|m| m.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.event_id, r.kind_true, predicted, r.x, r.y, r.z, r.l, margin
        )?;
    }
    Ok(())
}
