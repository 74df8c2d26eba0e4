//! Chromatic signal transformation.
//!
//! A monitored signal P(phi) is weighted by three overlapping processor
//! profiles R(phi), G(phi), B(phi) and integrated. The three outputs are
//! normalized into relative magnitudes (x, y, z) plus a signal strength
//! index L = (R + G + B) / 3. Two normalizations exist: the original one
//! divides by 3L and only makes sense for positive L; the modified one
//! divides by |3L| so that signals with negative net area keep a usable
//! signature (x + y + z = sign(L)).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default guard against dividing by a vanishing |3L|, in signal units.
pub const DEFAULT_EPSILON_L: f64 = 1e-9;

/// A uniformly sampled signal over `[0, (len - 1) * sample_period]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    pub values: Vec<f64>,
    pub sample_period: f64,
}

impl SampledSignal {
    pub fn new(values: Vec<f64>, sample_period: f64) -> Result<Self> {
        if sample_period <= 0.0 {
            return Err(Error::NonPositivePeriod(sample_period));
        }
        if values.len() < 2 {
            return Err(Error::TooFewSamples {
                got: values.len(),
                needed: 2,
            });
        }
        Ok(Self {
            values,
            sample_period,
        })
    }

    /// Length of the sampled domain in seconds.
    pub fn domain_length(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.sample_period
    }
}

/// One triangular processor profile: peak_value at peak_position, falling
/// linearly to zero at `peak_position ± half_width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleProfile {
    pub peak_position: f64,
    pub half_width: f64,
    pub peak_value: f64,
}

impl TriangleProfile {
    pub fn value_at(&self, phi: f64) -> f64 {
        let t = 1.0 - (phi - self.peak_position).abs() / self.half_width;
        if t > 0.0 {
            t * self.peak_value
        } else {
            0.0
        }
    }
}

/// Three overlapping triangular profiles covering a window of
/// `domain_length` seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    domain_length: f64,
    profiles: [TriangleProfile; 3],
}

impl FilterBank {
    /// Builds a bank from explicit profiles, rejecting banks that leave a
    /// hole in the coverage (R + G + B must stay positive over the whole
    /// domain; checked on a dense probe grid).
    pub fn new(domain_length: f64, profiles: [TriangleProfile; 3]) -> Result<Self> {
        if domain_length <= 0.0 {
            return Err(Error::NonPositiveWindow(domain_length));
        }
        for p in &profiles {
            if p.half_width <= 0.0 || p.peak_value < 0.0 {
                return Err(Error::BankCoverage {
                    phi: p.peak_position,
                });
            }
        }
        const PROBE_POINTS: usize = 1024;
        for i in 0..=PROBE_POINTS {
            let phi = domain_length * i as f64 / PROBE_POINTS as f64;
            let total: f64 = profiles.iter().map(|p| p.value_at(phi)).sum();
            if total <= 0.0 {
                return Err(Error::BankCoverage { phi });
            }
        }
        Ok(Self {
            domain_length,
            profiles,
        })
    }

    /// The default bank: unit-peak triangles at 0, T/2 and T with half-width
    /// T/2. The three responses sum to exactly 1 everywhere, so a constant
    /// signal c maps to outputs (cT/4, cT/2, cT/4) and signature
    /// (x, y, z) = (0.25, 0.5, 0.25).
    pub fn default_bank(window_length: f64) -> Result<Self> {
        if window_length <= 0.0 {
            return Err(Error::NonPositiveWindow(window_length));
        }
        let half = window_length / 2.0;
        Self::new(
            window_length,
            [
                TriangleProfile {
                    peak_position: 0.0,
                    half_width: half,
                    peak_value: 1.0,
                },
                TriangleProfile {
                    peak_position: half,
                    half_width: half,
                    peak_value: 1.0,
                },
                TriangleProfile {
                    peak_position: window_length,
                    half_width: half,
                    peak_value: 1.0,
                },
            ],
        )
    }

    pub fn domain_length(&self) -> f64 {
        self.domain_length
    }

    pub fn profiles(&self) -> &[TriangleProfile; 3] {
        &self.profiles
    }
}

/// The three processor integrals, in signal * seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessorOutputs {
    pub r_out: f64,
    pub g_out: f64,
    pub b_out: f64,
}

impl ProcessorOutputs {
    /// Signal strength index L = (R + G + B) / 3.
    pub fn strength_index(&self) -> f64 {
        (self.r_out + self.g_out + self.b_out) / 3.0
    }
}

/// A full chromatic signature for one event window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChromaticSignature {
    pub r_out: f64,
    pub g_out: f64,
    pub b_out: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub l_index: f64,
}

/// Trapezoidal approximation of the three weighted integrals
/// `∫R(phi)P(phi)dphi`, `∫G(phi)P(phi)dphi`, `∫B(phi)P(phi)dphi`.
///
/// The signal's sampled domain must match the bank's domain length.
pub fn processor_outputs(signal: &SampledSignal, bank: &FilterBank) -> Result<ProcessorOutputs> {
    let n = signal.values.len();
    if n < 2 {
        return Err(Error::TooFewSamples { got: n, needed: 2 });
    }
    let signal_len = signal.domain_length();
    let bank_len = bank.domain_length;
    if (signal_len - bank_len).abs() > 1e-9 * bank_len.max(1.0) {
        return Err(Error::DomainMismatch {
            signal_s: signal_len,
            bank_s: bank_len,
        });
    }
    let h = signal.sample_period;
    let mut out = [0.0f64; 3];
    for (k, profile) in bank.profiles.iter().enumerate() {
        let mut acc = 0.0;
        for (i, &p) in signal.values.iter().enumerate() {
            let phi = i as f64 * h;
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            acc += w * profile.value_at(phi) * p;
        }
        out[k] = acc * h;
    }
    Ok(ProcessorOutputs {
        r_out: out[0],
        g_out: out[1],
        b_out: out[2],
    })
}

/// Original transform: x = R/(3L), y = G/(3L), z = B/(3L).
///
/// For nonnegative signals this gives x + y + z = 1 with each component in
/// [0, 1]. Fails when |3L| falls below `epsilon_l`.
pub fn xyz_original(p: &ProcessorOutputs, epsilon_l: f64) -> Result<ChromaticSignature> {
    let l = p.strength_index();
    let denom = 3.0 * l;
    if denom.abs() < epsilon_l {
        return Err(Error::DegenerateSignal {
            magnitude: denom.abs(),
            threshold: epsilon_l,
        });
    }
    Ok(ChromaticSignature {
        r_out: p.r_out,
        g_out: p.g_out,
        b_out: p.b_out,
        x: p.r_out / denom,
        y: p.g_out / denom,
        z: p.b_out / denom,
        l_index: l,
    })
}

/// Modified transform: x = R/|3L|, y = G/|3L|, z = B/|3L|.
///
/// Coincides with the original transform for L > 0 and keeps the component
/// signs for negative-area signals, so x + y + z = sign(L).
pub fn xyz_modified(p: &ProcessorOutputs, epsilon_l: f64) -> Result<ChromaticSignature> {
    let l = p.strength_index();
    let denom = (3.0 * l).abs();
    if denom < epsilon_l {
        return Err(Error::DegenerateSignal {
            magnitude: denom,
            threshold: epsilon_l,
        });
    }
    Ok(ChromaticSignature {
        r_out: p.r_out,
        g_out: p.g_out,
        b_out: p.b_out,
        x: p.r_out / denom,
        y: p.g_out / denom,
        z: p.b_out / denom,
        l_index: l,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_signal(value: f64, window: f64, n: usize) -> SampledSignal {
        SampledSignal::new(vec![value; n], window / (n - 1) as f64).unwrap()
    }

    #[test]
    fn constant_signal_triangle_areas() {
        let bank = FilterBank::default_bank(600.0).unwrap();
        let sig = constant_signal(2.0, 600.0, 601);
        let out = processor_outputs(&sig, &bank).unwrap();
        assert!((out.r_out - 300.0).abs() < 1e-9);
        assert!((out.g_out - 600.0).abs() < 1e-9);
        assert!((out.b_out - 300.0).abs() < 1e-9);
    }

    #[test]
    fn zero_signal_zero_outputs() {
        let bank = FilterBank::default_bank(600.0).unwrap();
        let sig = constant_signal(0.0, 600.0, 601);
        let out = processor_outputs(&sig, &bank).unwrap();
        assert_eq!((out.r_out, out.g_out, out.b_out), (0.0, 0.0, 0.0));
    }

    // Test-side trapezoid that evaluates profiles directly, used as the
    // independent fine-grid oracle.
    fn oracle_integral(profile: &TriangleProfile, f: impl Fn(f64) -> f64, t_end: f64, n: usize) -> f64 {
        let h = t_end / (n - 1) as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let t = i as f64 * h;
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            acc += w * profile.value_at(t) * f(t);
        }
        acc * h
    }

    #[test]
    fn ramp_matches_fine_grid_oracle() {
        let t_w = 600.0;
        let bank = FilterBank::default_bank(t_w).unwrap();
        let n = 6001;
        let h = t_w / (n - 1) as f64;
        let values: Vec<f64> = (0..n).map(|i| i as f64 * h / t_w).collect();
        let sig = SampledSignal::new(values, h).unwrap();
        let out = processor_outputs(&sig, &bank).unwrap();
        let fine = |p: &TriangleProfile| oracle_integral(p, |t| t / t_w, t_w, 10 * (n - 1) + 1);
        for (got, profile) in [
            (out.r_out, &bank.profiles()[0]),
            (out.g_out, &bank.profiles()[1]),
            (out.b_out, &bank.profiles()[2]),
        ] {
            let want = fine(profile);
            assert!(
                (got - want).abs() <= 1e-6 * want.abs(),
                "got {got}, oracle {want}"
            );
        }
    }

    #[test]
    fn original_transform_symmetric_outputs() {
        let p = ProcessorOutputs {
            r_out: 1.0,
            g_out: 1.0,
            b_out: 1.0,
        };
        let s = xyz_original(&p, DEFAULT_EPSILON_L).unwrap();
        assert!((s.x - 1.0 / 3.0).abs() < 1e-12);
        assert!((s.y - 1.0 / 3.0).abs() < 1e-12);
        assert!((s.z - 1.0 / 3.0).abs() < 1e-12);
        assert!((s.l_index - 1.0).abs() < 1e-12);
    }

    #[test]
    fn original_transform_constant_bank_split() {
        let p = ProcessorOutputs {
            r_out: 300.0,
            g_out: 600.0,
            b_out: 300.0,
        };
        let s = xyz_original(&p, DEFAULT_EPSILON_L).unwrap();
        assert_eq!(s.l_index, 400.0);
        assert!((s.x - 0.25).abs() < 1e-12);
        assert!((s.y - 0.5).abs() < 1e-12);
        assert!((s.z - 0.25).abs() < 1e-12);
    }

    #[test]
    fn original_transform_degenerate() {
        let p = ProcessorOutputs {
            r_out: 0.0,
            g_out: 0.0,
            b_out: 0.0,
        };
        assert!(matches!(
            xyz_original(&p, DEFAULT_EPSILON_L),
            Err(Error::DegenerateSignal { .. })
        ));
    }

    #[test]
    fn modified_transform_positive_matches_original() {
        let p = ProcessorOutputs {
            r_out: 300.0,
            g_out: 600.0,
            b_out: 300.0,
        };
        let s = xyz_modified(&p, DEFAULT_EPSILON_L).unwrap();
        assert_eq!(s.l_index, 400.0);
        assert!((s.x - 0.25).abs() < 1e-12);
        assert!((s.y - 0.5).abs() < 1e-12);
        assert!((s.z - 0.25).abs() < 1e-12);
    }

    #[test]
    fn modified_transform_negative_signal() {
        let p = ProcessorOutputs {
            r_out: -1.0,
            g_out: -1.0,
            b_out: -1.0,
        };
        let s = xyz_modified(&p, DEFAULT_EPSILON_L).unwrap();
        assert_eq!(s.l_index, -1.0);
        assert!((s.x + 1.0 / 3.0).abs() < 1e-12);
        assert!((s.x + s.y + s.z + 1.0).abs() < 1e-12);
    }

    #[test]
    fn modified_transform_cancelling_channels() {
        let p = ProcessorOutputs {
            r_out: -2.0,
            g_out: 1.0,
            b_out: 1.0,
        };
        assert!(matches!(
            xyz_modified(&p, DEFAULT_EPSILON_L),
            Err(Error::DegenerateSignal { .. })
        ));
    }

    #[test]
    fn default_bank_geometry() {
        let bank = FilterBank::default_bank(600.0).unwrap();
        let [r, g, b] = bank.profiles();
        assert_eq!(r.value_at(0.0), 1.0);
        assert_eq!(g.value_at(300.0), 1.0);
        assert_eq!(b.value_at(600.0), 1.0);
        assert!((r.value_at(150.0) - 0.5).abs() < 1e-12);
        assert!((g.value_at(150.0) - 0.5).abs() < 1e-12);
        assert_eq!(b.value_at(150.0), 0.0);
    }

    #[test]
    fn default_bank_partition_of_unity() {
        let bank = FilterBank::default_bank(600.0).unwrap();
        for i in 0..=600 {
            let phi = i as f64;
            let sum: f64 = bank.profiles().iter().map(|p| p.value_at(phi)).sum();
            assert!((sum - 1.0).abs() < 1e-12, "sum {sum} at phi {phi}");
        }
    }

    #[test]
    fn default_bank_rejects_zero_window() {
        assert!(matches!(
            FilterBank::default_bank(0.0),
            Err(Error::NonPositiveWindow(_))
        ));
    }

    #[test]
    fn domain_mismatch_rejected() {
        let bank = FilterBank::default_bank(600.0).unwrap();
        let sig = constant_signal(1.0, 500.0, 501);
        assert!(matches!(
            processor_outputs(&sig, &bank),
            Err(Error::DomainMismatch { .. })
        ));
    }
}
