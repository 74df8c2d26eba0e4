//! Operating-strategy advice from discomfort rates and heater efficiency.
//!
//! The two inputs partition into four quadrants: few/many discomfort
//! events per week against low/high efficiency. Boundary values count as
//! the severe side (a rate exactly at the threshold is "high" discomfort,
//! an efficiency exactly at the threshold is "high" efficiency).

use serde::{Deserialize, Serialize};

use crate::detector::EventRates;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdvisorThresholds {
    /// Discomfort events/week above which discomfort counts as high.
    pub rate_high: f64,
    /// Efficiency at or above which the heater counts as efficient.
    pub eff_min: f64,
}

impl Default for AdvisorThresholds {
    fn default() -> Self {
        Self {
            rate_high: 5.0,
            eff_min: 0.75,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdvisorInput {
    /// Combined Case1 + Case2 + Case3 rate, events/week.
    pub discomfort_rate: f64,
    /// External efficiency figure in [0, 1].
    pub efficiency: f64,
    pub thresholds: AdvisorThresholds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Low discomfort, high efficiency: leave the system as it is.
    KeepCurrent,
    /// Low discomfort, low efficiency: switch mode, consider replacement.
    SwitchModeOrReplaceHeater,
    /// High discomfort, low efficiency.
    UrgentReplacement,
    /// High discomfort, high efficiency.
    SwitchMode,
}

impl Verdict {
    /// Severity used by the monotonicity property: KeepCurrent is mildest,
    /// UrgentReplacement harshest, the two switch advisories in between.
    pub fn severity(&self) -> u8 {
        match self {
            Verdict::KeepCurrent => 0,
            Verdict::SwitchModeOrReplaceHeater | Verdict::SwitchMode => 1,
            Verdict::UrgentReplacement => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub verdict: Verdict,
    pub rationale: String,
    pub discomfort_rate: f64,
    pub efficiency: f64,
    pub thresholds: AdvisorThresholds,
}

/// Maps the (discomfort rate, efficiency) quadrant to a recommendation.
pub fn advise(input: &AdvisorInput) -> Result<Recommendation> {
    if !(0.0..=1.0).contains(&input.efficiency) || input.efficiency.is_nan() {
        return Err(Error::InvalidEfficiency(input.efficiency));
    }
    if input.discomfort_rate < 0.0 {
        return Err(Error::InvalidTrace("discomfort rate must be >= 0".into()));
    }
    let t = input.thresholds;
    let high_discomfort = input.discomfort_rate >= t.rate_high;
    let high_efficiency = input.efficiency >= t.eff_min;
    let (verdict, rationale) = match (high_discomfort, high_efficiency) {
        (false, true) => (
            Verdict::KeepCurrent,
            format!(
                "few discomfort events ({:.2}/week < {}) and good efficiency ({:.2} >= {}): no change needed",
                input.discomfort_rate, t.rate_high, input.efficiency, t.eff_min
            ),
        ),
        (false, false) => (
            Verdict::SwitchModeOrReplaceHeater,
            format!(
                "few discomfort events ({:.2}/week) but low efficiency ({:.2} < {}): switch operating mode to cut standing losses, or consider replacing the heater",
                input.discomfort_rate, input.efficiency, t.eff_min
            ),
        ),
        (true, false) => (
            Verdict::UrgentReplacement,
            format!(
                "frequent discomfort ({:.2}/week >= {}) with low efficiency ({:.2}): urgent action, consider complete device replacement",
                input.discomfort_rate, t.rate_high, input.efficiency
            ),
        ),
        (true, true) => (
            Verdict::SwitchMode,
            format!(
                "frequent discomfort ({:.2}/week >= {}) despite good efficiency ({:.2}): switch to the other operating mode to reduce discomfort",
                input.discomfort_rate, t.rate_high, input.efficiency
            ),
        ),
    };
    Ok(Recommendation {
        verdict,
        rationale,
        discomfort_rate: input.discomfort_rate,
        efficiency: input.efficiency,
        thresholds: t,
    })
}

/// Convenience wrapper taking detector rates directly.
pub fn advise_from_rates(
    rates: &EventRates,
    efficiency: f64,
    thresholds: AdvisorThresholds,
) -> Result<Recommendation> {
    advise(&AdvisorInput {
        discomfort_rate: rates.discomfort(),
        efficiency,
        thresholds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(rate: f64, eff: f64) -> AdvisorInput {
        AdvisorInput {
            discomfort_rate: rate,
            efficiency: eff,
            thresholds: AdvisorThresholds::default(),
        }
    }

    #[test]
    fn four_quadrants() {
        assert_eq!(advise(&input(1.0, 0.9)).unwrap().verdict, Verdict::KeepCurrent);
        assert_eq!(
            advise(&input(1.0, 0.4)).unwrap().verdict,
            Verdict::SwitchModeOrReplaceHeater
        );
        assert_eq!(
            advise(&input(10.0, 0.4)).unwrap().verdict,
            Verdict::UrgentReplacement
        );
        assert_eq!(advise(&input(10.0, 0.9)).unwrap().verdict, Verdict::SwitchMode);
    }

    #[test]
    fn boundary_counts_as_high_high() {
        let t = AdvisorThresholds::default();
        let r = advise(&input(t.rate_high, t.eff_min)).unwrap();
        assert_eq!(r.verdict, Verdict::SwitchMode);
    }

    #[test]
    fn invalid_efficiency_rejected() {
        assert!(matches!(
            advise(&input(1.0, 1.5)),
            Err(Error::InvalidEfficiency(_))
        ));
        assert!(matches!(
            advise(&input(1.0, -0.1)),
            Err(Error::InvalidEfficiency(_))
        ));
    }

    #[test]
    fn monotone_in_both_inputs() {
        let grid: Vec<f64> = (0..20).map(|i| i as f64).collect();
        for i in 1..grid.len() {
            for e in 0..=10 {
                let eff = e as f64 / 10.0;
                let lo = advise(&input(grid[i - 1], eff)).unwrap().verdict.severity();
                let hi = advise(&input(grid[i], eff)).unwrap().verdict.severity();
                assert!(hi >= lo);
            }
        }
        for e in 1..=10 {
            for rate in [0.0, 3.0, 5.0, 12.0] {
                let lo_eff = advise(&input(rate, (e - 1) as f64 / 10.0)).unwrap();
                let hi_eff = advise(&input(rate, e as f64 / 10.0)).unwrap();
                assert!(hi_eff.verdict.severity() <= lo_eff.verdict.severity());
            }
        }
    }
}
