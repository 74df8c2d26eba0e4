//! Nearest-centroid classification on the x-L plane.
//!
//! Signatures from repeated runs of the same case form clusters when
//! plotted as x against L. Calibration averages labeled signatures into
//! per-class centroids; L is divided by the pooled training std so the two
//! axes are commensurate. Classification picks the nearest centroid and
//! reports a (d2 - d1)/(d2 + d1) margin.

use serde::{Deserialize, Serialize};

use crate::chromatic::ChromaticSignature;
use crate::detector::EventKind;
use crate::error::{Error, Result};

pub const MIN_SAMPLES_PER_CLASS: usize = 3;

/// One calibrated class: centroid in normalized (x, L/scaling) space plus
/// the std of training distances to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassCluster {
    pub kind: EventKind,
    pub centroid_x: f64,
    pub centroid_l: f64,
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    /// L-axis normalization factor (std of training L values).
    pub scaling: f64,
    /// Sorted by class order Case1 < Case2 < Case3 < Comfort.
    pub classes: Vec<ClassCluster>,
}

impl ClusterModel {
    pub fn validate(&self) -> Result<()> {
        if self.classes.is_empty() {
            return Err(Error::UncalibratedModel);
        }
        if self.scaling <= 0.0 || self.classes.iter().any(|c| c.spread < 0.0) {
            return Err(Error::UncalibratedModel);
        }
        Ok(())
    }

    /// Smallest distance between two class centroids in normalized space.
    pub fn min_intercentroid_distance(&self) -> f64 {
        let mut min = f64::INFINITY;
        for (i, a) in self.classes.iter().enumerate() {
            for b in &self.classes[i + 1..] {
                let d = ((a.centroid_x - b.centroid_x).powi(2)
                    + (a.centroid_l - b.centroid_l).powi(2))
                .sqrt();
                min = min.min(d);
            }
        }
        min
    }

    pub fn max_spread(&self) -> f64 {
        self.classes.iter().map(|c| c.spread).fold(0.0, f64::max)
    }
}

/// Fits per-class centroids from labeled signatures.
///
/// Every class present must contribute at least three samples.
pub fn calibrate(labeled: &[(ChromaticSignature, EventKind)]) -> Result<ClusterModel> {
    if labeled.is_empty() {
        return Err(Error::UncalibratedModel);
    }
    let n = labeled.len() as f64;
    let mean_l = labeled.iter().map(|(s, _)| s.l_index).sum::<f64>() / n;
    let var_l = labeled
        .iter()
        .map(|(s, _)| (s.l_index - mean_l).powi(2))
        .sum::<f64>()
        / n;
    let scaling = if var_l.sqrt() > 1e-12 { var_l.sqrt() } else { 1.0 };

    let mut classes = Vec::new();
    for kind in EventKind::ALL {
        let points: Vec<(f64, f64)> = labeled
            .iter()
            .filter(|(_, k)| *k == kind)
            .map(|(s, _)| (s.x, s.l_index / scaling))
            .collect();
        if points.is_empty() {
            continue;
        }
        if points.len() < MIN_SAMPLES_PER_CLASS {
            return Err(Error::InsufficientSamples {
                class: kind.to_string(),
                got: points.len(),
                needed: MIN_SAMPLES_PER_CLASS,
            });
        }
        let m = points.len() as f64;
        let cx = points.iter().map(|p| p.0).sum::<f64>() / m;
        let cl = points.iter().map(|p| p.1).sum::<f64>() / m;
        let dists: Vec<f64> = points
            .iter()
            .map(|p| ((p.0 - cx).powi(2) + (p.1 - cl).powi(2)).sqrt())
            .collect();
        let mean_d = dists.iter().sum::<f64>() / m;
        let spread = (dists.iter().map(|d| (d - mean_d).powi(2)).sum::<f64>() / m).sqrt();
        classes.push(ClassCluster {
            kind,
            centroid_x: cx,
            centroid_l: cl,
            spread,
        });
    }
    Ok(ClusterModel { scaling, classes })
}

/// Nearest-centroid classification with a relative margin.
///
/// Margin is (d2 - d1)/(d2 + d1) over the two nearest centroids, or 1 by
/// convention for a single-class model. Ties fall to the earlier class in
/// the fixed order.
pub fn classify(sig: &ChromaticSignature, model: &ClusterModel) -> Result<(EventKind, f64)> {
    model.validate()?;
    let px = sig.x;
    let pl = sig.l_index / model.scaling;
    let mut best: Option<(EventKind, f64)> = None;
    let mut second = f64::INFINITY;
    for c in &model.classes {
        let d = ((px - c.centroid_x).powi(2) + (pl - c.centroid_l).powi(2)).sqrt();
        match best {
            None => best = Some((c.kind, d)),
            Some((_, d1)) if d < d1 => {
                second = d1;
                best = Some((c.kind, d));
            }
            Some(_) => second = second.min(d),
        }
    }
    let (kind, d1) = best.expect("validated non-empty");
    let margin = if second.is_infinite() {
        1.0
    } else if d1 + second > 0.0 {
        (second - d1) / (second + d1)
    } else {
        0.0
    };
    Ok((kind, margin))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(x: f64, l: f64) -> ChromaticSignature {
        ChromaticSignature {
            r_out: 0.0,
            g_out: 0.0,
            b_out: 0.0,
            x,
            y: 0.0,
            z: 1.0 - x,
            l_index: l,
        }
    }

    #[test]
    fn identical_signatures_zero_spread() {
        let labeled: Vec<_> = EventKind::ALL
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| (0..3).map(move |_| (sig(0.1 * i as f64, i as f64), k)))
            .collect();
        let model = calibrate(&labeled).unwrap();
        assert_eq!(model.classes.len(), 4);
        for c in &model.classes {
            assert_eq!(c.spread, 0.0);
        }
    }

    #[test]
    fn two_samples_insufficient() {
        let labeled = vec![
            (sig(0.1, 1.0), EventKind::Case1),
            (sig(0.1, 1.0), EventKind::Case1),
            (sig(0.5, 2.0), EventKind::Case2),
            (sig(0.5, 2.0), EventKind::Case2),
            (sig(0.5, 2.1), EventKind::Case2),
        ];
        match calibrate(&labeled) {
            Err(Error::InsufficientSamples { class, got, .. }) => {
                assert_eq!(class, "Case1");
                assert_eq!(got, 2);
            }
            other => panic!("expected InsufficientSamples, got {other:?}"),
        }
    }

    #[test]
    fn centroid_classifies_to_its_class() {
        let labeled = vec![
            (sig(0.1, 1.0), EventKind::Case1),
            (sig(0.2, 1.2), EventKind::Case1),
            (sig(0.15, 0.8), EventKind::Case1),
            (sig(-0.8, -1.0), EventKind::Case3),
            (sig(-0.7, -1.2), EventKind::Case3),
            (sig(-0.9, -0.9), EventKind::Case3),
        ];
        let model = calibrate(&labeled).unwrap();
        for c in &model.classes {
            let s = sig(c.centroid_x, c.centroid_l * model.scaling);
            let (kind, margin) = classify(&s, &model).unwrap();
            assert_eq!(kind, c.kind);
            assert!(margin > 0.0);
        }
    }

    #[test]
    fn single_class_margin_one() {
        let labeled = vec![
            (sig(0.1, 1.0), EventKind::Case1),
            (sig(0.2, 1.2), EventKind::Case1),
            (sig(0.15, 0.8), EventKind::Case1),
        ];
        let model = calibrate(&labeled).unwrap();
        let (kind, margin) = classify(&sig(5.0, 5.0), &model).unwrap();
        assert_eq!(kind, EventKind::Case1);
        assert_eq!(margin, 1.0);
    }

    #[test]
    fn empty_model_rejected() {
        let model = ClusterModel {
            scaling: 1.0,
            classes: vec![],
        };
        assert!(matches!(
            classify(&sig(0.0, 0.0), &model),
            Err(Error::UncalibratedModel)
        ));
    }
}
