use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::FeatureError;
use crate::simkit::Trajectory;

/// Rotor-angle separation (degrees) at or beyond which a case is unstable.
pub const INSTABILITY_ANGLE: f64 = 360.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassLabel {
    Stable,
    Unstable,
}

impl ClassLabel {
    pub fn value(self) -> f64 {
        match self {
            ClassLabel::Stable => 1.0,
            ClassLabel::Unstable => -1.0,
        }
    }

    /// Sign rule for decision scores; a score of exactly zero is stable.
    pub fn from_score(score: f64) -> Self {
        if score >= 0.0 {
            ClassLabel::Stable
        } else {
            ClassLabel::Unstable
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassLabel::Stable => "+1",
            ClassLabel::Unstable => "-1",
        })
    }
}

impl FromStr for ClassLabel {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+1" | "1" | "1.0" | "+1.0" => Ok(ClassLabel::Stable),
            "-1" | "-1.0" => Ok(ClassLabel::Unstable),
            other => Err(FeatureError::Malformed(format!("bad class label {other:?}"))),
        }
    }
}

/// Largest |δ_i(t) − δ_j(t)| over all samples and machine pairs, in degrees.
/// An infinite bus takes part as a machine fixed at zero.
pub fn max_angle_separation(trajectory: &Trajectory) -> Result<f64, FeatureError> {
    if trajectory.is_empty() || trajectory.generator_count() == 0 {
        return Err(FeatureError::Malformed("empty trajectory".into()));
    }
    let len = trajectory.len();
    if trajectory.angle.iter().any(|s| s.len() != len) {
        return Err(FeatureError::Malformed("angle series length differs from time axis".into()));
    }
    let mut worst: f64 = 0.0;
    for t in 0..len {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for series in &trajectory.angle {
            lo = lo.min(series[t]);
            hi = hi.max(series[t]);
        }
        if trajectory.infinite_bus {
            lo = lo.min(0.0);
            hi = hi.max(0.0);
        }
        worst = worst.max(hi - lo);
    }
    if !worst.is_finite() {
        return Err(FeatureError::Malformed("non-finite rotor angle".into()));
    }
    Ok(worst)
}

/// Stability label `sgn(360° − |Δδ|max)`, with exactly 360° labeled unstable.
pub fn label_from_separation(max_separation: f64) -> ClassLabel {
    if max_separation < INSTABILITY_ANGLE {
        ClassLabel::Stable
    } else {
        ClassLabel::Unstable
    }
}

pub fn label_trajectory(trajectory: &Trajectory) -> Result<ClassLabel, FeatureError> {
    max_angle_separation(trajectory).map(label_from_separation)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_rule() {
        assert_eq!(label_from_separation(100.0), ClassLabel::Stable);
        assert_eq!(label_from_separation(400.0), ClassLabel::Unstable);
        assert_eq!(label_from_separation(360.0), ClassLabel::Unstable);
        assert_eq!(label_from_separation(359.999), ClassLabel::Stable);
    }

    #[test]
    fn label_text() {
        for l in [ClassLabel::Stable, ClassLabel::Unstable] {
            assert_eq!(l.to_string().parse::<ClassLabel>().unwrap(), l);
        }
        assert!("0".parse::<ClassLabel>().is_err());
        assert_eq!(ClassLabel::from_score(0.0), ClassLabel::Stable);
        assert_eq!(ClassLabel::from_score(-0.3), ClassLabel::Unstable);
        assert_eq!(ClassLabel::from_score(0.3), ClassLabel::Stable);
    }
}
