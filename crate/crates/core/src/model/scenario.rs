//! Named model generators for the counterexample and failure-mode geometries.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{HlmModel, InlierSpec, NoiseSpec, OutlierSpec};
use crate::error::{Error, Result};
use crate::grassmann::{random_subspace, random_tuple, SubspaceTuple};

/// Two lines in R²: `L*_1` (the x-axis) carries a uniform rectangle
/// symmetric about it; `L*_2` carries two rectangles on opposite sides with
/// unequal widths, `upper_fraction` of the mass on the positive side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig1Params {
    /// Angle between the two lines, radians.
    pub opening_angle: f64,
    /// Half-width of the strips (the noise level ε).
    pub half_width: f64,
    /// Mass fraction of `L*_2`'s strip on its positive side.
    pub upper_fraction: f64,
    /// Half-length of every rectangle along its line.
    pub half_length: f64,
}

impl Default for Fig1Params {
    fn default() -> Self {
        Fig1Params { opening_angle: PI / 3.0, half_width: 0.08, upper_fraction: 0.7, half_length: 0.25 }
    }
}

impl Fig1Params {
    /// Right-angle lines with symmetric strips: the control arm, where the
    /// population minimizer is the truth by reflection symmetry.
    pub fn symmetric_control() -> Self {
        Fig1Params { opening_angle: PI / 2.0, upper_fraction: 0.5, ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Scenario {
    Fig1NoisyStrips(Fig1Params),
    /// Lines at `±theta` about the x-axis with uniform segment inliers and
    /// uniform disk outliers.
    SmallAngleLines { theta: f64, alpha0: f64 },
    /// K = 2 random lines in R³ plus outliers on a third random line with
    /// `alpha0` above each inlier weight.
    OnSubspaceOutliers { alpha0: f64 },
    /// Inliers on short segments of radius `inlier_radius`, outliers on the
    /// shell `inner ≤ ‖x‖ ≤ 1`.
    LargeMagnitudeOutlier { inlier_radius: f64, inner: f64, alpha0: f64 },
}

pub const SCENARIO_NAMES: [&str; 4] =
    ["fig1-noisy-strips", "small-angle-lines", "on-subspace-outliers", "large-magnitude-outlier"];

fn take(params: &mut BTreeMap<String, f64>, key: &str, default: f64) -> f64 {
    params.remove(key).unwrap_or(default)
}

impl Scenario {
    /// Looks up a scenario by name; unknown parameter keys are errors.
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let mut p = params.clone();
        let scenario = match name {
            "fig1-noisy-strips" => {
                let d = Fig1Params::default();
                Scenario::Fig1NoisyStrips(Fig1Params {
                    opening_angle: take(&mut p, "opening_angle_deg", d.opening_angle.to_degrees()).to_radians(),
                    half_width: take(&mut p, "half_width", d.half_width),
                    upper_fraction: take(&mut p, "upper_fraction", d.upper_fraction),
                    half_length: take(&mut p, "half_length", d.half_length),
                })
            }
            "small-angle-lines" => Scenario::SmallAngleLines {
                theta: take(&mut p, "theta", 0.05),
                alpha0: take(&mut p, "alpha0", 0.2),
            },
            "on-subspace-outliers" => Scenario::OnSubspaceOutliers { alpha0: take(&mut p, "alpha0", 0.4) },
            "large-magnitude-outlier" => Scenario::LargeMagnitudeOutlier {
                inlier_radius: take(&mut p, "inlier_radius", 0.05),
                inner: take(&mut p, "inner", 0.9),
                alpha0: take(&mut p, "alpha0", 0.05),
            },
            other => {
                return Err(Error::Parse(format!(
                    "unknown scenario {other:?}; expected one of {}",
                    SCENARIO_NAMES.join(", ")
                )))
            }
        };
        if let Some(key) = p.keys().next() {
            return Err(Error::Parse(format!("unknown parameter {key:?} for scenario {name}")));
        }
        Ok(scenario)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Fig1NoisyStrips(_) => SCENARIO_NAMES[0],
            Scenario::SmallAngleLines { .. } => SCENARIO_NAMES[1],
            Scenario::OnSubspaceOutliers { .. } => SCENARIO_NAMES[2],
            Scenario::LargeMagnitudeOutlier { .. } => SCENARIO_NAMES[3],
        }
    }

    pub fn build<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<HlmModel> {
        match *self {
            Scenario::Fig1NoisyStrips(f) => {
                if f.half_length.hypot(f.half_width) > 1.0 + 1e-12 {
                    return Err(Error::InvalidModel("fig1 rectangles must fit in the unit disk".into()));
                }
                let truth = SubspaceTuple::lines_2d(&[0.0, f.opening_angle])?;
                HlmModel::new(
                    truth,
                    vec![0.0, 0.5, 0.5],
                    InlierSpec::uniform_ball(f.half_length),
                    NoiseSpec::UniformSlab { level: f.half_width },
                    OutlierSpec::UniformBallD { radius: 1.0 },
                )?
                .with_component_noise(vec![
                    NoiseSpec::UniformSlab { level: f.half_width },
                    NoiseSpec::OffsetSlab { level: f.half_width, upper_fraction: f.upper_fraction },
                ])
            }
            Scenario::SmallAngleLines { theta, alpha0 } => {
                let a = (1.0 - alpha0) / 2.0;
                HlmModel::new(
                    SubspaceTuple::lines_2d(&[theta, -theta])?,
                    vec![alpha0, a, a],
                    InlierSpec::uniform_ball(1.0),
                    NoiseSpec::None,
                    OutlierSpec::UniformBallD { radius: 1.0 },
                )
            }
            Scenario::OnSubspaceOutliers { alpha0 } => {
                let a = (1.0 - alpha0) / 2.0;
                if alpha0 <= a {
                    return Err(Error::InvalidModel(format!(
                        "on-subspace-outliers needs alpha0 > (1 - alpha0)/2, got {alpha0}"
                    )));
                }
                let truth = random_tuple(2, 3, 1, rng)?;
                let carrier = random_subspace(3, 1, rng)?;
                HlmModel::new(
                    truth,
                    vec![alpha0, a, a],
                    InlierSpec::uniform_ball(1.0),
                    NoiseSpec::None,
                    OutlierSpec::OnSubspace { subspace: carrier, radius: 1.0 },
                )
            }
            Scenario::LargeMagnitudeOutlier { inlier_radius, inner, alpha0 } => {
                let a = (1.0 - alpha0) / 2.0;
                HlmModel::new(
                    SubspaceTuple::lines_2d(&[0.0, PI / 3.0])?,
                    vec![alpha0, a, a],
                    InlierSpec::uniform_ball(inlier_radius),
                    NoiseSpec::None,
                    OutlierSpec::LargeMagnitudeShell { inner },
                )
            }
        }
    }
}
