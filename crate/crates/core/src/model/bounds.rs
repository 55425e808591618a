//! Recovery-condition calculators for the exact, noisy and p > 1 regimes.

use serde::{Deserialize, Serialize};

use nalgebra::DMatrix;

use super::psi::{tau0, tau0_lower_bound_uniform};
use super::{HlmModel, InlierKind};
use crate::energy::{d_matrix, pow_p, MIN_MC_BUDGET};
use crate::error::{Error, Result};
use crate::optimize::{restricted_best_fit_check, GridSpec, RegionFitMethod};

/// `lhs = α0`, `rhs = τ0 · min α_i · min(1, min dG^p / 2^p)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactRecoveryReport {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub tau0: f64,
    /// Closed-form lower bound on τ0 for uniform-ball inliers with `r2 = 1`;
    /// absent for other inlier kinds.
    pub tau0_lower_bound: Option<f64>,
    /// Set when the exact τ0 falls below the closed-form lower bound.
    pub tau0_below_lower_bound: bool,
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("recovery bounds need p in (0, 1], got {p}")));
    }
    Ok(())
}

fn rhs_with_separation(model: &HlmModel, p: f64, tau: f64) -> f64 {
    let sep = (model.min_pairwise_distance().powf(p) / 2f64.powf(p)).min(1.0);
    tau * model.min_inlier_alpha() * sep
}

pub fn check_exact_recovery_condition(model: &HlmModel, p: f64) -> Result<ExactRecoveryReport> {
    check_p(p)?;
    if model.noise_level() > 0.0 {
        return Err(Error::Condition("model is noisy; use noise_recovery_bounds".into()));
    }
    let tau = tau0(model, p)?;
    let rhs = rhs_with_separation(model, p, tau);
    let lower = match model.inlier().kind {
        InlierKind::UniformBall if model.inlier().atom == 0.0 => {
            Some(tau0_lower_bound_uniform(model.dim(), p, model.k(), model.inlier().radius, 1.0))
        }
        _ => None,
    };
    Ok(ExactRecoveryReport {
        holds: model.alpha0() < rhs,
        lhs: model.alpha0(),
        rhs,
        tau0: tau,
        tau0_lower_bound: lower,
        tau0_below_lower_bound: lower.is_some_and(|b| tau < b),
    })
}

/// Radii of the noisy-recovery guarantee. `None` marks a negative radicand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseBounds {
    pub eps: f64,
    pub tau0: f64,
    /// Largest admissible noise level.
    pub eps_max: Option<f64>,
    /// Radius around the truth containing the minimizer at level `eps`.
    pub f: Option<f64>,
    /// Level above which `f` exceeds the diameter bound and says nothing.
    pub eps_ceiling: Option<f64>,
}

impl NoiseBounds {
    /// Whether `eps` lies strictly below both `eps_max` and `eps_ceiling`.
    pub fn admissible(&self) -> bool {
        matches!((self.eps_max, self.eps_ceiling), (Some(m), Some(c)) if self.eps > 0.0 && self.eps < m.min(c))
    }
}

pub fn noise_recovery_bounds(model: &HlmModel, p: f64) -> Result<NoiseBounds> {
    check_p(p)?;
    let tau = tau0(model, p)?;
    let eps = model.noise_level();
    let a0 = model.alpha0();
    let full = rhs_with_separation(model, p, tau) - a0;
    let margin = tau * model.min_inlier_alpha() - a0;
    let third = 3f64.powf(-1.0 / p);
    let eps_max = (full > 0.0).then(|| third * full.powf(1.0 / p));
    let f = (margin > 0.0).then(|| 3f64.powf(1.0 / p) * margin.powf(-1.0 / p) * eps);
    let eps_ceiling = (margin > 0.0)
        .then(|| std::f64::consts::PI * (model.dim() as f64).sqrt() * third * margin.powf(1.0 / p) / 2.0);
    Ok(NoiseBounds { eps, tau0: tau, eps_max, f, eps_ceiling })
}

/// Monte Carlo lower bounds on the constants of the p > 1 failure regime.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaKappaBounds {
    /// `max_i (E[e(x, L*_i) 1{Y_i}] − min_L E[e(x, L) 1{Y_i}]) / (4p)`.
    pub bound_general: f64,
    /// Standard error of the maximizing region's paired difference, over 4p.
    pub bound_general_se: f64,
    /// Per-region energy gaps before the 1/(4p) factor.
    pub region_gaps: Vec<f64>,
    /// `max_i ‖E[D_{L*_i,x,p} 1{Y_i}]‖₂² / (p·d·D·2^{p+5})`, for p ≥ 2 only.
    pub bound_p_ge_2: Option<f64>,
    pub budget: usize,
}

/// Regions `Y_i` are the truth's Voronoi cells. The inner minimum is the
/// angle grid for lines in the plane and eight-start IRLS otherwise; the
/// truth itself is always a candidate, so every gap is nonnegative.
pub fn delta_kappa_lower_bounds(
    model: &HlmModel,
    p: f64,
    grid: &GridSpec,
    budget: usize,
    seed: u64,
) -> Result<DeltaKappaBounds> {
    if budget < MIN_MC_BUDGET {
        return Err(Error::Budget { got: budget, min: MIN_MC_BUDGET });
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain(format!("p must be positive, got {p}")));
    }
    let ds = model.sample(budget, seed);
    let truth = model.truth();
    let method = if model.ambient_dim() == 2 && model.dim() == 1 {
        RegionFitMethod::Grid(*grid)
    } else {
        RegionFitMethod::Irls { restarts: 8, seed }
    };
    let fits = restricted_best_fit_check(&ds, truth, p, &method)?;
    let n = budget as f64;
    let table = crate::energy::distance_table(ds.points(), truth);
    let labels = crate::energy::labels_from_table(&table);
    let (mut best_gap, mut best_se) = (0.0f64, 0.0);
    let mut region_gaps = Vec::with_capacity(truth.k());
    let ambient = model.ambient_dim();
    let mut d_norm: f64 = 0.0;
    for fit in &fits {
        let i = fit.region;
        let own = truth.get(i - 1);
        let mut diffs = vec![0.0; budget];
        if let Some(best) = &fit.best {
            for x in labels.region(i) {
                let pt = ds.point(x);
                diffs[x] = pow_p(own.dist_point(pt)?, p) - pow_p(best.dist_point(pt)?, p);
            }
        }
        let mut gap = diffs.iter().sum::<f64>() / n;
        if gap < 0.0 {
            // the truth beats the fitted candidate: the minimum is the truth
            gap = 0.0;
            diffs.iter_mut().for_each(|v| *v = 0.0);
        }
        let var = diffs.iter().map(|v| (v - gap).powi(2)).sum::<f64>() / (n - 1.0);
        if gap > best_gap || region_gaps.is_empty() {
            best_gap = gap;
            best_se = (var / n).sqrt();
        }
        region_gaps.push(gap);
        if p >= 2.0 {
            let mut sum = DMatrix::zeros(ambient, ambient);
            for x in labels.region(i) {
                sum += d_matrix(own, ds.point(x), p)?;
            }
            let mean = sum / n;
            let spectral = mean.svd(false, false).singular_values.max();
            d_norm = d_norm.max(spectral * spectral);
        }
    }
    let bound_p_ge_2 = (p >= 2.0).then(|| {
        d_norm / (p * model.dim() as f64 * ambient as f64 * 2f64.powf(p + 5.0))
    });
    Ok(DeltaKappaBounds {
        bound_general: best_gap / (4.0 * p),
        bound_general_se: best_se / (4.0 * p),
        region_gaps,
        bound_p_ge_2,
        budget,
    })
}
