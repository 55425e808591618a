//! The slab mass ψ of the inlier law, its inverse, and the constant τ0.

use std::f64::consts::PI;

use statrs::function::beta::beta_reg;

use super::{HlmModel, InlierKind, InlierSpec};
use crate::error::{Error, Result};

/// Bisection stops once `|ψ(t) − q|` is below this.
const PSI_INVERSE_TOL: f64 = 1e-12;

/// `P(|X_1| < u·r)` for the one-coordinate marginal of the unit-radius law.
fn marginal_slab_mass(kind: InlierKind, dim: usize, u: f64) -> f64 {
    if u >= 1.0 {
        return match (kind, dim) {
            // The 1-sphere is {±r}: the open slab of half-width r misses it.
            (InlierKind::UniformSphere, 1) if u == 1.0 => 0.0,
            _ => 1.0,
        };
    }
    let x = u * u;
    match kind {
        // X_1²/r² ~ Beta(1/2, (d+1)/2) for the uniform d-ball.
        InlierKind::UniformBall => beta_reg(0.5, (dim as f64 + 1.0) / 2.0, x),
        // X_1²/r² ~ Beta(1/2, (d−1)/2) on the (d−1)-sphere.
        InlierKind::UniformSphere if dim >= 2 => beta_reg(0.5, (dim as f64 - 1.0) / 2.0, x),
        InlierKind::UniformSphere => 0.0,
    }
}

/// `ψ(t) = μ(|xᵀv| < t)` for a unit `v` in the carrying subspace.
pub fn psi(spec: &InlierSpec, dim: usize, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    spec.atom + (1.0 - spec.atom) * marginal_slab_mass(spec.kind, dim, t / spec.radius)
}

/// Inverse of ψ on `(atom, 1]` by bisection on `[0, radius]`.
pub fn psi_inverse(spec: &InlierSpec, dim: usize, q: f64) -> Result<f64> {
    if !(q > spec.atom && q <= 1.0) {
        return Err(Error::Domain(format!(
            "psi_inverse needs q in (atom = {}, 1], got {q}",
            spec.atom
        )));
    }
    if q == 1.0 {
        return Ok(spec.radius);
    }
    let (mut lo, mut hi) = (0.0_f64, spec.radius);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..2000 {
        mid = 0.5 * (lo + hi);
        let value = psi(spec, dim, mid);
        if (value - q).abs() <= PSI_INVERSE_TOL && hi - lo <= f64::EPSILON * spec.radius {
            break;
        }
        if value < q {
            lo = mid;
        } else {
            hi = mid;
        }
        if mid == lo && mid == hi {
            break;
        }
        if hi - lo <= f64::EPSILON * spec.radius * 0.5 {
            break;
        }
    }
    Ok(mid)
}

/// The model constant
/// `(1 − a)·2^{p−1}·ψ⁻¹((1 + (2K−1)a)/(2K))^p / (π√d)^p` with `a = μ_1({0})`.
pub fn tau0(model: &HlmModel, p: f64) -> Result<f64> {
    tau0_for(model.inlier(), model.dim(), model.k(), p)
}

pub(crate) fn tau0_for(spec: &InlierSpec, dim: usize, k: usize, p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("tau0 needs p in (0, 1], got {p}")));
    }
    let a = spec.atom;
    let kf = k as f64;
    let q = (1.0 + (2.0 * kf - 1.0) * a) / (2.0 * kf);
    let t = psi_inverse(spec, dim, q)?;
    Ok((1.0 - a) * 2f64.powf(p - 1.0) * t.powf(p) / (PI * (dim as f64).sqrt()).powf(p))
}

/// Closed-form lower bound `r1^p / (2^{p+1} K^p d^{3p/2} r2^p)` for uniform
/// ball inliers of radius `r1` and outliers supported in radius `r2`.
pub fn tau0_lower_bound_uniform(dim: usize, p: f64, k: usize, r1: f64, r2: f64) -> f64 {
    r1.powf(p) / (2f64.powf(p + 1.0) * (k as f64).powf(p) * (dim as f64).powf(1.5 * p) * r2.powf(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::SubspaceTuple;
    use crate::model::{NoiseSpec, OutlierSpec};
    use rand::Rng;

    fn model(k: usize, atom: f64) -> HlmModel {
        let angles: Vec<f64> = (0..k).map(|i| i as f64 * PI / k as f64).collect();
        let a = 1.0 / k as f64;
        let mut alphas = vec![0.0];
        alphas.extend(std::iter::repeat_n(a, k));
        HlmModel::new(
            SubspaceTuple::lines_2d(&angles).unwrap(),
            alphas,
            InlierSpec { kind: InlierKind::UniformBall, radius: 1.0, atom },
            NoiseSpec::None,
            OutlierSpec::UniformBallD { radius: 1.0 },
        )
        .unwrap()
    }

    #[test]
    fn psi_segment_matches_closed_form_and_monte_carlo() {
        let spec = InlierSpec::uniform_ball(1.0);
        assert!((psi(&spec, 1, 0.3) - 0.3).abs() < 1e-14);
        let mut rng = crate::rng::rng_from(9);
        let n = 10_000_000;
        let hits = (0..n).filter(|_| (2.0 * rng.random::<f64>() - 1.0).abs() < 0.3).count();
        let est = hits as f64 / n as f64;
        assert!((est - 0.3).abs() < 5.0 * (0.21 / n as f64).sqrt());
    }

    #[test]
    fn psi_saturates_and_is_monotone() {
        for kind in [InlierKind::UniformBall, InlierKind::UniformSphere] {
            for dim in 1..5 {
                let spec = InlierSpec { kind, radius: 0.7, atom: 0.1 };
                assert_eq!(psi(&spec, dim, 0.7 + 1e-9), 1.0);
                assert_eq!(psi(&spec, dim, 0.0), 0.0);
                if kind == InlierKind::UniformBall {
                    assert_eq!(psi(&spec, dim, 0.7), 1.0);
                }
                assert!(psi(&spec, dim, 1e-12) >= 0.1);
                let mut prev = 0.0;
                for i in 1..=100 {
                    let v = psi(&spec, dim, 0.007 * i as f64);
                    assert!(v >= prev - 1e-15);
                    prev = v;
                }
            }
        }
        assert_eq!(psi(&InlierSpec::uniform_ball(1.0), 2, 1.0), 1.0);
    }

    #[test]
    fn psi_disk_closed_form() {
        // Uniform unit disk: P(|x| < t) = (2/π)(t√(1−t²) + asin t).
        let spec = InlierSpec::uniform_ball(1.0);
        for t in [0.1f64, 0.4, 0.8] {
            let exact = 2.0 / PI * (t * (1.0 - t * t).sqrt() + t.asin());
            assert!((psi(&spec, 2, t) - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn psi_inverse_examples() {
        let spec = InlierSpec::uniform_ball(1.0);
        assert_eq!(psi_inverse(&spec, 3, 1.0).unwrap(), 1.0);
        assert!((psi_inverse(&spec, 1, 0.25).unwrap() - 0.25).abs() < 1e-12);
        for dim in 1..5 {
            for i in 1..10 {
                let q = i as f64 / 10.0;
                let t = psi_inverse(&spec, dim, q).unwrap();
                assert!((psi(&spec, dim, t) - q).abs() <= 1e-10);
            }
        }
        let atom = InlierSpec { atom: 0.3, ..spec };
        assert!(matches!(psi_inverse(&atom, 2, 0.3), Err(Error::Domain(_))));
        assert!(matches!(psi_inverse(&atom, 2, 0.2), Err(Error::Domain(_))));
    }

    #[test]
    fn tau0_segment_value() {
        let t = tau0(&model(2, 0.0), 1.0).unwrap();
        assert!((t - 0.25 / PI).abs() < 1e-12);
        assert!(matches!(tau0(&model(2, 0.0), 1.5), Err(Error::Domain(_))));
        assert!(matches!(tau0(&model(2, 0.0), 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn tau0_shrinks_with_atom_and_k() {
        let base = tau0(&model(2, 0.0), 1.0).unwrap();
        assert!(tau0(&model(2, 0.99), 1.0).unwrap() < base);
        let k8 = tau0(&model(8, 0.0), 1.0).unwrap();
        // ψ⁻¹(1/16)/π for the segment
        assert!((k8 - 1.0 / 16.0 / PI).abs() < 1e-12);
        assert!(k8 < base);
    }

    #[test]
    fn lower_bound_examples() {
        assert!((tau0_lower_bound_uniform(1, 1.0, 2, 1.0, 1.0) - 0.125).abs() < 1e-15);
        assert!((tau0_lower_bound_uniform(1, 0.5, 2, 1.0, 1.0) - 0.25).abs() < 1e-15);
        let b = tau0_lower_bound_uniform(3, 0.7, 4, 0.5, 1.0);
        let scaled = tau0_lower_bound_uniform(3, 0.7, 4, 1.5, 1.0);
        assert!((scaled / b - 3f64.powf(0.7)).abs() < 1e-12);
    }
}
