//! Hybrid-linear mixture models: K inlier components carried by d-subspaces,
//! bounded orthogonal noise, and an outlier component, all inside the unit
//! ball.

mod bounds;
mod io;
mod psi;
mod scenario;

pub use bounds::{
    check_exact_recovery_condition, delta_kappa_lower_bounds, noise_recovery_bounds, DeltaKappaBounds,
    ExactRecoveryReport, NoiseBounds,
};
pub use psi::{psi, psi_inverse, tau0, tau0_lower_bound_uniform};
pub use scenario::{Fig1Params, Scenario, SCENARIO_NAMES};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::{dist_grassmann, Subspace, SubspaceTuple};
use crate::rng::rng_from;

/// Tolerance on `Σ α_i = 1`.
pub const ALPHA_SUM_TOL: f64 = 1e-12;
/// Minimum Grassmannian distance between two truth subspaces.
pub const DISTINCT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InlierKind {
    UniformBall,
    UniformSphere,
}

/// The spherically symmetric inlier law inside a d-subspace, shared by all
/// components up to rotation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlierSpec {
    pub kind: InlierKind,
    pub radius: f64,
    /// Probability mass placed at the origin.
    #[serde(default)]
    pub atom: f64,
}

impl InlierSpec {
    pub fn uniform_ball(radius: f64) -> Self {
        InlierSpec { kind: InlierKind::UniformBall, radius, atom: 0.0 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius <= 1.0) {
            return Err(Error::InvalidModel(format!("inlier.radius must lie in (0, 1], got {}", self.radius)));
        }
        if !(0.0..1.0).contains(&self.atom) {
            return Err(Error::InvalidModel(format!("inlier.atom must lie in [0, 1), got {}", self.atom)));
        }
        Ok(())
    }

    fn sample<R: Rng + ?Sized>(&self, dim: usize, rng: &mut R) -> DVector<f64> {
        if self.atom > 0.0 && rng.random::<f64>() < self.atom {
            return DVector::zeros(dim);
        }
        let dir = unit_direction(dim, rng);
        let r = match self.kind {
            InlierKind::UniformBall => self.radius * rng.random::<f64>().powf(1.0 / dim as f64),
            InlierKind::UniformSphere => self.radius,
        };
        dir * r
    }
}

/// Orthogonal noise added to inliers; supports have radius at most `level`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NoiseSpec {
    None,
    /// Uniform on the cube of half-side `level/√(D−d)` in the complement.
    UniformSlab { level: f64 },
    /// Uniform on the ball of radius `level` in the complement.
    UniformOrthogonalBall { level: f64 },
    /// Codimension one only: uniform offset on `(−level·(1−f)/f, level)`
    /// along the complement normal, so a fraction `f` of the mass lies on the
    /// positive side.
    OffsetSlab { level: f64, upper_fraction: f64 },
}

impl NoiseSpec {
    pub fn level(&self) -> f64 {
        match *self {
            NoiseSpec::None => 0.0,
            NoiseSpec::UniformSlab { level }
            | NoiseSpec::UniformOrthogonalBall { level }
            | NoiseSpec::OffsetSlab { level, .. } => level,
        }
    }

    /// Same kind at a different level; `None` becomes a uniform slab.
    pub fn with_level(&self, level: f64) -> NoiseSpec {
        if level == 0.0 {
            return NoiseSpec::None;
        }
        match *self {
            NoiseSpec::None | NoiseSpec::UniformSlab { .. } => NoiseSpec::UniformSlab { level },
            NoiseSpec::UniformOrthogonalBall { .. } => NoiseSpec::UniformOrthogonalBall { level },
            NoiseSpec::OffsetSlab { upper_fraction, .. } => NoiseSpec::OffsetSlab { level, upper_fraction },
        }
    }

    fn validate(&self, codim: usize) -> Result<()> {
        let level = self.level();
        if !(level >= 0.0 && level.is_finite()) {
            return Err(Error::InvalidModel(format!("noise.level must be finite and >= 0, got {level}")));
        }
        if level > 0.0 && codim == 0 {
            return Err(Error::InvalidModel("noise needs d < D".into()));
        }
        if let NoiseSpec::OffsetSlab { upper_fraction, .. } = *self {
            if codim != 1 {
                return Err(Error::InvalidModel("offset-slab noise needs D - d = 1".into()));
            }
            if !(0.5..1.0).contains(&upper_fraction) {
                return Err(Error::InvalidModel(format!(
                    "noise.upper_fraction must lie in [0.5, 1), got {upper_fraction}"
                )));
            }
        }
        Ok(())
    }

    /// Coordinates in the complement basis.
    fn sample<R: Rng + ?Sized>(&self, codim: usize, rng: &mut R) -> DVector<f64> {
        match *self {
            NoiseSpec::None => DVector::zeros(codim),
            NoiseSpec::UniformSlab { level } => {
                let h = level / (codim as f64).sqrt();
                DVector::from_fn(codim, |_, _| h * (2.0 * rng.random::<f64>() - 1.0))
            }
            NoiseSpec::UniformOrthogonalBall { level } => {
                let r = level * rng.random::<f64>().powf(1.0 / codim as f64);
                unit_direction(codim, rng) * r
            }
            NoiseSpec::OffsetSlab { level, upper_fraction } => {
                let lower = level * (1.0 - upper_fraction) / upper_fraction;
                DVector::from_element(1, -lower + (level + lower) * rng.random::<f64>())
            }
        }
    }
}

/// The outlier component μ_0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OutlierSpec {
    /// Uniform on the ball of the given radius in R^D.
    UniformBallD { radius: f64 },
    /// Uniform on the ball of the given radius inside another subspace.
    OnSubspace { subspace: Subspace, radius: f64 },
    /// Uniform on the shell `inner ≤ ‖x‖ ≤ 1`.
    LargeMagnitudeShell { inner: f64 },
}

impl OutlierSpec {
    fn validate(&self, ambient: usize) -> Result<()> {
        match self {
            OutlierSpec::UniformBallD { radius } | OutlierSpec::OnSubspace { radius, .. }
                if !(*radius > 0.0 && *radius <= 1.0) =>
            {
                Err(Error::InvalidModel(format!("outlier.radius must lie in (0, 1], got {radius}")))
            }
            OutlierSpec::OnSubspace { subspace, .. } if subspace.ambient_dim() != ambient => {
                Err(Error::InvalidModel("outlier.subspace has the wrong ambient dimension".into()))
            }
            OutlierSpec::LargeMagnitudeShell { inner } if !(*inner >= 0.0 && *inner < 1.0) => {
                Err(Error::InvalidModel(format!("outlier.inner must lie in [0, 1), got {inner}")))
            }
            _ => Ok(()),
        }
    }

    fn sample<R: Rng + ?Sized>(&self, ambient: usize, rng: &mut R) -> DVector<f64> {
        match self {
            OutlierSpec::UniformBallD { radius } => {
                unit_direction(ambient, rng) * (radius * rng.random::<f64>().powf(1.0 / ambient as f64))
            }
            OutlierSpec::OnSubspace { subspace, radius } => {
                let d = subspace.dim();
                let coords = unit_direction(d, rng) * (radius * rng.random::<f64>().powf(1.0 / d as f64));
                subspace.basis() * coords
            }
            OutlierSpec::LargeMagnitudeShell { inner } => {
                let dim = ambient as f64;
                let lo = inner.powf(dim);
                let r = (lo + (1.0 - lo) * rng.random::<f64>()).powf(1.0 / dim);
                unit_direction(ambient, rng) * r
            }
        }
    }
}

/// Uniform draw from the closed unit ball of R^dim.
pub fn sample_unit_ball<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<f64> {
    unit_direction(dim, rng) * rng.random::<f64>().powf(1.0 / dim as f64)
}

fn unit_direction<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let g = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let n = g.norm();
        if n > 1e-300 {
            return g / n;
        }
    }
}

/// A full mixture `α_0 μ_0 + Σ α_i μ_i × ν_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct HlmModel {
    truth: SubspaceTuple,
    alphas: Vec<f64>,
    inlier: InlierSpec,
    noise: NoiseSpec,
    outlier: OutlierSpec,
    component_noise: Option<Vec<NoiseSpec>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    truth: SubspaceTuple,
    alphas: Vec<f64>,
    inlier: InlierSpec,
    noise: NoiseSpec,
    outlier: OutlierSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    component_noise: Option<Vec<NoiseSpec>>,
}

impl TryFrom<RawModel> for HlmModel {
    type Error = Error;
    fn try_from(r: RawModel) -> Result<Self> {
        let mut m = HlmModel::new(r.truth, r.alphas, r.inlier, r.noise, r.outlier)?;
        if let Some(per) = r.component_noise {
            m = m.with_component_noise(per)?;
        }
        Ok(m)
    }
}

impl From<HlmModel> for RawModel {
    fn from(m: HlmModel) -> Self {
        RawModel {
            truth: m.truth,
            alphas: m.alphas,
            inlier: m.inlier,
            noise: m.noise,
            outlier: m.outlier,
            component_noise: m.component_noise,
        }
    }
}

impl HlmModel {
    /// Validates and builds a model; `alphas[0]` is the outlier weight.
    pub fn new(
        truth: SubspaceTuple,
        alphas: Vec<f64>,
        inlier: InlierSpec,
        noise: NoiseSpec,
        outlier: OutlierSpec,
    ) -> Result<Self> {
        let k = truth.k();
        if alphas.len() != k + 1 {
            return Err(Error::InvalidModel(format!("alphas needs K+1 = {} entries, got {}", k + 1, alphas.len())));
        }
        if alphas.iter().any(|a| !(*a >= 0.0 && a.is_finite())) {
            return Err(Error::InvalidModel("alphas must be finite and nonnegative".into()));
        }
        if let Some(i) = (1..=k).find(|&i| alphas[i] <= 0.0) {
            return Err(Error::InvalidModel(format!("alphas[{i}] must be > 0 (every inlier component needs mass)")));
        }
        let total: f64 = alphas.iter().sum();
        if (total - 1.0).abs() > ALPHA_SUM_TOL {
            return Err(Error::InvalidModel(format!("alphas must sum to 1, got {total}")));
        }
        for i in 0..k {
            for j in i + 1..k {
                if dist_grassmann(truth.get(i), truth.get(j))? <= DISTINCT_TOL {
                    return Err(Error::InvalidModel(format!("truth subspaces {i} and {j} coincide")));
                }
            }
        }
        inlier.validate()?;
        noise.validate(truth.ambient_dim() - truth.dim())?;
        outlier.validate(truth.ambient_dim())?;
        Ok(HlmModel { truth, alphas, inlier, noise, outlier, component_noise: None })
    }

    /// Per-component noise laws, overriding the shared one.
    pub fn with_component_noise(mut self, per: Vec<NoiseSpec>) -> Result<Self> {
        if per.len() != self.k() {
            return Err(Error::InvalidModel(format!("component_noise needs K = {} entries", self.k())));
        }
        for n in &per {
            n.validate(self.ambient_dim() - self.dim())?;
        }
        self.component_noise = Some(per);
        Ok(self)
    }

    /// Equal inlier weights `(1 − α_0)/K`.
    pub fn with_outlier_fraction(&self, alpha0: f64) -> Result<Self> {
        let k = self.k() as f64;
        let mut alphas = vec![alpha0];
        alphas.extend(std::iter::repeat_n((1.0 - alpha0) / k, self.k()));
        let mut m = HlmModel::new(self.truth.clone(), alphas, self.inlier, self.noise, self.outlier.clone())?;
        m.component_noise = self.component_noise.clone();
        Ok(m)
    }

    /// Rescales every noise component to `level`.
    pub fn with_noise_level(&self, level: f64) -> Result<Self> {
        let mut m = HlmModel::new(
            self.truth.clone(),
            self.alphas.clone(),
            self.inlier,
            self.noise.with_level(level),
            self.outlier.clone(),
        )?;
        if let Some(per) = &self.component_noise {
            m = m.with_component_noise(per.iter().map(|n| n.with_level(level)).collect())?;
        }
        Ok(m)
    }

    pub fn with_truth(&self, truth: SubspaceTuple) -> Result<Self> {
        let mut m = HlmModel::new(truth, self.alphas.clone(), self.inlier, self.noise, self.outlier.clone())?;
        if let Some(per) = &self.component_noise {
            m = m.with_component_noise(per.clone())?;
        }
        Ok(m)
    }

    pub fn k(&self) -> usize {
        self.truth.k()
    }

    pub fn ambient_dim(&self) -> usize {
        self.truth.ambient_dim()
    }

    pub fn dim(&self) -> usize {
        self.truth.dim()
    }

    pub fn truth(&self) -> &SubspaceTuple {
        &self.truth
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn alpha0(&self) -> f64 {
        self.alphas[0]
    }

    pub fn min_inlier_alpha(&self) -> f64 {
        self.alphas[1..].iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn inlier(&self) -> &InlierSpec {
        &self.inlier
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }

    pub fn outlier(&self) -> &OutlierSpec {
        &self.outlier
    }

    pub fn component_noise(&self, i: usize) -> &NoiseSpec {
        match &self.component_noise {
            Some(per) => &per[i],
            None => &self.noise,
        }
    }

    /// The largest noise support radius ε over components.
    pub fn noise_level(&self) -> f64 {
        (0..self.k()).map(|i| self.component_noise(i).level()).fold(0.0, f64::max)
    }

    /// `min_{i≠j} dG(L*_i, L*_j)`, or +∞ when K = 1.
    pub fn min_pairwise_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.k() {
            for j in i + 1..self.k() {
                let d = dist_grassmann(self.truth.get(i), self.truth.get(j)).expect("validated shapes");
                best = best.min(d);
            }
        }
        best
    }

    /// N i.i.d. points; the dataset records `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Dataset {
        let mut rng = rng_from(seed);
        let mut ds = self.sample_with(n, &mut rng);
        ds.seed = seed;
        ds
    }

    /// Sampling driven by an external generator; the recorded seed is 0.
    pub fn sample_with<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Dataset {
        let ambient = self.ambient_dim();
        let dim = self.dim();
        let complements: Vec<DMatrix<f64>> = self.truth.iter().map(normal_frame).collect();
        let mut points = DMatrix::zeros(ambient, n);
        let mut labels = Vec::with_capacity(n);
        for col in 0..n {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut label = self.k();
            for (i, a) in self.alphas.iter().enumerate() {
                acc += a;
                if u < acc {
                    label = i;
                    break;
                }
            }
            let x = if label == 0 {
                self.outlier.sample(ambient, rng)
            } else {
                let l = self.truth.get(label - 1);
                let inside = l.basis() * self.inlier.sample(dim, rng);
                let noise = self.component_noise(label - 1);
                if noise.level() > 0.0 {
                    inside + &complements[label - 1] * noise.sample(ambient - dim, rng)
                } else {
                    inside
                }
            };
            points.set_column(col, &x);
            labels.push(label);
        }
        Dataset { points, labels, seed: 0 }
    }
}

/// Orthonormal complement frame; in R² the normal of a line is its basis
/// vector rotated by +90°, which fixes the sign of "above".
fn normal_frame(l: &Subspace) -> DMatrix<f64> {
    if l.ambient_dim() == 2 && l.dim() == 1 {
        let b = l.basis();
        DMatrix::from_column_slice(2, 1, &[-b[(1, 0)], b[(0, 0)]])
    } else {
        l.complement_basis()
    }
}

/// Signed offset of `x` from a line in R² along its +90° normal.
pub fn signed_offset_2d(line: &Subspace, x: &[f64]) -> f64 {
    let n = normal_frame(line);
    n[(0, 0)] * x[0] + n[(1, 0)] * x[1]
}

/// N points in R^D (stored column-wise, one column per point) with component
/// labels, 0 marking outliers.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    points: DMatrix<f64>,
    labels: Vec<usize>,
    seed: u64,
}

impl Dataset {
    /// `points` is D×N; labels default to 0 when unknown.
    pub fn new(points: DMatrix<f64>, labels: Vec<usize>, seed: u64) -> Result<Self> {
        if labels.len() != points.ncols() {
            return Err(Error::Shape(format!("{} labels for {} points", labels.len(), points.ncols())));
        }
        Ok(Dataset { points, labels, seed })
    }

    /// From row-major point lists.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let ambient = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != ambient) {
            return Err(Error::Shape("rows have different lengths".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Dataset::new(DMatrix::from_column_slice(ambient, rows.len(), &flat), vec![0; rows.len()], 0)
    }

    pub fn len(&self) -> usize {
        self.points.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ambient_dim(&self) -> usize {
        self.points.nrows()
    }

    /// D×N matrix of points.
    pub fn points(&self) -> &DMatrix<f64> {
        &self.points
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.ambient_dim();
        &self.points.as_slice()[i * d..(i + 1) * d]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Points whose index satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(usize) -> bool) -> Dataset {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| keep(i)).collect();
        let mut points = DMatrix::zeros(self.ambient_dim(), idx.len());
        for (c, &i) in idx.iter().enumerate() {
            points.column_mut(c).copy_from_slice(self.point(i));
        }
        Dataset { points, labels: idx.iter().map(|&i| self.labels[i]).collect(), seed: self.seed }
    }

    /// Every point scaled by `c`.
    pub fn scaled(&self, c: f64) -> Dataset {
        Dataset { points: &self.points * c, labels: self.labels.clone(), seed: self.seed }
    }

    /// Checks the norm and on-subspace invariants against `model`.
    pub fn check_invariants(&self, model: &HlmModel) -> Result<()> {
        let eps = model.noise_level();
        let max_norm = 1.0 + eps * (1.0 + 1e-12) + 1e-12;
        for i in 0..self.len() {
            let x = self.point(i);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > max_norm {
                return Err(Error::InvalidModel(format!("point {i} has norm {norm} > {max_norm}")));
            }
            let label = self.labels[i];
            if label > model.k() {
                return Err(Error::InvalidModel(format!("point {i} has label {label} > K")));
            }
            if label >= 1 {
                let d = model.truth().get(label - 1).dist_point(x)?;
                if d > model.component_noise(label - 1).level() + 1e-12 {
                    return Err(Error::InvalidModel(format!("point {i} lies {d} from its subspace")));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::grassmann::random_tuple;

    pub(crate) fn lines_model(alpha0: f64) -> HlmModel {
        let truth = SubspaceTuple::lines_2d(&[0.0, std::f64::consts::FRAC_PI_3]).unwrap();
        let a = (1.0 - alpha0) / 2.0;
        HlmModel::new(
            truth,
            vec![alpha0, a, a],
            InlierSpec::uniform_ball(1.0),
            NoiseSpec::None,
            OutlierSpec::UniformBallD { radius: 1.0 },
        )
        .unwrap()
    }

    #[test]
    fn clean_samples_lie_on_union() {
        let m = lines_model(0.0);
        let ds = m.sample(500, 3);
        for i in 0..ds.len() {
            let l = ds.labels()[i];
            assert!(l >= 1);
            assert!(m.truth().get(l - 1).dist_point(ds.point(i)).unwrap() < 1e-12);
        }
        ds.check_invariants(&m).unwrap();
    }

    #[test]
    fn component_frequencies_concentrate() {
        let m = lines_model(0.2);
        let n = 100_000;
        let ds = m.sample(n, 11);
        for (i, &a) in m.alphas().iter().enumerate() {
            let freq = ds.labels().iter().filter(|&&l| l == i).count() as f64 / n as f64;
            let sd = (a * (1.0 - a) / n as f64).sqrt();
            assert!((freq - a).abs() <= 3.0 * sd, "component {i}: {freq} vs {a}");
        }
    }

    #[test]
    fn inliers_are_isotropic_within_subspace() {
        let mut rng = rng_from(5);
        let truth = random_tuple(2, 5, 2, &mut rng).unwrap();
        let m = HlmModel::new(
            truth,
            vec![0.0, 0.5, 0.5],
            InlierSpec::uniform_ball(1.0),
            NoiseSpec::None,
            OutlierSpec::UniformBallD { radius: 1.0 },
        )
        .unwrap();
        let ds = m.sample(100_000, 8);
        let b = m.truth().get(0).basis();
        let mut cov = DMatrix::<f64>::zeros(2, 2);
        let mut count = 0.0;
        for i in 0..ds.len() {
            if ds.labels()[i] == 1 {
                let c = b.transpose() * DVector::from_column_slice(ds.point(i));
                cov += &c * c.transpose();
                count += 1.0;
            }
        }
        cov /= count;
        // uniform 2-ball: E[c c^T] = I/4
        let target = 0.25;
        assert!((cov[(0, 0)] - target).abs() < 0.05 * target);
        assert!((cov[(1, 1)] - target).abs() < 0.05 * target);
        assert!(cov[(0, 1)].abs() < 0.05 * target);
    }

    #[test]
    fn same_seed_same_bits() {
        let m = lines_model(0.3).with_noise_level(0.01).unwrap();
        assert_eq!(m.sample(300, 42), m.sample(300, 42));
        assert_ne!(m.sample(300, 42), m.sample(300, 43));
    }

    #[test]
    fn noisy_points_stay_in_support() {
        for noise in [
            NoiseSpec::UniformSlab { level: 0.05 },
            NoiseSpec::UniformOrthogonalBall { level: 0.05 },
            NoiseSpec::OffsetSlab { level: 0.05, upper_fraction: 0.7 },
        ] {
            let base = lines_model(0.1);
            let m = HlmModel::new(base.truth().clone(), base.alphas().to_vec(), *base.inlier(), noise, base.outlier().clone())
                .unwrap();
            m.sample(2000, 1).check_invariants(&m).unwrap();
        }
    }

    #[test]
    fn rejects_invalid_models() {
        let truth = SubspaceTuple::lines_2d(&[0.0, 1.0]).unwrap();
        let mk = |alphas: Vec<f64>| {
            HlmModel::new(truth.clone(), alphas, InlierSpec::uniform_ball(1.0), NoiseSpec::None, OutlierSpec::UniformBallD { radius: 1.0 })
        };
        assert!(mk(vec![1.0, 0.0, 0.0]).is_err());
        assert!(mk(vec![0.2, 0.2, 0.2]).is_err());
        assert!(mk(vec![0.2, 0.4]).is_err());
        assert!(mk(vec![0.2, 0.4, 0.4]).is_ok());
        let same = SubspaceTuple::lines_2d(&[0.3, 0.3]).unwrap();
        assert!(HlmModel::new(same, vec![0.0, 0.5, 0.5], InlierSpec::uniform_ball(1.0), NoiseSpec::None, OutlierSpec::UniformBallD { radius: 1.0 }).is_err());
    }

    #[test]
    fn model_json_roundtrip() {
        let m = lines_model(0.25).with_noise_level(0.02).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        let back: HlmModel = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }
}
