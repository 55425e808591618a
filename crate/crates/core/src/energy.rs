//! The lp energy `Σ_x min_i dist(x, L_i)^p`, its Voronoi regions, and the
//! first-order quantities around them.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::{theta_dstar, Geodesic, Subspace, SubspaceTuple};
use crate::model::{sample_unit_ball, Dataset};

/// Distance gap below which two subspaces count as equidistant.
pub const TIE_TOL: f64 = 1e-12;
/// A point with `dist(x, L) ≤ ON_SUBSPACE_TOL·max(1, ‖x‖)` counts as lying on `L`.
pub const ON_SUBSPACE_TOL: f64 = 1e-12;
/// Smallest Monte Carlo budget accepted by the region estimators.
pub const MIN_MC_BUDGET: usize = 1_000;
/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_901;

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain(format!("p must be positive and finite, got {p}")));
    }
    Ok(())
}

fn check_dataset(ds: &Dataset, tuple: &SubspaceTuple) -> Result<()> {
    if ds.ambient_dim() != tuple.ambient_dim() {
        return Err(Error::Shape(format!(
            "dataset lives in R^{} but the subspaces in R^{}",
            ds.ambient_dim(),
            tuple.ambient_dim()
        )));
    }
    Ok(())
}

/// `|x^p|` with exact fast paths for the exponents used most.
#[inline]
pub(crate) fn pow_p(r: f64, p: f64) -> f64 {
    if p == 1.0 {
        r
    } else if p == 2.0 {
        r * r
    } else if p == 0.5 {
        r.sqrt()
    } else {
        r.powf(p)
    }
}

/// Distances of every column of `points` (D×N) to `sub`, via the explicit
/// residual `x − BBᵀx` so points on the subspace give exact zeros up to
/// rounding.
pub fn distances_to(points: &DMatrix<f64>, sub: &Subspace) -> Vec<f64> {
    let b = sub.basis();
    let residual = points - b * (b.transpose() * points);
    residual.column_iter().map(|c| c.norm()).collect()
}

/// `K×N` matrix of point-to-subspace distances.
pub fn distance_table(points: &DMatrix<f64>, tuple: &SubspaceTuple) -> DMatrix<f64> {
    let n = points.ncols();
    let mut table = DMatrix::zeros(tuple.k(), n);
    for (i, sub) in tuple.iter().enumerate() {
        for (j, d) in distances_to(points, sub).into_iter().enumerate() {
            table[(i, j)] = d;
        }
    }
    table
}

pub fn point_energy(x: &[f64], tuple: &SubspaceTuple, p: f64) -> Result<f64> {
    check_p(p)?;
    let mut best = f64::INFINITY;
    for sub in tuple.iter() {
        best = best.min(sub.dist_point(x)?);
    }
    Ok(pow_p(best, p))
}

/// Sum over a dataset; `n` is kept so the empirical mean is available.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Energy {
    pub sum: f64,
    pub n: usize,
}

impl Energy {
    pub fn mean(&self) -> Result<f64> {
        if self.n == 0 {
            return Err(Error::Empty("mean energy of an empty dataset".into()));
        }
        Ok(self.sum / self.n as f64)
    }
}

pub fn dataset_energy(ds: &Dataset, tuple: &SubspaceTuple, p: f64) -> Result<Energy> {
    check_p(p)?;
    check_dataset(ds, tuple)?;
    Ok(Energy { sum: energy_of_points(ds.points(), tuple, p), n: ds.len() })
}

/// Energy of the columns of `points`; summation runs in column order.
pub(crate) fn energy_of_points(points: &DMatrix<f64>, tuple: &SubspaceTuple, p: f64) -> f64 {
    let table = distance_table(points, tuple);
    table.column_iter().map(|c| pow_p(c.min(), p)).sum()
}

/// Nearest-subspace assignment. Labels are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoronoiLabels {
    pub labels: Vec<usize>,
    /// Rows whose two smallest distances differ by less than [`TIE_TOL`].
    pub ties: Vec<bool>,
}

impl VoronoiLabels {
    pub fn region(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.labels.iter().enumerate().filter(move |(_, &l)| l == j).map(|(i, _)| i)
    }

    pub fn region_size(&self, j: usize) -> usize {
        self.labels.iter().filter(|&&l| l == j).count()
    }
}

pub fn voronoi_labels(ds: &Dataset, tuple: &SubspaceTuple) -> Result<VoronoiLabels> {
    check_dataset(ds, tuple)?;
    Ok(labels_from_table(&distance_table(ds.points(), tuple)))
}

pub(crate) fn labels_from_table(table: &DMatrix<f64>) -> VoronoiLabels {
    let n = table.ncols();
    let mut labels = Vec::with_capacity(n);
    let mut ties = Vec::with_capacity(n);
    for c in table.column_iter() {
        let min = c.min();
        let best = (0..c.len()).find(|&i| c[i] - min < TIE_TOL).expect("nonempty tuple");
        let tied = (0..c.len()).any(|i| i != best && c[i] - min < TIE_TOL);
        labels.push(best + 1);
        ties.push(tied);
    }
    VoronoiLabels { labels, ties }
}

fn on_subspace(dist: f64, x_norm: f64) -> bool {
    dist <= ON_SUBSPACE_TOL * x_norm.max(1.0)
}

/// `P_L(x) P⊥_L(x)ᵀ dist(x, L)^{p−2}`.
pub fn d_matrix(l: &Subspace, x: &[f64], p: f64) -> Result<DMatrix<f64>> {
    check_p(p)?;
    let proj = l.project(x)?;
    let xv = DVector::from_column_slice(x);
    let perp = &xv - &proj;
    let dist = perp.norm();
    if on_subspace(dist, xv.norm()) {
        if p < 2.0 {
            return Err(Error::Domain(format!("x lies on L, so dist^(p-2) is singular for p = {p}")));
        }
        return Ok(DMatrix::zeros(x.len(), x.len()));
    }
    let scale = if p == 2.0 { 1.0 } else { dist.powf(p - 2.0) };
    Ok(proj * perp.transpose() * scale)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum FirstOrderResidual {
    /// No usable point in the region. `skipped` counts points on `L_j`.
    Empty { skipped: usize },
    Region {
        /// Mean of `D_{L_j,x,p}` over the used points.
        matrix: DMatrix<f64>,
        frobenius: f64,
        used: usize,
        /// Points on `L_j` left out because p < 2 makes the integrand singular.
        skipped: usize,
    },
}

impl FirstOrderResidual {
    pub fn norm(&self) -> Option<f64> {
        match self {
            FirstOrderResidual::Empty { .. } => None,
            FirstOrderResidual::Region { frobenius, .. } => Some(*frobenius),
        }
    }

    pub fn matrix(&self) -> Option<&DMatrix<f64>> {
        match self {
            FirstOrderResidual::Empty { .. } => None,
            FirstOrderResidual::Region { matrix, .. } => Some(matrix),
        }
    }
}

/// Mean of `d_matrix(L_j, x, p)` over the Voronoi region of `L_j` (1-based `j`).
pub fn first_order_residual(ds: &Dataset, tuple: &SubspaceTuple, j: usize, p: f64) -> Result<FirstOrderResidual> {
    check_p(p)?;
    if j == 0 || j > tuple.k() {
        return Err(Error::Domain(format!("region index {j} outside 1..={}", tuple.k())));
    }
    let labels = voronoi_labels(ds, tuple)?;
    let l = tuple.get(j - 1);
    let dim = ds.ambient_dim();
    let mut sum = DMatrix::zeros(dim, dim);
    let (mut used, mut skipped) = (0usize, 0usize);
    for i in labels.region(j) {
        let x = ds.point(i);
        let dist = l.dist_point(x)?;
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if on_subspace(dist, norm) && p < 2.0 {
            skipped += 1;
            continue;
        }
        sum += d_matrix(l, x, p)?;
        used += 1;
    }
    if used == 0 {
        return Ok(FirstOrderResidual::Empty { skipped });
    }
    let matrix = sum / used as f64;
    let frobenius = matrix.norm();
    Ok(FirstOrderResidual::Region { matrix, frobenius, used, skipped })
}

/// The product path from `a` towards `b`: coordinate `i` runs along its own
/// geodesic at speed `T_i / T_max`, so the longest coordinate is arc-length.
pub struct ProductPath {
    paths: Vec<Geodesic>,
    speeds: Vec<f64>,
    origin: SubspaceTuple,
    max_length: f64,
}

impl ProductPath {
    pub fn between(a: &SubspaceTuple, b: &SubspaceTuple) -> Result<Self> {
        if a.k() != b.k() || a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim() {
            return Err(Error::Shape("tuples differ in (K, D, d)".into()));
        }
        let paths: Vec<Geodesic> =
            a.iter().zip(b.iter()).map(|(f, g)| Geodesic::between(f, g)).collect::<Result<_>>()?;
        let max_length = paths.iter().map(Geodesic::length).fold(0.0, f64::max);
        let speeds =
            paths.iter().map(|g| if max_length > 0.0 { g.length() / max_length } else { 0.0 }).collect();
        Ok(ProductPath { paths, speeds, origin: a.clone(), max_length })
    }

    pub fn max_length(&self) -> f64 {
        self.max_length
    }

    pub fn at(&self, t: f64) -> SubspaceTuple {
        if self.max_length == 0.0 {
            return self.origin.clone();
        }
        let subs = self.paths.iter().zip(&self.speeds).map(|(g, s)| g.at(t * s)).collect();
        SubspaceTuple::new(subs).expect("same shape as origin")
    }
}

/// `(E(Γ(h)) − E(Γ(0))) / h^p` along [`ProductPath`] from `a` to `b`, with
/// `E` the summed energy. Zero when `a = b`.
pub fn geodesic_directional_derivative(
    ds: &Dataset,
    a: &SubspaceTuple,
    b: &SubspaceTuple,
    p: f64,
    h: f64,
) -> Result<f64> {
    check_p(p)?;
    check_dataset(ds, a)?;
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step h must be positive, got {h}")));
    }
    let path = ProductPath::between(a, b)?;
    if path.max_length() == 0.0 {
        return Ok(0.0);
    }
    if h > path.max_length() {
        return Err(Error::Domain(format!("step {h} exceeds the path length {}", path.max_length())));
    }
    let e0 = energy_of_points(ds.points(), a, p);
    let e1 = energy_of_points(ds.points(), &path.at(h), p);
    Ok((e1 - e0) / pow_p(h, p))
}

/// Bernoulli frequency with a Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProportionEstimate {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub hits: usize,
    pub samples: usize,
}

impl ProportionEstimate {
    pub fn wilson(hits: usize, samples: usize, z: f64) -> Self {
        let n = samples as f64;
        let phat = hits as f64 / n;
        let z2 = z * z;
        let centre = (phat + z2 / (2.0 * n)) / (1.0 + z2 / n);
        let half = z / (1.0 + z2 / n) * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
        ProportionEstimate {
            estimate: phat,
            ci_low: (centre - half).max(0.0),
            ci_high: (centre + half).min(1.0),
            hits,
            samples,
        }
    }

    /// Whether the interval lies strictly above zero.
    pub fn excludes_zero(&self) -> bool {
        self.hits > 0 && self.ci_low > 0.0
    }
}

/// Fraction of the unit ball in the symmetric difference between region
/// `region` (1-based) of `a` and of `b`, with a 99% interval.
pub fn voronoi_symmetric_difference<R: Rng + ?Sized>(
    a: &SubspaceTuple,
    b: &SubspaceTuple,
    region: usize,
    budget: usize,
    rng: &mut R,
) -> Result<ProportionEstimate> {
    if budget < MIN_MC_BUDGET {
        return Err(Error::Budget { got: budget, min: MIN_MC_BUDGET });
    }
    if a.k() != b.k() || a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim() {
        return Err(Error::Shape("tuples differ in (K, D, d)".into()));
    }
    if region == 0 || region > a.k() {
        return Err(Error::Domain(format!("region index {region} outside 1..={}", a.k())));
    }
    let dim = a.ambient_dim();
    const CHUNK: usize = 4096;
    let mut hits = 0;
    let mut done = 0;
    while done < budget {
        let m = CHUNK.min(budget - done);
        let mut pts = DMatrix::zeros(dim, m);
        for j in 0..m {
            pts.set_column(j, &sample_unit_ball(dim, rng));
        }
        let la = labels_from_table(&distance_table(&pts, a));
        let lb = labels_from_table(&distance_table(&pts, b));
        hits += la.labels.iter().zip(&lb.labels).filter(|(&x, &y)| (x == region) != (y == region)).count();
        done += m;
    }
    Ok(ProportionEstimate::wilson(hits, budget, Z_99))
}

/// Hypotheses under which moving `L_moved` away from the truth must change
/// region `region` on a set of positive volume.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityHypotheses {
    /// The moved subspace differs from its original and stays away from the
    /// other truth subspaces, which are pairwise separated.
    pub separated: bool,
    /// Both the original and the moved subspace are at least as close to
    /// `L_region` as every third subspace is.
    pub nearest_neighbor: bool,
}

impl SensitivityHypotheses {
    pub fn hold(&self) -> bool {
        self.separated && self.nearest_neighbor
    }
}

/// Checks the region-sensitivity hypotheses for replacing coordinate `moved`
/// of `truth` by `replacement`, measured by the `d*`-th largest angle.
/// Indices are 1-based and must differ.
pub fn region_sensitivity_hypotheses(
    truth: &SubspaceTuple,
    moved: usize,
    replacement: &Subspace,
    region: usize,
) -> Result<SensitivityHypotheses> {
    let k = truth.k();
    if moved == region || moved == 0 || region == 0 || moved > k || region > k {
        return Err(Error::Domain(format!("need distinct indices in 1..={k}, got moved={moved}, region={region}")));
    }
    let (m, r) = (moved - 1, region - 1);
    let distinct = crate::grassmann::dist_grassmann(replacement, truth.get(m))? > 0.0;
    let mut moved_apart = true;
    for j in (0..k).filter(|&j| j != m) {
        moved_apart &= theta_dstar(replacement, truth.get(j))? > 0.0;
    }
    let mut pairwise = true;
    for i in 0..k {
        for j in (i + 1)..k {
            pairwise &= theta_dstar(truth.get(i), truth.get(j))? > 0.0;
        }
    }
    let near = theta_dstar(replacement, truth.get(r))?.max(theta_dstar(truth.get(m), truth.get(r))?);
    let mut third = f64::INFINITY;
    for i in (0..k).filter(|&i| i != m && i != r) {
        third = third.min(theta_dstar(truth.get(i), truth.get(r))?);
    }
    Ok(SensitivityHypotheses { separated: distinct && moved_apart && pairwise, nearest_neighbor: near <= third })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::{random_tuple, random_unit_tangent};
    use crate::model::tests::lines_model;
    use crate::rng::rng_from;
    use proptest::prelude::*;
    use rand::Rng;
    use std::f64::consts::FRAC_PI_2;

    fn x_axis() -> SubspaceTuple {
        SubspaceTuple::lines_2d(&[0.0]).unwrap()
    }

    fn axes() -> SubspaceTuple {
        SubspaceTuple::lines_2d(&[0.0, FRAC_PI_2]).unwrap()
    }

    #[test]
    fn point_energy_examples() {
        assert_eq!(point_energy(&[0.0, 1.0], &x_axis(), 3.7).unwrap(), 1.0);
        assert!((point_energy(&[0.0, 2.0], &x_axis(), 0.5).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(point_energy(&[0.3, 0.0], &x_axis(), 1.0).unwrap(), 0.0);
        assert!(point_energy(&[0.0, 1.0, 0.0], &x_axis(), 1.0).is_err());
    }

    #[test]
    fn dataset_energy_examples() {
        let ds = Dataset::from_rows(&[vec![5.0, 1.0], vec![-1.0, 2.0]]).unwrap();
        let e = dataset_energy(&ds, &x_axis(), 1.0).unwrap();
        assert!((e.sum - 3.0).abs() < 1e-15);
        assert!((e.mean().unwrap() - 1.5).abs() < 1e-15);
        let empty = ds.filter(|_| false);
        let e = dataset_energy(&empty, &x_axis(), 1.0).unwrap();
        assert_eq!(e.sum, 0.0);
        assert!(e.mean().is_err());
        let clean = lines_model(0.0).sample(300, 1);
        assert!(dataset_energy(&clean, lines_model(0.0).truth(), 1.0).unwrap().sum < 1e-12);
    }

    #[test]
    fn voronoi_examples() {
        let ds = Dataset::from_rows(&[vec![0.0, 0.7], vec![1.0, 1.0], vec![2.0, 1.0]]).unwrap();
        let v = voronoi_labels(&ds, &axes()).unwrap();
        assert_eq!(v.labels, vec![2, 1, 1]);
        assert_eq!(v.ties, vec![false, true, false]);
    }

    #[test]
    fn d_matrix_examples() {
        let l = x_axis().get(0).clone();
        let m2 = d_matrix(&l, &[3.0, 4.0], 2.0).unwrap();
        assert_eq!(m2, DMatrix::from_row_slice(2, 2, &[0.0, 12.0, 0.0, 0.0]));
        let m1 = d_matrix(&l, &[3.0, 4.0], 1.0).unwrap();
        assert!((m1[(0, 1)] - 3.0).abs() < 1e-15);
        assert_eq!(d_matrix(&l, &[3.0, 0.0], 2.0).unwrap(), DMatrix::zeros(2, 2));
        assert!(d_matrix(&l, &[3.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn first_order_examples() {
        let t = x_axis();
        let single = Dataset::from_rows(&[vec![3.0, 4.0]]).unwrap();
        match first_order_residual(&single, &t, 1, 2.0).unwrap() {
            FirstOrderResidual::Region { matrix, used, .. } => {
                assert_eq!(used, 1);
                assert_eq!(matrix[(0, 1)], 12.0);
            }
            other => panic!("{other:?}"),
        }
        let sym = Dataset::from_rows(&[vec![3.0, 4.0], vec![3.0, -4.0], vec![1.0, 0.0]]).unwrap();
        for p in [0.5, 1.0, 2.0, 3.0] {
            assert!(first_order_residual(&sym, &t, 1, p).unwrap().norm().unwrap() < 1e-12);
        }
        match first_order_residual(&sym, &t, 1, 1.0).unwrap() {
            FirstOrderResidual::Region { skipped, used, .. } => assert_eq!((skipped, used), (1, 2)),
            other => panic!("{other:?}"),
        }
        let far = SubspaceTuple::lines_2d(&[0.0, 0.1]).unwrap();
        let only_x = Dataset::from_rows(&[vec![0.0, 1.0]]).unwrap();
        assert_eq!(first_order_residual(&only_x, &far, 1, 2.0).unwrap(), FirstOrderResidual::Empty { skipped: 0 });
    }

    #[test]
    fn directional_derivative_examples() {
        let ds = lines_model(0.1).sample(200, 2);
        let t = lines_model(0.0).truth().clone();
        assert_eq!(geodesic_directional_derivative(&ds, &t, &t, 1.0, 1e-4).unwrap(), 0.0);
        // one point on the first line, K = 1: the derivative is bounded by ‖x‖
        let x = [0.6, 0.0];
        let one = Dataset::from_rows(&[x.to_vec()]).unwrap();
        let a = x_axis();
        for angle in [0.3, -0.7, 1.2] {
            let b = SubspaceTuple::lines_2d(&[angle]).unwrap();
            let dd = geodesic_directional_derivative(&one, &a, &b, 1.0, 1e-4).unwrap();
            assert!(dd.abs() <= 0.6 + 1e-9 && dd > 0.0, "{dd}");
        }
    }

    #[test]
    fn symmetric_difference_examples() {
        let a = SubspaceTuple::lines_2d(&[0.0, 1.0]).unwrap();
        let mut rng = rng_from(5);
        let same = voronoi_symmetric_difference(&a, &a, 1, 10_000, &mut rng).unwrap();
        assert_eq!(same.hits, 0);
        let b = SubspaceTuple::lines_2d(&[0.0, 1.2]).unwrap();
        let diff = voronoi_symmetric_difference(&a, &b, 1, 100_000, &mut rng).unwrap();
        // the bisector moves by 0.1 rad on both sides: measure 2·0.1/π
        assert!(diff.excludes_zero());
        assert!((diff.estimate - 0.2 / std::f64::consts::PI).abs() < 0.005, "{}", diff.estimate);
        assert!(voronoi_symmetric_difference(&a, &b, 1, 999, &mut rng).is_err());
    }

    #[test]
    fn wilson_interval_brackets() {
        let e = ProportionEstimate::wilson(0, 1000, Z_99);
        assert_eq!(e.ci_low, 0.0);
        assert!(e.ci_high > 0.0 && !e.excludes_zero());
        let e = ProportionEstimate::wilson(500, 1000, Z_99);
        assert!(e.ci_low < 0.5 && e.ci_high > 0.5);
    }

    #[test]
    fn sensitivity_hypotheses_checker() {
        let t = SubspaceTuple::lines_2d(&[0.0, 0.5, 1.2]).unwrap();
        let near = Subspace::line_2d(0.6);
        assert!(region_sensitivity_hypotheses(&t, 2, &near, 1).unwrap().hold());
        let far = Subspace::line_2d(1.4);
        assert!(!region_sensitivity_hypotheses(&t, 2, &far, 1).unwrap().nearest_neighbor);
        let onto = Subspace::line_2d(1.2);
        assert!(!region_sensitivity_hypotheses(&t, 2, &onto, 1).unwrap().separated);
    }

    #[test]
    fn rotation_gradient_matches_d_matrix() {
        // K = 1, p = 2, D = 3, d = 1: along exp(tA), dE/dt = −2 Σ ⟨D_x, A⟩ with
        // D_x = P(x)P⊥(x)ᵀ read as a d×(D−d) map, i.e. −2 Σ (bᵀx)(xᵀA_col).
        let mut rng = rng_from(9);
        let model_pts = DMatrix::from_fn(3, 50, |_, _| rng.random::<f64>() - 0.5);
        let ds = Dataset::new(model_pts, vec![0; 50], 0).unwrap();
        let l = crate::grassmann::random_subspace(3, 1, &mut rng).unwrap();
        let tangent = random_unit_tangent(&l, &mut rng).unwrap();
        let tuple = SubspaceTuple::new(vec![l.clone()]).unwrap();
        let mut analytic = 0.0;
        for i in 0..ds.len() {
            let dm = d_matrix(&l, ds.point(i), 2.0).unwrap();
            // ⟨D, b·aᵀ⟩ summed over the basis/tangent pair
            let b = l.basis().column(0);
            let a = tangent.column(0);
            analytic += (b.transpose() * &dm * a)[(0, 0)];
        }
        analytic *= -2.0;
        let e0 = dataset_energy(&ds, &tuple, 2.0).unwrap().sum;
        let mut errs = Vec::new();
        for h in [1e-4, 1e-5] {
            let moved = SubspaceTuple::new(vec![l.exp(&tangent, h).unwrap()]).unwrap();
            let fd = (dataset_energy(&ds, &moved, 2.0).unwrap().sum - e0) / h;
            errs.push((fd - analytic).abs());
        }
        assert!(errs[1] < 1e-5, "{errs:?}");
        assert!(errs[1] < errs[0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn energy_is_homogeneous(seed in any::<u64>(), c in 0.01f64..2.0, p in 0.2f64..3.0) {
            let mut rng = rng_from(seed);
            let t = random_tuple(2, 4, 2, &mut rng).unwrap();
            let x: Vec<f64> = (0..4).map(|_| rng.random::<f64>() - 0.5).collect();
            let cx: Vec<f64> = x.iter().map(|v| c * v).collect();
            let lhs = point_energy(&cx, &t, p).unwrap();
            let rhs = c.powf(p) * point_energy(&x, &t, p).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
        }

        #[test]
        fn voronoi_decomposition_and_permutation(seed in any::<u64>(), p in 0.3f64..2.5) {
            let mut rng = rng_from(seed);
            let t = random_tuple(3, 3, 1, &mut rng).unwrap();
            let pts = DMatrix::from_fn(3, 40, |_, _| rng.random::<f64>() - 0.5);
            let ds = Dataset::new(pts, vec![0; 40], 0).unwrap();
            let e = dataset_energy(&ds, &t, p).unwrap().sum;
            let v = voronoi_labels(&ds, &t).unwrap();
            let mut by_region = 0.0;
            for j in 1..=3 {
                for i in v.region(j) {
                    by_region += pow_p(t.get(j - 1).dist_point(ds.point(i)).unwrap(), p);
                }
            }
            prop_assert!((e - by_region).abs() <= 1e-9 * e.max(1e-300));
            let perm = t.permuted(&[2, 0, 1]).unwrap();
            let ep = dataset_energy(&ds, &perm, p).unwrap().sum;
            prop_assert!((e - ep).abs() <= 1e-12 * e);
        }

        #[test]
        fn d_matrix_lives_in_l_by_l_perp(seed in any::<u64>(), p in 0.3f64..3.0) {
            let mut rng = rng_from(seed);
            let l = crate::grassmann::random_subspace(4, 2, &mut rng).unwrap();
            let x: Vec<f64> = (0..4).map(|_| rng.random::<f64>() - 0.5).collect();
            let m = d_matrix(&l, &x, p).unwrap();
            let proj = l.projector();
            let perp = DMatrix::identity(4, 4) - &proj;
            let scale = m.norm().max(1.0);
            prop_assert!((&perp * &m).norm() <= 1e-12 * scale);
            prop_assert!((&m * &proj).norm() <= 1e-12 * scale);
        }

        #[test]
        fn residual_vanishes_on_symmetrized_data(seed in any::<u64>(), p in 0.5f64..3.0) {
            let mut rng = rng_from(seed);
            let t = random_tuple(1, 3, 1, &mut rng).unwrap();
            let l = t.get(0);
            let mut rows = Vec::new();
            for _ in 0..20 {
                let x: Vec<f64> = (0..3).map(|_| rng.random::<f64>() - 0.5).collect();
                let proj = l.project(&x).unwrap();
                let refl: Vec<f64> = (0..3).map(|i| 2.0 * proj[i] - x[i]).collect();
                rows.push(x);
                rows.push(refl);
            }
            let ds = Dataset::from_rows(&rows).unwrap();
            let r = first_order_residual(&ds, &t, 1, p).unwrap();
            prop_assert!(r.norm().unwrap() < 1e-12);
        }
    }
}
