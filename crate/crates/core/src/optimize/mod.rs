//! Minimizers of the lp energy over tuples of subspaces: alternating K-flats
//! with IRLS fits, multi-restart, an exhaustive angle grid for lines in the
//! plane, and local-minimality checks.

mod grid;

pub use grid::{grid_search_global, line_angle, GridSpec};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{distance_table, distances_to, energy_of_points, labels_from_table, pow_p};
use crate::error::{Error, Result};
use crate::grassmann::{dist_grassmann, random_tuple, random_unit_tangent, Subspace, SubspaceTuple};
use crate::model::Dataset;
use crate::rng::derived_rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub tuple: SubspaceTuple,
    pub energy: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Energy after each iteration, starting with the initial tuple.
    pub history: Vec<f64>,
    pub restarts_used: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iter: usize,
    /// IRLS stops once consecutive iterates are closer than this in dG.
    pub tol: f64,
    /// Smoothing is `delta_scale · median point norm`.
    pub delta_scale: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { max_iter: 200, tol: 1e-9, delta_scale: 1e-8 }
    }
}

fn single_energy(points: &DMatrix<f64>, l: &Subspace, p: f64) -> f64 {
    distances_to(points, l).into_iter().map(|d| pow_p(d, p)).sum()
}

/// Top-`d` eigenvectors of a symmetric matrix, ties kept in index order.
fn top_eigenspace(m: DMatrix<f64>, d: usize) -> Result<Subspace> {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let cols: Vec<_> = order[..d].iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    Subspace::from_basis(DMatrix::from_columns(&cols))
}

fn weighted_second_moment(points: &DMatrix<f64>, weights: Option<&[f64]>) -> DMatrix<f64> {
    match weights {
        None => points * points.transpose(),
        Some(w) => {
            let mut scaled = points.clone();
            for (mut col, &wi) in scaled.column_iter_mut().zip(w) {
                col *= wi;
            }
            scaled * points.transpose()
        }
    }
}

/// The energy-best `d`-subspace for the columns of `points` (D×n).
pub fn fit_subspace_lp(points: &DMatrix<f64>, d: usize, p: f64, opts: &FitOptions) -> Result<Subspace> {
    fit_subspace_lp_from(points, d, p, None, opts)
}

/// As [`fit_subspace_lp`], with `init` as the IRLS starting point and as a
/// candidate answer: the result never has higher energy than `init`.
pub fn fit_subspace_lp_from(
    points: &DMatrix<f64>,
    d: usize,
    p: f64,
    init: Option<&Subspace>,
    opts: &FitOptions,
) -> Result<Subspace> {
    let ambient = points.nrows();
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain(format!("p must be positive, got {p}")));
    }
    if d == 0 || d > ambient {
        return Err(Error::Shape(format!("need 1 <= d <= D, got d={d}, D={ambient}")));
    }
    if points.ncols() < d {
        return Err(Error::Rank(format!("{} points cannot determine a {d}-subspace", points.ncols())));
    }
    let pca = top_eigenspace(weighted_second_moment(points, None), d)?;
    let mut best_e = single_energy(points, &pca, p);
    let mut best = pca.clone();
    if let Some(l) = init {
        let e = single_energy(points, l, p);
        if e <= best_e {
            best_e = e;
            best = l.clone();
        }
    }
    if p == 2.0 {
        return Ok(best);
    }
    let mut norms: Vec<f64> = points.column_iter().map(|c| c.norm()).collect();
    norms.sort_by(f64::total_cmp);
    let delta = (opts.delta_scale * norms[norms.len() / 2]).max(f64::MIN_POSITIVE.sqrt());
    let mut current = init.cloned().unwrap_or(pca);
    for _ in 0..opts.max_iter {
        let w: Vec<f64> = distances_to(points, &current)
            .into_iter()
            .map(|r| (r * r + delta * delta).powf((p - 2.0) / 2.0))
            .collect();
        let wmax = w.iter().copied().fold(0.0, f64::max);
        let w: Vec<f64> = w.iter().map(|v| v / wmax).collect();
        let next = top_eigenspace(weighted_second_moment(points, Some(&w)), d)?;
        let e = single_energy(points, &next, p);
        if e < best_e {
            best_e = e;
            best = next.clone();
        }
        let moved = dist_grassmann(&current, &next)?;
        current = next;
        if moved < opts.tol {
            break;
        }
    }
    Ok(best)
}

/// Orthonormal completion of the span of `vectors` to dimension `d`, using
/// coordinate axes when the vectors are dependent.
fn span_completed(vectors: &[Vec<f64>], ambient: usize, d: usize) -> Subspace {
    let mut basis: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(d);
    let axes = (0..ambient).map(|i| {
        let mut e = vec![0.0; ambient];
        e[i] = 1.0;
        e
    });
    for v in vectors.iter().cloned().chain(axes) {
        if basis.len() == d {
            break;
        }
        let mut r = nalgebra::DVector::from_vec(v);
        let scale = r.norm();
        for b in &basis {
            let c = b.dot(&r);
            r -= b * c;
        }
        if r.norm() > 1e-8 * scale.max(1e-300) && r.norm() > 0.0 {
            let n = r.norm();
            basis.push(r / n);
        }
    }
    Subspace::from_basis(DMatrix::from_columns(&basis)).expect("Gram-Schmidt output is orthonormal")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KFlatsOptions {
    pub max_iter: usize,
    /// Stop once the relative energy decrease falls to this level.
    pub tol: f64,
    pub fit: FitOptions,
}

impl Default for KFlatsOptions {
    fn default() -> Self {
        KFlatsOptions { max_iter: 200, tol: 1e-12, fit: FitOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Init {
    Tuple(SubspaceTuple),
    /// Uniformly random tuple drawn from this seed.
    Seed(u64),
}

/// Alternating minimization: assign points to the nearest subspace, refit
/// each cluster warm-started at its current subspace. Energy never increases.
pub fn lp_kflats(ds: &Dataset, k: usize, d: usize, p: f64, init: Init, opts: &KFlatsOptions) -> Result<OptResult> {
    let ambient = ds.ambient_dim();
    if ds.len() < k * d {
        return Err(Error::Rank(format!("N = {} is below K·d = {}", ds.len(), k * d)));
    }
    let mut tuple = match init {
        Init::Tuple(t) => {
            if t.k() != k || t.dim() != d || t.ambient_dim() != ambient {
                return Err(Error::Shape("initial tuple does not match (K, D, d)".into()));
            }
            t
        }
        Init::Seed(seed) => random_tuple(k, ambient, d, &mut derived_rng(seed, 0))?,
    };
    let points = ds.points();
    let mut table = distance_table(points, &tuple);
    let mut energy: f64 = table.column_iter().map(|c| pow_p(c.min(), p)).sum();
    let mut history = vec![energy];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let labels = labels_from_table(&table);
        // worst-fit points first, for reseeding starved clusters
        let mut worst: Vec<usize> = (0..ds.len()).collect();
        worst.sort_by(|&a, &b| table.column(b).min().total_cmp(&table.column(a).min()).then(a.cmp(&b)));
        let mut worst = worst.into_iter();
        let mut subs = Vec::with_capacity(k);
        for j in 1..=k {
            let members: Vec<usize> = labels.region(j).collect();
            let current = tuple.get(j - 1);
            let sub = if members.is_empty() {
                let seeds: Vec<Vec<f64>> = worst.by_ref().take(d).map(|i| ds.point(i).to_vec()).collect();
                span_completed(&seeds, ambient, d)
            } else if members.len() < d {
                let vs: Vec<Vec<f64>> = members.iter().map(|&i| ds.point(i).to_vec()).collect();
                span_completed(&vs, ambient, d)
            } else {
                let region = points.select_columns(members.iter());
                fit_subspace_lp_from(&region, d, p, Some(current), &opts.fit)?
            };
            subs.push(sub);
        }
        let next = SubspaceTuple::new(subs)?;
        let next_table = distance_table(points, &next);
        let next_energy: f64 = next_table.column_iter().map(|c| pow_p(c.min(), p)).sum();
        if next_energy > energy {
            // rounding in the refit; keep the previous tuple
            converged = true;
            history.push(energy);
            break;
        }
        let decrease = energy - next_energy;
        tuple = next;
        table = next_table;
        energy = next_energy;
        history.push(energy);
        if decrease <= opts.tol * energy.max(f64::MIN_POSITIVE) || energy == 0.0 {
            converged = true;
            break;
        }
    }
    Ok(OptResult { tuple, energy, iterations, converged, history, restarts_used: 1 })
}

/// Farthest-point seeding: each new subspace passes through the point
/// farthest from the current union (the largest-norm point first) and its
/// `d − 1` nearest neighbours.
pub fn farthest_point_init(ds: &Dataset, k: usize, d: usize) -> Result<SubspaceTuple> {
    if ds.is_empty() {
        return Err(Error::Empty("farthest-point seeding needs points".into()));
    }
    let ambient = ds.ambient_dim();
    let points = ds.points();
    let mut reach: Vec<f64> = points.column_iter().map(|c| c.norm()).collect();
    let mut subs: Vec<Subspace> = Vec::with_capacity(k);
    for _ in 0..k {
        let far = argmax(&reach);
        let x = ds.point(far);
        let mut near: Vec<usize> = (0..ds.len()).filter(|&i| i != far).collect();
        let dist2 = |i: usize| ds.point(i).iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        near.sort_by(|&a, &b| dist2(a).total_cmp(&dist2(b)).then(a.cmp(&b)));
        let mut vs = vec![x.to_vec()];
        vs.extend(near.into_iter().take(d - 1).map(|i| ds.point(i).to_vec()));
        let sub = span_completed(&vs, ambient, d);
        for (r, nd) in reach.iter_mut().zip(distances_to(points, &sub)) {
            *r = r.min(nd);
        }
        subs.push(sub);
    }
    SubspaceTuple::new(subs)
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] > v[best] {
            best = i;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiRestartOptions {
    /// Total number of seeded starts, counting `inits`.
    pub n_restarts: usize,
    /// Starts that take the first slots, e.g. the truth.
    pub inits: Vec<SubspaceTuple>,
    /// Adds one farthest-point start on top of `n_restarts`.
    pub farthest_point: bool,
    pub kflats: KFlatsOptions,
}

impl MultiRestartOptions {
    pub fn new(n_restarts: usize) -> Self {
        MultiRestartOptions { n_restarts, inits: Vec::new(), farthest_point: true, kflats: KFlatsOptions::default() }
    }
}

/// Best of `n_restarts` random starts plus a farthest-point start.
pub fn multi_restart(ds: &Dataset, k: usize, d: usize, p: f64, n_restarts: usize, seed: u64) -> Result<OptResult> {
    multi_restart_with(ds, k, d, p, seed, &MultiRestartOptions::new(n_restarts))
}

/// Start `r` draws from `derive_seed(seed, r)`, so the best energy is
/// non-increasing in `n_restarts`. Ties keep the earliest start.
pub fn multi_restart_with(
    ds: &Dataset,
    k: usize,
    d: usize,
    p: f64,
    seed: u64,
    opts: &MultiRestartOptions,
) -> Result<OptResult> {
    if opts.n_restarts == 0 && !opts.farthest_point && opts.inits.is_empty() {
        return Err(Error::Domain("multi_restart needs at least one start".into()));
    }
    let mut starts: Vec<Init> = Vec::new();
    if opts.farthest_point {
        starts.push(Init::Tuple(farthest_point_init(ds, k, d)?));
    }
    for r in 0..opts.n_restarts.max(opts.inits.len()) {
        match opts.inits.get(r) {
            Some(t) => starts.push(Init::Tuple(t.clone())),
            None => starts.push(Init::Seed(crate::rng::derive_seed(seed, r as u64))),
        }
    }
    let runs = starts.len();
    let mut best: Option<OptResult> = None;
    for init in starts {
        let res = lp_kflats(ds, k, d, p, init, &opts.kflats)?;
        if best.as_ref().is_none_or(|b| res.energy < b.energy) {
            best = Some(res);
        }
    }
    let mut best = best.expect("at least one start");
    best.restarts_used = runs;
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalMinCertificate {
    pub is_local_min: bool,
    /// Smallest `E(moved) − E(tuple)` over the sampled directions.
    pub worst_direction_gap: f64,
    pub directions: usize,
}

/// Samples `n_directions` product directions (an independent unit tangent
/// per coordinate) and moves every coordinate by arc length `step`.
/// Certified when no sampled move lowers the energy by more than 1e-12.
pub fn local_min_certificate<R: Rng + ?Sized>(
    ds: &Dataset,
    tuple: &SubspaceTuple,
    p: f64,
    n_directions: usize,
    step: f64,
    rng: &mut R,
) -> Result<LocalMinCertificate> {
    if !(step > 0.0) || n_directions == 0 {
        return Err(Error::Domain("need step > 0 and at least one direction".into()));
    }
    let e0 = energy_of_points(ds.points(), tuple, p);
    let mut worst = f64::INFINITY;
    let mut attempts = 0;
    let mut done = 0;
    while done < n_directions {
        attempts += 1;
        if attempts > 10 * n_directions {
            return Err(Error::DegenerateGeodesic { angle: std::f64::consts::FRAC_PI_2, tol: 0.0 });
        }
        let mut moved = Vec::with_capacity(tuple.k());
        let mut ok = true;
        for sub in tuple.iter() {
            match random_unit_tangent(sub, rng) {
                Some(t) => moved.push(sub.exp(&t, step)?),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let e = energy_of_points(ds.points(), &SubspaceTuple::new(moved)?, p);
        worst = worst.min(e - e0);
        done += 1;
    }
    Ok(LocalMinCertificate { is_local_min: worst >= -1e-12, worst_direction_gap: worst, directions: done })
}

/// Single-subspace solver used per region by [`restricted_best_fit_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum RegionFitMethod {
    /// Exhaustive angles; lines in the plane only.
    Grid(GridSpec),
    /// IRLS from PCA, from the candidate's own subspace, and from `restarts`
    /// random subspaces.
    Irls { restarts: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionFit {
    /// 1-based region index.
    pub region: usize,
    pub size: usize,
    /// `None` for an empty region.
    pub best: Option<Subspace>,
    pub distance: Option<f64>,
}

/// For each Voronoi region of `tuple`, the best single subspace for the
/// region's points and its distance to the region's own coordinate. A global
/// minimizer has all distances at zero.
pub fn restricted_best_fit_check(
    ds: &Dataset,
    tuple: &SubspaceTuple,
    p: f64,
    method: &RegionFitMethod,
) -> Result<Vec<RegionFit>> {
    let table = distance_table(ds.points(), tuple);
    let labels = labels_from_table(&table);
    let mut out = Vec::with_capacity(tuple.k());
    for j in 1..=tuple.k() {
        let members: Vec<usize> = labels.region(j).collect();
        let own = tuple.get(j - 1);
        if members.len() < tuple.dim() {
            out.push(RegionFit { region: j, size: members.len(), best: None, distance: None });
            continue;
        }
        let region = ds.filter(|i| labels.labels[i] == j);
        let best = match method {
            RegionFitMethod::Grid(spec) => grid_search_global(&region, 1, p, spec)?.tuple.get(0).clone(),
            RegionFitMethod::Irls { restarts, seed } => {
                let pts = region.points();
                let opts = FitOptions::default();
                let mut cands = vec![fit_subspace_lp(pts, own.dim(), p, &opts)?];
                cands.push(fit_subspace_lp_from(pts, own.dim(), p, Some(own), &opts)?);
                for r in 0..*restarts {
                    let mut rng = derived_rng(*seed, r as u64);
                    let start = crate::grassmann::random_subspace(own.ambient_dim(), own.dim(), &mut rng)?;
                    cands.push(fit_subspace_lp_from(pts, own.dim(), p, Some(&start), &opts)?);
                }
                let mut best = cands[0].clone();
                let mut best_e = single_energy(pts, &best, p);
                for c in &cands[1..] {
                    let e = single_energy(pts, c, p);
                    if e < best_e {
                        best_e = e;
                        best = c.clone();
                    }
                }
                best
            }
        };
        let distance = dist_grassmann(&best, own)?;
        out.push(RegionFit { region: j, size: members.len(), best: Some(best), distance: Some(distance) });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{dataset_energy, first_order_residual};
    use crate::grassmann::recovery_distance;
    use crate::model::tests::lines_model;
    use crate::rng::rng_from;
    use proptest::prelude::*;
    use rand::Rng;
    use std::f64::consts::PI;

    #[test]
    fn fit_recovers_exact_subspace() {
        let mut rng = rng_from(1);
        let l = crate::grassmann::random_subspace(5, 2, &mut rng).unwrap();
        let coeffs = DMatrix::from_fn(2, 30, |_, _| rng.random::<f64>() - 0.5);
        let pts = l.basis() * coeffs;
        for p in [0.5, 1.0, 2.0, 3.0] {
            let fit = fit_subspace_lp(&pts, 2, p, &FitOptions::default()).unwrap();
            assert!(single_energy(&pts, &fit, 2.0) < 1e-18, "p={p}");
            assert!(dist_grassmann(&fit, &l).unwrap() < 1e-7);
        }
    }

    #[test]
    fn fit_pca_dominant_direction() {
        let mut cols = vec![[1.0, 0.0]; 10];
        cols.push([0.0, 1.0]);
        let flat: Vec<f64> = cols.iter().flatten().copied().collect();
        let pts = DMatrix::from_column_slice(2, 11, &flat);
        let fit = fit_subspace_lp(&pts, 1, 2.0, &FitOptions::default()).unwrap();
        assert!(dist_grassmann(&fit, &Subspace::line_2d(0.0)).unwrap() < 1e-12);
        assert!(fit_subspace_lp(&pts.columns(0, 0).into_owned(), 1, 2.0, &FitOptions::default()).is_err());
    }

    #[test]
    fn fit_l1_is_robust_to_one_outlier() {
        let mut rows: Vec<Vec<f64>> = (1..=9).map(|i| vec![i as f64 / 10.0 - 0.45, 0.0]).collect();
        rows.push(vec![0.0, 0.5]);
        let ds = Dataset::from_rows(&rows).unwrap();
        let fit = fit_subspace_lp(ds.points(), 1, 1.0, &FitOptions::default()).unwrap();
        let spec = GridSpec { step: 1f64.to_radians(), levels: 2, factor: 10, candidates: 8 };
        let oracle = grid_search_global(&ds, 1, 1.0, &spec).unwrap();
        let x_axis = Subspace::line_2d(0.0);
        assert!(dist_grassmann(&fit, &x_axis).unwrap() < 1e-6);
        assert!(dist_grassmann(oracle.tuple.get(0), &x_axis).unwrap() <= spec.resolution());
    }

    #[test]
    fn kflats_truth_init_is_fixed_point() {
        let m = lines_model(0.0);
        let ds = m.sample(400, 2);
        let r = lp_kflats(&ds, 2, 1, 1.0, Init::Tuple(m.truth().clone()), &KFlatsOptions::default()).unwrap();
        assert_eq!(r.iterations, 1);
        assert!(r.converged);
        assert!(r.energy < 1e-12);
    }

    #[test]
    fn kflats_reseeds_empty_clusters() {
        let m = lines_model(0.0);
        let ds = m.sample(200, 3);
        let both_same = SubspaceTuple::lines_2d(&[0.0, 0.0]).unwrap();
        let r = lp_kflats(&ds, 2, 1, 2.0, Init::Tuple(both_same), &KFlatsOptions::default()).unwrap();
        assert!(r.energy < r.history[0]);
        assert!(lp_kflats(&ds.filter(|i| i < 1), 2, 1, 1.0, Init::Seed(0), &KFlatsOptions::default()).is_err());
    }

    #[test]
    fn multi_restart_matches_grid_oracle_on_clean_lines() {
        let m = lines_model(0.0);
        let ds = m.sample(300, 7);
        let best = multi_restart(&ds, 2, 1, 1.0, 20, 11).unwrap();
        let spec = GridSpec { step: 0.5f64.to_radians(), levels: 3, factor: 5, candidates: 8 };
        let oracle = grid_search_global(&ds, 2, 1.0, &spec).unwrap();
        let (gap, _) = recovery_distance(&best.tuple, &oracle.tuple).unwrap();
        assert!(gap < 1e-3, "{gap}");
        assert!(best.energy <= oracle.energy + 1e-9);
        assert_eq!(best.restarts_used, 21);
    }

    #[test]
    fn multi_restart_with_truth_alone_equals_kflats() {
        let m = lines_model(0.2);
        let ds = m.sample(300, 4);
        let opts = MultiRestartOptions {
            n_restarts: 1,
            inits: vec![m.truth().clone()],
            farthest_point: false,
            kflats: KFlatsOptions::default(),
        };
        let a = multi_restart_with(&ds, 2, 1, 1.0, 5, &opts).unwrap();
        let b = lp_kflats(&ds, 2, 1, 1.0, Init::Tuple(m.truth().clone()), &KFlatsOptions::default()).unwrap();
        assert_eq!(a.tuple, b.tuple);
        assert_eq!(a.energy, b.energy);
    }

    #[test]
    fn multi_restart_improves_with_more_starts() {
        let mut rng = rng_from(3);
        let truth = random_tuple(2, 4, 2, &mut rng).unwrap();
        let m = lines_model(0.3).with_truth(truth).unwrap();
        let ds = m.sample(200, 8);
        let mut last = f64::INFINITY;
        for n in [1, 2, 4, 8] {
            let r = multi_restart(&ds, 2, 2, 1.0, n, 99).unwrap();
            assert!(r.energy <= last);
            last = r.energy;
        }
    }

    #[test]
    fn certificate_examples() {
        let m = lines_model(0.0);
        let ds = m.sample(300, 5);
        let mut rng = rng_from(6);
        let c = local_min_certificate(&ds, m.truth(), 1.0, 32, 1e-3, &mut rng).unwrap();
        assert!(c.is_local_min && c.worst_direction_gap > 0.0);
        let off = SubspaceTuple::lines_2d(&[0.05, PI / 3.0]).unwrap();
        let c = local_min_certificate(&ds, &off, 1.0, 32, 1e-3, &mut rng).unwrap();
        assert!(!c.is_local_min);
    }

    #[test]
    fn restricted_check_examples() {
        let m = lines_model(0.0);
        let ds = m.sample(300, 5);
        let spec = GridSpec { step: 0.5f64.to_radians(), levels: 3, factor: 5, candidates: 8 };
        for method in [RegionFitMethod::Grid(spec), RegionFitMethod::Irls { restarts: 2, seed: 1 }] {
            let report = restricted_best_fit_check(&ds, m.truth(), 1.0, &method).unwrap();
            let tol = if matches!(method, RegionFitMethod::Grid(_)) { spec.resolution() } else { 1e-6 };
            assert!(report.iter().all(|r| r.distance.unwrap() <= tol), "{report:?}");
            let moved = m.truth().replace(0, Subspace::line_2d(0.3)).unwrap();
            let report = restricted_best_fit_check(&ds, &moved, 1.0, &method).unwrap();
            assert!(report.iter().any(|r| r.distance.is_some_and(|d| d > 0.01)), "{report:?}");
        }
    }

    #[test]
    fn p2_fixed_points_satisfy_first_order_condition() {
        let m = lines_model(0.3);
        let ds = m.sample(500, 12);
        let r = lp_kflats(&ds, 2, 1, 2.0, Init::Tuple(m.truth().clone()), &KFlatsOptions::default()).unwrap();
        let scale: f64 = ds.points().column_iter().map(|c| c.norm()).sum::<f64>() / ds.len() as f64;
        for j in 1..=2 {
            let res = first_order_residual(&ds, &r.tuple, j, 2.0).unwrap();
            assert!(res.norm().unwrap() <= 1e-3 * scale, "{res:?}");
        }
        assert!((dataset_energy(&ds, &r.tuple, 2.0).unwrap().sum - r.energy).abs() < 1e-9);
    }

    #[test]
    fn opt_result_json_roundtrip() {
        let m = lines_model(0.1);
        let ds = m.sample(100, 1);
        let r = multi_restart(&ds, 2, 1, 1.0, 2, 3).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: OptResult = serde_json::from_str(&text).unwrap();
        assert_eq!(back.history, r.history);
        assert!(dist_grassmann(back.tuple.get(0), r.tuple.get(0)).unwrap() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn kflats_descends_monotonically(seed in any::<u64>(), p in 0.5f64..3.0, alpha0 in 0.0f64..0.6) {
            let mut rng = rng_from(seed);
            let truth = random_tuple(2, 3, 1, &mut rng).unwrap();
            let m = lines_model(alpha0).with_truth(truth).unwrap();
            let ds = m.sample(120, seed);
            let r = lp_kflats(&ds, 2, 1, p, Init::Seed(seed ^ 1), &KFlatsOptions::default()).unwrap();
            for w in r.history.windows(2) {
                prop_assert!(w[1] <= w[0]);
            }
            let perm = r.tuple.permuted(&[1, 0]).unwrap();
            let again = lp_kflats(&ds, 2, 1, p, Init::Tuple(r.tuple.clone()), &KFlatsOptions::default()).unwrap();
            let swapped = lp_kflats(&ds, 2, 1, p, Init::Tuple(perm), &KFlatsOptions::default()).unwrap();
            prop_assert!((again.energy - swapped.energy).abs() <= 1e-9 * again.energy.max(1e-300));
        }
    }
}
