//! Exhaustive search over line angles in the plane. A line is `θ ∈ [0, π)`;
//! a point at polar angle `φ` and radius `r` has distance `r·|sin(φ − θ)|`.
//!
//! For two lines the Voronoi region of the first is a half-open arc of
//! length π/2 in `φ mod π`, so a pair energy is two arc sums.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::OptResult;
use crate::energy::{energy_of_points, pow_p};
use crate::error::{Error, Result};
use crate::grassmann::{Subspace, SubspaceTuple};
use crate::model::Dataset;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Coarse angle step, at most π/8; rounded down so it divides π.
    pub step: f64,
    /// Refinement levels after the coarse pass, at most 4.
    pub levels: usize,
    /// Each level divides the step by this.
    pub factor: usize,
    /// Candidates kept and refined per level.
    pub candidates: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { step: 0.5f64.to_radians(), levels: 3, factor: 5, candidates: 8 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step <= PI / 8.0) {
            return Err(Error::Domain(format!("grid step must lie in (0, pi/8], got {}", self.step)));
        }
        if self.levels > 4 || self.factor < 2 || self.candidates == 0 {
            return Err(Error::Domain("grid needs levels <= 4, factor >= 2, candidates >= 1".into()));
        }
        Ok(())
    }

    /// Upper bound on the spacing of the finest level.
    pub fn resolution(&self) -> f64 {
        self.step / (self.factor as f64).powi(self.levels as i32)
    }
}

/// Points sorted by polar angle mod π.
struct Polar {
    phi: Vec<f64>,
    r: Vec<f64>,
    p: f64,
}

impl Polar {
    fn new(ds: &Dataset, p: f64) -> Self {
        let mut pts: Vec<(f64, f64)> = (0..ds.len())
            .map(|i| {
                let x = ds.point(i);
                let phi = x[1].atan2(x[0]).rem_euclid(PI);
                (if phi >= PI { 0.0 } else { phi }, x[0].hypot(x[1]))
            })
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        Polar { phi: pts.iter().map(|t| t.0).collect(), r: pts.iter().map(|t| t.1).collect(), p }
    }

    #[inline]
    fn term(&self, i: usize, theta: f64) -> f64 {
        pow_p(self.r[i] * (self.phi[i] - theta).sin().abs(), self.p)
    }

    fn line_energy(&self, theta: f64) -> f64 {
        (0..self.phi.len()).map(|i| self.term(i, theta)).sum()
    }

    /// `S[m]` = energy of the first `m` points (in φ order) against line θ.
    fn prefix(&self, theta: f64) -> Vec<f64> {
        let mut s = Vec::with_capacity(self.phi.len() + 1);
        let mut acc = 0.0;
        s.push(0.0);
        for i in 0..self.phi.len() {
            acc += self.term(i, theta);
            s.push(acc);
        }
        s
    }

    /// Sum of `prefix` over points with φ in the arc `[start, start + π/2)` mod π.
    fn arc_sum(&self, prefix: &[f64], start: f64) -> f64 {
        let n = self.phi.len();
        let s = start.rem_euclid(PI);
        let e = s + FRAC_PI_2;
        let lo = self.phi.partition_point(|&v| v < s);
        if e <= PI {
            let hi = self.phi.partition_point(|&v| v < e);
            prefix[hi] - prefix[lo]
        } else {
            let hi = self.phi.partition_point(|&v| v < e - PI);
            (prefix[n] - prefix[lo]) + prefix[hi]
        }
    }
}

/// Start of the Voronoi arc of line `a` against line `b`.
fn region_start(a: f64, b: f64) -> f64 {
    let mut delta = (b - a).rem_euclid(PI);
    if delta > FRAC_PI_2 {
        delta -= PI;
    }
    let mid = a + delta / 2.0;
    if delta > 0.0 {
        mid - FRAC_PI_2
    } else {
        mid
    }
}

fn circ_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    angles: [f64; 2],
    energy: f64,
}

/// Best `count` cells by energy, skipping cells within `radius` (in every
/// coordinate, as unordered pairs) of one already kept.
fn select(mut cells: Vec<Cell>, k: usize, count: usize, radius: f64) -> Vec<Cell> {
    cells.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    let mut kept: Vec<Cell> = Vec::with_capacity(count);
    for c in cells {
        if kept.len() == count {
            break;
        }
        let near = kept.iter().any(|q| {
            if k == 1 {
                circ_gap(q.angles[0], c.angles[0]) <= radius
            } else {
                let same = circ_gap(q.angles[0], c.angles[0]) <= radius && circ_gap(q.angles[1], c.angles[1]) <= radius;
                let swap = circ_gap(q.angles[0], c.angles[1]) <= radius && circ_gap(q.angles[1], c.angles[0]) <= radius;
                same || swap
            }
        });
        if !near {
            kept.push(c);
        }
    }
    kept
}

fn coarse_single(polar: &Polar, m: usize, h: f64) -> Vec<Cell> {
    (0..m)
        .map(|i| {
            let t = i as f64 * h;
            Cell { angles: [t, t], energy: polar.line_energy(t) }
        })
        .collect()
}

/// All unordered pairs of the coarse grid. Bisectors of grid lines fall on
/// multiples of h/2, so per-line sums over the 2M half-step bins are exact.
fn coarse_pairs(polar: &Polar, m: usize, h: f64) -> Vec<Cell> {
    let bins = 2 * m;
    let half = h / 2.0;
    let bin_of: Vec<usize> = polar.phi.iter().map(|&v| ((v / half) as usize).min(bins - 1)).collect();
    // prefix[a][b] = energy against line a of the points in bins < b
    let mut prefix = vec![0.0; m * (bins + 1)];
    let mut totals = vec![0.0; m];
    for a in 0..m {
        let theta = a as f64 * h;
        let row = &mut prefix[a * (bins + 1)..(a + 1) * (bins + 1)];
        for (i, &b) in bin_of.iter().enumerate() {
            row[b + 1] += polar.term(i, theta);
        }
        for b in 0..bins {
            row[b + 1] += row[b];
        }
        totals[a] = row[bins];
    }
    let arc = |a: usize, start: usize| -> f64 {
        let row = &prefix[a * (bins + 1)..(a + 1) * (bins + 1)];
        let end = start + m;
        if end <= bins {
            row[end] - row[start]
        } else {
            (row[bins] - row[start]) + row[end - bins]
        }
    };
    let mut cells = Vec::with_capacity(m * (m - 1) / 2);
    #[allow(clippy::needless_range_loop)]
    for i in 0..m {
        for j in (i + 1)..m {
            // region of line i starts at half-step index i + j − M (mod 2M)
            let start = (i + j + bins - m) % bins;
            let energy = arc(i, start) + (totals[j] - arc(j, start));
            cells.push(Cell { angles: [i as f64 * h, j as f64 * h], energy });
        }
    }
    cells
}

fn refine(polar: &Polar, k: usize, around: &[Cell], h: f64, factor: usize) -> Vec<Cell> {
    let f = factor as isize;
    let offsets: Vec<f64> = (-f..=f).map(|t| t as f64 * h).collect();
    let mut cells = Vec::new();
    for c in around {
        if k == 1 {
            for &o in &offsets {
                let t = (c.angles[0] + o).rem_euclid(PI);
                cells.push(Cell { angles: [t, t], energy: polar.line_energy(t) });
            }
            continue;
        }
        let a_angles: Vec<f64> = offsets.iter().map(|o| (c.angles[0] + o).rem_euclid(PI)).collect();
        let b_angles: Vec<f64> = offsets.iter().map(|o| (c.angles[1] + o).rem_euclid(PI)).collect();
        let a_pre: Vec<Vec<f64>> = a_angles.iter().map(|&t| polar.prefix(t)).collect();
        let b_pre: Vec<Vec<f64>> = b_angles.iter().map(|&t| polar.prefix(t)).collect();
        for (ia, &ta) in a_angles.iter().enumerate() {
            for (ib, &tb) in b_angles.iter().enumerate() {
                let start = region_start(ta, tb);
                let n = polar.phi.len();
                let ea = polar.arc_sum(&a_pre[ia], start);
                let eb = b_pre[ib][n] - polar.arc_sum(&b_pre[ib], start);
                cells.push(Cell { angles: [ta, tb], energy: ea + eb });
            }
        }
    }
    cells
}

fn tuple_of(cell: &Cell, k: usize) -> Result<SubspaceTuple> {
    let mut angles: Vec<f64> = cell.angles[..k].to_vec();
    angles.sort_by(f64::total_cmp);
    SubspaceTuple::lines_2d(&angles)
}

/// Global minimizer over lines in the plane (`K ∈ {1, 2}`) to within
/// [`GridSpec::resolution`]: a coarse exhaustive pass, then `levels` rounds
/// that re-grid a ±step window around the best surviving cells.
pub fn grid_search_global(ds: &Dataset, k: usize, p: f64, spec: &GridSpec) -> Result<OptResult> {
    spec.validate()?;
    if ds.ambient_dim() != 2 || !(k == 1 || k == 2) {
        return Err(Error::Capability(format!(
            "the grid oracle covers lines in R^2 with K <= 2, got D={} K={k}",
            ds.ambient_dim()
        )));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain(format!("p must be positive, got {p}")));
    }
    let polar = Polar::new(ds, p);
    let m = (PI / spec.step - 1e-9).ceil() as usize;
    let mut h = PI / m as f64;
    let cells = if k == 1 { coarse_single(&polar, m, h) } else { coarse_pairs(&polar, m, h) };
    let mut evaluated = cells.len();
    let mut kept = select(cells, k, spec.candidates, 1.5 * h);
    let mut history = vec![kept[0].energy];
    for _ in 0..spec.levels {
        let cells = refine(&polar, k, &kept, h / spec.factor as f64, spec.factor);
        evaluated += cells.len();
        h /= spec.factor as f64;
        kept = select(cells, k, spec.candidates, 1.5 * h);
        history.push(kept[0].energy);
    }
    // arc sums subtract prefix totals; settle the winner by direct evaluation
    let mut best: Option<(SubspaceTuple, f64)> = None;
    for c in &kept {
        let t = tuple_of(c, k)?;
        let e = energy_of_points(ds.points(), &t, p);
        if best.as_ref().is_none_or(|b| e < b.1) {
            best = Some((t, e));
        }
    }
    let (tuple, energy) = best.expect("at least one candidate");
    history.push(energy);
    Ok(OptResult { tuple, energy, iterations: evaluated, converged: true, history, restarts_used: 1 })
}

/// Angle in `[0, π)` of a line in the plane.
pub fn line_angle(l: &Subspace) -> f64 {
    let b = l.basis();
    b[(1, 0)].atan2(b[(0, 0)]).rem_euclid(PI) % PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::dataset_energy;
    use crate::grassmann::{dist_grassmann, recovery_distance};
    use crate::model::tests::lines_model;
    use crate::rng::rng_from;
    use rand::Rng;

    #[test]
    fn spec_validation() {
        assert!(GridSpec { step: 0.5, ..Default::default() }.validate().is_err());
        assert!(GridSpec { levels: 5, ..Default::default() }.validate().is_err());
        assert!(GridSpec::default().validate().is_ok());
        let ds = Dataset::from_rows(&[vec![0.1, 0.2, 0.3]]).unwrap();
        assert!(matches!(grid_search_global(&ds, 1, 1.0, &GridSpec::default()), Err(Error::Capability(_))));
    }

    #[test]
    fn single_line_is_found() {
        let angle: f64 = 1.234;
        let rows: Vec<Vec<f64>> =
            (0..50).map(|i| i as f64 / 50.0 - 0.5).map(|t| vec![t * angle.cos(), t * angle.sin()]).collect();
        let ds = Dataset::from_rows(&rows).unwrap();
        let spec = GridSpec::default();
        let r = grid_search_global(&ds, 1, 1.0, &spec).unwrap();
        assert!(dist_grassmann(r.tuple.get(0), &Subspace::line_2d(angle)).unwrap() <= spec.resolution());
    }

    #[test]
    fn symmetric_cross_gives_axes() {
        let mut rows = Vec::new();
        for i in 1..=20 {
            let t = i as f64 / 20.0;
            rows.extend([vec![t, 0.0], vec![-t, 0.0], vec![0.0, t], vec![0.0, -t]]);
        }
        let ds = Dataset::from_rows(&rows).unwrap();
        let spec = GridSpec::default();
        let r = grid_search_global(&ds, 2, 2.0, &spec).unwrap();
        let axes = SubspaceTuple::lines_2d(&[0.0, FRAC_PI_2]).unwrap();
        assert!(recovery_distance(&r.tuple, &axes).unwrap().0 <= spec.resolution());
    }

    #[test]
    fn pair_energies_match_direct_evaluation() {
        let m = lines_model(0.3);
        let ds = m.sample(500, 4);
        let polar = Polar::new(&ds, 1.5);
        let mut rng = rng_from(2);
        for _ in 0..50 {
            let (a, b) = (rng.random::<f64>() * PI, rng.random::<f64>() * PI);
            let ea = polar.arc_sum(&polar.prefix(a), region_start(a, b));
            let pb = polar.prefix(b);
            let eb = pb[ds.len()] - polar.arc_sum(&pb, region_start(a, b));
            let direct = dataset_energy(&ds, &SubspaceTuple::lines_2d(&[a, b]).unwrap(), 1.5).unwrap().sum;
            assert!((ea + eb - direct).abs() < 1e-9 * direct, "{a} {b}");
        }
        // the coarse binned table agrees with direct evaluation as well
        let m_grid = 24;
        let h = PI / m_grid as f64;
        for c in coarse_pairs(&polar, m_grid, h).iter().step_by(7) {
            let direct = dataset_energy(&ds, &tuple_of(c, 2).unwrap(), 1.5).unwrap().sum;
            assert!((c.energy - direct).abs() < 1e-9 * direct);
        }
    }

    #[test]
    fn clean_lines_recovered_at_resolution() {
        let m = lines_model(0.0);
        let ds = m.sample(2000, 8);
        let spec = GridSpec::default();
        let r = grid_search_global(&ds, 2, 1.0, &spec).unwrap();
        assert!(recovery_distance(&r.tuple, m.truth()).unwrap().0 <= spec.resolution());
        for w in r.history.windows(2).take(spec.levels) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn line_angle_roundtrip() {
        for a in [0.0, 0.3, 1.5, 3.0] {
            assert!((line_angle(&Subspace::line_2d(a)) - a).abs() < 1e-12);
        }
    }
}
