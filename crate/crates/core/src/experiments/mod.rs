//! Reproducible trials for the recovery claims, parameter sweeps, and the
//! cross-module property suite.
//!
//! Trial `t` of every sweep cell draws its data from `derive_seed(seed, t)`,
//! so cells that differ only in (p, α0, ε) see common random numbers.

mod suite;

pub use suite::{property_suite, PropertyCheck, PropertyReport};

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{dataset_energy, first_order_residual, ProportionEstimate};
use crate::error::{Error, Result};
use crate::grassmann::{recovery_distance, Subspace};
use crate::model::{
    check_exact_recovery_condition, noise_recovery_bounds, ExactRecoveryReport, HlmModel, NoiseBounds, Scenario,
};
use crate::optimize::{
    grid_search_global, line_angle, multi_restart_with, restricted_best_fit_check, GridSpec, MultiRestartOptions, OptResult,
    RegionFitMethod,
};
use crate::rng::{derive_seed, derived_rng};

/// z for the two-sided 95% intervals of sweep summaries.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Which claim a trial measures, and so what `success` means.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    /// Noiseless exact recovery: success when the distance is below the
    /// threshold (default: the oracle resolution).
    Theorem1,
    /// Noisy recovery: success when the distance is below `f`.
    Theorem2,
    /// p > 1 failure: success when the distance is at least the threshold
    /// (default 0.02 rad).
    Theorem3,
    /// Strip counterexample: success when the distance exceeds the threshold
    /// (default: the oracle resolution).
    Fig1,
    /// Plain recovery check: success when the distance is below the threshold
    /// (default 1e-3).
    Recovery,
}

/// How the "global minimizer" of a trial is obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Optimizer {
    GridOracle {
        #[serde(default)]
        grid: GridSpec,
    },
    /// Best of `restarts` random starts, a farthest-point start and a
    /// truth-seeded start.
    MultiRestart { restarts: usize },
    TruthSeeded,
    /// Grid oracle where it exists (D = 2, d = 1, K ≤ 2), else multi-restart.
    Auto {
        #[serde(default)]
        grid: GridSpec,
        restarts: usize,
    },
}

impl Default for Optimizer {
    fn default() -> Self {
        Optimizer::Auto { grid: GridSpec::default(), restarts: 20 }
    }
}

impl Optimizer {
    fn resolve(&self, model: &HlmModel) -> Optimizer {
        match self {
            Optimizer::Auto { grid, restarts } => {
                if model.ambient_dim() == 2 && model.dim() == 1 && model.k() <= 2 {
                    Optimizer::GridOracle { grid: *grid }
                } else {
                    Optimizer::MultiRestart { restarts: *restarts }
                }
            }
            other => other.clone(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Optimizer::GridOracle { .. } => "grid-oracle",
            Optimizer::MultiRestart { .. } => "multi-restart+truth",
            Optimizer::TruthSeeded => "truth-seeded",
            Optimizer::Auto { .. } => "auto",
        }
    }

    fn seeds_truth(&self) -> bool {
        matches!(self, Optimizer::MultiRestart { .. } | Optimizer::TruthSeeded)
    }
}

/// A named scenario and its numeric parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioRef {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub claim: Claim,
    /// Exactly one of `model` and `scenario`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<HlmModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioRef>,
    pub p: Vec<f64>,
    /// Outlier fractions to sweep; empty keeps the model's own.
    #[serde(default)]
    pub alpha0: Vec<f64>,
    /// Noise levels to sweep; empty keeps the model's own.
    #[serde(default)]
    pub eps: Vec<f64>,
    pub n: Vec<usize>,
    pub trials: usize,
    #[serde(default)]
    pub optimizer: Optimizer,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Record wall-clock time; off by default so outputs are byte-stable.
    #[serde(default)]
    pub timing: bool,
}

fn default_seed() -> u64 {
    crate::rng::DEFAULT_SEED
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.model.is_some() == self.scenario.is_some() {
            return Err(Error::Parse("config needs exactly one of `model` and `scenario`".into()));
        }
        if self.trials == 0 {
            return Err(Error::Parse("`trials` must be at least 1".into()));
        }
        if self.p.is_empty() || self.p.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return Err(Error::Parse("`p` must be a nonempty list of positive values".into()));
        }
        if self.n.is_empty() || self.n.contains(&0) {
            return Err(Error::Parse("`n` must be a nonempty list of positive sizes".into()));
        }
        Ok(())
    }

    /// The base model: explicit, or the scenario built from `derive_seed(seed, u64::MAX)`.
    pub fn base_model(&self) -> Result<HlmModel> {
        self.validate()?;
        match (&self.model, &self.scenario) {
            (Some(m), None) => Ok(m.clone()),
            (None, Some(s)) => {
                Scenario::from_name(&s.name, &s.params)?.build(&mut derived_rng(self.seed, u64::MAX))
            }
            _ => unreachable!("validated"),
        }
    }

    /// Every (p, α0, ε, N) combination in row-major order.
    pub fn cells(&self) -> Result<Vec<Cell>> {
        let base = self.base_model()?;
        let alphas: Vec<Option<f64>> =
            if self.alpha0.is_empty() { vec![None] } else { self.alpha0.iter().copied().map(Some).collect() };
        let epss: Vec<Option<f64>> =
            if self.eps.is_empty() { vec![None] } else { self.eps.iter().copied().map(Some).collect() };
        let mut cells = Vec::new();
        for &p in &self.p {
            for a in &alphas {
                for e in &epss {
                    let mut model = base.clone();
                    if let Some(a) = a {
                        model = model.with_outlier_fraction(*a)?;
                    }
                    if let Some(e) = e {
                        model = model.with_noise_level(*e)?;
                    }
                    for &n in &self.n {
                        cells.push(Cell {
                            claim: self.claim,
                            model: model.clone(),
                            p,
                            n,
                            optimizer: self.optimizer.clone(),
                            threshold: self.threshold,
                            // sweeps scan across the hypotheses; each row
                            // records whether they held
                            override_condition: true,
                            timing: self.timing,
                        });
                    }
                }
            }
        }
        Ok(cells)
    }
}

/// One point of a sweep: everything a single trial needs.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub claim: Claim,
    pub model: HlmModel,
    pub p: f64,
    pub n: usize,
    pub optimizer: Optimizer,
    pub threshold: Option<f64>,
    pub override_condition: bool,
    pub timing: bool,
}

impl Cell {
    pub fn new(claim: Claim, model: HlmModel, p: f64, n: usize, optimizer: Optimizer) -> Self {
        Cell { claim, model, p, n, optimizer, threshold: None, override_condition: false, timing: false }
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = Some(threshold);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConditionReport {
    Exact(ExactRecoveryReport),
    Noise(NoiseBounds),
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub p: f64,
    pub alpha0: f64,
    pub eps: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub recovery_dist: f64,
    pub energy_found: f64,
    pub energy_truth: f64,
    pub success: bool,
    pub wall_ms: f64,
    pub optimizer: String,
    /// The distance that decides `success`.
    pub threshold: f64,
    pub condition: ConditionReport,
    /// Claim-specific measurements.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
    #[serde(skip)]
    pub found: Option<OptResult>,
}

/// Samples the cell's model with `seed` and minimizes the energy.
fn solve(cell: &Cell, seed: u64) -> Result<(crate::model::Dataset, OptResult, Optimizer)> {
    let ds = cell.model.sample(cell.n, seed);
    let opt = cell.optimizer.resolve(&cell.model);
    let truth = cell.model.truth();
    let found = match &opt {
        Optimizer::GridOracle { grid } => grid_search_global(&ds, truth.k(), cell.p, grid)?,
        Optimizer::MultiRestart { restarts } => {
            let mut o = MultiRestartOptions::new(*restarts + 1);
            o.inits = vec![truth.clone()];
            multi_restart_with(&ds, truth.k(), truth.dim(), cell.p, derive_seed(seed, 1), &o)?
        }
        Optimizer::TruthSeeded => {
            let mut o = MultiRestartOptions::new(1);
            o.inits = vec![truth.clone()];
            o.farthest_point = false;
            multi_restart_with(&ds, truth.k(), truth.dim(), cell.p, derive_seed(seed, 1), &o)?
        }
        Optimizer::Auto { .. } => unreachable!("resolved"),
    };
    Ok((ds, found, opt))
}

fn default_resolution(opt: &Optimizer, fallback: f64) -> f64 {
    match opt {
        Optimizer::GridOracle { grid } => grid.resolution(),
        _ => fallback,
    }
}

fn run(cell: &Cell, trial: usize, seed: u64, condition: ConditionReport) -> Result<TrialResult> {
    let start = cell.timing.then(Instant::now);
    let (ds, found, opt) = solve(cell, seed)?;
    let truth = cell.model.truth();
    let energy_truth = dataset_energy(&ds, truth, cell.p)?.sum;
    let recovery_dist = recovery_distance(&found.tuple, truth)?.0;
    let (threshold, success) = match (cell.claim, &condition) {
        (Claim::Theorem2, ConditionReport::Noise(b)) => {
            let f = b.f.unwrap_or(f64::INFINITY);
            (f, recovery_dist < f)
        }
        (Claim::Theorem1, _) => {
            let t = cell.threshold.unwrap_or_else(|| default_resolution(&opt, 1e-6));
            (t, recovery_dist < t)
        }
        (Claim::Theorem3, _) => {
            let t = cell.threshold.unwrap_or(0.02);
            (t, recovery_dist >= t)
        }
        (Claim::Fig1, _) => {
            let t = cell.threshold.unwrap_or_else(|| default_resolution(&opt, 1e-6));
            (t, recovery_dist > t)
        }
        _ => {
            let t = cell.threshold.unwrap_or(1e-3);
            (t, recovery_dist < t)
        }
    };
    let mut extra = BTreeMap::new();
    if opt.seeds_truth() {
        extra.insert("truth_not_better".into(), f64::from(u8::from(found.energy <= energy_truth + 1e-12)));
    }
    if cell.claim == Claim::Fig1 {
        fig1_tilt(&ds, cell, &opt, &mut extra)?;
    }
    let wall_ms = start.map_or(0.0, |s| s.elapsed().as_secs_f64() * 1e3);
    Ok(TrialResult {
        trial,
        seed,
        p: cell.p,
        alpha0: cell.model.alpha0(),
        eps: cell.model.noise_level(),
        n: cell.n,
        recovery_dist,
        energy_found: found.energy,
        energy_truth,
        success,
        wall_ms,
        optimizer: opt.label().to_string(),
        threshold,
        condition,
        extra,
        found: Some(found),
    })
}

/// Signed angle from line `from` to line `to` in the plane, in (-π/2, π/2].
pub fn line_angle_offset(from: &Subspace, to: &Subspace) -> f64 {
    use std::f64::consts::{FRAC_PI_2, PI};
    let mut d = (line_angle(to) - line_angle(from)).rem_euclid(PI);
    if d > FRAC_PI_2 {
        d -= PI;
    }
    d
}

/// Best restricted line for region 1 of the truth, its signed offset from
/// `L*_1`, and the sign predicted by the first-order residual there.
fn fig1_tilt(
    ds: &crate::model::Dataset,
    cell: &Cell,
    opt: &Optimizer,
    extra: &mut BTreeMap<String, f64>,
) -> Result<()> {
    let truth = cell.model.truth();
    if truth.ambient_dim() != 2 || truth.dim() != 1 {
        return Ok(());
    }
    let method = match opt {
        Optimizer::GridOracle { grid } => RegionFitMethod::Grid(*grid),
        _ => RegionFitMethod::Irls { restarts: 4, seed: ds.seed() },
    };
    let fits = restricted_best_fit_check(ds, truth, cell.p, &method)?;
    let Some(best) = fits[0].best.as_ref() else {
        return Ok(());
    };
    let l1 = truth.get(0);
    let tilt = line_angle_offset(l1, best);
    extra.insert("region1_tilt".into(), tilt);
    if let Some(res) = first_order_residual(ds, truth, 1, cell.p)?.matrix() {
        // descent rotates the basis b towards the normal n when bᵀ·D·n > 0
        let b = l1.basis().column(0).into_owned();
        let n = nalgebra::DVector::from_column_slice(&[-b[1], b[0]]);
        let pull = (b.transpose() * res * &n)[(0, 0)];
        extra.insert("region1_pull".into(), pull);
        extra.insert("tilt_matches_pull".into(), f64::from(u8::from(tilt * pull > 0.0)));
    }
    Ok(())
}

/// Noiseless exact recovery with p ∈ (0, 1]; refuses models that fail the
/// recovery condition unless the cell overrides it.
pub fn theorem1_trial(cell: &Cell, trial: usize, seed: u64) -> Result<TrialResult> {
    let report = match check_exact_recovery_condition(&cell.model, cell.p) {
        Ok(r) => r,
        // outside the condition's domain (p > 1 or noisy data): overriding
        // cells still run, without a report
        Err(_) if cell.override_condition => return run(cell, trial, seed, ConditionReport::None),
        Err(e) => return Err(e),
    };
    if !report.holds && !cell.override_condition {
        return Err(Error::Condition(format!("alpha0 = {} is not below {}", report.lhs, report.rhs)));
    }
    run(cell, trial, seed, ConditionReport::Exact(report))
}

/// Noisy recovery; the noise level must lie strictly inside the admissible
/// band unless the cell overrides it.
pub fn theorem2_trial(cell: &Cell, trial: usize, seed: u64) -> Result<TrialResult> {
    let bounds = match noise_recovery_bounds(&cell.model, cell.p) {
        Ok(b) => b,
        Err(_) if cell.override_condition => return run(cell, trial, seed, ConditionReport::None),
        Err(e) => return Err(e),
    };
    if !bounds.admissible() && !cell.override_condition {
        return Err(Error::Condition(format!(
            "eps = {} outside (0, min(eps_max, eps_ceiling)) = (0, min({:?}, {:?}))",
            bounds.eps, bounds.eps_max, bounds.eps_ceiling
        )));
    }
    run(cell, trial, seed, ConditionReport::Noise(bounds))
}

/// The p > 1 regime with several subspaces and outliers.
pub fn theorem3_trial(cell: &Cell, trial: usize, seed: u64) -> Result<TrialResult> {
    if cell.p <= 1.0 {
        return Err(Error::Domain(format!("the p > 1 trial needs p > 1, got {}", cell.p)));
    }
    if cell.model.k() < 2 {
        return Err(Error::Domain("the p > 1 trial needs K > 1".into()));
    }
    run(cell, trial, seed, ConditionReport::None)
}

/// The strip counterexample: any p, records the oracle distance and the
/// region-1 tilt.
pub fn counterexample_fig1_trial(cell: &Cell, trial: usize, seed: u64) -> Result<TrialResult> {
    run(cell, trial, seed, ConditionReport::None)
}

pub fn trial(cell: &Cell, trial: usize, seed: u64) -> Result<TrialResult> {
    match cell.claim {
        Claim::Theorem1 => theorem1_trial(cell, trial, seed),
        Claim::Theorem2 => theorem2_trial(cell, trial, seed),
        Claim::Theorem3 => theorem3_trial(cell, trial, seed),
        Claim::Fig1 => counterexample_fig1_trial(cell, trial, seed),
        Claim::Recovery => run(cell, trial, seed, ConditionReport::None),
    }
}

/// Aggregate of one sweep cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub p: f64,
    pub alpha0: f64,
    pub eps: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Wilson 95% interval for the success rate.
    pub ci_low: f64,
    pub ci_high: f64,
    pub median_dist: f64,
    pub mean_dist: f64,
    pub optimizer: String,
}

impl CellSummary {
    pub fn from_rows(rows: &[TrialResult]) -> Result<Self> {
        let first = rows.first().ok_or_else(|| Error::Empty("summary of no trials".into()))?;
        let successes = rows.iter().filter(|r| r.success).count();
        let ci = ProportionEstimate::wilson(successes, rows.len(), Z_95);
        let mut d: Vec<f64> = rows.iter().map(|r| r.recovery_dist).collect();
        d.sort_by(f64::total_cmp);
        Ok(CellSummary {
            p: first.p,
            alpha0: first.alpha0,
            eps: first.eps,
            n: first.n,
            trials: rows.len(),
            successes,
            success_rate: ci.estimate,
            ci_low: ci.ci_low,
            ci_high: ci.ci_high,
            median_dist: median_sorted(&d),
            mean_dist: d.iter().sum::<f64>() / d.len() as f64,
            optimizer: first.optimizer.clone(),
        })
    }
}

pub fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub rows: Vec<TrialResult>,
    pub cells: Vec<CellSummary>,
}

/// Runs every cell × trial on `workers` threads; rows come back ordered by
/// (cell, trial) whatever the scheduling.
pub fn phase_transition_sweep(config: &ExperimentConfig, workers: usize) -> Result<SweepOutput> {
    let cells = config.cells()?;
    let jobs: Vec<(usize, usize)> =
        (0..cells.len()).flat_map(|c| (0..config.trials).map(move |t| (c, t))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Capability(format!("thread pool: {e}")))?;
    let rows: Vec<TrialResult> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, t)| trial(&cells[c], t, derive_seed(config.seed, t as u64)))
            .collect::<Result<_>>()
    })?;
    let summaries = rows.chunks(config.trials).map(CellSummary::from_rows).collect::<Result<_>>()?;
    Ok(SweepOutput { rows, cells: summaries })
}

pub const CSV_HEADER: &str = "trial,seed,p,alpha0,eps,N,recovery_dist,energy_found,energy_truth,success,wall_ms";

pub fn write_rows_csv<W: Write>(rows: &[TrialResult], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.trial,
            r.seed,
            r.p,
            r.alpha0,
            r.eps,
            r.n,
            r.recovery_dist,
            r.energy_found,
            r.energy_truth,
            r.success,
            r.wall_ms
        )?;
    }
    Ok(())
}

pub fn write_rows_jsonl<W: Write>(rows: &[TrialResult], mut out: W) -> Result<()> {
    for r in rows {
        serde_json::to_writer(&mut out, r)?;
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::lines_model;

    fn theorem1_config() -> ExperimentConfig {
        ExperimentConfig {
            claim: Claim::Theorem1,
            model: Some(lines_model(0.0)),
            scenario: None,
            p: vec![1.0],
            alpha0: vec![],
            eps: vec![],
            n: vec![300],
            trials: 3,
            optimizer: Optimizer::default(),
            seed: 17,
            threshold: None,
            timing: false,
        }
    }

    #[test]
    fn clean_trial_recovers_truth() {
        let cell = &theorem1_config().cells().unwrap()[0];
        let r = theorem1_trial(cell, 0, 5).unwrap();
        assert!(r.success, "{r:?}");
        assert!(r.energy_truth < 1e-12);
        assert_eq!(r.optimizer, "grid-oracle");
    }

    #[test]
    fn violated_condition_is_refused() {
        let model = lines_model(0.0).with_outlier_fraction(0.4).unwrap();
        let mut cell = Cell::new(Claim::Theorem1, model, 1.0, 300, Optimizer::default());
        assert!(matches!(theorem1_trial(&cell, 0, 1), Err(Error::Condition(_))));
        cell.override_condition = true;
        let r = theorem1_trial(&cell, 0, 1).unwrap();
        assert!(matches!(r.condition, ConditionReport::Exact(ref e) if !e.holds));
    }

    #[test]
    fn theorem2_threshold_is_f() {
        let mut cfg = theorem1_config();
        cfg.claim = Claim::Theorem2;
        cfg.eps = vec![1e-3];
        let cell = &cfg.cells().unwrap()[0];
        let r = theorem2_trial(cell, 0, 3).unwrap();
        let b = noise_recovery_bounds(&cell.model, 1.0).unwrap();
        assert_eq!(r.threshold, b.f.unwrap());
        let loud = Cell::new(Claim::Theorem2, lines_model(0.0).with_noise_level(0.5).unwrap(), 1.0, 300, Optimizer::default());
        assert!(theorem2_trial(&loud, 0, 3).is_err());
    }

    #[test]
    fn theorem3_needs_p_above_one() {
        let mut cfg = theorem1_config();
        cfg.claim = Claim::Theorem3;
        assert!(theorem3_trial(&cfg.cells().unwrap()[0], 0, 3).is_err());
    }

    #[test]
    fn one_cell_sweep_equals_one_trial() {
        let mut cfg = theorem1_config();
        cfg.trials = 1;
        let out = phase_transition_sweep(&cfg, 1).unwrap();
        let single = trial(&cfg.cells().unwrap()[0], 0, derive_seed(cfg.seed, 0)).unwrap();
        assert_eq!(out.rows.len(), 1);
        assert_eq!(out.rows[0].recovery_dist, single.recovery_dist);
        assert_eq!(out.rows[0].energy_found, single.energy_found);
    }

    #[test]
    fn sweep_is_deterministic_and_aggregates_match() {
        let mut cfg = theorem1_config();
        cfg.claim = Claim::Recovery;
        cfg.alpha0 = vec![0.0, 0.1];
        cfg.optimizer = Optimizer::MultiRestart { restarts: 2 };
        let a = phase_transition_sweep(&cfg, 1).unwrap();
        let b = phase_transition_sweep(&cfg, 2).unwrap();
        let (mut ca, mut cb) = (Vec::new(), Vec::new());
        write_rows_csv(&a.rows, &mut ca).unwrap();
        write_rows_csv(&b.rows, &mut cb).unwrap();
        assert_eq!(ca, cb);
        for (cell, rows) in a.cells.iter().zip(a.rows.chunks(cfg.trials)) {
            assert_eq!(cell.successes, rows.iter().filter(|r| r.success).count());
            assert_eq!(cell.alpha0, rows[0].alpha0);
        }
        for r in &a.rows {
            assert_eq!(r.extra.get("truth_not_better"), Some(&1.0));
        }
        let text = String::from_utf8(ca).unwrap();
        assert!(text.starts_with(CSV_HEADER));
        assert_eq!(text.lines().count(), 1 + 2 * cfg.trials);
    }

    #[test]
    fn config_validation() {
        let mut cfg = theorem1_config();
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = theorem1_config();
        cfg.scenario = Some(ScenarioRef { name: "small-angle-lines".into(), params: BTreeMap::new() });
        assert!(cfg.validate().is_err());
        let json = serde_json::to_string(&theorem1_config()).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, theorem1_config());
    }
}
