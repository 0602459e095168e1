use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checks::{positivity_applies, CheckResult, Evaluator, Witness, T_SET};
use super::ensemble::{generate_matrix, sample_seed, EnsembleConfig, Family, SampleAux};
use super::ids::CheckId;
use crate::delta::make_params;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Basic properties that involve extra numerical radii; the suite rotates
/// them across grid cells (see [`evaluate_sample`]).
const ROTATED: [CheckId; 5] = [
    CheckId::TriangleInequality,
    CheckId::RealHomogeneity,
    CheckId::UnitaryInvariance,
    CheckId::CongruenceBound,
    CheckId::HeinzInterpolation,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub id: CheckId,
    pub count: u64,
    pub failures: u64,
    /// Slack of the result closest to failing, i.e. with the smallest
    /// `slack + tolerance`. `None` when nothing was evaluated.
    pub min_slack: Option<f64>,
    /// Tolerance attached to that same result.
    pub tolerance: Option<f64>,
    pub pass: bool,
    pub worst_witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub master_seed: u64,
    pub samples: u64,
    pub pass: bool,
    pub checks: Vec<CheckSummary>,
    /// Wall-clock time; kept out of the serialized report so that repeated
    /// runs produce identical files.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn check(&self, id: CheckId) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Keep {
    /// Failing witnesses, closest to failure first.
    Failures,
    /// The k smallest slacks regardless of outcome.
    Worst,
}

#[derive(Debug, Clone, Default)]
struct Aggregate {
    count: u64,
    failures: u64,
    critical: Option<(f64, f64, f64)>, // (margin, slack, tolerance)
    kept: Vec<(f64, Witness)>,
}

fn slack_key(s: f64) -> f64 {
    if s.is_nan() {
        f64::NEG_INFINITY
    } else {
        s
    }
}

impl Aggregate {
    fn add(&mut self, r: &CheckResult, keep: Keep, k: usize) {
        self.count += 1;
        if !r.pass {
            self.failures += 1;
        }
        let m = r.margin();
        if self.critical.map_or(true, |(cm, _, _)| m < cm) {
            self.critical = Some((m, r.slack, r.tolerance));
        }
        let key = match keep {
            Keep::Failures if r.pass => return,
            Keep::Failures => m,
            Keep::Worst => slack_key(r.slack),
        };
        if k == 0 {
            return;
        }
        if self.kept.len() == k && key >= self.kept[k - 1].0 {
            return;
        }
        let pos = self.kept.partition_point(|(kk, _)| *kk <= key);
        self.kept.insert(pos, (key, r.witness.clone()));
        self.kept.truncate(k);
    }

    fn merge(&mut self, other: Aggregate, k: usize) {
        self.count += other.count;
        self.failures += other.failures;
        if let Some(c) = other.critical {
            if self.critical.map_or(true, |(cm, _, _)| c.0 < cm) {
                self.critical = Some(c);
            }
        }
        for (key, w) in other.kept {
            if self.kept.len() == k && key >= self.kept[k - 1].0 {
                continue;
            }
            let pos = self.kept.partition_point(|(kk, _)| *kk <= key);
            self.kept.insert(pos, (key, w));
            self.kept.truncate(k);
        }
    }
}

type Aggregates = BTreeMap<CheckId, Aggregate>;

fn aggregate(results: &[CheckResult], keep: Keep, k: usize) -> Aggregates {
    let mut agg = Aggregates::new();
    for r in results {
        agg.entry(r.id).or_default().add(r, keep, k);
    }
    agg
}

fn finish(config: &EnsembleConfig, samples: u64, agg: Aggregates, started: Instant) -> SuiteReport {
    let mut agg = agg;
    let checks: Vec<CheckSummary> = CheckId::ALL
        .iter()
        .copied()
        .filter(|&id| config.enabled(id))
        .map(|id| {
            let a = agg.remove(&id).unwrap_or_default();
            CheckSummary {
                id,
                count: a.count,
                failures: a.failures,
                min_slack: a.critical.map(|c| c.1),
                tolerance: a.critical.map(|c| c.2),
                pass: a.failures == 0,
                worst_witnesses: a.kept.into_iter().map(|(_, w)| w).collect(),
            }
        })
        .collect();
    SuiteReport {
        master_seed: config.master_seed,
        samples,
        pass: checks.iter().all(|c| c.pass),
        checks,
        elapsed: started.elapsed(),
    }
}

fn sample_list(config: &EnsembleConfig) -> Vec<(Family, usize, usize)> {
    let mut out = Vec::new();
    for &f in &config.families {
        for &d in &config.dims {
            for i in 0..config.samples_per_cell {
                out.push((f, d, i));
            }
        }
    }
    out
}

fn campaign(config: &EnsembleConfig, keep: Keep) -> Result<SuiteReport> {
    config.validate()?;
    let started = Instant::now();
    let samples = sample_list(config);
    let k = config.worst_k;
    let parts: Vec<Aggregates> = samples
        .par_iter()
        .map(|&(f, d, i)| aggregate(&evaluate_sample(config, f, d, i), keep, k))
        .collect();
    let mut total = Aggregates::new();
    for part in parts {
        for (id, a) in part {
            total.entry(id).or_default().merge(a, k);
        }
    }
    Ok(finish(config, samples.len() as u64, total, started))
}

/// Evaluates every enabled check over the ensemble. Failing witnesses (up
/// to `worst_k` per check) are recorded in the report.
pub fn run_suite(config: &EnsembleConfig) -> Result<SuiteReport> {
    campaign(config, Keep::Failures)
}

/// Like [`run_suite`] but keeps the `worst_k` smallest-slack witnesses per
/// check whether or not they fail, sorted ascending by slack.
pub fn search_counterexamples(config: &EnsembleConfig) -> Result<SuiteReport> {
    campaign(config, Keep::Worst)
}

/// Checks a single user-supplied matrix over the configured grids.
/// Auxiliary inputs are drawn from `master_seed`; every basic property is
/// evaluated at every grid cell.
pub fn check_matrix(x: &ComplexMatrix, config: &EnsembleConfig, keep_worst: bool) -> Result<SuiteReport> {
    config.validate()?;
    let n = x.require_square()?;
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    let started = Instant::now();
    let aux = SampleAux::generate(n, config.master_seed);
    let results = evaluate_matrix(x, &aux, config, "input", config.master_seed, None);
    let keep = if keep_worst { Keep::Worst } else { Keep::Failures };
    Ok(finish(config, 1, aggregate(&results, keep, config.worst_k), started))
}

/// Raw results for one ensemble sample.
pub fn evaluate_sample(config: &EnsembleConfig, family: Family, dim: usize, index: usize) -> Vec<CheckResult> {
    let seed = sample_seed(config.master_seed, family, dim, index);
    match generate_matrix(family, dim, seed) {
        Ok(x) => {
            let aux = SampleAux::generate(dim, seed);
            evaluate_matrix(&x, &aux, config, family.as_str(), seed, Some(index))
        }
        Err(e) => vec![error_result(CheckId::ALL[0], family.as_str(), dim, seed, None, None, &e)],
    }
}

fn error_result(id: CheckId, family: &str, dim: usize, seed: u64, rho: Option<f64>, nu: Option<f64>, e: &Error) -> CheckResult {
    let w = Witness {
        family: family.to_string(),
        dim,
        seed,
        rho,
        nu,
        lambda: None,
        s: None,
        t: None,
        slack: f64::NAN,
        detail: Some(e.to_string()),
    };
    CheckResult::new(id, f64::NAN, f64::NAN, 0.0, w)
}

/// Runs every enabled check on `x`.
///
/// With `rotation = Some(i)` the five basic properties that need extra
/// numerical radii are spread over the `(ρ, ν)` cells: cell `c` evaluates
/// property `(c + i) mod 5`. Across samples every property still meets
/// every cell. With `None` all of them run at every cell.
pub(crate) fn evaluate_matrix(
    x: &ComplexMatrix,
    aux: &SampleAux,
    config: &EnsembleConfig,
    family: &str,
    seed: u64,
    rotation: Option<usize>,
) -> Vec<CheckResult> {
    let dim = x.rows();
    let mut out = Vec::new();
    let settings = &config.settings;
    let mut ev = match Evaluator::new(x, settings, family.to_string(), dim, seed) {
        Ok(ev) => ev,
        Err(e) => return vec![error_result(CheckId::ALL[0], family, dim, seed, None, None, &e)],
    };
    let on = |id: CheckId| config.enabled(id);

    macro_rules! guard {
        ($id:expr, $rho:expr, $nu:expr, $call:expr) => {
            if let Err(e) = $call {
                out.push(error_result($id, family, dim, seed, $rho, $nu, &e));
            }
        };
    }

    // Sample-level checks.
    if on(CheckId::AluthgeBoundNumericalRadius) {
        guard!(CheckId::AluthgeBoundNumericalRadius, None, None, ev.aluthge_bound_w(&mut out));
    }
    if on(CheckId::CartesianSquareBound) {
        guard!(CheckId::CartesianSquareBound, None, None, ev.cartesian_square_bound(&mut out));
    }
    if on(CheckId::LemmaHeinz) {
        guard!(CheckId::LemmaHeinz, None, None, ev.lemma_heinz(&aux.positive, &aux.positive_alt, &config.s_set, &mut out));
    }
    if on(CheckId::LemmaBuzano) {
        guard!(CheckId::LemmaBuzano, None, None, ev.lemma_buzano(&aux.u, &aux.v, &aux.e, &config.lambda_set, &mut out));
    }
    if on(CheckId::LemmaMixedSchwarz) {
        guard!(CheckId::LemmaMixedSchwarz, None, None, ev.lemma_mixed_schwarz(&aux.e, &mut out));
    }
    if on(CheckId::LemmaPositiveSquare) {
        guard!(CheckId::LemmaPositiveSquare, None, None, ev.lemma_positive_square(&aux.positive, &aux.e, &mut out));
    }

    // Operator-radius oracles, per ρ.
    for &rho in &config.rho_grid {
        if on(CheckId::Sandwich) {
            guard!(CheckId::Sandwich, Some(rho), None, ev.sandwich(rho, &mut out));
        }
        if on(CheckId::Nilpotent) {
            guard!(CheckId::Nilpotent, Some(rho), None, ev.nilpotent(rho, &mut out));
        }
        if on(CheckId::Normal) {
            guard!(CheckId::Normal, Some(rho), None, ev.normal(rho, &mut out));
        }
    }

    // Corollaries at ρ = 2 and the small-ρ limit, per ν.
    for &nu in &config.nu_grid {
        let (r2, n) = (Some(2.0), Some(nu));
        if on(CheckId::AluthgeBoundRhoTwo) {
            guard!(CheckId::AluthgeBoundRhoTwo, r2, n, ev.aluthge_bound_rho_two(nu, &mut out));
        }
        if on(CheckId::MixedSumSquareBound) {
            guard!(CheckId::MixedSumSquareBound, r2, n, ev.mixed_sum_square_bound(nu, &mut out));
        }
        let (lo, up) = (on(CheckId::MixedSumQuadraticLower), on(CheckId::MixedSumQuadraticUpper));
        if lo || up {
            guard!(CheckId::MixedSumQuadraticLower, r2, n, ev.mixed_sum_quadratic(nu, lo, up, &mut out));
        }
        if on(CheckId::LimitEnvelope) {
            guard!(CheckId::LimitEnvelope, None, n, ev.limit_envelope(nu, &mut out));
        }
    }

    // Per (ρ, ν) cell.
    let rotated: Vec<CheckId> = ROTATED.into_iter().filter(|&id| on(id)).collect();
    let mut cell = 0usize;
    for &rho in &config.rho_grid {
        for &nu in &config.nu_grid {
            let (r, n) = (Some(rho), Some(nu));
            let p = match make_params(rho, nu) {
                Ok(p) => p,
                Err(e) => {
                    out.push(error_result(CheckId::ALL[0], family, dim, seed, r, n, &e));
                    continue;
                }
            };
            if on(CheckId::Positivity) && positivity_applies(&p) {
                guard!(CheckId::Positivity, r, n, ev.positivity(&p, &mut out));
            }
            if on(CheckId::Symmetry) && rho < 2.0 {
                guard!(CheckId::Symmetry, r, n, ev.symmetry(&p, &mut out));
            }
            if on(CheckId::AluthgeBound) {
                guard!(CheckId::AluthgeBound, r, n, ev.aluthge_bound(&p, &mut out));
            }
            if on(CheckId::SquareRootBound) {
                guard!(CheckId::SquareRootBound, r, n, ev.square_root_bound(&p, &mut out));
            }
            if on(CheckId::LambdaBound) {
                for &l in &config.lambda_set {
                    guard!(CheckId::LambdaBound, r, n, ev.lambda_bound(&p, l, &mut out));
                }
            }
            if on(CheckId::LambdaTwoBound) {
                guard!(CheckId::LambdaTwoBound, r, n, ev.lambda_two_bound(&p, &mut out));
            }
            if on(CheckId::LambdaLimitBound) {
                guard!(CheckId::LambdaLimitBound, r, n, ev.lambda_limit_bound(&p, &mut out));
            }
            let (lo, up) = (on(CheckId::QuadraticLower), on(CheckId::QuadraticUpper));
            if lo || up {
                guard!(CheckId::QuadraticLower, r, n, ev.quadratic_bounds(&p, lo, up, &mut out));
            }
            if on(CheckId::BlockIdentities) {
                guard!(CheckId::BlockIdentities, r, n, ev.block_identities(&p, &mut out));
            }

            let selected: Vec<CheckId> = match rotation {
                _ if rotated.is_empty() => Vec::new(),
                Some(i) => vec![rotated[(cell + i) % rotated.len()]],
                None => rotated.clone(),
            };
            for id in selected {
                let res = match id {
                    CheckId::TriangleInequality => ev.triangle(&p, &aux.second, &mut out),
                    CheckId::RealHomogeneity => T_SET.iter().try_for_each(|&t| ev.homogeneity(&p, t, &mut out)),
                    CheckId::UnitaryInvariance => ev.unitary_invariance(&p, &aux.unitary, &mut out),
                    CheckId::CongruenceBound => ev.congruence(&p, &aux.congruence, &mut out),
                    CheckId::HeinzInterpolation => ev.heinz_interpolation(&p, &aux.positive, &config.s_set, &mut out),
                    _ => unreachable!("not a rotated check"),
                };
                guard!(id, r, n, res);
            }
            cell += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> EnsembleConfig {
        EnsembleConfig {
            dims: vec![2, 3],
            samples_per_cell: 2,
            rho_grid: vec![0.25, 1.0, 1.75, 2.0],
            nu_grid: vec![0.0, 0.5, 1.0],
            master_seed: 3,
            ..Default::default()
        }
    }

    #[test]
    fn aggregate_keeps_ordering_and_pass_rule() {
        let w = |s: f64| Witness {
            family: "f".into(),
            dim: 2,
            seed: 0,
            rho: None,
            nu: None,
            lambda: None,
            s: None,
            t: None,
            slack: s,
            detail: None,
        };
        let rs: Vec<CheckResult> = [0.5, -0.2, 0.1, -3.0, 2.0]
            .iter()
            .map(|&s| CheckResult::new(CheckId::Sandwich, 0.0, s, 0.25, w(0.0)))
            .collect();
        let a = aggregate(&rs, Keep::Worst, 3)[&CheckId::Sandwich].clone();
        let kept: Vec<f64> = a.kept.iter().map(|(_, w)| w.slack).collect();
        assert_eq!(kept, vec![-3.0, -0.2, 0.1]);
        assert_eq!((a.count, a.failures), (5, 1));
        let f = aggregate(&rs, Keep::Failures, 3)[&CheckId::Sandwich].clone();
        assert_eq!(f.kept.len(), 1);
        assert_eq!(f.critical.unwrap().1, -3.0);
    }

    #[test]
    fn empty_sample_count_is_vacuous_pass() {
        let cfg = EnsembleConfig {
            samples_per_cell: 0,
            ..Default::default()
        };
        let r = run_suite(&cfg).unwrap();
        assert!(r.pass);
        assert_eq!(r.samples, 0);
        assert_eq!(r.checks.len(), CheckId::ALL.len());
        assert!(r.checks.iter().all(|c| c.count == 0 && c.min_slack.is_none()));
    }

    #[test]
    fn small_suite_passes_covers_everything_and_is_deterministic() {
        let cfg = small();
        let a = run_suite(&cfg).unwrap();
        for c in &a.checks {
            assert!(c.count > 0, "{} never evaluated", c.id);
            assert!(c.pass, "{}: {:?}", c.id, c);
            assert!(c.min_slack.unwrap() >= -c.tolerance.unwrap());
        }
        assert!(a.pass);
        let b = run_suite(&cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn only_filter_restricts_report() {
        let cfg = EnsembleConfig {
            only: Some([CheckId::AluthgeBoundNumericalRadius].into_iter().collect()),
            families: vec![Family::Nilpotent2],
            ..small()
        };
        let r = search_counterexamples(&cfg).unwrap();
        assert_eq!(r.checks.len(), 1);
        let c = &r.checks[0];
        assert_eq!(c.count, 4);
        assert!(c.min_slack.unwrap().abs() < 1e-9);
        assert_eq!(c.worst_witnesses.len(), 4);
        assert!(c.worst_witnesses.windows(2).all(|w| w[0].slack <= w[1].slack));
    }

    #[test]
    fn witnesses_reproduce_inputs() {
        let cfg = EnsembleConfig {
            worst_k: 2,
            ..small()
        };
        let r = search_counterexamples(&cfg).unwrap();
        let w = &r.check(CheckId::AluthgeBound).unwrap().worst_witnesses[0];
        let fam: Family = w.family.parse().unwrap();
        let x = generate_matrix(fam, w.dim, w.seed).unwrap();
        let aux = SampleAux::generate(w.dim, w.seed);
        let mut redo = super::super::checks::run_check(
            CheckId::AluthgeBound,
            &x,
            w.rho.unwrap(),
            w.nu.unwrap(),
            &super::super::checks::Extras::from_aux(&aux),
            &cfg.settings,
        )
        .unwrap();
        assert_eq!(redo.pop().unwrap().slack, w.slack);
    }
}
