//! Seeded verification campaigns and their JSON reports.
//!
//! A campaign runs independent trials and classifies each as a pass, a
//! solver shortfall (path failures prevented a verdict) or a counterexample
//! candidate. Candidates carry the algebra and the certified residuals needed
//! to reproduce them. For the proved statements a candidate means a solver
//! bug; for the open equivalence it is logged and the run still succeeds.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::analysis::{search_idempotents, IdempotentSearch, PathStats};
use crate::error::{Error, Result};
use crate::evolution::{ClassificationKind, EvolutionAlgebra};
use crate::json::AnyAlgebra;
use crate::linalg::Matrix;
use crate::quadratic::{QuadraticSystem, SystemKind};
use crate::scalar::Scalar;
use crate::solver::{solve, SolveOutcome, SolverConfig};
use crate::{ExactAlgebra, FloatAlgebra, FloatMatrix, C64};

pub const REPORT_SCHEMA: &str = "evoalg-report-v1";

/// Minimum `|det| / scale` accepted by the regular-complex profile.
pub const REGULAR_DET_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// Standard complex Gaussian entries, resampled until clearly invertible.
    RegularComplex,
    /// Exact entries `p/q` with `|p| ≤ 9`, `1 ≤ q ≤ 9`.
    Rational,
    /// Rational entries, each zeroed independently with the given probability.
    Sparse(f64),
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::RegularComplex => f.write_str("regular-complex"),
            Profile::Rational => f.write_str("rational"),
            Profile::Sparse(p) => write!(f, "sparse({p})"),
        }
    }
}

impl Serialize for Profile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// SplitMix64 finaliser over a combination of inputs; derives per-trial seeds.
pub fn mix_seed(base: u64, a: u64, b: u64) -> u64 {
    let mut z = base
        .wrapping_add(a.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(b.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gaussian_complex(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Standard complex Gaussian `n × n` matrix with `|det| > 1e-6 · scale`.
pub fn random_invertible(n: usize, rng: &mut ChaCha8Rng) -> FloatMatrix {
    loop {
        let data = (0..n * n).map(|_| gaussian_complex(rng)).collect();
        let m = Matrix::new(n, n, data).expect("n*n entries");
        if m.determinant_info()
            .expect("square")
            .is_nonzero(REGULAR_DET_FLOOR)
        {
            return m;
        }
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> Complex<BigRational> {
    let p: i64 = rng.random_range(-9..=9);
    let q: i64 = rng.random_range(1..=9);
    Complex::new(
        BigRational::new(BigInt::from(p), BigInt::from(q)),
        BigRational::zero(),
    )
}

pub fn random_algebra(n: usize, profile: Profile, seed: u64) -> Result<AnyAlgebra> {
    if n == 0 {
        return Err(Error::BadParameters("dimension must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match profile {
        Profile::RegularComplex => Ok(AnyAlgebra::Float(EvolutionAlgebra::new(random_invertible(
            n, &mut rng,
        ))?)),
        Profile::Rational => {
            let data = (0..n * n).map(|_| random_rational(&mut rng)).collect();
            Ok(AnyAlgebra::Exact(EvolutionAlgebra::new(Matrix::new(
                n, n, data,
            )?)?))
        }
        Profile::Sparse(p) => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::BadParameters(format!("sparsity {p} outside [0, 1]")));
            }
            let data = (0..n * n)
                .map(|_| {
                    let v = random_rational(&mut rng);
                    if rng.random_bool(p) {
                        Complex::zero()
                    } else {
                        v
                    }
                })
                .collect();
            Ok(AnyAlgebra::Exact(EvolutionAlgebra::new(Matrix::new(
                n, n, data,
            )?)?))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Shortfall,
    Candidate,
    /// Breaks a proved implication; always also a candidate.
    Violation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub trial: usize,
    pub seed: u64,
    pub algebra: Value,
    pub evidence: Vec<String>,
    pub residuals: Vec<f64>,
    pub singular: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub verdict: Verdict,
    pub solutions: usize,
    pub failed_paths: usize,
    pub diverged_paths: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignReport {
    pub schema: &'static str,
    pub campaign: String,
    pub n: Option<usize>,
    pub trials: usize,
    pub passes: usize,
    pub solver_shortfalls: usize,
    /// Trials contradicting a proved implication.
    pub internal_violations: usize,
    pub counterexample_candidates: Vec<Candidate>,
    pub seed: u64,
    pub config: SolverConfig,
    pub outcomes: Vec<TrialRecord>,
}

impl CampaignReport {
    fn assemble(
        campaign: &str,
        n: Option<usize>,
        cfg: &SolverConfig,
        results: Vec<(TrialRecord, Option<Candidate>)>,
    ) -> Self {
        let mut report = Self {
            schema: REPORT_SCHEMA,
            campaign: campaign.into(),
            n,
            trials: results.len(),
            passes: 0,
            solver_shortfalls: 0,
            internal_violations: 0,
            counterexample_candidates: Vec::new(),
            seed: cfg.rng_seed,
            config: cfg.clone(),
            outcomes: Vec::with_capacity(results.len()),
        };
        for (record, candidate) in results {
            match record.verdict {
                Verdict::Pass => report.passes += 1,
                Verdict::Shortfall => report.solver_shortfalls += 1,
                Verdict::Candidate => {}
                Verdict::Violation => report.internal_violations += 1,
            }
            if let Some(c) = candidate {
                report.counterexample_candidates.push(c);
            }
            report.outcomes.push(record);
        }
        report
    }

    pub fn shortfall_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.solver_shortfalls as f64 / self.trials as f64
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

fn run_trials<T: Send>(count: usize, parallel: bool, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    if parallel {
        (0..count).into_par_iter().map(f).collect()
    } else {
        (0..count).map(f).collect()
    }
}

fn record(trial: usize, seed: u64, verdict: Verdict, out: &SolveOutcome) -> TrialRecord {
    TrialRecord {
        trial,
        seed,
        verdict,
        solutions: out.solutions.len(),
        failed_paths: out.failed_paths,
        diverged_paths: out.diverged_paths,
    }
}

fn candidate(
    trial: usize,
    seed: u64,
    algebra: Value,
    evidence: Vec<String>,
    out: &SolveOutcome,
) -> Candidate {
    Candidate {
        trial,
        seed,
        algebra,
        evidence,
        residuals: out.solutions.iter().map(|s| s.residual).collect(),
        singular: out.solutions.iter().map(|s| s.singular).collect(),
    }
}

/// Per-solution checks for points with exactly one non-zero coordinate `i`:
/// `x_i = a_ii`, column `i` of `A` vanishes off the diagonal, and
/// `|det J(x)| = |det A|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleSupportCheck {
    pub index: usize,
    pub coordinate_error: f64,
    pub column_off_diagonal: f64,
    pub det_relative_error: f64,
}

impl SingleSupportCheck {
    pub const COORDINATE_TOL: f64 = 1e-8;
    pub const COLUMN_TOL: f64 = 1e-8;
    pub const DET_TOL: f64 = 1e-6;

    pub fn holds(&self) -> bool {
        self.coordinate_error <= Self::COORDINATE_TOL
            && self.column_off_diagonal <= Self::COLUMN_TOL
            && self.det_relative_error <= Self::DET_TOL
    }
}

#[derive(Debug, Clone)]
pub struct TheoremTrial {
    pub verdict: Verdict,
    pub failures: Vec<String>,
    pub outcome: SolveOutcome,
    /// Solutions with at most one non-zero coordinate.
    pub low_support: usize,
    /// Max entrywise `|J(0) + A|`.
    pub origin_jacobian_error: f64,
    pub single_support: Vec<SingleSupportCheck>,
}

pub const ORIGIN_JACOBIAN_TOL: f64 = 1e-12;

/// One trial of the two-non-zero-coordinates campaign on an invertible `A`.
pub fn theorem_main_trial(a: &FloatMatrix, cfg: &SolverConfig) -> Result<TheoremTrial> {
    let n = a.rows();
    if n < 2 {
        return Err(Error::BadParameters("needs n >= 2".into()));
    }
    let det = a.determinant_info()?;
    if !det.is_nonzero(REGULAR_DET_FLOOR) {
        return Err(Error::BadParameters("matrix is not invertible".into()));
    }
    let sys = QuadraticSystem::build(SystemKind::General, a)?;
    let outcome = solve(&sys, cfg)?;
    let mut failures = Vec::new();

    let j0 = sys.jacobian(&vec![C64::new(0.0, 0.0); n])?;
    let origin_jacobian_error = j0
        .entries()
        .iter()
        .zip(a.entries())
        .map(|(j, a)| (j + a).norm())
        .fold(0.0, f64::max);
    if origin_jacobian_error > ORIGIN_JACOBIAN_TOL {
        failures.push(format!("J(0) differs from -A by {origin_jacobian_error:e}"));
    }

    let has_wide = outcome.solutions.iter().any(|s| s.support.len() >= 2);
    let low: Vec<_> = outcome
        .solutions
        .iter()
        .filter(|s| s.support.len() <= 1)
        .collect();
    if low.len() > n + 1 {
        failures.push(format!("{} solutions with support <= 1 exceed n + 1", low.len()));
    }
    if low.iter().any(|s| s.singular) {
        failures.push("a solution with support <= 1 is singular".into());
    }

    let det_abs = det.modulus;
    let mut single_support = Vec::new();
    for s in low.iter().filter(|s| s.support.len() == 1) {
        let i = s.support[0];
        let column_off_diagonal = (0..n)
            .filter(|&j| j != i)
            .map(|j| a[(j, i)].norm())
            .fold(0.0, f64::max);
        let jdet = sys.jacobian(&s.point)?.determinant()?.norm();
        let check = SingleSupportCheck {
            index: i,
            coordinate_error: (s.point[i] - a[(i, i)]).norm(),
            column_off_diagonal,
            det_relative_error: (jdet - det_abs).abs() / det_abs,
        };
        if !check.holds() {
            failures.push(format!("single-support identity fails at index {i}: {check:?}"));
        }
        single_support.push(check);
    }

    let verdict = if !failures.is_empty() {
        Verdict::Candidate
    } else if !outcome.is_complete() {
        Verdict::Shortfall
    } else if !has_wide {
        failures.push("no solution with two or more non-zero coordinates".into());
        Verdict::Candidate
    } else {
        Verdict::Pass
    };
    Ok(TheoremTrial {
        verdict,
        failures,
        low_support: low.len(),
        origin_jacobian_error,
        single_support,
        outcome,
    })
}

/// Random invertible `A` per trial; checks the existence of a solution with
/// two non-zero coordinates and the low-support bounds.
pub fn verify_theorem_main(n: usize, trials: usize, cfg: &SolverConfig) -> Result<CampaignReport> {
    if n < 2 {
        return Err(Error::BadParameters("two-nonzero campaign needs n >= 2".into()));
    }
    cfg.validate()?;
    let results = run_trials(trials, cfg.parallel, |t| {
        let seed = mix_seed(cfg.rng_seed, n as u64, t as u64);
        let a = random_invertible(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let trial_cfg = SolverConfig {
            rng_seed: seed,
            ..cfg.clone()
        };
        let res = theorem_main_trial(&a, &trial_cfg)?;
        let cand = matches!(res.verdict, Verdict::Candidate).then(|| {
            let alg = AnyAlgebra::Float(EvolutionAlgebra::new(a.clone()).expect("square"));
            candidate(t, seed, alg.to_json(), res.failures.clone(), &res.outcome)
        });
        Ok((record(t, seed, res.verdict, &res.outcome), cand))
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(CampaignReport::assemble(
        "two-nonzero-coordinates",
        Some(n),
        cfg,
        results,
    ))
}

#[derive(Debug, Clone)]
pub struct IdempotentTrial {
    pub verdict: Verdict,
    pub search: IdempotentSearch,
}

/// Idempotent existence on one regular algebra. Non-regular input is
/// rejected with [`Error::NotRegular`].
pub fn idempotent_existence_trial(alg: &AnyAlgebra, cfg: &SolverConfig) -> Result<IdempotentTrial> {
    let search = match alg {
        AnyAlgebra::Float(a) => regular_search(a, cfg)?,
        AnyAlgebra::Exact(a) => regular_search(a, cfg)?,
    };
    let verdict = if !search.witnesses.is_empty() {
        Verdict::Pass
    } else if !search.outcome.is_complete() {
        Verdict::Shortfall
    } else {
        Verdict::Candidate
    };
    Ok(IdempotentTrial { verdict, search })
}

fn regular_search<S: Scalar>(alg: &EvolutionAlgebra<S>, cfg: &SolverConfig) -> Result<IdempotentSearch> {
    if !alg.is_regular(S::default_tol()) {
        return Err(Error::NotRegular);
    }
    search_idempotents(alg, cfg)
}

pub fn verify_idempotent_existence(n: usize, trials: usize, cfg: &SolverConfig) -> Result<CampaignReport> {
    if n < 1 {
        return Err(Error::BadParameters("dimension must be at least 1".into()));
    }
    cfg.validate()?;
    let results = run_trials(trials, cfg.parallel, |t| {
        let seed = mix_seed(cfg.rng_seed, 0x1de0 + n as u64, t as u64);
        let alg = random_algebra(n, Profile::RegularComplex, seed)?;
        let trial_cfg = SolverConfig {
            rng_seed: seed,
            ..cfg.clone()
        };
        let res = idempotent_existence_trial(&alg, &trial_cfg)?;
        let out = &res.search.outcome;
        let cand = matches!(res.verdict, Verdict::Candidate).then(|| {
            candidate(
                t,
                seed,
                alg.to_json(),
                vec!["complete solve found no idempotent".into()],
                out,
            )
        });
        Ok((record(t, seed, res.verdict, out), cand))
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(CampaignReport::assemble(
        "idempotent-existence",
        Some(n),
        cfg,
        results,
    ))
}

/// The three conjecturally equivalent conditions for one algebra.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureVerdict {
    pub solvable: bool,
    /// `false` when solvability came from the float backend ("numeric").
    pub solvability_exact: bool,
    pub has_idempotent: bool,
    pub only_trivial_solution: bool,
    /// No failed paths in the idempotent solve.
    pub complete: bool,
    pub consistent: bool,
    /// Solvable with an idempotent, which cannot happen.
    pub hard_inconsistency: bool,
    pub idempotent_residuals: Vec<f64>,
    pub paths: PathStats,
}

impl ConjectureVerdict {
    pub fn classify(&self) -> Verdict {
        if self.hard_inconsistency {
            Verdict::Violation
        } else if self.consistent {
            Verdict::Pass
        } else if !self.solvability_exact || !self.complete {
            Verdict::Shortfall
        } else {
            Verdict::Candidate
        }
    }
}

pub fn test_conjecture(alg: &AnyAlgebra, cfg: &SolverConfig) -> Result<ConjectureVerdict> {
    let (solvable, search) = match alg {
        AnyAlgebra::Float(a) => (a.solvability().solvable, search_idempotents(a, cfg)?),
        AnyAlgebra::Exact(a) => (a.solvability().solvable, search_idempotents(a, cfg)?),
    };
    let has_idempotent = !search.witnesses.is_empty();
    let only_trivial_solution = search.outcome.nontrivial(cfg.tol_zero).next().is_none();
    Ok(ConjectureVerdict {
        solvable,
        solvability_exact: alg.is_exact(),
        has_idempotent,
        only_trivial_solution,
        complete: search.outcome.failed_paths == 0,
        consistent: solvable != has_idempotent && has_idempotent != only_trivial_solution,
        hard_inconsistency: solvable && has_idempotent,
        idempotent_residuals: search.witnesses.iter().map(|w| w.residual).collect(),
        paths: PathStats::from(&search.outcome),
    })
}

const SWEEP_PROFILES: [Profile; 4] = [
    Profile::Sparse(0.5),
    Profile::Sparse(0.75),
    Profile::Rational,
    Profile::RegularComplex,
];

/// Mixed-profile sweep of the solvability/idempotent equivalence; trial `t`
/// has dimension `1 + t % n_max`.
pub fn conjecture_sweep(count: usize, n_max: usize, cfg: &SolverConfig) -> Result<CampaignReport> {
    if n_max < 1 {
        return Err(Error::BadParameters("n_max must be at least 1".into()));
    }
    cfg.validate()?;
    let results = run_trials(count, cfg.parallel, |t| {
        let n = 1 + t % n_max;
        let profile = SWEEP_PROFILES[(t / n_max) % SWEEP_PROFILES.len()];
        let seed = mix_seed(cfg.rng_seed, 0xc0 + n as u64, t as u64);
        let alg = random_algebra(n, profile, seed)?;
        let trial_cfg = SolverConfig {
            rng_seed: seed,
            ..cfg.clone()
        };
        let v = test_conjecture(&alg, &trial_cfg)?;
        let verdict = v.classify();
        let rec = TrialRecord {
            trial: t,
            seed,
            verdict,
            solutions: v.idempotent_residuals.len(),
            failed_paths: v.paths.failed_paths,
            diverged_paths: v.paths.diverged_paths,
        };
        let cand = matches!(verdict, Verdict::Candidate | Verdict::Violation).then(|| Candidate {
            trial: t,
            seed,
            algebra: alg.to_json(),
            evidence: vec![format!(
                "profile {profile}: solvable={} has_idempotent={} only_trivial={}",
                v.solvable, v.has_idempotent, v.only_trivial_solution
            )],
            residuals: v.idempotent_residuals.clone(),
            singular: Vec::new(),
        });
        Ok((rec, cand))
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(CampaignReport::assemble("conjecture-sweep", None, cfg, results))
}

/// Behaviour of one complete-algebra representative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationCheck {
    pub kind: ClassificationKind,
    pub n: usize,
    pub s: usize,
    pub solvable: bool,
    pub right_nilpotent: bool,
    pub idempotents: usize,
    pub has_e1: bool,
    pub only_trivial_solution: bool,
    pub ok: bool,
}

/// Runs every representative with `n ≤ n_max` through the invariant table:
/// K2 solvable, right-nilpotent, without idempotents; K1/K3/K4 not solvable
/// with the idempotent `e_1`.
pub fn classification_sweep(n_max: usize, cfg: &SolverConfig) -> Result<Vec<ClassificationCheck>> {
    let mut checks = Vec::new();
    for kind in ClassificationKind::ALL {
        for n in 1..=n_max {
            for s in 0..=n {
                let uses_s = matches!(kind, ClassificationKind::K2 | ClassificationKind::K4);
                if (!uses_s && s != 0) || !kind.accepts(n, s) {
                    continue;
                }
                let alg = ExactAlgebra::classification(kind, n, s)?;
                let series = alg.solvability();
                let chain = alg.nilpotency();
                let search = search_idempotents(&alg, cfg)?;
                let e1 = crate::Element::<C64>::basis(n, 0);
                let has_e1 = search
                    .witnesses
                    .iter()
                    .any(|w| w.element.sub(&e1).max_modulus() <= cfg.tol_dedup);
                let only_trivial_solution = search.outcome.nontrivial(cfg.tol_zero).next().is_none();
                let ok = match kind {
                    ClassificationKind::K2 => {
                        series.solvable
                            && chain.right_nilpotent
                            && search.witnesses.is_empty()
                            && only_trivial_solution
                    }
                    _ => !series.solvable && has_e1,
                };
                checks.push(ClassificationCheck {
                    kind,
                    n,
                    s: if uses_s { s } else { 0 },
                    solvable: series.solvable,
                    right_nilpotent: chain.right_nilpotent,
                    idempotents: search.witnesses.len(),
                    has_e1,
                    only_trivial_solution,
                    ok,
                });
            }
        }
    }
    Ok(checks)
}

/// Report-only comparison of the chain algebra's right-nilpotency index with
/// the largest index seen among random right-nilpotent algebras.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NilpotencySurvey {
    pub s: usize,
    pub chain_index: usize,
    pub samples: usize,
    pub right_nilpotent_samples: usize,
    pub max_random_index: Option<usize>,
}

pub fn nilpotency_index_survey(s: usize, samples: usize, seed: u64) -> Result<NilpotencySurvey> {
    let chain_index = ExactAlgebra::chain(s)
        .nilpotency()
        .index
        .expect("chain algebra is right-nilpotent");
    let mut hits = 0;
    let mut best: Option<usize> = None;
    for k in 0..samples {
        // Strictly upper-triangular supports are right-nilpotent; extra
        // sparsity spreads the sample over smaller indices too.
        let AnyAlgebra::Exact(alg) =
            random_algebra(s, Profile::Sparse(0.3), mix_seed(seed, s as u64, k as u64))?
        else {
            unreachable!()
        };
        let mut m = alg.structure().clone();
        for i in 0..s {
            for j in 0..=i {
                m[(i, j)] = Complex::zero();
            }
        }
        if let Some(index) = ExactAlgebra::new(m)?.nilpotency().index {
            hits += 1;
            best = Some(best.map_or(index, |b| b.max(index)));
        }
    }
    Ok(NilpotencySurvey {
        s,
        chain_index,
        samples,
        right_nilpotent_samples: hits,
        max_random_index: best,
    })
}

/// Checks the float/exact agreement of the derived series on one rational
/// algebra: same solvability verdict and same term dimensions.
pub fn derived_series_agreement(alg: &ExactAlgebra) -> bool {
    let exact = alg.solvability();
    let float: FloatAlgebra = alg.to_float();
    let numeric = float.solvability();
    exact.solvable == numeric.solvable
        && exact
            .series
            .iter()
            .map(|s| s.dim())
            .eq(numeric.series.iter().map(|s| s.dim()))
}
