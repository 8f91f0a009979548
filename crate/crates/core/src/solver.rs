//! Total-degree homotopy continuation for square quadratic systems.
//!
//! The start system is `G_i(x) = x_i² − c_i` with `2^n` known roots. Each root
//! is tracked along `H(x, t) = (1 − t)·γ·G(x) + t·F(x)` from `t = 0` to `t = 1`
//! with an Euler predictor and a Newton corrector, then polished by Newton on
//! `F`. Endpoints are clustered into [`Solution`]s.
//!
//! Paths are independent; with `parallel` set they run on the rayon pool, and
//! the merged result is identical to a sequential run.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{min_pivot_ratio, Matrix};
use crate::quadratic::{QuadraticSystem, SystemKind};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Corrector tolerance, relative to `1 + ‖x‖∞`.
    pub tol_track: f64,
    /// Endpoint residual bound `‖F(x)‖∞`.
    pub tol_final: f64,
    /// Endpoint clustering radius, relative to `max(1, ‖x‖∞)`.
    pub tol_dedup: f64,
    /// A coordinate with modulus at most this is zero.
    pub tol_zero: f64,
    pub max_steps: usize,
    pub step_init: f64,
    pub step_min: f64,
    pub step_max: f64,
    pub rng_seed: u64,
    pub divergence_bound: f64,
    #[serde(skip)]
    pub parallel: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_track: 1e-10,
            tol_final: 1e-10,
            tol_dedup: 1e-6,
            tol_zero: 1e-8,
            max_steps: 20_000,
            step_init: 0.02,
            step_min: 1e-14,
            step_max: 0.1,
            rng_seed: 0,
            divergence_bound: 1e8,
            parallel: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tol_track", self.tol_track),
            ("tol_final", self.tol_final),
            ("tol_dedup", self.tol_dedup),
            ("tol_zero", self.tol_zero),
            ("step_min", self.step_min),
            ("divergence_bound", self.divergence_bound),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::BadParameters(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.step_min <= self.step_init && self.step_init <= self.step_max) {
            return Err(Error::BadParameters(
                "expected step_min <= step_init <= step_max".into(),
            ));
        }
        if self.max_steps == 0 {
            return Err(Error::BadParameters("max_steps must be positive".into()));
        }
        Ok(())
    }

    fn tightened(&self) -> Self {
        Self {
            tol_track: self.tol_track * 0.1,
            step_init: (self.step_init * 0.1).max(self.step_min),
            step_max: (self.step_max * 0.1).max(self.step_min),
            max_steps: self.max_steps * 4,
            ..self.clone()
        }
    }
}

/// A square polynomial system that paths can be tracked to.
pub trait TargetSystem: Sync {
    fn dim(&self) -> usize;
    fn evaluate(&self, x: &[C64]) -> Vec<C64>;
    fn jacobian(&self, x: &[C64]) -> Matrix<C64>;

    fn residual(&self, x: &[C64]) -> f64 {
        norm_inf(&self.evaluate(x))
    }
}

impl TargetSystem for QuadraticSystem<C64> {
    fn dim(&self) -> usize {
        QuadraticSystem::dim(self)
    }

    fn evaluate(&self, x: &[C64]) -> Vec<C64> {
        QuadraticSystem::evaluate(self, x).expect("matching dimension")
    }

    fn jacobian(&self, x: &[C64]) -> Matrix<C64> {
        QuadraticSystem::jacobian(self, x).expect("matching dimension")
    }
}

impl TargetSystem for StartSystem {
    fn dim(&self) -> usize {
        self.constants.len()
    }

    fn evaluate(&self, x: &[C64]) -> Vec<C64> {
        x.iter().zip(&self.constants).map(|(x, c)| x * x - c).collect()
    }

    fn jacobian(&self, x: &[C64]) -> Matrix<C64> {
        let mut j = Matrix::zeros(x.len(), x.len());
        for (i, xi) in x.iter().enumerate() {
            j[(i, i)] = xi * 2.0;
        }
        j
    }
}

/// `G_i(x) = x_i² − c_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StartSystem {
    constants: Vec<C64>,
}

impl StartSystem {
    pub fn new(constants: Vec<C64>) -> Self {
        Self { constants }
    }

    /// Constants drawn uniformly from the annulus `0.5 ≤ |c| ≤ 2`.
    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        let constants = (0..n)
            .map(|_| {
                let r = rng.random_range(0.5..=2.0);
                let theta = rng.random_range(0.0..TAU);
                C64::from_polar(r, theta)
            })
            .collect();
        Self { constants }
    }

    pub fn constants(&self) -> &[C64] {
        &self.constants
    }

    /// All `2^n` roots; bit `i` of the index picks the sign of `√c_i`.
    pub fn roots(&self) -> Vec<Vec<C64>> {
        let n = self.constants.len();
        let sqrt: Vec<C64> = self.constants.iter().map(|c| c.sqrt()).collect();
        (0..1usize << n)
            .map(|k| {
                (0..n)
                    .map(|i| if k >> i & 1 == 0 { sqrt[i] } else { -sqrt[i] })
                    .collect()
            })
            .collect()
    }
}

/// Seeded start system and its `2^n` start points.
pub fn start_system(n: usize, seed: u64) -> (StartSystem, Vec<Vec<C64>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = StartSystem::random(n, &mut rng);
    let starts = g.roots();
    (g, starts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    StepUnderflow,
    MaxSteps,
    /// Tracking reached `t = 1` but Newton on `F` did not reach `tol_final`.
    RefinementStalled,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PathResult {
    Endpoint {
        point: Vec<C64>,
        residual: f64,
        steps: usize,
    },
    Diverged {
        steps: usize,
        t: f64,
    },
    Failed {
        reason: FailureReason,
        steps: usize,
        t: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub point: Vec<C64>,
    pub residual: f64,
    pub singular: bool,
    /// 0-based indices of the non-zero coordinates.
    pub support: Vec<usize>,
    pub is_real: bool,
    /// Number of paths that ended in this cluster.
    pub multiplicity_hint: usize,
}

impl Solution {
    pub fn is_trivial(&self, tol_zero: f64) -> bool {
        self.point.iter().all(|c| c.norm() <= tol_zero)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub system: QuadraticSystem<C64>,
    pub solutions: Vec<Solution>,
    pub diverged_paths: usize,
    pub failed_paths: usize,
    pub bezout_count: usize,
    /// Paths re-tracked with a tightened configuration.
    pub retracked_paths: usize,
}

impl SolveOutcome {
    pub fn kind(&self) -> SystemKind {
        self.system.kind()
    }

    /// Every path ended in some cluster and no cluster hides a path collision.
    pub fn is_complete(&self) -> bool {
        self.failed_paths == 0
            && self
                .solutions
                .iter()
                .all(|s| s.singular || s.multiplicity_hint == 1)
    }

    pub fn nontrivial(&self, tol_zero: f64) -> impl Iterator<Item = &Solution> {
        self.solutions.iter().filter(move |s| !s.is_trivial(tol_zero))
    }
}

struct Homotopy<'a, T> {
    target: &'a T,
    start: &'a StartSystem,
    gamma: C64,
}

impl<T: TargetSystem> Homotopy<'_, T> {
    fn value(&self, x: &[C64], t: f64) -> Vec<C64> {
        let f = self.target.evaluate(x);
        let g = self.start.evaluate(x);
        let s = self.gamma * (1.0 - t);
        f.iter().zip(&g).map(|(f, g)| s * g + f * t).collect()
    }

    fn dx(&self, x: &[C64], t: f64) -> Matrix<C64> {
        let mut j = self.target.jacobian(x).scale(&C64::new(t, 0.0));
        let s = self.gamma * (2.0 * (1.0 - t));
        for (i, xi) in x.iter().enumerate() {
            j[(i, i)] += s * xi;
        }
        j
    }

    fn dt(&self, x: &[C64]) -> Vec<C64> {
        let f = self.target.evaluate(x);
        let g = self.start.evaluate(x);
        f.iter().zip(&g).map(|(f, g)| f - self.gamma * g).collect()
    }

    fn tangent(&self, x: &[C64], t: f64) -> Option<Vec<C64>> {
        let rhs: Vec<C64> = self.dt(x).into_iter().map(|v| -v).collect();
        self.dx(x, t).lu(0.0).ok()?.solve(&rhs).ok()
    }

    /// Newton on `H(·, t)`; at most three iterations, each update at most half
    /// the previous one.
    fn correct(&self, mut x: Vec<C64>, t: f64, tol: f64) -> Option<Vec<C64>> {
        let mut previous = f64::INFINITY;
        for _ in 0..3 {
            let rhs: Vec<C64> = self.value(&x, t).into_iter().map(|v| -v).collect();
            let delta = self.dx(&x, t).lu(0.0).ok()?.solve(&rhs).ok()?;
            let size = norm_inf(&delta);
            if !size.is_finite() || size > 0.5 * previous {
                return None;
            }
            for (xi, d) in x.iter_mut().zip(&delta) {
                *xi += d;
            }
            if size <= tol * (1.0 + norm_inf(&x)) {
                return Some(x);
            }
            previous = size;
        }
        None
    }
}

fn norm_inf(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Tracks one path from `t = 0` to `t = 1` and refines the endpoint on `F`.
pub fn track_path<T: TargetSystem>(
    start_point: &[C64],
    target: &T,
    start: &StartSystem,
    gamma: C64,
    cfg: &SolverConfig,
) -> PathResult {
    let homotopy = Homotopy { target, start, gamma };
    let mut x = start_point.to_vec();
    let mut t = 0.0f64;
    let mut h = cfg.step_init;
    let mut steps = 0;
    let mut streak = 0;
    while t < 1.0 {
        if steps >= cfg.max_steps {
            return PathResult::Failed {
                reason: FailureReason::MaxSteps,
                steps,
                t,
            };
        }
        steps += 1;
        let t1 = if t + h >= 1.0 { 1.0 } else { t + h };
        let predicted = homotopy.tangent(&x, t).map(|dx| {
            x.iter()
                .zip(&dx)
                .map(|(xi, d)| xi + d * (t1 - t))
                .collect::<Vec<_>>()
        });
        match predicted.and_then(|p| homotopy.correct(p, t1, cfg.tol_track)) {
            Some(next) => {
                x = next;
                t = t1;
                streak += 1;
                if streak >= 3 {
                    h = (2.0 * h).min(cfg.step_max);
                    streak = 0;
                }
                if norm_inf(&x) > cfg.divergence_bound {
                    return PathResult::Diverged { steps, t };
                }
            }
            None => {
                h *= 0.5;
                streak = 0;
                if h < cfg.step_min {
                    return PathResult::Failed {
                        reason: FailureReason::StepUnderflow,
                        steps,
                        t,
                    };
                }
            }
        }
    }
    let (point, residual) = refine(target, x, cfg);
    if residual <= cfg.tol_final {
        PathResult::Endpoint {
            point,
            residual,
            steps,
        }
    } else if norm_inf(&point) > cfg.divergence_bound {
        PathResult::Diverged { steps, t }
    } else {
        PathResult::Failed {
            reason: FailureReason::RefinementStalled,
            steps,
            t,
        }
    }
}

/// Newton on `F`, at most 20 iterations. Stops once the residual is below
/// `tol_final` and a further step no longer improves it.
pub fn refine<T: TargetSystem>(sys: &T, mut x: Vec<C64>, cfg: &SolverConfig) -> (Vec<C64>, f64) {
    let residual = |x: &[C64]| sys.residual(x);
    let mut r = residual(&x);
    for _ in 0..20 {
        let rhs: Vec<C64> = sys.evaluate(&x).into_iter().map(|v| -v).collect();
        let Some(delta) = sys.jacobian(&x).lu(0.0).ok().and_then(|lu| lu.solve(&rhs).ok()) else {
            break;
        };
        let candidate: Vec<C64> = x.iter().zip(&delta).map(|(a, d)| a + d).collect();
        let rc = residual(&candidate);
        if !rc.is_finite() {
            break;
        }
        if r <= cfg.tol_final && rc >= r {
            break;
        }
        let done = rc <= cfg.tol_final && norm_inf(&delta) <= 1e-14 * (1.0 + norm_inf(&candidate));
        x = candidate;
        r = rc;
        if done {
            break;
        }
    }
    (x, r)
}

fn classify(
    sys: &QuadraticSystem<C64>,
    point: Vec<C64>,
    multiplicity: usize,
    cfg: &SolverConfig,
) -> Solution {
    let residual = sys.residual(&point).expect("matching dimension");
    let jac = sys.jacobian(&point).expect("matching dimension");
    let singular = min_pivot_ratio(&jac) <= cfg.tol_zero;
    let support = point
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > cfg.tol_zero)
        .map(|(i, _)| i)
        .collect();
    let is_real = point.iter().all(|c| c.im.abs() <= cfg.tol_zero);
    Solution {
        point,
        residual,
        singular,
        support,
        is_real,
        multiplicity_hint: multiplicity,
    }
}

fn close(a: &[C64], b: &[C64], tol: f64) -> bool {
    let scale = norm_inf(a).max(1.0);
    a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol * scale)
}

/// Groups endpoint indices by proximity, in path order.
fn cluster(results: &[PathResult], tol: f64) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (i, r) in results.iter().enumerate() {
        let PathResult::Endpoint { point, .. } = r else {
            continue;
        };
        let home = clusters.iter_mut().find(|c| {
            let PathResult::Endpoint { point: rep, .. } = &results[c[0]] else {
                unreachable!()
            };
            close(rep, point, tol)
        });
        match home {
            Some(c) => c.push(i),
            None => clusters.push(vec![i]),
        }
    }
    clusters
}

fn sort_key(point: &[C64], tol: f64) -> Vec<i64> {
    let round = |v: f64| {
        let r = (v / tol).round();
        if r == 0.0 {
            0
        } else {
            r as i64
        }
    };
    point.iter().flat_map(|c| [round(c.re), round(c.im)]).collect()
}

fn track_all(
    indices: &[usize],
    starts: &[Vec<C64>],
    target: &QuadraticSystem<C64>,
    start: &StartSystem,
    gamma: C64,
    cfg: &SolverConfig,
) -> Vec<PathResult> {
    let run = |&i: &usize| track_path(&starts[i], target, start, gamma, cfg);
    if cfg.parallel {
        indices.par_iter().map(run).collect()
    } else {
        indices.iter().map(run).collect()
    }
}

/// Solves `F(x) = 0` by tracking all `2^n` total-degree paths.
pub fn solve(sys: &QuadraticSystem<C64>, cfg: &SolverConfig) -> Result<SolveOutcome> {
    cfg.validate()?;
    let n = sys.dim();
    if n == 0 || n >= usize::BITS as usize - 1 {
        return Err(Error::BadParameters(format!("unsupported dimension {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let gamma = C64::from_polar(1.0, rng.random_range(0.0..TAU));
    let start = StartSystem::random(n, &mut rng);
    let starts = start.roots();
    let all: Vec<usize> = (0..starts.len()).collect();
    let mut results = track_all(&all, &starts, sys, &start, gamma, cfg);

    // Second pass for failed paths and for paths that collided on a
    // nonsingular endpoint (a path jump).
    let mut retry: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, r)| matches!(r, PathResult::Failed { .. }))
        .map(|(i, _)| i)
        .collect();
    for c in cluster(&results, cfg.tol_dedup) {
        if c.len() > 1 {
            let PathResult::Endpoint { point, .. } = &results[c[0]] else {
                unreachable!()
            };
            let jac = sys.jacobian(point).expect("matching dimension");
            if min_pivot_ratio(&jac) > cfg.tol_zero {
                retry.extend(c);
            }
        }
    }
    retry.sort_unstable();
    let tight = cfg.tightened();
    for (i, r) in retry
        .iter()
        .zip(track_all(&retry, &starts, sys, &start, gamma, &tight))
    {
        results[*i] = r;
    }

    let general = sys.kind() == SystemKind::General;
    let mut diverged = 0;
    let mut failed = 0;
    for r in &results {
        match r {
            PathResult::Diverged { .. } if general => failed += 1,
            PathResult::Diverged { .. } => diverged += 1,
            PathResult::Failed { .. } => failed += 1,
            PathResult::Endpoint { .. } => {}
        }
    }

    let mut solutions: Vec<Solution> = cluster(&results, cfg.tol_dedup)
        .into_iter()
        .map(|members| {
            let best = members
                .iter()
                .copied()
                .min_by(|&a, &b| {
                    let ra = endpoint_residual(&results[a]);
                    let rb = endpoint_residual(&results[b]);
                    ra.partial_cmp(&rb).unwrap_or(Ordering::Equal).then(a.cmp(&b))
                })
                .expect("non-empty cluster");
            let PathResult::Endpoint { point, .. } = &results[best] else {
                unreachable!()
            };
            classify(sys, point.clone(), members.len(), cfg)
        })
        .collect();
    solutions.sort_by(|a, b| {
        sort_key(&a.point, cfg.tol_dedup)
            .cmp(&sort_key(&b.point, cfg.tol_dedup))
            .then_with(|| lex_exact(&a.point, &b.point))
    });

    Ok(SolveOutcome {
        system: sys.clone(),
        solutions,
        diverged_paths: diverged,
        failed_paths: failed,
        bezout_count: starts.len(),
        retracked_paths: retry.len(),
    })
}

fn endpoint_residual(r: &PathResult) -> f64 {
    match r {
        PathResult::Endpoint { residual, .. } => *residual,
        _ => f64::INFINITY,
    }
}

fn lex_exact(a: &[C64], b: &[C64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::FloatMatrix;

    #[test]
    fn start_roots_for_unit_constant() {
        let g = StartSystem::new(vec![C64::new(1.0, 0.0)]);
        assert_eq!(
            g.roots(),
            vec![vec![C64::new(1.0, 0.0)], vec![C64::new(-1.0, 0.0)]]
        );
    }

    #[test]
    fn start_roots_are_distinct_and_exact() {
        for n in 1..=5 {
            let (g, starts) = start_system(n, 42 + n as u64);
            assert_eq!(starts.len(), 1 << n);
            for c in g.constants() {
                assert!((0.5 - 1e-12..=2.0 + 1e-12).contains(&c.norm()));
            }
            for (i, s) in starts.iter().enumerate() {
                assert!(g.residual(s) <= 1e-14);
                for other in &starts[..i] {
                    assert!(!close(s, other, 1e-6));
                }
            }
        }
    }

    #[test]
    fn stationary_homotopy_returns_start() {
        let (g, starts) = start_system(3, 3);
        let cfg = SolverConfig::default();
        for s in &starts {
            match track_path(s, &g, &g, C64::new(1.0, 0.0), &cfg) {
                PathResult::Endpoint { point, residual, .. } => {
                    assert!(close(&point, s, 1e-12), "{point:?} vs {s:?}");
                    assert!(residual <= 1e-14);
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig {
            step_min: 1.0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            tol_final: 0.0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn decoupled_system_endpoints() {
        let sys = QuadraticSystem::build(SystemKind::General, &FloatMatrix::identity(2)).unwrap();
        let out = solve(&sys, &SolverConfig::default()).unwrap();
        assert_eq!(out.solutions.len(), 4);
        for s in &out.solutions {
            assert!(s.residual <= 1e-10);
            for c in &s.point {
                assert!((c - C64::new(0.0, 0.0)).norm() < 1e-10 || (c - C64::new(1.0, 0.0)).norm() < 1e-10);
            }
        }
    }
}
