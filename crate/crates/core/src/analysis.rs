//! Algebraic statements read off solver output: idempotents, one-dimensional
//! subalgebras, natural vectors and completeness obstructions.
//!
//! Every candidate point coming out of the solver is re-validated through the
//! algebra's own multiplication before it is reported.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{Element, EvolutionAlgebra};
use crate::json::{complex_vec, SolutionRecord};
use crate::linalg::Matrix;
use crate::quadratic::{QuadraticSystem, SystemKind};
use crate::scalar::Scalar;
use crate::solver::{solve, Solution, SolveOutcome, SolverConfig};
use crate::{FloatAlgebra, C64};

/// A non-zero `u` with `u² = u`, re-validated in the algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct IdempotentWitness {
    pub element: Element<C64>,
    /// `‖u·u − u‖∞`.
    pub residual: f64,
    pub support: Vec<usize>,
}

/// A spanning vector `v` of a one-dimensional subalgebra, `v² = λ v`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubalgebraWitness {
    pub spanning: Element<C64>,
    pub eigenvalue: C64,
    /// Max-norm of `v² − λ v`.
    pub residual: f64,
    pub support: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSource {
    IdempotentSystem,
    SubalgebraSystem,
}

/// An idempotent supported on at least two basis vectors whose squares are
/// linearly independent; it cannot be extended to a natural basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionWitness {
    pub idempotent: IdempotentWitness,
    pub square_rank: usize,
    pub source: WitnessSource,
}

/// Idempotents together with the solve they came from.
#[derive(Debug, Clone)]
pub struct IdempotentSearch {
    pub witnesses: Vec<IdempotentWitness>,
    pub outcome: SolveOutcome,
    /// Non-trivial endpoints that failed re-validation.
    pub rejected: usize,
}

#[derive(Debug, Clone)]
pub struct SubalgebraSearch {
    pub witnesses: Vec<SubalgebraWitness>,
    pub outcome: SolveOutcome,
    pub rejected: usize,
}

fn support(v: &[C64], tol: f64) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > tol)
        .map(|(i, _)| i)
        .collect()
}

fn idempotent_residual(alg: &FloatAlgebra, u: &Element<C64>) -> f64 {
    alg.square(u).expect("matching dimension").sub(u).max_modulus()
}

pub fn search_idempotents<S: Scalar>(
    alg: &EvolutionAlgebra<S>,
    cfg: &SolverConfig,
) -> Result<IdempotentSearch> {
    let float = alg.to_float();
    let sys = QuadraticSystem::for_algebra(SystemKind::Idempotent, &float)?;
    let outcome = solve(&sys, cfg)?;
    let mut witnesses = Vec::new();
    let mut rejected = 0;
    for s in outcome.nontrivial(cfg.tol_zero) {
        let element = Element::new(s.point.clone());
        let residual = idempotent_residual(&float, &element);
        if residual <= cfg.tol_final {
            witnesses.push(IdempotentWitness {
                support: support(&element.coords, cfg.tol_zero),
                element,
                residual,
            });
        } else {
            rejected += 1;
        }
    }
    Ok(IdempotentSearch {
        witnesses,
        outcome,
        rejected,
    })
}

/// Non-zero idempotents, in the solver's canonical order.
pub fn find_idempotents<S: Scalar>(
    alg: &EvolutionAlgebra<S>,
    cfg: &SolverConfig,
) -> Result<Vec<IdempotentWitness>> {
    Ok(search_idempotents(alg, cfg)?.witnesses)
}

fn hermitian_quotient(w: &[C64], v: &[C64]) -> C64 {
    let num: C64 = v.iter().zip(w).map(|(a, b)| a.conj() * b).sum();
    let den: f64 = v.iter().map(|a| a.norm_sqr()).sum();
    num / den
}

pub fn search_one_dim_subalgebras<S: Scalar>(
    alg: &EvolutionAlgebra<S>,
    cfg: &SolverConfig,
) -> Result<SubalgebraSearch> {
    if !alg.is_regular(S::default_tol()) {
        return Err(Error::NotRegular);
    }
    let float = alg.to_float();
    let sys = match QuadraticSystem::for_algebra(SystemKind::Subalgebra, &float) {
        Ok(sys) => sys,
        Err(Error::SingularMatrix { .. }) => return Err(Error::NotRegular),
        Err(e) => return Err(e),
    };
    let outcome = solve(&sys, cfg)?;
    let mut witnesses = Vec::new();
    let mut rejected = 0;
    for s in outcome.nontrivial(cfg.tol_zero) {
        let v = Element::new(s.point.clone());
        let square = float.square(&v)?;
        let pair = Matrix::from_rows(vec![v.coords.clone(), square.coords.clone()])?;
        let eigenvalue = hermitian_quotient(&square.coords, &v.coords);
        let residual = square.sub(&v.scale(&eigenvalue)).max_modulus();
        if pair.rank(cfg.tol_zero).rank == 1 && residual <= cfg.tol_final * (1.0 + v.max_modulus()) {
            witnesses.push(SubalgebraWitness {
                support: support(&v.coords, cfg.tol_zero),
                spanning: v,
                eigenvalue,
                residual,
            });
        } else {
            rejected += 1;
        }
    }
    Ok(SubalgebraSearch {
        witnesses,
        outcome,
        rejected,
    })
}

/// Spanning vectors of the non-zero one-dimensional subalgebras of a regular
/// algebra.
pub fn one_dim_subalgebras<S: Scalar>(
    alg: &EvolutionAlgebra<S>,
    cfg: &SolverConfig,
) -> Result<Vec<SubalgebraWitness>> {
    Ok(search_one_dim_subalgebras(alg, cfg)?.witnesses)
}

impl SubalgebraWitness {
    /// The idempotent `v / λ` spanning the same subalgebra, if `λ ≠ 0`.
    pub fn normalized_idempotent(&self, alg: &FloatAlgebra, tol_zero: f64) -> Option<IdempotentWitness> {
        if self.eigenvalue.norm() <= tol_zero {
            return None;
        }
        let element = self.spanning.scale(&(C64::new(1.0, 0.0) / self.eigenvalue));
        Some(IdempotentWitness {
            residual: idempotent_residual(alg, &element),
            support: support(&element.coords, tol_zero),
            element,
        })
    }
}

/// Rank of `{e_i² : i ∈ support}`.
pub fn square_rank<S: Scalar>(alg: &EvolutionAlgebra<S>, support: &[usize], tol: f64) -> usize {
    if support.is_empty() {
        return 0;
    }
    let rows = support.iter().map(|&i| alg.structure().row(i).to_vec()).collect();
    Matrix::from_rows(rows).expect("equal rows").rank(tol).rank
}

/// Whether the idempotent `u` extends to a natural basis, using the
/// criterion `rank{e_i² : u_i ≠ 0} = 1`. `tol` is both the idempotency
/// residual bound and the zero threshold (ignored on exact scalars).
pub fn is_natural_vector<S: Scalar>(u: &Element<S>, alg: &EvolutionAlgebra<S>, tol: f64) -> Result<bool> {
    let residual_vec = alg.square(u)?.sub(u);
    let residual = residual_vec.max_modulus();
    let idempotent = residual_vec.coords.iter().all(|c| c.is_negligible(tol));
    let supp = u.support(tol);
    if !idempotent || supp.is_empty() {
        return Err(Error::NotIdempotent { residual });
    }
    Ok(square_rank(alg, &supp, tol) == 1)
}

/// Looks for an idempotent (or normalised one-dimensional subalgebra) that is
/// not a natural vector. `None` means the solver produced no such point, a
/// solver shortfall rather than a statement about the algebra.
pub fn completeness_obstruction<S: Scalar>(
    alg: &EvolutionAlgebra<S>,
    cfg: &SolverConfig,
) -> Result<Option<ObstructionWitness>> {
    if alg.dim() < 2 {
        return Err(Error::BadParameters(
            "completeness obstruction needs dimension at least 2".into(),
        ));
    }
    if !alg.is_regular(S::default_tol()) {
        return Err(Error::NotRegular);
    }
    let rank_tol = S::default_tol().max(if S::EXACT { 0.0 } else { cfg.tol_zero });
    let pick = |w: IdempotentWitness, source| {
        let r = square_rank(alg, &w.support, rank_tol);
        (w.support.len() >= 2 && r >= 2).then_some(ObstructionWitness {
            idempotent: w,
            square_rank: r,
            source,
        })
    };
    for w in find_idempotents(alg, cfg)? {
        if let Some(o) = pick(w, WitnessSource::IdempotentSystem) {
            return Ok(Some(o));
        }
    }
    let float = alg.to_float();
    for s in one_dim_subalgebras(alg, cfg)? {
        if let Some(w) = s.normalized_idempotent(&float, cfg.tol_zero) {
            if w.residual <= cfg.tol_final {
                if let Some(o) = pick(w, WitnessSource::SubalgebraSystem) {
                    return Ok(Some(o));
                }
            }
        }
    }
    Ok(None)
}

/// Keeps the solutions whose imaginary parts are all within `tol`, with the
/// imaginary parts set to zero.
pub fn filter_real(solutions: &[Solution], tol: f64) -> Vec<Solution> {
    solutions
        .iter()
        .filter(|s| s.point.iter().all(|c| c.im.abs() <= tol))
        .map(|s| {
            let mut s = s.clone();
            for c in &mut s.point {
                c.im = 0.0;
            }
            s.is_real = true;
            s
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdempotentRecord {
    pub element: Vec<[f64; 2]>,
    pub residual: f64,
    pub support: Vec<usize>,
}

impl From<&IdempotentWitness> for IdempotentRecord {
    fn from(w: &IdempotentWitness) -> Self {
        Self {
            element: complex_vec(&w.element.coords),
            residual: w.residual,
            support: w.support.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubalgebraRecord {
    pub spanning: Vec<[f64; 2]>,
    pub eigenvalue: [f64; 2],
    pub residual: f64,
    pub support: Vec<usize>,
}

impl From<&SubalgebraWitness> for SubalgebraRecord {
    fn from(w: &SubalgebraWitness) -> Self {
        Self {
            spanning: complex_vec(&w.spanning.coords),
            eigenvalue: [w.eigenvalue.re, w.eigenvalue.im],
            residual: w.residual,
            support: w.support.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObstructionRecord {
    pub idempotent: IdempotentRecord,
    pub square_rank: usize,
    pub source: WitnessSource,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathStats {
    pub bezout_count: usize,
    pub diverged_paths: usize,
    pub failed_paths: usize,
}

impl From<&SolveOutcome> for PathStats {
    fn from(o: &SolveOutcome) -> Self {
        Self {
            bezout_count: o.bezout_count,
            diverged_paths: o.diverged_paths,
            failed_paths: o.failed_paths,
        }
    }
}

/// Per-algebra report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub backend: &'static str,
    pub regular: bool,
    pub simple_candidate: bool,
    pub solvable: bool,
    pub derived_series_dims: Vec<usize>,
    pub right_nilpotent: bool,
    pub power_chain_dims: Vec<usize>,
    pub idempotents: Vec<IdempotentRecord>,
    pub idempotent_paths: PathStats,
    /// `None` for non-regular algebras.
    pub one_dim_subalgebras: Option<Vec<SubalgebraRecord>>,
    pub obstruction: Option<ObstructionRecord>,
}

pub fn analyze<S: Scalar>(alg: &EvolutionAlgebra<S>, cfg: &SolverConfig) -> Result<AnalysisReport> {
    let tol = S::default_tol();
    let regular = alg.is_regular(tol);
    let series = alg.solvability();
    let chain = alg.nilpotency();
    let idem = search_idempotents(alg, cfg)?;
    let subalgebras = if regular {
        Some(
            one_dim_subalgebras(alg, cfg)?
                .iter()
                .map(SubalgebraRecord::from)
                .collect(),
        )
    } else {
        None
    };
    let obstruction = if regular && alg.dim() >= 2 {
        completeness_obstruction(alg, cfg)?.map(|o| ObstructionRecord {
            idempotent: IdempotentRecord::from(&o.idempotent),
            square_rank: o.square_rank,
            source: o.source,
        })
    } else {
        None
    };
    Ok(AnalysisReport {
        n: alg.dim(),
        backend: if S::EXACT { "exact" } else { "float" },
        regular,
        simple_candidate: alg.is_simple_candidate(tol),
        solvable: series.solvable,
        derived_series_dims: series.series.iter().map(|s| s.dim()).collect(),
        right_nilpotent: chain.right_nilpotent,
        power_chain_dims: chain.chain.iter().map(|s| s.dim()).collect(),
        idempotents: idem.witnesses.iter().map(IdempotentRecord::from).collect(),
        idempotent_paths: PathStats::from(&idem.outcome),
        one_dim_subalgebras: subalgebras,
        obstruction,
    })
}

/// Solution records of the real solutions, for reports.
pub fn real_records(solutions: &[Solution], tol: f64) -> Vec<SolutionRecord> {
    filter_real(solutions, tol)
        .iter()
        .map(SolutionRecord::from)
        .collect()
}
