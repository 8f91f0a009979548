//! JSON encodings: algebras and solver outcomes.
//!
//! Algebra schema: `{"n": int, "matrix": [[entry, …], …]}` where an entry is
//! a number, a `[re, im]` pair of numbers, a rational string `"p/q"`, or a
//! pair of rational strings. Numeric entries select the float backend and
//! string entries the exact backend; a matrix may not mix the two.

use std::str::FromStr;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::evolution::EvolutionAlgebra;
use crate::linalg::Matrix;
use crate::quadratic::{QuadraticSystem, SystemKind};
use crate::scalar::Scalar;
use crate::solver::{Solution, SolveOutcome};
use crate::{ExactAlgebra, ExactComplex, FloatAlgebra, C64};

/// An algebra on whichever backend its input data selected.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyAlgebra {
    Float(FloatAlgebra),
    Exact(ExactAlgebra),
}

impl AnyAlgebra {
    pub fn dim(&self) -> usize {
        match self {
            AnyAlgebra::Float(a) => a.dim(),
            AnyAlgebra::Exact(a) => a.dim(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, AnyAlgebra::Exact(_))
    }

    pub fn to_float(&self) -> FloatAlgebra {
        match self {
            AnyAlgebra::Float(a) => a.clone(),
            AnyAlgebra::Exact(a) => a.to_float(),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::parse("$", e.to_string()))?;
        Self::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::parse("$", "expected an object"))?;
        let n = obj
            .get("n")
            .ok_or_else(|| Error::parse("$.n", "missing field"))?
            .as_u64()
            .ok_or_else(|| Error::parse("$.n", "expected a non-negative integer"))? as usize;
        if n == 0 {
            return Err(Error::parse("$.n", "dimension must be at least 1"));
        }
        let rows = obj
            .get("matrix")
            .ok_or_else(|| Error::parse("$.matrix", "missing field"))?
            .as_array()
            .ok_or_else(|| Error::parse("$.matrix", "expected an array of rows"))?;
        if rows.len() != n {
            return Err(Error::parse(
                "$.matrix",
                format!("expected {n} rows, found {}", rows.len()),
            ));
        }
        let mut entries = Vec::with_capacity(n);
        let mut has_float = false;
        let mut has_string = false;
        for (i, row) in rows.iter().enumerate() {
            let path = format!("$.matrix[{i}]");
            let row = row
                .as_array()
                .ok_or_else(|| Error::parse(&path, "expected an array"))?;
            if row.len() != n {
                return Err(Error::parse(
                    &path,
                    format!("expected {n} entries, found {}", row.len()),
                ));
            }
            let mut parsed_row = Vec::with_capacity(n);
            for (j, entry) in row.iter().enumerate() {
                let path = format!("$.matrix[{i}][{j}]");
                let parsed = parse_entry(entry, &path)?;
                match parsed {
                    Entry::Float(_) => has_float = true,
                    Entry::Exact(_) => has_string = true,
                    Entry::Integer(_) => {}
                }
                if has_float && has_string {
                    return Err(Error::parse(
                        &path,
                        "mixes non-integer numbers and rational-string entries",
                    ));
                }
                parsed_row.push(parsed);
            }
            entries.push(parsed_row);
        }
        // Integer literals are rational, so they stay exact unless a
        // non-integer number forces the float backend.
        if has_float {
            let rows = entries
                .into_iter()
                .map(|r| r.into_iter().map(Entry::into_float).collect())
                .collect();
            Ok(AnyAlgebra::Float(EvolutionAlgebra::new(Matrix::from_rows(
                rows,
            )?)?))
        } else {
            let rows = entries
                .into_iter()
                .map(|r| r.into_iter().map(Entry::into_exact).collect())
                .collect();
            Ok(AnyAlgebra::Exact(EvolutionAlgebra::new(Matrix::from_rows(
                rows,
            )?)?))
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            AnyAlgebra::Float(a) => algebra_json(a.structure(), float_entry),
            AnyAlgebra::Exact(a) => algebra_json(a.structure(), exact_entry),
        }
    }
}

impl From<FloatAlgebra> for AnyAlgebra {
    fn from(a: FloatAlgebra) -> Self {
        AnyAlgebra::Float(a)
    }
}

impl From<ExactAlgebra> for AnyAlgebra {
    fn from(a: ExactAlgebra) -> Self {
        AnyAlgebra::Exact(a)
    }
}

enum Entry {
    Float(C64),
    Exact(ExactComplex),
    /// Integer literals, usable by either backend.
    Integer(ExactComplex),
}

impl Entry {
    fn into_float(self) -> C64 {
        match self {
            Entry::Float(v) => v,
            Entry::Exact(v) | Entry::Integer(v) => v.to_c64(),
        }
    }

    fn into_exact(self) -> ExactComplex {
        match self {
            Entry::Exact(v) | Entry::Integer(v) => v,
            Entry::Float(_) => unreachable!("float entries force the float backend"),
        }
    }
}

fn parse_entry(v: &Value, path: &str) -> Result<Entry> {
    match v {
        Value::Number(x) => number_entry(&[x], path),
        Value::String(s) => Ok(Entry::Exact(Complex::new(
            parse_rational(s, path)?,
            BigRational::zero(),
        ))),
        Value::Array(pair) if pair.len() == 2 => match (&pair[0], &pair[1]) {
            (Value::Number(re), Value::Number(im)) => number_entry(&[re, im], path),
            (Value::String(re), Value::String(im)) => Ok(Entry::Exact(Complex::new(
                parse_rational(re, &format!("{path}[0]"))?,
                parse_rational(im, &format!("{path}[1]"))?,
            ))),
            _ => Err(Error::parse(
                path,
                "pair must be two numbers or two rational strings",
            )),
        },
        _ => Err(Error::parse(
            path,
            "expected a number, a rational string, or a [re, im] pair",
        )),
    }
}

/// One number, or a `[re, im]` pair of numbers.
fn number_entry(parts: &[&serde_json::Number], path: &str) -> Result<Entry> {
    let sub = |k: usize| {
        if parts.len() == 1 {
            path.to_string()
        } else {
            format!("{path}[{k}]")
        }
    };
    if parts.iter().all(|x| x.is_i64() || x.is_u64()) {
        let mut vals = parts
            .iter()
            .map(|x| BigRational::from_str(&x.to_string()).expect("integer literal"));
        let re = vals.next().expect("at least one part");
        let im = vals.next().unwrap_or_else(BigRational::zero);
        return Ok(Entry::Integer(Complex::new(re, im)));
    }
    let re = number(parts[0], &sub(0))?;
    let im = match parts.get(1) {
        Some(x) => number(x, &sub(1))?,
        None => 0.0,
    };
    Ok(Entry::Float(C64::new(re, im)))
}

fn number(x: &serde_json::Number, path: &str) -> Result<f64> {
    x.as_f64()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::parse(path, "number out of range"))
}

fn parse_rational(s: &str, path: &str) -> Result<BigRational> {
    let s = s.trim();
    let valid = !s.is_empty()
        && s.split('/').count() <= 2
        && s.split('/').all(|part| {
            let digits = part.strip_prefix('-').unwrap_or(part);
            !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
        });
    if !valid {
        return Err(Error::parse(path, format!("`{s}` is not a rational p/q")));
    }
    BigRational::from_str(s).map_err(|_| Error::parse(path, format!("`{s}` has a zero denominator")))
}

fn float_entry(v: &C64) -> Value {
    if v.im == 0.0 {
        json!(v.re)
    } else {
        json!([v.re, v.im])
    }
}

fn exact_entry(v: &ExactComplex) -> Value {
    if v.im.is_zero() {
        json!(v.re.to_string())
    } else {
        json!([v.re.to_string(), v.im.to_string()])
    }
}

fn algebra_json<S: crate::Scalar>(m: &Matrix<S>, entry: impl Fn(&S) -> Value) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| Value::Array(m.row(i).iter().map(&entry).collect()))
        .collect();
    json!({ "n": m.rows(), "matrix": rows })
}

pub fn complex_pair(c: &C64) -> [f64; 2] {
    [c.re, c.im]
}

pub fn complex_vec(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(complex_pair).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub point: Vec<[f64; 2]>,
    pub residual: f64,
    pub singular: bool,
    pub support: Vec<usize>,
    pub real: bool,
    pub multiplicity_hint: usize,
}

impl From<&Solution> for SolutionRecord {
    fn from(s: &Solution) -> Self {
        Self {
            point: complex_vec(&s.point),
            residual: s.residual,
            singular: s.singular,
            support: s.support.clone(),
            real: s.is_real,
            multiplicity_hint: s.multiplicity_hint,
        }
    }
}

impl SolutionRecord {
    pub fn point(&self) -> Vec<C64> {
        self.point.iter().map(|[re, im]| C64::new(*re, *im)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemRecord {
    pub quadratic: Vec<Vec<[f64; 2]>>,
    pub linear: Vec<Vec<[f64; 2]>>,
}

pub const SOLVE_SCHEMA: &str = "evoalg-solve-v1";

/// Serialised [`SolveOutcome`]. Carries the system's normal form so that
/// residuals can be re-checked from the file alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub schema: String,
    pub kind: SystemKind,
    pub n: usize,
    pub system: SystemRecord,
    pub bezout_count: usize,
    pub diverged_paths: usize,
    pub failed_paths: usize,
    pub retracked_paths: usize,
    pub solutions: Vec<SolutionRecord>,
}

impl From<&SolveOutcome> for SolveRecord {
    fn from(o: &SolveOutcome) -> Self {
        let rows = |m: &Matrix<C64>| (0..m.rows()).map(|i| complex_vec(m.row(i))).collect();
        Self {
            schema: SOLVE_SCHEMA.into(),
            kind: o.kind(),
            n: o.system.dim(),
            system: SystemRecord {
                quadratic: rows(o.system.quadratic()),
                linear: rows(o.system.linear()),
            },
            bezout_count: o.bezout_count,
            diverged_paths: o.diverged_paths,
            failed_paths: o.failed_paths,
            retracked_paths: o.retracked_paths,
            solutions: o.solutions.iter().map(SolutionRecord::from).collect(),
        }
    }
}

impl SolveRecord {
    pub fn system(&self) -> Result<QuadraticSystem<C64>> {
        let matrix = |rows: &[Vec<[f64; 2]>]| {
            Matrix::from_rows(
                rows.iter()
                    .map(|r| r.iter().map(|[re, im]| C64::new(*re, *im)).collect())
                    .collect(),
            )
        };
        QuadraticSystem::from_parts(
            self.kind,
            matrix(&self.system.quadratic)?,
            matrix(&self.system.linear)?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    #[test]
    fn parses_float_and_complex_entries() {
        let a = AnyAlgebra::from_json_str(r#"{"n": 2, "matrix": [[1, [0.5, -2]], [0, 3.25]]}"#).unwrap();
        let AnyAlgebra::Float(alg) = a else { panic!() };
        assert_eq!(alg.structure()[(0, 1)], C64::new(0.5, -2.0));
        assert_eq!(alg.structure()[(1, 1)], C64::new(3.25, 0.0));
    }

    #[test]
    fn parses_exact_entries() {
        let a =
            AnyAlgebra::from_json_str(r#"{"n": 2, "matrix": [["1/2", "0"], [["-3/4", "1"], "5"]]}"#).unwrap();
        let AnyAlgebra::Exact(alg) = a else { panic!() };
        assert_eq!(alg.structure()[(0, 0)], rational(1, 2));
        assert_eq!(alg.structure()[(1, 0)].im, BigRational::from_integer(1.into()));
    }

    #[test]
    fn errors_name_the_json_path() {
        let err = AnyAlgebra::from_json_str(r#"{"n": 2, "matrix": [[1, 2], [3, "x"]]}"#).unwrap_err();
        let Error::Parse { path, .. } = err else { panic!() };
        assert_eq!(path, "$.matrix[1][1]");

        let err = AnyAlgebra::from_json_str(r#"{"n": 2, "matrix": [["1/0", "0"], ["0", "0"]]}"#).unwrap_err();
        assert!(matches!(err, Error::Parse { ref path, .. } if path == "$.matrix[0][0]"));

        let err = AnyAlgebra::from_json_str(r#"{"n": 3, "matrix": [[1]]}"#).unwrap_err();
        assert!(matches!(err, Error::Parse { ref path, .. } if path == "$.matrix"));

        let err = AnyAlgebra::from_json_str(r#"{"matrix": [[1]]}"#).unwrap_err();
        assert!(matches!(err, Error::Parse { ref path, .. } if path == "$.n"));
    }

    #[test]
    fn rejects_mixed_backends() {
        let err = AnyAlgebra::from_json_str(r#"{"n": 1, "matrix": [[[1, "2"]]]}"#).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        let err = AnyAlgebra::from_json_str(r#"{"n": 2, "matrix": [["1", 0.5], ["0", "1"]]}"#).unwrap_err();
        assert!(matches!(err, Error::Parse { ref path, .. } if path == "$.matrix[0][1]"));
    }

    #[test]
    fn integer_literals_are_exact() {
        let a = AnyAlgebra::from_json_str(r#"{"n": 2, "matrix": [[1, 0], [[1, -2], "1/3"]]}"#).unwrap();
        let AnyAlgebra::Exact(alg) = a else { panic!() };
        assert_eq!(alg.structure()[(1, 0)].im, BigRational::from_integer((-2).into()));
        let b = AnyAlgebra::from_json_str(r#"{"n": 2, "matrix": [[1.0, 0], [1, 0]]}"#).unwrap();
        assert!(!b.is_exact());
        let text = serde_json::to_string(&b.to_json()).unwrap();
        assert_eq!(AnyAlgebra::from_json_str(&text).unwrap(), b);
    }

    #[test]
    fn exact_round_trip_is_textually_stable() {
        let src = r#"{"matrix":[["1/2","-7/3"],[["0","5/9"],"8"]],"n":2}"#;
        let a = AnyAlgebra::from_json_str(src).unwrap();
        let out = serde_json::to_string(&a.to_json()).unwrap();
        assert_eq!(out, src);
        assert_eq!(AnyAlgebra::from_json_str(&out).unwrap(), a);
    }
}
