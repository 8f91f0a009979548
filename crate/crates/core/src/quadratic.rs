//! Square quadratic systems `F_i(x) = Σ_j Q_ij x_j² − Σ_j L_ij x_j`.
//!
//! All three systems attached to an evolution algebra share this normal form:
//!
//! | kind         | `Q`      | `L`           | zeros are                         |
//! |--------------|----------|---------------|-----------------------------------|
//! | `General`    | `I`      | `A`           | solutions of `x∘x = A x`          |
//! | `Subalgebra` | `I`      | `(Mᵗ)⁻¹`      | spanning vectors of 1-dim subalgebras |
//! | `Idempotent` | `Mᵗ`     | `I`           | idempotents `u² = u`              |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::EvolutionAlgebra;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    General,
    Subalgebra,
    Idempotent,
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemKind::General => "general",
            SystemKind::Subalgebra => "subalgebra",
            SystemKind::Idempotent => "idempotent",
        })
    }
}

impl FromStr for SystemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(SystemKind::General),
            "subalgebra" => Ok(SystemKind::Subalgebra),
            "idempotent" => Ok(SystemKind::Idempotent),
            other => Err(Error::BadParameters(format!("unknown system kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSystem<S> {
    kind: SystemKind,
    quadratic: Matrix<S>,
    linear: Matrix<S>,
}

impl<S: Scalar> QuadraticSystem<S> {
    /// Builds the system of the given kind. For `General` the matrix is `A`
    /// itself; for the other kinds it is the structure matrix `M`.
    pub fn build(kind: SystemKind, matrix: &Matrix<S>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                found: matrix.cols(),
            });
        }
        let n = matrix.rows();
        let (quadratic, linear) = match kind {
            SystemKind::General => (Matrix::identity(n), matrix.clone()),
            SystemKind::Subalgebra => (Matrix::identity(n), inverse(&matrix.transpose())?),
            SystemKind::Idempotent => (matrix.transpose(), Matrix::identity(n)),
        };
        Ok(Self {
            kind,
            quadratic,
            linear,
        })
    }

    pub fn for_algebra(kind: SystemKind, alg: &EvolutionAlgebra<S>) -> Result<Self> {
        Self::build(kind, alg.structure())
    }

    /// Raw normal form, for systems read back from reports.
    pub fn from_parts(kind: SystemKind, quadratic: Matrix<S>, linear: Matrix<S>) -> Result<Self> {
        let n = quadratic.rows();
        for m in [&quadratic, &linear] {
            if m.rows() != n || m.cols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.cols(),
                });
            }
        }
        Ok(Self {
            kind,
            quadratic,
            linear,
        })
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.quadratic.rows()
    }

    pub fn quadratic(&self) -> &Matrix<S> {
        &self.quadratic
    }

    pub fn linear(&self) -> &Matrix<S> {
        &self.linear
    }

    pub fn to_float(&self) -> QuadraticSystem<num_complex::Complex<f64>> {
        QuadraticSystem {
            kind: self.kind,
            quadratic: self.quadratic.to_float(),
            linear: self.linear.to_float(),
        }
    }

    fn check_len(&self, x: &[S]) -> Result<()> {
        if x.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            })
        }
    }

    pub fn evaluate(&self, x: &[S]) -> Result<Vec<S>> {
        self.check_len(x)?;
        let squares: Vec<S> = x.iter().map(|v| v.clone() * v.clone()).collect();
        let q = self.quadratic.mul_vec(&squares)?;
        let l = self.linear.mul_vec(x)?;
        Ok(q.into_iter().zip(l).map(|(a, b)| a - b).collect())
    }

    /// `J_ij = 2 Q_ij x_j − L_ij`.
    pub fn jacobian(&self, x: &[S]) -> Result<Matrix<S>> {
        self.check_len(x)?;
        let n = self.dim();
        let two = S::from_i64(2);
        let mut j = Matrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                j[(r, c)] =
                    two.clone() * self.quadratic[(r, c)].clone() * x[c].clone() - self.linear[(r, c)].clone();
            }
        }
        Ok(j)
    }

    /// Max-norm of `F(x)`.
    pub fn residual(&self, x: &[S]) -> Result<f64> {
        Ok(crate::scalar::max_modulus(&self.evaluate(x)?))
    }
}

fn inverse<S: Scalar>(m: &Matrix<S>) -> Result<Matrix<S>> {
    let n = m.rows();
    let lu = m.lu(S::default_tol())?;
    let mut cols = Vec::with_capacity(n);
    for c in 0..n {
        let mut e = vec![S::zero(); n];
        e[c] = S::one();
        cols.push(lu.solve(&e)?);
    }
    Ok(Matrix::from_rows(cols)?.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{ExactComplex, ExactMatrix, FloatMatrix, C64};

    fn one_real() -> FloatMatrix {
        Matrix::from_i64_rows(&[&[1, -2, -3], &[0, 0, 1], &[0, 1, 1]]).unwrap()
    }

    fn ints<S: Scalar>(v: &[i64]) -> Vec<S> {
        v.iter().map(|&x| S::from_i64(x)).collect()
    }

    #[test]
    fn build_examples() {
        let g = QuadraticSystem::build(SystemKind::General, &FloatMatrix::identity(2)).unwrap();
        assert_eq!(g.quadratic(), &Matrix::identity(2));
        assert_eq!(g.linear(), &Matrix::identity(2));

        let e2 = ExactMatrix::from_i64_rows(&[&[1, 0], &[1, 0]]).unwrap();
        let idem = QuadraticSystem::build(SystemKind::Idempotent, &e2).unwrap();
        assert_eq!(
            idem.quadratic(),
            &ExactMatrix::from_i64_rows(&[&[1, 1], &[0, 0]]).unwrap()
        );
        assert_eq!(idem.linear(), &Matrix::identity(2));

        assert!(matches!(
            QuadraticSystem::build(SystemKind::Subalgebra, &e2),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn subalgebra_linear_part_is_inverse_transpose() {
        let m = ExactMatrix::from_i64_rows(&[&[1, -2, -3], &[0, 0, 1], &[0, 1, 1]]).unwrap();
        let sys = QuadraticSystem::build(SystemKind::Subalgebra, &m).unwrap();
        let prod = m.transpose().mul(sys.linear()).unwrap();
        assert_eq!(prod, Matrix::identity(3));
    }

    #[test]
    fn evaluate_examples() {
        let g = QuadraticSystem::build(SystemKind::General, &one_real()).unwrap();
        assert_eq!(g.evaluate(&ints(&[1, 0, 0])).unwrap(), ints::<C64>(&[0, 0, 0]));
        assert_eq!(g.evaluate(&ints(&[0, 0, 0])).unwrap(), ints::<C64>(&[0, 0, 0]));
        let id = QuadraticSystem::build(SystemKind::General, &FloatMatrix::identity(2)).unwrap();
        assert_eq!(id.evaluate(&ints(&[1, 1])).unwrap(), ints::<C64>(&[0, 0]));
        assert!(matches!(
            id.evaluate(&ints(&[1])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn jacobian_examples() {
        let g = QuadraticSystem::build(SystemKind::General, &one_real()).unwrap();
        let j0 = g.jacobian(&ints(&[0, 0, 0])).unwrap();
        assert_eq!(j0, one_real().scale(&C64::new(-1.0, 0.0)));

        let id = QuadraticSystem::build(SystemKind::General, &FloatMatrix::identity(2)).unwrap();
        assert_eq!(
            id.jacobian(&ints(&[1, 0])).unwrap(),
            FloatMatrix::from_i64_rows(&[&[1, 0], &[0, -1]]).unwrap()
        );

        // x1² + x2² − x1 and −x2: the (1,2) entry is ∂/∂x2 = 2·x2 = 0 at (1, 0).
        let e2 = ExactMatrix::from_i64_rows(&[&[1, 0], &[1, 0]]).unwrap();
        let idem = QuadraticSystem::build(SystemKind::Idempotent, &e2).unwrap();
        assert_eq!(
            idem.jacobian(&ints(&[1, 0])).unwrap(),
            ExactMatrix::from_i64_rows(&[&[1, 0], &[0, -1]]).unwrap()
        );
    }

    #[test]
    fn exact_and_float_evaluation_agree() {
        let m = ExactMatrix::from_i64_rows(&[&[2, -1], &[3, 5]]).unwrap();
        let x: Vec<ExactComplex> = vec![crate::scalar::rational(1, 3), crate::scalar::rational(-7, 2)];
        let exact = QuadraticSystem::build(SystemKind::Idempotent, &m)
            .unwrap()
            .evaluate(&x)
            .unwrap();
        let float = QuadraticSystem::build(SystemKind::Idempotent, &m.to_float())
            .unwrap()
            .evaluate(&x.iter().map(Scalar::to_c64).collect::<Vec<_>>())
            .unwrap();
        for (e, f) in exact.iter().zip(float) {
            assert!((e.to_c64() - f).norm() < 1e-12);
        }
    }

    #[test]
    fn kind_parses() {
        assert_eq!(
            "idempotent".parse::<SystemKind>().unwrap(),
            SystemKind::Idempotent
        );
        assert!("cubic".parse::<SystemKind>().is_err());
    }
}
