//! The evolution-algebra data model.
//!
//! Row `i` of the structure matrix holds the coordinates of `e_i²`; distinct
//! basis vectors multiply to zero, so `u·v = Σ_i u_i v_i e_i²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{max_modulus, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionAlgebra<S> {
    structure: Matrix<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element<S> {
    pub coords: Vec<S>,
}

/// A subspace of `S^n` stored by its reduced row echelon basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<S> {
    ambient_dim: usize,
    basis: Vec<Vec<S>>,
}

/// Representatives of the complete evolution algebras.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassificationKind {
    /// `{e_1² = e_1}`.
    K1,
    /// `Ẽ_s ⊕ ℂ^{n−s}`.
    K2,
    /// `{e_1² = e_1} ⊕ ℂ^{n−1}`.
    K3,
    /// `{e_1² = e_1} ⊕ Ẽ_s ⊕ ℂ^{n−s−1}`.
    K4,
}

impl ClassificationKind {
    pub const ALL: [ClassificationKind; 4] = [Self::K1, Self::K2, Self::K3, Self::K4];

    /// Whether `(n, s)` is a valid parameter pair. `s` is ignored by K1/K3.
    pub fn accepts(self, n: usize, s: usize) -> bool {
        match self {
            Self::K1 => n == 1,
            Self::K2 => n >= 1 && (1..=n).contains(&s),
            Self::K3 => n >= 1,
            Self::K4 => n >= 2 && (1..n).contains(&s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivedSeries<S> {
    pub solvable: bool,
    /// `E^(1), E^(2), …` up to the zero subspace or the first repeated term.
    pub series: Vec<Subspace<S>>,
    /// First `k` with `E^(k) = 0`.
    pub index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerChain<S> {
    pub right_nilpotent: bool,
    /// `E^<1>, E^<2>, …` with `E^<k+1> = E^<k>·E`.
    pub chain: Vec<Subspace<S>>,
    pub index: Option<usize>,
}

impl<S: Scalar> EvolutionAlgebra<S> {
    pub fn new(structure: Matrix<S>) -> Result<Self> {
        if !structure.is_square() {
            return Err(Error::DimensionMismatch {
                expected: structure.rows(),
                found: structure.cols(),
            });
        }
        if structure.rows() == 0 {
            return Err(Error::BadParameters("dimension must be at least 1".into()));
        }
        Ok(Self { structure })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::new(Matrix::from_i64_rows(rows)?)
    }

    /// The zero (abelian) algebra `ℂ^n`.
    pub fn zero(n: usize) -> Self {
        Self {
            structure: Matrix::zeros(n, n),
        }
    }

    /// Chain algebra `e_1² = e_2, …, e_{s−1}² = e_s, e_s² = 0`.
    pub fn chain(s: usize) -> Self {
        let mut m = Matrix::zeros(s, s);
        for i in 0..s.saturating_sub(1) {
            m[(i, i + 1)] = S::one();
        }
        Self { structure: m }
    }

    pub fn dim(&self) -> usize {
        self.structure.rows()
    }

    pub fn structure(&self) -> &Matrix<S> {
        &self.structure
    }

    /// `e_i²` as an element.
    pub fn square_of_basis(&self, i: usize) -> Element<S> {
        Element::new(self.structure.row(i).to_vec())
    }

    pub fn to_float(&self) -> EvolutionAlgebra<num_complex::Complex<f64>> {
        EvolutionAlgebra {
            structure: self.structure.to_float(),
        }
    }

    pub fn multiply(&self, u: &Element<S>, v: &Element<S>) -> Result<Element<S>> {
        let n = self.dim();
        for w in [u, v] {
            if w.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: w.dim(),
                });
            }
        }
        let mut out = vec![S::zero(); n];
        for i in 0..n {
            let w = u.coords[i].clone() * v.coords[i].clone();
            if w.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.structure.row(i)) {
                *o = o.clone() + w.clone() * a.clone();
            }
        }
        Ok(Element::new(out))
    }

    pub fn square(&self, u: &Element<S>) -> Result<Element<S>> {
        self.multiply(u, u)
    }

    /// `V·W`, the span of all products of basis vectors.
    pub fn subspace_product(&self, v: &Subspace<S>, w: &Subspace<S>, tol: f64) -> Result<Subspace<S>> {
        let n = self.dim();
        for s in [v, w] {
            if s.ambient_dim != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: s.ambient_dim,
                });
            }
        }
        let mut products = Vec::with_capacity(v.dim() * w.dim());
        for a in &v.basis {
            for b in &w.basis {
                let p = self.multiply(&Element::new(a.clone()), &Element::new(b.clone()))?;
                products.push(p.coords);
            }
        }
        Ok(Subspace::span(products, n, tol))
    }

    /// `E² = E·E`.
    pub fn square_subspace(&self, tol: f64) -> Subspace<S> {
        let e = Subspace::whole(self.dim());
        self.subspace_product(&e, &e, tol).expect("matching dimensions")
    }

    pub fn solvability(&self) -> DerivedSeries<S> {
        self.solvability_with_tol(S::default_tol())
    }

    pub fn solvability_with_tol(&self, tol: f64) -> DerivedSeries<S> {
        let (series, index) = self.descend(|alg, term| {
            alg.subspace_product(term, term, tol)
                .expect("matching dimensions")
        });
        DerivedSeries {
            solvable: index.is_some(),
            series,
            index,
        }
    }

    pub fn nilpotency(&self) -> PowerChain<S> {
        self.nilpotency_with_tol(S::default_tol())
    }

    pub fn nilpotency_with_tol(&self, tol: f64) -> PowerChain<S> {
        let whole = Subspace::whole(self.dim());
        let (chain, index) = self.descend(|alg, term| {
            alg.subspace_product(term, &whole, tol)
                .expect("matching dimensions")
        });
        PowerChain {
            right_nilpotent: index.is_some(),
            chain,
            index,
        }
    }

    // Both chains are weakly decreasing (each term contains the next), so a
    // repeated dimension means the chain has stabilised.
    fn descend(
        &self,
        next: impl Fn(&Self, &Subspace<S>) -> Subspace<S>,
    ) -> (Vec<Subspace<S>>, Option<usize>) {
        let mut terms = vec![Subspace::whole(self.dim())];
        loop {
            let last = terms.last().expect("non-empty");
            if last.is_zero() {
                let k = terms.len();
                return (terms, Some(k));
            }
            let following = next(self, last);
            if following.dim() == last.dim() {
                return (terms, None);
            }
            terms.push(following);
        }
    }

    pub fn is_regular(&self, tol: f64) -> bool {
        self.structure
            .determinant_info()
            .expect("square structure matrix")
            .is_nonzero(tol)
    }

    /// Regular and with a strongly connected digraph (`i → j` iff `a_ij ≠ 0`).
    pub fn is_simple_candidate(&self, tol: f64) -> bool {
        if !self.is_regular(tol) {
            return false;
        }
        let n = self.dim();
        let threshold = tol * self.structure.max_modulus();
        let edge = |i: usize, j: usize| !self.structure[(i, j)].is_negligible(threshold);
        let reaches_all = |forward: bool| {
            let mut seen = vec![false; n];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(i) = stack.pop() {
                for (j, s) in seen.iter_mut().enumerate() {
                    let e = if forward { edge(i, j) } else { edge(j, i) };
                    if e && !*s {
                        *s = true;
                        stack.push(j);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reaches_all(true) && reaches_all(false)
    }

    /// Builds one of the complete-algebra representatives, realising `Ẽ_s` as
    /// the chain algebra of dimension `s`.
    pub fn classification(kind: ClassificationKind, n: usize, s: usize) -> Result<Self> {
        if !kind.accepts(n, s) {
            return Err(Error::BadParameters(format!(
                "{kind:?} does not accept n = {n}, s = {s}"
            )));
        }
        let one = || Matrix::identity(1);
        let blocks = match kind {
            ClassificationKind::K1 => vec![one()],
            ClassificationKind::K2 => vec![Self::chain(s).structure, Matrix::zeros(n - s, n - s)],
            ClassificationKind::K3 => vec![one(), Matrix::zeros(n - 1, n - 1)],
            ClassificationKind::K4 => vec![
                one(),
                Self::chain(s).structure,
                Matrix::zeros(n - s - 1, n - s - 1),
            ],
        };
        Ok(Self {
            structure: Matrix::block_diagonal(&blocks),
        })
    }
}

impl<S: Scalar> Element<S> {
    pub fn new(coords: Vec<S>) -> Self {
        Self { coords }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(vec![S::zero(); n])
    }

    /// The basis vector `e_i` (0-based).
    pub fn basis(n: usize, i: usize) -> Self {
        let mut e = Self::zero(n);
        e.coords[i] = S::one();
        e
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn max_modulus(&self) -> f64 {
        max_modulus(&self.coords)
    }

    /// Indices of coordinates that are not negligible at `tol` (absolute).
    pub fn support(&self, tol: f64) -> Vec<usize> {
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_negligible(tol))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        )
    }

    pub fn scale(&self, k: &S) -> Self {
        Self::new(self.coords.iter().map(|c| c.clone() * k.clone()).collect())
    }
}

impl<S: Scalar> Subspace<S> {
    /// Span of `vectors` in `S^ambient_dim`, row-reduced at relative `tol`.
    pub fn span(vectors: Vec<Vec<S>>, ambient_dim: usize, tol: f64) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient_dim);
        }
        let m = Matrix::from_rows(vectors).expect("vectors of equal length");
        debug_assert_eq!(m.cols(), ambient_dim);
        Self {
            ambient_dim,
            basis: m.rank(tol).basis,
        }
    }

    pub fn whole(n: usize) -> Self {
        Self {
            ambient_dim: n,
            basis: Matrix::<S>::identity(n).to_rows(),
        }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            ambient_dim: n,
            basis: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis(&self) -> &[Vec<S>] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Self, tol: f64) -> bool {
        if other.is_zero() {
            return true;
        }
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Self::span(rows, self.ambient_dim, tol).dim() == self.dim()
    }

    pub fn contains_vector(&self, v: &[S], tol: f64) -> bool {
        self.contains(&Self::span(vec![v.to_vec()], self.ambient_dim, tol), tol)
    }

    pub fn same_as(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim() && self.contains(other, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{ExactAlgebra, ExactComplex, FloatAlgebra, C64};

    fn e1_alg() -> ExactAlgebra {
        EvolutionAlgebra::from_i64_rows(&[&[1, 0], &[0, 0]]).unwrap()
    }

    fn e2_alg() -> ExactAlgebra {
        EvolutionAlgebra::from_i64_rows(&[&[1, 0], &[1, 0]]).unwrap()
    }

    fn dims<S: Scalar>(s: &[Subspace<S>]) -> Vec<usize> {
        s.iter().map(Subspace::dim).collect()
    }

    #[test]
    fn distinct_basis_vectors_multiply_to_zero() {
        let alg = FloatAlgebra::from_i64_rows(&[&[1, 2], &[3, 4]]).unwrap();
        let p = alg
            .multiply(&Element::basis(2, 0), &Element::basis(2, 1))
            .unwrap();
        assert_eq!(p, Element::zero(2));
    }

    #[test]
    fn e1_squares_to_itself_in_e1() {
        let alg = e1_alg();
        let e1 = Element::basis(2, 0);
        assert_eq!(alg.square(&e1).unwrap(), e1);
    }

    #[test]
    fn identity_structure_squares_decouple() {
        let alg = ExactAlgebra::new(Matrix::identity(2)).unwrap();
        let u = Element::new(vec![ExactComplex::from_i64(1), ExactComplex::from_i64(1)]);
        assert_eq!(alg.square(&u).unwrap(), u);
    }

    #[test]
    fn multiply_checks_dimensions() {
        let alg = e1_alg();
        assert!(matches!(
            alg.multiply(&Element::basis(3, 0), &Element::basis(2, 0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn subspace_product_examples() {
        let alg = e1_alg();
        assert_eq!(
            alg.square_subspace(0.0),
            Subspace::span(vec![Element::basis(2, 0).coords], 2, 0.0)
        );
        let e2 = Subspace::span(vec![Element::<ExactComplex>::basis(2, 1).coords], 2, 0.0);
        assert!(alg.subspace_product(&e2, &e2, 0.0).unwrap().is_zero());
        let id = ExactAlgebra::new(Matrix::identity(4)).unwrap();
        assert_eq!(id.square_subspace(0.0), Subspace::whole(4));
        assert!(matches!(
            id.subspace_product(&Subspace::whole(3), &Subspace::whole(4), 0.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn derived_series_examples() {
        let chain = ExactAlgebra::chain(2);
        let d = chain.solvability();
        assert!(d.solvable);
        assert_eq!(dims(&d.series), vec![2, 1, 0]);
        assert_eq!(d.index, Some(3));

        let d = e1_alg().solvability();
        assert!(!d.solvable);
        assert_eq!(d.index, None);
        assert_eq!(dims(&d.series), vec![2, 1]);
        assert_eq!(
            d.series[1],
            Subspace::span(vec![Element::basis(2, 0).coords], 2, 0.0)
        );

        let d = ExactAlgebra::new(Matrix::identity(3)).unwrap().solvability();
        assert!(!d.solvable);
        assert_eq!(dims(&d.series), vec![3]);
    }

    #[test]
    fn power_chain_examples() {
        let p = ExactAlgebra::chain(3).nilpotency();
        assert!(p.right_nilpotent);
        assert_eq!(dims(&p.chain), vec![3, 2, 1, 0]);
        assert_eq!(p.index, Some(4));

        assert!(
            !ExactAlgebra::new(Matrix::identity(3))
                .unwrap()
                .nilpotency()
                .right_nilpotent
        );

        let z = ExactAlgebra::zero(3).nilpotency();
        assert!(z.right_nilpotent);
        assert_eq!(z.index, Some(2));
    }

    #[test]
    fn float_series_matches_exact_on_chain() {
        let f = FloatAlgebra::chain(4).nilpotency();
        assert_eq!(f.index, Some(5));
        assert_eq!(FloatAlgebra::chain(4).solvability().index, Some(5));
    }

    #[test]
    fn regularity_examples() {
        assert!(ExactAlgebra::new(Matrix::identity(3)).unwrap().is_regular(0.0));
        assert!(!e2_alg().is_regular(0.0));
        assert!(!e2_alg().to_float().is_regular(1e-10));
        let one_real = ExactAlgebra::from_i64_rows(&[&[1, -2, -3], &[0, 0, 1], &[0, 1, 1]]).unwrap();
        assert!(one_real.is_regular(0.0));
        assert!(one_real.to_float().is_regular(1e-10));
    }

    #[test]
    fn simplicity_examples() {
        assert!(!FloatAlgebra::new(Matrix::identity(2))
            .unwrap()
            .is_simple_candidate(1e-10));
        assert!(FloatAlgebra::from_i64_rows(&[&[0, 1], &[1, 0]])
            .unwrap()
            .is_simple_candidate(1e-10));
        assert!(!e2_alg().is_simple_candidate(0.0));
        // Strongly connected but singular.
        assert!(!FloatAlgebra::from_i64_rows(&[&[1, 1], &[1, 1]])
            .unwrap()
            .is_simple_candidate(1e-10));
    }

    #[test]
    fn classification_examples() {
        let k3 = ExactAlgebra::classification(ClassificationKind::K3, 3, 0).unwrap();
        assert_eq!(
            k3,
            ExactAlgebra::from_i64_rows(&[&[1, 0, 0], &[0, 0, 0], &[0, 0, 0]]).unwrap()
        );
        let k2 = ExactAlgebra::classification(ClassificationKind::K2, 2, 2).unwrap();
        assert_eq!(k2, ExactAlgebra::from_i64_rows(&[&[0, 1], &[0, 0]]).unwrap());
        let k1 = ExactAlgebra::classification(ClassificationKind::K1, 1, 0).unwrap();
        assert_eq!(k1, ExactAlgebra::from_i64_rows(&[&[1]]).unwrap());
        let k4 = ExactAlgebra::classification(ClassificationKind::K4, 4, 2).unwrap();
        assert_eq!(
            k4,
            ExactAlgebra::from_i64_rows(&[&[1, 0, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 0], &[0, 0, 0, 0]])
                .unwrap()
        );
    }

    #[test]
    fn classification_rejects_bad_parameters() {
        for (kind, n, s) in [
            (ClassificationKind::K1, 2, 0),
            (ClassificationKind::K2, 2, 3),
            (ClassificationKind::K2, 2, 0),
            (ClassificationKind::K4, 3, 3),
            (ClassificationKind::K3, 0, 0),
        ] {
            assert!(matches!(
                ExactAlgebra::classification(kind, n, s),
                Err(Error::BadParameters(_))
            ));
        }
    }

    #[test]
    fn chain_attains_index_s_plus_one() {
        for s in 1..=6 {
            assert_eq!(ExactAlgebra::chain(s).nilpotency().index, Some(s + 1));
        }
    }

    #[test]
    fn new_rejects_empty_and_rectangular() {
        assert!(EvolutionAlgebra::<C64>::new(Matrix::zeros(0, 0)).is_err());
        assert!(EvolutionAlgebra::<C64>::new(Matrix::zeros(2, 3)).is_err());
    }
}
