//! Lie algebras given by exact structure constants.
//!
//! Basis indices are 0-based throughout the library; the command-line
//! reports translate to 1-based indices.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{axpy, is_zero_vector, unit_vector, Matrix, Subspace, Vector};
use crate::scalar::Rational;

/// Finite-dimensional algebra with bracket `[X_i, X_j] = sum_k c^k_ij X_k`.
///
/// Only the constants with `i < j` are independent; the full antisymmetric
/// table is materialized at construction so `[X_j, X_i]` reads back the
/// negated vector. The value is immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    // table[i * dim + j] = [X_i, X_j]
    table: Vec<Vector>,
}

/// A basis triple whose Jacobi sum does not vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub defect: Vector,
}

/// Terms `g^0 = g, g^{m+1} = [g, g^m]` of the lower central series.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralSeries {
    pub terms: Vec<Subspace>,
    /// First `m` with `g^m = 0`; `None` when the series stabilizes above zero.
    pub step: Option<usize>,
}

impl CentralSeries {
    pub fn dims(&self) -> Vec<usize> {
        self.terms.iter().map(Subspace::dim).collect()
    }

    pub fn is_nilpotent(&self) -> bool {
        self.step.is_some()
    }
}

impl LieAlgebra {
    pub fn abelian(dim: usize) -> Self {
        Self {
            dim,
            table: vec![vec![Rational::zero(); dim]; dim * dim],
        }
    }

    /// Builds from `((i, j, k), c)` entries meaning `c^k_ij += c`, `i < j`.
    pub fn from_structure_constants<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize, usize), Rational)>,
    {
        let mut acc: BTreeMap<(usize, usize, usize), Rational> = BTreeMap::new();
        for ((i, j, k), c) in entries {
            for idx in [i, j, k] {
                if idx >= dim {
                    return Err(Error::IndexOutOfRange { index: idx, dim });
                }
            }
            if i >= j {
                return Err(Error::InvalidBracketKey { i, j });
            }
            *acc.entry((i, j, k)).or_insert_with(Rational::zero) += c;
        }
        let mut alg = Self::abelian(dim);
        for ((i, j, k), c) in acc {
            alg.table[i * dim + j][k] = c.clone();
            alg.table[j * dim + i][k] = -c;
        }
        Ok(alg)
    }

    /// Builds from a bracket on basis vectors; `f(i, j)` is consulted for
    /// `i < j` only.
    pub fn from_basis_brackets(
        dim: usize,
        mut f: impl FnMut(usize, usize) -> Vector,
    ) -> Result<Self> {
        let mut alg = Self::abelian(dim);
        for i in 0..dim {
            for j in i + 1..dim {
                let v = f(i, j);
                if v.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: v.len(),
                    });
                }
                alg.table[j * dim + i] = v.iter().map(|x| -x.clone()).collect();
                alg.table[i * dim + j] = v;
            }
        }
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `c^k_ij`, antisymmetric in `(i, j)`.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.table[i * self.dim + j][k]
    }

    /// Nonzero constants with `i < j`, in lexicographic order.
    pub fn nonzero_constants(&self) -> Vec<((usize, usize, usize), Rational)> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                for (k, c) in self.basis_bracket(i, j).iter().enumerate() {
                    if !c.is_zero() {
                        out.push(((i, j, k), c.clone()));
                    }
                }
            }
        }
        out
    }

    pub fn basis_bracket(&self, i: usize, j: usize) -> &Vector {
        &self.table[i * self.dim + j]
    }

    pub fn is_abelian(&self) -> bool {
        self.table.iter().all(|v| is_zero_vector(v))
    }

    fn check_len(&self, v: &[Rational]) -> Result<()> {
        if v.len() == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            })
        }
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.dim {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                dim: self.dim,
            })
        }
    }

    /// `[x, y]` for coordinate vectors in the declared basis.
    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Result<Vector> {
        self.check_len(x)?;
        self.check_len(y)?;
        let n = self.dim;
        let mut out = vec![Rational::zero(); n];
        for i in 0..n {
            if x[i].is_zero() && y[i].is_zero() {
                continue;
            }
            for j in i + 1..n {
                let coef = &x[i] * &y[j] - &x[j] * &y[i];
                if coef.is_zero() {
                    continue;
                }
                let b = self.basis_bracket(i, j);
                if !is_zero_vector(b) {
                    out = axpy(&out, &coef, b);
                }
            }
        }
        Ok(out)
    }

    /// Floating-point bracket with the same structure constants.
    pub fn bracket_f64(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n];
        for i in 0..n {
            for j in i + 1..n {
                let coef = x[i] * y[j] - x[j] * y[i];
                if coef == 0.0 {
                    continue;
                }
                for (k, c) in self.basis_bracket(i, j).iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += coef * crate::scalar::Scalar::to_f64(c);
                    }
                }
            }
        }
        out
    }

    /// Matrix of `x -> [X_i, x]`; column `j` holds `[X_i, X_j]`.
    pub fn ad_matrix(&self, i: usize) -> Result<Matrix> {
        self.check_index(i)?;
        Matrix::from_columns(
            &(0..self.dim)
                .map(|j| self.basis_bracket(i, j).clone())
                .collect::<Vec<_>>(),
        )
    }

    /// Matrix of `ad_x` for an arbitrary vector.
    pub fn ad_of(&self, x: &[Rational]) -> Result<Matrix> {
        self.check_len(x)?;
        let cols = (0..self.dim)
            .map(|j| self.bracket(x, &unit_vector(self.dim, j)))
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_columns(&cols)
    }

    /// Every triple `i < j < k` with nonzero
    /// `[X_i,[X_j,X_k]] + [X_j,[X_k,X_i]] + [X_k,[X_i,X_j]]`.
    pub fn jacobi_defect(&self) -> Vec<JacobiViolation> {
        let n = self.dim;
        let e = |i| unit_vector::<Rational>(n, i);
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let t1 = self.bracket(&e(i), self.basis_bracket(j, k)).expect("dims");
                    let t2 = self.bracket(&e(j), self.basis_bracket(k, i)).expect("dims");
                    let t3 = self.bracket(&e(k), self.basis_bracket(i, j)).expect("dims");
                    let defect: Vector = t1
                        .iter()
                        .zip(&t2)
                        .zip(&t3)
                        .map(|((a, b), c)| a + b + c)
                        .collect();
                    if !is_zero_vector(&defect) {
                        out.push(JacobiViolation { i, j, k, defect });
                    }
                }
            }
        }
        out
    }

    pub fn is_lie_algebra(&self) -> bool {
        self.jacobi_defect().is_empty()
    }

    pub(crate) fn require_lie(&self) -> Result<()> {
        let defects = self.jacobi_defect();
        if defects.is_empty() {
            Ok(())
        } else {
            Err(Error::NotALieAlgebra(defects.len()))
        }
    }

    /// `trace(ad_{X_i}) = 0` for every basis vector.
    pub fn is_unimodular(&self) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim)
                .fold(Rational::zero(), |acc, j| {
                    acc + &self.basis_bracket(i, j)[j]
                })
                .is_zero()
        })
    }

    /// `B_ij = trace(ad_{X_i} ad_{X_j})`.
    pub fn killing_form(&self) -> Matrix {
        let ads: Vec<Matrix> = (0..self.dim)
            .map(|i| self.ad_matrix(i).expect("index in range"))
            .collect();
        let mut b = Matrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in i..self.dim {
                let t = ads[i].mul(&ads[j]).expect("square").trace();
                b[(i, j)] = t.clone();
                b[(j, i)] = t;
            }
        }
        b
    }

    /// `[A, B]` as a subspace.
    pub fn bracket_subspaces(&self, a: &Subspace, b: &Subspace) -> Result<Subspace> {
        let mut vs = Vec::new();
        for x in a.basis() {
            for y in b.basis() {
                let v = self.bracket(x, y)?;
                if !is_zero_vector(&v) {
                    vs.push(v);
                }
            }
        }
        Subspace::span(self.dim, vs)
    }

    pub fn lower_central_series(&self) -> CentralSeries {
        let full = Subspace::full(self.dim);
        let mut terms = vec![full.clone()];
        loop {
            let last = terms.last().expect("nonempty");
            if last.is_zero() {
                let step = terms.len() - 1;
                return CentralSeries {
                    terms,
                    step: Some(step),
                };
            }
            let next = self.bracket_subspaces(&full, last).expect("dims");
            if next == *last {
                return CentralSeries { terms, step: None };
            }
            terms.push(next);
        }
    }

    pub fn nilpotency_step(&self) -> Option<usize> {
        self.lower_central_series().step
    }

    pub fn derived_subalgebra(&self) -> Subspace {
        let full = Subspace::full(self.dim);
        self.bracket_subspaces(&full, &full).expect("dims")
    }

    /// `{x : [x, s] = 0 for all s in S}`.
    pub fn centralizer(&self, s: &Subspace) -> Result<Subspace> {
        if s.ambient() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: s.ambient(),
            });
        }
        // Rows: for each basis vector w of S and output coordinate k, the
        // linear functional x -> [x, w]_k.
        let n = self.dim;
        let mut rows = Vec::new();
        for w in s.basis() {
            let adw = self.ad_of(w)?; // column j = [w, X_j]
            for k in 0..n {
                rows.push((0..n).map(|j| -adw[(k, j)].clone()).collect::<Vector>());
            }
        }
        if rows.is_empty() {
            return Ok(Subspace::full(n));
        }
        Subspace::span(n, Matrix::from_rows(rows)?.nullspace())
    }

    pub fn center(&self) -> Subspace {
        self.centralizer(&Subspace::full(self.dim)).expect("dims")
    }

    pub fn is_subalgebra(&self, s: &Subspace) -> Result<bool> {
        Ok(self.bracket_subspaces(s, s)?.is_subspace_of(s))
    }

    /// `[g, S] ⊆ S`.
    pub fn is_ideal(&self, s: &Subspace) -> Result<bool> {
        if s.ambient() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: s.ambient(),
            });
        }
        Ok(self
            .bracket_subspaces(&Subspace::full(self.dim), s)?
            .is_subspace_of(s))
    }

    /// Direct sum with `other`, whose basis follows this one.
    pub fn direct_sum(&self, other: &LieAlgebra) -> LieAlgebra {
        let (p, q) = (self.dim, other.dim);
        let n = p + q;
        let entries = self.nonzero_constants().into_iter().chain(
            other
                .nonzero_constants()
                .into_iter()
                .map(|((i, j, k), c)| ((i + p, j + p, k + p), c)),
        );
        LieAlgebra::from_structure_constants(n, entries).expect("indices in range")
    }

    /// Structure constants in the basis `Y_a = sum_i T_ia X_i` (columns of
    /// `T`). The result is isomorphic to `self` via `T`.
    pub fn change_of_basis(&self, t: &Matrix) -> Result<LieAlgebra> {
        if t.rows() != self.dim || t.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: t.rows().max(t.cols()),
            });
        }
        let inv = t.inverse()?;
        let cols: Vec<Vector> = (0..self.dim).map(|a| t.column(a)).collect();
        let mut err = None;
        let alg = LieAlgebra::from_basis_brackets(self.dim, |a, b| {
            match self
                .bracket(&cols[a], &cols[b])
                .and_then(|v| inv.mul_vec(&v))
            {
                Ok(v) => v,
                Err(e) => {
                    err = Some(e);
                    vec![Rational::zero(); self.dim]
                }
            }
        })?;
        match err {
            Some(e) => Err(e),
            None => Ok(alg),
        }
    }

    /// Restriction to the subalgebra spanned by the listed basis vectors,
    /// re-indexed in list order.
    pub fn restrict(&self, indices: &[usize]) -> Result<LieAlgebra> {
        for &i in indices {
            self.check_index(i)?;
        }
        let m = indices.len();
        let mut entries = Vec::new();
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate().skip(a + 1) {
                for (k, c) in self.basis_bracket(i, j).iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let Some(pos) = indices.iter().position(|&x| x == k) else {
                        return Err(Error::WrongShape(format!(
                            "span of basis vectors {indices:?} is not a subalgebra"
                        )));
                    };
                    entries.push(((a, b, pos), c.clone()));
                }
            }
        }
        LieAlgebra::from_structure_constants(m, entries)
    }
}
