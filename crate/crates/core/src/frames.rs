//! Existence of orthonormal Milnor frames.
//!
//! In dimension 3 the frame comes from the eigenvectors of the operator `L`
//! with `[x, y] = L(x × y)`. For the 4-dimensional filiform algebra the
//! decision reduces to one coefficient of a flag-adapted frame, and for
//! `h3 ⊕ h3` the inner product of the two derived lines obstructs.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{Signed, Zero};

use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::geometry::{
    flag_adapted_basis, orthonormal_frame_f64, FrameConstants, InnerProduct, MetricLieAlgebra,
};
use crate::linalg::{Matrix, Subspace, Vector};
use crate::milnor::{build_cyclic, MilnorData};
use crate::scalar::{int, rational_sqrt, Rational, Scalar};

fn require_dim(m: &MetricLieAlgebra, n: usize) -> Result<()> {
    if m.dim() == n {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: n,
            found: m.dim(),
        })
    }
}

/// Euclidean cross product of coordinate vectors.
fn coordinate_cross(x: &[Rational], y: &[Rational]) -> Vector {
    vec![
        &x[1] * &y[2] - &x[2] * &y[1],
        &x[2] * &y[0] - &x[0] * &y[2],
        &x[0] * &y[1] - &x[1] * &y[0],
    ]
}

/// Metric cross product `x ∧ y = orientation · sqrt(scale_sq) · direction`.
///
/// Kept unexpanded so that orthogonality and the norm identity stay exact
/// even when `sqrt(det G)` is irrational.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossProduct {
    /// `G⁻¹ (x × y)` in declared coordinates.
    pub direction: Vector,
    /// `det G`.
    pub scale_sq: Rational,
    pub orientation: i8,
}

impl CrossProduct {
    /// `g(x ∧ y, x ∧ y)`.
    pub fn norm_sq(&self, metric: &InnerProduct) -> Rational {
        &self.scale_sq * metric.inner(&self.direction, &self.direction)
    }

    /// Coordinates when `det G` is a rational square.
    pub fn exact(&self) -> Option<Vector> {
        let s = rational_sqrt(&self.scale_sq)? * int(self.orientation.into());
        Some(self.direction.iter().map(|d| d * &s).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        let s = self.scale_sq.to_f64().sqrt() * f64::from(self.orientation);
        self.direction.iter().map(|d| d.to_f64() * s).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.direction.iter().all(Zero::is_zero)
    }
}

/// The unique vector `g`-orthogonal to `x` and `y` with norm
/// `sqrt(g(x,x) g(y,y) - g(x,y)²)` making `(x, y, x ∧ y)` oriented like the
/// declared basis (or opposite for `orientation = -1`).
pub fn cross_product(
    metric: &InnerProduct,
    x: &[Rational],
    y: &[Rational],
    orientation: i8,
) -> Result<CrossProduct> {
    if metric.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: metric.dim(),
        });
    }
    for v in [x, y] {
        if v.len() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                found: v.len(),
            });
        }
    }
    if orientation != 1 && orientation != -1 {
        return Err(Error::InvalidArgument(
            "orientation must be +1 or -1".into(),
        ));
    }
    let g = metric.gram();
    let direction = g.inverse()?.mul_vec(&coordinate_cross(x, y))?;
    Ok(CrossProduct {
        direction,
        scale_sq: g.determinant()?,
        orientation,
    })
}

/// `L = orientation · M G / sqrt(det G)` with `M (x × y) = [x, y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LOperator {
    /// `M G`, the operator up to the positive factor `1 / sqrt(det G)`.
    pub unscaled: Matrix,
    pub scale_sq: Rational,
    pub orientation: i8,
    /// `g(Lx, y) = g(x, Ly)` for all `x, y`, decided exactly.
    pub self_adjoint: bool,
}

impl LOperator {
    pub fn matrix_exact(&self) -> Option<Matrix> {
        let s = rational_sqrt(&self.scale_sq)?;
        Some(self.unscaled.scale(&(int(self.orientation.into()) / s)))
    }

    pub fn matrix_f64(&self) -> crate::linalg::Mat<f64> {
        let f = f64::from(self.orientation) / self.scale_sq.to_f64().sqrt();
        self.unscaled.to_f64().scale(&f)
    }
}

pub fn l_operator(m: &MetricLieAlgebra) -> Result<LOperator> {
    l_operator_oriented(m, 1)
}

pub fn l_operator_oriented(m: &MetricLieAlgebra, orientation: i8) -> Result<LOperator> {
    require_dim(m, 3)?;
    if orientation != 1 && orientation != -1 {
        return Err(Error::InvalidArgument(
            "orientation must be +1 or -1".into(),
        ));
    }
    let g = m.algebra();
    let cols = [
        g.basis_bracket(1, 2).clone(),
        g.basis_bracket(2, 0).clone(),
        g.basis_bracket(0, 1).clone(),
    ];
    let bracket_map = Matrix::from_columns(&cols)?;
    let gram = m.metric().gram();
    let unscaled = bracket_map.mul(gram)?;
    let self_adjoint = gram.mul(&unscaled)?.is_symmetric();
    Ok(LOperator {
        unscaled,
        scale_sq: gram.determinant()?,
        orientation,
        self_adjoint,
    })
}

/// Orthonormal frame `X_1, X_2, X_3` of `L`-eigenvectors with
/// `[X_1,X_2] = λ_3 X_3`, `[X_2,X_3] = λ_1 X_1`, `[X_3,X_1] = λ_2 X_2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Milnor3dFrame {
    pub vectors: Vec<Vec<f64>>,
    /// Ascending.
    pub lambdas: [f64; 3],
    pub residual: f64,
}

pub fn milnor_frame_3d(m: &MetricLieAlgebra, tol: f64) -> Result<Milnor3dFrame> {
    require_dim(m, 3)?;
    m.algebra().require_lie()?;
    let l = l_operator(m)?;
    if !l.self_adjoint {
        return Err(Error::NotSelfAdjoint);
    }
    let f = orthonormal_frame_f64(m, tol)?.vectors;
    let lf = l.matrix_f64();
    let image: Vec<Vec<f64>> = f.iter().map(|v| lf.mul_vec(v).expect("length 3")).collect();
    let a = DMatrix::from_fn(3, 3, |i, j| {
        0.5 * (m.metric().inner_f64(&f[i], &image[j]) + m.metric().inner_f64(&f[j], &image[i]))
    });
    let eig = SymmetricEigen::new(a);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&p, &q| eig.eigenvalues[p].total_cmp(&eig.eigenvalues[q]));
    let u = DMatrix::from_fn(3, 3, |i, k| eig.eigenvectors[(i, order[k])]);
    let flip = if u.determinant() < 0.0 { -1.0 } else { 1.0 };
    let vectors: Vec<Vec<f64>> = (0..3)
        .map(|k| {
            let s = if k == 2 { flip } else { 1.0 };
            (0..3)
                .map(|c| s * (0..3).map(|i| u[(i, k)] * f[i][c]).sum::<f64>())
                .collect()
        })
        .collect();
    let lambdas = [
        eig.eigenvalues[order[0]],
        eig.eigenvalues[order[1]],
        eig.eigenvalues[order[2]],
    ];
    let fc = FrameConstants::from_frame_f64(m, &vectors)?;
    let residual = milnor_residual(&fc, &lambdas).max(orthonormality_residual(m, &vectors));
    if residual > tol {
        return Err(Error::ResidualTooLarge { residual, tol });
    }
    Ok(Milnor3dFrame {
        vectors,
        lambdas,
        residual,
    })
}

/// Largest deviation of the frame constants from the cyclic Milnor pattern
/// `α_{i,i+1,i+2} = λ_{i+2}`, all other `α_ijk` (`i < j`) zero.
pub fn milnor_residual(fc: &FrameConstants<f64>, lambdas: &[f64]) -> f64 {
    let n = fc.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for (k, lambda) in lambdas.iter().enumerate().take(n) {
                let expected = if j == (i + 1) % n && k == (i + 2) % n {
                    *lambda
                } else if i == (j + 1) % n && k == (j + 2) % n {
                    -lambda
                } else {
                    0.0
                };
                worst = worst.max((fc.alpha(i, j, k) - expected).abs());
            }
        }
    }
    worst
}

fn orthonormality_residual(m: &MetricLieAlgebra, vectors: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, x) in vectors.iter().enumerate() {
        for (j, y) in vectors.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m.metric().inner_f64(x, y) - target).abs());
        }
    }
    worst
}

/// Constants `a = ⟨[F_2,F_4],F_1⟩ > 0`, `b = ⟨[F_3,F_4],F_1⟩`,
/// `c = ⟨[F_3,F_4],F_2⟩ > 0` of the canonical orthonormal frame of a metric
/// on the 4-dimensional filiform algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalH4Constants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Exact decision `b = 0`.
    pub b_vanishes: bool,
    /// Exact value of `g([v_3, v_4], v_1)` on the unnormalized flag basis.
    pub b_numerator: Rational,
    /// Sign-fixed orthonormal frame `F_1..F_4`.
    pub frame: Vec<Vec<f64>>,
    /// Unnormalized exact flag basis `v_1..v_4`.
    pub flag_basis: Vec<Vector>,
}

/// Canonical flag `g² ⊂ [g,g] ⊂ centralizer([g,g])` of a filiform algebra.
pub fn h4_flag(g: &LieAlgebra) -> Result<Vec<Subspace>> {
    if g.dim() != 4 {
        return Err(Error::WrongShape(format!(
            "expected a 4-dimensional algebra, found dimension {}",
            g.dim()
        )));
    }
    g.require_lie()?;
    let series = g.lower_central_series();
    if series.dims() != vec![4, 2, 1, 0] {
        return Err(Error::WrongShape(format!(
            "lower central series dimensions {:?} are not those of h4",
            series.dims()
        )));
    }
    let derived = series.terms[1].clone();
    let cent = g.centralizer(&derived)?;
    let flag = vec![series.terms[2].clone(), derived, cent];
    let dims: Vec<usize> = flag.iter().map(Subspace::dim).collect();
    if dims != vec![1, 2, 3] {
        return Err(Error::DegenerateFlag(dims));
    }
    Ok(flag)
}

pub fn h4_canonical_constants(m: &MetricLieAlgebra) -> Result<CanonicalH4Constants> {
    let flag = h4_flag(m.algebra())?;
    let v = flag_adapted_basis(m.metric(), &flag)?;
    let g = m.algebra();
    let b_numerator = m.metric().inner(&g.bracket(&v[2], &v[3])?, &v[0]);

    let mut frame: Vec<Vec<f64>> = v
        .iter()
        .map(|x| {
            let norm = m.metric().inner(x, x).to_f64().sqrt();
            x.iter().map(|c| c.to_f64() / norm).collect()
        })
        .collect();
    let constant = |frame: &[Vec<f64>], i: usize, j: usize, k: usize| {
        m.metric()
            .inner_f64(&g.bracket_f64(&frame[i], &frame[j]), &frame[k])
    };
    if constant(&frame, 2, 3, 1) < 0.0 {
        frame[1].iter_mut().for_each(|x| *x = -*x);
    }
    if constant(&frame, 1, 3, 0) < 0.0 {
        frame[0].iter_mut().for_each(|x| *x = -*x);
    }
    Ok(CanonicalH4Constants {
        a: constant(&frame, 1, 3, 0),
        b: constant(&frame, 2, 3, 0),
        c: constant(&frame, 2, 3, 1),
        b_vanishes: b_numerator.is_zero(),
        b_numerator,
        frame,
        flag_basis: v,
    })
}

/// Exact decision: an orthonormal Milnor frame with two nonzero constants
/// exists iff `b = 0`.
pub fn h4_has_orthonormal_milnor(m: &MetricLieAlgebra) -> Result<bool> {
    Ok(h4_canonical_constants(m)?.b_vanishes)
}

/// An orthonormal frame in which the bracket has Milnor form.
#[derive(Debug, Clone, PartialEq)]
pub struct FoundMilnorFrame {
    pub vectors: Vec<Vec<f64>>,
    pub lambdas: Vec<f64>,
    pub residual: f64,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Searches signed permutations of an orthonormal frame for one in which
/// the bracket takes cyclic Milnor form with exactly `nonzero` nonzero
/// constants, verified in declared coordinates to within `tol`.
pub fn search_milnor_frame(
    m: &MetricLieAlgebra,
    frame: &[Vec<f64>],
    nonzero: usize,
    tol: f64,
) -> Result<Option<FoundMilnorFrame>> {
    let n = m.dim();
    let base = FrameConstants::from_frame_f64(m, frame)?;
    let mut perms = permutations(n);
    perms.sort();
    for perm in &perms {
        for signs in 0u32..(1 << n) {
            let sign = |i: usize| if signs >> i & 1 == 1 { -1.0 } else { 1.0 };
            let candidate = FrameConstants::from_fn(n, |i, j, k| {
                sign(i) * sign(j) * sign(k) * base.alpha(perm[i], perm[j], perm[k])
            });
            let lambdas: Vec<f64> = (0..n)
                .map(|k| *candidate.alpha((k + n - 2) % n, (k + n - 1) % n, k))
                .collect();
            if lambdas.iter().filter(|l| l.abs() > tol).count() != nonzero
                || milnor_residual(&candidate, &lambdas) > tol
            {
                continue;
            }
            let vectors: Vec<Vec<f64>> = (0..n)
                .map(|i| frame[perm[i]].iter().map(|x| sign(i) * x).collect())
                .collect();
            let actual = FrameConstants::from_frame_f64(m, &vectors)?;
            let residual =
                milnor_residual(&actual, &lambdas).max(orthonormality_residual(m, &vectors));
            if residual <= tol {
                return Ok(Some(FoundMilnorFrame {
                    vectors,
                    lambdas,
                    residual,
                }));
            }
        }
    }
    Ok(None)
}

/// Orthonormal Milnor frame with two nonzero constants for a metric on the
/// filiform algebra, or `None` when `b ≠ 0`.
pub fn h4_orthonormal_milnor_frame(
    m: &MetricLieAlgebra,
    tol: f64,
) -> Result<Option<FoundMilnorFrame>> {
    let k = h4_canonical_constants(m)?;
    if !k.b_vanishes {
        return Ok(None);
    }
    search_milnor_frame(m, &k.frame, 2, tol)
}

/// Outcome of the `h3 ⊕ h3` test. Only a nonzero value is conclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct H3H3Obstruction {
    /// `g([U_1, U_2], [V_1, V_2])`.
    pub value: Rational,
    pub obstructed: bool,
}

impl H3H3Obstruction {
    pub fn verdict(&self) -> &'static str {
        if self.obstructed {
            "obstructed"
        } else {
            "inconclusive"
        }
    }
}

impl fmt::Display for H3H3Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (value {})", self.verdict(), self.value)
    }
}

/// Blocks are basis-index triples `(p, q, r)` with `[X_p, X_q]` spanning the
/// derived line of each Heisenberg summand.
pub fn h3h3_obstruction(m: &MetricLieAlgebra, blocks: [&[usize]; 2]) -> Result<H3H3Obstruction> {
    require_dim(m, 6)?;
    let g = m.algebra();
    g.require_lie()?;
    let mut seen = [false; 6];
    for block in blocks {
        if block.len() != 3 {
            return Err(Error::WrongShape(
                "h3 blocks must have three indices".into(),
            ));
        }
        for &i in block {
            if i >= 6 || seen[i] {
                return Err(Error::WrongShape("blocks must partition the basis".into()));
            }
            seen[i] = true;
        }
        if !g.is_ideal(&Subspace::coordinate(6, block)?)? {
            return Err(Error::WrongShape("block is not an ideal".into()));
        }
        if g.restrict(block)?.lower_central_series().dims() != vec![3, 1, 0] {
            return Err(Error::WrongShape(
                "block is not a Heisenberg algebra".into(),
            ));
        }
    }
    let u3 = g.basis_bracket(blocks[0][0], blocks[0][1]);
    let v3 = g.basis_bracket(blocks[1][0], blocks[1][1]);
    if u3.iter().all(Zero::is_zero) || v3.iter().all(Zero::is_zero) {
        return Err(Error::WrongShape(
            "the first two indices of each block must bracket to the derived line".into(),
        ));
    }
    let value = m.metric().inner(u3, v3);
    Ok(H3H3Obstruction {
        obstructed: !value.is_zero(),
        value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CounterexampleKind {
    H4,
    H3H3,
}

impl CounterexampleKind {
    pub fn name(self) -> &'static str {
        match self {
            CounterexampleKind::H4 => "h4",
            CounterexampleKind::H3H3 => "h3h3",
        }
    }

    /// Normalized Milnor data the counterexample metric lives on.
    pub fn milnor_data(self) -> MilnorData {
        let l: &[i64] = match self {
            CounterexampleKind::H4 => &[0, 0, 1, 1],
            CounterexampleKind::H3H3 => &[0, 0, 1, 0, 0, 1],
        };
        MilnorData::from_i64(l).expect("n >= 3")
    }
}

fn symmetric_bump(n: usize, i: usize, j: usize, eps: &Rational) -> Matrix {
    let mut g = Matrix::identity(n);
    g[(i, j)] = eps.clone();
    g[(j, i)] = eps.clone();
    g
}

/// A metric with no orthonormal Milnor frame. For `h3h3` it is
/// `I + ε(E_36 + E_63)`; for `h4` the first `I + ε(E_ij + E_ji)` in
/// lexicographic order whose exact `b`-test fails.
pub fn counterexample_metric(kind: CounterexampleKind, eps: &Rational) -> Result<InnerProduct> {
    if !eps.is_positive() {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    match kind {
        CounterexampleKind::H3H3 => InnerProduct::new(symmetric_bump(6, 2, 5, eps)),
        CounterexampleKind::H4 => {
            let g = build_cyclic(&kind.milnor_data())?;
            let mut last_err = Error::NotPositiveDefinite;
            for i in 0..4 {
                for j in i + 1..4 {
                    let metric = match InnerProduct::new(symmetric_bump(4, i, j, eps)) {
                        Ok(metric) => metric,
                        Err(e) => {
                            last_err = e;
                            continue;
                        }
                    };
                    let m = MetricLieAlgebra::new(g.clone(), metric.clone())?;
                    if !h4_has_orthonormal_milnor(&m)? {
                        return Ok(metric);
                    }
                }
            }
            Err(last_err)
        }
    }
}

/// The metric in which the given basis (columns of `P`) is orthonormal:
/// `G = P^{-T} P^{-1}`.
pub fn metric_from_frame(frame: &[Vector]) -> Result<InnerProduct> {
    let p = Matrix::from_columns(frame)?;
    let inv = p.inverse()?;
    InnerProduct::new(inv.transpose().mul(&inv)?)
}

/// Declared basis `F_1..F_4` with `[F_2,F_4] = a F_1`,
/// `[F_3,F_4] = b F_1 + c F_2`, all other brackets zero.
pub fn abc_algebra(a: &Rational, b: &Rational, c: &Rational) -> LieAlgebra {
    LieAlgebra::from_structure_constants(
        4,
        [
            ((1, 3, 0), a.clone()),
            ((2, 3, 0), b.clone()),
            ((2, 3, 1), c.clone()),
        ],
    )
    .expect("valid keys")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unit_vector;
    use crate::scalar::rat;

    fn milnor(l: &[i64]) -> LieAlgebra {
        build_cyclic(&MilnorData::from_i64(l).unwrap()).unwrap()
    }

    fn diag(d: &[i64]) -> InnerProduct {
        InnerProduct::diagonal(&d.iter().map(|&x| int(x)).collect::<Vec<_>>()).unwrap()
    }

    fn e(i: usize) -> Vector {
        unit_vector(3, i)
    }

    #[test]
    fn cross_products() {
        let id = InnerProduct::identity(3);
        assert_eq!(
            cross_product(&id, &e(0), &e(1), 1).unwrap().exact(),
            Some(e(2))
        );
        assert!(cross_product(&id, &e(1), &e(1), 1).unwrap().is_zero());
        let w = cross_product(&diag(&[1, 1, 4]), &e(0), &e(1), 1).unwrap();
        assert_eq!(w.exact(), Some(vec![int(0), int(0), rat(1, 2)]));
        let neg = cross_product(&id, &e(0), &e(1), -1).unwrap();
        assert_eq!(neg.exact(), Some(vec![int(0), int(0), int(-1)]));
        assert!(cross_product(&InnerProduct::identity(4), &e(0), &e(1), 1).is_err());
    }

    #[test]
    fn cross_product_norm_and_orthogonality() {
        let g = InnerProduct::new(
            Matrix::from_rows(vec![
                vec![int(2), int(1), int(0)],
                vec![int(1), int(3), rat(1, 2)],
                vec![int(0), rat(1, 2), int(1)],
            ])
            .unwrap(),
        )
        .unwrap();
        let x = vec![int(1), int(-2), rat(1, 3)];
        let y = vec![rat(2, 5), int(1), int(4)];
        let w = cross_product(&g, &x, &y, 1).unwrap();
        assert!(g.inner(&w.direction, &x).is_zero());
        assert!(g.inner(&w.direction, &y).is_zero());
        let gxy = g.inner(&x, &y);
        assert_eq!(
            w.norm_sq(&g),
            g.inner(&x, &x) * g.inner(&y, &y) - &gxy * &gxy
        );
    }

    #[test]
    fn l_operator_examples() {
        let l = l_operator(&MetricLieAlgebra::with_identity(milnor(&[0, 0, 1]))).unwrap();
        assert!(l.self_adjoint);
        assert_eq!(
            l.matrix_exact(),
            Some(Matrix::diagonal(&[int(0), int(0), int(1)]))
        );
        let l = l_operator(&MetricLieAlgebra::with_identity(LieAlgebra::abelian(3))).unwrap();
        assert!(l.matrix_exact().unwrap().is_zero());
        let affine = LieAlgebra::from_structure_constants(3, [((0, 1, 1), int(1))]).unwrap();
        assert!(
            !l_operator(&MetricLieAlgebra::with_identity(affine.clone()))
                .unwrap()
                .self_adjoint
        );
        assert_eq!(
            milnor_frame_3d(&MetricLieAlgebra::with_identity(affine), 1e-9).unwrap_err(),
            Error::NotSelfAdjoint
        );
    }

    #[test]
    fn three_dimensional_frames() {
        let f =
            milnor_frame_3d(&MetricLieAlgebra::with_identity(milnor(&[0, 0, 1])), 1e-9).unwrap();
        assert!((f.lambdas[2] - 1.0).abs() < 1e-12 && f.lambdas[0].abs() < 1e-12);
        let f = milnor_frame_3d(
            &MetricLieAlgebra::new(milnor(&[0, 0, 1]), diag(&[1, 1, 9])).unwrap(),
            1e-9,
        )
        .unwrap();
        assert!((f.lambdas[2] - 3.0).abs() < 1e-12);
        assert!(f.lambdas[..2].iter().all(|l| l.abs() < 1e-12));
        let f = milnor_frame_3d(
            &MetricLieAlgebra::with_identity(LieAlgebra::abelian(3)),
            1e-9,
        )
        .unwrap();
        assert_eq!(f.lambdas, [0.0; 3]);
        // su(2): [X1,X2]=X3, [X2,X3]=X1, [X3,X1]=X2
        let su2 = build_cyclic(&MilnorData::from_i64(&[1, 1, 1]).unwrap()).unwrap();
        let f =
            milnor_frame_3d(&MetricLieAlgebra::new(su2, diag(&[1, 2, 3])).unwrap(), 1e-9).unwrap();
        assert!(f.residual <= 1e-9);
    }

    #[test]
    fn h4_identity_metric() {
        let m = MetricLieAlgebra::with_identity(milnor(&[0, 0, 2, 3]));
        let k = h4_canonical_constants(&m).unwrap();
        assert!(k.b_vanishes);
        assert!((k.a - 3.0).abs() < 1e-12 && (k.c - 2.0).abs() < 1e-12 && k.b.abs() < 1e-12);
        let found = h4_orthonormal_milnor_frame(&m, 1e-9).unwrap().unwrap();
        assert!(found.residual <= 1e-9);
        assert_eq!(found.lambdas.iter().filter(|l| l.abs() > 1e-9).count(), 2);
    }

    #[test]
    fn h4_off_diagonal_metric() {
        let mut gram = Matrix::identity(4);
        gram[(0, 2)] = rat(1, 10);
        gram[(2, 0)] = rat(1, 10);
        let m =
            MetricLieAlgebra::new(milnor(&[0, 0, 1, 1]), InnerProduct::new(gram).unwrap()).unwrap();
        let k = h4_canonical_constants(&m).unwrap();
        assert!(!k.b_vanishes);
        assert!(k.a > 0.0 && k.c > 0.0 && k.b.abs() > 1e-6);
        assert!(h4_orthonormal_milnor_frame(&m, 1e-9).unwrap().is_none());
    }

    #[test]
    fn abc_frame_as_metric_on_h4() {
        let x = |i| unit_vector::<Rational>(4, i);
        let neg = |v: Vector| v.into_iter().map(|c| -c).collect::<Vector>();
        let f3: Vector = x(0).iter().zip(x(2)).map(|(a, b)| -a - b).collect();
        let frame = vec![x(3), neg(x(2)), f3, x(1)];
        let m = MetricLieAlgebra::new(milnor(&[0, 0, 1, 1]), metric_from_frame(&frame).unwrap())
            .unwrap();
        assert_eq!(
            FrameConstants::from_frame(&m, &frame).unwrap(),
            FrameConstants::from_algebra(&abc_algebra(&int(1), &int(1), &int(1)))
        );
        assert!(!h4_has_orthonormal_milnor(&m).unwrap());
    }

    #[test]
    fn h3h3_examples() {
        let g = milnor(&[0, 0, 1, 0, 0, 1]);
        let blocks: [&[usize]; 2] = [&[0, 1, 2], &[3, 4, 5]];
        let m = MetricLieAlgebra::new(
            g.clone(),
            counterexample_metric(CounterexampleKind::H3H3, &rat(1, 10)).unwrap(),
        )
        .unwrap();
        let o = h3h3_obstruction(&m, blocks).unwrap();
        assert_eq!((o.value.clone(), o.obstructed), (rat(1, 10), true));
        let o = h3h3_obstruction(&MetricLieAlgebra::with_identity(g), blocks).unwrap();
        assert_eq!(o.verdict(), "inconclusive");
        assert_eq!(
            counterexample_metric(CounterexampleKind::H3H3, &int(1)).unwrap_err(),
            Error::NotPositiveDefinite
        );
    }

    #[test]
    fn h4_counterexample() {
        let metric = counterexample_metric(CounterexampleKind::H4, &rat(1, 10)).unwrap();
        let mut expected = Matrix::identity(4);
        expected[(0, 2)] = rat(1, 10);
        expected[(2, 0)] = rat(1, 10);
        assert_eq!(*metric.gram(), expected);
    }

    #[test]
    fn wrong_shapes_rejected() {
        let m = MetricLieAlgebra::with_identity(milnor(&[0, 0, 1, 0]));
        assert!(matches!(
            h4_canonical_constants(&m),
            Err(Error::WrongShape(_))
        ));
        let m = MetricLieAlgebra::with_identity(milnor(&[0, 0, 1, 1, 0, 0]));
        assert!(h3h3_obstruction(&m, [&[0, 1, 2], &[3, 4, 5]]).is_err());
    }
}
