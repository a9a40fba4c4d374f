//! Inner products, orthonormal frames, sectional and Ricci curvature of
//! left-invariant metrics.
//!
//! Curvature is computed from the frame constants `α_ijk = ⟨[e_i, e_j], e_k⟩`
//! of an orthonormal frame. When Gram–Schmidt along the coordinate flag only
//! produces rational square roots the whole pipeline stays exact; otherwise
//! the frame and everything downstream is `f64`.

use num_traits::{Signed, Zero};

use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::linalg::{dot, Mat, Matrix, Subspace, Vector};
use crate::poly::{exact_signature, float_signature, Polynomial, Signature};
use crate::scalar::{rat, rational_sqrt, Rational, Scalar};

/// Default tolerance for floating-point decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Positive-definite symmetric bilinear form given by its Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerProduct {
    gram: Matrix,
}

impl InnerProduct {
    /// Checks symmetry and positive definiteness (leading principal minors).
    pub fn new(gram: Matrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::DimensionMismatch {
                expected: gram.rows(),
                found: gram.cols(),
            });
        }
        if !gram.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if !is_positive_definite(&gram) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { gram })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            gram: Matrix::identity(n),
        }
    }

    pub fn diagonal(entries: &[Rational]) -> Result<Self> {
        Self::new(Matrix::diagonal(entries))
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn inner(&self, x: &[Rational], y: &[Rational]) -> Rational {
        let gy = self.gram.mul_vec(y).expect("vector length matches metric");
        dot(x, &gy)
    }

    pub fn inner_f64(&self, x: &[f64], y: &[f64]) -> f64 {
        let g = self.gram.to_f64();
        let gy = g.mul_vec(y).expect("vector length matches metric");
        dot(x, &gy)
    }

    /// `s · g` for `s > 0`.
    pub fn scaled(&self, s: &Rational) -> Result<Self> {
        if !s.is_positive() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self {
            gram: self.gram.scale(s),
        })
    }

    /// Every entry coupling two different blocks vanishes. Indices outside
    /// all blocks are treated as one extra block each.
    pub fn is_block_diagonal(&self, blocks: &[Vec<usize>]) -> bool {
        let n = self.dim();
        let mut label: Vec<usize> = (0..n).map(|i| blocks.len() + i).collect();
        for (b, block) in blocks.iter().enumerate() {
            for &i in block {
                label[i] = b;
            }
        }
        (0..n).all(|i| (0..n).all(|j| label[i] == label[j] || self.gram[(i, j)].is_zero()))
    }
}

/// All leading principal minors are positive. Exact for symmetric input.
pub fn is_positive_definite(gram: &Matrix) -> bool {
    gram.is_symmetric()
        && gram
            .leading_principal_minors()
            .iter()
            .all(Signed::is_positive)
}

/// A Lie algebra with an inner product on its declared basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricLieAlgebra {
    algebra: LieAlgebra,
    metric: InnerProduct,
}

impl MetricLieAlgebra {
    pub fn new(algebra: LieAlgebra, metric: InnerProduct) -> Result<Self> {
        if algebra.dim() != metric.dim() {
            return Err(Error::DimensionMismatch {
                expected: algebra.dim(),
                found: metric.dim(),
            });
        }
        Ok(Self { algebra, metric })
    }

    /// The declared basis is orthonormal.
    pub fn with_identity(algebra: LieAlgebra) -> Self {
        let n = algebra.dim();
        Self {
            algebra,
            metric: InnerProduct::identity(n),
        }
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn metric(&self) -> &InnerProduct {
        &self.metric
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }
}

/// Pairwise `g`-orthogonal vectors `v_1..v_n`, unnormalized and exact, with
/// `span(v_1..v_{dim F_k}) = F_k` for every member `F_k` of the flag. The
/// flag is completed by the whole space when it does not end there.
pub fn flag_adapted_basis(metric: &InnerProduct, flag: &[Subspace]) -> Result<Vec<Vector>> {
    let n = metric.dim();
    let mut prev = Subspace::zero(n);
    let full = Subspace::full(n);
    let mut steps: Vec<&Subspace> = flag.iter().collect();
    if steps.last().map(|s| s.dim()) != Some(n) {
        steps.push(&full);
    }
    let mut basis: Vec<Vector> = Vec::with_capacity(n);
    let mut norms: Vec<Rational> = Vec::with_capacity(n);
    for step in steps {
        if step.ambient() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: step.ambient(),
            });
        }
        if step.dim() <= prev.dim() || !prev.is_subspace_of(step) {
            return Err(Error::FlagNotNested);
        }
        for w in step.basis() {
            if basis.len() == step.dim() {
                break;
            }
            let mut v = w.clone();
            for (b, nb) in basis.iter().zip(&norms) {
                let coef = metric.inner(w, b) / nb;
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= &coef * bi;
                }
            }
            if v.iter().all(Zero::is_zero) {
                continue;
            }
            norms.push(metric.inner(&v, &v));
            basis.push(v);
        }
        prev = step.clone();
    }
    Ok(basis)
}

/// Frame constants `α_ijk = ⟨[e_i, e_j], e_k⟩` of an orthonormal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameConstants<T> {
    n: usize,
    alpha: Vec<T>,
}

impl<T: Scalar> FrameConstants<T> {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize) -> T) -> Self {
        let mut alpha = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    alpha.push(f(i, j, k));
                }
            }
        }
        Self { n, alpha }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn alpha(&self, i: usize, j: usize, k: usize) -> &T {
        &self.alpha[(i * self.n + j) * self.n + k]
    }

    /// `B_ij = tr(ad_i ad_j)` with `(ad_i)_{kj} = α_ijk`.
    pub fn killing_form(&self) -> Mat<T> {
        let n = self.n;
        let mut b = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut s = T::zero();
                for k in 0..n {
                    for l in 0..n {
                        s = s + self.alpha(i, l, k).clone() * self.alpha(j, k, l).clone();
                    }
                }
                b[(i, j)] = s;
            }
        }
        b
    }

    /// `tr ad_{e_i} = Σ_k α_iki` vanishes for every `i`.
    pub fn is_unimodular(&self, tol: f64) -> bool {
        (0..self.n).all(|i| {
            (0..self.n)
                .fold(T::zero(), |s, k| s + self.alpha(i, k, k).clone())
                .is_negligible(tol)
        })
    }

    pub fn to_f64(&self) -> FrameConstants<f64> {
        FrameConstants {
            n: self.n,
            alpha: self.alpha.iter().map(Scalar::to_f64).collect(),
        }
    }
}

impl FrameConstants<Rational> {
    /// Constants of the declared basis, taken to be orthonormal.
    pub fn from_algebra(g: &LieAlgebra) -> Self {
        Self::from_fn(g.dim(), |i, j, k| g.structure_constant(i, j, k).clone())
    }

    /// Constants of a rational frame (assumed orthonormal for `m`).
    pub fn from_frame(m: &MetricLieAlgebra, frame: &[Vector]) -> Result<Self> {
        let n = m.dim();
        check_frame_len(n, frame.len())?;
        let mut brackets = vec![Vec::new(); n * n];
        for i in 0..n {
            for j in 0..n {
                brackets[i * n + j] = m.algebra().bracket(&frame[i], &frame[j])?;
            }
        }
        Ok(Self::from_fn(n, |i, j, k| {
            m.metric().inner(&brackets[i * n + j], &frame[k])
        }))
    }
}

impl FrameConstants<f64> {
    pub fn from_frame_f64(m: &MetricLieAlgebra, frame: &[Vec<f64>]) -> Result<Self> {
        let n = m.dim();
        check_frame_len(n, frame.len())?;
        let g = m.metric().gram().to_f64();
        let mut brackets = vec![Vec::new(); n * n];
        for i in 0..n {
            for j in 0..n {
                brackets[i * n + j] = m.algebra().bracket_f64(&frame[i], &frame[j]);
            }
        }
        Ok(Self::from_fn(n, |i, j, k| {
            let gk = g.mul_vec(&frame[k]).expect("frame vector length");
            dot(&brackets[i * n + j], &gk)
        }))
    }
}

fn check_frame_len(n: usize, found: usize) -> Result<()> {
    if found == n {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: n, found })
    }
}

/// An orthonormal frame in declared-basis coordinates with its constants.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalFrame<T> {
    pub vectors: Vec<Vec<T>>,
    pub constants: FrameConstants<T>,
}

/// Arithmetic path used for a frame.
#[derive(Debug, Clone, PartialEq)]
pub enum Frame {
    Exact(OrthonormalFrame<Rational>),
    Float(OrthonormalFrame<f64>),
}

impl Frame {
    pub fn is_exact(&self) -> bool {
        matches!(self, Frame::Exact(_))
    }

    pub fn mode(&self) -> &'static str {
        if self.is_exact() {
            "exact"
        } else {
            "float"
        }
    }
}

/// Gram–Schmidt along the coordinate flag `e_1 ⊂ (e_1, e_2) ⊂ …`.
fn coordinate_flag_basis(m: &MetricLieAlgebra) -> Result<Vec<Vector>> {
    let n = m.dim();
    let flag: Vec<Subspace> = (1..=n)
        .map(|k| Subspace::coordinate(n, &(0..k).collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    flag_adapted_basis(m.metric(), &flag)
}

/// Exact orthonormal frame, available when every Gram–Schmidt norm is the
/// square of a rational.
pub fn orthonormal_frame_exact(m: &MetricLieAlgebra) -> Result<OrthonormalFrame<Rational>> {
    let basis = coordinate_flag_basis(m)?;
    let mut vectors = Vec::with_capacity(basis.len());
    for (i, v) in basis.iter().enumerate() {
        let norm_sq = m.metric().inner(v, v);
        let norm = rational_sqrt(&norm_sq).ok_or_else(|| {
            Error::ExactUnavailable(format!(
                "squared norm {norm_sq} of frame vector {} is not a rational square",
                i + 1
            ))
        })?;
        vectors.push(v.iter().map(|x| x / &norm).collect::<Vector>());
    }
    let constants = FrameConstants::from_frame(m, &vectors)?;
    Ok(OrthonormalFrame { vectors, constants })
}

/// Floating-point orthonormal frame, checked to be orthonormal within `tol`.
pub fn orthonormal_frame_f64(m: &MetricLieAlgebra, tol: f64) -> Result<OrthonormalFrame<f64>> {
    let basis = coordinate_flag_basis(m)?;
    let vectors: Vec<Vec<f64>> = basis
        .iter()
        .map(|v| {
            let norm = m.metric().inner(v, v).to_f64().sqrt();
            v.iter().map(|x| x.to_f64() / norm).collect()
        })
        .collect();
    let n = m.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m.metric().inner_f64(&vectors[i], &vectors[j]) - target).abs());
        }
    }
    if worst > tol {
        return Err(Error::ResidualTooLarge {
            residual: worst,
            tol,
        });
    }
    let constants = FrameConstants::from_frame_f64(m, &vectors)?;
    Ok(OrthonormalFrame { vectors, constants })
}

/// Exact frame when possible, float otherwise. With `require_exact` the
/// float fallback becomes an error.
pub fn orthonormal_frame(m: &MetricLieAlgebra, tol: f64, require_exact: bool) -> Result<Frame> {
    match orthonormal_frame_exact(m) {
        Ok(f) => Ok(Frame::Exact(f)),
        Err(Error::ExactUnavailable(msg)) if require_exact => Err(Error::ExactUnavailable(msg)),
        Err(Error::ExactUnavailable(_)) => orthonormal_frame_f64(m, tol).map(Frame::Float),
        Err(e) => Err(e),
    }
}

fn half<T: Scalar>() -> T {
    T::from_rational(&rat(1, 2))
}

fn quarter<T: Scalar>() -> T {
    T::from_rational(&rat(1, 4))
}

/// Sectional curvature of the plane spanned by frame vectors `i` and `j`.
pub fn sectional_curvature<T: Scalar>(fc: &FrameConstants<T>, i: usize, j: usize) -> Result<T> {
    let n = fc.dim();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, dim: n });
        }
    }
    if i == j {
        return Err(Error::InvalidArgument(
            "sectional curvature needs two distinct frame vectors".into(),
        ));
    }
    let a = |p, q, r| fc.alpha(p, q, r).clone();
    let mut kappa = T::zero();
    for k in 0..n {
        let (ijk, jki, kij) = (a(i, j, k), a(j, k, i), a(k, i, j));
        let first = half::<T>() * ijk.clone() * (jki.clone() + kij.clone() - ijk.clone());
        let second = quarter::<T>() * (ijk.clone() - jki.clone() + kij.clone()) * (ijk + jki - kij);
        kappa = kappa + first - second - a(k, i, i) * a(k, j, j);
    }
    Ok(kappa)
}

/// Full table of sectional curvatures; the diagonal is 0.
pub fn sectional_table<T: Scalar>(fc: &FrameConstants<T>) -> Mat<T> {
    let n = fc.dim();
    let mut t = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                t[(i, j)] = sectional_curvature(fc, i, j).expect("indices in range");
            }
        }
    }
    t
}

/// Ricci form in an orthonormal frame of a unimodular metric Lie algebra:
/// `Ric_ij = -½ Σ α_ikl α_jkl + ¼ Σ α_kli α_klj - ½ B_ij`.
pub fn ricci_orthonormal<T: Scalar>(
    fc: &FrameConstants<T>,
    killing: &Mat<T>,
    tol: f64,
) -> Result<Mat<T>> {
    let n = fc.dim();
    if killing.rows() != n || killing.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: killing.rows(),
        });
    }
    if !fc.is_unimodular(tol) {
        return Err(Error::NotUnimodular);
    }
    let a = |p, q, r| fc.alpha(p, q, r).clone();
    let mut ric = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut first = T::zero();
            let mut second = T::zero();
            for k in 0..n {
                for l in 0..n {
                    first = first + a(i, k, l) * a(j, k, l);
                    second = second + a(k, l, i) * a(k, l, j);
                }
            }
            ric[(i, j)] = quarter::<T>() * second
                - half::<T>() * first
                - half::<T>() * killing[(i, j)].clone();
        }
    }
    Ok(ric)
}

/// [`ricci_orthonormal`] with the Killing form derived from the constants.
pub fn ricci<T: Scalar>(fc: &FrameConstants<T>, tol: f64) -> Result<Mat<T>> {
    ricci_orthonormal(fc, &fc.killing_form(), tol)
}

/// Exact signature with the characteristic polynomial for rational input.
pub fn ricci_signature(r: &Matrix) -> Result<(Polynomial, Signature)> {
    exact_signature(r)
}

/// Signature of a float Ricci matrix.
pub fn ricci_signature_f64(r: &Mat<f64>, tol: f64) -> Result<Signature> {
    float_signature(r, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milnor::{build_cyclic, MilnorData};
    use crate::scalar::int;

    fn milnor(l: &[i64]) -> LieAlgebra {
        build_cyclic(&MilnorData::from_i64(l).unwrap()).unwrap()
    }

    fn diag(d: &[i64]) -> Matrix {
        Matrix::diagonal(&d.iter().map(|&x| int(x)).collect::<Vec<_>>())
    }

    #[test]
    fn positive_definiteness() {
        assert!(InnerProduct::new(diag(&[1, 2, 3])).is_ok());
        assert_eq!(
            InnerProduct::new(diag(&[1, 0, 3])).unwrap_err(),
            Error::NotPositiveDefinite
        );
        let asym = Matrix::from_rows(vec![vec![int(1), int(0)], vec![int(1), int(1)]]).unwrap();
        assert_eq!(InnerProduct::new(asym).unwrap_err(), Error::NotSymmetric);
    }

    #[test]
    fn one_step_gram_schmidt() {
        let g = InnerProduct::new(
            Matrix::from_rows(vec![vec![int(1), rat(1, 2)], vec![rat(1, 2), int(1)]]).unwrap(),
        )
        .unwrap();
        let flag = [Subspace::coordinate(2, &[0]).unwrap()];
        let v = flag_adapted_basis(&g, &flag).unwrap();
        assert_eq!(v, vec![vec![int(1), int(0)], vec![rat(-1, 2), int(1)]]);
        assert!(g.inner(&v[0], &v[1]).is_zero());
    }

    #[test]
    fn identity_flag_gives_coordinates() {
        let g = InnerProduct::identity(3);
        let flag: Vec<Subspace> = (1..=3)
            .map(|k| Subspace::coordinate(3, &(0..k).collect::<Vec<_>>()).unwrap())
            .collect();
        let v = flag_adapted_basis(&g, &flag).unwrap();
        assert_eq!(
            v,
            (0..3)
                .map(|i| crate::linalg::unit_vector(3, i))
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn non_nested_flag_rejected() {
        let g = InnerProduct::identity(3);
        let flag = [
            Subspace::coordinate(3, &[0]).unwrap(),
            Subspace::coordinate(3, &[1, 2]).unwrap(),
        ];
        assert_eq!(
            flag_adapted_basis(&g, &flag).unwrap_err(),
            Error::FlagNotNested
        );
    }

    #[test]
    fn h3_constants_identity_metric() {
        let m = MetricLieAlgebra::with_identity(milnor(&[0, 0, 3]));
        let f = orthonormal_frame_exact(&m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let expected = match (i, j, k) {
                        (0, 1, 2) => int(3),
                        (1, 0, 2) => int(-3),
                        _ => int(0),
                    };
                    assert_eq!(*f.constants.alpha(i, j, k), expected);
                }
            }
        }
    }

    #[test]
    fn h4_rescaled_third_vector() {
        let m = MetricLieAlgebra::new(
            milnor(&[0, 0, 1, 1]),
            InnerProduct::new(diag(&[1, 1, 4, 1])).unwrap(),
        )
        .unwrap();
        let fc = orthonormal_frame_exact(&m).unwrap().constants;
        // e_3 = X_3 / 2: [e_1, e_2] = X_3 = 2 e_3, [e_2, e_3] = X_4 / 2
        assert_eq!(*fc.alpha(0, 1, 2), int(2));
        assert_eq!(*fc.alpha(1, 2, 3), rat(1, 2));
    }

    #[test]
    fn irrational_norm_falls_back_to_float() {
        let m = MetricLieAlgebra::new(
            milnor(&[0, 0, 1]),
            InnerProduct::new(diag(&[1, 1, 2])).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            orthonormal_frame_exact(&m),
            Err(Error::ExactUnavailable(_))
        ));
        let f = orthonormal_frame(&m, DEFAULT_TOL, false).unwrap();
        let Frame::Float(f) = f else {
            panic!("expected float frame")
        };
        assert!((f.constants.alpha(0, 1, 2) - 2f64.sqrt()).abs() < 1e-12);
        assert!(orthonormal_frame(&m, DEFAULT_TOL, true).is_err());
    }

    #[test]
    fn h3_ricci_and_signature() {
        let fc = FrameConstants::from_algebra(&milnor(&[0, 0, 2]));
        let r = ricci(&fc, 0.0).unwrap();
        assert_eq!(r, diag(&[-2, -2, 2]));
        let (_, s) = ricci_signature(&r).unwrap();
        assert_eq!(s.symbols(), "(-,-,+)");
    }

    #[test]
    fn h4_sectional_entries() {
        let fc = FrameConstants::from_algebra(&milnor(&[0, 0, 2, 3]));
        let k = sectional_table(&fc);
        assert_eq!(k[(0, 1)], int(-3));
        assert_eq!(k[(0, 2)], int(1));
        assert_eq!(k[(1, 2)], rat(-27, 4) + int(1));
        assert_eq!(k[(0, 3)], int(0));
        assert_eq!(k[(1, 3)], rat(9, 4));
        assert_eq!(k[(2, 3)], rat(9, 4));
        assert!(sectional_curvature(&fc, 1, 1).is_err());
    }

    #[test]
    fn ricci_rejects_non_unimodular() {
        let g = LieAlgebra::from_structure_constants(2, [((0, 1, 1), int(1))]).unwrap();
        let fc = FrameConstants::from_algebra(&g);
        assert_eq!(ricci(&fc, 0.0).unwrap_err(), Error::NotUnimodular);
    }

    #[test]
    fn killing_form_from_constants() {
        let g = LieAlgebra::from_structure_constants(2, [((0, 1, 1), int(1))]).unwrap();
        assert_eq!(
            FrameConstants::from_algebra(&g).killing_form(),
            g.killing_form()
        );
    }

    #[test]
    fn block_diagonal_detection() {
        let mut gram = Matrix::identity(6);
        assert!(InnerProduct::new(gram.clone())
            .unwrap()
            .is_block_diagonal(&[vec![0, 1, 2], vec![3, 4, 5]]));
        gram[(2, 5)] = rat(1, 10);
        gram[(5, 2)] = rat(1, 10);
        assert!(!InnerProduct::new(gram)
            .unwrap()
            .is_block_diagonal(&[vec![0, 1, 2], vec![3, 4, 5]]));
    }
}
