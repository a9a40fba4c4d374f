//! Derivations and the nilsoliton test `Ric ∈ ℝI + Der(g)`.

use nalgebra::DMatrix;
use num_traits::{One, Zero};

use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::geometry::{orthonormal_frame, ricci, Frame, InnerProduct, MetricLieAlgebra};
use crate::linalg::{Mat, Matrix};
use crate::milnor::{decompose, MilnorData, SummandKind};
use crate::scalar::{int, rat, Rational, Scalar};

/// Leibniz defect `D[X_i,X_j] - [DX_i,X_j] - [X_i,DX_j]` as linear equations
/// in the entries of `D` (variable `k * n + m` is `D_km`).
fn leibniz_system(g: &LieAlgebra) -> Matrix {
    let n = g.dim();
    let c = |i: usize, j: usize, k: usize| g.structure_constant(i, j, k);
    let mut rows = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                let mut row = vec![Rational::zero(); n * n];
                for m in 0..n {
                    row[k * n + m] += c(i, j, m);
                }
                for a in 0..n {
                    row[a * n + i] -= c(a, j, k);
                    row[a * n + j] -= c(i, a, k);
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    if rows.is_empty() {
        return Matrix::zeros(0, n * n);
    }
    Matrix::from_rows(rows).expect("rows have equal length")
}

fn unflatten(n: usize, v: &[Rational]) -> Matrix {
    Matrix::from_rows(v.chunks(n).map(<[Rational]>::to_vec).collect()).expect("n x n")
}

/// Exact basis of `Der(g)`.
pub fn derivation_space(g: &LieAlgebra) -> Result<Vec<Matrix>> {
    g.require_lie()?;
    let n = g.dim();
    let system = leibniz_system(g);
    if system.rows() == 0 {
        return Ok((0..n * n)
            .map(|p| {
                let mut m = Matrix::zeros(n, n);
                m[(p / n, p % n)] = Rational::one();
                m
            })
            .collect());
    }
    Ok(system.nullspace().iter().map(|v| unflatten(n, v)).collect())
}

/// Exact Leibniz check on all basis pairs.
pub fn is_derivation(g: &LieAlgebra, d: &Matrix) -> Result<bool> {
    let n = g.dim();
    if d.rows() != n || d.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: d.rows(),
        });
    }
    let cols: Vec<_> = (0..n).map(|i| d.column(i)).collect();
    for i in 0..n {
        for j in i + 1..n {
            let lhs = d.mul_vec(g.basis_bracket(i, j))?;
            let a = g.bracket(&cols[i], &crate::linalg::unit_vector(n, j))?;
            let b = g.bracket(&crate::linalg::unit_vector(n, i), &cols[j])?;
            if lhs
                .iter()
                .zip(a.iter().zip(&b))
                .any(|(l, (x, y))| *l != x + y)
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Witness (or best fit) for `R = cI + D` with `D ∈ Der(g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolitonCertificate<T> {
    pub is_soliton: bool,
    pub c: T,
    /// `R - cI` when soliton; otherwise the derivation part of the
    /// least-squares fit.
    pub derivation: Mat<T>,
    /// Frobenius norm of `R - cI - D`.
    pub residual: f64,
}

fn require_square(r_dim: (usize, usize), n: usize) -> Result<()> {
    if r_dim != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: r_dim.0.max(r_dim.1),
        });
    }
    Ok(())
}

/// Exact decision for a rational Ricci endomorphism `R` written in the
/// declared basis of `g`.
///
/// The fit is the orthogonal (Frobenius) projection of `R` onto
/// `ℝI + Der(g)`; `R` is a nilsoliton iff the projection is exact. For an
/// abelian algebra every `R` qualifies and `c = tr R / (n + 1)` minimizes
/// `c² + |R - cI|²`.
pub fn nilsoliton_solve(r: &Matrix, g: &LieAlgebra) -> Result<SolitonCertificate<Rational>> {
    let n = g.dim();
    require_square((r.rows(), r.cols()), n)?;
    if !r.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if g.is_abelian() {
        let c = r.trace() / int(n as i64 + 1);
        let derivation = r.sub(&Matrix::identity(n).scale(&c))?;
        return Ok(SolitonCertificate {
            is_soliton: true,
            c,
            derivation,
            residual: 0.0,
        });
    }
    let ders = derivation_space(g)?;
    let mut columns: Vec<Vec<Rational>> = vec![Matrix::identity(n).as_slice().to_vec()];
    columns.extend(ders.iter().map(|d| d.as_slice().to_vec()));
    let target = r.as_slice();
    let k = columns.len();
    let normal = Matrix::from_rows(
        (0..k)
            .map(|a| {
                (0..k)
                    .map(|b| crate::linalg::dot(&columns[a], &columns[b]))
                    .collect()
            })
            .collect(),
    )?;
    let rhs: Vec<Rational> = columns
        .iter()
        .map(|col| crate::linalg::dot(col, target))
        .collect();
    let coeffs = normal
        .solve(&rhs)?
        .ok_or_else(|| Error::WrongShape("identity lies in the derivation span".into()))?;
    let c = coeffs[0].clone();
    let mut derivation = Matrix::zeros(n, n);
    for (t, d) in coeffs[1..].iter().zip(&ders) {
        derivation = derivation.add(&d.scale(t))?;
    }
    let diff = r.sub(&Matrix::identity(n).scale(&c))?.sub(&derivation)?;
    let residual_sq = diff
        .as_slice()
        .iter()
        .fold(Rational::zero(), |acc, x| acc + x * x);
    Ok(SolitonCertificate {
        is_soliton: residual_sq.is_zero(),
        c,
        derivation,
        residual: residual_sq.to_f64().sqrt(),
    })
}

/// Least-squares decision for a float Ricci endomorphism in the declared
/// basis; soliton iff the residual is at most `tol`.
pub fn nilsoliton_solve_f64(
    r: &Mat<f64>,
    g: &LieAlgebra,
    tol: f64,
) -> Result<SolitonCertificate<f64>> {
    let n = g.dim();
    require_square((r.rows(), r.cols()), n)?;
    if g.is_abelian() {
        let c = r.trace() / (n as f64 + 1.0);
        return Ok(SolitonCertificate {
            is_soliton: true,
            c,
            derivation: r.sub(&Mat::identity(n).scale(&c))?,
            residual: 0.0,
        });
    }
    let ders: Vec<Mat<f64>> = derivation_space(g)?.iter().map(Matrix::to_f64).collect();
    let k = ders.len() + 1;
    let a = DMatrix::from_fn(n * n, k, |p, q| {
        if q == 0 {
            if p / n == p % n {
                1.0
            } else {
                0.0
            }
        } else {
            ders[q - 1].as_slice()[p]
        }
    });
    let b = DMatrix::from_column_slice(n * n, 1, r.as_slice());
    let x = a
        .clone()
        .svd(true, true)
        .solve(&b, f64::EPSILON)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let c = x[0];
    let mut derivation = Mat::zeros(n, n);
    for (q, d) in ders.iter().enumerate() {
        derivation = derivation.add(&d.scale(&x[q + 1]))?;
    }
    let residual = (&a * &x - &b).norm();
    Ok(SolitonCertificate {
        is_soliton: residual <= tol,
        c,
        derivation,
        residual,
    })
}

/// Certificate from either arithmetic path.
#[derive(Debug, Clone, PartialEq)]
pub enum SolitonOutcome {
    Exact(SolitonCertificate<Rational>),
    Float(SolitonCertificate<f64>),
}

impl SolitonOutcome {
    pub fn is_soliton(&self) -> bool {
        match self {
            SolitonOutcome::Exact(c) => c.is_soliton,
            SolitonOutcome::Float(c) => c.is_soliton,
        }
    }
}

/// Ricci of `m` in an orthonormal frame, moved to the declared basis as an
/// endomorphism, then tested against `ℝI + Der(g)`.
pub fn metric_nilsoliton(
    m: &MetricLieAlgebra,
    tol: f64,
    require_exact: bool,
) -> Result<SolitonOutcome> {
    let g = m.algebra();
    match orthonormal_frame(m, tol, require_exact)? {
        Frame::Exact(f) => {
            let ric = ricci(&f.constants, tol)?;
            // a rational frame lets the algebra move instead of the Ricci form
            let in_frame = g.change_of_basis(&Matrix::from_columns(&f.vectors)?)?;
            nilsoliton_solve(&ric, &in_frame).map(SolitonOutcome::Exact)
        }
        Frame::Float(f) => {
            let ric = ricci(&f.constants, tol)?;
            let p = Mat::from_columns(&f.vectors)?;
            let gram = m.metric().gram().to_f64();
            let p_inv = p.transpose().mul(&gram)?;
            let declared = p.mul(&ric)?.mul(&p_inv)?;
            nilsoliton_solve_f64(&declared, g, tol).map(SolitonOutcome::Float)
        }
    }
}

/// Block data of the Milnor nilsoliton criterion for a diagonal metric.
#[derive(Debug, Clone, PartialEq)]
pub struct MilnorSolitonCriterion {
    /// Squared orthonormal-frame constants `μ_k² = λ_k² q_k / (q_{k-2} q_{k-1})`.
    pub scales_sq: Vec<Rational>,
    /// Every h4 block has `|μ_{k}| = |μ_{k+1}|`.
    pub h4_blocks_balanced: bool,
    /// All nonzero `μ_k²` coincide.
    pub scales_agree: bool,
}

impl MilnorSolitonCriterion {
    pub fn holds(&self) -> bool {
        self.h4_blocks_balanced && self.scales_agree
    }
}

/// Nilsoliton criterion read off the Milnor constants of the orthonormal
/// frame `X_i / sqrt(q_i)` of a diagonal metric `diag(q)`.
///
/// Each nonabelian block forces `c = -3μ²/2` with its own scale `μ`, so
/// besides `|μ_{k}| = |μ_{k+1}|` inside every h4 block the scales of
/// different blocks must agree.
pub fn milnor_soliton_criterion(
    d: &MilnorData,
    metric: &InnerProduct,
) -> Result<MilnorSolitonCriterion> {
    let n = d.n();
    if metric.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: metric.dim(),
        });
    }
    if !metric.gram().is_diagonal() {
        return Err(Error::InvalidArgument(
            "the Milnor criterion needs a diagonal metric".into(),
        ));
    }
    let dec = decompose(d)?;
    let q = |i: usize| metric.gram()[(i % n, i % n)].clone();
    let scales_sq: Vec<Rational> = (0..n)
        .map(|k| {
            let l = &d.lambdas()[k];
            l * l * q(k) / (q(k + n - 2) * q(k + n - 1))
        })
        .collect();
    let h4_blocks_balanced = dec
        .summands
        .iter()
        .filter(|s| s.kind == SummandKind::H4)
        .all(|s| scales_sq[s.indices[2]] == scales_sq[s.indices[3]]);
    let nonzero: Vec<&Rational> = scales_sq.iter().filter(|s| !s.is_zero()).collect();
    let scales_agree = nonzero.windows(2).all(|w| w[0] == w[1]);
    Ok(MilnorSolitonCriterion {
        scales_sq,
        h4_blocks_balanced,
        scales_agree,
    })
}

/// `c` of the orthonormal Milnor frame with common scale `μ²`.
pub fn milnor_soliton_constant(scale_sq: &Rational) -> Rational {
    rat(-3, 2) * scale_sq
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FrameConstants;
    use crate::milnor::build_cyclic;

    fn milnor(l: &[i64]) -> LieAlgebra {
        build_cyclic(&MilnorData::from_i64(l).unwrap()).unwrap()
    }

    fn diag(d: &[Rational]) -> Matrix {
        Matrix::diagonal(d)
    }

    fn ints(d: &[i64]) -> Vec<Rational> {
        d.iter().map(|&x| int(x)).collect()
    }

    /// Independent oracle: with `L` the Leibniz defect map, `R - cI` is a
    /// derivation iff `L(R) = c L(I)` for some scalar `c`.
    fn affine_oracle(r: &Matrix, g: &LieAlgebra) -> Option<Rational> {
        let sys = leibniz_system(g);
        let lr = sys.mul_vec(r.as_slice()).unwrap();
        let li = sys.mul_vec(Matrix::identity(g.dim()).as_slice()).unwrap();
        let pivot = li.iter().position(|x| !x.is_zero())?;
        let c = &lr[pivot] / &li[pivot];
        lr.iter().zip(&li).all(|(a, b)| *a == &c * b).then_some(c)
    }

    #[test]
    fn derivations_of_examples() {
        let h3 = milnor(&[0, 0, 1]);
        assert!(is_derivation(&h3, &diag(&ints(&[1, 1, 2]))).unwrap());
        let h4 = milnor(&[0, 0, 1, 1]);
        assert!(is_derivation(&h4, &diag(&ints(&[2, 1, 3, 4]))).unwrap());
        assert!(!is_derivation(&h4, &Matrix::identity(4)).unwrap());
        assert!(is_derivation(&h4, &Matrix::zeros(4, 4)).unwrap());
        assert_eq!(derivation_space(&LieAlgebra::abelian(3)).unwrap().len(), 9);
        // h3: gl(2) on the first two vectors plus maps into the center
        assert_eq!(derivation_space(&h3).unwrap().len(), 6);
        for g in [&h3, &h4] {
            for d in derivation_space(g).unwrap() {
                assert!(is_derivation(g, &d).unwrap());
            }
        }
    }

    #[test]
    fn h3_certificate() {
        let l3 = rat(3, 2);
        let r = ricci(
            &FrameConstants::from_algebra(
                &build_cyclic(&MilnorData::cyclic(vec![int(0), int(0), l3.clone()]).unwrap())
                    .unwrap(),
            ),
            0.0,
        )
        .unwrap();
        let g =
            build_cyclic(&MilnorData::cyclic(vec![int(0), int(0), l3.clone()]).unwrap()).unwrap();
        let cert = nilsoliton_solve(&r, &g).unwrap();
        let sq = &l3 * &l3;
        assert!(cert.is_soliton);
        assert_eq!(cert.c, rat(-3, 2) * &sq);
        assert_eq!(cert.derivation, diag(&ints(&[1, 1, 2])).scale(&sq));
        assert_eq!(affine_oracle(&r, &g), Some(cert.c));
    }

    #[test]
    fn h4_decisions() {
        let g = milnor(&[0, 0, 1, 1]);
        let r = ricci(&FrameConstants::from_algebra(&g), 0.0).unwrap();
        let cert = nilsoliton_solve(&r, &g).unwrap();
        assert!(cert.is_soliton);
        assert_eq!(cert.c, rat(-3, 2));
        assert_eq!(
            cert.derivation,
            diag(&ints(&[2, 1, 3, 4])).scale(&rat(1, 2))
        );

        let g = milnor(&[0, 0, 1, 2]);
        let r = ricci(&FrameConstants::from_algebra(&g), 0.0).unwrap();
        let cert = nilsoliton_solve(&r, &g).unwrap();
        assert!(!cert.is_soliton && cert.residual > 0.0);
        assert_eq!(affine_oracle(&r, &g), None);
    }

    #[test]
    fn abelian_minimal_norm() {
        let r = diag(&ints(&[1, 2, 3]));
        let cert = nilsoliton_solve(&r, &LieAlgebra::abelian(3)).unwrap();
        assert!(cert.is_soliton);
        assert_eq!(cert.c, rat(3, 2));
    }

    #[test]
    fn criterion_examples() {
        let id = |n| InnerProduct::identity(n);
        let crit = |l: &[i64]| {
            milnor_soliton_criterion(&MilnorData::from_i64(l).unwrap(), &id(l.len())).unwrap()
        };
        assert!(crit(&[0, 0, 1, 1]).holds());
        assert!(!crit(&[0, 0, 1, 2]).h4_blocks_balanced);
        assert!(crit(&[0, 0, 1, 0, 0, 0]).holds());
        // balanced h4 blocks are not enough when block scales differ
        let c = crit(&[0, 0, 1, 0, 0, 2]);
        assert!(c.h4_blocks_balanced && !c.scales_agree);
        let g = milnor(&[0, 0, 1, 0, 0, 2]);
        let r = ricci(&FrameConstants::from_algebra(&g), 0.0).unwrap();
        assert!(!nilsoliton_solve(&r, &g).unwrap().is_soliton);
    }

    #[test]
    fn criterion_with_diagonal_metric() {
        let d = MilnorData::from_i64(&[0, 0, 1, 1]).unwrap();
        // q_3 = 4 doubles μ_3 and halves μ_4
        let metric = InnerProduct::diagonal(&ints(&[1, 1, 4, 1])).unwrap();
        let c = milnor_soliton_criterion(&d, &metric).unwrap();
        assert_eq!(c.scales_sq, vec![int(0), int(0), int(4), rat(1, 4)]);
        assert!(!c.holds());
        let m = MetricLieAlgebra::new(build_cyclic(&d).unwrap(), metric).unwrap();
        assert!(!metric_nilsoliton(&m, 1e-9, true).unwrap().is_soliton());
    }

    #[test]
    fn float_path_agrees() {
        let d = MilnorData::from_i64(&[0, 0, 1, 1]).unwrap();
        let metric = InnerProduct::diagonal(&ints(&[2, 2, 4, 8])).unwrap();
        let crit = milnor_soliton_criterion(&d, &metric).unwrap();
        let m = MetricLieAlgebra::new(build_cyclic(&d).unwrap(), metric).unwrap();
        let out = metric_nilsoliton(&m, 1e-9, false).unwrap();
        assert!(matches!(out, SolitonOutcome::Float(_)));
        assert_eq!(out.is_soliton(), crit.holds());
        assert!(crit.holds());
    }
}
