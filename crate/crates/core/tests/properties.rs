use milnor_frames::frames::{cross_product, h4_has_orthonormal_milnor};
use milnor_frames::geometry::{
    orthonormal_frame, ricci, ricci_signature, sectional_table, Frame, FrameConstants,
};
use milnor_frames::linalg::unit_vector;
use milnor_frames::milnor::{build_cyclic, decompose, normalize, shift};
use milnor_frames::scalar::{int, rat};
use milnor_frames::soliton::{
    derivation_space, is_derivation, milnor_soliton_criterion, nilsoliton_solve,
};
use milnor_frames::{
    Error, InnerProduct, LieAlgebra, Matrix, MetricLieAlgebra, MilnorData, Rational, SummandKind,
};
use proptest::prelude::*;
use proptest::sample::select;

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=12).prop_map(|(p, q)| rat(p, q))
}

fn nonzero() -> impl Strategy<Value = Rational> {
    (1i64..=20, 1i64..=12, any::<bool>()).prop_map(|(p, q, neg)| rat(if neg { -p } else { p }, q))
}

fn positive() -> impl Strategy<Value = Rational> {
    (1i64..=20, 1i64..=12).prop_map(|(p, q)| rat(p, q))
}

fn vector(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec(rational(), n)
}

/// 0/1 patterns of length 4..=7 whose Milnor algebra is a Lie algebra.
fn lie_patterns() -> Vec<Vec<bool>> {
    let mut out = Vec::new();
    for n in 4..=7usize {
        for bits in 0u32..1 << n {
            let p: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
            let d = MilnorData::cyclic(p.iter().map(|&b| int(b as i64)).collect()).unwrap();
            if build_cyclic(&d).unwrap().is_lie_algebra() {
                out.push(p);
            }
        }
    }
    out
}

/// Lie Milnor data with random nonzero values on a valid pattern.
fn milnor_data() -> impl Strategy<Value = MilnorData> {
    select(lie_patterns()).prop_flat_map(|p| {
        proptest::collection::vec(nonzero(), p.len()).prop_map(move |vals| {
            let l = p
                .iter()
                .zip(vals)
                .map(|(&on, v)| if on { v } else { int(0) })
                .collect();
            MilnorData::cyclic(l).unwrap()
        })
    })
}

fn invertible(n: usize) -> impl Strategy<Value = Matrix> {
    proptest::collection::vec(-3i64..=3, n * n)
        .prop_map(move |e| {
            Matrix::from_rows(
                e.chunks(n)
                    .map(|r| r.iter().map(|&x| int(x)).collect())
                    .collect(),
            )
            .unwrap()
        })
        .prop_filter("singular", |t| t.determinant().unwrap() != int(0))
}

/// `L Lᵀ` for lower-triangular `L` with positive diagonal.
fn metric(n: usize) -> impl Strategy<Value = InnerProduct> {
    (
        proptest::collection::vec(-3i64..=3, n * n),
        proptest::collection::vec(positive(), n),
    )
        .prop_map(move |(off, diag)| {
            let mut l = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..i {
                    l[(i, j)] = rat(off[i * n + j], 2);
                }
                l[(i, i)] = diag[i].clone();
            }
            InnerProduct::new(l.mul(&l.transpose()).unwrap()).unwrap()
        })
}

fn permutation_matrix(order: &[usize]) -> Matrix {
    let n = order.len();
    let cols: Vec<Vec<Rational>> = order.iter().map(|&i| unit_vector(n, i)).collect();
    Matrix::from_columns(&cols).unwrap()
}

fn block_shape(d: &MilnorData) -> Vec<(SummandKind, Vec<usize>)> {
    let mut v: Vec<_> = decompose(d)
        .unwrap()
        .summands
        .into_iter()
        .map(|s| {
            let mut idx = s.indices;
            idx.sort();
            (s.kind, idx)
        })
        .collect();
    v.sort_by(|a, b| a.1.cmp(&b.1));
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_is_antisymmetric(
        consts in proptest::collection::vec(rational(), 5 * 5 * 5),
        x in vector(5),
        y in vector(5),
    ) {
        let entries = (0..5).flat_map(|i| (i + 1..5).flat_map(move |j| (0..5).map(move |k| (i, j, k))));
        let g = LieAlgebra::from_structure_constants(
            5,
            entries.map(|(i, j, k)| ((i, j, k), consts[(i * 5 + j) * 5 + k].clone())),
        )
        .unwrap();
        let xy = g.bracket(&x, &y).unwrap();
        let yx = g.bracket(&y, &x).unwrap();
        prop_assert!(xy.iter().zip(&yx).all(|(a, b)| a == &-b.clone()));
    }

    #[test]
    fn jacobi_holds_on_random_vectors(
        (d, t) in milnor_data().prop_flat_map(|d| { let n = d.n(); (Just(d), invertible(n)) }),
        seed in vector(21),
    ) {
        let g = build_cyclic(&d).unwrap().change_of_basis(&t).unwrap();
        prop_assert!(g.jacobi_defect().is_empty());
        let n = g.dim();
        let (x, y, z) = (&seed[0..n], &seed[7..7 + n], &seed[14..14 + n]);
        let br = |a: &[Rational], b: &[Rational]| g.bracket(a, b).unwrap();
        let s1 = br(x, &br(y, z));
        let s2 = br(y, &br(z, x));
        let s3 = br(z, &br(x, y));
        for k in 0..n {
            prop_assert_eq!(&s1[k] + &s2[k] + &s3[k], int(0));
        }
    }

    #[test]
    fn change_of_basis_round_trip(
        (d, t) in milnor_data().prop_flat_map(|d| { let n = d.n(); (Just(d), invertible(n)) }),
    ) {
        let g = build_cyclic(&d).unwrap();
        let back = g
            .change_of_basis(&t)
            .unwrap()
            .change_of_basis(&t.inverse().unwrap())
            .unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn central_series_and_killing_form(
        (d, t) in milnor_data().prop_flat_map(|d| { let n = d.n(); (Just(d), invertible(n)) }),
    ) {
        let g = build_cyclic(&d).unwrap().change_of_basis(&t).unwrap();
        let series = g.lower_central_series();
        let dims = series.dims();
        prop_assert!(dims.windows(2).all(|w| w[0] > w[1]));
        let b = g.killing_form();
        prop_assert!(b.is_symmetric());
        prop_assert!(series.is_nilpotent() && b.is_zero());
    }

    #[test]
    fn decomposition_reassembles(d in milnor_data()) {
        let g = build_cyclic(&d).unwrap();
        let dec = decompose(&d).unwrap();
        let order: Vec<usize> = dec.summands.iter().flat_map(|s| s.indices.clone()).collect();
        let mut parts = dec.summands.iter().map(|s| g.restrict(&s.indices).unwrap());
        let first = parts.next().unwrap();
        let sum = parts.fold(first, |acc, p| acc.direct_sum(&p));
        prop_assert_eq!(g.change_of_basis(&permutation_matrix(&order)).unwrap(), sum);
        for a in &dec.summands {
            for b in &dec.summands {
                if a.indices != b.indices {
                    for &i in &a.indices {
                        for &j in &b.indices {
                            prop_assert!(g.basis_bracket(i, j).iter().all(|c| c == &int(0)));
                        }
                    }
                }
            }
        }
        prop_assert!(g.nilpotency_step().unwrap() <= 3);
    }

    #[test]
    fn normalize_is_an_isomorphism(d in milnor_data()) {
        let (normal, t) = normalize(&d).unwrap();
        let g = build_cyclic(&d).unwrap();
        let h = build_cyclic(&normal).unwrap();
        prop_assert!(normal.is_normalized());
        prop_assert_eq!(g.change_of_basis(&t).unwrap(), h.clone());
        prop_assert_eq!(g.lower_central_series().dims(), h.lower_central_series().dims());
    }

    #[test]
    fn decompose_commutes_with_shift(d in milnor_data(), ell in -10isize..10) {
        let n = d.n();
        let shifted = shift(&d, ell).unwrap();
        let relabel = |i: usize| (i as isize + ell).rem_euclid(n as isize) as usize;
        let mut expected: Vec<_> = block_shape(&d)
            .into_iter()
            .map(|(k, idx)| {
                let mut idx: Vec<usize> = idx.into_iter().map(relabel).collect();
                idx.sort();
                (k, idx)
            })
            .collect();
        expected.sort_by(|a, b| a.1.cmp(&b.1));
        prop_assert_eq!(block_shape(&shifted), expected);
    }

    #[test]
    fn ricci_row_sums_and_diagonal(d in milnor_data()) {
        let fc = FrameConstants::from_algebra(&build_cyclic(&d).unwrap());
        let ric = ricci(&fc, 0.0).unwrap();
        let kappa = sectional_table(&fc);
        prop_assert!(ric.is_diagonal());
        if d.n() == 4 {
            for i in 0..4 {
                let row: Rational = (0..4).map(|j| kappa[(i, j)].clone()).sum();
                prop_assert_eq!(&ric[(i, i)], &row);
            }
        }
    }

    #[test]
    fn metric_scaling_divides_curvature(d in milnor_data(), t in positive()) {
        let g = build_cyclic(&d).unwrap();
        let n = g.dim();
        let s = &t * &t;
        let base = MetricLieAlgebra::new(g.clone(), InnerProduct::identity(n)).unwrap();
        let scaled = MetricLieAlgebra::new(g, InnerProduct::identity(n).scaled(&s).unwrap()).unwrap();
        let (Frame::Exact(a), Frame::Exact(b)) = (
            orthonormal_frame(&base, 1e-9, true).unwrap(),
            orthonormal_frame(&scaled, 1e-9, true).unwrap(),
        ) else {
            return Err(TestCaseError::fail("expected exact frames"));
        };
        let inv = Rational::from_integer(1.into()) / &s;
        prop_assert_eq!(ricci(&b.constants, 0.0).unwrap(), ricci(&a.constants, 0.0).unwrap().scale(&inv));
        prop_assert_eq!(sectional_table(&b.constants), sectional_table(&a.constants).scale(&inv));
    }

    #[test]
    fn no_einstein_metrics(d in milnor_data()) {
        prop_assume!(d.lambdas().iter().any(|l| l != &int(0)));
        let fc = FrameConstants::from_algebra(&build_cyclic(&d).unwrap());
        let (_, sig) = ricci_signature(&ricci(&fc, 0.0).unwrap()).unwrap();
        prop_assert!(sig.negative > 0 && sig.positive > 0);
    }

    #[test]
    fn cross_product_norm_identity(g in metric(3), x in vector(3), y in vector(3)) {
        let w = cross_product(&g, &x, &y, 1).unwrap();
        let lhs = w.norm_sq(&g);
        let rhs = g.inner(&x, &x) * g.inner(&y, &y) - g.inner(&x, &y) * g.inner(&x, &y);
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(g.inner(&w.direction, &x), int(0));
        prop_assert_eq!(g.inner(&w.direction, &y), int(0));
    }

    #[test]
    fn h4_criterion_is_isometry_invariant(g in metric(4), t in invertible(4)) {
        let alg = build_cyclic(&MilnorData::from_i64(&[0, 0, 1, 1]).unwrap()).unwrap();
        let before = h4_has_orthonormal_milnor(&MetricLieAlgebra::new(alg.clone(), g.clone()).unwrap()).unwrap();
        let pulled = InnerProduct::new(t.transpose().mul(g.gram()).unwrap().mul(&t).unwrap()).unwrap();
        let after = h4_has_orthonormal_milnor(
            &MetricLieAlgebra::new(alg.change_of_basis(&t).unwrap(), pulled).unwrap(),
        )
        .unwrap();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn derivation_basis_is_valid(
        (d, t) in milnor_data().prop_flat_map(|d| { let n = d.n(); (Just(d), invertible(n)) }),
    ) {
        let g = build_cyclic(&d).unwrap().change_of_basis(&t).unwrap();
        for m in derivation_space(&g).unwrap() {
            prop_assert!(is_derivation(&g, &m).unwrap());
        }
    }

    #[test]
    fn block_criterion_matches_solver(d in milnor_data()) {
        let g = build_cyclic(&d).unwrap();
        let n = g.dim();
        let crit = milnor_soliton_criterion(&d, &InnerProduct::identity(n));
        let crit = match crit {
            Err(Error::ThreeDimensionalGeneralCase) => return Ok(()),
            other => other.unwrap(),
        };
        let r = ricci(&FrameConstants::from_algebra(&g), 0.0).unwrap();
        prop_assert_eq!(crit.holds(), nilsoliton_solve(&r, &g).unwrap().is_soliton);
    }

    #[test]
    fn soliton_decision_is_frame_invariant(
        d in milnor_data().prop_filter("n = 4", |d| d.n() == 4),
        skew in proptest::collection::vec(-3i64..=3, 6),
    ) {
        // Cayley transform of a rational skew matrix is rational orthogonal.
        let mut a = Matrix::zeros(4, 4);
        let mut it = skew.iter();
        for i in 0..4 {
            for j in i + 1..4 {
                let v = rat(*it.next().unwrap(), 2);
                a[(i, j)] = v.clone();
                a[(j, i)] = -v;
            }
        }
        let id = Matrix::identity(4);
        let q = id.sub(&a).unwrap().mul(&id.add(&a).unwrap().inverse().unwrap()).unwrap();
        prop_assert_eq!(q.transpose().mul(&q).unwrap(), id);

        let g = build_cyclic(&d).unwrap();
        let r = ricci(&FrameConstants::from_algebra(&g), 0.0).unwrap();
        let rotated = q.transpose().mul(&r).unwrap().mul(&q).unwrap();
        let g_rot = g.change_of_basis(&q).unwrap();
        prop_assert_eq!(
            nilsoliton_solve(&r, &g).unwrap().is_soliton,
            nilsoliton_solve(&rotated, &g_rot).unwrap().is_soliton
        );
    }
}
