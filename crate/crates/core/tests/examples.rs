mod common;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use common::{ints, r};
use torb::bundle::{build_simplex_bundle, extract_twist, recognize_bundle, SimplexBundleSpec, SimplexTwist};
use torb::cohomology::{
    betti_numbers, bundle_ring, fh_transform, find_product_generators, is_ring_product, sr_presentation,
    CohomologyError, Direction, ProductCase,
};
use torb::constructors::{
    football, labeled_projective_space, orbifold_projective_local_groups, product, simplex,
    weighted_projective_polytope, wps_labels, wps_slant, ConstructorError, SPData, WeightVector,
};
use torb::labeled::{
    delzant_data, equivalent, orbifold_group_of_face, singularity_profile, validate, EquivalenceMode, LabeledPolytope,
    ValidationIssue,
};
use torb::lattice::{cokernel, lattice_basis_from_generators, smith_normal_form, IntMatrix};
use torb::polytope::{combinatorially_equivalent, factor_as_simplex_product, HPolytope, Halfspace};
use torb::quotient::{cover_polytope, quotient_polytope, subgroup_order, QuotientError, TorusSubgroup};

fn set(xs: &[usize]) -> BTreeSet<usize> {
    xs.iter().copied().collect()
}

fn pt(xs: &[(i64, i64)]) -> Vec<BigRational> {
    xs.iter().map(|&(n, d)| r(n, d)).collect()
}

fn fb(p: i64, q: i64) -> LabeledPolytope {
    football(&p.into(), &q.into()).unwrap()
}

fn square() -> LabeledPolytope {
    let cp1 = simplex(1).unwrap();
    product(&cp1, &cp1)
}

fn quad() -> LabeledPolytope {
    LabeledPolytope::from_i64(
        2,
        &[
            (&[0, -1], r(0, 1), 1),
            (&[0, 1], r(1, 1), 1),
            (&[-2, -1], r(0, 1), 1),
            (&[2, 1], r(1, 1), 1),
        ],
    )
    .unwrap()
}

#[test]
fn smith_examples() {
    let id = IntMatrix::identity(2);
    let snf = smith_normal_form(&id);
    assert_eq!(snf.d, id);
    assert!(snf.invariant_factors().is_empty());

    let a = IntMatrix::from_i64_rows(&[&[2, 0], &[1, 1]]);
    assert_eq!(smith_normal_form(&a).diagonal(), ints(&[1, 2]));
    assert_eq!(cokernel(&a).invariant_factors(), &ints(&[2])[..]);

    let b = IntMatrix::from_i64_rows(&[&[4, 0], &[0, 6]]);
    assert_eq!(smith_normal_form(&b).diagonal(), ints(&[2, 12]));
    assert_eq!(cokernel(&b).order(), Some(BigInt::from(24)));

    assert!(cokernel(&id).is_trivial());
    let singular = IntMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]);
    assert!(cokernel(&singular).free_rank() >= 1);
    assert_eq!(cokernel(&singular).order(), None);
}

#[test]
fn lattice_examples() {
    let (basis, index) = lattice_basis_from_generators(2, &[]).unwrap();
    assert_eq!(basis, IntMatrix::identity(2).to_rat());
    assert_eq!(index, BigInt::one());

    let (basis, index) = lattice_basis_from_generators(2, &[pt(&[(1, 2), (1, 2)])]).unwrap();
    assert_eq!(index, BigInt::from(2));
    assert_eq!(basis.determinant().abs(), r(1, 2));

    let (_, index) = lattice_basis_from_generators(2, &[pt(&[(1, 2), (0, 1)]), pt(&[(0, 1), (1, 3)])]).unwrap();
    assert_eq!(index, BigInt::from(6));
}

#[test]
fn vertex_examples() {
    assert_eq!(
        square().vertices(),
        &[
            pt(&[(0, 1), (0, 1)]),
            pt(&[(0, 1), (1, 1)]),
            pt(&[(1, 1), (0, 1)]),
            pt(&[(1, 1), (1, 1)])
        ]
    );
    assert_eq!(
        simplex(2).unwrap().vertices(),
        &[pt(&[(0, 1), (0, 1)]), pt(&[(0, 1), (1, 1)]), pt(&[(1, 1), (0, 1)])]
    );
    let mut want = [
        pt(&[(0, 1), (0, 1)]),
        pt(&[(1, 2), (0, 1)]),
        pt(&[(-1, 2), (1, 1)]),
        pt(&[(0, 1), (1, 1)]),
    ];
    want.sort();
    assert_eq!(quad().vertices(), &want[..]);
}

#[test]
fn f_vector_examples() {
    assert_eq!(simplex(2).unwrap().geometry().f_vector(), vec![3, 3, 1]);
    assert_eq!(square().geometry().f_vector(), vec![4, 4, 1]);
    let prism = product(&simplex(1).unwrap(), &simplex(2).unwrap());
    assert_eq!(prism.geometry().f_vector(), vec![6, 9, 5, 1]);
}

#[test]
fn combinatorial_examples() {
    let sq = square();
    assert_eq!(
        combinatorially_equivalent(sq.geometry(), sq.geometry()),
        Some(vec![0, 1, 2, 3])
    );
    assert!(combinatorially_equivalent(sq.geometry(), quad().geometry()).is_some());
    assert!(combinatorially_equivalent(sq.geometry(), simplex(2).unwrap().geometry()).is_none());

    let f = factor_as_simplex_product(sq.geometry()).unwrap();
    assert_eq!((f.k1, f.k2), (1, 1));
    assert_eq!(set(&f.first), set(&[0, 1]));
    assert_eq!(set(&f.second), set(&[2, 3]));
    let f = factor_as_simplex_product(quad().geometry()).unwrap();
    assert_eq!(set(&f.first), set(&[0, 1]));
    assert_eq!(set(&f.second), set(&[2, 3]));
    assert!(factor_as_simplex_product(simplex(2).unwrap().geometry()).is_none());
}

#[test]
fn validation_examples() {
    let s = simplex(2).unwrap();
    assert!(validate(2, s.geometry().halfspaces(), &ints(&[1, 1, 1])).is_ok());
    let hs = square().geometry().halfspaces().to_vec();
    let issues = validate(2, &hs, &ints(&[1, 0, 1, 1])).unwrap_err();
    assert!(issues.contains(&ValidationIssue::NonpositiveLabel(1)));
    let mut bad = hs.clone();
    bad[1] = Halfspace::from_i64(&[2, 0], r(2, 1));
    let issues = validate(2, &bad, &ints(&[1, 1, 1, 1])).unwrap_err();
    assert!(
        issues.contains(&ValidationIssue::NonPrimitiveConormal(1))
            || issues.iter().any(|i| matches!(i, ValidationIssue::Geometry(_)))
    );
}

#[test]
fn orbifold_group_examples() {
    let cp2 = simplex(2).unwrap();
    for inc in &cp2.geometry().vertex_data().incidence {
        assert!(orbifold_group_of_face(&cp2, inc).unwrap().is_trivial());
    }
    let s = square().with_labels(ints(&[5, 1, 1, 1])).unwrap();
    let g = orbifold_group_of_face(&s, &set(&[0])).unwrap();
    assert_eq!(g.invariant_factors(), &ints(&[5])[..]);
}

#[test]
fn singularity_examples() {
    let cp1 = simplex(1).unwrap();
    let p = singularity_profile(&cp1);
    assert!(p.entries.iter().all(|e| e.orbifold_order.is_one()));
    assert!(!p.has_locally_maximal_singular_vertex);

    let f = fb(2, 2);
    let p = singularity_profile(&f);
    assert_eq!(p.order_of(&set(&[0])), Some(&BigInt::from(2)));
    assert_eq!(p.order_of(&set(&[1])), Some(&BigInt::from(2)));
    assert_eq!(p.order_of(&set(&[])), Some(&BigInt::one()));
    assert!(p.has_locally_maximal_singular_vertex);

    // Corner orders are 2 but each corner lies on an edge of order 2 as
    // well, so no vertex is strictly larger than all faces through it.
    let p = singularity_profile(&product(&f, &cp1));
    for v in p.entries.iter().filter(|e| e.dim == 0) {
        assert_eq!(v.orbifold_order, BigInt::from(2));
    }
    assert!(!p.has_locally_maximal_singular_vertex);
}

#[test]
fn equivalence_examples() {
    let sq = square();
    let moved = sq.translate(&pt(&[(1, 1), (1, 1)]));
    let e = equivalent(&sq, &moved, EquivalenceMode::Translation).unwrap();
    assert_eq!(e.translation, pt(&[(1, 1), (1, 1)]));

    let shear = IntMatrix::from_i64_rows(&[&[1, 0], &[1, 1]]);
    let sheared = sq.transform(&shear, &pt(&[(0, 1), (0, 1)]));
    assert!(equivalent(&sq, &sheared, EquivalenceMode::Translation).is_none());
    let e = equivalent(&sq, &sheared, EquivalenceMode::Unimodular).unwrap();
    for i in 0..4 {
        assert_eq!(e.matrix.mul_vec(sq.conormal(i)), sheared.conormal(e.facet_map[i]));
    }

    for mode in [EquivalenceMode::Translation, EquivalenceMode::Unimodular] {
        assert!(equivalent(&fb(2, 2), &fb(2, 3), mode).is_none());
    }
}

#[test]
fn delzant_examples() {
    let d = delzant_data(&simplex(1).unwrap());
    assert_eq!(d.beta, IntMatrix::from_i64_rows(&[&[-1, 1]]));
    assert_eq!(d.kernel_basis, vec![ints(&[1, 1])]);

    let d = delzant_data(&simplex(2).unwrap());
    assert_eq!(d.beta, IntMatrix::from_i64_rows(&[&[-1, 0, 1], &[0, -1, 1]]));
    assert_eq!(d.kernel_basis, vec![ints(&[1, 1, 1])]);

    for (p, q, k) in [(2, 3, [3, 2]), (2, 2, [1, 1]), (4, 6, [3, 2])] {
        let d = delzant_data(&fb(p, q));
        assert_eq!(d.beta, IntMatrix::from_i64_rows(&[&[-p, q]]));
        assert_eq!(d.kernel_basis, vec![ints(&k)]);
    }
}

#[test]
fn projective_examples() {
    for n in 1..=3 {
        let p = labeled_projective_space(&SPData::from_i64(&vec![1; n], &vec![1; n + 1]).unwrap()).unwrap();
        assert_eq!(p, simplex(n).unwrap());
    }
    let f = labeled_projective_space(&SPData::from_i64(&[1], &[3, 5]).unwrap()).unwrap();
    assert_eq!(f, fb(3, 5));
    assert_eq!(f.labels(), &ints(&[3, 5])[..]);

    let p = labeled_projective_space(&SPData::from_i64(&[1, 2], &[1, 1, 1]).unwrap()).unwrap();
    assert_eq!(p.conormal(2), &ints(&[1, 2])[..]);
    assert_eq!(
        p.vertices(),
        &[pt(&[(0, 1), (0, 1)]), pt(&[(0, 1), (1, 2)]), pt(&[(1, 1), (0, 1)])]
    );
}

#[test]
fn weighted_projective_examples() {
    let l = WeightVector::from_i64(&[1, 1, 1]).unwrap();
    assert_eq!(weighted_projective_polytope(&l).unwrap(), simplex(2).unwrap());

    let l = WeightVector::from_i64(&[1, 2, 3]).unwrap();
    let p = weighted_projective_polytope(&l).unwrap();
    assert_eq!(p.conormal(2), &ints(&[3, 2])[..]);
    assert_eq!(p.labels(), &ints(&[1, 1, 1])[..]);

    assert_eq!(
        WeightVector::from_i64(&[2, 2, 4]),
        Err(ConstructorError::NonCoprimeWeights)
    );
    let l = WeightVector::from_i64(&[6, 2, 3]).unwrap();
    assert_eq!(wps_labels(&l), ints(&[1, 3, 2]));
    assert_eq!(wps_slant(&l), ints(&[3, 2]));

    let g = orbifold_projective_local_groups(&WeightVector::from_i64(&[1, 1]).unwrap());
    assert_eq!((g.orders, g.gamma_order), (ints(&[1, 1]), BigInt::one()));
    let g = orbifold_projective_local_groups(&WeightVector::from_i64(&[2, 3]).unwrap());
    assert_eq!((g.orders, g.gamma_order), (ints(&[3, 2]), BigInt::one()));
    let g = orbifold_projective_local_groups(&WeightVector::from_i64(&[1, 2, 3]).unwrap());
    assert_eq!((g.orders, g.gamma_order), (ints(&[6, 3, 2]), BigInt::from(6)));
}

#[test]
fn product_examples() {
    let cp1 = simplex(1).unwrap();
    let sq = product(&cp1, &cp1);
    assert_eq!(sq.facet_count(), 4);
    assert!(sq.labels().iter().all(One::is_one));
    assert_eq!(product(&fb(2, 2), &cp1).labels(), &ints(&[2, 2, 1, 1])[..]);
}

#[test]
fn bundle_build_examples() {
    let cp1 = simplex(1).unwrap();
    let cp2 = simplex(2).unwrap();
    let trivial = build_simplex_bundle(&SimplexBundleSpec::new(&cp1, &cp2, SimplexTwist::trivial(1, 2))).unwrap();
    assert!(equivalent(&trivial, &product(&cp1, &cp2), EquivalenceMode::Unimodular).is_some());

    let base = fb(2, 2);
    let spec = SimplexBundleSpec {
        fiber: &cp1,
        base: &base,
        twist: SimplexTwist::from_i64(1, 1, &[1]).unwrap(),
        label_divisors: ints(&[1, 1]),
        coordinate_lifts: vec![ints(&[-1])],
        offsets: Some(vec![r(0, 1), r(1, 1), r(0, 1), r(1, 1)]),
    };
    let total = build_simplex_bundle(&spec).unwrap();
    assert!(equivalent(&total, &quad(), EquivalenceMode::Unimodular).is_some());

    let hirzebruch = build_simplex_bundle(&SimplexBundleSpec::new(
        &cp1,
        &cp1,
        SimplexTwist::from_i64(1, 1, &[-1]).unwrap(),
    ))
    .unwrap();
    assert_eq!(
        hirzebruch.vertices(),
        &[
            pt(&[(0, 1), (0, 1)]),
            pt(&[(0, 1), (1, 1)]),
            pt(&[(1, 1), (0, 1)]),
            pt(&[(1, 1), (2, 1)])
        ]
    );
    assert!(hirzebruch.labels().iter().all(One::is_one));
}

#[test]
fn bundle_recognition_examples() {
    let cp1 = simplex(1).unwrap();
    let base = fb(2, 2);
    let data = recognize_bundle(&product(&cp1, &base), &cp1, &base).unwrap();
    assert!(data.is_trivial());
    for lift in &data.base_facet_lifts {
        assert_eq!(lift.label, lift.base_label);
    }

    let data = recognize_bundle(&quad(), &cp1, &base).unwrap();
    for (j, lift) in data.base_facet_lifts.iter().enumerate() {
        assert_eq!(lift.label, BigInt::one());
        let doubled: Vec<BigInt> = base.conormal(j).iter().map(|c| c * 2).collect();
        assert_eq!(data.pi.mul_vec(&lift.conormal), doubled);
    }

    assert!(recognize_bundle(&simplex(2).unwrap(), &cp1, &cp1).is_none());
}

#[test]
fn twist_extraction_examples() {
    let cp1 = simplex(1).unwrap();
    let cp2 = simplex(2).unwrap();
    assert!(extract_twist(&product(&cp1, &cp2)).unwrap().is_trivial());
    let build = |f: &LabeledPolytope, b: &LabeledPolytope, t: SimplexTwist| {
        build_simplex_bundle(&SimplexBundleSpec::new(f, b, t)).unwrap()
    };
    let h = build(&cp1, &cp1, SimplexTwist::from_i64(1, 1, &[-1]).unwrap());
    assert_eq!(extract_twist(&h).unwrap().a, ints(&[-1]));
    // The (2, 0) bundle is unimodularly equivalent to the (-2, -2) one.
    let t = build(&cp2, &cp2, SimplexTwist::from_i64(2, 2, &[2, 0]).unwrap());
    assert_eq!(extract_twist(&t).unwrap().a, ints(&[-2, -2]));
    let other = build(&cp2, &cp2, SimplexTwist::from_i64(2, 2, &[-2, -2]).unwrap());
    assert!(equivalent(&t, &other, EquivalenceMode::Unimodular).is_some());
}

#[test]
fn quotient_examples() {
    let g = TorusSubgroup::trivial(2);
    assert_eq!(subgroup_order(&g), BigInt::one());
    assert_eq!(quotient_polytope(&square(), &g).unwrap(), square());
    let g = TorusSubgroup::new(2, vec![pt(&[(1, 2), (1, 2)])]).unwrap();
    assert_eq!(subgroup_order(&g), BigInt::from(2));
    let q = quotient_polytope(&square(), &g).unwrap();
    assert!(equivalent(&q, &quad(), EquivalenceMode::Unimodular).is_some());
    let g = TorusSubgroup::new(2, vec![pt(&[(1, 2), (0, 1)]), pt(&[(0, 1), (1, 3)])]).unwrap();
    assert_eq!(subgroup_order(&g), BigInt::from(6));

    let cp1 = simplex(1).unwrap();
    let half = TorusSubgroup::new(1, vec![pt(&[(1, 2)])]).unwrap();
    let f = quotient_polytope(&cp1, &half).unwrap();
    assert_eq!(f.vertices(), &[pt(&[(0, 1)]), pt(&[(1, 2)])]);
    assert_eq!(f.labels(), &ints(&[2, 2])[..]);
    let unit = fb(2, 2);
    for i in 0..2 {
        assert_eq!(f.conormal(i), unit.conormal(i));
    }
}

#[test]
fn cover_examples() {
    assert_eq!(cover_polytope(&square(), &IntMatrix::identity(2)).unwrap(), square());
    let up = cover_polytope(&fb(2, 2), &IntMatrix::from_i64_rows(&[&[2]])).unwrap();
    assert_eq!(up.labels(), &ints(&[1, 1])[..]);
    let back = quotient_polytope(&up, &TorusSubgroup::new(1, vec![pt(&[(1, 2)])]).unwrap()).unwrap();
    assert!(equivalent(&back, &fb(2, 2), EquivalenceMode::Translation).is_some());

    // (0, -1) is not in the span of (1, 0) and (0, 3).
    let basis = IntMatrix::from_i64_rows(&[&[1, 0], &[0, 3]]);
    assert!(matches!(
        cover_polytope(&square(), &basis),
        Err(QuotientError::NotACover(2))
    ));
    let s = square().with_labels(ints(&[1, 1, 3, 3])).unwrap();
    let up = cover_polytope(&s, &basis).unwrap();
    assert!(up.labels().iter().all(One::is_one));
    assert_eq!(up.vertices().last().unwrap(), &pt(&[(1, 1), (3, 1)]));
}

#[test]
fn fh_examples() {
    assert_eq!(
        fh_transform(&ints(&[3, 3, 1]), Direction::FToH).unwrap().h,
        ints(&[1, 1, 1])
    );
    assert_eq!(
        fh_transform(&ints(&[4, 4, 1]), Direction::FToH).unwrap().h,
        ints(&[1, 2, 1])
    );
    assert_eq!(
        fh_transform(&ints(&[1, 2, 2, 1]), Direction::HToF).unwrap().f,
        ints(&[6, 9, 5, 1])
    );
}

#[test]
fn betti_examples() {
    for n in 1..=3 {
        let b = betti_numbers(&simplex(n).unwrap());
        let want: Vec<BigInt> = (0..=2 * n).map(|i| BigInt::from(i64::from(i % 2 == 0))).collect();
        assert_eq!(b, want);
    }
    assert_eq!(betti_numbers(&fb(2, 5)), ints(&[1, 0, 1]));
    let prism = product(&simplex(1).unwrap(), &simplex(2).unwrap());
    assert_eq!(betti_numbers(&prism), ints(&[1, 0, 2, 0, 2, 0, 1]));
}

#[test]
fn presentation_examples() {
    let sr = sr_presentation(&simplex(2).unwrap()).unwrap();
    assert_eq!(sr.monomial_relations, vec![set(&[0, 1, 2])]);
    assert_eq!(sr.linear_relations.len(), 2);
    let sr = sr_presentation(&square()).unwrap();
    assert_eq!(sr.monomial_relations, vec![set(&[0, 1]), set(&[2, 3])]);
    assert_eq!(sr.linear_relations.len(), 2);
    assert!(matches!(sr_presentation(&fb(2, 2)), Err(CohomologyError::NotSmooth(_))));
}

#[test]
fn ring_examples() {
    let ring = bundle_ring(2, 3, &ints(&[0, 0])).unwrap();
    let (a, b) = (ring.monomial(1, 0), ring.monomial(0, 1));
    assert!(ring.pow(&a, 4).is_zero());
    assert!(ring.pow(&b, 3).is_zero());
    assert!(!ring.pow(&a, 3).is_zero());

    let ring = bundle_ring(1, 1, &ints(&[-1])).unwrap();
    let b = ring.monomial(0, 1);
    assert_eq!(ring.mul(&b, &b), ring.monomial(1, 1));

    let ring = bundle_ring(2, 2, &ints(&[-1, -1])).unwrap();
    assert_eq!(ring.sigma, ints(&[-2, 1]));
    let b = ring.monomial(0, 1);
    assert_eq!(ring.display(&ring.pow(&b, 3)), "2ab^2 - a^2b");
}

#[test]
fn generator_search_examples() {
    for (k1, k2) in [(1, 1), (2, 3), (3, 2)] {
        let ring = bundle_ring(k1, k2, &vec![BigInt::zero(); k1]).unwrap();
        assert_eq!(find_product_generators(&ring, 5), Some((1, 0, 0, 1)));
    }
    let ring = bundle_ring(1, 1, &ints(&[-1])).unwrap();
    assert_eq!(find_product_generators(&ring, 5), None);
    let ring = bundle_ring(1, 1, &ints(&[-2])).unwrap();
    let found = find_product_generators(&ring, 5).unwrap();
    let (c, d) = (BigInt::from(found.2), BigInt::from(found.3));
    assert!(ring.pow(&ring.linear(&c, &d), 2).is_zero());
    let beta_minus_alpha = ring.linear(&BigInt::from(-1), &BigInt::one());
    assert!(ring.pow(&beta_minus_alpha, 2).is_zero());
}

#[test]
fn ring_product_examples() {
    assert!(is_ring_product(2, 2, &ints(&[0, 0])).unwrap().is_product);

    let report = is_ring_product(2, 3, &ints(&[-1, 0])).unwrap();
    assert!(!report.is_product);
    assert_eq!(report.case, ProductCase::BaseLarger);
    assert_eq!(report.to_string(), "not product; Case 2: σ₁ = −1 ≠ 0");

    let report = is_ring_product(3, 2, &ints(&[-1, -1, -1])).unwrap();
    assert!(!report.is_product);
    assert_eq!(report.case, ProductCase::FiberLarger);
    assert_eq!(report.sigma[0], BigInt::from(-3));
    assert!(
        report.detail.contains("need C with 4C = −3, no integer C"),
        "{}",
        report.detail
    );
}

#[test]
fn hpolytope_rejects_redundancy() {
    let mut hs = square().geometry().halfspaces().to_vec();
    hs.push(Halfspace::from_i64(&[1, 1], r(5, 1)));
    assert!(HPolytope::new(2, hs).is_err());
}
