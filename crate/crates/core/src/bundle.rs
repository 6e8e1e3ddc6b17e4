//! Labeled orbifold bundle polytopes: construction over simplices,
//! recognition against a given fiber and base, and twist extraction.

use std::ops::ControlFlow;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::constructors::product;
use crate::labeled::{LabeledError, LabeledPolytope, ValidationIssue};
use crate::lattice::{content, smith_normal_form, to_rat_vec, IntMatrix, RatMatrix};
use crate::polytope::{
    combinatorially_equivalent, factor_as_simplex_product, for_each_combinatorial_isomorphism, Halfspace, PolytopeError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BundleError {
    #[error("label divisor {divisor} of base facet {facet} does not divide the base label {label}")]
    DivisibilityViolation {
        facet: usize,
        divisor: BigInt,
        label: BigInt,
    },
    #[error("offsets yield an unbounded polytope")]
    UnboundedResult,
    #[error("offsets do not yield a polytope combinatorially equivalent to fiber x base")]
    InvalidOffsets,
    #[error("{0} is not a simplex in standard position")]
    NotASimplex(&'static str),
    #[error("expected {expected} values for {what}, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("lifted conormal of base facet {0} is not primitive")]
    NonPrimitiveLift(usize),
    #[error("polytope is not a bundle of simplices over simplices")]
    NotASimplexBundle,
    #[error(transparent)]
    Labeled(#[from] LabeledError),
}

/// Twist tuple of a bundle whose fiber is a `k1`-simplex and whose base is
/// a `k2`-simplex: the base slant lifts to `(a, v_base)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimplexTwist {
    pub k1: usize,
    pub k2: usize,
    pub a: Vec<BigInt>,
}

impl SimplexTwist {
    pub fn new(k1: usize, k2: usize, a: Vec<BigInt>) -> Result<Self, BundleError> {
        if a.len() != k1 {
            return Err(BundleError::LengthMismatch {
                what: "twist entries",
                expected: k1,
                found: a.len(),
            });
        }
        Ok(SimplexTwist { k1, k2, a })
    }

    pub fn from_i64(k1: usize, k2: usize, a: &[i64]) -> Result<Self, BundleError> {
        Self::new(k1, k2, a.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn trivial(k1: usize, k2: usize) -> Self {
        SimplexTwist {
            k1,
            k2,
            a: vec![BigInt::zero(); k1],
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.a.iter().all(Zero::is_zero)
    }

    /// Canonical representative: choosing another fiber facet as the slant
    /// shifts `(a_1, ..., a_k1, 0)` by a constant, and reordering fiber
    /// coordinates permutes it. The representative has every entry `<= 0`
    /// and is sorted ascending.
    pub fn normalized(&self) -> SimplexTwist {
        let mut all: Vec<BigInt> = self.a.clone();
        all.push(BigInt::zero());
        let max = all.iter().max().cloned().unwrap_or_default();
        let mut shifted: Vec<BigInt> = all.iter().map(|x| x - &max).collect();
        shifted.sort();
        shifted.pop();
        SimplexTwist {
            k1: self.k1,
            k2: self.k2,
            a: shifted,
        }
    }
}

/// Inputs of [`build_simplex_bundle`].
#[derive(Debug, Clone)]
pub struct SimplexBundleSpec<'a> {
    /// `k1`-simplex with facets `-e_1, ..., -e_k1` then its slant.
    pub fiber: &'a LabeledPolytope,
    /// `k2`-simplex in the same standard position.
    pub base: &'a LabeledPolytope,
    pub twist: SimplexTwist,
    /// Total-space label `b_j` of the facet over base facet `j`.
    pub label_divisors: Vec<BigInt>,
    /// Fiber components of the lifts of the base coordinate facets; empty
    /// means all zero.
    pub coordinate_lifts: Vec<Vec<BigInt>>,
    /// Offsets of all total-space facets (fiber facets first); `None`
    /// derives them from the fiber and base offsets.
    pub offsets: Option<Vec<BigRational>>,
}

impl<'a> SimplexBundleSpec<'a> {
    /// Bundle with unit divisors replaced by the base labels, so every lift
    /// projects exactly onto the base conormal.
    pub fn new(fiber: &'a LabeledPolytope, base: &'a LabeledPolytope, twist: SimplexTwist) -> Self {
        SimplexBundleSpec {
            fiber,
            base,
            twist,
            label_divisors: base.labels().to_vec(),
            coordinate_lifts: Vec::new(),
            offsets: None,
        }
    }
}

fn check_standard_simplex(p: &LabeledPolytope, what: &'static str) -> Result<(), BundleError> {
    let k = p.dim();
    if p.facet_count() != k + 1 {
        return Err(BundleError::NotASimplex(what));
    }
    for i in 0..k {
        let ok = p
            .conormal(i)
            .iter()
            .enumerate()
            .all(|(j, c)| if i == j { *c == BigInt::from(-1) } else { c.is_zero() });
        if !ok {
            return Err(BundleError::NotASimplex(what));
        }
    }
    Ok(())
}

/// Labeled polytope of a bundle of simplices over a simplex. Coordinates are
/// `(fiber, base)`; facets are the fiber coordinate facets, the fiber slant,
/// the lifts of the base coordinate facets and the lift of the base slant.
pub fn build_simplex_bundle(spec: &SimplexBundleSpec<'_>) -> Result<LabeledPolytope, BundleError> {
    let (fiber, base) = (spec.fiber, spec.base);
    check_standard_simplex(fiber, "fiber")?;
    check_standard_simplex(base, "base")?;
    let (k1, k2) = (fiber.dim(), base.dim());
    let n = k1 + k2;
    if spec.twist.k1 != k1 || spec.twist.a.len() != k1 || spec.twist.k2 != k2 {
        return Err(BundleError::LengthMismatch {
            what: "twist entries",
            expected: k1,
            found: spec.twist.a.len(),
        });
    }
    if spec.label_divisors.len() != k2 + 1 {
        return Err(BundleError::LengthMismatch {
            what: "label divisors",
            expected: k2 + 1,
            found: spec.label_divisors.len(),
        });
    }
    let lifts: Vec<Vec<BigInt>> = if spec.coordinate_lifts.is_empty() {
        vec![vec![BigInt::zero(); k1]; k2]
    } else {
        spec.coordinate_lifts.clone()
    };
    if lifts.len() != k2 || lifts.iter().any(|t| t.len() != k1) {
        return Err(BundleError::LengthMismatch {
            what: "coordinate lifts",
            expected: k2,
            found: lifts.len(),
        });
    }
    let mut ratios = Vec::with_capacity(k2 + 1);
    for (j, b) in spec.label_divisors.iter().enumerate() {
        let a = base.label(j);
        if !b.is_positive() || !a.is_multiple_of(b) {
            return Err(BundleError::DivisibilityViolation {
                facet: j,
                divisor: b.clone(),
                label: a.clone(),
            });
        }
        ratios.push(a / b);
    }

    let mut conormals: Vec<Vec<BigInt>> = Vec::with_capacity(n + 2);
    let mut labels: Vec<BigInt> = Vec::with_capacity(n + 2);
    for i in 0..=k1 {
        let mut c = fiber.conormal(i).to_vec();
        c.resize(n, BigInt::zero());
        conormals.push(c);
        labels.push(fiber.label(i).clone());
    }
    for j in 0..=k2 {
        let fiber_part = if j < k2 { &lifts[j] } else { &spec.twist.a };
        let mut c = fiber_part.clone();
        c.extend(base.conormal(j).iter().map(|x| x * &ratios[j]));
        if !content(&c).is_one() {
            return Err(BundleError::NonPrimitiveLift(j));
        }
        conormals.push(c);
        labels.push(spec.label_divisors[j].clone());
    }

    let offsets = match &spec.offsets {
        Some(o) if o.len() != n + 2 => {
            return Err(BundleError::LengthMismatch {
                what: "offsets",
                expected: n + 2,
                found: o.len(),
            })
        }
        Some(o) => o.clone(),
        None => {
            let mut o: Vec<BigRational> = (0..=k1).map(|i| fiber.offset(i).clone()).collect();
            for j in 0..=k2 {
                let fiber_part = &conormals[k1 + 1 + j][..k1];
                let h = Halfspace::new(fiber_part.to_vec(), BigRational::zero());
                let reach = fiber
                    .vertices()
                    .iter()
                    .map(|x| h.pairing(x))
                    .max()
                    .expect("nonempty fiber");
                o.push(base.offset(j) * BigRational::from_integer(ratios[j].clone()) + reach);
            }
            o
        }
    };

    let hs: Vec<Halfspace> = conormals
        .into_iter()
        .zip(offsets)
        .map(|(c, o)| Halfspace::new(c, o))
        .collect();
    let total = LabeledPolytope::new(n, hs, labels).map_err(|e| match &e {
        LabeledError::Invalid(issues)
            if issues.contains(&ValidationIssue::Geometry(PolytopeError::UnboundedPolytope)) =>
        {
            BundleError::UnboundedResult
        }
        LabeledError::Invalid(_) => BundleError::InvalidOffsets,
        _ => BundleError::Labeled(e),
    })?;
    if combinatorially_equivalent(total.geometry(), product(fiber, base).geometry()).is_none() {
        return Err(BundleError::InvalidOffsets);
    }
    Ok(total)
}

/// Lift of base facet `j` into the total space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseFacetLift {
    /// Primitive conormal of the total-space facet over base facet `j`.
    pub conormal: Vec<BigInt>,
    /// Its label `b_j` in the total space.
    pub label: BigInt,
    /// The base label `a_j`.
    pub base_label: BigInt,
}

/// Witness that a labeled polytope is a labeled orbifold bundle polytope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleData {
    pub fiber: LabeledPolytope,
    pub base: LabeledPolytope,
    /// `n x fiber_dim`.
    pub iota: IntMatrix,
    /// `base_dim x n`.
    pub pi: IntMatrix,
    pub base_facet_lifts: Vec<BaseFacetLift>,
    /// Facet `i` of `fiber x base` (fiber facets first) corresponds to facet
    /// `facet_correspondence[i]` of the total space.
    pub facet_correspondence: Vec<usize>,
}

impl BundleData {
    pub fn is_trivial(&self) -> bool {
        self.base_facet_lifts.iter().all(|l| l.label == l.base_label)
    }

    /// Re-checks every defining condition against `total`.
    pub fn verify(&self, total: &LabeledPolytope) -> bool {
        let nf = self.fiber.facet_count();
        let (kf, kb) = (self.fiber.dim(), self.base.dim());
        let n = total.dim();
        if n != kf + kb
            || self.iota.rows() != n
            || self.iota.cols() != kf
            || self.pi.rows() != kb
            || self.pi.cols() != n
            || self.facet_correspondence.len() != nf + self.base.facet_count()
        {
            return false;
        }
        let sigma = &self.facet_correspondence;
        if combinatorially_equivalent(product(&self.fiber, &self.base).geometry(), total.geometry()).is_none() {
            return false;
        }
        if !self.pi.mul(&self.iota).is_zero() {
            return false;
        }
        let iota_snf = smith_normal_form(&self.iota);
        let pi_snf = smith_normal_form(&self.pi);
        if iota_snf.rank() != kf
            || !iota_snf.invariant_factors().is_empty()
            || pi_snf.rank() != kb
            || !pi_snf.invariant_factors().is_empty()
        {
            return false;
        }
        for (i, &s) in sigma.iter().enumerate().take(nf) {
            if self.iota.mul_vec(self.fiber.conormal(i)) != total.conormal(s) || self.fiber.label(i) != total.label(s) {
                return false;
            }
        }
        self.base_facet_lifts.iter().enumerate().all(|(j, lift)| {
            let t = sigma[nf + j];
            let ratio = &lift.base_label / &lift.label;
            lift.conormal == total.conormal(t)
                && &lift.label == total.label(t)
                && &lift.base_label == self.base.label(j)
                && lift.base_label.is_multiple_of(&lift.label)
                && self.pi.mul_vec(&lift.conormal)
                    == self.base.conormal(j).iter().map(|x| x * &ratio).collect::<Vec<_>>()
        })
    }
}

/// Searches for a labeled orbifold bundle structure on `total` with the
/// given fiber and base.
pub fn recognize_bundle(
    total: &LabeledPolytope,
    fiber: &LabeledPolytope,
    base: &LabeledPolytope,
) -> Option<BundleData> {
    let (kf, kb) = (fiber.dim(), base.dim());
    let n = total.dim();
    if n != kf + kb {
        return None;
    }
    let prod = product(fiber, base);
    let nf = fiber.facet_count();
    let fiber_frame: Vec<usize> = fiber.geometry().vertex_data().incidence[0].iter().copied().collect();
    let base_frame: Vec<usize> = base.geometry().vertex_data().incidence[0].iter().copied().collect();
    let fiber_frame_inv = RatMatrix::from_columns(
        kf,
        &fiber_frame
            .iter()
            .map(|&i| to_rat_vec(fiber.conormal(i)))
            .collect::<Vec<_>>(),
    )
    .inverse()?;

    for_each_combinatorial_isomorphism(prod.geometry(), total.geometry(), |sigma| {
        try_bundle(
            total,
            fiber,
            base,
            sigma,
            nf,
            &fiber_frame,
            &fiber_frame_inv,
            &base_frame,
        )
        .map_or(ControlFlow::Continue(()), ControlFlow::Break)
    })
}

#[allow(clippy::too_many_arguments)]
fn try_bundle(
    total: &LabeledPolytope,
    fiber: &LabeledPolytope,
    base: &LabeledPolytope,
    sigma: &[usize],
    nf: usize,
    fiber_frame: &[usize],
    fiber_frame_inv: &RatMatrix,
    base_frame: &[usize],
) -> Option<BundleData> {
    let n = total.dim();
    let (kf, kb) = (fiber.dim(), base.dim());
    if (0..nf).any(|i| fiber.label(i) != total.label(sigma[i])) {
        return None;
    }
    for j in 0..base.facet_count() {
        if !base.label(j).is_multiple_of(total.label(sigma[nf + j])) {
            return None;
        }
    }
    let images = RatMatrix::from_columns(
        n,
        &fiber_frame
            .iter()
            .map(|&i| to_rat_vec(total.conormal(sigma[i])))
            .collect::<Vec<_>>(),
    );
    let iota = images.mul(fiber_frame_inv).to_int()?;
    if (0..nf).any(|i| iota.mul_vec(fiber.conormal(i)) != total.conormal(sigma[i])) {
        return None;
    }
    let snf = smith_normal_form(&iota);
    if snf.rank() != kf || !snf.invariant_factors().is_empty() {
        return None;
    }

    let ratio = |j: usize| base.label(j) / total.label(sigma[nf + j]);
    let target = |j: usize| -> Vec<BigInt> { base.conormal(j).iter().map(|x| x * ratio(j)).collect() };
    let mut columns: Vec<Vec<BigRational>> = iota.to_columns().iter().map(|c| to_rat_vec(c)).collect();
    columns.extend(base_frame.iter().map(|&j| to_rat_vec(total.conormal(sigma[nf + j]))));
    let m_inv = RatMatrix::from_columns(n, &columns).inverse()?;
    let mut image_columns: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); kb]; kf];
    image_columns.extend(base_frame.iter().map(|&j| to_rat_vec(&target(j))));
    let pi = RatMatrix::from_columns(kb, &image_columns).mul(&m_inv).to_int()?;

    let lifts: Vec<BaseFacetLift> = (0..base.facet_count())
        .map(|j| BaseFacetLift {
            conormal: total.conormal(sigma[nf + j]).to_vec(),
            label: total.label(sigma[nf + j]).clone(),
            base_label: base.label(j).clone(),
        })
        .collect();
    if lifts
        .iter()
        .enumerate()
        .any(|(j, l)| pi.mul_vec(&l.conormal) != target(j))
    {
        return None;
    }
    let data = BundleData {
        fiber: fiber.clone(),
        base: base.clone(),
        iota,
        pi,
        base_facet_lifts: lifts,
        facet_correspondence: sigma.to_vec(),
    };
    data.verify(total).then_some(data)
}

/// Integer coordinates of `v` in the basis given by the columns of `basis`.
fn coordinates(basis_inv: &RatMatrix, v: &[BigInt]) -> Vec<BigInt> {
    basis_inv
        .mul_vec(&to_rat_vec(v))
        .into_iter()
        .map(|x| {
            debug_assert!(x.is_integer());
            x.to_integer()
        })
        .collect()
}

/// Reads the normalized twist tuple off a polytope combinatorially
/// equivalent to a product of two simplices.
///
/// For every choice of one facet `s` from the first family and `t` from the
/// second such that the remaining conormals form a lattice basis, both
/// left-out conormals are expanded in that basis. The family whose slant has
/// no component along the other family is the fiber; the twist is minus the
/// coefficients of the base slant along the fiber coordinate facets.
pub fn extract_twist(total: &LabeledPolytope) -> Result<SimplexTwist, BundleError> {
    let split = factor_as_simplex_product(total.geometry()).ok_or(BundleError::NotASimplexBundle)?;
    let n = total.dim();
    let mut best: Option<SimplexTwist> = None;
    for &s in &split.first {
        for &t in &split.second {
            let rest_f: Vec<usize> = split.first.iter().copied().filter(|&i| i != s).collect();
            let rest_g: Vec<usize> = split.second.iter().copied().filter(|&j| j != t).collect();
            let cols: Vec<Vec<BigInt>> = rest_f
                .iter()
                .chain(&rest_g)
                .map(|&i| total.conormal(i).to_vec())
                .collect();
            let basis = IntMatrix::from_columns(n, &cols);
            if !basis.determinant().abs().is_one() {
                continue;
            }
            let inv = basis.to_rat().inverse().expect("unimodular");
            let cs = coordinates(&inv, total.conormal(s));
            let ct = coordinates(&inv, total.conormal(t));
            let (a, a_prime) = cs.split_at(rest_f.len());
            let (b, _) = ct.split_at(rest_f.len());
            let cross_zero = b.iter().all(Zero::is_zero) || a_prime.iter().all(Zero::is_zero);
            if !cross_zero {
                return Err(BundleError::NotASimplexBundle);
            }
            let (k1, k2, twist) = if a_prime.iter().all(Zero::is_zero) {
                (rest_f.len(), rest_g.len(), b.iter().map(|x| -x).collect::<Vec<_>>())
            } else {
                let _ = a;
                (
                    rest_g.len(),
                    rest_f.len(),
                    a_prime.iter().map(|x| -x).collect::<Vec<_>>(),
                )
            };
            if twist.iter().any(Signed::is_positive) {
                continue;
            }
            let mut sorted = twist;
            sorted.sort();
            let cand = SimplexTwist { k1, k2, a: sorted };
            if best.as_ref().is_none_or(|b| cand.a < b.a) {
                best = Some(cand);
            }
        }
    }
    best.ok_or(BundleError::NotASimplexBundle)
}

/// Signed determinants of the vertex bases `A_{i,j}`: columns are the
/// conormals of the first family without facet `i`, then of the second
/// family without facet `j`.
pub fn vertex_determinants(total: &LabeledPolytope) -> Option<Vec<Vec<BigInt>>> {
    let split = factor_as_simplex_product(total.geometry())?;
    let n = total.dim();
    Some(
        split
            .first
            .iter()
            .map(|&s| {
                split
                    .second
                    .iter()
                    .map(|&t| {
                        let cols: Vec<Vec<BigInt>> = split
                            .first
                            .iter()
                            .filter(|&&i| i != s)
                            .chain(split.second.iter().filter(|&&j| j != t))
                            .map(|&i| total.conormal(i).to_vec())
                            .collect();
                        IntMatrix::from_columns(n, &cols).determinant()
                    })
                    .collect()
            })
            .collect(),
    )
}

/// Every twist of length `k1` with entries in `[-bound, bound]`.
pub fn twists_in_box(k1: usize, k2: usize, bound: i64) -> Vec<SimplexTwist> {
    (0..k1)
        .map(|_| -bound..=bound)
        .multi_cartesian_product()
        .map(|a| SimplexTwist::from_i64(k1, k2, &a).expect("length matches"))
        .collect()
}
