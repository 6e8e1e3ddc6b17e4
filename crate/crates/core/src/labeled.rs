//! Labeled rational polytopes and the orbifold data they encode.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lattice::{
    cokernel, integer_kernel, is_primitive, smith_normal_form, to_rat_vec, FiniteAbelianGroup, IntMatrix, RatMatrix,
};
use crate::polytope::{HPolytope, Halfspace, PolytopeError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationIssue {
    LabelCountMismatch { labels: usize, facets: usize },
    NonpositiveLabel(usize),
    NonPrimitiveConormal(usize),
    RedundantFacet(usize),
    NonSimple(usize),
    Geometry(PolytopeError),
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::LabelCountMismatch { labels, facets } => {
                write!(f, "{labels} labels given for {facets} facets")
            }
            ValidationIssue::NonpositiveLabel(i) => write!(f, "nonpositive label on facet {i}"),
            ValidationIssue::NonPrimitiveConormal(i) => write!(f, "non-primitive conormal on facet {i}"),
            ValidationIssue::RedundantFacet(i) => write!(f, "redundant facet {i}"),
            ValidationIssue::NonSimple(v) => write!(f, "non-simple vertex {v}"),
            ValidationIssue::Geometry(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabeledError {
    #[error("invalid labeled polytope: {}", .0.iter().map(ToString::to_string).join("; "))]
    Invalid(Vec<ValidationIssue>),
    #[error("facets {0:?} do not meet in a face")]
    NotAFace(Vec<usize>),
}

/// Reports every violated invariant of a would-be labeled polytope.
pub fn validate(dim: usize, halfspaces: &[Halfspace], labels: &[BigInt]) -> Result<(), Vec<ValidationIssue>> {
    checked(dim, halfspaces, labels).map(|_| ())
}

fn checked(dim: usize, halfspaces: &[Halfspace], labels: &[BigInt]) -> Result<HPolytope, Vec<ValidationIssue>> {
    let mut issues = Vec::new();
    if labels.len() != halfspaces.len() {
        issues.push(ValidationIssue::LabelCountMismatch {
            labels: labels.len(),
            facets: halfspaces.len(),
        });
    }
    for (i, m) in labels.iter().enumerate() {
        if !m.is_positive() {
            issues.push(ValidationIssue::NonpositiveLabel(i));
        }
    }
    for (i, h) in halfspaces.iter().enumerate() {
        if h.conormal.len() == dim && !is_primitive(&h.conormal) {
            issues.push(ValidationIssue::NonPrimitiveConormal(i));
        }
    }
    let geometry = match HPolytope::new_allowing_scaled(dim, halfspaces.to_vec()) {
        Ok(p) => {
            for (v, inc) in p.vertex_data().incidence.iter().enumerate() {
                if inc.len() != dim {
                    issues.push(ValidationIssue::NonSimple(v));
                }
            }
            Some(p)
        }
        Err(PolytopeError::RedundantHalfspace(i)) => {
            issues.push(ValidationIssue::RedundantFacet(i));
            None
        }
        Err(e) => {
            issues.push(ValidationIssue::Geometry(e));
            None
        }
    };
    match geometry {
        Some(p) if issues.is_empty() => Ok(p),
        _ => Err(issues),
    }
}

/// Simple rational polytope with a positive integer label on each facet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPolytope {
    geometry: HPolytope,
    labels: Vec<BigInt>,
}

impl LabeledPolytope {
    pub fn new(dim: usize, halfspaces: Vec<Halfspace>, labels: Vec<BigInt>) -> Result<Self, LabeledError> {
        let geometry = checked(dim, &halfspaces, &labels).map_err(LabeledError::Invalid)?;
        Ok(LabeledPolytope { geometry, labels })
    }

    pub fn from_geometry(geometry: HPolytope, labels: Vec<BigInt>) -> Result<Self, LabeledError> {
        Self::new(geometry.dim(), geometry.halfspaces().to_vec(), labels)
    }

    /// Convenience constructor from `(conormal, offset, label)` triples.
    pub fn from_i64(dim: usize, facets: &[(&[i64], BigRational, i64)]) -> Result<Self, LabeledError> {
        let hs = facets
            .iter()
            .map(|(c, o, _)| Halfspace::from_i64(c, o.clone()))
            .collect();
        let labels = facets.iter().map(|(_, _, m)| BigInt::from(*m)).collect();
        Self::new(dim, hs, labels)
    }

    pub fn geometry(&self) -> &HPolytope {
        &self.geometry
    }

    pub fn dim(&self) -> usize {
        self.geometry.dim()
    }

    pub fn facet_count(&self) -> usize {
        self.geometry.facet_count()
    }

    pub fn labels(&self) -> &[BigInt] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &BigInt {
        &self.labels[i]
    }

    pub fn conormal(&self, i: usize) -> &[BigInt] {
        &self.geometry.halfspaces()[i].conormal
    }

    pub fn offset(&self, i: usize) -> &BigRational {
        &self.geometry.halfspaces()[i].offset
    }

    /// `m_i * eta_i`.
    pub fn weighted_conormal(&self, i: usize) -> Vec<BigInt> {
        self.conormal(i).iter().map(|c| c * &self.labels[i]).collect()
    }

    pub fn vertices(&self) -> &[Vec<BigRational>] {
        self.geometry.vertices()
    }

    pub fn with_labels(&self, labels: Vec<BigInt>) -> Result<Self, LabeledError> {
        Self::from_geometry(self.geometry.clone(), labels)
    }

    pub fn translate(&self, t: &[BigRational]) -> LabeledPolytope {
        LabeledPolytope {
            geometry: self.geometry.translate(t),
            labels: self.labels.clone(),
        }
    }

    /// Image under `x -> U^-T x + t`, so that conormals transform by `U`.
    /// Panics if `u` is not unimodular.
    pub fn transform(&self, u: &IntMatrix, t: &[BigRational]) -> LabeledPolytope {
        assert!(u.determinant().abs().is_one(), "transform requires a unimodular matrix");
        let hs = self
            .geometry
            .halfspaces()
            .iter()
            .map(|h| {
                let c = u.mul_vec(&h.conormal);
                let shift = Halfspace::new(c.clone(), BigRational::zero()).pairing(t);
                Halfspace::new(c, &h.offset + shift)
            })
            .collect();
        LabeledPolytope::new(self.dim(), hs, self.labels.clone()).expect("unimodular image stays valid")
    }

    /// Facet with the given conormal, if any.
    pub fn facet_with_conormal(&self, c: &[BigInt]) -> Option<usize> {
        (0..self.facet_count()).find(|&i| self.conormal(i) == c)
    }
}

/// `Lambda_p / Lambda~_p` for the generic point of the face cut out by
/// `facets`: the saturated lattice spanned by the conormals of all facets
/// containing that face, modulo the sublattice spanned by the weighted
/// conormals.
pub fn orbifold_group_of_face(
    delta: &LabeledPolytope,
    facets: &BTreeSet<usize>,
) -> Result<FiniteAbelianGroup, LabeledError> {
    let face = delta
        .geometry()
        .face_of(facets)
        .ok_or_else(|| LabeledError::NotAFace(facets.iter().copied().collect()))?;
    Ok(group_for_facets(delta, &face.facets))
}

fn group_for_facets(delta: &LabeledPolytope, facets: &BTreeSet<usize>) -> FiniteAbelianGroup {
    if facets.is_empty() {
        return FiniteAbelianGroup::trivial();
    }
    let n = delta.dim();
    let idx: Vec<usize> = facets.iter().copied().collect();
    let conormals = IntMatrix::from_columns(n, &idx.iter().map(|&i| delta.conormal(i).to_vec()).collect::<Vec<_>>());
    let snf = smith_normal_form(&conormals);
    let r = snf.rank();
    // the first r columns of S^-1 are a basis of the saturation; S * v gives
    // coordinates in that basis
    let weighted = IntMatrix::from_columns(n, &idx.iter().map(|&i| delta.weighted_conormal(i)).collect::<Vec<_>>());
    let coords = snf.s.mul(&weighted);
    let c = IntMatrix::from_fn(r, idx.len(), |i, j| coords[(i, j)].clone());
    cokernel(&c)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularityEntry {
    pub face: BTreeSet<usize>,
    pub dim: usize,
    pub orbifold_order: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularityProfile {
    /// One entry per face, ordered by dimension; the last entry is the
    /// interior.
    pub entries: Vec<SingularityEntry>,
    /// Some vertex has orbifold order strictly larger than every face of
    /// positive dimension containing it.
    pub has_locally_maximal_singular_vertex: bool,
}

impl SingularityProfile {
    pub fn order_of(&self, face: &BTreeSet<usize>) -> Option<&BigInt> {
        self.entries.iter().find(|e| &e.face == face).map(|e| &e.orbifold_order)
    }
}

pub fn singularity_profile(delta: &LabeledPolytope) -> SingularityProfile {
    let lattice = delta.geometry().face_lattice();
    let entries: Vec<SingularityEntry> = lattice
        .iter()
        .map(|f| SingularityEntry {
            face: f.facets.clone(),
            dim: f.dim,
            orbifold_order: group_for_facets(delta, &f.facets)
                .order()
                .expect("orbifold groups are finite"),
        })
        .collect();
    let maximal = entries.iter().filter(|e| e.dim == 0).any(|v| {
        entries
            .iter()
            .filter(|e| e.dim > 0 && e.face.is_subset(&v.face))
            .all(|e| v.orbifold_order > e.orbifold_order)
    });
    SingularityProfile {
        entries,
        has_locally_maximal_singular_vertex: maximal,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquivalenceMode {
    Translation,
    Unimodular,
}

/// `x -> U^-T x + t` carrying one labeled polytope onto another; conormal of
/// facet `i` maps to `U eta_i`, the conormal of facet `facet_map[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equivalence {
    pub matrix: IntMatrix,
    pub translation: Vec<BigRational>,
    pub facet_map: Vec<usize>,
}

impl Equivalence {
    pub fn is_identity(&self) -> bool {
        self.matrix == IntMatrix::identity(self.matrix.rows())
            && self.translation.iter().all(Zero::is_zero)
            && self.facet_map.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn apply_point(&self, x: &[BigRational]) -> Vec<BigRational> {
        let inv_t = self.matrix.to_rat().transpose().inverse().expect("unimodular");
        inv_t
            .mul_vec(x)
            .into_iter()
            .zip(&self.translation)
            .map(|(a, b)| a + b)
            .collect()
    }
}

pub fn equivalent(a: &LabeledPolytope, b: &LabeledPolytope, mode: EquivalenceMode) -> Option<Equivalence> {
    if a.dim() != b.dim() || a.facet_count() != b.facet_count() || a.vertices().len() != b.vertices().len() {
        return None;
    }
    match mode {
        EquivalenceMode::Translation => match_with_matrix(a, b, &IntMatrix::identity(a.dim())),
        EquivalenceMode::Unimodular => {
            let n = a.dim();
            let inc0: Vec<usize> = a.geometry().vertex_data().incidence[0].iter().copied().collect();
            let n_src =
                RatMatrix::from_columns(n, &inc0.iter().map(|&i| to_rat_vec(a.conormal(i))).collect::<Vec<_>>());
            let n_src_inv = n_src.inverse()?;
            for inc in &b.geometry().vertex_data().incidence {
                let targets: Vec<usize> = inc.iter().copied().collect();
                for perm in targets.iter().copied().permutations(n) {
                    if perm.iter().zip(&inc0).any(|(&j, &i)| a.label(i) != b.label(j)) {
                        continue;
                    }
                    let n_dst = RatMatrix::from_columns(
                        n,
                        &perm.iter().map(|&j| to_rat_vec(b.conormal(j))).collect::<Vec<_>>(),
                    );
                    let Some(u) = n_dst.mul(&n_src_inv).to_int() else {
                        continue;
                    };
                    if !u.determinant().abs().is_one() {
                        continue;
                    }
                    if let Some(e) = match_with_matrix(a, b, &u) {
                        return Some(e);
                    }
                }
            }
            None
        }
    }
}

fn match_with_matrix(a: &LabeledPolytope, b: &LabeledPolytope, u: &IntMatrix) -> Option<Equivalence> {
    let lookup: BTreeMap<&[BigInt], usize> = (0..b.facet_count()).map(|j| (b.conormal(j), j)).collect();
    let mut facet_map = Vec::with_capacity(a.facet_count());
    let mut mapped = Vec::with_capacity(a.facet_count());
    for i in 0..a.facet_count() {
        let c = u.mul_vec(a.conormal(i));
        let &j = lookup.get(c.as_slice())?;
        if a.label(i) != b.label(j) {
            return None;
        }
        facet_map.push(j);
        mapped.push(c);
    }
    // c'_j = c_i + <t, U eta_i>; solve on the facets of the first vertex
    let n = a.dim();
    let inc0: Vec<usize> = a.geometry().vertex_data().incidence[0].iter().copied().collect();
    let m = RatMatrix::from_rows(&inc0.iter().map(|&i| to_rat_vec(&mapped[i])).collect::<Vec<_>>());
    let rhs: Vec<BigRational> = inc0.iter().map(|&i| b.offset(facet_map[i]) - a.offset(i)).collect();
    if m.rows() != n {
        return None;
    }
    let t = m.solve(&rhs)?;
    for i in 0..a.facet_count() {
        let shift = Halfspace::new(mapped[i].clone(), BigRational::zero()).pairing(&t);
        if &(a.offset(i) + shift) != b.offset(facet_map[i]) {
            return None;
        }
    }
    Some(Equivalence {
        matrix: u.clone(),
        translation: t,
        facet_map,
    })
}

/// Input data of the Delzant construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelzantData {
    /// `n x d`, column `i` is `m_i eta_i`.
    pub beta: IntMatrix,
    /// Basis of `ker beta` over the integers, in row Hermite form.
    pub kernel_basis: Vec<Vec<BigInt>>,
    /// Every facet set with nonempty intersection, the empty set included.
    pub fan_index_sets: Vec<BTreeSet<usize>>,
}

pub fn delzant_data(delta: &LabeledPolytope) -> DelzantData {
    let n = delta.dim();
    let beta = IntMatrix::from_columns(
        n,
        &(0..delta.facet_count())
            .map(|i| delta.weighted_conormal(i))
            .collect::<Vec<_>>(),
    );
    let kernel_basis = integer_kernel(&beta);
    let mut sets: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    for inc in &delta.geometry().vertex_data().incidence {
        let inc: Vec<usize> = inc.iter().copied().collect();
        for k in 0..=inc.len() {
            for s in inc.iter().copied().combinations(k) {
                sets.insert(s.into_iter().collect());
            }
        }
    }
    let mut fan_index_sets: Vec<BTreeSet<usize>> = sets.into_iter().collect();
    fan_index_sets.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    DelzantData {
        beta,
        kernel_basis,
        fan_index_sets,
    }
}
