//! Exact H-representation polytopes: vertices, faces, f-vectors and
//! combinatorial type.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;
use std::sync::OnceLock;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::lattice::{is_primitive, to_rat_vec, IntMatrix, RatMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error("no halfspaces given")]
    NoHalfspaces,
    #[error("halfspace {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("halfspace {0} has a non-primitive conormal")]
    NonPrimitiveConormal(usize),
    #[error("polytope is unbounded")]
    UnboundedPolytope,
    #[error("polytope is empty")]
    EmptyPolytope,
    #[error("polytope is not full-dimensional")]
    DegenerateInput,
    #[error("halfspace {0} is redundant")]
    RedundantHalfspace(usize),
}

/// The constraint `<x, conormal> <= offset`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Halfspace {
    pub conormal: Vec<BigInt>,
    pub offset: BigRational,
}

impl Halfspace {
    pub fn new(conormal: Vec<BigInt>, offset: BigRational) -> Self {
        Halfspace { conormal, offset }
    }

    pub fn from_i64(conormal: &[i64], offset: BigRational) -> Self {
        Halfspace::new(conormal.iter().map(|&x| BigInt::from(x)).collect(), offset)
    }

    pub fn pairing(&self, x: &[BigRational]) -> BigRational {
        self.conormal
            .iter()
            .zip(x)
            .fold(BigRational::zero(), |acc, (c, xi)| acc + xi * c)
    }

    pub fn contains(&self, x: &[BigRational]) -> bool {
        self.pairing(x) <= self.offset
    }

    pub fn is_tight(&self, x: &[BigRational]) -> bool {
        self.pairing(x) == self.offset
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexData {
    /// Sorted lexicographically.
    pub vertices: Vec<Vec<BigRational>>,
    /// Active facets of each vertex.
    pub incidence: Vec<BTreeSet<usize>>,
}

/// A nonempty face, identified by the set of all facets containing it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    pub dim: usize,
    pub facets: BTreeSet<usize>,
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceLattice {
    by_dim: Vec<Vec<Face>>,
}

impl FaceLattice {
    pub fn dim(&self) -> usize {
        self.by_dim.len() - 1
    }

    pub fn faces(&self, dim: usize) -> &[Face] {
        &self.by_dim[dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Face> {
        self.by_dim.iter().flatten()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.by_dim.iter().map(Vec::len).collect()
    }

    pub fn find(&self, facets: &BTreeSet<usize>) -> Option<&Face> {
        self.iter().find(|f| &f.facets == facets)
    }
}

/// Bounded, full-dimensional polytope `{x : <x, eta_i> <= c_i}` without
/// redundant halfspaces.
#[derive(Debug, Clone)]
pub struct HPolytope {
    dim: usize,
    halfspaces: Vec<Halfspace>,
    vertex_data: VertexData,
    facet_vertices: Vec<Vec<usize>>,
    lattice: OnceLock<FaceLattice>,
}

impl PartialEq for HPolytope {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.halfspaces == other.halfspaces
    }
}

impl Eq for HPolytope {}

impl HPolytope {
    pub fn new(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self, PolytopeError> {
        if let Some(i) = halfspaces.iter().position(|h| !is_primitive(&h.conormal)) {
            if halfspaces[i].conormal.len() == dim {
                return Err(PolytopeError::NonPrimitiveConormal(i));
            }
        }
        Self::new_allowing_scaled(dim, halfspaces)
    }

    /// Like [`HPolytope::new`] but accepts conormals that are not primitive.
    /// Used by validation code that wants to report every problem at once.
    pub(crate) fn new_allowing_scaled(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self, PolytopeError> {
        if halfspaces.is_empty() {
            return Err(PolytopeError::NoHalfspaces);
        }
        for (index, h) in halfspaces.iter().enumerate() {
            if h.conormal.len() != dim {
                return Err(PolytopeError::DimensionMismatch {
                    index,
                    expected: dim,
                    found: h.conormal.len(),
                });
            }
        }
        let vertex_data = enumerate(dim, &halfspaces)?;
        let facet_vertices: Vec<Vec<usize>> = (0..halfspaces.len())
            .map(|i| {
                (0..vertex_data.vertices.len())
                    .filter(|&v| vertex_data.incidence[v].contains(&i))
                    .collect()
            })
            .collect();
        let mut seen: BTreeMap<&Vec<usize>, usize> = BTreeMap::new();
        for (i, vs) in facet_vertices.iter().enumerate() {
            if affine_rank(vs.iter().map(|&v| &vertex_data.vertices[v])) + 1 < dim {
                return Err(PolytopeError::RedundantHalfspace(i));
            }
            if seen.insert(vs, i).is_some() {
                return Err(PolytopeError::RedundantHalfspace(i));
            }
        }
        Ok(HPolytope {
            dim,
            halfspaces,
            vertex_data,
            facet_vertices,
            lattice: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn facet_count(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn vertex_data(&self) -> &VertexData {
        &self.vertex_data
    }

    pub fn vertices(&self) -> &[Vec<BigRational>] {
        &self.vertex_data.vertices
    }

    /// Indices of the vertices on facet `i`.
    pub fn facet_vertices(&self, i: usize) -> &[usize] {
        &self.facet_vertices[i]
    }

    /// Conormal matrix with one row per facet.
    pub fn conormal_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(&self.halfspaces.iter().map(|h| h.conormal.clone()).collect::<Vec<_>>())
    }

    pub fn is_simple(&self) -> bool {
        self.vertex_data.incidence.iter().all(|s| s.len() == self.dim)
    }

    /// Smallest face containing the intersection of the given facets, or
    /// `None` if that intersection is empty.
    pub fn face_of(&self, facets: &BTreeSet<usize>) -> Option<Face> {
        let vertices: Vec<usize> = (0..self.vertices().len())
            .filter(|&v| facets.is_subset(&self.vertex_data.incidence[v]))
            .collect();
        if vertices.is_empty() {
            return None;
        }
        let closure: BTreeSet<usize> = (0..self.facet_count())
            .filter(|i| vertices.iter().all(|v| self.vertex_data.incidence[*v].contains(i)))
            .collect();
        let rank = if closure.is_empty() {
            0
        } else {
            IntMatrix::from_rows(
                &closure
                    .iter()
                    .map(|&i| self.halfspaces[i].conormal.clone())
                    .collect::<Vec<_>>(),
            )
            .rank()
        };
        Some(Face {
            dim: self.dim - rank,
            facets: closure,
            vertices,
        })
    }

    pub fn face_lattice(&self) -> &FaceLattice {
        self.lattice.get_or_init(|| {
            let mut faces: BTreeSet<Face> = BTreeSet::new();
            for inc in &self.vertex_data.incidence {
                let inc: Vec<usize> = inc.iter().copied().collect();
                for k in 0..=inc.len() {
                    for subset in inc.iter().copied().combinations(k) {
                        let s: BTreeSet<usize> = subset.into_iter().collect();
                        if let Some(face) = self.face_of(&s) {
                            faces.insert(face);
                        }
                    }
                }
            }
            let mut by_dim = vec![Vec::new(); self.dim + 1];
            for f in faces {
                by_dim[f.dim].push(f);
            }
            FaceLattice { by_dim }
        })
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.face_lattice().f_vector()
    }

    /// `x -> x + t`.
    pub fn translate(&self, t: &[BigRational]) -> HPolytope {
        let hs = self
            .halfspaces
            .iter()
            .map(|h| Halfspace::new(h.conormal.clone(), &h.offset + h.pairing(t)))
            .collect();
        HPolytope::new(self.dim, hs).expect("translation preserves validity")
    }

    /// Cartesian product; facets of `self` first.
    pub fn product(&self, other: &HPolytope) -> HPolytope {
        let n = self.dim + other.dim;
        let mut hs = Vec::with_capacity(self.facet_count() + other.facet_count());
        for h in &self.halfspaces {
            let mut c = h.conormal.clone();
            c.resize(n, BigInt::zero());
            hs.push(Halfspace::new(c, h.offset.clone()));
        }
        for h in &other.halfspaces {
            let mut c = vec![BigInt::zero(); self.dim];
            c.extend(h.conormal.iter().cloned());
            hs.push(Halfspace::new(c, h.offset.clone()));
        }
        HPolytope::new(n, hs).expect("product of valid polytopes is valid")
    }

    /// Exact Euclidean volume.
    pub fn volume(&self) -> BigRational {
        let lattice = self.face_lattice();
        let top = &lattice.faces(self.dim)[0];
        let mut total = BigRational::zero();
        let mut apexes = Vec::new();
        self.triangulate(top, &mut apexes, &mut total);
        let fact: BigInt = (1..=self.dim).map(BigInt::from).product();
        total / BigRational::from_integer(fact)
    }

    // Pulling triangulation: cone over each subface not containing the first
    // vertex. Accumulates |det| of every full simplex.
    fn triangulate(&self, face: &Face, apexes: &mut Vec<usize>, total: &mut BigRational) {
        if face.dim == 0 {
            let mut pts: Vec<usize> = apexes.clone();
            pts.push(face.vertices[0]);
            let base = &self.vertices()[pts[0]];
            let rows: Vec<Vec<BigRational>> = pts[1..]
                .iter()
                .map(|&p| self.vertices()[p].iter().zip(base).map(|(a, b)| a - b).collect())
                .collect();
            *total += RatMatrix::from_rows(&rows).determinant().abs();
            return;
        }
        let apex = face.vertices[0];
        apexes.push(apex);
        for sub in self.face_lattice().faces(face.dim - 1) {
            if sub.facets.is_superset(&face.facets) && !sub.vertices.contains(&apex) {
                self.triangulate(sub, apexes, total);
            }
        }
        apexes.pop();
    }
}

fn affine_rank<'a>(points: impl Iterator<Item = &'a Vec<BigRational>>) -> usize {
    let pts: Vec<&Vec<BigRational>> = points.collect();
    let Some(first) = pts.first() else { return 0 };
    let rows: Vec<Vec<BigRational>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(first.iter()).map(|(a, b)| a - b).collect())
        .collect();
    if rows.is_empty() {
        return 0;
    }
    RatMatrix::from_rows(&rows).rank()
}

fn enumerate(dim: usize, halfspaces: &[Halfspace]) -> Result<VertexData, PolytopeError> {
    let conormals: Vec<Vec<BigRational>> = halfspaces.iter().map(|h| to_rat_vec(&h.conormal)).collect();
    let m = halfspaces.len();
    if dim == 0 {
        return Err(PolytopeError::DegenerateInput);
    }
    if RatMatrix::from_rows(&conormals).rank() < dim {
        return Err(PolytopeError::UnboundedPolytope);
    }
    for subset in (0..m).combinations(dim - 1) {
        let rows: Vec<Vec<BigRational>> = subset.iter().map(|&i| conormals[i].clone()).collect();
        let null = if rows.is_empty() {
            vec![vec![BigRational::from_integer(BigInt::from(1))]]
        } else {
            RatMatrix::from_rows(&rows).nullspace()
        };
        if null.len() != 1 {
            continue;
        }
        let d = &null[0];
        let signs: Vec<BigRational> = conormals
            .iter()
            .map(|c| c.iter().zip(d).fold(BigRational::zero(), |a, (x, y)| a + x * y))
            .collect();
        if signs.iter().all(|s| !s.is_positive()) || signs.iter().all(|s| !s.is_negative()) {
            return Err(PolytopeError::UnboundedPolytope);
        }
    }

    let mut points: BTreeSet<Vec<BigRational>> = BTreeSet::new();
    for subset in (0..m).combinations(dim) {
        let a = RatMatrix::from_rows(&subset.iter().map(|&i| conormals[i].clone()).collect::<Vec<_>>());
        let b: Vec<BigRational> = subset.iter().map(|&i| halfspaces[i].offset.clone()).collect();
        if let Some(x) = a.solve(&b) {
            if halfspaces.iter().all(|h| h.contains(&x)) {
                points.insert(x);
            }
        }
    }
    if points.is_empty() {
        return Err(PolytopeError::EmptyPolytope);
    }
    let vertices: Vec<Vec<BigRational>> = points.into_iter().collect();
    if affine_rank(vertices.iter()) < dim {
        return Err(PolytopeError::DegenerateInput);
    }
    let incidence = vertices
        .iter()
        .map(|x| (0..m).filter(|&i| halfspaces[i].is_tight(x)).collect())
        .collect();
    Ok(VertexData { vertices, incidence })
}

pub fn enumerate_vertices(p: &HPolytope) -> &VertexData {
    p.vertex_data()
}

pub fn f_vector(p: &HPolytope) -> Vec<usize> {
    p.f_vector()
}

/// Calls `visit` with every facet bijection `sigma` (facet `i` of `p` to
/// facet `sigma[i]` of `q`) that induces an isomorphism of face lattices, in
/// lexicographic order.
pub fn for_each_combinatorial_isomorphism<B>(
    p: &HPolytope,
    q: &HPolytope,
    mut visit: impl FnMut(&[usize]) -> ControlFlow<B>,
) -> Option<B> {
    let m = p.facet_count();
    if p.dim() != q.dim() || m != q.facet_count() || p.vertices().len() != q.vertices().len() {
        return None;
    }
    let target: BTreeSet<&BTreeSet<usize>> = q.vertex_data().incidence.iter().collect();
    let inter = |poly: &HPolytope, i: usize, j: usize| {
        let (a, b) = (poly.facet_vertices(i), poly.facet_vertices(j));
        a.iter().filter(|v| b.binary_search(v).is_ok()).count()
    };
    let mut sigma: Vec<usize> = Vec::with_capacity(m);
    let mut used = vec![false; m];

    fn search<B>(
        p: &HPolytope,
        q: &HPolytope,
        sigma: &mut Vec<usize>,
        used: &mut [bool],
        target: &BTreeSet<&BTreeSet<usize>>,
        inter: &dyn Fn(&HPolytope, usize, usize) -> usize,
        visit: &mut dyn FnMut(&[usize]) -> ControlFlow<B>,
    ) -> ControlFlow<B> {
        let i = sigma.len();
        if i == p.facet_count() {
            let ok = p.vertex_data().incidence.iter().all(|inc| {
                let mapped: BTreeSet<usize> = inc.iter().map(|&f| sigma[f]).collect();
                target.contains(&mapped)
            });
            return if ok { visit(sigma) } else { ControlFlow::Continue(()) };
        }
        for c in 0..q.facet_count() {
            if used[c] || p.facet_vertices(i).len() != q.facet_vertices(c).len() {
                continue;
            }
            if (0..i).any(|j| inter(p, i, j) != inter(q, c, sigma[j])) {
                continue;
            }
            used[c] = true;
            sigma.push(c);
            let r = search(p, q, sigma, used, target, inter, visit);
            sigma.pop();
            used[c] = false;
            r?;
        }
        ControlFlow::Continue(())
    }

    match search(p, q, &mut sigma, &mut used, &target, &inter, &mut visit) {
        ControlFlow::Break(b) => Some(b),
        ControlFlow::Continue(()) => None,
    }
}

/// First facet bijection (in lexicographic search order) inducing an
/// isomorphism of face lattices.
pub fn combinatorially_equivalent(p: &HPolytope, q: &HPolytope) -> Option<Vec<usize>> {
    for_each_combinatorial_isomorphism(p, q, |s| ControlFlow::Break(s.to_vec()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexProduct {
    pub k1: usize,
    pub k2: usize,
    /// Facets of the first simplex factor; always contains the smallest facet index.
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

/// Facet sets with empty intersection all of whose proper subsets meet, in
/// order of size then lexicographically.
pub fn minimal_non_faces(p: &HPolytope) -> Vec<BTreeSet<usize>> {
    let m = p.facet_count();
    let incidence = &p.vertex_data().incidence;
    let is_face = |s: &BTreeSet<usize>| incidence.iter().any(|inc| s.is_subset(inc));
    let mut minimal = Vec::new();
    for k in 1..=m {
        for subset in (0..m).combinations(k) {
            let s: BTreeSet<usize> = subset.iter().copied().collect();
            if is_face(&s) {
                continue;
            }
            let proper_faces = subset.iter().all(|x| {
                let mut t = s.clone();
                t.remove(x);
                is_face(&t)
            });
            if proper_faces {
                minimal.push(s);
            }
        }
    }
    minimal
}

/// Splits the facets of a polytope with `n + 2` facets into the two facet
/// families of a product of simplices `D^k1 x D^k2`, if it is one.
pub fn factor_as_simplex_product(p: &HPolytope) -> Option<SimplexProduct> {
    let n = p.dim();
    let m = p.facet_count();
    if m != n + 2 {
        return None;
    }
    let incidence = &p.vertex_data().incidence;
    let minimal = minimal_non_faces(p);
    if minimal.len() != 2 {
        return None;
    }
    let (a, b) = (&minimal[0], &minimal[1]);
    if a.len() < 2 || b.len() < 2 || !a.is_disjoint(b) || a.len() + b.len() != m {
        return None;
    }
    let (first, second) = if a.contains(&0) { (a, b) } else { (b, a) };
    let ok = p.vertices().len() == first.len() * second.len()
        && incidence.iter().all(|inc| {
            first.iter().filter(|f| !inc.contains(f)).count() == 1
                && second.iter().filter(|f| !inc.contains(f)).count() == 1
        });
    ok.then(|| SimplexProduct {
        k1: first.len() - 1,
        k2: second.len() - 1,
        first: first.iter().copied().collect(),
        second: second.iter().copied().collect(),
    })
}
