//! Quotients of labeled polytopes by finite torus subgroups, and the inverse
//! covering construction.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::labeled::{LabeledError, LabeledPolytope};
use crate::lattice::{content, lattice_basis_from_generators, to_rat_vec, IntMatrix, LatticeError, RatMatrix};
use crate::polytope::Halfspace;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("sublattice basis is singular")]
    SingularBasis,
    #[error("facet {0} has a weighted conormal outside the sublattice; no such cover exists")]
    NotACover(usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Labeled(#[from] LabeledError),
}

/// Finite subgroup of `R^n / Z^n` generated by rational vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusSubgroup {
    dim: usize,
    generators: Vec<Vec<BigRational>>,
}

impl TorusSubgroup {
    pub fn new(dim: usize, generators: Vec<Vec<BigRational>>) -> Result<Self, QuotientError> {
        if let Some(g) = generators.iter().find(|g| g.len() != dim) {
            return Err(QuotientError::DimensionMismatch {
                expected: dim,
                found: g.len(),
            });
        }
        Ok(TorusSubgroup { dim, generators })
    }

    pub fn trivial(dim: usize) -> Self {
        TorusSubgroup {
            dim,
            generators: Vec::new(),
        }
    }

    /// The subgroup `B^-1 Z^n / Z^n` for an integer basis `B` of a sublattice.
    pub fn dual_to_sublattice(basis: &IntMatrix) -> Result<Self, QuotientError> {
        let inv = basis.to_rat().inverse().ok_or(QuotientError::SingularBasis)?;
        Ok(TorusSubgroup {
            dim: basis.rows(),
            generators: inv.to_columns(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<BigRational>] {
        &self.generators
    }

    /// Canonical basis (as columns) of `Z^n + <generators>` and its index over `Z^n`.
    pub fn lattice(&self) -> (RatMatrix, BigInt) {
        lattice_basis_from_generators(self.dim, &self.generators).expect("dimensions checked at construction")
    }
}

pub fn subgroup_order(g: &TorusSubgroup) -> BigInt {
    g.lattice().1
}

/// Rewrites every weighted conormal `m eta` in the basis `a` of a new
/// lattice: `w = a^-1 (m eta) = m' eta'` with `m' = content(w)`. Offsets are
/// rescaled so that all pairings `<x, m eta>` are preserved under the vertex
/// map `x -> a^T x`.
fn change_lattice(delta: &LabeledPolytope, a: &RatMatrix) -> Result<LabeledPolytope, QuotientError> {
    let inv = a.inverse().ok_or(QuotientError::SingularBasis)?;
    let mut hs = Vec::with_capacity(delta.facet_count());
    let mut labels = Vec::with_capacity(delta.facet_count());
    for i in 0..delta.facet_count() {
        let w = inv.mul_vec(&to_rat_vec(&delta.weighted_conormal(i)));
        if !w.iter().all(BigRational::is_integer) {
            return Err(QuotientError::NotACover(i));
        }
        let w: Vec<BigInt> = w.iter().map(BigRational::to_integer).collect();
        let m = content(&w);
        let eta: Vec<BigInt> = w.iter().map(|x| x / &m).collect();
        let offset =
            delta.offset(i) * BigRational::from_integer(delta.label(i).clone()) / BigRational::from_integer(m.clone());
        hs.push(Halfspace::new(eta, offset));
        labels.push(m);
    }
    Ok(LabeledPolytope::new(delta.dim(), hs, labels)?)
}

/// Labeled polytope of `X / G`.
pub fn quotient_polytope(delta: &LabeledPolytope, g: &TorusSubgroup) -> Result<LabeledPolytope, QuotientError> {
    if g.dim() != delta.dim() {
        return Err(QuotientError::DimensionMismatch {
            expected: delta.dim(),
            found: g.dim(),
        });
    }
    change_lattice(delta, &g.lattice().0)
}

/// Labeled polytope of the cover corresponding to the sublattice spanned by
/// the columns of `basis`.
pub fn cover_polytope(delta: &LabeledPolytope, basis: &IntMatrix) -> Result<LabeledPolytope, QuotientError> {
    if basis.rows() != delta.dim() || basis.cols() != delta.dim() {
        return Err(QuotientError::DimensionMismatch {
            expected: delta.dim(),
            found: basis.rows(),
        });
    }
    if basis.determinant().is_zero() {
        return Err(QuotientError::SingularBasis);
    }
    change_lattice(delta, &basis.to_rat())
}

/// The vertex map `x -> a^T x` used by [`quotient_polytope`].
pub fn quotient_vertex_map(g: &TorusSubgroup, x: &[BigRational]) -> Vec<BigRational> {
    g.lattice().0.transpose().mul_vec(x)
}

/// Integer basis of `Z^n` seen inside the quotient lattice, i.e. the inverse
/// of the canonical basis; covering `quotient_polytope(delta, g)` with it
/// returns `delta` exactly.
pub fn covering_basis(g: &TorusSubgroup) -> IntMatrix {
    let (a, _) = g.lattice();
    a.inverse()
        .expect("lattice bases are nonsingular")
        .to_int()
        .expect("Z^n lies in the quotient lattice")
}
