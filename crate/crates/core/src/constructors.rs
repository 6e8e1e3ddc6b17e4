//! Builders for standard labeled polytopes: labeled projective spaces,
//! weighted projective spaces, footballs, simplices and products.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::labeled::{LabeledError, LabeledPolytope};
use crate::lattice::{content, lcm_all};
use crate::polytope::Halfspace;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructorError {
    #[error("slant conormal is not primitive")]
    NonPrimitiveSlant,
    #[error("entries must be positive integers")]
    NonpositiveEntry,
    #[error("weights are not coprime")]
    NonCoprimeWeights,
    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Labeled(#[from] LabeledError),
}

/// Weights `(l_0, ..., l_n)` of a weighted projective space, `n >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightVector(Vec<BigInt>);

impl WeightVector {
    pub fn new(weights: Vec<BigInt>) -> Result<Self, ConstructorError> {
        if weights.len() < 2 {
            return Err(ConstructorError::LengthMismatch {
                expected: 2,
                found: weights.len(),
            });
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(ConstructorError::NonpositiveEntry);
        }
        if !content(&weights).is_one() {
            return Err(ConstructorError::NonCoprimeWeights);
        }
        Ok(WeightVector(weights))
    }

    pub fn from_i64(weights: &[i64]) -> Result<Self, ConstructorError> {
        Self::new(weights.iter().map(|&w| BigInt::from(w)).collect())
    }

    pub fn weights(&self) -> &[BigInt] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }
}

/// Slant conormal `v` and facet labels `w` of a labeled projective space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SPData {
    v: Vec<BigInt>,
    w: Vec<BigInt>,
}

impl SPData {
    pub fn new(v: Vec<BigInt>, w: Vec<BigInt>) -> Result<Self, ConstructorError> {
        if v.is_empty() || w.len() != v.len() + 1 {
            return Err(ConstructorError::LengthMismatch {
                expected: v.len() + 1,
                found: w.len(),
            });
        }
        if v.iter().chain(&w).any(|x| !x.is_positive()) {
            return Err(ConstructorError::NonpositiveEntry);
        }
        if !content(&v).is_one() {
            return Err(ConstructorError::NonPrimitiveSlant);
        }
        Ok(SPData { v, w })
    }

    pub fn from_i64(v: &[i64], w: &[i64]) -> Result<Self, ConstructorError> {
        Self::new(
            v.iter().map(|&x| BigInt::from(x)).collect(),
            w.iter().map(|&x| BigInt::from(x)).collect(),
        )
    }

    pub fn v(&self) -> &[BigInt] {
        &self.v
    }

    pub fn w(&self) -> &[BigInt] {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }
}

fn unit(n: usize, i: usize, value: i64) -> Vec<BigInt> {
    (0..n)
        .map(|j| if i == j { BigInt::from(value) } else { BigInt::zero() })
        .collect()
}

/// Simplex `x_i >= 0`, `<x, v> <= 1` with labels `w` (coordinate facets
/// first, slant last).
pub fn labeled_projective_space(data: &SPData) -> Result<LabeledPolytope, ConstructorError> {
    let n = data.dim();
    let mut hs: Vec<Halfspace> = (0..n)
        .map(|i| Halfspace::new(unit(n, i, -1), BigRational::zero()))
        .collect();
    hs.push(Halfspace::new(data.v.clone(), BigRational::one()));
    Ok(LabeledPolytope::new(n, hs, data.w.clone())?)
}

/// `lcm(l_1..l_n) * (1/l_1, ..., 1/l_n)`.
pub fn wps_slant(lambda: &WeightVector) -> Vec<BigInt> {
    let tail = &lambda.weights()[1..];
    let l = lcm_all(tail);
    tail.iter().map(|x| &l / x).collect()
}

/// `(l_0, ..., l_n)` with `l_i` the gcd of all weights but the `i`-th.
pub fn wps_labels(lambda: &WeightVector) -> Vec<BigInt> {
    let w = lambda.weights();
    (0..w.len())
        .map(|i| {
            w.iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(BigInt::zero(), |g, (_, x)| g.gcd(x))
        })
        .collect()
}

/// Labeled simplex of the weighted projective space. Facet `i < n` is
/// `{x_i = 0}` and carries `l_{i+1}`; the slant facet carries `l_0`. The slant
/// offset is normalized to 1.
pub fn weighted_projective_polytope(lambda: &WeightVector) -> Result<LabeledPolytope, ConstructorError> {
    let labels = wps_labels(lambda);
    let mut w = labels[1..].to_vec();
    w.push(labels[0].clone());
    labeled_projective_space(&SPData::new(wps_slant(lambda), w)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalGroups {
    /// `hat(l)_i`, the product of all weights but the `i`-th.
    pub orders: Vec<BigInt>,
    /// `prod_i hat(l)_i / prod_j l_j`.
    pub gamma_order: BigInt,
}

pub fn orbifold_projective_local_groups(lambda: &WeightVector) -> LocalGroups {
    let w = lambda.weights();
    let total: BigInt = w.iter().product();
    let orders: Vec<BigInt> = w.iter().map(|x| &total / x).collect();
    let gamma_order = orders.iter().product::<BigInt>() / &total;
    LocalGroups { orders, gamma_order }
}

/// Interval `[0, 1]` with labels `p` at 0 and `q` at 1.
pub fn football(p: &BigInt, q: &BigInt) -> Result<LabeledPolytope, ConstructorError> {
    labeled_projective_space(&SPData::new(vec![BigInt::one()], vec![p.clone(), q.clone()])?)
}

/// Standard unimodular simplex with all labels 1.
pub fn simplex(n: usize) -> Result<LabeledPolytope, ConstructorError> {
    labeled_projective_space(&SPData::new(vec![BigInt::one(); n], vec![BigInt::one(); n + 1])?)
}

/// Cartesian product, facets of `a` first.
pub fn product(a: &LabeledPolytope, b: &LabeledPolytope) -> LabeledPolytope {
    let geometry = a.geometry().product(b.geometry());
    let labels = a.labels().iter().chain(b.labels()).cloned().collect();
    LabeledPolytope::from_geometry(geometry, labels).expect("product of labeled polytopes is valid")
}
