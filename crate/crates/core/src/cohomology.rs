//! f- and h-vectors, orbifold Betti numbers, Stanley-Reisner presentations
//! and the cohomology rings of simplex bundles over simplices.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::labeled::LabeledPolytope;
use crate::lattice::IntMatrix;
use crate::polytope::{minimal_non_faces, HPolytope};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("malformed vector: {0}")]
    MalformedVector(String),
    #[error("polytope is not smooth: {0}")]
    NotSmooth(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    FToH,
    HToF,
}

/// Face numbers `f_i` (count of `i`-dimensional faces, `f_n = 1`) with the
/// matching `h`-vector, `H(t) = F(t - 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FHVector {
    pub f: Vec<BigInt>,
    pub h: Vec<BigInt>,
}

fn choose(n: usize, k: usize) -> BigInt {
    binomial(BigInt::from(n), BigInt::from(k))
}

pub fn fh_transform(input: &[BigInt], direction: Direction) -> Result<FHVector, CohomologyError> {
    let Some(last) = input.last() else {
        return Err(CohomologyError::MalformedVector("empty vector".into()));
    };
    if !last.is_one() {
        return Err(CohomologyError::MalformedVector(format!(
            "last entry is {last}, expected 1"
        )));
    }
    let n = input.len();
    match direction {
        Direction::FToH => {
            let h = (0..n)
                .map(|k| {
                    (k..n)
                        .map(|i| {
                            let term = &input[i] * choose(i, k);
                            if (i - k) % 2 == 0 {
                                term
                            } else {
                                -term
                            }
                        })
                        .sum()
                })
                .collect();
            Ok(FHVector { f: input.to_vec(), h })
        }
        Direction::HToF => {
            let f = (0..n).map(|i| (i..n).map(|k| &input[k] * choose(k, i)).sum()).collect();
            Ok(FHVector { f, h: input.to_vec() })
        }
    }
}

pub fn fh_vector(p: &HPolytope) -> FHVector {
    let f: Vec<BigInt> = p.f_vector().into_iter().map(BigInt::from).collect();
    fh_transform(&f, Direction::FToH).expect("the polytope itself is the unique top face")
}

/// `(b_0, ..., b_2n)` with `b_2i = h_i` and odd entries zero.
pub fn betti_numbers(delta: &LabeledPolytope) -> Vec<BigInt> {
    let h = fh_vector(delta.geometry()).h;
    let mut b = Vec::with_capacity(2 * h.len() - 1);
    for (i, x) in h.into_iter().enumerate() {
        if i > 0 {
            b.push(BigInt::zero());
        }
        b.push(x);
    }
    b
}

/// Integral cohomology ring of a smooth polytope: one degree-2 generator
/// `x_i` per facet modulo monomial and linear relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SRPresentation {
    pub generators: usize,
    /// Minimal facet sets with empty intersection; each gives `prod x_i = 0`.
    pub monomial_relations: Vec<BTreeSet<usize>>,
    /// Row `j` holds the coefficients `<eta_i, e_j>` of `sum_i <eta_i, e_j> x_i = 0`.
    pub linear_relations: Vec<Vec<BigInt>>,
}

pub fn sr_presentation(delta: &LabeledPolytope) -> Result<SRPresentation, CohomologyError> {
    if let Some(i) = delta.labels().iter().position(|l| !l.is_one()) {
        return Err(CohomologyError::NotSmooth(format!(
            "facet {i} has label {}",
            delta.label(i)
        )));
    }
    let p = delta.geometry();
    let n = p.dim();
    for (v, inc) in p.vertex_data().incidence.iter().enumerate() {
        let cols: Vec<Vec<BigInt>> = inc.iter().map(|&i| delta.conormal(i).to_vec()).collect();
        if !IntMatrix::from_columns(n, &cols).determinant().abs().is_one() {
            return Err(CohomologyError::NotSmooth(format!(
                "vertex {v} has a non-unimodular cone"
            )));
        }
    }
    let linear_relations = (0..n)
        .map(|j| (0..p.facet_count()).map(|i| delta.conormal(i)[j].clone()).collect())
        .collect();
    Ok(SRPresentation {
        generators: p.facet_count(),
        monomial_relations: minimal_non_faces(p),
        linear_relations,
    })
}

/// Elementary symmetric polynomial values `e_1, ..., e_k` of `xs`.
pub fn elementary_symmetric(xs: &[BigInt]) -> Vec<BigInt> {
    let mut e = vec![BigInt::zero(); xs.len() + 1];
    e[0] = BigInt::one();
    for x in xs {
        for m in (1..e.len()).rev() {
            let prev = &e[m - 1] * x;
            e[m] += prev;
        }
    }
    e.remove(0);
    e
}

/// `Z[alpha, beta] / (alpha^(k2+1), prod_i (beta + a_i alpha))` with
/// `a_(k1+1) = 0`, on the basis `alpha^i beta^j`, `i <= k2`, `j <= k1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleRing {
    pub k1: usize,
    pub k2: usize,
    pub a: Vec<BigInt>,
    /// `sigma_1, ..., sigma_k1` of `(a_1, ..., a_k1, 0)`.
    pub sigma: Vec<BigInt>,
}

/// Ring element: coefficient of `alpha^i beta^j` at `i * (k1 + 1) + j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingElement(Vec<BigInt>);

impl RingElement {
    pub fn coefficients(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }
}

pub fn bundle_ring(k1: usize, k2: usize, a: &[BigInt]) -> Result<BundleRing, CohomologyError> {
    if k1 == 0 || k2 == 0 {
        return Err(CohomologyError::PreconditionViolated(
            "k1 and k2 must be at least 1".into(),
        ));
    }
    if a.len() != k1 {
        return Err(CohomologyError::MalformedVector(format!(
            "twist has {} entries, expected {k1}",
            a.len()
        )));
    }
    let mut with_zero = a.to_vec();
    with_zero.push(BigInt::zero());
    let mut sigma = elementary_symmetric(&with_zero);
    sigma.truncate(k1);
    Ok(BundleRing {
        k1,
        k2,
        a: a.to_vec(),
        sigma,
    })
}

impl BundleRing {
    pub fn rank(&self) -> usize {
        (self.k1 + 1) * (self.k2 + 1)
    }

    /// Basis monomials `(i, j)` for `alpha^i beta^j`, in storage order.
    pub fn basis(&self) -> Vec<(usize, usize)> {
        (0..=self.k2).flat_map(|i| (0..=self.k1).map(move |j| (i, j))).collect()
    }

    /// Number of basis monomials in cohomological degree `2d`.
    pub fn graded_rank(&self, d: usize) -> usize {
        self.basis().into_iter().filter(|&(i, j)| i + j == d).count()
    }

    fn index(&self, i: usize, j: usize) -> usize {
        i * (self.k1 + 1) + j
    }

    pub fn zero(&self) -> RingElement {
        RingElement(vec![BigInt::zero(); self.rank()])
    }

    pub fn monomial(&self, i: usize, j: usize) -> RingElement {
        let mut e = self.zero();
        self.add_monomial(&mut e.0, i, j, &BigInt::one());
        e
    }

    pub fn one(&self) -> RingElement {
        self.monomial(0, 0)
    }

    /// `c alpha + d beta`.
    pub fn linear(&self, c: &BigInt, d: &BigInt) -> RingElement {
        let mut e = self.zero();
        e.0[self.index(1, 0)] += c;
        e.0[self.index(0, 1)] += d;
        e
    }

    /// Adds `c alpha^i beta^j` in normal form, reducing powers of `beta`
    /// first and truncating `alpha` afterwards.
    fn add_monomial(&self, out: &mut [BigInt], i: usize, j: usize, c: &BigInt) {
        if c.is_zero() || i > self.k2 {
            return;
        }
        if j <= self.k1 {
            out[self.index(i, j)] += c;
            return;
        }
        // beta^(k1+1) = -sum_m sigma_m beta^(k1+1-m) alpha^m
        let shift = j - self.k1 - 1;
        for (m, s) in self.sigma.iter().enumerate() {
            let m = m + 1;
            if !s.is_zero() {
                self.add_monomial(out, i + m, shift + self.k1 + 1 - m, &(-(c * s)));
            }
        }
    }

    pub fn add(&self, x: &RingElement, y: &RingElement) -> RingElement {
        RingElement(x.0.iter().zip(&y.0).map(|(a, b)| a + b).collect())
    }

    pub fn mul(&self, x: &RingElement, y: &RingElement) -> RingElement {
        let mut out = vec![BigInt::zero(); self.rank()];
        let basis = self.basis();
        for (p, &(i1, j1)) in basis.iter().enumerate() {
            if x.0[p].is_zero() {
                continue;
            }
            for (q, &(i2, j2)) in basis.iter().enumerate() {
                if y.0[q].is_zero() {
                    continue;
                }
                self.add_monomial(&mut out, i1 + i2, j1 + j2, &(&x.0[p] * &y.0[q]));
            }
        }
        RingElement(out)
    }

    pub fn pow(&self, x: &RingElement, e: usize) -> RingElement {
        (0..e).fold(self.one(), |acc, _| self.mul(&acc, x))
    }

    /// Renders an element as a polynomial in `a` (alpha) and `b` (beta).
    pub fn display(&self, x: &RingElement) -> String {
        let mut terms = Vec::new();
        for (p, (i, j)) in self.basis().into_iter().enumerate() {
            let c = &x.0[p];
            if c.is_zero() {
                continue;
            }
            let mono = [(i, "a"), (j, "b")]
                .iter()
                .filter(|(e, _)| *e > 0)
                .map(|(e, s)| if *e == 1 { s.to_string() } else { format!("{s}^{e}") })
                .collect::<Vec<_>>()
                .join("");
            let term = match (mono.is_empty(), c.abs().is_one()) {
                (true, _) => c.abs().to_string(),
                (false, true) => mono,
                (false, false) => format!("{}{}", c.abs(), mono),
            };
            terms.push((c.is_negative(), term));
        }
        if terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (neg, t)) in terms.into_iter().enumerate() {
            match (k, neg) {
                (0, true) => s.push('-'),
                (0, false) => {}
                (_, true) => s.push_str(" - "),
                (_, false) => s.push_str(" + "),
            }
            s.push_str(&t);
        }
        s
    }
}

/// Base change `(A, B, C, D)`: `A alpha + B beta` and `C alpha + D beta`.
pub type Quadruple = (i64, i64, i64, i64);

/// Search for `(A alpha + B beta)^(k2+1) = 0 = (C alpha + D beta)^(k1+1)` with
/// `AD - BC = +-1` and all entries in `[-bound, bound]`. Candidates are
/// tried by L1 distance from `(1, 0, 0, 1)`, then lexicographically.
pub fn find_product_generators(ring: &BundleRing, bound: i64) -> Option<Quadruple> {
    let range: Vec<i64> = (-bound..=bound).collect();
    let vanishing = |e: usize| -> HashSet<(i64, i64)> {
        let mut set = HashSet::new();
        for &x in &range {
            for &y in &range {
                let v = ring.linear(&BigInt::from(x), &BigInt::from(y));
                if ring.pow(&v, e).is_zero() {
                    set.insert((x, y));
                }
            }
        }
        set
    };
    let first = vanishing(ring.k2 + 1);
    let second = vanishing(ring.k1 + 1);
    let mut candidates: Vec<(i64, Quadruple)> = Vec::new();
    for &(a, b) in &first {
        for &(c, d) in &second {
            if (a * d - b * c).abs() == 1 {
                let dist = (a - 1).abs() + b.abs() + c.abs() + (d - 1).abs();
                candidates.push((dist, (a, b, c, d)));
            }
        }
    }
    candidates.into_iter().min().map(|(_, q)| q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductCase {
    /// `k1 > k2`.
    FiberLarger,
    /// `k1 < k2`.
    BaseLarger,
    /// `k1 = k2`.
    Equal,
}

impl ProductCase {
    pub fn number(self) -> u8 {
        match self {
            ProductCase::FiberLarger => 1,
            ProductCase::BaseLarger => 2,
            ProductCase::Equal => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductReport {
    pub is_product: bool,
    pub case: ProductCase,
    pub sigma: Vec<BigInt>,
    pub detail: String,
}

impl fmt::Display for ProductReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.is_product { "product" } else { "not product" };
        write!(f, "{verdict}; Case {}: {}", self.case.number(), self.detail)
    }
}

fn signed(x: &BigInt) -> String {
    if x.is_negative() {
        format!("\u{2212}{}", x.abs())
    } else {
        x.to_string()
    }
}

fn signed_rat(x: &BigRational) -> String {
    if x.is_integer() {
        signed(&x.to_integer())
    } else {
        format!("{}/{}", signed(x.numer()), x.denom())
    }
}

/// Decides whether the bundle ring with twist `a` (all entries `<= 0`,
/// `k2 >= 2`) admits the generator change of a product, following the
/// three-way case split on `k1` against `k2`.
pub fn is_ring_product(k1: usize, k2: usize, a: &[BigInt]) -> Result<ProductReport, CohomologyError> {
    if k2 < 2 {
        return Err(CohomologyError::PreconditionViolated(format!(
            "k2 = {k2} < 2; use the generator search directly"
        )));
    }
    if let Some(x) = a.iter().find(|x| x.is_positive()) {
        return Err(CohomologyError::PreconditionViolated(format!(
            "twist entry {x} is positive; normalize first"
        )));
    }
    let ring = bundle_ring(k1, k2, a)?;
    let sigma1 = ring.sigma[0].clone();
    let sigma2 = ring.sigma.get(1).cloned().unwrap_or_default();
    let k = BigInt::from(k1);
    let k_plus = BigInt::from(k1 + 1);
    let square_sum: BigInt = a.iter().map(|x| x * x).sum();
    let sigma = ring.sigma.clone();
    let report = |is_product: bool, case: ProductCase, detail: String| ProductReport {
        is_product,
        case,
        sigma: sigma.clone(),
        detail,
    };

    if k1 < k2 {
        return Ok(if sigma1.is_zero() {
            report(
                true,
                ProductCase::BaseLarger,
                "σ₁ = 0 and all aᵢ ≤ 0 force a = 0".into(),
            )
        } else {
            report(false, ProductCase::BaseLarger, format!("σ₁ = {} ≠ 0", signed(&sigma1)))
        });
    }

    // Cases 1 and 3: sigma_1 = (k1+1) c and sigma_2 = k1 (k1+1) c^2 / 2, with c
    // integral in case 1 and rational in case 3.
    let case = if k1 > k2 {
        ProductCase::FiberLarger
    } else {
        ProductCase::Equal
    };
    let c = BigRational::new(sigma1.clone(), k_plus.clone());
    if case == ProductCase::FiberLarger && !c.is_integer() {
        return Ok(report(
            false,
            case,
            format!(
                "σ₁ = {}, need C with {}C = {}, no integer C",
                signed(&sigma1),
                k_plus,
                signed(&sigma1)
            ),
        ));
    }
    let name = if case == ProductCase::FiberLarger { "C" } else { "C/D" };
    let want_sigma2 = BigRational::from_integer(&k * &k_plus) * &c * &c / BigRational::from_integer(2.into());
    if BigRational::from_integer(sigma2.clone()) != want_sigma2 {
        return Ok(report(
            false,
            case,
            format!(
                "σ₁ = {} gives {name} = {}, but σ₂ = {} ≠ {}",
                signed(&sigma1),
                signed_rat(&c),
                signed(&sigma2),
                signed_rat(&want_sigma2)
            ),
        ));
    }
    if !c.is_zero() {
        let lhs = &sigma1 * &sigma1;
        let rhs = &k * &square_sum;
        return Ok(report(
            false,
            case,
            format!(
                "{name} = {} ≠ 0, so Cauchy–Schwarz σ₁² = {lhs} ≤ k₁Σaᵢ² = {rhs} would need {name}²(k₁+1)² ≤ k₁(k₁+1){name}²",
                signed_rat(&c)
            ),
        ));
    }
    Ok(report(true, case, "σ₁ = σ₂ = 0 and all aᵢ ≤ 0 force a = 0".into()))
}

/// Products of basis monomials, keyed by the exponent pairs of the factors.
pub type MultiplicationTable = HashMap<((usize, usize), (usize, usize)), RingElement>;

/// Normal forms of all pairwise products, for checking associativity and
/// commutativity on the basis.
pub fn multiplication_table(ring: &BundleRing) -> MultiplicationTable {
    let basis = ring.basis();
    let mut table = HashMap::new();
    for &x in &basis {
        for &y in &basis {
            table.insert((x, y), ring.mul(&ring.monomial(x.0, x.1), &ring.monomial(y.0, y.1)));
        }
    }
    table
}
